use std::collections::HashMap;

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, IndexMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Vertex,
    Edge,
    Face,
}

impl ComponentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Vertex => "vertex",
            Self::Edge => "edge",
            Self::Face => "face",
        }
    }
}

/// Which coarse components to build from the interface classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentMode {
    /// One component per vertex, edge and face class.
    Gdsw,
    /// One component per vertex class; edge and face classes are shared
    /// among the vertices whose subdomain set contains theirs.
    Rgdsw,
}

/// A connected set of interface nodes sharing one subdomain set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceClass {
    pub dofs: IndexMap,
    /// Sorted ids of the subdomains whose closure contains the class.
    pub subdomains: Vec<usize>,
    pub kind: ComponentKind,
}

/// Interface component `Γ_j` with its partition-of-unity weights `D_Γj`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceComponent {
    pub dofs: IndexMap,
    pub kind: ComponentKind,
    /// Classes merged into this component; the first one is the anchor.
    pub classes: Vec<usize>,
    /// Weight of dof `k` is `1 / denominators[k]`.
    denominators: Vec<u32>,
}

impl InterfaceComponent {
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        1.0 / self.denominators[k] as f64
    }

    pub fn denominators(&self) -> &[u32] {
        &self.denominators
    }
}

/// Interior/interface split of the dofs plus the interface classes and the
/// coarse components built from them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceStructure {
    num_dofs: usize,
    dofs_per_node: usize,
    pub interior: IndexMap,
    pub interface: IndexMap,
    /// Subdomain-set size of every interface dof, aligned with `interface`.
    pub multiplicity: Vec<usize>,
    pub classes: Vec<InterfaceClass>,
    /// Empty until [`build_components`] runs.
    pub components: Vec<InterfaceComponent>,
    pub mode: Option<ComponentMode>,
    /// Interior dofs of each nonoverlapping subdomain (`I_i`).
    pub subdomain_interiors: Vec<IndexMap>,
}

impl InterfaceStructure {
    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn dofs_per_node(&self) -> usize {
        self.dofs_per_node
    }

    pub fn count_kind(&self, kind: ComponentKind) -> usize {
        self.classes.iter().filter(|c| c.kind == kind).count()
    }

    /// `Σ_j D_Γj(dof)` over all components containing `dof`.
    pub fn weight_sum(&self, dof: usize) -> f64 {
        self.components
            .iter()
            .filter_map(|c| c.dofs.position(dof).map(|k| c.weight(k)))
            .sum()
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.any(|b| b == s))
}

/// Splits the dofs into interior and interface and groups the interface into
/// classes.
///
/// A node's subdomain set holds its owner and the owners of its neighbours
/// in the node adjacency graph of `A`; the node is on the interface when
/// that set has two or more members. Interface nodes with identical sets
/// are split into connected classes, numbered by smallest dof.
///
/// Class kind: a set of two subdomains is a face; larger sets are vertices
/// when they have at least five members or no other class has a strictly
/// larger set containing them, and edges otherwise.
pub fn classify_interface<T: Scalar>(a: &CsrMatrix<T>, part: &Partition) -> InterfaceStructure {
    let dpn = part.dofs_per_node();
    let graph = Graph::node_graph(a, dpn);
    let nn = part.num_nodes();

    let sets: Vec<Vec<usize>> = (0..nn)
        .map(|v| {
            let mut s: Vec<usize> = std::iter::once(part.node_owner(v))
                .chain(graph.neighbors(v).iter().map(|&u| part.node_owner(u)))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();

    let mut interior = Vec::new();
    let mut interface = Vec::new();
    let mut multiplicity = Vec::new();
    let mut subdomain_interiors = vec![Vec::new(); part.num_subdomains()];
    for v in 0..nn {
        let dofs = (v * dpn)..(v * dpn + dpn);
        if sets[v].len() >= 2 {
            interface.extend(dofs);
            multiplicity.extend(std::iter::repeat(sets[v].len()).take(dpn));
        } else {
            subdomain_interiors[part.node_owner(v)].extend(dofs.clone());
            interior.extend(dofs);
        }
    }

    // Connected classes of equal subdomain sets.
    let mut class_of = vec![usize::MAX; nn];
    let mut class_nodes: Vec<Vec<usize>> = Vec::new();
    for v in 0..nn {
        if sets[v].len() < 2 || class_of[v] != usize::MAX {
            continue;
        }
        let id = class_nodes.len();
        let mut members = vec![v];
        class_of[v] = id;
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for &w in graph.neighbors(u) {
                if class_of[w] == usize::MAX && sets[w] == sets[v] {
                    class_of[w] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        class_nodes.push(members);
    }

    let mut distinct: HashMap<&[usize], bool> = HashMap::new();
    for nodes in &class_nodes {
        distinct.insert(&sets[nodes[0]], true);
    }
    let keys: Vec<&[usize]> = distinct.keys().copied().collect();
    for s in &keys {
        let maximal = !keys
            .iter()
            .any(|o| o.len() > s.len() && is_subset(s, o));
        distinct.insert(s, maximal);
    }

    let classes = class_nodes
        .iter()
        .map(|nodes| {
            let set = &sets[nodes[0]];
            let kind = match set.len() {
                2 => ComponentKind::Face,
                m if m >= 5 || distinct[set.as_slice()] => ComponentKind::Vertex,
                _ => ComponentKind::Edge,
            };
            let dofs = nodes
                .iter()
                .flat_map(|&v| (v * dpn)..(v * dpn + dpn))
                .collect();
            InterfaceClass {
                dofs: IndexMap::new(dofs).expect("sorted nodes give sorted dofs"),
                subdomains: set.clone(),
                kind,
            }
        })
        .collect();

    InterfaceStructure {
        num_dofs: part.num_dofs(),
        dofs_per_node: dpn,
        interior: IndexMap::new(interior).expect("ascending"),
        interface: IndexMap::new(interface).expect("ascending"),
        multiplicity,
        classes,
        components: Vec::new(),
        mode: None,
        subdomain_interiors: subdomain_interiors
            .into_iter()
            .map(|d| IndexMap::new(d).expect("ascending"))
            .collect(),
    }
}

/// Builds the coarse components for `mode`.
///
/// `Gdsw` uses the classes as they are, all weights one. `Rgdsw` keeps one
/// component per vertex class; every edge or face class `C` joins each
/// vertex `V` with `subdomains(C) ⊆ subdomains(V)` and gets weight
/// `1 / (number of such vertices)`. A non-vertex class no vertex absorbs
/// keeps a component of its own.
pub fn build_components(
    structure: &InterfaceStructure,
    mode: ComponentMode,
) -> Result<InterfaceStructure> {
    let mut out = structure.clone();
    out.mode = Some(mode);
    out.components = match mode {
        ComponentMode::Gdsw => structure
            .classes
            .iter()
            .enumerate()
            .map(|(c, cls)| InterfaceComponent {
                dofs: cls.dofs.clone(),
                kind: cls.kind,
                classes: vec![c],
                denominators: vec![1; cls.dofs.len()],
            })
            .collect(),
        ComponentMode::Rgdsw => reduced_components(structure)?,
    };
    Ok(out)
}

fn reduced_components(s: &InterfaceStructure) -> Result<Vec<InterfaceComponent>> {
    let vertices: Vec<usize> = (0..s.classes.len())
        .filter(|&c| s.classes[c].kind == ComponentKind::Vertex)
        .collect();
    if vertices.is_empty() && !s.classes.is_empty() {
        return Err(Error::NoVertexComponents);
    }
    let mut absorbed_by: Vec<Vec<usize>> = vec![Vec::new(); s.classes.len()];
    for (c, cls) in s.classes.iter().enumerate() {
        if cls.kind == ComponentKind::Vertex {
            continue;
        }
        for (vi, &v) in vertices.iter().enumerate() {
            if is_subset(&cls.subdomains, &s.classes[v].subdomains) {
                absorbed_by[c].push(vi);
            }
        }
    }

    let mut members: Vec<Vec<usize>> = vertices.iter().map(|&v| vec![v]).collect();
    let mut orphans = Vec::new();
    for (c, by) in absorbed_by.iter().enumerate() {
        if s.classes[c].kind == ComponentKind::Vertex {
            continue;
        }
        if by.is_empty() {
            orphans.push(c);
        }
        for &vi in by {
            members[vi].push(c);
        }
    }
    if !orphans.is_empty() {
        log::warn!(
            "{} interface classes are not covered by any vertex; they keep their own coarse components",
            orphans.len()
        );
    }

    let component = |classes: Vec<usize>| {
        let mut entries: Vec<(usize, u32)> = Vec::new();
        for &c in &classes {
            let denom = if s.classes[c].kind == ComponentKind::Vertex {
                1
            } else {
                absorbed_by[c].len().max(1) as u32
            };
            entries.extend(s.classes[c].dofs.iter().map(|d| (d, denom)));
        }
        entries.sort_unstable_by_key(|e| e.0);
        InterfaceComponent {
            dofs: IndexMap::new(entries.iter().map(|e| e.0).collect())
                .expect("classes are disjoint"),
            kind: s.classes[classes[0]].kind,
            classes,
            denominators: entries.iter().map(|e| e.1).collect(),
        }
    };
    let mut comps: Vec<InterfaceComponent> = members.into_iter().map(component).collect();
    comps.extend(orphans.into_iter().map(|c| component(vec![c])));
    Ok(comps)
}

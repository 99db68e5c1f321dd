//! Nonoverlapping box partitions, algebraic overlap and the interface
//! structure the coarse space is built on.

mod interface;
mod overlap;
mod partition;

use std::io::Write;

pub use interface::{
    build_components, classify_interface, ComponentKind, ComponentMode, InterfaceClass,
    InterfaceComponent, InterfaceStructure,
};
pub use overlap::{extend_overlap, OverlapSets};
pub use partition::{box_partition, box_ranges, Partition};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Everything the preconditioner needs from the decomposition, computed
/// from the sparsity pattern and the partition only.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub partition: Partition,
    pub overlap: OverlapSets,
    /// Interface classes with components built for the requested mode.
    pub interface: InterfaceStructure,
}

impl Decomposition {
    pub fn new<T: Scalar>(
        a: &CsrMatrix<T>,
        partition: Partition,
        overlap_width: usize,
        mode: ComponentMode,
    ) -> Result<Self> {
        let overlap = extend_overlap(a, &partition, overlap_width);
        let classes = classify_interface(a, &partition);
        let interface = build_components(&classes, mode)?;
        Ok(Self {
            partition,
            overlap,
            interface,
        })
    }

    pub fn num_subdomains(&self) -> usize {
        self.partition.num_subdomains()
    }

    /// CSV dump, one row per (dof, component) pair; interior dofs and
    /// interface dofs outside every component get `component = -1`.
    ///
    /// Columns: `dof,owner,region,component,kind,weight`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let s = &self.interface;
        let mut memberships: Vec<Vec<(usize, f64)>> = vec![Vec::new(); s.num_dofs()];
        for (c, comp) in s.components.iter().enumerate() {
            for (k, d) in comp.dofs.iter().enumerate() {
                memberships[d].push((c, comp.weight(k)));
            }
        }
        writeln!(w, "dof,owner,region,component,kind,weight")?;
        for (d, m) in memberships.iter().enumerate() {
            let owner = self.partition.owner(d);
            if s.interface.contains(d) && !m.is_empty() {
                for &(c, wgt) in m {
                    writeln!(
                        w,
                        "{d},{owner},interface,{c},{},{wgt}",
                        s.components[c].kind.as_str()
                    )?;
                }
            } else {
                let region = if s.interface.contains(d) {
                    "interface"
                } else {
                    "interior"
                };
                writeln!(w, "{d},{owner},{region},-1,none,0")?;
            }
        }
        Ok(())
    }
}

//! Run configuration: a flat `key = value` text format with dotted keys.
//!
//! ```text
//! # comment
//! problem.kind = elasticity3d
//! problem.grid = 13x13x13
//! partition = 2x2x2
//! local_solver = fast_ilu(0, 3, 5)
//! krylov.restart = 30
//! ```
//!
//! Every key has a default, so an empty file is a valid configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use gdsw_core::krylov::{GmresVariant, KrylovConfig, Orthogonalization};
use gdsw_core::local::OrderingKind;
use gdsw_core::model::{BoundaryKind, Material, ProblemKind};
use gdsw_core::schwarz::{CoarseSpace, LocalSolverKind, Precision, SchwarzConfig};

use crate::error::{BenchError, Result};

/// All keys accepted by [`RunConfig::set`], in the order [`RunConfig::to_pairs`] emits them.
pub const KEYS: &[&str] = &[
    "problem.kind",
    "problem.grid",
    "problem.boundary",
    "problem.youngs_modulus",
    "problem.poisson_ratio",
    "partition",
    "overlap",
    "coarse",
    "local_solver",
    "ordering",
    "precision",
    "krylov.restart",
    "krylov.rel_tol",
    "krylov.max_iters",
    "krylov.variant",
    "krylov.orthogonalization",
    "devices",
    "threads",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Nodes per axis.
    pub grid: [usize; 3],
    pub boundary: BoundaryKind,
    /// Ignored for Laplace.
    pub material: Material,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub partition: [usize; 3],
    pub overlap: usize,
    pub coarse: CoarseSpace,
    pub local_solver: LocalSolverKind,
    pub ordering: OrderingKind,
    pub precision: Precision,
    pub krylov: KrylovConfig,
    /// Number of groups the subdomains are split into for reporting.
    pub devices: usize,
    pub threads: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec {
                kind: ProblemKind::Laplace3d,
                grid: [9, 9, 9],
                boundary: BoundaryKind::Dirichlet,
                material: Material::default(),
            },
            partition: [2, 2, 2],
            overlap: 1,
            coarse: CoarseSpace::Rgdsw,
            local_solver: LocalSolverKind::ExactLu,
            ordering: OrderingKind::NestedDissection,
            precision: Precision::Double,
            krylov: KrylovConfig::default(),
            devices: 1,
            threads: 1,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Parses a configuration file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                BenchError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| BenchError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key. Validation of cross-key consistency is left to [`RunConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem.kind" => self.problem.kind = parse_problem_kind(value)?,
            "problem.grid" => self.problem.grid = parse_dims(value)?,
            "problem.boundary" => self.problem.boundary = parse_boundary(value)?,
            "problem.youngs_modulus" => self.problem.material.youngs_modulus = parse_num(key, value)?,
            "problem.poisson_ratio" => self.problem.material.poisson_ratio = parse_num(key, value)?,
            "partition" => self.partition = parse_dims(value)?,
            "overlap" => self.overlap = parse_num(key, value)?,
            "coarse" => self.coarse = parse_coarse(value)?,
            "local_solver" => self.local_solver = parse_local_solver(value)?,
            "ordering" => self.ordering = parse_ordering(value)?,
            "precision" => self.precision = parse_precision(value)?,
            "krylov.restart" => self.krylov.restart = parse_num(key, value)?,
            "krylov.rel_tol" => self.krylov.rel_tol = parse_num(key, value)?,
            "krylov.max_iters" => self.krylov.max_iters = parse_num(key, value)?,
            "krylov.variant" => self.krylov.variant = parse_variant(value)?,
            "krylov.orthogonalization" => self.krylov.orthogonalization = parse_orth(value)?,
            "devices" => self.devices = parse_num(key, value)?,
            "threads" => self.threads = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            _ => return Err(BenchError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.problem.grid.iter().any(|&g| g < 2) {
            return bad(format!("grid {} needs at least 2 nodes per axis", dims(self.problem.grid)));
        }
        if self.partition.iter().any(|&p| p == 0) {
            return bad("partition counts must be positive".into());
        }
        for axis in 0..3 {
            if self.partition[axis] > self.problem.grid[axis] {
                return bad(format!(
                    "partition {} is finer than the grid {}",
                    dims(self.partition),
                    dims(self.problem.grid)
                ));
            }
        }
        if self.coarse == CoarseSpace::Rgdsw
            && self.partition.iter().filter(|&&p| p >= 2).count() < 2
        {
            return bad(format!(
                "rgdsw needs at least 2 subdomains along at least 2 axes, got {}",
                dims(self.partition)
            ));
        }
        if self.devices == 0 || self.devices > self.num_subdomains() {
            return bad(format!(
                "devices must lie in 1..={}, got {}",
                self.num_subdomains(),
                self.devices
            ));
        }
        if self.threads == 0 {
            return bad("threads must be positive".into());
        }
        if let LocalSolverKind::FastIlu {
            sweeps,
            trisolve_iters,
            ..
        } = self.local_solver
        {
            if sweeps == 0 || trisolve_iters == 0 {
                return bad("fast_ilu sweeps and iterations must be positive".into());
            }
        }
        self.krylov.validate()?;
        Ok(())
    }

    pub fn num_subdomains(&self) -> usize {
        self.partition.iter().product()
    }

    pub fn schwarz(&self) -> SchwarzConfig {
        SchwarzConfig {
            coarse: self.coarse,
            local_solver: self.local_solver,
            ordering: self.ordering,
            precision: self.precision,
        }
    }

    /// Every key with its current value; [`RunConfig::parse`] of the joined
    /// pairs reproduces `self`.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let p = &self.problem;
        let k = &self.krylov;
        let values = [
            problem_kind_name(p.kind).to_string(),
            dims(p.grid),
            boundary_name(p.boundary).to_string(),
            p.material.youngs_modulus.to_string(),
            p.material.poisson_ratio.to_string(),
            dims(self.partition),
            self.overlap.to_string(),
            coarse_name(self.coarse).to_string(),
            local_solver_name(self.local_solver),
            ordering_name(self.ordering).to_string(),
            precision_name(self.precision).to_string(),
            k.restart.to_string(),
            k.rel_tol.to_string(),
            k.max_iters.to_string(),
            variant_name(k.variant).to_string(),
            orth_name(k.orthogonalization).to_string(),
            self.devices.to_string(),
            self.threads.to_string(),
            self.seed.to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.to_pairs();
        for key in KEYS {
            writeln!(f, "{key} = {}", pairs[*key])?;
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| BenchError::Config(format!("invalid value `{value}` for `{key}`")))
}

/// `N` (cube) or `NXxNYxNZ`.
pub fn parse_dims(value: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = value.split(['x', 'X']).map(str::trim).collect();
    let nums = parts
        .iter()
        .map(|p| parse_num::<usize>("dimensions", p))
        .collect::<Result<Vec<_>>>()?;
    match nums.as_slice() {
        [n] => Ok([*n; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(BenchError::Config(format!("expected N or AxBxC, got `{value}`"))),
    }
}

pub fn dims(d: [usize; 3]) -> String {
    format!("{}x{}x{}", d[0], d[1], d[2])
}

fn unknown(what: &str, value: &str, choices: &str) -> BenchError {
    BenchError::Config(format!("unknown {what} `{value}` (expected {choices})"))
}

fn parse_problem_kind(v: &str) -> Result<ProblemKind> {
    match v {
        "laplace3d" => Ok(ProblemKind::Laplace3d),
        "elasticity3d" => Ok(ProblemKind::Elasticity3d),
        _ => Err(unknown("problem", v, "laplace3d, elasticity3d")),
    }
}

pub fn problem_kind_name(k: ProblemKind) -> &'static str {
    match k {
        ProblemKind::Laplace3d => "laplace3d",
        ProblemKind::Elasticity3d => "elasticity3d",
    }
}

fn parse_boundary(v: &str) -> Result<BoundaryKind> {
    match v {
        "dirichlet" => Ok(BoundaryKind::Dirichlet),
        "neumann" => Ok(BoundaryKind::Neumann),
        _ => Err(unknown("boundary", v, "dirichlet, neumann")),
    }
}

pub fn boundary_name(b: BoundaryKind) -> &'static str {
    match b {
        BoundaryKind::Dirichlet => "dirichlet",
        BoundaryKind::Neumann => "neumann",
    }
}

fn parse_coarse(v: &str) -> Result<CoarseSpace> {
    match v {
        "none" => Ok(CoarseSpace::None),
        "gdsw" => Ok(CoarseSpace::Gdsw),
        "rgdsw" => Ok(CoarseSpace::Rgdsw),
        _ => Err(unknown("coarse space", v, "none, gdsw, rgdsw")),
    }
}

pub fn coarse_name(c: CoarseSpace) -> &'static str {
    match c {
        CoarseSpace::None => "none",
        CoarseSpace::Gdsw => "gdsw",
        CoarseSpace::Rgdsw => "rgdsw",
    }
}

/// `exact_lu`, `ilu(k)` (also `ilu_k(k)`), or `fast_ilu(k, sweeps, iters)`.
pub fn parse_local_solver(v: &str) -> Result<LocalSolverKind> {
    let v: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    if v == "exact_lu" {
        return Ok(LocalSolverKind::ExactLu);
    }
    let err = || unknown("local solver", &v, "exact_lu, ilu(k), fast_ilu(k,sweeps,iters)");
    let (name, args) = v.strip_suffix(')').and_then(|s| s.split_once('(')).ok_or_else(err)?;
    let args = args
        .split(',')
        .map(|a| a.parse::<usize>().map_err(|_| err()))
        .collect::<Result<Vec<_>>>()?;
    match (name, args.as_slice()) {
        ("ilu" | "ilu_k", [level]) => Ok(LocalSolverKind::Ilu { level: *level }),
        ("fast_ilu", [level, sweeps, trisolve_iters]) => Ok(LocalSolverKind::FastIlu {
            level: *level,
            sweeps: *sweeps,
            trisolve_iters: *trisolve_iters,
        }),
        _ => Err(err()),
    }
}

pub fn local_solver_name(k: LocalSolverKind) -> String {
    match k {
        LocalSolverKind::ExactLu => "exact_lu".into(),
        LocalSolverKind::Ilu { level } => format!("ilu({level})"),
        LocalSolverKind::FastIlu {
            level,
            sweeps,
            trisolve_iters,
        } => format!("fast_ilu({level},{sweeps},{trisolve_iters})"),
    }
}

fn parse_ordering(v: &str) -> Result<OrderingKind> {
    match v {
        "natural" => Ok(OrderingKind::Natural),
        "nested_dissection" | "nd" => Ok(OrderingKind::NestedDissection),
        _ => Err(unknown("ordering", v, "natural, nested_dissection")),
    }
}

pub fn ordering_name(o: OrderingKind) -> &'static str {
    match o {
        OrderingKind::Natural => "natural",
        OrderingKind::NestedDissection => "nested_dissection",
    }
}

fn parse_precision(v: &str) -> Result<Precision> {
    match v {
        "double" => Ok(Precision::Double),
        "single" => Ok(Precision::Single),
        _ => Err(unknown("precision", v, "double, single")),
    }
}

pub fn precision_name(p: Precision) -> &'static str {
    match p {
        Precision::Double => "double",
        Precision::Single => "single",
    }
}

fn parse_variant(v: &str) -> Result<GmresVariant> {
    match v {
        "classic" => Ok(GmresVariant::Classic),
        "single_reduce" => Ok(GmresVariant::SingleReduce),
        _ => Err(unknown("GMRES variant", v, "classic, single_reduce")),
    }
}

fn variant_name(v: GmresVariant) -> &'static str {
    match v {
        GmresVariant::Classic => "classic",
        GmresVariant::SingleReduce => "single_reduce",
    }
}

fn parse_orth(v: &str) -> Result<Orthogonalization> {
    match v {
        "mgs" => Ok(Orthogonalization::Mgs),
        "cgs2" => Ok(Orthogonalization::Cgs2),
        _ => Err(unknown("orthogonalization", v, "mgs, cgs2")),
    }
}

fn orth_name(o: Orthogonalization) -> &'static str {
    match o {
        Orthogonalization::Mgs => "mgs",
        Orthogonalization::Cgs2 => "cgs2",
    }
}

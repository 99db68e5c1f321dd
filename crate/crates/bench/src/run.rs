//! Single runs and parameter sweeps.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use gdsw_core::decomposition::{box_partition, ComponentMode, Decomposition};
use gdsw_core::krylov::{gmres, LinearOperator};
use gdsw_core::model::{assemble_elasticity3d, assemble_laplace3d, Grid3D, ProblemInstance, ProblemKind};
use gdsw_core::schwarz::{setup_symbolic, CoarseSpace, LocalSolverKind, Preconditioner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{
    coarse_name, dims, local_solver_name, ordering_name, parse_dims, parse_local_solver,
    precision_name, problem_kind_name, ProblemSpec, RunConfig,
};
use crate::error::{BenchError, Result};

/// Outcome of one run. Failed runs keep the configuration echo and carry
/// `error_msg`; their numeric fields are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Every configuration key with its value.
    pub config: BTreeMap<String, String>,
    pub problem: String,
    pub n: usize,
    pub n_gamma: usize,
    pub n_coarse: usize,
    pub px: usize,
    pub py: usize,
    pub pz: usize,
    pub overlap: usize,
    pub coarse: String,
    pub local_solver: String,
    pub ordering: String,
    pub precision: String,
    pub iterations: usize,
    pub converged: bool,
    pub t_symbolic: f64,
    pub t_numeric: f64,
    pub t_solve: f64,
    /// `‖x − x*‖₂ / ‖x*‖₂` against the manufactured solution.
    pub true_error: Option<f64>,
    pub final_relative_residual: Option<f64>,
    pub reduction_count: usize,
    /// GMRES cycle starts, including the final true-residual check.
    pub cycles: usize,
    /// Nonzeros of all local factors together.
    pub factor_nnz: usize,
    pub max_local_size: usize,
    pub devices: usize,
    /// Number of subdomains assigned to each device.
    pub subdomains_per_device: Vec<usize>,
    pub error_msg: Option<String>,
}

impl RunRecord {
    fn skeleton(cfg: &RunConfig) -> Self {
        Self {
            config: cfg.to_pairs(),
            problem: problem_kind_name(cfg.problem.kind).into(),
            n: 0,
            n_gamma: 0,
            n_coarse: 0,
            px: cfg.partition[0],
            py: cfg.partition[1],
            pz: cfg.partition[2],
            overlap: cfg.overlap,
            coarse: coarse_name(cfg.coarse).into(),
            local_solver: local_solver_name(cfg.local_solver),
            ordering: ordering_name(cfg.ordering).into(),
            precision: precision_name(cfg.precision).into(),
            iterations: 0,
            converged: false,
            t_symbolic: 0.0,
            t_numeric: 0.0,
            t_solve: 0.0,
            true_error: None,
            final_relative_residual: None,
            reduction_count: 0,
            cycles: 0,
            factor_nnz: 0,
            max_local_size: 0,
            devices: cfg.devices,
            subdomains_per_device: device_groups(cfg.num_subdomains(), cfg.devices),
            error_msg: None,
        }
    }
}

/// A record together with the computed solution (absent on failure).
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub solution: Option<Vec<f64>>,
}

/// Contiguous split of `subdomains` into `devices` groups whose sizes differ by at most one.
pub fn device_groups(subdomains: usize, devices: usize) -> Vec<usize> {
    if devices == 0 {
        return Vec::new();
    }
    (0..devices)
        .map(|d| (d + 1) * subdomains / devices - d * subdomains / devices)
        .collect()
}

pub fn assemble(spec: &ProblemSpec) -> Result<ProblemInstance> {
    let [nx, ny, nz] = spec.grid;
    Ok(match spec.kind {
        ProblemKind::Laplace3d => assemble_laplace3d(Grid3D::new(nx, ny, nz, 1)?, spec.boundary)?,
        ProblemKind::Elasticity3d => {
            assemble_elasticity3d(Grid3D::new(nx, ny, nz, 3)?, spec.material, spec.boundary)?
        }
    })
}

/// Manufactured solution: uniform in `[-1, 1)` from the seed.
pub fn manufactured_solution(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Assembles, sets up and solves. Errors become failure records.
pub fn run_single(cfg: &RunConfig) -> RunRecord {
    execute(cfg, None).record
}

/// Like [`run_single`], reusing `problem` when given. The caller guarantees
/// it was assembled from `cfg.problem`.
pub fn execute(cfg: &RunConfig, problem: Option<&ProblemInstance>) -> RunOutcome {
    let mut record = RunRecord::skeleton(cfg);
    match try_execute(cfg, problem, &mut record) {
        Ok(x) => RunOutcome {
            record,
            solution: Some(x),
        },
        Err(e) => {
            log::warn!("run failed: {e}");
            record.converged = false;
            record.error_msg = Some(e.to_string());
            RunOutcome {
                record,
                solution: None,
            }
        }
    }
}

fn try_execute(
    cfg: &RunConfig,
    problem: Option<&ProblemInstance>,
    record: &mut RunRecord,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    pool.install(|| {
        let owned;
        let p = match problem {
            Some(p) => p,
            None => {
                owned = assemble(&cfg.problem)?;
                &owned
            }
        };
        let a = &p.matrix;
        record.n = a.nrows();
        log::info!(
            "{} n={} partition={} coarse={} local={}",
            record.problem,
            record.n,
            dims(cfg.partition),
            record.coarse,
            record.local_solver
        );

        let t = Instant::now();
        let mode = match cfg.coarse {
            CoarseSpace::Gdsw => ComponentMode::Gdsw,
            CoarseSpace::Rgdsw => ComponentMode::Rgdsw,
            // Components are not used without a coarse level.
            CoarseSpace::None => ComponentMode::Gdsw,
        };
        let [px, py, pz] = cfg.partition;
        let partition = box_partition(&p.grid, &p.nodes, px, py, pz)?;
        let decomposition = Decomposition::new(a, partition, cfg.overlap, mode)?;
        record.n_gamma = decomposition.interface.interface.len();
        let skeleton = Arc::new(setup_symbolic(a, &decomposition, &cfg.schwarz())?);
        record.t_symbolic = t.elapsed().as_secs_f64();
        record.factor_nnz = skeleton.local_factor_nnz();
        record.max_local_size = skeleton.max_local_size();

        let t = Instant::now();
        let m = Preconditioner::setup(skeleton, a, Some(&p.nullspace))?;
        record.t_numeric = t.elapsed().as_secs_f64();
        record.n_coarse = m.coarse_dim();

        let x_star = manufactured_solution(record.n, cfg.seed);
        let mut b = vec![0.0; record.n];
        a.apply(&x_star, &mut b)?;
        let (x, report) = gmres(a, Some(&m), &b, None, &cfg.krylov)?;
        record.t_solve = report.timings.solve;
        record.iterations = report.iterations;
        record.converged = report.converged;
        record.reduction_count = report.reduction_count;
        record.cycles = report.cycles;
        record.final_relative_residual = Some(report.final_relative_residual);
        let num: f64 = x.iter().zip(&x_star).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = x_star.iter().map(|v| v * v).sum();
        record.true_error = Some((num / den).sqrt());
        Ok(x)
    })
}

/// Parameters a sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// Subdomain count at fixed global size; values are `N` (cube root of a
    /// perfect cube count, e.g. `27`) or `AxBxC`.
    Subdomains,
    IluLevel,
    Overlap,
    Precision,
    LocalSolver,
    Devices,
}

impl std::str::FromStr for SweepAxis {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "subdomains" => SweepAxis::Subdomains,
            "ilu_level" => SweepAxis::IluLevel,
            "overlap" => SweepAxis::Overlap,
            "precision" => SweepAxis::Precision,
            "local_solver" => SweepAxis::LocalSolver,
            "devices" => SweepAxis::Devices,
            _ => {
                return Err(BenchError::Sweep(format!(
                    "unknown axis `{s}` (expected subdomains, ilu_level, overlap, precision, local_solver, devices)"
                )))
            }
        })
    }
}

/// Splits a comma-separated list, keeping commas inside parentheses.
pub fn split_values(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in list.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn subdomain_dims(value: &str) -> Result<[usize; 3]> {
    if value.contains(['x', 'X']) {
        return parse_dims(value);
    }
    let count: usize = value
        .parse()
        .map_err(|_| BenchError::Sweep(format!("invalid subdomain count `{value}`")))?;
    let root = (1..=count).find(|r| r * r * r >= count).unwrap_or(0);
    if root * root * root != count {
        return Err(BenchError::Sweep(format!(
            "subdomain count {count} is not a perfect cube; give it as AxBxC"
        )));
    }
    Ok([root; 3])
}

/// Applies one sweep value to a copy of `base`.
pub fn apply_axis(base: &RunConfig, axis: SweepAxis, value: &str) -> Result<RunConfig> {
    let mut cfg = *base;
    match axis {
        SweepAxis::Subdomains => cfg.partition = subdomain_dims(value)?,
        SweepAxis::IluLevel => {
            let k: usize = value
                .parse()
                .map_err(|_| BenchError::Sweep(format!("invalid ILU level `{value}`")))?;
            cfg.local_solver = match base.local_solver {
                LocalSolverKind::FastIlu {
                    sweeps,
                    trisolve_iters,
                    ..
                } => LocalSolverKind::FastIlu {
                    level: k,
                    sweeps,
                    trisolve_iters,
                },
                _ => LocalSolverKind::Ilu { level: k },
            };
        }
        SweepAxis::Overlap => cfg.set("overlap", value)?,
        SweepAxis::Precision => cfg.set("precision", value)?,
        SweepAxis::LocalSolver => cfg.local_solver = parse_local_solver(value)?,
        SweepAxis::Devices => cfg.set("devices", value)?,
    }
    Ok(cfg)
}

/// One run per value; the problem is assembled once since no axis changes it.
/// Invalid values become failure records and the sweep continues.
pub fn run_sweep(base: &RunConfig, axis: SweepAxis, values: &[String]) -> Result<Vec<RunRecord>> {
    Ok(run_sweep_outcomes(base, axis, values)?
        .into_iter()
        .map(|o| o.record)
        .collect())
}

pub fn run_sweep_outcomes(
    base: &RunConfig,
    axis: SweepAxis,
    values: &[String],
) -> Result<Vec<RunOutcome>> {
    if values.is_empty() {
        return Err(BenchError::Sweep("no values given".into()));
    }
    let problem = assemble(&base.problem);
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let outcome = match (apply_axis(base, axis, v), &problem) {
            (Ok(cfg), Ok(p)) => execute(&cfg, Some(p)),
            (Ok(cfg), Err(e)) => failure(&cfg, e),
            (Err(e), _) => failure(base, &e),
        };
        out.push(outcome);
    }
    Ok(out)
}

fn failure(cfg: &RunConfig, e: &BenchError) -> RunOutcome {
    let mut record = RunRecord::skeleton(cfg);
    record.error_msg = Some(e.to_string());
    RunOutcome {
        record,
        solution: None,
    }
}

/// `true` when every record converged.
pub fn all_converged(records: &[RunRecord]) -> bool {
    records.iter().all(|r| r.converged)
}

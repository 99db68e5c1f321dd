//! Right-preconditioned restarted GMRES.
//!
//! Two variants share the least-squares machinery:
//!
//! - `Classic`: Arnoldi with modified (or twice-iterated classical)
//!   Gram-Schmidt, several reductions per iteration.
//! - `SingleReduce`: one fused reduction per iteration. The candidate vector
//!   is orthogonalized once when it is formed and corrected (and normalized)
//!   one iteration later from the same fused inner products, so every Arnoldi
//!   step needs only the dot products `Qᵀp, pᵀp, Qᵀy, pᵀy`.
//!
//! Convergence is always confirmed on the true residual `‖b − A x‖₂`.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::{spmv, CsrMatrix};

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y := Op x`
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

impl LinearOperator for CsrMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        spmv(self, x, y, 1.0, 0.0)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        y.copy_from_slice(x);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GmresVariant {
    Classic,
    SingleReduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orthogonalization {
    Mgs,
    Cgs2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovConfig {
    pub restart: usize,
    pub rel_tol: f64,
    pub max_iters: usize,
    pub variant: GmresVariant,
    /// Used by the classic variant only.
    pub orthogonalization: Orthogonalization,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            restart: 30,
            rel_tol: 1e-7,
            max_iters: 1000,
            variant: GmresVariant::Classic,
            orthogonalization: Orthogonalization::Mgs,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::InvalidConfig("restart must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "relative tolerance {} outside (0, 1)",
                self.rel_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    pub symbolic: f64,
    pub numeric: f64,
    pub solve: f64,
}

/// Estimate and true relative residual at the end of a restart cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestartCheck {
    pub iteration: usize,
    pub estimate: f64,
    pub true_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual estimates, starting with `1`.
    pub residual_history: Vec<f64>,
    pub timings: PhaseTimings,
    /// Global reductions performed; a fused batch of inner products counts once.
    pub reduction_count: usize,
    /// Cycle starts, including the final true-residual check.
    pub cycles: usize,
    pub restart_checks: Vec<RestartCheck>,
    pub final_relative_residual: f64,
}

/// Solves `A x = b` with right preconditioner `M` (`None` for identity),
/// starting from `x0` (zero when absent).
pub fn gmres(
    a: &dyn LinearOperator,
    m: Option<&dyn LinearOperator>,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &KrylovConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            op: "gmres (rhs)",
            expected: n,
            found: b.len(),
        });
    }
    if let Some(m) = m {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                op: "gmres (preconditioner)",
                expected: n,
                found: m.dim(),
            });
        }
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != n => {
            return Err(Error::DimensionMismatch {
                op: "gmres (initial guess)",
                expected: n,
                found: x0.len(),
            })
        }
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    let start = Instant::now();
    let mut solver = Gmres {
        a,
        m,
        b,
        cfg,
        n,
        report: SolveReport {
            iterations: 0,
            converged: false,
            residual_history: vec![1.0],
            timings: PhaseTimings::default(),
            reduction_count: 0,
            cycles: 0,
            restart_checks: Vec::new(),
            final_relative_residual: 1.0,
        },
        beta0: 0.0,
    };
    match cfg.variant {
        GmresVariant::Classic => solver.classic(&mut x)?,
        GmresVariant::SingleReduce => solver.single_reduce(&mut x)?,
    }
    let mut report = solver.report;
    report.timings.solve = start.elapsed().as_secs_f64();
    Ok((x, report))
}

struct Gmres<'a> {
    a: &'a dyn LinearOperator,
    m: Option<&'a dyn LinearOperator>,
    b: &'a [f64],
    cfg: &'a KrylovConfig,
    n: usize,
    report: SolveReport,
    beta0: f64,
}

/// Cycle-start decision.
enum Start {
    Done,
    Continue(f64),
}

impl Gmres<'_> {
    fn precondition(&self, v: &[f64], z: &mut [f64]) -> Result<()> {
        match self.m {
            Some(m) => m.apply(v, z),
            None => {
                z.copy_from_slice(v);
                Ok(())
            }
        }
    }

    fn residual(&self, x: &[f64], r: &mut [f64]) -> Result<()> {
        self.a.apply(x, r)?;
        r.iter_mut().zip(self.b).for_each(|(ri, bi)| *ri = bi - *ri);
        Ok(())
    }

    /// Shared bookkeeping once the norm of the cycle's starting residual is known.
    fn cycle_start(&mut self, beta: f64) -> Start {
        self.report.cycles += 1;
        if self.report.cycles == 1 {
            self.beta0 = beta;
            if beta == 0.0 {
                self.report.converged = true;
                self.report.final_relative_residual = 0.0;
                return Start::Done;
            }
        } else {
            let rel = beta / self.beta0;
            self.report.restart_checks.push(RestartCheck {
                iteration: self.report.iterations,
                estimate: *self.report.residual_history.last().unwrap(),
                true_residual: rel,
            });
        }
        let rel = beta / self.beta0;
        self.report.final_relative_residual = rel;
        if rel <= self.cfg.rel_tol {
            self.report.converged = true;
            return Start::Done;
        }
        if self.report.iterations >= self.cfg.max_iters {
            return Start::Done;
        }
        Start::Continue(beta)
    }

    fn classic(&mut self, x: &mut [f64]) -> Result<()> {
        let n = self.n;
        let restart = self.cfg.restart;
        let mut r = vec![0.0; n];
        let mut w = vec![0.0; n];
        loop {
            self.residual(x, &mut r)?;
            let beta = norm(&r);
            self.report.reduction_count += 1;
            let beta = match self.cycle_start(beta) {
                Start::Done => return Ok(()),
                Start::Continue(beta) => beta,
            };
            let mut q: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
            let mut zs: Vec<Vec<f64>> = Vec::new();
            let mut ls = LeastSquares::new(beta);
            for j in 0..restart {
                let mut z = vec![0.0; n];
                self.precondition(&q[j], &mut z)?;
                self.a.apply(&z, &mut w)?;
                zs.push(z);
                let mut col = vec![0.0; j + 2];
                match self.cfg.orthogonalization {
                    Orthogonalization::Mgs => {
                        for (i, qi) in q.iter().enumerate() {
                            let h = dot(qi, &w);
                            self.report.reduction_count += 1;
                            axpy(-h, qi, &mut w);
                            col[i] = h;
                        }
                    }
                    Orthogonalization::Cgs2 => {
                        for _ in 0..2 {
                            let h = multi_dot(&q, &w);
                            self.report.reduction_count += 1;
                            for (i, qi) in q.iter().enumerate() {
                                axpy(-h[i], qi, &mut w);
                                col[i] += h[i];
                            }
                        }
                    }
                }
                let rho = norm(&w);
                self.report.reduction_count += 1;
                let breakdown = rho <= BREAKDOWN * norm(&col[..j + 1]);
                col[j + 1] = if breakdown { 0.0 } else { rho };
                let est = ls.push(col) / self.beta0;
                self.report.iterations += 1;
                self.report.residual_history.push(est);
                if est <= self.cfg.rel_tol
                    || breakdown
                    || self.report.iterations >= self.cfg.max_iters
                {
                    break;
                }
                q.push(w.iter().map(|v| v / rho).collect());
            }
            let y = ls.solve();
            for (yi, zi) in y.iter().zip(&zs) {
                axpy(*yi, zi, x);
            }
        }
    }

    fn single_reduce(&mut self, x: &mut [f64]) -> Result<()> {
        let n = self.n;
        let restart = self.cfg.restart;
        let mut r = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut y = vec![0.0; n];
        loop {
            self.residual(x, &mut r)?;
            let mut p = r.clone();
            let mut q: Vec<Vec<f64>> = Vec::new();
            let mut zs: Vec<Vec<f64>> = Vec::new();
            // Unrotated Hessenberg columns, column c has c + 2 entries.
            let mut hcols: Vec<Vec<f64>> = Vec::new();
            let mut h_prev: Vec<f64> = Vec::new();
            let mut ls = LeastSquares::new(0.0);
            let mut j = 0;
            loop {
                self.precondition(&p, &mut w)?;
                self.a.apply(&w, &mut y)?;
                let fused = fused_dots(&q, &p, &y);
                self.report.reduction_count += 1;
                let (s, alpha, t, beta_py) = (fused.s, fused.alpha, fused.t, fused.beta);

                if j == 0 {
                    let beta = alpha.max(0.0).sqrt();
                    match self.cycle_start(beta) {
                        Start::Done => return Ok(()),
                        Start::Continue(_) => {}
                    }
                    ls = LeastSquares::new(beta);
                    let rho = beta;
                    let q0: Vec<f64> = p.iter().map(|v| v / rho).collect();
                    zs.push(w.iter().map(|v| v / rho).collect());
                    let h0 = beta_py / (rho * rho);
                    p.iter_mut()
                        .zip(&y)
                        .zip(&q0)
                        .for_each(|((pi, yi), qi)| *pi = yi / rho - h0 * qi);
                    q.push(q0);
                    h_prev = vec![h0];
                    j = 1;
                    continue;
                }

                let rho2 = alpha - dot_local(&s, &s);
                let mut col: Vec<f64> = h_prev.iter().zip(&s).map(|(h, si)| h + si).collect();
                let col_norm = norm_local(&col);
                let rho = rho2.max(0.0).sqrt();
                let breakdown = !(rho > BREAKDOWN * col_norm);
                col.push(if breakdown { 0.0 } else { rho });
                hcols.push(col.clone());
                let est = ls.push(col) / self.beta0;
                self.report.iterations += 1;
                self.report.residual_history.push(est);
                if est <= self.cfg.rel_tol
                    || breakdown
                    || j == restart
                    || self.report.iterations >= self.cfg.max_iters
                {
                    break;
                }

                // q_j = (p − Q s) / ρ and z_j = (w − Z s) / ρ.
                let mut qj = p.clone();
                let mut zj = w.clone();
                for (i, si) in s.iter().enumerate() {
                    axpy(-si, &q[i], &mut qj);
                    axpy(-si, &zs[i], &mut zj);
                }
                qj.iter_mut().for_each(|v| *v /= rho);
                zj.iter_mut().for_each(|v| *v /= rho);
                q.push(qj);
                zs.push(zj);

                // g = H s: A M Q s expressed in Q_{j+1}.
                let mut g = vec![0.0; j + 1];
                for (c, hc) in hcols.iter().enumerate() {
                    for (i, h) in hc.iter().enumerate() {
                        g[i] += h * s[c];
                    }
                }
                let st = dot_local(&s, &t);
                let mut h_new: Vec<f64> = t.clone();
                h_new.push((beta_py - st) / rho);
                for (hi, gi) in h_new.iter_mut().zip(&g) {
                    *hi = (*hi - gi) / rho;
                }
                // p ← A M q_j − Q_{j+1} h_new
                p.iter_mut().zip(&y).for_each(|(pi, yi)| *pi = yi / rho);
                for (i, qi) in q.iter().enumerate() {
                    axpy(-(g[i] / rho + h_new[i]), qi, &mut p);
                }
                h_prev = h_new;
                j += 1;
            }
            let coef = ls.solve();
            for (yi, zi) in coef.iter().zip(&zs) {
                axpy(*yi, zi, x);
            }
        }
    }
}

/// Arnoldi breakdown threshold relative to the Hessenberg column norm.
const BREAKDOWN: f64 = 1e-14;

/// Givens-rotated Hessenberg least-squares problem.
struct LeastSquares {
    r: Vec<Vec<f64>>,
    cs: Vec<f64>,
    sn: Vec<f64>,
    g: Vec<f64>,
}

impl LeastSquares {
    fn new(beta: f64) -> Self {
        Self {
            r: Vec::new(),
            cs: Vec::new(),
            sn: Vec::new(),
            g: vec![beta],
        }
    }

    /// Adds Hessenberg column `j` (length `j + 2`); returns `|residual|`.
    fn push(&mut self, mut col: Vec<f64>) -> f64 {
        let j = self.r.len();
        for i in 0..j {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = self.cs[i] * a + self.sn[i] * b;
            col[i + 1] = -self.sn[i] * a + self.cs[i] * b;
        }
        let (a, b) = (col[j], col[j + 1]);
        let d = a.hypot(b);
        let (c, s) = if d == 0.0 { (1.0, 0.0) } else { (a / d, b / d) };
        col[j] = d;
        col[j + 1] = 0.0;
        self.cs.push(c);
        self.sn.push(s);
        let gj = self.g[j];
        self.g[j] = c * gj;
        self.g.push(-s * gj);
        col.truncate(j + 1);
        self.r.push(col);
        self.g[j + 1].abs()
    }

    fn solve(&self) -> Vec<f64> {
        let k = self.r.len();
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            for c in i + 1..k {
                y[i] -= self.r[c][i] * y[c];
            }
            y[i] = if self.r[i][i] != 0.0 { y[i] / self.r[i][i] } else { 0.0 };
        }
        y
    }
}

/// Fixed block length for deterministic reductions.
const BLOCK: usize = 4096;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 * BLOCK {
        return dot_local(x, y);
    }
    let parts: Vec<f64> = x
        .par_chunks(BLOCK)
        .zip(y.par_chunks(BLOCK))
        .map(|(a, b)| dot_local(a, b))
        .collect();
    parts.iter().sum()
}

fn dot_local(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm_local(x: &[f64]) -> f64 {
    dot_local(x, x).sqrt()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// All `qᵢ · w` in one pass.
fn multi_dot(q: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let k = q.len();
    let n = w.len();
    let block = |start: usize| {
        let end = (start + BLOCK).min(n);
        let mut acc = vec![0.0; k];
        for (i, qi) in q.iter().enumerate() {
            acc[i] = dot_local(&qi[start..end], &w[start..end]);
        }
        acc
    };
    combine((0..n).step_by(BLOCK).collect(), k, block)
}

struct Fused {
    s: Vec<f64>,
    alpha: f64,
    t: Vec<f64>,
    beta: f64,
}

/// `Qᵀp, pᵀp, Qᵀy, pᵀy` as a single reduction.
fn fused_dots(q: &[Vec<f64>], p: &[f64], y: &[f64]) -> Fused {
    let k = q.len();
    let n = p.len();
    let block = |start: usize| {
        let end = (start + BLOCK).min(n);
        let (pb, yb) = (&p[start..end], &y[start..end]);
        let mut acc = vec![0.0; 2 * k + 2];
        for (i, qi) in q.iter().enumerate() {
            let qb = &qi[start..end];
            acc[i] = dot_local(qb, pb);
            acc[k + i] = dot_local(qb, yb);
        }
        acc[2 * k] = dot_local(pb, pb);
        acc[2 * k + 1] = dot_local(pb, yb);
        acc
    };
    let all = combine((0..n).step_by(BLOCK).collect(), 2 * k + 2, block);
    Fused {
        s: all[..k].to_vec(),
        t: all[k..2 * k].to_vec(),
        alpha: all[2 * k],
        beta: all[2 * k + 1],
    }
}

/// Sums per-block partial vectors in block order.
fn combine(starts: Vec<usize>, k: usize, block: impl Fn(usize) -> Vec<f64> + Sync) -> Vec<f64> {
    let parts: Vec<Vec<f64>> = if starts.len() >= 2 {
        starts.par_iter().map(|&s| block(s)).collect()
    } else {
        starts.iter().map(|&s| block(s)).collect()
    };
    let mut out = vec![0.0; k];
    for part in parts {
        out.iter_mut().zip(part).for_each(|(o, v)| *o += v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_step() {
        let a = CsrMatrix::<f64>::identity(5);
        let b = [1.0, -2.0, 3.0, 0.5, 4.0];
        for variant in [GmresVariant::Classic, GmresVariant::SingleReduce] {
            let cfg = KrylovConfig {
                variant,
                ..Default::default()
            };
            let (x, rep) = gmres(&a, None, &b, None, &cfg).unwrap();
            assert!(rep.converged);
            assert_eq!(rep.iterations, 1);
            for (xi, bi) in x.iter().zip(&b) {
                assert!((xi - bi).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_rhs_is_immediately_converged() {
        let a = CsrMatrix::<f64>::identity(3);
        let (x, rep) = gmres(&a, None, &[0.0; 3], None, &KrylovConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
        assert_eq!(x, vec![0.0; 3]);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = KrylovConfig {
            rel_tol: 1.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}

//! Collocation assembly, dense least squares, and the damped
//! Gauss-Newton loop with perturbation restarts for nonlinear PDEs.
//!
//! The trial form makes every candidate solution satisfy the boundary
//! conditions exactly, so the solve only enforces the PDE at interior
//! collocation points plus the `g = 0` normalization rows on Dirichlet
//! boundary points. Linear problems reduce to one rectangular least-squares
//! solve; nonlinear problems run Gauss-Newton with backtracking and random
//! perturbation restarts on stagnation, always keeping the best-seen
//! coefficients.

use crate::error::{Error, Result};
use crate::geometry::EdgeId;
use crate::mapping::DomainMap;
use crate::problems::{BcAssignment, BcKind, ProblemKind};
use crate::scalar::Scalar;
use crate::trial::Trial;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Default relative singular-value cutoff for the least-squares solve.
pub const LSTSQ_RCOND: f64 = 1e-12;

/// Interior and Dirichlet-boundary collocation points on the standard
/// square.
#[derive(Debug, Clone)]
pub struct CollocationSet<T> {
    /// `Q × Q` points strictly inside `(−1,1)²`.
    pub interior: Vec<(T, T)>,
    /// `Q_db` points on Dirichlet edges, for the `g = 0` rows.
    pub dirichlet_boundary: Vec<(T, T)>,
    /// Interior points per direction.
    pub q: usize,
    /// Uniform interior parameters per Dirichlet edge.
    pub per_edge: usize,
}

impl<T> CollocationSet<T> {
    pub fn q_db(&self) -> usize {
        self.dirichlet_boundary.len()
    }
    pub fn n_rows(&self) -> usize {
        self.interior.len() + self.dirichlet_boundary.len()
    }
}

/// Uniform open interior grid plus Dirichlet-edge points.
///
/// Interior points sit at `ξ_i = −1 + 2i/(Q+1)`, `i = 1..Q`, in each
/// direction. Dirichlet edges receive `k` uniform interior parameters plus
/// the quad vertices that lie on at least one Dirichlet edge, where `k` is
/// 3 with no flux edge (`Q_db = 16` on four Dirichlet edges, 13 on three),
/// 5 with one flux edge (`Q_db = 19`), and 10 with two (`Q_db = 23`).
pub fn collocation_grid<T: Scalar>(
    q: usize,
    assign: &BcAssignment<T>,
) -> Result<CollocationSet<T>> {
    if q < 2 {
        return Err(Error::InvalidConfig(format!("Q={q} must be ≥ 2")));
    }
    let coord = |i: usize, n: usize| T::lit(-1.0 + 2.0 * i as f64 / (n + 1) as f64);
    let mut interior = Vec::with_capacity(q * q);
    for j in 1..=q {
        for i in 1..=q {
            interior.push((coord(i, q), coord(j, q)));
        }
    }

    let dirichlet: Vec<usize> = (0..4)
        .filter(|&i| matches!(assign[i], BcKind::Dirichlet))
        .collect();
    let flux_count = (0..4)
        .filter(|&i| matches!(assign[i], BcKind::Neumann | BcKind::Robin { .. }))
        .count();
    let per_edge = match flux_count {
        0 => 3,
        1 => 5,
        2 => 10,
        n => {
            return Err(Error::NotSupported(format!(
                "{n} Neumann/Robin edges are not supported"
            )))
        }
    };

    // Helper map needed only for edge_coords; any map would do, but the
    // coordinates are pure functions of the edge id and parameter.
    let edge_coords = |edge: EdgeId, s: T| -> (T, T) {
        match edge {
            EdgeId::Ab => (s, -T::one()),
            EdgeId::Bc => (T::one(), s),
            EdgeId::Cd => (s, T::one()),
            EdgeId::Ad => (-T::one(), s),
        }
    };

    let mut boundary = Vec::new();
    for &e in &dirichlet {
        let edge = EdgeId::ALL[e];
        for j in 1..=per_edge {
            boundary.push(edge_coords(edge, coord(j, per_edge)));
        }
    }
    // Vertices incident to at least one Dirichlet edge (deduplicated).
    // Edge endpoints in vertex order A, B, C, D.
    const ENDPOINTS: [(usize, usize); 4] = [(0, 1), (1, 2), (3, 2), (0, 3)];
    let mut on = [false; 4];
    for &e in &dirichlet {
        on[ENDPOINTS[e].0] = true;
        on[ENDPOINTS[e].1] = true;
    }
    let one = T::one();
    let verts = [(-one, -one), (one, -one), (one, one), (-one, one)];
    for (v, &keep) in verts.iter().zip(on.iter()) {
        if keep {
            boundary.push(*v);
        }
    }

    Ok(CollocationSet { interior, dirichlet_boundary: boundary, q, per_edge })
}

/// Row provenance in the collocation system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Pde,
    GZero,
}

/// Dense rectangular system for a linear solve.
pub struct LinearSystem<T> {
    pub a: DMatrix<T>,
    pub b: DVector<T>,
    pub rows: Vec<RowKind>,
}

/// Precomputed collocation rows for either a linear or a nonlinear solve.
///
/// Row `i` of the residual is
/// `r_i(β) = (L·β + l_const − rhs)_i + N(v_const + V·β)_i` where the
/// nonlinear term is applied on PDE rows only (g-zero rows are linear in β
/// by construction).
pub struct PdeSystem<T> {
    pub kind: ProblemKind,
    /// Linear-operator columns (PDE rows) / feature values (g-zero rows).
    pub l_cols: DMatrix<T>,
    pub l_const: DVector<T>,
    /// Solution-value columns, for the nonlinear term.
    pub v_cols: DMatrix<T>,
    pub v_const: DVector<T>,
    /// Source values on PDE rows, zero on g-zero rows.
    pub rhs: DVector<T>,
    pub rows: Vec<RowKind>,
}

struct Row<T> {
    l: Vec<T>,
    lc: T,
    v: Vec<T>,
    vc: T,
    f: T,
}

/// Assemble the collocation rows for a trial form.
///
/// PDE rows apply the (linear part of the) PDE operator in physical
/// variables through the map Jacobian; g-zero rows pin the raw feature
/// values on Dirichlet boundary points. Assembly is parallel over points
/// and independent of the work partitioning.
pub fn assemble<T: Scalar>(
    kind: ProblemKind,
    trial: &dyn Trial<T>,
    colloc: &CollocationSet<T>,
) -> Result<PdeSystem<T>> {
    let m = trial.n_features();
    let map: &DomainMap<T> = trial.map();

    let pde_rows: Vec<Row<T>> = colloc
        .interior
        .par_iter()
        .map(|&(xi, eta)| -> Result<Row<T>> {
            let jb = map.jacobian(xi, eta);
            let aj = trial.eval(xi, eta);
            let pc = DomainMap::physical_derivatives(&jb, &aj.c)?;
            let mut l = Vec::with_capacity(m);
            let mut v = Vec::with_capacity(m);
            for col in &aj.cols {
                let p = DomainMap::physical_derivatives(&jb, col)?;
                l.push(kind.lop(&p));
                v.push(p.v);
            }
            Ok(Row {
                l,
                lc: kind.lop(&pc),
                v,
                vc: pc.v,
                f: kind.source(jb.x.x, jb.x.y),
            })
        })
        .collect::<Result<_>>()?;

    let g_rows: Vec<Row<T>> = colloc
        .dirichlet_boundary
        .par_iter()
        .map(|&(xi, eta)| {
            let phi = trial.g_features(xi, eta);
            Row {
                l: phi,
                lc: T::zero(),
                v: vec![T::zero(); m],
                vc: T::zero(),
                f: T::zero(),
            }
        })
        .collect();

    let n = pde_rows.len() + g_rows.len();
    let all = pde_rows.iter().chain(g_rows.iter());
    let mut l_cols = DMatrix::zeros(n, m);
    let mut v_cols = DMatrix::zeros(n, m);
    let mut l_const = DVector::zeros(n);
    let mut v_const = DVector::zeros(n);
    let mut rhs = DVector::zeros(n);
    for (i, row) in all.enumerate() {
        for k in 0..m {
            l_cols[(i, k)] = row.l[k];
            v_cols[(i, k)] = row.v[k];
        }
        l_const[i] = row.lc;
        v_const[i] = row.vc;
        rhs[i] = row.f;
    }
    let mut rows = vec![RowKind::Pde; pde_rows.len()];
    rows.extend(std::iter::repeat(RowKind::GZero).take(g_rows.len()));

    Ok(PdeSystem { kind, l_cols, l_const, v_cols, v_const, rhs, rows })
}

impl<T: Scalar> PdeSystem<T> {
    /// The rectangular linear system (exact for the linear kinds; the
    /// Gauss-Newton linearization at β = 0 otherwise).
    pub fn linear_system(&self) -> LinearSystem<T> {
        LinearSystem {
            a: self.l_cols.clone(),
            b: &self.rhs - &self.l_const,
            rows: self.rows.clone(),
        }
    }

    /// Residual vector at `beta`.
    pub fn residual(&self, beta: &DVector<T>) -> DVector<T> {
        let mut r = &self.l_cols * beta + &self.l_const - &self.rhs;
        if !self.kind.is_linear() {
            let u = &self.v_cols * beta + &self.v_const;
            for (i, kind) in self.rows.iter().enumerate() {
                if *kind == RowKind::Pde {
                    r[i] += self.kind.nonlinear(u[i]).0;
                }
            }
        }
        r
    }

    /// Jacobian of the residual at `beta`.
    pub fn jacobian(&self, beta: &DVector<T>) -> DMatrix<T> {
        let mut j = self.l_cols.clone();
        if !self.kind.is_linear() {
            let u = &self.v_cols * beta + &self.v_const;
            for (i, kind) in self.rows.iter().enumerate() {
                if *kind == RowKind::Pde {
                    let dn = self.kind.nonlinear(u[i]).1;
                    for k in 0..j.ncols() {
                        j[(i, k)] += dn * self.v_cols[(i, k)];
                    }
                }
            }
        }
        j
    }
}

/// Assemble a linear problem directly into its rectangular system.
pub fn assemble_linear<T: Scalar>(
    kind: ProblemKind,
    trial: &dyn Trial<T>,
    colloc: &CollocationSet<T>,
) -> Result<LinearSystem<T>> {
    if !kind.is_linear() {
        return Err(Error::InvalidConfig(format!(
            "{} is nonlinear; use `assemble` + `gauss_newton`",
            kind.name()
        )));
    }
    Ok(assemble(kind, trial, colloc)?.linear_system())
}

/// Minimum-norm least-squares solution and its diagnostics.
pub struct LstsqResult<T> {
    pub beta: DVector<T>,
    /// Singular values below `rcond·σ_max` treated as zero.
    pub cutoff_count: usize,
    pub max_singular_value: f64,
}

/// Minimum-norm least squares via SVD with a relative singular-value
/// cutoff (`σ_i < rcond·σ_max` treated as zero).
pub fn lstsq<T: Scalar>(
    a: &DMatrix<T>,
    b: &DVector<T>,
    rcond: f64,
) -> Result<LstsqResult<T>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::InvalidConfig("empty least-squares system".into()));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, s| acc.max(s.to_f64()));
    let eps = T::lit(rcond * smax);
    let cutoff_count = svd
        .singular_values
        .iter()
        .filter(|s| **s < eps)
        .count();
    let beta = svd
        .solve(b, eps)
        .map_err(|e| Error::Factorization(e.to_string()))?;
    Ok(LstsqResult { beta, cutoff_count, max_singular_value: smax })
}

/// Gauss-Newton options.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct GnOpts {
    /// Stop when the residual norm drops below this.
    pub tol: f64,
    /// Relative decrease below which an iteration counts as stalled.
    pub stall_tol: f64,
    /// Uniform perturbation half-width applied on a stall.
    pub delta: f64,
    /// Maximum perturbation restarts.
    pub max_restarts: usize,
    pub max_iter: usize,
    pub rcond: f64,
    /// Seed for the perturbation stream (kept separate from the feature
    /// streams: the perturbation RNG runs on its own ChaCha stream).
    pub seed: u64,
}

impl Default for GnOpts {
    fn default() -> Self {
        GnOpts {
            tol: 1e-12,
            stall_tol: 1e-8,
            delta: 0.5,
            max_restarts: 4,
            max_iter: 50,
            rcond: LSTSQ_RCOND,
            seed: 0,
        }
    }
}

/// How a solve terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Stalled,
    MaxIterations,
}

/// Outcome of a linear or Gauss-Newton solve. Always carries the best-seen
/// coefficients; `final_residual ≤ initial_residual` by construction.
pub struct SolveReport<T> {
    pub beta: DVector<T>,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub termination: Termination,
    pub wall_time_s: f64,
    /// Singular-value cutoff count of the last factorization.
    pub cutoff_count: usize,
}

fn norm_f64<T: Scalar>(v: &DVector<T>) -> f64 {
    v.iter().map(|x| x.to_f64() * x.to_f64()).sum::<f64>().sqrt()
}

/// Damped Gauss-Newton with perturbation restarts.
///
/// Each iteration solves `lstsq(J, −r)` for the step and backtracks with at
/// most 10 halvings; when the relative residual decrease falls below
/// `stall_tol`, the iterate is re-seeded at the best-seen coefficients plus
/// a uniform perturbation in `(−δ, δ)` per component, up to `max_restarts`
/// times. The best-seen coefficients are always retained.
pub fn gauss_newton<T, R, J>(
    residual: R,
    jacobian: J,
    beta0: DVector<T>,
    opts: &GnOpts,
) -> Result<SolveReport<T>>
where
    T: Scalar,
    R: Fn(&DVector<T>) -> DVector<T>,
    J: Fn(&DVector<T>) -> DMatrix<T>,
{
    let start = Instant::now();
    // Perturbations live on a dedicated ChaCha stream so they never alias
    // the feature-weight/bias streams of the same seed.
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
    rng.set_stream(2);

    let mut beta = beta0;
    let mut r = residual(&beta);
    if r.iter().any(|x| !x.to_f64().is_finite()) {
        return Err(Error::NonFiniteResidual(0));
    }
    let initial = norm_f64(&r);
    let mut norm = initial;
    let mut best_beta = beta.clone();
    let mut best_norm = norm;
    let mut restarts = 0usize;
    let mut cutoff_count = 0usize;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0usize;

    for iter in 1..=opts.max_iter {
        iterations = iter;
        if best_norm < opts.tol {
            termination = Termination::Converged;
            break;
        }
        let j = jacobian(&beta);
        let step = lstsq(&j, &(-&r), opts.rcond)?;
        cutoff_count = step.cutoff_count;

        // Backtracking line search.
        let mut accepted = false;
        let mut t = T::one();
        let mut new_beta = beta.clone();
        let mut new_r = r.clone();
        let mut new_norm = norm;
        for _ in 0..=10 {
            let cand = &beta + &step.beta * t;
            let cand_r = residual(&cand);
            if cand_r.iter().any(|x| !x.to_f64().is_finite()) {
                return Err(Error::NonFiniteResidual(iter));
            }
            let cand_norm = norm_f64(&cand_r);
            if cand_norm < norm {
                new_beta = cand;
                new_r = cand_r;
                new_norm = cand_norm;
                accepted = true;
                break;
            }
            t *= T::lit(0.5);
        }

        let rel_decrease = if accepted {
            (norm - new_norm) / norm.max(f64::MIN_POSITIVE)
        } else {
            0.0
        };
        if accepted {
            beta = new_beta;
            r = new_r;
            norm = new_norm;
            if norm < best_norm {
                best_norm = norm;
                best_beta = beta.clone();
            }
        }
        if best_norm < opts.tol {
            termination = Termination::Converged;
            break;
        }
        if rel_decrease < opts.stall_tol {
            if restarts < opts.max_restarts {
                restarts += 1;
                beta = best_beta.map(|x| {
                    x + T::lit(rng.random_range(-opts.delta..opts.delta))
                });
                r = residual(&beta);
                if r.iter().any(|x| !x.to_f64().is_finite()) {
                    return Err(Error::NonFiniteResidual(iter));
                }
                norm = norm_f64(&r);
            } else {
                termination = Termination::Stalled;
                break;
            }
        }
    }
    if best_norm < opts.tol {
        termination = Termination::Converged;
    }

    Ok(SolveReport {
        beta: best_beta,
        initial_residual: initial,
        final_residual: best_norm,
        iterations,
        restarts,
        termination,
        wall_time_s: start.elapsed().as_secs_f64(),
        cutoff_count,
    })
}

/// Solve an assembled system: one least-squares solve for linear kinds,
/// Gauss-Newton from β = 0 otherwise.
pub fn solve_system<T: Scalar>(
    sys: &PdeSystem<T>,
    opts: &GnOpts,
) -> Result<SolveReport<T>> {
    if sys.kind.is_linear() {
        let start = Instant::now();
        let ls = sys.linear_system();
        let sol = lstsq(&ls.a, &ls.b, opts.rcond)?;
        let initial = norm_f64(&ls.b);
        let final_residual = norm_f64(&(&ls.a * &sol.beta - &ls.b));
        Ok(SolveReport {
            beta: sol.beta,
            initial_residual: initial,
            final_residual: final_residual.min(initial),
            iterations: 1,
            restarts: 0,
            termination: Termination::Converged,
            wall_time_s: start.elapsed().as_secs_f64(),
            cutoff_count: sol.cutoff_count,
        })
    } else {
        let beta0 = DVector::zeros(sys.l_cols.ncols());
        gauss_newton(|b| sys.residual(b), |b| sys.jacobian(b), beta0, opts)
    }
}

//! Run orchestration: configuration, error metrics, boundary-condition and
//! map audits, and report generation (JSON summary + CSV grids).
//!
//! The harness operates on `f64`. One run is a single orchestration flow:
//! resolve the domain and map, build the feature net and trial form,
//! assemble and solve, then evaluate errors on held-out test grids
//! (`N_v = 101×101` over the closed standard square for domain errors,
//! `N_b = 101` per edge for boundary errors). Reruns with an identical
//! configuration are bit-identical in every JSON numeric field (wall time
//! is deliberately excluded from the summary).

use crate::error::{Error, Result};
use crate::features::FeatureNet;
use crate::geometry::{catalog, EdgeId, ParametricCurve, Point2, QuadDomain};
use crate::mapping::{DomainMap, MapKind};
use crate::problems::{build_trial, dirichlet_trace, edge_data, BcAssignment, BcKind, ProblemKind};
use crate::solver::{assemble, collocation_grid, solve_system, GnOpts, SolveReport, Termination};
use crate::trial::Trial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Domain test-grid resolution per direction.
pub const N_V: usize = 101;
/// Edge test points.
pub const N_B: usize = 101;
/// Boundary-condition audit threshold.
pub const BC_AUDIT_TOL: f64 = 1e-11;
/// Boundary-reproduction threshold for map audits.
pub const BOUNDARY_TOL: f64 = 1e-13;

/// Domain reference: a catalog name or four explicit boundary curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Name(String),
    Curves {
        ab: ParametricCurve<f64>,
        bc: ParametricCurve<f64>,
        cd: ParametricCurve<f64>,
        ad: ParametricCurve<f64>,
    },
}

/// Full run configuration (a single JSON document).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainSpec,
    /// Map kind override; when absent the domain's designated kind is used
    /// (center-augmented for nlh-2/nlh-3, plain Coons otherwise).
    #[serde(default)]
    pub map: Option<MapKind<f64>>,
    pub problem: ProblemKind,
    /// Per-edge BCs in the order AB, BC, CD, AD.
    pub bcs: BcAssignment<f64>,
    pub q: usize,
    pub m: usize,
    pub r_m: f64,
    pub seed: u64,
    #[serde(default)]
    pub solver: GnOpts,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s)
            .map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidConfig(format!("Q={} must be ≥ 2", self.q)));
        }
        if self.m < 1 {
            return Err(Error::InvalidConfig(format!("M={} must be ≥ 1", self.m)));
        }
        if !(self.r_m > 0.0) {
            return Err(Error::InvalidConfig(format!("R_m={} must be > 0", self.r_m)));
        }
        if let DomainSpec::Name(n) = &self.domain {
            catalog::<f64>(n)?;
        }
        Ok(())
    }

    pub fn resolve_domain(&self) -> Result<QuadDomain<f64>> {
        match &self.domain {
            DomainSpec::Name(n) => catalog(n),
            DomainSpec::Curves { ab, bc, cd, ad } => {
                crate::geometry::make_quad(ab.clone(), bc.clone(), cd.clone(), ad.clone())
            }
        }
    }

    pub fn resolve_map(&self) -> Result<DomainMap<f64>> {
        let q = self.resolve_domain()?;
        match (&self.map, &self.domain) {
            (Some(kind), _) => Ok(DomainMap::new(q, kind.clone())),
            (None, DomainSpec::Name(n)) => Ok(designated_map_for(n, q)),
            (None, _) => Ok(DomainMap::coons(q)),
        }
    }
}

/// The map kind each catalog domain is meant to run with.
fn designated_map_for(name: &str, q: QuadDomain<f64>) -> DomainMap<f64> {
    if matches!(name, "nlh-2" | "nlh-3") {
        DomainMap::coons_center(q, Point2::new(0.0, 0.0))
    } else {
        DomainMap::coons(q)
    }
}

/// Designated map for a catalog name.
pub fn catalog_map(name: &str) -> Result<DomainMap<f64>> {
    Ok(designated_map_for(name, catalog(name)?))
}

/// Max/rms error pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaxRms {
    pub max: f64,
    pub rms: f64,
}

/// Per-edge report: a BC error for constrained edges, a solution error for
/// free edges (`is_bc = false`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeErrors {
    pub edge: String,
    pub bc: String,
    pub is_bc: bool,
    pub max: f64,
    pub rms: f64,
}

/// Domain + per-edge error metrics on the held-out grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub e_max: f64,
    pub e_rms: f64,
    pub edges: Vec<EdgeErrors>,
}

/// Solve diagnostics carried into the JSON summary (no wall time, so that
/// reruns stay bit-identical).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub initial_residual: f64,
    pub final_residual: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub termination: String,
    pub cutoff_count: usize,
    pub rows: usize,
    pub q_db: usize,
}

/// Full JSON summary of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub config: RunConfig,
    pub metrics: ErrorMetrics,
    pub solve: SolveSummary,
}

/// In-memory artifacts of one solve run.
pub struct RunOutcome {
    pub summary: Summary,
    pub solution_csv: String,
    pub gridlines_csv: String,
    pub report: SolveReport<f64>,
    pub trial: Box<dyn Trial<f64>>,
    pub beta: Vec<f64>,
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::Stalled => "stalled",
        Termination::MaxIterations => "max_iterations",
    }
}

fn bc_name(bc: &BcKind<f64>) -> String {
    match bc {
        BcKind::Dirichlet => "dirichlet".into(),
        BcKind::Neumann => "neumann".into(),
        BcKind::Robin { alpha } => format!("robin(alpha={alpha})"),
        BcKind::Free => "free".into(),
    }
}

fn grid_coord(i: usize, n: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (n - 1) as f64
}

/// Domain error metrics plus the solution CSV body.
pub fn domain_errors(
    kind: ProblemKind,
    map: &DomainMap<f64>,
    trial: &dyn Trial<f64>,
    beta: &[f64],
) -> (f64, f64, String) {
    let mut csv = String::from("xi,eta,x,y,u,u_exact,abs_err\n");
    let (mut sq, mut mx) = (0.0f64, 0.0f64);
    for j in 0..N_V {
        for i in 0..N_V {
            let (xi, eta) = (grid_coord(i, N_V), grid_coord(j, N_V));
            let u = trial.eval_with(beta, xi, eta).f;
            let p = map.point(xi, eta);
            let ue = kind.exact(p.x, p.y).f;
            let err = (u - ue).abs();
            sq += err * err;
            mx = mx.max(err);
            writeln!(csv, "{xi:.16e},{eta:.16e},{:.16e},{:.16e},{u:.16e},{ue:.16e},{err:.16e}", p.x, p.y)
                .unwrap();
        }
    }
    (mx, (sq / (N_V * N_V) as f64).sqrt(), csv)
}

/// Per-edge BC (or free-edge solution) errors on `N_B` points.
pub fn edge_errors(
    kind: ProblemKind,
    map: &DomainMap<f64>,
    trial: &dyn Trial<f64>,
    beta: &[f64],
    bcs: &BcAssignment<f64>,
) -> Result<Vec<EdgeErrors>> {
    let mut out = Vec::with_capacity(4);
    for (e, edge) in EdgeId::ALL.into_iter().enumerate() {
        let (mut sq, mut mx) = (0.0f64, 0.0f64);
        match &bcs[e] {
            BcKind::Dirichlet | BcKind::Free => {
                let f = dirichlet_trace(kind, map, edge);
                for i in 0..N_B {
                    let s = grid_coord(i, N_B);
                    let (xi, eta) = map.edge_coords(edge, s);
                    let r = (trial.eval_with(beta, xi, eta).f - f(s).f).abs();
                    sq += r * r;
                    mx = mx.max(r);
                }
            }
            bc @ (BcKind::Neumann | BcKind::Robin { .. }) => {
                let alpha = match bc {
                    BcKind::Robin { alpha } => *alpha,
                    _ => 0.0,
                };
                let data = edge_data(kind, map, edge, bc);
                for i in 0..N_B {
                    let s = grid_coord(i, N_B);
                    let (xi, eta) = map.edge_coords(edge, s);
                    let em = map.edge_metrics(edge, s)?;
                    let v = trial.eval_with(beta, xi, eta);
                    let r = (v.fx * em.k_x.f + v.fy * em.k_y.f + alpha * v.f - data(s).f)
                        .abs();
                    sq += r * r;
                    mx = mx.max(r);
                }
            }
        }
        out.push(EdgeErrors {
            edge: edge.name().to_string(),
            bc: bc_name(&bcs[e]),
            is_bc: !matches!(bcs[e], BcKind::Free),
            max: mx,
            rms: (sq / N_B as f64).sqrt(),
        });
    }
    Ok(out)
}

/// Map grid lines (11 iso-lines per direction, 101 samples each) as CSV.
pub fn gridlines_csv(map: &DomainMap<f64>) -> String {
    let mut csv = String::from("direction,level,s,x,y\n");
    for li in 0..11 {
        let level = grid_coord(li, 11);
        for i in 0..N_B {
            let s = grid_coord(i, N_B);
            let p = map.point(level, s);
            writeln!(csv, "xi,{level:.3},{s:.16e},{:.16e},{:.16e}", p.x, p.y).unwrap();
        }
        for i in 0..N_B {
            let s = grid_coord(i, N_B);
            let p = map.point(s, level);
            writeln!(csv, "eta,{level:.3},{s:.16e},{:.16e},{:.16e}", p.x, p.y).unwrap();
        }
    }
    csv
}

/// End-to-end solve: assemble, solve, and evaluate all reported metrics.
pub fn run_solve(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let map = cfg.resolve_map()?;
    let net = FeatureNet::init(cfg.m, cfg.r_m, cfg.seed)?;
    let trial = build_trial(cfg.problem, map.clone(), net, &cfg.bcs)?;
    let colloc = collocation_grid(cfg.q, &cfg.bcs)?;
    let sys = assemble(cfg.problem, trial.as_ref(), &colloc)?;
    let mut opts = cfg.solver.clone();
    opts.seed = cfg.seed;
    let report = solve_system(&sys, &opts)?;
    let beta: Vec<f64> = report.beta.iter().cloned().collect();

    let (e_max, e_rms, solution_csv) = domain_errors(cfg.problem, &map, trial.as_ref(), &beta);
    let edges = edge_errors(cfg.problem, &map, trial.as_ref(), &beta, &cfg.bcs)?;
    let summary = Summary {
        config: cfg.clone(),
        metrics: ErrorMetrics { e_max, e_rms, edges },
        solve: SolveSummary {
            initial_residual: report.initial_residual,
            final_residual: report.final_residual,
            iterations: report.iterations,
            restarts: report.restarts,
            termination: termination_name(report.termination).into(),
            cutoff_count: report.cutoff_count,
            rows: colloc.n_rows(),
            q_db: colloc.q_db(),
        },
    };
    let gridlines_csv = gridlines_csv(&map);
    Ok(RunOutcome { summary, solution_csv, gridlines_csv, report, trial, beta })
}

/// Aggregated boundary-condition audit over random untrained coefficient
/// vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BcAuditReport {
    pub trials: usize,
    pub edges: Vec<EdgeErrors>,
    pub worst: f64,
    pub pass: bool,
}

/// Evaluate BC residuals of the trial form for `trials` random feature
/// nets (seeds `cfg.seed`, `cfg.seed+1`, …) with random β drawn from a
/// dedicated RNG stream. This exercises the exactness claim: residuals are
/// independent of training.
pub fn bc_audit(cfg: &RunConfig, trials: usize) -> Result<BcAuditReport> {
    cfg.validate()?;
    let map = cfg.resolve_map()?;
    let mut agg: Vec<(f64, f64)> = vec![(0.0, 0.0); 4];
    let mut n_pts = 0usize;
    for t in 0..trials {
        let seed = cfg.seed.wrapping_add(t as u64);
        let net = FeatureNet::init(cfg.m, cfg.r_m, seed)?;
        let trial = build_trial(cfg.problem, map.clone(), net, &cfg.bcs)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(3);
        let beta: Vec<f64> = (0..cfg.m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let edges = edge_errors(cfg.problem, &map, trial.as_ref(), &beta, &cfg.bcs)?;
        n_pts += N_B;
        for (e, er) in edges.iter().enumerate() {
            if er.is_bc {
                agg[e].0 = agg[e].0.max(er.max);
                agg[e].1 += er.rms * er.rms * N_B as f64;
            }
        }
    }
    let mut edges = Vec::with_capacity(4);
    let mut worst = 0.0f64;
    for (e, edge) in EdgeId::ALL.into_iter().enumerate() {
        if matches!(cfg.bcs[e], BcKind::Free) {
            continue;
        }
        let max = agg[e].0;
        worst = worst.max(max);
        edges.push(EdgeErrors {
            edge: edge.name().to_string(),
            bc: bc_name(&cfg.bcs[e]),
            is_bc: true,
            max,
            rms: (agg[e].1 / n_pts as f64).sqrt(),
        });
    }
    Ok(BcAuditReport { trials, edges, worst, pass: worst <= BC_AUDIT_TOL })
}

/// Map audit: univalency plus boundary reproduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapAuditReport {
    pub n: usize,
    pub min_det: f64,
    pub min_at: (f64, f64),
    pub sign_changes: usize,
    pub singular_corners: usize,
    pub boundary_max_gap: f64,
    pub pass: bool,
}

/// Audit a map on an `n×n` grid and check that the four boundary curves
/// are reproduced exactly (the transfinite map interpolates its edges).
pub fn map_audit(map: &DomainMap<f64>, n: usize) -> MapAuditReport {
    let rep = map.univalency_audit(n);
    let mut gap = 0.0f64;
    for edge in EdgeId::ALL {
        let curve = match edge {
            EdgeId::Ab => &map.domain.ab,
            EdgeId::Bc => &map.domain.bc,
            EdgeId::Cd => &map.domain.cd,
            EdgeId::Ad => &map.domain.ad,
        };
        for i in 0..N_B {
            let s = grid_coord(i, N_B);
            let (xi, eta) = map.edge_coords(edge, s);
            let p = map.point(xi, eta);
            let q = curve.eval(s, 0).expect("curve eval");
            gap = gap.max((p.x - q.x).abs().max((p.y - q.y).abs()));
        }
    }
    MapAuditReport {
        n: rep.n,
        min_det: rep.min_det,
        min_at: rep.min_at,
        sign_changes: rep.sign_changes,
        singular_corners: rep.singular_corners,
        boundary_max_gap: gap,
        pass: rep.pass && gap <= BOUNDARY_TOL,
    }
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub e_rms: f64,
    pub e_max: f64,
}

/// Repeat the solve for each feature count with fixed seed policy.
pub fn convergence(cfg: &RunConfig, m_list: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let mut c = cfg.clone();
        c.m = m;
        let out = run_solve(&c)?;
        rows.push(ConvergenceRow {
            m,
            e_rms: out.summary.metrics.e_rms,
            e_max: out.summary.metrics.e_max,
        });
    }
    Ok(rows)
}

/// Convergence rows as CSV.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut csv = String::from("m,e_rms,e_max\n");
    for r in rows {
        writeln!(csv, "{},{:.16e},{:.16e}", r.m, r.e_rms, r.e_max).unwrap();
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            domain: DomainSpec::Name("helm-1".into()),
            map: None,
            problem: ProblemKind::Helmholtz,
            bcs: crate::problems::all_dirichlet(),
            q: 8,
            m: 30,
            r_m: 2.0,
            seed: 5,
            solver: GnOpts::default(),
        }
    }

    /// [TRIVIAL] Config JSON round-trips and validates.
    #[test]
    fn config_roundtrip() {
        let cfg = small_cfg();
        let s = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&s).unwrap();
        assert_eq!(back.q, 8);
        assert!(matches!(back.domain, DomainSpec::Name(ref n) if n == "helm-1"));
        // Invalid configs are rejected.
        assert!(RunConfig::from_json(&s.replace("\"q\":8", "\"q\":1")).is_err());
        assert!(RunConfig::from_json(&s.replace("helm-1", "nope")).is_err());
    }

    /// Rerunning an identical config produces a bit-identical JSON summary
    /// and CSV bodies.
    #[test]
    fn rerun_bit_identical() {
        let cfg = small_cfg();
        let a = run_solve(&cfg).unwrap();
        let b = run_solve(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a.summary).unwrap(),
            serde_json::to_string(&b.summary).unwrap()
        );
        assert_eq!(a.solution_csv, b.solution_csv);
        assert_eq!(a.gridlines_csv, b.gridlines_csv);
    }

    /// [TRIVIAL: schema] The summary carries the full error-report structure:
    /// domain errors plus four edges × (max, rms).
    #[test]
    fn summary_schema() {
        let out = run_solve(&small_cfg()).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&out.summary).unwrap()).unwrap();
        assert!(v["metrics"]["e_max"].is_number());
        assert!(v["metrics"]["e_rms"].is_number());
        let edges = v["metrics"]["edges"].as_array().unwrap();
        assert_eq!(edges.len(), 4);
        for e in edges {
            assert!(e["max"].is_number() && e["rms"].is_number());
        }
        // Solution CSV: header + 101×101 rows.
        assert_eq!(out.solution_csv.lines().count(), 1 + N_V * N_V);
        assert!(out.solution_csv.starts_with("xi,eta,x,y,u,u_exact,abs_err"));
        // All-Dirichlet: every edge error is a BC error at machine level.
        for e in &out.summary.metrics.edges {
            assert!(e.is_bc && e.max < 1e-11, "{}: {}", e.edge, e.max);
        }
    }

    /// Free CD edge of a heat run is reported as a solution error, not a
    /// BC error.
    #[test]
    fn heat_free_edge_reported_as_solution_error() {
        let cfg = RunConfig {
            domain: DomainSpec::Name("heat-1".into()),
            map: None,
            problem: ProblemKind::Heat,
            bcs: crate::problems::three_edge(),
            q: 8,
            m: 40,
            r_m: 1.5,
            seed: 3,
            solver: GnOpts::default(),
        };
        let out = run_solve(&cfg).unwrap();
        let cd = &out.summary.metrics.edges[2];
        assert_eq!(cd.edge, "CD");
        assert!(!cd.is_bc);
        // The three Dirichlet edges are exact.
        for e in [0usize, 1, 3] {
            assert!(out.summary.metrics.edges[e].is_bc);
            assert!(out.summary.metrics.edges[e].max < 1e-11);
        }
    }

    /// BC audit passes on a flux configuration with random β.
    #[test]
    fn bc_audit_flux_passes() {
        let mut cfg = small_cfg();
        cfg.bcs = [
            BcKind::Dirichlet,
            BcKind::Robin { alpha: 1.0 },
            BcKind::Dirichlet,
            BcKind::Dirichlet,
        ];
        cfg.m = 20;
        let rep = bc_audit(&cfg, 5).unwrap();
        assert!(rep.pass, "worst {:.3e}", rep.worst);
        assert_eq!(rep.edges.len(), 4);
    }

    /// Map audits: catalog domains pass with designated kinds; nlh-2 with
    /// the plain Coons patch fails; boundaries reproduced to 1e−13.
    #[test]
    fn map_audits() {
        for name in crate::geometry::CATALOG_NAMES {
            let map = catalog_map(name).unwrap();
            let rep = map_audit(&map, 51);
            assert!(rep.pass, "{name}: min detJ {} gap {:.3e}", rep.min_det, rep.boundary_max_gap);
        }
        let plain = DomainMap::coons(catalog::<f64>("nlh-2").unwrap());
        assert!(!map_audit(&plain, 51).pass);
    }

    /// Convergence sweep produces one row per M and reuses the fixed seed.
    #[test]
    fn convergence_rows() {
        let cfg = small_cfg();
        let rows = convergence(&cfg, &[10, 20]).unwrap();
        assert_eq!(rows.len(), 2);
        let csv = convergence_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        // Single-entry list degenerates to cmd_solve.
        let single = convergence(&cfg, &[30]).unwrap();
        let full = run_solve(&cfg).unwrap();
        assert_eq!(single[0].e_rms, full.summary.metrics.e_rms);
    }
}

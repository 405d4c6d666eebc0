//! Constrained-expression trial forms: `V = g − Pg + PF^g`.
//!
//! Each form takes a domain map, boundary data, and (implicitly) a feature
//! network supplying the free function `g`, and produces at every standard
//! point the affine decomposition `V = c + B·β` — together with all first
//! and second standard-domain derivatives — where `β` are the network output
//! coefficients. The construction guarantees the prescribed boundary
//! conditions hold exactly for *any* `β`.
//!
//! The decomposition is obtained by running one evaluation code path twice:
//! once with `g = 0` and the true boundary data (the `c` part), and once per
//! feature with `g = φ_k` and all data zeroed (the columns of `B`). Every
//! construction is jointly linear in `(g, data)`, so this recovers the exact
//! affine split.
//!
//! Submodules: [`dirichlet`] (four-edge and three-edge Dirichlet),
//! [`neumann`] (single Neumann/Robin edge, adjacent Neumann pair),
//! [`robin`] (adjacent Robin pair, mixed Neumann+Robin corner).

pub mod dirichlet;
pub mod neumann;
pub mod robin;

use crate::error::{Error, Result};
use crate::features::FeatureNet;
use crate::geometry::EdgeId;
use crate::jet::{BJet, UJet};
use crate::mapping::DomainMap;
use crate::scalar::Scalar;
use std::sync::Arc;

pub use dirichlet::{dirichlet_form, dirichlet_form_three_edge, ThreeEdgeData};
pub use neumann::{adjacent_neumann_form, single_flux_form, single_neumann_form};
pub use robin::{adjacent_robin_form, mixed_corner_form, single_robin_form};

/// Tolerance for corner compatibility of prescribed Dirichlet data.
pub const DATA_CORNER_TOL: f64 = 1e-12;

/// Tolerance for the orthogonal-corner data identities (they are analytic
/// for compatible data but evaluated numerically).
pub const IDENTITY_TOL: f64 = 1e-8;

/// An edge-data trace as a function of the edge parameter, returning a jet
/// whose value and first two derivatives must be exact (the `d3` slot is
/// never consumed and may be zero).
pub type EdgeFn<T> = Arc<dyn Fn(T) -> UJet<T> + Send + Sync>;

/// Constant edge trace.
pub fn constant_edge<T: Scalar>(c: T) -> EdgeFn<T> {
    Arc::new(move |_| UJet::constant(c))
}

/// Identically zero edge trace.
pub fn zero_edge<T: Scalar>() -> EdgeFn<T> {
    Arc::new(|_| UJet::zero())
}

/// Reverse an edge trace: `s → F(−s)` with jet sign flips.
pub fn reversed_edge<T: Scalar>(f: EdgeFn<T>) -> EdgeFn<T> {
    Arc::new(move |s: T| {
        let j = f(-s);
        UJet::new(j.f, -j.d1, j.d2, -j.d3)
    })
}

/// Dirichlet trace data on all four edges (order: AB, BC, CD, AD), as
/// functions of the edge parameter per the standard conventions
/// (`AB(ξ)`, `BC(η)`, `CD(ξ)`, `AD(η)`).
#[derive(Clone)]
pub struct DirichletData<T> {
    pub ab: EdgeFn<T>,
    pub bc: EdgeFn<T>,
    pub cd: EdgeFn<T>,
    pub ad: EdgeFn<T>,
}

impl<T: Scalar> DirichletData<T> {
    pub fn constant(c: T) -> Self {
        DirichletData {
            ab: constant_edge(c),
            bc: constant_edge(c),
            cd: constant_edge(c),
            ad: constant_edge(c),
        }
    }

    /// Corner values `[u_A, u_B, u_C, u_D]` with compatibility validation
    /// over the listed vertices (`'A'`–`'D'`).
    pub fn corner_values(&self, check: &[char]) -> Result<[T; 4]> {
        let one = T::one();
        let pairs = [
            ('A', (self.ab)(-one).f, (self.ad)(-one).f),
            ('B', (self.ab)(one).f, (self.bc)(-one).f),
            ('C', (self.bc)(one).f, (self.cd)(one).f),
            ('D', (self.cd)(-one).f, (self.ad)(one).f),
        ];
        let mut out = [T::zero(); 4];
        for (i, (v, a, b)) in pairs.into_iter().enumerate() {
            if check.contains(&v) {
                let gap = (a - b).abs().to_f64();
                if gap > DATA_CORNER_TOL {
                    return Err(Error::CornerMismatch { vertex: v, gap });
                }
            }
            out[i] = a;
        }
        Ok(out)
    }
}

/// Flux (Neumann or Robin) data on one edge: `n·∇u + α u = u_r` with the
/// prescribed trace `u_r` given along the edge parameter. `α = 0` is a
/// Neumann condition.
#[derive(Clone)]
pub struct FluxData<T> {
    pub alpha: T,
    pub data: EdgeFn<T>,
}

impl<T: Scalar> FluxData<T> {
    pub fn neumann(data: EdgeFn<T>) -> Self {
        FluxData { alpha: T::zero(), data }
    }
    pub fn robin(alpha: T, data: EdgeFn<T>) -> Self {
        FluxData { alpha, data }
    }
}

/// A source for the free function `g`: either a single network feature or
/// the zero function.
pub trait GSource<T: Scalar>: Sync {
    fn partial(&self, i: usize, j: usize, xi: T, eta: T) -> T;

    fn bjet(&self, xi: T, eta: T) -> BJet<T> {
        BJet {
            f: self.partial(0, 0, xi, eta),
            fx: self.partial(1, 0, xi, eta),
            fy: self.partial(0, 1, xi, eta),
            fxx: self.partial(2, 0, xi, eta),
            fxy: self.partial(1, 1, xi, eta),
            fyy: self.partial(0, 2, xi, eta),
        }
    }

    /// Order-3 jet of `∂^i_ξ ∂^j_η g` along ξ (`along_xi`) or η.
    fn ujet(&self, i: usize, j: usize, along_xi: bool, xi: T, eta: T) -> UJet<T> {
        let p = |d: usize| {
            if along_xi {
                self.partial(i + d, j, xi, eta)
            } else {
                self.partial(i, j + d, xi, eta)
            }
        };
        UJet::new(p(0), p(1), p(2), p(3))
    }
}

/// The zero free function (used for the data part `c`).
pub struct ZeroG;

impl<T: Scalar> GSource<T> for ZeroG {
    fn partial(&self, _i: usize, _j: usize, _xi: T, _eta: T) -> T {
        T::zero()
    }
}

/// One network feature as the free function (used for the `B` columns).
pub struct FeatureG<'a, T> {
    pub net: &'a FeatureNet<T>,
    pub k: usize,
}

impl<T: Scalar> GSource<T> for FeatureG<'_, T> {
    fn partial(&self, i: usize, j: usize, xi: T, eta: T) -> T {
        self.net.partial(self.k, i, j, xi, eta)
    }
}

/// Tensor product of a ξ-jet and an η-jet into an order-2 bivariate jet.
#[inline]
pub fn tensor<T: Scalar>(u: UJet<T>, v: UJet<T>) -> BJet<T> {
    BJet {
        f: u.f * v.f,
        fx: u.d1 * v.f,
        fy: u.f * v.d1,
        fxx: u.d2 * v.f,
        fxy: u.d1 * v.d1,
        fyy: u.f * v.d2,
    }
}

/// Affine decomposition of `V` (and its standard-domain derivatives to
/// second order) at one point: `V = c + Σ_k cols[k]·β_k`.
#[derive(Debug, Clone)]
pub struct AffineJet<T> {
    pub c: BJet<T>,
    pub cols: Vec<BJet<T>>,
}

impl<T: Scalar> AffineJet<T> {
    /// Contract with a coefficient vector.
    pub fn with_beta(&self, beta: &[T]) -> BJet<T> {
        assert_eq!(beta.len(), self.cols.len());
        let mut acc = self.c;
        for (col, &b) in self.cols.iter().zip(beta) {
            acc = acc + col.scale(b);
        }
        acc
    }
}

/// A constrained-expression trial form.
pub trait Trial<T: Scalar>: Send + Sync {
    fn map(&self) -> &DomainMap<T>;
    fn n_features(&self) -> usize;

    /// Affine decomposition of `V` and its derivatives at `(ξ,η)`.
    fn eval(&self, xi: T, eta: T) -> AffineJet<T>;

    /// Raw free-function feature values `Φ_k` at the standard point, in the
    /// coordinates the free function is actually evaluated in (collocation
    /// g-zero rows).
    fn g_features(&self, xi: T, eta: T) -> Vec<T>;

    /// `V` jet for a concrete coefficient vector.
    fn eval_with(&self, beta: &[T], xi: T, eta: T) -> BJet<T> {
        self.eval(xi, eta).with_beta(beta)
    }
}

/// Wrap a canonical-orientation form built on a rotated domain so that it
/// evaluates in the original standard coordinates.
///
/// One quad rotation maps original coordinates `(ξ,η)` to rotated
/// coordinates `(ξ',η') = (η, −ξ)`; the inverse relation is
/// `(ξ,η) = (−η', ξ')`. Derivatives transform accordingly
/// (`V_ξ = −V'_η'`, `V_η = V'_ξ'`, …).
pub struct RotatedTrial<T> {
    pub inner: Box<dyn Trial<T>>,
    /// Number of quarter rotations applied to reach the inner orientation.
    pub k: usize,
    /// Map in the *original* orientation (for residual audits etc.).
    pub outer_map: DomainMap<T>,
}

impl<T: Scalar> Trial<T> for RotatedTrial<T> {
    fn map(&self) -> &DomainMap<T> {
        &self.outer_map
    }
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }
    fn eval(&self, xi: T, eta: T) -> AffineJet<T> {
        let (mut x, mut y) = (xi, eta);
        for _ in 0..self.k {
            let (nx, ny) = (y, -x);
            x = nx;
            y = ny;
        }
        let mut a = self.inner.eval(x, y);
        let back = |b: BJet<T>| BJet {
            f: b.f,
            fx: -b.fy,
            fy: b.fx,
            fxx: b.fyy,
            fxy: -b.fxy,
            fyy: b.fxx,
        };
        for _ in 0..self.k {
            a.c = back(a.c);
            for col in a.cols.iter_mut() {
                *col = back(*col);
            }
        }
        a
    }
    fn g_features(&self, xi: T, eta: T) -> Vec<T> {
        let (mut x, mut y) = (xi, eta);
        for _ in 0..self.k {
            let (nx, ny) = (y, -x);
            x = nx;
            y = ny;
        }
        self.inner.g_features(x, y)
    }
}

/// Rotate per-edge data `[AB, BC, CD, AD]` by one quad rotation (the new
/// edges are `[BC, rev CD, AD, rev AB]`).
pub fn rotate_edge_fns<T: Scalar>(fns: [EdgeFn<T>; 4], k: usize) -> [EdgeFn<T>; 4] {
    let mut cur = fns;
    for _ in 0..(k % 4) {
        let [ab, bc, cd, ad] = cur;
        cur = [bc, reversed_edge(cd), ad, reversed_edge(ab)];
    }
    cur
}

#[cfg(test)]
pub(crate) mod testutil {
    //! Shared fixtures for trial-form tests: simple domains, manufactured
    //! fields, and exact edge-trace/flux-trace builders.

    use super::EdgeFn;
    use crate::geometry::{make_quad, EdgeId, ParametricCurve, Point2, QuadDomain};
    use crate::jet::UJet;
    use crate::mapping::DomainMap;
    use std::sync::Arc;

    pub fn quad(v: [(f64, f64); 4]) -> QuadDomain<f64> {
        let p = |i: usize| Point2::new(v[i].0, v[i].1);
        make_quad(
            ParametricCurve::Line { a: p(0), b: p(1) },
            ParametricCurve::Line { a: p(1), b: p(2) },
            ParametricCurve::Line { a: p(3), b: p(2) },
            ParametricCurve::Line { a: p(0), b: p(3) },
        )
        .unwrap()
    }

    pub fn unit_square_map() -> DomainMap<f64> {
        DomainMap::coons(quad([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]))
    }

    /// A non-orthogonal (sheared) quadrilateral: every corner has λ = 1.
    pub fn sheared_map() -> DomainMap<f64> {
        DomainMap::coons(quad([(0.0, 0.0), (2.0, 0.3), (2.6, 2.1), (0.4, 1.8)]))
    }

    pub fn rng_seq(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed | 1;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        }
    }

    /// Per-coordinate order-3 jets of the map along one edge.
    pub fn edge_xy_jets(
        map: &DomainMap<f64>,
        edge: EdgeId,
        s: f64,
    ) -> (UJet<f64>, UJet<f64>) {
        let (xi, eta) = map.edge_coords(edge, s);
        let along_xi = matches!(edge, EdgeId::Ab | EdgeId::Cd);
        let at = |i: usize, j: usize| map.partial(i, j, xi, eta).unwrap();
        if along_xi {
            (
                UJet::new(at(0, 0).x, at(1, 0).x, at(2, 0).x, at(3, 0).x),
                UJet::new(at(0, 0).y, at(1, 0).y, at(2, 0).y, at(3, 0).y),
            )
        } else {
            (
                UJet::new(at(0, 0).x, at(0, 1).x, at(0, 2).x, at(0, 3).x),
                UJet::new(at(0, 0).y, at(0, 1).y, at(0, 2).y, at(0, 3).y),
            )
        }
    }

    /// Dirichlet trace of a bivariate jet-field along a map edge, with exact
    /// parameter derivatives via composition.
    pub fn trace_of<F>(map: &DomainMap<f64>, edge: EdgeId, f: F) -> EdgeFn<f64>
    where
        F: Fn(UJet<f64>, UJet<f64>) -> UJet<f64> + Send + Sync + 'static,
    {
        let map = map.clone();
        Arc::new(move |s: f64| {
            let (x, y) = edge_xy_jets(&map, edge, s);
            f(x, y)
        })
    }

    /// Robin trace `u_r(s) = n·∇u + α·u` of a field with analytic gradient
    /// jets, along a map edge. The outward normal is rebuilt from the edge
    /// tangent jets so `u_r` carries exact parameter derivatives.
    pub fn flux_trace_of<Fx, Fy, F0>(
        map: &DomainMap<f64>,
        edge: EdgeId,
        alpha: f64,
        ux: Fx,
        uy: Fy,
        u: F0,
    ) -> EdgeFn<f64>
    where
        Fx: Fn(UJet<f64>, UJet<f64>) -> UJet<f64> + Send + Sync + 'static,
        Fy: Fn(UJet<f64>, UJet<f64>) -> UJet<f64> + Send + Sync + 'static,
        F0: Fn(UJet<f64>, UJet<f64>) -> UJet<f64> + Send + Sync + 'static,
    {
        let map = map.clone();
        Arc::new(move |s: f64| {
            let (x, y) = edge_xy_jets(&map, edge, s);
            let tx = x.derivative();
            let ty = y.derivative();
            let norm = (tx * tx + ty * ty).sqrt();
            // Outward normal σ·τ: (τy,−τx)/|τ| on AB and BC, (−τy,τx)/|τ|
            // on CD and AD.
            let (nx, ny) = match edge {
                EdgeId::Ab | EdgeId::Bc => (ty / norm, -(tx / norm)),
                EdgeId::Cd | EdgeId::Ad => (-(ty / norm), tx / norm),
            };
            nx * ux(x, y) + ny * uy(x, y) + u(x, y).scale(alpha)
        })
    }

    /// Manufactured field `u = sin(x + 2y) + x·y²` and its gradient.
    pub fn test_field(x: UJet<f64>, y: UJet<f64>) -> UJet<f64> {
        (x + y.scale(2.0)).sin() + x * y * y
    }
    pub fn test_field_x(x: UJet<f64>, y: UJet<f64>) -> UJet<f64> {
        (x + y.scale(2.0)).cos() + y * y
    }
    pub fn test_field_y(x: UJet<f64>, y: UJet<f64>) -> UJet<f64> {
        (x + y.scale(2.0)).cos().scale(2.0) + (x * y).scale(2.0)
    }
}

/// Maximum Dirichlet residual `|V − F|` over `n` uniform points of an edge.
pub fn dirichlet_residual<T: Scalar>(
    form: &dyn Trial<T>,
    beta: &[T],
    edge: EdgeId,
    data: &EdgeFn<T>,
    n: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        let s = T::lit(-1.0 + 2.0 * i as f64 / (n - 1) as f64);
        let (xi, eta) = form.map().edge_coords(edge, s);
        let v = form.eval_with(beta, xi, eta);
        let r = (v.f - data(s).f).abs().to_f64();
        worst = worst.max(r);
    }
    worst
}

/// Maximum physical flux residual `|n·∇u + α u − u_r|` over `n` uniform
/// points of an edge.
pub fn flux_residual<T: Scalar>(
    form: &dyn Trial<T>,
    beta: &[T],
    edge: EdgeId,
    flux: &FluxData<T>,
    n: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        let s = T::lit(-1.0 + 2.0 * i as f64 / (n - 1) as f64);
        let (xi, eta) = form.map().edge_coords(edge, s);
        let em = form.map().edge_metrics(edge, s).expect("nonsingular edge metric");
        let v = form.eval_with(beta, xi, eta);
        let normal = v.fx * em.k_x.f + v.fy * em.k_y.f;
        let r = (normal + flux.alpha * v.f - (flux.data)(s).f).abs().to_f64();
        worst = worst.max(r);
    }
    worst
}

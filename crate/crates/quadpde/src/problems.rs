//! Benchmark PDE problems with manufactured exact solutions.
//!
//! Three problem kinds are provided, each on the corresponding catalog
//! domains:
//!
//! * Helmholtz: `Δu − 100·u = f`,
//! * nonlinear Helmholtz: `Δu − 20·u + 10·cos(2u) = f`,
//! * heat conduction on a deforming 1D interval, solved on the space-time
//!   quad with the vertical coordinate as time: `u_t − ν·u_xx = f`,
//!   `ν = 0.005`.
//!
//! Every kind carries a separable closed-form exact solution; the source
//! term and all boundary data derive from it analytically (closed-form
//! factor jets, no finite differencing), so generated data automatically
//! satisfies every corner compatibility identity the trial forms require.
//!
//! The heat solution formula is written in the literature with a second
//! coordinate named `y`; it is read here as the time coordinate of the
//! space-time domain.

use crate::error::{Error, Result};
use crate::features::FeatureNet;
use crate::geometry::EdgeId;
use crate::jet::{BJet, UJet};
use crate::mapping::{DomainMap, PhysDerivs};
use crate::scalar::Scalar;
use crate::trial::{
    adjacent_neumann_form, adjacent_robin_form, dirichlet_form, dirichlet_form_three_edge,
    single_flux_form, tensor, DirichletData, EdgeFn, FluxData, ThreeEdgeData, Trial,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Heat-equation thermal diffusivity.
pub const HEAT_NU: f64 = 0.005;

/// The benchmark PDE kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Helmholtz,
    NonlinearHelmholtz,
    Heat,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Helmholtz => "helmholtz",
            ProblemKind::NonlinearHelmholtz => "nonlinear_helmholtz",
            ProblemKind::Heat => "heat",
        }
    }

    /// 1D solution factor `P(s)` (the exact solutions are `±P(x)·P(y)`).
    fn factor<T: Scalar>(self, s: UJet<T>) -> UJet<T> {
        let pi = T::lit(std::f64::consts::PI);
        match self {
            ProblemKind::Helmholtz => {
                // 2·cos(1.5π s + 0.4π) + 1.5·cos(3π s − 0.2π)
                (s.scale(pi * T::lit(1.5)) + UJet::constant(pi * T::lit(0.4)))
                    .cos()
                    .scale(T::lit(2.0))
                    + (s.scale(pi * T::lit(3.0)) - UJet::constant(pi * T::lit(0.2)))
                        .cos()
                        .scale(T::lit(1.5))
            }
            ProblemKind::NonlinearHelmholtz => {
                // cos(π/2·(s − 3/4)²)
                let d = s - UJet::constant(T::lit(0.75));
                (d * d).scale(pi * T::lit(0.5)).cos()
            }
            ProblemKind::Heat => {
                // 2·cos(0.75π s + 0.42π) + 1.5·cos(1.5π s − 0.22π)
                (s.scale(pi * T::lit(0.75)) + UJet::constant(pi * T::lit(0.42)))
                    .cos()
                    .scale(T::lit(2.0))
                    + (s.scale(pi * T::lit(1.5)) - UJet::constant(pi * T::lit(0.22)))
                        .cos()
                        .scale(T::lit(1.5))
            }
        }
    }

    /// Derivative factor `P'(s)` as a jet (closed form, so traces of the
    /// gradient keep exact parameter derivatives).
    fn dfactor<T: Scalar>(self, s: UJet<T>) -> UJet<T> {
        let pi = T::lit(std::f64::consts::PI);
        match self {
            ProblemKind::Helmholtz => {
                let w1 = pi * T::lit(1.5);
                let w2 = pi * T::lit(3.0);
                -(s.scale(w1) + UJet::constant(pi * T::lit(0.4)))
                    .sin()
                    .scale(T::lit(2.0) * w1)
                    - (s.scale(w2) - UJet::constant(pi * T::lit(0.2)))
                        .sin()
                        .scale(T::lit(1.5) * w2)
            }
            ProblemKind::NonlinearHelmholtz => {
                let d = s - UJet::constant(T::lit(0.75));
                -((d * d).scale(pi * T::lit(0.5)).sin() * d).scale(pi)
            }
            ProblemKind::Heat => {
                let w1 = pi * T::lit(0.75);
                let w2 = pi * T::lit(1.5);
                -(s.scale(w1) + UJet::constant(pi * T::lit(0.42)))
                    .sin()
                    .scale(T::lit(2.0) * w1)
                    - (s.scale(w2) - UJet::constant(pi * T::lit(0.22)))
                        .sin()
                        .scale(T::lit(1.5) * w2)
            }
        }
    }

    /// Overall sign/scale of the product of factors.
    fn product_scale<T: Scalar>(self) -> T {
        match self {
            ProblemKind::Helmholtz => T::lit(-1.0),
            ProblemKind::NonlinearHelmholtz => T::lit(4.0),
            ProblemKind::Heat => T::one(),
        }
    }

    /// Exact solution with gradient and Hessian at a physical point
    /// (`y` is the time coordinate for the heat kind).
    pub fn exact<T: Scalar>(self, x: T, y: T) -> BJet<T> {
        let px = self.factor(UJet::variable(x));
        let py = self.factor(UJet::variable(y));
        tensor(px, py).scale(self.product_scale())
    }

    /// Exact solution value, x-derivative, and y-derivative as jets along
    /// a parametric curve given by coordinate jets.
    pub fn exact_along<T: Scalar>(
        self,
        x: UJet<T>,
        y: UJet<T>,
    ) -> (UJet<T>, UJet<T>, UJet<T>) {
        let c = self.product_scale();
        let px = self.factor(x);
        let py = self.factor(y);
        let dpx = self.dfactor(x);
        let dpy = self.dfactor(y);
        ((px * py).scale(c), (dpx * py).scale(c), (px * dpy).scale(c))
    }

    /// Linear part of the PDE operator applied to physical derivatives.
    pub fn lop<T: Scalar>(self, d: &PhysDerivs<T>) -> T {
        match self {
            ProblemKind::Helmholtz => d.dxx + d.dyy - T::lit(100.0) * d.v,
            ProblemKind::NonlinearHelmholtz => d.dxx + d.dyy - T::lit(20.0) * d.v,
            ProblemKind::Heat => d.dy - T::lit(HEAT_NU) * d.dxx,
        }
    }

    /// Nonlinear term `N(u)` and its derivative `N'(u)` (zero for the
    /// linear kinds).
    pub fn nonlinear<T: Scalar>(self, u: T) -> (T, T) {
        match self {
            ProblemKind::NonlinearHelmholtz => {
                let two_u = T::lit(2.0) * u;
                (T::lit(10.0) * two_u.cos(), -T::lit(20.0) * two_u.sin())
            }
            _ => (T::zero(), T::zero()),
        }
    }

    pub fn is_linear(self) -> bool {
        !matches!(self, ProblemKind::NonlinearHelmholtz)
    }

    /// Manufactured source `f = L u_ex + N(u_ex)` at a physical point.
    pub fn source<T: Scalar>(self, x: T, y: T) -> T {
        let e = self.exact(x, y);
        let d = PhysDerivs { v: e.f, dx: e.fx, dy: e.fy, dxx: e.fxx, dxy: e.fxy, dyy: e.fyy };
        self.lop(&d) + self.nonlinear(e.f).0
    }
}

/// Boundary-condition kind for one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bc", rename_all = "snake_case")]
pub enum BcKind<T> {
    Dirichlet,
    Neumann,
    Robin { alpha: T },
    /// No condition on this edge (three-edge initial/boundary problems).
    Free,
}

impl<T: Scalar> BcKind<T> {
    fn is_flux(&self) -> bool {
        matches!(self, BcKind::Neumann | BcKind::Robin { .. })
    }
    fn alpha(&self) -> T {
        match self {
            BcKind::Robin { alpha } => *alpha,
            _ => T::zero(),
        }
    }
}

/// Per-edge BC assignment in the order AB, BC, CD, AD.
pub type BcAssignment<T> = [BcKind<T>; 4];

/// All-Dirichlet assignment.
pub fn all_dirichlet<T: Scalar>() -> BcAssignment<T> {
    [BcKind::Dirichlet; 4]
}

/// Three-edge assignment (CD free), the heat-problem default.
pub fn three_edge<T: Scalar>() -> BcAssignment<T> {
    [BcKind::Dirichlet, BcKind::Dirichlet, BcKind::Free, BcKind::Dirichlet]
}

/// Coordinate jets of the map along one edge, in the edge parameter.
pub fn edge_xy_jets<T: Scalar>(
    map: &DomainMap<T>,
    edge: EdgeId,
    s: T,
) -> (UJet<T>, UJet<T>) {
    let (xi, eta) = map.edge_coords(edge, s);
    let along_xi = matches!(edge, EdgeId::Ab | EdgeId::Cd);
    let at = |i: usize, j: usize| map.partial(i, j, xi, eta).expect("edge jet");
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

/// Dirichlet trace of the exact solution along a map edge.
pub fn dirichlet_trace<T: Scalar>(
    kind: ProblemKind,
    map: &DomainMap<T>,
    edge: EdgeId,
) -> EdgeFn<T> {
    let map = map.clone();
    Arc::new(move |s: T| {
        let (x, y) = edge_xy_jets(&map, edge, s);
        kind.exact_along(x, y).0
    })
}

/// Flux trace `u_r(s) = n·∇u_ex + α·u_ex` along a map edge, with the
/// outward unit normal rebuilt from the edge tangent jets (so the trace
/// carries exact parameter derivatives).
pub fn flux_trace<T: Scalar>(
    kind: ProblemKind,
    map: &DomainMap<T>,
    edge: EdgeId,
    alpha: T,
) -> EdgeFn<T> {
    let map = map.clone();
    Arc::new(move |s: T| {
        let (x, y) = edge_xy_jets(&map, edge, s);
        let (u, ux, uy) = kind.exact_along(x, y);
        let tx = x.derivative();
        let ty = y.derivative();
        let norm = (tx * tx + ty * ty).sqrt();
        // Outward normal σ·τ: (τy,−τx)/|τ| on AB/BC, (−τy,τx)/|τ| on CD/AD.
        let (nx, ny) = match edge {
            EdgeId::Ab | EdgeId::Bc => (ty / norm, -(tx / norm)),
            EdgeId::Cd | EdgeId::Ad => (-(ty / norm), tx / norm),
        };
        nx * ux + ny * uy + u.scale(alpha)
    })
}

/// Exact-solution boundary data for one edge under its assigned BC kind:
/// the Dirichlet trace, or the flux trace with the assigned α.
pub fn edge_data<T: Scalar>(
    kind: ProblemKind,
    map: &DomainMap<T>,
    edge: EdgeId,
    bc: &BcKind<T>,
) -> EdgeFn<T> {
    match bc {
        BcKind::Dirichlet | BcKind::Free => dirichlet_trace(kind, map, edge),
        BcKind::Neumann | BcKind::Robin { .. } => flux_trace(kind, map, edge, bc.alpha()),
    }
}

/// Build the constrained-expression trial form matching a BC assignment,
/// with all boundary data manufactured from the exact solution.
///
/// Supported assignments: all-Dirichlet; exactly one Neumann/Robin edge;
/// two Neumann/Robin edges meeting at a corner; three Dirichlet edges with
/// CD free. Anything else (opposite flux edges, ≥3 flux edges, other free
/// layouts) is rejected.
pub fn build_trial<T: Scalar>(
    kind: ProblemKind,
    map: DomainMap<T>,
    net: FeatureNet<T>,
    assign: &BcAssignment<T>,
) -> Result<Box<dyn Trial<T>>> {
    let flux: Vec<usize> = (0..4).filter(|&i| assign[i].is_flux()).collect();
    let free: Vec<usize> = (0..4)
        .filter(|&i| matches!(assign[i], BcKind::Free))
        .collect();

    if !free.is_empty() {
        if free == [2] && flux.is_empty() {
            let data = ThreeEdgeData {
                ab: dirichlet_trace(kind, &map, EdgeId::Ab),
                bc: dirichlet_trace(kind, &map, EdgeId::Bc),
                ad: dirichlet_trace(kind, &map, EdgeId::Ad),
            };
            return Ok(Box::new(dirichlet_form_three_edge(map, net, data)?));
        }
        return Err(Error::NotSupported(
            "free edges are only supported as CD-free with Dirichlet elsewhere".into(),
        ));
    }

    let dd = DirichletData {
        ab: dirichlet_trace(kind, &map, EdgeId::Ab),
        bc: dirichlet_trace(kind, &map, EdgeId::Bc),
        cd: dirichlet_trace(kind, &map, EdgeId::Cd),
        ad: dirichlet_trace(kind, &map, EdgeId::Ad),
    };

    match flux.as_slice() {
        [] => Ok(Box::new(dirichlet_form(map, net, dd)?)),
        [e] => {
            let edge = EdgeId::ALL[*e];
            let fd = FluxData {
                alpha: assign[*e].alpha(),
                data: flux_trace(kind, &map, edge, assign[*e].alpha()),
            };
            single_flux_form(map, net, dd, edge, fd)
        }
        [a, b] => {
            // Adjacent pair (cyclically consecutive) shares one corner.
            let (prev, next) = if (*a + 1) % 4 == *b {
                (*a, *b)
            } else if (*b + 1) % 4 == *a {
                (*b, *a)
            } else {
                return Err(Error::NotSupported(
                    "Neumann/Robin conditions on opposite edges are not supported".into(),
                ));
            };
            let corner = ['B', 'C', 'D', 'A'][prev];
            let mk = |i: usize| FluxData {
                alpha: assign[i].alpha(),
                data: flux_trace(kind, &map, EdgeId::ALL[i], assign[i].alpha()),
            };
            let (fp, fn_) = (mk(prev), mk(next));
            let both_neumann = assign[prev].alpha() == T::zero()
                && assign[next].alpha() == T::zero();
            if both_neumann {
                adjacent_neumann_form(map, net, dd, corner, fp.data, fn_.data)
            } else {
                adjacent_robin_form(map, net, dd, corner, fp, fn_)
            }
        }
        _ => Err(Error::NotSupported(
            "more than two Neumann/Robin edges are not supported".into(),
        )),
    }
}

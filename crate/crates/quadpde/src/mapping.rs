//! Mapping between the physical quadrilateral and the standard square.
//!
//! The forward map `x(ξ,η)` is a transfinite interpolation of the four edge
//! curves: either the classic Coons patch (linear blend) or the
//! center-augmented variant built on 3-point Lagrange polynomials, which
//! additionally interpolates a prescribed interior point at `(ξ,η)=(0,0)`
//! (needed for strongly non-convex domains where the plain Coons patch is
//! not univalent).
//!
//! This module also provides the geometric quantities the trial forms
//! consume: Jacobian bundles with second map derivatives, edge metric
//! functions `K`, `S`, `W` as univariate jets along an edge, corner
//! orthogonality flags, the univalency audit, and the chain rule carrying
//! standard-domain derivatives of a field to physical derivatives.

use crate::blend::phi_jets;
use crate::error::{Error, Result};
use crate::geometry::{EdgeId, Point2, QuadDomain};
use crate::jet::{BJet, UJet};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Jacobian singularity threshold: below this determinant magnitude the
/// inverse (and all metric ratios) are refused.
pub const DETJ_THRESHOLD: f64 = 1e-10;

/// Default angular tolerance for the corner orthogonality flags.
pub const ANGULAR_TOL: f64 = 1e-8;

/// Determinant magnitude below which a sampled vertex of the audit grid is
/// treated as an allowed corner singularity (edges meeting tangentially at a
/// vertex produce detJ = 0 there; such vertices are permitted for
/// Dirichlet-Dirichlet corners and do not fail the audit).
pub const CORNER_DET_TOL: f64 = 1e-12;

/// Map construction kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapKind<T> {
    /// Plain Coons patch (linear blending of opposite edges).
    Coons,
    /// Center-augmented transfinite map interpolating `x_i` at `(0,0)`.
    CoonsCenter { x_i: Point2<T> },
}

/// 3-point Lagrange polynomials on `{-1, 0, 1}` as order-3 jets:
/// `ϖ0 = ξ(ξ-1)/2`, `ϖ1 = (1+ξ)(1-ξ)`, `ϖ2 = ξ(ξ+1)/2`.
pub fn lagrange3_jets<T: Scalar>(xi: T) -> [UJet<T>; 3] {
    let x = UJet::variable(xi);
    let one = UJet::constant(T::one());
    let half = T::lit(0.5);
    [
        (x * (x - one)).scale(half),
        (one + x) * (one - x),
        (x * (x + one)).scale(half),
    ]
}

/// Transfinite map from the standard square to the physical quadrilateral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainMap<T> {
    pub domain: QuadDomain<T>,
    pub kind: MapKind<T>,
}

/// Jacobian data at one standard-domain point: first and second map
/// derivatives plus determinant.
#[derive(Debug, Clone, Copy)]
pub struct JacobianBundle<T> {
    /// Map value.
    pub x: Point2<T>,
    /// First derivatives (Jacobian columns).
    pub x_xi: Point2<T>,
    pub x_eta: Point2<T>,
    /// Second derivatives (∂J/∂ξ = [x_ξξ x_ξη], ∂J/∂η = [x_ξη x_ηη]).
    pub x_xixi: Point2<T>,
    pub x_xieta: Point2<T>,
    pub x_etaeta: Point2<T>,
    /// Jacobian determinant.
    pub det: T,
    /// Standard-domain location (kept for error reporting).
    pub xi: T,
    pub eta: T,
}

/// Physical derivatives of a field evaluated through the chain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysDerivs<T> {
    pub v: T,
    pub dx: T,
    pub dy: T,
    pub dxx: T,
    pub dxy: T,
    pub dyy: T,
}

/// Edge metric jets along one edge: `K = J⁻¹·n`, the tangential/normal
/// coupling ratio `S`, and `W = 1/K_normal`, each with derivatives along the
/// edge parameter, plus the unit tangent and outward unit normal values.
#[derive(Debug, Clone, Copy)]
pub struct EdgeMetrics<T> {
    pub edge: EdgeId,
    pub k_x: UJet<T>,
    pub k_y: UJet<T>,
    /// Coupling ratio: `S = K_tangential-ish / K_normal` in the arrangement
    /// used by the Neumann relation of this edge.
    pub s: UJet<T>,
    /// `W = 1 / K_normal`.
    pub w: UJet<T>,
    /// Unit tangent (along increasing edge parameter).
    pub tau: Point2<T>,
    /// Outward unit normal (σ·τ with the per-edge sign matrix).
    pub n: Point2<T>,
}

/// Corner orthogonality flags: `λ = false (0)` when the two edge tangents
/// meeting at the vertex are orthogonal within the angular tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerFlags {
    pub lambda_b: bool,
    pub lambda_c: bool,
    pub lambda_d: bool,
}

/// Univalency audit report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnivalencyReport {
    pub n: usize,
    pub min_det: f64,
    pub min_at: (f64, f64),
    /// Count of adjacent sample pairs (in the flattened row-major grid scan)
    /// with opposite determinant signs; samples within [`CORNER_DET_TOL`] of
    /// zero are skipped so corner singularities don't register as flips.
    pub sign_changes: usize,
    /// Number of grid vertices (of the four) where |detJ| ≤ [`CORNER_DET_TOL`].
    pub singular_corners: usize,
    pub pass: bool,
}

impl<T: Scalar> DomainMap<T> {
    pub fn new(domain: QuadDomain<T>, kind: MapKind<T>) -> Self {
        DomainMap { domain, kind }
    }

    /// Coons patch over the domain.
    pub fn coons(domain: QuadDomain<T>) -> Self {
        Self::new(domain, MapKind::Coons)
    }

    /// Center-augmented map interpolating `x_i` at the standard origin.
    pub fn coons_center(domain: QuadDomain<T>, x_i: Point2<T>) -> Self {
        Self::new(domain, MapKind::CoonsCenter { x_i })
    }

    /// Mixed partial `∂^i_ξ ∂^j_η x` of the map, for `i, j ≤ 3`.
    pub fn partial(&self, i: usize, j: usize, xi: T, eta: T) -> Result<Point2<T>> {
        if i > 3 || j > 3 {
            return Err(Error::UnsupportedDeriv(i.max(j), 3));
        }
        let q = &self.domain;
        let ab = q.ab.jets(xi);
        let cd = q.cd.jets(xi);
        let ad = q.ad.jets(eta);
        let bc = q.bc.jets(eta);
        let [a, b, c, d] = q.vertices;
        let sel = |u: UJet<T>, k: usize| match k {
            0 => u.f,
            1 => u.d1,
            2 => u.d2,
            _ => u.d3,
        };
        let coord = |axis: usize| -> T {
            let g = |jet: [UJet<T>; 2], k: usize| sel(jet[axis], k);
            let vert = |p: Point2<T>| if axis == 0 { p.x } else { p.y };
            match self.kind {
                MapKind::Coons => {
                    let (p0x, p1x) = phi_jets(xi);
                    let (p0y, p1y) = phi_jets(eta);
                    // x = AD(η)φ0(ξ) + BC(η)φ1(ξ) + AB(ξ)φ0(η) + CD(ξ)φ1(η)
                    //     - [Aφ0(ξ) + Bφ1(ξ)]φ0(η) - [Dφ0(ξ) + Cφ1(ξ)]φ1(η)
                    g(ad, j) * sel(p0x, i)
                        + g(bc, j) * sel(p1x, i)
                        + g(ab, i) * sel(p0y, j)
                        + g(cd, i) * sel(p1y, j)
                        - (vert(a) * sel(p0x, i) + vert(b) * sel(p1x, i)) * sel(p0y, j)
                        - (vert(d) * sel(p0x, i) + vert(c) * sel(p1x, i)) * sel(p1y, j)
                }
                MapKind::CoonsCenter { x_i } => {
                    let wx = lagrange3_jets(xi);
                    let wy = lagrange3_jets(eta);
                    // x = AD(η)ϖ0(ξ) + BC(η)ϖ2(ξ) + AB(ξ)ϖ0(η) + CD(ξ)ϖ2(η)
                    //     + x_I·ϖ1(ξ)ϖ1(η)
                    //     - [Aϖ0(ξ) + Bϖ2(ξ)]ϖ0(η) - [Dϖ0(ξ) + Cϖ2(ξ)]ϖ2(η)
                    g(ad, j) * sel(wx[0], i)
                        + g(bc, j) * sel(wx[2], i)
                        + g(ab, i) * sel(wy[0], j)
                        + g(cd, i) * sel(wy[2], j)
                        + vert(x_i) * sel(wx[1], i) * sel(wy[1], j)
                        - (vert(a) * sel(wx[0], i) + vert(b) * sel(wx[2], i)) * sel(wy[0], j)
                        - (vert(d) * sel(wx[0], i) + vert(c) * sel(wx[2], i)) * sel(wy[2], j)
                }
            }
        };
        Ok(Point2::new(coord(0), coord(1)))
    }

    /// Map value.
    pub fn point(&self, xi: T, eta: T) -> Point2<T> {
        self.partial(0, 0, xi, eta).expect("order 0 always supported")
    }

    /// Jacobian bundle (value plus first and second map derivatives).
    pub fn jacobian(&self, xi: T, eta: T) -> JacobianBundle<T> {
        let x = self.partial(0, 0, xi, eta).unwrap();
        let x_xi = self.partial(1, 0, xi, eta).unwrap();
        let x_eta = self.partial(0, 1, xi, eta).unwrap();
        let x_xixi = self.partial(2, 0, xi, eta).unwrap();
        let x_xieta = self.partial(1, 1, xi, eta).unwrap();
        let x_etaeta = self.partial(0, 2, xi, eta).unwrap();
        let det = x_xi.x * x_eta.y - x_xi.y * x_eta.x;
        JacobianBundle { x, x_xi, x_eta, x_xixi, x_xieta, x_etaeta, det, xi, eta }
    }

    /// Edge metric jets at parameter `s` on the given edge.
    ///
    /// The Jacobian-weighted normal vector is `K = J⁻¹·n` with `n = σ·τ` and
    /// the sign matrix `σ = [[0,1],[-1,0]]` on `AB`/`BC`,
    /// `σ = [[0,-1],[1,0]]` on `CD`/`AD`. The Neumann relation on the edge
    /// then reads (with `V_n` the standard-domain normal-coordinate
    /// derivative): `V_perp + S·V_tang = T = u_n·W`, with
    /// `S = K_other/K_normal` and `W = 1/K_normal`, where the normal
    /// component is `K_x` on `BC`/`AD` and `K_y` on `AB`/`CD`.
    pub fn edge_metrics(&self, edge: EdgeId, s: T) -> Result<EdgeMetrics<T>> {
        // Build first-derivative component jets along the edge parameter.
        let part = |i: usize, j: usize| -> [UJet<T>; 2] {
            let at = |di: usize, dj: usize| -> Point2<T> {
                // The d3 slot of a base-order-1 jet would need an order-4 map
                // partial; it is never consumed (metrics are used as order-2
                // jets downstream), so clamp it to zero.
                if i + di > 3 || j + dj > 3 {
                    return Point2::new(T::zero(), T::zero());
                }
                match edge {
                    EdgeId::Ab => self.partial(i + di, j + dj, s, -T::one()).unwrap(),
                    EdgeId::Cd => self.partial(i + di, j + dj, s, T::one()).unwrap(),
                    EdgeId::Bc => self.partial(i + di, j + dj, T::one(), s).unwrap(),
                    EdgeId::Ad => self.partial(i + di, j + dj, -T::one(), s).unwrap(),
                }
            };
            // Differentiation along the edge parameter means increasing ξ on
            // AB/CD and η on BC/AD.
            let step: [(usize, usize); 4] = match edge {
                EdgeId::Ab | EdgeId::Cd => [(0, 0), (1, 0), (2, 0), (3, 0)],
                _ => [(0, 0), (0, 1), (0, 2), (0, 3)],
            };
            let mut out = [UJet::zero(); 2];
            let pts: Vec<Point2<T>> = step.iter().map(|&(di, dj)| at(di, dj)).collect();
            out[0] = UJet::new(pts[0].x, pts[1].x, pts[2].x, pts[3].x);
            out[1] = UJet::new(pts[0].y, pts[1].y, pts[2].y, pts[3].y);
            out
        };
        let [xx, xy] = part(1, 0); // x_ξ components along the edge
        let [ex, ey] = part(0, 1); // x_η components along the edge
        let det = xx * ey - xy * ex;
        if det.f.abs().to_f64() <= DETJ_THRESHOLD {
            let (xi, eta) = self.edge_coords(edge, s);
            return Err(Error::SingularJacobian {
                xi: xi.to_f64(),
                eta: eta.to_f64(),
                threshold: DETJ_THRESHOLD,
            });
        }
        // Unit tangent along the edge-parameter direction.
        let (tx, ty) = match edge {
            EdgeId::Ab | EdgeId::Cd => (xx, xy),
            _ => (ex, ey),
        };
        let tnorm = (tx * tx + ty * ty).sqrt();
        let (tux, tuy) = (tx / tnorm, ty / tnorm);
        // Outward normal n = σ·τ.
        let (nx, ny) = match edge {
            EdgeId::Ab | EdgeId::Bc => (tuy, -tux),
            _ => (-tuy, tux),
        };
        // K = J⁻¹·n with J⁻¹ = (1/det)[[y_η, -x_η], [-y_ξ, x_ξ]].
        let k_x = (ey * nx - ex * ny) / det;
        let k_y = (xx * ny - xy * nx) / det;
        let (s_jet, w_jet) = match edge {
            EdgeId::Bc | EdgeId::Ad => (k_y / k_x, UJet::constant(T::one()) / k_x),
            EdgeId::Ab | EdgeId::Cd => (k_x / k_y, UJet::constant(T::one()) / k_y),
        };
        Ok(EdgeMetrics {
            edge,
            k_x,
            k_y,
            s: s_jet,
            w: w_jet,
            tau: Point2::new(tux.f, tuy.f),
            n: Point2::new(nx.f, ny.f),
        })
    }

    /// Standard coordinates of a point on an edge at parameter `s`.
    pub fn edge_coords(&self, edge: EdgeId, s: T) -> (T, T) {
        match edge {
            EdgeId::Ab => (s, -T::one()),
            EdgeId::Bc => (T::one(), s),
            EdgeId::Cd => (s, T::one()),
            EdgeId::Ad => (-T::one(), s),
        }
    }

    /// Corner orthogonality flags at vertices B, C, D.
    ///
    /// At each vertex the unit tangents of the two adjoining edges are
    /// dotted; `λ = false` (orthogonal) when `|τ1·τ2| < angular_tol`.
    pub fn corner_flags(&self, angular_tol: f64) -> Result<CornerFlags> {
        let q = &self.domain;
        let one = T::one();
        let unit = |p: Point2<T>, vertex: char| -> Result<Point2<T>> {
            let n = p.norm();
            if n.to_f64() <= DETJ_THRESHOLD {
                return Err(Error::SingularJacobian {
                    xi: f64::NAN,
                    eta: f64::NAN,
                    threshold: DETJ_THRESHOLD,
                });
            }
            let _ = vertex;
            Ok(p.scale(one / n))
        };
        let flag = |t1: Point2<T>, t2: Point2<T>| t1.dot(t2).abs().to_f64() >= angular_tol;
        let ab1 = unit(q.ab.eval(one, 1)?, 'B')?;
        let bcm1 = unit(q.bc.eval(-one, 1)?, 'B')?;
        let bc1 = unit(q.bc.eval(one, 1)?, 'C')?;
        let cd1 = unit(q.cd.eval(one, 1)?, 'C')?;
        let cdm1 = unit(q.cd.eval(-one, 1)?, 'D')?;
        let ad1 = unit(q.ad.eval(one, 1)?, 'D')?;
        Ok(CornerFlags {
            lambda_b: flag(ab1, bcm1),
            lambda_c: flag(bc1, cd1),
            lambda_d: flag(cdm1, ad1),
        })
    }

    /// Physical first/second derivatives of a field from its
    /// standard-domain jet, via the Jacobian chain rule.
    pub fn physical_derivatives(jb: &JacobianBundle<T>, psi: &BJet<T>) -> Result<PhysDerivs<T>> {
        if jb.det.abs().to_f64() <= DETJ_THRESHOLD {
            return Err(Error::SingularJacobian {
                xi: jb.xi.to_f64(),
                eta: jb.eta.to_f64(),
                threshold: DETJ_THRESHOLD,
            });
        }
        let det = jb.det;
        // J⁻¹ = (1/det) [[y_η, -x_η], [-y_ξ, x_ξ]].
        let inv = [
            [jb.x_eta.y / det, -jb.x_eta.x / det],
            [-jb.x_xi.y / det, jb.x_xi.x / det],
        ];
        // [ψ_x ψ_y] = [ψ_ξ ψ_η] J⁻¹
        let dx = psi.fx * inv[0][0] + psi.fy * inv[1][0];
        let dy = psi.fx * inv[0][1] + psi.fy * inv[1][1];
        // C = [ψ_x ψ_y]·∂J/∂ξ, D = [ψ_x ψ_y]·∂J/∂η; the correction matrix
        // [Cᵀ Dᵀ] = [[∇ψ·x_ξξ, ∇ψ·x_ξη], [∇ψ·x_ξη, ∇ψ·x_ηη]].
        let grad_dot = |p: Point2<T>| dx * p.x + dy * p.y;
        let m = [
            [psi.fxx - grad_dot(jb.x_xixi), psi.fxy - grad_dot(jb.x_xieta)],
            [psi.fxy - grad_dot(jb.x_xieta), psi.fyy - grad_dot(jb.x_etaeta)],
        ];
        // H_phys = J⁻ᵀ M J⁻¹
        let mut h = [[T::zero(); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = T::zero();
                for p in 0..2 {
                    for q2 in 0..2 {
                        acc += inv[p][r] * m[p][q2] * inv[q2][c];
                    }
                }
                h[r][c] = acc;
            }
        }
        Ok(PhysDerivs { v: psi.f, dx, dy, dxx: h[0][0], dxy: h[0][1], dyy: h[1][1] })
    }

    /// Sample the Jacobian determinant on an `n×n` closed uniform grid.
    pub fn univalency_audit(&self, n: usize) -> UnivalencyReport {
        assert!(n >= 2, "audit grid must have at least 2 points per side");
        let mut min_det = f64::INFINITY;
        let mut min_at = (0.0, 0.0);
        let mut sign_changes = 0usize;
        let mut singular_corners = 0usize;
        let mut last_sign: Option<bool> = None;
        for jj in 0..n {
            for ii in 0..n {
                let xi = -1.0 + 2.0 * ii as f64 / (n - 1) as f64;
                let eta = -1.0 + 2.0 * jj as f64 / (n - 1) as f64;
                let jb = self.jacobian(T::lit(xi), T::lit(eta));
                let det = jb.det.to_f64();
                let is_corner = (ii == 0 || ii == n - 1) && (jj == 0 || jj == n - 1);
                if is_corner && det.abs() <= CORNER_DET_TOL {
                    // Allowed corner singularity (tangential edge meeting).
                    singular_corners += 1;
                    continue;
                }
                if det < min_det {
                    min_det = det;
                    min_at = (xi, eta);
                }
                if det.abs() > CORNER_DET_TOL {
                    let sign = det > 0.0;
                    if let Some(prev) = last_sign {
                        if prev != sign {
                            sign_changes += 1;
                        }
                    }
                    last_sign = Some(sign);
                }
            }
        }
        UnivalencyReport { n, min_det, min_at, sign_changes, singular_corners, pass: min_det > 0.0 }
    }

    /// Invert the map by damped Newton iteration (test oracle only; the
    /// solver itself never needs the inverse).
    pub fn inverse(&self, target: Point2<T>, guess: (T, T)) -> Option<(T, T)> {
        let (mut xi, mut eta) = guess;
        for _ in 0..100 {
            let jb = self.jacobian(xi, eta);
            let r = jb.x.sub(target);
            if r.norm().to_f64() < 1e-14 {
                return Some((xi, eta));
            }
            if jb.det.abs().to_f64() <= DETJ_THRESHOLD {
                return None;
            }
            // Newton step: J δ = -r.
            let dx = (r.x * jb.x_eta.y - r.y * jb.x_eta.x) / jb.det;
            let dy = (jb.x_xi.x * r.y - jb.x_xi.y * r.x) / jb.det;
            let mut step = T::one();
            // Damp to stay within the (slightly padded) standard square.
            for _ in 0..30 {
                let nxi = xi - step * dx;
                let neta = eta - step * dy;
                if nxi.to_f64().abs() <= 1.2 && neta.to_f64().abs() <= 1.2 {
                    xi = nxi;
                    eta = neta;
                    break;
                }
                step *= T::lit(0.5);
            }
        }
        let jb = self.jacobian(xi, eta);
        if jb.x.dist(target).to_f64() < 1e-10 {
            Some((xi, eta))
        } else {
            None
        }
    }
}

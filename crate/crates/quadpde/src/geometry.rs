//! Parametric boundary curves, quadrilateral domains, and the benchmark
//! domain catalog.
//!
//! A [`ParametricCurve`] is a planar curve on the parameter interval
//! `t ∈ [-1,1]` with analytic derivatives up to order 3 (computed through
//! exact jet arithmetic — the mapping metrics of adjacent Neumann/Robin
//! constructions pull third derivatives of boundary curves).
//!
//! A [`QuadDomain`] bundles the four edge curves `AB(ξ), BC(η), CD(ξ), AD(η)`
//! with the vertex convention
//!
//! ```text
//!   AB(-1)=AD(-1)=A,  AB(1)=BC(-1)=B,  BC(1)=CD(1)=C,  CD(-1)=AD(1)=D
//! ```
//!
//! (note `CD` runs from `D` at `ξ=-1` to `C` at `ξ=+1`, and the two
//! `η`-edges run bottom-to-top).

use crate::blend::phi_jets;
use crate::error::{Error, Result};
use crate::jet::UJet;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Plain 2D point / vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn scale(self, c: T) -> Self {
        Point2::new(self.x * c, self.y * c)
    }

    #[inline]
    pub fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    #[inline]
    pub fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    /// Euclidean distance.
    #[inline]
    pub fn dist(self, o: Self) -> T {
        self.sub(o).norm()
    }
}

/// A pair of univariate jets, one per coordinate: the value and first three
/// parameter derivatives of a planar curve at one parameter value.
pub type CurveJet<T> = [UJet<T>; 2];

/// Parametric planar curve kinds covering every benchmark boundary.
///
/// All curves are parameterized on `t ∈ [-1,1]`; angle-like parameters blend
/// affinely between their endpoint values through the linear blend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParametricCurve<T> {
    /// Straight segment from `a` (t=-1) to `b` (t=+1).
    Line { a: Point2<T>, b: Point2<T> },
    /// Circular arc `center + radius·(cos θ(t), sin θ(t))` with
    /// `θ(t) = θ0·φ0(t) + θ1·φ1(t)`.
    CircularArc { center: Point2<T>, radius: T, theta0: T, theta1: T },
    /// Elliptic arc `center + (rx·cos θ(t), ry·sin θ(t))`.
    EllipticArc { center: Point2<T>, rx: T, ry: T, theta0: T, theta1: T },
    /// Polar curve `r(θ)·(cos θ, sin θ)` about the origin with
    /// `r(θ) = a + b·cos(k·θ + phase)` and affine `θ(t)`.
    PolarTrig { a: T, b: T, k: T, phase: T, theta0: T, theta1: T },
    /// Straight blend of the endpoints plus a cosine bump:
    /// `a·φ0 + b·φ1 + dir·amp·(1 + cos(π t))`.
    BumpedLine { a: Point2<T>, b: Point2<T>, amp: T, dir: Point2<T> },
    /// Space-time wall `( c0 + c1·t + c2·cos(ω t), t )` with the affine time
    /// parameterization `t(s) = t_f·(1+s)/2`.
    TimeGraph { t_f: T, c0: T, c1: T, c2: T, omega: T },
    /// Weighted sum of component curves plus a constant offset.
    AffineCombination {
        terms: Vec<(T, ParametricCurve<T>)>,
        offset: Point2<T>,
    },
    /// The same point set traversed in the opposite parameter direction.
    Reversed { inner: Box<ParametricCurve<T>> },
}

impl<T: Scalar> ParametricCurve<T> {
    /// Value and first three derivatives at `t`, as per-coordinate jets.
    pub fn jets(&self, t: T) -> CurveJet<T> {
        let tj = UJet::variable(t);
        match self {
            ParametricCurve::Line { a, b } => {
                let (p0, p1) = phi_jets(t);
                [
                    p0.scale(a.x) + p1.scale(b.x),
                    p0.scale(a.y) + p1.scale(b.y),
                ]
            }
            ParametricCurve::CircularArc { center, radius, theta0, theta1 } => {
                let (p0, p1) = phi_jets(t);
                let th = p0.scale(*theta0) + p1.scale(*theta1);
                [
                    UJet::constant(center.x) + th.cos().scale(*radius),
                    UJet::constant(center.y) + th.sin().scale(*radius),
                ]
            }
            ParametricCurve::EllipticArc { center, rx, ry, theta0, theta1 } => {
                let (p0, p1) = phi_jets(t);
                let th = p0.scale(*theta0) + p1.scale(*theta1);
                [
                    UJet::constant(center.x) + th.cos().scale(*rx),
                    UJet::constant(center.y) + th.sin().scale(*ry),
                ]
            }
            ParametricCurve::PolarTrig { a, b, k, phase, theta0, theta1 } => {
                let (p0, p1) = phi_jets(t);
                let th = p0.scale(*theta0) + p1.scale(*theta1);
                let r = UJet::constant(*a)
                    + (th.scale(*k) + UJet::constant(*phase)).cos().scale(*b);
                [r * th.cos(), r * th.sin()]
            }
            ParametricCurve::BumpedLine { a, b, amp, dir } => {
                let (p0, p1) = phi_jets(t);
                let bump = (UJet::constant(T::one())
                    + (tj.scale(T::pi())).cos())
                .scale(*amp);
                [
                    p0.scale(a.x) + p1.scale(b.x) + bump.scale(dir.x),
                    p0.scale(a.y) + p1.scale(b.y) + bump.scale(dir.y),
                ]
            }
            ParametricCurve::TimeGraph { t_f, c0, c1, c2, omega } => {
                let half = T::lit(0.5);
                let time = (tj + UJet::constant(T::one())).scale(half * *t_f);
                let xw = UJet::constant(*c0)
                    + time.scale(*c1)
                    + time.scale(*omega).cos().scale(*c2);
                [xw, time]
            }
            ParametricCurve::AffineCombination { terms, offset } => {
                let mut acc = [UJet::constant(offset.x), UJet::constant(offset.y)];
                for (w, c) in terms {
                    let j = c.jets(t);
                    acc[0] = acc[0] + j[0].scale(*w);
                    acc[1] = acc[1] + j[1].scale(*w);
                }
                acc
            }
            ParametricCurve::Reversed { inner } => {
                let j = inner.jets(-t);
                j.map(|u| UJet::new(u.f, -u.d1, u.d2, -u.d3))
            }
        }
    }

    /// The requested derivative (0..=3) at `t` as a point/vector.
    pub fn eval(&self, t: T, deriv: usize) -> Result<Point2<T>> {
        if deriv > 3 {
            return Err(Error::UnsupportedDeriv(deriv, 3));
        }
        let [jx, jy] = self.jets(t);
        let sel = |j: UJet<T>| match deriv {
            0 => j.f,
            1 => j.d1,
            2 => j.d2,
            _ => j.d3,
        };
        Ok(Point2::new(sel(jx), sel(jy)))
    }

    /// Curve point (derivative 0) at `t`.
    pub fn point(&self, t: T) -> Point2<T> {
        let [jx, jy] = self.jets(t);
        Point2::new(jx.f, jy.f)
    }

    /// This curve traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        match self {
            ParametricCurve::Reversed { inner } => (**inner).clone(),
            other => ParametricCurve::Reversed { inner: Box::new(other.clone()) },
        }
    }
}

/// Edge identifiers in the standard orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeId {
    Ab,
    Bc,
    Cd,
    Ad,
}

impl EdgeId {
    pub const ALL: [EdgeId; 4] = [EdgeId::Ab, EdgeId::Bc, EdgeId::Cd, EdgeId::Ad];

    /// Cyclic index: AB=0, BC=1, CD=2, AD=3.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            EdgeId::Ab => 0,
            EdgeId::Bc => 1,
            EdgeId::Cd => 2,
            EdgeId::Ad => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeId::Ab => "AB",
            EdgeId::Bc => "BC",
            EdgeId::Cd => "CD",
            EdgeId::Ad => "AD",
        }
    }
}

/// Quadrilateral domain with curved edges and verified corner compatibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDomain<T> {
    pub ab: ParametricCurve<T>,
    pub bc: ParametricCurve<T>,
    pub cd: ParametricCurve<T>,
    pub ad: ParametricCurve<T>,
    /// Vertices `[A, B, C, D]` extracted from the edge curve endpoints.
    pub vertices: [Point2<T>; 4],
    /// Optional catalog label.
    pub name: Option<String>,
}

/// Corner-compatibility tolerance (trig evaluation of endpoint formulas
/// carries rounding, so exact equality is not demanded).
pub const CORNER_TOL: f64 = 1e-10;

/// Assemble a domain from four edge curves, verifying that adjacent curves
/// agree at the shared vertices.
pub fn make_quad<T: Scalar>(
    ab: ParametricCurve<T>,
    bc: ParametricCurve<T>,
    cd: ParametricCurve<T>,
    ad: ParametricCurve<T>,
) -> Result<QuadDomain<T>> {
    let one = T::one();
    let a = ab.point(-one);
    let b = ab.point(one);
    let c = bc.point(one);
    let d = cd.point(-one);
    let checks = [
        ('A', a.dist(ad.point(-one))),
        ('B', b.dist(bc.point(-one))),
        ('C', c.dist(cd.point(one))),
        ('D', d.dist(ad.point(one))),
    ];
    for (vertex, gap) in checks {
        if gap.to_f64() > CORNER_TOL {
            return Err(Error::CornerMismatch { vertex, gap: gap.to_f64() });
        }
    }
    Ok(QuadDomain { ab, bc, cd, ad, vertices: [a, b, c, d], name: None })
}

impl<T: Scalar> QuadDomain<T> {
    /// The curve for the given edge.
    pub fn edge(&self, id: EdgeId) -> &ParametricCurve<T> {
        match id {
            EdgeId::Ab => &self.ab,
            EdgeId::Bc => &self.bc,
            EdgeId::Cd => &self.cd,
            EdgeId::Ad => &self.ad,
        }
    }

    /// Rotate the vertex labels one step counterclockwise: the old `BC` edge
    /// becomes the new `AB`, old `CD` (reversed) becomes `BC`, old `AD`
    /// becomes `CD`, and old `AB` (reversed) becomes `AD`.
    ///
    /// The physical point set is unchanged; only the parameterization labels
    /// move. Trial-form constructions are written for Neumann/Robin data on
    /// the canonical `BC` (and `CD`) edges, and other placements are rotated
    /// into that position with this operation.
    pub fn rotated_once(&self) -> QuadDomain<T> {
        let [a, b, c, d] = self.vertices;
        QuadDomain {
            ab: self.bc.clone(),
            bc: self.cd.reversed(),
            cd: self.ad.clone(),
            ad: self.ab.reversed(),
            vertices: [b, c, d, a],
            name: self.name.clone(),
        }
    }

    /// Apply [`rotated_once`](Self::rotated_once) `k` times (mod 4). Edge
    /// with index `e` in the original labeling sits at index `(e-k) mod 4`
    /// afterwards.
    pub fn rotated(&self, k: usize) -> QuadDomain<T> {
        let mut q = self.clone();
        for _ in 0..(k % 4) {
            q = q.rotated_once();
        }
        q
    }
}

fn named<T: Scalar>(mut q: QuadDomain<T>, name: &str) -> QuadDomain<T> {
    q.name = Some(name.to_string());
    q
}

/// All benchmark catalog names.
pub const CATALOG_NAMES: [&str; 12] = [
    "helm-1", "helm-2", "helm-3", "helm-4", "helm-5", "nlh-1", "nlh-2", "nlh-3",
    "nlh-4", "heat-1", "heat-2", "heat-3",
];

/// Construct a catalog domain by name.
///
/// Catalog entries reproduce the benchmark geometry definitions exactly:
/// five Helmholtz domains (`helm-1..5`), four nonlinear-Helmholtz domains
/// (`nlh-1..4`), and three space-time heat domains (`heat-1..3`).
pub fn catalog<T: Scalar>(name: &str) -> Result<QuadDomain<T>> {
    let l = T::lit;
    let pt = |x: f64, y: f64| Point2::new(l(x), l(y));
    let pi = std::f64::consts::PI;
    let q = match name {
        "helm-1" => {
            // Bumped straight-sided quadrilateral; bump h(t) = -0.15(1+cos πt)
            // subtracted from the y-coordinate on AB/CD, added to (BC) /
            // subtracted from (AD) the x-coordinate.
            let a = pt(0.25, 0.25);
            let b = pt(2.5, 0.0);
            let c = pt(2.0, 2.5);
            let d = pt(0.0, 1.5);
            let bump = |p: Point2<T>, q2: Point2<T>, dir: Point2<T>, sign: f64| {
                ParametricCurve::BumpedLine {
                    a: p,
                    b: q2,
                    // dir·amp·(1+cos πt) with amp = ∓0.15 folded into dir sign:
                    // -(0, h) = +(0, 0.15(1+cos)), +(h, 0) = -(0.15(1+cos), 0).
                    amp: l(0.15 * sign),
                    dir,
                }
            };
            make_quad(
                bump(a, b, pt(0.0, 1.0), 1.0),
                bump(b, c, pt(1.0, 0.0), -1.0),
                bump(d, c, pt(0.0, 1.0), 1.0),
                bump(a, d, pt(1.0, 0.0), -1.0),
            )?
        }
        "helm-2" => {
            // Crescent: unit circle at (1,0) minus unit circle at (2,0).
            let c1 = pt(2.0, 0.0);
            let c2 = pt(1.0, 0.0);
            let arc = |center: Point2<T>, th0: f64, th1: f64| ParametricCurve::CircularArc {
                center,
                radius: l(1.0),
                theta0: l(th0),
                theta1: l(th1),
            };
            make_quad(
                arc(c1, -2.0 * pi / 3.0, -pi),
                arc(c1, pi, 2.0 * pi / 3.0),
                arc(c2, pi, pi / 3.0),
                arc(c2, -pi / 3.0, -pi),
            )?
        }
        "helm-3" => {
            // Disk with three cosine-indented arcs. Each indented edge has
            // r = 1 - (a/2)(1 + cos(πt)) along an affine θ(t) sweeping π/2,
            // which in polar form is r(θ) = (1 - a/2) - (a/2)·cos(4θ + phase)
            // with phase aligning cos(πt) = cos(4θ + phase).
            let indented = |aa: f64, th0: f64, th1: f64| {
                let mid = 0.5 * (th0 + th1);
                ParametricCurve::PolarTrig {
                    a: l(1.0 - aa / 2.0),
                    b: l(-aa / 2.0),
                    k: l(4.0),
                    phase: l(-4.0 * mid),
                    theta0: l(th0),
                    theta1: l(th1),
                }
            };
            make_quad(
                indented(0.25, -3.0 * pi / 4.0, -pi / 4.0),
                indented(0.4, -pi / 4.0, pi / 4.0),
                indented(0.3, 3.0 * pi / 4.0, pi / 4.0),
                ParametricCurve::CircularArc {
                    center: pt(0.0, 0.0),
                    radius: l(1.0),
                    theta0: l(5.0 * pi / 4.0),
                    theta1: l(3.0 * pi / 4.0),
                },
            )?
        }
        "helm-4" => {
            // Two straight sides plus an elliptic arc x = 0.95 cos θ,
            // y = 0.55 + 0.6 sin θ.
            let th_b = 5.0 * pi / 36.0;
            let a = pt(0.0, -1.35);
            let b = pt(0.95 * th_b.cos(), 0.55 + 0.6 * th_b.sin());
            let d = pt(-0.95 * th_b.cos(), 0.55 + 0.6 * th_b.sin());
            let arc = |th0: f64, th1: f64| ParametricCurve::EllipticArc {
                center: pt(0.0, 0.55),
                rx: l(0.95),
                ry: l(0.6),
                theta0: l(th0),
                theta1: l(th1),
            };
            make_quad(
                ParametricCurve::Line { a, b },
                arc(th_b, pi / 2.0),
                arc(31.0 * pi / 36.0, pi / 2.0),
                ParametricCurve::Line { a, b: d },
            )?
        }
        "helm-5" => {
            // Triangle ABD; C is the midpoint of BD, splitting that side
            // into the collinear edges BC and CD.
            let a = pt(0.0, 0.0);
            let b = pt(2.0, 0.2);
            let c = pt(1.3, 1.0);
            let d = pt(0.6, 1.8);
            make_quad(
                ParametricCurve::Line { a, b },
                ParametricCurve::Line { a: b, b: c },
                ParametricCurve::Line { a: d, b: c },
                ParametricCurve::Line { a, b: d },
            )?
        }
        "nlh-1" => {
            // Circular arcs on AB/AD about (-0.25, -0.75); BC/CD are the
            // point reflections 2·[endpoint blend] - arc + center.
            let center = pt(-0.25, -0.75);
            let arc = |th0: f64, th1: f64| ParametricCurve::CircularArc {
                center,
                radius: l(1.0),
                theta0: l(th0),
                theta1: l(th1),
            };
            let th_b = 19.0 * pi / 20.0;
            let th_d = pi / 20.0;
            let reflected = |endpoint: Point2<T>, th0: f64, th1: f64| {
                ParametricCurve::AffineCombination {
                    terms: vec![
                        (
                            l(2.0),
                            ParametricCurve::Line {
                                a: Point2::new(
                                    endpoint.x - center.x,
                                    endpoint.y - center.y,
                                ),
                                b: pt(0.0, -1.0),
                            },
                        ),
                        (
                            l(-1.0),
                            ParametricCurve::CircularArc {
                                center: pt(0.0, 0.0),
                                radius: l(1.0),
                                theta0: l(th0),
                                theta1: l(th1),
                            },
                        ),
                    ],
                    offset: center,
                }
            };
            let b = pt(th_b.cos() - 0.25, th_b.sin() - 0.75);
            let d = pt(th_d.cos() - 0.25, th_d.sin() - 0.75);
            make_quad(
                arc(pi / 2.0, th_b),
                reflected(b, th_b, 3.0 * pi / 2.0),
                reflected(d, th_d, -pi / 2.0),
                arc(pi / 2.0, th_d),
            )?
        }
        "nlh-2" => {
            let petal = |th0: f64, th1: f64| ParametricCurve::PolarTrig {
                a: l(1.0),
                b: l(0.6),
                k: l(2.0),
                phase: l(0.0),
                theta0: l(th0),
                theta1: l(th1),
            };
            make_quad(
                petal(-pi / 4.0, pi / 4.0),
                petal(pi / 4.0, 3.0 * pi / 4.0),
                petal(5.0 * pi / 4.0, 3.0 * pi / 4.0),
                // The printed θ_AD sweeps -3π/4 → -π/4 (D to A); the vertex
                // convention requires AD(-1)=A, so the sweep is reversed.
                petal(-pi / 4.0, -3.0 * pi / 4.0),
            )?
        }
        "nlh-3" => {
            let petal = |th0: f64, th1: f64| ParametricCurve::PolarTrig {
                a: l(0.8),
                b: l(0.4),
                k: l(4.0),
                phase: l(0.0),
                theta0: l(th0),
                theta1: l(th1),
            };
            make_quad(
                petal(0.0, pi / 2.0),
                petal(pi / 2.0, pi),
                petal(3.0 * pi / 2.0, pi),
                petal(0.0, -pi / 2.0),
            )?
        }
        "nlh-4" => {
            let petal = |th0: f64, th1: f64| ParametricCurve::PolarTrig {
                a: l(0.75),
                b: l(0.3),
                k: l(3.0),
                phase: l(0.0),
                theta0: l(th0),
                theta1: l(th1),
            };
            let th_a = -pi / 10.0;
            let th_b = pi / 10.0;
            let th_c = 13.0 * pi / 20.0;
            let th_d = 27.0 * pi / 20.0;
            make_quad(
                petal(th_a, th_b),
                petal(th_b, th_c),
                petal(th_d, th_c),
                petal(th_a, th_d - 2.0 * pi),
            )?
        }
        "heat-1" | "heat-2" | "heat-3" => {
            // Space-time domains [a(t), b(t)] × [0, t_f] with t_f = 3 and
            // walls a(t), b(t) of the form c0 + c1·t + c2·cos(ω t).
            let t_f = 3.0;
            let (xa, xb, left, right): (f64, f64, [f64; 4], [f64; 4]) = match name {
                // a = xa + (xd-xa)t/tf + 0.25[1-cos(2πt/tf)]
                // b = xb + (xc-xb)t/tf - 0.25[1-cos(2πt/tf)]
                "heat-1" => (
                    0.5,
                    2.0,
                    [0.75, (0.25 - 0.5) / t_f, -0.25, 2.0 * pi / t_f],
                    [1.75, (1.5 - 2.0) / t_f, 0.25, 2.0 * pi / t_f],
                ),
                // a = xa + (xd-xa)t/tf + 0.15[cos(4πt/tf)-1]; b = a + (xb-xa)
                "heat-2" => (
                    1.25,
                    1.75,
                    [1.10, (0.25 - 1.25) / t_f, 0.15, 4.0 * pi / t_f],
                    [1.60, (0.25 - 1.25) / t_f, 0.15, 4.0 * pi / t_f],
                ),
                // a = xa + (xd-xa)t/tf - 0.15[1-cos(2πt/tf)]; b = a + (xb-xa)
                _ => (
                    1.25,
                    1.75,
                    [1.10, (0.25 - 1.25) / t_f, 0.15, 2.0 * pi / t_f],
                    [1.60, (0.25 - 1.25) / t_f, 0.15, 2.0 * pi / t_f],
                ),
            };
            let wall = |c: [f64; 4]| ParametricCurve::TimeGraph {
                t_f: l(t_f),
                c0: l(c[0]),
                c1: l(c[1]),
                c2: l(c[2]),
                omega: l(c[3]),
            };
            let at = |c: [f64; 4], t: f64| c[0] + c[1] * t + c[2] * (c[3] * t).cos();
            let d = pt(at(left, t_f), t_f);
            let c = pt(at(right, t_f), t_f);
            make_quad(
                ParametricCurve::Line { a: pt(xa, 0.0), b: pt(xb, 0.0) },
                wall(right),
                ParametricCurve::Line { a: d, b: c },
                wall(left),
            )?
        }
        other => return Err(Error::UnknownDomain(other.to_string())),
    };
    Ok(named(q, name))
}

//! Small truncated-Taylor ("jet") arithmetic types.
//!
//! The trial-form constructions combine many univariate edge quantities
//! (boundary traces, metric ratios, Hermite polynomials) and need their
//! derivatives to second order, occasionally third. Hand-expanding every
//! product/quotient rule is error-prone, so the crate instead propagates
//! derivatives with two tiny jet types:
//!
//! * [`UJet`]: value plus derivatives 1..3 of a univariate function,
//! * [`BJet`]: value plus all partial derivatives up to total order 2 of a
//!   bivariate function.
//!
//! Arithmetic on jets applies the exact Leibniz/Faà di Bruno rules truncated
//! at the stored order, so results are analytically exact for the stored
//! orders (no finite differencing anywhere).

use crate::scalar::Scalar;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Univariate jet: `f, f', f'', f'''` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UJet<T> {
    pub f: T,
    pub d1: T,
    pub d2: T,
    pub d3: T,
}

impl<T: Scalar> UJet<T> {
    /// Constant function jet.
    #[inline]
    pub fn constant(c: T) -> Self {
        UJet { f: c, d1: T::zero(), d2: T::zero(), d3: T::zero() }
    }

    /// Jet of the identity function `t ↦ t` at `t`.
    #[inline]
    pub fn variable(t: T) -> Self {
        UJet { f: t, d1: T::one(), d2: T::zero(), d3: T::zero() }
    }

    /// Jet with explicit coefficients.
    #[inline]
    pub fn new(f: T, d1: T, d2: T, d3: T) -> Self {
        UJet { f, d1, d2, d3 }
    }

    /// Zero jet.
    #[inline]
    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Jet of the derivative function `f'`.
    ///
    /// The third-order slot of the result would require a fourth derivative
    /// of `f` and is set to zero; callers only consume derivative jets to
    /// second order.
    #[inline]
    pub fn derivative(self) -> Self {
        UJet { f: self.d1, d1: self.d2, d2: self.d3, d3: T::zero() }
    }

    /// Multiply by a plain scalar.
    #[inline]
    pub fn scale(self, c: T) -> Self {
        UJet { f: self.f * c, d1: self.d1 * c, d2: self.d2 * c, d3: self.d3 * c }
    }

    /// `sin` of the jet.
    pub fn sin(self) -> Self {
        let (s0, c0) = (self.f.sin(), self.f.cos());
        let (a1, a2, a3) = (self.d1, self.d2, self.d3);
        UJet {
            f: s0,
            d1: c0 * a1,
            d2: c0 * a2 - s0 * a1 * a1,
            d3: c0 * a3 - s0 * T::lit(3.0) * a1 * a2 - c0 * a1 * a1 * a1,
        }
    }

    /// `cos` of the jet.
    pub fn cos(self) -> Self {
        let (s0, c0) = (self.f.sin(), self.f.cos());
        let (a1, a2, a3) = (self.d1, self.d2, self.d3);
        UJet {
            f: c0,
            d1: -s0 * a1,
            d2: -s0 * a2 - c0 * a1 * a1,
            d3: -s0 * a3 - c0 * T::lit(3.0) * a1 * a2 + s0 * a1 * a1 * a1,
        }
    }

    /// `exp` of the jet.
    pub fn exp(self) -> Self {
        let e = self.f.exp();
        let (a1, a2, a3) = (self.d1, self.d2, self.d3);
        UJet {
            f: e,
            d1: e * a1,
            d2: e * (a2 + a1 * a1),
            d3: e * (a3 + T::lit(3.0) * a1 * a2 + a1 * a1 * a1),
        }
    }

    /// `sqrt` of the jet (requires a strictly positive value).
    pub fn sqrt(self) -> Self {
        let s0 = self.f.sqrt();
        let half = T::lit(0.5);
        let d1 = self.d1 * half / s0;
        let d2 = (self.d2 * half - d1 * d1) / s0;
        let d3 = (self.d3 * half - T::lit(3.0) * d1 * d2) / s0;
        UJet { f: s0, d1, d2, d3 }
    }
}

impl<T: Scalar> Add for UJet<T> {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        UJet { f: self.f + r.f, d1: self.d1 + r.d1, d2: self.d2 + r.d2, d3: self.d3 + r.d3 }
    }
}

impl<T: Scalar> Sub for UJet<T> {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        UJet { f: self.f - r.f, d1: self.d1 - r.d1, d2: self.d2 - r.d2, d3: self.d3 - r.d3 }
    }
}

impl<T: Scalar> Neg for UJet<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        UJet { f: -self.f, d1: -self.d1, d2: -self.d2, d3: -self.d3 }
    }
}

impl<T: Scalar> Mul for UJet<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        let three = T::lit(3.0);
        UJet {
            f: self.f * r.f,
            d1: self.d1 * r.f + self.f * r.d1,
            d2: self.d2 * r.f + T::lit(2.0) * self.d1 * r.d1 + self.f * r.d2,
            d3: self.d3 * r.f
                + three * self.d2 * r.d1
                + three * self.d1 * r.d2
                + self.f * r.d3,
        }
    }
}

impl<T: Scalar> Div for UJet<T> {
    type Output = Self;
    #[inline]
    fn div(self, r: Self) -> Self {
        // Solve (c*r)^{(k)} = a^{(k)} for the coefficients of c = a/r.
        let c0 = self.f / r.f;
        let c1 = (self.d1 - c0 * r.d1) / r.f;
        let c2 = (self.d2 - T::lit(2.0) * c1 * r.d1 - c0 * r.d2) / r.f;
        let c3 = (self.d3 - T::lit(3.0) * c2 * r.d1 - T::lit(3.0) * c1 * r.d2 - c0 * r.d3)
            / r.f;
        UJet { f: c0, d1: c1, d2: c2, d3: c3 }
    }
}

/// Bivariate jet to total order 2: `f, f_x, f_y, f_xx, f_xy, f_yy`.
///
/// In trial-form code the two coordinates are the standard-square variables
/// `(ξ, η)`; the field names use `x`/`y` as neutral labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BJet<T> {
    pub f: T,
    pub fx: T,
    pub fy: T,
    pub fxx: T,
    pub fxy: T,
    pub fyy: T,
}

impl<T: Scalar> BJet<T> {
    /// Constant function jet.
    #[inline]
    pub fn constant(c: T) -> Self {
        BJet { f: c, fx: T::zero(), fy: T::zero(), fxx: T::zero(), fxy: T::zero(), fyy: T::zero() }
    }

    /// Zero jet.
    #[inline]
    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Lift a univariate jet in the first coordinate: `f(x,y) = u(x)`.
    #[inline]
    pub fn from_x(u: UJet<T>) -> Self {
        BJet { f: u.f, fx: u.d1, fy: T::zero(), fxx: u.d2, fxy: T::zero(), fyy: T::zero() }
    }

    /// Lift a univariate jet in the second coordinate: `f(x,y) = u(y)`.
    #[inline]
    pub fn from_y(u: UJet<T>) -> Self {
        BJet { f: u.f, fx: T::zero(), fy: u.d1, fxx: T::zero(), fxy: T::zero(), fyy: u.d2 }
    }

    /// Multiply by a plain scalar.
    #[inline]
    pub fn scale(self, c: T) -> Self {
        BJet {
            f: self.f * c,
            fx: self.fx * c,
            fy: self.fy * c,
            fxx: self.fxx * c,
            fxy: self.fxy * c,
            fyy: self.fyy * c,
        }
    }
}

impl<T: Scalar> Add for BJet<T> {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        BJet {
            f: self.f + r.f,
            fx: self.fx + r.fx,
            fy: self.fy + r.fy,
            fxx: self.fxx + r.fxx,
            fxy: self.fxy + r.fxy,
            fyy: self.fyy + r.fyy,
        }
    }
}

impl<T: Scalar> Sub for BJet<T> {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        BJet {
            f: self.f - r.f,
            fx: self.fx - r.fx,
            fy: self.fy - r.fy,
            fxx: self.fxx - r.fxx,
            fxy: self.fxy - r.fxy,
            fyy: self.fyy - r.fyy,
        }
    }
}

impl<T: Scalar> Neg for BJet<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        BJet { f: -self.f, fx: -self.fx, fy: -self.fy, fxx: -self.fxx, fxy: -self.fxy, fyy: -self.fyy }
    }
}

impl<T: Scalar> Mul for BJet<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        let two = T::lit(2.0);
        BJet {
            f: self.f * r.f,
            fx: self.fx * r.f + self.f * r.fx,
            fy: self.fy * r.f + self.f * r.fy,
            fxx: self.fxx * r.f + two * self.fx * r.fx + self.f * r.fxx,
            fxy: self.fxy * r.f + self.fx * r.fy + self.fy * r.fx + self.f * r.fxy,
            fyy: self.fyy * r.f + two * self.fy * r.fy + self.f * r.fyy,
        }
    }
}

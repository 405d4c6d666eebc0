//! Blending (switching) functions and Hermite interpolation bases.
//!
//! Three families of polynomials on `[-1,1]` drive every interpolation
//! operator in the crate:
//!
//! * the linear blend `φ0 = (1-ξ)/2`, `φ1 = (1+ξ)/2`,
//! * the four cubic C1 Hermite polynomials `ϕ0, ϕ1, ψ0, ψ1` matching value
//!   and first derivative at the endpoints,
//! * the six quintic C2 Hermite polynomials `ρ0, ρ1, υ0, υ1, ω0, ω1`
//!   matching value, first, and second derivative at the endpoints.
//!
//! All are expressed as products of the linear blend and evaluated through
//! exact polynomial jet arithmetic, so requested derivatives are analytic
//! (no symbolic or numeric differentiation).

use crate::jet::UJet;
use crate::scalar::Scalar;

/// Order-3 jets of the linear blend `(φ0, φ1)` at `ξ`.
#[inline]
pub fn phi_jets<T: Scalar>(xi: T) -> (UJet<T>, UJet<T>) {
    let half = T::lit(0.5);
    (
        UJet::new(half * (T::one() - xi), -half, T::zero(), T::zero()),
        UJet::new(half * (T::one() + xi), half, T::zero(), T::zero()),
    )
}

/// Order-3 jets of the C1 Hermite basis `(ϕ0, ϕ1, ψ0, ψ1)` at `ξ`.
///
/// `ϕ0 = φ0²(1+2φ1)`, `ϕ1 = φ1²(1+2φ0)`, `ψ0 = 2φ0²φ1`, `ψ1 = -2φ0φ1²`.
pub fn c1_jets<T: Scalar>(xi: T) -> [UJet<T>; 4] {
    let (p0, p1) = phi_jets(xi);
    let one = UJet::constant(T::one());
    let two = T::lit(2.0);
    [
        p0 * p0 * (one + p1.scale(two)),
        p1 * p1 * (one + p0.scale(two)),
        (p0 * p0 * p1).scale(two),
        (p0 * p1 * p1).scale(-two),
    ]
}

/// Order-3 jets of the C2 Hermite basis `(ρ0, ρ1, υ0, υ1, ω0, ω1)` at `ξ`.
///
/// `ρ0 = φ0³(1+3φ1+6φ1²)`, `υ0 = 2φ0³φ1(1+3φ1)`, `ω0 = 2φ0³φ1²`, with the
/// `1`-indexed functions mirrored through `φ0 ↔ φ1` (and a sign on `υ1`).
pub fn c2_jets<T: Scalar>(xi: T) -> [UJet<T>; 6] {
    let (p0, p1) = phi_jets(xi);
    let one = UJet::constant(T::one());
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let six = T::lit(6.0);
    let p0c = p0 * p0 * p0;
    let p1c = p1 * p1 * p1;
    [
        p0c * (one + p1.scale(three) + (p1 * p1).scale(six)),
        p1c * (one + p0.scale(three) + (p0 * p0).scale(six)),
        (p0c * p1).scale(two) * (one + p1.scale(three)),
        (p1c * p0).scale(-two) * (one + p0.scale(three)),
        (p0c * p1 * p1).scale(two),
        (p1c * p0 * p0).scale(two),
    ]
}

#[inline]
fn pick<T: Scalar>(j: UJet<T>, deriv: usize) -> T {
    match deriv {
        0 => j.f,
        1 => j.d1,
        2 => j.d2,
        _ => unreachable!("deriv validated by caller"),
    }
}

fn check_deriv(deriv: usize) {
    assert!(deriv <= 2, "derivative order {deriv} not supported (max 2)");
}

/// Linear blend `(φ0, φ1)` or a derivative thereof.
pub fn linear_blend<T: Scalar>(xi: T, deriv: usize) -> (T, T) {
    check_deriv(deriv);
    let (p0, p1) = phi_jets(xi);
    (pick(p0, deriv), pick(p1, deriv))
}

/// C1 Hermite basis `(ϕ0, ϕ1, ψ0, ψ1)` or a derivative thereof.
pub fn hermite_c1<T: Scalar>(xi: T, deriv: usize) -> [T; 4] {
    check_deriv(deriv);
    c1_jets(xi).map(|j| pick(j, deriv))
}

/// C2 Hermite basis `(ρ0, ρ1, υ0, υ1, ω0, ω1)` or a derivative thereof.
pub fn hermite_c2<T: Scalar>(xi: T, deriv: usize) -> [T; 6] {
    check_deriv(deriv);
    c2_jets(xi).map(|j| pick(j, deriv))
}

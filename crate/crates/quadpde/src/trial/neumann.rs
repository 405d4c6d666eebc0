//! Flux-constrained trial forms built on Hermite transfinite interpolation:
//!
//! * [`SingleFluxForm`]: one Neumann/Robin edge (canonically BC) plus three
//!   Dirichlet edges, using the C1 Hermite skeleton. A Neumann condition is
//!   the `α = 0` case of the same construction.
//! * [`AdjacentNeumannForm`]: Neumann conditions on the two edges meeting at
//!   corner C (canonically BC and CD) plus Dirichlet data on AB and AD,
//!   using the C2 Hermite skeleton with the 2×2 corner-gradient solve.
//!
//! The flux conditions are imposed through the standard-domain relation
//! `V_n-component = T − S·V_tangential − α·W·V` where `S`, `W` are the edge
//! metric ratios and `T = u_r·W` is the scaled data trace; satisfying it
//! makes the physical condition `n·∇u + α·u = u_r` hold identically on the
//! edge.

use super::{
    tensor, zero_edge, AffineJet, DirichletData, EdgeFn, FeatureG, FluxData, GSource,
    RotatedTrial, Trial, ZeroG, DATA_CORNER_TOL, IDENTITY_TOL,
};
use crate::blend::{c1_jets, c2_jets};
use crate::error::{Error, Result};
use crate::features::FeatureNet;
use crate::geometry::EdgeId;
use crate::jet::{BJet, UJet};
use crate::mapping::{CornerFlags, DomainMap, ANGULAR_TOL};
use crate::scalar::Scalar;

/// Check Dirichlet data agreement at one vertex shared by two traces.
fn check_corner<T: Scalar>(vertex: char, a: T, b: T) -> Result<T> {
    let gap = (a - b).abs().to_f64();
    if gap > DATA_CORNER_TOL {
        return Err(Error::CornerMismatch { vertex, gap });
    }
    Ok(a)
}

/// Check a corner data identity (required where the corner gradient is not
/// recoverable) and fail with `IncompatibleCornerData` otherwise.
fn check_identity<T: Scalar>(corner: &'static str, residual: T, scale: T) -> Result<()> {
    let tol = IDENTITY_TOL * (1.0 + scale.abs().to_f64());
    if residual.abs().to_f64() > tol {
        return Err(Error::IncompatibleCornerData {
            corner,
            residual: residual.abs().to_f64(),
            tol,
        });
    }
    Ok(())
}

/// Number of quarter rotations that bring `edge` to the BC slot.
fn rotations_to_bc(edge: EdgeId) -> usize {
    (edge.index() + 3) % 4
}

/// Data-dependent corner constants of the single-flux form. Zeroed for the
/// feature-column evaluations.
#[derive(Clone, Copy)]
struct SingleConsts<T> {
    u_a: T,
    u_b: T,
    u_c: T,
    u_d: T,
    /// `F_ξ(1,−1)`, `F_ξ(1,1)` from the AB/CD trace derivatives.
    fxi_b: T,
    fxi_c: T,
    /// Recovered corner normal-slope values `F_η^a(1,∓1)` (zero at
    /// orthogonal corners, where they are gated off anyway).
    feta_b: T,
    feta_c: T,
}

impl<T: Scalar> SingleConsts<T> {
    fn zero() -> Self {
        let z = T::zero();
        SingleConsts { u_a: z, u_b: z, u_c: z, u_d: z, fxi_b: z, fxi_c: z, feta_b: z, feta_c: z }
    }
}

/// Canonical single-flux form: Robin/Neumann on BC, Dirichlet on AB/CD/AD.
pub struct SingleFluxForm<T> {
    map: DomainMap<T>,
    net: FeatureNet<T>,
    /// Dirichlet traces; the `bc` slot is unused.
    data: DirichletData<T>,
    flux: FluxData<T>,
    lam_b: T,
    lam_c: T,
    consts: SingleConsts<T>,
}

impl<T: Scalar> SingleFluxForm<T> {
    pub fn new(
        map: DomainMap<T>,
        net: FeatureNet<T>,
        data: DirichletData<T>,
        flux: FluxData<T>,
        flags: Option<CornerFlags>,
    ) -> Result<Self> {
        let one = T::one();
        let flags = match flags {
            Some(f) => f,
            None => map.corner_flags(ANGULAR_TOL)?,
        };
        let u_a = check_corner('A', (data.ab)(-one).f, (data.ad)(-one).f)?;
        let u_d = check_corner('D', (data.cd)(-one).f, (data.ad)(one).f)?;
        let ab1 = (data.ab)(one);
        let cd1 = (data.cd)(one);
        let (u_b, fxi_b) = (ab1.f, ab1.d1);
        let (u_c, fxi_c) = (cd1.f, cd1.d1);

        let em_m = map.edge_metrics(EdgeId::Bc, -one)?;
        let em_p = map.edge_metrics(EdgeId::Bc, one)?;
        let t_m = ((flux.data)(-one) * em_m.w).f;
        let t_p = ((flux.data)(one) * em_p.w).f;
        let alpha = flux.alpha;

        let feta_b = if flags.lambda_b {
            (t_m - fxi_b - alpha * em_m.w.f * u_b) / em_m.s.f
        } else {
            check_identity("B", fxi_b + alpha * em_m.w.f * u_b - t_m, t_m)?;
            T::zero()
        };
        let feta_c = if flags.lambda_c {
            (t_p - fxi_c - alpha * em_p.w.f * u_c) / em_p.s.f
        } else {
            check_identity("C", fxi_c + alpha * em_p.w.f * u_c - t_p, t_p)?;
            T::zero()
        };

        let lam = |b: bool| if b { T::one() } else { T::zero() };
        Ok(SingleFluxForm {
            map,
            net,
            data,
            flux,
            lam_b: lam(flags.lambda_b),
            lam_c: lam(flags.lambda_c),
            consts: SingleConsts { u_a, u_b, u_c, u_d, fxi_b, fxi_c, feta_b, feta_c },
        })
    }

    fn eval_core(
        &self,
        g: &dyn GSource<T>,
        with_data: bool,
        c1x: &[UJet<T>; 4],
        c1y: &[UJet<T>; 4],
        s_bc: UJet<T>,
        w_bc: UJet<T>,
        xi: T,
        eta: T,
    ) -> BJet<T> {
        let one = T::one();
        let [h0x, h1x, _k0x, k1x] = *c1x;
        let [h0y, h1y, k0y, k1y] = *c1y;
        let (lb, lc) = (self.lam_b, self.lam_c);

        let gb = g.bjet(xi, eta);
        let g_m1_eta = g.ujet(0, 0, false, -one, eta);
        let gxi_1_eta = g.ujet(1, 0, false, one, eta);
        let g_1_eta = g.ujet(0, 0, false, one, eta);
        let g_xi_m1 = g.ujet(0, 0, true, xi, -one);
        let g_xi_p1 = g.ujet(0, 0, true, xi, one);
        let g_mm = g.partial(0, 0, -one, -one);
        let g_mp = g.partial(0, 0, -one, one);
        let g_pm = g.partial(0, 0, one, -one);
        let g_pp = g.partial(0, 0, one, one);
        let gx_pm = g.partial(1, 0, one, -one);
        let gx_pp = g.partial(1, 0, one, one);
        let gy_pm = g.partial(0, 1, one, -one);
        let gy_pp = g.partial(0, 1, one, one);

        let (ab_j, cd_j, ad_j, t_j, dc) = if with_data {
            (
                (self.data.ab)(xi),
                (self.data.cd)(xi),
                (self.data.ad)(eta),
                (self.flux.data)(eta) * w_bc,
                self.consts,
            )
        } else {
            (UJet::zero(), UJet::zero(), UJet::zero(), UJet::zero(), SingleConsts::zero())
        };

        // BC profile bracket and the flux-consistent slope trace
        // `F_ξ^g(1,η) = T(η) − S(η)·∂_η[bracket] − α·W(η)·[bracket]`.
        let vbc = g_1_eta
            - h0y.scale(g_pm - dc.u_b)
            - h1y.scale(g_pp - dc.u_c)
            - k0y.scale(lb * (gy_pm - dc.feta_b))
            - k1y.scale(lc * (gy_pp - dc.feta_c));
        let fxi_bc = t_j - s_bc * vbc.derivative() - (w_bc * vbc).scale(self.flux.alpha);

        let pg = tensor(h0x, g_m1_eta)
            + tensor(k1x, gxi_1_eta)
            + tensor(g_xi_m1, h0y)
            + tensor(g_xi_p1, h1y)
            - tensor(h0x, h0y.scale(g_mm) + h1y.scale(g_mp))
            - tensor(k1x, h0y.scale(gx_pm) + h1y.scale(gx_pp))
            + tensor(h1x, k0y.scale(lb * gy_pm) + k1y.scale(lc * gy_pp));

        let pf = tensor(h0x, ad_j)
            + tensor(k1x, fxi_bc)
            + tensor(ab_j, h0y)
            + tensor(cd_j, h1y)
            - tensor(h0x, h0y.scale(dc.u_a) + h1y.scale(dc.u_d))
            - tensor(k1x, h0y.scale(dc.fxi_b) + h1y.scale(dc.fxi_c))
            + tensor(h1x, k0y.scale(lb * dc.feta_b) + k1y.scale(lc * dc.feta_c));

        gb - pg + pf
    }
}

impl<T: Scalar> Trial<T> for SingleFluxForm<T> {
    fn map(&self) -> &DomainMap<T> {
        &self.map
    }
    fn n_features(&self) -> usize {
        self.net.m
    }
    fn eval(&self, xi: T, eta: T) -> AffineJet<T> {
        let em = self
            .map
            .edge_metrics(EdgeId::Bc, eta)
            .expect("edge metric singular on flux edge");
        let c1x = c1_jets(xi);
        let c1y = c1_jets(eta);
        let c = self.eval_core(&ZeroG, true, &c1x, &c1y, em.s, em.w, xi, eta);
        let cols = (0..self.net.m)
            .map(|k| {
                self.eval_core(
                    &FeatureG { net: &self.net, k },
                    false,
                    &c1x,
                    &c1y,
                    em.s,
                    em.w,
                    xi,
                    eta,
                )
            })
            .collect();
        AffineJet { c, cols }
    }
    fn g_features(&self, xi: T, eta: T) -> Vec<T> {
        (0..self.net.m).map(|k| self.net.eval(k, xi, eta)).collect()
    }
}

/// Build a single-flux form with the flux condition on an arbitrary edge.
/// The domain is rotated so the edge lands on BC; evaluation stays in the
/// original standard coordinates. The `data` slot of the flux edge is
/// ignored.
pub fn single_flux_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    edge: EdgeId,
    flux: FluxData<T>,
) -> Result<Box<dyn Trial<T>>> {
    let k = rotations_to_bc(edge);
    if k == 0 {
        return Ok(Box::new(SingleFluxForm::new(map, net, data, flux, None)?));
    }
    let mut arr = [data.ab, data.bc, data.cd, data.ad];
    arr[edge.index()] = flux.data.clone();
    let rot = super::rotate_edge_fns(arr, k);
    let rot_data = DirichletData {
        ab: rot[0].clone(),
        bc: zero_edge(),
        cd: rot[2].clone(),
        ad: rot[3].clone(),
    };
    let inner_flux = FluxData { alpha: flux.alpha, data: rot[1].clone() };
    let inner_map = DomainMap::new(map.domain.rotated(k), map.kind.clone());
    let inner = SingleFluxForm::new(inner_map, net, rot_data, inner_flux, None)?;
    Ok(Box::new(RotatedTrial { inner: Box::new(inner), k, outer_map: map }))
}

/// Single Neumann edge (`n·∇u = u_n` on `edge`) with Dirichlet data on the
/// remaining three edges.
pub fn single_neumann_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    edge: EdgeId,
    flux: EdgeFn<T>,
) -> Result<Box<dyn Trial<T>>> {
    single_flux_form(map, net, data, edge, FluxData::neumann(flux))
}

/// Data-dependent constants of the adjacent-Neumann form.
#[derive(Clone, Copy)]
struct AdjConsts<T> {
    u_a: T,
    u_b: T,
    u_d: T,
    /// `F_ξ(1,−1)` and `F_η(−1,1)` from the AB/AD trace derivatives.
    fxi_b: T,
    feta_d: T,
    /// Recovered corner values at B, D (gated by λ_B, λ_D).
    feta_a_b: T,
    fxi_a_d: T,
    /// Corner-C gradient from the 2×2 solve.
    fxi_a_c: T,
    feta_a_c: T,
    /// Data parts of `F_ξξ^g(1,1)` and `F_ξη^g(1,1)`.
    c_xx: T,
    c_xy: T,
}

impl<T: Scalar> AdjConsts<T> {
    fn zero() -> Self {
        let z = T::zero();
        AdjConsts {
            u_a: z,
            u_b: z,
            u_d: z,
            fxi_b: z,
            feta_d: z,
            feta_a_b: z,
            fxi_a_d: z,
            fxi_a_c: z,
            feta_a_c: z,
            c_xx: z,
            c_xy: z,
        }
    }
}

/// Canonical adjacent-Neumann form: Neumann on BC and CD (meeting at C),
/// Dirichlet on AB and AD, C2 Hermite skeleton.
pub struct AdjacentNeumannForm<T> {
    map: DomainMap<T>,
    net: FeatureNet<T>,
    ab: EdgeFn<T>,
    ad: EdgeFn<T>,
    ur_bc: EdgeFn<T>,
    ur_cd: EdgeFn<T>,
    lam_b: T,
    lam_c: T,
    lam_d: T,
    /// `S_BC(1)` and `λ_C·S_BC(1)/S_CD(1)` (geometric, never zeroed).
    s_bc_1: T,
    r_ratio: T,
    consts: AdjConsts<T>,
}

impl<T: Scalar> AdjacentNeumannForm<T> {
    pub fn new(
        map: DomainMap<T>,
        net: FeatureNet<T>,
        ab: EdgeFn<T>,
        ad: EdgeFn<T>,
        ur_bc: EdgeFn<T>,
        ur_cd: EdgeFn<T>,
        flags: Option<CornerFlags>,
    ) -> Result<Self> {
        let one = T::one();
        let flags = match flags {
            Some(f) => f,
            None => map.corner_flags(ANGULAR_TOL)?,
        };
        let u_a = check_corner('A', ab(-one).f, ad(-one).f)?;
        let ab1 = ab(one);
        let ad1 = ad(one);
        let (u_b, fxi_b) = (ab1.f, ab1.d1);
        let (u_d, feta_d) = (ad1.f, ad1.d1);

        let em_bc_m = map.edge_metrics(EdgeId::Bc, -one)?;
        let em_bc_p = map.edge_metrics(EdgeId::Bc, one)?;
        let em_cd_m = map.edge_metrics(EdgeId::Cd, -one)?;
        let em_cd_p = map.edge_metrics(EdgeId::Cd, one)?;
        let t_bc_m = ur_bc(-one) * em_bc_m.w;
        let t_bc_p = ur_bc(one) * em_bc_p.w;
        let t_cd_m = ur_cd(-one) * em_cd_m.w;
        let t_cd_p = ur_cd(one) * em_cd_p.w;

        let s_bc_1 = em_bc_p.s.f;
        let s_cd_1 = em_cd_p.s.f;
        let prod = s_bc_1 * s_cd_1;
        if prod.to_f64() >= 1.0 - 1e-12 {
            return Err(Error::CornerSolveSingular(prod.to_f64()));
        }
        let den = one - prod;
        let fxi_a_c = (t_bc_p.f - s_bc_1 * t_cd_p.f) / den;
        let feta_a_c = (t_cd_p.f - s_cd_1 * t_bc_p.f) / den;

        let feta_a_b = if flags.lambda_b {
            (t_bc_m.f - fxi_b) / em_bc_m.s.f
        } else {
            check_identity("B", fxi_b - t_bc_m.f, t_bc_m.f)?;
            T::zero()
        };
        let fxi_a_d = if flags.lambda_d {
            (t_cd_m.f - feta_d) / em_cd_m.s.f
        } else {
            check_identity("D", feta_d - t_cd_m.f, t_cd_m.f)?;
            T::zero()
        };

        // Cross-derivative compatibility at C: the mixed derivative of V
        // computed along BC must match the one along CD.
        let r_c = (t_cd_p.d1 - em_cd_p.s.d1 * fxi_a_c)
            - (t_bc_p.d1 - em_bc_p.s.d1 * feta_a_c);
        let (c_xx, r_ratio) = if flags.lambda_c {
            (r_c / s_cd_1, s_bc_1 / s_cd_1)
        } else {
            check_identity("C", r_c, t_bc_p.d1)?;
            (T::zero(), T::zero())
        };
        let c_xy = t_bc_p.d1 - em_bc_p.s.d1 * feta_a_c;

        let lam = |b: bool| if b { T::one() } else { T::zero() };
        Ok(AdjacentNeumannForm {
            map,
            net,
            ab,
            ad,
            ur_bc,
            ur_cd,
            lam_b: lam(flags.lambda_b),
            lam_c: lam(flags.lambda_c),
            lam_d: lam(flags.lambda_d),
            s_bc_1,
            r_ratio,
            consts: AdjConsts {
                u_a,
                u_b,
                u_d,
                fxi_b,
                feta_d,
                feta_a_b,
                fxi_a_d,
                fxi_a_c,
                feta_a_c,
                c_xx,
                c_xy,
            },
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_core(
        &self,
        g: &dyn GSource<T>,
        with_data: bool,
        c2x: &[UJet<T>; 6],
        c2y: &[UJet<T>; 6],
        s_bc: UJet<T>,
        w_bc: UJet<T>,
        s_cd: UJet<T>,
        w_cd: UJet<T>,
        xi: T,
        eta: T,
    ) -> BJet<T> {
        let one = T::one();
        let [r0x, r1x, u0x, u1x, _o0x, o1x] = *c2x;
        let [r0y, r1y, u0y, u1y, _o0y, _o1y] = *c2y;
        let (lb, lc, ld) = (self.lam_b, self.lam_c, self.lam_d);

        let gb = g.bjet(xi, eta);
        let g_m1_eta = g.ujet(0, 0, false, -one, eta);
        let gxi_1_eta = g.ujet(1, 0, false, one, eta);
        let g_1_eta = g.ujet(0, 0, false, one, eta);
        let g_xi_m1 = g.ujet(0, 0, true, xi, -one);
        let geta_xi_1 = g.ujet(0, 1, true, xi, one);
        let g_xi_1 = g.ujet(0, 0, true, xi, one);
        let g_mm = g.partial(0, 0, -one, -one);
        let g_mp = g.partial(0, 0, -one, one);
        let g_pm = g.partial(0, 0, one, -one);
        let gx_pm = g.partial(1, 0, one, -one);
        let gx_pp = g.partial(1, 0, one, one);
        let gx_mp = g.partial(1, 0, -one, one);
        let gy_pm = g.partial(0, 1, one, -one);
        let gy_pp = g.partial(0, 1, one, one);
        let gy_mp = g.partial(0, 1, -one, one);
        let gxy_pp = g.partial(1, 1, one, one);
        let gxx_pp = g.partial(2, 0, one, one);
        let gyy_pp = g.partial(0, 2, one, one);

        let (ab_j, ad_j, t_bc_j, t_cd_j, dc) = if with_data {
            (
                (self.ab)(xi),
                (self.ad)(eta),
                (self.ur_bc)(eta) * w_bc,
                (self.ur_cd)(xi) * w_cd,
                self.consts,
            )
        } else {
            (UJet::zero(), UJet::zero(), UJet::zero(), UJet::zero(), AdjConsts::zero())
        };

        // Corner-C second derivatives of the flux-consistent traces.
        let fxixi_g = self.r_ratio * gyy_pp + dc.c_xx;
        let fxieta_g = dc.c_xy - self.s_bc_1 * gyy_pp;

        // Flux-consistent slope traces along BC and CD.
        let vbc = g_1_eta
            - r0y.scale(g_pm - dc.u_b)
            - u1y.scale(gy_pp - dc.feta_a_c)
            - u0y.scale(lb * (gy_pm - dc.feta_a_b));
        let fxi_bc = t_bc_j - s_bc * vbc.derivative();

        let vcd = g_xi_1
            - r0x.scale(g_mp - dc.u_d)
            - u1x.scale(gx_pp - dc.fxi_a_c)
            - u0x.scale(ld * (gx_mp - dc.fxi_a_d))
            - o1x.scale(lc * (gxx_pp - fxixi_g));
        let feta_cd = t_cd_j - s_cd * vcd.derivative();

        let pg = tensor(r0x, g_m1_eta)
            + tensor(u1x, gxi_1_eta)
            + tensor(g_xi_m1, r0y)
            + tensor(geta_xi_1, u1y)
            - tensor(r0x, r0y.scale(g_mm) + u1y.scale(gy_mp))
            - tensor(u1x, r0y.scale(gx_pm) + u1y.scale(gxy_pp))
            + tensor(r1x, u0y.scale(lb * gy_pm))
            + tensor(u0x.scale(ld * gx_mp) + o1x.scale(lc * gxx_pp), r1y);

        let pf = tensor(r0x, ad_j)
            + tensor(u1x, fxi_bc)
            + tensor(ab_j, r0y)
            + tensor(feta_cd, u1y)
            - tensor(r0x, r0y.scale(dc.u_a) + u1y.scale(dc.feta_d))
            - tensor(u1x, r0y.scale(dc.fxi_b) + u1y.scale(fxieta_g))
            + tensor(r1x, u0y.scale(lb * dc.feta_a_b))
            + tensor(u0x.scale(ld * dc.fxi_a_d) + o1x.scale(lc * fxixi_g), r1y);

        gb - pg + pf
    }
}

impl<T: Scalar> Trial<T> for AdjacentNeumannForm<T> {
    fn map(&self) -> &DomainMap<T> {
        &self.map
    }
    fn n_features(&self) -> usize {
        self.net.m
    }
    fn eval(&self, xi: T, eta: T) -> AffineJet<T> {
        let em_bc = self
            .map
            .edge_metrics(EdgeId::Bc, eta)
            .expect("edge metric singular on BC");
        let em_cd = self
            .map
            .edge_metrics(EdgeId::Cd, xi)
            .expect("edge metric singular on CD");
        let c2x = c2_jets(xi);
        let c2y = c2_jets(eta);
        let c = self.eval_core(
            &ZeroG, true, &c2x, &c2y, em_bc.s, em_bc.w, em_cd.s, em_cd.w, xi, eta,
        );
        let cols = (0..self.net.m)
            .map(|k| {
                self.eval_core(
                    &FeatureG { net: &self.net, k },
                    false,
                    &c2x,
                    &c2y,
                    em_bc.s,
                    em_bc.w,
                    em_cd.s,
                    em_cd.w,
                    xi,
                    eta,
                )
            })
            .collect();
        AffineJet { c, cols }
    }
    fn g_features(&self, xi: T, eta: T) -> Vec<T> {
        (0..self.net.m).map(|k| self.net.eval(k, xi, eta)).collect()
    }
}

/// Number of quarter rotations that bring `corner` to the C slot.
pub(crate) fn rotations_to_c(corner: char) -> Result<usize> {
    match corner {
        'C' => Ok(0),
        'D' => Ok(1),
        'A' => Ok(2),
        'B' => Ok(3),
        other => Err(Error::InvalidConfig(format!("unknown corner `{other}`"))),
    }
}

/// Neumann conditions on the two edges meeting at `corner` (given in cyclic
/// order AB→BC→CD→AD: `flux_prev` on the earlier edge, `flux_next` on the
/// later), Dirichlet data on the other two. The `data` slots of the two
/// flux edges are ignored.
pub fn adjacent_neumann_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    corner: char,
    flux_prev: EdgeFn<T>,
    flux_next: EdgeFn<T>,
) -> Result<Box<dyn Trial<T>>> {
    let k = rotations_to_c(corner)?;
    let mut arr = [data.ab, data.bc, data.cd, data.ad];
    arr[(1 + k) % 4] = flux_prev;
    arr[(2 + k) % 4] = flux_next;
    let rot = super::rotate_edge_fns(arr, k);
    let inner_map = DomainMap::new(map.domain.rotated(k), map.kind.clone());
    let inner = AdjacentNeumannForm::new(
        inner_map,
        net,
        rot[0].clone(),
        rot[3].clone(),
        rot[1].clone(),
        rot[2].clone(),
        None,
    )?;
    if k == 0 {
        Ok(Box::new(inner))
    } else {
        Ok(Box::new(RotatedTrial { inner: Box::new(inner), k, outer_map: map }))
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{
        flux_trace_of, quad, rng_seq, sheared_map, test_field, test_field_x, test_field_y,
        trace_of, unit_square_map,
    };
    use super::super::{
        constant_edge, dirichlet_residual, flux_residual, zero_edge, DirichletData, FluxData,
    };
    use super::*;
    use crate::geometry::EdgeId;

    fn net(m: usize, seed: u64) -> FeatureNet<f64> {
        FeatureNet::init(m, 1.0, seed).unwrap()
    }

    fn dirichlet_data_for(map: &DomainMap<f64>) -> DirichletData<f64> {
        DirichletData {
            ab: trace_of(map, EdgeId::Ab, test_field),
            bc: trace_of(map, EdgeId::Bc, test_field),
            cd: trace_of(map, EdgeId::Cd, test_field),
            ad: trace_of(map, EdgeId::Ad, test_field),
        }
    }

    fn neumann_trace(map: &DomainMap<f64>, edge: EdgeId) -> super::super::EdgeFn<f64> {
        flux_trace_of(map, edge, 0.0, test_field_x, test_field_y, test_field)
    }

    /// [TRIVIAL] Constant field: zero Neumann data, constant Dirichlet
    /// data, g = 0 gives V ≡ c with vanishing derivatives.
    #[test]
    fn constant_reproduced() {
        let map = unit_square_map();
        let data = DirichletData::constant(3.0);
        let form = single_neumann_form(map, net(4, 2), data, EdgeId::Bc, zero_edge()).unwrap();
        let beta = [0.0; 4];
        for &(xi, eta) in &[(0.0, 0.0), (0.7, -0.2), (1.0, 0.5), (-1.0, 1.0)] {
            let v = form.eval_with(&beta, xi, eta);
            assert!((v.f - 3.0).abs() < 1e-13);
            assert!(v.fx.abs() < 1e-13 && v.fy.abs() < 1e-13);
        }
    }

    /// Single-flux form on a sheared quad (all λ = 1): for random β the
    /// three Dirichlet edges and the physical Neumann condition on BC hold
    /// at roundoff.
    #[test]
    fn single_sheared_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let flux = FluxData::neumann(neumann_trace(&map, EdgeId::Bc));
        let form =
            single_flux_form(map.clone(), net(20, 31), data.clone(), EdgeId::Bc, flux.clone())
                .unwrap();
        let mut next = rng_seq(0xabcdef);
        for _ in 0..20 {
            let beta: Vec<f64> = (0..20).map(|_| next()).collect();
            for (edge, f) in [
                (EdgeId::Ab, &data.ab),
                (EdgeId::Cd, &data.cd),
                (EdgeId::Ad, &data.ad),
            ] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 33);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &flux, 33);
            assert!(r < 1e-11, "BC flux residual {r:.3e}");
        }
    }

    /// Same audit on the unit square, where both BC corners are orthogonal
    /// (λ_B = λ_C = 0) and the data identities must be auto-satisfied by
    /// field-derived data.
    #[test]
    fn single_orthogonal_corners_residuals() {
        let map = unit_square_map();
        let data = dirichlet_data_for(&map);
        let flux = FluxData::neumann(neumann_trace(&map, EdgeId::Bc));
        let form =
            single_flux_form(map, net(15, 77), data.clone(), EdgeId::Bc, flux.clone()).unwrap();
        let mut next = rng_seq(0x5151);
        for _ in 0..10 {
            let beta: Vec<f64> = (0..15).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &flux, 33);
            assert!(r < 1e-11, "BC flux residual {r:.3e}");
            let r = dirichlet_residual(form.as_ref(), &beta, EdgeId::Ad, &data.ad, 33);
            assert!(r < 1e-12);
        }
    }

    /// Rotation: Neumann condition on AB imposed through the rotated
    /// canonical form still satisfies all conditions in original
    /// coordinates.
    #[test]
    fn single_rotated_edge_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        for edge in [EdgeId::Ab, EdgeId::Cd, EdgeId::Ad] {
            let flux = FluxData::neumann(neumann_trace(&map, edge));
            let form =
                single_flux_form(map.clone(), net(12, 8), data.clone(), edge, flux.clone())
                    .unwrap();
            let mut next = rng_seq(0x99 + edge.index() as u64);
            for _ in 0..5 {
                let beta: Vec<f64> = (0..12).map(|_| next()).collect();
                let r = flux_residual(form.as_ref(), &beta, edge, &flux, 25);
                assert!(r < 1e-11, "{} flux residual {r:.3e}", edge.name());
                for other in EdgeId::ALL {
                    if other == edge {
                        continue;
                    }
                    let f = [&data.ab, &data.bc, &data.cd, &data.ad][other.index()];
                    let r = dirichlet_residual(form.as_ref(), &beta, other, f, 25);
                    assert!(r < 1e-12, "{} residual {r:.3e}", other.name());
                }
            }
        }
    }

    /// Finite-difference consistency of the reported derivative jets
    /// (checks the rotated path too).
    #[test]
    fn derivative_jets_fd() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let flux = FluxData::neumann(neumann_trace(&map, EdgeId::Ad));
        let form = single_flux_form(map, net(6, 4), data, EdgeId::Ad, flux).unwrap();
        let beta = [0.5, -0.2, 0.9, -1.1, 0.3, 0.7];
        let h = 1e-5;
        for &(xi, eta) in &[(0.25, -0.35), (-0.5, 0.6)] {
            let v = form.eval_with(&beta, xi, eta);
            let at = |a: f64, b: f64| form.eval_with(&beta, a, b).f;
            let fx = (at(xi + h, eta) - at(xi - h, eta)) / (2.0 * h);
            let fy = (at(xi, eta + h) - at(xi, eta - h)) / (2.0 * h);
            let fxx = (at(xi + h, eta) - 2.0 * at(xi, eta) + at(xi - h, eta)) / (h * h);
            let fyy = (at(xi, eta + h) - 2.0 * at(xi, eta) + at(xi, eta - h)) / (h * h);
            let fxy = (at(xi + h, eta + h) - at(xi + h, eta - h) - at(xi - h, eta + h)
                + at(xi - h, eta - h))
                / (4.0 * h * h);
            assert!((v.fx - fx).abs() < 1e-6 * (1.0 + fx.abs()), "{} vs {}", v.fx, fx);
            assert!((v.fy - fy).abs() < 1e-6 * (1.0 + fy.abs()));
            assert!((v.fxx - fxx).abs() < 1e-4 * (1.0 + fxx.abs()));
            assert!((v.fyy - fyy).abs() < 1e-4 * (1.0 + fyy.abs()));
            assert!((v.fxy - fxy).abs() < 1e-4 * (1.0 + fxy.abs()));
        }
    }

    /// [TRIVIAL] Incompatible corner data at an orthogonal corner is
    /// rejected.
    #[test]
    fn incompatible_corner_data_rejected() {
        let map = unit_square_map();
        // AB trace with slope 1 at B, but zero Neumann data on BC: the
        // identity F_ξ(1,−1) = T(−1) fails.
        let lin = std::sync::Arc::new(|s: f64| crate::jet::UJet::variable(s));
        let data = DirichletData {
            ab: lin.clone(),
            bc: constant_edge(0.0),
            cd: lin.clone(),
            ad: constant_edge(-1.0),
        };
        let err = single_neumann_form(map, net(2, 3), data, EdgeId::Bc, zero_edge())
            .err()
            .unwrap();
        assert!(matches!(err, Error::IncompatibleCornerData { corner: "B", .. }), "{err}");
    }

    /// Adjacent-Neumann on a sheared quad: Dirichlet on AB/AD, physical
    /// Neumann on BC/CD, for random β.
    #[test]
    fn adjacent_sheared_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let f_bc = FluxData::neumann(neumann_trace(&map, EdgeId::Bc));
        let f_cd = FluxData::neumann(neumann_trace(&map, EdgeId::Cd));
        let form = adjacent_neumann_form(
            map.clone(),
            net(18, 21),
            data.clone(),
            'C',
            f_bc.data.clone(),
            f_cd.data.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0x7777);
        for _ in 0..15 {
            let beta: Vec<f64> = (0..18).map(|_| next()).collect();
            for (edge, f) in [(EdgeId::Ab, &data.ab), (EdgeId::Ad, &data.ad)] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 33);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &f_bc, 33);
            assert!(r < 1e-10, "BC flux residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Cd, &f_cd, 33);
            assert!(r < 1e-10, "CD flux residual {r:.3e}");
        }
    }

    /// Adjacent-Neumann on the unit square (orthogonal corner C) with
    /// field-derived data.
    #[test]
    fn adjacent_orthogonal_residuals() {
        let map = unit_square_map();
        let data = dirichlet_data_for(&map);
        let f_bc = FluxData::neumann(neumann_trace(&map, EdgeId::Bc));
        let f_cd = FluxData::neumann(neumann_trace(&map, EdgeId::Cd));
        let form = adjacent_neumann_form(
            map,
            net(14, 55),
            data.clone(),
            'C',
            f_bc.data.clone(),
            f_cd.data.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0xd00d);
        for _ in 0..10 {
            let beta: Vec<f64> = (0..14).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &f_bc, 33);
            assert!(r < 1e-10, "BC flux residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Cd, &f_cd, 33);
            assert!(r < 1e-10, "CD flux residual {r:.3e}");
            let r = dirichlet_residual(form.as_ref(), &beta, EdgeId::Ab, &data.ab, 33);
            assert!(r < 1e-12);
        }
    }

    /// Adjacent-Neumann rotated to another corner.
    #[test]
    fn adjacent_rotated_corner_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        // Corner A: flux edges are AD (prev) and AB (next).
        let f_ad = FluxData::neumann(neumann_trace(&map, EdgeId::Ad));
        let f_ab = FluxData::neumann(neumann_trace(&map, EdgeId::Ab));
        let form = adjacent_neumann_form(
            map.clone(),
            net(12, 13),
            data.clone(),
            'A',
            f_ad.data.clone(),
            f_ab.data.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0x1010);
        for _ in 0..10 {
            let beta: Vec<f64> = (0..12).map(|_| next()).collect();
            for (edge, f) in [(EdgeId::Bc, &data.bc), (EdgeId::Cd, &data.cd)] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 33);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Ad, &f_ad, 33);
            assert!(r < 1e-10, "AD flux residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Ab, &f_ab, 33);
            assert!(r < 1e-10, "AB flux residual {r:.3e}");
        }
    }

    /// [TRIVIAL] Near-parallel edge tangents at C make the corner gradient
    /// solve singular.
    #[test]
    fn corner_solve_singular_detected() {
        let map = DomainMap::coons(quad([
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (2.0 - 1e-9, 2.0),
        ]));
        let err = AdjacentNeumannForm::new(
            map,
            net(2, 1),
            constant_edge(0.0),
            constant_edge(0.0),
            zero_edge(),
            zero_edge(),
            None,
        )
        .err()
        .unwrap();
        assert!(matches!(err, Error::CornerSolveSingular(_)), "{err}");
    }
}

//! Robin-constrained trial forms.
//!
//! * [`single_robin_form`]: one Robin edge plus three Dirichlet edges; this
//!   is the `α ≠ 0` case of the C1 single-flux construction in
//!   [`super::neumann`].
//! * [`AdjacentRobinForm`]: Robin (or mixed Neumann/Robin) conditions on
//!   the two edges meeting at corner C, with the C2 Hermite skeleton.
//!
//! The adjacent-Robin corner machinery generalizes the Neumann one: the
//! corner gradient splits into a data part `F^a` and a geometric part `F^b`
//! multiplying the (unknown) corner value, and the cross-derivative
//! compatibility at C either determines the corner value (`γ_C = 1`),
//! imposes a data identity (`γ_C = 0`), or — when the corner is
//! non-orthogonal (`λ_C = 1`) — fixes the second tangential derivative
//! instead.

use super::neumann::{rotations_to_c, single_flux_form};
use super::{
    tensor, AffineJet, DirichletData, EdgeFn, FeatureG, FluxData, GSource, RotatedTrial,
    Trial, ZeroG, DATA_CORNER_TOL, IDENTITY_TOL,
};
use crate::blend::c2_jets;
use crate::error::{Error, Result};
use crate::features::FeatureNet;
use crate::geometry::EdgeId;
use crate::jet::{BJet, UJet};
use crate::mapping::{CornerFlags, DomainMap, ANGULAR_TOL};
use crate::scalar::Scalar;

/// Relative tolerance deciding whether the corner-value coefficient
/// `Q^b_BC(1) − Q^b_CD(1)` is nonzero (`γ_C = 1`).
pub const GAMMA_TOL: f64 = 1e-9;

/// Single Robin edge (`n·∇u + α·u = u_r` on `edge`) with Dirichlet data on
/// the remaining three edges. With `α = 0` this is exactly the single
/// Neumann construction.
pub fn single_robin_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    edge: EdgeId,
    flux: FluxData<T>,
) -> Result<Box<dyn Trial<T>>> {
    single_flux_form(map, net, data, edge, flux)
}

/// Data-dependent constants of the adjacent-Robin form.
#[derive(Clone, Copy)]
struct RobinConsts<T> {
    u_a: T,
    u_b: T,
    u_d: T,
    fxi_b: T,
    feta_d: T,
    /// Corner slope values at B, D (gated by λ_B, λ_D).
    fa_eta_b: T,
    fa_xi_d: T,
    /// Data parts of the corner-C gradient.
    fa_xi_c: T,
    fa_eta_c: T,
    /// Determined corner value `F^a(1,1)` (γ_C = 1 case only).
    fa_c: T,
    /// Data parts of the C cross/second derivatives.
    qa_bc: T,
    c_xx: T,
}

impl<T: Scalar> RobinConsts<T> {
    fn zero() -> Self {
        let z = T::zero();
        RobinConsts {
            u_a: z,
            u_b: z,
            u_d: z,
            fxi_b: z,
            feta_d: z,
            fa_eta_b: z,
            fa_xi_d: z,
            fa_xi_c: z,
            fa_eta_c: z,
            fa_c: z,
            qa_bc: z,
            c_xx: z,
        }
    }
}

/// Canonical adjacent-Robin form: Robin on BC (`α_BC`) and CD (`α_CD`),
/// Dirichlet on AB and AD. Either α may be zero (mixed or double Neumann).
pub struct AdjacentRobinForm<T> {
    map: DomainMap<T>,
    net: FeatureNet<T>,
    ab: EdgeFn<T>,
    ad: EdgeFn<T>,
    bc: FluxData<T>,
    cd: FluxData<T>,
    lam_b: T,
    lam_c: T,
    lam_d: T,
    /// Whether the corner value at C is determined by the data
    /// (`λ_C = 0` and the `Q^b` coefficients differ).
    pub gamma_c: bool,
    /// `(1 − λ_C)·γ_C` as a scalar gate.
    gamma_t: T,
    // Geometric corner quantities (never zeroed).
    s_bc_1: T,
    fb_xi_c: T,
    fb_eta_c: T,
    qb_bc: T,
    /// `−(Q^b_BC − Q^b_CD)/S_CD(1)` (λ_C = 1 only).
    q_xx: T,
    /// `S_BC(1)/S_CD(1)` (λ_C = 1 only).
    r_ratio: T,
    consts: RobinConsts<T>,
}

fn check_corner<T: Scalar>(vertex: char, a: T, b: T) -> Result<T> {
    let gap = (a - b).abs().to_f64();
    if gap > DATA_CORNER_TOL {
        return Err(Error::CornerMismatch { vertex, gap });
    }
    Ok(a)
}

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

impl<T: Scalar> AdjacentRobinForm<T> {
    pub fn new(
        map: DomainMap<T>,
        net: FeatureNet<T>,
        ab: EdgeFn<T>,
        ad: EdgeFn<T>,
        bc: FluxData<T>,
        cd: FluxData<T>,
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
        let (a_bc, a_cd) = (bc.alpha, cd.alpha);

        let em_bc_m = map.edge_metrics(EdgeId::Bc, -one)?;
        let em_bc_p = map.edge_metrics(EdgeId::Bc, one)?;
        let em_cd_m = map.edge_metrics(EdgeId::Cd, -one)?;
        let em_cd_p = map.edge_metrics(EdgeId::Cd, one)?;
        let t_bc_m = (bc.data)(-one) * em_bc_m.w;
        let t_bc_p = (bc.data)(one) * em_bc_p.w;
        let t_cd_m = (cd.data)(-one) * em_cd_m.w;
        let t_cd_p = (cd.data)(one) * em_cd_p.w;

        let s_bc_1 = em_bc_p.s.f;
        let s_cd_1 = em_cd_p.s.f;
        let prod = s_bc_1 * s_cd_1;
        if prod.to_f64() >= 1.0 - 1e-12 {
            return Err(Error::CornerSolveSingular(prod.to_f64()));
        }
        let den = one - prod;

        // Corner-C gradient: data part and corner-value coefficient.
        let (w_bc_1, w_cd_1) = (em_bc_p.w.f, em_cd_p.w.f);
        let fa_xi_c = (t_bc_p.f - s_bc_1 * t_cd_p.f) / den;
        let fa_eta_c = (t_cd_p.f - s_cd_1 * t_bc_p.f) / den;
        let fb_xi_c = (a_bc * w_bc_1 - s_bc_1 * a_cd * w_cd_1) / den;
        let fb_eta_c = (a_cd * w_cd_1 - s_cd_1 * a_bc * w_bc_1) / den;

        // Cross-derivative coefficients at C along each edge.
        let (sp_bc_1, sp_cd_1) = (em_bc_p.s.d1, em_cd_p.s.d1);
        let (wp_bc_1, wp_cd_1) = (em_bc_p.w.d1, em_cd_p.w.d1);
        let qa_bc = t_bc_p.d1 - (sp_bc_1 + a_bc * w_bc_1) * fa_eta_c;
        let qb_bc = (sp_bc_1 + a_bc * w_bc_1) * fb_eta_c - a_bc * wp_bc_1;
        let qa_cd = t_cd_p.d1 - (sp_cd_1 + a_cd * w_cd_1) * fa_xi_c;
        let qb_cd = (sp_cd_1 + a_cd * w_cd_1) * fb_xi_c - a_cd * wp_cd_1;

        let zero = T::zero();
        let (gamma_c, gamma_t, fa_c, q_xx, c_xx, r_ratio);
        if flags.lambda_c {
            // Non-orthogonal corner: compatibility fixes F_ξξ(1,1) instead
            // of the corner value.
            gamma_c = false;
            gamma_t = zero;
            fa_c = zero;
            q_xx = -(qb_bc - qb_cd) / s_cd_1;
            c_xx = -(qa_bc - qa_cd) / s_cd_1;
            r_ratio = s_bc_1 / s_cd_1;
        } else {
            let dq = qb_bc - qb_cd;
            let dq_tol = GAMMA_TOL * (1.0 + qb_bc.abs().to_f64());
            if dq.abs().to_f64() > dq_tol {
                gamma_c = true;
                gamma_t = one;
                fa_c = -(qa_bc - qa_cd) / dq;
            } else {
                gamma_c = false;
                gamma_t = zero;
                check_identity("C", qa_bc - qa_cd, qa_bc)?;
                fa_c = zero;
            }
            q_xx = zero;
            c_xx = zero;
            r_ratio = zero;
        }

        let fa_eta_b = if flags.lambda_b {
            (t_bc_m.f - fxi_b - a_bc * em_bc_m.w.f * u_b) / em_bc_m.s.f
        } else {
            check_identity("B", fxi_b + a_bc * em_bc_m.w.f * u_b - t_bc_m.f, t_bc_m.f)?;
            zero
        };
        let fa_xi_d = if flags.lambda_d {
            (t_cd_m.f - feta_d - a_cd * em_cd_m.w.f * u_d) / em_cd_m.s.f
        } else {
            check_identity("D", feta_d + a_cd * em_cd_m.w.f * u_d - t_cd_m.f, t_cd_m.f)?;
            zero
        };

        let lam = |b: bool| if b { T::one() } else { T::zero() };
        Ok(AdjacentRobinForm {
            map,
            net,
            ab,
            ad,
            bc,
            cd,
            lam_b: lam(flags.lambda_b),
            lam_c: lam(flags.lambda_c),
            lam_d: lam(flags.lambda_d),
            gamma_c,
            gamma_t,
            s_bc_1,
            fb_xi_c,
            fb_eta_c,
            qb_bc,
            q_xx,
            r_ratio,
            consts: RobinConsts {
                u_a,
                u_b,
                u_d,
                fxi_b,
                feta_d,
                fa_eta_b,
                fa_xi_d,
                fa_xi_c,
                fa_eta_c,
                fa_c,
                qa_bc,
                c_xx,
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
        let gt = self.gamma_t;

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
        let g_pp = g.partial(0, 0, one, one);
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
                (self.bc.data)(eta) * w_bc,
                (self.cd.data)(xi) * w_cd,
                self.consts,
            )
        } else {
            (UJet::zero(), UJet::zero(), UJet::zero(), UJet::zero(), RobinConsts::zero())
        };

        // Effective corner value at C: the free value `g(1,1)` unless γ
        // pins it to the data-determined `F^a(1,1)`.
        let veff = (one - gt) * g_pp + gt * dc.fa_c;

        // Corner-C derivative values of the flux-consistent traces.
        let fxieta_g = dc.qa_bc + self.qb_bc * veff - self.s_bc_1 * gyy_pp;
        let fxixi_g = self.r_ratio * gyy_pp + self.q_xx * veff + dc.c_xx;
        let feta_g_c = dc.fa_eta_c - self.fb_eta_c * veff;
        let fxi_g_c = dc.fa_xi_c - self.fb_xi_c * veff;

        // Flux-consistent slope traces along BC and CD.
        let vbc = g_1_eta
            - r0y.scale(g_pm - dc.u_b)
            - u1y.scale(gy_pp - feta_g_c)
            - u0y.scale(lb * (gy_pm - dc.fa_eta_b))
            - r1y.scale(gt * (g_pp - dc.fa_c));
        let fxi_bc = t_bc_j - s_bc * vbc.derivative() - (w_bc * vbc).scale(self.bc.alpha);

        let vcd = g_xi_1
            - r0x.scale(g_mp - dc.u_d)
            - u1x.scale(gx_pp - fxi_g_c)
            - u0x.scale(ld * (gx_mp - dc.fa_xi_d))
            - o1x.scale(lc * (gxx_pp - fxixi_g))
            - r1x.scale(gt * (g_pp - dc.fa_c));
        let feta_cd = t_cd_j - s_cd * vcd.derivative() - (w_cd * vcd).scale(self.cd.alpha);

        let pg = tensor(r0x, g_m1_eta)
            + tensor(u1x, gxi_1_eta)
            + tensor(g_xi_m1, r0y)
            + tensor(geta_xi_1, u1y)
            - tensor(r0x, r0y.scale(g_mm) + u1y.scale(gy_mp))
            - tensor(u1x, r0y.scale(gx_pm) + u1y.scale(gxy_pp))
            + tensor(r1x, u0y.scale(lb * gy_pm))
            + tensor(
                u0x.scale(ld * gx_mp) + o1x.scale(lc * gxx_pp) + r1x.scale(gt * g_pp),
                r1y,
            );

        let pf = tensor(r0x, ad_j)
            + tensor(u1x, fxi_bc)
            + tensor(ab_j, r0y)
            + tensor(feta_cd, u1y)
            - tensor(r0x, r0y.scale(dc.u_a) + u1y.scale(dc.feta_d))
            - tensor(u1x, r0y.scale(dc.fxi_b) + u1y.scale(fxieta_g))
            + tensor(r1x, u0y.scale(lb * dc.fa_eta_b))
            + tensor(
                u0x.scale(ld * dc.fa_xi_d)
                    + o1x.scale(lc * fxixi_g)
                    + r1x.scale(gt * dc.fa_c),
                r1y,
            );

        gb - pg + pf
    }
}

impl<T: Scalar> Trial<T> for AdjacentRobinForm<T> {
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

/// Robin (or mixed) conditions on the two edges meeting at `corner`, given
/// in cyclic order AB→BC→CD→AD (`flux_prev` on the earlier edge). The
/// `data` slots of the two flux edges are ignored.
pub fn adjacent_robin_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    corner: char,
    flux_prev: FluxData<T>,
    flux_next: FluxData<T>,
) -> Result<Box<dyn Trial<T>>> {
    let k = rotations_to_c(corner)?;
    let mut arr = [data.ab, data.bc, data.cd, data.ad];
    arr[(1 + k) % 4] = flux_prev.data.clone();
    arr[(2 + k) % 4] = flux_next.data.clone();
    let rot = super::rotate_edge_fns(arr, k);
    let inner_map = DomainMap::new(map.domain.rotated(k), map.kind.clone());
    let inner = AdjacentRobinForm::new(
        inner_map,
        net,
        rot[0].clone(),
        rot[3].clone(),
        FluxData { alpha: flux_prev.alpha, data: rot[1].clone() },
        FluxData { alpha: flux_next.alpha, data: rot[2].clone() },
        None,
    )?;
    if k == 0 {
        Ok(Box::new(inner))
    } else {
        Ok(Box::new(RotatedTrial { inner: Box::new(inner), k, outer_map: map }))
    }
}

/// Mixed corner: a Neumann condition on one of the two edges meeting at
/// `corner` and a Robin condition on the other. This is the adjacent-Robin
/// construction with one `α = 0`.
pub fn mixed_corner_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    corner: char,
    flux_prev: FluxData<T>,
    flux_next: FluxData<T>,
) -> Result<Box<dyn Trial<T>>> {
    adjacent_robin_form(map, net, data, corner, flux_prev, flux_next)
}

#[cfg(test)]
mod tests {
    use super::super::neumann::AdjacentNeumannForm;
    use super::super::testutil::{
        flux_trace_of, rng_seq, sheared_map, test_field, test_field_x, test_field_y,
        trace_of,
    };
    use super::super::{dirichlet_residual, flux_residual, single_neumann_form};
    use super::*;
    use crate::geometry::{make_quad, ParametricCurve, Point2};

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

    fn robin_trace(map: &DomainMap<f64>, edge: EdgeId, alpha: f64) -> FluxData<f64> {
        FluxData::robin(
            alpha,
            flux_trace_of(map, edge, alpha, test_field_x, test_field_y, test_field),
        )
    }

    /// Single-Robin residual audit on a sheared quad, α = 1.3.
    #[test]
    fn single_robin_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let flux = robin_trace(&map, EdgeId::Bc, 1.3);
        let form =
            single_robin_form(map, net(18, 6), data.clone(), EdgeId::Bc, flux.clone()).unwrap();
        let mut next = rng_seq(0x42);
        for _ in 0..15 {
            let beta: Vec<f64> = (0..18).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &flux, 33);
            assert!(r < 1e-11, "BC robin residual {r:.3e}");
            for (edge, f) in [
                (EdgeId::Ab, &data.ab),
                (EdgeId::Cd, &data.cd),
                (EdgeId::Ad, &data.ad),
            ] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 33);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
        }
    }

    /// [TRIVIAL: α = 0 collapse] single_robin_form with α = 0 agrees with
    /// single_neumann_form pointwise (shared code path).
    #[test]
    fn single_robin_alpha_zero_matches_neumann() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let un = flux_trace_of(&map, EdgeId::Bc, 0.0, test_field_x, test_field_y, test_field);
        let rform = single_robin_form(
            map.clone(),
            net(8, 9),
            data.clone(),
            EdgeId::Bc,
            FluxData::robin(0.0, un.clone()),
        )
        .unwrap();
        let nform = single_neumann_form(map, net(8, 9), data, EdgeId::Bc, un).unwrap();
        let beta = [0.3, -0.8, 0.2, 1.4, -0.6, 0.1, 0.9, -0.4];
        for &(xi, eta) in &[(0.2, -0.5), (-0.9, 0.1), (0.8, 0.8)] {
            let a = rform.eval_with(&beta, xi, eta);
            let b = nform.eval_with(&beta, xi, eta);
            for (x, y) in [
                (a.f, b.f),
                (a.fx, b.fx),
                (a.fy, b.fy),
                (a.fxx, b.fxx),
                (a.fxy, b.fxy),
                (a.fyy, b.fyy),
            ] {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    /// Adjacent-Robin residual audit at corner C of a sheared quad with two
    /// distinct α values.
    #[test]
    fn adjacent_robin_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let f_bc = robin_trace(&map, EdgeId::Bc, 0.8);
        let f_cd = robin_trace(&map, EdgeId::Cd, 1.7);
        let form = adjacent_robin_form(
            map,
            net(16, 12),
            data.clone(),
            'C',
            f_bc.clone(),
            f_cd.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0xace);
        for _ in 0..15 {
            let beta: Vec<f64> = (0..16).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &f_bc, 33);
            assert!(r < 1e-10, "BC robin residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Cd, &f_cd, 33);
            assert!(r < 1e-10, "CD robin residual {r:.3e}");
            for (edge, f) in [(EdgeId::Ab, &data.ab), (EdgeId::Ad, &data.ad)] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 33);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
        }
    }

    /// [DERIVED: independent implementations] adjacent-Robin with both
    /// α = 0 agrees with the adjacent-Neumann form pointwise to roundoff.
    #[test]
    fn adjacent_robin_alpha_zero_matches_neumann() {
        for map in [sheared_map(), super::super::testutil::unit_square_map()] {
            let data = dirichlet_data_for(&map);
            let un_bc =
                flux_trace_of(&map, EdgeId::Bc, 0.0, test_field_x, test_field_y, test_field);
            let un_cd =
                flux_trace_of(&map, EdgeId::Cd, 0.0, test_field_x, test_field_y, test_field);
            let rform = AdjacentRobinForm::new(
                map.clone(),
                net(8, 33),
                data.ab.clone(),
                data.ad.clone(),
                FluxData::robin(0.0, un_bc.clone()),
                FluxData::robin(0.0, un_cd.clone()),
                None,
            )
            .unwrap();
            let nform = AdjacentNeumannForm::new(
                map,
                net(8, 33),
                data.ab.clone(),
                data.ad.clone(),
                un_bc,
                un_cd,
                None,
            )
            .unwrap();
            let beta = [1.0, -0.5, 0.25, 0.75, -1.25, 0.4, -0.9, 0.6];
            for &(xi, eta) in &[(0.3, 0.3), (-0.7, 0.9), (0.95, -0.85)] {
                let a = rform.eval_with(&beta, xi, eta);
                let b = nform.eval_with(&beta, xi, eta);
                for (x, y) in [
                    (a.f, b.f),
                    (a.fx, b.fx),
                    (a.fy, b.fy),
                    (a.fxx, b.fxx),
                    (a.fxy, b.fxy),
                    (a.fyy, b.fyy),
                ] {
                    assert!(
                        (x - y).abs() < 1e-12 * (1.0 + x.abs()),
                        "{x} vs {y} at ({xi},{eta})"
                    );
                }
            }
        }
    }

    /// Mixed corner (Neumann on BC, Robin on CD) residual audit.
    #[test]
    fn mixed_corner_residuals() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        let f_bc = robin_trace(&map, EdgeId::Bc, 0.0);
        let f_cd = robin_trace(&map, EdgeId::Cd, 2.1);
        let form = mixed_corner_form(
            map,
            net(14, 77),
            data.clone(),
            'C',
            f_bc.clone(),
            f_cd.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0xbead);
        for _ in 0..10 {
            let beta: Vec<f64> = (0..14).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &f_bc, 33);
            assert!(r < 1e-10, "BC neumann residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Cd, &f_cd, 33);
            assert!(r < 1e-10, "CD robin residual {r:.3e}");
        }
    }

    /// Adjacent-Robin rotated to corner D.
    #[test]
    fn adjacent_robin_rotated_corner() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        // Corner D: flux edges are CD (prev) and AD (next).
        let f_cd = robin_trace(&map, EdgeId::Cd, 0.6);
        let f_ad = robin_trace(&map, EdgeId::Ad, 1.1);
        let form = adjacent_robin_form(
            map,
            net(12, 19),
            data.clone(),
            'D',
            f_cd.clone(),
            f_ad.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0xf00d);
        for _ in 0..10 {
            let beta: Vec<f64> = (0..12).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Cd, &f_cd, 33);
            assert!(r < 1e-10, "CD robin residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Ad, &f_ad, 33);
            assert!(r < 1e-10, "AD robin residual {r:.3e}");
            for (edge, f) in [(EdgeId::Ab, &data.ab), (EdgeId::Bc, &data.bc)] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 33);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
        }
    }

    /// Orthogonal corner C with a curved BC edge: exercises the γ_C logic
    /// on a non-trivial geometry; whatever branch is taken, the boundary
    /// conditions must hold.
    #[test]
    fn adjacent_robin_orthogonal_curved() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(2.0, 0.0);
        let c = Point2::new(2.0, 2.0);
        let d = Point2::new(0.0, 2.0);
        let dom = make_quad(
            ParametricCurve::Line { a, b },
            ParametricCurve::BumpedLine {
                a: b,
                b: c,
                amp: 0.2,
                dir: Point2::new(1.0, 0.0),
            },
            ParametricCurve::Line { a: d, b: c },
            ParametricCurve::Line { a, b: d },
        )
        .unwrap();
        let map = DomainMap::coons(dom);
        let data = dirichlet_data_for(&map);
        let f_bc = robin_trace(&map, EdgeId::Bc, 1.4);
        let f_cd = robin_trace(&map, EdgeId::Cd, 0.5);
        let form = AdjacentRobinForm::new(
            map,
            net(12, 27),
            data.ab.clone(),
            data.ad.clone(),
            f_bc.clone(),
            f_cd.clone(),
            None,
        )
        .unwrap();
        let mut next = rng_seq(0xc0ffee);
        for _ in 0..10 {
            let beta: Vec<f64> = (0..12).map(|_| next()).collect();
            let r = flux_residual(&form, &beta, EdgeId::Bc, &f_bc, 33);
            assert!(r < 1e-10, "BC robin residual {r:.3e}");
            let r = flux_residual(&form, &beta, EdgeId::Cd, &f_cd, 33);
            assert!(r < 1e-10, "CD robin residual {r:.3e}");
        }
    }

    /// Symmetric-role check: swapping which adjacent edge carries which α
    /// (via rotation to the same corner) yields trial spaces that both
    /// satisfy their conditions — sanity guard on the prev/next ordering.
    #[test]
    fn quad_rotation_ordering() {
        let map = sheared_map();
        let data = dirichlet_data_for(&map);
        // Corner B: flux edges are AB (prev) and BC (next).
        let f_ab = robin_trace(&map, EdgeId::Ab, 0.9);
        let f_bc = robin_trace(&map, EdgeId::Bc, 1.6);
        let form = adjacent_robin_form(
            map,
            net(10, 41),
            data.clone(),
            'B',
            f_ab.clone(),
            f_bc.clone(),
        )
        .unwrap();
        let mut next = rng_seq(0x5eed);
        for _ in 0..8 {
            let beta: Vec<f64> = (0..10).map(|_| next()).collect();
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Ab, &f_ab, 29);
            assert!(r < 1e-10, "AB robin residual {r:.3e}");
            let r = flux_residual(form.as_ref(), &beta, EdgeId::Bc, &f_bc, 29);
            assert!(r < 1e-10, "BC robin residual {r:.3e}");
            for (edge, f) in [(EdgeId::Cd, &data.cd), (EdgeId::Ad, &data.ad)] {
                let r = dirichlet_residual(form.as_ref(), &beta, edge, f, 29);
                assert!(r < 1e-12, "{} residual {r:.3e}", edge.name());
            }
        }
    }
}

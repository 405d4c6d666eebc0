//! Dirichlet trial forms: four constrained edges, and the three-edge
//! variant (AB, BC, AD constrained; CD free) used for initial/boundary-value
//! problems on space-time domains.
//!
//! Both use the transfinite bilinear interpolation operator written in the
//! numerically regrouped form, where every bracket vanishes identically on
//! the edges it does not own. This keeps the exact-satisfaction property at
//! the roundoff level instead of relying on cancellation between large
//! separate terms.

use super::{
    tensor, AffineJet, DirichletData, EdgeFn, FeatureG, GSource, Trial, ZeroG,
};
use crate::blend::phi_jets;
use crate::error::Result;
use crate::features::FeatureNet;
use crate::jet::BJet;
use crate::mapping::DomainMap;
use crate::scalar::Scalar;

/// Four-edge Dirichlet constrained expression.
pub struct DirichletForm<T> {
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
    /// Corner values `[u_A, u_B, u_C, u_D]`.
    corners: [T; 4],
}

/// Build the four-edge Dirichlet form, validating corner compatibility of
/// the data at all four vertices.
pub fn dirichlet_form<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: DirichletData<T>,
) -> Result<DirichletForm<T>> {
    let corners = data.corner_values(&['A', 'B', 'C', 'D'])?;
    Ok(DirichletForm { map, net, data, corners })
}

impl<T: Scalar> DirichletForm<T> {
    /// One joint evaluation: `V = g − Pg + PF` for the supplied free
    /// function and (possibly zeroed) data.
    fn eval_core(
        &self,
        g: &dyn GSource<T>,
        data: Option<(&DirichletData<T>, &[T; 4])>,
        xi: T,
        eta: T,
    ) -> BJet<T> {
        let one = T::one();
        let (p0x, p1x) = phi_jets(xi);
        let (p0y, p1y) = phi_jets(eta);

        let gb = g.bjet(xi, eta);
        let g_xi_m1 = g.ujet(0, 0, true, xi, -one);
        let g_xi_p1 = g.ujet(0, 0, true, xi, one);
        let g_m1_eta = g.ujet(0, 0, false, -one, eta);
        let g_p1_eta = g.ujet(0, 0, false, one, eta);
        let g_mm = g.partial(0, 0, -one, -one);
        let g_mp = g.partial(0, 0, -one, one);
        let g_pm = g.partial(0, 0, one, -one);
        let g_pp = g.partial(0, 0, one, one);

        // g − Pg in regrouped form: the first bracket vanishes on η = ±1,
        // the ξ-blended brackets vanish on both η edges and restore the
        // ξ = ±1 traces.
        let left = g_m1_eta - p0y.scale(g_mm) - p1y.scale(g_mp);
        let right = g_p1_eta - p0y.scale(g_pm) - p1y.scale(g_pp);
        let mut v = gb
            - tensor(g_xi_m1, p0y)
            - tensor(g_xi_p1, p1y)
            - tensor(p0x, left)
            - tensor(p1x, right);

        if let Some((d, c)) = data {
            let [u_a, u_b, u_c, u_d] = *c;
            let ab = (d.ab)(xi);
            let cd = (d.cd)(xi);
            let ad = (d.ad)(eta);
            let bc = (d.bc)(eta);
            let f_left = ad - p0y.scale(u_a) - p1y.scale(u_d);
            let f_right = bc - p0y.scale(u_b) - p1y.scale(u_c);
            v = v
                + tensor(ab, p0y)
                + tensor(cd, p1y)
                + tensor(p0x, f_left)
                + tensor(p1x, f_right);
        }
        v
    }
}

impl<T: Scalar> Trial<T> for DirichletForm<T> {
    fn map(&self) -> &DomainMap<T> {
        &self.map
    }
    fn n_features(&self) -> usize {
        self.net.m
    }
    fn eval(&self, xi: T, eta: T) -> AffineJet<T> {
        let c = self.eval_core(&ZeroG, Some((&self.data, &self.corners)), xi, eta);
        let cols = (0..self.net.m)
            .map(|k| self.eval_core(&FeatureG { net: &self.net, k }, None, xi, eta))
            .collect();
        AffineJet { c, cols }
    }
    fn g_features(&self, xi: T, eta: T) -> Vec<T> {
        (0..self.net.m).map(|k| self.net.eval(k, xi, eta)).collect()
    }
}

/// Dirichlet data for the three-edge form (AB, BC, AD; the CD edge is free).
#[derive(Clone)]
pub struct ThreeEdgeData<T> {
    pub ab: EdgeFn<T>,
    pub bc: EdgeFn<T>,
    pub ad: EdgeFn<T>,
}

/// Three-edge Dirichlet constrained expression (CD left unconstrained).
pub struct ThreeEdgeForm<T> {
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: ThreeEdgeData<T>,
    /// Corner values `[u_A, u_B]`.
    u_a: T,
    u_b: T,
}

/// Build the three-edge Dirichlet form, validating corner compatibility at
/// the two constrained vertices A and B.
pub fn dirichlet_form_three_edge<T: Scalar>(
    map: DomainMap<T>,
    net: FeatureNet<T>,
    data: ThreeEdgeData<T>,
) -> Result<ThreeEdgeForm<T>> {
    let full = DirichletData {
        ab: data.ab.clone(),
        bc: data.bc.clone(),
        cd: super::zero_edge(),
        ad: data.ad.clone(),
    };
    let corners = full.corner_values(&['A', 'B'])?;
    Ok(ThreeEdgeForm { map, net, data, u_a: corners[0], u_b: corners[1] })
}

impl<T: Scalar> ThreeEdgeForm<T> {
    fn eval_core(
        &self,
        g: &dyn GSource<T>,
        with_data: bool,
        xi: T,
        eta: T,
    ) -> BJet<T> {
        let one = T::one();
        let (p0x, p1x) = phi_jets(xi);
        let (p0y, _) = phi_jets(eta);

        let gb = g.bjet(xi, eta);
        let g_xi_m1 = g.ujet(0, 0, true, xi, -one);
        let g_m1_eta = g.ujet(0, 0, false, -one, eta);
        let g_p1_eta = g.ujet(0, 0, false, one, eta);
        let g_mm = g.partial(0, 0, -one, -one);
        let g_pm = g.partial(0, 0, one, -one);

        let left = g_m1_eta - p0y.scale(g_mm);
        let right = g_p1_eta - p0y.scale(g_pm);
        let mut v = gb - tensor(g_xi_m1, p0y) - tensor(p0x, left) - tensor(p1x, right);

        if with_data {
            let ab = (self.data.ab)(xi);
            let ad = (self.data.ad)(eta);
            let bc = (self.data.bc)(eta);
            let f_left = ad - p0y.scale(self.u_a);
            let f_right = bc - p0y.scale(self.u_b);
            v = v + tensor(ab, p0y) + tensor(p0x, f_left) + tensor(p1x, f_right);
        }
        v
    }
}

impl<T: Scalar> Trial<T> for ThreeEdgeForm<T> {
    fn map(&self) -> &DomainMap<T> {
        &self.map
    }
    fn n_features(&self) -> usize {
        self.net.m
    }
    fn eval(&self, xi: T, eta: T) -> AffineJet<T> {
        let c = self.eval_core(&ZeroG, true, xi, eta);
        let cols = (0..self.net.m)
            .map(|k| self.eval_core(&FeatureG { net: &self.net, k }, false, xi, eta))
            .collect();
        AffineJet { c, cols }
    }
    fn g_features(&self, xi: T, eta: T) -> Vec<T> {
        (0..self.net.m).map(|k| self.net.eval(k, xi, eta)).collect()
    }
}

//! Random-feature (ELM) network supplying the free function `g`.
//!
//! The network has a single hidden layer of width `M` with the Gaussian
//! activation `σ(z) = exp(-z²)`: feature `j` is
//! `φ_j(ξ,η) = σ(w1_j ξ + w2_j η + b_j)`. Hidden coefficients are drawn
//! uniformly from `[-R_m, R_m]` by a seeded portable generator and then
//! frozen; only the output coefficients `β` are ever solved for, and
//! `g = Σ_j β_j φ_j` is linear in `β`.
//!
//! Because the argument `z` is affine in `(ξ,η)`, every mixed partial is a
//! closed form: `∂^i_ξ ∂^j_η φ = w1^i w2^j σ^{(i+j)}(z)`; derivatives up to
//! total order 4 are provided (the trial forms differentiate edge traces of
//! `g` up to that order).

use crate::error::{Error, Result};
use crate::jet::{BJet, UJet};
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Maximum total derivative order provided by [`FeatureNet::partial`].
pub const MAX_TOTAL_DERIV: usize = 4;

/// Fixed random-feature network (hidden layer of an ELM).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct FeatureNet<T> {
    pub m: usize,
    pub r_m: f64,
    pub seed: u64,
    /// Hidden weights `(w1, w2)` per feature.
    pub weights: Vec<(T, T)>,
    /// Hidden biases per feature.
    pub biases: Vec<T>,
}

/// Gaussian activation derivatives `σ^{(k)}(z)` for `k ≤ 4`:
/// `σ = e^{-z²}`, `σ' = -2z σ`, `σ'' = (4z²-2) σ`, `σ''' = (12z-8z³) σ`,
/// `σ'''' = (16z⁴-48z²+12) σ`.
pub fn gaussian_deriv<T: Scalar>(z: T, k: usize) -> T {
    let e = (-z * z).exp();
    let z2 = z * z;
    match k {
        0 => e,
        1 => T::lit(-2.0) * z * e,
        2 => (T::lit(4.0) * z2 - T::lit(2.0)) * e,
        3 => (T::lit(12.0) * z - T::lit(8.0) * z2 * z) * e,
        4 => (T::lit(16.0) * z2 * z2 - T::lit(48.0) * z2 + T::lit(12.0)) * e,
        _ => panic!("activation derivative order {k} not supported (max {MAX_TOTAL_DERIV})"),
    }
}

impl<T: Scalar> FeatureNet<T> {
    /// Draw a fresh network: `M` features with i.i.d. uniform coefficients
    /// on `[-R_m, R_m]`.
    ///
    /// Reproducibility contract: the generator is ChaCha12 seeded with
    /// `seed`, stream 0 for the weights (drawn pairwise, `w1` then `w2`,
    /// feature by feature) and stream 1 for the biases. Each coefficient is
    /// `-R_m + 2 R_m u` with `u` a 53-bit uniform draw in `[0,1)`.
    pub fn init(m: usize, r_m: f64, seed: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidConfig(format!("feature count M={m} must be ≥ 1")));
        }
        if !(r_m > 0.0) {
            return Err(Error::InvalidConfig(format!("coefficient range R_m={r_m} must be > 0")));
        }
        let draw = |stream: u64, count: usize| -> Vec<T> {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            (0..count)
                .map(|_| {
                    let u: f64 = rng.random();
                    T::lit(-r_m + 2.0 * r_m * u)
                })
                .collect()
        };
        let w = draw(0, 2 * m);
        let weights = (0..m).map(|j| (w[2 * j], w[2 * j + 1])).collect();
        let biases = draw(1, m);
        Ok(FeatureNet { m, r_m, seed, weights, biases })
    }

    /// Mixed partial `∂^i_ξ ∂^j_η φ_k` at `(ξ,η)`, for `i + j ≤ 4`.
    pub fn partial(&self, k: usize, i: usize, j: usize, xi: T, eta: T) -> T {
        assert!(i + j <= MAX_TOTAL_DERIV, "feature derivative order {}+{} too high", i, j);
        let (w1, w2) = self.weights[k];
        let z = w1 * xi + w2 * eta + self.biases[k];
        let mut c = gaussian_deriv(z, i + j);
        for _ in 0..i {
            c *= w1;
        }
        for _ in 0..j {
            c *= w2;
        }
        c
    }

    /// Feature value.
    pub fn eval(&self, k: usize, xi: T, eta: T) -> T {
        self.partial(k, 0, 0, xi, eta)
    }

    /// Order-2 bivariate jet of feature `k`.
    pub fn bjet(&self, k: usize, xi: T, eta: T) -> BJet<T> {
        BJet {
            f: self.partial(k, 0, 0, xi, eta),
            fx: self.partial(k, 1, 0, xi, eta),
            fy: self.partial(k, 0, 1, xi, eta),
            fxx: self.partial(k, 2, 0, xi, eta),
            fxy: self.partial(k, 1, 1, xi, eta),
            fyy: self.partial(k, 0, 2, xi, eta),
        }
    }

    /// Order-3 jet of `∂^i_ξ ∂^j_η φ_k` along one standard coordinate:
    /// `along_xi = true` differentiates the jet in ξ at fixed η, otherwise
    /// in η at fixed ξ. Requires `i + j + 3 ≤ 4` … higher slots are exact
    /// because the closed form covers total order 4.
    pub fn ujet(&self, k: usize, i: usize, j: usize, along_xi: bool, xi: T, eta: T) -> UJet<T> {
        let p = |d: usize| {
            if along_xi {
                self.partial(k, i + d, j, xi, eta)
            } else {
                self.partial(k, i, j + d, xi, eta)
            }
        };
        assert!(i + j + 3 <= MAX_TOTAL_DERIV + 0, "ujet base order too high");
        UJet::new(p(0), p(1), p(2), p(3))
    }

    /// `g = Φ·β` and its order-2 jet for a coefficient vector `β`.
    pub fn gjet(&self, beta: &[T], xi: T, eta: T) -> BJet<T> {
        assert_eq!(beta.len(), self.m);
        let mut acc = BJet::zero();
        for k in 0..self.m {
            acc = acc + self.bjet(k, xi, eta).scale(beta[k]);
        }
        acc
    }

    /// Batched feature table: `out[d][p][k]` is derivative `derivs[d]` of
    /// feature `k` at `points[p]`.
    pub fn eval_features(
        &self,
        points: &[(T, T)],
        derivs: &[(usize, usize)],
    ) -> Vec<Vec<Vec<T>>> {
        derivs
            .iter()
            .map(|&(i, j)| {
                points
                    .iter()
                    .map(|&(xi, eta)| (0..self.m).map(|k| self.partial(k, i, j, xi, eta)).collect())
                    .collect()
            })
            .collect()
    }

    /// Serialize the network to JSON for exact replay.
    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(self).expect("feature net serializes")
    }

    /// Restore a network from [`FeatureNet::to_json`] output.
    pub fn from_json(s: &str) -> Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("feature net JSON: {e}")))
    }
}

/// Per-feature edge traces and corner derivatives of the free function, as
/// consumed by the constrained-expression constructions.
#[derive(Debug, Clone)]
pub struct TraceBundle<T> {
    /// Edge sample parameters (shared by all four edge tables).
    pub params: Vec<T>,
    /// `g(ξ_p, -1)`, `g(1, η_p)`, `g(ξ_p, 1)`, `g(-1, η_p)` per `[edge][p][k]`
    /// in edge order AB, BC, CD, AD.
    pub edge_values: [Vec<Vec<T>>; 4],
    /// Normal-ish edge derivatives: `g_ξ(1,η_p)` and `g_η(ξ_p,1)` per `[p][k]`.
    pub gxi_bc: Vec<Vec<T>>,
    pub geta_cd: Vec<Vec<T>>,
    /// Tangential edge derivatives: `g_η(1,η_p)` and `g_ξ(ξ_p,1)` per `[p][k]`.
    pub geta_bc: Vec<Vec<T>>,
    pub gxi_cd: Vec<Vec<T>>,
    /// Corner derivative sets at A, B, C, D: `(g, g_ξ, g_η, g_ξξ, g_ηη, g_ξη)`
    /// per `[corner][k]`.
    pub corners: [Vec<[T; 6]>; 4],
}

impl<T: Scalar> FeatureNet<T> {
    /// Collect every `g`-dependent quantity the trial forms consume, per
    /// feature, at the given edge parameters.
    pub fn trace_bundle(&self, params: &[T]) -> TraceBundle<T> {
        let one = T::one();
        let table = |i: usize, j: usize, f: &dyn Fn(T) -> (T, T)| -> Vec<Vec<T>> {
            params
                .iter()
                .map(|&s| {
                    let (xi, eta) = f(s);
                    (0..self.m).map(|k| self.partial(k, i, j, xi, eta)).collect()
                })
                .collect()
        };
        let ab = |s: T| (s, -one);
        let bc = |s: T| (one, s);
        let cd = |s: T| (s, one);
        let ad = |s: T| (-one, s);
        let corner = |xi: T, eta: T| -> Vec<[T; 6]> {
            (0..self.m)
                .map(|k| {
                    let b = self.bjet(k, xi, eta);
                    [b.f, b.fx, b.fy, b.fxx, b.fyy, b.fxy]
                })
                .collect()
        };
        TraceBundle {
            params: params.to_vec(),
            edge_values: [
                table(0, 0, &ab),
                table(0, 0, &bc),
                table(0, 0, &cd),
                table(0, 0, &ad),
            ],
            gxi_bc: table(1, 0, &bc),
            geta_cd: table(0, 1, &cd),
            geta_bc: table(0, 1, &bc),
            gxi_cd: table(1, 0, &cd),
            corners: [
                corner(-one, -one),
                corner(one, -one),
                corner(one, one),
                corner(-one, one),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manual_net(weights: Vec<(f64, f64)>, biases: Vec<f64>) -> FeatureNet<f64> {
        let m = weights.len();
        FeatureNet { m, r_m: 1.0, seed: 0, weights, biases }
    }

    #[test]
    fn init_is_deterministic() {
        let a = FeatureNet::<f64>::init(4, 1.0, 42).unwrap();
        let b = FeatureNet::<f64>::init(4, 1.0, 42).unwrap();
        assert_eq!(a, b);
        let c = FeatureNet::<f64>::init(4, 1.0, 43).unwrap();
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn init_range_and_mean() {
        let n = FeatureNet::<f64>::init(50_000, 2.5, 7).unwrap();
        let mut sum = 0.0f64;
        let mut count = 0.0f64;
        for (&b, &(w1, w2)) in n.biases.iter().zip(&n.weights) {
            for v in [b, w1, w2] {
                assert!(v.abs() <= 2.5);
                sum += v;
                count += 1.0;
            }
        }
        // Uniform on [-R, R]: sd of the mean is R/sqrt(3N).
        let three_sigma = 3.0 * 2.5 / (3.0 * count).sqrt();
        assert!((sum / count).abs() < three_sigma, "mean {} vs 3σ {}", sum / count, three_sigma);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(FeatureNet::<f64>::init(0, 1.0, 1).is_err());
        assert!(FeatureNet::<f64>::init(3, 0.0, 1).is_err());
        assert!(FeatureNet::<f64>::init(3, -2.0, 1).is_err());
    }

    #[test]
    fn constant_feature() {
        let n = manual_net(vec![(0.0, 0.0)], vec![0.0]);
        for (xi, eta) in [(0.0, 0.0), (0.7, -0.3), (-1.0, 1.0)] {
            assert_eq!(n.eval(0, xi, eta), 1.0);
            for (i, j) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 2)] {
                assert_eq!(n.partial(0, i, j, xi, eta), 0.0);
            }
        }
    }

    #[test]
    fn hand_evaluated_second_derivative() {
        // w=(1,0), b=0 at ξ=0: φ=1, φ_ξ=0, φ_ξξ = σ''(0) = -2.
        let n = manual_net(vec![(1.0, 0.0)], vec![0.0]);
        assert_eq!(n.eval(0, 0.0, 0.5), 1.0);
        assert_eq!(n.partial(0, 1, 0, 0.0, 0.5), 0.0);
        assert_eq!(n.partial(0, 2, 0, 0.0, 0.5), -2.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let n = FeatureNet::<f64>::init(6, 3.0, 11).unwrap();
        let h = 1e-5;
        let mut state = 99u64;
        let mut rng = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..100 {
            let (xi, eta) = (rng(), rng());
            for k in 0..n.m {
                for (i, j) in [
                    (1, 0),
                    (0, 1),
                    (2, 0),
                    (1, 1),
                    (0, 2),
                    (3, 0),
                    (0, 3),
                    (2, 1),
                    (1, 2),
                    (3, 1),
                    (1, 3),
                    (2, 2),
                    (4, 0),
                    (0, 4),
                ] {
                    let an = n.partial(k, i, j, xi, eta);
                    let (fi, fj, dx, dy) = if i > 0 { (i - 1, j, h, 0.0) } else { (i, j - 1, 0.0, h) };
                    let fd = (n.partial(k, fi, fj, xi + dx, eta + dy)
                        - n.partial(k, fi, fj, xi - dx, eta - dy))
                        / (2.0 * h);
                    assert!(
                        (an - fd).abs() <= 1e-6 * (1.0 + an.abs()),
                        "feature {k} d({i},{j}) at ({xi},{eta}): {an} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn g_is_linear_in_beta() {
        let n = FeatureNet::<f64>::init(8, 2.0, 5).unwrap();
        let beta: Vec<f64> = (0..8).map(|k| 0.3 * k as f64 - 1.0).collect();
        let (xi, eta) = (0.4, -0.6);
        let g = n.gjet(&beta, xi, eta);
        let direct: f64 = (0..8).map(|k| beta[k] * n.eval(k, xi, eta)).sum();
        assert!((g.f - direct).abs() < 1e-14);
        let dxi: f64 = (0..8).map(|k| beta[k] * n.partial(k, 1, 0, xi, eta)).sum();
        assert!((g.fx - dxi).abs() < 1e-14);
    }

    #[test]
    fn eval_features_shapes() {
        let n = FeatureNet::<f64>::init(5, 1.0, 3).unwrap();
        let pts = [(0.0, 0.0), (0.5, -0.5), (1.0, 1.0)];
        let t = n.eval_features(&pts, &[(0, 0), (1, 0), (0, 2)]);
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].len(), 3);
        assert_eq!(t[0][0].len(), 5);
        assert_eq!(t[0][1][2], n.eval(2, 0.5, -0.5));
        assert_eq!(t[2][2][4], n.partial(4, 0, 2, 1.0, 1.0));
    }

    #[test]
    fn trace_bundle_contents() {
        let n = FeatureNet::<f64>::init(3, 2.0, 21).unwrap();
        let params = vec![-1.0, -0.25, 0.5, 1.0];
        let tb = n.trace_bundle(&params);
        assert_eq!(tb.edge_values[0].len(), 4);
        assert_eq!(tb.edge_values[0][0].len(), 3);
        // AB trace at ξ=0.5 equals direct evaluation at (0.5,-1).
        assert_eq!(tb.edge_values[0][2][1], n.eval(1, 0.5, -1.0));
        // BC normal derivative table is g_ξ(1,η).
        assert_eq!(tb.gxi_bc[1][0], n.partial(0, 1, 0, 1.0, -0.25));
        // Corner C mixed derivative vs FD cross-difference.
        let h = 1e-5;
        let fd = (n.eval(2, 1.0 + h, 1.0 + h) - n.eval(2, 1.0 + h, 1.0 - h)
            - n.eval(2, 1.0 - h, 1.0 + h)
            + n.eval(2, 1.0 - h, 1.0 - h))
            / (4.0 * h * h);
        let an = tb.corners[2][2][5];
        assert!((an - fd).abs() <= 1e-6 * (1.0 + an.abs()));
        // Constant feature: traces 1, corner second derivatives 0.
        let c = manual_net(vec![(0.0, 0.0)], vec![0.0]);
        let tb = c.trace_bundle(&params);
        assert!(tb.edge_values.iter().all(|e| e.iter().all(|p| p[0] == 1.0)));
        assert!(tb.corners.iter().all(|c| c[0][3] == 0.0 && c[0][4] == 0.0 && c[0][5] == 0.0));
    }

    #[test]
    fn ujet_matches_partials() {
        let n = FeatureNet::<f64>::init(2, 1.5, 9).unwrap();
        let j = n.ujet(0, 1, 0, false, 1.0, 0.3); // η-jet of g_ξ(1,η)
        assert_eq!(j.f, n.partial(0, 1, 0, 1.0, 0.3));
        assert_eq!(j.d1, n.partial(0, 1, 1, 1.0, 0.3));
        assert_eq!(j.d3, n.partial(0, 1, 3, 1.0, 0.3));
    }

    #[test]
    fn json_roundtrip() {
        let n = FeatureNet::<f64>::init(7, 3.3, 123).unwrap();
        let s = n.to_json();
        let back = FeatureNet::<f64>::from_json(&s).unwrap();
        assert_eq!(n, back);
        assert!(FeatureNet::<f64>::from_json("{broken").is_err());
    }
}

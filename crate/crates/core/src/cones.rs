//! The cone `K_S` of symmetric matrices that are positive semidefinite with
//! respect to a subspace `S`, and membership tests for its polar
//! `K_S° = {W : W = PWP ⪯ 0}`, interior, affine hull and relative interior.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{
    lambda_max, psd_on_subspace, range_inclusion, symmetrize, Definiteness, Mat, SubspaceBasis,
    ToleranceConfig,
};

/// `K_S = {V ∈ S^n : u^T V u >= 0 for all u ∈ S}` together with the
/// tolerances used to decide membership.
#[derive(Debug, Clone)]
pub struct ConeContext {
    subspace: SubspaceBasis,
    tol: ToleranceConfig,
}

impl ConeContext {
    pub fn new(subspace: SubspaceBasis, tol: ToleranceConfig) -> Self {
        Self { subspace, tol }
    }

    pub fn subspace(&self) -> &SubspaceBasis {
        &self.subspace
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// `V ∈ K_S`.
    pub fn in_cone(&self, v: &Mat) -> bool {
        psd_on_subspace(v, &self.subspace, Definiteness::Semi, &self.tol)
    }

    /// `V ∈ int K_S`, i.e. the quadratic form is positive on `S ∖ {0}`.
    pub fn in_int_cone(&self, v: &Mat) -> bool {
        psd_on_subspace(v, &self.subspace, Definiteness::Strict, &self.tol)
    }

    /// `W ∈ K_S°`: `W = PWP` and `W ⪯ 0`.
    pub fn in_polar_cone(&self, w: &Mat) -> bool {
        let w = symmetrize(w);
        let p = self.subspace.projector();
        let leak = (&w - p * &w * p).norm();
        if leak > self.tol.eq_tol * w.norm().max(1.0) {
            return false;
        }
        lambda_max(&w).is_none_or(|l| l <= self.tol.psd_slack(&w))
    }

    /// `W ∈ aff K_S° = span{vv^T : v ∈ S}`, i.e. `rge W ⊂ S`.
    pub fn in_aff_polar(&self, w: &Mat) -> bool {
        range_inclusion(&symmetrize(w), self.subspace.projector(), &self.tol)
    }

    /// `W ∈ rint K_S°`. For `S = {0}` the relative interior is `{0}`;
    /// otherwise the form must be strictly negative on `S ∖ {0}`.
    pub fn in_rint_polar(&self, w: &Mat) -> bool {
        if self.subspace.is_trivial() {
            return w.norm() <= self.tol.eq_tol;
        }
        if !self.in_polar_cone(w) {
            return false;
        }
        let w = symmetrize(w);
        let top = lambda_max(&self.subspace.compress(&w)).expect("k >= 1");
        top < -self.tol.psd_slack(&w)
    }

    /// Draws `count` elements `W = −Σ λ_i v_i v_i^T` of the polar cone, with
    /// `λ_i = |N(0,1)|` and `v_i = Q g_i`, `g_i ∼ N(0, I_k)`.
    ///
    /// Each sample uses a random number of generators in `1..=k+1`, so both
    /// rank-deficient and full-rank elements appear. When `S = {0}` every
    /// sample is the zero matrix.
    pub fn sample_polar(&self, count: usize, seed: u64) -> Vec<Mat> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.draw_polar(&mut rng)).collect()
    }

    pub(crate) fn draw_polar<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let n = self.subspace.ambient_dim();
        let k = self.subspace.dim();
        let mut w = Mat::zeros(n, n);
        if k == 0 {
            return w;
        }
        let generators = rng.gen_range(1..=k + 1);
        for _ in 0..generators {
            let weight: f64 = rng.sample::<f64, _>(StandardNormal).abs();
            let g = Mat::from_fn(k, 1, |_, _| rng.sample(StandardNormal));
            let v = self.subspace.basis() * g;
            w -= weight * &v * v.transpose();
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::kernel_basis;

    fn m(rows: usize, cols: usize, data: &[f64]) -> Mat {
        Mat::from_row_slice(rows, cols, data)
    }

    /// K_{ker A} for A = [1, 0], i.e. S = span{e2}.
    fn f1() -> ConeContext {
        let tol = ToleranceConfig::default();
        ConeContext::new(kernel_basis(&m(1, 2, &[1.0, 0.0]), &tol), tol)
    }

    fn trivial() -> ConeContext {
        ConeContext::new(SubspaceBasis::trivial(2), ToleranceConfig::default())
    }

    #[test]
    fn cone_membership() {
        let random = m(2, 2, &[-3.0, 7.0, 7.0, -9.0]);
        assert!(trivial().in_cone(&random));
        assert!(f1().in_cone(&m(2, 2, &[-7.0, 0.0, 0.0, 0.0])));
        assert!(!f1().in_cone(&m(2, 2, &[0.0, 0.0, 0.0, -1e-3])));
    }

    #[test]
    fn interior_membership() {
        assert!(f1().in_int_cone(&Mat::identity(2, 2)));
        assert!(f1().in_int_cone(&m(2, 2, &[-1.0, 0.0, 0.0, 1.0])));
        assert!(!f1().in_int_cone(&m(2, 2, &[1.0, 0.0, 0.0, 0.0])));
    }

    #[test]
    fn polar_membership() {
        assert!(f1().in_polar_cone(&Mat::zeros(2, 2)));
        assert!(f1().in_polar_cone(&m(2, 2, &[0.0, 0.0, 0.0, -3.0])));
        assert!(!f1().in_polar_cone(&m(2, 2, &[-1.0, 0.0, 0.0, -1.0])));
        assert!(!f1().in_polar_cone(&m(2, 2, &[0.0, 0.0, 0.0, 3.0])));
    }

    #[test]
    fn affine_hull_of_polar() {
        assert!(f1().in_aff_polar(&Mat::zeros(2, 2)));
        assert!(f1().in_aff_polar(&m(2, 2, &[0.0, 0.0, 0.0, 5.0])));
        assert!(!f1().in_aff_polar(&m(2, 2, &[1.0, 0.0, 0.0, 0.0])));
    }

    #[test]
    fn relative_interior_of_polar() {
        assert!(f1().in_rint_polar(&m(2, 2, &[0.0, 0.0, 0.0, -1.0])));
        assert!(!f1().in_rint_polar(&Mat::zeros(2, 2)));
        assert!(trivial().in_rint_polar(&Mat::zeros(2, 2)));
        assert!(!trivial().in_rint_polar(&m(2, 2, &[0.0, 0.0, 0.0, -1.0])));
    }

    #[test]
    fn sampler_on_trivial_subspace_returns_zero() {
        for w in trivial().sample_polar(10, 3) {
            assert_eq!(w, Mat::zeros(2, 2));
        }
    }

    #[test]
    fn sampler_on_line_is_multiple_of_generator() {
        for w in f1().sample_polar(50, 11) {
            assert_eq!(w[(0, 0)], 0.0);
            assert_eq!(w[(0, 1)], 0.0);
            assert!(w[(1, 1)] <= 0.0);
        }
    }

    #[test]
    fn samples_are_polar_members() {
        let tol = ToleranceConfig::default();
        let a = m(2, 4, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 1.0, 3.0]);
        let ctx = ConeContext::new(kernel_basis(&a, &tol), tol);
        let samples = ctx.sample_polar(1000, 5);
        assert!(samples.iter().all(|w| ctx.in_polar_cone(w)));
        assert!(samples.iter().all(|w| ctx.in_aff_polar(w)));
    }

    #[test]
    fn sampler_is_deterministic() {
        assert_eq!(f1().sample_polar(5, 9), f1().sample_polar(5, 9));
    }
}

use gmf_core::matcore::{
    kernel_basis, pinv, psd_on_subspace, range_inclusion, svd, Definiteness, Mat, SubspaceBasis,
    ToleranceConfig,
};
use gmf_core::oracle::{gaussian, gaussian_psd, gaussian_symmetric, substream};
use proptest::prelude::*;
use rand::Rng;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn penrose_identities_on_random_symmetric_matrices() {
    let t = tol();
    let mut rng = substream(11, 0);
    for i in 0..500 {
        let n = 1 + i % 8;
        // Mix full-rank and rank-deficient inputs.
        let m = if i % 3 == 0 {
            let r = rng.gen_range(0..=n);
            gaussian_psd(&mut rng, n, r, 1.0) - gaussian_psd(&mut rng, n, n - r, 0.5)
        } else if i % 3 == 1 {
            let cols = rng.gen_range(1..=n);
            let g = gaussian(&mut rng, n, cols, 1.0);
            &g * g.transpose() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            gaussian_symmetric(&mut rng, n, 1.0)
        };
        let p = pinv(&m, &t).unwrap();
        let bound = t.eq_tol * m.norm().max(1.0);
        let mp = &m * &p;
        let pm = &p * &m;
        assert!((&mp * &m - &m).norm() <= bound, "M M+ M = M fails at {i}");
        assert!(
            (&pm * &p - &p).norm() <= t.eq_tol * p.norm().max(1.0),
            "M+ M M+ = M+ fails at {i}"
        );
        assert!(
            (&mp - mp.transpose()).norm() <= bound,
            "M M+ symmetric fails at {i}"
        );
        assert!(
            (&pm - pm.transpose()).norm() <= bound,
            "M+ M symmetric fails at {i}"
        );
    }
}

#[test]
fn range_inclusion_is_monotone_in_m() {
    let t = tol();
    let mut rng = substream(12, 0);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let r = rng.gen_range(1..n);
        let g = gaussian(&mut rng, n, r, 1.0);
        let m = &g * g.transpose();
        let inside = &m * gaussian(&mut rng, n, 2, 1.0);
        assert!(range_inclusion(&inside, &m, &t));
        // Padding M with a direction q ⊥ rge M keeps the inclusion true.
        let complement = kernel_basis(&g.transpose(), &t);
        let q = complement.basis().column(0).into_owned();
        let padded = &m + &q * q.transpose();
        assert!(range_inclusion(&inside, &padded, &t));
        // q itself is outside rge M but inside rge of the padded matrix.
        let q = Mat::from_column_slice(n, 1, q.as_slice());
        assert!(!range_inclusion(&q, &m, &t));
        assert!(range_inclusion(&q, &padded, &t));
    }
}

#[test]
fn svd_reconstructs() {
    let mut rng = substream(13, 0);
    for _ in 0..200 {
        let (r, c) = (rng.gen_range(0..=7), rng.gen_range(0..=7));
        let a = gaussian(&mut rng, r, c, 1.0);
        let dec = svd(&a).unwrap();
        let k = r.min(c);
        let sigma = Mat::from_fn(r, c, |i, j| {
            if i == j && i < k {
                dec.singular_values[i]
            } else {
                0.0
            }
        });
        assert!((&dec.u * sigma * dec.v.transpose() - &a).norm() <= 1e-12 * a.norm().max(1.0));
        assert!(dec.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_basis_spans_the_kernel(seed in any::<u64>(), p in 0usize..6, n in 1usize..7, deficient in any::<bool>()) {
        let t = tol();
        let mut rng = substream(seed, 0);
        let a = if deficient && p >= 2 {
            gaussian(&mut rng, p, 1, 1.0) * gaussian(&mut rng, 1, n, 1.0)
        } else {
            gaussian(&mut rng, p, n, 1.0)
        };
        let k = kernel_basis(&a, &t);
        prop_assert!((&a * k.basis()).norm() <= t.feas_tol * a.norm().max(1.0));
        let rank_a = svd(&a).unwrap().rank(&t);
        prop_assert_eq!(k.dim() + rank_a, n);
        let q = k.basis();
        prop_assert!((q.transpose() * q - Mat::identity(k.dim(), k.dim())).norm() <= t.eq_tol);
    }

    #[test]
    fn strict_psd_implies_semidefinite(seed in any::<u64>(), n in 1usize..7, shift in -2.0f64..2.0) {
        let t = tol();
        let mut rng = substream(seed, 0);
        let v = gaussian_symmetric(&mut rng, n, 1.0) + Mat::identity(n, n) * shift;
        let k = rng.gen_range(0..=n);
        let s = if k == 0 {
            SubspaceBasis::trivial(n)
        } else {
            SubspaceBasis::from_orthonormal(gaussian(&mut rng, n, k, 1.0).qr().q())
        };
        if psd_on_subspace(&v, &s, Definiteness::Strict, &t) {
            prop_assert!(psd_on_subspace(&v, &s, Definiteness::Semi, &t));
        }
    }
}

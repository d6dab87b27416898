use gmf_core::gmf::eval_support;
use gmf_core::matcore::{Mat, ToleranceConfig};
use gmf_core::omega::{
    caratheodory_witness, in_aff_omega, in_horizon_omega_polar, in_omega, in_omega_polar,
    in_rint_omega,
};
use gmf_core::oracle::{
    convexity_fuzz, gaussian, gaussian_symmetric, sample_feasible, sample_omega, substream,
    FeasibleManifold, SampleConfig,
};
use gmf_core::points::{DualPoint, PrimalPoint};
use gmf_core::verify::{random_pair, sample_in_domain};
use rand::Rng;

#[test]
fn omega_is_convex() {
    let mut rng = substream(41, 0);
    let mut pairs = 0;
    for _ in 0..10 {
        let homogeneous = rng.gen_bool(0.5);
        let cp = random_pair(&mut rng, homogeneous, false);
        let manifold = FeasibleManifold::new(&cp);
        let report = convexity_fuzz(
            |pt: &PrimalPoint| in_omega(pt, &cp),
            |r| sample_omega(&manifold, r, 1.0),
            &SampleConfig::new(100, rng.gen()),
        );
        assert_eq!(report.failures, 0);
        pairs += report.pairs;
    }
    assert_eq!(pairs, 1000);
}

#[test]
fn hull_sandwich() {
    let mut rng = substream(42, 0);
    for _ in 0..30 {
        let homogeneous = rng.gen_bool(0.5);
        let cp = random_pair(&mut rng, homogeneous, false);
        for y in sample_feasible(&cp, &SampleConfig::new(20, rng.gen())) {
            assert!(in_omega(&PrimalPoint::on_graph(y), &cp));
        }
        let manifold = FeasibleManifold::new(&cp);
        let pt = sample_omega(&manifold, &mut rng, 1.0);
        for eps in [0.5, 1e-2, 1e-5] {
            let seed = if rng.gen_bool(0.5) {
                Some(rng.gen())
            } else {
                None
            };
            let witness = caratheodory_witness(&pt, &cp, eps, seed).unwrap();
            witness.validate(&cp).unwrap();
            assert!(in_omega(&witness.induced_point(), &cp));
        }
    }
}

#[test]
fn recession_directions_keep_membership() {
    let mut rng = substream(43, 0);
    for _ in 0..50 {
        let homogeneous = rng.gen_bool(0.5);
        let cp = random_pair(&mut rng, homogeneous, false);
        let manifold = FeasibleManifold::new(&cp);
        for dir in cp.cone().sample_polar(10, rng.gen()) {
            let pt = sample_omega(&manifold, &mut rng, 1.0);
            for t in [1.0, 1e3, 1e6] {
                let moved = PrimalPoint::new(pt.y.clone(), &pt.w + &dir * t).unwrap();
                assert!(in_omega(&moved, &cp));
            }
        }
    }
}

/// A unit direction `(ΔY, ΔW)` parallel to `aff Ω`: `AΔY = 0` and
/// `ΔW = QSQ^T − ½(Z₀ΔY^T + ΔY Z₀^T)`, where `Z₀ ⊥ ker A` is the
/// minimum-norm solution. The correction cancels the part of the gap change
/// `½(YΔY^T + ΔY Y^T)` that leaves `ker A`.
fn aff_direction(
    rng: &mut rand_chacha::ChaCha8Rng,
    manifold: &FeasibleManifold,
    q: &Mat,
) -> (Mat, Mat) {
    let (n, m) = manifold.offset.shape();
    let z0 = &manifold.offset;
    let dy = &manifold.kernel_projector * gaussian(rng, n, m, 1.0);
    let dw = q * gaussian_symmetric(rng, q.ncols(), 1.0) * q.transpose()
        - (z0 * dy.transpose() + &dy * z0.transpose()) * 0.5;
    let norm = (dy.norm_squared() + dw.norm_squared())
        .sqrt()
        .max(f64::MIN_POSITIVE);
    (dy / norm, dw / norm)
}

#[test]
fn relative_interior_is_stable_and_boundary_is_not_interior() {
    let mut rng = substream(44, 0);
    for _ in 0..30 {
        let homogeneous = rng.gen_bool(0.5);
        let cp = random_pair(&mut rng, homogeneous, false);
        let manifold = FeasibleManifold::new(&cp);
        let q = cp.kernel().basis().clone();
        let y = manifold.sample(&mut rng, 1.0);
        let strict = -(&q * q.transpose());
        let center =
            PrimalPoint::new(y.clone(), &PrimalPoint::on_graph(y.clone()).w + &strict).unwrap();
        assert!(in_rint_omega(&center, &cp));
        assert!(in_omega(&center, &cp));

        let directions: Vec<(Mat, Mat)> = (0..20)
            .map(|_| aff_direction(&mut rng, &manifold, &q))
            .collect();
        let mut delta = 1.0;
        let stable = |d: f64| {
            directions.iter().all(|(dy, dw)| {
                let moved = PrimalPoint::new(&center.y + dy * d, &center.w + dw * d).unwrap();
                in_omega(&moved, &cp) && in_aff_omega(&moved, &cp)
            })
        };
        while !stable(delta) {
            delta *= 0.5;
            assert!(
                delta > 1e-12,
                "no stable radius around a relative interior point"
            );
        }

        // The form vanishes on u = q_0 ∈ ker A: a boundary point.
        let u = q.column(0).into_owned();
        let boundary = PrimalPoint::new(center.y.clone(), &center.w + &u * u.transpose()).unwrap();
        assert!(in_omega(&boundary, &cp));
        assert!(!in_rint_omega(&boundary, &cp));
    }
}

#[test]
fn bipolar_pairing_is_bounded_by_one() {
    let mut rng = substream(45, 0);
    let mut checked = 0;
    while checked < 1000 {
        let homogeneous = rng.gen_bool(0.5);
        let cp = random_pair(&mut rng, homogeneous, false);
        let manifold = FeasibleManifold::new(&cp);
        let definite = rng.gen_bool(0.5);
        let dual = sample_in_domain(&mut rng, &cp, &manifold, definite);
        let Some(sigma) = eval_support(&dual, &cp).value.finite() else {
            continue;
        };
        // σ at round-off level carries no sign information.
        if sigma <= 1e-6 {
            continue;
        }
        // Rescale when B = 0 so that σ = 1; otherwise keep members only.
        let polar = if cp.is_homogeneous() {
            dual.scaled(1.0 / sigma)
        } else {
            dual
        };
        if !in_omega_polar(&polar, &cp) {
            continue;
        }
        for _ in 0..20 {
            let omega = sample_omega(&manifold, &mut rng, 1.0);
            let ip = polar.pair(&omega);
            assert!(ip <= 1.0 + cp.tol().eq_tol * ip.abs().max(1.0));
            checked += 1;
        }
    }
}

#[test]
fn horizon_of_polar_is_a_cone() {
    let mut rng = substream(46, 0);
    for _ in 0..100 {
        let homogeneous = rng.gen_bool(0.5);
        let cp = random_pair(&mut rng, homogeneous, false);
        let manifold = FeasibleManifold::new(&cp);
        let dual = sample_in_domain(&mut rng, &cp, &manifold, false);
        if in_horizon_omega_polar(&dual, &cp) {
            for t in [2.0, 10.0] {
                assert!(in_horizon_omega_polar(&dual.scaled(t), &cp));
            }
        }
        // (0, −V) for V ∈ K_A: σ = 0 when B = 0 and ≤ 0 in general.
        let v = gmf_core::verify::sample_kernel_cone(&mut rng, &cp, false);
        let neg = DualPoint::new(Mat::zeros(cp.n(), cp.m()), v).unwrap();
        if cp.is_homogeneous() {
            assert!(in_horizon_omega_polar(&neg, &cp));
        }
    }
}

#[test]
fn witness_distance_shrinks() {
    let cp = gmf_core::gmf::ConstraintPair::new(
        Mat::from_row_slice(1, 2, &[1.0, 0.0]),
        Mat::zeros(1, 1),
        ToleranceConfig::default(),
    )
    .unwrap();
    let pt = PrimalPoint::new(
        Mat::from_row_slice(2, 1, &[0.0, 1.0]),
        Mat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]),
    )
    .unwrap();
    let d: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| {
            caratheodory_witness(&pt, &cp, e, None)
                .unwrap()
                .distance_to(&pt)
        })
        .collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]));
    assert!(d[3] < 1e-1);
}

//! Brute-force verifiers for the closed forms.
//!
//! Nothing here calls the closed-form operations under test. The feasible
//! manifold `{AY = B}` is rebuilt from a direct SVD pseudoinverse, and
//! any membership predicate an oracle exercises is passed in explicitly by
//! the caller.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::extended::ExtendedReal;
use crate::gmf::ConstraintPair;
use crate::matcore::Mat;
use crate::points::{Combine, DualPoint, PrimalPoint};

/// Sample count, seed and entry scale for a sampling oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub count: usize,
    pub rng_seed: u64,
    /// Standard deviation of the normal entries.
    pub scale: f64,
}

impl SampleConfig {
    pub fn new(count: usize, rng_seed: u64) -> Self {
        Self {
            count: count.max(1),
            rng_seed,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed)
    }
}

/// An independent random stream derived from `seed` for batch `index`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        scale * rng.sample::<f64, _>(StandardNormal)
    })
}

pub fn gaussian_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Mat {
    let g = gaussian(rng, n, n, scale);
    (&g + g.transpose()) * 0.5
}

/// `G G^T` with `G` of size `n × rank`.
pub fn gaussian_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize, scale: f64) -> Mat {
    let g = gaussian(rng, n, rank, scale);
    &g * g.transpose()
}

/// The affine manifold `{Y : AY = B} = Y₀ + (I − A⁺A) R^{n×m}`.
#[derive(Debug, Clone)]
pub struct FeasibleManifold {
    pub offset: Mat,
    pub kernel_projector: Mat,
}

impl FeasibleManifold {
    pub fn new(cp: &ConstraintPair) -> Self {
        let (a, b) = (cp.a(), cp.b());
        let n = cp.n();
        if a.nrows() == 0 {
            return Self {
                offset: Mat::zeros(n, cp.m()),
                kernel_projector: Mat::identity(n, n),
            };
        }
        // Least-squares pseudoinverse from faer's SVD, computed here rather
        // than through the library's own helpers.
        let dec = faer::Mat::from_fn(a.nrows(), n, |i, j| a[(i, j)])
            .thin_svd()
            .expect("SVD of a finite matrix");
        let sigma = dec.S().column_vector();
        let largest = (0..sigma.nrows()).fold(0.0_f64, |acc, i| acc.max(sigma[i]));
        let (u, v) = (dec.U(), dec.V());
        let mut a_plus = Mat::zeros(n, a.nrows());
        for k in (0..sigma.nrows()).filter(|&k| sigma[k] > 1e-10 * largest) {
            a_plus += Mat::from_fn(n, a.nrows(), |i, j| v[(i, k)] * u[(j, k)] / sigma[k]);
        }
        Self {
            offset: &a_plus * b,
            kernel_projector: Mat::identity(n, n) - &a_plus * a,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Mat {
        let (n, m) = self.offset.shape();
        &self.offset + &self.kernel_projector * gaussian(rng, n, m, scale)
    }

    /// A random element `−Σ λ_i v_i v_i^T` of `K_A°` with `v_i ∈ ker A`.
    pub fn polar_direction<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Mat {
        let n = self.offset.nrows();
        let generators = rng.gen_range(1..=n.max(1));
        let mut t = Mat::zeros(n, n);
        for _ in 0..generators {
            let v = &self.kernel_projector * gaussian(rng, n, 1, 1.0);
            let weight = scale * rng.sample::<f64, _>(StandardNormal).abs();
            t -= weight * &v * v.transpose();
        }
        t
    }
}

/// Draws `sc.count` matrices `Y` with `AY = B`: `Y = Y₀ + Π G`, `Y₀` the
/// minimum-norm solution and `Π` the projector onto `ker A`.
pub fn sample_feasible(cp: &ConstraintPair, sc: &SampleConfig) -> Vec<Mat> {
    let manifold = FeasibleManifold::new(cp);
    let mut rng = sc.rng();
    (0..sc.count)
        .map(|_| manifold.sample(&mut rng, sc.scale))
        .collect()
}

/// Points of `Ω(A, B)` built by hand: graph points `(Y, −½YY^T)` shifted by
/// random elements of `K_A°` (about two thirds of the draws).
pub fn sample_omega<R: Rng + ?Sized>(
    manifold: &FeasibleManifold,
    rng: &mut R,
    scale: f64,
) -> PrimalPoint {
    let mut pt = PrimalPoint::on_graph(manifold.sample(rng, scale));
    if rng.gen_bool(2.0 / 3.0) {
        pt.w += manifold.polar_direction(rng, scale * scale);
    }
    pt
}

/// `max_Y ⟨X, Y⟩ − ½⟨V, YY^T⟩` over sampled feasible `Y`: a certified lower
/// bound on `σ_D(X, V)`.
///
/// With `center`, its projection onto `{AY = B}` is a candidate too, and half
/// of the samples are Gaussian perturbations of it inside `{AY = B}` at scales
/// spread over `sc.scale · [1e-4, 1]`, which sharpens the bound near a
/// maximizer.
pub fn support_lower_bound(
    dual: &DualPoint,
    cp: &ConstraintPair,
    sc: &SampleConfig,
    center: Option<&Mat>,
) -> f64 {
    let manifold = FeasibleManifold::new(cp);
    let mut rng = sc.rng();
    let objective = |y: &Mat| dual.x.dot(y) - 0.5 * (y.transpose() * &dual.v * y).trace();
    let local = center.map(|c| {
        let (n, m) = c.shape();
        let projected = &manifold.offset + &manifold.kernel_projector * (c - &manifold.offset);
        (projected, n, m)
    });
    let mut best = local
        .as_ref()
        .map_or(f64::NEG_INFINITY, |(c, _, _)| objective(c));
    for i in 0..sc.count {
        let y = match &local {
            Some((c, n, m)) if i % 2 == 1 => {
                let step = sc.scale * 10f64.powf(-4.0 * rng.gen::<f64>());
                c + &manifold.kernel_projector * gaussian(&mut rng, *n, *m, step)
            }
            _ => manifold.sample(&mut rng, sc.scale),
        };
        best = best.max(objective(&y));
    }
    best
}

/// `inf{t >= 0 : member(t)}` for an upward-closed membership set.
///
/// Brackets by doubling from `t = 1` until `member` holds (giving up with
/// `+∞` past `1e12`), then runs 100 bisection steps. `member` is never
/// queried at `t = 0`.
pub fn gauge_bisection<F: FnMut(f64) -> bool>(mut member: F) -> ExtendedReal {
    const LIMIT: f64 = 1e12;
    let mut hi = 1.0;
    while !member(hi) {
        hi *= 2.0;
        if hi > LIMIT {
            return ExtendedReal::PosInfinity;
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    ExtendedReal::Finite(hi)
}

/// Outcome of [`convexity_fuzz`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    /// Member pairs whose combination was tested.
    pub pairs: usize,
    /// Combinations that failed the membership predicate.
    pub failures: usize,
    /// Sampler draws rejected by the predicate.
    pub rejected: usize,
}

/// Tests `member((1 − λ) a + λ b)` for `sc.count` pairs of sampled members
/// `a, b` and `λ ∼ U(0, 1)`.
pub fn convexity_fuzz<P, M, S>(member: M, mut sampler: S, sc: &SampleConfig) -> FuzzReport
where
    P: Combine,
    M: Fn(&P) -> bool,
    S: FnMut(&mut ChaCha8Rng) -> P,
{
    let mut rng = sc.rng();
    let mut report = FuzzReport {
        pairs: 0,
        failures: 0,
        rejected: 0,
    };
    let budget = 50 * sc.count;
    let mut draw = |rng: &mut ChaCha8Rng, report: &mut FuzzReport| -> Option<P> {
        loop {
            if report.rejected > budget {
                return None;
            }
            let p = sampler(rng);
            if member(&p) {
                return Some(p);
            }
            report.rejected += 1;
        }
    };
    for _ in 0..sc.count {
        let (Some(a), Some(b)) = (draw(&mut rng, &mut report), draw(&mut rng, &mut report)) else {
            break;
        };
        let lambda: f64 = rng.gen();
        report.pairs += 1;
        if !member(&a.combine(&b, lambda)) {
            report.failures += 1;
        }
    }
    report
}

//! The closed convex hull `Ω(A, B)` of `D(A, B)`:
//!
//! ```text
//! Ω(A, B) = {(Y, W) : AY = B and ½YY^T + W ∈ K_A°}
//! ```
//!
//! together with its relative interior, affine hull, polar and horizon cones,
//! and the ε-Carathéodory construction that approximates any point of `Ω` by
//! a finite convex combination of graph points.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GmfError, Result};
use crate::gmf::{eval_support, ConstraintPair};
use crate::matcore::{lambda_max, sym_eig, Mat, ToleranceConfig};
use crate::points::{DualPoint, PrimalPoint};

/// `(Y, W) ∈ Ω(A, B)`.
pub fn in_omega(pt: &PrimalPoint, cp: &ConstraintPair) -> bool {
    cp.assert_primal(pt);
    cp.is_feasible(&pt.y) && cp.cone().in_polar_cone(&pt.curvature_gap())
}

/// `(Y, W) ∈ rint Ω(A, B)`: `AY = B` and `½YY^T + W ∈ rint K_A°`.
pub fn in_rint_omega(pt: &PrimalPoint, cp: &ConstraintPair) -> bool {
    cp.assert_primal(pt);
    cp.is_feasible(&pt.y) && cp.cone().in_rint_polar(&pt.curvature_gap())
}

/// `(Y, W) ∈ aff Ω(A, B)`: `AY = B` and `rge(½YY^T + W) ⊂ ker A`.
pub fn in_aff_omega(pt: &PrimalPoint, cp: &ConstraintPair) -> bool {
    cp.assert_primal(pt);
    cp.is_feasible(&pt.y) && cp.cone().in_aff_polar(&pt.curvature_gap())
}

/// Membership in `Ω(0, 0)`, i.e. `W + ½YY^T ⪯ 0`, without any constraint data.
pub fn in_omega_zero_special(pt: &PrimalPoint, tol: &ToleranceConfig) -> bool {
    let gap = pt.curvature_gap();
    lambda_max(&gap).is_none_or(|l| l <= tol.psd_slack(&gap))
}

/// Membership in `int Ω(0, 0)`, i.e. `W + ½YY^T ≺ 0`.
pub fn in_int_omega_zero_special(pt: &PrimalPoint, tol: &ToleranceConfig) -> bool {
    let gap = pt.curvature_gap();
    lambda_max(&gap).is_none_or(|l| l < -tol.psd_slack(&gap))
}

/// `(X, V) ∈ Ω(A, B)°`, decided as `σ_D(X, V) <= 1`.
pub fn in_omega_polar(pt: &DualPoint, cp: &ConstraintPair) -> bool {
    eval_support(pt, cp).value.at_most(1.0 + cp.tol().eq_tol)
}

/// `(Y, W) ∈ Ω(A, B)^∞ = {0} × K_A°`.
pub fn in_horizon_omega(pt: &PrimalPoint, cp: &ConstraintPair) -> bool {
    cp.assert_primal(pt);
    pt.y.norm() <= cp.tol().eq_tol && cp.cone().in_polar_cone(&pt.w)
}

/// `(X, V) ∈ (Ω(A, B)°)^∞`, decided as `σ_D(X, V) <= 0`.
pub fn in_horizon_omega_polar(pt: &DualPoint, cp: &ConstraintPair) -> bool {
    eval_support(pt, cp).value.at_most(cp.tol().eq_tol)
}

/// A convex combination `Σ λ_i (Y_i, −½ Y_i Y_i^T)` of graph points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexWitness {
    pub weights: Vec<f64>,
    pub points: Vec<Mat>,
    pub epsilon: f64,
}

impl ConvexWitness {
    /// The point `(Σ λ_i Y_i, −½ Σ λ_i Y_i Y_i^T)` of `conv D(A, B)`.
    pub fn induced_point(&self) -> PrimalPoint {
        let (n, m) = self.points[0].shape();
        let mut y = Mat::zeros(n, m);
        let mut w = Mat::zeros(n, n);
        for (lambda, yi) in self.weights.iter().zip(&self.points) {
            y += *lambda * yi;
            w -= (0.5 * lambda) * yi * yi.transpose();
        }
        PrimalPoint { y, w }
    }

    pub fn distance_to(&self, pt: &PrimalPoint) -> f64 {
        self.induced_point().distance(pt)
    }

    /// Checks the witness invariants: nonnegative weights summing to one and
    /// every `Y_i` feasible.
    pub fn validate(&self, cp: &ConstraintPair) -> Result<()> {
        if self.weights.len() != self.points.len() || self.points.is_empty() {
            return Err(GmfError::dim("witness needs one weight per point"));
        }
        let total: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| w < 0.0) || !cp.tol().scalar_eq(total, 1.0, 1.0) {
            return Err(GmfError::Precondition(format!(
                "weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        for (i, y) in self.points.iter().enumerate() {
            if y.shape() != (cp.n(), cp.m()) {
                return Err(GmfError::dim(format!("witness point {i} has wrong shape")));
            }
            if !cp.is_feasible(y) {
                return Err(GmfError::Precondition(format!(
                    "witness point {i} violates AY = B"
                )));
            }
        }
        Ok(())
    }
}

/// Builds the ε-Carathéodory witness for a point of `Ω(A, B)`.
///
/// The gap `−(½YY^T + W)` is written as `Σ μ_i v_i v_i^T` with `v_i ∈ ker A`
/// (eigendecomposition on `ker A`, padded with zero terms to
/// `N = n(n+1)/2 + 1`). With `λ = ε/N` the witness has weights
/// `1 − ε, λ, …, λ` and points `Z_0 + (Y − Z_0)/√(1−ε)` and `Z_i + V_i`, where `V_i`
/// carries `√(2μ_i/λ) v_i` in its first column and `AZ_i = B`. Its induced
/// point converges to `(Y, W)` as `ε ↓ 0`, at rate `√ε` when the gap is
/// nonzero.
///
/// `Z_0` and `Z_i` are the minimum-norm solution of `AZ = B`; with `z_seed` it is
/// additionally moved by a seeded Gaussian step inside `{AZ = B}`.
pub fn caratheodory_witness(
    pt: &PrimalPoint,
    cp: &ConstraintPair,
    epsilon: f64,
    z_seed: Option<u64>,
) -> Result<ConvexWitness> {
    cp.check_primal(pt)?;
    if cp.m() == 0 {
        return Err(GmfError::dim("witness construction needs m >= 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GmfError::Argument(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    if !in_omega(pt, cp) {
        return Err(GmfError::Precondition("point is not in Omega(A, B)".into()));
    }

    let (n, m) = (cp.n(), cp.m());
    let terms = n * (n + 1) / 2 + 1;
    let kernel = cp.kernel();

    let mut rank_one: Vec<(f64, DVector<f64>)> = Vec::with_capacity(terms);
    if !kernel.is_trivial() {
        let gap = -pt.curvature_gap();
        let eig = sym_eig(&kernel.compress(&gap))?;
        for (i, &mu) in eig.eigenvalues.iter().enumerate() {
            let v = kernel.basis() * eig.eigenvectors.column(i);
            rank_one.push((mu.max(0.0), v));
        }
    }
    rank_one.resize(terms, (0.0, DVector::zeros(n)));

    let mut rng = z_seed.map(ChaCha8Rng::seed_from_u64);
    let base_z = cp.min_norm_solution();
    let lambda = epsilon / terms as f64;

    let mut weights = Vec::with_capacity(terms + 1);
    let mut points = Vec::with_capacity(terms + 1);
    weights.push(1.0 - epsilon);
    // Y_1 = Z_0 + (Y − Z_0)/√(1−ε) keeps AY_1 = B; it equals Y/√(1−ε) when B = 0.
    points.push(base_z + (&pt.y - base_z) / (1.0 - epsilon).sqrt());
    for (mu, v) in rank_one {
        let mut yi = match rng.as_mut() {
            Some(rng) => {
                let g = Mat::from_fn(kernel.dim(), m, |_, _| StandardNormal.sample(rng));
                base_z + kernel.basis() * g
            }
            None => base_z.clone(),
        };
        let coeff = (2.0 * mu / lambda).sqrt();
        let mut first = yi.column_mut(0);
        first += coeff * v;
        weights.push(lambda);
        points.push(yi);
    }
    Ok(ConvexWitness {
        weights,
        points,
        epsilon,
    })
}

//! Normal cones of `Ω(A, B)` and subdifferentials of `σ_D`.
//!
//! At `(Y, W) ∈ Ω(A, B)` the normal cone consists of the `(X, V)` with
//! `V ∈ K_A`, `⟨V, ½YY^T + W⟩ = 0` and `rge(X − VY) ⊂ (ker A)^⊥`. Since
//! `∂σ_D(X, V) = {ω ∈ Ω : (X, V) ∈ N_Ω(ω)}`, the same three conditions decide
//! subgradient membership.

use crate::error::{GmfError, Result};
use crate::gmf::{eval_support, in_domain, ConstraintPair};
use crate::matcore::{inner, Mat};
use crate::omega::in_omega;
use crate::points::{DualPoint, PrimalPoint};

/// A subgradient of `σ_D` at some `(X, V)` together with the multiplier `Z`
/// certifying `X = VY + A^T Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientResult {
    pub point: PrimalPoint,
    pub certificate_z: Mat,
    /// `σ_D(X, V)`, equal to `⟨(X, V), point⟩`.
    pub value: f64,
}

/// `(X, V) ∈ N_Ω(Y, W)` for a base point `(Y, W) ∈ Ω(A, B)`.
pub fn in_normal_cone(dual: &DualPoint, base: &PrimalPoint, cp: &ConstraintPair) -> Result<bool> {
    cp.check_dual(dual)?;
    cp.check_primal(base)?;
    if !in_omega(base, cp) {
        return Err(GmfError::Precondition(
            "normal cone base point is not in Omega(A, B)".into(),
        ));
    }
    Ok(normal_cone_conditions(dual, base, cp))
}

fn normal_cone_conditions(dual: &DualPoint, base: &PrimalPoint, cp: &ConstraintPair) -> bool {
    let tol = cp.tol();
    if !cp.cone().in_cone(&dual.v) {
        return false;
    }
    let gap = base.curvature_gap();
    let complementarity = inner(&dual.v, &gap);
    if complementarity.abs() > tol.eq_tol * (dual.v.norm() * gap.norm()).max(1.0) {
        return false;
    }
    // rge(X − VY) ⊂ (ker A)^⊥ = rge A^T, i.e. X = VY + A^T Z for some Z.
    let residual = &dual.x - &dual.v * &base.y;
    let leak = (cp.kernel().projector() * &residual).norm();
    leak <= tol.range_tol * residual.norm().max(1.0)
}

/// The subgradient `(Y*, −½Y*Y*^T)` built from the KKT solution
/// `(Y*; Z*) = M(V)† (X; B)`. It lies on the graph `D(A, B)`, satisfies
/// complementarity with every `V`, and attains `σ_D(X, V)`.
pub fn canonical_subgradient(dual: &DualPoint, cp: &ConstraintPair) -> Result<SubgradientResult> {
    cp.check_dual(dual)?;
    let support = eval_support(dual, cp);
    let (Some(value), Some(y), Some(z)) = (
        support.value.finite(),
        support.maximizer,
        support.multiplier,
    ) else {
        return Err(GmfError::Precondition(
            "(X, V) is outside the domain of the support function".into(),
        ));
    };
    Ok(SubgradientResult {
        point: PrimalPoint::on_graph(y),
        certificate_z: z,
        value,
    })
}

/// `(Y, W) ∈ ∂σ_D(X, V)` for `(X, V)` in the domain.
pub fn in_subdifferential(
    candidate: &PrimalPoint,
    dual: &DualPoint,
    cp: &ConstraintPair,
) -> Result<bool> {
    cp.check_dual(dual)?;
    cp.check_primal(candidate)?;
    if !in_domain(dual, cp) {
        return Err(GmfError::Precondition(
            "(X, V) is outside the domain of the support function".into(),
        ));
    }
    if !in_omega(candidate, cp) {
        return Ok(false);
    }
    Ok(normal_cone_conditions(dual, candidate, cp))
}

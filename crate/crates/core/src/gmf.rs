//! The generalized matrix-fractional function
//!
//! ```text
//! σ_D(X, V) = ½ tr((X;B)^T M(V)† (X;B))   if rge (X;B) ⊂ rge M(V) and V ∈ K_A
//!           = +∞                          otherwise
//! ```
//!
//! with the saddle matrix `M(V) = [[V, A^T], [A, 0]]`. This is the support
//! function of the graph `D(A, B) = {(Y, −½YY^T) : AY = B}`.

use crate::cones::ConeContext;
use crate::error::{GmfError, Result};
use crate::extended::ExtendedReal;
use crate::matcore::{
    kernel_basis, pinv_general, pinv_parts, range_basis, range_residual_with, vstack, Mat,
    SubspaceBasis, ToleranceConfig,
};
use crate::points::{DualPoint, PrimalPoint};

/// The constraint data `(A, B)` of `AY = B`, with `rge B ⊂ rge A`.
///
/// `p = 0` (no rows) encodes the unconstrained case; a zero `A` with
/// `p >= 1` rows behaves the same way.
#[derive(Debug, Clone)]
pub struct ConstraintPair {
    a: Mat,
    b: Mat,
    cone: ConeContext,
    min_norm_solution: Mat,
    tol: ToleranceConfig,
}

impl ConstraintPair {
    pub fn new(a: Mat, b: Mat, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        if a.nrows() != b.nrows() {
            return Err(GmfError::dim(format!(
                "A is {}x{} but B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let range = range_basis(&a, &tol);
        let residual = (&b - range.projector() * &b).norm();
        if residual > tol.range_tol * b.norm().max(1.0) {
            return Err(GmfError::Infeasible { residual });
        }
        let kernel = kernel_basis(&a, &tol);
        let min_norm_solution = pinv_general(&a, &tol)? * &b;
        Ok(Self {
            a,
            b,
            cone: ConeContext::new(kernel, tol),
            min_norm_solution,
            tol,
        })
    }

    /// No constraints (`p = 0`) on `n × m` matrices.
    pub fn unconstrained(n: usize, m: usize, tol: ToleranceConfig) -> Result<Self> {
        Self::new(Mat::zeros(0, n), Mat::zeros(0, m), tol)
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    pub fn p(&self) -> usize {
        self.a.nrows()
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// `ker A` with its projector.
    pub fn kernel(&self) -> &SubspaceBasis {
        self.cone.subspace()
    }

    /// The cone `K_A = K_{ker A}`.
    pub fn cone(&self) -> &ConeContext {
        &self.cone
    }

    /// The minimum-norm solution `A† B` of `AY = B`.
    pub fn min_norm_solution(&self) -> &Mat {
        &self.min_norm_solution
    }

    /// `B = 0` within `feas_tol`.
    pub fn is_homogeneous(&self) -> bool {
        self.b.norm() <= self.tol.feas_tol
    }

    /// `‖AY − B‖_F <= feas_tol · max(1, ‖B‖_F)`.
    pub fn is_feasible(&self, y: &Mat) -> bool {
        self.feasibility_residual(y) <= self.tol.feas_tol * self.b.norm().max(1.0)
    }

    pub fn feasibility_residual(&self, y: &Mat) -> f64 {
        (&self.a * y - &self.b).norm()
    }

    pub fn check_dual(&self, pt: &DualPoint) -> Result<()> {
        self.check_shape(pt.x.shape(), pt.v.shape(), ("X", "V"))
    }

    pub fn check_primal(&self, pt: &PrimalPoint) -> Result<()> {
        self.check_shape(pt.y.shape(), pt.w.shape(), ("Y", "W"))
    }

    fn check_shape(
        &self,
        first: (usize, usize),
        second: (usize, usize),
        names: (&str, &str),
    ) -> Result<()> {
        let (n, m) = (self.n(), self.m());
        if first != (n, m) || second != (n, n) {
            return Err(GmfError::dim(format!(
                "expected {} {n}x{m} and {} {n}x{n}, got {}x{} and {}x{}",
                names.0, names.1, first.0, first.1, second.0, second.1
            )));
        }
        Ok(())
    }

    pub(crate) fn assert_dual(&self, pt: &DualPoint) {
        if let Err(e) = self.check_dual(pt) {
            panic!("{e}");
        }
    }

    pub(crate) fn assert_primal(&self, pt: &PrimalPoint) {
        if let Err(e) = self.check_primal(pt) {
            panic!("{e}");
        }
    }
}

/// Value of the support function plus the canonical KKT solution
/// `(Y*; Z*) = M(V)† (X; B)` when the value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportResult {
    pub value: ExtendedReal,
    pub maximizer: Option<Mat>,
    pub multiplier: Option<Mat>,
}

impl SupportResult {
    fn infinite() -> Self {
        Self {
            value: ExtendedReal::PosInfinity,
            maximizer: None,
            multiplier: None,
        }
    }
}

/// `M(V) = [[V, A^T], [A, 0]]`.
///
/// # Panics
///
/// Panics if `V` is not `n × n`.
pub fn saddle_matrix(v: &Mat, cp: &ConstraintPair) -> Mat {
    let (n, p) = (cp.n(), cp.p());
    assert_eq!(v.shape(), (n, n), "V must be {n}x{n}");
    let mut out = Mat::zeros(n + p, n + p);
    out.view_mut((0, 0), (n, n)).copy_from(v);
    out.view_mut((0, n), (n, p)).copy_from(&cp.a.transpose());
    out.view_mut((n, 0), (p, n)).copy_from(&cp.a);
    out
}

/// Solves the saddle system through the pseudoinverse, returning `M(V)† (X;B)`
/// when `(X, V)` lies in the domain.
fn solve_in_domain(pt: &DualPoint, cp: &ConstraintPair) -> Option<(Mat, Mat)> {
    cp.assert_dual(pt);
    if !cp.cone.in_cone(&pt.v) {
        return None;
    }
    let rhs = vstack(&pt.x, &cp.b);
    let saddle = saddle_matrix(&pt.v, cp);
    let parts = pinv_parts(&saddle, &cp.tol).expect("saddle matrix is square");
    let residual = range_residual_with(&rhs, &parts.range_projector);
    if residual > cp.tol.range_tol * rhs.norm().max(1.0) {
        return None;
    }
    // Refinement keeps the solution in rge M, so it stays M† (X;B), and
    // removes the cond(M)-sized residual of the eigenvector-built M†.
    let mut solution = &parts.pinv * &rhs;
    for _ in 0..2 {
        solution += &parts.pinv * (&rhs - &saddle * &solution);
    }
    Some((rhs, solution))
}

/// `(X, V) ∈ dom σ_D`: `V ∈ K_A` and `rge (X;B) ⊂ rge M(V)`.
///
/// The domain is not closed: with `A = B = 0`, `(X, ηI)` belongs to it for
/// every `η > 0`, but `(X, 0)` does not unless `X = 0`.
pub fn in_domain(pt: &DualPoint, cp: &ConstraintPair) -> bool {
    solve_in_domain(pt, cp).is_some()
}

/// Closed-form evaluation of `σ_D(X, V)`.
pub fn eval_support(pt: &DualPoint, cp: &ConstraintPair) -> SupportResult {
    let Some((rhs, solution)) = solve_in_domain(pt, cp) else {
        return SupportResult::infinite();
    };
    let n = cp.n();
    let value = 0.5 * rhs.dot(&solution);
    SupportResult {
        value: ExtendedReal::Finite(value),
        maximizer: Some(solution.rows(0, n).into_owned()),
        multiplier: Some(solution.rows(n, cp.p()).into_owned()),
    }
}

//! Gauge calculus for the homogeneous case `B = 0`, where `0 ∈ Ω(A, 0)`.
//!
//! * `σ_Ω(X, V) = γ_{Ω°}(X, V)`, so the polar gauge is the GMF value itself.
//! * `(Y, W) ∈ tΩ(A, 0)` iff `AY = 0` and `½YY^T + tW ∈ K_A°`.
//! * `γ_Ω(Y, W)` is finite iff `rge Y ⊂ ker A ∩ rge W` and `W ∈ K_A°`; it is
//!   the smallest `t` with `½YY^T ⪯ t(−W)`, namely `½ λ_max(Y^T (−W)† Y)`.

use crate::error::{GmfError, Result};
use crate::extended::ExtendedReal;
use crate::gmf::{eval_support, ConstraintPair};
use crate::matcore::{lambda_max, pinv, range_inclusion, svd, sym_eig, Mat, ToleranceConfig};
use crate::points::{DualPoint, PrimalPoint};

/// Value of `γ_{Ω(A,0)}` with the matrix it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResult {
    pub value: ExtendedReal,
    /// `(Y^T (−W)† Y)†` (m × m). When `rge Y` is an invariant subspace of
    /// `W` this is `−Y† W (Y†)^T`.
    pub critical_matrix: Option<Mat>,
    /// Smallest nonzero singular value of `critical_matrix`.
    pub sigma_min: ExtendedReal,
}

impl GaugeResult {
    fn infinite() -> Self {
        Self {
            value: ExtendedReal::PosInfinity,
            critical_matrix: None,
            sigma_min: ExtendedReal::PosInfinity,
        }
    }
}

fn require_homogeneous(cp: &ConstraintPair) -> Result<()> {
    if cp.is_homogeneous() {
        Ok(())
    } else {
        Err(GmfError::Config(
            "gauge calculus requires B = 0 (the origin is in Omega(A, B) only then)".into(),
        ))
    }
}

/// `(Y, W) ∈ tΩ(A, 0)`.
pub fn in_t_omega(pt: &PrimalPoint, t: f64, cp: &ConstraintPair) -> Result<bool> {
    require_homogeneous(cp)?;
    cp.check_primal(pt)?;
    if t.is_nan() || t < 0.0 {
        return Err(GmfError::Argument(format!("t = {t} must be nonnegative")));
    }
    let scaled = &pt.y * pt.y.transpose() * 0.5 + &pt.w * t;
    Ok(cp.is_feasible(&pt.y) && cp.cone().in_polar_cone(&scaled))
}

/// Domain test shared by the gauge and its compressed lower bound. Returns
/// `None` when the gauge is `+∞`, `Some(None)` when `Y = 0` and the gauge is
/// zero, and `Some(Some(svd))` otherwise.
fn gauge_support(pt: &PrimalPoint, cp: &ConstraintPair) -> Option<Option<ReducedSvd>> {
    let tol = cp.tol();
    if !cp.cone().in_polar_cone(&pt.w) {
        return None;
    }
    if pt.y.norm() <= tol.eq_tol {
        return Some(None);
    }
    if !range_inclusion(&pt.y, cp.kernel().projector(), tol) || !range_inclusion(&pt.y, &pt.w, tol)
    {
        return None;
    }
    Some(Some(ReducedSvd::new(&pt.y, tol)))
}

/// `Y = U Σ V^T` restricted to the singular values above the rank cutoff.
struct ReducedSvd {
    u: Mat,
    sigma: Vec<f64>,
    v: Mat,
}

impl ReducedSvd {
    fn new(y: &Mat, tol: &ToleranceConfig) -> Self {
        let dec = svd(y).expect("SVD of a finite matrix");
        let r = dec.rank(tol);
        Self {
            u: dec.u.columns(0, r).into_owned(),
            sigma: dec.singular_values[..r].to_vec(),
            v: dec.v.columns(0, r).into_owned(),
        }
    }

    /// `Σ S Σ` for an `r × r` matrix `S` in the `U` coordinates.
    fn scale_both(&self, s: &Mat) -> Mat {
        Mat::from_fn(s.nrows(), s.ncols(), |i, j| {
            self.sigma[i] * s[(i, j)] * self.sigma[j]
        })
    }

    /// `Σ^{-1} S Σ^{-1}`.
    fn unscale_both(&self, s: &Mat) -> Mat {
        Mat::from_fn(s.nrows(), s.ncols(), |i, j| {
            s[(i, j)] / (self.sigma[i] * self.sigma[j])
        })
    }
}

/// Smallest singular value above `rank_tol` times the largest; `+∞` if none.
fn smallest_nonzero_singular(s: &Mat, rank_tol: f64) -> ExtendedReal {
    let magnitudes: Vec<f64> = sym_eig(s)
        .expect("square")
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .collect();
    let largest = magnitudes.iter().fold(0.0_f64, |a, &b| a.max(b));
    magnitudes
        .into_iter()
        .filter(|&s| largest > 0.0 && s > rank_tol * largest)
        .min_by(f64::total_cmp)
        .map_or(ExtendedReal::PosInfinity, ExtendedReal::Finite)
}

/// `γ_{Ω(A,0)}(Y, W)` in closed form.
///
/// With the reduced SVD `Y = UΣV^T` and `N = −W`, the condition
/// `½YY^T ⪯ tN` on `rge Y ⊂ rge N` is equivalent to
/// `½ I ⪯ t (Σ U^T N† U Σ)^{-1}`, so the gauge is `½ / σ_min` of the critical
/// matrix `V (Σ U^T N† U Σ)^{-1} V^T`.
pub fn eval_gauge(pt: &PrimalPoint, cp: &ConstraintPair) -> Result<GaugeResult> {
    require_homogeneous(cp)?;
    cp.check_primal(pt)?;
    let tol = cp.tol();
    let svd = match gauge_support(pt, cp) {
        None => return Ok(GaugeResult::infinite()),
        Some(None) => {
            return Ok(GaugeResult {
                value: ExtendedReal::Finite(0.0),
                critical_matrix: None,
                sigma_min: ExtendedReal::PosInfinity,
            })
        }
        Some(Some(svd)) => svd,
    };
    let neg_w_pinv = pinv(&(-&pt.w), tol)?;
    let reduced = svd.scale_both(&(svd.u.transpose() * neg_w_pinv * &svd.u));
    let reduced_inv = pinv(&reduced, tol)?;
    let critical = &svd.v * reduced_inv * svd.v.transpose();
    let sigma_min = smallest_nonzero_singular(&critical, tol.rank_tol);
    let value = match sigma_min {
        ExtendedReal::Finite(s) => ExtendedReal::Finite(0.5 / s),
        ExtendedReal::PosInfinity => ExtendedReal::Finite(0.0),
    };
    Ok(GaugeResult {
        value,
        critical_matrix: Some(critical),
        sigma_min,
    })
}

/// `½ / σ_min(−Σ^{-1} U^T W U Σ^{-1})`, the value obtained by compressing
/// `½YY^T + tW ⪯ 0` onto `rge Y` only.
///
/// Compression gives a necessary condition, so this is a lower bound on
/// [`eval_gauge`]; the two agree when `rge Y` is invariant under `W` (for
/// example when `W` and `YY^T` commute) and can differ otherwise.
pub fn compressed_gauge_bound(pt: &PrimalPoint, cp: &ConstraintPair) -> Result<ExtendedReal> {
    require_homogeneous(cp)?;
    cp.check_primal(pt)?;
    let svd = match gauge_support(pt, cp) {
        None => return Ok(ExtendedReal::PosInfinity),
        Some(None) => return Ok(ExtendedReal::Finite(0.0)),
        Some(Some(svd)) => svd,
    };
    let compressed = svd.unscale_both(&(svd.u.transpose() * (-&pt.w) * &svd.u));
    let top = lambda_max(&compressed).unwrap_or(0.0);
    let smallest = smallest_nonzero_singular(&compressed, cp.tol().rank_tol);
    Ok(match smallest {
        ExtendedReal::Finite(s) if top > 0.0 => ExtendedReal::Finite(0.5 / s),
        _ => ExtendedReal::Finite(0.0),
    })
}

/// `γ_{Ω(A,0)°}(X, V) = σ_{Ω(A,0)}(X, V)`.
pub fn eval_polar_gauge(pt: &DualPoint, cp: &ConstraintPair) -> Result<ExtendedReal> {
    require_homogeneous(cp)?;
    cp.check_dual(pt)?;
    Ok(eval_support(pt, cp).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ToleranceConfig;
    use approx::assert_abs_diff_eq;

    fn m(rows: usize, cols: usize, data: &[f64]) -> Mat {
        Mat::from_row_slice(rows, cols, data)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn f0() -> ConstraintPair {
        ConstraintPair::unconstrained(1, 1, tol()).unwrap()
    }

    fn f1() -> ConstraintPair {
        ConstraintPair::new(m(1, 2, &[1.0, 0.0]), Mat::zeros(1, 1), tol()).unwrap()
    }

    fn primal(y: Mat, w: Mat) -> PrimalPoint {
        PrimalPoint::new(y, w).unwrap()
    }

    /// Smallest t on a fine grid with λ_max(½YY^T + tW) <= 0, brute force.
    fn grid_gauge(pt: &PrimalPoint, hi: f64) -> f64 {
        let steps = 200_000;
        (0..=steps)
            .map(|i| hi * i as f64 / steps as f64)
            .find(|&t| {
                let s = &pt.y * pt.y.transpose() * 0.5 + &pt.w * t;
                top_eigenvalue(&s) <= 1e-12
            })
            .unwrap()
    }

    /// Largest eigenvalue of a 1×1 or 2×2 symmetric matrix, by formula.
    fn top_eigenvalue(s: &Mat) -> f64 {
        match s.nrows() {
            1 => s[(0, 0)],
            2 => {
                let (a, b, c) = (s[(0, 0)], s[(0, 1)], s[(1, 1)]);
                0.5 * (a + c) + (0.25 * (a - c).powi(2) + b * b).sqrt()
            }
            n => panic!("grid oracle handles n <= 2, got {n}"),
        }
    }

    #[test]
    fn scaled_set_membership() {
        let cp = f0();
        let pt = primal(m(1, 1, &[1.0]), m(1, 1, &[-1.0]));
        assert!(in_t_omega(&pt, 0.5, &cp).unwrap());
        assert!(!in_t_omega(&pt, 0.25, &cp).unwrap());
        let w = m(2, 2, &[0.0, 0.0, 0.0, -2.0]);
        for t in [0.1, 1.0, 10.0] {
            assert!(in_t_omega(&primal(Mat::zeros(2, 1), w.clone()), t, &f1()).unwrap());
        }
    }

    #[test]
    fn scaled_set_argument_errors() {
        let pt = primal(m(1, 1, &[1.0]), m(1, 1, &[-1.0]));
        assert!(matches!(
            in_t_omega(&pt, -1.0, &f0()),
            Err(GmfError::Argument(_))
        ));
        let inhomogeneous = ConstraintPair::new(m(1, 1, &[1.0]), m(1, 1, &[1.0]), tol()).unwrap();
        assert!(matches!(
            in_t_omega(&pt, 1.0, &inhomogeneous),
            Err(GmfError::Config(_))
        ));
        assert!(matches!(
            eval_gauge(&pt, &inhomogeneous),
            Err(GmfError::Config(_))
        ));
        let d = DualPoint::zero(1, 1);
        assert!(matches!(
            eval_polar_gauge(&d, &inhomogeneous),
            Err(GmfError::Config(_))
        ));
    }

    #[test]
    fn gauge_at_zero_y_is_polar_indicator() {
        let cp = f1();
        let inside = primal(Mat::zeros(2, 1), m(2, 2, &[0.0, 0.0, 0.0, -1.0]));
        assert_eq!(
            eval_gauge(&inside, &cp).unwrap().value,
            ExtendedReal::Finite(0.0)
        );
        let outside = primal(Mat::zeros(2, 1), -Mat::identity(2, 2));
        assert_eq!(
            eval_gauge(&outside, &cp).unwrap().value,
            ExtendedReal::PosInfinity
        );
    }

    #[test]
    fn scalar_gauge() {
        let r = eval_gauge(&primal(m(1, 1, &[1.0]), m(1, 1, &[-1.0])), &f0()).unwrap();
        assert_abs_diff_eq!(r.value.finite().unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.sigma_min.finite().unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.critical_matrix.unwrap()[(0, 0)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauge_on_coordinate_kernel() {
        let pt = primal(m(2, 1, &[0.0, 2.0]), m(2, 2, &[0.0, 0.0, 0.0, -2.0]));
        let r = eval_gauge(&pt, &f1()).unwrap();
        assert_abs_diff_eq!(r.value.finite().unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.sigma_min.finite().unwrap(), 0.5, epsilon = 1e-12);
        assert!(in_t_omega(&pt, 1.0 + 1e-9, &f1()).unwrap());
        assert!(!in_t_omega(&pt, 1.0 - 1e-6, &f1()).unwrap());
        assert_abs_diff_eq!(grid_gauge(&pt, 2.0), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn gauge_is_infinite_off_domain() {
        let cp = f1();
        // rge Y leaves ker A
        let pt = primal(m(2, 1, &[1.0, 0.0]), m(2, 2, &[0.0, 0.0, 0.0, -1.0]));
        assert_eq!(
            eval_gauge(&pt, &cp).unwrap().value,
            ExtendedReal::PosInfinity
        );
        // rge Y ⊄ rge W
        let free = ConstraintPair::unconstrained(2, 1, tol()).unwrap();
        let pt = primal(m(2, 1, &[1.0, 0.0]), m(2, 2, &[0.0, 0.0, 0.0, -1.0]));
        assert_eq!(
            eval_gauge(&pt, &free).unwrap().value,
            ExtendedReal::PosInfinity
        );
        // W not in K_A°
        let pt = primal(m(2, 1, &[1.0, 0.0]), Mat::identity(2, 2));
        assert_eq!(
            eval_gauge(&pt, &free).unwrap().value,
            ExtendedReal::PosInfinity
        );
    }

    #[test]
    fn compressed_bound_underestimates_without_invariance() {
        // Y = e1, W = −[[2, 1], [1, 1]]: ½e1e1^T + tW ⪯ 0 iff t >= ½ (determinant
        // t² − t/2 >= 0), while compressing onto e1 only demands t >= ¼.
        let cp = ConstraintPair::unconstrained(2, 1, tol()).unwrap();
        let pt = primal(m(2, 1, &[1.0, 0.0]), m(2, 2, &[-2.0, -1.0, -1.0, -1.0]));
        let gauge = eval_gauge(&pt, &cp).unwrap().value.finite().unwrap();
        let bound = compressed_gauge_bound(&pt, &cp).unwrap().finite().unwrap();
        assert_abs_diff_eq!(gauge, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(bound, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(grid_gauge(&pt, 1.0), 0.5, epsilon = 1e-5);
        assert!(!in_t_omega(&pt, 0.3, &cp).unwrap());
        assert!(in_t_omega(&pt, 0.5 + 1e-9, &cp).unwrap());
    }

    #[test]
    fn compressed_bound_is_exact_with_invariance() {
        let cp = ConstraintPair::unconstrained(2, 2, tol()).unwrap();
        let pt = primal(
            m(2, 2, &[1.0, 2.0, 0.0, 0.0]),
            m(2, 2, &[-3.0, 0.0, 0.0, -1.0]),
        );
        let gauge = eval_gauge(&pt, &cp).unwrap().value.finite().unwrap();
        let bound = compressed_gauge_bound(&pt, &cp).unwrap().finite().unwrap();
        // ½‖y‖²/3 with y = (1, 2)
        assert_abs_diff_eq!(gauge, 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bound, gauge, epsilon = 1e-12);
    }

    #[test]
    fn polar_gauge_is_support() {
        let cp = f0();
        let v = eval_polar_gauge(
            &DualPoint::new(m(1, 1, &[2.0]), m(1, 1, &[4.0])).unwrap(),
            &cp,
        );
        assert_abs_diff_eq!(v.unwrap().finite().unwrap(), 0.5, epsilon = 1e-12);
        let zero = eval_polar_gauge(
            &DualPoint::new(Mat::zeros(2, 1), Mat::identity(2, 2)).unwrap(),
            &f1(),
        );
        assert_eq!(zero.unwrap(), ExtendedReal::Finite(0.0));
        let out = eval_polar_gauge(
            &DualPoint::new(m(1, 1, &[1.0]), m(1, 1, &[0.0])).unwrap(),
            &cp,
        );
        assert_eq!(out.unwrap(), ExtendedReal::PosInfinity);
    }
}

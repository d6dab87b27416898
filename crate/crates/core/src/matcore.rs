//! Dense numerical kernel shared by every other module.
//!
//! All rank decisions use one relative cutoff, `rank_tol` times the largest
//! singular value (or largest eigenvalue magnitude for symmetric input).
//! Symmetric inputs are symmetrized as `(S + S^T)/2` on entry.

use nalgebra::DMatrix;

use crate::error::{GmfError, Result};

pub type Mat = DMatrix<f64>;

/// Numerical thresholds used throughout the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative singular-value cutoff.
    pub rank_tol: f64,
    /// Eigenvalue slack for semidefiniteness tests, in units of
    /// `max(1, ‖S‖_F)` of the matrix under test.
    pub psd_tol: f64,
    /// Relative residual bound for range inclusions.
    pub range_tol: f64,
    /// Relative bound for scalar and matrix equalities.
    pub eq_tol: f64,
    /// Relative bound for `AY = B` residuals.
    pub feas_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            psd_tol: 1e-9,
            range_tol: 1e-9,
            eq_tol: 1e-8,
            feas_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// Checks that every threshold lies in `(0, 1)`.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_tol", self.rank_tol),
            ("psd_tol", self.psd_tol),
            ("range_tol", self.range_tol),
            ("eq_tol", self.eq_tol),
            ("feas_tol", self.feas_tol),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value < 1.0) {
                return Err(GmfError::Tolerance(format!(
                    "{name} = {value} must lie strictly between 0 and 1"
                )));
            }
        }
        Ok(())
    }

    /// `psd_tol * max(1, ‖S‖_F)`: absolute for matrices of norm at most one,
    /// relative beyond, where eigenvalue round-off grows with `‖S‖`.
    pub fn psd_slack(&self, s: &Mat) -> f64 {
        self.psd_tol * s.norm().max(1.0)
    }

    /// `|a - b| <= eq_tol * max(1, scale)`.
    pub fn scalar_eq(&self, a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= self.eq_tol * scale.abs().max(1.0)
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored column-wise, in eigenvalue order.
    pub eigenvectors: Mat,
}

impl SpectralData {
    /// Largest eigenvalue, `None` for an empty matrix.
    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    /// Smallest eigenvalue, `None` for an empty matrix.
    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// `Q diag(λ) Q^T`.
    pub fn reconstruct(&self) -> Mat {
        let n = self.eigenvectors.nrows();
        let mut out = Mat::zeros(n, n);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let q = self.eigenvectors.column(i);
            out += lambda * q * q.transpose();
        }
        out
    }
}

/// An orthonormal basis of a subspace `S ⊂ R^n` together with the orthogonal
/// projector onto it. A zero-column basis encodes `S = {0}`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    basis: Mat,
    projector: Mat,
}

impl SubspaceBasis {
    /// Builds a subspace from a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: Mat) -> Self {
        let projector = &basis * basis.transpose();
        Self { basis, projector }
    }

    /// `S = R^n`.
    pub fn full(n: usize) -> Self {
        Self::from_orthonormal(Mat::identity(n, n))
    }

    /// `S = {0} ⊂ R^n`.
    pub fn trivial(n: usize) -> Self {
        Self::from_orthonormal(Mat::zeros(n, 0))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    /// The `n × k` orthonormal basis `Q`.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    /// The projector `P = Q Q^T`.
    pub fn projector(&self) -> &Mat {
        &self.projector
    }

    /// `Q^T S Q` for a symmetric `S`.
    pub fn compress(&self, s: &Mat) -> Mat {
        self.basis.transpose() * s * &self.basis
    }
}

/// Strict or non-strict definiteness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    /// `u^T V u >= 0` on the subspace.
    Semi,
    /// `u^T V u > 0` on the subspace minus the origin.
    Strict,
}

pub fn symmetrize(s: &Mat) -> Mat {
    (s + s.transpose()) * 0.5
}

/// Frobenius inner product `tr(A^T B)`.
pub fn inner(a: &Mat, b: &Mat) -> f64 {
    a.dot(b)
}

/// Stacks `top` over `bottom`; both must have the same number of columns.
pub fn vstack(top: &Mat, bottom: &Mat) -> Mat {
    assert_eq!(top.ncols(), bottom.ncols(), "vstack column mismatch");
    let mut out = Mat::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

fn to_faer(m: &Mat) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn sym_eig(s: &Mat) -> Result<SpectralData> {
    if !s.is_square() {
        return Err(GmfError::dim(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let n = s.nrows();
    if n == 0 {
        return Ok(SpectralData {
            eigenvalues: Vec::new(),
            eigenvectors: Mat::zeros(0, 0),
        });
    }
    let eig = to_faer(&symmetrize(s))
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| GmfError::Precondition(format!("eigendecomposition failed: {e:?}")))?;
    let (values, vectors) = (eig.S().column_vector(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = Mat::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
    })
}

/// Largest eigenvalue of a symmetric matrix; `None` when empty.
pub(crate) fn lambda_max(s: &Mat) -> Option<f64> {
    sym_eig(s).ok().and_then(|eig| eig.max())
}

/// Smallest eigenvalue of a symmetric matrix; `None` when empty.
pub(crate) fn lambda_min(s: &Mat) -> Option<f64> {
    sym_eig(s).ok().and_then(|eig| eig.min())
}

/// Full singular value decomposition `A = U Σ V^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdData {
    /// `rows × rows`, orthogonal.
    pub u: Mat,
    /// `min(rows, cols)` values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// `cols × cols`, orthogonal.
    pub v: Mat,
}

impl SvdData {
    /// Number of singular values above `rank_tol` times the largest.
    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        let largest = self.singular_values.first().copied().unwrap_or(0.0);
        if largest == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .take_while(|&&s| s > tol.rank_tol * largest)
            .count()
    }
}

pub fn svd(a: &Mat) -> Result<SvdData> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(SvdData {
            u: Mat::identity(rows, rows),
            singular_values: Vec::new(),
            v: Mat::identity(cols, cols),
        });
    }
    let dec = to_faer(a)
        .svd()
        .map_err(|e| GmfError::Precondition(format!("SVD failed: {e:?}")))?;
    let sigma = dec.S().column_vector();
    let mut order: Vec<usize> = (0..rows.min(cols)).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let (u, v) = (from_faer(dec.U()), from_faer(dec.V()));
    let permute = |m: &Mat| {
        let mut out = m.clone();
        for (dst, &src) in order.iter().enumerate() {
            out.column_mut(dst).copy_from(&m.column(src));
        }
        out
    };
    Ok(SvdData {
        u: permute(&u),
        singular_values: order.iter().map(|&i| sigma[i]).collect(),
        v: permute(&v),
    })
}

/// `M†` for symmetric `M` together with the orthogonal projector `M M†` onto
/// `rge M`, both read off one eigendecomposition.
pub(crate) struct PseudoInverse {
    pub pinv: Mat,
    pub range_projector: Mat,
}

pub(crate) fn pinv_parts(m: &Mat, tol: &ToleranceConfig) -> Result<PseudoInverse> {
    let eig = sym_eig(m)?;
    let n = m.nrows();
    let largest = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let mut pinv = Mat::zeros(n, n);
    let mut range_projector = Mat::zeros(n, n);
    if largest > 0.0 {
        let cutoff = tol.rank_tol * largest;
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() > cutoff {
                let q = eig.eigenvectors.column(i);
                let outer = q * q.transpose();
                pinv += (1.0 / lambda) * &outer;
                range_projector += outer;
            }
        }
    }
    Ok(PseudoInverse {
        pinv,
        range_projector,
    })
}

/// Moore-Penrose pseudoinverse of a symmetric matrix.
///
/// Eigenvalues with `|λ| <= rank_tol * max|λ|` are treated as zero.
pub fn pinv(m: &Mat, tol: &ToleranceConfig) -> Result<Mat> {
    pinv_parts(m, tol).map(|parts| parts.pinv)
}

/// Moore-Penrose pseudoinverse of a rectangular matrix via the SVD.
pub fn pinv_general(a: &Mat, tol: &ToleranceConfig) -> Result<Mat> {
    let dec = svd(a)?;
    let mut out = Mat::zeros(a.ncols(), a.nrows());
    for i in 0..dec.rank(tol) {
        out += (1.0 / dec.singular_values[i]) * dec.v.column(i) * dec.u.column(i).transpose();
    }
    Ok(out)
}

/// Orthonormal basis of `ker A = {u : Au = 0}`.
///
/// A matrix with no rows has kernel `R^n`.
pub fn kernel_basis(a: &Mat, tol: &ToleranceConfig) -> SubspaceBasis {
    let n = a.ncols();
    let dec = svd(a).expect("SVD of a finite matrix");
    let rank = dec.rank(tol);
    if rank == n {
        SubspaceBasis::trivial(n)
    } else {
        SubspaceBasis::from_orthonormal(dec.v.columns(rank, n - rank).into_owned())
    }
}

/// Orthonormal basis of the column space `rge A`.
pub fn range_basis(a: &Mat, tol: &ToleranceConfig) -> SubspaceBasis {
    let dec = svd(a).expect("SVD of a finite matrix");
    let rank = dec.rank(tol);
    if rank == 0 {
        SubspaceBasis::trivial(a.nrows())
    } else {
        SubspaceBasis::from_orthonormal(dec.u.columns(0, rank).into_owned())
    }
}

/// `rge C ⊂ rge M` for symmetric `M`, decided by
/// `‖M M† C − C‖_F <= range_tol * max(1, ‖C‖_F)`. `M M†` is formed as the
/// projector onto the retained eigenvectors, which avoids amplifying
/// round-off by the condition number of `M`.
///
/// # Panics
///
/// Panics if `M` is not square or the row counts differ.
pub fn range_inclusion(c: &Mat, m: &Mat, tol: &ToleranceConfig) -> bool {
    assert!(m.is_square(), "range_inclusion needs a square M");
    assert_eq!(c.nrows(), m.nrows(), "range_inclusion row mismatch");
    let parts = pinv_parts(m, tol).expect("square input");
    range_residual_with(c, &parts.range_projector) <= tol.range_tol * c.norm().max(1.0)
}

/// `‖P C − C‖_F` for the projector `P = M M†`.
pub(crate) fn range_residual_with(c: &Mat, range_projector: &Mat) -> f64 {
    (range_projector * c - c).norm()
}

/// Semidefiniteness of `V` restricted to the subspace `S`, through the
/// eigenvalues of `Q^T V Q`. Vacuously true when `S = {0}`.
pub fn psd_on_subspace(
    v: &Mat,
    s: &SubspaceBasis,
    mode: Definiteness,
    tol: &ToleranceConfig,
) -> bool {
    if s.is_trivial() {
        return true;
    }
    let v = symmetrize(v);
    let smallest = lambda_min(&s.compress(&v)).expect("non-empty compression");
    let slack = tol.psd_slack(&v);
    match mode {
        Definiteness::Semi => smallest >= -slack,
        Definiteness::Strict => smallest > slack,
    }
}

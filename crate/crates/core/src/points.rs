//! Points of `E = R^{n×m} × S^n`.
//!
//! Dual points `(X, V)` are arguments of the support function; primal points
//! `(Y, W)` are tested against `Ω(A, B)`. Both carry the inner product
//! `⟨(Y, W), (X, V)⟩ = tr(Y^T X) + tr(W V)`.

use crate::error::{GmfError, Result};
use crate::matcore::{inner, symmetrize, Mat};

fn check_shapes(first: &Mat, second: &Mat, names: (&str, &str)) -> Result<()> {
    if !second.is_square() {
        return Err(GmfError::dim(format!(
            "{} must be square, got {}x{}",
            names.1,
            second.nrows(),
            second.ncols()
        )));
    }
    if first.nrows() != second.nrows() {
        return Err(GmfError::dim(format!(
            "{} has {} rows but {} is {}x{}",
            names.0,
            first.nrows(),
            names.1,
            second.nrows(),
            second.ncols()
        )));
    }
    Ok(())
}

/// A point `(X, V)` where the support function is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub x: Mat,
    pub v: Mat,
}

impl DualPoint {
    /// Builds the point, symmetrizing `V`.
    pub fn new(x: Mat, v: Mat) -> Result<Self> {
        check_shapes(&x, &v, ("X", "V"))?;
        Ok(Self {
            x,
            v: symmetrize(&v),
        })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            x: Mat::zeros(n, m),
            v: Mat::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn m(&self) -> usize {
        self.x.ncols()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            x: &self.x * t,
            v: &self.v * t,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x.norm_squared() + self.v.norm_squared()).sqrt()
    }

    pub fn pair(&self, primal: &PrimalPoint) -> f64 {
        primal.pair(self)
    }
}

/// A point `(Y, W)` of the primal space.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub y: Mat,
    pub w: Mat,
}

impl PrimalPoint {
    /// Builds the point, symmetrizing `W`.
    pub fn new(y: Mat, w: Mat) -> Result<Self> {
        check_shapes(&y, &w, ("Y", "W"))?;
        Ok(Self {
            y,
            w: symmetrize(&w),
        })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            y: Mat::zeros(n, m),
            w: Mat::zeros(n, n),
        }
    }

    /// The point `(Y, −½ Y Y^T)` of the graph `D`.
    pub fn on_graph(y: Mat) -> Self {
        let w = &y * y.transpose() * -0.5;
        Self { y, w }
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn m(&self) -> usize {
        self.y.ncols()
    }

    /// `½ Y Y^T + W`, the matrix whose polar-cone membership defines `Ω`.
    pub fn curvature_gap(&self) -> Mat {
        &self.y * self.y.transpose() * 0.5 + &self.w
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            y: &self.y * t,
            w: &self.w * t,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.y.norm_squared() + self.w.norm_squared()).sqrt()
    }

    /// Frobenius distance on `E`.
    pub fn distance(&self, other: &PrimalPoint) -> f64 {
        ((&self.y - &other.y).norm_squared() + (&self.w - &other.w).norm_squared()).sqrt()
    }

    pub fn pair(&self, dual: &DualPoint) -> f64 {
        inner(&self.y, &dual.x) + inner(&self.w, &dual.v)
    }
}

/// Convex combination `(1 − λ)·self + λ·other`.
pub trait Combine {
    fn combine(&self, other: &Self, lambda: f64) -> Self;
}

impl Combine for Mat {
    fn combine(&self, other: &Self, lambda: f64) -> Self {
        self * (1.0 - lambda) + other * lambda
    }
}

impl Combine for PrimalPoint {
    fn combine(&self, other: &Self, lambda: f64) -> Self {
        Self {
            y: self.y.combine(&other.y, lambda),
            w: self.w.combine(&other.w, lambda),
        }
    }
}

impl Combine for DualPoint {
    fn combine(&self, other: &Self, lambda: f64) -> Self {
        Self {
            x: self.x.combine(&other.x, lambda),
            v: self.v.combine(&other.v, lambda),
        }
    }
}

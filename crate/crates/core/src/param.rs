//! Parameter points with an optional symmetric-matrix block, and skew factors.

use crate::error::{Error, Result};
use crate::linalg::SymMat;

/// A point in parameter space: a real vector plus an optional symmetric
/// matrix, with the composite inner product
/// `<p,q> = dot(vec, vec') + tr(mat mat')`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeParam {
    pub vec_part: Vec<f64>,
    pub mat_part: Option<SymMat>,
}

impl CompositeParam {
    pub fn vector(vec_part: Vec<f64>) -> Self {
        CompositeParam {
            vec_part,
            mat_part: None,
        }
    }

    pub fn scalar(x: f64) -> Self {
        CompositeParam::vector(vec![x])
    }

    pub fn with_matrix(vec_part: Vec<f64>, mat_part: SymMat) -> Self {
        CompositeParam {
            vec_part,
            mat_part: Some(mat_part),
        }
    }

    pub fn vec_dim(&self) -> usize {
        self.vec_part.len()
    }

    pub fn mat_dim(&self) -> usize {
        self.mat_part.as_ref().map_or(0, SymMat::dim)
    }

    pub fn is_finite(&self) -> bool {
        self.vec_part.iter().all(|v| v.is_finite())
            && self.mat_part.as_ref().is_none_or(|m| m.is_finite())
    }

    pub fn same_shape(&self, other: &CompositeParam) -> bool {
        self.vec_dim() == other.vec_dim() && self.mat_dim() == other.mat_dim()
    }

    /// Composite inner product: vector dot product plus matrix trace product.
    pub fn inner(&self, other: &CompositeParam) -> Result<f64> {
        if !self.same_shape(other) {
            return Err(Error::Shape(format!(
                "inner product of ({},{}) with ({},{})",
                self.vec_dim(),
                self.mat_dim(),
                other.vec_dim(),
                other.mat_dim()
            )));
        }
        let mut acc: f64 = self
            .vec_part
            .iter()
            .zip(&other.vec_part)
            .map(|(a, b)| a * b)
            .sum();
        if let (Some(a), Some(b)) = (&self.mat_part, &other.mat_part) {
            acc += a.frob_inner(b);
        }
        Ok(acc)
    }

    /// a*self + b*other, component-wise over both blocks.
    pub fn combine(&self, a: f64, other: &CompositeParam, b: f64) -> Result<CompositeParam> {
        if !self.same_shape(other) {
            return Err(Error::Shape(format!(
                "combining ({},{}) with ({},{})",
                self.vec_dim(),
                self.mat_dim(),
                other.vec_dim(),
                other.mat_dim()
            )));
        }
        let vec_part = self
            .vec_part
            .iter()
            .zip(&other.vec_part)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let mat_part = match (&self.mat_part, &other.mat_part) {
            (Some(x), Some(y)) => Some(x.scaled(a).add(&y.scaled(b))),
            (None, None) => None,
            _ => unreachable!("same_shape guarantees matching blocks"),
        };
        Ok(CompositeParam { vec_part, mat_part })
    }

    pub fn midpoint(&self, other: &CompositeParam) -> Result<CompositeParam> {
        self.combine(0.5, other, 0.5)
    }

    pub fn scaled(&self, s: f64) -> CompositeParam {
        CompositeParam {
            vec_part: self.vec_part.iter().map(|v| v * s).collect(),
            mat_part: self.mat_part.as_ref().map(|m| m.scaled(s)),
        }
    }

    /// Max-norm over both blocks.
    pub fn max_abs(&self) -> f64 {
        let v = self
            .vec_part
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        let m = self.mat_part.as_ref().map_or(0.0, |m| m.max_abs());
        v.max(m)
    }

    /// Max-norm of the difference, for convergence checks.
    pub fn max_abs_diff(&self, other: &CompositeParam) -> f64 {
        let mut acc = 0.0f64;
        for (a, b) in self.vec_part.iter().zip(&other.vec_part) {
            acc = acc.max((a - b).abs());
        }
        if let (Some(x), Some(y)) = (&self.mat_part, &other.mat_part) {
            acc = acc.max(x.sub(y).max_abs());
        }
        acc
    }
}

/// A skew factor strictly inside (0,1); outside the open interval the skew
/// divergence loses all discriminatory power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewWeight(f64);

impl SkewWeight {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(SkewWeight(alpha))
        } else {
            Err(Error::Skew { alpha })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The swapped factor 1 - alpha.
    pub fn complement(self) -> SkewWeight {
        SkewWeight(1.0 - self.0)
    }
}

/// The symmetric case alpha = 1/2.
impl Default for SkewWeight {
    fn default() -> Self {
        SkewWeight(0.5)
    }
}

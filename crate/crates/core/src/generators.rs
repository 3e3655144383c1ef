//! Strictly convex generators: the functions F whose Jensen gaps and tangent
//! gaps define every divergence in this crate.
//!
//! A generator exposes its value, gradient, and inverse gradient over an
//! explicit domain. All entry points validate domains eagerly instead of
//! letting logs and inversions return NaN.

use crate::error::{Error, Result};
use crate::linalg::SymMat;
use crate::param::CompositeParam;

/// A strictly convex differentiable function with evaluable value, gradient,
/// and inverse gradient over a declared domain.
pub trait Generator {
    fn name(&self) -> String;

    /// Expected vector dimension of a parameter point.
    fn vec_dim(&self) -> usize;

    /// Expected matrix dimension (0 = no matrix block).
    fn mat_dim(&self) -> usize {
        0
    }

    /// Membership test for the evaluation domain. Implementations should
    /// report the reason a point is rejected.
    fn check_point(&self, p: &CompositeParam) -> Result<()>;

    /// F(p). Must only be called on in-domain points; implementations
    /// validate and fail with a domain error otherwise.
    fn eval(&self, p: &CompositeParam) -> Result<f64>;

    /// Gradient of F. May reject boundary points of the evaluation domain
    /// (e.g. where a log diverges).
    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam>;

    /// Inverse gradient map: `grad_inverse(grad(x)) = x` on the interior.
    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam>;
}

pub(crate) fn check_shape<G: Generator + ?Sized>(g: &G, p: &CompositeParam) -> Result<()> {
    if p.vec_dim() != g.vec_dim() || p.mat_dim() != g.mat_dim() {
        return Err(Error::Domain {
            generator: g.name(),
            point: "point".to_string(),
            reason: format!(
                "shape ({},{}) does not match generator shape ({},{})",
                p.vec_dim(),
                p.mat_dim(),
                g.vec_dim(),
                g.mat_dim()
            ),
        });
    }
    if !p.is_finite() {
        return Err(Error::Domain {
            generator: g.name(),
            point: "point".to_string(),
            reason: "non-finite entries".to_string(),
        });
    }
    Ok(())
}

fn domain_err<G: Generator + ?Sized>(g: &G, reason: impl Into<String>) -> Error {
    Error::Domain {
        generator: g.name(),
        point: "point".to_string(),
        reason: reason.into(),
    }
}

/// F(x) = xᵀ Q x for a symmetric positive-definite Q. Its Jensen gap is the
/// quarter squared Mahalanobis distance and its tangent gap the full one.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: SymMat,
}

impl Quadratic {
    pub fn new(q: SymMat) -> Result<Self> {
        q.cholesky()
            .map_err(|e| Error::NotPd(format!("quadratic generator matrix: {e}")))?;
        Ok(Quadratic { q })
    }

    pub fn identity(dim: usize) -> Self {
        Quadratic {
            q: SymMat::identity(dim),
        }
    }

    pub fn matrix(&self) -> &SymMat {
        &self.q
    }
}

impl Generator for Quadratic {
    fn name(&self) -> String {
        format!("quadratic({})", self.q.dim())
    }

    fn vec_dim(&self) -> usize {
        self.q.dim()
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.q.quad_form(&p.vec_part))
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.check_point(p)?;
        let g = self.q.mul_vec(&p.vec_part);
        Ok(CompositeParam::vector(g.iter().map(|v| 2.0 * v).collect()))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        let chol = self.q.cholesky()?;
        let half: Vec<f64> = g.vec_part.iter().map(|v| 0.5 * v).collect();
        Ok(CompositeParam::vector(chol.solve(&half)))
    }
}

/// Negative Shannon entropy F(x) = Σ xᵢ log xᵢ with the boundary convention
/// 0 log 0 = 0. The gradient rejects boundary points where the log diverges.
#[derive(Debug, Clone)]
pub struct NegShannon {
    dim: usize,
}

impl NegShannon {
    pub fn new(dim: usize) -> Self {
        NegShannon { dim }
    }
}

impl Generator for NegShannon {
    fn name(&self) -> String {
        format!("neg-shannon({})", self.dim)
    }

    fn vec_dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)?;
        if p.vec_part.iter().any(|&x| x < 0.0) {
            return Err(domain_err(self, "negative coordinate"));
        }
        Ok(())
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        Ok(p.vec_part
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { x * x.ln() })
            .sum())
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.check_point(p)?;
        if p.vec_part.contains(&0.0) {
            return Err(domain_err(self, "gradient diverges at the boundary x=0"));
        }
        Ok(CompositeParam::vector(
            p.vec_part.iter().map(|&x| 1.0 + x.ln()).collect(),
        ))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        Ok(CompositeParam::vector(
            g.vec_part.iter().map(|&y| (y - 1.0).exp()).collect(),
        ))
    }
}

/// Extended negative entropy F(x) = Σ (xᵢ log xᵢ - xᵢ), whose tangent gap is
/// the generalized Kullback-Leibler divergence on positive measures.
#[derive(Debug, Clone)]
pub struct NegShannonExtended {
    dim: usize,
}

impl NegShannonExtended {
    pub fn new(dim: usize) -> Self {
        NegShannonExtended { dim }
    }
}

impl Generator for NegShannonExtended {
    fn name(&self) -> String {
        format!("neg-shannon-extended({})", self.dim)
    }

    fn vec_dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)?;
        if p.vec_part.iter().any(|&x| x < 0.0) {
            return Err(domain_err(self, "negative coordinate"));
        }
        Ok(())
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        Ok(p.vec_part
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { x * x.ln() - x })
            .sum())
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.check_point(p)?;
        if p.vec_part.contains(&0.0) {
            return Err(domain_err(self, "gradient diverges at the boundary x=0"));
        }
        Ok(CompositeParam::vector(
            p.vec_part.iter().map(|&x| x.ln()).collect(),
        ))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        Ok(CompositeParam::vector(
            g.vec_part.iter().map(|&y| y.exp()).collect(),
        ))
    }
}

/// Negative Renyi entropy F(x) = (1/(order-1)) log Σ xⱼ^order for
/// order in (0,1), strictly convex on the open positive orthant.
#[derive(Debug, Clone)]
pub struct NegRenyi {
    dim: usize,
    order: f64,
}

impl NegRenyi {
    pub fn new(dim: usize, order: f64) -> Result<Self> {
        if !(order.is_finite() && order > 0.0 && order < 1.0) {
            return Err(Error::Parse(format!(
                "Renyi order must lie in (0,1), got {order}"
            )));
        }
        Ok(NegRenyi { dim, order })
    }

    pub fn order(&self) -> f64 {
        self.order
    }
}

impl Generator for NegRenyi {
    fn name(&self) -> String {
        format!("neg-renyi({}, order={})", self.dim, self.order)
    }

    fn vec_dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)?;
        if p.vec_part.iter().any(|&x| x <= 0.0) {
            return Err(domain_err(self, "coordinates must be strictly positive"));
        }
        Ok(())
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        let s: f64 = p.vec_part.iter().map(|&x| x.powf(self.order)).sum();
        Ok(s.ln() / (self.order - 1.0))
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.check_point(p)?;
        let a = self.order;
        let s: f64 = p.vec_part.iter().map(|&x| x.powf(a)).sum();
        Ok(CompositeParam::vector(
            p.vec_part
                .iter()
                .map(|&x| a / (a - 1.0) * x.powf(a - 1.0) / s)
                .collect(),
        ))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        let a = self.order;
        // y_i = a/(a-1) * x_i^{a-1} / S with S = sum x_j^a. Solving:
        // v_i = y_i (a-1)/a must be positive, S = W^{1-a} with
        // W = sum v_j^{a/(a-1)}, and x_i = (S v_i)^{1/(a-1)}.
        let v: Vec<f64> = g.vec_part.iter().map(|&y| y * (a - 1.0) / a).collect();
        if v.iter().any(|&vi| vi <= 0.0) {
            return Err(domain_err(
                self,
                "gradient image requires strictly negative coordinates",
            ));
        }
        let w: f64 = v.iter().map(|&vi| vi.powf(a / (a - 1.0))).sum();
        let s = w.powf(1.0 - a);
        let x: Vec<f64> = v.iter().map(|&vi| (s * vi).powf(1.0 / (a - 1.0))).collect();
        if x.iter().any(|&xi| !xi.is_finite()) {
            return Err(Error::NonFinite("inverting the Renyi gradient".into()));
        }
        Ok(CompositeParam::vector(x))
    }
}

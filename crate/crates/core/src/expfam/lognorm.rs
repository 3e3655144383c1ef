//! Log-normalizers of the shipped exponential families, exposed as strictly
//! convex generators over natural parameters.
//!
//! The univariate Gaussian uses the canonical chart
//! theta = (mu/sigma^2, -1/(2 sigma^2)), on which
//! F(theta) = -theta1^2/(4 theta2) + (1/2) log(-pi/theta2) is convex
//! (theta2 < 0). The convexity of this chart is exercised numerically in the
//! test suite.

use crate::error::{Error, Result};
use crate::generators::{check_shape, Generator};
use crate::linalg::SymMat;
use crate::param::CompositeParam;

fn domain_err(name: String, reason: impl Into<String>) -> Error {
    Error::Domain {
        generator: name,
        point: "point".to_string(),
        reason: reason.into(),
    }
}

/// F(theta) = exp(theta) on the real line (rate lambda = exp(theta)).
#[derive(Debug, Clone, Copy)]
pub struct PoissonLogNorm;

impl Generator for PoissonLogNorm {
    fn name(&self) -> String {
        "poisson-log-normalizer".to_string()
    }

    fn vec_dim(&self) -> usize {
        1
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        let v = p.vec_part[0].exp();
        if !v.is_finite() {
            return Err(Error::NonFinite("evaluating exp(theta)".into()));
        }
        Ok(v)
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.eval(p).map(CompositeParam::scalar)
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        let y = g.vec_part[0];
        if y <= 0.0 {
            return Err(domain_err(
                self.name(),
                "gradient image requires a positive value",
            ));
        }
        Ok(CompositeParam::scalar(y.ln()))
    }
}

/// Univariate Gaussian log-normalizer on the canonical chart
/// (theta1, theta2) = (mu/sigma^2, -1/(2 sigma^2)), theta2 < 0.
#[derive(Debug, Clone, Copy)]
pub struct GaussianLogNorm;

impl Generator for GaussianLogNorm {
    fn name(&self) -> String {
        "gaussian-log-normalizer".to_string()
    }

    fn vec_dim(&self) -> usize {
        2
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)?;
        if p.vec_part[1] >= 0.0 {
            return Err(domain_err(
                self.name(),
                format!("second coordinate must be negative, got {}", p.vec_part[1]),
            ));
        }
        Ok(())
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        let (t1, t2) = (p.vec_part[0], p.vec_part[1]);
        Ok(-t1 * t1 / (4.0 * t2) + 0.5 * (-std::f64::consts::PI / t2).ln())
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.check_point(p)?;
        let (t1, t2) = (p.vec_part[0], p.vec_part[1]);
        // (E[x], E[x^2]) = (mu, mu^2 + sigma^2)
        Ok(CompositeParam::vector(vec![
            -t1 / (2.0 * t2),
            t1 * t1 / (4.0 * t2 * t2) - 1.0 / (2.0 * t2),
        ]))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        let (m1, m2) = (g.vec_part[0], g.vec_part[1]);
        let variance = m2 - m1 * m1;
        if variance <= 0.0 {
            return Err(domain_err(
                self.name(),
                format!("moment pair has non-positive variance {variance}"),
            ));
        }
        Ok(CompositeParam::vector(vec![
            m1 / variance,
            -0.5 / variance,
        ]))
    }
}

/// Multinomial (single trial, d categories) log-normalizer over the d-1 free
/// natural parameters theta_i = log(p_i / p_d):
/// F(theta) = log(1 + sum exp theta_i), evaluated with log-sum-exp to stay
/// finite for near-degenerate simplices.
#[derive(Debug, Clone, Copy)]
pub struct MultinomialLogNorm {
    categories: usize,
}

impl MultinomialLogNorm {
    pub fn new(categories: usize) -> Result<Self> {
        if categories < 2 {
            return Err(Error::Parse(format!(
                "multinomial needs at least 2 categories, got {categories}"
            )));
        }
        Ok(MultinomialLogNorm { categories })
    }

    pub fn categories(&self) -> usize {
        self.categories
    }

    /// log(1 + sum exp theta_i)
    fn lse(&self, theta: &[f64]) -> f64 {
        let m = theta.iter().fold(0.0f64, |acc, &t| acc.max(t));
        let s: f64 = theta.iter().map(|&t| (t - m).exp()).sum();
        m + ((-m).exp() + s).ln()
    }
}

impl Generator for MultinomialLogNorm {
    fn name(&self) -> String {
        format!("multinomial-log-normalizer({})", self.categories)
    }

    fn vec_dim(&self) -> usize {
        self.categories - 1
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.lse(&p.vec_part))
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        self.check_point(p)?;
        let f = self.lse(&p.vec_part);
        Ok(CompositeParam::vector(
            p.vec_part.iter().map(|&t| (t - f).exp()).collect(),
        ))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        let total: f64 = g.vec_part.iter().sum();
        if g.vec_part.iter().any(|&v| v <= 0.0) || total >= 1.0 {
            return Err(domain_err(
                self.name(),
                "gradient image must have positive entries summing below 1",
            ));
        }
        let rest = 1.0 - total;
        Ok(CompositeParam::vector(
            g.vec_part.iter().map(|&v| (v / rest).ln()).collect(),
        ))
    }
}

/// Multivariate Gaussian log-normalizer over composite natural parameters
/// theta = (Sigma^{-1} mu, (1/2) Sigma^{-1}):
/// F(theta) = (1/4) theta1' theta2^{-1} theta1
///            - (1/2) log det theta2 + (d/2) log pi.
#[derive(Debug, Clone, Copy)]
pub struct MvGaussianLogNorm {
    dim: usize,
}

impl MvGaussianLogNorm {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        Ok(MvGaussianLogNorm { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn mat_block<'a>(&self, p: &'a CompositeParam) -> &'a SymMat {
        p.mat_part.as_ref().expect("shape checked")
    }
}

impl Generator for MvGaussianLogNorm {
    fn name(&self) -> String {
        format!("mvgaussian-log-normalizer({})", self.dim)
    }

    fn vec_dim(&self) -> usize {
        self.dim
    }

    fn mat_dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, p: &CompositeParam) -> Result<()> {
        check_shape(self, p)?;
        // PD test by factorization attempt; determinant signs are unreliable.
        self.mat_block(p)
            .cholesky()
            .map_err(|e| domain_err(self.name(), format!("matrix block not PD: {e}")))?;
        Ok(())
    }

    fn eval(&self, p: &CompositeParam) -> Result<f64> {
        check_shape(self, p)?;
        let t2 = self.mat_block(p);
        let chol = t2
            .cholesky()
            .map_err(|e| domain_err(self.name(), format!("matrix block not PD: {e}")))?;
        let x = chol.solve(&p.vec_part);
        let quad: f64 = p.vec_part.iter().zip(&x).map(|(a, b)| a * b).sum();
        Ok(0.25 * quad - 0.5 * chol.log_det()
            + 0.5 * self.dim as f64 * std::f64::consts::PI.ln())
    }

    fn grad(&self, p: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, p)?;
        let t2 = self.mat_block(p);
        let chol = t2
            .cholesky()
            .map_err(|e| domain_err(self.name(), format!("matrix block not PD: {e}")))?;
        // mu = (1/2) theta2^{-1} theta1, Sigma = (1/2) theta2^{-1}
        let mu: Vec<f64> = chol.solve(&p.vec_part).iter().map(|v| 0.5 * v).collect();
        let sigma = chol.inverse().scaled(0.5);
        // d/dtheta2 = -(Sigma + mu mu')
        let mat = sigma.add(&SymMat::outer(&mu)).scaled(-1.0);
        Ok(CompositeParam::with_matrix(mu, mat))
    }

    fn grad_inverse(&self, g: &CompositeParam) -> Result<CompositeParam> {
        check_shape(self, g)?;
        let mu = &g.vec_part;
        let eta2 = g.mat_part.as_ref().expect("shape checked");
        // Sigma = -eta2 - mu mu'
        let sigma = eta2.scaled(-1.0).sub(&SymMat::outer(mu));
        let chol = sigma.cholesky().map_err(|e| {
            domain_err(
                self.name(),
                format!("moment pair implies non-PD covariance: {e}"),
            )
        })?;
        let t1 = chol.solve(mu);
        let t2 = chol.inverse().scaled(0.5);
        Ok(CompositeParam::with_matrix(t1, t2))
    }
}

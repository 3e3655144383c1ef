//! Canonical exponential families (Poisson, multinomial, univariate and
//! multivariate Gaussian) and the statistical distances that reduce to
//! Jensen-type divergences on their natural parameters: Bhattacharyya,
//! skew Bhattacharyya / Chernoff, Hellinger, alpha-divergences, and KL as a
//! Bregman divergence on swapped natural parameters.

mod lognorm;

pub use lognorm::{GaussianLogNorm, MultinomialLogNorm, MvGaussianLogNorm, PoissonLogNorm};

use serde::{Deserialize, Serialize};

use crate::divergence::{self, clamp_nonneg};
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::SymMat;
use crate::param::{CompositeParam, SkewWeight};

/// A boxed generator usable across threads.
pub type DynGenerator = Box<dyn Generator + Send + Sync>;

/// Mean and covariance of a (multivariate) Gaussian; the covariance must be
/// symmetric positive definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianParamJson", into = "GaussianParamJson")]
pub struct GaussianParam {
    mean: Vec<f64>,
    covariance: SymMat,
}

#[derive(Serialize, Deserialize)]
struct GaussianParamJson {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<GaussianParamJson> for GaussianParam {
    type Error = Error;

    fn try_from(j: GaussianParamJson) -> Result<Self> {
        GaussianParam::new(j.mean, SymMat::from_full(&j.cov)?)
    }
}

impl From<GaussianParam> for GaussianParamJson {
    fn from(g: GaussianParam) -> Self {
        GaussianParamJson {
            cov: g.covariance.to_full(),
            mean: g.mean,
        }
    }
}

impl GaussianParam {
    pub fn new(mean: Vec<f64>, covariance: SymMat) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::Shape(format!(
                "mean has dimension {}, covariance {}",
                mean.len(),
                covariance.dim()
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) || !covariance.is_finite() {
            return Err(Error::Parse("non-finite Gaussian parameter".into()));
        }
        covariance
            .cholesky()
            .map_err(|e| Error::NotPd(format!("covariance: {e}")))?;
        Ok(GaussianParam { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &SymMat {
        &self.covariance
    }
}

/// Family-specific source parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceParam {
    Poisson { rate: f64 },
    Gaussian { mean: f64, variance: f64 },
    Multinomial { probs: Vec<f64> },
    MvGaussian(GaussianParam),
}

#[derive(Serialize, Deserialize)]
struct PoissonJson {
    rate: f64,
}

#[derive(Serialize, Deserialize)]
struct GaussianJson {
    mean: f64,
    variance: f64,
}

#[derive(Serialize, Deserialize)]
struct MultinomialJson {
    probs: Vec<f64>,
}

/// Observation support of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// Counts 0, 1, 2, ...
    NonNegativeIntegers,
    /// Category indices 0..d
    Categories(usize),
    /// The real line
    RealLine,
    /// d-dimensional real vectors
    RealVector(usize),
}

/// One of the shipped exponential families.
///
/// ```
/// use burbea_rao::{ExpFamily, SourceParam};
///
/// let fam = ExpFamily::poisson();
/// let p = SourceParam::Poisson { rate: 1.0 };
/// let q = SourceParam::Poisson { rate: 4.0 };
/// // Closed form (sqrt(1) - sqrt(4))^2 / 2 = 0.5.
/// let b = fam.bhattacharyya(&p, &q).unwrap();
/// assert!((b - 0.5).abs() < 1e-12);
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpFamily {
    Poisson,
    Gaussian,
    Multinomial { categories: usize },
    MvGaussian { dim: usize },
}

impl ExpFamily {
    pub fn poisson() -> Self {
        ExpFamily::Poisson
    }

    pub fn gaussian() -> Self {
        ExpFamily::Gaussian
    }

    pub fn multinomial(categories: usize) -> Result<Self> {
        MultinomialLogNorm::new(categories)?;
        Ok(ExpFamily::Multinomial { categories })
    }

    pub fn mv_gaussian(dim: usize) -> Result<Self> {
        MvGaussianLogNorm::new(dim)?;
        Ok(ExpFamily::MvGaussian { dim })
    }

    pub fn name(&self) -> String {
        match self {
            ExpFamily::Poisson => "poisson".to_string(),
            ExpFamily::Gaussian => "gaussian".to_string(),
            ExpFamily::Multinomial { categories } => format!("multinomial({categories})"),
            ExpFamily::MvGaussian { dim } => format!("mvgaussian({dim})"),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            ExpFamily::Poisson => Support::NonNegativeIntegers,
            ExpFamily::Gaussian => Support::RealLine,
            ExpFamily::Multinomial { categories } => Support::Categories(*categories),
            ExpFamily::MvGaussian { dim } => Support::RealVector(*dim),
        }
    }

    /// The family's log-normalizer as a generator over natural parameters.
    pub fn log_normalizer(&self) -> DynGenerator {
        match self {
            ExpFamily::Poisson => Box::new(PoissonLogNorm),
            ExpFamily::Gaussian => Box::new(GaussianLogNorm),
            ExpFamily::Multinomial { categories } => {
                Box::new(MultinomialLogNorm::new(*categories).expect("validated on construction"))
            }
            ExpFamily::MvGaussian { dim } => {
                Box::new(MvGaussianLogNorm::new(*dim).expect("validated on construction"))
            }
        }
    }

    fn check_source(&self, s: &SourceParam) -> Result<()> {
        let mismatch = || {
            Error::Parse(format!(
                "source parameter does not belong to family {}",
                self.name()
            ))
        };
        match (self, s) {
            (ExpFamily::Poisson, SourceParam::Poisson { rate }) => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::Domain {
                        generator: self.name(),
                        point: "rate".to_string(),
                        reason: format!("rate must be positive, got {rate}"),
                    });
                }
                Ok(())
            }
            (ExpFamily::Gaussian, SourceParam::Gaussian { mean, variance }) => {
                if !mean.is_finite() || !(variance.is_finite() && *variance > 0.0) {
                    return Err(Error::Domain {
                        generator: self.name(),
                        point: "variance".to_string(),
                        reason: format!("variance must be positive, got {variance}"),
                    });
                }
                Ok(())
            }
            (ExpFamily::Multinomial { categories }, SourceParam::Multinomial { probs }) => {
                if probs.len() != *categories {
                    return Err(mismatch());
                }
                if probs.iter().any(|&p| !p.is_finite() || p <= 0.0) {
                    return Err(Error::Domain {
                        generator: self.name(),
                        point: "probs".to_string(),
                        reason: "probabilities must be strictly positive".to_string(),
                    });
                }
                let sum: f64 = probs.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::Domain {
                        generator: self.name(),
                        point: "probs".to_string(),
                        reason: format!("probabilities sum to {sum}, expected 1"),
                    });
                }
                Ok(())
            }
            (ExpFamily::MvGaussian { dim }, SourceParam::MvGaussian(g)) => {
                if g.dim() != *dim {
                    return Err(mismatch());
                }
                Ok(())
            }
            _ => Err(mismatch()),
        }
    }

    /// The 1-to-1 coordinate map from source to natural parameters.
    pub fn to_natural(&self, s: &SourceParam) -> Result<CompositeParam> {
        self.check_source(s)?;
        match (self, s) {
            (ExpFamily::Poisson, SourceParam::Poisson { rate }) => {
                Ok(CompositeParam::scalar(rate.ln()))
            }
            (ExpFamily::Gaussian, SourceParam::Gaussian { mean, variance }) => Ok(
                CompositeParam::vector(vec![mean / variance, -0.5 / variance]),
            ),
            (ExpFamily::Multinomial { categories }, SourceParam::Multinomial { probs }) => {
                let last = probs[*categories - 1];
                Ok(CompositeParam::vector(
                    probs[..*categories - 1]
                        .iter()
                        .map(|&p| (p / last).ln())
                        .collect(),
                ))
            }
            (ExpFamily::MvGaussian { .. }, SourceParam::MvGaussian(g)) => {
                let chol = g.covariance().cholesky()?;
                let t1 = chol.solve(g.mean());
                let t2 = chol.inverse().scaled(0.5);
                Ok(CompositeParam::with_matrix(t1, t2))
            }
            _ => unreachable!("check_source filters mismatches"),
        }
    }

    /// The inverse coordinate map from natural back to source parameters.
    pub fn to_source(&self, t: &CompositeParam) -> Result<SourceParam> {
        let logn = self.log_normalizer();
        logn.check_point(t)?;
        match self {
            ExpFamily::Poisson => Ok(SourceParam::Poisson {
                rate: t.vec_part[0].exp(),
            }),
            ExpFamily::Gaussian => {
                let variance = -0.5 / t.vec_part[1];
                Ok(SourceParam::Gaussian {
                    mean: t.vec_part[0] * variance,
                    variance,
                })
            }
            ExpFamily::Multinomial { categories } => {
                // p_i = exp(theta_i - F), p_d = exp(-F)
                let f = logn.eval(t)?;
                let mut probs: Vec<f64> =
                    t.vec_part.iter().map(|&ti| (ti - f).exp()).collect();
                probs.push((-f).exp());
                debug_assert_eq!(probs.len(), *categories);
                Ok(SourceParam::Multinomial { probs })
            }
            ExpFamily::MvGaussian { .. } => {
                let t2 = t.mat_part.as_ref().expect("shape checked");
                let chol = t2.cholesky()?;
                // Sigma = (1/2) theta2^{-1}, mu = Sigma theta1 = (1/2) theta2^{-1} theta1
                let mean: Vec<f64> = chol.solve(&t.vec_part).iter().map(|v| 0.5 * v).collect();
                let covariance = chol.inverse().scaled(0.5);
                Ok(SourceParam::MvGaussian(GaussianParam::new(
                    mean, covariance,
                )?))
            }
        }
    }

    /// Bhattacharyya distance: the Jensen gap of the log-normalizer at the
    /// natural parameters.
    pub fn bhattacharyya(&self, sp: &SourceParam, sq: &SourceParam) -> Result<f64> {
        let logn = self.log_normalizer();
        divergence::burbea_rao(
            logn.as_ref(),
            &self.to_natural(sp)?,
            &self.to_natural(sq)?,
        )
    }

    /// Skew Bhattacharyya distance; equals -ln of the Chernoff coefficient.
    pub fn skew_bhattacharyya(
        &self,
        sp: &SourceParam,
        sq: &SourceParam,
        a: SkewWeight,
    ) -> Result<f64> {
        let logn = self.log_normalizer();
        divergence::skew_burbea_rao(
            logn.as_ref(),
            &self.to_natural(sp)?,
            &self.to_natural(sq)?,
            a,
        )
    }

    /// Chernoff coefficient exp(-skew Bhattacharyya), in (0, 1].
    pub fn chernoff_coefficient(
        &self,
        sp: &SourceParam,
        sq: &SourceParam,
        a: SkewWeight,
    ) -> Result<f64> {
        Ok((-self.skew_bhattacharyya(sp, sq, a)?).exp())
    }

    /// Hellinger metric sqrt(1 - Chernoff coefficient at alpha = 1/2).
    pub fn hellinger(&self, sp: &SourceParam, sq: &SourceParam) -> Result<f64> {
        let c = self.chernoff_coefficient(sp, sq, SkewWeight::default())?;
        Ok((1.0 - c).max(0.0).sqrt())
    }

    /// Alpha-divergence with the piecewise definition: the closed form for
    /// alpha != +-1, and the KL dispatch at the endpoints.
    pub fn amari_alpha_divergence(
        &self,
        sp: &SourceParam,
        sq: &SourceParam,
        alpha: f64,
    ) -> Result<f64> {
        if !alpha.is_finite() {
            return Err(Error::Parse(format!("alpha must be finite, got {alpha}")));
        }
        if alpha == -1.0 {
            return self.kl_divergence(sp, sq);
        }
        if alpha == 1.0 {
            return self.kl_divergence(sq, sp);
        }
        let remapped = 0.5 * (1.0 - alpha);
        let logn = self.log_normalizer();
        let gap = divergence::skew_jensen_gap(
            logn.as_ref(),
            &self.to_natural(sp)?,
            &self.to_natural(sq)?,
            remapped,
        )?;
        clamp_nonneg(
            4.0 / (1.0 - alpha * alpha) * (1.0 - (-gap).exp()),
            "alpha-divergence",
        )
    }

    /// Kullback-Leibler divergence: the Bregman divergence of the
    /// log-normalizer on swapped natural parameters.
    pub fn kl_divergence(&self, sp: &SourceParam, sq: &SourceParam) -> Result<f64> {
        let logn = self.log_normalizer();
        divergence::bregman(
            logn.as_ref(),
            &self.to_natural(sq)?,
            &self.to_natural(sp)?,
        )
    }

    /// Log-density of the canonical form exp(<t(x), theta> - F(theta) + k(x))
    /// at a natural parameter.
    ///
    /// Observations are passed as slices: a count `[k]` for Poisson, a point
    /// `[x]` for the univariate Gaussian, a category index `[i]` for the
    /// multinomial, and the full vector for the multivariate Gaussian.
    pub fn log_density(&self, theta: &CompositeParam, x: &[f64]) -> Result<f64> {
        let logn = self.log_normalizer();
        logn.check_point(theta)?;
        let f = logn.eval(theta)?;
        match self {
            ExpFamily::Poisson => {
                if x.len() != 1 || x[0] < 0.0 || x[0].fract() != 0.0 {
                    return Err(Error::Parse(format!(
                        "Poisson observation must be a non-negative integer, got {x:?}"
                    )));
                }
                let k = x[0];
                Ok(k * theta.vec_part[0] - f - ln_factorial(k as u64))
            }
            ExpFamily::Gaussian => {
                if x.len() != 1 {
                    return Err(Error::Parse("expected a single observation".into()));
                }
                let v = x[0];
                Ok(theta.vec_part[0] * v + theta.vec_part[1] * v * v - f)
            }
            ExpFamily::Multinomial { categories } => {
                if x.len() != 1 || x[0].fract() != 0.0 || x[0] < 0.0 {
                    return Err(Error::Parse(
                        "multinomial observation must be a category index".into(),
                    ));
                }
                let i = x[0] as usize;
                if i >= *categories {
                    return Err(Error::Parse(format!(
                        "category {i} out of range for {categories} categories"
                    )));
                }
                if i + 1 == *categories {
                    Ok(-f)
                } else {
                    Ok(theta.vec_part[i] - f)
                }
            }
            ExpFamily::MvGaussian { dim } => {
                if x.len() != *dim {
                    return Err(Error::Shape(format!(
                        "observation has dimension {}, expected {dim}",
                        x.len()
                    )));
                }
                let t2 = theta.mat_part.as_ref().expect("shape checked");
                let dot: f64 = theta.vec_part.iter().zip(x).map(|(a, b)| a * b).sum();
                Ok(dot - t2.quad_form(x) - f)
            }
        }
    }

    /// Density of the canonical form at a natural parameter.
    pub fn density(&self, theta: &CompositeParam, x: &[f64]) -> Result<f64> {
        Ok(self.log_density(theta, x)?.exp())
    }

    /// Parse a family-specific source parameter from its JSON object.
    pub fn source_from_json(&self, json: &str) -> Result<SourceParam> {
        let parse_err = |e: serde_json::Error| Error::Parse(format!("{}: {e}", self.name()));
        let param = match self {
            ExpFamily::Poisson => {
                let p: PoissonJson = serde_json::from_str(json).map_err(parse_err)?;
                SourceParam::Poisson { rate: p.rate }
            }
            ExpFamily::Gaussian => {
                let p: GaussianJson = serde_json::from_str(json).map_err(parse_err)?;
                SourceParam::Gaussian {
                    mean: p.mean,
                    variance: p.variance,
                }
            }
            ExpFamily::Multinomial { .. } => {
                let p: MultinomialJson = serde_json::from_str(json).map_err(parse_err)?;
                SourceParam::Multinomial { probs: p.probs }
            }
            ExpFamily::MvGaussian { .. } => {
                let p: GaussianParam = serde_json::from_str(json).map_err(parse_err)?;
                SourceParam::MvGaussian(p)
            }
        };
        self.check_source(&param)?;
        Ok(param)
    }

    /// Serialize a source parameter to its JSON object.
    pub fn source_to_json(&self, s: &SourceParam) -> Result<serde_json::Value> {
        self.check_source(s)?;
        let to_err = |e: serde_json::Error| Error::Parse(e.to_string());
        match s {
            SourceParam::Poisson { rate } => {
                serde_json::to_value(PoissonJson { rate: *rate }).map_err(to_err)
            }
            SourceParam::Gaussian { mean, variance } => serde_json::to_value(GaussianJson {
                mean: *mean,
                variance: *variance,
            })
            .map_err(to_err),
            SourceParam::Multinomial { probs } => serde_json::to_value(MultinomialJson {
                probs: probs.clone(),
            })
            .map_err(to_err),
            SourceParam::MvGaussian(g) => serde_json::to_value(g.clone()).map_err(to_err),
        }
    }
}

/// ln(k!) by direct summation for small k and a Stirling series beyond.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k < 128 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let x = k as f64;
    let x2 = x * x;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
        + 1.0 / (1260.0 * x2 * x2 * x)
}

//! Divergences built from a strictly convex generator: Jensen gaps (plain,
//! skew, scaled), Bregman tangent gaps, their symmetrization, and the
//! population diversity measure.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::param::{CompositeParam, SkewWeight};

/// Tiny negative round-off is clamped to zero; anything more negative is a
/// bug, not noise, and is surfaced as an internal-consistency error.
pub(crate) const NONNEG_SLACK: f64 = 1e-12;

pub(crate) fn clamp_nonneg(value: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NONNEG_SLACK {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!(
            "{what} evaluated to {value}, below the -1e-12 round-off slack"
        )))
    }
}

fn eval_at<G: Generator + ?Sized>(g: &G, p: &CompositeParam, label: &str) -> Result<f64> {
    g.eval(p).map_err(|e| e.for_point(label))
}

/// Jensen gap (F(p)+F(q))/2 - F((p+q)/2): symmetric, non-negative, zero iff
/// p = q for strictly convex F.
///
/// For the quadratic generator this is a quarter of the squared Mahalanobis
/// distance:
///
/// ```
/// use burbea_rao::{burbea_rao, CompositeParam, Quadratic};
///
/// let g = Quadratic::identity(2);
/// let p = CompositeParam::vector(vec![0.0, 0.0]);
/// let q = CompositeParam::vector(vec![2.0, 2.0]);
/// let d = burbea_rao(&g, &p, &q).unwrap();
/// assert!((d - 2.0).abs() < 1e-12); // (1/4) * ||p - q||^2
/// ```
pub fn burbea_rao<G: Generator + ?Sized>(
    g: &G,
    p: &CompositeParam,
    q: &CompositeParam,
) -> Result<f64> {
    let fp = eval_at(g, p, "p")?;
    let fq = eval_at(g, q, "q")?;
    let mid = p.midpoint(q)?;
    let fm = eval_at(g, &mid, "midpoint")?;
    clamp_nonneg(0.5 * fp + 0.5 * fq - fm, "Burbea-Rao divergence")
}

/// Skew Jensen gap a F(p) + (1-a) F(q) - F(a p + (1-a) q).
pub fn skew_burbea_rao<G: Generator + ?Sized>(
    g: &G,
    p: &CompositeParam,
    q: &CompositeParam,
    a: SkewWeight,
) -> Result<f64> {
    let alpha = a.value();
    let fp = eval_at(g, p, "p")?;
    let fq = eval_at(g, q, "q")?;
    let comb = p.combine(alpha, q, 1.0 - alpha)?;
    let fc = eval_at(g, &comb, "skew combination")?;
    clamp_nonneg(
        alpha * fp + (1.0 - alpha) * fq - fc,
        "skew Burbea-Rao divergence",
    )
}

/// Unclamped skew Jensen gap a F(p) + (1-a) F(q) - F(a p + (1-a) q) for any
/// real a whose combination stays in the domain. Non-negative inside (0,1),
/// non-positive outside [0,1].
pub(crate) fn skew_jensen_gap<G: Generator + ?Sized>(
    g: &G,
    p: &CompositeParam,
    q: &CompositeParam,
    alpha: f64,
) -> Result<f64> {
    let fp = eval_at(g, p, "p")?;
    let fq = eval_at(g, q, "q")?;
    let comb = p.combine(alpha, q, 1.0 - alpha)?;
    let fc = eval_at(g, &comb, "skew combination")?;
    Ok(alpha * fp + (1.0 - alpha) * fq - fc)
}

/// Skew Jensen gap rescaled by 1/(a(1-a)). For a in (0,1) this is the plain
/// skew divergence divided by a(1-a); outside [0,1] the (negative) gap over
/// the negative scale stays non-negative, provided the extrapolated point
/// a p + (1-a) q remains inside the domain.
pub fn scaled_skew_burbea_rao<G: Generator + ?Sized>(
    g: &G,
    p: &CompositeParam,
    q: &CompositeParam,
    alpha: f64,
) -> Result<f64> {
    if !alpha.is_finite() || alpha == 0.0 || alpha == 1.0 {
        return Err(Error::Scale { alpha });
    }
    let gap = skew_jensen_gap(g, p, q, alpha)?;
    clamp_nonneg(
        gap / (alpha * (1.0 - alpha)),
        "scaled skew Burbea-Rao divergence",
    )
}

/// Bregman divergence F(p) - F(q) - <p - q, grad F(q)>: the positive tail of
/// the first-order Taylor expansion of F at q.
pub fn bregman<G: Generator + ?Sized>(
    g: &G,
    p: &CompositeParam,
    q: &CompositeParam,
) -> Result<f64> {
    let fp = eval_at(g, p, "p")?;
    let fq = eval_at(g, q, "q")?;
    let gq = g.grad(q).map_err(|e| e.for_point("q"))?;
    let diff = p.combine(1.0, q, -1.0)?;
    clamp_nonneg(fp - fq - diff.inner(&gq)?, "Bregman divergence")
}

/// Symmetrized Bregman divergence (B(p,q)+B(q,p))/2, which collapses to
/// (1/2) <p - q, grad F(p) - grad F(q)>.
pub fn jeffreys_bregman<G: Generator + ?Sized>(
    g: &G,
    p: &CompositeParam,
    q: &CompositeParam,
) -> Result<f64> {
    let gp = g.grad(p).map_err(|e| e.for_point("p"))?;
    let gq = g.grad(q).map_err(|e| e.for_point("q"))?;
    let diff = p.combine(1.0, q, -1.0)?;
    let gdiff = gp.combine(1.0, &gq, -1.0)?;
    clamp_nonneg(0.5 * diff.inner(&gdiff)?, "Jeffreys-Bregman divergence")
}

/// Diversity of a weighted population: Σ wᵢ F(pᵢ) - F(Σ wᵢ pᵢ).
pub fn population_diversity<G: Generator + ?Sized>(
    g: &G,
    points: &[CompositeParam],
    weights: &[f64],
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Weight("empty population".to_string()));
    }
    if points.len() != weights.len() {
        return Err(Error::Weight(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    validate_weights(weights)?;
    let mut mean = points[0].scaled(weights[0]);
    let mut value = 0.0;
    for (i, (p, &w)) in points.iter().zip(weights).enumerate() {
        value += w * g.eval(p).map_err(|e| e.for_point(&format!("points[{i}]")))?;
        if i > 0 {
            mean = mean.combine(1.0, p, w)?;
        }
    }
    let fmean = eval_at(g, &mean, "weighted mean")?;
    clamp_nonneg(value - fmean, "population diversity")
}

/// Positive weights summing to one within 1e-9.
pub(crate) fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::Weight(
            "weights must be strictly positive and finite".to_string(),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Weight(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

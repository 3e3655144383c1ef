//! Fixed-point solver for (skew) Jensen-gap centroids.
//!
//! The objective Σ wᵢ BR^{(αᵢ)}(x, pᵢ) splits into a convex and a concave
//! part, so a convex-concave iteration applies: each update maps the iterate
//! through the gradient, averages, and maps back through the inverse
//! gradient. The fixed point is unique because the gradient of a strictly
//! convex generator is strictly monotone.

use crate::divergence::{skew_burbea_rao, validate_weights};
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::param::{CompositeParam, SkewWeight};

/// Points with normalized weights and per-point skew factors.
///
/// Zero weights are permitted (the points are ignored); at least one weight
/// must be positive and the total must be 1 within 1e-9.
#[derive(Debug, Clone)]
pub struct WeightedSet {
    points: Vec<CompositeParam>,
    weights: Vec<f64>,
    skews: Vec<SkewWeight>,
}

impl WeightedSet {
    pub fn new(points: Vec<CompositeParam>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Weight("need at least one point".to_string()));
        }
        if points.len() != weights.len() {
            return Err(Error::Weight(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Weight(
                "weights must be finite and non-negative".to_string(),
            ));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::Weight("all weights are zero".to_string()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Weight(format!("weights sum to {sum}, expected 1")));
        }
        for p in &points[1..] {
            if !p.same_shape(&points[0]) {
                return Err(Error::Shape("points have mixed shapes".to_string()));
            }
        }
        let skews = vec![SkewWeight::default(); points.len()];
        Ok(WeightedSet {
            points,
            weights,
            skews,
        })
    }

    /// Equal weights 1/n, symmetric skews.
    pub fn uniform(points: Vec<CompositeParam>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Weight("need at least one point".to_string()));
        }
        WeightedSet::new(points, vec![1.0 / n as f64; n])
    }

    pub fn with_skews(mut self, skews: Vec<SkewWeight>) -> Result<Self> {
        if skews.len() != self.points.len() {
            return Err(Error::Weight(format!(
                "{} skews for {} points",
                skews.len(),
                self.points.len()
            )));
        }
        self.skews = skews;
        Ok(self)
    }

    pub fn with_uniform_skew(mut self, a: SkewWeight) -> Self {
        self.skews = vec![a; self.points.len()];
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CompositeParam] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn skews(&self) -> &[SkewWeight] {
        &self.skews
    }

    /// Indices of points with strictly positive weight.
    fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.points.len()).filter(|&i| self.weights[i] > 0.0)
    }

    fn active_count(&self) -> usize {
        self.active().count()
    }
}

/// Stopping rule and initialization for the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative-change threshold on the iterate (max norm over both blocks).
    pub tolerance: f64,
    pub max_iterations: usize,
    pub init: Init,
}

#[derive(Debug, Clone)]
pub enum Init {
    /// Start from the weighted arithmetic mean of the points.
    WeightedMean,
    /// Start from an explicit in-domain point.
    Explicit(CompositeParam),
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-10,
            max_iterations: 200,
            init: Init::WeightedMean,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Parse(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Parse("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// What happened during a solve.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub iterations: usize,
    /// Objective value at the initial point followed by one entry per
    /// iteration; non-increasing up to round-off.
    pub energy_trace: Vec<f64>,
    pub converged: bool,
    pub final_step: f64,
}

/// Weighted skew Jensen-gap objective Σ wᵢ BR^{(αᵢ)}(c, pᵢ).
pub fn energy<G: Generator + ?Sized>(g: &G, s: &WeightedSet, c: &CompositeParam) -> Result<f64> {
    let mut total = 0.0;
    for i in s.active() {
        total += s.weights[i] * skew_burbea_rao(g, c, &s.points[i], s.skews[i])?;
    }
    Ok(total)
}

/// One fixed-point update:
/// c' = ∇F⁻¹( Σ wᵢαᵢ ∇F(αᵢ c + (1-αᵢ) pᵢ) / Σ wᵢαᵢ ).
pub fn cccp_step<G: Generator + ?Sized>(
    g: &G,
    s: &WeightedSet,
    c: &CompositeParam,
) -> Result<CompositeParam> {
    let target = averaged_gradient(g, s, c)?;
    let next = g.grad_inverse(&target)?;
    if !next.is_finite() {
        return Err(Error::NonFinite("inverting the averaged gradient".into()));
    }
    Ok(next)
}

fn averaged_gradient<G: Generator + ?Sized>(
    g: &G,
    s: &WeightedSet,
    c: &CompositeParam,
) -> Result<CompositeParam> {
    let mut total_wa = 0.0;
    let mut acc: Option<CompositeParam> = None;
    for i in s.active() {
        let alpha = s.skews[i].value();
        let wa = s.weights[i] * alpha;
        let mix = c.combine(alpha, &s.points[i], 1.0 - alpha)?;
        let grad = g
            .grad(&mix)
            .map_err(|e| e.for_point(&format!("skew mix of the iterate with points[{i}]")))?;
        if !grad.is_finite() {
            return Err(Error::NonFinite("evaluating the gradient".into()));
        }
        acc = Some(match acc {
            None => grad.scaled(wa),
            Some(a) => a.combine(1.0, &grad, wa)?,
        });
        total_wa += wa;
    }
    let acc = acc.expect("at least one active point");
    Ok(acc.scaled(1.0 / total_wa))
}

/// Weighted arithmetic mean of the active points (the right-sided tangent-gap
/// centroid, independent of the generator).
pub fn bregman_right_centroid(s: &WeightedSet) -> Result<CompositeParam> {
    let mut acc: Option<CompositeParam> = None;
    for i in s.active() {
        let w = s.weights[i];
        acc = Some(match acc {
            None => s.points[i].scaled(w),
            Some(a) => a.combine(1.0, &s.points[i], w)?,
        });
    }
    Ok(acc.expect("non-empty set"))
}

/// Quasi-arithmetic mean in the gradient representation,
/// ∇F⁻¹(Σ wᵢ ∇F(pᵢ)): the left-sided tangent-gap centroid.
pub fn bregman_left_centroid<G: Generator + ?Sized>(
    g: &G,
    s: &WeightedSet,
) -> Result<CompositeParam> {
    let mut acc: Option<CompositeParam> = None;
    for i in s.active() {
        let grad = g
            .grad(&s.points[i])
            .map_err(|e| e.for_point(&format!("points[{i}]")))?;
        let w = s.weights[i];
        acc = Some(match acc {
            None => grad.scaled(w),
            Some(a) => a.combine(1.0, &grad, w)?,
        });
    }
    g.grad_inverse(&acc.expect("non-empty set"))
}

/// Iterate the fixed-point update until the relative step drops below the
/// tolerance or the iteration budget runs out. Hitting the budget is flagged
/// in the report, not an error.
///
/// ```
/// use burbea_rao::{solve_centroid, CompositeParam, NegShannon, SolverConfig, WeightedSet};
///
/// // Symmetric centroid of {1, 4} under the x log x generator: between the
/// // geometric mean (2) and the arithmetic mean (2.5).
/// let g = NegShannon::new(1);
/// let set = WeightedSet::uniform(vec![
///     CompositeParam::scalar(1.0),
///     CompositeParam::scalar(4.0),
/// ]).unwrap();
/// let (c, report) = solve_centroid(&g, &set, &SolverConfig::default()).unwrap();
/// assert!(report.converged);
/// assert!(c.vec_part[0] > 2.0 && c.vec_part[0] < 2.5);
/// ```
pub fn solve_centroid<G: Generator + ?Sized>(
    g: &G,
    s: &WeightedSet,
    cfg: &SolverConfig,
) -> Result<(CompositeParam, SolverReport)> {
    cfg.validate()?;
    for (i, p) in s.points.iter().enumerate() {
        if s.weights[i] > 0.0 {
            g.check_point(p).map_err(|e| e.for_point(&format!("points[{i}]")))?;
        }
    }
    if s.active_count() == 1 {
        let i = s.active().next().expect("one active point");
        let c = s.points[i].clone();
        let e0 = energy(g, s, &c)?;
        return Ok((
            c,
            SolverReport {
                iterations: 0,
                energy_trace: vec![e0],
                converged: true,
                final_step: 0.0,
            },
        ));
    }

    let mut c = match &cfg.init {
        Init::WeightedMean => bregman_right_centroid(s)?,
        Init::Explicit(point) => {
            g.check_point(point)
                .map_err(|e| e.for_point("initial point"))?;
            point.clone()
        }
    };
    let mut trace = vec![energy(g, s, &c)?];
    let mut converged = false;
    let mut final_step = f64::INFINITY;
    let mut iterations = 0;
    let mut flat_streak = 0;

    for _ in 0..cfg.max_iterations {
        let next = guarded_step(g, s, &c)?;
        iterations += 1;
        let step = next.max_abs_diff(&c);
        let rel = step / next.max_abs().max(1.0);
        let e = energy(g, s, &next)?;
        let delta_e = trace.last().copied().unwrap_or(f64::INFINITY) - e;
        trace.push(e);
        c = next;
        final_step = rel;
        if rel < cfg.tolerance {
            converged = true;
            break;
        }
        // Energy fallback: ten consecutive iterations without a measurable
        // decrease mean the objective has flatlined at round-off, so
        // further iterations cannot be justified. The step criterion keeps
        // priority (the converged flag means the tolerance was met); an
        // absolute threshold on the energy change would stop too far from
        // the fixed point, the gap being quadratic in the remaining
        // distance.
        if delta_e <= 0.0 {
            flat_streak += 1;
            if flat_streak >= 10 {
                break;
            }
        } else {
            flat_streak = 0;
        }
    }

    Ok((
        c,
        SolverReport {
            iterations,
            energy_trace: trace,
            converged,
            final_step,
        },
    ))
}

/// A raw update that leaves the domain (finite precision only: the exact
/// iteration cannot) is pulled back toward the previous iterate in gradient
/// space, halving up to 20 times before giving up.
fn guarded_step<G: Generator + ?Sized>(
    g: &G,
    s: &WeightedSet,
    c: &CompositeParam,
) -> Result<CompositeParam> {
    let mut target = averaged_gradient(g, s, c)?;
    for _ in 0..=20 {
        match g.grad_inverse(&target) {
            Ok(next) if next.is_finite() && g.check_point(&next).is_ok() => return Ok(next),
            _ => {
                let anchor = g.grad(c)?;
                target = target.combine(0.5, &anchor, 0.5)?;
            }
        }
    }
    Err(Error::NonFinite(
        "fixed-point update left the domain and could not be pulled back".into(),
    ))
}

/// Solve one centroid per skew value, each with the uniform skew applied to
/// every point. The ends of the alpha range approach the two sided
/// tangent-gap centroids.
pub fn skew_orbit<G: Generator + ?Sized>(
    g: &G,
    s: &WeightedSet,
    alphas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<CompositeParam>> {
    let mut orbit = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let a = SkewWeight::new(alpha)?;
        let skewed = s.clone().with_uniform_skew(a);
        let (c, _) = solve_centroid(g, &skewed, cfg)?;
        orbit.push(c);
    }
    Ok(orbit)
}

/// f⁻¹(Σ wᵢ f(xᵢ)) for a strictly monotone scalar map f.
pub fn quasi_arithmetic_mean(
    f: impl Fn(f64) -> f64,
    f_inverse: impl Fn(f64) -> f64,
    xs: &[f64],
    ws: &[f64],
) -> Result<f64> {
    if xs.is_empty() || xs.len() != ws.len() {
        return Err(Error::Weight(format!(
            "{} values with {} weights",
            xs.len(),
            ws.len()
        )));
    }
    validate_weights(ws)?;
    let acc: f64 = xs.iter().zip(ws).map(|(&x, &w)| w * f(x)).sum();
    let m = f_inverse(acc);
    if !m.is_finite() {
        return Err(Error::NonFinite("quasi-arithmetic mean".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{NegShannon, Quadratic};

    fn scalar_set(values: &[f64]) -> WeightedSet {
        WeightedSet::uniform(values.iter().map(|&v| CompositeParam::scalar(v)).collect()).unwrap()
    }

    #[test]
    fn energy_quadratic_hand_value() {
        let g = Quadratic::identity(1);
        let s = scalar_set(&[0.0, 2.0]);
        let e = energy(&g, &s, &CompositeParam::scalar(1.0)).unwrap();
        assert!((e - 0.25).abs() < 1e-14);
    }

    #[test]
    fn energy_vanishes_when_all_points_equal_center() {
        let g = Quadratic::identity(1);
        let s = scalar_set(&[1.5, 1.5, 1.5]);
        assert_eq!(energy(&g, &s, &CompositeParam::scalar(1.5)).unwrap(), 0.0);
    }

    #[test]
    fn cccp_step_quadratic_moves_halfway_to_the_mean() {
        // With a quadratic generator and symmetric skews the update is
        // c' = (c + mean)/2, so the default mean initialization is already
        // the fixed point.
        let g = Quadratic::identity(1);
        let s = scalar_set(&[0.0, 2.0, 4.0]);
        let c = CompositeParam::scalar(10.0);
        let next = cccp_step(&g, &s, &c).unwrap();
        assert!((next.vec_part[0] - 0.5 * (10.0 + 2.0)).abs() < 1e-12);
        let fixed = cccp_step(&g, &s, &CompositeParam::scalar(2.0)).unwrap();
        assert!((fixed.vec_part[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cccp_step_neg_shannon_matches_formula_oracle() {
        let g = NegShannon::new(1);
        let s = scalar_set(&[1.0, 4.0]);
        let c0 = 2.5;
        let next = cccp_step(&g, &s, &CompositeParam::scalar(c0)).unwrap();
        // grad = 1 + ln x, inverse = exp(y - 1):
        // c1 = exp(0.5 (1 + ln((c0+1)/2)) + 0.5 (1 + ln((c0+4)/2)) - 1)
        let oracle =
            (0.5 * (1.0 + (0.5 * (c0 + 1.0)).ln()) + 0.5 * (1.0 + (0.5 * (c0 + 4.0)).ln()) - 1.0)
                .exp();
        assert!((next.vec_part[0] - oracle).abs() < 1e-12);
    }

    #[test]
    fn solve_single_point_returns_immediately() {
        let g = NegShannon::new(1);
        let s = WeightedSet::new(vec![CompositeParam::scalar(3.0)], vec![1.0]).unwrap();
        let (c, report) = solve_centroid(&g, &s, &SolverConfig::default()).unwrap();
        assert_eq!(c.vec_part[0], 3.0);
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
    }

    #[test]
    fn zero_weight_points_are_ignored() {
        let g = Quadratic::identity(1);
        let s = WeightedSet::new(
            vec![CompositeParam::scalar(1.0), CompositeParam::scalar(99.0)],
            vec![1.0, 0.0],
        )
        .unwrap();
        let (c, report) = solve_centroid(&g, &s, &SolverConfig::default()).unwrap();
        assert_eq!(c.vec_part[0], 1.0);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn all_zero_weights_rejected() {
        let r = WeightedSet::new(vec![CompositeParam::scalar(1.0)], vec![0.0]);
        assert!(matches!(r, Err(Error::Weight(_))));
    }

    #[test]
    fn quadratic_solver_hits_weighted_mean_in_two_iterations() {
        let g = Quadratic::identity(2);
        let points = vec![
            CompositeParam::vector(vec![0.0, 1.0]),
            CompositeParam::vector(vec![2.0, -1.0]),
            CompositeParam::vector(vec![4.0, 3.0]),
        ];
        let weights = vec![0.5, 0.25, 0.25];
        let s = WeightedSet::new(points, weights).unwrap();
        let (c, report) = solve_centroid(&g, &s, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2, "took {}", report.iterations);
        assert!((c.vec_part[0] - 1.5).abs() < 1e-9);
        assert!((c.vec_part[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn left_centroid_is_geometric_mean_for_neg_shannon() {
        let g = NegShannon::new(1);
        let s = scalar_set(&[1.0, 4.0]);
        let left = bregman_left_centroid(&g, &s).unwrap();
        assert!((left.vec_part[0] - 2.0).abs() < 1e-12);
        let right = bregman_right_centroid(&s).unwrap();
        assert!((right.vec_part[0] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn quasi_arithmetic_mean_classics() {
        let id = quasi_arithmetic_mean(|x| x, |y| y, &[1.0, 3.0], &[0.5, 0.5]).unwrap();
        assert!((id - 2.0).abs() < 1e-15);
        let geo =
            quasi_arithmetic_mean(|x: f64| x.ln(), |y: f64| y.exp(), &[1.0, 4.0], &[0.5, 0.5])
                .unwrap();
        assert!((geo - 2.0).abs() < 1e-12);
        let harm = quasi_arithmetic_mean(
            |x| 1.0 / x,
            |y| 1.0 / y,
            &[1.0, 1.0 / 3.0],
            &[0.5, 0.5],
        )
        .unwrap();
        assert!((harm - 0.5).abs() < 1e-12);
    }

    #[test]
    fn orbit_is_constant_for_quadratic() {
        let g = Quadratic::identity(1);
        let s = scalar_set(&[0.0, 2.0]);
        let alphas = [0.1, 0.25, 0.5, 0.75, 0.9];
        let orbit = skew_orbit(&g, &s, &alphas, &SolverConfig::default()).unwrap();
        for c in &orbit {
            assert!((c.vec_part[0] - 1.0).abs() < 1e-9);
        }
    }
}

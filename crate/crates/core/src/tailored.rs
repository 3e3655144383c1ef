//! Direct matrix-update scheme for the Bhattacharyya centroid of
//! multivariate Gaussians, alternating a weighted-mean solve for the center
//! mean with a fixed-point update of the center covariance.
//!
//! This is the specialized counterpart of the generic fixed-point solver in
//! [`crate::solver`]; the two are compared instance-by-instance in
//! [`crate::clustering::compare_solvers`].

use crate::error::{Error, Result};
use crate::expfam::GaussianParam;
use crate::linalg::SymMat;
use crate::solver::SolverConfig;

/// Outcome of a tailored solve.
#[derive(Debug, Clone)]
pub struct TailoredReport {
    pub iterations: usize,
    /// Bhattacharyya objective at the initial center followed by one entry
    /// per full mean+covariance sweep.
    pub energy_trace: Vec<f64>,
    pub converged: bool,
    /// Present when the covariance update produced a non-PD iterate; the
    /// returned center is the last valid iterate in that case.
    pub failure: Option<String>,
}

fn check_inputs(gs: &[GaussianParam], ws: &[f64]) -> Result<usize> {
    if gs.is_empty() {
        return Err(Error::Weight("need at least one component".to_string()));
    }
    if gs.len() != ws.len() {
        return Err(Error::Weight(format!(
            "{} components but {} weights",
            gs.len(),
            ws.len()
        )));
    }
    if ws.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::Weight(
            "weights must be finite and non-negative".to_string(),
        ));
    }
    if !ws.iter().any(|&w| w > 0.0) {
        return Err(Error::Weight("all weights are zero".to_string()));
    }
    let sum: f64 = ws.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Weight(format!("weights sum to {sum}, expected 1")));
    }
    let d = gs[0].dim();
    if gs.iter().any(|g| g.dim() != d) {
        return Err(Error::Shape("components have mixed dimensions".to_string()));
    }
    Ok(d)
}

/// Weighted Bhattacharyya objective
/// Σ wᵢ [ (1/8) (μ_c-μᵢ)ᵀ ((Σ_c+Σᵢ)/2)⁻¹ (μ_c-μᵢ)
///        + (1/2) log( det((Σ_c+Σᵢ)/2) / sqrt(det Σ_c det Σᵢ) ) ].
pub fn bhattacharyya_energy(
    gs: &[GaussianParam],
    ws: &[f64],
    c: &GaussianParam,
) -> Result<f64> {
    check_inputs(gs, ws)?;
    let logdet_c = c.covariance().cholesky()?.log_det();
    let mut total = 0.0;
    for (g, &w) in gs.iter().zip(ws) {
        if w == 0.0 {
            continue;
        }
        let mid = c.covariance().add(g.covariance()).scaled(0.5);
        let chol = mid.cholesky()?;
        let d: Vec<f64> = c
            .mean()
            .iter()
            .zip(g.mean())
            .map(|(a, b)| a - b)
            .collect();
        let quad: f64 = chol.solve(&d).iter().zip(&d).map(|(a, b)| a * b).sum();
        let logdet_i = g.covariance().cholesky()?.log_det();
        let term = 0.125 * quad + 0.5 * (chol.log_det() - 0.5 * logdet_c - 0.5 * logdet_i);
        total += w * term;
    }
    crate::divergence::clamp_nonneg(total, "Gaussian Bhattacharyya objective")
}

/// Mean update: μ' = [Σ wᵢ (Uᵢ+Uᵢᵀ)]⁻¹ [Σ wᵢ (Uᵢ+Uᵢᵀ) μᵢ] with
/// Uᵢ = (Σ_c + Σᵢ)⁻¹ held at the current center covariance.
pub fn update_mean(gs: &[GaussianParam], ws: &[f64], c: &GaussianParam) -> Result<Vec<f64>> {
    let d = check_inputs(gs, ws)?;
    let mut system = SymMat::zeros(d);
    let mut rhs = vec![0.0f64; d];
    for (g, &w) in gs.iter().zip(ws) {
        if w == 0.0 {
            continue;
        }
        let u = c
            .covariance()
            .add(g.covariance())
            .cholesky()
            .map_err(|e| Error::SingularSystem(format!("covariance sum: {e}")))?
            .inverse();
        // U is symmetric, so U + Uᵀ = 2U.
        let two_u = u.scaled(2.0 * w);
        system = system.add(&two_u);
        let contrib = two_u.mul_vec(g.mean());
        for (r, v) in rhs.iter_mut().zip(contrib) {
            *r += v;
        }
    }
    let chol = system
        .cholesky()
        .map_err(|e| Error::SingularSystem(format!("mean system: {e}")))?;
    Ok(chol.solve(&rhs))
}

/// Covariance update: with A = Σ wᵢ (2Uᵢᵀ - Uᵢᵀ(μ_c-μᵢ)(μ_c-μᵢ)ᵀUᵢᵀ) and
/// B = A + Aᵀ - diag(A), the next center covariance solves
/// Σ_c' = 2W [B + diag(B)]⁻¹ (W = Σ wᵢ).
pub fn update_covariance(
    gs: &[GaussianParam],
    ws: &[f64],
    c: &GaussianParam,
) -> Result<SymMat> {
    let d = check_inputs(gs, ws)?;
    let total_w: f64 = ws.iter().sum();
    let mut a = SymMat::zeros(d);
    for (g, &w) in gs.iter().zip(ws) {
        if w == 0.0 {
            continue;
        }
        let u = c
            .covariance()
            .add(g.covariance())
            .cholesky()
            .map_err(|e| Error::SingularSystem(format!("covariance sum: {e}")))?
            .inverse();
        let diff: Vec<f64> = c
            .mean()
            .iter()
            .zip(g.mean())
            .map(|(x, y)| x - y)
            .collect();
        let ud = u.mul_vec(&diff);
        let term = u.scaled(2.0).sub(&SymMat::outer(&ud));
        a = a.add(&term.scaled(w));
    }
    // A is symmetric here, but we keep the literal combination.
    let b = a.scaled(2.0).sub(&a.diag_part());
    let m = b.add(&b.diag_part());
    let chol = match m.cholesky() {
        Ok(chol) => chol,
        Err(Error::NotPd(msg)) => {
            return Err(Error::NotPd(format!("covariance update: {msg}")))
        }
        Err(e) => return Err(Error::SingularSystem(format!("covariance system: {e}"))),
    };
    Ok(chol.inverse().scaled(2.0 * total_w))
}

/// Alternate mean and covariance updates (mean first) until the relative
/// parameter change drops below the tolerance. A non-PD covariance iterate
/// is not repaired: the solve stops, reports the failure, and returns the
/// last valid center.
pub fn solve_tailored(
    gs: &[GaussianParam],
    ws: &[f64],
    cfg: &SolverConfig,
) -> Result<(GaussianParam, TailoredReport)> {
    cfg.validate()?;
    let d = check_inputs(gs, ws)?;
    let active: Vec<usize> = (0..gs.len()).filter(|&i| ws[i] > 0.0).collect();
    if active.len() == 1 {
        let c = gs[active[0]].clone();
        let e0 = bhattacharyya_energy(gs, ws, &c)?;
        return Ok((
            c,
            TailoredReport {
                iterations: 0,
                energy_trace: vec![e0],
                converged: true,
                failure: None,
            },
        ));
    }

    // Moment-matched initialization: the mixture mean and covariance.
    let mut mean0 = vec![0.0f64; d];
    for &i in &active {
        for (m, v) in mean0.iter_mut().zip(gs[i].mean()) {
            *m += ws[i] * v;
        }
    }
    let mut cov0 = SymMat::zeros(d);
    for &i in &active {
        let shifted: Vec<f64> = gs[i]
            .mean()
            .iter()
            .zip(&mean0)
            .map(|(a, b)| a - b)
            .collect();
        cov0 = cov0.add(&gs[i].covariance().add(&SymMat::outer(&shifted)).scaled(ws[i]));
    }
    let mut center = GaussianParam::new(mean0, cov0)?;

    let mut trace = vec![bhattacharyya_energy(gs, ws, &center)?];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iterations {
        let new_mean = update_mean(gs, ws, &center)?;
        let premature = GaussianParam::new(new_mean.clone(), center.covariance().clone())?;
        let new_cov = match update_covariance(gs, ws, &premature) {
            Ok(cov) => cov,
            Err(Error::NotPd(msg)) => {
                return Ok((
                    center,
                    TailoredReport {
                        iterations,
                        energy_trace: trace,
                        converged: false,
                        failure: Some(msg),
                    },
                ));
            }
            Err(e) => return Err(e),
        };
        let next = match GaussianParam::new(new_mean, new_cov) {
            Ok(g) => g,
            Err(e) => {
                return Ok((
                    center,
                    TailoredReport {
                        iterations,
                        energy_trace: trace,
                        converged: false,
                        failure: Some(e.to_string()),
                    },
                ));
            }
        };
        iterations += 1;

        let mean_step = next
            .mean()
            .iter()
            .zip(center.mean())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let cov_step = next.covariance().sub(center.covariance()).max_abs();
        let scale = next
            .mean()
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(next.covariance().max_abs())
            .max(1.0);
        let rel = mean_step.max(cov_step) / scale;

        trace.push(bhattacharyya_energy(gs, ws, &next)?);
        center = next;
        if rel < cfg.tolerance {
            converged = true;
            break;
        }
    }

    Ok((
        center,
        TailoredReport {
            iterations,
            energy_trace: trace,
            converged,
            failure: None,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss1(mean: f64, var: f64) -> GaussianParam {
        GaussianParam::new(vec![mean], SymMat::from_full(&[vec![var]]).unwrap()).unwrap()
    }

    #[test]
    fn energy_zero_when_all_components_equal_center() {
        let g = gauss1(0.5, 2.0);
        let e = bhattacharyya_energy(&[g.clone(), g.clone()], &[0.5, 0.5], &g).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn energy_hand_value_two_unit_variance_components() {
        let gs = [gauss1(0.0, 1.0), gauss1(2.0, 1.0)];
        let c = gauss1(1.0, 1.0);
        let e = bhattacharyya_energy(&gs, &[0.5, 0.5], &c).unwrap();
        assert!((e - 0.125).abs() < 1e-13, "got {e}");
    }

    #[test]
    fn mean_update_scalar_hand_value() {
        // d = 1, components (0,1) and (2,3), center covariance 2:
        // U1 = 1/3, U2 = 1/5 -> mean = (2/5 * 2) / (2/3 + 2/5) = 0.75
        let gs = [gauss1(0.0, 1.0), gauss1(2.0, 3.0)];
        let c = gauss1(0.0, 2.0);
        let m = update_mean(&gs, &[0.5, 0.5], &c).unwrap();
        assert!((m[0] - 0.75).abs() < 1e-13, "got {}", m[0]);
    }

    #[test]
    fn mean_update_collapses_with_equal_covariances() {
        let gs = [gauss1(-1.0, 2.0), gauss1(3.0, 2.0), gauss1(5.0, 2.0)];
        let ws = [0.5, 0.3, 0.2];
        let c = gauss1(0.0, 7.0);
        let m = update_mean(&gs, &ws, &c).unwrap();
        let expect = -0.5 + 0.3 * 3.0 + 0.2 * 5.0;
        assert!((m[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn covariance_update_fixed_point_single_component() {
        let g = gauss1(1.0, 2.5);
        let cov = update_covariance(std::slice::from_ref(&g), &[1.0], &g).unwrap();
        assert!((cov.get(0, 0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn single_component_returns_immediately() {
        let g = gauss1(1.0, 2.0);
        let (c, report) =
            solve_tailored(std::slice::from_ref(&g), &[1.0], &SolverConfig::default()).unwrap();
        assert_eq!(c, g);
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
    }

    #[test]
    fn identical_components_converge_to_the_component() {
        let g = gauss1(0.7, 1.3);
        let (c, report) =
            solve_tailored(&[g.clone(), g.clone()], &[0.5, 0.5], &SolverConfig::default())
                .unwrap();
        assert!(report.converged);
        assert!((c.mean()[0] - 0.7).abs() < 1e-8);
        assert!((c.covariance().get(0, 0) - 1.3).abs() < 1e-8);
    }
}

//! Shared oracles for the integration suites. Everything here is computed
//! independently of the library: quadrature on source-space densities,
//! truncated series, hand-rolled dense linear algebra, and the scalar
//! recurrence mirroring the tailored Gaussian updates.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rel_err(got: f64, expect: f64) -> f64 {
    (got - expect).abs() / expect.abs().max(1e-300)
}

// --- Gauss-Legendre quadrature ---------------------------------------------

/// Nodes and weights on [-1, 1] by Newton iteration on the Legendre
/// recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite 32-point Gauss-Legendre over [a, b] with `panels` panels.
pub fn integrate(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(32);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in nodes.iter().zip(&weights) {
            total += 0.5 * h * w * f(mid + 0.5 * h * x);
        }
    }
    total
}

// --- densities in source coordinates --------------------------------------

pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

pub fn poisson_ln_pmf(x: u64, rate: f64) -> f64 {
    x as f64 * rate.ln() - rate - ln_factorial(x)
}

fn poisson_tail_cut(rates: &[f64]) -> u64 {
    let z = rates.iter().fold(0.0f64, |acc, &r| acc.max(r));
    (z + 20.0 * z.sqrt() + 60.0).ceil() as u64
}

// --- oracle distances -------------------------------------------------------

/// Chernoff coefficient of two Poisson laws by truncated summation
/// (tail below 1e-12 at the chosen cut).
pub fn poisson_chernoff_series(lp: f64, lq: f64, alpha: f64) -> f64 {
    let cut = poisson_tail_cut(&[lp, lq]);
    (0..=cut)
        .map(|x| (alpha * poisson_ln_pmf(x, lp) + (1.0 - alpha) * poisson_ln_pmf(x, lq)).exp())
        .sum()
}

/// KL of two Poisson laws by truncated summation.
pub fn poisson_kl_series(lp: f64, lq: f64) -> f64 {
    let cut = poisson_tail_cut(&[lp, lq]);
    (0..=cut)
        .map(|x| {
            let lpx = poisson_ln_pmf(x, lp);
            lpx.exp() * (lpx - poisson_ln_pmf(x, lq))
        })
        .sum()
}

fn gaussian_box(pairs: &[(f64, f64)]) -> (f64, f64) {
    let lo = pairs
        .iter()
        .map(|&(m, v)| m - 10.0 * v.sqrt())
        .fold(f64::INFINITY, f64::min);
    let hi = pairs
        .iter()
        .map(|&(m, v)| m + 10.0 * v.sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Chernoff coefficient of two univariate Gaussians by quadrature on a
/// mean +- 10 sigma box.
pub fn gaussian_chernoff_quadrature(
    p: (f64, f64),
    q: (f64, f64),
    alpha: f64,
) -> f64 {
    let (lo, hi) = gaussian_box(&[p, q]);
    integrate(lo, hi, 48, |x| {
        normal_pdf(x, p.0, p.1).powf(alpha) * normal_pdf(x, q.0, q.1).powf(1.0 - alpha)
    })
}

/// KL of two univariate Gaussians by quadrature.
pub fn gaussian_kl_quadrature(p: (f64, f64), q: (f64, f64)) -> f64 {
    let (lo, hi) = gaussian_box(&[p, p]);
    integrate(lo, hi, 48, |x| {
        let px = normal_pdf(x, p.0, p.1);
        px * (px / normal_pdf(x, q.0, q.1)).ln()
    })
}

pub fn multinomial_chernoff_sum(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| a.powf(alpha) * b.powf(1.0 - alpha))
        .sum()
}

// --- Table-style closed forms in source coordinates -----------------------

pub fn poisson_bhat_formula(lp: f64, lq: f64) -> f64 {
    0.5 * (lp.sqrt() - lq.sqrt()).powi(2)
}

pub fn gaussian_bhat_formula(p: (f64, f64), q: (f64, f64)) -> f64 {
    let (mp, vp) = p;
    let (mq, vq) = q;
    0.25 * (mp - mq).powi(2) / (vp + vq) + 0.5 * ((vp + vq) / (2.0 * (vp * vq).sqrt())).ln()
}

pub fn multinomial_bhat_formula(p: &[f64], q: &[f64]) -> f64 {
    -p.iter()
        .zip(q)
        .map(|(&a, &b)| (a * b).sqrt())
        .sum::<f64>()
        .ln()
}

/// Closed-form Bhattacharyya distance between multivariate Gaussians,
/// evaluated with the local dense solver below.
pub fn mvg_bhat_formula(
    mp: &[f64],
    cp: &[Vec<f64>],
    mq: &[f64],
    cq: &[Vec<f64>],
) -> f64 {
    let d = mp.len();
    let mid: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| 0.5 * (cp[i][j] + cq[i][j])).collect())
        .collect();
    let diff: Vec<f64> = mp.iter().zip(mq).map(|(a, b)| a - b).collect();
    let x = dense_solve(&mid, &diff);
    let quad: f64 = x.iter().zip(&diff).map(|(a, b)| a * b).sum();
    0.125 * quad + 0.5 * (dense_det(&mid) / (dense_det(cp) * dense_det(cq)).sqrt()).ln()
}

// --- small dense linear algebra (independent of the library) ---------------

pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in (row + 1)..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    x
}

pub fn dense_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0f64;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= m[col][col];
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

// --- random parameters ------------------------------------------------------

pub fn rand_poisson_rate(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.2..10.0)
}

pub fn rand_gaussian1(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(-3.0..3.0), rng.gen_range(0.2..5.0))
}

pub fn rand_simplex3(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..3).map(|_| 0.05 + rng.gen_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// Random mean and well-conditioned PD covariance as full rows.
pub fn rand_mvg(rng: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mean: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let a: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let dot: f64 = (0..d).map(|k| a[i][k] * a[j][k]).sum();
                    dot / d as f64 + if i == j { 0.2 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    (mean, cov)
}

// --- independent scalar recurrence for the tailored d = 1 updates ----------

/// One mean update of the d = 1 tailored scheme.
pub fn scalar_mean_update(comps: &[(f64, f64)], ws: &[f64], center_var: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&(m, v), &w) in comps.iter().zip(ws) {
        let u = 1.0 / (center_var + v);
        num += w * 2.0 * u * m;
        den += w * 2.0 * u;
    }
    num / den
}

/// One covariance update of the d = 1 tailored scheme. In one dimension
/// diag(A) = A, so B = A and B + diag(B) = 2A, giving sigma' = W / A.
pub fn scalar_cov_update(
    comps: &[(f64, f64)],
    ws: &[f64],
    center_mean: f64,
    center_var: f64,
) -> f64 {
    let total_w: f64 = ws.iter().sum();
    let mut a = 0.0;
    for (&(m, v), &w) in comps.iter().zip(ws) {
        let u = 1.0 / (center_var + v);
        let d = center_mean - m;
        a += w * (2.0 * u - u * u * d * d);
    }
    total_w / a
}

/// Moment-matched scalar initialization (mixture mean and variance).
pub fn scalar_init(comps: &[(f64, f64)], ws: &[f64]) -> (f64, f64) {
    let mean: f64 = comps.iter().zip(ws).map(|(&(m, _), &w)| w * m).sum();
    let var: f64 = comps
        .iter()
        .zip(ws)
        .map(|(&(m, v), &w)| w * (v + (m - mean) * (m - mean)))
        .sum();
    (mean, var)
}


// --- shipped generators with in-domain samplers ------------------------------

use burbea_rao::expfam::{
    ExpFamily, GaussianLogNorm, MultinomialLogNorm, MvGaussianLogNorm, PoissonLogNorm, SourceParam,
};
use burbea_rao::generators::{NegRenyi, NegShannon, NegShannonExtended, Quadratic};
use burbea_rao::{CompositeParam, Generator, SymMat};

pub type Sampler = Box<dyn Fn(&mut ChaCha8Rng) -> CompositeParam>;

/// Every shipped generator with an in-domain sampler over its test box.
pub fn shipped_generators() -> Vec<(String, Box<dyn Generator>, Sampler)> {
    let mut out: Vec<(String, Box<dyn Generator>, Sampler)> = Vec::new();

    out.push((
        "quadratic-identity".into(),
        Box::new(Quadratic::identity(3)),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect())
        }),
    ));

    let q = SymMat::from_full(&[
        vec![2.0, 0.4, 0.0],
        vec![0.4, 1.5, -0.3],
        vec![0.0, -0.3, 1.0],
    ])
    .unwrap();
    out.push((
        "quadratic-general".into(),
        Box::new(Quadratic::new(q).unwrap()),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect())
        }),
    ));

    out.push((
        "neg-shannon".into(),
        Box::new(NegShannon::new(2)),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector((0..2).map(|_| rng.gen_range(0.05..8.0)).collect())
        }),
    ));

    out.push((
        "neg-shannon-extended".into(),
        Box::new(NegShannonExtended::new(2)),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector((0..2).map(|_| rng.gen_range(0.05..8.0)).collect())
        }),
    ));

    out.push((
        "neg-renyi-0.5".into(),
        Box::new(NegRenyi::new(2, 0.5).unwrap()),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector((0..2).map(|_| rng.gen_range(0.05..8.0)).collect())
        }),
    ));

    out.push((
        "poisson-log-normalizer".into(),
        Box::new(PoissonLogNorm),
        Box::new(|rng: &mut ChaCha8Rng| CompositeParam::scalar(rng.gen_range(-2.0..2.5))),
    ));

    out.push((
        "gaussian-log-normalizer".into(),
        Box::new(GaussianLogNorm),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-4.0..-0.15)])
        }),
    ));

    out.push((
        "multinomial-log-normalizer".into(),
        Box::new(MultinomialLogNorm::new(3).unwrap()),
        Box::new(|rng: &mut ChaCha8Rng| {
            CompositeParam::vector((0..2).map(|_| rng.gen_range(-3.0..3.0)).collect())
        }),
    ));

    out.push((
        "mvgaussian-log-normalizer".into(),
        Box::new(MvGaussianLogNorm::new(2).unwrap()),
        Box::new(|rng: &mut ChaCha8Rng| {
            let fam = ExpFamily::mv_gaussian(2).unwrap();
            let (mean, cov) = rand_mvg(rng, 2);
            let g = burbea_rao::GaussianParam::new(mean, SymMat::from_full(&cov).unwrap())
                .unwrap();
            fam.to_natural(&SourceParam::MvGaussian(g)).unwrap()
        }),
    ));

    out
}

#[cfg(test)]
mod selfcheck {
    use super::*;

    #[test]
    fn quadrature_integrates_a_gaussian_to_one() {
        let total = integrate(-10.0, 10.0, 32, |x| normal_pdf(x, 0.0, 1.0));
        assert!((total - 1.0).abs() < 1e-12, "got {total}");
    }

    #[test]
    fn dense_solver_agrees_with_hand_inverse() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = dense_solve(&a, &[1.0, 2.0]);
        // inverse of [[2,1],[1,3]] is [[3,-1],[-1,2]]/5
        assert!((x[0] - (3.0 - 2.0) / 5.0).abs() < 1e-12);
        assert!((x[1] - (-1.0 + 4.0) / 5.0).abs() < 1e-12);
        assert!((dense_det(&a) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_series_matches_analytic_chernoff() {
        // sum over x of p^a q^(1-a) = exp(lp^a lq^(1-a) - a lp - (1-a) lq)
        let (lp, lq, a): (f64, f64, f64) = (1.5, 6.0, 0.3);
        let analytic = (lp.powf(a) * lq.powf(1.0 - a) - a * lp - (1.0 - a) * lq).exp();
        let series = poisson_chernoff_series(lp, lq, a);
        assert!(rel_err(series, analytic) < 1e-12);
    }
}

#![allow(clippy::needless_range_loop)]

//! Mixture fitting and simplification behavior on synthetic instances.

mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use burbea_rao::clustering::{
    compare_solvers, fit_mixture, hierarchical_simplify, kmeans_bhattacharyya, random_instances,
    within_cluster_energy, MixtureModel, PointCloud, Winner,
};
use burbea_rao::solver::SolverConfig;
use burbea_rao::{GaussianParam, SymMat};

fn two_blob_cloud(n_per: usize, spread: f64, gap: f64, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for _ in 0..n_per {
        rows.push(vec![
            rng.gen_range(-spread..spread),
            rng.gen_range(-spread..spread),
        ]);
        rows.push(vec![
            gap + rng.gen_range(-spread..spread),
            gap + rng.gen_range(-spread..spread),
        ]);
    }
    PointCloud::from_rows(&rows).unwrap()
}

#[test]
fn kmeans_energy_is_non_increasing_in_k() {
    // Best of 5 seeds per k on a fixed component set.
    let mut rng = ChaCha8Rng::seed_from_u64(411);
    let comps: Vec<GaussianParam> = (0..8)
        .map(|_| {
            let (mean, cov) = support::rand_mvg(&mut rng, 2);
            GaussianParam::new(mean, SymMat::from_full(&cov).unwrap()).unwrap()
        })
        .collect();
    let weights = vec![0.125; 8];
    let inputs = MixtureModel::new(2, weights.clone(), comps.clone()).unwrap();
    let cfg = SolverConfig::default();

    let mut energies = Vec::new();
    for k in 1..=4 {
        let best = (0..5)
            .map(|seed| {
                let m = kmeans_bhattacharyya(&comps, &weights, k, seed, &cfg).unwrap();
                within_cluster_energy(&m, &inputs).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        energies.push(best);
    }
    for w in energies.windows(2) {
        assert!(
            w[1] <= w[0] + 1e-10,
            "energy increased with k: {energies:?}"
        );
    }
}

#[test]
fn kmeans_energy_is_non_increasing_per_sweep() {
    // Identical seeding means a run capped at t sweeps is a prefix of the
    // run capped at t+1, so energies over increasing budgets trace the
    // per-iteration descent.
    let mut rng = ChaCha8Rng::seed_from_u64(413);
    let comps: Vec<GaussianParam> = (0..10)
        .map(|_| {
            let (mean, cov) = support::rand_mvg(&mut rng, 2);
            GaussianParam::new(mean, SymMat::from_full(&cov).unwrap()).unwrap()
        })
        .collect();
    let weights = vec![0.1; 10];
    let inputs = MixtureModel::new(2, weights.clone(), comps.clone()).unwrap();
    let mut energies = Vec::new();
    for sweeps in 1..=6 {
        let cfg = SolverConfig {
            max_iterations: sweeps,
            ..SolverConfig::default()
        };
        let m = kmeans_bhattacharyya(&comps, &weights, 3, 2, &cfg).unwrap();
        energies.push(within_cluster_energy(&m, &inputs).unwrap());
    }
    for w in energies.windows(2) {
        assert!(
            w[1] <= w[0] + 1e-10,
            "per-sweep energy increased: {energies:?}"
        );
    }
}

#[test]
fn fit_mixture_covariances_pass_the_pd_test() {
    let pc = two_blob_cloud(40, 0.5, 6.0, 1);
    let m = fit_mixture(&pc, 4, 3, &SolverConfig::default()).unwrap();
    for c in m.components() {
        assert!(c.covariance().is_positive_definite());
    }
    assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn fit_mixture_is_bit_identical_across_reruns() {
    let pc = two_blob_cloud(30, 0.4, 5.0, 2);
    let a = fit_mixture(&pc, 3, 9, &SolverConfig::default()).unwrap();
    let b = fit_mixture(&pc, 3, 9, &SolverConfig::default()).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn hierarchical_merge_preserves_total_weight_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(421);
    let comps: Vec<GaussianParam> = (0..6)
        .map(|_| {
            let (mean, cov) = support::rand_mvg(&mut rng, 2);
            GaussianParam::new(mean, SymMat::from_full(&cov).unwrap()).unwrap()
        })
        .collect();
    let raw: Vec<f64> = (0..6).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let m = MixtureModel::new(2, weights.clone(), comps).unwrap();

    let simplified = hierarchical_simplify(&m, 3, &SolverConfig::default()).unwrap();
    assert_eq!(simplified.len(), 3);
    let in_total: f64 = weights.iter().sum();
    let out_total: f64 = simplified.weights().iter().sum();
    // Merging only ever adds existing weights, so the total is preserved to
    // the last bit of float addition reordering.
    assert!((in_total - out_total).abs() < 1e-15);
    for c in simplified.components() {
        assert!(c.covariance().is_positive_definite());
    }
    let e = within_cluster_energy(&simplified, &m).unwrap();
    assert!(e.is_finite());
}

#[test]
fn comparison_batch_2d_five_components() {
    // 100 random 2D 5-component instances; the aggregate numbers are
    // reported for inspection, the structural facts are asserted.
    let instances = random_instances(100, 2, 5, 77);
    let report = compare_solvers(&instances, &SolverConfig::default()).unwrap();
    assert_eq!(report.rows.len(), 100);
    println!(
        "2D batch: generic {:.1}% correct, tailored {:.1}% correct, \
         iters {:.2} vs {:.2}, {} failures",
        100.0 * report.summary.generic_correct_fraction,
        100.0 * report.summary.tailored_correct_fraction,
        report.summary.mean_iters_generic,
        report.summary.mean_iters_tailored,
        report.summary.failures,
    );
    assert!(report.summary.generic_correct_fraction >= 0.95);
    for row in &report.rows {
        if let Some(e) = row.energy_generic {
            assert!(e.is_finite() && e >= 0.0);
        }
        if row.failure.is_none() {
            assert!(row.energy_tailored.is_some());
        }
        if row.winner == Winner::Tie {
            assert!(row.energy_generic.is_some() || row.energy_tailored.is_some());
        }
    }
}

#[test]
fn comparison_report_is_deterministic() {
    let instances = random_instances(10, 3, 4, 5);
    let a = compare_solvers(&instances, &SolverConfig::default()).unwrap();
    let b = compare_solvers(&instances, &SolverConfig::default()).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.energy_generic, y.energy_generic);
        assert_eq!(x.energy_tailored, y.energy_tailored);
        assert_eq!(x.iters_generic, y.iters_generic);
        assert_eq!(x.iters_tailored, y.iters_tailored);
        assert_eq!(x.winner, y.winner);
    }
}

#[test]
fn kmeans_weight_conservation_and_pd_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(431);
    let comps: Vec<GaussianParam> = (0..7)
        .map(|_| {
            let (mean, cov) = support::rand_mvg(&mut rng, 3);
            GaussianParam::new(mean, SymMat::from_full(&cov).unwrap()).unwrap()
        })
        .collect();
    let raw: Vec<f64> = (0..7).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let m = kmeans_bhattacharyya(&comps, &weights, 3, 0, &SolverConfig::default()).unwrap();
    assert_eq!(m.len(), 3);
    assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    for c in m.components() {
        assert!(c.covariance().is_positive_definite());
    }
}

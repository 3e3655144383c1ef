//! Gaussian-mixture handling and simplification: moment-fitting a mixture
//! from raw points, Bhattacharyya k-means over mixture components,
//! hierarchical merging down to a prescribed size, and the head-to-head
//! protocol comparing the generic and tailored centroid solvers.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::divergence;
use crate::error::{Error, Result};
use crate::expfam::{ExpFamily, GaussianParam, SourceParam};
use crate::linalg::SymMat;
use crate::param::CompositeParam;
use crate::solver::{solve_centroid, SolverConfig, WeightedSet};
use crate::tailored::{bhattacharyya_energy, solve_tailored};

/// A weighted mixture of multivariate Gaussians of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureJson", into = "MixtureJson")]
pub struct MixtureModel {
    dim: usize,
    weights: Vec<f64>,
    components: Vec<GaussianParam>,
}

#[derive(Serialize, Deserialize)]
struct MixtureJson {
    family: String,
    d: usize,
    components: Vec<ComponentJson>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    weight: f64,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<MixtureJson> for MixtureModel {
    type Error = Error;

    fn try_from(j: MixtureJson) -> Result<Self> {
        if j.family != "mvgaussian" {
            return Err(Error::Parse(format!(
                "unsupported mixture family {:?}",
                j.family
            )));
        }
        let mut weights = Vec::with_capacity(j.components.len());
        let mut components = Vec::with_capacity(j.components.len());
        for c in j.components {
            weights.push(c.weight);
            components.push(GaussianParam::new(c.mean, SymMat::from_full(&c.cov)?)?);
        }
        MixtureModel::new(j.d, weights, components)
    }
}

impl From<MixtureModel> for MixtureJson {
    fn from(m: MixtureModel) -> Self {
        MixtureJson {
            family: "mvgaussian".to_string(),
            d: m.dim,
            components: m
                .weights
                .into_iter()
                .zip(m.components)
                .map(|(weight, c)| ComponentJson {
                    weight,
                    mean: c.mean().to_vec(),
                    cov: c.covariance().to_full(),
                })
                .collect(),
        }
    }
}

impl MixtureModel {
    pub fn new(
        dim: usize,
        weights: Vec<f64>,
        components: Vec<GaussianParam>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Parse("mixture needs at least one component".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::Weight(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::Shape(format!(
                "component dimension differs from declared d = {dim}"
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::Weight(
                "component weights must be strictly positive".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Weight(format!(
                "component weights sum to {sum}, expected 1"
            )));
        }
        Ok(MixtureModel {
            dim,
            weights,
            components,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[GaussianParam] {
        &self.components
    }
}

/// Raw points of uniform dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse("point dimension must be at least 1".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!(
                "{} values do not form rows of dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("point cloud has non-finite entries".into()));
        }
        Ok(PointCloud { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::Shape("rows of mixed dimension".into()));
            }
            data.extend_from_slice(r);
        }
        PointCloud::new(dim, data)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Multiply columns `from..` by a scale factor (used for the positional
    /// block of image clouds).
    pub fn scale_columns(&mut self, from: usize, scale: f64) {
        let d = self.dim;
        for row in self.data.chunks_mut(d) {
            for v in &mut row[from..] {
                *v *= scale;
            }
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding over raw points under squared Euclidean distance.
fn seed_centers(pc: &PointCloud, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = pc.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(pc.row(rng.gen_range(0..n)).to_vec());
    let mut dists: Vec<f64> = (0..n).map(|i| sq_dist(pc.row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dists.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in dists.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.push(pc.row(idx).to_vec());
        for (i, dist) in dists.iter_mut().enumerate() {
            let d = sq_dist(pc.row(i), centers.last().expect("just pushed"));
            if d < *dist {
                *dist = d;
            }
        }
    }
    centers
}

fn assign_to_centers(pc: &PointCloud, centers: &[Vec<f64>]) -> Vec<usize> {
    (0..pc.len())
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.iter().enumerate() {
                let d = sq_dist(pc.row(i), c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Lloyd iterations; empty clusters steal the point farthest from its center.
fn lloyd(pc: &PointCloud, centers: &mut [Vec<f64>], max_sweeps: usize) -> Vec<usize> {
    let k = centers.len();
    let d = pc.dim();
    let mut assignment = assign_to_centers(pc, centers);
    for _ in 0..max_sweeps {
        // Repair empty clusters before recomputing the means.
        loop {
            let mut counts = vec![0usize; k];
            for &a in &assignment {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let farthest = (0..pc.len())
                .max_by(|&a, &b| {
                    let da = sq_dist(pc.row(a), &centers[assignment[a]]);
                    let db = sq_dist(pc.row(b), &centers[assignment[b]]);
                    da.partial_cmp(&db).expect("finite distances")
                })
                .expect("non-empty cloud");
            assignment[farthest] = empty;
            centers[empty] = pc.row(farthest).to_vec();
        }
        let mut sums = vec![vec![0.0f64; d]; k];
        let mut counts = vec![0usize; k];
        for (i, &a) in assignment.iter().enumerate() {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(pc.row(i)) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for s in &mut sums[j] {
                    *s /= counts[j] as f64;
                }
                centers[j] = sums[j].clone();
            }
        }
        let next = assign_to_centers(pc, centers);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    assignment
}

/// Moment fit of one cluster; the covariance is pulled onto the PD cone by
/// adding eps*I with eps = 1e-6 * trace/d when the factorization fails.
fn moment_fit(pc: &PointCloud, members: &[usize]) -> Result<GaussianParam> {
    let d = pc.dim();
    let m = members.len() as f64;
    let mut mean = vec![0.0f64; d];
    for &i in members {
        for (s, v) in mean.iter_mut().zip(pc.row(i)) {
            *s += v;
        }
    }
    for s in &mut mean {
        *s /= m;
    }
    let mut cov = SymMat::zeros(d);
    for &i in members {
        let diff: Vec<f64> = pc.row(i).iter().zip(&mean).map(|(a, b)| a - b).collect();
        cov = cov.add(&SymMat::outer(&diff));
    }
    cov = cov.scaled(1.0 / m);
    if cov.cholesky().is_err() {
        let eps = 1e-6 * cov.trace() / d as f64;
        let mut reg = cov.clone();
        for i in 0..d {
            reg.add_assign_at(i, i, eps);
        }
        cov = reg;
    }
    GaussianParam::new(mean, cov).map_err(|e| {
        Error::DegenerateCluster(format!("covariance is not PD after regularization: {e}"))
    })
}

/// Hard-assignment k-means on raw points (k-means++ seeding from the given
/// seed) followed by per-cluster moment fits. Deterministic given the seed.
pub fn fit_mixture(
    pc: &PointCloud,
    k: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<MixtureModel> {
    cfg.validate()?;
    let n = pc.len();
    let d = pc.dim();
    if k == 0 || k > n {
        return Err(Error::Parse(format!(
            "cannot fit {k} components to {n} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seed_centers(pc, k, &mut rng);
    let mut assignment = lloyd(pc, &mut centers, cfg.max_iterations);

    // One reseed attempt for clusters too small to carry a covariance.
    let min_points = d + 1;
    let clusters = |assignment: &[usize]| -> Vec<Vec<usize>> {
        let mut cl = vec![Vec::new(); k];
        for (i, &a) in assignment.iter().enumerate() {
            cl[a].push(i);
        }
        cl
    };
    let mut groups = clusters(&assignment);
    if groups.iter().any(|g| g.len() < min_points) {
        for (j, group) in groups.iter().enumerate() {
            if group.len() < min_points {
                centers[j] = pc.row(rng.gen_range(0..n)).to_vec();
            }
        }
        assignment = lloyd(pc, &mut centers, cfg.max_iterations);
        groups = clusters(&assignment);
        if let Some(j) = groups.iter().position(|g| g.len() < min_points) {
            return Err(Error::DegenerateCluster(format!(
                "cluster {j} has {} points, need at least {min_points}",
                groups[j].len()
            )));
        }
    }

    let mut weights = Vec::with_capacity(k);
    let mut components = Vec::with_capacity(k);
    for group in &groups {
        weights.push(group.len() as f64 / n as f64);
        components.push(moment_fit(pc, group)?);
    }
    MixtureModel::new(d, weights, components)
}

struct NaturalSpace {
    family: ExpFamily,
    logn: crate::expfam::DynGenerator,
}

impl NaturalSpace {
    fn new(dim: usize) -> Result<Self> {
        let family = ExpFamily::mv_gaussian(dim)?;
        let logn = family.log_normalizer();
        Ok(NaturalSpace { family, logn })
    }

    fn natural(&self, g: &GaussianParam) -> Result<CompositeParam> {
        self.family
            .to_natural(&SourceParam::MvGaussian(g.clone()))
    }

    fn naturals(&self, gs: &[GaussianParam]) -> Result<Vec<CompositeParam>> {
        gs.iter().map(|g| self.natural(g)).collect()
    }

    fn distance(&self, a: &CompositeParam, b: &CompositeParam) -> Result<f64> {
        divergence::burbea_rao(self.logn.as_ref(), a, b)
    }

    fn centroid(
        &self,
        naturals: &[CompositeParam],
        weights: &[f64],
        cfg: &SolverConfig,
    ) -> Result<CompositeParam> {
        let set = WeightedSet::new(naturals.to_vec(), weights.to_vec())?;
        let (c, _) = solve_centroid(self.logn.as_ref(), &set, cfg)?;
        Ok(c)
    }

    fn source(&self, c: &CompositeParam) -> Result<GaussianParam> {
        match self.family.to_source(c)? {
            SourceParam::MvGaussian(g) => Ok(g),
            other => Err(Error::Internal(format!(
                "expected a Gaussian source parameter, got {other:?}"
            ))),
        }
    }
}

/// Lloyd-style clustering of Gaussian components under the Bhattacharyya
/// distance, with centers recomputed by the generic fixed-point solver over
/// natural parameters.
pub fn kmeans_bhattacharyya(
    components: &[GaussianParam],
    weights: &[f64],
    k: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<MixtureModel> {
    cfg.validate()?;
    let n = components.len();
    if n == 0 {
        return Err(Error::Parse("no components to cluster".into()));
    }
    if k == 0 || k > n {
        return Err(Error::Parse(format!(
            "cannot form {k} clusters from {n} components"
        )));
    }
    if weights.len() != n || weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::Weight(
            "component weights must be strictly positive".into(),
        ));
    }
    let d = components[0].dim();
    let space = NaturalSpace::new(d)?;
    let naturals = space.naturals(components)?;
    // cfg.max_iterations caps the assignment sweeps; center solves always
    // get a full budget so a sweep-capped run is a prefix of a longer one.
    let center_cfg = SolverConfig {
        max_iterations: cfg.max_iterations.max(200),
        ..cfg.clone()
    };

    // k-means++ seeding in the Bhattacharyya geometry.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut center_naturals: Vec<CompositeParam> = Vec::with_capacity(k);
    center_naturals.push(naturals[rng.gen_range(0..n)].clone());
    let mut dists: Vec<f64> = naturals
        .iter()
        .map(|t| space.distance(t, &center_naturals[0]))
        .collect::<Result<_>>()?;
    while center_naturals.len() < k {
        let total: f64 = dists.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &dv) in dists.iter().enumerate() {
                if target < dv {
                    chosen = i;
                    break;
                }
                target -= dv;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        center_naturals.push(naturals[idx].clone());
        for i in 0..n {
            let dv = space.distance(&naturals[i], center_naturals.last().expect("just pushed"))?;
            if dv < dists[i] {
                dists[i] = dv;
            }
        }
    }

    let assign = |centers: &[CompositeParam]| -> Result<Vec<usize>> {
        (0..n)
            .map(|i| {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (j, c) in centers.iter().enumerate() {
                    let dv = space.distance(&naturals[i], c)?;
                    if dv < best_d {
                        best_d = dv;
                        best = j;
                    }
                }
                Ok(best)
            })
            .collect()
    };

    let mut assignment = assign(&center_naturals)?;
    for _ in 0..cfg.max_iterations {
        // Empty clusters steal the farthest component; give up only if the
        // repair keeps cycling.
        let mut repairs = 0;
        loop {
            let mut counts = vec![0usize; k];
            for &a in &assignment {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            repairs += 1;
            if repairs > n * k {
                return Err(Error::EmptyCluster(format!(
                    "cluster {empty} could not be filled after {repairs} reassignments"
                )));
            }
            let mut far_i = 0;
            let mut far_d = -1.0;
            for i in 0..n {
                let dv = space.distance(&naturals[i], &center_naturals[assignment[i]])?;
                if dv > far_d {
                    far_d = dv;
                    far_i = i;
                }
            }
            assignment[far_i] = empty;
            center_naturals[empty] = naturals[far_i].clone();
        }

        for j in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| assignment[i] == j).collect();
            let total: f64 = members.iter().map(|&i| weights[i]).sum();
            let member_naturals: Vec<CompositeParam> =
                members.iter().map(|&i| naturals[i].clone()).collect();
            let member_weights: Vec<f64> =
                members.iter().map(|&i| weights[i] / total).collect();
            center_naturals[j] = space.centroid(&member_naturals, &member_weights, &center_cfg)?;
        }
        let next = assign(&center_naturals)?;
        if next == assignment {
            break;
        }
        assignment = next;
    }

    let mut out_weights = Vec::with_capacity(k);
    let mut out_components = Vec::with_capacity(k);
    for j in 0..k {
        let w: f64 = (0..n)
            .filter(|&i| assignment[i] == j)
            .map(|i| weights[i])
            .sum();
        out_weights.push(w);
        out_components.push(space.source(&center_naturals[j])?);
    }
    MixtureModel::new(d, out_weights, out_components)
}

/// Total weighted Bhattacharyya energy of components to their nearest center.
pub fn within_cluster_energy(m: &MixtureModel, inputs: &MixtureModel) -> Result<f64> {
    let space = NaturalSpace::new(inputs.dim())?;
    let centers = space.naturals(m.components())?;
    let naturals = space.naturals(inputs.components())?;
    let mut total = 0.0;
    for (t, &w) in naturals.iter().zip(inputs.weights()) {
        let mut best = f64::INFINITY;
        for c in &centers {
            best = best.min(space.distance(t, c)?);
        }
        total += w * best;
    }
    Ok(total)
}

/// Greedy agglomeration: repeatedly merge the closest pair of components
/// under the Bhattacharyya distance, replacing the pair by its weighted
/// centroid, until `k_target` components remain.
pub fn hierarchical_simplify(
    m: &MixtureModel,
    k_target: usize,
    cfg: &SolverConfig,
) -> Result<MixtureModel> {
    cfg.validate()?;
    if k_target == 0 || k_target > m.len() {
        return Err(Error::Parse(format!(
            "cannot simplify {} components to {k_target}",
            m.len()
        )));
    }
    if k_target == m.len() {
        return Ok(m.clone());
    }
    let space = NaturalSpace::new(m.dim())?;
    let mut weights = m.weights().to_vec();
    let mut comps = m.components().to_vec();
    let mut naturals = space.naturals(&comps)?;

    while comps.len() > k_target {
        let mut best = (0usize, 1usize);
        let mut best_d = f64::INFINITY;
        for i in 0..comps.len() {
            for j in (i + 1)..comps.len() {
                let dv = space.distance(&naturals[i], &naturals[j])?;
                if dv < best_d {
                    best_d = dv;
                    best = (i, j);
                }
            }
        }
        let (i, j) = best;
        let w_total = weights[i] + weights[j];
        let pair = [naturals[i].clone(), naturals[j].clone()];
        let pair_w = [weights[i] / w_total, weights[j] / w_total];
        let merged_nat = space.centroid(&pair, &pair_w, cfg)?;
        let merged = space.source(&merged_nat)?;

        weights[i] = w_total;
        comps[i] = merged;
        naturals[i] = merged_nat;
        weights.remove(j);
        comps.remove(j);
        naturals.remove(j);
    }
    MixtureModel::new(m.dim(), weights, comps)
}

/// Hard assignment of points to mixture components by maximum weighted
/// log-density.
pub fn assign_points(m: &MixtureModel, pc: &PointCloud) -> Result<Vec<usize>> {
    if pc.dim() != m.dim() {
        return Err(Error::Shape(format!(
            "points have dimension {}, mixture {}",
            pc.dim(),
            m.dim()
        )));
    }
    let family = ExpFamily::mv_gaussian(m.dim())?;
    let naturals: Vec<CompositeParam> = m
        .components()
        .iter()
        .map(|c| family.to_natural(&SourceParam::MvGaussian(c.clone())))
        .collect::<Result<_>>()?;
    let log_weights: Vec<f64> = m.weights().iter().map(|w| w.ln()).collect();
    (0..pc.len())
        .map(|i| {
            let x = pc.row(i);
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for (j, t) in naturals.iter().enumerate() {
                let score = log_weights[j] + family.log_density(t, x)?;
                if score > best_score {
                    best_score = score;
                    best = j;
                }
            }
            Ok(best)
        })
        .collect()
}

/// Which solver won an instance under the 1% rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Generic,
    Tailored,
    Tie,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Winner::Generic => write!(f, "generic"),
            Winner::Tailored => write!(f, "tailored"),
            Winner::Tie => write!(f, "tie"),
        }
    }
}

/// Head-to-head result on one instance.
#[derive(Debug, Clone)]
pub struct InstanceComparison {
    pub instance_id: usize,
    pub energy_generic: Option<f64>,
    pub energy_tailored: Option<f64>,
    pub winner: Winner,
    /// Iterations until the solver's energy trace first reaches within 1% of
    /// the better final energy.
    pub iters_generic: Option<usize>,
    pub iters_tailored: Option<usize>,
    pub failure: Option<String>,
}

/// Aggregates over a comparison batch.
#[derive(Debug, Clone)]
pub struct ComparisonSummary {
    pub instances: usize,
    /// Fraction of instances where the method's energy is within 1% of the
    /// better final energy.
    pub generic_correct_fraction: f64,
    pub tailored_correct_fraction: f64,
    pub mean_iters_generic: f64,
    pub mean_iters_tailored: f64,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub rows: Vec<InstanceComparison>,
    pub summary: ComparisonSummary,
}

fn iters_to_threshold(trace: &[f64], threshold: f64) -> Option<usize> {
    trace.iter().position(|&e| e <= threshold)
}

/// Run both centroid solvers on each instance and decide the winner by the
/// 1% energy rule: whenever the two final energies differ by more than 1%,
/// the method with the higher energy is beaten. Per-instance failures are
/// recorded, never aborting the batch.
pub fn compare_solvers(
    instances: &[(Vec<GaussianParam>, Vec<f64>)],
    cfg: &SolverConfig,
) -> Result<ComparisonReport> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(instances.len());
    for (id, (comps, ws)) in instances.iter().enumerate() {
        rows.push(compare_one(id, comps, ws, cfg));
    }
    let n = rows.len();
    let correct = |selector: fn(&InstanceComparison) -> bool| -> f64 {
        if n == 0 {
            return 0.0;
        }
        rows.iter().filter(|r| selector(r)).count() as f64 / n as f64
    };
    let mean_iters = |selector: fn(&InstanceComparison) -> Option<usize>| -> f64 {
        let vals: Vec<usize> = rows.iter().filter_map(selector).collect();
        if vals.is_empty() {
            0.0
        } else {
            vals.iter().sum::<usize>() as f64 / vals.len() as f64
        }
    };
    let summary = ComparisonSummary {
        instances: n,
        generic_correct_fraction: correct(|r| {
            r.winner == Winner::Generic || r.winner == Winner::Tie
        }),
        tailored_correct_fraction: correct(|r| {
            r.winner == Winner::Tailored || r.winner == Winner::Tie
        }),
        mean_iters_generic: mean_iters(|r| r.iters_generic),
        mean_iters_tailored: mean_iters(|r| r.iters_tailored),
        failures: rows.iter().filter(|r| r.failure.is_some()).count(),
    };
    Ok(ComparisonReport { rows, summary })
}

fn compare_one(
    id: usize,
    comps: &[GaussianParam],
    ws: &[f64],
    cfg: &SolverConfig,
) -> InstanceComparison {
    let mut failure: Option<String> = None;

    let generic = run_generic(comps, ws, cfg);
    let (energy_generic, trace_generic) = match &generic {
        Ok((e, trace)) => (Some(*e), Some(trace.clone())),
        Err(e) => {
            failure = Some(format!("generic: {e}"));
            (None, None)
        }
    };

    let tailored = solve_tailored(comps, ws, cfg);
    let (energy_tailored, trace_tailored) = match &tailored {
        Ok((center, report)) => {
            if let Some(reason) = &report.failure {
                let msg = format!("tailored: {reason}");
                failure = Some(match failure {
                    Some(prev) => format!("{prev}; {msg}"),
                    None => msg,
                });
            }
            let e = bhattacharyya_energy(comps, ws, center).ok();
            (e, Some(report.energy_trace.clone()))
        }
        Err(e) => {
            let msg = format!("tailored: {e}");
            failure = Some(match failure {
                Some(prev) => format!("{prev}; {msg}"),
                None => msg,
            });
            (None, None)
        }
    };

    let winner = match (energy_generic, energy_tailored) {
        (Some(eg), Some(et)) => {
            let best = eg.min(et);
            let generic_ok = eg <= 1.01 * best + 1e-15;
            let tailored_ok = et <= 1.01 * best + 1e-15;
            match (generic_ok, tailored_ok) {
                (true, true) => Winner::Tie,
                (true, false) => Winner::Generic,
                (false, true) => Winner::Tailored,
                (false, false) => Winner::Tie,
            }
        }
        (Some(_), None) => Winner::Generic,
        (None, Some(_)) => Winner::Tailored,
        (None, None) => Winner::Tie,
    };

    let best = match (energy_generic, energy_tailored) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    let threshold = best.map(|b| 1.01 * b + 1e-15);
    let iters_generic = match (&trace_generic, threshold) {
        (Some(t), Some(th)) => iters_to_threshold(t, th),
        _ => None,
    };
    let iters_tailored = match (&trace_tailored, threshold) {
        (Some(t), Some(th)) => iters_to_threshold(t, th),
        _ => None,
    };

    InstanceComparison {
        instance_id: id,
        energy_generic,
        energy_tailored,
        winner,
        iters_generic,
        iters_tailored,
        failure,
    }
}

fn run_generic(
    comps: &[GaussianParam],
    ws: &[f64],
    cfg: &SolverConfig,
) -> Result<(f64, Vec<f64>)> {
    let space = NaturalSpace::new(comps[0].dim())?;
    let naturals = space.naturals(comps)?;
    let set = WeightedSet::new(naturals, ws.to_vec())?;
    let (centroid, report) = solve_centroid(space.logn.as_ref(), &set, cfg)?;
    let center = space.source(&centroid)?;
    let energy = bhattacharyya_energy(comps, ws, &center)?;
    Ok((energy, report.energy_trace))
}

/// Deterministic random instances for the comparison protocol: means in a
/// moderate box, covariances well-conditioned PD.
pub fn random_instances(
    count: usize,
    dim: usize,
    components: usize,
    seed: u64,
) -> Vec<(Vec<GaussianParam>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let comps: Vec<GaussianParam> = (0..components)
                .map(|_| random_gaussian(dim, &mut rng))
                .collect();
            let raw: Vec<f64> = (0..components).map(|_| rng.gen_range(0.5..1.5)).collect();
            let total: f64 = raw.iter().sum();
            let ws: Vec<f64> = raw.iter().map(|w| w / total).collect();
            (comps, ws)
        })
        .collect()
}

pub(crate) fn random_gaussian(dim: usize, rng: &mut ChaCha8Rng) -> GaussianParam {
    let mean: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    // A Aᵀ/d + 0.2 I keeps the spectrum away from zero.
    let a: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut cov = SymMat::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let dot: f64 = (0..dim).map(|k| a[i][k] * a[j][k]).sum();
            cov.set(i, j, dot / dim as f64);
        }
    }
    for i in 0..dim {
        cov.add_assign_at(i, i, 0.2);
    }
    GaussianParam::new(mean, cov).expect("constructed PD")
}

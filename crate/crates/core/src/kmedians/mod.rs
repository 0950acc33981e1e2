//! One-dimensional center-based clustering.
//!
//! [`run_kmedians`] alternates nearest-centroid assignment under absolute distance with a
//! median update until the centroids stop moving, minimising the total absolute deviation
//! `J = Σ_j Σ_{x ∈ cluster j} |x − c_j|`. [`run_kmeans`] is the mean / squared-distance
//! counterpart, kept as a baseline. [`brute_force_optimal`] is an exhaustive oracle for small
//! inputs.
//!
//! Results always report centroids sorted in descending order, so cluster 0 holds the
//! strongest field values.

mod oracle;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracle::{brute_force_optimal, BRUTE_FORCE_MAX_N, BRUTE_FORCE_MAX_PARTITIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "seed", rename_all = "snake_case")]
pub enum InitStrategy {
    /// Empirical quantiles at `(i + 0.5) / k`, deterministic.
    QuantileSeed,
    /// `k` distinct data values drawn with a seeded generator, each new one weighted by its
    /// distance to the nearest value already drawn.
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringParams {
    pub k: usize,
    pub max_iterations: usize,
    /// Largest centroid movement (µT) still counted as converged.
    pub tolerance: f64,
    pub init: InitStrategy,
    /// Independent runs; the lowest objective wins. Run 0 uses `init`, run `r > 0` uses
    /// `SeededRandom(base + r)` where `base` is the configured seed (0 for quantile seeding).
    pub restarts: usize,
}

impl ClusteringParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_init(mut self, init: InitStrategy) -> Self {
        self.init = init;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be >= 0, got {}",
                self.tolerance
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        Ok(())
    }

    /// Initialisation used by run `restart` of a multi-start run.
    pub fn init_for_restart(&self, restart: usize) -> InitStrategy {
        if restart == 0 {
            return self.init;
        }
        let base = match self.init {
            InitStrategy::QuantileSeed => 0,
            InitStrategy::SeededRandom(seed) => seed,
        };
        InitStrategy::SeededRandom(base.wrapping_add(restart as u64))
    }
}

impl Default for ClusteringParams {
    fn default() -> Self {
        Self {
            k: 5,
            max_iterations: 100,
            tolerance: 0.0,
            init: InitStrategy::QuantileSeed,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    /// Cluster index of each datum, in input order.
    pub assignments: Vec<usize>,
    /// Sorted descending.
    pub centroids: Vec<f64>,
    /// Sum of absolute deviations for K-Medians; sum of squared deviations for K-Means.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every assignment step and every update step of the returned run.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl ClusteringResult {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Member values of each cluster, in input order.
    pub fn clusters(&self, data: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.k()];
        for (&x, &a) in data.iter().zip(&self.assignments) {
            out[a].push(x);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Center {
    Median,
    Mean,
}

impl Center {
    fn of(self, values: &mut [f64]) -> f64 {
        match self {
            Center::Median => median_in_place(values),
            Center::Mean => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    fn loss(self, x: f64, c: f64) -> f64 {
        match self {
            Center::Median => (x - c).abs(),
            Center::Mean => (x - c) * (x - c),
        }
    }
}

/// Median with the mean of the two middle values for even lengths. Reorders `values`.
fn median_in_place(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn check_data(data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::InvalidInput("no data to cluster".into()));
    }
    if let Some(i) = data.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("datum {i} is not finite")));
    }
    Ok(())
}

fn distinct_sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Initial centroids, sorted descending.
pub fn init_centroids(data: &[f64], params: &ClusteringParams) -> Result<Vec<f64>> {
    init_with(data, params.k, params.init)
}

fn init_with(data: &[f64], k: usize, init: InitStrategy) -> Result<Vec<f64>> {
    check_data(data)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let distinct = distinct_sorted(data);
    if k > distinct.len() {
        return Err(Error::InfeasibleK {
            k,
            distinct: distinct.len(),
        });
    }
    let mut centroids = match init {
        InitStrategy::QuantileSeed => quantile_seeds(data, &distinct, k),
        InitStrategy::SeededRandom(seed) => distance_weighted_seeds(data, k, seed)?,
    };
    sort_descending(&mut centroids);
    Ok(centroids)
}

/// First centroid uniform over the data, each further one drawn with probability
/// proportional to the datum's distance from its nearest chosen centroid. Chosen values have
/// weight zero, so the draw yields `k` distinct values whenever `k <= distinct`.
fn distance_weighted_seeds(data: &[f64], k: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![data[rng.random_range(0..data.len())]];
    let mut nearest: Vec<f64> = data.iter().map(|x| (x - chosen[0]).abs()).collect();
    while chosen.len() < k {
        let pick = WeightedIndex::new(&nearest)
            .map_err(|e| Error::InvalidInput(format!("seeding weights: {e}")))?
            .sample(&mut rng);
        let c = data[pick];
        chosen.push(c);
        for (d, x) in nearest.iter_mut().zip(data) {
            *d = d.min((x - c).abs());
        }
    }
    Ok(chosen)
}

/// Midpoint-interpolated quantiles (1-based position `n·p + 1/2`) at `p = (i + 0.5) / k`.
/// A quantile equal to one already chosen is replaced by the nearest data value not yet used.
fn quantile_seeds(data: &[f64], distinct: &[f64], k: usize) -> Vec<f64> {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut chosen: Vec<f64> = Vec::with_capacity(k);
    for i in 0..k {
        // position = n (2i + 1) / 2k + 1/2, kept rational so k = n lands exactly on data
        let num = n * (2 * i + 1) + k;
        let den = 2 * k;
        let pos = (num / den).clamp(1, n);
        let frac = if num / den >= n {
            0.0
        } else {
            (num % den) as f64 / den as f64
        };
        let lo = sorted[pos - 1];
        let q = if frac == 0.0 || pos == n {
            lo
        } else {
            lo + frac * (sorted[pos] - lo)
        };
        let q = if chosen.contains(&q) {
            *distinct
                .iter()
                .filter(|v| !chosen.contains(v))
                .min_by(|a, b| (*a - q).abs().total_cmp(&(*b - q).abs()).then(a.total_cmp(b)))
                .expect("k <= distinct count leaves an unused value")
        } else {
            q
        };
        chosen.push(q);
    }
    chosen
}

/// Index of the nearest centroid under absolute distance for each datum; ties go to the
/// lowest index.
pub fn assign(data: &[f64], centroids: &[f64]) -> Vec<usize> {
    data.iter().map(|&x| nearest(x, centroids)).collect()
}

fn nearest(x: f64, centroids: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, &c) in centroids.iter().enumerate() {
        let d = (x - c).abs();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Median of every cluster. Fails if a cluster in `0..k` has no members.
pub fn update_centroids(data: &[f64], assignments: &[usize], k: usize) -> Result<Vec<f64>> {
    update_with(data, assignments, k, Center::Median)
}

fn update_with(data: &[f64], assignments: &[usize], k: usize, center: Center) -> Result<Vec<f64>> {
    let mut members = vec![Vec::new(); k];
    for (&x, &a) in data.iter().zip(assignments) {
        if a >= k {
            return Err(Error::InvalidInput(format!("cluster index {a} out of range for k = {k}")));
        }
        members[a].push(x);
    }
    members
        .iter_mut()
        .enumerate()
        .map(|(j, m)| {
            if m.is_empty() {
                Err(Error::InvalidInput(format!("cluster {j} is empty")))
            } else {
                Ok(center.of(m))
            }
        })
        .collect()
}

/// Sum of absolute deviations of every datum from its cluster's centroid.
pub fn objective_j(data: &[f64], assignments: &[usize], centroids: &[f64]) -> f64 {
    objective_with(data, assignments, centroids, Center::Median)
}

fn objective_with(data: &[f64], assignments: &[usize], centroids: &[f64], center: Center) -> f64 {
    data.iter()
        .zip(assignments)
        .map(|(&x, &a)| center.loss(x, centroids[a]))
        .sum()
}

/// K-Medians with the configured number of restarts; the run with the lowest objective
/// (earliest on ties) is returned.
pub fn run_kmedians(data: &[f64], params: &ClusteringParams) -> Result<ClusteringResult> {
    run_best(data, params, Center::Median)
}

/// K-Means baseline: mean centroids and squared-distance objective (µT²).
pub fn run_kmeans(data: &[f64], params: &ClusteringParams) -> Result<ClusteringResult> {
    run_best(data, params, Center::Mean)
}

/// A single K-Medians run from explicit starting centroids.
pub fn run_kmedians_from(data: &[f64], initial: &[f64], params: &ClusteringParams) -> Result<ClusteringResult> {
    params.validate()?;
    check_data(data)?;
    let distinct = distinct_sorted(data).len();
    if initial.len() != params.k {
        return Err(Error::InvalidInput(format!(
            "{} initial centroids for k = {}",
            initial.len(),
            params.k
        )));
    }
    if params.k > distinct {
        return Err(Error::InfeasibleK { k: params.k, distinct });
    }
    Ok(lloyd(data, initial.to_vec(), params, Center::Median))
}

fn run_best(data: &[f64], params: &ClusteringParams, center: Center) -> Result<ClusteringResult> {
    params.validate()?;
    let mut best: Option<ClusteringResult> = None;
    for r in 0..params.restarts {
        let init = init_with(data, params.k, params.init_for_restart(r))?;
        let result = lloyd(data, init, params, center);
        if best.as_ref().is_none_or(|b| result.objective < b.objective) {
            best = Some(result);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Alternating assign/update iteration. Empty clusters are reseeded with the datum farthest
/// from its own centroid before the update step.
fn lloyd(data: &[f64], mut centroids: Vec<f64>, params: &ClusteringParams, center: Center) -> ClusteringResult {
    let k = params.k;
    let mut history = Vec::with_capacity(2 * params.max_iterations);
    let mut assignments = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=params.max_iterations {
        iterations = it;
        sort_descending(&mut centroids);
        assignments = assign(data, &centroids);
        repair_empty(data, &mut centroids, &mut assignments);
        history.push(objective_with(data, &assignments, &centroids, center));

        let updated = update_with(data, &assignments, k, center).expect("no empty cluster after repair");
        history.push(objective_with(data, &assignments, &updated, center));
        let movement = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        centroids = updated;
        if movement <= params.tolerance {
            converged = true;
            break;
        }
    }

    // relabel so that centroids run in descending order
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centroids[b].total_cmp(&centroids[a]).then(a.cmp(&b)));
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let centroids: Vec<f64> = order.iter().map(|&j| centroids[j]).collect();
    let assignments: Vec<usize> = assignments.iter().map(|&a| relabel[a]).collect();
    let objective = objective_with(data, &assignments, &centroids, center);

    ClusteringResult {
        assignments,
        centroids,
        objective,
        iterations,
        converged,
        history,
    }
}

fn repair_empty(data: &[f64], centroids: &mut [f64], assignments: &mut Vec<usize>) {
    let k = centroids.len();
    // each round moves one datum to distance zero, so the objective strictly drops; the cap
    // only guards against pathological floating-point input
    for _ in 0..k * data.len().max(1) {
        let mut sizes = vec![0usize; k];
        for &a in assignments.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let farthest = data
            .iter()
            .zip(assignments.iter())
            .enumerate()
            .map(|(i, (&x, &a))| (i, (x - centroids[a]).abs()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        centroids[empty] = data[farthest];
        sort_descending(centroids);
        *assignments = assign(data, centroids);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR: [f64; 4] = [0.1, 0.2, 0.9, 1.0];

    #[test]
    fn quantile_seed_examples() {
        let p = ClusteringParams::new(2);
        assert_eq!(init_centroids(&[1.0, 2.0, 3.0, 4.0], &p).unwrap(), vec![3.5, 1.5]);

        let data = [0.7, 0.1, 0.5, 0.3, 0.9, 0.2, 0.4];
        let c = init_centroids(&data, &ClusteringParams::new(7)).unwrap();
        let mut want = data.to_vec();
        sort_descending(&mut want);
        assert_eq!(c, want);
    }

    #[test]
    fn quantile_seed_nudges_duplicates() {
        // every quantile of this data is 1.0 except the last
        let data = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 3.0];
        let c = init_centroids(&data, &ClusteringParams::new(3)).unwrap();
        assert_eq!(c.len(), 3);
        let mut d = c.clone();
        d.dedup();
        assert_eq!(d.len(), 3, "{c:?}");
    }

    #[test]
    fn seeded_random_is_reproducible_and_distinct() {
        let data: Vec<f64> = (0..20).map(|i| (i % 7) as f64).collect();
        let p = ClusteringParams::new(4).with_init(InitStrategy::SeededRandom(9));
        let a = init_centroids(&data, &p).unwrap();
        assert_eq!(a, init_centroids(&data, &p).unwrap());
        let mut d = a.clone();
        d.dedup();
        assert_eq!(d.len(), 4);
        assert!(a.iter().all(|c| data.contains(c)));
    }

    #[test]
    fn infeasible_k() {
        assert!(matches!(
            init_centroids(&[1.0, 1.0, 2.0], &ClusteringParams::new(3)),
            Err(Error::InfeasibleK { k: 3, distinct: 2 })
        ));
        assert!(matches!(
            run_kmedians(&[1.0, 2.0], &ClusteringParams::new(5)),
            Err(Error::InfeasibleK { .. })
        ));
    }

    #[test]
    fn assign_examples() {
        assert_eq!(assign(&[0.0, 10.0], &[1.0, 9.0]), vec![0, 1]);
        assert_eq!(assign(&[5.0], &[4.0, 6.0]), vec![0]);
        assert_eq!(assign(&[1.0, -3.0, 8.0], &[2.0]), vec![0, 0, 0]);
    }

    #[test]
    fn update_examples() {
        assert_eq!(update_centroids(&[1.0, 2.0, 100.0], &[0, 0, 0], 1).unwrap(), vec![2.0]);
        assert_eq!(update_centroids(&[1.0, 3.0], &[0, 0], 1).unwrap(), vec![2.0]);
        assert_eq!(update_centroids(&[5.0], &[0], 1).unwrap(), vec![5.0]);
        assert!(update_centroids(&[5.0], &[0], 2).is_err());
    }

    #[test]
    fn objective_examples() {
        let j = objective_j(&FOUR, &[0, 0, 1, 1], &[0.15, 0.95]);
        assert!((j - 0.2).abs() < 1e-12);
        assert_eq!(objective_j(&[1.0, 2.0], &[0, 1], &[1.0, 2.0]), 0.0);
        assert_eq!(objective_j(&[1.0, 2.0, 3.0], &[0, 0, 0], &[2.0]), 2.0);
    }

    #[test]
    fn four_points_two_clusters() {
        let r = run_kmedians(&FOUR, &ClusteringParams::new(2)).unwrap();
        assert_eq!(r.assignments, vec![1, 1, 0, 0]);
        assert!((r.objective - 0.2).abs() < 1e-12);
        assert!(r.converged);
        assert!(r.centroids[0] > r.centroids[1]);
    }

    #[test]
    fn identical_data_single_cluster() {
        let r = run_kmedians(&[0.7; 6], &ClusteringParams::new(1)).unwrap();
        assert_eq!(r.centroids, vec![0.7]);
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
    }

    #[test]
    fn kmeans_baseline() {
        let m = run_kmeans(&[1.0, 2.0, 100.0], &ClusteringParams::new(1)).unwrap();
        assert!((m.centroids[0] - 103.0 / 3.0).abs() < 1e-12);
        let d = run_kmedians(&[1.0, 2.0, 100.0], &ClusteringParams::new(1)).unwrap();
        assert_eq!(d.centroids, vec![2.0]);

        for run in [run_kmeans, run_kmedians] {
            assert_eq!(run(&[-1.0, 1.0], &ClusteringParams::new(1)).unwrap().centroids, vec![0.0]);
        }
        let m = run_kmeans(&FOUR, &ClusteringParams::new(2)).unwrap();
        assert_eq!(m.assignments, vec![1, 1, 0, 0]);
    }

    #[test]
    fn repair_fills_empty_cluster() {
        // the middle seed captures nothing on the first assignment
        let data = [0.0, 0.0, 0.0, 10.0, 10.0, 11.0];
        let p = ClusteringParams::new(3);
        let r = run_kmedians_from(&data, &[20.0, 19.0, 0.0], &p).unwrap();
        assert!(r.cluster_sizes().iter().all(|&s| s > 0), "{r:?}");
        assert!(r.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn history_is_non_increasing() {
        let data: Vec<f64> = (0..40).map(|i| ((i * 37) % 101) as f64 / 10.0).collect();
        for k in 1..6 {
            let r = run_kmedians(&data, &ClusteringParams::new(k).with_restarts(3)).unwrap();
            assert!(r.history.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{k}: {:?}", r.history);
        }
    }

    #[test]
    fn invalid_params() {
        let mut p = ClusteringParams::new(1);
        p.max_iterations = 0;
        assert!(run_kmedians(&[1.0], &p).is_err());
        let mut p = ClusteringParams::new(1);
        p.tolerance = -1.0;
        assert!(run_kmedians(&[1.0], &p).is_err());
        assert!(run_kmedians(&[], &ClusteringParams::new(1)).is_err());
        assert!(run_kmedians(&[f64::NAN], &ClusteringParams::new(1)).is_err());
        assert!(run_kmedians(&[1.0], &ClusteringParams::new(0)).is_err());
    }
}

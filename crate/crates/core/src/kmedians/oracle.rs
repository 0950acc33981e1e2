//! Exhaustive K-Medians for small inputs.
//!
//! In one dimension some optimal partition consists of contiguous runs of the sorted data,
//! so it is enough to try every placement of `k − 1` cuts among the `n − 1` gaps.

use super::{median_in_place, ClusteringResult};
use crate::error::{Error, Result};

/// Largest input the oracle accepts.
pub const BRUTE_FORCE_MAX_N: usize = 32;

/// Largest number of contiguous partitions the oracle will enumerate.
pub const BRUTE_FORCE_MAX_PARTITIONS: u128 = 10_000_000;

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Globally minimal objective over all partitions into `k` non-empty clusters.
pub fn brute_force_optimal(data: &[f64], k: usize) -> Result<ClusteringResult> {
    let n = data.len();
    if n == 0 {
        return Err(Error::InvalidInput("no data to cluster".into()));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite datum".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InfeasibleK { k, distinct: n });
    }
    if n > BRUTE_FORCE_MAX_N || binomial(n - 1, k - 1) > BRUTE_FORCE_MAX_PARTITIONS {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data[a].total_cmp(&data[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| data[i]).collect();

    // cost[i][j]: absolute deviation of sorted[i..j] from its median
    let mut cost = vec![vec![(0.0, 0.0); n + 1]; n + 1];
    for i in 0..n {
        for j in i + 1..=n {
            let mut run = sorted[i..j].to_vec();
            let m = median_in_place(&mut run);
            cost[i][j] = (sorted[i..j].iter().map(|x| (x - m).abs()).sum(), m);
        }
    }

    // cuts[c] is the start of cluster c + 1 in sorted order
    let mut cuts: Vec<usize> = (1..k).collect();
    let mut best_j = f64::INFINITY;
    let mut best_cuts = cuts.clone();
    loop {
        let mut j = 0.0;
        let mut start = 0;
        for &end in cuts.iter().chain(std::iter::once(&n)) {
            j += cost[start][end].0;
            start = end;
        }
        if j < best_j {
            best_j = j;
            best_cuts = cuts.clone();
        }
        if !next_combination(&mut cuts, n) {
            break;
        }
    }

    // contiguous runs ascend in value; label them so centroids descend
    let mut assignments = vec![0; n];
    let mut centroids = Vec::with_capacity(k);
    let mut start = 0;
    for (run, &end) in best_cuts.iter().chain(std::iter::once(&n)).enumerate() {
        let label = k - 1 - run;
        for &i in &order[start..end] {
            assignments[i] = label;
        }
        centroids.push(cost[start][end].1);
        start = end;
    }
    centroids.reverse();
    let objective = super::objective_j(data, &assignments, &centroids);

    Ok(ClusteringResult {
        assignments,
        centroids,
        objective,
        iterations: 0,
        converged: true,
        history: Vec::new(),
    })
}

/// Advances strictly increasing `cuts` drawn from `1..n` to the next combination.
fn next_combination(cuts: &mut [usize], n: usize) -> bool {
    let r = cuts.len();
    for i in (0..r).rev() {
        // largest value position i may take
        if cuts[i] < n - (r - i) {
            cuts[i] += 1;
            for j in i + 1..r {
                cuts[j] = cuts[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_example() {
        let r = brute_force_optimal(&[0.1, 0.2, 0.9, 1.0], 2).unwrap();
        assert!((r.objective - 0.2).abs() < 1e-12);
        assert_eq!(r.assignments, vec![1, 1, 0, 0]);
    }

    #[test]
    fn k_equals_n_and_k_one() {
        let data = [3.0, 1.0, 4.0, 1.5, 9.0];
        assert_eq!(brute_force_optimal(&data, 5).unwrap().objective, 0.0);
        let r = brute_force_optimal(&data, 1).unwrap();
        assert_eq!(r.centroids, vec![3.0]);
        assert_eq!(r.objective, 2.0 + 1.5 + 1.0 + 0.0 + 6.0);
    }

    #[test]
    fn enumeration_count() {
        let mut cuts = vec![1, 2];
        let mut count = 1;
        while next_combination(&mut cuts, 6) {
            count += 1;
        }
        assert_eq!(count, binomial(5, 2) as usize);
    }

    #[test]
    fn refuses_large_inputs() {
        let data: Vec<f64> = (0..BRUTE_FORCE_MAX_N + 1).map(|i| i as f64).collect();
        assert!(matches!(brute_force_optimal(&data, 2), Err(Error::TooLarge { .. })));
        let data: Vec<f64> = (0..BRUTE_FORCE_MAX_N).map(|i| i as f64).collect();
        assert!(matches!(brute_force_optimal(&data, 16), Err(Error::TooLarge { .. })));
        assert!(brute_force_optimal(&data, 3).is_ok());
    }
}

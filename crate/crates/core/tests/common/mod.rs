//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

pub const MU0: f64 = 4.0e-7 * PI;

/// Exact 1-D K-Medians optimum by dynamic programming over sorted prefixes.
///
/// `best[c][j]` is the least cost of splitting the first `j` sorted values into `c` runs.
/// Run costs use the lower median, which attains the same minimum as any median.
pub fn dp_kmedians(data: &[f64], k: usize) -> f64 {
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    assert!(k >= 1 && k <= n);
    let cost = |i: usize, j: usize| -> f64 {
        let m = xs[i + (j - i - 1) / 2];
        xs[i..j].iter().map(|x| (x - m).abs()).sum()
    };
    let mut best = vec![vec![f64::INFINITY; n + 1]; k + 1];
    best[0][0] = 0.0;
    for c in 1..=k {
        for j in c..=n {
            for i in c - 1..j {
                let v = best[c - 1][i] + cost(i, j);
                if v < best[c][j] {
                    best[c][j] = v;
                }
            }
        }
    }
    best[k][n]
}

/// Minimum Manhattan objective over every assignment of `data` to `k` non-empty labels.
/// Enumerates all `k^n` labelings, so only for tiny inputs.
pub fn exhaustive_kmedians(data: &[f64], k: usize) -> f64 {
    let n = data.len();
    let total = k.pow(n as u32);
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % k;
            c /= k;
        }
        let mut j = 0.0;
        let mut ok = true;
        for cluster in 0..k {
            let mut members: Vec<f64> = (0..n).filter(|&i| labels[i] == cluster).map(|i| data[i]).collect();
            if members.is_empty() {
                ok = false;
                break;
            }
            members.sort_by(f64::total_cmp);
            let m = members[(members.len() - 1) / 2];
            j += members.iter().map(|x| (x - m).abs()).sum::<f64>();
        }
        if ok && j < best {
            best = j;
        }
    }
    best
}

/// Field magnitude of an infinite straight wire at distance `d`, µT.
pub fn infinite_wire_ut(current: f64, d: f64) -> f64 {
    MU0 * current / (2.0 * PI * d) * 1e6
}

/// Field magnitude at the centre of a square loop of side `a`, µT.
pub fn square_loop_center_ut(current: f64, a: f64) -> f64 {
    2.0 * 2f64.sqrt() * MU0 * current / (PI * a) * 1e6
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

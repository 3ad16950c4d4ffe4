//! Shared generators and independent reference implementations for the
//! oracle tests. Everything here is deliberately written from scratch with
//! plain loops so it cannot share a bug with the library code it checks.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn u01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw (Box-Muller).
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = u01(rng).max(f64::MIN_POSITIVE);
    let u2 = u01(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}

/// Centers a vector so it is a valid CLR row.
pub fn zero_sum(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

/// Random strictly positive composition with parts spanning several orders
/// of magnitude.
pub fn random_parts(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| (u01(rng) * 12.0 - 6.0).exp()).collect()
}

/// Three well-separated clusters in 6-dimensional CLR space: centroid
/// separation is > 5x the within-cluster RMS spread. Returns (rows, truth).
pub fn three_cluster_clr(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut r = rng(seed);
    let d = 6;
    let means: Vec<Vec<f64>> = (0..3)
        .map(|c| {
            let mut m = vec![0.0; d];
            m[c] = 3.0;
            zero_sum(&m)
        })
        .collect();
    let sigma = 0.12;
    let mut rows = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % 3;
        let noise: Vec<f64> = (0..d).map(|_| sigma * normal(&mut r)).collect();
        let noise = zero_sum(&noise);
        rows.push(means[c].iter().zip(&noise).map(|(m, e)| m + e).collect());
        truth.push(c);
    }
    (rows, truth)
}

fn wcss_of_assignment(points: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let d = points[0].len();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignment) {
        counts[a] += 1;
        for (s, &v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    let mut total = 0.0;
    for (p, &a) in points.iter().zip(assignment) {
        for (j, &v) in p.iter().enumerate() {
            let m = sums[a][j] / counts[a] as f64;
            total += (v - m) * (v - m);
        }
    }
    total
}

/// Exhaustive minimum wcss over every partition of the points into exactly
/// k non-empty groups, enumerated as restricted growth strings.
pub fn brute_force_optimal_wcss(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let mut assignment = vec![0usize; n];
    let mut best = f64::INFINITY;
    fn recurse(
        points: &[Vec<f64>],
        assignment: &mut Vec<usize>,
        i: usize,
        used: usize,
        k: usize,
        best: &mut f64,
    ) {
        let n = points.len();
        if i == n {
            if used == k {
                let w = wcss_of_assignment(points, assignment, k);
                if w < *best {
                    *best = w;
                }
            }
            return;
        }
        // prune branches that can no longer reach k groups
        if used + (n - i) < k {
            return;
        }
        let cap = (used + 1).min(k);
        for c in 0..cap {
            assignment[i] = c;
            recurse(points, assignment, i + 1, used.max(c + 1), k, best);
        }
    }
    recurse(points, &mut assignment, 0, 0, k, &mut best);
    best
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Plain-loop silhouette average, the textbook O(n^2) definition.
pub fn reference_silhouette(points: &[Vec<f64>], assignment: &[usize]) -> f64 {
    let n = points.len();
    let k = assignment.iter().max().unwrap() + 1;
    let mut sizes = vec![0usize; k];
    for &a in assignment {
        sizes[a] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = assignment[i];
        if sizes[own] == 1 {
            continue; // s(i) = 0
        }
        let mut dist_sum = vec![0.0; k];
        for j in 0..n {
            if i != j {
                dist_sum[assignment[j]] += euclid(&points[i], &points[j]);
            }
        }
        let a = dist_sum[own] / (sizes[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != own {
                b = b.min(dist_sum[c] / sizes[c] as f64);
            }
        }
        if a != b {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}

/// Plain-loop Caliński-Harabasz.
pub fn reference_calinski_harabasz(points: &[Vec<f64>], assignment: &[usize]) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let k = assignment.iter().max().unwrap() + 1;
    let mut global = vec![0.0; d];
    for p in points {
        for (g, &v) in global.iter_mut().zip(p) {
            *g += v / n as f64;
        }
    }
    let mut sums = vec![vec![0.0; d]; k];
    let mut sizes = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignment) {
        sizes[a] += 1;
        for (s, &v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    let mut w = 0.0;
    for (p, &a) in points.iter().zip(assignment) {
        for (j, &v) in p.iter().enumerate() {
            let m = sums[a][j] / sizes[a] as f64;
            w += (v - m) * (v - m);
        }
    }
    let mut b = 0.0;
    for c in 0..k {
        for j in 0..d {
            let m = sums[c][j] / sizes[c] as f64;
            b += sizes[c] as f64 * (m - global[j]) * (m - global[j]);
        }
    }
    (b / (k - 1) as f64) / (w / (n - k) as f64)
}

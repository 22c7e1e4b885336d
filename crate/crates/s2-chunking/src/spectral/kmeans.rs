//! Deterministic k-means with farthest-point initialization and restarts.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SpectralConfig;

/// A labelling of n points into k clusters; every cluster id in `0..k` is
/// used at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl ClusterAssignment {
    /// Members of each cluster in point order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &label) in self.labels.iter().enumerate() {
            out[label].push(i);
        }
        out
    }
}

/// Cluster `points` (rows) into `k` groups.
///
/// Deterministic given `config.seed`: each restart starts farthest-point
/// initialization from a seeded index, Lloyd iterations run until labels
/// stabilize or `kmeans_max_iters` is hit, and the restart with the lowest
/// within-cluster sum of squares wins (earliest restart on ties). Empty
/// clusters are re-seeded at the point farthest from its current centroid.
pub fn kmeans(points: &Array2<f64>, k: usize, config: &SpectralConfig) -> ClusterAssignment {
    let n = points.nrows();
    assert!(k >= 1, "k must be at least 1");
    assert!(k <= n, "k ({k}) must not exceed the number of points ({n})");

    if k == n {
        // WCSS 0 is optimal: every point is its own cluster.
        return ClusterAssignment { labels: (0..n).collect(), k };
    }
    if k == 1 {
        return ClusterAssignment { labels: vec![0; n], k };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..config.kmeans_restarts.max(1) {
        let start = rng.gen_range(0..n);
        let (wcss, labels) = lloyd(points, k, start, config.kmeans_max_iters);
        let replace = match &best {
            Some((best_wcss, _)) => wcss < *best_wcss,
            None => true,
        };
        if replace {
            best = Some((wcss, labels));
        }
    }
    let (_, labels) = best.expect("at least one restart ran");
    ClusterAssignment { labels, k }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

fn lloyd(points: &Array2<f64>, k: usize, start: usize, max_iters: usize) -> (f64, Vec<usize>) {
    let n = points.nrows();
    let d = points.ncols();
    let row = |i: usize| points.row(i);

    // Farthest-point initialization: greedily take the point with the
    // largest distance to its nearest chosen centroid, lowest index first.
    let mut centroid_rows: Vec<usize> = vec![start];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(row(i).to_slice().unwrap(), row(start).to_slice().unwrap()))
        .collect();
    while centroid_rows.len() < k {
        let mut far_idx = 0;
        let mut far_dist = f64::NEG_INFINITY;
        for (i, &dist) in nearest.iter().enumerate() {
            if dist > far_dist {
                far_dist = dist;
                far_idx = i;
            }
        }
        centroid_rows.push(far_idx);
        for i in 0..n {
            let dist = squared_distance(
                row(i).to_slice().unwrap(),
                row(far_idx).to_slice().unwrap(),
            );
            if dist < nearest[i] {
                nearest[i] = dist;
            }
        }
    }
    let mut centroids: Vec<Vec<f64>> = centroid_rows
        .iter()
        .map(|&i| row(i).to_vec())
        .collect();

    let mut labels = vec![0usize; n];
    let mut point_dist = vec![0.0f64; n];
    for _ in 0..max_iters.max(1) {
        // Assignment step; ties go to the lowest centroid index.
        let mut changed = false;
        let mut sizes = vec![0usize; k];
        for i in 0..n {
            let p = row(i).to_slice().unwrap();
            let mut best_c = 0;
            let mut best_d = squared_distance(p, &centroids[0]);
            for (c, centroid) in centroids.iter().enumerate().skip(1) {
                let dist = squared_distance(p, centroid);
                if dist < best_d {
                    best_d = dist;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
            point_dist[i] = best_d;
            sizes[best_c] += 1;
        }

        // Re-seed empty clusters at the point farthest from its centroid,
        // stealing only from clusters that keep at least one member.
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far_idx = None;
            let mut far_dist = f64::NEG_INFINITY;
            for i in 0..n {
                if sizes[labels[i]] >= 2 && point_dist[i] > far_dist {
                    far_dist = point_dist[i];
                    far_idx = Some(i);
                }
            }
            if let Some(i) = far_idx {
                sizes[labels[i]] -= 1;
                labels[i] = c;
                sizes[c] = 1;
                point_dist[i] = 0.0;
                changed = true;
            }
        }

        // Update step.
        let mut sums = vec![vec![0.0f64; d]; k];
        for i in 0..n {
            let p = row(i).to_slice().unwrap();
            let sum = &mut sums[labels[i]];
            for (acc, x) in sum.iter_mut().zip(p) {
                *acc += x;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                let inv = 1.0 / sizes[c] as f64;
                for (target, acc) in centroids[c].iter_mut().zip(&sums[c]) {
                    *target = acc * inv;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let wcss = (0..n)
        .map(|i| squared_distance(row(i).to_slice().unwrap(), &centroids[labels[i]]))
        .sum();
    (wcss, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn config(seed: u64) -> SpectralConfig {
        SpectralConfig { seed, ..SpectralConfig::default() }
    }

    /// Brute-force minimum-WCSS bipartition for tiny inputs.
    fn brute_force_two_clusters(points: &Array2<f64>) -> f64 {
        let n = points.nrows();
        let d = points.ncols();
        let mut best = f64::INFINITY;
        for mask in 1..(1u32 << n) - 1 {
            let mut wcss = 0.0;
            for side in 0..2 {
                let members: Vec<usize> = (0..n)
                    .filter(|&i| ((mask >> i) & 1) as usize == side)
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let mut centroid = vec![0.0; d];
                for &m in &members {
                    for (acc, x) in centroid.iter_mut().zip(points.row(m)) {
                        *acc += x;
                    }
                }
                for c in centroid.iter_mut() {
                    *c /= members.len() as f64;
                }
                for &m in &members {
                    wcss += squared_distance(points.row(m).to_slice().unwrap(), &centroid);
                }
            }
            best = best.min(wcss);
        }
        best
    }

    #[test]
    fn k_equals_n_is_identity() {
        let points = arr2(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        let out = kmeans(&points, 3, &config(0));
        assert_eq!(out.labels, vec![0, 1, 2]);
    }

    #[test]
    fn separated_pairs_recovered_and_match_brute_force() {
        let points = arr2(&[[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [10.1, 10.0]]);
        let out = kmeans(&points, 2, &config(0));
        assert_eq!(out.labels[0], out.labels[1]);
        assert_eq!(out.labels[2], out.labels[3]);
        assert_ne!(out.labels[0], out.labels[2]);

        // the assignment's WCSS equals the brute-force optimum
        let brute = brute_force_two_clusters(&points);
        let clusters = out.clusters();
        let mut wcss = 0.0;
        for members in clusters {
            let mut centroid = vec![0.0; 2];
            for &m in &members {
                for (acc, x) in centroid.iter_mut().zip(points.row(m)) {
                    *acc += x;
                }
            }
            for c in centroid.iter_mut() {
                *c /= members.len() as f64;
            }
            for &m in &members {
                wcss += squared_distance(points.row(m).to_slice().unwrap(), &centroid);
            }
        }
        assert!((wcss - brute).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_labels() {
        let points = arr2(&[
            [0.0, 0.0],
            [0.3, 0.1],
            [5.0, 5.0],
            [5.2, 4.9],
            [9.0, 0.0],
            [9.1, 0.2],
        ]);
        let a = kmeans(&points, 3, &config(42));
        let b = kmeans(&points, 3, &config(42));
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let points = arr2(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [4.0, 4.0]]);
        let out = kmeans(&points, 3, &config(1));
        let mut used = vec![false; 3];
        for &label in &out.labels {
            used[label] = true;
        }
        assert!(used.iter().all(|u| *u), "labels: {:?}", out.labels);
    }
}

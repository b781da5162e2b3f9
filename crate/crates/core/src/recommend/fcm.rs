//! Fuzzy c-means clustering with seeded k-means++ initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcmParams {
    pub clusters: usize,
    /// Fuzzifier `m > 1`.
    pub fuzzifier: f64,
    /// Stop when no centroid moves farther than this.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FcmParams {
    fn default() -> Self {
        Self {
            clusters: 3,
            fuzzifier: 2.0,
            tol: 1e-6,
            max_iter: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmResult {
    pub centroids: Vec<Vec<f64>>,
    /// `n x c`, rows sum to one.
    pub membership: Vec<Vec<f64>>,
    pub fuzzifier: f64,
    pub hard_labels: Vec<usize>,
    pub iterations: usize,
    pub objective: f64,
    /// Objective after every membership update, ending with the returned state.
    pub objective_history: Vec<f64>,
    /// Largest `|sum_k U[i][k] - 1|` seen over every membership update.
    pub max_row_sum_error: f64,
}

/// Z-scored copy of `points` plus the per-dimension mean and standard deviation used.
/// Dimensions with zero spread are only centered.
pub fn standardize(points: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let Some(dim) = points.first().map(Vec::len) else {
        return (Vec::new(), Vec::new(), Vec::new());
    };
    let n = points.len() as f64;
    let mean: Vec<f64> = (0..dim)
        .map(|d| points.iter().map(|p| p[d]).sum::<f64>() / n)
        .collect();
    let std: Vec<f64> = (0..dim)
        .map(|d| {
            let var = points.iter().map(|p| (p[d] - mean[d]).powi(2)).sum::<f64>() / n;
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let scaled = points
        .iter()
        .map(|p| (0..dim).map(|d| (p[d] - mean[d]) / std[d]).collect())
        .collect();
    (scaled, mean, std)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Membership row of one point. A point sitting exactly on a centroid belongs wholly to it
/// (the lowest-index one if several coincide).
pub fn membership_row(point: &[f64], centroids: &[Vec<f64>], fuzzifier: f64) -> Vec<f64> {
    let d2: Vec<f64> = centroids.iter().map(|v| sq_dist(point, v)).collect();
    let mut row = vec![0.0; centroids.len()];
    if let Some(k) = d2.iter().position(|&d| d == 0.0) {
        row[k] = 1.0;
        return row;
    }
    // u_k = 1 / sum_j (d_k / d_j)^(2/(m-1)), evaluated relative to the nearest centroid.
    let nearest = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let exponent = 1.0 / (fuzzifier - 1.0);
    let weights: Vec<f64> = d2.iter().map(|&d| (nearest / d).powf(exponent)).collect();
    let total: f64 = weights.iter().sum();
    for (u, w) in row.iter_mut().zip(&weights) {
        *u = w / total;
    }
    row
}

pub fn objective(points: &[Vec<f64>], centroids: &[Vec<f64>], u: &[Vec<f64>], fuzzifier: f64) -> f64 {
    points
        .iter()
        .zip(u)
        .map(|(p, row)| {
            row.iter()
                .zip(centroids)
                .map(|(uk, v)| uk.powf(fuzzifier) * sq_dist(p, v))
                .sum::<f64>()
        })
        .sum()
}

fn update_centroids(points: &[Vec<f64>], u: &[Vec<f64>], fuzzifier: f64, previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    previous
        .iter()
        .enumerate()
        .map(|(k, old)| {
            let mut num = vec![0.0; dim];
            let mut den = 0.0;
            for (p, row) in points.iter().zip(u) {
                let w = row[k].powf(fuzzifier);
                den += w;
                for (acc, x) in num.iter_mut().zip(p) {
                    *acc += w * x;
                }
            }
            if den > 0.0 {
                num.iter().map(|x| x / den).collect()
            } else {
                old.clone()
            }
        })
        .collect()
}

/// Number of pairwise-distinct points (bitwise, with -0 equal to 0).
pub fn distinct_count(points: &[Vec<f64>]) -> usize {
    let mut keys: Vec<Vec<u64>> = points
        .iter()
        .map(|p| p.iter().map(|x| (x + 0.0).to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// k-means++ seeding: first centroid uniform, the rest drawn proportional to squared
/// distance from the nearest chosen centroid.
fn seed_centroids(points: &[Vec<f64>], c: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < c {
        let total: f64 = nearest.iter().sum();
        let mut target = rng.gen::<f64>() * total;
        let mut pick = nearest.iter().rposition(|&d| d > 0.0).unwrap_or(0);
        for (i, &d) in nearest.iter().enumerate() {
            if d > 0.0 && target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        let chosen = points[pick].clone();
        for (n, p) in nearest.iter_mut().zip(points) {
            *n = n.min(sq_dist(p, &chosen));
        }
        centroids.push(chosen);
    }
    centroids
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &u) in row.iter().enumerate() {
        if u > row[best] {
            best = k;
        }
    }
    best
}

/// Clusters `points` into `params.clusters` fuzzy groups.
///
/// Clusters are relabeled in ascending order of their centroid's first coordinate, so
/// label 0 is always the lowest-energy group when points are `(energy, cost)`.
pub fn fcm(points: &[Vec<f64>], params: &FcmParams) -> Result<FcmResult> {
    let c = params.clusters;
    if c < 2 {
        return Err(Error::InvalidParameter(format!("cluster count {c} must be >= 2")));
    }
    if !(params.fuzzifier > 1.0 && params.fuzzifier.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fuzzifier {} must be > 1",
            params.fuzzifier
        )));
    }
    if points.len() <= c {
        return Err(Error::DegenerateInput(format!(
            "{} points cannot form {c} clusters",
            points.len()
        )));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
        return Err(Error::DegenerateInput("points must share one finite dimension".into()));
    }
    let distinct = distinct_count(points);
    if distinct < c {
        return Err(Error::DegenerateInput(format!(
            "only {distinct} distinct points for {c} clusters"
        )));
    }

    let m = params.fuzzifier;
    let memberships = |centroids: &[Vec<f64>]| -> Vec<Vec<f64>> {
        points.iter().map(|p| membership_row(p, centroids, m)).collect()
    };
    let row_error = |u: &[Vec<f64>]| -> f64 {
        u.iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    };

    let mut centroids = seed_centroids(points, c, params.seed);
    let mut history = Vec::new();
    let mut max_row_sum_error: f64 = 0.0;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let u = memberships(&centroids);
        max_row_sum_error = max_row_sum_error.max(row_error(&u));
        history.push(objective(points, &centroids, &u, m));
        let next = update_centroids(points, &u, m, &centroids);
        let shift = next
            .iter()
            .zip(&centroids)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < params.tol {
            break;
        }
    }

    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| {
        centroids[a]
            .partial_cmp(&centroids[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let centroids: Vec<Vec<f64>> = order.iter().map(|&k| centroids[k].clone()).collect();
    let membership = memberships(&centroids);
    max_row_sum_error = max_row_sum_error.max(row_error(&membership));
    let objective = objective(points, &centroids, &membership, m);
    history.push(objective);
    let hard_labels = membership.iter().map(|row| argmax(row)).collect();
    Ok(FcmResult {
        centroids,
        membership,
        fuzzifier: m,
        hard_labels,
        iterations,
        objective,
        objective_history: history,
        max_row_sum_error,
    })
}

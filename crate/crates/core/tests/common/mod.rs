//! Independent oracles shared by the integration and acceptance targets.
#![allow(dead_code)]

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfm_core::learners::gaussian_gram;

/// Euclidean projection onto `{0 <= a <= c, yᵀa = 0}`.
pub fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c))
            .collect()
    };
    let balance = |a: &[f64]| a.iter().zip(y).map(|(ai, yi)| ai * yi).sum::<f64>();
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if balance(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Dense dual solution by accelerated projected gradient.
pub fn oracle(gram: ArrayView2<f64>, y: &[f64], c: f64) -> Vec<f64> {
    let m = y.len();
    let q = Array2::from_shape_fn((m, m), |(i, j)| y[i] * y[j] * gram[(i, j)]);
    let lipschitz = q
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| (0..m).map(|j| q[(i, j)] * a[j]).sum::<f64>() - 1.0)
            .collect()
    };
    let mut x = vec![0.0; m];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..40_000 {
        let g = grad(&z);
        let v: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect();
        let next = project(&v, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        let moved: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        z = next
            .iter()
            .zip(&x)
            .map(|(n, o)| n + momentum * (n - o))
            .collect();
        x = next;
        t = t_next;
        if moved < 1e-13 {
            break;
        }
    }
    x
}

pub struct Instance {
    pub gram: Array2<f64>,
    pub y: Vec<f64>,
    pub c: f64,
}

/// Random SVM dual problem with m <= 40.
pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(4..=40);
    let dim = rng.gen_range(1..=5);
    let mut y: Vec<f64> = (0..m).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    y[0] = 1.0;
    y[1] = -1.0;
    let shift = rng.gen_range(0.0..2.0);
    let x = Array2::from_shape_fn((m, dim), |(i, _)| rng.gen_range(-1.0..1.0) + shift * y[i]);
    let beta = rng.gen_range(0.1..2.0);
    let c = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
    Instance {
        gram: gaussian_gram(x.view(), beta),
        y,
        c,
    }
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Balanced labels pushed through a binary symmetric channel.
pub fn channel(m: usize, flip: f64, seed: u64) -> (Vec<f64>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..m).map(|i| i % 2).collect();
    let values = labels
        .iter()
        .map(|&l| {
            let bit = if rng.gen_bool(flip) { 1 - l } else { l };
            bit as f64
        })
        .collect();
    (values, labels)
}

pub fn entropy_of(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let k = labels.iter().max().map_or(0, |&c| c + 1);
    (0..k)
        .map(|c| labels.iter().filter(|&&l| l == c).count() as f64 / n)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

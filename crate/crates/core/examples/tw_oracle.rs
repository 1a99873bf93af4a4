//! Writes `data/tw_gue_moments.json`: mean and variance of the rescaled largest
//! eigenvalue of pure GUE, sampled from the β = 2 tridiagonal model.
//!
//! `cargo run --release --example tw_oracle -p rmcurve-core [-- <draws> <n> <seed>]`

use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use rmcurve_core::mc::{draw_rng, TwReference};

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn count_below(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    for i in 0..d.len() {
        if i > 0 {
            let prev = if q == 0.0 { f64::EPSILON } else { q };
            q = d[i] - x - e2[i - 1] / prev;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest(d: &[f64], e2: &[f64]) -> f64 {
    let mut hi = d
        .iter()
        .enumerate()
        .map(|(i, &di)| {
            let l = if i > 0 { e2[i - 1].sqrt() } else { 0.0 };
            let r = e2.get(i).map_or(0.0, |v| v.sqrt());
            di + l + r
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let mut lo = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    while hi - lo > 1e-12 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if count_below(d, e2, mid) == d.len() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(λ_max / √n - 2) n^{2/3}` for one draw of `H = tridiag(N(0,1), χ_{2k}/√2)`.
fn draw(n: usize, seed: u64, index: u64) -> f64 {
    let mut rng = draw_rng(seed, index);
    let d: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let e2: Vec<f64> = (1..n)
        .rev()
        .map(|k| ChiSquared::new(2.0 * k as f64).unwrap().sample(&mut rng) / 2.0)
        .collect();
    let nf = n as f64;
    (largest(&d, &e2) / nf.sqrt() - 2.0) * nf.powf(2.0 / 3.0)
}

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let draws = *args.first().unwrap_or(&40_000) as usize;
    let n = *args.get(1).unwrap_or(&1000) as usize;
    let seed = *args.get(2).unwrap_or(&20_240_917);
    let v: Vec<f64> = (0..draws as u64).into_par_iter().map(|i| draw(n, seed, i)).collect();
    let m = draws as f64;
    let mean = v.iter().sum::<f64>() / m;
    let dev: Vec<f64> = v.iter().map(|x| (x - mean).powi(2)).collect();
    let variance = dev.iter().sum::<f64>() / (m - 1.0);
    let var_of_dev = dev.iter().map(|x| (x - variance).powi(2)).sum::<f64>() / (m - 1.0);
    let r = TwReference {
        mean,
        mean_se: (variance / m).sqrt(),
        variance,
        variance_se: (var_of_dev / m).sqrt(),
        n,
        draws,
        seed,
    };
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/tw_gue_moments.json");
    std::fs::write(path, serde_json::to_string_pretty(&r).unwrap() + "\n").unwrap();
    println!("{}", serde_json::to_string(&r).unwrap());
}

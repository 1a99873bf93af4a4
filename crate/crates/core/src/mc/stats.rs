use std::f64::consts::PI;

use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use super::sample::{draw_rng, mean_se, EnsembleSample};
use crate::curve::Curve;
use crate::error::McError;
use crate::rh::sine_kernel;

/// Minimum spacings accepted by [`bulk_statistics`].
pub const MIN_SPACINGS: usize = 1000;
/// Minimum draws accepted by [`edge_statistics`].
pub const MIN_EDGE_DRAWS: usize = 50;
/// Required distance of a bulk window from the cut edges, as a fraction of the cut length.
pub const WINDOW_MARGIN: f64 = 0.1;

/// Pooled histogram normalized to unit integral over its range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Count per bin divided by `in_range · width`.
    pub density: Vec<f64>,
    pub in_range: u64,
    /// Eigenvalues outside `[lo, hi]`.
    pub dropped: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + bin as f64 * w, self.lo + (bin + 1) as f64 * w)
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|b| self.lo + (b as f64 + 0.5) * self.width()).collect()
    }

    /// `Σ density · width`, which is 1 up to rounding whenever any eigenvalue is in range.
    pub fn total(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    /// Fraction of all pooled eigenvalues that lie outside `[lo, hi]`, counting
    /// bins by their centre and dropped eigenvalues as outside.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let outside: u64 = self
            .centers()
            .iter()
            .zip(&self.counts)
            .filter(|(c, _)| **c < lo || **c > hi)
            .map(|(_, n)| n)
            .sum();
        (outside + self.dropped) as f64 / (self.in_range + self.dropped) as f64
    }

    /// Largest difference between a bin's density and the average of ρ over that bin.
    pub fn sup_distance(&self, curve: &Curve) -> f64 {
        (0..self.bins())
            .map(|b| {
                let (l, r) = self.edges(b);
                let avg = (curve.integrated_density(r) - curve.integrated_density(l)) / (r - l);
                (self.density[b] - avg).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn empirical_density(sample: &EnsembleSample, bins: usize, range: (f64, f64)) -> Result<Histogram, McError> {
    let (lo, hi) = range;
    if bins == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(McError::EmptyRange { lo, hi, bins });
    }
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut dropped = 0;
    for x in sample.pooled() {
        if x < lo || x > hi {
            dropped += 1;
            continue;
        }
        let b = (((x - lo) / w) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let in_range: u64 = counts.iter().sum();
    let norm = if in_range == 0 { 0.0 } else { 1.0 / (in_range as f64 * w) };
    Ok(Histogram {
        lo,
        hi,
        density: counts.iter().map(|&c| c as f64 * norm).collect(),
        counts,
        in_range,
        dropped,
    })
}

/// Fraction of eigenvalues per cut, splitting the line at gap midpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Occupancy {
    pub fractions: Vec<f64>,
    /// Standard errors from the spread of per-draw fractions.
    pub std_errors: Vec<f64>,
    pub masses: Vec<f64>,
}

impl Occupancy {
    /// Every cut within `z` standard errors plus `slack` of its mass.
    pub fn within(&self, z: f64, slack: f64) -> bool {
        self.fractions
            .iter()
            .zip(&self.std_errors)
            .zip(&self.masses)
            .all(|((f, se), m)| (f - m).abs() <= z * se + slack)
    }
}

pub fn occupancy(sample: &EnsembleSample, curve: &Curve) -> Occupancy {
    let cuts = curve.cuts();
    let splits: Vec<f64> = cuts.windows(2).map(|w| 0.5 * (w[0].1 + w[1].0)).collect();
    let n = sample.n as f64;
    let mut per_cut = vec![Vec::with_capacity(sample.draws); cuts.len()];
    for ev in &sample.eigenvalues {
        let mut start = 0;
        for (c, v) in per_cut.iter_mut().enumerate() {
            let end = match splits.get(c) {
                Some(&s) => start + ev[start..].partition_point(|&x| x < s),
                None => ev.len(),
            };
            v.push((end - start) as f64 / n);
            start = end;
        }
    }
    let (fractions, std_errors) = per_cut.iter().map(|v| mean_se(v)).unzip();
    Occupancy {
        fractions,
        std_errors,
        masses: (0..cuts.len()).map(|c| curve.cut_mass(c)).collect(),
    }
}

/// Unfolded nearest-neighbour spacings, kept per draw so that positions can be
/// rebuilt for pair statistics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spacings {
    pub per_draw: Vec<Vec<f64>>,
}

impl Spacings {
    pub fn pooled(&self) -> Vec<f64> {
        self.per_draw.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.per_draw.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mean(&self) -> f64 {
        let p = self.pooled();
        p.iter().sum::<f64>() / p.len() as f64
    }
}

/// Cubic Hermite interpolant of `N F` on a window, with `N ρ` as its slope.
struct Unfolder {
    lo: f64,
    step: f64,
    value: Vec<f64>,
    slope: Vec<f64>,
}

impl Unfolder {
    const NODES: usize = 129;

    fn new(curve: &Curve, n: f64, lo: f64, hi: f64) -> Self {
        let step = (hi - lo) / (Self::NODES - 1) as f64;
        let xs: Vec<f64> = (0..Self::NODES).map(|j| lo + j as f64 * step).collect();
        Unfolder {
            lo,
            step,
            value: xs.iter().map(|&x| n * curve.integrated_density(x)).collect(),
            slope: xs.iter().map(|&x| n * curve.density(x)).collect(),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let s = (x - self.lo) / self.step;
        let j = (s.floor() as usize).min(Self::NODES - 2);
        let t = s - j as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t).powi(2),
            t * (1.0 - t).powi(2),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        h00 * self.value[j]
            + h10 * self.step * self.slope[j]
            + h01 * self.value[j + 1]
            + h11 * self.step * self.slope[j + 1]
    }
}

/// Maps eigenvalues in `window` to `N ∫ρ` and returns consecutive differences per draw.
///
/// The window must sit inside one cut at least [`WINDOW_MARGIN`] of the cut length
/// from both edges. A window of zero length gives no spacings.
pub fn unfold(sample: &EnsembleSample, curve: &Curve, window: (f64, f64)) -> Result<Spacings, McError> {
    let (lo, hi) = window;
    if lo == hi && lo.is_finite() {
        return Ok(Spacings::default());
    }
    let bad = McError::Window { lo, hi };
    if !(hi > lo) {
        return Err(bad);
    }
    let cut = curve.cut_containing(0.5 * (lo + hi)).ok_or(bad.clone())?;
    let (a, b) = curve.cuts()[cut];
    let margin = WINDOW_MARGIN * (b - a);
    if lo < a + margin || hi > b - margin {
        return Err(bad);
    }
    let f = Unfolder::new(curve, sample.n as f64, lo, hi);
    let per_draw = sample
        .eigenvalues
        .iter()
        .map(|ev| {
            let i0 = ev.partition_point(|&x| x < lo);
            let i1 = ev.partition_point(|&x| x <= hi);
            let u: Vec<f64> = ev[i0..i1].iter().map(|&x| f.eval(x)).collect();
            u.windows(2).map(|w| w[1] - w[0]).collect()
        })
        .collect();
    Ok(Spacings { per_draw })
}

/// GUE Wigner surmise `p(s) = (32/π²) s² e^{-4s²/π}`.
pub fn wigner_surmise_pdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp()
}

/// `erf(2s/√π) - (4s/π) e^{-4s²/π}`
pub fn wigner_surmise_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp()
}

/// Kolmogorov–Smirnov distance between the empirical CDF of a sorted sample and `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, McError> {
    if sorted.is_empty() {
        return Err(McError::Empty);
    }
    if sorted.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(McError::NotSorted);
    }
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// Unit-mean exponential spacings from the per-draw stream of `seed`.
pub fn poisson_spacings(seed: u64, count: usize) -> Spacings {
    let mut rng = draw_rng(seed, u64::MAX);
    let v = (0..count).map(|_| Exp1.sample(&mut rng)).collect();
    Spacings { per_draw: vec![v] }
}

/// Two-point function of unfolded levels on `[0, PAIR_RANGE]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub r: Vec<f64>,
    pub estimate: Vec<f64>,
    /// `1 - sine_kernel(0, r)²`
    pub reference: Vec<f64>,
}

pub const PAIR_RANGE: f64 = 3.0;
pub const PAIR_BINS: usize = 30;

/// Counts pairs at distance `r` from every level that has the full range ahead of it.
pub fn pair_correlation(spacings: &Spacings) -> PairCorrelation {
    let dr = PAIR_RANGE / PAIR_BINS as f64;
    let mut counts = vec![0u64; PAIR_BINS];
    let mut refs = 0u64;
    for s in &spacings.per_draw {
        let mut pos = Vec::with_capacity(s.len() + 1);
        pos.push(0.0);
        for d in s {
            pos.push(pos.last().unwrap() + d);
        }
        let end = *pos.last().unwrap();
        for (i, &x) in pos.iter().enumerate() {
            if x + PAIR_RANGE > end {
                break;
            }
            refs += 1;
            for &y in &pos[i + 1..] {
                let r = y - x;
                if r >= PAIR_RANGE {
                    break;
                }
                counts[(r / dr) as usize] += 1;
            }
        }
    }
    let r: Vec<f64> = (0..PAIR_BINS).map(|b| (b as f64 + 0.5) * dr).collect();
    let norm = if refs == 0 { 0.0 } else { 1.0 / (refs as f64 * dr) };
    PairCorrelation {
        estimate: counts.iter().map(|&c| c as f64 * norm).collect(),
        reference: r.iter().map(|&x| 1.0 - sine_kernel(0.0, x).powi(2)).collect(),
        r,
    }
}

/// Bulk and edge summaries. [`bulk_statistics`] fills the bulk fields and
/// [`edge_statistics`] the edge fields; [`KernelStats::merge`] combines them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelStats {
    pub spacings: Vec<f64>,
    pub edge_values: Vec<f64>,
    pub ks_bulk: Option<f64>,
    pub mean_spacing: Option<f64>,
    pub pair_correlation: Option<PairCorrelation>,
    pub edge_mean: Option<f64>,
    pub edge_mean_se: Option<f64>,
    pub edge_var: Option<f64>,
    pub edge_var_se: Option<f64>,
}

impl KernelStats {
    pub fn merge(mut self, other: KernelStats) -> KernelStats {
        if self.spacings.is_empty() {
            self.spacings = other.spacings;
        }
        if self.edge_values.is_empty() {
            self.edge_values = other.edge_values;
        }
        self.ks_bulk = self.ks_bulk.or(other.ks_bulk);
        self.mean_spacing = self.mean_spacing.or(other.mean_spacing);
        self.pair_correlation = self.pair_correlation.or(other.pair_correlation);
        self.edge_mean = self.edge_mean.or(other.edge_mean);
        self.edge_mean_se = self.edge_mean_se.or(other.edge_mean_se);
        self.edge_var = self.edge_var.or(other.edge_var);
        self.edge_var_se = self.edge_var_se.or(other.edge_var_se);
        self
    }
}

pub fn bulk_statistics(spacings: &Spacings) -> Result<KernelStats, McError> {
    let got = spacings.len();
    if got < MIN_SPACINGS {
        return Err(McError::TooFewSpacings { needed: MIN_SPACINGS, got });
    }
    let mut sorted = spacings.pooled();
    sorted.sort_by(f64::total_cmp);
    let ks = ks_distance(&sorted, wigner_surmise_cdf)?;
    Ok(KernelStats {
        mean_spacing: Some(spacings.mean()),
        spacings: spacings.pooled(),
        ks_bulk: Some(ks),
        pair_correlation: Some(pair_correlation(spacings)),
        ..KernelStats::default()
    })
}

/// Rescaled extreme eigenvalue at edge `z_i` (1-based `i`, odd for left edges).
///
/// Each draw contributes `u = (-1)^i (ρ_i N)^{2/3} (λ - z_i)`, where `λ` is the
/// outermost eigenvalue of the cut at that edge, after splitting the line at the
/// gap midpoints. With this orientation the values follow the largest-eigenvalue
/// law of the Airy process at both left and right edges.
pub fn edge_statistics(sample: &EnsembleSample, edge_index: usize, edge_x: f64, rho_i: f64) -> Result<KernelStats, McError> {
    if sample.draws < MIN_EDGE_DRAWS {
        return Err(McError::TooFewDraws { needed: MIN_EDGE_DRAWS, got: sample.draws });
    }
    let curve = Curve::new(sample.spec.clone())?;
    let cuts = curve.cuts();
    if edge_index == 0 || edge_index > 2 * cuts.len() {
        return Err(McError::EdgeIndex(edge_index));
    }
    let cut = (edge_index - 1) / 2;
    let left = edge_index % 2 == 1;
    let split_lo = if cut == 0 { f64::NEG_INFINITY } else { 0.5 * (cuts[cut - 1].1 + cuts[cut].0) };
    let split_hi = cuts.get(cut + 1).map_or(f64::INFINITY, |c| 0.5 * (cuts[cut].1 + c.0));
    let scale = (rho_i * sample.n as f64).powf(2.0 / 3.0);
    let sign = if left { -1.0 } else { 1.0 };
    let mut values = Vec::with_capacity(sample.draws);
    for ev in &sample.eigenvalues {
        let i0 = ev.partition_point(|&x| x < split_lo);
        let i1 = ev.partition_point(|&x| x < split_hi);
        if i0 == i1 {
            continue;
        }
        let lambda = if left { ev[i0] } else { ev[i1 - 1] };
        values.push(sign * scale * (lambda - edge_x));
    }
    if values.len() < MIN_EDGE_DRAWS {
        return Err(McError::TooFewDraws { needed: MIN_EDGE_DRAWS, got: values.len() });
    }
    let (mean, mean_err) = mean_se(&values);
    let n = values.len() as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let (var, var_se) = mean_se(&sq);
    let var = var * n / (n - 1.0);
    Ok(KernelStats {
        edge_values: values,
        edge_mean: Some(mean),
        edge_mean_se: Some(mean_err),
        edge_var: Some(var),
        edge_var_se: Some(var_se),
        ..KernelStats::default()
    })
}

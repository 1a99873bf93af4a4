//! Brownian-bridge time flow.
//!
//! At time `t` the endpoints `a_i(1)` map to `a_i(t) = a_i(1) √(t/(1-t))`, and the
//! particle cloud is a rescaled copy of the matrix-model spectrum for those sources.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{real_branch_roots, BranchPointSet, Curve, CurveSpec};
use crate::error::EvolutionError;
use crate::quad::{GaussLegendre, MASS_TOL};

/// Points in the default coarse scan of [`critical_times`].
pub const SCAN_POINTS: usize = 64;
/// The coarse scan covers `logit(t) ∈ [-SCAN_LOGIT, SCAN_LOGIT]`; endpoint spreads
/// change by a factor `e^{SCAN_LOGIT}` across the scan.
pub const SCAN_LOGIT: f64 = 24.0;
/// Refinement rounds before a bracket with several transitions is reported.
const REFINE_ROUNDS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct BridgeSpec {
    endpoints: Vec<f64>,
    fractions: Vec<Rational64>,
    n: u64,
}

impl BridgeSpec {
    pub fn new(endpoints: Vec<f64>, fractions: Vec<Rational64>, n: u64) -> Result<Self, EvolutionError> {
        CurveSpec::new(endpoints.clone(), fractions.clone())?;
        for f in &fractions {
            let d = *f.denom();
            if n == 0 || n % d.unsigned_abs() != 0 {
                return Err(EvolutionError::NotCommonMultiple { n, denominator: d });
            }
        }
        Ok(BridgeSpec { endpoints, fractions, n })
    }

    /// Uses the least common multiple of the denominators as `N`.
    pub fn with_min_n(endpoints: Vec<f64>, fractions: Vec<Rational64>) -> Result<Self, EvolutionError> {
        let n = fractions
            .iter()
            .fold(1u64, |acc, f| lcm(acc, f.denom().unsigned_abs().max(1)));
        Self::new(endpoints, fractions, n)
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    pub fn fractions(&self) -> &[Rational64] {
        &self.fractions
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.endpoints.len()
    }

    /// Particles ending at each endpoint, `n_i = N ε_i`.
    pub fn counts(&self) -> Vec<u64> {
        self.fractions
            .iter()
            .map(|f| (f * Rational64::from_integer(self.n as i64)).to_integer() as u64)
            .collect()
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn check_time(t: f64) -> Result<(), EvolutionError> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(EvolutionError::TimeOutOfRange(t))
    }
}

/// `a_i(t) = a_i(1) √(t/(1-t))`, in the order the endpoints were given.
pub fn eigenvalues_at(bridge: &BridgeSpec, t: f64) -> Result<Vec<f64>, EvolutionError> {
    check_time(t)?;
    let s = (t / (1.0 - t)).sqrt();
    Ok(bridge.endpoints.iter().map(|a| a * s).collect())
}

pub fn spec_at(bridge: &BridgeSpec, t: f64) -> Result<CurveSpec, EvolutionError> {
    let a = eigenvalues_at(bridge, t)?;
    Ok(CurveSpec::new(a, bridge.fractions.clone())?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalTime {
    pub time: f64,
    /// Interval known to contain the transition.
    pub bracket: (f64, f64),
    /// Cut counts on the left and right of the bracket.
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timeline {
    pub times: Vec<f64>,
    /// `l(t)`, or `None` where the curve at `t` is critical or failed.
    pub cut_counts: Vec<Option<usize>>,
    /// Changes of `l` between consecutive resolved grid points, located at the
    /// bracket midpoint.
    pub critical_times: Vec<CriticalTime>,
    /// Why each `None` entry was skipped.
    pub notes: Vec<(f64, String)>,
}

impl Timeline {
    /// Brackets across which `l` decreased.
    pub fn monotonicity_violations(&self) -> Vec<&CriticalTime> {
        self.critical_times.iter().filter(|c| c.to < c.from).collect()
    }
}

/// Samples `l(t)` on a grid.
pub fn cut_count_timeline(bridge: &BridgeSpec, t_grid: &[f64]) -> Result<Timeline, EvolutionError> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvolutionError::Grid);
    }
    for &t in t_grid {
        check_time(t)?;
    }
    let counts: Vec<Result<usize, String>> = t_grid
        .par_iter()
        .map(|&t| {
            let spec = spec_at(bridge, t).map_err(|e| e.to_string())?;
            BranchPointSet::compute(&spec)
                .map(|b| b.cut_count())
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut notes = Vec::new();
    let mut cut_counts = Vec::with_capacity(counts.len());
    for (&t, c) in t_grid.iter().zip(counts) {
        match c {
            Ok(l) => cut_counts.push(Some(l)),
            Err(msg) => {
                notes.push((t, msg));
                cut_counts.push(None);
            }
        }
    }
    let resolved: Vec<(f64, usize)> = t_grid
        .iter()
        .zip(&cut_counts)
        .filter_map(|(&t, c)| c.map(|l| (t, l)))
        .collect();
    let critical_times = resolved
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| CriticalTime {
            time: 0.5 * (w[0].0 + w[1].0),
            bracket: (w[0].0, w[1].0),
            from: w[0].1,
            to: w[1].1,
        })
        .collect();
    Ok(Timeline {
        times: t_grid.to_vec(),
        cut_counts,
        critical_times,
        notes,
    })
}

/// The default scan: `SCAN_POINTS` times uniform in `logit(t)`.
pub fn default_scan() -> Vec<f64> {
    let n = SCAN_POINTS;
    (0..n)
        .map(|j| {
            let u = -SCAN_LOGIT + 2.0 * SCAN_LOGIT * j as f64 / (n - 1) as f64;
            1.0 / (1.0 + (-u).exp())
        })
        .collect()
}

/// Number of real branch points at time `t`. Unlike the cut count this is
/// defined on critical curves too, so it can drive bisection.
fn real_root_count(bridge: &BridgeSpec, t: f64) -> Result<usize, EvolutionError> {
    Ok(real_branch_roots(&spec_at(bridge, t)?).len())
}

/// Transition times of `l(t)`, each located to within `tol`.
pub fn critical_times(bridge: &BridgeSpec, tol: f64) -> Result<Vec<f64>, EvolutionError> {
    Ok(critical_brackets(bridge, tol)?.into_iter().map(|c| c.time).collect())
}

/// [`critical_times`] with the final brackets and the counts on either side.
pub fn critical_brackets(bridge: &BridgeSpec, tol: f64) -> Result<Vec<CriticalTime>, EvolutionError> {
    if !(tol > 0.0) {
        return Err(EvolutionError::Tolerance(tol));
    }
    let grid = default_scan();
    let counts = grid
        .par_iter()
        .map(|&t| real_root_count(bridge, t))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Vec::new();
    for (w, c) in grid.windows(2).zip(counts.windows(2)) {
        if c[0] == c[1] {
            continue;
        }
        for (lo, hi, from, to) in split(bridge, (w[0], w[1]), (c[0], c[1]), tol, REFINE_ROUNDS)? {
            let (lo, hi) = bisect(bridge, lo, hi, from, tol)?;
            out.push(CriticalTime {
                time: 0.5 * (lo + hi),
                bracket: (lo, hi),
                from: from / 2,
                to: to / 2,
            });
        }
    }
    out.sort_by(|p, q| p.time.total_cmp(&q.time));
    Ok(out)
}

type Bracket = (f64, f64, usize, usize);

/// Splits a bracket until each piece holds a single pair of roots turning real
/// or complex. Pieces narrower than `tol` that still hold several are
/// coincident transitions (symmetric sources split together) and are kept whole.
fn split(
    bridge: &BridgeSpec,
    (lo, hi): (f64, f64),
    (c_lo, c_hi): (usize, usize),
    tol: f64,
    rounds: usize,
) -> Result<Vec<Bracket>, EvolutionError> {
    if c_lo.abs_diff(c_hi) <= 2 || hi - lo <= tol {
        return Ok(vec![(lo, hi, c_lo, c_hi)]);
    }
    if rounds == 0 {
        return Err(EvolutionError::AmbiguousBracket { lo, hi });
    }
    const PIECES: usize = 8;
    let ts: Vec<f64> = (0..=PIECES)
        .map(|j| lo + (hi - lo) * j as f64 / PIECES as f64)
        .collect();
    let mut cs = vec![c_lo];
    for &t in &ts[1..PIECES] {
        cs.push(real_root_count(bridge, t)?);
    }
    cs.push(c_hi);
    let mut out = Vec::new();
    for j in 0..PIECES {
        if cs[j] != cs[j + 1] {
            out.extend(split(bridge, (ts[j], ts[j + 1]), (cs[j], cs[j + 1]), tol, rounds - 1)?);
        }
    }
    Ok(out)
}

fn bisect(bridge: &BridgeSpec, mut lo: f64, mut hi: f64, c_lo: usize, tol: f64) -> Result<(f64, f64), EvolutionError> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if real_root_count(bridge, mid)? == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// How particle positions relate to matrix eigenvalues: `x = s(t) m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `s(t) = t(1-t)`
    #[default]
    Paper,
    /// `s(t) = √(t(1-t))`
    Sqrt,
}

impl Convention {
    pub fn scale(self, t: f64) -> f64 {
        match self {
            Convention::Paper => t * (1.0 - t),
            Convention::Sqrt => (t * (1.0 - t)).sqrt(),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Sqrt => "sqrt",
        })
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Convention::Paper),
            "sqrt" => Ok(Convention::Sqrt),
            other => Err(format!("unknown convention {other:?}; expected paper or sqrt")),
        }
    }
}

/// The particle density at one time, in particle coordinates.
#[derive(Clone, Debug)]
pub struct BridgeSnapshot {
    pub t: f64,
    pub scale: f64,
    pub curve: Curve,
}

impl BridgeSnapshot {
    pub fn new(bridge: &BridgeSpec, t: f64, convention: Convention) -> Result<Self, EvolutionError> {
        let curve = Curve::new(spec_at(bridge, t)?)?;
        Ok(BridgeSnapshot {
            t,
            scale: convention.scale(t),
            curve,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        self.curve.density(x / self.scale) / self.scale
    }

    /// Cut endpoints pushed forward to particle coordinates.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.curve
            .cuts()
            .iter()
            .map(|&(lo, hi)| (self.scale * lo, self.scale * hi))
            .collect()
    }

    /// Quadrature of the particle density over its support.
    pub fn mass(&self) -> f64 {
        let rule = GaussLegendre::cut_rule();
        self.support()
            .into_iter()
            .map(|(lo, hi)| rule.integrate_sin2_adaptive(lo, hi, MASS_TOL, |x| self.density(x)))
            .sum()
    }
}

/// Limiting particle density at position `x` and time `t`.
pub fn bridge_density(bridge: &BridgeSpec, t: f64, x: f64, convention: Convention) -> Result<f64, EvolutionError> {
    Ok(BridgeSnapshot::new(bridge, t, convention)?.density(x))
}

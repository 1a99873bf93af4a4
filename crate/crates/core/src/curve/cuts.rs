use std::f64::consts::PI;

use num_complex::Complex64;

use super::branch::BranchPointSet;
use super::lambda;
use super::sheets::{self, Sheet, Tracker};
use super::spec::CurveSpec;
use super::Curve;
use crate::error::CurveError;

/// Below this `|x''(y*)|` an edge is treated as near-critical.
pub const EDGE_CURVATURE_MIN: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct CutStructure {
    /// `[z_{2i-1}, z_{2i}]`, ordered and disjoint.
    pub cuts: Vec<(f64, f64)>,
    /// Sheets `(i, 0), ..., (i, b_i)` attached to each cut, as source sheets in
    /// increasing order of `a_j`.
    pub sheet_groups: Vec<Vec<Sheet>>,
    /// Conjugate pairs (upper member) whose real part lies in each cut.
    pub pairs: Vec<Vec<Complex64>>,
    /// Quadrature of ρ over each cut.
    pub masses: Vec<f64>,
    /// `ρ_j` for every endpoint, aligned with the flattened `cuts`.
    pub edge_constants: Vec<f64>,
    /// `r_i^{(1)} < ... < r_i^{(b_i)}` per cut.
    pub gamma_crossings: Vec<Vec<f64>>,
}

impl CutStructure {
    pub fn l(&self) -> usize {
        self.cuts.len()
    }

    /// `b_i`, the number of conjugate pairs attached to cut `i`.
    pub fn b(&self, cut: usize) -> usize {
        self.sheet_groups[cut].len() - 1
    }

    /// Sheet `(i, m)` in the double-index labelling.
    pub fn sheet(&self, cut: usize, m: usize) -> Sheet {
        self.sheet_groups[cut][m]
    }

    /// Sum of filling fractions of the sheets attached to `cut`.
    pub fn group_fraction(&self, spec: &CurveSpec, cut: usize) -> f64 {
        self.sheet_groups[cut]
            .iter()
            .map(|s| match s {
                Sheet::Source(j) => spec.eps_f64()[*j],
                Sheet::Main => 0.0,
            })
            .sum()
    }

    /// Cut whose group contains `sheet`.
    pub fn cut_of(&self, sheet: Sheet) -> Option<(usize, usize)> {
        self.sheet_groups.iter().enumerate().find_map(|(i, g)| {
            g.iter().position(|&s| s == sheet).map(|m| (i, m))
        })
    }
}

pub(super) fn build(curve: &Curve) -> Result<CutStructure, CurveError> {
    let spec = curve.spec();
    let cuts = curve.cuts().to_vec();
    let mut pairs: Vec<Vec<Complex64>> = vec![Vec::new(); cuts.len()];
    for p in &curve.branch_points().pairs {
        let w = p.upper;
        let i = cuts
            .iter()
            .position(|&(lo, hi)| lo < w.re && w.re < hi)
            .ok_or(CurveError::PairOutsideCuts { at: w })?;
        pairs[i].push(w);
    }
    let mut sheet_groups = Vec::with_capacity(cuts.len());
    let mut next = 0;
    for p in &pairs {
        let group: Vec<Sheet> = (next..next + p.len() + 1).map(Sheet::Source).collect();
        next += p.len() + 1;
        sheet_groups.push(group);
    }
    debug_assert_eq!(next, spec.k());
    let masses = (0..cuts.len()).map(|i| curve.cut_mass(i)).collect();
    let edge_constants = edge_constants_of(spec, curve.branch_points())?;
    let mut structure = CutStructure {
        cuts,
        sheet_groups,
        pairs,
        masses,
        edge_constants,
        gamma_crossings: Vec::new(),
    };
    structure.gamma_crossings = (0..structure.l())
        .map(|i| crossings_in_cut(curve, &structure, i))
        .collect::<Result<_, _>>()?;
    Ok(structure)
}

fn edge_constants_of(spec: &CurveSpec, bps: &BranchPointSet) -> Result<Vec<f64>, CurveError> {
    bps.real
        .iter()
        .map(|r| {
            let d2 = spec.d2x(Complex64::new(r.y, 0.0)).re.abs();
            if d2 < EDGE_CURVATURE_MIN {
                Err(CurveError::NearCriticalEdge { at: r.x, value: d2 })
            } else {
                Ok((2.0 / d2).sqrt())
            }
        })
        .collect()
}

/// Real points where the cuts `Γ_i^{(m)}` cross cut `i`.
///
/// `Γ_i^{(m)}` continues the curve `Re λ^{(m)} = Re λ^{(m-1)}` issuing from `w` to
/// `+i∞` through `w` and down to the axis. Along that continuation
/// `D(x) = ∫_w^x (ξ_a - ξ_b)` is real, where `a, b` are the sheets meeting at `w`.
/// On the axis `Im D' = ±πρ`, so `Im D` is monotone inside the cut and its zero
/// is unique: it is found by inverting the integrated density.
fn crossings_in_cut(curve: &Curve, s: &CutStructure, cut: usize) -> Result<Vec<f64>, CurveError> {
    let spec = curve.spec();
    let (lo, hi) = s.cuts[cut];
    let mut out = Vec::with_capacity(s.pairs[cut].len());
    for (m, &w) in s.pairs[cut].iter().enumerate() {
        let base = w.re;
        let roots = sheets::real_fiber_roots(spec, base)?;
        let im_sign: Vec<f64> = roots
            .iter()
            .map(|y| if y.im.abs() < 1e-9 * (1.0 + y.norm()) { 0.0 } else { y.im.signum() })
            .collect();
        let mut t = Tracker::new(spec, Complex64::new(base, 0.0), roots);
        let mut acc = vec![Complex64::new(0.0, 0.0); spec.k() + 1];
        lambda::integrate_leg(&mut t, w, 0.25 * curve.path_height(), &mut acc)?;
        let (a, b) = lambda::closest_pair(t.roots());
        let slope = im_sign[a] - im_sign[b];
        if slope == 0.0 {
            return Err(CurveError::NoCrossing { cut, m: m + 1 });
        }
        let shift = (acc[a] - acc[b]).im / (PI * slope);
        let target = curve.integrated_density(base) + shift;
        let f = |x: f64| curve.integrated_density(x) - target;
        if f(lo) > 0.0 || f(hi) < 0.0 {
            return Err(CurveError::NoCrossing { cut, m: m + 1 });
        }
        let (mut a, mut c) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + c);
            if mid <= a || mid >= c {
                break;
            }
            if f(mid) < 0.0 {
                a = mid;
            } else {
                c = mid;
            }
        }
        out.push(0.5 * (a + c));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Standalone form of [`Curve::cut_structure`].
pub fn cut_structure(spec: &CurveSpec, bps: &BranchPointSet) -> Result<CutStructure, CurveError> {
    let curve = Curve::with_branch_points(spec.clone(), bps.clone());
    curve.cut_structure().cloned()
}

/// `ρ_j = sqrt(2 / |x''(y*)|)` for every real branch point, in edge order.
pub fn edge_constants(spec: &CurveSpec, bps: &BranchPointSet) -> Result<Vec<f64>, CurveError> {
    edge_constants_of(spec, bps)
}

/// Γ crossings for every cut.
pub fn gamma_crossing_points(spec: &CurveSpec, bps: &BranchPointSet) -> Result<Vec<Vec<f64>>, CurveError> {
    Ok(cut_structure(spec, bps)?.gamma_crossings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: &[f64], f: &[(i64, i64)]) -> Curve {
        Curve::new(CurveSpec::from_pairs(a, f).unwrap()).unwrap()
    }

    #[test]
    fn semicircle_structure() {
        let c = curve(&[0.0], &[(1, 1)]);
        let s = c.cut_structure().unwrap();
        assert_eq!(s.l(), 1);
        assert_eq!(s.b(0), 0);
        assert!((s.masses[0] - 1.0).abs() < 1e-10);
        assert!(s.gamma_crossings[0].is_empty());
        for &rho in &s.edge_constants {
            assert!((rho - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_cut_structure() {
        let c = curve(&[-2.0, 2.0], &[(1, 2), (1, 2)]);
        let s = c.cut_structure().unwrap();
        assert_eq!(s.l(), 2);
        assert_eq!(s.sheet_groups, vec![vec![Sheet::Source(0)], vec![Sheet::Source(1)]]);
        for m in &s.masses {
            assert!((m - 0.5).abs() < 1e-6);
        }
        let e = &s.edge_constants;
        assert!((e[0] - e[3]).abs() < 1e-10);
        assert!((e[1] - e[2]).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_crossing_inside_cut() {
        let c = curve(&[-0.6, 0.4], &[(1, 2), (1, 2)]);
        let s = c.cut_structure().unwrap();
        let (lo, hi) = s.cuts[0];
        let r = s.gamma_crossings[0][0];
        assert!(lo < r && r < hi);
        // a translate of the symmetric case
        assert!((r + 0.1).abs() < 1e-8, "{r}");
    }

    #[test]
    fn three_source_crossings_are_ordered() {
        let c = curve(&[-0.3, 0.1, 0.5], &[(1, 3), (1, 3), (1, 3)]);
        let s = c.cut_structure().unwrap();
        assert_eq!(s.b(0), 2);
        let r = &s.gamma_crossings[0];
        let (lo, hi) = s.cuts[0];
        assert!(lo < r[0] && r[0] < r[1] && r[1] < hi, "{r:?}");
        // reflection symmetry about the mean 0.1
        assert!((r[0] + r[1] - 0.2).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn symmetric_crossing_at_origin() {
        let c = curve(&[-0.5, 0.5], &[(1, 2), (1, 2)]);
        let s = c.cut_structure().unwrap();
        assert_eq!(s.l(), 1);
        assert_eq!(s.b(0), 1);
        assert_eq!(s.gamma_crossings[0].len(), 1);
        assert!(s.gamma_crossings[0][0].abs() < 1e-8, "{:?}", s.gamma_crossings);
    }
}

//! λ-functions: primitives of the sheet functions with constants fixed by the
//! anchoring conditions at the real edges and at complex branch points.
//!
//! Every value is an integral from the far reference point `x_far` along the
//! same path that defines the sheets, plus a per-sheet constant. The upper and
//! lower paths agree at `x_far`, so one constant serves both half-planes.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::sheets::{self, Sheet, Side, Tracker};
use super::spec::CurveSpec;
use super::Curve;
use crate::error::CurveError;
use crate::quad::GaussLegendre;

const PANEL_NODES: usize = 16;
/// Geometric refinement levels toward each end of a leg.
const GRADING: i32 = 10;

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_NODES))
}

/// State at the corner `x_far ± iH`.
#[derive(Clone, Debug)]
pub(crate) struct Top {
    pub roots: Vec<Complex64>,
    pub integral: Vec<Complex64>,
}

/// Per-sheet integration constants, flat sheet index.
#[derive(Clone, Debug)]
pub(crate) struct Anchors {
    pub constants: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaValue {
    pub sheet: Sheet,
    pub at: Complex64,
    pub value: Complex64,
    pub side: Side,
}

/// Integrates every sheet along the straight leg `from → to`, leaving the tracker
/// at the last quadrature node. Panels are uniform with length at most
/// `panel_max` and refined geometrically toward both ends; the two end panels use
/// the `sin²` rule so a branch point at either end costs nothing in accuracy.
pub(super) fn integrate_leg(
    tracker: &mut Tracker<'_>,
    to: Complex64,
    panel_max: f64,
    acc: &mut [Complex64],
) -> Result<(), CurveError> {
    let from = tracker.x();
    let delta = to - from;
    let len = delta.norm();
    if len == 0.0 {
        return Ok(());
    }
    let n = (len / panel_max).ceil().max(1.0) as usize;
    let mut ts: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let first = ts[1];
    let last = ts[n - 1];
    for g in 1..=GRADING {
        let f = 0.5f64.powi(g);
        ts.push(first * f);
        ts.push(1.0 - (1.0 - last) * f);
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let rule = panel_rule();
    let end = ts.len() - 2;
    for (p, w) in ts.windows(2).enumerate() {
        let nodes: Vec<(f64, f64)> = if p == 0 || p == end {
            rule.sin2_mapped(w[0], w[1]).collect()
        } else {
            rule.mapped(w[0], w[1]).collect()
        };
        for (t, wt) in nodes {
            tracker.move_to(from + delta * t)?;
            for (a, &y) in acc.iter_mut().zip(tracker.roots()) {
                *a += y * delta * wt;
            }
        }
    }
    Ok(())
}

pub(super) fn first_leg(curve: &Curve, side: Side) -> Result<Top, CurveError> {
    let spec = curve.spec();
    let x0 = Complex64::new(curve.far_point(), 0.0);
    let mut t = Tracker::new(spec, x0, sheets::far_roots(spec, curve.far_point())?);
    let mut integral = vec![Complex64::new(0.0, 0.0); spec.k() + 1];
    let top = Complex64::new(curve.far_point(), side.sign() * curve.path_height());
    integrate_leg(&mut t, top, panel_max(curve), &mut integral)?;
    t.move_to(top)?;
    Ok(Top {
        roots: t.roots().to_vec(),
        integral,
    })
}

fn panel_max(curve: &Curve) -> f64 {
    0.25 * curve.path_height()
}

/// Integrals of every sheet from `x_far` to `z`, plus the roots at the last node.
fn primitive_all(
    curve: &Curve,
    z: Complex64,
    side: Side,
) -> Result<(Vec<Complex64>, Vec<Complex64>), CurveError> {
    let side = Side::of(z, side);
    let sg = side.sign();
    let top = curve.top(side)?;
    let hh = curve.path_height();
    let h = hh.max(z.im.abs());
    let pm = panel_max(curve);
    let mut acc = top.integral.clone();
    let mut t = Tracker::new(
        curve.spec(),
        Complex64::new(curve.far_point(), sg * hh),
        top.roots.clone(),
    );
    if h > hh {
        let up = Complex64::new(curve.far_point(), sg * h);
        integrate_leg(&mut t, up, pm, &mut acc)?;
        t.move_to(up)?;
    }
    let corner = Complex64::new(z.re, sg * h);
    integrate_leg(&mut t, corner, pm, &mut acc)?;
    t.move_to(corner)?;
    integrate_leg(&mut t, z, pm, &mut acc)?;
    Ok((acc, t.roots().to_vec()))
}

fn anchors(curve: &Curve) -> Result<&Anchors, CurveError> {
    curve
        .anchors
        .get_or_init(|| resolve_anchors(curve))
        .as_ref()
        .map_err(Clone::clone)
}

fn resolve_anchors(curve: &Curve) -> Result<Anchors, CurveError> {
    let structure = curve.cut_structure()?;
    let z = curve.branch_points().x_real();
    let n = curve.spec().k() + 1;
    let mut c: Vec<Option<Complex64>> = vec![None; n];
    let real = |x: f64| Complex64::new(x, 0.0);

    let (top, _) = primitive_all(curve, real(z[z.len() - 1]), Side::Above)?;
    let c0 = -top[0];
    c[0] = Some(c0);

    let mut edges = Vec::new();
    for i in 0..structure.l() {
        let group = &structure.sheet_groups[i];
        let last = group[group.len() - 1].index();
        let (right, _) = primitive_all(curve, real(z[2 * i + 1]), Side::Above)?;
        c[last] = Some(right[0] + c0 - right[last]);
        if group.len() > 1 {
            let first = group[0].index();
            let (below, _) = primitive_all(curve, real(z[2 * i]), Side::Below)?;
            let (above, _) = primitive_all(curve, real(z[2 * i]), Side::Above)?;
            c[first] = Some(below[0] + c0 - above[first]);
        }
        for &w in &structure.pairs[i] {
            let (vals, roots) = primitive_all(curve, w, Side::Above)?;
            let (s, t) = closest_pair(&roots);
            edges.push((s, t, vals));
        }
    }

    // Middle sheets meet an already anchored neighbour at a complex branch point.
    loop {
        let mut progress = false;
        for (s, t, vals) in &edges {
            match (c[*s], c[*t]) {
                (Some(cs), None) => {
                    c[*t] = Some(vals[*s] + cs - vals[*t]);
                    progress = true;
                }
                (None, Some(ct)) => {
                    c[*s] = Some(vals[*t] + ct - vals[*s]);
                    progress = true;
                }
                _ => {}
            }
        }
        if !progress {
            break;
        }
    }
    let constants = c
        .iter()
        .enumerate()
        .map(|(j, v)| v.ok_or(CurveError::Unanchored(j)))
        .collect::<Result<_, _>>()?;
    Ok(Anchors { constants })
}

pub(super) fn closest_pair(roots: &[Complex64]) -> (usize, usize) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let d = (roots[i] - roots[j]).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

impl Curve {
    /// `λ` of every sheet at `z` (flat sheet index); boundary values from `side`
    /// on the real axis.
    pub fn lambda_all(&self, z: Complex64, side: Side) -> Result<Vec<Complex64>, CurveError> {
        let c = &anchors(self)?.constants;
        let (g, _) = primitive_all(self, z, side)?;
        Ok(g.iter().zip(c).map(|(g, c)| g + c).collect())
    }

    pub fn lambda(&self, sheet: Sheet, z: Complex64, side: Side) -> Result<LambdaValue, CurveError> {
        let v = self.lambda_all(z, side)?;
        Ok(LambdaValue {
            sheet,
            at: z,
            value: v[sheet.index()],
            side: Side::of(z, side),
        })
    }

    /// `h(x) = -x²/4 + Re λ₀₊(x)`.
    pub fn h(&self, x: f64) -> Result<f64, CurveError> {
        let l = self.lambda(Sheet::Main, Complex64::new(x, 0.0), Side::Above)?;
        Ok(-0.25 * x * x + l.value.re)
    }

    /// Near-cut sample points: ten abscissae per cut at `±0.03·width` off the
    /// axis (skipping the vertical lines through complex branch points), plus
    /// real points left of the support, right of it, and in every gap.
    pub fn standard_lattice(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        let re_w: Vec<f64> = self.bps.pairs.iter().map(|p| p.upper.re).collect();
        for &(lo, hi) in &self.cuts {
            let width = hi - lo;
            for j in 0..10 {
                let x = lo + width * (j as f64 + 0.5) / 10.0;
                if re_w.iter().any(|&r| (x - r).abs() < 0.02 * width) {
                    continue;
                }
                pts.push(Complex64::new(x, 0.03 * width));
                pts.push(Complex64::new(x, -0.03 * width));
            }
        }
        let scale = self.spec.scale();
        let (lo, hi) = self.support();
        pts.push(Complex64::new(lo - 0.25 * scale, 0.0));
        pts.push(Complex64::new(hi + 0.25 * scale, 0.0));
        for w in self.cuts.windows(2) {
            pts.push(Complex64::new(0.5 * (w[0].1 + w[1].0), 0.0));
        }
        pts
    }

    /// Evaluates the real-part ordering of the λ's at every sample.
    ///
    /// Over a cut the glued sheet is the one continuing the main sheet across
    /// the real axis, and the test is `Re λ_j < Re λ₀ < Re λ_glued` for every
    /// other `j`. Off every cut it is `Re λ_j < Re λ₀` for every `j ≠ 0`.
    ///
    /// The two inequalities are also reported separately: with complex branch
    /// points only the glued one is a local property of the cut.
    pub fn check_ordering(&self, samples: &[Complex64]) -> OrderingReport {
        let points = samples.iter().map(|&z| self.ordering_at(z)).collect();
        OrderingReport { points }
    }

    fn ordering_at(&self, z: Complex64) -> OrderingPoint {
        let fail = |e: CurveError| OrderingPoint {
            z,
            cut: None,
            glued: None,
            re_lambda: Vec::new(),
            margin: f64::NEG_INFINITY,
            glued_margin: None,
            others_margin: f64::NEG_INFINITY,
            pass: false,
            error: Some(e.to_string()),
        };
        let side = Side::of(z, Side::Above);
        let re: Vec<f64> = match self.lambda_all(z, side) {
            Ok(v) => v.iter().map(|l| l.re).collect(),
            Err(e) => return fail(e),
        };
        let cut = self.cut_containing(z.re);
        let glued = match cut {
            Some(_) => match self.xi_all(Complex64::new(z.re, 0.0), side) {
                Ok(xi) => {
                    let target = xi[0].conj();
                    (1..xi.len())
                        .min_by(|&p, &q| (xi[p] - target).norm().total_cmp(&(xi[q] - target).norm()))
                        .map(Sheet::from_index)
                }
                Err(e) => return fail(e),
            },
            None => None,
        };
        let g = glued.map(|s| s.index());
        let others = (1..re.len())
            .filter(|&j| Some(j) != g)
            .map(|j| re[j])
            .fold(f64::NEG_INFINITY, f64::max);
        let others_margin = re[0] - others;
        let glued_margin = g.map(|g| re[g] - re[0]);
        let margin = others_margin.min(glued_margin.unwrap_or(f64::INFINITY));
        OrderingPoint {
            z,
            cut,
            glued,
            re_lambda: re,
            margin,
            glued_margin,
            others_margin,
            pass: margin > 0.0,
            error: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingPoint {
    pub z: Complex64,
    /// Cut under (or over) the sample, if any.
    pub cut: Option<usize>,
    pub glued: Option<Sheet>,
    /// `Re λ` per flat sheet index.
    pub re_lambda: Vec<f64>,
    /// Smallest slack of the required inequalities.
    pub margin: f64,
    /// `Re λ_glued - Re λ₀` over a cut.
    pub glued_margin: Option<f64>,
    /// `Re λ₀ - max Re λ_j` over the remaining sheets.
    pub others_margin: f64,
    pub pass: bool,
    /// Evaluation failure, reported as data.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingReport {
    pub points: Vec<OrderingPoint>,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &OrderingPoint> {
        self.points.iter().filter(|p| !p.pass)
    }

    /// Whether `Re λ₀ < Re λ_glued` holds at every sample over a cut.
    pub fn glued_passed(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.error.is_none() && p.glued_margin.is_none_or(|m| m > 0.0))
    }

    pub fn min_margin(&self) -> f64 {
        self.points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min)
    }
}

pub fn lambda_fn(spec: &CurveSpec, sheet: Sheet, z: Complex64, side: Side) -> Result<LambdaValue, CurveError> {
    Curve::new(spec.clone())?.lambda(sheet, z, side)
}

pub fn h_fn(spec: &CurveSpec, x: f64) -> Result<f64, CurveError> {
    Curve::new(spec.clone())?.h(x)
}

pub fn check_ordering(spec: &CurveSpec, samples: &[Complex64]) -> Result<OrderingReport, CurveError> {
    Ok(Curve::new(spec.clone())?.check_ordering(samples))
}

pub fn standard_lattice(spec: &CurveSpec) -> Result<Vec<Complex64>, CurveError> {
    Ok(Curve::new(spec.clone())?.standard_lattice())
}

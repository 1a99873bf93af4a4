//! The spectral curve `x = y + Σ ε_i / (y - a_i)` of the Gaussian model with
//! external source: branch points, cuts, the limiting density, and the λ-functions.

mod branch;
mod cuts;
mod density;
mod lambda;
mod sheets;
mod spec;

use std::sync::OnceLock;

use num_complex::Complex64;

pub use branch::{
    branch_points, real_branch_roots, BranchPair, BranchPointSet, RealBranch, CRITICAL_SEPARATION, REALNESS_TOL,
};
pub use cuts::{cut_structure, edge_constants, gamma_crossing_points, CutStructure};
pub use density::{density, density_profile, DensityProfile};
pub use lambda::{
    check_ordering, h_fn, lambda_fn, standard_lattice, LambdaValue, OrderingPoint,
    OrderingReport,
};
pub use sheets::{Sheet, Side, Tracker, MAX_HALVINGS};
pub use spec::{validate_spec, x_of_z, CurveSpec};

use crate::error::CurveError;

/// Analysis handle for one non-critical spec. Derived data (cut structure,
/// λ anchors, continuation start points) is computed on first use and cached.
#[derive(Debug)]
pub struct Curve {
    spec: CurveSpec,
    bps: BranchPointSet,
    cuts: Vec<(f64, f64)>,
    x_far: f64,
    height: f64,
    tops: [OnceLock<Result<lambda::Top, CurveError>>; 2],
    structure: OnceLock<Result<CutStructure, CurveError>>,
    anchors: OnceLock<Result<lambda::Anchors, CurveError>>,
}

impl Clone for Curve {
    fn clone(&self) -> Self {
        Curve::with_branch_points(self.spec.clone(), self.bps.clone())
    }
}

impl Curve {
    pub fn new(spec: CurveSpec) -> Result<Curve, CurveError> {
        let bps = BranchPointSet::compute(&spec)?;
        Ok(Curve::with_branch_points(spec, bps))
    }

    fn with_branch_points(spec: CurveSpec, bps: BranchPointSet) -> Curve {
        let cuts = bps
            .real
            .chunks_exact(2)
            .map(|c| (c[0].x, c[1].x))
            .collect();
        let scale = spec.scale();
        let max_re = bps
            .real
            .iter()
            .map(|r| r.x)
            .chain(bps.pairs.iter().map(|p| p.upper.re))
            .chain(spec.a().iter().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        let x_far = max_re + 10.0 * scale;
        let height = 2.0 * bps.max_imag() + scale;
        Curve {
            spec,
            bps,
            cuts,
            x_far,
            height,
            tops: [OnceLock::new(), OnceLock::new()],
            structure: OnceLock::new(),
            anchors: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn branch_points(&self) -> &BranchPointSet {
        &self.bps
    }

    /// Support intervals `[z_{2i-1}, z_{2i}]`.
    pub fn cuts(&self) -> &[(f64, f64)] {
        &self.cuts
    }

    pub fn support(&self) -> (f64, f64) {
        (self.cuts[0].0, self.cuts[self.cuts.len() - 1].1)
    }

    /// Index of the cut whose open interior contains `x`.
    pub fn cut_containing(&self, x: f64) -> Option<usize> {
        self.cuts.iter().position(|&(lo, hi)| lo < x && x < hi)
    }

    /// Height of the horizontal leg of every continuation path.
    pub fn path_height(&self) -> f64 {
        self.height
    }

    pub fn far_point(&self) -> f64 {
        self.x_far
    }

    /// Roots and leg integral at `x_far ± iH`, reached from `x_far`.
    fn top(&self, side: Side) -> Result<&lambda::Top, CurveError> {
        let slot = match side {
            Side::Above => &self.tops[0],
            Side::Below => &self.tops[1],
        };
        slot.get_or_init(|| lambda::first_leg(self, side))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Tracker positioned at `Re(x) ± i·max(H, |Im x|)`, the top of the vertical
    /// approach to `x`.
    pub(crate) fn tracker_above(&self, x: Complex64, side: Side) -> Result<Tracker<'_>, CurveError> {
        let side = Side::of(x, side);
        let sg = side.sign();
        let h = self.height.max(x.im.abs());
        let mut t = Tracker::new(
            &self.spec,
            Complex64::new(self.x_far, sg * self.height),
            self.top(side)?.roots.clone(),
        );
        if h > self.height {
            t.move_to(Complex64::new(self.x_far, sg * h))?;
        }
        t.move_to(Complex64::new(x.re, sg * h))?;
        Ok(t)
    }

    /// All `k + 1` sheet values at `x` (flat sheet index order).
    pub fn xi_all(&self, x: Complex64, side: Side) -> Result<Vec<Complex64>, CurveError> {
        let mut t = self.tracker_above(x, side)?;
        t.move_to(x)?;
        Ok(t.roots().to_vec())
    }

    /// `ξ_sheet(x)`; for real `x` the boundary value from `side`.
    pub fn xi(&self, x: Complex64, sheet: Sheet, side: Side) -> Result<Complex64, CurveError> {
        Ok(self.xi_all(x, side)?[sheet.index()])
    }

    /// Cut structure (sheet groups, masses, edge constants, Γ crossings).
    pub fn cut_structure(&self) -> Result<&CutStructure, CurveError> {
        self.structure
            .get_or_init(|| cuts::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `Re λ` up to the common additive constant, as a function of the y-value:
    /// `Re[y x(y) - y²/2] - Σ ε_i ln|y - a_i|`.
    pub fn real_potential(&self, y: Complex64) -> f64 {
        let x = self.spec.x_of_z(y).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let mut v = (y * x - 0.5 * y * y).re;
        for (&a, &e) in self.spec.a().iter().zip(self.spec.eps_f64()) {
            v -= e * (y - a).norm().ln();
        }
        v
    }
}

/// Standalone form of [`Curve::xi`].
pub fn xi_branch(
    spec: &CurveSpec,
    x: Complex64,
    sheet: Sheet,
    side: Side,
) -> Result<Complex64, CurveError> {
    Curve::new(spec.clone())?.xi(x, sheet, side)
}

//! The explicit model RH solution `M(x)_{αβ} = φ_α(ξ_β(x))` for curves whose
//! branch points are all real (`l = k`).
//!
//! `φ₀(ξ) = Π(ξ - a_i) / √R(ξ)` and `φ_i(ξ) = c_i Π_{j≠i}(ξ - a_j) / √R(ξ)` with
//! `c_i = -i√ε_i` and `R(ξ) = Π (ξ - p_{2i-1})(ξ - p_{2i})`. The root is continued
//! from `ξ → +∞` with its cuts on the upper arcs `ξ₀₊([z_{2i-1}, z_{2i}])`, which
//! is the placement that gives the jump `M₊ = M₋ j_S`.

use num_complex::Complex64;

use crate::curve::{Curve, CurveSpec, Side};
use crate::error::CurveError;

type C = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelRHMatrix {
    pub at: C,
    /// Side of the boundary value when `at` is real.
    pub side: Side,
    /// `(k+1) × (k+1)`, row-major; rows are `φ_α`, columns sheets `β` in flat order.
    pub entries: Vec<C>,
    pub spec: CurveSpec,
    /// `p_1 < ... < p_{2k}`, the y-plane branch points.
    pub p_images: Vec<f64>,
}

impl ModelRHMatrix {
    pub fn dim(&self) -> usize {
        self.spec.k() + 1
    }

    pub fn entry(&self, row: usize, col: usize) -> C {
        self.entries[row * self.dim() + col]
    }

    /// Largest entry modulus of `M - I`.
    pub fn distance_from_identity(&self) -> f64 {
        let n = self.dim();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                d = d.max((self.entry(i, j) - id).norm());
            }
        }
        d
    }

    pub fn det(&self) -> C {
        determinant(self.entries.clone(), self.dim())
    }
}

fn determinant(mut a: Vec<C>, n: usize) -> C {
    let mut det = C::new(1.0, 0.0);
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i * n + c].norm().total_cmp(&a[j * n + c].norm()))
            .expect("non-empty");
        if a[piv * n + c].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if piv != c {
            for j in 0..n {
                a.swap(piv * n + j, c * n + j);
            }
            det = -det;
        }
        let d = a[c * n + c];
        det *= d;
        for i in c + 1..n {
            let f = a[i * n + c] / d;
            for j in c..n {
                let v = a[c * n + j];
                a[i * n + j] -= f * v;
            }
        }
    }
    det
}

struct Model<'a> {
    curve: &'a Curve,
    p: Vec<f64>,
    c: Vec<C>,
}

impl<'a> Model<'a> {
    fn new(curve: &'a Curve) -> Result<Self, CurveError> {
        let bps = curve.branch_points();
        let k = curve.spec().k();
        if !bps.pairs.is_empty() {
            return Err(CurveError::ComplexBranchPoints {
                real: bps.real.len(),
                total: 2 * k,
            });
        }
        let mut p: Vec<f64> = bps.real.iter().map(|r| r.y).collect();
        p.sort_by(f64::total_cmp);
        let c = curve
            .spec()
            .eps_f64()
            .iter()
            .map(|e| C::new(0.0, -e.sqrt()))
            .collect();
        Ok(Model { curve, p, c })
    }

    /// `√R(ξ)` on the sheet image `Ω_sheet` (flat index; 0 is the exterior).
    fn sqrt_r(&self, xi: C, sheet: usize) -> C {
        let mut out = C::new(1.0, 0.0);
        for (i, pair) in self.p.chunks_exact(2).enumerate() {
            let (p1, p2) = (pair[0], pair[1]);
            let g = if xi.im == 0.0 && p1 < xi.re && xi.re < p2 {
                // limit from below the segment
                C::new(0.0, -((xi.re - p1) * (p2 - xi.re)).sqrt())
            } else {
                (xi - p1).sqrt() * (xi - p2).sqrt()
            };
            // inside Ω_i the cut sits on the upper arc, not on [p1, p2]
            let flip = sheet == i + 1 && xi.im > 0.0;
            out *= if flip { -g } else { g };
        }
        out
    }

    fn phi(&self, row: usize, xi: C, sheet: usize) -> C {
        let a = self.curve.spec().a();
        let num: C = a
            .iter()
            .enumerate()
            .filter(|&(j, _)| row == 0 || j + 1 != row)
            .map(|(_, &aj)| xi - aj)
            .product();
        let pre = if row == 0 { C::new(1.0, 0.0) } else { self.c[row - 1] };
        pre * num / self.sqrt_r(xi, sheet)
    }

    fn matrix(&self, x: C, side: Side) -> Result<ModelRHMatrix, CurveError> {
        let xis = self.curve.xi_all(x, side)?;
        let n = xis.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in 0..n {
            for (col, &xi) in xis.iter().enumerate() {
                entries.push(self.phi(row, xi, col));
            }
        }
        Ok(ModelRHMatrix {
            at: x,
            side: Side::of(x, side),
            entries,
            spec: self.curve.spec().clone(),
            p_images: self.p.clone(),
        })
    }
}

/// `M(x)` away from the cuts.
pub fn model_rh_matrix(spec: &CurveSpec, x: C) -> Result<ModelRHMatrix, CurveError> {
    let curve = Curve::new(spec.clone())?;
    if x.im == 0.0 && curve.cut_containing(x.re).is_some() {
        return Err(CurveError::OnCut(x.re));
    }
    Model::new(&curve)?.matrix(x, Side::Above)
}

/// Boundary value `M_±(x)` for real `x`.
pub fn model_rh_boundary(spec: &CurveSpec, x: f64, side: Side) -> Result<ModelRHMatrix, CurveError> {
    let curve = Curve::new(spec.clone())?;
    Model::new(&curve)?.matrix(C::new(x, 0.0), side)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RhReport {
    /// `max ‖M₊ - M₋ j_S‖` (Frobenius) over all sample points.
    pub max_residual: f64,
    /// Per-cut maxima.
    pub cut_residuals: Vec<f64>,
    /// Where `max_residual` is attained.
    pub worst_at: f64,
    pub points: usize,
    /// Least-squares slope of `ln ‖M - I‖` against `ln |x|` along a ray.
    pub decay_slope: f64,
    /// `(|x|, ‖M - I‖)` samples behind the slope.
    pub decay_samples: Vec<(f64, f64)>,
}

/// Checks the jump `M₊ = M₋ j_S` at `points_per_cut` interior points of every cut
/// and fits the decay exponent of `‖M - I‖`.
///
/// `j_S` on cut `i` is the identity except for the block `[[0, 1], [-1, 0]]` in
/// rows and columns `(0, i)`.
pub fn verify_model_rh(spec: &CurveSpec, points_per_cut: usize) -> Result<RhReport, CurveError> {
    if points_per_cut < 1 {
        return Err(CurveError::Resolution(points_per_cut));
    }
    let curve = Curve::new(spec.clone())?;
    let model = Model::new(&curve)?;
    let structure = curve.cut_structure()?;
    let n = spec.k() + 1;

    let mut cut_residuals = Vec::with_capacity(structure.l());
    let mut worst = (0.0, f64::NAN);
    for (ci, &(lo, hi)) in structure.cuts.iter().enumerate() {
        let glued = structure.sheet(ci, 0).index();
        let mut cut_max: f64 = 0.0;
        for j in 0..points_per_cut {
            let x = lo + (hi - lo) * (j as f64 + 0.5) / points_per_cut as f64;
            let up = model.matrix(C::new(x, 0.0), Side::Above)?;
            let dn = model.matrix(C::new(x, 0.0), Side::Below)?;
            let mut r = 0.0;
            for row in 0..n {
                for col in 0..n {
                    // (M₋ j_S)[row, col]
                    let want = if col == 0 {
                        -dn.entry(row, glued)
                    } else if col == glued {
                        dn.entry(row, 0)
                    } else {
                        dn.entry(row, col)
                    };
                    r += (up.entry(row, col) - want).norm_sqr();
                }
            }
            let r = r.sqrt();
            cut_max = cut_max.max(r);
            if r > worst.0 {
                worst = (r, x);
            }
        }
        cut_residuals.push(cut_max);
    }

    let (slope, samples) = decay_fit(&curve, &model)?;
    Ok(RhReport {
        max_residual: worst.0,
        cut_residuals,
        worst_at: worst.1,
        points: points_per_cut * structure.l(),
        decay_slope: slope,
        decay_samples: samples,
    })
}

/// Slope of `ln ‖M - I‖` against `ln r` for `x = c + r e^{iπ/3}`, `r` from
/// `20·scale` to `2000·scale`.
fn decay_fit(curve: &Curve, model: &Model) -> Result<(f64, Vec<(f64, f64)>), CurveError> {
    let spec = curve.spec();
    let center = 0.5 * (spec.a()[0] + spec.a()[spec.k() - 1]);
    let dir = C::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let m = 12;
    let mut samples = Vec::with_capacity(m);
    for j in 0..m {
        let r = 20.0 * spec.scale() * 100f64.powf(j as f64 / (m - 1) as f64);
        let d = model.matrix(center + r * dir, Side::Above)?.distance_from_identity();
        samples.push((r, d));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(r, d)| (r.ln(), d.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx, samples))
}

use num_complex::Complex64;

use super::spec::CurveSpec;
use crate::error::CurveError;
use crate::poly::{polish, real_poly_roots};

/// `|Im y| < REALNESS_TOL * (1 + |y|)` counts as real.
pub const REALNESS_TOL: f64 = 1e-9;
/// Relative (to [`CurveSpec::scale`]) separation of branch x-images below which the
/// curve is treated as critical.
pub const CRITICAL_SEPARATION: f64 = 1e-6;

/// A real branch point: the y-plane critical point and its x-image (a support edge).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealBranch {
    pub y: f64,
    pub x: f64,
}

/// A conjugate pair of branch points, stored by the member with `Im x > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPair {
    /// y-plane root whose image is `upper`.
    pub y: Complex64,
    /// x-image in the upper half-plane; its partner is `upper.conj()`.
    pub upper: Complex64,
}

impl BranchPair {
    pub fn lower(&self) -> Complex64 {
        self.upper.conj()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchPointSet {
    /// All `2k` polished roots of the branch polynomial.
    pub y_roots: Vec<Complex64>,
    /// Real branch points sorted by x-image: `z_1 < z_2 < ... < z_{2l}`.
    pub real: Vec<RealBranch>,
    /// Conjugate pairs sorted by the real part of their x-image.
    pub pairs: Vec<BranchPair>,
    /// Smallest pairwise distance among all `2k` x-images.
    pub min_separation: f64,
}

impl BranchPointSet {
    /// Roots and classification without the criticality check.
    ///
    /// Real roots are bracketed directly on `f(y) = 1 - Σ ε/(y-a)²`, which is
    /// monotone outside the sources and concave between consecutive ones. The
    /// remaining roots come from the companion matrix of the centred, rescaled
    /// branch polynomial and are Newton-polished on `f`.
    pub fn compute_unchecked(spec: &CurveSpec) -> Result<Self, CurveError> {
        let f = |y: Complex64| {
            let mut g = Complex64::new(1.0, 0.0);
            let mut dg = Complex64::new(0.0, 0.0);
            for (&a, &e) in spec.a().iter().zip(spec.eps_f64()) {
                let r = (y - a).inv();
                g -= e * r * r;
                dg += 2.0 * e * r * r * r;
            }
            (g, dg)
        };

        let real_y = real_branch_roots(spec);
        let n_complex = 2 * spec.k() - real_y.len();
        let (c, s) = (spec.center(), spec.scale());
        let mut raw: Vec<Complex64> = real_poly_roots(&spec.branch_polynomial_in(c, s))?
            .into_iter()
            .filter(|u| u.im > 0.0)
            .map(|u| c + s * u)
            .collect();
        raw.sort_by(|p, q| q.im.total_cmp(&p.im));

        let mut y_roots = Vec::with_capacity(2 * spec.k());
        let mut real = Vec::with_capacity(real_y.len());
        for y in real_y {
            y_roots.push(Complex64::new(y, 0.0));
            real.push(RealBranch { y, x: spec.x_of_z(Complex64::new(y, 0.0))?.re });
        }
        let mut pairs = Vec::with_capacity(n_complex / 2);
        for &root in raw.iter().take(n_complex / 2) {
            let y = polish(root, f, 8);
            let y = if y.im < 0.0 { y.conj() } else { y };
            y_roots.push(y);
            y_roots.push(y.conj());
            let w = spec.x_of_z(y)?;
            let (y, upper) = if w.im >= 0.0 { (y, w) } else { (y.conj(), w.conj()) };
            pairs.push(BranchPair { y, upper });
        }
        real.sort_by(|p, q| p.x.total_cmp(&q.x));
        pairs.sort_by(|p, q| p.upper.re.total_cmp(&q.upper.re));

        let mut images: Vec<Complex64> = real.iter().map(|r| Complex64::new(r.x, 0.0)).collect();
        for p in &pairs {
            images.push(p.upper);
            images.push(p.lower());
        }
        let mut min_separation = f64::INFINITY;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                min_separation = min_separation.min((images[i] - images[j]).norm());
            }
        }
        Ok(BranchPointSet {
            y_roots,
            real,
            pairs,
            min_separation,
        })
    }

    /// Branch points of a non-critical curve.
    pub fn compute(spec: &CurveSpec) -> Result<Self, CurveError> {
        let set = Self::compute_unchecked(spec)?;
        let threshold = CRITICAL_SEPARATION * spec.scale();
        if set.min_separation < threshold || set.real.len() % 2 != 0 || set.real.is_empty() {
            return Err(CurveError::Degenerate {
                separation: set.min_separation,
                threshold,
            });
        }
        Ok(set)
    }

    /// Number of real cuts `l`.
    pub fn cut_count(&self) -> usize {
        self.real.len() / 2
    }

    /// Support endpoints `z_1 < ... < z_{2l}`.
    pub fn x_real(&self) -> Vec<f64> {
        self.real.iter().map(|r| r.x).collect()
    }

    /// Conjugate pairs `(w, w̄)`.
    pub fn x_pairs(&self) -> Vec<(Complex64, Complex64)> {
        self.pairs.iter().map(|p| (p.upper, p.lower())).collect()
    }

    /// Largest `|Im w|` over complex branch points (0 when all are real).
    pub fn max_imag(&self) -> f64 {
        self.pairs.iter().map(|p| p.upper.im).fold(0.0, f64::max)
    }
}

/// Standalone form of [`BranchPointSet::compute`].
pub fn branch_points(spec: &CurveSpec) -> Result<BranchPointSet, CurveError> {
    BranchPointSet::compute(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_branch_points() {
        let s = CurveSpec::from_pairs(&[0.0], &[(1, 1)]).unwrap();
        let b = branch_points(&s).unwrap();
        assert_eq!(b.real.len(), 2);
        assert!((b.real[0].y + 1.0).abs() < 1e-14);
        assert!((b.real[1].y - 1.0).abs() < 1e-14);
        assert!((b.real[0].x + 2.0).abs() < 1e-14);
        assert!((b.real[1].x - 2.0).abs() < 1e-14);
        assert!(b.pairs.is_empty());
    }

    #[test]
    fn small_separation_intermediate_case() {
        let s = CurveSpec::from_pairs(&[-0.5, 0.5], &[(1, 2), (1, 2)]).unwrap();
        let b = branch_points(&s).unwrap();
        assert_eq!(b.cut_count(), 1);
        assert_eq!(b.pairs.len(), 1);
        // u_- < 0: the pair sits on the imaginary y axis
        assert!(b.pairs[0].y.re.abs() < 1e-12);
        assert!(b.pairs[0].upper.re.abs() < 1e-12);
        assert!(b.pairs[0].upper.im > 0.0);
    }

    #[test]
    fn critical_configuration_is_reported() {
        let s = CurveSpec::from_pairs(&[-1.0, 1.0], &[(1, 2), (1, 2)]).unwrap();
        assert!(matches!(
            branch_points(&s),
            Err(CurveError::Degenerate { .. })
        ));
    }
}

/// Real roots of `1 = Σ ε/(y-a)²`, ascending.
///
/// Left of `a_1` and right of `a_k` the sum is monotone, with one root within
/// distance 1 of the nearest source. Between consecutive sources it is convex,
/// so the gap holds two roots exactly when its minimum is below 1.
pub fn real_branch_roots(spec: &CurveSpec) -> Vec<f64> {
    let (a, e) = (spec.a(), spec.eps_f64());
    let g = |y: f64| a.iter().zip(e).map(|(&a, &e)| e / (y - a).powi(2)).sum::<f64>() - 1.0;
    let dg = |y: f64| -a.iter().zip(e).map(|(&a, &e)| 2.0 * e / (y - a).powi(3)).sum::<f64>();
    let k = a.len();
    let mut out = Vec::with_capacity(2 * k);
    out.push(bisect(&g, a[0] - 1.0 - 1e-9 * (1.0 + a[0].abs()), a[0]));
    for w in a.windows(2) {
        // g' rises from -∞ to +∞ across the gap
        let m = bisect(&dg, w[0], w[1]);
        if g(m) < 0.0 {
            out.push(bisect(&g, w[0], m));
            out.push(bisect(&g, m, w[1]));
        }
    }
    out.push(bisect(&g, a[k - 1], a[k - 1] + 1.0 + 1e-9 * (1.0 + a[k - 1].abs())));
    out
}

/// Sign-change bisection on `[lo, hi]` down to adjacent floats.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = f(lo).signum();
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

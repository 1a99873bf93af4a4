//! Sheets of the curve over the x-plane, defined by continuation from a far
//! reference point on the positive real axis.
//!
//! Paths run `x_far → x_far ± iH → Re x ± iH → x`: up (or down) to a height above
//! every complex branch point, across, then vertically onto the target. Boundary
//! values on the real axis are the limits of that vertical approach.

use num_complex::Complex64;

use super::spec::CurveSpec;
use crate::error::CurveError;
use crate::poly::{complex_poly_roots, polish};

/// Consecutive step halvings allowed before a path is declared blocked.
pub const MAX_HALVINGS: u32 = 12;
const NEWTON_ITERS: usize = 16;
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_FLOOR: f64 = 1e-11;
/// Roots closer than this (relative) are treated as colliding: the path is at a
/// branch point to within the precision a double root can be resolved.
const COLLISION: f64 = 1e-7;

/// Sheet label, fixed by the behaviour at infinity.
///
/// `Main` is the physical sheet with `ξ₀(x) = x - 1/x + O(1/x²)`; `Source(j)` has
/// `ξ(x) → a_j` (zero-based `j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    Main,
    Source(usize),
}

impl Sheet {
    /// Flat index: `Main = 0`, `Source(j) = j + 1`.
    pub fn index(self) -> usize {
        match self {
            Sheet::Main => 0,
            Sheet::Source(j) => j + 1,
        }
    }

    pub fn from_index(i: usize) -> Sheet {
        if i == 0 {
            Sheet::Main
        } else {
            Sheet::Source(i - 1)
        }
    }

    pub fn all(k: usize) -> impl Iterator<Item = Sheet> {
        (0..=k).map(Sheet::from_index)
    }
}

/// Half-plane from which a boundary value on the real axis is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }

    /// Side implied by an off-axis point, falling back to `hint` on the real axis.
    pub fn of(x: Complex64, hint: Side) -> Side {
        if x.im > 0.0 {
            Side::Above
        } else if x.im < 0.0 {
            Side::Below
        } else {
            hint
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
        }
    }
}

/// All `k + 1` roots of `x(y) = x`, indexed by flat sheet index, carried along a path.
#[derive(Clone, Debug)]
pub struct Tracker<'a> {
    spec: &'a CurveSpec,
    x: Complex64,
    roots: Vec<Complex64>,
}

impl<'a> Tracker<'a> {
    pub fn new(spec: &'a CurveSpec, x: Complex64, roots: Vec<Complex64>) -> Self {
        Tracker { spec, x, roots }
    }

    pub fn x(&self) -> Complex64 {
        self.x
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn value(&self, sheet: Sheet) -> Complex64 {
        self.roots[sheet.index()]
    }

    /// Continues every root along the straight segment from the current point to
    /// `target`. A rejected step is halved; more than [`MAX_HALVINGS`] consecutive
    /// halvings, or more than `2^MAX_HALVINGS` accepted steps, means the segment
    /// runs into a branch point.
    pub fn move_to(&mut self, target: Complex64) -> Result<(), CurveError> {
        let start = self.x;
        let delta = target - start;
        if delta.norm() == 0.0 {
            return Ok(());
        }
        let mut s = 0.0;
        // roots move by about |dx| per step, so a first step of order 1 + |x|
        // keeps the halving budget for genuine obstacles on long segments
        let mut h: f64 = ((1.0 + start.norm()) / delta.norm()).min(1.0);
        let mut halvings = 0;
        let mut steps = 0usize;
        while s < 1.0 {
            h = h.min(1.0 - s);
            let s_new = if s + h >= 1.0 { 1.0 } else { s + h };
            let x_new = if s_new == 1.0 { target } else { start + delta * s_new };
            match self.step(x_new) {
                Some(roots) => {
                    self.roots = roots;
                    self.x = x_new;
                    s = s_new;
                    h *= 2.0;
                    halvings = 0;
                    steps += 1;
                    if steps > 1 << MAX_HALVINGS {
                        return Err(CurveError::PathNearBranchPoint { at: self.x });
                    }
                }
                None => {
                    h *= 0.5;
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        return Err(CurveError::PathNearBranchPoint { at: self.x });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn follow(&mut self, path: &[Complex64]) -> Result<(), CurveError> {
        for &p in path {
            self.move_to(p)?;
        }
        Ok(())
    }

    fn step(&self, x_new: Complex64) -> Option<Vec<Complex64>> {
        let n = self.roots.len();
        let dx = x_new - self.x;
        let mut out = Vec::with_capacity(n);
        for (i, &y0) in self.roots.iter().enumerate() {
            let sep = self
                .roots
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &y)| (y - y0).norm())
                .fold(f64::INFINITY, f64::min);
            let (_, d0) = self.spec.x_and_dx(y0);
            let mut y = y0 + dx / d0;
            let mut converged = false;
            let mut last = f64::INFINITY;
            for _ in 0..NEWTON_ITERS {
                let (xv, dxv) = self.spec.x_and_dx(y);
                let corr = (xv - x_new) / dxv;
                if !corr.is_finite() {
                    return None;
                }
                let c = corr.norm();
                if c > last && c > NEWTON_TOL * (1.0 + y.norm()) {
                    // stagnation at rounding level is convergence
                    if last <= NEWTON_FLOOR * (1.0 + y.norm()) {
                        converged = true;
                        break;
                    }
                    return None;
                }
                last = c;
                y -= corr;
                if c <= NEWTON_TOL * (1.0 + y.norm()) {
                    converged = true;
                    break;
                }
            }
            if !converged && last > NEWTON_FLOOR * (1.0 + y.norm()) {
                return None;
            }
            if n > 1 && (y - y0).norm() > 0.3 * sep {
                return None;
            }
            out.push(y);
        }
        for i in 0..n {
            for j in i + 1..n {
                if (out[i] - out[j]).norm() <= COLLISION * (1.0 + out[i].norm()) {
                    return None;
                }
            }
        }
        Some(out)
    }
}

/// Roots of the fiber over a real point to the right of every branch point,
/// labelled by sheet: all real, with `ξ_j ∈ (a_j, a_{j+1})` and `ξ₀` the largest.
pub(crate) fn far_roots(spec: &CurveSpec, x_far: f64) -> Result<Vec<Complex64>, CurveError> {
    let xc = Complex64::new(x_far, 0.0);
    let (c, s) = (spec.center(), spec.scale());
    let mut roots = complex_poly_roots(&spec.fiber_polynomial_in(xc, c, s))?;
    for r in roots.iter_mut() {
        *r = c + s * *r;
        *r = polish(Complex64::new(r.re, 0.0), |y| {
            let (x, d) = spec.x_and_dx(y);
            (x - xc, d)
        }, 6);
    }
    roots.sort_by(|p, q| p.re.total_cmp(&q.re));
    // ascending: ξ_1 < ... < ξ_k < ξ_0
    let main = roots.pop().expect("k + 1 >= 2 roots");
    let mut labelled = Vec::with_capacity(roots.len() + 1);
    labelled.push(main);
    labelled.extend(roots);
    Ok(labelled)
}

/// Roots of `x(y) = x` for real `x`, polished; the fiber polynomial has real
/// coefficients so the roots are real or conjugate pairs.
pub(crate) fn real_fiber_roots(spec: &CurveSpec, x: f64) -> Result<Vec<Complex64>, CurveError> {
    let xc = Complex64::new(x, 0.0);
    let (c, s) = (spec.center(), spec.scale());
    let coeffs: Vec<f64> = spec.fiber_polynomial_in(xc, c, s).iter().map(|v| v.re).collect();
    let roots = crate::poly::real_poly_roots(&crate::poly::RealPoly(coeffs))?;
    Ok(roots
        .into_iter()
        .map(|u| {
            let r = c + s * u;
            polish(r, |y| {
                let (xv, d) = spec.x_and_dx(y);
                (xv - xc, d)
            }, 4)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_roots_are_ordered_by_asymptotics() {
        let s = CurveSpec::from_pairs(&[-1.0, 0.5, 2.0], &[(1, 4), (1, 2), (1, 4)]).unwrap();
        let x = 40.0;
        let r = far_roots(&s, x).unwrap();
        assert!((r[0].re - (x - 1.0 / x)).abs() < 1e-2);
        for (j, &a) in s.a().iter().enumerate() {
            let e = s.eps_f64()[j];
            assert!((r[j + 1].re - (a + e / (x - a))).abs() < 1e-3);
        }
    }

    #[test]
    fn tracker_follows_semicircle_root() {
        let s = CurveSpec::from_pairs(&[0.0], &[(1, 1)]).unwrap();
        let x0 = 10.0;
        let mut t = Tracker::new(&s, Complex64::new(x0, 0.0), far_roots(&s, x0).unwrap());
        t.follow(&[
            Complex64::new(10.0, 3.0),
            Complex64::new(0.0, 3.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!((t.value(Sheet::Main) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((t.value(Sheet::Source(0)) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn tracker_refuses_branch_point() {
        let s = CurveSpec::from_pairs(&[0.0], &[(1, 1)]).unwrap();
        let mut t = Tracker::new(&s, Complex64::new(10.0, 0.0), far_roots(&s, 10.0).unwrap());
        let err = t.follow(&[Complex64::new(2.0, 0.0)]).unwrap_err();
        assert!(matches!(err, CurveError::PathNearBranchPoint { .. }));
    }
}

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{CurveError, SpecError};
use crate::poly::RealPoly;

/// Source eigenvalues with their exact filling fractions.
///
/// Eigenvalues are strictly increasing and the fractions sum to exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    a: Vec<f64>,
    eps: Vec<Rational64>,
    eps_f: Vec<f64>,
}

impl CurveSpec {
    /// Validates and normalizes; pairs `(a_i, ε_i)` are sorted together by `a_i`.
    pub fn new(a: Vec<f64>, eps: Vec<Rational64>) -> Result<Self, SpecError> {
        if a.is_empty() {
            return Err(SpecError::Empty);
        }
        if a.len() != eps.len() {
            return Err(SpecError::LengthMismatch {
                eigenvalues: a.len(),
                fractions: eps.len(),
            });
        }
        if let Some(&bad) = a.iter().find(|v| !v.is_finite()) {
            return Err(SpecError::NonFinite(bad));
        }
        for (index, &fraction) in eps.iter().enumerate() {
            if fraction <= Rational64::zero() {
                return Err(SpecError::NonPositiveFraction { index, fraction });
            }
        }
        let sum: Rational64 = eps.iter().copied().sum();
        if sum != Rational64::from_integer(1) {
            return Err(SpecError::FractionSum(sum));
        }
        let mut pairs: Vec<(f64, Rational64)> = a.into_iter().zip(eps).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SpecError::DuplicateEigenvalue(w[0].0));
        }
        let (a, eps): (Vec<f64>, Vec<Rational64>) = pairs.into_iter().unzip();
        let eps_f = eps.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(CurveSpec { a, eps, eps_f })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_pairs(a: &[f64], fractions: &[(i64, i64)]) -> Result<Self, SpecError> {
        let eps = fractions
            .iter()
            .map(|&(n, d)| {
                if d == 0 {
                    Rational64::zero()
                } else {
                    Rational64::new(n, d)
                }
            })
            .collect();
        Self::new(a.to_vec(), eps)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn eps(&self) -> &[Rational64] {
        &self.eps
    }

    pub fn eps_f64(&self) -> &[f64] {
        &self.eps_f
    }

    /// `a_k - a_1`, floored at 1 so single-source specs still have a length scale.
    pub fn scale(&self) -> f64 {
        (self.a[self.k() - 1] - self.a[0]).max(1.0)
    }

    /// The spec reflected through the origin: `a -> -a` reversed, fractions reversed.
    pub fn reflected(&self) -> CurveSpec {
        let a = self.a.iter().rev().map(|v| -v).collect();
        let eps = self.eps.iter().rev().copied().collect();
        CurveSpec::new(a, eps).expect("reflection preserves validity")
    }

    /// Rational parametrization `x(z) = z + Σ ε_i / (z - a_i)`.
    pub fn x_of_z(&self, z: Complex64) -> Result<Complex64, CurveError> {
        let mut x = z;
        for (&a, &e) in self.a.iter().zip(&self.eps_f) {
            let d = z - a;
            if d.norm() == 0.0 {
                return Err(CurveError::Pole(z));
            }
            x += e / d;
        }
        Ok(x)
    }

    /// `x(z)` and `x'(z)`; callers guarantee `z` is not a pole.
    pub(crate) fn x_and_dx(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut x = z;
        let mut dx = Complex64::new(1.0, 0.0);
        for (&a, &e) in self.a.iter().zip(&self.eps_f) {
            let r = (z - a).inv();
            x += e * r;
            dx -= e * r * r;
        }
        (x, dx)
    }

    /// `x''(z) = 2 Σ ε_i / (z - a_i)^3`
    pub(crate) fn d2x(&self, z: Complex64) -> Complex64 {
        self.a
            .iter()
            .zip(&self.eps_f)
            .map(|(&a, &e)| 2.0 * e * (z - a).inv().powi(3))
            .sum()
    }

    /// `B(z) = Π (z-a_j)^2 - Σ_i ε_i Π_{j≠i} (z-a_j)^2`, degree `2k`.
    pub fn branch_polynomial(&self) -> RealPoly {
        self.branch_polynomial_in(0.0, 1.0)
    }

    /// `B(c + s u) / s^{2k}` as a polynomial in `u`. Centring and scaling keep the
    /// coefficients of order one when the `a_j` are large or widely spread.
    pub(crate) fn branch_polynomial_in(&self, c: f64, s: f64) -> RealPoly {
        let sq: Vec<RealPoly> = self
            .a
            .iter()
            .map(|&a| {
                let l = RealPoly::linear((a - c) / s);
                l.mul(&l)
            })
            .collect();
        let full = sq.iter().fold(RealPoly::one(), |p, q| p.mul(q));
        let mut b = full;
        for (i, &e) in self.eps_f.iter().enumerate() {
            let partial = sq
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(RealPoly::one(), |p, (_, q)| p.mul(q));
            b = b.add(&partial.scale(-e / (s * s)));
        }
        b
    }

    /// Midpoint of the sources, the natural centre for [`Self::branch_polynomial_in`].
    pub(crate) fn center(&self) -> f64 {
        0.5 * (self.a[0] + self.a[self.k() - 1])
    }

    /// Coefficients (ascending) of `(x - y) Π (y - a_j) - Σ_j ε_j Π_{i≠j} (y - a_i)`.
    pub fn fiber_polynomial(&self, x: Complex64) -> Vec<Complex64> {
        self.fiber_polynomial_in(x, 0.0, 1.0)
    }

    /// The fiber polynomial in `u = (y - c) / s`, divided by `s^{k+1}`.
    pub(crate) fn fiber_polynomial_in(&self, x: Complex64, c: f64, s: f64) -> Vec<Complex64> {
        let lin: Vec<RealPoly> = self.a.iter().map(|&a| RealPoly::linear((a - c) / s)).collect();
        let full = lin.iter().fold(RealPoly::one(), |p, q| p.mul(q));
        let xs = (x - c) / s;
        // (x - y) * full
        let mut out = vec![Complex64::new(0.0, 0.0); full.0.len() + 1];
        for (i, &c) in full.0.iter().enumerate() {
            out[i] += xs * c;
            out[i + 1] -= c;
        }
        for (i, &e) in self.eps_f.iter().enumerate() {
            let partial = lin
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(RealPoly::one(), |p, (_, q)| p.mul(q));
            for (j, &c) in partial.0.iter().enumerate() {
                out[j] -= e / (s * s) * c;
            }
        }
        out
    }
}

/// Standalone form of [`CurveSpec::new`].
pub fn validate_spec(a: Vec<f64>, eps: Vec<Rational64>) -> Result<CurveSpec, SpecError> {
    CurveSpec::new(a, eps)
}

/// Standalone form of [`CurveSpec::x_of_z`].
pub fn x_of_z(spec: &CurveSpec, z: Complex64) -> Result<Complex64, CurveError> {
    spec.x_of_z(z)
}

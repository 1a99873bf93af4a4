//! Dense polynomial helpers and companion-matrix root finding.
//!
//! Coefficients are stored in ascending order: `c[0] + c[1] z + ... + c[n] z^n`.

use faer::Mat;
use num_complex::Complex64;

use crate::error::NumericError;

/// Real polynomial with ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly(pub Vec<f64>);

impl RealPoly {
    pub fn one() -> Self {
        RealPoly(vec![1.0])
    }

    /// `z - root`
    pub fn linear(root: f64) -> Self {
        RealPoly(vec![-root, 1.0])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &RealPoly) -> RealPoly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly(out)
    }

    pub fn scale(&self, s: f64) -> RealPoly {
        RealPoly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &RealPoly) -> RealPoly {
        let n = self.0.len().max(other.0.len());
        let out = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect();
        RealPoly(out)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Product of `(z - r)` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a f64>) -> RealPoly {
        roots
            .into_iter()
            .fold(RealPoly::one(), |p, &r| p.mul(&RealPoly::linear(r)))
    }
}

/// Roots of a real polynomial as eigenvalues of its companion matrix.
///
/// Real roots come back with an imaginary part of exactly zero and complex
/// roots in exact conjugate pairs (real Schur form).
pub fn real_poly_roots(p: &RealPoly) -> Result<Vec<Complex64>, NumericError> {
    let n = p.degree();
    let lead = p.0[n];
    if n == 0 || lead == 0.0 {
        return Err(NumericError::DegeneratePolynomial);
    }
    let companion = Mat::<f64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -p.0[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .eigenvalues()
        .map_err(|_| NumericError::EigenFailure)
}

/// Roots of a complex polynomial (ascending coefficients) via the companion matrix.
pub fn complex_poly_roots(c: &[Complex64]) -> Result<Vec<Complex64>, NumericError> {
    let n = c.len().saturating_sub(1);
    let lead = c[n];
    if n == 0 || lead == Complex64::new(0.0, 0.0) {
        return Err(NumericError::DegeneratePolynomial);
    }
    let companion = Mat::<Complex64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    companion
        .eigenvalues()
        .map_err(|_| NumericError::EigenFailure)
}

/// Newton polish of a root of `f`, accepting steps only while the residual shrinks.
pub fn polish<F>(mut z: Complex64, f: F, max_steps: usize) -> Complex64
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let (mut val, mut der) = f(z);
    for _ in 0..max_steps {
        if der.norm() == 0.0 || !val.is_finite() {
            break;
        }
        let cand = z - val / der;
        let (cv, cd) = f(cand);
        if !(cv.norm() < val.norm()) {
            break;
        }
        z = cand;
        val = cv;
        der = cd;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn roots_of_product_are_recovered() {
        let p = RealPoly::from_roots(&[-3.0, 0.5, 2.0, 7.25]);
        let r = sorted_re(real_poly_roots(&p).unwrap());
        for (got, want) in r.iter().zip([-3.0, 0.5, 2.0, 7.25]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_pair_is_conjugate() {
        // z^2 + 1
        let roots = real_poly_roots(&RealPoly(vec![1.0, 0.0, 1.0])).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], roots[1].conj());
        assert!((roots[0].im.abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_coefficients() {
        // (z - i)(z - 2) = z^2 - (2 + i) z + 2i
        let c = [
            Complex64::new(0.0, 2.0),
            Complex64::new(-2.0, -1.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut r = complex_poly_roots(&c).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_polynomial_is_rejected() {
        assert!(real_poly_roots(&RealPoly(vec![3.0])).is_err());
    }
}

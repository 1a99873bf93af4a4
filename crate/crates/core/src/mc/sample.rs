use faer::{Mat, Side};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::CurveSpec;
use crate::error::{McError, NumericError};

/// Largest matrix size accepted by [`sample_matrix`].
pub const MAX_N: usize = 2048;

/// Sorted eigenvalues of independent draws of `M = A + H`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSample {
    pub n: usize,
    pub spec: CurveSpec,
    pub seed: u64,
    pub draws: usize,
    /// One ascending sequence of length `n` per draw, in draw order.
    pub eigenvalues: Vec<Vec<f64>>,
}

impl EnsembleSample {
    /// All eigenvalues, draw by draw.
    pub fn pooled(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().flatten().copied()
    }
}

/// Source multiplicities `n_i = N ε_i`.
pub fn multiplicities(spec: &CurveSpec, n: usize) -> Result<Vec<usize>, McError> {
    spec.eps()
        .iter()
        .map(|e| {
            let m = e * Rational64::from_integer(n as i64);
            if m.is_integer() {
                Ok(m.to_integer().to_usize().unwrap_or(0))
            } else {
                Err(McError::NotCommonMultiple { n, denominator: *e.denom() })
            }
        })
        .collect()
}

/// Generator for draw `draw` of a run with master seed `seed`: the seed fixes the
/// key and the draw index selects the stream, so draws are independent of
/// scheduling.
pub fn draw_rng(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

/// `M = A + H` for one draw. `H` has diagonal entries `N(0, 1/N)` and
/// off-diagonal entries whose real and imaginary parts are `N(0, 1/(2N))`; the
/// lower triangle is the exact conjugate of the upper one.
pub fn build_matrix(spec: &CurveSpec, n: usize, seed: u64, draw: u64) -> Result<Mat<Complex64>, McError> {
    let mult = multiplicities(spec, n)?;
    let mut rng = draw_rng(seed, draw);
    let diag_sd = (1.0 / n as f64).sqrt();
    let off_sd = (0.5 / n as f64).sqrt();
    let mut m = Mat::<Complex64>::zeros(n, n);
    let mut a = Vec::with_capacity(n);
    for (&ai, &mi) in spec.a().iter().zip(&mult) {
        a.extend(std::iter::repeat_n(ai, mi));
    }
    for j in 0..n {
        let g: f64 = StandardNormal.sample(&mut rng);
        m[(j, j)] = Complex64::new(a[j] + diag_sd * g, 0.0);
        for i in 0..j {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let v = Complex64::new(off_sd * re, off_sd * im);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(m)
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
pub fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<f64>, NumericError> {
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| NumericError::EigenFailure)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `draws` independent eigenvalue samples of size `n`, computed in parallel and
/// stored in draw order.
pub fn sample_matrix(spec: &CurveSpec, n: usize, seed: u64, draws: usize) -> Result<EnsembleSample, McError> {
    if draws == 0 {
        return Err(McError::TooFewDraws { needed: 1, got: 0 });
    }
    if n == 0 || n > MAX_N {
        return Err(McError::Size(n));
    }
    multiplicities(spec, n)?;
    let eigenvalues = (0..draws as u64)
        .into_par_iter()
        .map(|d| Ok(hermitian_eigenvalues(&build_matrix(spec, n, seed, d)?)?))
        .collect::<Result<Vec<_>, McError>>()?;
    Ok(EnsembleSample {
        n,
        spec: spec.clone(),
        seed,
        draws,
        eigenvalues,
    })
}

/// Per-draw `(1/N) Tr M` and `(1/N) Tr M²`, reduced to means and standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_tr1: f64,
    pub se_tr1: f64,
    pub mean_tr2: f64,
    pub se_tr2: f64,
    /// `Σ ε_i a_i`
    pub expected_tr1: f64,
    /// `Σ ε_i a_i² + 1`
    pub expected_tr2: f64,
}

impl Moments {
    /// Both means within `z` standard errors of their exact values.
    pub fn within(&self, z: f64) -> bool {
        (self.mean_tr1 - self.expected_tr1).abs() <= z * self.se_tr1
            && (self.mean_tr2 - self.expected_tr2).abs() <= z * self.se_tr2
    }
}

pub(crate) fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn moments(sample: &EnsembleSample) -> Moments {
    let n = sample.n as f64;
    let tr1: Vec<f64> = sample.eigenvalues.iter().map(|e| e.iter().sum::<f64>() / n).collect();
    let tr2: Vec<f64> = sample
        .eigenvalues
        .iter()
        .map(|e| e.iter().map(|x| x * x).sum::<f64>() / n)
        .collect();
    let (mean_tr1, se_tr1) = mean_se(&tr1);
    let (mean_tr2, se_tr2) = mean_se(&tr2);
    let spec = &sample.spec;
    let eps = spec.eps_f64();
    Moments {
        mean_tr1,
        se_tr1,
        mean_tr2,
        se_tr2,
        expected_tr1: spec.a().iter().zip(eps).map(|(a, e)| a * e).sum(),
        expected_tr2: spec.a().iter().zip(eps).map(|(a, e)| a * a * e).sum::<f64>() + 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semicircle() -> CurveSpec {
        CurveSpec::from_pairs(&[0.0], &[(1, 1)]).unwrap()
    }

    #[test]
    fn matrix_is_exactly_hermitian() {
        let s = CurveSpec::from_pairs(&[-1.0, 1.0], &[(1, 2), (1, 2)]).unwrap();
        let m = build_matrix(&s, 20, 3, 5).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(m[(i, j)], m[(j, i)].conj());
            }
        }
        // the source sits on the diagonal
        let mean_first: f64 = (0..10).map(|i| m[(i, i)].re).sum::<f64>() / 10.0;
        assert!(mean_first < 0.0);
    }

    #[test]
    fn deterministic_and_order_independent() {
        let s = semicircle();
        let a = sample_matrix(&s, 30, 11, 8).unwrap();
        let b = sample_matrix(&s, 30, 11, 8).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        let single = hermitian_eigenvalues(&build_matrix(&s, 30, 11, 5).unwrap()).unwrap();
        assert_eq!(single, a.eigenvalues[5]);
        let c = sample_matrix(&s, 30, 12, 8).unwrap();
        assert_ne!(a.eigenvalues, c.eigenvalues);
    }

    #[test]
    fn rejects_bad_sizes() {
        let s = CurveSpec::from_pairs(&[0.0, 1.0], &[(1, 3), (2, 3)]).unwrap();
        assert!(matches!(
            sample_matrix(&s, 50, 0, 1),
            Err(McError::NotCommonMultiple { n: 50, denominator: 3 })
        ));
        assert!(matches!(sample_matrix(&semicircle(), 10, 0, 0), Err(McError::TooFewDraws { .. })));
    }

    #[test]
    fn small_matrix_trace_mean() {
        let s = semicircle();
        let smp = sample_matrix(&s, 2, 1, 100_000).unwrap();
        let m = moments(&smp);
        assert!((m.mean_tr1 - m.expected_tr1).abs() < 3.0 * m.se_tr1, "{m:?}");
    }

    #[test]
    fn two_source_moments() {
        let s = CurveSpec::from_pairs(&[-2.0, 2.0], &[(1, 2), (1, 2)]).unwrap();
        let smp = sample_matrix(&s, 100, 2, 200).unwrap();
        let m = moments(&smp);
        assert_eq!(m.expected_tr2, 5.0);
        assert!(m.within(4.0), "{m:?}");
    }
}

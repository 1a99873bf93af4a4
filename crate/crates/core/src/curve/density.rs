use std::f64::consts::PI;

use num_complex::Complex64;

use super::spec::CurveSpec;
use super::{sheets, Curve};
use crate::error::CurveError;
use crate::poly::polish;
use crate::quad::{GaussLegendre, MASS_TOL};

/// Limiting density sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile {
    pub grid: Vec<f64>,
    pub rho: Vec<f64>,
    /// Quadrature of ρ over every cut.
    pub total_mass: f64,
    /// Per-cut quadrature masses.
    pub cut_masses: Vec<f64>,
}

impl Curve {
    /// `ρ(x) = Im ξ₀₊(x) / π`; exactly zero off the open cut interiors.
    ///
    /// Inside a cut the fiber over `x` has exactly one conjugate pair (the other
    /// `k - 1` roots sit one per gap between consecutive `a_j`), so ξ₀₊ is the
    /// root with positive imaginary part.
    pub fn density(&self, x: f64) -> f64 {
        if self.cut_containing(x).is_none() {
            return 0.0;
        }
        self.upper_root(x).map(|y| y.im / PI).unwrap_or(0.0)
    }

    /// ξ₀₊ at a real point strictly inside a cut.
    pub(crate) fn upper_root(&self, x: f64) -> Result<Complex64, CurveError> {
        let roots = sheets::real_fiber_roots(&self.spec, x)?;
        let xc = Complex64::new(x, 0.0);
        let newton = |y: Complex64| {
            let (xv, d) = self.spec.x_and_dx(y);
            (xv - xc, d)
        };
        let best = roots
            .iter()
            .copied()
            .max_by(|p, q| p.im.total_cmp(&q.im))
            .expect("fiber has k + 1 >= 2 roots");
        if best.im > 0.0 {
            return Ok(polish(best, newton, 4));
        }
        // Near an edge the pair may have come back as two close real roots;
        // restart Newton above their midpoint.
        let mut pair = (0, 1);
        let mut gap = f64::INFINITY;
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let d = (roots[i] - roots[j]).norm();
                if d < gap {
                    gap = d;
                    pair = (i, j);
                }
            }
        }
        let start = 0.5 * (roots[pair.0] + roots[pair.1]) + Complex64::new(0.0, (0.5 * gap).max(1e-8));
        let y = polish(start, newton, 60);
        Ok(Complex64::new(y.re, y.im.abs()))
    }

    /// `∫_{lo}^{hi} ρ` over one cut.
    pub fn cut_mass(&self, cut: usize) -> f64 {
        let (lo, hi) = self.cuts[cut];
        GaussLegendre::cut_rule().integrate_sin2_adaptive(lo, hi, MASS_TOL, |x| self.density(x))
    }

    /// `∫_{z_lo}^{x} ρ` where `z_lo` is the left edge of the cut containing `x`
    /// (the full cut mass at or past its right edge, 0 left of the support).
    pub fn integrated_density(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &(lo, hi)) in self.cuts.iter().enumerate() {
            if x >= hi {
                acc += self.cut_mass(i);
            } else if x > lo {
                acc += GaussLegendre::cut_rule().integrate_sin2_adaptive(lo, x, MASS_TOL, |t| self.density(t));
            }
        }
        acc
    }

    pub fn density_profile(&self, points_per_cut: usize) -> Result<DensityProfile, CurveError> {
        if points_per_cut < 2 {
            return Err(CurveError::Resolution(points_per_cut));
        }
        let mut grid = Vec::new();
        for &(lo, hi) in &self.cuts {
            let margin = 0.05 * (hi - lo);
            grid.push(lo - margin);
            for j in 0..points_per_cut {
                grid.push(lo + (hi - lo) * j as f64 / (points_per_cut - 1) as f64);
            }
            grid.push(hi + margin);
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let rho = grid.iter().map(|&x| self.density(x)).collect();
        let cut_masses: Vec<f64> = (0..self.cuts.len()).map(|i| self.cut_mass(i)).collect();
        Ok(DensityProfile {
            grid,
            rho,
            total_mass: cut_masses.iter().sum(),
            cut_masses,
        })
    }
}

/// Standalone form of [`Curve::density`].
pub fn density(spec: &CurveSpec, x: f64) -> Result<f64, CurveError> {
    Ok(Curve::new(spec.clone())?.density(x))
}

/// Standalone form of [`Curve::density_profile`].
pub fn density_profile(spec: &CurveSpec, points_per_cut: usize) -> Result<DensityProfile, CurveError> {
    Curve::new(spec.clone())?.density_profile(points_per_cut)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semicircle() -> Curve {
        Curve::new(CurveSpec::from_pairs(&[0.0], &[(1, 1)]).unwrap()).unwrap()
    }

    #[test]
    fn semicircle_values() {
        let c = semicircle();
        assert!((c.density(0.0) - 1.0 / PI).abs() < 1e-14);
        assert_eq!(c.density(3.0), 0.0);
        assert_eq!(c.density(2.0), 0.0);
        assert_eq!(c.density(-2.0), 0.0);
        for x in [-1.9, -0.7, 0.3, 1.99] {
            let want = (4.0 - x * x as f64).sqrt() / (2.0 * PI);
            assert!((c.density(x) - want).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn semicircle_profile_mass() {
        let p = semicircle().density_profile(200).unwrap();
        assert!((p.total_mass - 1.0).abs() < 1e-8);
        for (&x, &r) in p.grid.iter().zip(&p.rho) {
            assert!(r >= 0.0);
            if x.abs() >= 2.0 {
                assert_eq!(r, 0.0);
            }
        }
    }

    #[test]
    fn rejects_coarse_profile() {
        assert!(matches!(
            semicircle().density_profile(1),
            Err(CurveError::Resolution(1))
        ));
    }

    #[test]
    fn two_cut_gap_is_empty() {
        let c = Curve::new(CurveSpec::from_pairs(&[-2.0, 2.0], &[(1, 2), (1, 2)]).unwrap()).unwrap();
        assert_eq!(c.density(0.0), 0.0);
        assert!((c.cut_mass(0) - 0.5).abs() < 1e-10);
        assert!((c.cut_mass(1) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn integrated_density_accumulates() {
        let c = semicircle();
        assert_eq!(c.integrated_density(-3.0), 0.0);
        assert!((c.integrated_density(0.0) - 0.5).abs() < 1e-12);
        assert!((c.integrated_density(5.0) - 1.0).abs() < 1e-12);
    }
}

//! The Airy function `Ai` and its derivative on the complex plane.
//!
//! Three regimes:
//! - `|z| ≤ 1.5`, or `|z| ≤ 7` away from the right sector: Maclaurin series with
//!   compensated summation.
//! - `|arg z| ≤ π/4`, `|z| > 1.5`: `Ai(z) = √(z/3) K_{1/3}(ζ) / π` with
//!   `K_ν(ζ) = ∫₀^∞ e^{-ζ cosh t} cosh νt dt` by the trapezoid rule, which avoids
//!   the cancellation the series suffers where `Ai` decays.
//! - elsewhere: the large-`|z|` asymptotic expansions, truncated at the smallest term.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::AiryError;

/// `Ai(0)`
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// `-Ai'(0)`
pub const AIP0: f64 = 0.258_819_403_792_806_8;
/// Beyond this modulus `Ai` over- or underflows in some direction.
pub const OVERFLOW_GUARD: f64 = 100.0;

const SMALL: f64 = 1.5;
const SERIES_MAX: f64 = 7.0;

type C = Complex64;

/// `(Ai(z), Ai'(z))`.
pub fn airy(z: C) -> Result<(C, C), AiryError> {
    let r = z.norm();
    if !(r <= OVERFLOW_GUARD) {
        return Err(AiryError::Overflow(r));
    }
    Ok(if r <= SMALL {
        maclaurin(z)
    } else if z.arg().abs() <= FRAC_PI_4 {
        bessel_k(z)
    } else if r <= SERIES_MAX {
        maclaurin(z)
    } else {
        asymptotic(z)
    })
}

/// Real-argument convenience wrapper.
pub fn airy_real(x: f64) -> Result<(f64, f64), AiryError> {
    let (a, d) = airy(C::new(x, 0.0))?;
    Ok((a.re, d.re))
}

#[derive(Default)]
struct Kahan {
    sum: C,
    c: C,
}

impl Kahan {
    fn add(&mut self, v: C) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `Ai = Ai(0) f - |Ai'(0)| g` with the two power series of the Airy equation.
fn maclaurin(z: C) -> (C, C) {
    let z3 = z * z * z;
    let (mut f, mut g, mut fp, mut gp) = (Kahan::default(), Kahan::default(), Kahan::default(), Kahan::default());
    let mut tf = C::new(1.0, 0.0);
    let mut tg = z;
    let mut tfp = z * z * 0.5;
    let mut tgp = C::new(1.0, 0.0);
    f.add(tf);
    g.add(tg);
    fp.add(tfp);
    gp.add(tgp);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        tgp *= z3 / (k3 * (k3 - 2.0));
        if k >= 2 {
            tfp *= z3 / ((k3 - 3.0) * (k3 - 1.0));
        }
        f.add(tf);
        g.add(tg);
        gp.add(tgp);
        if k >= 2 {
            fp.add(tfp);
        }
        let tiny = 1e-18;
        if tf.norm() <= tiny * f.sum.norm()
            && tg.norm() <= tiny * g.sum.norm()
            && tfp.norm() <= tiny * fp.sum.norm().max(f64::MIN_POSITIVE)
            && tgp.norm() <= tiny * gp.sum.norm()
        {
            break;
        }
    }
    (AI0 * f.sum - AIP0 * g.sum, AI0 * fp.sum - AIP0 * gp.sum)
}

/// Trapezoid rule for `K_{1/3}` and `K_{2/3}` at `ζ = (2/3) z^{3/2}`.
fn bessel_k(z: C) -> (C, C) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let h = 0.05;
    let re = zeta.re;
    let mut k13 = C::new(0.0, 0.0);
    let mut k23 = C::new(0.0, 0.0);
    // e^{-Re ζ (cosh t - 1)} below 1e-20 relative to the t = 0 value
    let t_max = (1.0 + 46.0 / re).acosh();
    let n = (t_max / h).ceil() as usize;
    for j in 0..=n {
        let t = j as f64 * h;
        let w = if j == 0 { 0.5 * h } else { h };
        let e = (-zeta * (t.cosh() - 1.0)).exp() * w;
        k13 += e * (t / 3.0).cosh();
        k23 += e * (2.0 * t / 3.0).cosh();
    }
    let decay = (-zeta).exp();
    let ai = (z / 3.0).sqrt() * k13 * decay / PI;
    let aip = -z * k23 * decay / (PI * 3f64.sqrt());
    (ai, aip)
}

/// Coefficients `u_k` and `v_k` of the asymptotic expansions.
fn uv(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sum of `c_k s^k` over `k` in `terms`, stopped at the smallest term.
fn truncated(coeffs: &[f64], s: C, terms: impl Iterator<Item = usize>, sign_alt: bool) -> C {
    let mut acc = C::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for (j, k) in terms.enumerate() {
        let sign = if sign_alt && j % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * coeffs[k] * s.powi(k as i32);
        let m = term.norm();
        if m > last {
            break;
        }
        acc += term;
        last = m;
        if m < 1e-17 * acc.norm() {
            break;
        }
    }
    acc
}

fn asymptotic(z: C) -> (C, C) {
    const TERMS: usize = 60;
    let (u, v) = uv(TERMS);
    let sqrt_pi = PI.sqrt();
    if z.arg().abs() <= 2.0 * PI / 3.0 {
        let zeta = 2.0 / 3.0 * z.powf(1.5);
        let s = -zeta.inv();
        let su = truncated(&u, s, 0..TERMS, false);
        let sv = truncated(&v, s, 0..TERMS, false);
        let q = z.powf(0.25);
        let e = (-zeta).exp();
        (e * su / (2.0 * sqrt_pi * q), -q * e * sv / (2.0 * sqrt_pi))
    } else {
        // oscillatory form in w = -z, |arg w| < π/3
        let w = -z;
        let zeta = 2.0 / 3.0 * w.powf(1.5);
        let s = zeta.inv();
        let p = truncated(&u, s, (0..TERMS).step_by(2), true);
        let q = truncated(&u, s, (1..TERMS).step_by(2), true);
        let r = truncated(&v, s, (0..TERMS).step_by(2), true);
        let t = truncated(&v, s, (1..TERMS).step_by(2), true);
        let phase = zeta + FRAC_PI_4;
        let (sn, cs) = (phase.sin(), phase.cos());
        let w4 = w.powf(0.25);
        let ai = (sn * p - cs * q) / (sqrt_pi * w4);
        let aip = -w4 * (cs * r + sn * t) / sqrt_pi;
        (ai, aip)
    }
}

/// `ω = e^{2πi/3}`
pub fn omega() -> C {
    C::from_polar(1.0, 2.0 * PI / 3.0)
}

/// `y_α(z) = ω^α Ai(ω^α z)` for `α ∈ {0, 1, 2}`.
pub fn y_alpha(alpha: u8, z: C) -> Result<C, AiryError> {
    Ok(y_alpha_with_derivative(alpha, z)?.0)
}

/// `(y_α(z), y_α'(z))`, with `y_α' = ω^{2α} Ai'(ω^α z)`.
pub fn y_alpha_with_derivative(alpha: u8, z: C) -> Result<(C, C), AiryError> {
    assert!(alpha < 3, "alpha must be 0, 1 or 2");
    let w = omega().powi(alpha as i32);
    let (a, d) = airy(w * z)?;
    Ok((w * a, w * w * d))
}

use std::f64::consts::PI;

use super::airy::airy_real;

/// `|u - v|` below which the sine kernel returns its diagonal value.
pub const SINE_DIAGONAL: f64 = 1e-8;
/// `|u - v|` below which the Airy kernel returns its diagonal value.
pub const AIRY_DIAGONAL: f64 = 1e-6;

/// `sin π(u-v) / (π(u-v))`
pub fn sine_kernel(u: f64, v: f64) -> f64 {
    let d = u - v;
    if d.abs() < SINE_DIAGONAL {
        return 1.0;
    }
    (PI * d).sin() / (PI * d)
}

/// `(Ai(u)Ai'(v) - Ai'(u)Ai(v)) / (u - v)`, with diagonal `Ai'(u)² - u Ai(u)²`.
///
/// Arguments beyond the Airy overflow guard give `NaN`.
pub fn airy_kernel(u: f64, v: f64) -> f64 {
    let (Ok((au, du)), Ok((av, dv))) = (airy_real(u), airy_real(v)) else {
        return f64::NAN;
    };
    if (u - v).abs() < AIRY_DIAGONAL {
        let m = 0.5 * (u + v);
        let (a, d) = airy_real(m).unwrap_or((f64::NAN, f64::NAN));
        return d * d - m * a * a;
    }
    (au * dv - du * av) / (u - v)
}

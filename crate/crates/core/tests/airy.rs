//! Airy values against 40-digit mpmath references.

use num_complex::Complex64;
use rmcurve_core::rh::{airy, airy_real, y_alpha};

/// `(x, Ai(x), Ai'(x))`
const REAL: &[(f64, f64, f64)] = &[
    (-10.0, 0.040241238486443190689, 0.9962650441327900559),
    (-9.5, 0.31910324771912820138, -0.108095318811871239),
    (-8.0, -0.052705050356386202622, 0.93556093819830655103),
    (-7.3, 0.33577037051514727697, -0.18009580448329365985),
    (-6.5, -0.23802030199711580359, -0.674952492513202173),
    (-6.0, -0.32914517362982310523, 0.34593548728134289493),
    (-5.0, 0.35076100902411431979, 0.32719281855444313679),
    (-4.2, 0.089210763239450717957, -0.78221560786245189744),
    (-3.0, -0.37881429367765807435, 0.31458376921659881365),
    (-2.5, -0.11232506769296608919, 0.67885273426479436337),
    (-1.0, 0.5355608832923521188, -0.010160567116645209395),
    (-0.3, 0.4309030952855808556, -0.24054512725815461017),
    (0.0, 0.35502805388781723926, -0.25881940379280679841),
    (0.4, 0.25474235429567634084, -0.23583203441920821501),
    (1.0, 0.13529241631288141552, -0.15914744129679321279),
    (1.7, 0.054324792732919471188, -0.077374889525325032183),
    (2.5, 0.015725923380470489995, -0.026250881035903230365),
    (3.3, 0.0037872884268267545819, -0.0071424877858847401285),
    (4.0, 0.00095156385120480187362, -0.0019586409502041789001),
    (4.8, 0.00017032552328643501627, -0.00038157072868873858577),
    (5.5, 0.000033685311908599814425, -0.00008046339130556514338),
    (6.0, 9.9476943602528895702e-6, -0.000024765200397034954754),
    (6.5, 2.7958823432049135855e-6, -7.2319314666017925598e-6),
    (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
    (10.0, 1.1047532552898685934e-10, -3.5206336767389236366e-10),
];

/// `(Re z, Im z, Re Ai, Im Ai, Re Ai', Im Ai')`
const COMPLEX: &[(f64, f64, f64, f64, f64, f64)] = &[
    (1.0, 1.0, 0.0604583083718381492, -0.151889565877181402, -0.130627953499647518, 0.163067596449323916),
    (-3.0, 2.0, -4.41968955426416726, 5.45462251778266739, 11.8785235647418668, 5.20935184788397367),
    (2.0, -5.0, -0.594962545688530406, 0.917452838961563121, 0.00022112103890024984, -2.52966128857628076),
    (-7.0, 0.5, 0.365673475673222541, -0.513502099829539455, -1.5880862045679386, -0.808723456095348813),
    (0.5, 8.0, 2238.06525000069342, 1346.91200768094754, -2055.74481505842123, -7050.65946935817571),
    (-4.0, -4.0, -698.821746052768035, -217.291321522702843, 1083.2131454552737, -1322.68612942040371),
];

#[test]
fn real_axis_relative_accuracy() {
    for &(x, ai, aip) in REAL {
        let (a, d) = airy_real(x).unwrap();
        // relative to the local envelope so zeros of Ai do not dominate
        let env = ai.abs().max(aip.abs() / (1.0 + x.abs()).sqrt());
        assert!((a - ai).abs() <= 1e-10 * env, "Ai({x}) = {a}, want {ai}");
        let envp = aip.abs().max(ai.abs() * (1.0 + x.abs()).sqrt());
        assert!((d - aip).abs() <= 1e-10 * envp, "Ai'({x}) = {d}, want {aip}");
    }
}

#[test]
fn complex_values() {
    for &(x, y, ar, ai, dr, di) in COMPLEX {
        let (a, d) = airy(Complex64::new(x, y)).unwrap();
        let want_a = Complex64::new(ar, ai);
        let want_d = Complex64::new(dr, di);
        assert!((a - want_a).norm() <= 1e-9 * want_a.norm(), "Ai({x}+{y}i) = {a}");
        assert!((d - want_d).norm() <= 1e-9 * want_d.norm(), "Ai'({x}+{y}i) = {d}");
    }
}

#[test]
fn airy_equation_residual() {
    let h = 1e-2;
    for j in 0..40 {
        let x = -10.0 + 16.0 * j as f64 / 39.0;
        let f = |t: f64| airy_real(t).unwrap().0;
        let second = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
            / (12.0 * h * h);
        assert!((second - x * f(x)).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn connection_identity_at_random_points() {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..50 {
        let z = Complex64::new(-8.0 + 16.0 * next(), -8.0 + 16.0 * next());
        let ys: Vec<Complex64> = (0..3).map(|a| y_alpha(a, z).unwrap()).collect();
        let scale = ys.iter().map(|y| y.norm()).fold(0.0, f64::max);
        let sum: Complex64 = ys.iter().sum();
        assert!(sum.norm() <= 1e-9 * scale, "z = {z}: {sum}");
    }
}

#[test]
fn rotated_solutions_satisfy_airy_equation() {
    let h = 1e-2;
    for alpha in 0..3u8 {
        for &z in &[Complex64::new(0.5, 0.3), Complex64::new(-2.0, 1.0), Complex64::new(3.0, -2.0)] {
            let f = |t: Complex64| y_alpha(alpha, t).unwrap();
            let hc = Complex64::new(h, 0.0);
            let second = (-f(z + 2.0 * hc) + 16.0 * f(z + hc) - 30.0 * f(z) + 16.0 * f(z - hc) - f(z - 2.0 * hc))
                / (12.0 * h * h);
            assert!((second - z * f(z)).norm() < 1e-5, "alpha {alpha} z {z}");
        }
    }
}

//! Gauss–Legendre quadrature, including the `sin²` endpoint substitution used
//! for integrands with square-root behaviour at both ends of an interval.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul};
use std::sync::OnceLock;

/// Node count used for per-cut integrals.
pub const CUT_NODES: usize = 64;

/// Depth cap for [`GaussLegendre::integrate_sin2_adaptive`].
const MAX_BISECTIONS: u32 = 20;

/// Absolute tolerance used for cut masses.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1], found by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 64-node rule.
    pub fn cut_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(CUT_NODES))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Add<Output = T> + Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        self.mapped(a, b)
            .fold(T::default(), |acc, (x, w)| acc + f(x) * w)
    }

    /// Nodes of the substitution `x = lo + (hi - lo) sin²θ`, `θ ∈ [0, π/2]`, with
    /// the Jacobian folded into the weights. Square-root endpoint behaviour
    /// becomes analytic in θ.
    pub fn sin2_mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let len = hi - lo;
        self.mapped(0.0, FRAC_PI_2).map(move |(theta, w)| {
            let s = theta.sin();
            (lo + len * s * s, w * len * (2.0 * theta).sin())
        })
    }

    pub fn integrate_sin2<T, F>(&self, lo: f64, hi: f64, mut f: F) -> T
    where
        T: Add<Output = T> + Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        self.sin2_mapped(lo, hi)
            .fold(T::default(), |acc, (x, w)| acc + f(x) * w)
    }

    /// [`Self::integrate_sin2`] with bisection until a panel and its two halves
    /// agree to `tol`. Needed when a cut sits next to a nearly closed gap and
    /// the integrand varies on the gap's length scale.
    pub fn integrate_sin2_adaptive<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, tol: f64, mut f: F) -> f64 {
        let whole = self.integrate_sin2(lo, hi, &mut f);
        self.bisect(lo, hi, whole, tol, 0, &mut f)
    }

    fn bisect<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, whole: f64, tol: f64, depth: u32, f: &mut F) -> f64 {
        let mid = 0.5 * (lo + hi);
        let left = self.integrate_sin2(lo, mid, &mut *f);
        let right = self.integrate_sin2(mid, hi, &mut *f);
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if (left + right - whole).abs() <= tol.max(floor) || depth >= MAX_BISECTIONS {
            return left + right;
        }
        self.bisect(lo, mid, left, 0.5 * tol, depth + 1, f) + self.bisect(mid, hi, right, 0.5 * tol, depth + 1, f)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is exact for 8 nodes
        let got: f64 = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((got - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let wsum: f64 = gl.integrate(-1.0, 1.0, |_| 1.0);
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let gl = GaussLegendre::new(5);
        let got: f64 = gl.integrate(-1.0, 1.0, |x| x.powi(8));
        assert!((got - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn sin2_handles_sqrt_endpoints() {
        // semicircle mass
        let gl = GaussLegendre::cut_rule();
        let m: f64 = gl.integrate_sin2(-2.0, 2.0, |x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI));
        assert!((m - 1.0).abs() < 1e-13, "{m}");
    }

    #[test]
    fn adaptive_resolves_narrow_features() {
        // ∫₀¹ √x / (x + c) dx = 2 (1 - √c atan(1/√c))
        let c: f64 = 1e-7;
        let want = 2.0 * (1.0 - c.sqrt() * (1.0 / c.sqrt()).atan());
        let gl = GaussLegendre::cut_rule();
        let plain: f64 = gl.integrate_sin2(0.0, 1.0, |x| x.sqrt() / (x + c));
        let adaptive = gl.integrate_sin2_adaptive(0.0, 1.0, 1e-12, |x| x.sqrt() / (x + c));
        assert!((plain - want).abs() > 1e-6);
        assert!((adaptive - want).abs() < 1e-10, "{adaptive} vs {want}");
    }
}

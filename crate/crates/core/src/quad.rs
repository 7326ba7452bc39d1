//! Gauss-Legendre rules and adaptive line integrals in the complex plane.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::Circle;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`; nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral of `f(z) dz` along the straight segment `a -> b`.
    pub fn segment<F: FnMut(Complex64) -> Complex64>(&self, a: Complex64, b: Complex64, mut f: F) -> Complex64 {
        let mid = (a + b) * 0.5;
        let half = (b - a) * 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * *x) * *w;
        }
        acc * half
    }
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Globally adaptive bisection over a Gauss-Legendre rule: the panel with the
/// largest error estimate is split until the summed estimate meets the
/// tolerance or the panel budget runs out.
#[derive(Debug, Clone)]
pub struct AdaptiveLine {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveLine {
    fn default() -> Self {
        AdaptiveLine::new(1e-12, 1e-13)
    }
}

struct Panel {
    a: Complex64,
    b: Complex64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

impl AdaptiveLine {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        AdaptiveLine {
            rule: GaussLegendre::new(16),
            abs_tol,
            rel_tol,
            max_panels: 2000,
        }
    }

    /// Integral of `f(z) dz` along `a -> b`.
    pub fn integrate<F: FnMut(Complex64) -> Complex64>(&self, a: Complex64, b: Complex64, mut f: F) -> Complex64 {
        let whole = self.rule.segment(a, b, &mut f);
        let mut heap = BinaryHeap::new();
        let first = self.split(a, b, whole, &mut f);
        let mut total: Complex64 = first.iter().map(|p| p.value).sum();
        let mut err: f64 = first.iter().map(|p| p.err).sum();
        heap.extend(first);
        let mut panels = 2;
        while err > self.abs_tol.max(self.rel_tol * total.norm()) && panels < self.max_panels {
            let worst = heap.pop().expect("panels are never removed without replacement");
            let halves = self.split(worst.a, worst.b, worst.value, &mut f);
            total -= worst.value;
            err -= worst.err;
            for p in halves {
                total += p.value;
                err += p.err;
                heap.push(p);
            }
            panels += 1;
        }
        // resum to shed the drift of the running total
        heap.iter().map(|p| p.value).sum()
    }

    /// Halves of `[a, b]` with the error of each estimated from the
    /// disagreement between the halves and `whole`.
    fn split<F: FnMut(Complex64) -> Complex64>(
        &self,
        a: Complex64,
        b: Complex64,
        whole: Complex64,
        f: &mut F,
    ) -> [Panel; 2] {
        let m = (a + b) * 0.5;
        let left = self.rule.segment(a, m, &mut *f);
        let right = self.rule.segment(m, b, &mut *f);
        let err = 0.5 * (left + right - whole).norm();
        [
            Panel {
                a,
                b: m,
                value: left,
                err,
            },
            Panel {
                a: m,
                b,
                value: right,
                err,
            },
        ]
    }
}

/// `oint f(z) dz` over a counterclockwise circle by the periodic trapezoid
/// rule, spectrally accurate for integrands analytic near the circle.
pub fn circle_integral<F: FnMut(Complex64) -> Complex64>(circle: &Circle, nodes: usize, mut f: F) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let t = 2.0 * PI * j as f64 / nodes as f64;
        let e = Complex64::from_polar(1.0, t);
        let z = circle.center + circle.radius * e;
        acc += f(z) * Complex64::new(0.0, circle.radius) * e;
    }
    acc * (2.0 * PI / nodes as f64)
}

//! Quadrature: adaptive Gauss-Kronrod (7/15), Gauss-Legendre rules and cumulative integrals.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-13,
            rel: 1e-13,
            max_depth: 40,
        }
    }
}

/// One Gauss-Kronrod 7/15 panel: returns (kronrod estimate, |kronrod - gauss|).
pub fn gk15<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).magnitude())
}

fn adapt<T: Integrand>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    whole: (T, f64),
    tol: f64,
    rel: f64,
    depth: u32,
) -> T {
    let (val, err) = whole;
    if err <= tol.max(rel * val.magnitude()) || depth == 0 || (b - a) < 1e-15 {
        return val;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    adapt(f, a, m, left, 0.5 * tol, rel, depth - 1)
        + adapt(f, m, b, right, 0.5 * tol, rel, depth - 1)
}

/// Adaptive integral of `f` over `[a, b]` with default tolerances.
pub fn integrate<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64) -> T {
    integrate_with(f, a, b, QuadTol::default())
}

pub fn integrate_with<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: QuadTol) -> T {
    let whole = gk15(&f, a, b);
    adapt(&f, a, b, whole, tol.abs, tol.rel, tol.max_depth)
}

/// Adaptive integral after splitting `[a, b]` into `panels` equal pieces.
/// Used for oscillatory integrands, where each panel should hold a few oscillations at most.
pub fn integrate_panels<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize) -> T {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let tol = QuadTol {
        abs: QuadTol::default().abs / panels as f64,
        ..QuadTol::default()
    };
    let mut acc = T::zero();
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        acc = acc + integrate_with(&f, lo, hi, tol);
    }
    acc
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Eight-point Gauss-Legendre rule, used for short sub-panel integrals.
pub(crate) fn gl8<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> T {
    const X: [f64; 4] = [
        0.183434642495649804939476142360184,
        0.525532409916328985817739049189246,
        0.796666477413626739591553936475830,
        0.960289856497536231683560868569473,
    ];
    const W: [f64; 4] = [
        0.362683783378361982965150449277196,
        0.313706645877887287337962201986601,
        0.222381034453374470544355994426241,
        0.101228536290376259152531354309962,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = T::zero();
    for j in 0..4 {
        acc = acc + (f(c - h * X[j]) + f(c + h * X[j])) * W[j];
    }
    acc * h
}

/// Tabulated running integral `x -> ∫_0^x f` on a uniform grid over `[0, 1]`.
/// Between grid nodes the remainder is integrated with an 8-point Gauss rule.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl CumulativeIntegral {
    pub fn new(f: &impl Fn(f64) -> f64, panels: usize) -> Self {
        let h = 1.0 / panels as f64;
        let nodes: Vec<f64> = (0..=panels).map(|k| k as f64 * h).collect();
        let mut values = Vec::with_capacity(panels + 1);
        values.push(0.0);
        // compensated summation keeps the running total accurate over thousands of panels
        let (mut acc, mut comp) = (0.0f64, 0.0f64);
        for k in 0..panels {
            let v = gl8(f, nodes[k], nodes[k + 1]);
            let t = acc + v;
            comp += if acc.abs() >= v.abs() {
                (acc - t) + v
            } else {
                (v - t) + acc
            };
            acc = t;
            values.push(acc + comp);
        }
        CumulativeIntegral { nodes, values }
    }

    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Running integral at `x`, with `f` the same integrand used for construction.
    pub fn eval(&self, f: &impl Fn(f64) -> f64, x: f64) -> f64 {
        let panels = self.nodes.len() - 1;
        let x = x.clamp(0.0, 1.0);
        let k = ((x * panels as f64).round() as usize).min(panels);
        let xk = self.nodes[k];
        if x == xk {
            return self.values[k];
        }
        self.values[k] + gl8(f, xk, x)
    }
}

//! Closed-form determinants and free solutions, with forward-mode derivatives in λ.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Principal fourth root, `arg z ∈ (-π/4, π/4]`.
pub fn fourth_root(lambda: Complex64) -> Complex64 {
    lambda.sqrt().sqrt()
}

/// Scalars the closed forms are written over: plain complex numbers or dual numbers.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c(v: Complex64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn from_f(v: f64) -> Self {
        Self::from_c(Complex64::new(v, 0.0))
    }
}

impl Scalar for Complex64 {
    fn from_c(v: Complex64) -> Self {
        v
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn sinh(self) -> Self {
        Complex64::sinh(self)
    }
    fn cosh(self) -> Self {
        Complex64::cosh(self)
    }
}

/// Value and first derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: Complex64,
    pub d: Complex64,
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}
impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}
impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}
impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual {
            v: self.v / o.v,
            d: (self.d * o.v - self.v * o.d) / (o.v * o.v),
        }
    }
}
impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            d: -self.d,
        }
    }
}

impl Scalar for Dual {
    fn from_c(v: Complex64) -> Self {
        Dual {
            v,
            d: Complex64::new(0.0, 0.0),
        }
    }
    fn sin(self) -> Self {
        Dual {
            v: self.v.sin(),
            d: self.d * self.v.cos(),
        }
    }
    fn cos(self) -> Self {
        Dual {
            v: self.v.cos(),
            d: -self.d * self.v.sin(),
        }
    }
    fn sinh(self) -> Self {
        Dual {
            v: self.v.sinh(),
            d: self.d * self.v.cosh(),
        }
    }
    fn cosh(self) -> Self {
        Dual {
            v: self.v.cosh(),
            d: self.d * self.v.sinh(),
        }
    }
}

/// Below this |z| the closed forms switch to power series in λ.
const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 10;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn series<T: Scalar>(coeffs: &[f64], lam: T) -> T {
    let mut acc = T::from_f(0.0);
    for c in coeffs.iter().rev() {
        acc = acc * lam + T::from_f(*c);
    }
    acc
}

/// Evaluate a closed form either through `z` or, near the origin, through series in `λ`,
/// returning `(D, dD/dλ)`.
fn with_derivative(
    lambda: Complex64,
    by_z: impl Fn(Dual) -> Dual,
    by_lambda: impl Fn(Dual) -> Dual,
) -> (Complex64, Complex64) {
    let z = fourth_root(lambda);
    let out = if z.norm() < SERIES_RADIUS {
        by_lambda(Dual {
            v: lambda,
            d: Complex64::new(1.0, 0.0),
        })
    } else {
        by_z(Dual {
            v: z,
            d: 1.0 / (4.0 * z * z * z),
        })
    };
    (out.v, out.d)
}

fn free_series_coeffs() -> Vec<f64> {
    (0..SERIES_TERMS)
        .map(|k| (-1f64).powi(k as i32) * 2f64.powi(2 * k as i32 + 1) / factorial(4 * k + 2))
        .collect()
}

fn free_z<T: Scalar>(z: T) -> T {
    z.sinh() * z.sin() / (z * z)
}

/// `sinh z sin z / z²`.
pub fn char_det_free(lambda: Complex64) -> Complex64 {
    let z = fourth_root(lambda);
    if z.norm() < SERIES_RADIUS {
        series(&free_series_coeffs(), lambda)
    } else {
        free_z(z)
    }
}

pub fn char_det_free_with_derivative(lambda: Complex64) -> (Complex64, Complex64) {
    let c = free_series_coeffs();
    with_derivative(lambda, free_z, |l| series(&c, l))
}

/// Taylor coefficients in λ of the bracket in the point-mass determinant, divided by `4 z⁵`.
fn delta_q_series_coeffs(t0: f64) -> Vec<f64> {
    let u = 2.0 * t0 - 1.0;
    (1..=SERIES_TERMS)
        .map(|k| {
            let mut c = 0.0;
            for m in 1..=2 * k {
                let j = 2 * k - m;
                c += 2.0 * (-1f64).powi(m as i32) * (u.powi(2 * m as i32) - 1.0)
                    / (factorial(2 * m) * factorial(2 * j + 1));
            }
            c / 4.0
        })
        .collect()
}

fn delta_q_z<T: Scalar>(gamma: T, t0: f64, z: T) -> T {
    let u = T::from_f(2.0 * t0 - 1.0);
    let z5 = z * z * z * z * z;
    let bracket = ((u * z).cos() - z.cos()) * z.sinh() + ((u * z).cosh() - z.cosh()) * z.sin();
    free_z(z) + gamma * bracket / (T::from_f(4.0) * z5)
}

/// Determinant for `q = γ δ(t - t0)`, `p = 0`.
pub fn char_det_delta_q(gamma: Complex64, t0: f64, lambda: Complex64) -> Complex64 {
    char_det_delta_q_with_derivative(gamma, t0, lambda).0
}

pub fn char_det_delta_q_with_derivative(
    gamma: Complex64,
    t0: f64,
    lambda: Complex64,
) -> (Complex64, Complex64) {
    let free = free_series_coeffs();
    let corr = delta_q_series_coeffs(t0);
    let g = Dual::from_c(gamma);
    with_derivative(
        lambda,
        |z| delta_q_z(g, t0, z),
        |l| series(&free, l) + g * series(&corr, l),
    )
}

fn delta_p_z<T: Scalar>(gamma: T, z: T) -> T {
    let z3 = z * z * z;
    let z4 = z3 * z;
    free_z(z)
        + gamma * (z.sinh() * z.cos() - z.cosh() * z.sin()) / (T::from_f(2.0) * z3)
        + gamma * gamma * (T::from_f(1.0) - z.cosh() * z.cos()) / (T::from_f(8.0) * z4)
}

/// Closed-form determinant for `p = γ δ(t - 1/2)`, `q = 0`.
pub fn char_det_delta_p(gamma: Complex64, lambda: Complex64) -> Complex64 {
    char_det_delta_p_with_derivative(gamma, lambda).0
}

pub fn char_det_delta_p_with_derivative(
    gamma: Complex64,
    lambda: Complex64,
) -> (Complex64, Complex64) {
    let free = free_series_coeffs();
    // (sinh z cos z - cosh z sin z)/z³ = Σ_{k≥1} (-4)^k λ^{k-1}/(4k-1)!
    let lin: Vec<f64> = (1..=SERIES_TERMS)
        .map(|k| (-4f64).powi(k as i32) / factorial(4 * k - 1) / 2.0)
        .collect();
    // (1 - cosh z cos z)/z⁴ = -Σ_{k≥1} (-4)^k λ^{k-1}/(4k)!
    let quad: Vec<f64> = (1..=SERIES_TERMS)
        .map(|k| -(-4f64).powi(k as i32) / factorial(4 * k) / 8.0)
        .collect();
    let g = Dual::from_c(gamma);
    with_derivative(
        lambda,
        |z| delta_p_z(g, z),
        |l| series(&free, l) + g * series(&lin, l) + g * g * series(&quad, l),
    )
}

/// Solutions of `y'''' = λ y`: `φ₁..φ₄` and `s± = (sinh zx ± sin zx)/2`.
#[derive(Debug, Clone, Copy)]
pub struct FreeSolutions {
    pub lambda: Complex64,
    pub z: Complex64,
}

impl FreeSolutions {
    pub fn new(lambda: Complex64) -> Self {
        FreeSolutions {
            lambda,
            z: fourth_root(lambda),
        }
    }

    pub fn s_plus(&self, x: f64) -> Complex64 {
        let zx = self.z * x;
        (zx.sinh() + zx.sin()) / 2.0
    }

    pub fn s_minus(&self, x: f64) -> Complex64 {
        let zx = self.z * x;
        (zx.sinh() - zx.sin()) / 2.0
    }

    /// `[φ₁, φ₂, φ₃, φ₄](x)`; `φ_k(x) = Σ_m λ^m x^{4m+k-1}/(4m+k-1)!`.
    pub fn phi(&self, x: f64) -> [Complex64; 4] {
        let z = self.z;
        let zx = z * x;
        if zx.norm() < SERIES_RADIUS {
            let mut out = [Complex64::new(0.0, 0.0); 4];
            for (k, slot) in out.iter_mut().enumerate() {
                let mut term = Complex64::new(x.powi(k as i32) / factorial(k), 0.0);
                let mut acc = term;
                for m in 1..SERIES_TERMS {
                    let p = 4 * m + k;
                    term =
                        term * self.lambda * x.powi(4) / ((p - 3) * (p - 2) * (p - 1) * p) as f64;
                    acc += term;
                }
                *slot = acc;
            }
            return out;
        }
        let (sh, sn, ch, cs) = (zx.sinh(), zx.sin(), zx.cosh(), zx.cos());
        [
            (ch + cs) / 2.0,
            (sh + sn) / (2.0 * z),
            (ch - cs) / (2.0 * z * z),
            (sh - sn) / (2.0 * z * z * z),
        ]
    }

    /// The free fundamental matrix `M₀(x, λ)` in the variables `(y, y', y'', y''')`.
    pub fn matrix(&self, x: f64) -> [[Complex64; 4]; 4] {
        let [p1, p2, p3, p4] = self.phi(x);
        let l = self.lambda;
        [
            [p1, p2, p3, p4],
            [l * p4, p1, p2, p3],
            [l * p3, l * p4, p1, p2],
            [l * p2, l * p3, l * p4, p1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_values() {
        assert!((char_det_free(c(0.0)) - 1.0).norm() < 1e-15);
        let v = char_det_free(c((PI / 2.0).powi(4)));
        assert!((v.re - (PI / 2.0).sinh() / (PI / 2.0).powi(2)).abs() < 1e-14);
        assert!((v.re - 0.932681314786351).abs() < 1e-12);
        for n in 1..6 {
            assert!(
                char_det_free(c((PI * n as f64).powi(4))).norm() < 1e-9 * (PI * n as f64).sinh()
            );
        }
    }

    #[test]
    fn series_and_closed_form_agree_near_switch() {
        for &r in &[0.95, 1.05] {
            for k in 0..8 {
                let z = Complex64::from_polar(r, -PI / 4.0 + PI / 2.0 * k as f64 / 8.0);
                let l = z.powi(4);
                let closed = free_z(z);
                let ser = series(&free_series_coeffs(), l);
                assert!((closed - ser).norm() < 1e-14);
                let gamma = c(0.7);
                let dq = delta_q_z(gamma, 0.3, z);
                let dqs = series(&free_series_coeffs(), l)
                    + gamma * series(&delta_q_series_coeffs(0.3), l);
                assert!((dq - dqs).norm() < 1e-12, "{dq} {dqs}");
                let a = char_det_delta_p(gamma, l);
                let b = delta_p_z(gamma, z);
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_matches_difference() {
        for &l in &[c(0.3), c(50.0), Complex64::new(-300.0, 120.0)] {
            let h = 1e-5 * l.norm().max(1.0);
            let fd = (char_det_free(l + h) - char_det_free(l - h)) / (2.0 * h);
            let (_, d) = char_det_free_with_derivative(l);
            assert!((fd - d).norm() < 1e-7 * d.norm());
            let g = Complex64::new(1.0, 0.2);
            let fd =
                (char_det_delta_q(g, 0.3, l + h) - char_det_delta_q(g, 0.3, l - h)) / (2.0 * h);
            let (_, d) = char_det_delta_q_with_derivative(g, 0.3, l);
            assert!((fd - d).norm() < 1e-7 * d.norm());
            let fd = (char_det_delta_p(g, l + h) - char_det_delta_p(g, l - h)) / (2.0 * h);
            let (_, d) = char_det_delta_p_with_derivative(g, l);
            assert!((fd - d).norm() < 1e-7 * d.norm());
        }
    }

    /// The point mass acts through the jump `[Y₄] = -γ y(t0)`, so the monodromy factors through
    /// free matrices; this gives an independent route to the closed form.
    #[test]
    fn delta_q_matches_jump_factorization() {
        for &l in &[c(3.0), c(50.0), c(1000.0), Complex64::new(200.0, -90.0)] {
            let (gamma, t0) = (Complex64::new(1.3, 0.0), 0.3);
            let f = FreeSolutions::new(l);
            let (a, b) = (f.matrix(1.0 - t0), f.matrix(t0));
            let mut j = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (i, row) in j.iter_mut().enumerate() {
                row[i] = c(1.0);
            }
            j[3][0] = -gamma;
            let mul = |x: &[[Complex64; 4]; 4], y: &[[Complex64; 4]; 4]| {
                let mut r = [[Complex64::new(0.0, 0.0); 4]; 4];
                for i in 0..4 {
                    for k in 0..4 {
                        for m in 0..4 {
                            r[i][k] += x[i][m] * y[m][k];
                        }
                    }
                }
                r
            };
            let m = mul(&a, &mul(&j, &b));
            let d = m[0][1] * m[2][3] - m[0][3] * m[2][1];
            let closed = char_det_delta_q(gamma, t0, l);
            assert!(
                (d - closed).norm() < 1e-11 * closed.norm().max(1.0),
                "{d} vs {closed}"
            );
        }
    }

    #[test]
    fn even_eigenvalues_unshifted_for_midpoint_mass() {
        for n in 1..5 {
            let l = c((2.0 * PI * n as f64).powi(4));
            let scale = (2.0 * PI * n as f64).sinh() / (2.0 * PI * n as f64).powi(2);
            assert!(char_det_delta_q(c(1.0), 0.5, l).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn free_matrix_is_consistent() {
        let f = FreeSolutions::new(Complex64::new(40.0, 3.0));
        let x = 0.6;
        let [p1, p2, p3, p4] = f.phi(x);
        let h = 1e-6;
        let d2 = (f.phi(x + h)[1] - f.phi(x - h)[1]) / (2.0 * h);
        let d4 = (f.phi(x + h)[3] - f.phi(x - h)[3]) / (2.0 * h);
        assert!((d2 - p1).norm() < 1e-7);
        assert!((d4 - p3).norm() < 1e-7);
        assert!((f.s_plus(x) / f.z - p2).norm() < 1e-14);
        assert!((f.s_minus(x) / f.z.powi(3) - p4).norm() < 1e-14);
        let small = FreeSolutions::new(c(0.0));
        assert_eq!(small.matrix(1.0)[0], [c(1.0), c(1.0), c(0.5), c(1.0 / 6.0)]);
    }
}

//! Reference solvers used for validation only. They share no numerical code with the main
//! pipeline: Gauss nodes come from the Golub-Welsch eigenproblem and shooting uses its own
//! fixed-step Runge-Kutta scheme.

use crate::coefficients::Function1D;
use crate::determinant::FourthOrderOperator;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]` from the eigen-decomposition of the Jacobi matrix.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Composite Gauss rule on `[0, 1]`.
fn composite_rule(panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = golub_welsch(order);
    let h = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Lowest `n_want` eigenvalues of `H` in the basis `√2 sin(kπt)`, `k = 1..=basis_size`.
pub fn galerkin_spectrum(
    op: &FourthOrderOperator,
    basis_size: usize,
    n_want: usize,
) -> Result<Vec<f64>> {
    if !op.is_real() {
        return Err(Error::NonReal(
            "the Galerkin oracle needs real coefficients".into(),
        ));
    }
    if n_want == 0 || basis_size < 4 * n_want {
        return Err(Error::InvalidInput(format!(
            "basis size {basis_size} is below 4 × {n_want}"
        )));
    }
    let (nodes, weights) = composite_rule(2 * basis_size, 12);
    let pw: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, w)| op.p.eval(t) * w)
        .collect();
    let qw: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, w)| op.q.eval(t) * w)
        .collect();
    let m = basis_size;
    let rows: Vec<Vec<f64>> = (1..=m)
        .into_par_iter()
        .map(|j| {
            let kj = PI * j as f64;
            (1..=m)
                .map(|k| {
                    let kk = PI * k as f64;
                    let mut acc = 0.0;
                    for (i, &t) in nodes.iter().enumerate() {
                        let (sj, cj) = (kj * t).sin_cos();
                        let (sk, ck) = (kk * t).sin_cos();
                        acc += -2.0 * pw[i] * 2.0 * kj * kk * cj * ck + qw[i] * 2.0 * sj * sk;
                    }
                    if j == k {
                        acc += kj.powi(4);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut a = DMatrix::from_fn(m, m, |r, c| rows[r][c]);
    // symmetrize away quadrature roundoff
    a = (&a + a.transpose()) * 0.5;
    let mut eigs: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs.truncate(n_want);
    Ok(eigs)
}

const SHOOT_STEPS: usize = 4000;

/// Integrate `y'' = −(p + α) y` with its α-derivative from `y(0) = 0, y'(0) = 1`.
/// Returns `(y(1), ∂y(1)/∂α, sign changes of y on (0, 1))`.
fn shoot(p: &dyn Fn(f64) -> f64, alpha: f64, steps: usize) -> (f64, f64, usize) {
    let h = 1.0 / steps as f64;
    let f = |t: f64, s: [f64; 4]| -> [f64; 4] {
        let k = p(t) + alpha;
        [s[1], -k * s[0], s[3], -k * s[2] - s[0]]
    };
    let mut s = [0.0, 1.0, 0.0, 0.0];
    let mut zeros = 0;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, s);
        let k2 = f(t + h / 2.0, std::array::from_fn(|j| s[j] + h / 2.0 * k1[j]));
        let k3 = f(t + h / 2.0, std::array::from_fn(|j| s[j] + h / 2.0 * k2[j]));
        let k4 = f(t + h, std::array::from_fn(|j| s[j] + h * k3[j]));
        let next: [f64; 4] =
            std::array::from_fn(|j| s[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        if i > 0 && i + 1 < steps && next[0].signum() != s[0].signum() && next[0] != 0.0 {
            zeros += 1;
        }
        s = next;
    }
    (s[0], s[2], zeros)
}

/// `y(1, α)` and its α-derivative, Richardson-combined from two step sizes.
fn shoot_extrapolated(p: &dyn Fn(f64) -> f64, alpha: f64) -> (f64, f64) {
    let (y1, d1, _) = shoot(p, alpha, SHOOT_STEPS);
    let (y2, d2, _) = shoot(p, alpha, 2 * SHOOT_STEPS);
    ((16.0 * y2 - y1) / 15.0, (16.0 * d2 - d1) / 15.0)
}

/// Dirichlet eigenvalues of `−y'' − p y`, located by zero counting and bisection, then Newton.
pub fn sturm_liouville_eigs(p: &Function1D, n_want: usize) -> Result<Vec<f64>> {
    if !p.is_real() {
        return Err(Error::NonReal("p".into()));
    }
    let pf = |t: f64| p.eval(t);
    let p_max = (0..=1000)
        .map(|k| p.eval(k as f64 / 1000.0).abs())
        .fold(0.0, f64::max);
    (1..=n_want)
        .into_par_iter()
        .map(|n| {
            // the n-th eigenfunction has n − 1 interior zeros
            let count = |alpha: f64| {
                let (y, _, z) = shoot(&pf, alpha, SHOOT_STEPS);
                z + usize::from(y.signum() != if z % 2 == 0 { 1.0 } else { -1.0 })
            };
            let mut lo = -p_max - 1.0;
            let mut hi = (PI * n as f64).powi(2) + p_max + 1.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if count(mid) >= n {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-6 * hi.abs().max(1.0) {
                    break;
                }
            }
            let mut alpha = 0.5 * (lo + hi);
            for _ in 0..20 {
                let (y, dy) = shoot_extrapolated(&pf, alpha);
                let step = y / dy;
                alpha -= step;
                if step.abs() < 1e-14 * alpha.abs().max(1.0) {
                    break;
                }
            }
            if !alpha.is_finite() || alpha < lo - 1.0 || alpha > hi + 1.0 {
                return Err(Error::RootSearch(format!(
                    "shooting eigenvalue {n} left its bracket"
                )));
            }
            Ok(alpha)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golub_welsch_integrates_polynomials() {
        let (x, w) = golub_welsch(10);
        for deg in 0..20 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            assert!((s - exact).abs() < 1e-13, "{deg}");
        }
    }

    #[test]
    fn galerkin_diagonal_cases() {
        let e = galerkin_spectrum(&FourthOrderOperator::zero(), 16, 4).unwrap();
        for (i, v) in e.iter().enumerate() {
            let exact = (PI * (i + 1) as f64).powi(4);
            assert!((v - exact).abs() < 1e-10 * exact);
        }
        let op = FourthOrderOperator::new(Function1D::constant(1.5), Function1D::zero());
        let e = galerkin_spectrum(&op, 16, 4).unwrap();
        for (i, v) in e.iter().enumerate() {
            let k = PI * (i + 1) as f64;
            assert!((v - (k.powi(4) - 3.0 * k * k)).abs() < 1e-10 * k.powi(4));
        }
        assert!(galerkin_spectrum(&op, 10, 4).is_err());
    }

    #[test]
    fn galerkin_decreases_with_basis() {
        let op =
            FourthOrderOperator::new(Function1D::sin_mode(1, 3.0), Function1D::cos_mode(1, 20.0));
        let a = galerkin_spectrum(&op, 16, 3).unwrap();
        let b = galerkin_spectrum(&op, 32, 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(y <= &(x + 1e-9 * x.abs()));
        }
    }

    #[test]
    fn shooting_free_case() {
        let e = sturm_liouville_eigs(&Function1D::zero(), 6).unwrap();
        for (i, v) in e.iter().enumerate() {
            let exact = (PI * (i + 1) as f64).powi(2);
            assert!((v - exact).abs() < 1e-10 * exact, "{v} vs {exact}");
        }
    }

    #[test]
    fn shooting_negative_eigenvalue() {
        // constant p = 20 shifts every eigenvalue down by 20
        let e = sturm_liouville_eigs(&Function1D::constant(20.0), 3).unwrap();
        for (i, v) in e.iter().enumerate() {
            let exact = (PI * (i + 1) as f64).powi(2) - 20.0;
            assert!(
                (v - exact).abs() < 1e-9 * exact.abs().max(1.0),
                "{v} vs {exact}"
            );
        }
    }

    #[test]
    fn square_of_second_order_operator() {
        let p = Function1D::fourier(0.3, vec![0.5], vec![0.2]);
        let alpha = sturm_liouville_eigs(&p, 8).unwrap();
        let q = Function1D::from_fn(0, {
            let p = p.clone();
            move |t| [p.deriv(2, t).unwrap() + p.eval(t).powi(2), 0.0, 0.0, 0.0]
        });
        let op = FourthOrderOperator::new(p, q);
        let lam = galerkin_spectrum(&op, 64, 8).unwrap();
        for (a, l) in alpha.iter().zip(&lam) {
            assert!((a * a - l).abs() < 1e-6 * l, "{} vs {l}", a * a);
        }
    }
}

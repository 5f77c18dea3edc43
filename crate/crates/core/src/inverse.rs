//! Recovery of one beam coefficient from first-order eigenvalue derivatives, and the
//! uniform-beam test from a spectrum.
//!
//! Functions are odd about `x = 1/2` (`f(x) = −f(1−x)`), so they are sine series
//! `f = 2 Σ f̂sₙ sin 2πnx` and the forward map `λₙ'(0) = 2(πn)³(α̂sₙ − β̂sₙ)` is inverted term by term.

use crate::coefficients::{fourier_coefficients, Function1D};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct InverseResult {
    pub recovered: Function1D,
    /// `coefficients[n-1]` is the recovered sine coefficient f̂sₙ
    pub coefficients: Vec<f64>,
    pub truncation: usize,
    /// largest mismatch between the input derivatives and the forward map of the result
    pub residual_norm: f64,
}

fn check_input(derivs: &[f64], n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidInput(
            "truncation index must be at least 1".into(),
        ));
    }
    if derivs.len() < n {
        return Err(Error::InvalidInput(format!(
            "{} derivatives supplied, {n} required",
            derivs.len()
        )));
    }
    if derivs[..n].iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("eigenvalue derivatives".into()));
    }
    Ok(())
}

/// `λₙ'(0) = 2(πn)³(α̂sₙ − β̂sₙ)` for `n = 1..=n_max`.
pub fn forward_derivatives(alpha: &Function1D, beta: &Function1D, n_max: usize) -> Vec<f64> {
    let (fa, fb) = (
        fourier_coefficients(alpha, n_max),
        fourier_coefficients(beta, n_max),
    );
    (1..=n_max)
        .map(|n| 2.0 * (PI * n as f64).powi(3) * (fa.s(n) - fb.s(n)))
        .collect()
}

fn build(coefficients: Vec<f64>, residual: impl Fn(&Function1D) -> f64) -> InverseResult {
    let recovered =
        Function1D::fourier(0.0, vec![], coefficients.iter().map(|c| 2.0 * c).collect());
    let residual_norm = residual(&recovered);
    InverseResult {
        truncation: coefficients.len(),
        recovered,
        coefficients,
        residual_norm,
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// β from α and `λₙ'(0)`, `n = 1..=n`: `β̂sₙ = α̂sₙ − λₙ'(0)/(2(πn)³)`.
pub fn recover_beta(alpha: &Function1D, derivs: &[f64], n: usize) -> Result<InverseResult> {
    check_input(derivs, n)?;
    let fa = fourier_coefficients(alpha, n);
    let coeffs = (1..=n)
        .map(|k| fa.s(k) - derivs[k - 1] / (2.0 * (PI * k as f64).powi(3)))
        .collect();
    Ok(build(coeffs, |beta| {
        max_diff(&forward_derivatives(alpha, beta, n), &derivs[..n])
    }))
}

/// α from β and `λₙ'(0)`: `α̂sₙ = β̂sₙ + λₙ'(0)/(2(πn)³)`.
pub fn recover_alpha(beta: &Function1D, derivs: &[f64], n: usize) -> Result<InverseResult> {
    check_input(derivs, n)?;
    let fb = fourier_coefficients(beta, n);
    let coeffs = (1..=n)
        .map(|k| fb.s(k) + derivs[k - 1] / (2.0 * (PI * k as f64).powi(3)))
        .collect();
    Ok(build(coeffs, |alpha| {
        max_diff(&forward_derivatives(alpha, beta, n), &derivs[..n])
    }))
}

/// The literal reconstruction `β(x) = ½(α(x) − α(1−x) − Σ λₙ'(0)/(πn)³ sin 2πnx)`.
/// Its derivative term is half of what the forward map requires; kept for comparison.
pub fn recover_beta_verbatim(alpha: &Function1D, derivs: &[f64], n: usize) -> Result<Function1D> {
    check_input(derivs, n)?;
    let alpha = alpha.clone();
    let terms: Vec<f64> = (1..=n)
        .map(|k| derivs[k - 1] / (PI * k as f64).powi(3))
        .collect();
    Ok(Function1D::from_fn(0, move |x| {
        let s: f64 = terms
            .iter()
            .enumerate()
            .map(|(i, c)| c * (2.0 * PI * (i + 1) as f64 * x).sin())
            .sum();
        [
            0.5 * (alpha.eval(x) - alpha.eval(1.0 - x) - s),
            0.0,
            0.0,
            0.0,
        ]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbarzumyanReport {
    /// `None` when the hypothesis κ(0) = κ(1) is not available
    pub is_uniform: Option<bool>,
    pub psi0_est: f64,
    pub psi1_est: f64,
    pub max_deviation: f64,
    /// root-mean-square residual of the two-parameter fit
    pub fit_residual: f64,
    pub tolerance: f64,
}

/// Fit `λₙ − (πn)⁴ ≈ 2(πn)²ψ₀ + ψ₁` over the supplied `(n, λₙ)` pairs.
pub fn ambarzumyan_check(
    spectrum: &[(usize, f64)],
    kappa_match: bool,
) -> Result<AmbarzumyanReport> {
    if spectrum.len() < 3 {
        return Err(Error::InvalidInput(
            "at least three eigenvalues are needed for the fit".into(),
        ));
    }
    let rows: Vec<(f64, f64)> = spectrum
        .iter()
        .map(|&(n, l)| {
            let k = PI * n as f64;
            (2.0 * k * k, l - k.powi(4))
        })
        .collect();
    let m = rows.len() as f64;
    let (sx, sy) = rows.iter().fold((0.0, 0.0), |(a, b), r| (a + r.0, b + r.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = rows.iter().map(|r| (r.0 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.0 - mx) * (r.1 - my)).sum();
    let psi0_est = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let psi1_est = my - psi0_est * mx;
    let fit_residual = (rows
        .iter()
        .map(|r| (r.1 - psi0_est * r.0 - psi1_est).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    let max_deviation = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let n_max = spectrum.iter().map(|s| s.0).max().unwrap_or(1);
    let tolerance = 1e-6 * (PI * n_max as f64).powi(2);
    let is_uniform = kappa_match.then(|| psi0_est.abs() < tolerance && max_deviation < tolerance);
    Ok(AmbarzumyanReport {
        is_uniform,
        psi0_est,
        psi1_est,
        max_deviation,
        fit_residual,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sup_diff(f: &Function1D, g: &Function1D) -> f64 {
        (0..=200)
            .map(|k| k as f64 / 200.0)
            .map(|x| (f.eval(x) - g.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn trivial_recoveries() {
        let z = Function1D::zero();
        let r = recover_beta(&z, &[0.0; 5], 5).unwrap();
        assert!(sup_diff(&r.recovered, &z) == 0.0);
        let r = recover_alpha(&z, &[0.0; 5], 5).unwrap();
        assert!(sup_diff(&r.recovered, &z) == 0.0);
        assert!(recover_beta(&z, &[0.0; 2], 3).is_err());
        assert!(recover_beta(&z, &[f64::NAN], 1).is_err());
    }

    #[test]
    fn single_mode_recoveries() {
        let z = Function1D::zero();
        let p3 = PI.powi(3);
        let r = recover_beta(&z, &[-p3, 0.0, 0.0], 3).unwrap();
        assert!(sup_diff(&r.recovered, &Function1D::sin_mode(1, 1.0)) < 1e-13);
        let r = recover_beta(&z, &[0.0, 8.0 * p3, 0.0], 3).unwrap();
        assert!(sup_diff(&r.recovered, &Function1D::sin_mode(2, -1.0)) < 1e-13);
        let r = recover_alpha(&z, &[p3], 1).unwrap();
        assert!(sup_diff(&r.recovered, &Function1D::sin_mode(1, 1.0)) < 1e-13);
    }

    #[test]
    fn round_trip_and_oddness() {
        let alpha = Function1D::fourier(0.3, vec![0.2], vec![0.1, -0.4]);
        let beta = Function1D::fourier(0.0, vec![], vec![0.5, 0.0, 0.25, -0.1]);
        let d = forward_derivatives(&alpha, &beta, 6);
        let r = recover_beta(&alpha, &d, 6).unwrap();
        assert!(sup_diff(&r.recovered, &beta) < 1e-9);
        assert!(r.residual_norm < 1e-9);
        for &x in &[0.1, 0.3, 0.45] {
            assert!((r.recovered.eval(x) + r.recovered.eval(1.0 - x)).abs() < 1e-13);
        }
        // α recovered up to its odd part
        let r = recover_alpha(&beta, &d, 6).unwrap();
        assert!(
            sup_diff(
                &r.recovered,
                &Function1D::fourier(0.0, vec![], vec![0.1, -0.4])
            ) < 1e-9
        );
    }

    #[test]
    fn verbatim_reconstruction_halves_the_derivative_term() {
        let z = Function1D::zero();
        let v = recover_beta_verbatim(&z, &[-PI.powi(3)], 1).unwrap();
        assert!(sup_diff(&v, &Function1D::sin_mode(1, 0.5)) < 1e-13);
    }

    #[test]
    fn ambarzumyan_uniform_and_not() {
        let exact: Vec<(usize, f64)> = (10..=20).map(|n| (n, (PI * n as f64).powi(4))).collect();
        let r = ambarzumyan_check(&exact, true).unwrap();
        assert_eq!(r.is_uniform, Some(true));
        assert!(r.psi0_est.abs() < 1e-6);
        assert_eq!(ambarzumyan_check(&exact, false).unwrap().is_uniform, None);
        let shifted: Vec<(usize, f64)> = (10..=20)
            .map(|n| {
                (
                    n,
                    (PI * n as f64).powi(4) + 4.0 * (PI * n as f64).powi(2) + 0.3,
                )
            })
            .collect();
        let r = ambarzumyan_check(&shifted, true).unwrap();
        assert_eq!(r.is_uniform, Some(false));
        assert!((r.psi0_est - 2.0).abs() < 1e-8 && (r.psi1_est - 0.3).abs() < 1e-5);
        assert!(ambarzumyan_check(&exact[..2], true).is_err());
    }
}

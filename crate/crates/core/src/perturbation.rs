//! First-order perturbation of the pinned beam family `(1/b^ε)(c_ε a^ε u'')'' + εQu`.

use crate::coefficients::{
    build_beam, fourier_coefficients, normalize_beam, BeamCoefficients, Function1D,
};
use crate::determinant::{fourth_root, BeamDet, BoundaryCondition};
use crate::error::{Error, Result};
use crate::quad;
use crate::spectrum::{local_eigenvalue, SpectrumOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// `c_ε = (∫₀¹ (b/a)^{ε/4} dx)⁴` with `b(0) = 1`.
pub fn c_eps(alpha: &Function1D, beta: &Function1D, eps: f64) -> Result<f64> {
    let beam = build_beam(alpha.clone(), beta.clone(), Function1D::zero(), 1.0)?;
    let m = quad::integrate_panels(
        |x| (eps * (beam.int_beta(x) - beam.int_alpha(x))).exp(),
        0.0,
        1.0,
        16,
    );
    Ok(m.powi(4))
}

/// The beam with coefficients `(c_ε a^ε, b^ε, εQ)`, written as a normalized beam.
pub fn eps_beam(
    alpha: &Function1D,
    beta: &Function1D,
    q: &Function1D,
    b0: f64,
    eps: f64,
) -> Result<BeamCoefficients> {
    let beam = build_beam(
        alpha.scaled(eps),
        beta.scaled(eps),
        q.scaled(eps),
        b0.powf(eps),
    )?;
    Ok(normalize_beam(&beam))
}

/// The kernel `g(x, λ)` of the first-order determinant.
pub fn g_kernel(x: f64, lambda: Complex64) -> Complex64 {
    let z = fourth_root(lambda);
    if z.norm() < 1.0 {
        return g_series(x, lambda);
    }
    let w = z * (1.0 - 2.0 * x);
    ((z.cosh() - w.cosh()) * z.sin() + (z.cos() - w.cos()) * z.sinh()) / (4.0 * z)
}

/// Power series of `g` in λ; with `c_k = (1 − w^{2k})/(2k)!`, `w = 1 − 2x`, the coefficient of
/// `λ^j` is `Σ_{k+m=2j, k≥1} (−1)^k c_k / (2(2m+1)!)`.
fn g_series(x: f64, lambda: Complex64) -> Complex64 {
    let w2 = (1.0 - 2.0 * x).powi(2);
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = lambda;
    for j in 1..=8 {
        let mut coeff = 0.0;
        for k in 1..=2 * j {
            let m = 2 * j - k;
            let c_k = (1.0 - w2.powi(k as i32)) / fact(2 * k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeff += sign * c_k / (2.0 * fact(2 * m + 1));
        }
        sum += coeff * pow;
        pow *= lambda;
    }
    sum
}

/// The coefficient data `α₁`, `β₁`, `γ₁ = α₁ + β₁/λ` of the first-order term.
#[derive(Clone, Debug)]
pub struct PerturbationData {
    beam: BeamCoefficients,
    /// `∫₀¹∫₀ˣ(β − α)`
    j: f64,
}

impl PerturbationData {
    pub fn new(alpha: &Function1D, beta: &Function1D, q: &Function1D, b0: f64) -> Result<Self> {
        let beam = build_beam(alpha.clone(), beta.clone(), q.clone(), b0)?;
        let j = quad::integrate_panels(|x| beam.int_beta(x) - beam.int_alpha(x), 0.0, 1.0, 16);
        Ok(PerturbationData { beam, j })
    }

    pub fn alpha1(&self, x: f64) -> f64 {
        -self.beam.b0.ln() - 4.0 * self.beam.int_alpha(x) - 4.0 * self.j
    }

    pub fn beta1(&self, x: f64, lambda: Complex64) -> Complex64 {
        lambda * (4.0 * self.beam.int_beta(x) + self.beam.b0.ln()) - self.beam.q.eval(x)
    }

    pub fn gamma1(&self, x: f64, lambda: Complex64) -> Complex64 {
        self.alpha1(x) + self.beta1(x, lambda) / lambda
    }

    /// `D₁(λ) = ∫₀¹ γ₁(x, λ) g(x, λ) dx`.
    pub fn d1(&self, lambda: Complex64) -> Result<Complex64> {
        if lambda.norm() == 0.0 {
            return Err(Error::InvalidInput(
                "D1 is evaluated away from lambda = 0".into(),
            ));
        }
        let panels = (fourth_root(lambda).norm().ceil() as usize).max(16);
        Ok(quad::integrate_panels(
            |x| self.gamma1(x, lambda) * g_kernel(x, lambda),
            0.0,
            1.0,
            panels,
        ))
    }
}

/// `D₁(λ)` for the family built from `(α, β, Q, b0)`.
pub fn d1(
    lambda: Complex64,
    alpha: &Function1D,
    beta: &Function1D,
    q: &Function1D,
    b0: f64,
) -> Result<Complex64> {
    PerturbationData::new(alpha, beta, q, b0)?.d1(lambda)
}

/// Fourier data entering the first-order formulas at index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FirstOrderData {
    pub alpha_sn: f64,
    pub beta_sn: f64,
    pub q_0: f64,
    pub q_cn: f64,
}

impl FirstOrderData {
    pub fn from_functions(alpha: &Function1D, beta: &Function1D, q: &Function1D, n: usize) -> Self {
        let (fa, fb, fq) = (
            fourier_coefficients(alpha, n),
            fourier_coefficients(beta, n),
            fourier_coefficients(q, n),
        );
        FirstOrderData {
            alpha_sn: fa.s(n),
            beta_sn: fb.s(n),
            q_0: fq.f_hat_0,
            q_cn: fq.c(n),
        }
    }
}

/// `D₁((πn)⁴)` in closed form.
pub fn d1_closed_pin4(n: usize, data: FirstOrderData) -> f64 {
    let k = PI * n as f64;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * (k).sinh() / (2.0 * k * k)
        * (data.alpha_sn - data.beta_sn + (data.q_0 - data.q_cn) / (2.0 * k.powi(3)))
}

/// `((πn)⁴, λₙ'(0))` with `λₙ'(0) = 2(πn)³(α̂sₙ − β̂sₙ) + Q̂₀ − Q̂cₙ`.
pub fn lambda_first_order(n: usize, data: FirstOrderData) -> (f64, f64) {
    let k = PI * n as f64;
    (
        k.powi(4),
        2.0 * k.powi(3) * (data.alpha_sn - data.beta_sn) + data.q_0 - data.q_cn,
    )
}

/// `λₙ(ε)` of the family, pinned at both ends.
pub fn eigenvalue_eps(
    alpha: &Function1D,
    beta: &Function1D,
    q: &Function1D,
    b0: f64,
    n: usize,
    eps: f64,
) -> Result<f64> {
    let beam = eps_beam(alpha, beta, q, b0, eps)?;
    let opts = SpectrumOptions::for_beam(&beam, BoundaryCondition::PinnedPinned);
    let det = BeamDet {
        beam,
        bc: BoundaryCondition::PinnedPinned,
    };
    let e = local_eigenvalue(&det, &opts, n)?;
    if !e.certified {
        return Err(Error::RootSearch(format!(
            "eigenvalue {n} at eps = {eps} not certified"
        )));
    }
    Ok(e.lambda.re)
}

/// Central difference `(λₙ(ε) − λₙ(−ε))/(2ε)`.
pub fn fd_derivative_check(
    alpha: &Function1D,
    beta: &Function1D,
    q: &Function1D,
    b0: f64,
    n: usize,
    eps: f64,
) -> Result<f64> {
    if !(1e-5..=1e-2).contains(&eps) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in [1e-5, 1e-2], got {eps}"
        )));
    }
    let pair: Vec<f64> = [eps, -eps]
        .par_iter()
        .map(|&e| eigenvalue_eps(alpha, beta, q, b0, n, e))
        .collect::<Result<_>>()?;
    Ok((pair[0] - pair[1]) / (2.0 * eps))
}

/// Errors of the central difference against `exact` at each ε, and the observed orders
/// `log₂(e_k/e_{k+1})` for successive halvings.
pub fn richardson_orders(
    alpha: &Function1D,
    beta: &Function1D,
    q: &Function1D,
    b0: f64,
    n: usize,
    eps: &[f64],
    exact: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let errs: Vec<f64> = eps
        .par_iter()
        .map(|&e| Ok((fd_derivative_check(alpha, beta, q, b0, n, e)? - exact).abs()))
        .collect::<Result<_>>()?;
    let orders = errs
        .windows(2)
        .zip(eps.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok((errs, orders))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_eps_values() {
        let z = Function1D::zero();
        assert!((c_eps(&z, &Function1D::sin_mode(1, 1.0), 0.0).unwrap() - 1.0).abs() < 1e-15);
        let c: f64 = 0.8;
        let eps = 0.3;
        let expect = (((eps * c).exp() - 1.0) / (eps * c)).powi(4);
        assert!((c_eps(&z, &Function1D::constant(c), eps).unwrap() - expect).abs() < 1e-13);
        // d/dε at 0 of the closed form is 4·c/2 = 2c
        let h = 1e-4;
        let fd = (c_eps(&z, &Function1D::constant(c), h).unwrap()
            - c_eps(&z, &Function1D::constant(c), -h).unwrap())
            / (2.0 * h);
        assert!((fd - 2.0 * c).abs() < 1e-7);
    }

    #[test]
    fn kernel_properties() {
        for &l in &[
            Complex64::new(50.0, 0.0),
            Complex64::new(-30.0, 200.0),
            Complex64::new(1e-14, 0.0),
        ] {
            assert!(g_kernel(0.0, l).norm() < 1e-12 * (1.0 + g_kernel(0.3, l).norm()));
            assert!(g_kernel(1.0, l).norm() < 1e-12 * (1.0 + g_kernel(0.3, l).norm()));
            for &x in &[0.1, 0.37] {
                assert!(
                    (g_kernel(x, l) - g_kernel(1.0 - x, l)).norm()
                        < 1e-12 * g_kernel(x, l).norm().max(1e-300)
                );
            }
        }
        // the series branch joins the closed form, and starts with −x²(1−x)²λ/3
        for &x in &[0.2, 0.5] {
            for &l in &[
                Complex64::new(0.99f64.powi(4), 0.0),
                Complex64::new(0.0, 0.99f64.powi(4)),
            ] {
                let w = fourth_root(l) * (1.0 - 2.0 * x);
                let z = fourth_root(l);
                let closed =
                    ((z.cosh() - w.cosh()) * z.sin() + (z.cos() - w.cos()) * z.sinh()) / (4.0 * z);
                assert!((g_series(x, l) - closed).norm() < 1e-14);
            }
        }
        let l = Complex64::new(1e-6, 0.0);
        assert!((g_kernel(0.3, l) / l + 0.21f64.powi(2) / 3.0).norm() < 1e-9);
    }

    #[test]
    fn d1_zero_for_trivial_family() {
        let z = Function1D::zero();
        assert!(
            d1(Complex64::new(40.0, 3.0), &z, &z, &z, 1.0)
                .unwrap()
                .norm()
                < 1e-14
        );
        assert!(d1(Complex64::new(0.0, 0.0), &z, &z, &z, 1.0).is_err());
    }

    #[test]
    fn d1_matches_closed_form_at_free_eigenvalues() {
        let al = Function1D::fourier(0.1, vec![0.2, -0.1], vec![0.3, 0.05, -0.2]);
        let be = Function1D::fourier(-0.3, vec![0.1], vec![-0.15, 0.25]);
        let q = Function1D::fourier(0.4, vec![0.5, 0.2], vec![0.1]);
        let data = PerturbationData::new(&al, &be, &q, 1.0).unwrap();
        for n in 1..=10 {
            let k = PI * n as f64;
            let lhs = data.d1(Complex64::new(k.powi(4), 0.0)).unwrap();
            let rhs = d1_closed_pin4(n, FirstOrderData::from_functions(&al, &be, &q, n));
            assert!(
                (lhs.re - rhs).abs() < 1e-9 * rhs.abs().max(1e-3 * k.sinh() / (k * k)),
                "{n}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn d1_cosine_potential_value() {
        let z = Function1D::zero();
        let v = d1(
            Complex64::new(PI.powi(4), 0.0),
            &z,
            &z,
            &Function1D::cos_mode(1, 1.0),
            1.0,
        )
        .unwrap();
        assert!((v.re + PI.sinh() / (8.0 * PI.powi(5))).abs() < 1e-13);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(d1_closed_pin4(3, FirstOrderData::default()), 0.0);
        let d = FirstOrderData {
            alpha_sn: 0.5,
            ..Default::default()
        };
        assert!((d1_closed_pin4(1, d) - PI.sinh() / (4.0 * PI * PI)).abs() < 1e-14);
        assert!(d1_closed_pin4(2, d) < 0.0);
        let (l0, lp) = lambda_first_order(
            1,
            FirstOrderData::from_functions(
                &Function1D::zero(),
                &Function1D::sin_mode(1, 1.0),
                &Function1D::zero(),
                1,
            ),
        );
        assert!((l0 - PI.powi(4)).abs() < 1e-12 && (lp + PI.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_matches_first_order() {
        let z = Function1D::zero();
        let s = Function1D::sin_mode(1, 1.0);
        assert!(fd_derivative_check(&z, &z, &z, 1.0, 2, 1e-3).unwrap().abs() < 1e-8);
        let fd = fd_derivative_check(&z, &s, &z, 1.0, 1, 1e-3).unwrap();
        assert!((fd + PI.powi(3)).abs() < 1e-3 * PI.powi(3), "{fd}");
        let fd = fd_derivative_check(&z, &z, &Function1D::cos_mode(1, 1.0), 1.0, 1, 1e-3).unwrap();
        assert!((fd + 0.5).abs() < 1e-3, "{fd}");
        assert!(fd_derivative_check(&z, &s, &z, 1.0, 1, 0.1).is_err());
    }
}

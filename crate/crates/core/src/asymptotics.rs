//! Asymptotic constants of beam and fourth-order spectra and the resulting predictions.

use crate::coefficients::{BeamCoefficients, Function1D};
use crate::determinant::{BoundaryCondition, FourthOrderOperator};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad;
use crate::transform::arc_variable;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const NORMALIZATION_TOL: f64 = 1e-8;
const PANELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Psi1Route {
    Direct,
    ViaTransform,
}

#[derive(Debug, Clone)]
pub struct AsymptoticConstants {
    pub psi0: f64,
    pub psi1: f64,
    /// `gamma[n-1]` is γₙ
    pub gamma: Vec<f64>,
    pub route: Psi1Route,
    pub a_fun: Function1D,
    pub b_fun: Function1D,
    pub q0: f64,
}

impl AsymptoticConstants {
    pub fn gamma(&self, n: usize) -> f64 {
        self.gamma.get(n - 1).copied().unwrap_or(f64::NAN)
    }

    /// `(πn)⁴ + 2(πn)²ψ₀ + ψ₁ − γₙ`.
    pub fn predict(&self, n: usize) -> f64 {
        let k = PI * n as f64;
        k.powi(4) + 2.0 * k * k * self.psi0 + self.psi1 - self.gamma(n)
    }
}

fn require_normalized(beam: &BeamCoefficients) -> Result<()> {
    let m = beam.xi_integral();
    if (m - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(m));
    }
    Ok(())
}

fn require_order(beam: &BeamCoefficients, order: usize) -> Result<()> {
    let available = beam.order();
    if available < order {
        return Err(Error::Smoothness {
            requested: order,
            available,
        });
    }
    Ok(())
}

/// `ψ₀ = κ(1) − κ(0) + ∫ϰ/ξ dx` without the normalization check.
pub fn psi0_unchecked(beam: &BeamCoefficients) -> f64 {
    beam.kappa(1.0) - beam.kappa(0.0)
        + quad::integrate_panels(|x| beam.varkappa(x) / beam.xi(x), 0.0, 1.0, PANELS)
}

pub fn psi0(beam: &BeamCoefficients) -> Result<f64> {
    require_normalized(beam)?;
    Ok(psi0_unchecked(beam))
}

/// `𝔄(x)`: the boundary part of ψ₁.
pub fn a_term(beam: &BeamCoefficients, x: f64) -> f64 {
    let (al, s, em, ep, e) = (
        beam.alpha_jet(x),
        beam.s_jet(x),
        beam.eps_minus_jet(x),
        beam.eps_plus_jet(x),
        beam.eps_jet(x),
    );
    let xi = beam.xi(x);
    let (s0, em0) = (s.d[0], em.d[0]);
    let inner =
        2.0 * s0.powi(3) / 3.0 - em0.powi(3) / 2.0 - 2.0 * e.d[0] * ep.d[0] - (s0 - em0) * em0 * s0
            + (s.d[1] - em.d[1]) * s0
            - (al * em).d[1]
            - em.d[2] / 4.0;
    inner / xi.powi(3)
}

/// `𝔅(x)`: the bulk part of ψ₁, integrated against ξ.
pub fn b_term(beam: &BeamCoefficients, x: f64) -> f64 {
    let (em, ep, e) = (beam.eps_minus_jet(x), beam.eps_plus_jet(x), beam.eps_jet(x));
    let xi = beam.xi(x);
    let u = em.d[1] - em.d[0] * em.d[0] - 2.0 * beam.varkappa(x);
    let v = ep.d[1] - 2.0 * e.d[0];
    (u * u - 8.0 * v * v) / (8.0 * xi.powi(4))
}

/// `Q₀ = ∫Qξ dx`.
pub fn q0(beam: &BeamCoefficients) -> f64 {
    quad::integrate_panels(|x| beam.q.eval(x) * beam.xi(x), 0.0, 1.0, PANELS)
}

/// `ψ₁ = 𝔄(1) − 𝔄(0) + ∫𝔅ξ + ψ₀²/2 + Q₀`.
pub fn psi1_direct(beam: &BeamCoefficients) -> Result<f64> {
    require_normalized(beam)?;
    require_order(beam, 3)?;
    let p0 = psi0_unchecked(beam);
    let bulk = quad::integrate_panels(|x| b_term(beam, x) * beam.xi(x), 0.0, 1.0, PANELS);
    Ok(a_term(beam, 1.0) - a_term(beam, 0.0) + bulk + 0.5 * p0 * p0 + q0(beam))
}

/// `∫(V − (p² − p̂₀²)/2) dt` for a general operator.
pub fn psi1_h(op: &FourthOrderOperator) -> Result<Complex64> {
    let v = op.v.as_ref().ok_or(Error::Smoothness {
        requested: 2,
        available: op.p.smoothness_order(),
    })?;
    let p0 = op.p_hat_0;
    Ok(quad::integrate_panels(
        |t| {
            let p = op.p.eval_c(t);
            v.eval_c(t) - 0.5 * (p * p - p0 * p0)
        },
        0.0,
        1.0,
        PANELS,
    ))
}

/// ψ₁ from the transformed operator; the operator must be real.
pub fn psi1_via_transform(op: &FourthOrderOperator) -> Result<f64> {
    if !op.is_real() {
        return Err(Error::NonReal("operator".into()));
    }
    Ok(psi1_h(op)?.re)
}

/// `γₙ = ∫(Qξ + (α‴ − β‴)/(4ξ³)) cos(2πn t(x)) dx`, integrated in `x`.
pub fn gamma_n(beam: &BeamCoefficients, n: usize) -> Result<f64> {
    Ok(gamma_range(beam, n, n)?[0])
}

fn gamma_integrand(beam: &BeamCoefficients, x: f64) -> f64 {
    let d3 = beam.alpha_jet(x).d[3] - beam.beta_jet(x).d[3];
    let xi = beam.xi(x);
    beam.q.eval(x) * xi + d3 / (4.0 * xi.powi(3))
}

fn gamma_range(beam: &BeamCoefficients, from: usize, to: usize) -> Result<Vec<f64>> {
    require_normalized(beam)?;
    require_order(beam, 3)?;
    let data = arc_variable(beam)?;
    let xi_max = (0..=256)
        .map(|k| beam.xi(k as f64 / 256.0))
        .fold(0.0, f64::max);
    Ok((from..=to)
        .map(|n| {
            let w = 2.0 * PI * n as f64;
            let panels = ((8 * n) as f64 * xi_max).ceil() as usize;
            quad::integrate_panels(
                |x| gamma_integrand(beam, x) * (w * data.t_of_x(x)).cos(),
                0.0,
                1.0,
                panels.max(PANELS),
            )
        })
        .collect())
}

/// γₙ as the cosine coefficient, in `t`, of `Q + (a/(4b))(α‴ − β‴)`; a cross-check of [`gamma_n`].
pub fn gamma_n_via_t(beam: &BeamCoefficients, n: usize) -> Result<f64> {
    require_normalized(beam)?;
    require_order(beam, 3)?;
    let data = arc_variable(beam)?;
    let f = |t: f64| {
        let x = data.x_of_t(t);
        let d3 = beam.alpha_jet(x).d[3] - beam.beta_jet(x).d[3];
        beam.q.eval(x) + beam.a(x) / (4.0 * beam.b(x)) * d3
    };
    Ok(crate::coefficients::oscillatory_integral(&f, n, true))
}

/// All constants up to `γ_{n_max}`.
pub fn constants(
    beam: &BeamCoefficients,
    n_max: usize,
    route: Psi1Route,
) -> Result<AsymptoticConstants> {
    require_normalized(beam)?;
    require_order(beam, 3)?;
    let psi0 = psi0_unchecked(beam);
    let psi1 = match route {
        Psi1Route::Direct => psi1_direct(beam)?,
        Psi1Route::ViaTransform => {
            psi1_via_transform(&crate::transform::gottlieb_transform(beam)?)?
        }
    };
    let gamma = if n_max == 0 {
        Vec::new()
    } else {
        gamma_range(beam, 1, n_max)?
    };
    let (ba, bb) = (beam.clone(), beam.clone());
    Ok(AsymptoticConstants {
        psi0,
        psi1,
        gamma,
        route,
        a_fun: Function1D::from_fn(0, move |x| [a_term(&ba, x), 0.0, 0.0, 0.0]),
        b_fun: Function1D::from_fn(0, move |x| [b_term(&bb, x), 0.0, 0.0, 0.0]),
        q0: q0(beam),
    })
}

/// `(πn)⁴ + 2(πn)²ψ₀ + ψ₁ − γₙ`.
pub fn predict_eb(beam: &BeamCoefficients, n: usize) -> Result<f64> {
    let k = PI * n as f64;
    Ok(k.powi(4) + 2.0 * k * k * psi0(beam)? + psi1_direct(beam)? - gamma_n(beam, n)?)
}

/// `(πn)⁴ − 2(πn)²p̂₀ − ½∫(p² − p̂₀²) + V̂₀ − V̂cₙ`.
pub fn predict_h(op: &FourthOrderOperator, n: usize) -> Result<Complex64> {
    let v = op.v.as_ref().ok_or(Error::Smoothness {
        requested: 2,
        available: op.p.smoothness_order(),
    })?;
    let k = PI * n as f64;
    let w = 2.0 * PI * n as f64;
    let v_cn = quad::integrate_panels(
        |t| v.eval_c(t) * (w * t).cos(),
        0.0,
        1.0,
        (8 * n).max(PANELS),
    );
    Ok(k.powi(4) - 2.0 * k * k * op.p_hat_0 + psi1_h(op)? - v_cn)
}

/// Two-term prediction `aₙ⁴ + 2aₙ²ψ₀` for the clamped-left conditions.
pub fn predict_eb_bc(beam: &BeamCoefficients, n: usize, bc: BoundaryCondition) -> Result<f64> {
    if matches!(
        bc,
        BoundaryCondition::Ebdc | BoundaryCondition::PinnedPinned
    ) {
        return Err(Error::InvalidInput(format!(
            "{bc} has the full prediction; use predict_eb"
        )));
    }
    let a = PI * (n as f64 + bc.offset());
    Ok(a.powi(4) + 2.0 * a * a * psi0(beam)?)
}

/// 𝔄 and 𝔅 written through σ and φ in the variable `t`:
/// `𝔄 = (2/3)σ³ − 2φσ + (σ² − φ)'/2`, `𝔅 = (σ² − φ)²/2 − (σ' − φ)²`.
pub fn a_b_terms_in_t(beam: &BeamCoefficients, x: f64) -> (f64, f64) {
    let xi: Jet = beam.xi_jet(x);
    let sigma = beam.s_jet(x) / xi;
    let em = beam.eps_minus_jet(x) / xi;
    let phi = em.dx() / xi.scale(2.0) + beam.eps_jet(x) / (xi * xi);
    let w = sigma * sigma - phi;
    let (s0, f0) = (sigma.d[0], phi.d[0]);
    let a = 2.0 / 3.0 * s0.powi(3) - 2.0 * f0 * s0 + 0.5 * w.dt(xi).d[0];
    let st = sigma.dt(xi).d[0];
    let b = 0.5 * w.d[0] * w.d[0] - (st - f0).powi(2);
    (a, b)
}

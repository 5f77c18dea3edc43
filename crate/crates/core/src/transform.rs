//! Liouville-type change of variables taking a beam `(a, b, Q)` to fourth-order data `(p, q)`.
//!
//! With `t(x) = ∫₀ˣ ξ`, every t-derivative is taken as `(1/ξ)·d/dx` on Taylor jets in `x`, so
//! the analytic derivatives of α and β are used throughout.

use crate::coefficients::{BeamCoefficients, Function1D};
use crate::determinant::FourthOrderOperator;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad::{self, CumulativeIntegral};
use num_complex::Complex64;
use std::sync::Arc;

/// Number of intervals of the inverse-map table.
const INVERSE_NODES: usize = 4096;
const ARC_PANELS: usize = 4096;

/// Map data for the change of variable. `sigma`, `phi` and `upsilon` are functions of `t`;
/// `rho` is a function of `x`.
#[derive(Clone)]
pub struct TransformData {
    beam: BeamCoefficients,
    arc: Arc<CumulativeIntegral>,
    x_nodes: Arc<Vec<f64>>,
    t_nodes: Arc<Vec<f64>>,
    pub rho: Function1D,
    pub sigma: Function1D,
    pub phi: Function1D,
    pub upsilon: Function1D,
}

impl std::fmt::Debug for TransformData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformData")
            .field("beam", &self.beam)
            .finish_non_exhaustive()
    }
}

/// Jets in `x` of σ, σ_t, σ_tt, σ_ttt, φ, φ_t, φ_tt at one point.
#[derive(Debug, Clone, Copy)]
pub struct LocalData {
    pub xi: Jet,
    pub sigma: [Jet; 4],
    pub phi: [Jet; 3],
    pub upsilon: f64,
}

impl LocalData {
    pub fn at(beam: &BeamCoefficients, x: f64) -> Self {
        let xi = beam.xi_jet(x);
        let s0 = beam.s_jet(x) / xi;
        let s1 = s0.dt(xi);
        let s2 = s1.dt(xi);
        let s3 = s2.dt(xi);
        let em = beam.eps_minus_jet(x) / xi;
        let f0 = em.dx() / xi.scale(2.0) + beam.eps_jet(x) / (xi * xi);
        let f1 = f0.dt(xi);
        let f2 = f1.dt(xi);
        LocalData {
            xi,
            sigma: [s0, s1, s2, s3],
            phi: [f0, f1, f2],
            upsilon: beam.q.eval(x),
        }
    }

    /// `p = φ − σ² − 2σ'` with its first two t-derivatives.
    pub fn p(&self) -> [f64; 3] {
        let [s0, s1, s2, s3] = self.sigma.map(|j| j.d[0]);
        let [f0, f1, f2] = self.phi.map(|j| j.d[0]);
        [
            f0 - s0 * s0 - 2.0 * s1,
            f1 - 2.0 * s0 * s1 - 2.0 * s2,
            f2 - 2.0 * s1 * s1 - 2.0 * s0 * s2 - 2.0 * s3,
        ]
    }

    /// `q = −σ''' + σ'² + 4σ²σ' + σ⁴ − 2(φσ)' − 2φσ² + υ`.
    pub fn q(&self) -> f64 {
        let [s0, s1, _, s3] = self.sigma.map(|j| j.d[0]);
        let [f0, f1, _] = self.phi.map(|j| j.d[0]);
        -s3 + s1 * s1 + 4.0 * s0 * s0 * s1 + s0.powi(4)
            - 2.0 * (f1 * s0 + f0 * s1)
            - 2.0 * f0 * s0 * s0
            + self.upsilon
    }

    pub fn v(&self) -> f64 {
        self.q() - 0.5 * self.p()[2]
    }
}

impl TransformData {
    pub fn beam(&self) -> &BeamCoefficients {
        &self.beam
    }

    pub fn t_of_x(&self, x: f64) -> f64 {
        self.arc.eval(&|s| self.beam.xi(s), x)
    }

    /// Inverse map: cubic Hermite on the node table with exact slopes `1/ξ`, then one Newton step.
    pub fn x_of_t(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let (tn, xn) = (&self.t_nodes, &self.x_nodes);
        let i = match tn.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return xn[i],
            Err(i) => i.clamp(1, tn.len() - 1) - 1,
        };
        let h = tn[i + 1] - tn[i];
        let u = (t - tn[i]) / h;
        let (m0, m1) = (1.0 / self.beam.xi(xn[i]), 1.0 / self.beam.xi(xn[i + 1]));
        let (u2, u3) = (u * u, u * u * u);
        let x = (2.0 * u3 - 3.0 * u2 + 1.0) * xn[i]
            + (u3 - 2.0 * u2 + u) * h * m0
            + (-2.0 * u3 + 3.0 * u2) * xn[i + 1]
            + (u3 - u2) * h * m1;
        let x = x.clamp(xn[i], xn[i + 1]);
        (x - (self.t_of_x(x) - t) / self.beam.xi(x)).clamp(0.0, 1.0)
    }

    pub fn local(&self, t: f64) -> LocalData {
        LocalData::at(&self.beam, self.x_of_t(t))
    }
}

/// Build the change of variable `t(x) = ∫₀ˣ ξ` for a normalized beam.
pub fn arc_variable(beam: &BeamCoefficients) -> Result<TransformData> {
    let b = beam.clone();
    let arc = Arc::new(CumulativeIntegral::new(&|x| b.xi(x), ARC_PANELS));
    if (arc.total() - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(arc.total()));
    }
    let x_nodes: Vec<f64> = (0..=INVERSE_NODES)
        .map(|k| k as f64 / INVERSE_NODES as f64)
        .collect();
    let t_nodes: Vec<f64> = x_nodes.iter().map(|&x| arc.eval(&|s| b.xi(s), x)).collect();
    let mut data = TransformData {
        beam: beam.clone(),
        arc,
        x_nodes: Arc::new(x_nodes),
        t_nodes: Arc::new(t_nodes),
        rho: Function1D::zero(),
        sigma: Function1D::zero(),
        phi: Function1D::zero(),
        upsilon: Function1D::zero(),
    };
    let order = beam.order();
    let d = data.clone();
    data.rho = Function1D::from_fn((order + 1).min(3), move |x| {
        // ln ρ = (∫α)/2 + 3(∫β)/2 + (3/8) ln b0
        let s = d.beam.s_jet(x);
        let l = Jet::new(
            [
                0.5 * d.beam.int_alpha(x) + 1.5 * d.beam.int_beta(x) + 0.375 * d.beam.b0.ln(),
                s.d[0],
                s.d[1],
                s.d[2],
            ],
            (s.order + 1).min(3),
        );
        l.exp().d
    });
    let d = data.clone();
    data.sigma = Function1D::from_fn(order, move |t| {
        let l = d.local(t);
        l.sigma.map(|j| j.d[0])
    });
    let d = data.clone();
    data.phi = Function1D::from_fn(order.saturating_sub(1), move |t| {
        let l = d.local(t);
        let [a, b, c] = l.phi.map(|j| j.d[0]);
        [a, b, c, f64::NAN]
    });
    let d = data.clone();
    data.upsilon = Function1D::from_fn(0, move |t| [d.beam.q.eval(d.x_of_t(t)), 0.0, 0.0, 0.0]);
    Ok(data)
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

/// `(p, q)` in the variable `t`, with `V = q − p''/2` and `p̂₀ = ∫p dt`.
pub fn gottlieb_transform(beam: &BeamCoefficients) -> Result<FourthOrderOperator> {
    require_order(beam, 3)?;
    let data = arc_variable(beam)?;
    let d = data.clone();
    let p = Function1D::from_fn(2, move |t| {
        let [a, b, c] = d.local(t).p();
        [a, b, c, f64::NAN]
    });
    let d = data.clone();
    let q = Function1D::from_fn(0, move |t| [d.local(t).q(), 0.0, 0.0, 0.0]);
    let d = data.clone();
    let v = Function1D::from_fn(0, move |t| [d.local(t).v(), 0.0, 0.0, 0.0]);
    // ∫p dt = ∫p(x) ξ(x) dx avoids the inverse map
    let p_hat_0 =
        quad::integrate_panels(|x| LocalData::at(beam, x).p()[0] * beam.xi(x), 0.0, 1.0, 64);
    Ok(FourthOrderOperator::with_parts(
        p,
        q,
        Some(v),
        Complex64::new(p_hat_0, 0.0),
    ))
}

/// Largest deviation of `p` from `−ϰ/ξ² − κ_t` on a 1000-point t-grid.
pub fn check_idp1(beam: &BeamCoefficients) -> Result<f64> {
    require_order(beam, 3)?;
    let data = arc_variable(beam)?;
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let t = k as f64 / 999.0;
        let x = data.x_of_t(t);
        let local = LocalData::at(beam, x);
        let xi = beam.xi_jet(x);
        let rhs = -beam.varkappa(x) / (xi.d[0] * xi.d[0]) - beam.kappa_jet(x).dt(xi).d[0];
        worst = worst.max((local.p()[0] - rhs).abs());
    }
    Ok(worst)
}

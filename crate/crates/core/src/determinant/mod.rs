//! Fundamental systems and characteristic determinants for `H = ∂⁴ + 2∂p∂ + q` and for
//! Euler-Bernoulli beams.
//!
//! Determinants are evaluated through the exterior square of the two-column solution that
//! satisfies the left boundary conditions. The 2×2 minors of that solution are integrated
//! directly, so a determinant of size `e^{|z|}` is never formed by cancellation of entries of
//! size `e^{2|z|}`. States are integrated in balanced coordinates `diag(1, s, s², s³)⁻¹ y` with
//! `s = max(1, |z|)`.

pub mod closed;

pub use closed::{
    char_det_delta_p, char_det_delta_p_with_derivative, char_det_delta_q,
    char_det_delta_q_with_derivative, char_det_free, char_det_free_with_derivative, fourth_root,
    FreeSolutions,
};

use crate::coefficients::{BeamCoefficients, Function1D};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::quad;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Largest |z| accepted by the integration-based evaluators.
pub const Z_CAP: f64 = 200.0;

/// The operator `y'''' + 2(p y')' + q y` on `[0, 1]` with `y = y'' = 0` at both ends.
#[derive(Clone, Debug)]
pub struct FourthOrderOperator {
    pub p: Function1D,
    pub q: Function1D,
    /// `V = q - p''/2`, when `p` is smooth enough
    pub v: Option<Function1D>,
    pub p_hat_0: Complex64,
}

impl FourthOrderOperator {
    pub fn new(p: Function1D, q: Function1D) -> Self {
        let p_hat_0 = quad::integrate_panels(|t| p.eval_c(t), 0.0, 1.0, 8);
        let v = (p.smoothness_order() >= 2).then(|| {
            let part = |pp: Function1D, qq: Function1D| {
                Function1D::from_fn(0, move |t| {
                    [
                        qq.eval(t) - 0.5 * pp.deriv(2, t).unwrap_or(f64::NAN),
                        0.0,
                        0.0,
                        0.0,
                    ]
                })
            };
            let re = part(p.real_part(), q.real_part());
            if p.is_real() && q.is_real() {
                re
            } else {
                Function1D::complex(re, part(p.imag_part(), q.imag_part()))
            }
        });
        FourthOrderOperator { p, q, v, p_hat_0 }
    }

    pub fn with_parts(
        p: Function1D,
        q: Function1D,
        v: Option<Function1D>,
        p_hat_0: Complex64,
    ) -> Self {
        FourthOrderOperator { p, q, v, p_hat_0 }
    }

    pub fn zero() -> Self {
        Self::new(Function1D::zero(), Function1D::zero())
    }

    pub fn is_real(&self) -> bool {
        self.p.is_real() && self.q.is_real()
    }

    pub fn v_at(&self, t: f64) -> Result<Complex64> {
        match &self.v {
            Some(v) => Ok(v.eval_c(t)),
            None => Err(Error::Smoothness {
                requested: 2,
                available: self.p.smoothness_order(),
            }),
        }
    }
}

/// Boundary conditions for beams; `H` always uses `y = y'' = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// `u = 0`, `u'' + 2(α+β)u' = 0` at both ends
    Ebdc,
    PinnedPinned,
    ClampedFree,
    ClampedSliding,
    ClampedPinned,
    ClampedClamped,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 6] = [
        BoundaryCondition::Ebdc,
        BoundaryCondition::PinnedPinned,
        BoundaryCondition::ClampedFree,
        BoundaryCondition::ClampedSliding,
        BoundaryCondition::ClampedPinned,
        BoundaryCondition::ClampedClamped,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Ebdc => "ebdc",
            BoundaryCondition::PinnedPinned => "pinned-pinned",
            BoundaryCondition::ClampedFree => "clamped-free",
            BoundaryCondition::ClampedSliding => "clamped-sliding",
            BoundaryCondition::ClampedPinned => "clamped-pinned",
            BoundaryCondition::ClampedClamped => "clamped-clamped",
        }
    }

    /// Offset ν with eigenvalue roots `z ≈ π(n + ν)` for the uniform beam.
    pub fn offset(&self) -> f64 {
        match self {
            BoundaryCondition::Ebdc | BoundaryCondition::PinnedPinned => 0.0,
            BoundaryCondition::ClampedFree => -0.5,
            BoundaryCondition::ClampedSliding => -0.25,
            BoundaryCondition::ClampedPinned => 0.25,
            BoundaryCondition::ClampedClamped => 0.5,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundaryCondition::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown boundary condition '{s}'")))
    }
}

/// Two columns spanning the left boundary subspace and two right boundary functionals.
#[derive(Debug, Clone, Copy)]
pub struct Boundary {
    pub k0: [[Complex64; 4]; 2],
    pub b1: [[Complex64; 4]; 2],
}

fn unit(i: usize) -> [Complex64; 4] {
    let mut e = [ZERO; 4];
    e[i] = ONE;
    e
}

/// A first-order system `u' = C(x, λ) u` whose only λ-dependence is the entry `C[3][0]`.
pub trait FirstOrderSystem: Sync {
    fn matrix(&self, x: f64, lambda: Complex64) -> Result<Mat4>;
    /// `∂C[3][0]/∂λ`
    fn dlambda(&self, x: f64) -> Result<Complex64>;
    fn boundary(&self) -> Boundary;
}

fn finite(c: Complex64, what: &str, x: f64) -> Result<Complex64> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(Error::NonFinite(format!("{what} at {x}")))
    }
}

/// `H` in the variables `(y, y', y'', y''' + 2py')`.
pub struct HSystem<'a> {
    pub op: &'a FourthOrderOperator,
}

impl FirstOrderSystem for HSystem<'_> {
    fn matrix(&self, t: f64, lambda: Complex64) -> Result<Mat4> {
        let p = finite(self.op.p.eval_c(t), "p", t)?;
        let q = finite(self.op.q.eval_c(t), "q", t)?;
        Ok([
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, -2.0 * p, ZERO, ONE],
            [lambda - q, ZERO, ZERO, ZERO],
        ])
    }
    fn dlambda(&self, _t: f64) -> Result<Complex64> {
        Ok(ONE)
    }
    fn boundary(&self) -> Boundary {
        Boundary {
            k0: [unit(1), unit(3)],
            b1: [unit(0), unit(2)],
        }
    }
}

/// The beam operator in the variables `(u, u', a u'', (a u'')')`.
pub struct EbSystem<'a> {
    pub beam: &'a BeamCoefficients,
    pub bc: BoundaryCondition,
}

impl FirstOrderSystem for EbSystem<'_> {
    fn matrix(&self, x: f64, lambda: Complex64) -> Result<Mat4> {
        let a = self.beam.a(x);
        let b = self.beam.b(x);
        let q = self.beam.q.eval(x);
        let inv_a = finite(Complex64::new(1.0 / a, 0.0), "1/a", x)?;
        let c41 = finite((lambda - q) * b, "(λ - Q) b", x)?;
        Ok([
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, inv_a, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [c41, ZERO, ZERO, ZERO],
        ])
    }
    fn dlambda(&self, x: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.beam.b(x), 0.0))
    }
    fn boundary(&self) -> Boundary {
        eb_boundary(self.beam, self.bc)
    }
}

/// Boundary data for the beam system. For the spring-restrained condition the right functional is
/// `a(1)·(u'' + 2(α+β)u')` written in the state variable `a u''`, so that it coincides with the
/// pinned functional when `α + β` vanishes at the ends.
pub fn eb_boundary(beam: &BeamCoefficients, bc: BoundaryCondition) -> Boundary {
    use BoundaryCondition::*;
    let clamped_left = [unit(2), unit(3)];
    match bc {
        Ebdc => {
            let e0 = beam.eps_plus(0.0);
            let e1 = beam.eps_plus(1.0);
            let a1 = beam.a(1.0);
            let left = [ZERO, ONE, Complex64::new(-2.0 * e0, 0.0), ZERO];
            let right = [ZERO, Complex64::new(2.0 * a1 * e1, 0.0), ONE, ZERO];
            Boundary {
                k0: [left, unit(3)],
                b1: [unit(0), right],
            }
        }
        PinnedPinned => Boundary {
            k0: [unit(1), unit(3)],
            b1: [unit(0), unit(2)],
        },
        ClampedFree => Boundary {
            k0: clamped_left,
            b1: [unit(2), unit(3)],
        },
        ClampedSliding => Boundary {
            k0: clamped_left,
            b1: [unit(1), unit(3)],
        },
        ClampedPinned => Boundary {
            k0: clamped_left,
            b1: [unit(0), unit(2)],
        },
        ClampedClamped => Boundary {
            k0: clamped_left,
            b1: [unit(0), unit(1)],
        },
    }
}

/// Determinant value with an overflow-safe scale: `D = value · exp(2·log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDet {
    pub value: Complex64,
    pub log_scale: f64,
}

impl ScaledDet {
    pub fn unscaled(&self) -> Complex64 {
        self.value * (2.0 * self.log_scale).exp()
    }
}

/// Determinant and its λ-derivative sharing one scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDetD {
    pub value: Complex64,
    pub derivative: Complex64,
    pub log_scale: f64,
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn balance(c: &Mat4, pow: &[f64; 7]) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if c[i][j] != ZERO {
                // pow[3 + k] = s^k
                out[i][j] = c[i][j] * pow[(3 + j as i32 - i as i32) as usize];
            }
        }
    }
    out
}

fn powers(s: f64) -> [f64; 7] {
    [s.powi(-3), s.powi(-2), 1.0 / s, 1.0, s, s * s, s * s * s]
}

/// `d/dx` of the Plücker coordinates of a two-column solution.
fn compound_rhs(c: &Mat4, w: &[Complex64], out: &mut [Complex64]) {
    let mut full = [[ZERO; 4]; 4];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        full[i][j] = w[k];
        full[j][i] = -w[k];
    }
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let mut acc = ZERO;
        for m in 0..4 {
            acc += c[i][m] * full[m][j] - c[j][m] * full[m][i];
        }
        out[k] = acc;
    }
}

fn ode_options(z: Complex64) -> OdeOptions {
    OdeOptions {
        rtol: 1e-12,
        atol: 1e-15,
        h_init: Some((1.0 / (1.0 + z.norm())).min(0.05)),
        ..OdeOptions::default()
    }
}

fn check_z(lambda: Complex64) -> Result<Complex64> {
    let z = fourth_root(lambda);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite(format!("spectral parameter {lambda}")));
    }
    if z.norm() > Z_CAP {
        return Err(Error::InvalidInput(format!(
            "|z| = {} exceeds the integration cap {Z_CAP}",
            z.norm()
        )));
    }
    Ok(z)
}

/// Characteristic determinant of a system (and optionally its λ-derivative) by the compound method.
pub fn system_det(
    sys: &dyn FirstOrderSystem,
    lambda: Complex64,
    with_derivative: bool,
) -> Result<ScaledDetD> {
    let z = check_z(lambda)?;
    system_det_with(sys, lambda, with_derivative, &ode_options(z))
}

/// [`system_det`] with explicit integrator settings.
pub fn system_det_with(
    sys: &dyn FirstOrderSystem,
    lambda: Complex64,
    with_derivative: bool,
    opts: &OdeOptions,
) -> Result<ScaledDetD> {
    let z = check_z(lambda)?;
    let s = z.norm().max(1.0);
    let pow = powers(s);
    let Boundary { k0, b1 } = sys.boundary();
    let y1: Vec<Complex64> = (0..4).map(|i| k0[0][i] / s.powi(i as i32)).collect();
    let y2: Vec<Complex64> = (0..4).map(|i| k0[1][i] / s.powi(i as i32)).collect();
    let dim = if with_derivative { 12 } else { 6 };
    let mut w0 = vec![ZERO; dim];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        w0[k] = y1[i] * y2[j] - y2[i] * y1[j];
    }
    // start at unit size so the absolute tolerance stays negligible
    let w_max = w0.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for v in w0.iter_mut() {
        *v /= w_max;
    }
    let out = ode::integrate(
        |x, w, dw| {
            let c = balance(&sys.matrix(x, lambda)?, &pow);
            compound_rhs(&c, &w[..6], &mut dw[..6]);
            if with_derivative {
                compound_rhs(&c, &w[6..], &mut dw[6..]);
                let d = sys.dlambda(x)? * pow[0];
                // contribution of ∂C/∂λ (entry [3][0]) acting on the base minors
                dw[6 + 4] -= d * w[0];
                dw[6 + 5] -= d * w[1];
            }
            Ok(())
        },
        &w0,
        0.0,
        1.0,
        opts,
    )?;
    let mut value = ZERO;
    let mut derivative = ZERO;
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let pk = b1[0][i] * b1[1][j] - b1[0][j] * b1[1][i];
        if pk == ZERO {
            continue;
        }
        let sc = s.powi((i + j) as i32);
        value += pk * sc * out.y[k];
        if with_derivative {
            derivative += pk * sc * out.y[6 + k];
        }
    }
    Ok(ScaledDetD {
        value,
        derivative,
        log_scale: 0.5 * (out.log_scale + w_max.ln()),
    })
}

pub fn char_det(op: &FourthOrderOperator, lambda: Complex64) -> Result<ScaledDet> {
    let r = system_det(&HSystem { op }, lambda, false)?;
    Ok(ScaledDet {
        value: r.value,
        log_scale: r.log_scale,
    })
}

pub fn char_det_with_derivative(op: &FourthOrderOperator, lambda: Complex64) -> Result<ScaledDetD> {
    system_det(&HSystem { op }, lambda, true)
}

/// `dD/dλ` from the variational system.
pub fn det_derivative(op: &FourthOrderOperator, lambda: Complex64) -> Result<Complex64> {
    let r = char_det_with_derivative(op, lambda)?;
    Ok(r.derivative * (2.0 * r.log_scale).exp())
}

pub fn eb_char_det(
    beam: &BeamCoefficients,
    lambda: Complex64,
    bc: BoundaryCondition,
) -> Result<ScaledDet> {
    let r = system_det(&EbSystem { beam, bc }, lambda, false)?;
    Ok(ScaledDet {
        value: r.value,
        log_scale: r.log_scale,
    })
}

pub fn eb_char_det_with_derivative(
    beam: &BeamCoefficients,
    lambda: Complex64,
    bc: BoundaryCondition,
) -> Result<ScaledDetD> {
    system_det(&EbSystem { beam, bc }, lambda, true)
}

/// Fundamental matrix at `x = 1`: the true matrix is `matrix · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyResult {
    pub matrix: Mat4,
    pub log_scale: f64,
    pub lambda: Complex64,
    pub z: Complex64,
}

impl MonodromyResult {
    /// `det(matrix) · exp(4·log_scale)`.
    pub fn wronskian(&self) -> Complex64 {
        let d = det4(&self.matrix);
        if self.log_scale == 0.0 {
            d
        } else {
            (d.ln() + 4.0 * self.log_scale).exp()
        }
    }

    /// The 2×2 minor on rows {1, 3} and columns {2, 4} (one-based), in the same scaled form.
    pub fn minor(&self) -> ScaledDet {
        let m = &self.matrix;
        ScaledDet {
            value: m[0][1] * m[2][3] - m[0][3] * m[2][1],
            log_scale: self.log_scale,
        }
    }
}

/// Determinant of a 4×4 complex matrix by Gaussian elimination with partial pivoting.
pub fn det4(m: &Mat4) -> Complex64 {
    let mut a = *m;
    let mut det = ONE;
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col] == ZERO {
            return ZERO;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

/// Fundamental matrices of a system at the given increasing points of `(0, 1]`.
pub fn system_fundamental(
    sys: &dyn FirstOrderSystem,
    lambda: Complex64,
    points: &[f64],
) -> Result<Vec<MonodromyResult>> {
    let z = check_z(lambda)?;
    let s = z.norm().max(1.0);
    let pow = powers(s);
    let mut y = vec![ZERO; 16];
    for i in 0..4 {
        y[4 * i + i] = ONE;
    }
    let mut log_scale = 0.0;
    let mut x0 = 0.0;
    let mut opts = ode_options(z);
    let mut results = Vec::with_capacity(points.len());
    for &x1 in points {
        let out = ode::integrate(
            |x, y, dy| {
                let c = balance(&sys.matrix(x, lambda)?, &pow);
                for col in 0..4 {
                    for i in 0..4 {
                        let mut acc = ZERO;
                        for k in 0..4 {
                            acc += c[i][k] * y[4 * col + k];
                        }
                        dy[4 * col + i] = acc;
                    }
                }
                Ok(())
            },
            &y,
            x0,
            x1,
            &opts,
        )?;
        y = out.y;
        log_scale += out.log_scale;
        if out.last_h > 0.0 {
            opts.h_init = Some(out.last_h);
        }
        x0 = x1;
        let mut matrix = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                matrix[i][j] = y[4 * j + i] * s.powi(i as i32 - j as i32);
            }
        }
        results.push(MonodromyResult {
            matrix,
            log_scale,
            lambda,
            z,
        });
    }
    Ok(results)
}

/// `M(1, λ)` for the operator `H`.
pub fn monodromy(op: &FourthOrderOperator, lambda: Complex64) -> Result<MonodromyResult> {
    Ok(system_fundamental(&HSystem { op }, lambda, &[1.0])?.remove(0))
}

/// Largest deviation of the scaled Wronskian from 1 over `checks` equally spaced points.
pub fn wronskian_defect(
    sys: &dyn FirstOrderSystem,
    lambda: Complex64,
    checks: usize,
) -> Result<f64> {
    let points: Vec<f64> = (1..=checks).map(|k| k as f64 / checks as f64).collect();
    let ms = system_fundamental(sys, lambda, &points)?;
    Ok(ms
        .iter()
        .map(|m| (m.wronskian() - 1.0).norm())
        .fold(0.0, f64::max))
}

/// A characteristic determinant as a function of λ.
pub trait Determinant: Sync + Send {
    fn eval(&self, lambda: Complex64) -> Result<ScaledDet>;
    fn eval_with_derivative(&self, lambda: Complex64) -> Result<ScaledDetD>;
    /// Human-readable description used in output provenance.
    fn describe(&self) -> String;
}

/// `sinh z sin z / z²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeDet;

impl Determinant for FreeDet {
    fn eval(&self, lambda: Complex64) -> Result<ScaledDet> {
        Ok(ScaledDet {
            value: char_det_free(lambda),
            log_scale: 0.0,
        })
    }
    fn eval_with_derivative(&self, lambda: Complex64) -> Result<ScaledDetD> {
        let (value, derivative) = char_det_free_with_derivative(lambda);
        Ok(ScaledDetD {
            value,
            derivative,
            log_scale: 0.0,
        })
    }
    fn describe(&self) -> String {
        "free closed form".into()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaQDet {
    pub gamma: Complex64,
    pub t0: f64,
}

impl Determinant for DeltaQDet {
    fn eval(&self, lambda: Complex64) -> Result<ScaledDet> {
        Ok(ScaledDet {
            value: char_det_delta_q(self.gamma, self.t0, lambda),
            log_scale: 0.0,
        })
    }
    fn eval_with_derivative(&self, lambda: Complex64) -> Result<ScaledDetD> {
        let (value, derivative) = char_det_delta_q_with_derivative(self.gamma, self.t0, lambda);
        Ok(ScaledDetD {
            value,
            derivative,
            log_scale: 0.0,
        })
    }
    fn describe(&self) -> String {
        format!("point mass in q, gamma = {}, t0 = {}", self.gamma, self.t0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaPDet {
    pub gamma: Complex64,
}

impl Determinant for DeltaPDet {
    fn eval(&self, lambda: Complex64) -> Result<ScaledDet> {
        Ok(ScaledDet {
            value: char_det_delta_p(self.gamma, lambda),
            log_scale: 0.0,
        })
    }
    fn eval_with_derivative(&self, lambda: Complex64) -> Result<ScaledDetD> {
        let (value, derivative) = char_det_delta_p_with_derivative(self.gamma, lambda);
        Ok(ScaledDetD {
            value,
            derivative,
            log_scale: 0.0,
        })
    }
    fn describe(&self) -> String {
        format!("point mass in p at 1/2, gamma = {}", self.gamma)
    }
}

/// Integration-based determinant of `H`.
#[derive(Clone, Debug)]
pub struct OperatorDet {
    pub op: FourthOrderOperator,
}

impl Determinant for OperatorDet {
    fn eval(&self, lambda: Complex64) -> Result<ScaledDet> {
        char_det(&self.op, lambda)
    }
    fn eval_with_derivative(&self, lambda: Complex64) -> Result<ScaledDetD> {
        char_det_with_derivative(&self.op, lambda)
    }
    fn describe(&self) -> String {
        "fourth-order operator (integrated)".into()
    }
}

/// Integration-based determinant of a beam.
#[derive(Clone, Debug)]
pub struct BeamDet {
    pub beam: BeamCoefficients,
    pub bc: BoundaryCondition,
}

impl Determinant for BeamDet {
    fn eval(&self, lambda: Complex64) -> Result<ScaledDet> {
        eb_char_det(&self.beam, lambda, self.bc)
    }
    fn eval_with_derivative(&self, lambda: Complex64) -> Result<ScaledDetD> {
        eb_char_det_with_derivative(&self.beam, lambda, self.bc)
    }
    fn describe(&self) -> String {
        format!("Euler-Bernoulli beam, {} (integrated)", self.bc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn free_monodromy_matches_closed_form() {
        let op = FourthOrderOperator::zero();
        for &l in &[c(PI.powi(4)), Complex64::new(-300.0, 50.0), c(2.0e5)] {
            let m = monodromy(&op, l).unwrap();
            let m0 = FreeSolutions::new(l).matrix(1.0);
            let scale = m0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (m.matrix[i][j] - m0[i][j]).norm() < 1e-9 * scale,
                        "({i},{j}) at {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn monodromy_at_zero_is_polynomial() {
        let m = monodromy(&FourthOrderOperator::zero(), c(0.0)).unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for j in 0..4 {
            assert!((m.matrix[0][j] - expect[j]).norm() < 1e-13);
        }
        for i in 1..4 {
            for j in 0..i {
                assert!(m.matrix[i][j].norm() < 1e-13);
            }
        }
    }

    #[test]
    fn compound_det_matches_free_closed_form() {
        let op = FourthOrderOperator::zero();
        for &l in &[
            c(1.0),
            c(1e2),
            c(1e4),
            c(-1e3),
            Complex64::new(0.0, 1e3),
            c(1.0e7),
            c(60f64.powi(4)),
        ] {
            let d = char_det(&op, l).unwrap().unscaled();
            let d0 = char_det_free(l);
            let scale = d0.norm().max(char_det_free(c(l.norm())).norm() * 1e-30);
            assert!(
                (d - d0).norm() < 1e-9 * scale.max(d0.norm()),
                "{l}: {d} vs {d0}"
            );
        }
    }

    #[test]
    fn derivative_matches_closed_form() {
        let op = FourthOrderOperator::zero();
        let l = c(50.0);
        let d = det_derivative(&op, l).unwrap();
        let (_, d0) = char_det_free_with_derivative(l);
        assert!((d - d0).norm() < 1e-7 * d0.norm());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let op = FourthOrderOperator::new(
            Function1D::sin_mode(1, 0.8),
            Function1D::fourier(0.2, vec![0.5], vec![0.0, -0.3]),
        );
        let l = Complex64::new(700.0, 40.0);
        let h = 1e-4 * l.norm();
        let fd = (char_det(&op, l + h).unwrap().unscaled()
            - char_det(&op, l - h).unwrap().unscaled())
            / (2.0 * h);
        let d = det_derivative(&op, l).unwrap();
        assert!((fd - d).norm() < 1e-5 * d.norm());
    }

    #[test]
    fn constant_p_has_exact_zeros() {
        let cval = 2.0;
        let op = FourthOrderOperator::new(Function1D::constant(cval), Function1D::zero());
        for n in 1..5 {
            let k = PI * n as f64;
            let l = c(k.powi(4) - 2.0 * cval * k * k);
            let d = char_det(&op, l).unwrap().unscaled();
            let scale = char_det_free(c(l.re + 30.0)).norm();
            assert!(d.norm() < 1e-9 * scale, "n = {n}: {d}");
        }
    }

    #[test]
    fn conjugation_symmetry_and_reality() {
        let op =
            FourthOrderOperator::new(Function1D::sin_mode(1, 1.0), Function1D::cos_mode(1, 1.0));
        let l = Complex64::new(1200.0, 345.0);
        let a = char_det(&op, l).unwrap().unscaled();
        let b = char_det(&op, l.conj()).unwrap().unscaled();
        assert!((a - b.conj()).norm() <= 1e-10 * a.norm());
        let r = char_det(&op, c(880.0)).unwrap().unscaled();
        assert!(r.im.abs() <= 1e-10 * r.norm());
        let opc = FourthOrderOperator::new(
            Function1D::complex(Function1D::sin_mode(1, 1.0), Function1D::cos_mode(2, 0.5)),
            Function1D::complex(Function1D::cos_mode(1, 1.0), Function1D::constant(0.3)),
        );
        let opcc = FourthOrderOperator::new(
            Function1D::complex(Function1D::sin_mode(1, 1.0), Function1D::cos_mode(2, -0.5)),
            Function1D::complex(Function1D::cos_mode(1, 1.0), Function1D::constant(-0.3)),
        );
        let a = char_det(&opc, l).unwrap().unscaled();
        let b = char_det(&opcc, l.conj()).unwrap().unscaled();
        assert!((a - b.conj()).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn wronskian_is_one() {
        let op =
            FourthOrderOperator::new(Function1D::sin_mode(1, 1.0), Function1D::cos_mode(1, 1.0));
        for &l in &[c(10.0), Complex64::new(200.0, -80.0), c(3000.0)] {
            let d = wronskian_defect(&HSystem { op: &op }, l, 10).unwrap();
            assert!(d < 1e-9, "{l}: {d}");
        }
    }

    #[test]
    fn identity_beam_pinned_matches_free() {
        let beam = BeamCoefficients::identity();
        for &l in &[c(5.0), c(1e4), Complex64::new(-400.0, 700.0)] {
            let d = eb_char_det(&beam, l, BoundaryCondition::PinnedPinned)
                .unwrap()
                .unscaled();
            let d0 = char_det_free(l);
            assert!((d - d0).norm() < 1e-9 * d0.norm());
        }
    }

    #[test]
    fn uniform_beam_clamped_conditions() {
        // clamped-clamped: cosh z cos z = 1 at z ≈ 4.730040744862704
        let beam = BeamCoefficients::identity();
        let z: f64 = 4.730040744862704;
        let d = eb_char_det(&beam, c(z.powi(4)), BoundaryCondition::ClampedClamped)
            .unwrap()
            .unscaled();
        let d_off = eb_char_det(
            &beam,
            c((z + 0.2).powi(4)),
            BoundaryCondition::ClampedClamped,
        )
        .unwrap()
        .unscaled();
        assert!(d.norm() < 1e-9 * d_off.norm());
        // clamped-free: cosh z cos z = -1 at z ≈ 1.875104068711961
        let z: f64 = 1.875104068711961;
        let d = eb_char_det(&beam, c(z.powi(4)), BoundaryCondition::ClampedFree)
            .unwrap()
            .unscaled();
        let d_off = eb_char_det(&beam, c((z + 0.2).powi(4)), BoundaryCondition::ClampedFree)
            .unwrap()
            .unscaled();
        assert!(d.norm() < 1e-9 * d_off.norm());
    }

    #[test]
    fn boundary_names_roundtrip() {
        for bc in BoundaryCondition::ALL {
            assert_eq!(bc.name().parse::<BoundaryCondition>().unwrap(), bc);
        }
        assert!("free-free".parse::<BoundaryCondition>().is_err());
    }

    #[test]
    fn z_cap_enforced() {
        assert!(char_det(&FourthOrderOperator::zero(), c(250f64.powi(4))).is_err());
    }
}

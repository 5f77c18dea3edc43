//! The acceptance suite: thirteen numerical checks over the whole library, each reported as a
//! single pass/fail line. Shared by the `acceptance` test target and the `selftest` command.

use crate::asymptotics::{predict_h, psi0, psi1_direct, psi1_via_transform};
use crate::coefficients::{build_beam, normalize_beam, BeamCoefficients, Function1D};
use crate::determinant::{
    char_det, char_det_free, wronskian_defect, BeamDet, BoundaryCondition, DeltaPDet, DeltaQDet,
    Determinant, EbSystem, FirstOrderSystem, FourthOrderOperator, FreeDet, HSystem, OperatorDet,
};
use crate::error::Result;
use crate::inverse::{ambarzumyan_check, forward_derivatives, recover_beta};
use crate::oracle::sturm_liouville_eigs;
use crate::perturbation::{
    d1, d1_closed_pin4, lambda_first_order, richardson_orders, FirstOrderData,
};
use crate::spectrum::{count_zeros_disc, eigenvalues, SpectrumOptions};
use crate::transform::gottlieb_transform;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Seed of the randomized coefficient draws; fixed so that runs are reproducible.
pub const SEED: u64 = 20_240_611;

/// Largest `|z|` at which the full monodromy determinant is checked. Beyond it the decaying
/// solutions are lost to rounding relative to the growing ones.
pub const WRONSKIAN_Z_MAX: f64 = 8.0;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:>2} {tag}  {}: {} ({:.1}s)",
            self.id, self.name, self.detail, self.seconds
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(usize, &str, Check); 13] = [
    (1, "free spectrum", free_spectrum),
    (2, "closed form vs integrated determinant", closed_vs_ode),
    (3, "counting lemma", counting),
    (4, "fourth-order residuals", fourth_order_residuals),
    (5, "unitary equivalence", unitary_equivalence),
    (6, "beam residuals", beam_residuals),
    (7, "two-route psi1", two_route_psi1),
    (8, "perturbation", perturbation),
    (9, "point-mass examples", point_masses),
    (10, "operator square", operator_square),
    (11, "inverse round trip", inverse_round_trip),
    (12, "Ambarzumyan check", ambarzumyan),
    (13, "Wronskian and conjugation invariants", invariants),
];

pub fn run_criterion(id: usize) -> Option<CriterionReport> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CriterionReport {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Run every criterion in order, handing each report to `sink` as soon as it is ready.
pub fn run_all(mut sink: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .filter_map(|c| run_criterion(c.0))
        .inspect(|r| sink(r))
        .collect()
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random real Fourier series with `modes` cosine and sine terms decaying like `1/k`.
fn random_fourier(rng: &mut ChaCha8Rng, modes: usize, amp: f64, with_constant: bool) -> Function1D {
    let constant = if with_constant {
        amp * rng.gen_range(-1.0..1.0)
    } else {
        0.0
    };
    let mut draw = |k: usize| amp * rng.gen_range(-1.0..1.0) / k as f64;
    let cos: Vec<f64> = (1..=modes).map(&mut draw).collect();
    let sin: Vec<f64> = (1..=modes).map(&mut draw).collect();
    Function1D::fourier(constant, cos, sin)
}

/// The same series rescaled to unit L² norm.
fn unit_norm_fourier(rng: &mut ChaCha8Rng, modes: usize) -> Function1D {
    let f = random_fourier(rng, modes, 1.0, true);
    let s = f.as_fourier().expect("Fourier");
    let norm2 = s.constant.powi(2) + 0.5 * s.cos.iter().chain(&s.sin).map(|v| v * v).sum::<f64>();
    f.scaled(1.0 / norm2.sqrt())
}

fn random_beam(rng: &mut ChaCha8Rng) -> Result<BeamCoefficients> {
    let alpha = random_fourier(rng, 3, 0.25, true);
    let beta = random_fourier(rng, 3, 0.25, true);
    let q = random_fourier(rng, 2, 2.0, true);
    let b0 = rng.gen_range(0.5..2.0);
    Ok(normalize_beam(&build_beam(alpha, beta, q, b0)?))
}

fn random_beams(count: usize, stream: u64) -> Result<Vec<BeamCoefficients>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(stream);
    (0..count).map(|_| random_beam(&mut rng)).collect()
}

fn random_operator() -> FourthOrderOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(3);
    let p = unit_norm_fourier(&mut rng, 3);
    let q = unit_norm_fourier(&mut rng, 3);
    FourthOrderOperator::new(p, q)
}

fn equal_coefficient_beam(amp: f64) -> Result<BeamCoefficients> {
    let alpha = Function1D::sin_mode(1, amp);
    build_beam(alpha.clone(), alpha, Function1D::zero(), 1.0)
}

fn trig_operator() -> FourthOrderOperator {
    FourthOrderOperator::new(Function1D::sin_mode(1, 1.0), Function1D::cos_mode(1, 1.0))
}

fn smooth_operator() -> FourthOrderOperator {
    FourthOrderOperator::new(Function1D::cos_mode(1, 0.5), Function1D::sin_mode(2, 1.0))
}

fn square_operator() -> FourthOrderOperator {
    let p = Function1D::sin_mode(1, 0.5);
    // p'' + p² = −2π² sin 2πt + (1 − cos 4πt)/8
    let q = Function1D::fourier(0.125, vec![0.0, -0.125], vec![-2.0 * PI * PI]);
    FourthOrderOperator::new(p, q)
}

fn real_spectrum(det: &dyn Determinant, opts: &SpectrumOptions, n_max: usize) -> Result<Vec<f64>> {
    Ok(eigenvalues(det, opts, n_max)?
        .entries
        .iter()
        .map(|e| e.lambda.re)
        .collect())
}

/// `|v|` never grows by more than `slack` over its running minimum, and ends below where it started.
fn decreasing_trend(v: &[f64], slack: f64) -> bool {
    let mut min = f64::INFINITY;
    for &x in v {
        if x > min * (1.0 + slack) {
            return false;
        }
        min = min.min(x);
    }
    v.last() < v.first()
}

/// The tail of `v` stays within `factor` times the largest value seen on its first half.
fn bounded(v: &[f64], factor: f64) -> (bool, f64) {
    let half = v.len() / 2;
    let head = v[..half].iter().cloned().fold(0.0, f64::max);
    let all = v.iter().cloned().fold(0.0, f64::max);
    (all <= factor * head.max(1e-12) && all.is_finite(), all)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn free_spectrum() -> Result<(bool, String)> {
    let op = FourthOrderOperator::zero();
    let lam = real_spectrum(
        &OperatorDet { op: op.clone() },
        &SpectrumOptions::for_operator(&op),
        20,
    )?;
    let err = lam
        .iter()
        .enumerate()
        .map(|(i, l)| rel(*l, (PI * (i + 1) as f64).powi(4)))
        .fold(0.0, f64::max);
    Ok((
        lam.len() == 20 && err < 1e-10,
        format!("max relative error {err:.2e} over n = 1..20"),
    ))
}

fn closed_vs_ode() -> Result<(bool, String)> {
    let op = FourthOrderOperator::zero();
    let points = [c(1.0), c(1e2), c(1e4), c(-1e3), Complex64::new(0.0, 1e3)];
    let mut worst: f64 = 0.0;
    for l in points {
        let d0 = char_det_free(l);
        let d = char_det(&op, l)?.unscaled();
        worst = worst.max((d - d0).norm() / d0.norm());
    }
    Ok((worst < 1e-9, format!("max relative difference {worst:.2e}")))
}

fn counting() -> Result<(bool, String)> {
    let random = random_operator();
    let cases: [(&str, Box<dyn Determinant>, SpectrumOptions); 3] = [
        ("free", Box::new(FreeDet), SpectrumOptions::default()),
        (
            "point mass",
            Box::new(DeltaQDet {
                gamma: c(1.0),
                t0: 0.3,
            }),
            SpectrumOptions::default(),
        ),
        (
            "random",
            Box::new(OperatorDet { op: random.clone() }),
            SpectrumOptions::for_operator(&random),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, det, opts) in &cases {
        let counts: Vec<usize> = (3..=5)
            .map(|n| count_zeros_disc(det.as_ref(), n, opts))
            .collect::<Result<_>>()?;
        ok &= counts == [3, 4, 5];
        parts.push(format!("{name} {counts:?}"));
    }
    Ok((ok, parts.join(", ")))
}

fn residuals_h(
    op: &FourthOrderOperator,
    range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<f64>> {
    let n_max = *range.end();
    let lam = real_spectrum(
        &OperatorDet { op: op.clone() },
        &SpectrumOptions::for_operator(op),
        n_max,
    )?;
    range
        .map(|n| Ok(lam[n - 1] - predict_h(op, n)?.re))
        .collect()
}

fn fourth_order_residuals() -> Result<(bool, String)> {
    let r = residuals_h(&trig_operator(), 8..=24)?;
    let nr: Vec<f64> = r
        .iter()
        .zip(8..)
        .map(|(r, n)| (n as f64 * r).abs())
        .collect();
    let trend = decreasing_trend(&nr, 0.05);
    let last = *nr.last().unwrap_or(&f64::NAN);
    let r2 = residuals_h(&smooth_operator(), 8..=24)?;
    let n2r: Vec<f64> = r2
        .iter()
        .zip(8..)
        .map(|(r, n)| (n as f64).powi(2) * r.abs())
        .collect();
    let (bnd, sup) = bounded(&n2r, 2.0);
    Ok((
        trend && last < 0.1 && bnd,
        format!(
            "|n r_n| {} (last {last:.2e}); smoother class sup |n^2 r_n| = {sup:.3e}",
            fmt_list(&nr)
        ),
    ))
}

fn unitary_equivalence() -> Result<(bool, String)> {
    let bc = BoundaryCondition::Ebdc;
    let per_beam: Vec<f64> = random_beams(3, 5)?
        .par_iter()
        .map(|beam| {
            let eb = real_spectrum(
                &BeamDet {
                    beam: beam.clone(),
                    bc,
                },
                &SpectrumOptions::for_beam(beam, bc),
                10,
            )?;
            let op = gottlieb_transform(beam)?;
            let h = real_spectrum(
                &OperatorDet { op: op.clone() },
                &SpectrumOptions::for_operator(&op),
                10,
            )?;
            Ok(eb
                .iter()
                .zip(&h)
                .map(|(a, b)| rel(*a, *b))
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let worst = per_beam.iter().cloned().fold(0.0, f64::max);
    Ok((
        worst < 1e-7,
        format!("max relative discrepancy {worst:.2e} over three beams, n <= 10"),
    ))
}

fn beam_residuals() -> Result<(bool, String)> {
    let beam = equal_coefficient_beam(0.3)?;
    let (p0, p1) = (psi0(&beam)?, psi1_direct(&beam)?);
    let bc = BoundaryCondition::Ebdc;
    let lam = real_spectrum(
        &BeamDet {
            beam: beam.clone(),
            bc,
        },
        &SpectrumOptions::for_beam(&beam, bc),
        24,
    )?;
    let nr: Vec<f64> = (8..=24)
        .map(|n| {
            let k = PI * n as f64;
            (n as f64 * (lam[n - 1] - (k.powi(4) + 2.0 * k * k * p0 + p1))).abs()
        })
        .collect();
    Ok((
        decreasing_trend(&nr, 0.05),
        format!("|n r_n| {}", fmt_list(&nr)),
    ))
}

fn two_route_psi1() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for beam in random_beams(5, 7)? {
        let direct = psi1_direct(&beam)?;
        let via = psi1_via_transform(&gottlieb_transform(&beam)?)?;
        worst = worst.max((direct - via).abs());
    }
    Ok((
        worst < 1e-6,
        format!("max |direct - via transform| {worst:.2e} over five beams"),
    ))
}

/// Errors below this are at the eigenvalue noise floor, where an observed order means nothing.
const FD_NOISE_FLOOR: f64 = 1e-7;

fn perturbation() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(11);
    let alpha = random_fourier(&mut rng, 4, 0.5, true);
    let beta = random_fourier(&mut rng, 4, 0.5, true);
    let q = random_fourier(&mut rng, 4, 2.0, true);
    let mut d1_err: f64 = 0.0;
    for n in 1..=10 {
        let lambda = c((PI * n as f64).powi(4));
        let integral = d1(lambda, &alpha, &beta, &q, 1.0)?;
        let closed = d1_closed_pin4(n, FirstOrderData::from_functions(&alpha, &beta, &q, n));
        d1_err = d1_err.max((integral - closed).norm() / closed.abs());
    }
    let mut ok = d1_err < 1e-9;
    let mut parts = vec![format!("d1 relative error {d1_err:.2e}")];
    let zero = Function1D::zero();
    let eps = [4e-3, 2e-3, 1e-3];
    let cases = [
        (
            "beta",
            zero.clone(),
            Function1D::sin_mode(1, 1.0),
            zero.clone(),
        ),
        (
            "Q",
            zero.clone(),
            zero.clone(),
            Function1D::cos_mode(1, 1.0),
        ),
    ];
    for (name, a, b, qq) in &cases {
        let n = 1;
        let (_, exact) = lambda_first_order(n, FirstOrderData::from_functions(a, b, qq, n));
        let (errs, orders) = richardson_orders(a, b, qq, 1.0, n, &eps, exact)?;
        let order_ok = errs
            .windows(2)
            .zip(&orders)
            .all(|(e, o)| *o >= 1.9 || e[1] < FD_NOISE_FLOOR);
        let last = *errs.last().unwrap_or(&f64::NAN);
        ok &= order_ok && last < 1e-3;
        parts.push(format!(
            "{name}: errors {} orders {}",
            fmt_list(&errs),
            fmt_list(&orders)
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn point_masses() -> Result<(bool, String)> {
    let opts = SpectrumOptions::default();
    let mid = real_spectrum(
        &DeltaQDet {
            gamma: c(1.0),
            t0: 0.5,
        },
        &opts,
        2,
    )?;
    let l2 = rel(mid[1], (2.0 * PI).powi(4));
    let t0 = 0.3;
    let lam = real_spectrum(&DeltaQDet { gamma: c(1.0), t0 }, &opts, 20)?;
    let n3: Vec<f64> = (6..=20)
        .map(|n| {
            let k = PI * n as f64;
            (n as f64).powi(3) * (lam[n - 1] - k.powi(4) - (1.0 - (2.0 * k * t0).cos())).abs()
        })
        .collect();
    let (b1, s1) = bounded(&n3, 2.0);
    let p_opts = SpectrumOptions {
        p_hat_0: c(1.0),
        ..Default::default()
    };
    let lam = real_spectrum(&DeltaPDet { gamma: c(1.0) }, &p_opts, 20)?;
    let n2: Vec<f64> = (6..=20)
        .map(|n| {
            let k = PI * n as f64;
            let expansion = k.powi(4) - 2.0 * k * k - 0.5 * k + 0.5 - 1.0 / 12.0;
            (n as f64).powi(2) * (lam[n - 1] - expansion).abs()
        })
        .collect();
    let (b2, s2) = bounded(&n2, 2.0);
    Ok((
        l2 < 1e-10 && b1 && b2,
        format!("lambda_2 relative error {l2:.2e}; sup |n^3 r_n| = {s1:.3e}; sup |n^2 r_n| (p-mass) = {s2:.3e}"),
    ))
}

fn operator_square() -> Result<(bool, String)> {
    let op = square_operator();
    let alpha = sturm_liouville_eigs(&op.p, 8)?;
    let lam = real_spectrum(
        &OperatorDet { op: op.clone() },
        &SpectrumOptions::for_operator(&op),
        8,
    )?;
    let err = alpha
        .iter()
        .zip(&lam)
        .map(|(a, l)| rel(*l, a * a))
        .fold(0.0, f64::max);
    Ok((
        err < 1e-7,
        format!("max relative error {err:.2e} over n <= 8"),
    ))
}

fn inverse_round_trip() -> Result<(bool, String)> {
    let alpha = Function1D::zero();
    let beta = Function1D::fourier(0.0, vec![], vec![1.0, 0.0, -0.4]);
    let n = 8;
    let derivs = forward_derivatives(&alpha, &beta, n);
    let r = recover_beta(&alpha, &derivs, n)?;
    let err = (0..=400)
        .map(|k| k as f64 / 400.0)
        .map(|x| (r.recovered.eval(x) - beta.eval(x)).abs())
        .fold(0.0, f64::max);
    Ok((err < 1e-9, format!("max error {err:.2e} at N = {n}")))
}

fn ambarzumyan() -> Result<(bool, String)> {
    let free: Vec<(usize, f64)> = (1..=24).map(|n| (n, (PI * n as f64).powi(4))).collect();
    let uniform = ambarzumyan_check(&free, true)?;
    let beam = equal_coefficient_beam(1.0)?;
    let target = psi0(&beam)?;
    let bc = BoundaryCondition::Ebdc;
    let lam = real_spectrum(
        &BeamDet {
            beam: beam.clone(),
            bc,
        },
        &SpectrumOptions::for_beam(&beam, bc),
        24,
    )?;
    let pairs: Vec<(usize, f64)> = lam.iter().enumerate().map(|(i, l)| (i + 1, *l)).collect();
    let report = ambarzumyan_check(&pairs, true)?;
    let close = rel(report.psi0_est, target) < 0.05;
    Ok((
        uniform.is_uniform == Some(true) && report.is_uniform == Some(false) && close,
        format!(
            "free: {:?}; non-uniform: {:?} with psi0 estimate {:.5} against {target:.5}",
            uniform.is_uniform, report.is_uniform, report.psi0_est
        ),
    ))
}

/// Sample points `λ = (r e^{iθ})⁴` with `r ≤ WRONSKIAN_Z_MAX`.
fn wronskian_points() -> Vec<Complex64> {
    let mut pts = Vec::new();
    for &r in &[0.5, 2.0, 4.5, WRONSKIAN_Z_MAX] {
        for &th in &[0.0, 0.3, PI / 4.0, 0.7] {
            pts.push(Complex64::from_polar(r, th).powu(4));
        }
    }
    pts
}

fn invariants() -> Result<(bool, String)> {
    let mut ops = vec![
        ("zero", FourthOrderOperator::zero()),
        ("random", random_operator()),
        ("trig", trig_operator()),
        ("smooth", smooth_operator()),
        ("square", square_operator()),
    ];
    let mut beams = vec![
        ("a = b, amplitude 0.3", equal_coefficient_beam(0.3)?),
        ("a = b, amplitude 1", equal_coefficient_beam(1.0)?),
    ];
    for (i, b) in random_beams(3, 5)?
        .into_iter()
        .chain(random_beams(5, 7)?)
        .enumerate()
    {
        ops.push(("transformed", gottlieb_transform(&b)?));
        beams.push((if i < 3 { "random ebdc" } else { "random" }, b));
    }
    let systems: Vec<(&str, Box<dyn FirstOrderSystem + '_>)> = ops
        .iter()
        .map(|(n, op)| (*n, Box::new(HSystem { op }) as Box<dyn FirstOrderSystem>))
        .chain(beams.iter().flat_map(|(n, beam)| {
            [BoundaryCondition::Ebdc, BoundaryCondition::PinnedPinned].map(|bc| {
                (
                    *n,
                    Box::new(EbSystem { beam, bc }) as Box<dyn FirstOrderSystem>,
                )
            })
        }))
        .collect();
    let points = wronskian_points();
    let mut w_worst: f64 = 0.0;
    for (_, sys) in &systems {
        let d: Vec<f64> = points
            .par_iter()
            .map(|&l| wronskian_defect(sys.as_ref(), l, 10))
            .collect::<Result<_>>()?;
        w_worst = d.iter().cloned().fold(w_worst, f64::max);
    }
    // conjugation: D(λ̄) = conj D(λ) for real data, up to large |z|
    let conj_points: Vec<Complex64> = [3.0, 25.0, 80.0, 150.0]
        .iter()
        .flat_map(|&r| [0.2, 0.6].map(|th| Complex64::from_polar(r, th).powu(4)))
        .collect();
    let mut c_worst: f64 = 0.0;
    let dets: Vec<Box<dyn Determinant>> = ops
        .iter()
        .map(|(_, op)| Box::new(OperatorDet { op: op.clone() }) as Box<dyn Determinant>)
        .chain(beams.iter().map(|(_, b)| {
            Box::new(BeamDet {
                beam: b.clone(),
                bc: BoundaryCondition::Ebdc,
            }) as Box<dyn Determinant>
        }))
        .collect();
    for det in &dets {
        for &l in &conj_points {
            let a = det.eval(l)?;
            let b = det.eval(l.conj())?;
            let scale = (b.log_scale - a.log_scale).exp();
            let d = (b.value * scale - a.value.conj()).norm() / a.value.norm();
            c_worst = c_worst.max(d);
        }
    }
    Ok((
        w_worst < 1e-9 && c_worst < 1e-10,
        format!(
            "max |det M - 1| {w_worst:.2e} ({} systems, |z| <= {WRONSKIAN_Z_MAX}); max conjugation defect {c_worst:.2e} ({} determinants, |z| <= 150)",
            systems.len(),
            dets.len()
        ),
    ))
}

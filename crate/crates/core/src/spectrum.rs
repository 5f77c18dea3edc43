//! Eigenvalues as zeros of a characteristic determinant.
//!
//! Roots are sought in `z = λ^{1/4}`. High indices use Newton iteration from the two-term
//! asymptotic guess; low indices are located globally, by a sign scan along the real λ-axis for
//! self-adjoint data or by multi-start Newton otherwise. Every search is checked against the
//! winding number of `D` on a circle between consecutive roots.

use crate::asymptotics;
use crate::coefficients::BeamCoefficients;
use crate::determinant::{
    fourth_root, BoundaryCondition, Determinant, FourthOrderOperator, ScaledDetD,
};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// mean of `p` in normalized coordinates; shifts the initial guess
    pub p_hat_0: Complex64,
    /// real self-adjoint data: the spectrum is real
    pub real: bool,
    /// roots lie near `z = π(n + offset)/arc_length`
    pub offset: f64,
    pub arc_length: f64,
    /// indices up to `n_star` are located globally
    pub n_star: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            p_hat_0: Complex64::new(0.0, 0.0),
            real: true,
            offset: 0.0,
            arc_length: 1.0,
            n_star: 8,
            newton_tol: 1e-12,
            max_newton: 50,
        }
    }
}

impl SpectrumOptions {
    pub fn for_operator(op: &FourthOrderOperator) -> Self {
        SpectrumOptions {
            p_hat_0: op.p_hat_0,
            real: op.is_real(),
            ..Default::default()
        }
    }

    /// Options for a beam; the `p̂₀` shift is only known for the pinned-type conditions.
    pub fn for_beam(beam: &BeamCoefficients, bc: BoundaryCondition) -> Self {
        let arc_length = beam.xi_integral();
        let p_hat_0 = match bc {
            BoundaryCondition::Ebdc | BoundaryCondition::PinnedPinned => {
                -asymptotics::psi0_unchecked(&crate::coefficients::normalize_beam(beam))
            }
            _ => 0.0,
        };
        SpectrumOptions {
            p_hat_0: Complex64::new(p_hat_0, 0.0),
            offset: bc.offset(),
            arc_length,
            ..Default::default()
        }
    }

    fn center(&self, n: f64) -> f64 {
        PI * (n + self.offset) / self.arc_length
    }

    /// Radius of the counting circle enclosing the first `n` roots.
    pub fn circle_radius(&self, n: usize) -> f64 {
        self.center(n as f64 + 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub n: usize,
    pub lambda: Complex64,
    pub z: Complex64,
    pub newton_residual: f64,
    pub certified: bool,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueTable {
    pub entries: Vec<EigenvalueEntry>,
    pub det_kind: String,
}

impl EigenvalueTable {
    pub fn lambdas(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    pub fn get(&self, n: usize) -> Option<&EigenvalueEntry> {
        self.entries.iter().find(|e| e.n == n)
    }
}

/// Root of `z + p̂₀/(2z) = πn` with positive real part.
pub fn initial_guess(n: usize, p_hat_0: Complex64) -> Complex64 {
    initial_guess_shifted(n as f64, p_hat_0)
}

/// [`initial_guess`] with `πn` replaced by `πk` for a real `k`.
pub fn initial_guess_shifted(k: f64, p_hat_0: Complex64) -> Complex64 {
    let w = PI * k;
    let z = (w + (Complex64::new(w * w, 0.0) - 2.0 * p_hat_0).sqrt()) / 2.0;
    if z.re.is_finite() && z.im.is_finite() && z.re > 0.0 {
        z
    } else {
        Complex64::new(w, 0.0)
    }
}

fn eval_d(det: &dyn Determinant, z: Complex64) -> Result<ScaledDetD> {
    det.eval_with_derivative(z.powu(4))
}

/// `|Δz|/max(1, |z|)` for the Newton step at `z`.
fn residual_at(det: &dyn Determinant, z: Complex64) -> Result<f64> {
    let r = eval_d(det, z)?;
    let dz = r.value / (4.0 * z.powu(3) * r.derivative);
    Ok(if r.value == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        dz.norm() / z.norm().max(1.0)
    })
}

struct NewtonOutcome {
    z: Complex64,
    residual: f64,
    converged: bool,
}

fn newton(
    det: &dyn Determinant,
    z0: Complex64,
    opts: &SpectrumOptions,
    max_step: f64,
) -> Result<NewtonOutcome> {
    let mut z = z0;
    let mut converged = false;
    for _ in 0..opts.max_newton {
        let r = eval_d(det, z)?;
        if r.value == Complex64::new(0.0, 0.0) {
            converged = true;
            break;
        }
        let mut dz = r.value / (4.0 * z.powu(3) * r.derivative);
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            break;
        }
        if dz.norm() > max_step {
            dz *= max_step / dz.norm();
        }
        z -= dz;
        if dz.norm() < opts.newton_tol * z.norm().max(1.0) {
            converged = true;
            break;
        }
    }
    let residual = residual_at(det, z)?;
    Ok(NewtonOutcome {
        z,
        residual,
        converged,
    })
}

fn finish(z: Complex64, real: bool) -> (Complex64, Complex64) {
    let mut lambda = z.powu(4);
    if real {
        lambda.im = 0.0;
    }
    (lambda, fourth_root(lambda))
}

/// Winding number of `D` around the z-circle `|z − center| = radius`.
pub fn winding_number(det: &dyn Determinant, center: Complex64, radius: f64) -> Result<f64> {
    contour_count(|m| {
        (0..m)
            .into_par_iter()
            .map(|j| {
                let e = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / m as f64);
                let z = center + radius * e;
                let r = eval_d(det, z)?;
                Ok((
                    r.value,
                    r.derivative / r.value * 4.0 * z.powu(3) * radius * e,
                ))
            })
            .collect()
    })
}

/// Number of zeros of `D` (with multiplicity) inside `|z| < π(N + offset + 1/2)/arc_length`.
pub fn count_zeros_disc(det: &dyn Determinant, n: usize, opts: &SpectrumOptions) -> Result<usize> {
    let base = opts.circle_radius(n);
    let gap = PI / opts.arc_length;
    let mut last_err = None;
    for shift in [0.0, 0.1, -0.1, 0.2, -0.2] {
        let radius = base + shift * gap;
        match circle_count(det, radius) {
            Ok(c) => return Ok(c),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

/// Winding number of `D(λ)` on `|λ| = radius⁴`, as an integer.
pub fn circle_count(det: &dyn Determinant, radius: f64) -> Result<usize> {
    let w = contour_count(|m| {
        (0..m)
            .into_par_iter()
            .map(|j| {
                let theta = -PI / 4.0 + PI / 2.0 * (j as f64 + 0.5) / m as f64;
                let z = Complex64::from_polar(radius, theta);
                let lambda = z.powu(4);
                let r = det.eval_with_derivative(lambda)?;
                Ok((r.value, r.derivative / r.value * lambda))
            })
            .collect()
    })?;
    Ok(w.round().max(0.0) as usize)
}

/// Shared contour driver: `sample(m)` returns, at `m` equally spaced parameter values, `D` and
/// the integrand whose mean is the winding number. Trapezoid and phase-unwrapping estimates are
/// refined together until they agree on an integer.
fn contour_count(sample: impl Fn(usize) -> Result<Vec<(Complex64, Complex64)>>) -> Result<f64> {
    let mut prev: Option<f64> = None;
    let mut m = 64;
    let mut last = f64::NAN;
    while m <= 8192 {
        let vals = sample(m)?;
        if vals
            .iter()
            .any(|(d, g)| !(d.norm() > 0.0) || !g.re.is_finite() || !g.im.is_finite())
        {
            return Err(Error::ContourTooClose(f64::NAN));
        }
        let trapezoid = vals.iter().map(|(_, g)| g.re).sum::<f64>() / m as f64;
        let mut phase = 0.0;
        for j in 0..m {
            let (a, b) = (vals[j].0, vals[(j + 1) % m].0);
            phase += (b / a).arg();
        }
        let unwrapped = phase / (2.0 * PI);
        last = trapezoid;
        let settled = prev.is_some_and(|p| (p - trapezoid).abs() < 1e-3);
        if settled
            && (trapezoid - trapezoid.round()).abs() < 0.1
            && (unwrapped - trapezoid).abs() < 0.1
        {
            return Ok(trapezoid);
        }
        prev = Some(trapezoid);
        m *= 2;
    }
    Err(Error::ContourTooClose(last))
}

/// The first `n_max` eigenvalues, labelled from 1.
pub fn eigenvalues(
    det: &dyn Determinant,
    opts: &SpectrumOptions,
    n_max: usize,
) -> Result<EigenvalueTable> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let n_star = opts.n_star.max(1);
    let mut entries = if opts.real {
        low_real(det, opts, n_star)?
    } else {
        low_complex(det, opts, n_star)?
    };
    entries.truncate(n_max);
    if n_max > n_star {
        let high: Vec<EigenvalueEntry> = (n_star + 1..=n_max)
            .into_par_iter()
            .map(|n| local_eigenvalue(det, opts, n))
            .collect::<Result<_>>()?;
        entries.extend(high);
    }
    Ok(EigenvalueTable {
        entries,
        det_kind: det.describe(),
    })
}

/// The `n`-th eigenvalue by Newton iteration from the asymptotic guess, certified inside
/// `|z − π(n + offset)/arc_length| < π/(4·arc_length)`. Reliable once `n` is past the low range.
pub fn local_eigenvalue(
    det: &dyn Determinant,
    opts: &SpectrumOptions,
    n: usize,
) -> Result<EigenvalueEntry> {
    let center = opts.center(n as f64);
    let guess = initial_guess_shifted(n as f64 + opts.offset, opts.p_hat_0) / opts.arc_length;
    let radius = PI / (4.0 * opts.arc_length);
    let out = newton(det, guess, opts, radius / 2.0)?;
    let mut z = out.z;
    let mut residual = out.residual;
    let mut inside = (z - center).norm() < radius;
    if (!out.converged || !inside) && opts.real {
        if let Some(zb) = bisect_real(det, center - radius, center + radius)? {
            let polished = newton(det, Complex64::new(zb, 0.0), opts, radius / 8.0)?;
            z = if (polished.z - center).norm() < radius {
                polished.z
            } else {
                Complex64::new(zb, 0.0)
            };
            residual = residual_at(det, z)?;
            inside = true;
        }
    }
    let (lambda, zp) = finish(z, opts.real);
    Ok(EigenvalueEntry {
        n,
        lambda,
        z: zp,
        newton_residual: residual,
        certified: out.converged && inside,
        multiplicity: 1,
    })
}

/// A point on the real λ-axis parametrized by signed `s`: `λ = s⁴` for `s ≥ 0`, `−s⁴` otherwise.
fn ray_z(s: f64) -> Complex64 {
    if s >= 0.0 {
        Complex64::new(s, 0.0)
    } else {
        Complex64::from_polar(-s, PI / 4.0)
    }
}

fn real_value(det: &dyn Determinant, s: f64) -> Result<f64> {
    Ok(det.eval(ray_z(s).powu(4))?.value.re)
}

fn bisect_real(det: &dyn Determinant, lo: f64, hi: f64) -> Result<Option<f64>> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (real_value(det, a)?, real_value(det, b)?);
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = real_value(det, m)?;
        if fm == 0.0 {
            return Ok(Some(m));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a) < 1e-15 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

fn low_real(
    det: &dyn Determinant,
    opts: &SpectrumOptions,
    n_star: usize,
) -> Result<Vec<EigenvalueEntry>> {
    let radius = opts.circle_radius(n_star);
    let expected = count_zeros_disc(det, n_star, opts)?;
    let mut roots = Vec::new();
    for refine in [1usize, 4] {
        let h = PI / (16.0 * opts.arc_length * refine as f64);
        let k = (radius / h).ceil() as i64;
        let grid: Vec<f64> = (-k..=k)
            .map(|i| (i as f64 * h).clamp(-radius, radius))
            .collect();
        let vals: Vec<f64> = grid
            .par_iter()
            .map(|&s| real_value(det, s))
            .collect::<Result<_>>()?;
        let brackets: Vec<(f64, f64)> = (0..grid.len() - 1)
            .filter(|&i| vals[i] == 0.0 || vals[i].signum() != vals[i + 1].signum())
            .map(|i| (grid[i], grid[i + 1]))
            .collect();
        roots = brackets
            .par_iter()
            .map(|&(a, b)| {
                let s = bisect_real(det, a, b)?.unwrap_or(a);
                let z0 = ray_z(s);
                let polished = newton(det, z0, opts, h)?;
                // keep the polished root only if it stays in the bracket
                let lam = polished.z.powu(4).re;
                let (la, lb) = (ray_z(a).powu(4).re, ray_z(b).powu(4).re);
                let z = if polished.converged && lam >= la.min(lb) && lam <= la.max(lb) {
                    polished.z
                } else {
                    z0
                };
                Ok((z, residual_at(det, z)?))
            })
            .collect::<Result<Vec<_>>>()?;
        roots.dedup_by(|a, b| {
            (a.0.powu(4) - b.0.powu(4)).norm() < 1e-10 * b.0.powu(4).norm().max(1.0)
        });
        if roots.len() == expected {
            break;
        }
    }
    if roots.len() != expected {
        return Err(Error::CountMismatch {
            located: roots.len(),
            expected,
        });
    }
    if expected != n_star {
        return Err(Error::CountMismatch {
            located: expected,
            expected: n_star,
        });
    }
    let mut entries: Vec<EigenvalueEntry> = roots
        .into_iter()
        .map(|(z, residual)| {
            let (lambda, zp) = finish(z, true);
            EigenvalueEntry {
                n: 0,
                lambda,
                z: zp,
                newton_residual: residual,
                certified: true,
                multiplicity: 1,
            }
        })
        .collect();
    entries.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re));
    for (i, e) in entries.iter_mut().enumerate() {
        e.n = i + 1;
    }
    Ok(entries)
}

fn low_complex(
    det: &dyn Determinant,
    opts: &SpectrumOptions,
    n_star: usize,
) -> Result<Vec<EigenvalueEntry>> {
    let radius = opts.circle_radius(n_star);
    let expected = count_zeros_disc(det, n_star, opts)?;
    let step = PI / (4.0 * opts.arc_length);
    let mut starts = Vec::new();
    for n in 1..=n_star {
        let g = initial_guess_shifted(n as f64 + opts.offset, opts.p_hat_0) / opts.arc_length;
        starts.push(g);
        for j in 0..4 {
            starts.push(g + Complex64::from_polar(step / 2.0, PI / 2.0 * j as f64 + PI / 4.0));
        }
    }
    let mut roots: Vec<Complex64> = Vec::new();
    let mut total = 0;
    let mut mults = Vec::new();
    for pass in 0..2 {
        if pass == 1 {
            // fallback: a polar grid of starts over the sector
            let rings = (radius / (step / 2.0)).ceil() as usize;
            for r in 1..=rings {
                for a in 0..5 {
                    starts.push(Complex64::from_polar(
                        r as f64 * step / 2.0,
                        -PI / 4.0 + PI / 8.0 * a as f64,
                    ));
                }
            }
        }
        let found: Vec<Complex64> = starts
            .par_iter()
            .map(|&z0| newton(det, z0, opts, step / 2.0))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|o| o.converged && o.z.norm() < radius)
            .map(|o| fourth_root(o.z.powu(4)))
            .collect();
        for z in found {
            if !roots
                .iter()
                .any(|r| (r - z).norm() < 1e-8 * z.norm().max(1.0))
            {
                roots.push(z);
            }
        }
        mults = roots
            .iter()
            .map(|&r| {
                let sep = roots
                    .iter()
                    .filter(|&&o| o != r)
                    .map(|o| (o - r).norm())
                    .fold(step, f64::min);
                Ok(winding_number(det, r, 0.4 * sep)?.round().max(1.0) as usize)
            })
            .collect::<Result<Vec<_>>>()?;
        total = mults.iter().sum::<usize>();
        if total == expected {
            break;
        }
    }
    if total != expected {
        return Err(Error::CountMismatch {
            located: total,
            expected,
        });
    }
    if expected != n_star {
        return Err(Error::CountMismatch {
            located: expected,
            expected: n_star,
        });
    }
    let mut entries = Vec::new();
    for (&z, &m) in roots.iter().zip(&mults) {
        let residual = residual_at(det, z)?;
        let (lambda, zp) = finish(z, false);
        for _ in 0..m {
            entries.push(EigenvalueEntry {
                n: 0,
                lambda,
                z: zp,
                newton_residual: residual,
                certified: true,
                multiplicity: m,
            });
        }
    }
    entries.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
    for (i, e) in entries.iter_mut().enumerate() {
        e.n = i + 1;
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Function1D;
    use crate::determinant::{DeltaQDet, FreeDet, OperatorDet};

    #[test]
    fn initial_guess_values() {
        assert!((initial_guess(3, Complex64::new(0.0, 0.0)) - 3.0 * PI).norm() < 1e-15);
        let z = initial_guess(1, Complex64::new(1.0, 0.0));
        assert!((z.re - (PI + (PI * PI - 2.0).sqrt()) / 2.0).abs() < 1e-15);
        for n in 2..50 {
            for p in [-5.0, -1.0, 1.0, 5.0] {
                assert!(
                    (initial_guess(n, Complex64::new(p, 0.0)) - PI * n as f64).norm() < PI / 4.0
                );
            }
        }
    }

    #[test]
    fn free_spectrum() {
        let t = eigenvalues(&FreeDet, &SpectrumOptions::default(), 20).unwrap();
        for e in &t.entries {
            let exact = (PI * e.n as f64).powi(4);
            assert!(
                (e.lambda.re - exact).abs() < 1e-10 * exact,
                "{}: {}",
                e.n,
                e.lambda
            );
            assert!(e.certified);
        }
    }

    #[test]
    fn free_counts() {
        for n in 1..6 {
            assert_eq!(
                count_zeros_disc(&FreeDet, n, &SpectrumOptions::default()).unwrap(),
                n
            );
        }
        let d = DeltaQDet {
            gamma: Complex64::new(1.0, 0.0),
            t0: 0.3,
        };
        assert_eq!(
            count_zeros_disc(&d, 4, &SpectrumOptions::default()).unwrap(),
            4
        );
    }

    #[test]
    fn midpoint_mass_keeps_even_eigenvalues() {
        let d = DeltaQDet {
            gamma: Complex64::new(1.0, 0.0),
            t0: 0.5,
        };
        let t = eigenvalues(&d, &SpectrumOptions::default(), 12).unwrap();
        for n in [2usize, 4, 10, 12] {
            let exact = (PI * n as f64).powi(4);
            assert!((t.get(n).unwrap().lambda.re - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn constant_p_spectrum() {
        let op = FourthOrderOperator::new(Function1D::constant(2.0), Function1D::zero());
        let opts = SpectrumOptions::for_operator(&op);
        let t = eigenvalues(&OperatorDet { op }, &opts, 12).unwrap();
        for e in &t.entries {
            let k = PI * e.n as f64;
            let exact = k.powi(4) - 4.0 * k * k;
            assert!(
                (e.lambda.re - exact).abs() < 1e-9 * exact.abs(),
                "{}: {} vs {exact}",
                e.n,
                e.lambda
            );
        }
    }

    #[test]
    fn complex_coefficients_multi_start() {
        let op = FourthOrderOperator::new(
            Function1D::sin_mode(1, 0.5),
            Function1D::complex(Function1D::zero(), Function1D::constant(3.0)),
        );
        let opts = SpectrumOptions {
            n_star: 4,
            ..SpectrumOptions::for_operator(&op)
        };
        let t = eigenvalues(&OperatorDet { op: op.clone() }, &opts, 6).unwrap();
        assert_eq!(t.entries.len(), 6);
        for e in &t.entries {
            assert!(e.certified && e.newton_residual < 1e-10);
            let d = crate::determinant::char_det(&op, e.lambda).unwrap();
            let d_near = crate::determinant::char_det(&op, e.lambda * 1.001).unwrap();
            assert!(
                d.value.norm() * (2.0 * d.log_scale).exp()
                    < 1e-8 * d_near.value.norm() * (2.0 * d_near.log_scale).exp()
            );
        }
        // constant imaginary potential shifts every eigenvalue by 3i
        for e in &t.entries {
            assert!((e.lambda.im - 3.0).abs() < 1e-6, "{}", e.lambda);
        }
    }
}

//! Coefficient functions on `[0, 1]`, beam data built from `(α, β, Q)`, and Fourier coefficients.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad::{self, CumulativeIntegral};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Number of grid points used by sampled representations unless data says otherwise.
pub const DEFAULT_SAMPLES: usize = 2049;

type Closure = Arc<dyn Fn(f64) -> [f64; 4] + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Zero,
    Closure { f: Closure, order: usize },
    Samples(Arc<Sampled>),
    Fourier(Arc<FourierSeries>),
}

impl Repr {
    fn order(&self) -> usize {
        match self {
            Repr::Zero | Repr::Fourier(_) => 3,
            Repr::Closure { order, .. } => *order,
            Repr::Samples(s) => s.order(),
        }
    }

    fn eval_all(&self, x: f64) -> [f64; 4] {
        match self {
            Repr::Zero => [0.0; 4],
            Repr::Closure { f, .. } => f(x),
            Repr::Samples(s) => s.eval_all(x),
            Repr::Fourier(s) => s.eval_all(x),
        }
    }
}

/// Finite Fourier series `c + Σ (a_n cos 2πnx + b_n sin 2πnx)`, `n = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierSeries {
    fn eval_all(&self, x: f64) -> [f64; 4] {
        let mut out = [self.constant, 0.0, 0.0, 0.0];
        let terms = self.cos.len().max(self.sin.len());
        for n in 1..=terms {
            let a = self.cos.get(n - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(n - 1).copied().unwrap_or(0.0);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let w = 2.0 * PI * n as f64;
            let (s, c) = (w * x).sin_cos();
            // derivatives of a cos + b sin cycle through (c, -s, -c, s) and (s, c, -s, -c)
            let u = a * c + b * s;
            let v = -a * s + b * c;
            out[0] += u;
            out[1] += w * v;
            out[2] -= w * w * u;
            out[3] -= w * w * w * v;
        }
        out
    }
}

/// Uniform-grid samples. `levels[0]` holds values, `levels[k]` the k-th derivative if supplied.
#[derive(Debug, Clone)]
struct Sampled {
    levels: Vec<Vec<f64>>,
    /// spline slopes of the highest supplied level
    slopes: Vec<f64>,
}

fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, h: f64, u: f64) -> [f64; 4] {
    let (u2, u3) = (u * u, u * u * u);
    let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
        + (u3 - 2.0 * u2 + u) * h * m0
        + (-2.0 * u3 + 3.0 * u2) * y1
        + (u3 - u2) * h * m1;
    let d1 = ((6.0 * u2 - 6.0 * u) * y0
        + (3.0 * u2 - 4.0 * u + 1.0) * h * m0
        + (-6.0 * u2 + 6.0 * u) * y1
        + (3.0 * u2 - 2.0 * u) * h * m1)
        / h;
    let d2 = ((12.0 * u - 6.0) * y0
        + (6.0 * u - 4.0) * h * m0
        + (-12.0 * u + 6.0) * y1
        + (6.0 * u - 2.0) * h * m1)
        / (h * h);
    let d3 = (12.0 * y0 + 6.0 * h * m0 - 12.0 * y1 + 6.0 * h * m1) / (h * h * h);
    [v, d1, d2, d3]
}

/// Slopes of the C² cubic spline through uniform samples, with fourth-order one-sided end slopes.
fn spline_slopes(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let h = 1.0 / (n - 1) as f64;
    let mut m = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            m[i] = (y[b] - y[a]) / (h * (b - a) as f64);
        }
        return m;
    }
    m[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
    m[n - 1] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4]
        + 3.0 * y[n - 5])
        / (12.0 * h);
    // tridiagonal system m[i-1] + 4 m[i] + m[i+1] = 3 (y[i+1] - y[i-1]) / h for interior i
    let k = n - 2;
    let mut diag = vec![4.0; k];
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 3.0 * (y[i + 1] - y[i - 1]) / h)
        .collect();
    rhs[0] -= m[0];
    rhs[k - 1] -= m[n - 1];
    for i in 1..k {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for i in (0..k - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    m
}

impl Sampled {
    fn new(levels: Vec<Vec<f64>>) -> Self {
        let slopes = spline_slopes(levels.last().unwrap());
        Sampled { levels, slopes }
    }

    fn order(&self) -> usize {
        (self.levels.len() + 1).min(3)
    }

    fn eval_all(&self, x: f64) -> [f64; 4] {
        let n = self.levels[0].len();
        let h = 1.0 / (n - 1) as f64;
        let x = x.clamp(0.0, 1.0);
        let i = ((x / h).floor() as usize).min(n - 2);
        let u = (x - i as f64 * h) / h;
        let top = self.levels.len() - 1;
        let mut out = [0.0; 4];
        // orders below the top supplied level use Hermite interpolation of (f^(j), f^(j+1))
        for (j, slot) in out.iter_mut().enumerate().take(top) {
            let (y, m) = (&self.levels[j], &self.levels[j + 1]);
            *slot = hermite(y[i], y[i + 1], m[i], m[i + 1], h, u)[0];
        }
        let y = &self.levels[top];
        let s = hermite(y[i], y[i + 1], self.slopes[i], self.slopes[i + 1], h, u);
        for (k, slot) in out.iter_mut().enumerate().skip(top) {
            *slot = s[k - top];
        }
        out
    }
}

/// A real- or complex-valued function on `[0, 1]` with up to three trusted derivatives.
#[derive(Clone)]
pub struct Function1D {
    re: Repr,
    im: Option<Repr>,
}

impl fmt::Debug for Function1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = |r: &Repr| match r {
            Repr::Zero => "zero",
            Repr::Closure { .. } => "closure",
            Repr::Samples(_) => "samples",
            Repr::Fourier(_) => "fourier",
        };
        write!(f, "Function1D({}", kind(&self.re))?;
        if let Some(im) = &self.im {
            write!(f, " + i·{}", kind(im))?;
        }
        write!(f, ", order {})", self.smoothness_order())
    }
}

impl Function1D {
    pub fn zero() -> Self {
        Function1D {
            re: Repr::Zero,
            im: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::fourier(c, vec![], vec![])
    }

    /// `c + Σ cos[n-1]·cos(2πnx) + Σ sin[n-1]·sin(2πnx)`.
    pub fn fourier(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Function1D {
            re: Repr::Fourier(Arc::new(FourierSeries { constant, cos, sin })),
            im: None,
        }
    }

    /// `amp · sin(2πkx)`.
    pub fn sin_mode(k: usize, amp: f64) -> Self {
        let mut s = vec![0.0; k];
        s[k - 1] = amp;
        Self::fourier(0.0, vec![], s)
    }

    /// `amp · cos(2πkx)`.
    pub fn cos_mode(k: usize, amp: f64) -> Self {
        let mut c = vec![0.0; k];
        c[k - 1] = amp;
        Self::fourier(0.0, c, vec![])
    }

    /// A closure returning `[f, f', f'', f''']`; only the first `order + 1` entries are trusted.
    pub fn from_fn(order: usize, f: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static) -> Self {
        Function1D {
            re: Repr::Closure {
                f: Arc::new(f),
                order: order.min(3),
            },
            im: None,
        }
    }

    /// Samples of `f` on a uniform grid, optionally with samples of `f', f'', f'''`.
    pub fn samples(values: Vec<f64>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidInput(
                "at least two samples are required".into(),
            ));
        }
        if derivs.len() > 3 {
            return Err(Error::InvalidInput(
                "at most three derivative sample arrays".into(),
            ));
        }
        if derivs.iter().any(|d| d.len() != n) {
            return Err(Error::InvalidInput(
                "derivative samples must match the value grid".into(),
            ));
        }
        if values
            .iter()
            .chain(derivs.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("sample data".into()));
        }
        let mut levels = vec![values];
        levels.extend(derivs);
        Ok(Function1D {
            re: Repr::Samples(Arc::new(Sampled::new(levels))),
            im: None,
        })
    }

    /// Samples `f` (and its derivatives up to `order`) on the default grid.
    pub fn sampled_from(f: &Function1D, order: usize) -> Result<Self> {
        let n = DEFAULT_SAMPLES;
        let grid: Vec<[f64; 4]> = (0..n)
            .map(|i| f.re.eval_all(i as f64 / (n - 1) as f64))
            .collect();
        let order = order.min(f.smoothness_order());
        let values = grid.iter().map(|g| g[0]).collect();
        let derivs = (1..=order)
            .map(|k| grid.iter().map(|g| g[k]).collect())
            .collect();
        Self::samples(values, derivs)
    }

    /// Combine real and imaginary parts into one complex-valued function.
    pub fn complex(re: Function1D, im: Function1D) -> Self {
        Function1D {
            re: re.re,
            im: Some(im.re),
        }
    }

    pub fn smoothness_order(&self) -> usize {
        let r = self.re.order();
        match &self.im {
            Some(im) => r.min(im.order()),
            None => r,
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.as_ref().is_none_or(|r| matches!(r, Repr::Zero))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.re, Repr::Zero) && self.is_real()
    }

    pub fn real_part(&self) -> Function1D {
        Function1D {
            re: self.re.clone(),
            im: None,
        }
    }

    pub fn imag_part(&self) -> Function1D {
        Function1D {
            re: self.im.clone().unwrap_or(Repr::Zero),
            im: None,
        }
    }

    /// Value of the real part.
    pub fn eval(&self, x: f64) -> f64 {
        self.re.eval_all(x)[0]
    }

    pub fn eval_c(&self, x: f64) -> Complex64 {
        let im = self.im.as_ref().map_or(0.0, |r| r.eval_all(x)[0]);
        Complex64::new(self.eval(x), im)
    }

    fn check_order(&self, k: usize) -> Result<()> {
        let avail = self.smoothness_order();
        if k > avail {
            return Err(Error::Smoothness {
                requested: k,
                available: avail,
            });
        }
        Ok(())
    }

    /// `k`-th derivative of the real part.
    pub fn deriv(&self, k: usize, x: f64) -> Result<f64> {
        self.check_order(k)?;
        Ok(self.re.eval_all(x)[k])
    }

    pub fn deriv_c(&self, k: usize, x: f64) -> Result<Complex64> {
        self.check_order(k)?;
        let im = self.im.as_ref().map_or(0.0, |r| r.eval_all(x)[k]);
        Ok(Complex64::new(self.re.eval_all(x)[k], im))
    }

    /// All trusted derivatives of the real part as a jet.
    pub fn jet(&self, x: f64) -> Jet {
        Jet::new(self.re.eval_all(x), self.smoothness_order())
    }

    /// `[f, f', f'', f''']` as complex numbers; entries above the smoothness order are not trusted.
    pub fn eval_all_c(&self, x: f64) -> [Complex64; 4] {
        let r = self.re.eval_all(x);
        let i = self.im.as_ref().map_or([0.0; 4], |im| im.eval_all(x));
        [0, 1, 2, 3].map(|k| Complex64::new(r[k], i[k]))
    }

    /// `a·f + b·g` (real coefficients).
    pub fn linear_combination(a: f64, f: &Function1D, b: f64, g: &Function1D) -> Function1D {
        if let (Repr::Fourier(x), Repr::Fourier(y), true, true) =
            (&f.re, &g.re, f.is_real(), g.is_real())
        {
            let comb = |u: &[f64], v: &[f64]| -> Vec<f64> {
                (0..u.len().max(v.len()))
                    .map(|i| {
                        a * u.get(i).copied().unwrap_or(0.0) + b * v.get(i).copied().unwrap_or(0.0)
                    })
                    .collect()
            };
            return Function1D::fourier(
                a * x.constant + b * y.constant,
                comb(&x.cos, &y.cos),
                comb(&x.sin, &y.sin),
            );
        }
        let part = |p: Repr, q: Repr| -> Repr {
            let order = p.order().min(q.order());
            Repr::Closure {
                f: Arc::new(move |x| {
                    let (u, v) = (p.eval_all(x), q.eval_all(x));
                    [0, 1, 2, 3].map(|k| a * u[k] + b * v[k])
                }),
                order,
            }
        };
        let re = part(f.re.clone(), g.re.clone());
        let im = if f.is_real() && g.is_real() {
            None
        } else {
            Some(part(
                f.im.clone().unwrap_or(Repr::Zero),
                g.im.clone().unwrap_or(Repr::Zero),
            ))
        };
        Function1D { re, im }
    }

    pub fn scaled(&self, c: f64) -> Function1D {
        Function1D::linear_combination(c, self, 0.0, &Function1D::zero())
    }

    /// The Fourier data if this is a real Fourier-series function.
    pub fn as_fourier(&self) -> Option<&FourierSeries> {
        match (&self.re, self.is_real()) {
            (Repr::Fourier(s), true) => Some(s),
            (Repr::Zero, true) => None,
            _ => None,
        }
    }
}

/// JSON description of a coefficient function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoefficientSpec {
    Zero,
    Fourier {
        #[serde(rename = "const", default)]
        constant: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples {
        values: Vec<f64>,
        #[serde(default)]
        derivs: Vec<Vec<f64>>,
    },
}

impl CoefficientSpec {
    pub fn build(&self) -> Result<Function1D> {
        match self {
            CoefficientSpec::Zero => Ok(Function1D::zero()),
            CoefficientSpec::Fourier { constant, cos, sin } => {
                if !constant.is_finite() || cos.iter().chain(sin).any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("Fourier amplitudes".into()));
                }
                Ok(Function1D::fourier(*constant, cos.clone(), sin.clone()))
            }
            CoefficientSpec::Samples { values, derivs } => {
                Function1D::samples(values.clone(), derivs.clone())
            }
        }
    }

    /// Parse the shorthand `sin:K[:A]`, `cos:K[:A]`, `const:C` or `zero`; terms may be joined with `+`.
    pub fn parse_shorthand(s: &str) -> Result<CoefficientSpec> {
        let mut constant = 0.0;
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        let bad = || Error::Config(format!("cannot parse coefficient shorthand '{s}'"));
        for term in s.split('+').map(str::trim) {
            let parts: Vec<&str> = term.split(':').collect();
            match parts.as_slice() {
                ["zero"] => {}
                ["const", c] => constant += c.parse::<f64>().map_err(|_| bad())?,
                [kind @ ("sin" | "cos"), k, rest @ ..] => {
                    let k: usize = k.parse().map_err(|_| bad())?;
                    if k == 0 || rest.len() > 1 {
                        return Err(bad());
                    }
                    let amp = match rest.first() {
                        Some(a) => a.parse::<f64>().map_err(|_| bad())?,
                        None => 1.0,
                    };
                    let v = if *kind == "sin" { &mut sin } else { &mut cos };
                    if v.len() < k {
                        v.resize(k, 0.0);
                    }
                    v[k - 1] += amp;
                }
                _ => return Err(bad()),
            }
        }
        Ok(CoefficientSpec::Fourier { constant, cos, sin })
    }
}

/// Fourier coefficients `f̂₀ = ∫f`, `f̂cₙ = ∫f cos 2πnt`, `f̂sₙ = ∫f sin 2πnt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTriple {
    pub f_hat_0: f64,
    /// `f_hat_c[n-1]` is f̂cₙ
    pub f_hat_c: Vec<f64>,
    pub f_hat_s: Vec<f64>,
}

impl FourierTriple {
    pub fn zeros(n_max: usize) -> Self {
        FourierTriple {
            f_hat_0: 0.0,
            f_hat_c: vec![0.0; n_max],
            f_hat_s: vec![0.0; n_max],
        }
    }

    pub fn c(&self, n: usize) -> f64 {
        self.f_hat_c.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn s(&self, n: usize) -> f64 {
        self.f_hat_s.get(n - 1).copied().unwrap_or(0.0)
    }
}

/// Integral of `f(t)·cos(2πnt)` (or sine) with panels no longer than `1/(8n)`.
pub fn oscillatory_integral(f: &(impl Fn(f64) -> f64 + ?Sized), n: usize, cosine: bool) -> f64 {
    let w = 2.0 * PI * n as f64;
    let g = |t: f64| {
        let (s, c) = (w * t).sin_cos();
        f(t) * if cosine { c } else { s }
    };
    quad::integrate_panels(g, 0.0, 1.0, (8 * n).max(4))
}

/// Fourier coefficients of the real part of `f` up to `n_max`.
pub fn fourier_coefficients(f: &Function1D, n_max: usize) -> FourierTriple {
    if let Some(s) = f.as_fourier() {
        // exact for finite series
        let get = |v: &[f64], n: usize| 0.5 * v.get(n - 1).copied().unwrap_or(0.0);
        return FourierTriple {
            f_hat_0: s.constant,
            f_hat_c: (1..=n_max).map(|n| get(&s.cos, n)).collect(),
            f_hat_s: (1..=n_max).map(|n| get(&s.sin, n)).collect(),
        };
    }
    if matches!(f.re, Repr::Zero) {
        return FourierTriple::zeros(n_max);
    }
    let ev = |t: f64| f.eval(t);
    FourierTriple {
        f_hat_0: quad::integrate_panels(ev, 0.0, 1.0, 4),
        f_hat_c: (1..=n_max)
            .map(|n| oscillatory_integral(&ev, n, true))
            .collect(),
        f_hat_s: (1..=n_max)
            .map(|n| oscillatory_integral(&ev, n, false))
            .collect(),
    }
}

/// Fourier coefficients computed by quadrature even for Fourier-series input.
pub fn fourier_coefficients_quadrature(f: &Function1D, n_max: usize) -> FourierTriple {
    let ev = |t: f64| f.eval(t);
    FourierTriple {
        f_hat_0: quad::integrate_panels(ev, 0.0, 1.0, 4),
        f_hat_c: (1..=n_max)
            .map(|n| oscillatory_integral(&ev, n, true))
            .collect(),
        f_hat_s: (1..=n_max)
            .map(|n| oscillatory_integral(&ev, n, false))
            .collect(),
    }
}

const CUMULATIVE_PANELS: usize = 4096;

/// Beam data: `a = exp(4∫α)`, `b = b0·exp(4∫β)` and the derived quantities.
#[derive(Clone)]
pub struct BeamCoefficients {
    pub alpha: Function1D,
    pub beta: Function1D,
    pub q: Function1D,
    pub b0: f64,
    int_alpha: Arc<CumulativeIntegral>,
    int_beta: Arc<CumulativeIntegral>,
}

impl fmt::Debug for BeamCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BeamCoefficients")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("q", &self.q)
            .field("b0", &self.b0)
            .finish()
    }
}

pub fn build_beam(
    alpha: Function1D,
    beta: Function1D,
    q: Function1D,
    b0: f64,
) -> Result<BeamCoefficients> {
    for (name, f) in [("alpha", &alpha), ("beta", &beta), ("Q", &q)] {
        if !f.is_real() {
            return Err(Error::NonReal(name.into()));
        }
    }
    if !(b0 > 0.0) || !b0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "b0 must be positive, got {b0}"
        )));
    }
    let (fa, fb) = (alpha.clone(), beta.clone());
    let int_alpha = Arc::new(CumulativeIntegral::new(&|x| fa.eval(x), CUMULATIVE_PANELS));
    let int_beta = Arc::new(CumulativeIntegral::new(&|x| fb.eval(x), CUMULATIVE_PANELS));
    Ok(BeamCoefficients {
        alpha,
        beta,
        q,
        b0,
        int_alpha,
        int_beta,
    })
}

/// Rescale `b` by `(∫ξ)^{-4}` so that `∫₀¹ ξ dx = 1`.
pub fn normalize_beam(beam: &BeamCoefficients) -> BeamCoefficients {
    let m = beam.xi_integral();
    let mut out = beam.clone();
    out.b0 = beam.b0 * m.powi(-4);
    out
}

impl BeamCoefficients {
    /// The uniform beam `a = b = 1`, `Q = 0`.
    pub fn identity() -> Self {
        build_beam(
            Function1D::zero(),
            Function1D::zero(),
            Function1D::zero(),
            1.0,
        )
        .expect("identity beam")
    }

    pub fn int_alpha(&self, x: f64) -> f64 {
        self.int_alpha.eval(&|s| self.alpha.eval(s), x)
    }

    pub fn int_beta(&self, x: f64) -> f64 {
        self.int_beta.eval(&|s| self.beta.eval(s), x)
    }

    pub fn a(&self, x: f64) -> f64 {
        (4.0 * self.int_alpha(x)).exp()
    }

    pub fn b(&self, x: f64) -> f64 {
        self.b0 * (4.0 * self.int_beta(x)).exp()
    }

    pub fn xi(&self, x: f64) -> f64 {
        self.b0.powf(0.25) * (self.int_beta(x) - self.int_alpha(x)).exp()
    }

    /// `∫₀¹ ξ dx`.
    pub fn xi_integral(&self) -> f64 {
        quad::integrate_panels(|x| self.xi(x), 0.0, 1.0, 16)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.xi_integral() - 1.0).abs() < tol
    }

    /// Smallest smoothness order of α and β.
    pub fn order(&self) -> usize {
        self.alpha
            .smoothness_order()
            .min(self.beta.smoothness_order())
    }

    pub fn alpha_jet(&self, x: f64) -> Jet {
        self.alpha.jet(x)
    }

    pub fn beta_jet(&self, x: f64) -> Jet {
        self.beta.jet(x)
    }

    /// Jet of ξ; its order is one more than that of α and β (capped at 3).
    pub fn xi_jet(&self, x: f64) -> Jet {
        let em = self.eps_minus_jet(x);
        let i = Jet::new(
            [
                self.int_beta(x) - self.int_alpha(x),
                em.d[0],
                em.d[1],
                em.d[2],
            ],
            (em.order + 1).min(3),
        );
        i.exp().scale(self.b0.powf(0.25))
    }

    pub fn eps_plus_jet(&self, x: f64) -> Jet {
        self.beta_jet(x) + self.alpha_jet(x)
    }

    pub fn eps_minus_jet(&self, x: f64) -> Jet {
        self.beta_jet(x) - self.alpha_jet(x)
    }

    pub fn eps_jet(&self, x: f64) -> Jet {
        self.eps_plus_jet(x) * self.eps_minus_jet(x)
    }

    /// `s = (α + 3β)/2`.
    pub fn s_jet(&self, x: f64) -> Jet {
        (self.alpha_jet(x) + self.beta_jet(x).scale(3.0)).scale(0.5)
    }

    /// `κ = (3α + 5β)/(2ξ)`.
    pub fn kappa_jet(&self, x: f64) -> Jet {
        (self.alpha_jet(x).scale(3.0) + self.beta_jet(x).scale(5.0)).scale(0.5) / self.xi_jet(x)
    }

    /// `ϰ = (5α² + 5β² + 6αβ)/4`.
    pub fn varkappa_jet(&self, x: f64) -> Jet {
        let (a, b) = (self.alpha_jet(x), self.beta_jet(x));
        ((a * a).scale(5.0) + (b * b).scale(5.0) + (a * b).scale(6.0)).scale(0.25)
    }

    pub fn kappa(&self, x: f64) -> f64 {
        let (a, b) = (self.alpha.eval(x), self.beta.eval(x));
        (3.0 * a + 5.0 * b) / (2.0 * self.xi(x))
    }

    pub fn varkappa(&self, x: f64) -> f64 {
        let (a, b) = (self.alpha.eval(x), self.beta.eval(x));
        (5.0 * a * a + 5.0 * b * b + 6.0 * a * b) / 4.0
    }

    pub fn s(&self, x: f64) -> f64 {
        (self.alpha.eval(x) + 3.0 * self.beta.eval(x)) / 2.0
    }

    pub fn eps_plus(&self, x: f64) -> f64 {
        self.beta.eval(x) + self.alpha.eval(x)
    }

    pub fn eps_minus(&self, x: f64) -> f64 {
        self.beta.eval(x) - self.alpha.eval(x)
    }

    pub fn eps(&self, x: f64) -> f64 {
        self.eps_plus(x) * self.eps_minus(x)
    }

    fn derived(
        &self,
        order: usize,
        f: impl Fn(&BeamCoefficients, f64) -> Jet + Send + Sync + 'static,
    ) -> Function1D {
        let beam = self.clone();
        Function1D::from_fn(order, move |x| f(&beam, x).d)
    }

    pub fn a_function(&self) -> Function1D {
        let beam = self.clone();
        let o = (self.alpha.smoothness_order() + 1).min(3);
        Function1D::from_fn(o, move |x| {
            let al = beam.alpha_jet(x);
            Jet::new(
                [
                    4.0 * beam.int_alpha(x),
                    4.0 * al.d[0],
                    4.0 * al.d[1],
                    4.0 * al.d[2],
                ],
                o,
            )
            .exp()
            .d
        })
    }

    pub fn b_function(&self) -> Function1D {
        let beam = self.clone();
        let o = (self.beta.smoothness_order() + 1).min(3);
        Function1D::from_fn(o, move |x| {
            let be = beam.beta_jet(x);
            Jet::new(
                [
                    4.0 * beam.int_beta(x),
                    4.0 * be.d[0],
                    4.0 * be.d[1],
                    4.0 * be.d[2],
                ],
                o,
            )
            .exp()
            .scale(beam.b0)
            .d
        })
    }

    pub fn xi_function(&self) -> Function1D {
        self.derived((self.order() + 1).min(3), |b, x| b.xi_jet(x))
    }

    pub fn kappa_function(&self) -> Function1D {
        self.derived(self.order(), |b, x| b.kappa_jet(x))
    }

    pub fn varkappa_function(&self) -> Function1D {
        self.derived(self.order(), |b, x| b.varkappa_jet(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_derivatives_are_exact() {
        let f = Function1D::fourier(0.5, vec![0.0, 2.0], vec![1.0]);
        let x: f64 = 0.3;
        let w1 = 2.0 * PI;
        let w2 = 4.0 * PI;
        let expect3 = -w1.powi(3) * (w1 * x).cos() + 2.0 * w2.powi(3) * (w2 * x).sin();
        assert!((f.deriv(3, x).unwrap() - expect3).abs() < 1e-9);
        assert!((f.eval(x) - (0.5 + 2.0 * (w2 * x).cos() + (w1 * x).sin())).abs() < 1e-14);
    }

    #[test]
    fn derivative_above_order_is_error() {
        let f = Function1D::from_fn(1, |x| [x, 1.0, 0.0, 0.0]);
        assert!(f.deriv(1, 0.2).is_ok());
        assert_eq!(
            f.deriv(2, 0.2),
            Err(Error::Smoothness {
                requested: 2,
                available: 1
            })
        );
    }

    #[test]
    fn samples_interpolate_smooth_data() {
        let exact = Function1D::fourier(0.0, vec![0.3], vec![1.0, 0.2]);
        let plain = Function1D::sampled_from(&exact, 0).unwrap();
        let full = Function1D::sampled_from(&exact, 3).unwrap();
        assert_eq!(plain.smoothness_order(), 2);
        assert_eq!(full.smoothness_order(), 3);
        for &x in &[0.0, 0.013, 0.37, 0.999, 1.0] {
            assert!((plain.eval(x) - exact.eval(x)).abs() < 1e-10);
            assert!((plain.deriv(1, x).unwrap() - exact.deriv(1, x).unwrap()).abs() < 1e-5);
            assert!((full.deriv(1, x).unwrap() - exact.deriv(1, x).unwrap()).abs() < 1e-9);
            assert!((full.deriv(3, x).unwrap() - exact.deriv(3, x).unwrap()).abs() < 1e-2);
        }
    }

    #[test]
    fn spec_json_roundtrip() {
        let s: CoefficientSpec =
            serde_json::from_str(r#"{"kind":"fourier","const":1.5,"cos":[0.5],"sin":[]}"#).unwrap();
        let f = s.build().unwrap();
        assert!((f.eval(0.0) - 2.0).abs() < 1e-15);
        let z: CoefficientSpec = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert!(z.build().unwrap().is_zero());
        let bad = serde_json::from_str::<CoefficientSpec>(r#"{"kind":"wavelet"}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn shorthand() {
        let s = CoefficientSpec::parse_shorthand("sin:1 + cos:3:0.5 + const:2").unwrap();
        let f = s.build().unwrap();
        let x: f64 = 0.1;
        let e = (2.0 * PI * x).sin() + 0.5 * (6.0 * PI * x).cos() + 2.0;
        assert!((f.eval(x) - e).abs() < 1e-14);
        assert!(CoefficientSpec::parse_shorthand("tan:1").is_err());
    }

    #[test]
    fn fourier_coefficient_examples() {
        let one = fourier_coefficients_quadrature(&Function1D::constant(1.0), 5);
        assert!((one.f_hat_0 - 1.0).abs() < 1e-14);
        assert!(one
            .f_hat_c
            .iter()
            .chain(&one.f_hat_s)
            .all(|v| v.abs() < 1e-13));
        let c = fourier_coefficients_quadrature(&Function1D::cos_mode(1, 1.0), 5);
        assert!((c.c(1) - 0.5).abs() < 1e-13 && c.c(2).abs() < 1e-13 && c.f_hat_0.abs() < 1e-13);
        let s = fourier_coefficients_quadrature(&Function1D::sin_mode(2, 1.0), 5);
        assert!((s.s(2) - 0.5).abs() < 1e-13 && s.s(1).abs() < 1e-13);
        let z = fourier_coefficients(&Function1D::zero(), 3);
        assert_eq!(z, FourierTriple::zeros(3));
    }

    #[test]
    fn identity_beam() {
        let b = BeamCoefficients::identity();
        for &x in &[0.0, 0.4, 1.0] {
            assert_eq!(b.a(x), 1.0);
            assert_eq!(b.b(x), 1.0);
            assert_eq!(b.xi(x), 1.0);
            assert_eq!(b.kappa(x), 0.0);
            assert_eq!(b.varkappa(x), 0.0);
        }
    }

    #[test]
    fn constant_alpha_beam() {
        let c = 0.7;
        let b = build_beam(
            Function1D::constant(c),
            Function1D::zero(),
            Function1D::zero(),
            1.0,
        )
        .unwrap();
        for &x in &[0.0, 0.25, 0.8, 1.0] {
            assert!((b.a(x) / (4.0 * c * x).exp() - 1.0).abs() < 1e-14);
            assert!((b.xi(x) - (-c * x).exp()).abs() < 1e-14);
        }
        assert_eq!(b.a(0.0), 1.0);
    }

    #[test]
    fn equal_alpha_beta_beam() {
        let al = Function1D::sin_mode(1, 0.4);
        let b = build_beam(al.clone(), al.clone(), Function1D::zero(), 1.0).unwrap();
        for &x in &[0.1, 0.6] {
            assert!((b.xi(x) - 1.0).abs() < 1e-15);
            assert!(b.eps_minus(x).abs() < 1e-15);
            assert!((b.varkappa(x) - 4.0 * al.eval(x).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_of_constant_beta() {
        let c: f64 = 0.8;
        let b = build_beam(
            Function1D::zero(),
            Function1D::constant(c),
            Function1D::zero(),
            1.0,
        )
        .unwrap();
        let m = ((c).exp() - 1.0) / c;
        assert!((b.xi_integral() - m).abs() < 1e-13);
        let nb = normalize_beam(&b);
        assert!((nb.b0 - m.powi(-4)).abs() < 1e-13);
        assert!((nb.xi_integral() - 1.0).abs() < 1e-13);
        let nn = normalize_beam(&nb);
        assert!((nn.b0 - nb.b0).abs() < 1e-12);
    }

    #[test]
    fn xi_jet_matches_identity() {
        let b = build_beam(
            Function1D::sin_mode(1, 0.3),
            Function1D::cos_mode(2, 0.2),
            Function1D::zero(),
            2.0,
        )
        .unwrap();
        for &x in &[0.05, 0.5, 0.93] {
            let j = b.xi_jet(x);
            assert!((j.d[0] - b.xi(x)).abs() < 1e-14);
            // ξ'/ξ = ε₋
            assert!((j.d[1] / j.d[0] - b.eps_minus(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn non_real_and_bad_b0_rejected() {
        let c = Function1D::complex(Function1D::zero(), Function1D::constant(1.0));
        assert!(matches!(
            build_beam(c, Function1D::zero(), Function1D::zero(), 1.0),
            Err(Error::NonReal(_))
        ));
        assert!(build_beam(
            Function1D::zero(),
            Function1D::zero(),
            Function1D::zero(),
            0.0
        )
        .is_err());
    }
}

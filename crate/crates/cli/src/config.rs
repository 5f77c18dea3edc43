//! Experiment configuration: the JSON document plus the command-line overrides.

use beamspec::coefficients::{
    build_beam, normalize_beam, BeamCoefficients, CoefficientSpec, Function1D,
};
use beamspec::determinant::{
    BeamDet, BoundaryCondition, DeltaPDet, DeltaQDet, Determinant, FourthOrderOperator, OperatorDet,
};
use beamspec::spectrum::SpectrumOptions;
use beamspec::Complex64;
use serde::Deserialize;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    H,
    Eb,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub p: Option<CoefficientSpec>,
    pub q: Option<CoefficientSpec>,
    pub alpha: Option<CoefficientSpec>,
    pub beta: Option<CoefficientSpec>,
    #[serde(rename = "Q")]
    pub big_q: Option<CoefficientSpec>,
    pub b0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub newton: Option<f64>,
    /// finite-difference step for `perturb`
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub operator: OperatorKind,
    #[serde(default)]
    pub coefficients: Coefficients,
    pub bc: Option<BoundaryCondition>,
    pub n_range: Option<[usize; 2]>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// The object a command works on.
#[derive(Clone, Debug)]
pub enum Problem {
    H {
        op: FourthOrderOperator,
        label: String,
    },
    /// `raw` is the beam as configured; commands needing `∫ξ = 1` use its normalization
    Beam {
        raw: BeamCoefficients,
        bc: BoundaryCondition,
        label: String,
    },
    DeltaQ {
        gamma: f64,
        t0: f64,
    },
    DeltaP {
        gamma: f64,
    },
}

fn build(spec: &Option<CoefficientSpec>) -> Result<Function1D, CliError> {
    match spec {
        Some(s) => s.build().map_err(|e| CliError::Config(e.to_string())),
        None => Ok(Function1D::zero()),
    }
}

pub fn shorthand(s: &str) -> Result<Function1D, CliError> {
    CoefficientSpec::parse_shorthand(s)
        .and_then(|c| c.build())
        .map_err(|e| CliError::Config(e.to_string()))
}

/// `H` with `q = p'' + p²`, whose spectrum is the square of the Dirichlet spectrum of `−y'' − p y`.
pub fn square_operator(p: Function1D) -> FourthOrderOperator {
    let pp = p.clone();
    let q = Function1D::from_fn(0, move |t| {
        [
            pp.deriv(2, t).unwrap_or(f64::NAN) + pp.eval(t).powi(2),
            0.0,
            0.0,
            0.0,
        ]
    });
    FourthOrderOperator::new(p, q)
}

pub struct ExampleArgs<'a> {
    pub name: &'a str,
    pub alpha: Option<&'a str>,
    pub gamma: f64,
    pub t0: f64,
}

/// The worked examples: point masses in `q` (1) and `p` (2), an operator square (3), and the
/// beam classes `ab = 1` (4.1), `a = 1` (4.2) and `a = b` (4.3).
pub fn example(args: &ExampleArgs) -> Result<Problem, CliError> {
    let coefficient = |default: &str| shorthand(args.alpha.unwrap_or(default));
    let beam = |alpha: Function1D, beta: Function1D, label: &str| -> Result<Problem, CliError> {
        let raw = build_beam(alpha, beta, Function1D::zero(), 1.0)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Problem::Beam {
            raw: normalize_beam(&raw),
            bc: BoundaryCondition::Ebdc,
            label: label.into(),
        })
    };
    match args.name {
        "1" => Ok(Problem::DeltaQ {
            gamma: args.gamma,
            t0: args.t0,
        }),
        "2" => Ok(Problem::DeltaP { gamma: args.gamma }),
        "3" => Ok(Problem::H {
            op: square_operator(coefficient("sin:1:0.5")?),
            label: "example 3".into(),
        }),
        "4.1" => {
            let a = coefficient("sin:1")?;
            beam(a.clone(), a.scaled(-1.0), "example 4.1")
        }
        "4.2" => beam(Function1D::zero(), coefficient("sin:1")?, "example 4.2"),
        "4.3" => {
            let a = coefficient("sin:1")?;
            beam(a.clone(), a, "example 4.3")
        }
        other => Err(CliError::Config(format!(
            "unknown example '{other}' (expected 1, 2, 3, 4.1, 4.2 or 4.3)"
        ))),
    }
}

impl Problem {
    pub fn from_config(cfg: &Config) -> Result<Problem, CliError> {
        let c = &cfg.coefficients;
        match cfg.operator {
            OperatorKind::H => {
                if c.alpha.is_some() || c.beta.is_some() || c.big_q.is_some() || c.b0.is_some() {
                    return Err(CliError::Config(
                        "operator 'h' takes coefficients p and q only".into(),
                    ));
                }
                if cfg.bc.is_some() {
                    return Err(CliError::Config(
                        "operator 'h' has fixed boundary conditions; drop 'bc'".into(),
                    ));
                }
                Ok(Problem::H {
                    op: FourthOrderOperator::new(build(&c.p)?, build(&c.q)?),
                    label: "config".into(),
                })
            }
            OperatorKind::Eb => {
                if c.p.is_some() || c.q.is_some() {
                    return Err(CliError::Config(
                        "operator 'eb' takes coefficients alpha, beta, Q and b0".into(),
                    ));
                }
                let raw = build_beam(
                    build(&c.alpha)?,
                    build(&c.beta)?,
                    build(&c.big_q)?,
                    c.b0.unwrap_or(1.0),
                )
                .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(Problem::Beam {
                    raw,
                    bc: cfg.bc.unwrap_or(BoundaryCondition::Ebdc),
                    label: "config".into(),
                })
            }
        }
    }

    pub fn free() -> Problem {
        Problem::H {
            op: FourthOrderOperator::zero(),
            label: "free".into(),
        }
    }

    pub fn determinant(&self) -> Box<dyn Determinant> {
        match self {
            Problem::H { op, .. } => Box::new(OperatorDet { op: op.clone() }),
            Problem::Beam { raw, bc, .. } => Box::new(BeamDet {
                beam: raw.clone(),
                bc: *bc,
            }),
            Problem::DeltaQ { gamma, t0 } => Box::new(DeltaQDet {
                gamma: Complex64::new(*gamma, 0.0),
                t0: *t0,
            }),
            Problem::DeltaP { gamma } => Box::new(DeltaPDet {
                gamma: Complex64::new(*gamma, 0.0),
            }),
        }
    }

    pub fn spectrum_options(&self, newton_tol: Option<f64>) -> SpectrumOptions {
        let mut opts = match self {
            Problem::H { op, .. } => SpectrumOptions::for_operator(op),
            Problem::Beam { raw, bc, .. } => SpectrumOptions::for_beam(raw, *bc),
            Problem::DeltaQ { .. } => SpectrumOptions::default(),
            Problem::DeltaP { gamma } => SpectrumOptions {
                p_hat_0: Complex64::new(*gamma, 0.0),
                ..Default::default()
            },
        };
        if let Some(t) = newton_tol {
            opts.newton_tol = t;
        }
        opts
    }
}

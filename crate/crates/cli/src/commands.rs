//! One function per subcommand; each builds a table and writes it.

use beamspec::acceptance;
use beamspec::asymptotics::{predict_eb, predict_eb_bc, predict_h};
use beamspec::coefficients::{normalize_beam, Function1D};
use beamspec::determinant::BoundaryCondition;
use beamspec::inverse::{recover_alpha, recover_beta, recover_beta_verbatim};
use beamspec::oracle::{galerkin_spectrum, sturm_liouville_eigs};
use beamspec::perturbation::{fd_derivative_check, lambda_first_order, FirstOrderData};
use beamspec::spectrum::{count_zeros_disc, eigenvalues};
use beamspec::transform::gottlieb_transform;
use beamspec::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::path::Path;

use crate::config::{example, shorthand, Config, ExampleArgs, Problem};
use crate::output::{Cell, Table};
use crate::{Cli, CliError, Command, Grid, Known};

const DEFAULT_N: (usize, usize) = (1, 10);
const DEFAULT_EPS: f64 = 1e-3;

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Det { .. } => "det",
            Command::Predict { .. } => "predict",
            Command::Transform { .. } => "transform",
            Command::Perturb { .. } => "perturb",
            Command::Recover { .. } => "recover",
            Command::Count => "count",
            Command::Selftest { .. } => "selftest",
            Command::Oracle { .. } => "oracle",
        }
    }
}

/// Parse `A..B`, `A..=B` or a single index.
pub fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("cannot parse index range '{s}' (expected A..B)"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a == 0 || b < a {
        return Err(CliError::Config(format!(
            "index range '{s}' must satisfy 1 <= A <= B"
        )));
    }
    Ok((a, b))
}

struct Context {
    problem: Problem,
    config: Option<Config>,
    n: (usize, usize),
    /// the range came from `--n` or the config rather than the default
    n_given: bool,
    tol: Option<f64>,
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let c = &cli.common;
    let config = c.config.as_deref().map(Config::load).transpose()?;
    let chosen = [c.free, c.example.is_some(), config.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen > 1 {
        return Err(CliError::Config(
            "choose one of --free, --example and --config".into(),
        ));
    }
    let problem = if c.free {
        Problem::free()
    } else if let Some(name) = &c.example {
        example(&ExampleArgs {
            name,
            alpha: c.alpha.as_deref(),
            gamma: c.gamma,
            t0: c.t0,
        })?
    } else if let Some(cfg) = &config {
        Problem::from_config(cfg)?
    } else {
        return Err(CliError::Config(
            "no problem given: use --config, --free or --example".into(),
        ));
    };
    let n = match (&c.n, config.as_ref().and_then(|c| c.n_range)) {
        (Some(s), _) => parse_range(s)?,
        (None, Some([a, b])) if a >= 1 && b >= a => (a, b),
        (None, Some([a, b])) => {
            return Err(CliError::Config(format!(
                "n_range [{a}, {b}] must satisfy 1 <= a <= b"
            )))
        }
        (None, None) => DEFAULT_N,
    };
    let tol = c.tol.or(config.as_ref().and_then(|c| c.tolerances.newton));
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }
    let n_given = c.n.is_some() || config.as_ref().is_some_and(|c| c.n_range.is_some());
    Ok(Context {
        problem,
        config,
        n,
        n_given,
        tol,
    })
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let table = match &cli.command {
        Command::Selftest { only } => {
            let (table, failed) = selftest(only)?;
            table.write(cli.common.format, cli.common.out.as_deref())?;
            return match failed.is_empty() {
                true => Ok(()),
                false => Err(CliError::Failed(format!("criteria {failed:?} failed"))),
            };
        }
        cmd => {
            let ctx = context(cli)?;
            match cmd {
                Command::Spectrum => spectrum(&ctx)?,
                Command::Det {
                    grid,
                    start,
                    end,
                    points,
                    imag,
                } => det(&ctx, *grid, *start, *end, *points, *imag)?,
                Command::Predict { no_compute } => predict(&ctx, !no_compute)?,
                Command::Transform { points } => transform(&ctx, *points)?,
                Command::Perturb { eps } => perturb(&ctx, *eps)?,
                Command::Recover {
                    derivs,
                    known,
                    points,
                    verbatim,
                } => recover(
                    &ctx,
                    cli.common.alpha.as_deref(),
                    derivs,
                    *known,
                    *points,
                    *verbatim,
                )?,
                Command::Count => count(&ctx)?,
                Command::Oracle { basis } => oracle(&ctx, *basis)?,
                Command::Selftest { .. } => unreachable!(),
            }
        }
    };
    table.write(cli.common.format, cli.common.out.as_deref())
}

fn spectrum(ctx: &Context) -> Result<Table, CliError> {
    let det = ctx.problem.determinant();
    let opts = ctx.problem.spectrum_options(ctx.tol);
    let tab = eigenvalues(det.as_ref(), &opts, ctx.n.1)?;
    let mut t = Table::new(vec![
        "n",
        "lambda_re",
        "lambda_im",
        "certified",
        "newton_residual",
    ]);
    for e in tab.entries.iter().filter(|e| e.n >= ctx.n.0) {
        t.push(vec![
            e.n.into(),
            e.lambda.re.into(),
            e.lambda.im.into(),
            e.certified.into(),
            e.newton_residual.into(),
        ]);
    }
    Ok(t)
}

fn det(
    ctx: &Context,
    grid: Grid,
    start: f64,
    end: f64,
    points: usize,
    imag: f64,
) -> Result<Table, CliError> {
    if points == 0 || !start.is_finite() || !end.is_finite() || !imag.is_finite() {
        return Err(CliError::Config(
            "the grid needs finite end points and at least one point".into(),
        ));
    }
    let det = ctx.problem.determinant();
    let lambdas: Vec<Complex64> = (0..points)
        .map(|k| {
            let s = if points == 1 {
                start
            } else {
                start + (end - start) * k as f64 / (points - 1) as f64
            };
            let w = Complex64::new(s, imag);
            match grid {
                Grid::Lambda => w,
                Grid::Z => w.powu(4),
            }
        })
        .collect();
    let values = lambdas
        .par_iter()
        .map(|&l| det.eval(l))
        .collect::<beamspec::Result<Vec<_>>>()?;
    let mut t = Table::new(vec!["lambda_re", "lambda_im", "d_re", "d_im", "log_scale"]);
    for (l, d) in lambdas.iter().zip(values) {
        t.push(vec![
            l.re.into(),
            l.im.into(),
            d.value.re.into(),
            d.value.im.into(),
            d.log_scale.into(),
        ]);
    }
    Ok(t)
}

/// Predictions for `n` in range; the beam variants use the normalized beam.
fn predictions(problem: &Problem, n: (usize, usize)) -> Result<Vec<Complex64>, CliError> {
    let c = |v: f64| Complex64::new(v, 0.0);
    (n.0..=n.1)
        .map(|k| {
            let pk = PI * k as f64;
            Ok(match problem {
                Problem::H { op, .. } => predict_h(op, k)?,
                Problem::Beam { raw, bc, .. } => {
                    let beam = normalize_beam(raw);
                    match bc {
                        BoundaryCondition::Ebdc | BoundaryCondition::PinnedPinned => {
                            c(predict_eb(&beam, k)?)
                        }
                        _ => c(predict_eb_bc(&beam, k, *bc)?),
                    }
                }
                Problem::DeltaQ { gamma, t0 } => {
                    c(pk.powi(4) + gamma * (1.0 - (2.0 * pk * t0).cos()))
                }
                Problem::DeltaP { gamma } => {
                    let g = *gamma;
                    c(
                        pk.powi(4) - 2.0 * g * pk * pk - 0.5 * g * g * pk + 0.5 * g * g
                            - g.powi(3) / 12.0,
                    )
                }
            })
        })
        .collect()
}

fn predict(ctx: &Context, compute: bool) -> Result<Table, CliError> {
    let problem = match &ctx.problem {
        Problem::Beam { raw, bc, label } => Problem::Beam {
            raw: normalize_beam(raw),
            bc: *bc,
            label: label.clone(),
        },
        other => other.clone(),
    };
    let pred = predictions(&problem, ctx.n)?;
    let mut t = Table::new(vec![
        "n",
        "prediction",
        "computed",
        "residual",
        "n_residual",
        "n2_residual",
    ]);
    let computed = if compute {
        let det = problem.determinant();
        let tab = eigenvalues(det.as_ref(), &problem.spectrum_options(ctx.tol), ctx.n.1)?;
        Some(tab.lambdas())
    } else {
        None
    };
    for (i, k) in (ctx.n.0..=ctx.n.1).enumerate() {
        let p = pred[i];
        match &computed {
            Some(lam) => {
                let d = lam[k - 1] - p;
                // real data: signed residual; complex data: its modulus
                let r = if d.im == 0.0 && p.im == 0.0 {
                    d.re
                } else {
                    d.norm()
                };
                let nf = k as f64;
                t.push(vec![
                    k.into(),
                    p.re.into(),
                    lam[k - 1].re.into(),
                    r.into(),
                    (nf * r).into(),
                    (nf * nf * r).into(),
                ]);
            }
            None => t.push(vec![
                k.into(),
                p.re.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
            ]),
        }
    }
    Ok(t)
}

fn transform(ctx: &Context, points: usize) -> Result<Table, CliError> {
    let Problem::Beam { raw, .. } = &ctx.problem else {
        return Err(CliError::Config(
            "transform needs a beam (operator 'eb' or examples 4.x)".into(),
        ));
    };
    if points < 2 {
        return Err(CliError::Config(
            "transform needs at least two points".into(),
        ));
    }
    let op = gottlieb_transform(&normalize_beam(raw))?;
    let mut t = Table::new(vec!["t", "p", "q", "v"]);
    for k in 0..points {
        let s = k as f64 / (points - 1) as f64;
        t.push(vec![
            s.into(),
            op.p.eval(s).into(),
            op.q.eval(s).into(),
            op.v_at(s)?.re.into(),
        ]);
    }
    Ok(t)
}

fn perturb(ctx: &Context, eps: Option<f64>) -> Result<Table, CliError> {
    let Problem::Beam { raw, .. } = &ctx.problem else {
        return Err(CliError::Config(
            "perturb needs a beam (operator 'eb' or examples 4.x)".into(),
        ));
    };
    let eps = eps
        .or(ctx.config.as_ref().and_then(|c| c.tolerances.eps))
        .unwrap_or(DEFAULT_EPS);
    if !(1e-5..=1e-2).contains(&eps) {
        return Err(CliError::Config(format!(
            "eps must lie in [1e-5, 1e-2], got {eps}"
        )));
    }
    let rows: Vec<(f64, f64)> = (ctx.n.0..=ctx.n.1)
        .into_par_iter()
        .map(|n| {
            let (_, analytic) = lambda_first_order(
                n,
                FirstOrderData::from_functions(&raw.alpha, &raw.beta, &raw.q, n),
            );
            let fd = fd_derivative_check(&raw.alpha, &raw.beta, &raw.q, raw.b0, n, eps)?;
            Ok((analytic, fd))
        })
        .collect::<beamspec::Result<_>>()?;
    let mut t = Table::new(vec!["n", "analytic", "finite_difference", "discrepancy"]);
    for (n, (a, fd)) in (ctx.n.0..).zip(rows) {
        t.push(vec![n.into(), a.into(), fd.into(), (fd - a).abs().into()]);
    }
    Ok(t)
}

/// Read `n, derivative` rows; a leading header row is skipped.
fn read_derivs(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let parsed = (
            rec.get(0).and_then(|s| s.parse::<usize>().ok()),
            rec.get(1).and_then(|s| s.parse::<f64>().ok()),
        );
        match parsed {
            (Some(n), Some(d)) if rec.len() == 2 => pairs.push((n, d)),
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Config(format!(
                    "{}: bad row {}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    pairs.sort_by_key(|p| p.0);
    let expected: Vec<usize> = (1..=pairs.len()).collect();
    if pairs.is_empty() || pairs.iter().map(|p| p.0).collect::<Vec<_>>() != expected {
        return Err(CliError::Config(format!(
            "{}: indices must run 1, 2, ..., N without gaps",
            path.display()
        )));
    }
    Ok(pairs.into_iter().map(|p| p.1).collect())
}

fn recover(
    ctx: &Context,
    alpha_flag: Option<&str>,
    derivs_path: &Path,
    known: Known,
    points: usize,
    verbatim: bool,
) -> Result<Table, CliError> {
    let derivs = read_derivs(derivs_path)?;
    let from_config =
        |f: fn(&beamspec::coefficients::BeamCoefficients) -> &Function1D| match &ctx.problem {
            Problem::Beam { raw, .. } => Some(f(raw).clone()),
            _ => None,
        };
    let known_fn = match (alpha_flag, known) {
        (Some(s), _) => shorthand(s)?,
        (None, Known::Alpha) => from_config(|b| &b.alpha).unwrap_or_else(Function1D::zero),
        (None, Known::Beta) => from_config(|b| &b.beta).unwrap_or_else(Function1D::zero),
    };
    let n = if ctx.n_given {
        derivs.len().min(ctx.n.1)
    } else {
        derivs.len()
    };
    let result = match known {
        Known::Alpha => recover_beta(&known_fn, &derivs, n)?,
        Known::Beta => recover_alpha(&known_fn, &derivs, n)?,
    };
    let literal = match (verbatim, known) {
        (true, Known::Alpha) => Some(recover_beta_verbatim(&known_fn, &derivs, n)?),
        (true, Known::Beta) => {
            return Err(CliError::Config(
                "--verbatim applies to recovering beta".into(),
            ))
        }
        (false, _) => None,
    };
    if points < 2 {
        return Err(CliError::Config("recover needs at least two points".into()));
    }
    let mut header = vec!["x", "recovered"];
    if literal.is_some() {
        header.push("verbatim");
    }
    let mut t = Table::new(header);
    for k in 0..points {
        let x = k as f64 / (points - 1) as f64;
        let mut row: Vec<Cell> = vec![x.into(), result.recovered.eval(x).into()];
        if let Some(l) = &literal {
            row.push(l.eval(x).into());
        }
        t.push(row);
    }
    Ok(t)
}

fn count(ctx: &Context) -> Result<Table, CliError> {
    let det = ctx.problem.determinant();
    let opts = ctx.problem.spectrum_options(ctx.tol);
    let counts: Vec<usize> = (ctx.n.0..=ctx.n.1)
        .into_par_iter()
        .map(|n| count_zeros_disc(det.as_ref(), n, &opts))
        .collect::<beamspec::Result<_>>()?;
    let mut t = Table::new(vec!["n", "radius_z", "count"]);
    for (n, c) in (ctx.n.0..).zip(counts) {
        t.push(vec![n.into(), opts.circle_radius(n).into(), c.into()]);
    }
    Ok(t)
}

fn oracle(ctx: &Context, basis: usize) -> Result<Table, CliError> {
    let Problem::H { op, label } = &ctx.problem else {
        return Err(CliError::Config(
            "oracle compares fourth-order operators (operator 'h', --free or --example 3)".into(),
        ));
    };
    if !op.is_real() {
        return Err(CliError::Config(
            "the Galerkin oracle needs real coefficients".into(),
        ));
    }
    if basis < ctx.n.1 {
        return Err(CliError::Config(format!(
            "basis size {basis} is smaller than the largest index {}",
            ctx.n.1
        )));
    }
    let det = ctx.problem.determinant();
    let computed = eigenvalues(
        det.as_ref(),
        &ctx.problem.spectrum_options(ctx.tol),
        ctx.n.1,
    )?
    .lambdas();
    let galerkin = galerkin_spectrum(op, basis, ctx.n.1)?;
    let square = if label == "example 3" {
        Some(sturm_liouville_eigs(&op.p, ctx.n.1)?)
    } else {
        None
    };
    let mut header = vec!["n", "determinant", "galerkin", "relative_difference"];
    if square.is_some() {
        header.push("sturm_liouville_squared");
    }
    let mut t = Table::new(header);
    for n in ctx.n.0..=ctx.n.1 {
        let (d, g) = (computed[n - 1].re, galerkin[n - 1]);
        let mut row: Vec<Cell> = vec![
            n.into(),
            d.into(),
            g.into(),
            ((d - g).abs() / d.abs().max(1.0)).into(),
        ];
        if let Some(s) = &square {
            row.push((s[n - 1] * s[n - 1]).into());
        }
        t.push(row);
    }
    Ok(t)
}

fn selftest(only: &[usize]) -> Result<(Table, Vec<usize>), CliError> {
    let ids: Vec<usize> = if only.is_empty() {
        acceptance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    let mut t = Table::new(vec!["criterion", "name", "passed", "seconds", "detail"]);
    let mut failed = Vec::new();
    for id in ids {
        let r = acceptance::run_criterion(id)
            .ok_or_else(|| CliError::Config(format!("no acceptance criterion {id}")))?;
        eprintln!("{r}");
        if !r.passed {
            failed.push(id);
        }
        t.push(vec![
            r.id.into(),
            r.name.into(),
            r.passed.into(),
            r.seconds.into(),
            r.detail.into(),
        ]);
    }
    Ok((t, failed))
}

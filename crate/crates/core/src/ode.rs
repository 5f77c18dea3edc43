//! Adaptive Dormand-Prince 8(5,3) integration of complex linear systems with overflow rescaling.

use crate::error::{Error, Result};
use num_complex::Complex64;

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
];

const A: [&[f64]; 12] = [
    &[],
    &[5.26001519587677318785587544488E-2],
    &[
        1.97250569845378994544595329183E-2,
        5.91751709536136983633785987549E-2,
    ],
    &[
        2.95875854768068491816892993775E-2,
        0.0,
        8.87627564304205475450678981324E-2,
    ],
    &[
        2.41365134159266685502369798665E-1,
        0.0,
        -8.84549479328286085344864962717E-1,
        9.24834003261792003115737966543E-1,
    ],
    &[
        3.7037037037037037037037037037E-2,
        0.0,
        0.0,
        1.70828608729473871279604482173E-1,
        1.25467687566822425016691814123E-1,
    ],
    &[
        3.7109375E-2,
        0.0,
        0.0,
        1.70252211019544039314978060272E-1,
        6.02165389804559606850219397283E-2,
        -1.7578125E-2,
    ],
    &[
        3.70920001185047927108779319836E-2,
        0.0,
        0.0,
        1.70383925712239993810214054705E-1,
        1.07262030446373284651809199168E-1,
        -1.53194377486244017527936158236E-2,
        8.27378916381402288758473766002E-3,
    ],
    &[
        6.24110958716075717114429577812E-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825E0,
        -8.68219346841726006818189891453E-1,
        2.75920996994467083049415600797E1,
        2.01540675504778934086186788979E1,
        -4.34898841810699588477366255144E1,
    ],
    &[
        4.77662536438264365890433908527E-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468E0,
        -5.90290826836842996371446475743E-1,
        2.12300514481811942347288949897E1,
        1.52792336328824235832596922938E1,
        -3.32882109689848629194453265587E1,
        -2.03312017085086261358222928593E-2,
    ],
    &[
        -9.3714243008598732571704021658E-1,
        0.0,
        0.0,
        5.18637242884406370830023853209E0,
        1.09143734899672957818500254654E0,
        -8.14978701074692612513997267357E0,
        -1.85200656599969598641566180701E1,
        2.27394870993505042818970056734E1,
        2.49360555267965238987089396762E0,
        -3.0467644718982195003823669022E0,
    ],
    &[
        2.27331014751653820792359768449E0,
        0.0,
        0.0,
        -1.05344954667372501984066689879E1,
        -2.00087205822486249909675718444E0,
        -1.79589318631187989172765950534E1,
        2.79488845294199600508499808837E1,
        -2.85899827713502369474065508674E0,
        -8.87285693353062954433549289258E0,
        1.23605671757943030647266201528E1,
        6.43392746015763530355970484046E-1,
    ],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566E0,
    1.89151789931450038304281599044E0,
    -5.8012039600105847814672114227E0,
    3.1116436695781989440891606237E-1,
    -1.52160949662516078556178806805E-1,
    2.01365400804030348374776537501E-1,
    4.47106157277725905176885569043E-2,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512E+00,
    0.733846688281611857341361741547E+00,
    0.220588235294117647058823529412E-01,
];

const E: [f64; 12] = [
    0.1312004499419488073250102996E-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753E+01,
    -0.4957589496572501915214079952E+00,
    0.1664377182454986536961530415E+01,
    -0.3503288487499736816886487290E+00,
    0.3341791187130174790297318841E+00,
    0.8192320648511571246570742613E-01,
    -0.2235530786388629525884427845E-01,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
    /// rescale the state when its largest entry exceeds this
    pub renorm_threshold: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-11,
            atol: 1e-13,
            h_init: None,
            max_steps: 200_000,
            renorm_threshold: 1e100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeOutput {
    /// true state is `y · exp(log_scale)`
    pub y: Vec<Complex64>,
    pub log_scale: f64,
    pub steps: usize,
    pub rejected: usize,
    /// last accepted step size, useful to warm-start the next interval
    pub last_h: f64,
}

fn max_abs(y: &[Complex64]) -> f64 {
    y.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Integrate `y' = f(t, y)` from `t0` to `t1`. The error is measured norm-wise: every component is
/// scaled by `atol + rtol·max|y|`, which suits systems with solutions of very different sizes.
pub fn integrate<F>(
    mut rhs: F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<OdeOutput>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut log_scale = 0.0;
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(OdeOutput {
            y,
            log_scale,
            steps: 0,
            rejected: 0,
            last_h: 0.0,
        });
    }
    let dir = span.signum();
    let mut h = opts.h_init.unwrap_or(0.01 * span.abs()).min(span.abs()) * dir;
    let mut t = t0;
    let zero = Complex64::new(0.0, 0.0);
    let mut k: Vec<Vec<Complex64>> = vec![vec![zero; n]; 12];
    let mut tmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut last_reject = false;
    rhs(t, &y, &mut k[0])?;
    loop {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        if steps + rejected > opts.max_steps {
            return Err(Error::Integration {
                t,
                reason: "too many steps".into(),
            });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }
        for s in 1..12 {
            for i in 0..n {
                let mut acc = zero;
                for (j, a) in A[s].iter().enumerate() {
                    if *a != 0.0 {
                        acc += k[j][i] * *a;
                    }
                }
                tmp[i] = y[i] + acc * h;
            }
            rhs(t + C[s] * h, &tmp, &mut k[s])?;
        }
        let mut err5 = 0.0;
        let mut err3 = 0.0;
        let mut incr = vec![zero; n];
        for i in 0..n {
            let mut acc = zero;
            for s in 0..12 {
                if B[s] != 0.0 {
                    acc += k[s][i] * B[s];
                }
            }
            incr[i] = acc;
            ynew[i] = y[i] + acc * h;
        }
        let sc = opts.atol + opts.rtol * max_abs(&y).max(max_abs(&ynew));
        for i in 0..n {
            let e3 = incr[i] - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
            let mut e5 = zero;
            for s in 0..12 {
                if E[s] != 0.0 {
                    e5 += k[s][i] * E[s];
                }
            }
            err3 += (e3.norm() / sc).powi(2);
            err5 += (e5.norm() / sc).powi(2);
        }
        let deno = if err5 + 0.01 * err3 > 0.0 {
            err5 + 0.01 * err3
        } else {
            1.0
        };
        let err = h.abs() * err5 * (1.0 / (n as f64 * deno)).sqrt();
        if !err.is_finite() {
            return Err(Error::NonFinite(format!("integration state at t = {t}")));
        }
        let fac = (err.powf(0.125) / 0.9).clamp(1.0 / 6.0, 3.0);
        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut ynew);
            steps += 1;
            let m = max_abs(&y);
            if m > opts.renorm_threshold {
                for v in y.iter_mut() {
                    *v /= m;
                }
                log_scale += m.ln();
            }
            let mut hnew = h / fac;
            if last_reject {
                hnew = if dir > 0.0 { hnew.min(h) } else { hnew.max(h) };
            }
            last_reject = false;
            h = hnew;
            rhs(t, &y, &mut k[0])?;
        } else {
            rejected += 1;
            last_reject = true;
            h /= (err.powf(0.125) / 0.9).clamp(1.0, 6.0);
        }
    }
    Ok(OdeOutput {
        y,
        log_scale,
        steps,
        rejected,
        last_h: h.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_row_sums_match_nodes() {
        for s in 1..12 {
            let sum: f64 = A[s].iter().sum();
            assert!((sum - C[s]).abs() < 1e-13, "row {s}");
        }
    }

    #[test]
    fn weights_satisfy_quadrature_conditions() {
        for q in 0..8 {
            let s: f64 = (0..12).map(|i| B[i] * C[i].powi(q)).sum();
            assert!((s - 1.0 / (q as f64 + 1.0)).abs() < 1e-12, "order {q}");
        }
        assert!(E.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn oscillator_is_accurate() {
        // y'' = -w^2 y as a complex first-order system
        let w = 30.0;
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let out = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -w * w * y[0];
                Ok(())
            },
            &y0,
            0.0,
            1.0,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((out.y[0].re - w.cos()).abs() < 1e-9);
    }

    #[test]
    fn rescaling_tracks_growth() {
        let y0 = [Complex64::new(1.0, 0.0)];
        let opts = OdeOptions {
            renorm_threshold: 1e10,
            ..Default::default()
        };
        let out = integrate(
            |_, y, dy| {
                dy[0] = y[0] * 100.0;
                Ok(())
            },
            &y0,
            0.0,
            1.0,
            &opts,
        )
        .unwrap();
        assert!(out.log_scale > 0.0);
        let total = out.y[0].norm().ln() + out.log_scale;
        assert!((total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn time_dependent_rhs_uses_stage_nodes() {
        // y' = cos(t) y, y(1) = exp(sin 1)
        let y0 = [Complex64::new(1.0, 0.0)];
        let out = integrate(
            |t, y, dy| {
                dy[0] = y[0] * t.cos();
                Ok(())
            },
            &y0,
            0.0,
            1.0,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((out.y[0].re - 1f64.sin().exp()).abs() < 1e-11);
    }
}

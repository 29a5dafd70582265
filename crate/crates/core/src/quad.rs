//! Adaptive quadrature on [0,1] and [0,1]^2.
//!
//! Gauss-Kronrod 7-15 panels with globally adaptive bisection. Declared
//! algebraic endpoint behavior is removed by a power substitution before
//! integration; detection is never attempted. All node sets are
//! deterministic and panel sums use a fixed order, so results are
//! bit-reproducible across runs.

use crate::error::{Error, Result};

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

/// Integrand on (0,1) with declared algebraic endpoint exponents:
/// behaves like `t^exp0` near 0 and `(1-t)^exp1` near 1, each > -1.
///
/// The callback receives `(t, 1 - t)` with the second argument computed
/// without cancellation, so factors like `(1-t)^exp1` stay accurate when
/// the endpoint substitution probes points closer to 1 than machine
/// epsilon allows to represent through `1.0 - t`.
pub struct Integrand1D<F: Fn(f64, f64) -> f64> {
    pub f: F,
    pub exp0: f64,
    pub exp1: f64,
}

impl<F: Fn(f64, f64) -> f64> Integrand1D<F> {
    pub fn smooth(f: F) -> Self {
        Integrand1D {
            f,
            exp0: 0.0,
            exp1: 0.0,
        }
    }

    pub fn with_exponents(f: F, exp0: f64, exp1: f64) -> Self {
        Integrand1D { f, exp0, exp1 }
    }
}

/// Integrand on (0,1)^2; exponents per axis as in [`Integrand1D`].
pub struct Integrand2D<F: Fn(f64, f64) -> f64> {
    pub f: F,
    pub r_exp: (f64, f64),
    pub s_exp: (f64, f64),
}

impl<F: Fn(f64, f64) -> f64> Integrand2D<F> {
    pub fn smooth(f: F) -> Self {
        Integrand2D {
            f,
            r_exp: (0.0, 0.0),
            s_exp: (0.0, 0.0),
        }
    }
}

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Maximum number of panels per adaptive pass.
const MAX_PANELS: usize = 2000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        resk += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * fsum;
        }
    }

    if !resk.is_finite() {
        return Err(Error::NonConvergence {
            what: format!("integrand non-finite on [{a}, {b}]"),
            value: f64::NAN,
            estimate: f64::INFINITY,
        });
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - reskh).abs() + (fv[14 - j] - reskh).abs());
    }

    let value = resk * half;
    let error = rescale_error((resk - resg) * half, resabs * half.abs(), resasc * half.abs());
    Ok(Panel { a, b, value, error })
}

/// Globally adaptive integration of a smooth function over [a, b].
fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    let mut panels = vec![qk15(f, a, b)?];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= tol || panels.len() >= MAX_PANELS {
            break;
        }
        // worst panel first; ties resolved by position for determinism
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            break; // interval at floating-point resolution
        }
        let left = qk15(f, p.a, mid)?;
        let right = qk15(f, mid, p.b)?;
        panels[worst] = left;
        panels.push(right);
    }

    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();

    if error > tol && panels.len() >= MAX_PANELS {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature (panel budget exhausted)".into(),
            value,
            estimate: error,
        });
    }
    Ok(Quadrature {
        value,
        error_estimate: error,
    })
}

/// Substitution order for a declared exponent: identity for exponents that
/// are already smooth (non-negative integers), otherwise a power that lifts
/// the integrand to at least C^2 at the endpoint.
fn sub_order(exp: f64) -> f64 {
    let is_smooth = exp >= 0.0 && (exp - exp.round()).abs() < 1e-12;
    if exp == 0.0 || is_smooth {
        1.0
    } else {
        (3.0 / (1.0 + exp)).ceil().clamp(2.0, 60.0)
    }
}

/// Adaptive integration of `g` over (0,1) honoring the declared endpoint
/// exponents. `|value - true| <= max(tol, error_estimate)` for integrands
/// smooth after the endpoint substitution.
pub fn integrate_1d<F: Fn(f64, f64) -> f64>(g: &Integrand1D<F>, tol: f64) -> Result<Quadrature> {
    if !(tol > 0.0) {
        return Err(Error::InadmissibleParams(format!("tol must be > 0, got {tol}")));
    }
    if g.exp0 <= -1.0 || g.exp1 <= -1.0 {
        return Err(Error::InadmissibleParams(format!(
            "endpoint exponents must be > -1 (got {}, {})",
            g.exp0, g.exp1
        )));
    }
    let q0 = sub_order(g.exp0);
    let q1 = sub_order(g.exp1);
    if q0 == 1.0 && q1 == 1.0 {
        return adaptive(&|t| (g.f)(t, 1.0 - t), 0.0, 1.0, tol);
    }

    // Split at 1/2 and flatten each singular endpoint with t = (u^q)/2.
    let f = &g.f;
    let left = if q0 == 1.0 {
        adaptive(&|t| f(t, 1.0 - t), 0.0, 0.5, tol / 2.0)?
    } else {
        adaptive(
            &|u: f64| {
                let up = u.powf(q0 - 1.0);
                let t = 0.5 * up * u;
                f(t, 1.0 - t) * 0.5 * q0 * up
            },
            0.0,
            1.0,
            tol / 2.0,
        )?
    };
    let right = if q1 == 1.0 {
        adaptive(&|t| f(t, 1.0 - t), 0.5, 1.0, tol / 2.0)?
    } else {
        adaptive(
            &|u: f64| {
                let up = u.powf(q1 - 1.0);
                let d = 0.5 * up * u;
                f(1.0 - d, d) * 0.5 * q1 * up
            },
            0.0,
            1.0,
            tol / 2.0,
        )?
    };
    Ok(Quadrature {
        value: left.value + right.value,
        error_estimate: left.error_estimate + right.error_estimate,
    })
}

/// Convenience wrapper for integrands smooth up to both endpoints.
pub fn integrate_01<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<Quadrature> {
    integrate_1d(&Integrand1D::smooth(move |t, _| f(t)), tol)
}

/// Nested adaptive integration over (0,1)^2; the inner (s) integral runs at
/// `tol / 10`. Inner failures abort the whole integration.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(g: &Integrand2D<F>, tol: f64) -> Result<Quadrature> {
    use std::cell::RefCell;
    let inner_tol = tol / 10.0;
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err_max: RefCell<f64> = RefCell::new(0.0);

    let outer = Integrand1D {
        f: |r: f64, _: f64| {
            let inner = Integrand1D {
                f: |s: f64, _: f64| (g.f)(r, s),
                exp0: g.s_exp.0,
                exp1: g.s_exp.1,
            };
            match integrate_1d(&inner, inner_tol) {
                Ok(q) => {
                    let mut m = inner_err_max.borrow_mut();
                    *m = m.max(q.error_estimate);
                    q.value
                }
                Err(e) => {
                    let mut slot = inner_failure.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(e);
                    }
                    f64::NAN
                }
            }
        },
        exp0: g.r_exp.0,
        exp1: g.r_exp.1,
    };

    let result = integrate_1d(&outer, tol);
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let q = result?;
    Ok(Quadrature {
        value: q.value,
        error_estimate: q.error_estimate + inner_err_max.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn linear_exact() {
        let q = integrate_01(|t| t, 1e-12).unwrap();
        assert!((q.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn log_two() {
        let q = integrate_01(|t| 1.0 / (1.0 + t), 1e-12).unwrap();
        assert!((q.value - LN_2).abs() <= q.error_estimate.max(1e-12));
    }

    #[test]
    fn beta_half_half() {
        // both endpoints integrably singular
        let g = Integrand1D::with_exponents(
            |t: f64, omt: f64| t.powf(-0.5) * omt.powf(-0.5),
            -0.5,
            -0.5,
        );
        let q = integrate_1d(&g, 1e-10).unwrap();
        assert!((q.value - PI).abs() <= q.error_estimate.max(1e-10));
    }

    #[test]
    fn unit_square() {
        let q = integrate_2d(&Integrand2D::smooth(|_, _| 1.0), 1e-10).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dilogarithm_value() {
        let q = integrate_2d(&Integrand2D::smooth(|r, s| 1.0 / (1.0 + r * s)), 1e-9).unwrap();
        let expect = PI * PI / 12.0;
        assert!((q.value - expect).abs() <= q.error_estimate.max(1e-9));
    }

    #[test]
    fn separable_product() {
        let f1 = integrate_01(|r| (1.0 + r).sqrt(), 1e-11).unwrap();
        let f2 = integrate_01(|s| 1.0 / (2.0 + s), 1e-11).unwrap();
        let q = integrate_2d(
            &Integrand2D::smooth(|r, s| (1.0 + r).sqrt() / (2.0 + s)),
            1e-10,
        )
        .unwrap();
        assert!((q.value - f1.value * f2.value).abs() < 1e-10);
    }

    #[test]
    fn error_estimates_conservative_on_goldens() {
        let cases: Vec<(Quadrature, f64)> = vec![
            (integrate_01(|t| t, 1e-12).unwrap(), 0.5),
            (integrate_01(|t| 1.0 / (1.0 + t), 1e-12).unwrap(), LN_2),
            (
                integrate_1d(
                    &Integrand1D::with_exponents(
                        |t: f64, omt: f64| t.powf(-0.5) * omt.powf(-0.5),
                        -0.5,
                        -0.5,
                    ),
                    1e-10,
                )
                .unwrap(),
                PI,
            ),
        ];
        for (q, truth) in cases {
            assert!((q.value - truth).abs() <= q.error_estimate.max(1e-13));
        }
    }

    #[test]
    fn affine_substitution_invariance() {
        let tol = 1e-11;
        let a = integrate_01(|t| (3.0 * t).sin() / (1.0 + t), tol).unwrap();
        let b = integrate_01(|t| (3.0 * (1.0 - t)).sin() / (2.0 - t), tol).unwrap();
        assert!((a.value - b.value).abs() < tol);
    }

    #[test]
    fn bad_exponent_rejected() {
        let g = Integrand1D::with_exponents(|t: f64, _: f64| t, -1.0, 0.0);
        assert!(integrate_1d(&g, 1e-10).is_err());
    }
}

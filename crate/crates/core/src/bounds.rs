//! The admissibility bounds: the value of beta for which the weighted
//! transform of every class member lands in the target class.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::hypergeom::{gauss_2f1, kernel_2f1_integral, kernel_3f2_integral, pfq};
use crate::params::{ClassParams, HohlovParams, TargetParams};
use crate::quad::{integrate_1d, Integrand1D};
use crate::weights::WeightSpec;

/// How a bound value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Thm1Quadrature,
    Thm1BernardiClosed,
    Thm2Quadrature,
    Thm2BernardiClosed,
    HohlovDuality,
}

/// A computed bound with its numerical pedigree.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub beta: f64,
    pub method: Method,
    pub error_estimate: f64,
    /// Named intermediate quantities (integral values, swap residuals, ...).
    pub diagnostics: Vec<(String, f64)>,
}

/// Tolerances and diagnostics for the quadrature route of the first bound.
#[derive(Debug, Clone, Copy)]
pub struct Thm1Options {
    /// Tolerance for the outer weight integral over t.
    pub outer_tol: f64,
    /// Tolerance for the kernel integrals inside the bracket.
    pub kernel_tol: f64,
    /// Recompute the bracket with the root pair swapped (at 100x looser
    /// tolerances) and record the residual; the bracket is symmetric in
    /// the pair, so a large residual flags a numerical problem.
    pub check_swap: bool,
}

impl Default for Thm1Options {
    fn default() -> Self {
        Thm1Options {
            outer_tol: 1e-9,
            kernel_tol: 1e-9,
            check_swap: false,
        }
    }
}

/// The weight integral I of the first bound, with the bracket realized by
/// the kernel quadratures; `first` and `second` are the root pair in the
/// order (kernel exponent assignments are symmetric, so swapping them must
/// not change the value).
fn thm1_weight_integral(
    p: &ClassParams,
    w: &WeightSpec,
    first: f64,
    second: f64,
    outer_tol: f64,
    kernel_tol: f64,
) -> Result<(f64, f64)> {
    let delta = p.delta;
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let record = |r: Result<f64>| -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = inner_failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                f64::NAN
            }
        }
    };

    let (exp0, exp1) = w.endpoint_exponents();
    let bracket: Box<dyn Fn(f64) -> f64> = if p.gamma > 0.0 {
        // first > 0 and second > 0 here
        let (mu, nu) = (first, second);
        Box::new(move |t: f64| {
            let g2 = record(kernel_2f1_integral(mu / delta, -t, kernel_tol));
            let g3 = record(kernel_3f2_integral(nu / delta, mu / delta, -t, kernel_tol));
            g2 / nu + (1.0 - 1.0 / nu) * g3
        })
    } else {
        let alpha = second; // = nu = alpha when gamma = 0
        if !(alpha > 0.0) {
            return Err(Error::InadmissibleParams(format!(
                "first bound needs alpha > 0 when gamma = 0, got {alpha}"
            )));
        }
        Box::new(move |t: f64| {
            let g2 = record(kernel_2f1_integral(alpha / delta, -t, kernel_tol));
            1.0 / (alpha * (1.0 + t)) + (1.0 - 1.0 / alpha) * g2
        })
    };

    let g = Integrand1D::with_exponents(
        |t: f64, omt: f64| w.lambda_eval_at(t, omt).unwrap_or(f64::NAN) * bracket(t),
        exp0,
        exp1,
    );
    let q = integrate_1d(&g, outer_tol);
    drop(g);
    drop(bracket);
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let q = q?;
    Ok((q.value, q.error_estimate + kernel_tol))
}

/// First bound via the kernel quadratures: beta = 1 - (1-xi)/2 * (1-I)^{-1}.
pub fn beta_thm1(p: &ClassParams, w: &WeightSpec, t: &TargetParams) -> Result<BoundResult> {
    beta_thm1_with(p, w, t, &Thm1Options::default())
}

/// [`beta_thm1`] with explicit tolerances and the optional swap diagnostic.
pub fn beta_thm1_with(
    p: &ClassParams,
    w: &WeightSpec,
    t: &TargetParams,
    opts: &Thm1Options,
) -> Result<BoundResult> {
    w.validate()?;
    let (i_val, i_err) =
        thm1_weight_integral(p, w, p.mu, p.nu, opts.outer_tol, opts.kernel_tol)?;
    if i_val >= 1.0 - 1e-12 {
        return Err(Error::DegenerateBound(format!(
            "weight integral I = {i_val} reaches 1; bound undefined"
        )));
    }
    let one_minus_i = 1.0 - i_val;
    let beta = 1.0 - 0.5 * (1.0 - t.xi) / one_minus_i;
    let error_estimate = 0.5 * (1.0 - t.xi) * i_err / (one_minus_i * one_minus_i);

    let mut diagnostics = vec![("I".to_string(), i_val), ("I_error".to_string(), i_err)];
    if opts.check_swap && p.gamma > 0.0 && p.mu > 0.0 && (p.mu - p.nu).abs() > 1e-14 {
        let (i_swap, _) = thm1_weight_integral(
            p,
            w,
            p.nu,
            p.mu,
            opts.outer_tol * 100.0,
            opts.kernel_tol * 100.0,
        )?;
        diagnostics.push(("I_swap_residual".to_string(), (i_swap - i_val).abs()));
    }

    Ok(BoundResult {
        beta,
        method: Method::Thm1Quadrature,
        error_estimate,
        diagnostics,
    })
}

/// First bound, closed form for the power weight `(1+c) t^c`: the weight
/// integral collapses to hypergeometric values at -1.
pub fn beta_thm1_bernardi_closed(
    p: &ClassParams,
    c: f64,
    t: &TargetParams,
) -> Result<BoundResult> {
    WeightSpec::bernardi(c)?;
    let (delta, mu, nu) = (p.delta, p.mu, p.nu);
    let (prefactor, bracket) = if p.gamma > 0.0 {
        let f3 = pfq(
            &[1.0, 2.0 + c, 1.0 + delta / mu],
            &[3.0 + c, 2.0 + delta / mu],
            -1.0,
        )?;
        let f4 = pfq(
            &[1.0, 2.0 + c, 1.0 + delta / mu, 1.0 + delta / nu],
            &[3.0 + c, 2.0 + delta / mu, 2.0 + delta / nu],
            -1.0,
        )?;
        let bracket = f3 / nu + (delta / (delta + nu)) * (1.0 - 1.0 / nu) * f4;
        let prefactor = (2.0 + c) * (delta + mu) / (2.0 * delta * (1.0 + c));
        (prefactor, bracket)
    } else {
        let alpha = p.nu; // nu = alpha when gamma = 0
        if !(alpha > 0.0) {
            return Err(Error::InadmissibleParams(format!(
                "first bound needs alpha > 0 when gamma = 0, got {alpha}"
            )));
        }
        let f2 = pfq(&[1.0, 2.0 + c], &[3.0 + c], -1.0)?;
        let f3 = pfq(
            &[1.0, 2.0 + c, 1.0 + delta / alpha],
            &[3.0 + c, 2.0 + delta / alpha],
            -1.0,
        )?;
        let bracket = f2 / alpha + (delta / (delta + alpha)) * (1.0 - 1.0 / alpha) * f3;
        let prefactor = (2.0 + c) / (2.0 * (1.0 + c));
        (prefactor, bracket)
    };
    if bracket.abs() < 1e-300 {
        return Err(Error::DegenerateBound(
            "closed-form bracket vanished".into(),
        ));
    }
    let beta = 1.0 - (1.0 - t.xi) * prefactor / bracket;
    Ok(BoundResult {
        beta,
        method: Method::Thm1BernardiClosed,
        error_estimate: 1e-11,
        diagnostics: vec![("bracket".to_string(), bracket)],
    })
}

/// Quadrature tolerance for the second bound's weight integral.
const THM2_TOL: f64 = 1e-11;

/// Second bound: beta/(1-beta) = -int_0^1 lambda(t) (1 - k t)/(1 + t) dt
/// with k = (1+xi)/(1-xi).
pub fn beta_thm2(w: &WeightSpec, t: &TargetParams) -> Result<BoundResult> {
    w.validate()?;
    let k = (1.0 + t.xi) / (1.0 - t.xi);
    let (exp0, exp1) = w.endpoint_exponents();
    let g = Integrand1D::with_exponents(
        |s: f64, omt: f64| w.lambda_eval_at(s, omt).unwrap_or(f64::NAN) * (1.0 - k * s) / (1.0 + s),
        exp0,
        exp1,
    );
    let q = integrate_1d(&g, THM2_TOL)?;
    let r = -q.value;
    if 1.0 + r <= 1e-12 {
        return Err(Error::DegenerateBound(format!(
            "beta/(1-beta) = {r} at or below -1; bound undefined"
        )));
    }
    let beta = r / (1.0 + r);
    let error_estimate = q.error_estimate / ((1.0 + r) * (1.0 + r));
    Ok(BoundResult {
        beta,
        method: Method::Thm2Quadrature,
        error_estimate,
        diagnostics: vec![("ratio".to_string(), r)],
    })
}

/// Second bound, closed form for the power weight `(1+c) t^c`:
/// beta = 1 - (2+c)(1-xi) / (2 (1+c) F) with F = 2F1(1, 2+c; 3+c; -1).
pub fn beta_thm2_bernardi_closed(c: f64, t: &TargetParams) -> Result<BoundResult> {
    WeightSpec::bernardi(c)?;
    let f = gauss_2f1(1.0, 2.0 + c, 3.0 + c, -1.0)?;
    if f.abs() < 1e-300 {
        return Err(Error::DegenerateBound("2F1 value vanished".into()));
    }
    let beta = 1.0 - (2.0 + c) * (1.0 - t.xi) / (2.0 * (1.0 + c) * f);
    Ok(BoundResult {
        beta,
        method: Method::Thm2BernardiClosed,
        error_estimate: 1e-12,
        diagnostics: vec![("gauss_value".to_string(), f)],
    })
}

/// The three convex weights multiplying the shifted Gauss values in the
/// kernel-operator bound; they sum to 1 identically.
pub fn hohlov_weight_coefficients(h: &HohlovParams, p: &ClassParams) -> (f64, f64, f64) {
    let (a, alpha, gamma, delta) = (h.a, p.alpha, p.gamma, p.delta);
    let w0 = 1.0 - (a / delta) * (alpha - gamma * (1.0 + a / delta));
    let w1 = (a / delta) * (alpha - gamma * (1.0 + (2.0 * a + 1.0) / delta));
    let w2 = a * (a + 1.0) * gamma / (delta * delta);
    (w0, w1, w2)
}

/// The second class level of the kernel-operator duality:
/// beta2 = w0 2F1(a,b;c;-1) + w1 2F1(a+1,b;c;-1) + w2 2F1(a+2,b;c;-1).
pub fn beta2_hohlov(h: &HohlovParams, p: &ClassParams) -> Result<f64> {
    let (w0, w1, w2) = hohlov_weight_coefficients(h, p);
    let f0 = gauss_2f1(h.a, h.b, h.c, -1.0)?;
    let f1 = gauss_2f1(h.a + 1.0, h.b, h.c, -1.0)?;
    let f2 = if w2 == 0.0 {
        0.0
    } else {
        gauss_2f1(h.a + 2.0, h.b, h.c, -1.0)?
    };
    Ok(w0 * f0 + w1 * f1 + w2 * f2)
}

/// Composition of two class levels under the duality argument:
/// beta = 1 - 2 (1 - beta1)(1 - beta2).
pub fn combine_duality(beta1: f64, beta2: f64) -> f64 {
    1.0 - 2.0 * (1.0 - beta1) * (1.0 - beta2)
}

/// Outcome of the kernel-operator hypothesis and positivity checks.
#[derive(Debug, Clone)]
pub struct HohlovValidation {
    pub ok: bool,
    pub failures: Vec<String>,
    pub e1: f64,
    pub e2: f64,
    /// Minimum of the series coefficients e3(n) over n = 0..=200.
    pub e3_min: f64,
    pub e3_min_at: usize,
    /// Minimum of the kernel density N4 over a 1000-point interior grid.
    pub n4_min: f64,
}

/// Checks the parameter hypotheses of the kernel-operator bound and the
/// non-negativity of the kernel density decomposition
/// `N4(t) = e1 + e2 (1-t) + sum_n e3(n) * ratio_n * (1-t)^{n+2}`.
pub fn validate_hohlov(h: &HohlovParams, p: &ClassParams) -> Result<HohlovValidation> {
    let (a, b, c) = (h.a, h.b, h.c);
    let (alpha, gamma, delta) = (p.alpha, p.gamma, p.delta);
    let mut failures = Vec::new();

    if !(b > -1.0 && 1.0 + b > 0.0) {
        failures.push(format!("need 1 + b > 0, got b = {b}"));
    }
    if !(c - a > 1.0 + b) {
        failures.push(format!("need c - a > 1 + b, got c - a = {}", c - a));
    }
    if !(c - a < 2.0) {
        failures.push(format!("need c - a < 2, got {}", c - a));
    }
    let a_cap = if alpha > gamma {
        (delta / (2.0 * (alpha - gamma))).min(1.0)
    } else {
        1.0
    };
    if !(a > 0.0 && a <= a_cap + 1e-12) {
        failures.push(format!("need 0 < a <= min(1, delta/(2(alpha-gamma))) = {a_cap}, got {a}"));
    }
    let gcond = gamma * (1.0 + (2.0 * a + 1.0) / delta);
    if !(alpha > gcond && gcond >= 0.0) {
        failures.push(format!(
            "need alpha > gamma (1 + (2a+1)/delta) >= 0, got alpha = {alpha}, rhs = {gcond}"
        ));
    }

    let d2 = delta * delta;
    let e1 = gamma / d2;
    let cab = c - a - b;
    let core = alpha * delta - gamma * (delta + 2.0 * a + 1.0);
    let e2 = if cab - 1.0 != 0.0 {
        (core - gamma * (a + 1.0) * (c - a - 2.0)) / (d2 * (cab - 1.0))
    } else {
        f64::NAN
    };
    let big_e = d2 - a * alpha * delta + a * gamma * delta + a * a * gamma;
    let e3_denom = 2.0 * d2 * cab * (cab - 1.0);

    let mut e3_min = f64::INFINITY;
    let mut e3_min_at = 0usize;
    let mut e3 = Vec::with_capacity(201);
    for n in 0..=200usize {
        let nf = n as f64;
        let numer = nf * nf * big_e
            + nf * (3.0 * big_e - a * core * (c - a - 1.0))
            + 2.0 * big_e
            - a * (c - a - 1.0) * (2.0 * core - gamma * (a + 1.0) * (c - a - 2.0));
        let v = numer / e3_denom;
        if v < e3_min {
            e3_min = v;
            e3_min_at = n;
        }
        e3.push(v);
    }
    if !(e1 >= 0.0) {
        failures.push(format!("e1 = {e1} negative"));
    }
    if !(e2 >= 0.0) {
        failures.push(format!("e2 = {e2} negative"));
    }
    if !(e3_min >= 0.0) {
        failures.push(format!("e3({e3_min_at}) = {e3_min} negative"));
    }

    // kernel density on an interior grid; the Pochhammer ratio
    // (c-a)_n (1-a)_n / ((c-a-b)_{n+1} (3)_n) feeds the (1-t)^{n+2} tail
    let mut ratios = Vec::with_capacity(201);
    let mut r = 1.0 / cab; // n = 0 term: 1 / (c-a-b)_1
    for n in 0..=200usize {
        ratios.push(r);
        let nf = n as f64;
        r *= (c - a + nf) * (1.0 - a + nf) / ((cab + nf + 1.0) * (3.0 + nf));
    }
    let mut n4_min = f64::INFINITY;
    for i in 0..1000 {
        let t = (i as f64 + 0.5) / 1000.0;
        let u = 1.0 - t;
        let mut v = e1 + e2 * u;
        let mut up = u * u;
        for n in 0..=200usize {
            v += e3[n] * ratios[n] * up;
            up *= u;
            if up < 1e-18 {
                break;
            }
        }
        if v < n4_min {
            n4_min = v;
        }
    }
    if !(n4_min >= -1e-12) {
        failures.push(format!("kernel density dips to {n4_min}"));
    }

    Ok(HohlovValidation {
        ok: failures.is_empty(),
        failures,
        e1,
        e2,
        e3_min,
        e3_min_at,
        n4_min,
    })
}

/// Full kernel-operator bound: validates, computes beta2, and combines with
/// the supplied beta1 under the duality.
pub fn beta_hohlov(h: &HohlovParams, p: &ClassParams) -> Result<BoundResult> {
    let report = validate_hohlov(h, p)?;
    if !report.ok {
        return Err(Error::InadmissibleParams(format!(
            "kernel-operator hypotheses failed: {}",
            report.failures.join("; ")
        )));
    }
    let beta2 = beta2_hohlov(h, p)?;
    let beta = combine_duality(h.beta1, beta2);
    Ok(BoundResult {
        beta,
        method: Method::HohlovDuality,
        error_estimate: 1e-11,
        diagnostics: vec![
            ("beta2".to_string(), beta2),
            ("n4_min".to_string(), report.n4_min),
            ("e3_min".to_string(), report.e3_min),
        ],
    })
}

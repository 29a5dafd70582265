//! Deterministic self-test battery: a fixed list of checks against known
//! closed-form values. Runs in a few seconds and produces identical output
//! on every invocation, so it doubles as a reproducibility probe.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::bounds::{beta_thm1, beta_thm1_bernardi_closed, beta_thm2, combine_duality};
use crate::hypergeom::{gauss_2f1, kernel_2f1_integral, pfq};
use crate::params::{ClassParams, TargetParams};
use crate::series::{extremal_series, PowerSeries};
use crate::verify::{membership_test, sharpness_thm2, MembershipGrid};
use crate::weights::WeightSpec;

/// One named comparison against a reference value.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

fn check(name: &str, computed: crate::Result<f64>, expected: f64, tol: f64) -> Check {
    let computed = computed.unwrap_or(f64::NAN);
    Check {
        name: name.to_string(),
        computed,
        expected,
        tol,
        pass: (computed - expected).abs() <= tol,
    }
}

/// Runs the full battery and returns every check, in a fixed order.
pub fn run_selftest() -> Vec<Check> {
    let mut out = Vec::new();

    out.push(check(
        "gauss_2f1_log2",
        gauss_2f1(1.0, 1.0, 2.0, -1.0),
        LN_2,
        1e-12,
    ));
    out.push(check(
        "gauss_2f1_flat_kernel",
        gauss_2f1(1.0, 2.0, 3.0, -1.0),
        2.0 * (1.0 - LN_2),
        1e-12,
    ));
    out.push(check(
        "pfq_3f2_reduces_to_2f1",
        pfq(&[1.0, 2.0, 5.0], &[3.0, 5.0], -1.0),
        2.0 * (1.0 - LN_2),
        1e-12,
    ));
    out.push(check(
        "kernel_integral_log2",
        kernel_2f1_integral(1.0, -1.0, 1e-12),
        LN_2,
        1e-10,
    ));

    let flat = WeightSpec::bernardi(0.0).expect("flat weight");
    let linear = WeightSpec::bernardi(1.0).expect("linear weight");
    out.push(check("flat_weight_mass", flat.moment(0), 1.0, 1e-12));
    out.push(check(
        "linear_weight_first_moment",
        linear.moment(1),
        2.0 / 3.0,
        1e-12,
    ));
    if let Ok(hoh) = WeightSpec::hohlov(0.5, 0.5, 2.0) {
        out.push(check(
            "gauss_weight_mass",
            hoh.normalize_check().map(|r| r.mass),
            1.0,
            1e-9,
        ));
    }

    let starlike = ClassParams::new(1.0, 0.0, 1.0).expect("class params");
    let convexish = ClassParams::new(3.0, 1.0, 1.0).expect("class params");
    let xi0 = TargetParams::new(0.0).expect("target");

    out.push(check(
        "first_bound_flat_weight",
        beta_thm1(&starlike, &flat, &xi0).map(|r| r.beta),
        1.0 - 0.5 / (1.0 - LN_2),
        1e-9,
    ));
    out.push(check(
        "first_bound_two_root_case",
        beta_thm1(&convexish, &flat, &xi0).map(|r| r.beta),
        -1.816378,
        1e-6,
    ));
    out.push(check(
        "first_bound_closed_form_agrees",
        beta_thm1_bernardi_closed(&convexish, 0.0, &xi0)
            .and_then(|c| beta_thm1(&convexish, &flat, &xi0).map(|q| c.beta - q.beta)),
        0.0,
        1e-8,
    ));
    out.push(check(
        "second_bound_flat_weight",
        beta_thm2(&flat, &xi0).map(|r| r.beta),
        1.0 - 0.5 / (1.0 - LN_2),
        1e-9,
    ));
    let xi_zero_cross = TargetParams::new(2.0 * LN_2 - 1.0).expect("target");
    out.push(check(
        "second_bound_zero_crossing",
        beta_thm2(&flat, &xi_zero_cross).map(|r| r.beta),
        0.0,
        1e-9,
    ));
    out.push(check(
        "second_bound_sharpness",
        sharpness_thm2(&flat, &xi0).map(|r| r.achieved - r.target),
        0.0,
        1e-6,
    ));

    let grid = MembershipGrid::default();
    out.push(check(
        "identity_membership_margin",
        membership_test(&PowerSeries::identity(32), &starlike, 0.3, &grid).map(|r| r.margin),
        0.7,
        1e-9,
    ));
    let beta = 1.0 - 0.5 / (1.0 - LN_2);
    out.push(check(
        "extremal_membership_margin_positive",
        extremal_series(beta, 1.0, 0.0, 1.0, 2048)
            .and_then(|f| membership_test(&f, &starlike, beta, &grid))
            .map(|r| if r.is_member { 1.0 } else { 0.0 }),
        1.0,
        0.0,
    ));

    out.push(check(
        "duality_combination_fixed_point",
        Ok(combine_duality(0.5, 1.0)),
        1.0,
        0.0,
    ));
    out.push(check(
        "extremal_boundary_value",
        extremal_series(beta, 1.0, 0.0, 1.0, 256)
            .and_then(|f| crate::series::ratio_over_z(&f))
            .and_then(|p| p.eval_at(Complex64::new(-1.0, 0.0), true))
            .map(|e| e.value.re),
        // f(-1)/(-1) for the flat-weight extremal: 1 + 2(1-beta)(ln 2 - 1)
        1.0 + 2.0 * (1.0 - beta) * (LN_2 - 1.0),
        1e-7,
    ));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let checks = run_selftest();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(c.pass, "{}: computed {} expected {}", c.name, c.computed, c.expected);
        }
    }

    #[test]
    fn deterministic_between_runs() {
        let a = run_selftest();
        let b = run_selftest();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.computed.to_bits(), y.computed.to_bits());
        }
    }
}

//! Numerical verification: grid membership tests, the transform's
//! coefficient identity, sharpness of the bounds, and the kernel-operator
//! positivity check.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::bounds::{beta2_hohlov, beta_thm1, beta_thm2, combine_duality, validate_hohlov};
use crate::error::{Error, Result};
use crate::hypergeom::gauss_2f1_coefficients;
use crate::params::{ClassParams, HohlovParams, TargetParams};
use crate::series::{
    apply_transform, extremal_power, functional_from_power, functional_h, moment_multiply,
    principal_power, ratio_over_z, zlog_derivative, PowerSeries, DEFAULT_ORDER,
};
use crate::weights::WeightSpec;

/// Series order used by the high-radius kernel positivity check, where
/// truncation at the default order would dominate the margin.
pub const KERNEL_CHECK_ORDER: usize = 2048;

/// Radial/angular resolution of the disk sampling grid.
#[derive(Debug, Clone, Copy)]
pub struct MembershipGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    pub theta_steps: usize,
    pub phi_steps: usize,
    /// Rings whose truncation tail estimate exceeds this are excluded
    /// (counted as warnings) instead of contaminating the margin.
    pub ring_tail_threshold: f64,
}

impl Default for MembershipGrid {
    fn default() -> Self {
        MembershipGrid {
            r_min: 0.1,
            r_max: 0.995,
            r_steps: 20,
            theta_steps: 720,
            phi_steps: 720,
            ring_tail_threshold: 1e-3,
        }
    }
}

/// Grid-approximate membership verdict: the margin is
/// max over phi of min over sampled z of Re e^{i phi}(H(z) - beta).
#[derive(Debug, Clone, Copy)]
pub struct MembershipReport {
    pub is_member: bool,
    pub margin: f64,
    /// Maximizing rotation, normalized to (-pi, pi].
    pub best_phi: f64,
    /// Number of grid points excluded because their ring's truncation tail
    /// exceeded the threshold.
    pub warnings: usize,
    pub grid: MembershipGrid,
}

/// Boundary sharpness verdict: pass when
/// |achieved - target| <= max(1e-4, 10 * tail_estimate).
#[derive(Debug, Clone, Copy)]
pub struct SharpnessReport {
    pub target: f64,
    pub achieved: f64,
    pub tail_estimate: f64,
    pub pass: bool,
    /// The bound level the extremal was built at.
    pub beta: f64,
}

/// Values of the series on the circle of radius r at `theta_steps` equally
/// spaced angles, via coefficient folding and one inverse FFT; also returns
/// the geometric truncation tail bound for this radius.
fn ring_values(
    coeffs: &[Complex64],
    r: f64,
    theta_steps: usize,
    fft: &dyn rustfft::Fft<f64>,
) -> (Vec<Complex64>, f64) {
    let mut bins = vec![Complex64::new(0.0, 0.0); theta_steps];
    let mut rn = 1.0f64;
    for (n, &c) in coeffs.iter().enumerate() {
        bins[n % theta_steps] += c * rn;
        rn *= r;
    }
    let look = coeffs.len().min(16);
    let m = coeffs[coeffs.len() - look..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let tail = m * r.powi(coeffs.len() as i32) / (1.0 - r);
    fft.process(&mut bins);
    (bins, tail)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; the minimum of any linear functional over the
/// point cloud is attained on the hull, which shrinks the phi sweep.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn min_rotated_re(hull: &[(f64, f64)], phi: f64) -> f64 {
    let (c, s) = (phi.cos(), phi.sin());
    hull.iter()
        .map(|&(x, y)| x * c - y * s)
        .fold(f64::INFINITY, f64::min)
}

/// Maximizes `min_rotated_re` over phi: full grid sweep then ternary
/// refinement around the best cell.
fn maximize_margin(hull: &[(f64, f64)], phi_steps: usize) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let mut best_phi = 0.0;
    let mut best = f64::NEG_INFINITY;
    for j in 0..phi_steps {
        let phi = -std::f64::consts::PI + tau * j as f64 / phi_steps as f64;
        let m = min_rotated_re(hull, phi);
        if m > best {
            best = m;
            best_phi = phi;
        }
    }
    let mut lo = best_phi - tau / phi_steps as f64;
    let mut hi = best_phi + tau / phi_steps as f64;
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if min_rotated_re(hull, m1) < min_rotated_re(hull, m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let mut phi = 0.5 * (lo + hi);
    if phi <= -std::f64::consts::PI {
        phi += tau;
    } else if phi > std::f64::consts::PI {
        phi -= tau;
    }
    (min_rotated_re(hull, phi), phi)
}

/// Collects `series(z) - shift` over the grid rings (excluding rings whose
/// tail bound exceeds the threshold) and returns the points plus the count
/// of excluded grid points.
fn grid_points(
    series: &PowerSeries,
    shift: f64,
    grid: &MembershipGrid,
) -> Result<(Vec<(f64, f64)>, usize)> {
    if grid.r_steps < 2 || grid.theta_steps < 8 || grid.phi_steps < 8 {
        return Err(Error::Input(format!("grid too coarse: {grid:?}")));
    }
    if !(grid.r_min > 0.0 && grid.r_min < grid.r_max && grid.r_max < 1.0) {
        return Err(Error::Input(format!("bad radial range: {grid:?}")));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(grid.theta_steps);

    let mut pts = Vec::with_capacity(grid.r_steps * grid.theta_steps);
    let mut warnings = 0usize;
    for k in 0..grid.r_steps {
        let r = grid.r_min + (grid.r_max - grid.r_min) * k as f64 / (grid.r_steps - 1) as f64;
        let (vals, tail) = ring_values(series.coeffs(), r, grid.theta_steps, fft.as_ref());
        if tail > grid.ring_tail_threshold {
            warnings += grid.theta_steps;
            continue;
        }
        pts.extend(vals.iter().map(|v| (v.re - shift, v.im)));
    }
    if pts.is_empty() {
        return Err(Error::NonConvergence {
            what: "all grid rings excluded by tail estimates".into(),
            value: f64::NAN,
            estimate: f64::INFINITY,
        });
    }
    Ok((pts, warnings))
}

/// Grid membership test of `f` in the class at level `beta`: computes the
/// class functional H and checks that some rotation e^{i phi} pushes
/// H(grid) - beta into the right half plane. Approximate by construction —
/// a verdict about the sampled points only.
pub fn membership_test(
    f: &PowerSeries,
    p: &ClassParams,
    beta: f64,
    grid: &MembershipGrid,
) -> Result<MembershipReport> {
    let h = functional_h(f, p.alpha, p.gamma, p.delta)?;
    membership_functional(&h, beta, grid)
}

/// Grid membership test given the class functional H directly. Useful when
/// H has a stable coefficient representation but the function it belongs to
/// does not (e.g. the image of an extremal under the transform).
pub fn membership_functional(
    h: &PowerSeries,
    beta: f64,
    grid: &MembershipGrid,
) -> Result<MembershipReport> {
    if !h.is_unit_type() {
        return Err(Error::Input(
            "class functional must have constant term 1".into(),
        ));
    }
    let (pts, warnings) = grid_points(h, beta, grid)?;
    let hull = convex_hull(pts);
    let (margin, best_phi) = maximize_margin(&hull, grid.phi_steps);
    Ok(MembershipReport {
        is_member: margin > 0.0,
        margin,
        best_phi,
        warnings,
        grid: *grid,
    })
}

/// Max relative deviation of the transform's coefficient action: for
/// F = transform of f, coefficient n of (F/z)^d (zF'/F) must equal
/// tau_n times coefficient n of (f/z)^d (zf'/f).
pub fn transform_identity_check(f: &PowerSeries, w: &WeightSpec, delta: f64) -> Result<f64> {
    let tau = w.moments(f.order())?;
    let big_f = apply_transform(f, &tau, delta)?;

    let lhs = principal_power(&ratio_over_z(&big_f)?, delta)?.mul(&zlog_derivative(&big_f)?);
    let rhs = principal_power(&ratio_over_z(f)?, delta)?.mul(&zlog_derivative(f)?);

    // the top coefficient of (f/z)^d is a truncation artifact of f itself
    let mut worst = 0.0f64;
    for n in 0..f.order() {
        let want = rhs.coeff(n) * tau.value(n);
        let dev = (lhs.coeff(n) - want).norm() / want.norm().max(1.0);
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Sharpness of the first bound: the transformed extremal's functional,
/// evaluated at z = -1 through the accelerated coefficient series, must
/// come back to the target xi.
pub fn sharpness_thm1(
    p: &ClassParams,
    w: &WeightSpec,
    t: &TargetParams,
) -> Result<SharpnessReport> {
    let beta = beta_thm1(p, w, t)?.beta;
    let tau = w.moments(DEFAULT_ORDER)?;
    // (F/z)^delta (zF'/F) of the transformed extremal F, assembled from the
    // closed-form delta-th power coefficients (F itself can have radius of
    // convergence < 1 and is never constructed)
    let pw = extremal_power(beta, p.delta, p.mu, p.nu, DEFAULT_ORDER)?;
    let g = functional_from_power(&moment_multiply(&pw, &tau)?, 1.0, 0.0, p.delta)?;
    let ev = g.eval_at(Complex64::new(-1.0, 0.0), true)?;
    let achieved = ev.value.re;
    Ok(SharpnessReport {
        target: t.xi,
        achieved,
        tail_estimate: ev.tail_estimate,
        pass: (achieved - t.xi).abs() <= (1e-4f64).max(10.0 * ev.tail_estimate),
        beta,
    })
}

/// Sharpness of the second bound: H0(-1) with
/// H0(z) = 1 + 2 (1 - beta) sum tau_n z^n must come back to xi.
pub fn sharpness_thm2(w: &WeightSpec, t: &TargetParams) -> Result<SharpnessReport> {
    let beta = beta_thm2(w, t)?.beta;
    let tau = w.moments(DEFAULT_ORDER)?;
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for n in 1..=DEFAULT_ORDER {
        coeffs.push(Complex64::new(2.0 * (1.0 - beta) * tau.value(n), 0.0));
    }
    let h0 = PowerSeries::new(coeffs)?;
    let ev = h0.eval_at(Complex64::new(-1.0, 0.0), true)?;
    let achieved = ev.value.re;
    Ok(SharpnessReport {
        target: t.xi,
        achieved,
        tail_estimate: ev.tail_estimate,
        pass: (achieved - t.xi).abs() <= (1e-4f64).max(10.0 * ev.tail_estimate),
        beta,
    })
}

/// Outcome of the kernel positivity check.
#[derive(Debug, Clone)]
pub struct KernelCheckReport {
    pub pass: bool,
    /// Minimum of Re N3 over the sampled grid.
    pub min_re: f64,
    /// N3(-1) from the accelerated series (equals beta2).
    pub boundary_value: f64,
    /// beta2 recomputed directly from the three Gauss values.
    pub beta2: f64,
    /// Combined bound 1 - 2(1 - beta1)(1 - beta2).
    pub beta: f64,
    pub warnings: usize,
}

/// Assembles N3(z) from the three shifted Gauss series, samples Re N3 on
/// the grid, and requires Re N3(z) > N3(-1) - 1e-8 together with agreement
/// between the series boundary value and the direct beta2.
pub fn hohlov_kernel_check(
    h: &HohlovParams,
    p: &ClassParams,
    grid: &MembershipGrid,
) -> Result<KernelCheckReport> {
    let report = validate_hohlov(h, p)?;
    if !report.ok {
        return Err(Error::InadmissibleParams(format!(
            "kernel-operator hypotheses failed: {}",
            report.failures.join("; ")
        )));
    }
    let (w0, w1, w2) = crate::bounds::hohlov_weight_coefficients(h, p);
    let c0 = gauss_2f1_coefficients(h.a, h.b, h.c, KERNEL_CHECK_ORDER)?;
    let c1 = gauss_2f1_coefficients(h.a + 1.0, h.b, h.c, KERNEL_CHECK_ORDER)?;
    let c2 = gauss_2f1_coefficients(h.a + 2.0, h.b, h.c, KERNEL_CHECK_ORDER)?;
    let n3 = PowerSeries::new(
        (0..=KERNEL_CHECK_ORDER)
            .map(|n| Complex64::new(w0 * c0[n] + w1 * c1[n] + w2 * c2[n], 0.0))
            .collect(),
    )?;

    let boundary_value = n3.eval_at(Complex64::new(-1.0, 0.0), true)?.value.re;
    let beta2 = beta2_hohlov(h, p)?;
    let beta = combine_duality(h.beta1, beta2);

    let (pts, warnings) = grid_points(&n3, 0.0, grid)?;
    let min_re = pts.iter().map(|&(x, _)| x).fold(f64::INFINITY, f64::min);

    let pass = min_re > boundary_value - 1e-8 && (boundary_value - beta2).abs() <= 1e-8;
    Ok(KernelCheckReport {
        pass,
        min_re,
        boundary_value,
        beta2,
        beta,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::extremal_series;
    use std::f64::consts::LN_2;

    fn class(alpha: f64, gamma: f64, delta: f64) -> ClassParams {
        ClassParams::new(alpha, gamma, delta).unwrap()
    }

    fn target(xi: f64) -> TargetParams {
        TargetParams::new(xi).unwrap()
    }

    #[test]
    fn identity_function_is_member() {
        let f = PowerSeries::identity(64);
        let grid = MembershipGrid::default();
        let r = membership_test(&f, &class(2.0, 0.2, 1.0), 0.3, &grid).unwrap();
        assert!(r.is_member);
        assert!((r.margin - 0.7).abs() < 1e-9, "margin {}", r.margin);
        assert!(r.best_phi.abs() < 1e-2, "phi {}", r.best_phi);
        assert_eq!(r.warnings, 0);
    }

    #[test]
    fn extremal_membership_threshold() {
        // raw extremal of W_beta^1(1,0): member at beta, not at beta + 0.1
        let beta = 1.0 - 0.5 / (1.0 - LN_2);
        let f = extremal_series(beta, 1.0, 0.0, 1.0, KERNEL_CHECK_ORDER).unwrap();
        let p = class(1.0, 0.0, 1.0);
        let grid = MembershipGrid::default();
        let at_level = membership_test(&f, &p, beta, &grid).unwrap();
        assert!(at_level.is_member, "margin {}", at_level.margin);
        let above = membership_test(&f, &p, beta + 0.1, &grid).unwrap();
        assert!(!above.is_member, "margin {}", above.margin);
    }

    #[test]
    fn margin_stable_under_grid_rotation() {
        // rotating f's coefficient phases rotates the z-grid; the sampled
        // set is the same circle family, so the margin must not move
        let beta = -0.25;
        let f = extremal_series(beta, 1.0, 0.0, 1.0, 360).unwrap();
        let p = class(1.0, 0.0, 1.0);
        let grid = MembershipGrid {
            r_max: 0.9,
            ..MembershipGrid::default()
        };
        let psi = std::f64::consts::TAU * 3.0 / grid.theta_steps as f64;
        let rotated = PowerSeries::new(
            f.coeffs()
                .iter()
                .enumerate()
                .map(|(n, &c)| {
                    let ph = Complex64::from_polar(1.0, psi * (n as f64 - 1.0));
                    c * ph
                })
                .collect(),
        )
        .unwrap();
        let base = membership_test(&f, &p, beta, &grid).unwrap();
        let rot = membership_test(&rotated, &p, beta, &grid).unwrap();
        assert!(
            (base.margin - rot.margin).abs() < 1e-8,
            "{} vs {}",
            base.margin,
            rot.margin
        );
    }

    #[test]
    fn identity_check_trivial_and_polynomial() {
        let w = WeightSpec::bernardi(2.0).unwrap();
        let f = PowerSeries::identity(16);
        assert!(transform_identity_check(&f, &w, 1.0).unwrap() < 1e-15);

        let mut vals = vec![0.0; 33];
        vals[1] = 1.0;
        for (i, v) in [0.21, -0.13, 0.4, 0.05, -0.02, 0.09, 0.3, -0.11, 0.07, 0.2]
            .iter()
            .enumerate()
        {
            vals[i + 2] = *v;
        }
        let f = PowerSeries::from_real(&vals).unwrap();
        let dev = transform_identity_check(&f, &w, 1.0).unwrap();
        assert!(dev <= 1e-10, "deviation {dev}");
    }

    #[test]
    fn identity_check_extremal_flat_kernel() {
        let w = WeightSpec::hohlov(1.0, 1.0, 2.0).unwrap();
        let f = extremal_series(-0.5, 2.0, 1.0, 1.0, 48).unwrap();
        let dev = transform_identity_check(&f, &w, 2.0).unwrap();
        assert!(dev <= 1e-10, "deviation {dev}");
    }

    #[test]
    fn sharpness_first_bound_goldens() {
        let w0 = WeightSpec::bernardi(0.0).unwrap();
        let r = sharpness_thm1(&class(1.0, 0.0, 1.0), &w0, &target(0.0)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.achieved.abs() < 1e-6, "achieved {}", r.achieved);

        let r = sharpness_thm1(&class(3.0, 1.0, 1.0), &w0, &target(0.0)).unwrap();
        assert!(r.pass && r.achieved.abs() < 1e-4, "{r:?}");

        let w1 = WeightSpec::bernardi(1.0).unwrap();
        let r = sharpness_thm1(&class(1.0, 0.0, 2.0), &w1, &target(0.5)).unwrap();
        assert!(r.pass && (r.achieved - 0.5).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn sharpness_second_bound_goldens() {
        let w0 = WeightSpec::bernardi(0.0).unwrap();
        let r = sharpness_thm2(&w0, &target(0.0)).unwrap();
        assert!(r.pass && r.achieved.abs() < 1e-6, "{r:?}");

        let xi = 2.0 * LN_2 - 1.0;
        let r = sharpness_thm2(&w0, &target(xi)).unwrap();
        assert!(r.pass && (r.achieved - xi).abs() < 1e-6, "{r:?}");
        assert!(r.beta.abs() < 1e-9);

        let w1 = WeightSpec::bernardi(1.0).unwrap();
        let r = sharpness_thm2(&w1, &target(0.0)).unwrap();
        assert!(r.pass && r.achieved.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn kernel_check_worked_example() {
        let p = class(0.5, 0.0, 1.0);
        let h = HohlovParams {
            a: 1.0,
            b: 0.5,
            c: 2.7,
            beta1: 0.0,
        };
        let grid = MembershipGrid::default();
        let r = hohlov_kernel_check(&h, &p, &grid).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.min_re > r.boundary_value - 1e-8);
        // beta1 = 0 makes the combined bound 2 beta2 - 1
        assert!((r.beta - (2.0 * r.beta2 - 1.0)).abs() < 1e-12);
    }
}

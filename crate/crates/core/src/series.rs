//! Truncated power-series arithmetic and the differential functionals on
//! normalized analytic functions.
//!
//! All operations are exact in the truncated algebra: order-N inputs yield
//! order-N outputs whose coefficients carry no truncation feedback, so
//! tolerance only enters numeric evaluation of a series at a point.

use num_complex::Complex64;

use crate::accel::euler_sum;
use crate::error::{Error, Result};
use crate::params::derive_mu_nu;
use crate::weights::MomentSequence;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 256;

/// Tolerance for the boundary tail estimate in [`PowerSeries::eval_at`].
pub const EVAL_TAIL_TOL: f64 = 1e-8;

/// Truncated Taylor coefficients c_0..c_N of an analytic function about 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

/// Result of evaluating a series at a point: the value and an estimate of
/// the truncated tail (acceleration increment on the boundary, geometric
/// bound inside the disk).
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_estimate: f64,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidSeries(
                "truncation order must be at least 1".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidSeries("non-finite coefficient".into()));
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The constant series 1 at the given order.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        PowerSeries { coeffs }
    }

    /// The identity function f(z) = z at the given order.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[1] = Complex64::new(1.0, 0.0);
        PowerSeries { coeffs }
    }

    /// The geometric series 1 + z + z^2 + ... (convolution identity).
    pub fn geometric(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Complex64::new(1.0, 0.0); order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Unit-type: c_0 = 1 (within roundoff).
    pub fn is_unit_type(&self) -> bool {
        (self.coeffs[0] - Complex64::new(1.0, 0.0)).norm() <= 1e-12
    }

    /// Function-type: c_0 = 0, c_1 = 1 (within roundoff).
    pub fn is_function_type(&self) -> bool {
        self.coeffs[0].norm() <= 1e-12 && (self.coeffs[1] - Complex64::new(1.0, 0.0)).norm() <= 1e-12
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        PowerSeries { coeffs }
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, k: Complex64) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|&c| k * c).collect(),
        }
    }

    pub fn add_scalar(&self, k: Complex64) -> PowerSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += k;
        PowerSeries { coeffs }
    }

    fn zip(&self, other: &PowerSeries, op: impl Fn(Complex64, Complex64) -> Complex64) -> PowerSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|n| op(self.coeff(n), other.coeff(n))).collect();
        PowerSeries { coeffs }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (n, slot) in coeffs.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                acc += self.coeff(k) * other.coeff(n - k);
            }
            *slot = acc;
        }
        PowerSeries { coeffs }
    }

    /// Series division by recurrence; requires a non-zero constant term in
    /// the divisor.
    pub fn div(&self, other: &PowerSeries) -> Result<PowerSeries> {
        let b0 = other.coeff(0);
        if b0.norm() < 1e-300 {
            return Err(Error::InvalidSeries(
                "division by series with zero constant term".into(),
            ));
        }
        let order = self.order().min(other.order());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for n in 0..=order {
            let mut acc = self.coeff(n);
            for k in 1..=n {
                acc -= other.coeff(k) * coeffs[n - k];
            }
            coeffs[n] = acc / b0;
        }
        Ok(PowerSeries { coeffs })
    }

    /// Formal logarithm of a unit-type series.
    pub fn log(&self) -> Result<PowerSeries> {
        if !self.is_unit_type() {
            return Err(Error::InvalidSeries(
                "formal log requires constant term 1".into(),
            ));
        }
        let order = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        for n in 1..=order {
            let mut acc = self.coeff(n) * n as f64;
            for k in 1..n {
                acc -= out[k] * k as f64 * self.coeff(n - k);
            }
            out[n] = acc / n as f64;
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// Formal exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<PowerSeries> {
        if self.coeffs[0].norm() > 1e-12 {
            return Err(Error::InvalidSeries(
                "formal exp requires zero constant term".into(),
            ));
        }
        let order = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        out[0] = Complex64::new(1.0, 0.0);
        for n in 1..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeff(k) * k as f64 * out[n - k];
            }
            out[n] = acc / n as f64;
        }
        Ok(PowerSeries { coeffs: out })
    }
}

/// Hadamard (termwise) product; inputs are truncated to the smaller order.
pub fn hadamard(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let order = a.order().min(b.order());
    PowerSeries::new((0..=order).map(|n| a.coeff(n) * b.coeff(n)).collect())
        .expect("termwise product of finite series is finite")
}

/// Principal power p^delta of a unit-type series, by the direct recurrence
/// from q' p = delta p' q (with p_0 = 1):
/// `n q_n = sum_{k=1..n} (delta k - (n - k)) p_k q_{n-k}`.
///
/// Equivalent to exp(delta * log p) as a formal series, but numerically far
/// better behaved: perturbations propagate like the result itself, whereas
/// the log route blows up whenever p has a zero inside the unit disk (the
/// log series then has radius < 1 even though p^delta may not).
pub fn principal_power(p: &PowerSeries, delta: f64) -> Result<PowerSeries> {
    if !(delta > 0.0) {
        return Err(Error::InadmissibleParams(format!(
            "principal power exponent must be > 0, got {delta}"
        )));
    }
    if !p.is_unit_type() {
        return Err(Error::InvalidSeries(
            "principal power requires constant term 1".into(),
        ));
    }
    let order = p.order();
    let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
    out[0] = Complex64::new(1.0, 0.0);
    for n in 1..=order {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            let w = delta * k as f64 - (n - k) as f64;
            acc += p.coeff(k) * out[n - k] * w;
        }
        out[n] = acc / n as f64;
    }
    Ok(PowerSeries { coeffs: out })
}

/// `(f/z)` of a function-type series, as a unit-type series of the same order
/// (the top coefficient is padded with zero).
pub fn ratio_over_z(f: &PowerSeries) -> Result<PowerSeries> {
    if !f.is_function_type() {
        return Err(Error::InvalidSeries(
            "expected function-type series (c0 = 0, c1 = 1)".into(),
        ));
    }
    let order = f.order();
    let mut coeffs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        coeffs.push(f.coeff(n + 1));
    }
    PowerSeries::new(coeffs)
}

/// z f'(z) / f(z) of a function-type series (unit-type result).
pub fn zlog_derivative(f: &PowerSeries) -> Result<PowerSeries> {
    let p = ratio_over_z(f)?;
    // z f'/f = f' / (f/z); f'(z) as a series in z has constant term 1
    let order = f.order();
    let mut fp = Vec::with_capacity(order + 1);
    for n in 0..=order {
        fp.push(f.coeff(n + 1) * (n as f64 + 1.0));
    }
    PowerSeries::new(fp)?.div(&p)
}

/// z f''(z) / f'(z) of a function-type series (zero constant term).
pub fn second_zlog_derivative(f: &PowerSeries) -> Result<PowerSeries> {
    let order = f.order();
    let mut zfpp = Vec::with_capacity(order + 1);
    let mut fp = Vec::with_capacity(order + 1);
    for n in 0..=order {
        zfpp.push(f.coeff(n + 1) * (n as f64 + 1.0) * n as f64);
        fp.push(f.coeff(n + 1) * (n as f64 + 1.0));
    }
    PowerSeries::new(zfpp)?.div(&PowerSeries::new(fp)?)
}

/// The differential functional H of a normalized function, by the
/// coefficient identity: with P = (f/z)^delta = 1 + sum b_n z^n,
/// H_n = (delta + n mu)(delta + n nu) b_n / delta^2.
pub fn functional_h(f: &PowerSeries, alpha: f64, gamma: f64, delta: f64) -> Result<PowerSeries> {
    let (mu, nu) = derive_mu_nu(alpha, gamma)?;
    if !(delta > 0.0) {
        return Err(Error::InadmissibleParams(format!("delta must be > 0, got {delta}")));
    }
    let p = principal_power(&ratio_over_z(f)?, delta)?;
    let d2 = delta * delta;
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let nf = n as f64;
            b * ((delta + nf * mu) * (delta + nf * nu) / d2)
        })
        .collect();
    PowerSeries::new(coeffs)
}

/// The same functional assembled from its defining differential expression,
///
/// `(1 - alpha + 2 gamma)(f/z)^d
///   + (alpha - 3 gamma + gamma [(1 - 1/d)(zf'/f) + (1/d)(1 + zf''/f')])
///     (f/z)^d (zf'/f)`,
///
/// using series division for the logarithmic derivatives. Used as an
/// independent cross-check of [`functional_h`].
pub fn functional_h_direct(
    f: &PowerSeries,
    alpha: f64,
    gamma: f64,
    delta: f64,
) -> Result<PowerSeries> {
    derive_mu_nu(alpha, gamma)?;
    if !(delta > 0.0) {
        return Err(Error::InadmissibleParams(format!("delta must be > 0, got {delta}")));
    }
    let p = principal_power(&ratio_over_z(f)?, delta)?;
    let zl = zlog_derivative(f)?;
    let zl2 = second_zlog_derivative(f)?;
    let one = Complex64::new(1.0, 0.0);

    let bracket = zl
        .scale(Complex64::new(1.0 - 1.0 / delta, 0.0))
        .add(&zl2.scale(Complex64::new(1.0 / delta, 0.0)).add_scalar(Complex64::new(1.0 / delta, 0.0)));
    let factor = bracket
        .scale(Complex64::new(gamma, 0.0))
        .add_scalar(Complex64::new(alpha - 3.0 * gamma, 0.0));
    let term = factor.mul(&p).mul(&zl);
    Ok(p.scale(one * (1.0 - alpha + 2.0 * gamma)).add(&term))
}

/// The delta-th power series P = (f/z)^delta of the extremal function of
/// the first bound, in closed form:
/// b_n = 2 (1 - beta) delta^2 / ((delta + n mu)(delta + n nu)).
///
/// Prefer this representation for high-order work: P is analytic on the
/// whole disk, while the extremal function itself (its 1/delta-th root)
/// can have a smaller radius of convergence when P vanishes inside the
/// disk, making its coefficients useless at large order.
pub fn extremal_power(beta: f64, delta: f64, mu: f64, nu: f64, order: usize) -> Result<PowerSeries> {
    if !(beta < 1.0) {
        return Err(Error::InadmissibleParams(format!("beta must be < 1, got {beta}")));
    }
    if !(delta > 0.0) || mu < 0.0 || nu < 0.0 {
        return Err(Error::InadmissibleParams(format!(
            "need delta > 0, mu >= 0, nu >= 0 (got {delta}, {mu}, {nu})"
        )));
    }
    let d2 = delta * delta;
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for n in 1..=order {
        let nf = n as f64;
        let b = 2.0 * (1.0 - beta) * d2 / ((delta + nf * mu) * (delta + nf * nu));
        p.push(Complex64::new(b, 0.0));
    }
    PowerSeries::new(p)
}

/// The extremal function of the first bound: f = z P^{1/delta} with P from
/// [`extremal_power`]. See that function's caveat about high orders.
pub fn extremal_series(beta: f64, delta: f64, mu: f64, nu: f64, order: usize) -> Result<PowerSeries> {
    let p = extremal_power(beta, delta, mu, nu, order)?;
    let root = principal_power(&p, 1.0 / delta)?;
    // f = z * root
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
    for n in 1..=order {
        coeffs[n] = root.coeff(n - 1);
    }
    PowerSeries::new(coeffs)
}

/// Class functional assembled from the delta-th power series
/// P = (f/z)^delta = 1 + sum b_n z^n:
/// H_n = (delta + n mu)(delta + n nu) b_n / delta^2.
pub fn functional_from_power(
    p: &PowerSeries,
    alpha: f64,
    gamma: f64,
    delta: f64,
) -> Result<PowerSeries> {
    let (mu, nu) = derive_mu_nu(alpha, gamma)?;
    if !(delta > 0.0) {
        return Err(Error::InadmissibleParams(format!("delta must be > 0, got {delta}")));
    }
    if !p.is_unit_type() {
        return Err(Error::InvalidSeries(
            "power series must have constant term 1".into(),
        ));
    }
    let d2 = delta * delta;
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let nf = n as f64;
            b * ((delta + nf * mu) * (delta + nf * nu) / d2)
        })
        .collect();
    PowerSeries::new(coeffs)
}

/// Termwise moment action on a unit-type power series:
/// coefficient n is multiplied by tau_n.
pub fn moment_multiply(p: &PowerSeries, tau: &MomentSequence) -> Result<PowerSeries> {
    if tau.len() < p.order() + 1 {
        return Err(Error::InadmissibleParams(format!(
            "moment sequence too short: {} < {}",
            tau.len(),
            p.order() + 1
        )));
    }
    PowerSeries::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(n, &b)| b * tau.value(n))
            .collect(),
    )
}

/// Applies the weighted transform through its coefficient action: with
/// P = (f/z)^delta = 1 + sum b_n z^n, the image F satisfies
/// (F/z)^delta = 1 + sum b_n tau_n z^n.
pub fn apply_transform(f: &PowerSeries, tau: &MomentSequence, delta: f64) -> Result<PowerSeries> {
    if (tau.value(0) - 1.0).abs() > 1e-10 {
        return Err(Error::InadmissibleParams(format!(
            "moment sequence not normalized: tau_0 = {}",
            tau.value(0)
        )));
    }
    let order = f.order();
    if tau.len() < order + 1 {
        return Err(Error::InadmissibleParams(format!(
            "moment sequence too short: {} < {}",
            tau.len(),
            order + 1
        )));
    }
    let p = principal_power(&ratio_over_z(f)?, delta)?;
    let q = PowerSeries::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(n, &b)| b * tau.value(n))
            .collect(),
    )?;
    let root = principal_power(&q, 1.0 / delta)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
    for n in 1..=order {
        coeffs[n] = root.coeff(n - 1);
    }
    PowerSeries::new(coeffs)
}

/// Class functional of the transformed function, computed directly on the
/// delta-th power coefficients: H_n = (delta + n mu)(delta + n nu)
/// tau_n b_n / delta^2 with P = (f/z)^delta = 1 + sum b_n z^n.
///
/// Identical to `functional_h(apply_transform(f, tau, delta), ..)` as a
/// formal series, but avoids constructing the transformed function itself:
/// its 1/delta-th root can have radius of convergence < 1 (when the
/// moment-multiplied power series has a zero inside the disk), in which
/// case the round trip through `apply_transform` is numerically hopeless
/// at high order while the functional here stays perfectly conditioned.
pub fn transformed_functional(
    f: &PowerSeries,
    tau: &MomentSequence,
    alpha: f64,
    gamma: f64,
    delta: f64,
) -> Result<PowerSeries> {
    let (mu, nu) = derive_mu_nu(alpha, gamma)?;
    if !(delta > 0.0) {
        return Err(Error::InadmissibleParams(format!("delta must be > 0, got {delta}")));
    }
    let order = f.order();
    if tau.len() < order + 1 {
        return Err(Error::InadmissibleParams(format!(
            "moment sequence too short: {} < {}",
            tau.len(),
            order + 1
        )));
    }
    let p = principal_power(&ratio_over_z(f)?, delta)?;
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let nf = n as f64;
            b * tau.value(n) * ((delta + nf * mu) * (delta + nf * nu) / (delta * delta))
        })
        .collect();
    PowerSeries::new(coeffs)
}

impl PowerSeries {
    /// Evaluates the series at `z`.
    ///
    /// Inside the disk this is the direct partial sum with a geometric tail
    /// bound. On the boundary (|z| = 1) the `accelerated` flag must be set
    /// and the value is the Euler-accelerated Abel sum of the term sequence;
    /// evaluation fails if the acceleration's tail estimate exceeds
    /// [`EVAL_TAIL_TOL`].
    pub fn eval_at(&self, z: Complex64, accelerated: bool) -> Result<Evaluation> {
        let r = z.norm();
        if r > 1.0 + 1e-12 {
            return Err(Error::InadmissibleParams(format!(
                "evaluation point outside the closed disk: |z| = {r}"
            )));
        }
        if r >= 1.0 - 1e-12 {
            if !accelerated {
                return Err(Error::InadmissibleParams(
                    "boundary evaluation requires the accelerated flag".into(),
                ));
            }
            let mut zn = Complex64::new(1.0, 0.0);
            let terms: Vec<Complex64> = self
                .coeffs
                .iter()
                .map(|&c| {
                    let t = c * zn;
                    zn *= z;
                    t
                })
                .collect();
            let s = euler_sum(terms, EVAL_TAIL_TOL, self.coeffs.len());
            if s.tail_estimate > EVAL_TAIL_TOL {
                return Err(Error::NonConvergence {
                    what: "boundary series acceleration".into(),
                    value: s.value.re,
                    estimate: s.tail_estimate,
                });
            }
            return Ok(Evaluation {
                value: s.value,
                tail_estimate: s.tail_estimate,
            });
        }

        // Horner
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        let tail_estimate = if r == 0.0 {
            0.0
        } else {
            let look = self.coeffs.len().min(16);
            let m = self.coeffs[self.coeffs.len() - look..]
                .iter()
                .map(|c| c.norm())
                .fold(0.0f64, f64::max);
            m * r.powi(self.coeffs.len() as i32) / (1.0 - r)
        };
        Ok(Evaluation {
            value: acc,
            tail_estimate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn extremal_power_matches_function_route() {
        // the power-series route must agree with rooting and re-powering
        let (beta, delta, mu, nu) = (-0.4, 2.0, 0.5, 1.5);
        let p = extremal_power(beta, delta, mu, nu, 16).unwrap();
        let f = extremal_series(beta, delta, mu, nu, 16).unwrap();
        let back = principal_power(&ratio_over_z(&f).unwrap(), delta).unwrap();
        for n in 0..16 {
            assert!((p.coeff(n) - back.coeff(n)).norm() < 1e-12, "coeff {n}");
        }
    }

    #[test]
    fn transformed_functional_routes_agree() {
        let (beta, delta, mu, nu) = (-0.4, 2.0, 0.5, 1.5);
        let alpha = mu + nu + mu * nu; // alpha - gamma = mu + nu, gamma = mu nu
        let gamma = mu * nu;
        let tau = MomentSequence::try_new((0..=16).map(|n| 1.0 / (n as f64 + 1.0)).collect())
            .unwrap();
        let f = extremal_series(beta, delta, mu, nu, 16).unwrap();
        let via_function = functional_h(
            &apply_transform(&f, &tau, delta).unwrap(),
            alpha,
            gamma,
            delta,
        )
        .unwrap();
        let p = extremal_power(beta, delta, mu, nu, 16).unwrap();
        let via_power =
            functional_from_power(&moment_multiply(&p, &tau).unwrap(), alpha, gamma, delta)
                .unwrap();
        let direct = transformed_functional(&f, &tau, alpha, gamma, delta).unwrap();
        for n in 0..16 {
            assert!((via_function.coeff(n) - via_power.coeff(n)).norm() < 1e-10, "coeff {n}");
            assert!((direct.coeff(n) - via_power.coeff(n)).norm() < 1e-10, "coeff {n}");
        }
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn series(vals: &[f64]) -> PowerSeries {
        PowerSeries::from_real(vals).unwrap()
    }

    #[test]
    fn hadamard_termwise() {
        let a = series(&[1.0, 2.0]);
        let b = series(&[1.0, 3.0]);
        let h = hadamard(&a, &b);
        assert_eq!(h.coeff(0), c(1.0));
        assert_eq!(h.coeff(1), c(6.0));
    }

    #[test]
    fn hadamard_geometric_identity() {
        let f = series(&[0.0, 1.0, -0.3, 0.7, 0.11]);
        let ones = PowerSeries::geometric(4);
        assert_eq!(hadamard(&f, &ones), f);
    }

    #[test]
    fn hadamard_scaled_geometrics() {
        let n = 12;
        let a = PowerSeries::new((0..=n).map(|k| c(0.5f64.powi(k as i32))).collect()).unwrap();
        let b = PowerSeries::new((0..=n).map(|k| c((1.0 / 3.0f64).powi(k as i32))).collect()).unwrap();
        let h = hadamard(&a, &b);
        for k in 0..=n {
            let expect = (1.0 / 6.0f64).powi(k as i32);
            assert!((h.coeff(k).re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn power_identity_exponent() {
        let p = series(&[1.0, 0.4, -0.2, 0.05]);
        let q = principal_power(&p, 1.0).unwrap();
        for n in 0..=3 {
            assert!((q.coeff(n) - p.coeff(n)).norm() < 1e-14);
        }
    }

    #[test]
    fn power_binomial() {
        let p = series(&[1.0, 1.0, 0.0]);
        let q = principal_power(&p, 2.0).unwrap();
        assert!((q.coeff(0).re - 1.0).abs() < 1e-14);
        assert!((q.coeff(1).re - 2.0).abs() < 1e-14);
        assert!((q.coeff(2).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_round_trip() {
        let order = 64;
        let mut vals = vec![1.0];
        vals.extend((1..=order).map(|_| 0.0));
        vals[1] = 1.0;
        let p = PowerSeries::from_real(&vals).unwrap(); // 1 + z
        let back = principal_power(&principal_power(&p, 0.5).unwrap(), 2.0).unwrap();
        for n in 0..=order {
            assert!(
                (back.coeff(n) - p.coeff(n)).norm() < 1e-12,
                "coefficient {n} drifted"
            );
        }
    }

    #[test]
    fn power_rejects_non_unit() {
        let p = series(&[2.0, 1.0]);
        assert!(principal_power(&p, 0.5).is_err());
    }

    #[test]
    fn functional_h_of_identity_is_one() {
        let f = PowerSeries::identity(16);
        let h = functional_h(&f, 1.5, 0.25, 2.0).unwrap();
        assert!((h.coeff(0).re - 1.0).abs() < 1e-14);
        for n in 1..=16 {
            assert!(h.coeff(n).norm() < 1e-14);
        }
    }

    #[test]
    fn functional_h_quadratic_perturbation() {
        // f = z + eps z^2, delta = 1, alpha = 1, gamma = 0 -> H_1 = 2 eps
        let eps = 0.01;
        let mut vals = vec![0.0; 17];
        vals[1] = 1.0;
        vals[2] = eps;
        let f = PowerSeries::from_real(&vals).unwrap();
        let h = functional_h(&f, 1.0, 0.0, 1.0).unwrap();
        assert!((h.coeff(1).re - 2.0 * eps).abs() < 1e-14);
    }

    #[test]
    fn functional_h_paths_agree() {
        let mut vals = vec![0.0; 33];
        vals[1] = 1.0;
        vals[2] = 0.21;
        vals[3] = -0.08;
        vals[4] = 0.033;
        let f = PowerSeries::from_real(&vals).unwrap();
        for &(alpha, gamma, delta) in &[(1.0, 0.0, 1.0), (3.0, 1.0, 2.0), (2.0, 0.2, 0.5)] {
            let h1 = functional_h(&f, alpha, gamma, delta).unwrap();
            let h2 = functional_h_direct(&f, alpha, gamma, delta).unwrap();
            for n in 0..=32 {
                let scale = h1.coeff(n).norm().max(1.0);
                assert!(
                    (h1.coeff(n) - h2.coeff(n)).norm() / scale < 1e-10,
                    "({alpha},{gamma},{delta}) coefficient {n}"
                );
            }
        }
    }

    #[test]
    fn extremal_beta_one_limit() {
        let f = extremal_series(1.0 - 1e-14, 1.0, 0.0, 1.0, 16).unwrap();
        for n in 2..=16 {
            assert!(f.coeff(n).norm() < 1e-12);
        }
    }

    #[test]
    fn extremal_coefficients() {
        // delta=1, mu=0, nu=1, beta=0 -> b_n = 2/(n+1)
        let f = extremal_series(0.0, 1.0, 0.0, 1.0, 32).unwrap();
        let p = principal_power(&ratio_over_z(&f).unwrap(), 1.0).unwrap();
        for n in 1..32 {
            assert!((p.coeff(n).re - 2.0 / (n as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn extremal_round_trip_through_h() {
        for &(beta, delta, alpha, gamma) in &[(0.25, 1.0, 1.0, 0.0), (-0.5, 2.0, 3.0, 1.0)] {
            let (mu, nu) = derive_mu_nu(alpha, gamma).unwrap();
            let f = extremal_series(beta, delta, mu, nu, 48).unwrap();
            let h = functional_h(&f, alpha, gamma, delta).unwrap();
            for n in 1..48 {
                assert!(
                    (h.coeff(n).re - 2.0 * (1.0 - beta)).abs() < 1e-10,
                    "beta={beta} n={n}: {}",
                    h.coeff(n).re
                );
            }
        }
    }

    #[test]
    fn transform_of_identity_is_identity() {
        let tau = MomentSequence::try_new((0..=16).map(|n| 1.0 / (n as f64 + 1.0)).collect()).unwrap();
        let f = PowerSeries::identity(16);
        let g = apply_transform(&f, &tau, 1.0).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn transform_scales_first_coefficient() {
        // Bernardi c = 0 moments tau_n = 1/(n+1); b_1 = 1 -> 1/2
        let tau = MomentSequence::try_new((0..=8).map(|n| 1.0 / (n as f64 + 1.0)).collect()).unwrap();
        let mut vals = vec![0.0; 9];
        vals[1] = 1.0;
        vals[2] = 1.0; // (f/z)^1 has b_1 = 1
        let f = PowerSeries::from_real(&vals).unwrap();
        let g = apply_transform(&f, &tau, 1.0).unwrap();
        assert!((g.coeff(2).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn eval_polynomial_exact() {
        let p = series(&[1.0, -2.0, 3.0]);
        let z = Complex64::new(0.3, -0.4);
        let v = p.eval_at(z, false).unwrap();
        let expect = c(1.0) - 2.0 * z + 3.0 * z * z;
        assert!((v.value - expect).norm() < 1e-15);
    }

    #[test]
    fn eval_abel_grandi() {
        let p = PowerSeries::geometric(128);
        let v = p.eval_at(c(-1.0), true).unwrap();
        assert!((v.value.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eval_abel_alternating_harmonic() {
        let p = PowerSeries::new((0..=256).map(|n| c(1.0 / (n as f64 + 1.0))).collect()).unwrap();
        let v = p.eval_at(c(-1.0), true).unwrap();
        assert!((v.value.re - LN_2).abs() < 1e-10);
        assert!(v.tail_estimate < 1e-8);
    }

    #[test]
    fn boundary_needs_flag() {
        let p = PowerSeries::geometric(32);
        assert!(p.eval_at(c(-1.0), false).is_err());
        assert!(p.eval_at(c(1.5), true).is_err());
    }
}

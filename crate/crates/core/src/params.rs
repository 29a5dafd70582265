//! Class parameters and the (mu, nu) factorization.

use crate::error::{Error, Result};

/// Splits (alpha, gamma) into the pair (mu, nu) with `mu * nu = gamma` and
/// `mu + nu = alpha - gamma`, i.e. the roots of `x^2 - (alpha-gamma) x + gamma`.
/// Returns `(mu, nu)` with `nu >= mu >= 0`.
///
/// Fails when the roots would be complex (`(alpha-gamma)^2 < 4 gamma`) or
/// negative (`alpha < gamma`).
pub fn derive_mu_nu(alpha: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::InadmissibleParams(format!(
            "alpha and gamma must be non-negative (alpha={alpha}, gamma={gamma})"
        )));
    }
    let s = alpha - gamma;
    if s < 0.0 {
        return Err(Error::InadmissibleParams(format!(
            "alpha - gamma = {s} < 0: roots would be negative"
        )));
    }
    let disc = s * s - 4.0 * gamma;
    if disc < 0.0 {
        return Err(Error::InadmissibleParams(format!(
            "complex mu,nu: (alpha-gamma)^2 - 4 gamma = {disc} < 0"
        )));
    }
    let root = disc.sqrt();
    let nu = 0.5 * (s + root);
    // gamma = 0 must give mu = 0 exactly; the quotient form gamma/nu keeps
    // mu * nu = gamma to full precision when nu > 0.
    let mu = if nu > 0.0 { gamma / nu } else { 0.5 * (s - root) };
    Ok((mu, nu))
}

/// Parameters of the analytic-function class: (alpha, gamma, delta) together
/// with the derived root pair (mu, nu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
}

impl ClassParams {
    pub fn new(alpha: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InadmissibleParams(format!("delta must be > 0, got {delta}")));
        }
        let (mu, nu) = derive_mu_nu(alpha, gamma)?;
        Ok(ClassParams {
            alpha,
            gamma,
            delta,
            mu,
            nu,
        })
    }
}

/// Target parameter xi < 1 of the inclusion bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetParams {
    pub xi: f64,
}

impl TargetParams {
    pub fn new(xi: f64) -> Result<Self> {
        if !(xi < 1.0) {
            return Err(Error::InadmissibleParams(format!("xi must be < 1, got {xi}")));
        }
        Ok(TargetParams { xi })
    }
}

/// Parameters of the hypergeometric-kernel operator bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HohlovParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub beta1: f64,
}

//! Euler transformation for alternating series.
//!
//! Boundary values of the series in this crate are Abel limits of
//! conditionally convergent alternating series; the Euler transformation
//! turns the available partial terms into a rapidly converging estimate
//! with a usable tail bound.

use num_complex::Complex64;

/// Outcome of an accelerated summation.
#[derive(Debug, Clone, Copy)]
pub struct AcceleratedSum {
    pub value: Complex64,
    /// Magnitude of the last increment added to the sum; used as a
    /// conservative tail estimate.
    pub tail_estimate: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl AcceleratedSum {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Euler-transform summation of a series given by its terms (signs
/// included). The difference table grows one row per term until the
/// transformed entries stop shrinking, after which the remaining terms
/// feed the existing rows.
///
/// Stops early once the increment stays below `target / 10` for two
/// consecutive terms; `converged` reports whether the final tail
/// estimate is at or below `target`.
pub fn euler_sum<I>(terms: I, target: f64, max_terms: usize) -> AcceleratedSum
where
    I: IntoIterator<Item = Complex64>,
{
    let mut wksp: Vec<Complex64> = Vec::with_capacity(64);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut tail = f64::INFINITY;
    let mut below = 0usize;
    let mut used = 0usize;

    for (j, term) in terms.into_iter().enumerate() {
        if j >= max_terms {
            break;
        }
        used = j + 1;
        if j == 0 {
            wksp.push(term);
            sum = 0.5 * term;
            tail = sum.norm();
        } else {
            let n = wksp.len();
            let mut tmp = wksp[0];
            wksp[0] = term;
            for k in 1..n {
                let dum = wksp[k];
                wksp[k] = 0.5 * (wksp[k - 1] + tmp);
                tmp = dum;
            }
            let next = 0.5 * (wksp[n - 1] + tmp);
            if next.norm() <= wksp[n - 1].norm() {
                sum += 0.5 * next;
                wksp.push(next);
                tail = (0.5 * next).norm();
            } else {
                sum += next;
                tail = next.norm();
            }
        }
        if tail <= target / 10.0 && j >= 4 {
            below += 1;
            if below >= 2 {
                break;
            }
        } else {
            below = 0;
        }
    }

    AcceleratedSum {
        value: sum,
        tail_estimate: tail,
        terms_used: used,
        converged: tail <= target,
    }
}

/// Real-term convenience wrapper around [`euler_sum`].
pub fn euler_sum_real<I>(terms: I, target: f64, max_terms: usize) -> AcceleratedSum
where
    I: IntoIterator<Item = f64>,
{
    euler_sum(
        terms.into_iter().map(|t| Complex64::new(t, 0.0)),
        target,
        max_terms,
    )
}

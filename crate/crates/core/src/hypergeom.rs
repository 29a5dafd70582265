//! Generalized hypergeometric series pFq at real arguments in [-1, 1),
//! plus the kernel integral representations and contiguous relations used
//! by the bound formulas.

use crate::accel::euler_sum_real;
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, Integrand1D};

/// Relative term threshold for direct summation (double-precision floor).
const TERM_EPS: f64 = 1e-16;
/// Tail target for Euler-accelerated evaluation at z = -1.
const BOUNDARY_TAIL_TARGET: f64 = 1e-12;
/// Hard tail limit before reporting non-convergence at z = -1.
const BOUNDARY_TAIL_LIMIT: f64 = 1e-10;
const MAX_TERMS_DIRECT: usize = 2_000_000;
const MAX_TERMS_BOUNDARY: usize = 200_000;

/// Default tolerance for the kernel integral representations.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;

/// Upper/lower parameter lists and real argument of a pFq evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomSpec {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub argument: f64,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 1e-12 && (x - x.round()).abs() < 1e-12
}

impl HypergeomSpec {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>, argument: f64) -> Result<Self> {
        for &d in &lower {
            if is_nonpositive_integer(d) {
                return Err(Error::InadmissibleParams(format!(
                    "lower parameter {d} is a non-positive integer"
                )));
            }
        }
        if upper.len() > lower.len() + 1 {
            return Err(Error::InadmissibleParams(format!(
                "p = {} exceeds q + 1 = {}",
                upper.len(),
                lower.len() + 1
            )));
        }
        // terminating series are polynomials, valid at any argument
        let terminates = upper.iter().any(|&c| is_nonpositive_integer(c));
        if upper.len() == lower.len() + 1 && !terminates && !(-1.0..1.0).contains(&argument) {
            return Err(Error::InadmissibleParams(format!(
                "argument {argument} outside [-1, 1) for p = q + 1"
            )));
        }
        Ok(HypergeomSpec {
            upper,
            lower,
            argument,
        })
    }
}

/// Iterator over the series terms of pFq by the term-ratio recurrence.
struct PfqTerms<'a> {
    upper: &'a [f64],
    lower: &'a [f64],
    z: f64,
    term: f64,
    n: usize,
}

impl<'a> Iterator for PfqTerms<'a> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.term;
        let n = self.n as f64;
        let mut ratio = self.z / (n + 1.0);
        for &c in self.upper {
            ratio *= c + n;
        }
        for &d in self.lower {
            ratio /= d + n;
        }
        self.term *= ratio;
        self.n += 1;
        Some(out)
    }
}

/// Evaluates the generalized hypergeometric series for the given spec.
///
/// Direct summation with term-ratio stopping for |z| < 1; Euler-accelerated
/// summation at z = -1 with the acceleration's tail estimate as the
/// convergence guard.
pub fn pfq_eval(spec: &HypergeomSpec) -> Result<f64> {
    let terms = PfqTerms {
        upper: &spec.upper,
        lower: &spec.lower,
        z: spec.argument,
        term: 1.0,
        n: 0,
    };

    // terminating series: some upper parameter is a non-positive integer
    let terminates = spec.upper.iter().any(|&c| is_nonpositive_integer(c));

    if spec.argument == -1.0 && !terminates {
        let s = euler_sum_real(terms, BOUNDARY_TAIL_TARGET, MAX_TERMS_BOUNDARY);
        if s.tail_estimate > BOUNDARY_TAIL_LIMIT {
            return Err(Error::NonConvergence {
                what: "pFq Euler acceleration at z = -1".into(),
                value: s.real(),
                estimate: s.tail_estimate,
            });
        }
        return Ok(s.real());
    }

    let mut sum = 0.0;
    let mut small = 0usize;
    for (n, term) in terms.enumerate() {
        sum += term;
        if term.abs() <= TERM_EPS * sum.abs() && n >= 4 {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        if !sum.is_finite() {
            return Err(Error::NonConvergence {
                what: "pFq direct summation (overflow)".into(),
                value: sum,
                estimate: f64::INFINITY,
            });
        }
        if n + 1 >= MAX_TERMS_DIRECT {
            return Err(Error::NonConvergence {
                what: "pFq direct summation (term budget)".into(),
                value: sum,
                estimate: term.abs(),
            });
        }
    }
    unreachable!("term iterator is infinite");
}

/// Convenience form of [`pfq_eval`].
pub fn pfq(upper: &[f64], lower: &[f64], z: f64) -> Result<f64> {
    pfq_eval(&HypergeomSpec::new(upper.to_vec(), lower.to_vec(), z)?)
}

/// Gauss 2F1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    pfq(&[a, b], &[c], z)
}

/// Quadrature value of the kernel integral
/// `int_0^1 ds / (1 - x s^m)  ==  2F1(1, 1/m; 1 + 1/m; x)`.
pub fn kernel_2f1_integral(m: f64, x: f64, tol: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InadmissibleParams(format!("kernel exponent m must be > 0, got {m}")));
    }
    if !(x < 1.0) {
        return Err(Error::InadmissibleParams(format!("kernel argument x must be < 1, got {x}")));
    }
    // s^m has unbounded derivatives at s = 0 when m < 1; declare it
    let exp0 = if m < 1.0 { m } else { 0.0 };
    let g = Integrand1D::with_exponents(move |s: f64, _: f64| 1.0 / (1.0 - x * s.powf(m)), exp0, 0.0);
    Ok(integrate_1d(&g, tol)?.value)
}

/// Quadrature value of the double kernel integral
/// `int_0^1 int_0^1 dr ds / (1 - x r^n s^m)
///    ==  3F2(1, 1/n, 1/m; 1 + 1/n, 1 + 1/m; x)`,
/// realized as an outer adaptive pass over the 1D kernel.
pub fn kernel_3f2_integral(n: f64, m: f64, x: f64, tol: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::InadmissibleParams(format!("kernel exponent n must be > 0, got {n}")));
    }
    if !(x < 1.0) {
        return Err(Error::InadmissibleParams(format!("kernel argument x must be < 1, got {x}")));
    }
    use std::cell::RefCell;
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_tol = tol / 10.0;
    let exp0 = if n < 1.0 { n } else { 0.0 };
    let g = Integrand1D::with_exponents(
        |r: f64, _: f64| match kernel_2f1_integral(m, x * r.powf(n), inner_tol) {
            Ok(v) => v,
            Err(e) => {
                let mut slot = inner_failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                f64::NAN
            }
        },
        exp0,
        0.0,
    );
    let outer = integrate_1d(&g, tol);
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    Ok(outer?.value)
}

/// Both sides of the 3F2 contiguous reduction
/// `3F2(2,a,b;c,d;z) = (c-1) 3F2(1,a,b;c-1,d;z) - (c-2) 3F2(1,a,b;c,d;z)`,
/// evaluated independently so callers can assert their equality.
pub fn contiguous_reduce_3f2(a: f64, b: f64, c: f64, d: f64, z: f64) -> Result<(f64, f64)> {
    let lhs = pfq(&[2.0, a, b], &[c, d], z)?;
    let rhs = (c - 1.0) * pfq(&[1.0, a, b], &[c - 1.0, d], z)? - (c - 2.0) * pfq(&[1.0, a, b], &[c, d], z)?;
    Ok((lhs, rhs))
}

/// Both sides of the Gauss contiguous relation
/// `(b z / c) 2F1(a+1,b+1;c+1;z) = 2F1(a+1,b;c;z) - 2F1(a,b;c;z)`
/// (comparing z^n coefficients: both sides give
/// `n (a+1)_{n-1} (b)_n / ((c)_n n!)`), evaluated independently so callers
/// can assert their equality.
pub fn contiguous_gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<(f64, f64)> {
    let lhs = b * z / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z)?;
    let rhs = gauss_2f1(a + 1.0, b, c, z)? - gauss_2f1(a, b, c, z)?;
    Ok((lhs, rhs))
}

/// Taylor coefficients of 2F1(a, b; c; z) through `order`.
pub fn gauss_2f1_coefficients(a: f64, b: f64, c: f64, order: usize) -> Result<Vec<f64>> {
    if is_nonpositive_integer(c) {
        return Err(Error::InadmissibleParams(format!(
            "lower parameter {c} is a non-positive integer"
        )));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = 1.0f64;
    for n in 0..=order {
        coeffs.push(term);
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
    }
    Ok(coeffs)
}

//! Admissible weight functions on (0,1) and their moment sequences.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::hypergeom::{gauss_2f1, gauss_2f1_coefficients};
use crate::quad::{integrate_1d, Integrand1D};

/// Quadrature tolerance for moments and mass checks.
const MOMENT_TOL: f64 = 1e-12;
/// Grid size for the non-negativity scan in [`WeightSpec::normalize_check`].
const SCAN_POINTS: usize = 10_000;

/// A normalized weight on (0,1).
#[derive(Clone)]
pub enum WeightSpec {
    /// `(1+c) t^c`, `c > -1`.
    Bernardi { c: f64 },
    /// Beta-type kernel times an interior Gauss factor:
    /// `K t^{b-1} (1-t)^{c-a-b} 2F1(c-a, 1-a; c-a-b+1; 1-t)` with
    /// `K = Gamma(c) / (Gamma(a) Gamma(b) Gamma(c-a-b+1))`.
    Hohlov { a: f64, b: f64, c: f64 },
    /// The `a = 1` specialization of the beta-type kernel, where the
    /// interior factor collapses to 1.
    CarlsonShaffer { b: f64, c: f64 },
    /// User-supplied weight with declared endpoint exponents.
    Custom(CustomWeight),
}

/// An evaluable custom weight; the exponents declare the algebraic behavior
/// `t^exp0` at 0 and `(1-t)^exp1` at 1 for the quadrature layer.
#[derive(Clone)]
pub struct CustomWeight {
    pub eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub exp0: f64,
    pub exp1: f64,
    pub label: String,
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Bernardi { c } => write!(f, "Bernardi {{ c: {c} }}"),
            WeightSpec::Hohlov { a, b, c } => write!(f, "Hohlov {{ a: {a}, b: {b}, c: {c} }}"),
            WeightSpec::CarlsonShaffer { b, c } => {
                write!(f, "CarlsonShaffer {{ b: {b}, c: {c} }}")
            }
            WeightSpec::Custom(w) => write!(f, "Custom {{ label: {:?} }}", w.label),
        }
    }
}

/// Outcome of a mass/non-negativity scan.
#[derive(Debug, Clone, Copy)]
pub struct NormalizeReport {
    pub mass: f64,
    pub mass_error: f64,
    /// Smallest weight value found on the interior scan grid.
    pub min_value: f64,
    pub min_at: f64,
    pub nonnegative: bool,
}

/// 1 / Gamma(x), including the zeros at the poles of Gamma.
fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        return 1.0 / gamma(x);
    }
    if (x - x.round()).abs() < 1e-12 {
        return 0.0;
    }
    1.0 / gamma(x)
}

fn is_positive_integer(x: f64) -> bool {
    x > 0.5 && (x - x.round()).abs() < 1e-12
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 1e-12 && (x - x.round()).abs() < 1e-12
}

/// Digamma with reflection for negative non-integer arguments.
fn digamma_r(x: f64) -> f64 {
    use statrs::function::gamma::digamma;
    if x > 0.0 {
        digamma(x)
    } else {
        // psi(x) = psi(1-x) - pi cot(pi x)
        digamma(1.0 - x) - std::f64::consts::PI / (std::f64::consts::PI * x).tan()
    }
}

/// `2F1(aa, bb; aa+bb+m; 1-t)` for integer m >= 0 and small t, by the
/// logarithmic expansion around unit argument (the connection formula
/// degenerates when the parameter excess is an integer).
fn gauss_2f1_unit_log(aa: f64, bb: f64, m: usize, t: f64) -> Result<f64> {
    let mf = m as f64;
    let c = aa + bb + mf;
    let mut result = 0.0;
    if m >= 1 {
        let pref = gamma(mf) * gamma(c) * recip_gamma(aa + mf) * recip_gamma(bb + mf);
        let mut term = 1.0;
        let mut fin = 0.0;
        for n in 0..m {
            fin += term;
            let nf = n as f64;
            term *= (aa + nf) * (bb + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * t;
        }
        result += pref * fin;
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let pref2 = sign * gamma(c) * recip_gamma(aa) * recip_gamma(bb) * t.powi(m as i32);
    let lnt = t.ln();
    let mut series = 0.0;
    let mut coeff = recip_gamma(mf + 1.0); // 1/m!
    let mut psi1 = digamma_r(1.0);
    let mut psi2 = digamma_r(mf + 1.0);
    let mut psia = digamma_r(aa + mf);
    let mut psib = digamma_r(bb + mf);
    let mut tp = 1.0;
    for n in 0..500usize {
        let term = coeff * tp * (lnt - psi1 - psi2 + psia + psib);
        series += term;
        if n > 3 && term.abs() < 1e-17 * series.abs().max(1e-300) {
            break;
        }
        let nf = n as f64;
        coeff *= (aa + mf + nf) * (bb + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0));
        tp *= t;
        psi1 += 1.0 / (nf + 1.0);
        psi2 += 1.0 / (nf + mf + 1.0);
        psia += 1.0 / (aa + mf + nf);
        psib += 1.0 / (bb + mf + nf);
    }
    result -= pref2 * series;
    if !result.is_finite() {
        return Err(Error::NonConvergence {
            what: format!("unit-argument log expansion (aa={aa}, bb={bb}, m={m}, t={t})"),
            value: result,
            estimate: f64::INFINITY,
        });
    }
    Ok(result)
}

/// The interior factor `2F1(c-a, 1-a; c-a-b+1; 1-t)` of the beta-type
/// kernel, stable over the whole interval. `omt` is 1 - t computed without
/// cancellation.
///
/// Routes:
/// - positive-integer `a` (or non-positive-integer upper parameter): the
///   series terminates, summed directly at any t;
/// - t >= 1/2: direct series at argument 1 - t;
/// - t < 1/2, parameter excess s = a - b non-integer: two-term connection
///   with both series running in the small variable t;
/// - t < 1/2, s an integer: logarithmic expansion around unit argument
///   (Euler-transformed first when s < 0 to make the excess positive).
fn hohlov_gauss_factor(a: f64, b: f64, c: f64, t: f64, omt: f64) -> Result<f64> {
    let (p, q, r) = (c - a, 1.0 - a, c - a - b + 1.0);
    let terminating = is_positive_integer(a) || is_nonpositive_integer(p);
    if terminating || t >= 0.5 {
        return gauss_2f1(p, q, r, omt);
    }
    let s = a - b;
    let m = s.round();
    if (s - m).abs() < 1e-8 {
        // integer excess: logarithmic case
        return if m >= 0.0 {
            gauss_2f1_unit_log(p, q, m as usize, t)
        } else {
            // Euler transformation flips the excess sign:
            // 2F1(p,q;r;x) = (1-x)^{r-p-q} 2F1(r-p,r-q;r;x)
            Ok(t.powf(s) * gauss_2f1_unit_log(1.0 - b, c - b, (-m) as usize, t)?)
        };
    }
    let g1 = gamma(r) * gamma(s) * recip_gamma(1.0 - b) * recip_gamma(c - b);
    let g2 = gamma(r) * gamma(-s) * recip_gamma(p) * recip_gamma(q);
    let f1 = if g1 == 0.0 {
        0.0
    } else {
        gauss_2f1(p, q, 1.0 - s, t)?
    };
    let f2 = if g2 == 0.0 {
        0.0
    } else {
        gauss_2f1(1.0 - b, c - b, 1.0 + s, t)?
    };
    Ok(g1 * f1 + g2 * t.powf(s) * f2)
}

impl WeightSpec {
    pub fn bernardi(c: f64) -> Result<Self> {
        let w = WeightSpec::Bernardi { c };
        w.validate()?;
        Ok(w)
    }

    pub fn hohlov(a: f64, b: f64, c: f64) -> Result<Self> {
        let w = WeightSpec::Hohlov { a, b, c };
        w.validate()?;
        Ok(w)
    }

    pub fn carlson_shaffer(b: f64, c: f64) -> Result<Self> {
        let w = WeightSpec::CarlsonShaffer { b, c };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightSpec::Bernardi { c } => {
                if !(c > -1.0) {
                    return Err(Error::InadmissibleParams(format!(
                        "Bernardi exponent must be > -1, got {c}"
                    )));
                }
            }
            WeightSpec::Hohlov { a, b, c } => Self::validate_kernel(a, b, c)?,
            WeightSpec::CarlsonShaffer { b, c } => Self::validate_kernel(1.0, b, c)?,
            WeightSpec::Custom(ref w) => {
                if w.exp0 <= -1.0 || w.exp1 <= -1.0 {
                    return Err(Error::InadmissibleParams(format!(
                        "custom endpoint exponents must be > -1 (got {}, {})",
                        w.exp0, w.exp1
                    )));
                }
            }
        }
        Ok(())
    }

    fn validate_kernel(a: f64, b: f64, c: f64) -> Result<()> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::InadmissibleParams(format!(
                "kernel parameters must be positive (a={a}, b={b}, c={c})"
            )));
        }
        // integrability of t^{b-1}(1-t)^{c-a-b}
        if !(c - a - b > -1.0) {
            return Err(Error::InadmissibleParams(format!(
                "c - a - b = {} must exceed -1",
                c - a - b
            )));
        }
        Ok(())
    }

    /// Declared algebraic endpoint exponents (`t^exp0` near 0,
    /// `(1-t)^exp1` near 1) for the quadrature layer.
    pub fn endpoint_exponents(&self) -> (f64, f64) {
        match *self {
            WeightSpec::Bernardi { c } => (c, 0.0),
            WeightSpec::Hohlov { a, b, c } => {
                // for non-integer a < b the interior Gauss factor blows up
                // like t^{a-b} at 0, steepening the kernel's t^{b-1}
                let exp0 = if is_positive_integer(a) {
                    b - 1.0
                } else {
                    a.min(b) - 1.0
                };
                (exp0, c - a - b)
            }
            WeightSpec::CarlsonShaffer { b, c } => (b - 1.0, c - 1.0 - b),
            WeightSpec::Custom(ref w) => (w.exp0, w.exp1),
        }
    }

    /// Pointwise weight value at an interior point.
    pub fn lambda_eval(&self, t: f64) -> Result<f64> {
        self.lambda_eval_at(t, 1.0 - t)
    }

    /// [`WeightSpec::lambda_eval`] with the distance to 1 supplied exactly,
    /// as the quadrature layer does for points near the right endpoint.
    pub fn lambda_eval_at(&self, t: f64, omt: f64) -> Result<f64> {
        if !(t > 0.0 && omt > 0.0) {
            return Err(Error::Input(format!("t must lie in (0,1), got {t}")));
        }
        self.validate()?;
        match *self {
            WeightSpec::Bernardi { c } => Ok((1.0 + c) * t.powf(c)),
            WeightSpec::Hohlov { a, b, c } => {
                let k = gamma(c) * recip_gamma(a) * recip_gamma(b) * recip_gamma(c - a - b + 1.0);
                Ok(k * t.powf(b - 1.0)
                    * omt.powf(c - a - b)
                    * hohlov_gauss_factor(a, b, c, t, omt)?)
            }
            WeightSpec::CarlsonShaffer { b, c } => {
                WeightSpec::Hohlov { a: 1.0, b, c }.lambda_eval_at(t, omt)
            }
            WeightSpec::Custom(ref w) => Ok((w.eval)(t)),
        }
    }

    /// The n-th moment `tau_n = int_0^1 t^n lambda(t) dt`. Bernardi moments
    /// are analytic; the other families integrate with their declared
    /// endpoint exponents.
    pub fn moment(&self, n: usize) -> Result<f64> {
        self.validate()?;
        if let WeightSpec::Bernardi { c } = *self {
            return Ok((1.0 + c) / (n as f64 + c + 1.0));
        }
        let (exp0, exp1) = self.endpoint_exponents();
        let nf = n as f64;
        let g = Integrand1D::with_exponents(
            |t: f64, omt: f64| t.powf(nf) * self.lambda_eval_at(t, omt).unwrap_or(f64::NAN),
            exp0 + nf,
            exp1,
        );
        Ok(integrate_1d(&g, MOMENT_TOL)?.value)
    }

    /// Moments tau_0..tau_n as a validated sequence.
    pub fn moments(&self, n_max: usize) -> Result<MomentSequence> {
        let mut values = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            values.push(self.moment(n)?);
        }
        MomentSequence::try_new(values)
    }

    /// Integrates the weight over (0,1) and scans a uniform interior grid
    /// for sign violations. Reports rather than rejects: some kernel
    /// parameter combinations make the interior Gauss factor dip negative.
    pub fn normalize_check(&self) -> Result<NormalizeReport> {
        self.validate()?;
        let (exp0, exp1) = self.endpoint_exponents();
        let g = Integrand1D::with_exponents(
            |t: f64, omt: f64| self.lambda_eval_at(t, omt).unwrap_or(f64::NAN),
            exp0,
            exp1,
        );
        let mass = integrate_1d(&g, MOMENT_TOL)?;

        let mut min_value = f64::INFINITY;
        let mut min_at = 0.0;
        for i in 0..SCAN_POINTS {
            let t = (i as f64 + 0.5) / SCAN_POINTS as f64;
            let v = self.lambda_eval(t)?;
            if v < min_value {
                min_value = v;
                min_at = t;
            }
        }
        Ok(NormalizeReport {
            mass: mass.value,
            mass_error: mass.error_estimate,
            min_value,
            min_at,
            nonnegative: min_value >= -1e-12,
        })
    }

    /// Short descriptor used in diagnostics and CLI output.
    pub fn label(&self) -> String {
        match *self {
            WeightSpec::Bernardi { c } => format!("bernardi:c={c}"),
            WeightSpec::Hohlov { a, b, c } => format!("hohlov:a={a},b={b},c={c}"),
            WeightSpec::CarlsonShaffer { b, c } => format!("carlson-shaffer:b={b},c={c}"),
            WeightSpec::Custom(ref w) => format!("custom:{}", w.label),
        }
    }
}

/// Taylor coefficient multipliers of the convolution kernel
/// `z 2F1(a,b;c;z)`: index n carries `(a)_n (b)_n / ((c)_n n!)`. For the
/// beta-type weight these coincide with the quadrature moments; exposed for
/// cross-checks.
pub fn hohlov_moment_closed(a: f64, b: f64, c: f64, n: usize) -> Result<f64> {
    Ok(gauss_2f1_coefficients(a, b, c, n)?[n])
}

/// A finite moment sequence tau_0..tau_N of a normalized non-negative
/// weight: positive and non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    values: Vec<f64>,
}

impl MomentSequence {
    pub fn try_new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("empty moment sequence".into()));
        }
        for (n, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InadmissibleParams(format!(
                    "moment {n} is not positive: {v}"
                )));
            }
            if n > 0 && v > values[n - 1] * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::InadmissibleParams(format!(
                    "moments increase at index {n}: {} -> {v}",
                    values[n - 1]
                )));
            }
        }
        Ok(MomentSequence { values })
    }

    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Write-once moment cache for a fixed weight; safe to share across
/// threads. Filled to [`MOMENT_CACHE_LEN`] entries on first access.
pub struct MomentCache {
    spec: WeightSpec,
    cell: std::sync::OnceLock<Result<MomentSequence>>,
}

/// Number of moments precomputed by [`MomentCache`].
pub const MOMENT_CACHE_LEN: usize = 256;

impl MomentCache {
    pub fn new(spec: WeightSpec) -> Self {
        MomentCache {
            spec,
            cell: std::sync::OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn sequence(&self) -> Result<&MomentSequence> {
        self.cell
            .get_or_init(|| self.spec.moments(MOMENT_CACHE_LEN))
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn moment(&self, n: usize) -> Result<f64> {
        let seq = self.sequence()?;
        if n < seq.len() {
            Ok(seq.value(n))
        } else {
            self.spec.moment(n)
        }
    }
}

/// Loads a custom weight from a two-column text file (`t  lambda(t)` per
/// line, `#` comments allowed), linearly interpolated and clamped to the
/// nearest sample beyond the data range. The weight is renormalized to unit
/// mass; returns the weight together with the applied factor
/// (1 / raw trapezoid mass).
pub fn custom_from_file(path: &Path) -> Result<(WeightSpec, f64)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (t, v) = match (it.next(), it.next()) {
            (Some(t), Some(v)) => (t, v),
            _ => {
                return Err(Error::Input(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        let t: f64 = t.parse().map_err(|e| {
            Error::Input(format!("{}:{}: bad t value: {e}", path.display(), lineno + 1))
        })?;
        let v: f64 = v.parse().map_err(|e| {
            Error::Input(format!("{}:{}: bad weight value: {e}", path.display(), lineno + 1))
        })?;
        if !(0.0..=1.0).contains(&t) || !v.is_finite() {
            return Err(Error::Input(format!(
                "{}:{}: sample ({t}, {v}) out of range",
                path.display(),
                lineno + 1
            )));
        }
        points.push((t, v));
    }
    if points.len() < 2 {
        return Err(Error::Input(format!(
            "{}: need at least two samples",
            path.display()
        )));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    points.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);

    // trapezoid mass over [0,1] with nearest-sample clamping outside the data
    let mut mass = points[0].1 * points[0].0 + points.last().unwrap().1 * (1.0 - points.last().unwrap().0);
    for w in points.windows(2) {
        mass += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
    }
    if !(mass > 0.0) {
        return Err(Error::Input(format!(
            "{}: weight has non-positive mass {mass}",
            path.display()
        )));
    }
    let factor = 1.0 / mass;
    let pts = Arc::new(points);
    let eval_pts = Arc::clone(&pts);
    let eval = move |t: f64| -> f64 {
        let pts = &eval_pts;
        if t <= pts[0].0 {
            return pts[0].1 * factor;
        }
        if t >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1 * factor;
        }
        let i = pts.partition_point(|&(x, _)| x <= t);
        let (t0, v0) = pts[i - 1];
        let (t1, v1) = pts[i];
        let u = (t - t0) / (t1 - t0);
        (v0 + u * (v1 - v0)) * factor
    };
    let label = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok((
        WeightSpec::Custom(CustomWeight {
            eval: Arc::new(eval),
            exp0: 0.0,
            exp1: 0.0,
            label,
        }),
        factor,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn bernardi_flat_and_linear() {
        let w0 = WeightSpec::bernardi(0.0).unwrap();
        for &t in &[0.1, 0.5, 0.9] {
            assert_eq!(w0.lambda_eval(t).unwrap(), 1.0);
        }
        let w1 = WeightSpec::bernardi(1.0).unwrap();
        assert!((w1.lambda_eval(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bernardi_validation() {
        assert!(WeightSpec::bernardi(-1.0).is_err());
        assert!(WeightSpec::bernardi(-0.999).is_ok());
    }

    #[test]
    fn hohlov_reduces_to_flat() {
        let w = WeightSpec::hohlov(1.0, 1.0, 2.0).unwrap();
        for i in 1..40 {
            let t = i as f64 / 40.0;
            assert!(
                (w.lambda_eval(t).unwrap() - 1.0).abs() < 1e-12,
                "t={t}: {}",
                w.lambda_eval(t).unwrap()
            );
        }
    }

    #[test]
    fn hohlov_gauss_factor_connection_matches_direct() {
        // t values where the direct series at 1-t still converges quickly
        for &(a, b, c) in &[(0.5, 0.5, 2.7), (0.3, 1.2, 2.0), (0.8, 0.4, 1.5), (0.7, 0.2, 1.4)] {
            for &t in &[0.2, 0.3, 0.45] {
                let conn = hohlov_gauss_factor(a, b, c, t, 1.0 - t).unwrap();
                let direct = gauss_2f1(c - a, 1.0 - a, c - a - b + 1.0, 1.0 - t).unwrap();
                assert!(
                    (conn - direct).abs() < 1e-11 * direct.abs().max(1.0),
                    "a={a} b={b} c={c} t={t}: {conn} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn carlson_shaffer_matches_hohlov_a1() {
        let cs = WeightSpec::carlson_shaffer(0.5, 2.7).unwrap();
        let h = WeightSpec::hohlov(1.0, 0.5, 2.7).unwrap();
        for &t in &[0.05, 0.3, 0.8, 0.99] {
            let x = cs.lambda_eval(t).unwrap();
            let y = h.lambda_eval(t).unwrap();
            assert!((x - y).abs() < 1e-13 * x.abs().max(1.0));
        }
    }

    #[test]
    fn bernardi_moments_analytic() {
        let w = WeightSpec::bernardi(0.0).unwrap();
        assert!((w.moment(1).unwrap() - 0.5).abs() < 1e-15);
        let w = WeightSpec::bernardi(2.0).unwrap();
        assert!((w.moment(3).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bernardi_moments_match_quadrature() {
        for &c in &[-0.5, 0.0, 1.0, 5.0] {
            let w = WeightSpec::bernardi(c).unwrap();
            for n in (0..=64).step_by(8) {
                let analytic = w.moment(n).unwrap();
                let nf = n as f64;
                let g = Integrand1D::with_exponents(
                    |t: f64, _: f64| t.powf(nf) * (1.0 + c) * t.powf(c),
                    c + nf,
                    0.0,
                );
                let quad = integrate_1d(&g, 1e-12).unwrap().value;
                assert!(
                    (analytic - quad).abs() < 1e-10,
                    "c={c} n={n}: {analytic} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn hohlov_flat_moments() {
        let w = WeightSpec::hohlov(1.0, 1.0, 2.0).unwrap();
        for n in [0usize, 1, 2, 5, 16] {
            let m = w.moment(n).unwrap();
            assert!(
                (m - 1.0 / (n as f64 + 1.0)).abs() < 1e-10,
                "n={n}: {m}"
            );
        }
    }

    #[test]
    fn hohlov_moments_match_kernel_coefficients() {
        for &(a, b, c) in &[(0.5, 0.5, 2.7), (1.0, 0.5, 2.7), (0.8, 1.3, 3.0)] {
            let w = WeightSpec::hohlov(a, b, c).unwrap();
            for n in [0usize, 1, 2, 4, 8, 16] {
                let quad = w.moment(n).unwrap();
                let closed = hohlov_moment_closed(a, b, c, n).unwrap();
                assert!(
                    (quad - closed).abs() < 1e-8 * closed.abs().max(1.0),
                    "a={a} b={b} c={c} n={n}: {quad} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn mass_is_one() {
        for w in [
            WeightSpec::bernardi(2.0).unwrap(),
            WeightSpec::hohlov(1.0, 0.5, 2.7).unwrap(),
            WeightSpec::hohlov(0.5, 0.5, 2.7).unwrap(),
            WeightSpec::carlson_shaffer(1.5, 3.2).unwrap(),
        ] {
            let r = w.normalize_check().unwrap();
            assert!((r.mass - 1.0).abs() < 1e-8, "{}: mass {}", w.label(), r.mass);
            assert!(r.nonnegative, "{}: min {} at {}", w.label(), r.min_value, r.min_at);
        }
    }

    #[test]
    fn moment_sequences_validate() {
        let w = WeightSpec::hohlov(0.5, 0.5, 2.7).unwrap();
        let seq = w.moments(24).unwrap();
        assert_eq!(seq.len(), 25);
        assert!((seq.value(0) - 1.0).abs() < 1e-10);
        for n in 1..seq.len() {
            assert!(seq.value(n) <= seq.value(n - 1));
            assert!(seq.value(n) > 0.0);
        }
    }

    #[test]
    fn moment_sequence_rejects_bad_input() {
        assert!(MomentSequence::try_new(vec![]).is_err());
        assert!(MomentSequence::try_new(vec![1.0, -0.5]).is_err());
        assert!(MomentSequence::try_new(vec![0.5, 0.9]).is_err());
        assert!(MomentSequence::try_new(vec![1.0, 0.5, 0.4]).is_ok());
    }

    #[test]
    fn moment_cache_is_consistent() {
        let cache = MomentCache::new(WeightSpec::bernardi(1.0).unwrap());
        let direct = cache.spec().moment(7).unwrap();
        assert_eq!(cache.moment(7).unwrap(), direct);
        assert_eq!(cache.sequence().unwrap().len(), MOMENT_CACHE_LEN + 1);
    }

    #[test]
    fn hohlov_validation() {
        assert!(WeightSpec::hohlov(0.0, 1.0, 2.0).is_err());
        assert!(WeightSpec::hohlov(1.0, 1.0, 0.9).is_err()); // c-a-b = -1.1
        assert!(WeightSpec::hohlov(1.0, 0.5, 1.0).is_ok());
    }

    #[test]
    fn custom_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("weight.txt");
        let mut fh = std::fs::File::create(&path).unwrap();
        writeln!(fh, "# triangular bump, unnormalized").unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let v = 3.0 * (1.0 - (2.0 * t - 1.0).abs());
            writeln!(fh, "{t} {v}").unwrap();
        }
        drop(fh);
        let (w, factor) = custom_from_file(&path).unwrap();
        // triangle with base 1 and peak 3 has mass 3/2
        assert!((factor - 2.0 / 3.0).abs() < 1e-12, "factor {factor}");
        let r = w.normalize_check().unwrap();
        assert!((r.mass - 1.0).abs() < 1e-8);
        assert!((w.lambda_eval(0.5).unwrap() - 2.0).abs() < 1e-12);
        let m1 = w.moment(1).unwrap();
        assert!((m1 - 0.5).abs() < 1e-8, "symmetric bump first moment {m1}");
    }

    #[test]
    fn custom_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "0.5\n").unwrap();
        assert!(custom_from_file(&path).is_err());
        std::fs::write(&path, "0.2 1.0\n1.5 1.0\n").unwrap();
        assert!(custom_from_file(&path).is_err());
    }
}

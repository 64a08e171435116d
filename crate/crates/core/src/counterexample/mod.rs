//! The singular function `h = G⁻¹(1 − x)` and the function-space norms built
//! from `L^n` norms on `(0, 1]`.
//!
//! Integrals over `(0, 1]` with a singularity at `0` are taken in the
//! variable `s = −ln x`, i.e. `∫₀¹ F(x) dx = ∫₀^∞ F(e^{−s}) e^{−s} ds`, which
//! turns logarithmic and `h`-type growth into polynomial growth against an
//! exponential weight.

mod quadrature;

use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub use quadrature::{gk15, integrate_adaptive, Grid1D};

use crate::error::{Error, Result};
use crate::verify::IdentityReport;

/// Highest moment order accepted by [`moment_integral`].
pub const MAX_MOMENT: usize = 8;

/// `e^s − 1 − s` by its Taylor series, for `0 ≤ s < 0.5`.
fn exp_minus_linear(s: f64) -> f64 {
    let mut term = s * s / 2.0;
    let mut sum = term;
    for k in 3..30 {
        term *= s / k as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// `G(x) = ½∫₀ˣ e^{−√t} dt = 1 − e^{−√x}(1 + √x)`.
#[allow(non_snake_case)]
pub fn G_eval(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("G is defined for x >= 0, got {x}")));
    }
    let s = x.sqrt();
    if s < 0.5 {
        Ok((-s).exp() * exp_minus_linear(s))
    } else {
        Ok(1.0 - (-s).exp() * (1.0 + s))
    }
}

/// `G(x)` by adaptive quadrature of `∫₀^{√x} u e^{−u} du` (after `t = u²`).
#[allow(non_snake_case)]
pub fn G_quadrature(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("G is defined for x >= 0, got {x}")));
    }
    integrate_adaptive(|u| u * (-u).exp(), 0.0, x.sqrt(), 1e-15, 1e-14)
}

/// `s − ln(1 + s)` without cancellation for small `s`.
fn s_minus_log1p(s: f64) -> f64 {
    if s < 0.05 {
        let mut sum = 0.0;
        let mut pow = s * s;
        for k in 2..20 {
            let term = pow / k as f64;
            sum += if k % 2 == 0 { term } else { -term };
            pow *= s;
        }
        sum
    } else {
        s - s.ln_1p()
    }
}

/// `h` at `x = e^{−l}`, for `l ≥ 0`.
///
/// `G(h) = 1 − x` is `e^{−u}(1 + u) = x` with `u = √h`, i.e.
/// `u − ln(1 + u) = l`. The left side is increasing in `u ≥ 0`, and
/// bisection safeguards the Newton steps.
pub fn h_from_neg_log(l: f64) -> Result<f64> {
    if !(l >= 0.0) || l.is_infinite() {
        return Err(Error::Domain(format!("h needs -ln x in [0, inf), got {l}")));
    }
    if l == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 2.0 * l + 4.0);
    // Near zero, u − ln(1+u) ≈ u²/2.
    let mut u = if l < 0.5 { (2.0 * l).sqrt() } else { l + (1.0 + l).ln() };
    for _ in 0..200 {
        if !(u > lo && u < hi) {
            u = 0.5 * (lo + hi);
        }
        let phi = s_minus_log1p(u) - l;
        if phi > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let step = phi * (1.0 + u) / u;
        let next = u - step;
        if (next - u).abs() <= 1e-16 * u || hi - lo <= 1e-16 * hi {
            u = next.clamp(lo, hi);
            break;
        }
        u = next;
    }
    Ok(u * u)
}

/// `h(x) = G⁻¹(1 − x)` for `0 < x ≤ 1`.
pub fn h_eval(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("h is defined on (0, 1], got {x}")));
    }
    h_from_neg_log(-x.ln())
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function on `(0, 1]`, optionally singular at `0`.
///
/// `at_neg_log(s)` evaluates `f(e^{−s})`; singular functions provide it
/// directly so that points far below the smallest positive double remain
/// reachable.
#[derive(Clone)]
pub struct SampledFunction {
    name: String,
    at_neg_log: RealFn,
    singular_at_zero: bool,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction")
            .field("name", &self.name)
            .field("singular_at_zero", &self.singular_at_zero)
            .finish()
    }
}

impl SampledFunction {
    /// A function bounded on `(0, 1]`, given by its value at `x`.
    pub fn bounded(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), at_neg_log: Arc::new(move |s: f64| f((-s).exp())), singular_at_zero: false }
    }

    /// A function given by `s ↦ f(e^{−s})`, singular at `0`.
    pub fn singular(name: impl Into<String>, f_at_neg_log: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), at_neg_log: Arc::new(f_at_neg_log), singular_at_zero: true }
    }

    pub fn constant(c: f64) -> Self {
        Self::bounded(format!("const({c})"), move |_| c)
    }

    /// `log x`.
    pub fn log() -> Self {
        Self::singular("log", |s| -s)
    }

    /// The function `h`.
    pub fn h() -> Self {
        Self::singular("h", |s| h_from_neg_log(s).unwrap_or(f64::NAN))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let f = self.at_neg_log.clone();
        Self {
            name: format!("{c}*{}", self.name),
            at_neg_log: Arc::new(move |s| c * f(s)),
            singular_at_zero: self.singular_at_zero,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_singular(&self) -> bool {
        self.singular_at_zero
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("{} is sampled on (0, 1], got {x}", self.name)));
        }
        Ok((self.at_neg_log)(-x.ln()))
    }

    pub fn eval_at_neg_log(&self, s: f64) -> f64 {
        (self.at_neg_log)(s)
    }
}

/// `∫₀^∞ F(s) ds` over dyadic cells `[0,1], [1,2], [2,4], …` until a cell
/// contributes nothing at double precision.
fn integrate_half_line<F: Fn(f64) -> f64>(f: F, what: &str) -> Result<f64> {
    const MAX_EDGE: f64 = 1_048_576.0;
    let mut total = 0.0_f64;
    let mut prev = f64::INFINITY;
    let (mut a, mut b) = (0.0, 1.0);
    loop {
        let part = integrate_adaptive(&f, a, b, 1e-300, 1e-14)?;
        if !part.is_finite() || !total.is_finite() {
            return Err(Error::Divergent(format!("{what}: integral overflows beyond s = {a}")));
        }
        total += part;
        if part.abs() <= 1e-17 * total.abs() && part.abs() <= prev.abs() {
            return Ok(total);
        }
        if b >= MAX_EDGE {
            return Err(Error::Divergent(format!("{what}: integral does not settle by s = {b}")));
        }
        prev = part;
        a = b;
        b *= 2.0;
    }
}

/// `∫₀¹ |f|ⁿ dx`.
pub fn lp_power(f: &SampledFunction, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let g = f.at_neg_log.clone();
    let p = n as i32;
    if f.singular_at_zero {
        integrate_half_line(move |s| g(s).abs().powi(p) * (-s).exp(), f.name())
    } else {
        integrate_adaptive(
            |x: f64| if x > 0.0 { g(-x.ln()).abs().powi(p) } else { g(f64::INFINITY).abs().powi(p) },
            0.0,
            1.0,
            1e-300,
            1e-14,
        )
    }
}

/// `‖f‖_n = (∫₀¹ |f|ⁿ)^{1/n}` for `n ≥ 1`.
pub fn lp_norm(f: &SampledFunction, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("L^n norm needs n >= 1".into()));
    }
    Ok(lp_power(f, n)?.powf(1.0 / n as f64))
}

/// `∫₀¹ h(x)ⁿ dx`, which equals `(2n+1)!`.
pub fn moment_integral(n: usize) -> Result<f64> {
    if n > MAX_MOMENT {
        return Err(Error::Domain(format!("moment order {n} exceeds {MAX_MOMENT}")));
    }
    lp_power(&SampledFunction::h(), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormScheme {
    /// `c_n = ‖h‖_n`.
    A,
    /// `c_n = (n!)^{1/n}`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanachNorm {
    pub value: f64,
    pub argmax: usize,
    /// The supremum was attained at `n_max`, so a larger `n_max` might raise it.
    pub attained_at_n_max: bool,
}

pub fn scheme_constant(scheme: NormScheme, n: usize) -> Result<f64> {
    match scheme {
        NormScheme::A => lp_norm(&SampledFunction::h(), n),
        NormScheme::B => Ok(((1..=n).map(|k| (k as f64).ln()).sum::<f64>() / n as f64).exp()),
    }
}

/// `sup_{1 ≤ n ≤ n_max} ‖f‖_n / c_n`.
pub fn banach_norm(f: &SampledFunction, scheme: NormScheme, n_max: usize) -> Result<BanachNorm> {
    if n_max < 4 {
        return Err(Error::Precondition(format!("n_max must be at least 4, got {n_max}")));
    }
    let mut best = BanachNorm { value: f64::NEG_INFINITY, argmax: 0, attained_at_n_max: false };
    for n in 1..=n_max {
        let ratio = lp_norm(f, n)? / scheme_constant(scheme, n)?;
        if ratio > best.value {
            best.value = ratio;
            best.argmax = n;
        }
    }
    best.attained_at_n_max = best.argmax == n_max;
    Ok(best)
}

/// Checks `Σ_{n ≤ n_max} ‖f‖_{2n}ⁿ/n! ≤ 1/(1 − 2‖f‖) + 1e-8` with the
/// scheme-B norm taken over all orders `≤ 2·n_max` that enter the sum.
pub fn analytic_bound_check(f: &SampledFunction, n_max: usize) -> Result<IdentityReport> {
    let norm = banach_norm(f, NormScheme::B, (2 * n_max).max(4))?.value;
    if !(norm < 0.5) {
        return Err(Error::Precondition(format!("scheme-B norm {norm} is not below 1/2")));
    }
    let mut sum = 1.0;
    let mut fact = 1.0;
    for n in 1..=n_max {
        fact *= n as f64;
        sum += lp_norm(f, 2 * n)?.powi(n as i32) / fact;
    }
    let bound = 1.0 / (1.0 - 2.0 * norm);
    Ok(IdentityReport::new(format!("analytic_bound[{}]", f.name()), sum - bound, 1e-8, n_max)
        .with_note(format!("sum = {sum:?}, bound = {bound:?}, norm = {norm:?}")))
}

/// `(2n)! ≤ 2^{2n}(n!)²` in exact integer arithmetic for every `n ≤ n_max`.
/// The residual counts violations.
pub fn factorial_inequality(n_max: usize) -> IdentityReport {
    let mut violations = 0usize;
    let mut fact_n = BigUint::from(1u32);
    let mut fact_2n = BigUint::from(1u32);
    for n in 0..=n_max {
        if n > 0 {
            fact_n *= n;
            fact_2n *= (2 * n - 1) * (2 * n);
        }
        let rhs = (BigUint::from(1u32) << (2 * n)) * &fact_n * &fact_n;
        if fact_2n > rhs {
            violations += 1;
        }
    }
    IdentityReport::new("factorial_inequality", violations as f64, 0.0, n_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub level: usize,
    pub delta: f64,
    pub log10_integral: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessOutcome {
    /// The integral exceeded `10⁶` first at this level.
    Diverges { level: usize },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub t: f64,
    pub eps: f64,
    pub rows: Vec<WitnessRow>,
    pub outcome: WitnessOutcome,
    pub strictly_increasing: bool,
}

/// Threshold (log₁₀) above which the witness declares divergence.
pub const WITNESS_LOG10_THRESHOLD: f64 = 6.0;

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Table of `∫_δ^eps e^{t h(x)} dx` for `δ = eps / 2^j`, `j = 1..=levels`.
///
/// Each cell `[δ_j, δ_{j−1}]` is integrated in `s = −ln x` and in log space,
/// so values far beyond the double range are still ordered correctly.
pub fn divergence_witness(t: f64, eps: f64, levels: usize) -> Result<DivergenceTable> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("witness needs t >= 0, got {t}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("witness needs eps in (0, 1), got {eps}")));
    }
    if levels == 0 {
        return Err(Error::Domain("witness needs at least one level".into()));
    }
    let s0 = -eps.ln();
    let grid = Grid1D::uniform(s0, s0 + levels as f64 * std::f64::consts::LN_2, levels)?;
    let exponent = |s: f64| t * h_from_neg_log(s).unwrap_or(f64::NAN) - s;
    let mut rows = Vec::with_capacity(levels);
    let mut log_total = f64::NEG_INFINITY;
    let mut outcome = WitnessOutcome::Inconclusive;
    for (j, &(a, b)) in grid.cells().iter().enumerate() {
        // The exponent is convex in s, so its maximum on a cell is at an end.
        let peak = exponent(a).max(exponent(b));
        let cell = integrate_adaptive(|s| (exponent(s) - peak).exp(), a, b, 1e-300, 1e-13)?;
        log_total = log_sum_exp(log_total, peak + cell.ln());
        let level = j + 1;
        let log10 = log_total / std::f64::consts::LN_10;
        rows.push(WitnessRow { level, delta: eps / 2f64.powi(level as i32), log10_integral: log10 });
        if outcome == WitnessOutcome::Inconclusive && log10 > WITNESS_LOG10_THRESHOLD {
            outcome = WitnessOutcome::Diverges { level };
        }
    }
    let strictly_increasing = rows.windows(2).all(|w| w[1].log10_integral > w[0].log10_integral);
    Ok(DivergenceTable { t, eps, rows, outcome, strictly_increasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_small_argument_has_no_cancellation() {
        // G(x) ≈ x/2 for tiny x.
        let x = 1e-20;
        assert!((G_eval(x).unwrap() / (x / 2.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn h_inverts_g_near_one() {
        let x = 1.0 - 1e-12;
        let h = h_eval(x).unwrap();
        assert!(((1.0 - G_eval(h).unwrap()) - x).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(G_eval(-1.0).is_err());
        assert!(h_eval(0.0).is_err());
        assert!(h_eval(1.5).is_err());
        assert!(moment_integral(9).is_err());
        assert!(divergence_witness(1.0, 1.5, 3).is_err());
        assert!(banach_norm(&SampledFunction::constant(1.0), NormScheme::B, 3).is_err());
    }
}

//! Irrationality-exponent estimation and verification.
//!
//! The exponent of an expansion whose convergents satisfy a two-sided
//! approximation bound is `1 + limsup log q_{n+1} / log q_n`. On finite data
//! the limsup is replaced by a maximum over a tail window, and every logarithm
//! is a certified interval.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cf::{validate, CfSpec, Sign};
use crate::convergents::{enclose, ConvergentTable, Enclosure};
use crate::error::{CfError, Result};
use crate::fixed::{ln_biguint, log_precision_bits, FixedInterval};
use crate::interchange::{rational_string, ratio_to_f64};
use crate::quadratic::QuadSurd;

/// `lambda_n = log q_{n+1} / log q_n` with certified bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaPoint {
    pub n: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Bit lengths of `q_n` and `q_{n+1}`.
    pub q_bits: (u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Form,
    Form1,
    Both,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "form" => Some(Method::Form),
            "form1" => Some(Method::Form1),
            "both" => Some(Method::Both),
            _ => None,
        }
    }

    fn wants_form(self) -> bool {
        matches!(self, Method::Form | Method::Both)
    }

    fn wants_form1(self) -> bool {
        matches!(self, Method::Form1 | Method::Both)
    }
}

/// Maximum of a series over the tail window and over the full range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Index where the window maximum is attained.
    pub argmax: usize,
    pub full_range_value: f64,
    pub full_range_argmax: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Window {
    pub start_fraction: f64,
    pub start: usize,
    pub n_max: usize,
}

/// `log b_{n+1} / log(b_1 ... b_n)` with certified bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub method: Method,
    pub window: Window,
    pub lambda_series: Vec<LambdaPoint>,
    /// Indices skipped because `q_n < 2`.
    pub skipped: Vec<usize>,
    pub mu_form: Option<Estimate>,
    pub form1_series: Vec<GrowthPoint>,
    pub mu_form1: Option<Estimate>,
    /// `n / log(b_1 ... b_n)` at `n_max`; small values support the `form1` estimate.
    pub form1_diagnostic: Option<f64>,
    /// Upper bound on the absolute error of any logarithm used.
    pub eps_log: f64,
    pub log_precision_bits: u32,
    /// No `b_n + a_{n+1} >= 2` in the second half of the prefix: the value
    /// may be rational and the estimates meaningless.
    pub suspect_rational: bool,
}

struct LogCache {
    bits: u32,
    eps: f64,
}

impl LogCache {
    fn ln(&mut self, x: &BigUint) -> FixedInterval {
        let iv = ln_biguint(x, self.bits);
        self.eps = self.eps.max(iv.width_f64());
        iv
    }
}

fn ratio_interval(num: &FixedInterval, den: &FixedInterval) -> (BigRational, BigRational) {
    (
        BigRational::new(num.lo.clone(), den.hi.clone()),
        BigRational::new(num.hi.clone(), den.lo.clone()),
    )
}

fn positive_magnitude(v: &BigInt) -> BigUint {
    v.magnitude().clone()
}

fn lambda_points(
    table: &ConvergentTable,
    n_max: usize,
    logs: &mut LogCache,
) -> (Vec<LambdaPoint>, Vec<usize>) {
    let two = BigInt::from(2);
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    let mut prev: Option<FixedInterval> = None;
    for n in 0..n_max {
        let qn = table.q(n);
        let qn1 = table.q(n + 1);
        if *qn < two || *qn1 < two {
            skipped.push(n);
            prev = None;
            continue;
        }
        let l0 = match prev.take() {
            Some(iv) => iv,
            None => logs.ln(&positive_magnitude(qn)),
        };
        let l1 = logs.ln(&positive_magnitude(qn1));
        let (lo, hi) = ratio_interval(&l1, &l0);
        let lo = ratio_to_f64(&lo);
        let hi = ratio_to_f64(&hi);
        points.push(LambdaPoint {
            n,
            value: (lo + hi) / 2.0,
            lo,
            hi,
            q_bits: (qn.bits(), qn1.bits()),
        });
        prev = Some(l1);
    }
    (points, skipped)
}

/// `lambda_n` for `0 <= n < n_max`, skipping indices with `q_n < 2`.
pub fn lambda_series(spec: &CfSpec, n_max: usize) -> Result<(Vec<LambdaPoint>, Vec<usize>, f64)> {
    validate(spec, n_max)?;
    let mut table = ConvergentTable::new(spec);
    table.ensure(n_max)?;
    let mut logs = LogCache {
        bits: log_precision_bits(),
        eps: 0.0,
    };
    let (points, skipped) = lambda_points(&table, n_max, &mut logs);
    if points.is_empty() {
        return Err(CfError::DegenerateQ(n_max));
    }
    Ok((points, skipped, logs.eps))
}

fn window_start(fraction: f64, n_max: usize) -> usize {
    (fraction * n_max as f64).ceil().max(0.0) as usize
}

fn windowed_max(points: &[(usize, f64, f64, f64)], start: usize, offset: f64) -> Option<Estimate> {
    let best = |it: &mut dyn Iterator<Item = &(usize, f64, f64, f64)>| {
        it.fold(None::<(usize, f64, f64, f64)>, |acc, p| match acc {
            Some(a) if a.1 >= p.1 => Some(a),
            _ => Some(*p),
        })
    };
    let full = best(&mut points.iter())?;
    let win = best(&mut points.iter().filter(|p| p.0 >= start)).unwrap_or(full);
    // the maximum of intervals lies between the max of the lower ends and the max of the upper ends
    let in_window = |p: &&(usize, f64, f64, f64)| p.0 >= start;
    let lo = points.iter().filter(in_window).map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    let hi = points.iter().filter(in_window).map(|p| p.3).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (full.2, full.3) };
    Some(Estimate {
        value: offset + win.1,
        lo: offset + lo,
        hi: offset + hi,
        argmax: win.0,
        full_range_value: offset + full.1,
        full_range_argmax: full.0,
    })
}

/// Limsup proxies: `1 + max lambda_n` and `2 + max log b_{n+1}/log(b_1...b_n)`
/// over `n` in `[ceil(f n_max), n_max - 1]`.
pub fn estimate_mu(
    spec: &CfSpec,
    n_max: usize,
    method: Method,
    window_start_fraction: f64,
) -> Result<ExponentReport> {
    if !(0.0..=1.0).contains(&window_start_fraction) {
        return Err(CfError::BadParams(format!(
            "window start fraction {window_start_fraction} outside [0, 1]"
        )));
    }
    let report = validate(spec, n_max)?;
    let start = window_start(window_start_fraction, n_max);
    let mut logs = LogCache {
        bits: log_precision_bits(),
        eps: 0.0,
    };

    let mut lambda = Vec::new();
    let mut skipped = Vec::new();
    let mut mu_form = None;
    if method.wants_form() {
        let mut table = ConvergentTable::new(spec);
        table.ensure(n_max)?;
        let (points, sk) = lambda_points(&table, n_max, &mut logs);
        if points.is_empty() {
            return Err(CfError::DegenerateQ(n_max));
        }
        let tuples: Vec<_> = points.iter().map(|p| (p.n, p.value, p.lo, p.hi)).collect();
        mu_form = windowed_max(&tuples, start, 1.0);
        lambda = points;
        skipped = sk;
    }

    let mut form1_series = Vec::new();
    let mut mu_form1 = None;
    let mut form1_diagnostic = None;
    if method.wants_form1() {
        let terms = spec.terms_to(n_max)?;
        let mut product = BigUint::one();
        for n in 1..n_max {
            product *= positive_magnitude(&terms[n - 1].b);
            if product < BigUint::from(2u32) {
                continue;
            }
            let den = logs.ln(&product);
            let next = positive_magnitude(&terms[n].b);
            let num = logs.ln(&next);
            let (lo, hi) = ratio_interval(&num, &den);
            let (lo, hi) = (ratio_to_f64(&lo), ratio_to_f64(&hi));
            form1_series.push(GrowthPoint {
                n,
                value: (lo + hi) / 2.0,
                lo,
                hi,
            });
        }
        product *= positive_magnitude(&terms[n_max - 1].b);
        if form1_series.is_empty() {
            return Err(CfError::DegenerateQ(n_max));
        }
        if product >= BigUint::from(2u32) {
            let ln = logs.ln(&product);
            form1_diagnostic = Some(n_max as f64 / ln.mid_f64());
        }
        let tuples: Vec<_> = form1_series.iter().map(|p| (p.n, p.value, p.lo, p.hi)).collect();
        mu_form1 = windowed_max(&tuples, start, 2.0);
    }

    Ok(ExponentReport {
        method,
        window: Window {
            start_fraction: window_start_fraction,
            start,
            n_max,
        },
        lambda_series: lambda,
        skipped,
        mu_form,
        form1_series,
        mu_form1,
        form1_diagnostic,
        eps_log: logs.eps,
        log_precision_bits: logs.bits,
        suspect_rational: report.cond1_suspect,
    })
}

/// Sufficient conditions for the growth formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// Runs of `a_n = -1` are bounded.
    A,
    /// `b_n >= 2` and runs of `b_n = 2` are bounded.
    B,
    /// `b_n + a_n >= 2`.
    C,
    /// `b_n >= 2` and `b_n + a_{n+1} >= 2`.
    D,
}

impl Condition {
    pub fn parse(s: &str) -> Option<Condition> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Some(Condition::A),
            "B" => Some(Condition::B),
            "C" => Some(Condition::C),
            "D" => Some(Condition::D),
            _ => None,
        }
    }
}

/// Conditions evaluated as for-all statements over `[from, to]`.
///
/// A run condition holds on finite data when at least one run ends inside
/// the range and the run still open at `to` is no longer than the longest
/// closed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub from: usize,
    pub to: usize,
    pub holds_a: bool,
    pub holds_b: bool,
    pub holds_c: bool,
    pub holds_d: bool,
    /// Longest closed run of `a_n = -1` (`L`).
    pub max_run_neg_a: usize,
    /// Longest closed run of `b_n = 2` (`M`).
    pub max_run_b2: usize,
    pub open_run_neg_a: usize,
    pub open_run_b2: usize,
}

impl ConditionReport {
    pub fn holds(&self, c: Condition) -> bool {
        match c {
            Condition::A => self.holds_a,
            Condition::B => self.holds_b,
            Condition::C => self.holds_c,
            Condition::D => self.holds_d,
        }
    }

    /// First condition that holds, in the order C, D, B, A.
    pub fn best(&self) -> Option<Condition> {
        [Condition::C, Condition::D, Condition::B, Condition::A]
            .into_iter()
            .find(|&c| self.holds(c))
    }
}

struct RunTracker {
    current: usize,
    max_closed: usize,
    closed_any: bool,
}

impl RunTracker {
    fn new() -> Self {
        RunTracker {
            current: 0,
            max_closed: 0,
            closed_any: false,
        }
    }

    fn step(&mut self, in_run: bool) {
        if in_run {
            self.current += 1;
        } else {
            self.max_closed = self.max_closed.max(self.current);
            self.current = 0;
            self.closed_any = true;
        }
    }

    fn bounded(&self) -> bool {
        self.closed_any && self.current <= self.max_closed
    }
}

pub fn check_conditions(spec: &CfSpec, from: usize, to: usize) -> Result<ConditionReport> {
    if from < 1 || from > to {
        return Err(CfError::BadParams(format!("invalid range {from}..{to}")));
    }
    let terms = spec.terms_to(to)?;
    let next = spec.term(to + 1);
    let two = BigInt::from(2);
    let mut neg = RunTracker::new();
    let mut twos = RunTracker::new();
    let mut all_b_ge2 = true;
    let mut c = true;
    let mut d = true;
    for n in from..=to {
        let t = &terms[n - 1];
        neg.step(t.a == Sign::Minus);
        twos.step(t.b == two);
        all_b_ge2 &= t.b >= two;
        c &= &t.b + t.a.to_i64() >= two;
        let next_a = if n < to {
            Some(terms[n].a)
        } else {
            next.as_ref().map(|t| t.a)
        };
        d &= t.b >= two;
        if let Some(a) = next_a {
            d &= t.pair_sum(a) >= two;
        }
    }
    Ok(ConditionReport {
        from,
        to,
        holds_a: neg.bounded(),
        holds_b: all_b_ge2 && twos.bounded(),
        holds_c: c,
        holds_d: d,
        max_run_neg_a: neg.max_closed,
        max_run_b2: twos.max_closed,
        open_run_neg_a: neg.current,
        open_run_b2: twos.current,
    })
}

/// `(rho, sigma, tau)` in `q_{n+1} >= rho q_n` and
/// `sigma/(q_n q_{n+1}) <= |alpha - p_n/q_n| <= tau/(q_n q_{n+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundConstants {
    #[serde(with = "rational_string")]
    pub rho: BigRational,
    #[serde(with = "rational_string")]
    pub sigma: BigRational,
    #[serde(with = "rational_string")]
    pub tau: BigRational,
}

impl BoundConstants {
    pub fn new(rho: BigRational, sigma: BigRational, tau: BigRational) -> Result<Self> {
        if !(rho.is_positive() && sigma.is_positive() && tau.is_positive()) {
            return Err(CfError::BadParams("rho, sigma, tau must be positive".into()));
        }
        Ok(BoundConstants { rho, sigma, tau })
    }

    /// `(1/L, 1/(L+1), L+1)` for A, `(1, 1/2, M+1)` for B, `(1, 1/2, 2)` for C and D.
    /// Run bounds below 1 are raised to 1.
    pub fn for_condition(condition: Condition, run_bound: usize) -> BoundConstants {
        let r = |n: usize, d: usize| BigRational::new(BigInt::from(n), BigInt::from(d));
        let k = run_bound.max(1);
        match condition {
            Condition::A => BoundConstants {
                rho: r(1, k),
                sigma: r(1, k + 1),
                tau: r(k + 1, 1),
            },
            Condition::B => BoundConstants {
                rho: r(1, 1),
                sigma: r(1, 2),
                tau: r(k + 1, 1),
            },
            Condition::C | Condition::D => BoundConstants {
                rho: r(1, 1),
                sigma: r(1, 2),
                tau: r(2, 1),
            },
        }
    }
}

/// Constants for `condition`, after confirming it over `[from, to]`.
pub fn default_constants(
    spec: &CfSpec,
    condition: Condition,
    from: usize,
    to: usize,
) -> Result<BoundConstants> {
    let report = check_conditions(spec, from, to)?;
    if !report.holds(condition) {
        return Err(CfError::ConditionNotVerified(format!(
            "condition {condition:?} does not hold on {from}..{to}"
        )));
    }
    let bound = match condition {
        Condition::A => report.max_run_neg_a,
        Condition::B => report.max_run_b2,
        _ => 0,
    };
    Ok(BoundConstants::for_condition(condition, bound))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Indeterminate, _) | (_, Verdict::Indeterminate) => Verdict::Indeterminate,
            _ => Verdict::Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichCheck {
    pub n: usize,
    pub verdict: Verdict,
    pub growth: Verdict,
    pub lower: Verdict,
    pub upper: Verdict,
    /// `q_{n+1} - rho q_n`.
    #[serde(with = "rational_string")]
    pub growth_margin: BigRational,
    /// `err_lo - sigma/(q_n q_{n+1})`, scaled by `q_n q_{n+1}`.
    #[serde(with = "rational_string")]
    pub lower_margin: BigRational,
    /// `tau/(q_n q_{n+1}) - err_hi`, scaled by `q_n q_{n+1}`.
    #[serde(with = "rational_string")]
    pub upper_margin: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub constants: BoundConstants,
    pub eval_depth: usize,
    pub checks: Vec<SandwichCheck>,
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
}

impl SandwichReport {
    pub fn verdict(&self) -> Verdict {
        if self.failed > 0 {
            Verdict::Fail
        } else if self.indeterminate > 0 {
            Verdict::Indeterminate
        } else {
            Verdict::Pass
        }
    }
}

fn error_bounds(
    table: &ConvergentTable,
    spec: &CfSpec,
    enc: &Enclosure,
    n: usize,
) -> Result<(BigRational, BigRational)> {
    let next = spec.term_or_err(n + 2)?;
    let q0 = table.q(n);
    let q1 = table.q(n + 1);
    let (xi_lo, xi_hi) = match next.a {
        Sign::Plus => (q1.clone(), q1 + q0),
        Sign::Minus => (q1 - q0, q1.clone()),
    };
    if !xi_lo.is_positive() {
        return Err(CfError::InvariantBreach {
            index: n + 1,
            detail: format!("xi_{} lower bound {xi_lo} is not positive", n + 1),
        });
    }
    let mut lo = BigRational::new(BigInt::one(), q0 * xi_hi);
    let mut hi = BigRational::new(BigInt::one(), q0 * xi_lo);
    let conv = BigRational::new(table.p(n).clone(), q0.clone());
    let d_lo = (&enc.lo - &conv).abs();
    let d_hi = (&enc.hi - &conv).abs();
    let far = d_lo.clone().max(d_hi.clone());
    let near = if enc.contains(&conv) {
        BigRational::zero()
    } else {
        d_lo.min(d_hi)
    };
    if near > lo {
        lo = near;
    }
    if far < hi {
        hi = far;
    }
    Ok((lo, hi))
}

/// Checks the growth and two-sided approximation bounds for `n` in
/// `from..=to`, using certified error intervals. A check passes only when the
/// whole interval satisfies it.
pub fn verify_sandwich(
    spec: &CfSpec,
    constants: &BoundConstants,
    from: usize,
    to: usize,
    eval_depth: usize,
) -> Result<SandwichReport> {
    if from > to {
        return Err(CfError::BadParams(format!("invalid range {from}..{to}")));
    }
    if eval_depth < to + 2 {
        return Err(CfError::Precondition(format!(
            "eval_depth {eval_depth} must be at least {}",
            to + 2
        )));
    }
    validate(spec, to + 1)?;
    let enc = enclose(spec, eval_depth)?;
    let mut table = ConvergentTable::new(spec);
    table.ensure(to + 1)?;
    let mut checks = Vec::new();
    for n in from..=to {
        let (err_lo, err_hi) = error_bounds(&table, spec, &enc, n)?;
        let q0 = BigRational::from_integer(table.q(n).clone());
        let q1 = BigRational::from_integer(table.q(n + 1).clone());
        let qq = &q0 * &q1;
        let growth_margin = &q1 - &constants.rho * &q0;
        let growth = if growth_margin.is_negative() {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        let lower_bound = &constants.sigma / &qq;
        let upper_bound = &constants.tau / &qq;
        let lower = if err_lo >= lower_bound {
            Verdict::Pass
        } else if err_hi < lower_bound {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        };
        let upper = if err_hi <= upper_bound {
            Verdict::Pass
        } else if err_lo > upper_bound {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        };
        checks.push(SandwichCheck {
            n,
            verdict: growth.and(lower).and(upper),
            growth,
            lower,
            upper,
            growth_margin,
            lower_margin: (&err_lo - &lower_bound) * &qq,
            upper_margin: (&upper_bound - &err_hi) * &qq,
        });
    }
    let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
    Ok(SandwichReport {
        constants: constants.clone(),
        eval_depth: enc.depth,
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        indeterminate: count(Verdict::Indeterminate),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncadReport {
    pub n_max: usize,
    /// `q_n <= F_{n+1} b_1 ... b_n` for every `1 <= n <= n_max`.
    pub upper_ok: bool,
    pub first_failure: Option<usize>,
    /// `min_n (q_n / (b_1 ... b_n))^(1/n)`.
    pub empirical_k: f64,
    pub empirical_k_at: usize,
}

/// Compares `q_n` with `F_{n+1} b_1 ... b_n` exactly and reports the
/// empirical lower-growth constant.
pub fn check_encad(spec: &CfSpec, n_max: usize) -> Result<EncadReport> {
    validate(spec, n_max)?;
    let mut table = ConvergentTable::new(spec);
    table.ensure(n_max)?;
    let mut product = BigInt::one();
    let (mut f0, mut f1) = (BigInt::one(), BigInt::one()); // F_n, F_{n+1} at n = 1
    let mut first_failure = None;
    let mut best = (f64::INFINITY, 0usize);
    for n in 1..=n_max {
        product *= &table.term(n).b;
        let q = table.q(n);
        if *q > &f1 * &product && first_failure.is_none() {
            first_failure = Some(n);
        }
        let lq = ln_f64(q.magnitude());
        let lp = ln_f64(product.magnitude());
        let k = ((lq - lp) / n as f64).exp();
        if k < best.0 {
            best = (k, n);
        }
        let f2 = &f0 + &f1;
        f0 = std::mem::replace(&mut f1, f2);
    }
    Ok(EncadReport {
        n_max,
        upper_ok: first_failure.is_none(),
        first_failure,
        empirical_k: if n_max == 0 { 1.0 } else { best.0 },
        empirical_k_at: best.1,
    })
}

/// Natural log from the leading 64 bits; for diagnostics only.
fn ln_f64(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact exponent of the Adams–Davison expansion for a reduced quadratic `alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicMu {
    /// `alpha = [c_1; c_2, ..., c_H, c_1, ...]`.
    pub alpha: QuadSurd,
    /// `beta_1 = -1/alpha*`, `beta_n = c_{n-1} + 1/beta_{n-1}`.
    pub betas: Vec<QuadSurd>,
    /// `1 + max beta_n`.
    pub mu: QuadSurd,
}

impl PeriodicMu {
    pub fn decimal(&self, digits: u32) -> String {
        self.mu.to_decimal(digits)
    }
}

/// `1 + max(beta_1, ..., beta_H)` for the period `c_1, ..., c_H`.
pub fn periodic_quadratic_mu(period: &[BigInt]) -> Result<PeriodicMu> {
    if period.is_empty() {
        return Err(CfError::BadPeriod("period must be non-empty".into()));
    }
    if let Some(i) = period.iter().position(|c| *c < BigInt::one()) {
        return Err(CfError::BadPeriod(format!("c_{} < 1", i + 1)));
    }
    // convergents of [c_1; c_2, ..., c_H]
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (period[0].clone(), BigInt::one());
    for c in &period[1..] {
        let p_next = c * &p + &p_prev;
        let q_next = c * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    // alpha = (p alpha + p_prev)/(q alpha + q_prev)
    let b = &q_prev - &p;
    let disc = &b * &b + BigInt::from(4) * &q * &p_prev;
    let two_q = BigInt::from(2) * &q;
    let alpha = QuadSurd::new(
        BigRational::new(-b, two_q.clone()),
        BigRational::new(BigInt::one(), two_q),
        disc.clone(),
    );
    let mut betas = Vec::with_capacity(period.len());
    let beta1 = alpha
        .conj()
        .recip()
        .ok_or_else(|| CfError::BadPeriod("conjugate vanishes".into()))?;
    let beta1 = QuadSurd::integer(0, disc.clone()).sub(&beta1);
    betas.push(beta1);
    for c in &period[..period.len() - 1] {
        let prev = betas.last().expect("non-empty");
        let inv = prev
            .recip()
            .ok_or_else(|| CfError::BadPeriod("beta vanishes".into()))?;
        betas.push(QuadSurd::integer(c.clone(), disc.clone()).add(&inv));
    }
    let max = betas
        .iter()
        .skip(1)
        .fold(betas[0].clone(), |m, b| if b.cmp_value(&m).is_gt() { b.clone() } else { m });
    let mu = QuadSurd::integer(1, disc).add(&max);
    Ok(PeriodicMu { alpha, betas, mu })
}

/// Convenience for `f64` callers.
pub fn to_f64_lossy(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

//! Convergents, tail bounds and certified enclosures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cf::{validate, CfSpec, PartialQuotient, Sign};
use crate::error::{CfError, Result, Violation, ViolationRule};

/// `p_n / q_n` with the determinant `p_n q_{n-1} - p_{n-1} q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub n: usize,
    pub p: BigInt,
    pub q: BigInt,
    /// `(-1)^{n-1} a_1 ... a_n`, checked against the recurrence.
    pub det: i8,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// Incrementally extended table of `p_n, q_n`, with per-term admissibility checks.
#[derive(Clone, Debug)]
pub struct ConvergentTable<'a> {
    spec: &'a CfSpec,
    // index i holds p_{i-1}, q_{i-1}
    p: Vec<BigInt>,
    q: Vec<BigInt>,
    det: Vec<i8>,
    terms: Vec<PartialQuotient>,
}

impl<'a> ConvergentTable<'a> {
    pub fn new(spec: &'a CfSpec) -> Self {
        ConvergentTable {
            spec,
            p: vec![BigInt::one(), spec.head().clone()],
            q: vec![BigInt::zero(), BigInt::one()],
            det: vec![1, -1],
            terms: Vec::new(),
        }
    }

    /// Highest `n` computed so far.
    pub fn computed(&self) -> usize {
        self.p.len() - 2
    }

    pub fn ensure(&mut self, n: usize) -> Result<()> {
        while self.computed() < n {
            let k = self.computed() + 1;
            let t = self.spec.term_or_err(k)?;
            if t.b < BigInt::one() {
                return Err(CfError::MalformedSpec {
                    violations: vec![Violation {
                        index: k,
                        rule: ViolationRule::NonPositiveQuotient,
                    }],
                });
            }
            if let Some(prev) = self.terms.last() {
                if prev.pair_sum(t.a) < BigInt::one() {
                    return Err(CfError::MalformedSpec {
                        violations: vec![Violation {
                            index: k - 1,
                            rule: ViolationRule::PairSumBelowOne,
                        }],
                    });
                }
            }
            let i = k + 1;
            let (p, q) = match t.a {
                Sign::Plus => (
                    &t.b * &self.p[i - 1] + &self.p[i - 2],
                    &t.b * &self.q[i - 1] + &self.q[i - 2],
                ),
                Sign::Minus => (
                    &t.b * &self.p[i - 1] - &self.p[i - 2],
                    &t.b * &self.q[i - 1] - &self.q[i - 2],
                ),
            };
            if q < BigInt::one() {
                return Err(CfError::InvariantBreach {
                    index: k,
                    detail: format!("q_{k} = {q} < 1"),
                });
            }
            let det = -self.det[i - 1] * t.a.to_i64() as i8;
            let lhs = &p * &self.q[i - 1] - &self.p[i - 1] * &q;
            if lhs != BigInt::from(det) {
                return Err(CfError::InvariantBreach {
                    index: k,
                    detail: format!("determinant {lhs} != {det}"),
                });
            }
            self.p.push(p);
            self.q.push(q);
            self.det.push(det);
            self.terms.push(t);
        }
        Ok(())
    }

    /// `p_n` for `n >= -1`, given as `n + 1`.
    fn p_shifted(&self, i: usize) -> &BigInt {
        &self.p[i]
    }

    pub fn p(&self, n: usize) -> &BigInt {
        self.p_shifted(n + 1)
    }

    pub fn q(&self, n: usize) -> &BigInt {
        &self.q[n + 1]
    }

    pub fn term(&self, n: usize) -> &PartialQuotient {
        &self.terms[n - 1]
    }

    pub fn convergent(&self, n: usize) -> Convergent {
        Convergent {
            n,
            p: self.p(n).clone(),
            q: self.q(n).clone(),
            det: self.det[n + 1],
        }
    }
}

/// `p_0/q_0 ... p_{n_max}/q_{n_max}` from the three-term recurrences.
pub fn convergents(spec: &CfSpec, n_max: usize) -> Result<Vec<Convergent>> {
    if n_max > 0 {
        validate(spec, n_max)?;
    }
    let mut table = ConvergentTable::new(spec);
    table.ensure(n_max)?;
    Ok((0..=n_max).map(|n| table.convergent(n)).collect())
}

/// Exact value of the finite fraction `[b_0; a_1/b_1, ..., a_n/b_n]`.
pub fn finite_value(spec: &CfSpec, n: usize) -> Result<BigRational> {
    let mut table = ConvergentTable::new(spec);
    table.ensure(n)?;
    Ok(BigRational::new(table.p(n).clone(), table.q(n).clone()))
}

/// Exact value of `head + a_1/(b_1 + ... + a_n/b_n)` evaluated from the bottom.
///
/// Used as an oracle independent of the recurrences. Fails on a zero
/// denominator.
pub fn evaluate_backward(head: &BigInt, terms: &[PartialQuotient]) -> Option<BigRational> {
    let mut acc: Option<BigRational> = None;
    for t in terms.iter().rev() {
        let denom = match acc {
            None => BigRational::from_integer(t.b.clone()),
            Some(tail) => BigRational::from_integer(t.b.clone()) + tail,
        };
        if denom.is_zero() {
            return None;
        }
        let level = BigRational::from_integer(t.a.to_bigint()) / denom;
        acc = Some(level);
    }
    let head = BigRational::from_integer(head.clone());
    Some(match acc {
        Some(tail) => head + tail,
        None => head,
    })
}

/// Range of `x_n = a_{n+1}/(b_{n+1} + ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailBound {
    pub sign_of_next_a: i8,
    #[serde(with = "crate::interchange::rational_string")]
    pub lo: BigRational,
    #[serde(with = "crate::interchange::rational_string")]
    pub hi: BigRational,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl TailBound {
    pub fn for_sign(a: Sign) -> TailBound {
        match a {
            Sign::Plus => TailBound {
                sign_of_next_a: 1,
                lo: BigRational::zero(),
                hi: BigRational::one(),
                open_lo: true,
                open_hi: false,
            },
            Sign::Minus => TailBound {
                sign_of_next_a: -1,
                lo: -BigRational::one(),
                hi: BigRational::zero(),
                open_lo: false,
                open_hi: true,
            },
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.open_lo { *x > self.lo } else { *x >= self.lo };
        let below = if self.open_hi { *x < self.hi } else { *x <= self.hi };
        above && below
    }
}

/// Bound on `x_n`, determined by the sign of `a_{n+1}`.
pub fn tail_bound(spec: &CfSpec, n: usize) -> Result<TailBound> {
    let next = spec.term(n + 1).ok_or(CfError::IndexOutOfRange {
        index: n + 1,
        available: spec.available().unwrap_or(usize::MAX),
    })?;
    Ok(TailBound::for_sign(next.a))
}

/// Closed rational interval containing the value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enclosure {
    pub depth: usize,
    #[serde(with = "crate::interchange::rational_string")]
    pub lo: BigRational,
    #[serde(with = "crate::interchange::rational_string")]
    pub hi: BigRational,
}

impl Enclosure {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Depth-doubling attempts before giving up on a sign-definite denominator.
pub const ENCLOSURE_RETRY_CAP: usize = 64;

/// Certified enclosure from the convergents at `depth` and `depth + 1`.
///
/// A terminating spec whose last term is reached yields its exact value.
/// A prefix that is too short is evaluated at the deepest possible depth.
/// Enclosure of a prefix with fewer than two terms.
///
/// Any tail satisfies `|x| <= 1`, and after `b_1 = 1` admissibility forces
/// `a_2 = +1`, so the tail is then in `[0, 1]`.
fn short_prefix_enclosure(spec: &CfSpec, len: usize) -> Enclosure {
    let head = BigRational::from_integer(spec.head().clone());
    let one = BigRational::one();
    let Some(t) = spec.term(1).filter(|_| len == 1) else {
        return Enclosure {
            depth: 0,
            lo: &head - &one,
            hi: &head + &one,
        };
    };
    let b = BigRational::from_integer(t.b.clone());
    let y_lo = if t.b.is_one() { BigRational::zero() } else { -one.clone() };
    let near = (&b + &y_lo).recip();
    let far = (&b + &one).recip();
    let (lo, hi) = match t.a {
        Sign::Plus => (&head + far, &head + near),
        Sign::Minus => (&head - near, &head - far),
    };
    Enclosure { depth: 1, lo, hi }
}

pub fn enclose(spec: &CfSpec, depth: usize) -> Result<Enclosure> {
    let available = spec.available();
    if spec.terminates() {
        let len = available.unwrap_or(0);
        if depth + 2 > len {
            let v = finite_value(spec, len)?;
            return Ok(Enclosure {
                depth: len,
                lo: v.clone(),
                hi: v,
            });
        }
    }
    let mut depth = match available {
        Some(len) if depth + 2 > len => {
            if len < 2 {
                return Ok(short_prefix_enclosure(spec, len));
            }
            len - 2
        }
        _ => depth,
    };
    let start = depth;
    let mut table = ConvergentTable::new(spec);
    for _ in 0..ENCLOSURE_RETRY_CAP {
        table.ensure(depth + 1)?;
        let next = spec.term_or_err(depth + 2)?;
        if next.b < BigInt::one() {
            return Err(CfError::MalformedSpec {
                violations: vec![Violation {
                    index: depth + 2,
                    rule: ViolationRule::NonPositiveQuotient,
                }],
            });
        }
        if table.term(depth + 1).pair_sum(next.a) < BigInt::one() {
            return Err(CfError::MalformedSpec {
                violations: vec![Violation {
                    index: depth + 1,
                    rule: ViolationRule::PairSumBelowOne,
                }],
            });
        }
        let (p1, q1) = (table.p(depth + 1), table.q(depth + 1));
        let (p0, q0) = (table.p(depth), table.q(depth));
        let a = next.a.to_bigint();
        let d_edge = q1 + &a * q0;
        if d_edge.is_positive() {
            let v0 = BigRational::new(p1.clone(), q1.clone());
            let v1 = BigRational::new(p1 + &a * p0, d_edge);
            let (lo, hi) = if v0 <= v1 { (v0, v1) } else { (v1, v0) };
            return Ok(Enclosure { depth, lo, hi });
        }
        let doubled = (depth * 2).max(depth + 1);
        match available {
            Some(len) if doubled + 2 > len => break,
            _ => depth = doubled,
        }
    }
    Err(CfError::EnclosureFailed {
        depth: start,
        attempts: ENCLOSURE_RETRY_CAP,
    })
}

/// Bounds on `xi_{n+1}` and on `|alpha - p_n/q_n|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxError {
    pub n: usize,
    #[serde(with = "crate::interchange::rational_string")]
    pub xi_lo: BigRational,
    #[serde(with = "crate::interchange::rational_string")]
    pub xi_hi: BigRational,
    #[serde(with = "crate::interchange::rational_string")]
    pub err_lo: BigRational,
    #[serde(with = "crate::interchange::rational_string")]
    pub err_hi: BigRational,
}

/// `|alpha - p_n/q_n| = 1/(q_n xi_{n+1})` with `xi_{n+1} = q_{n+1} + x_{n+1} q_n`,
/// intersected with the distance range to `enclose(spec, eval_depth)`.
pub fn approx_error(spec: &CfSpec, n: usize, eval_depth: usize) -> Result<ApproxError> {
    if eval_depth < n + 2 {
        return Err(CfError::Precondition(format!(
            "eval_depth {eval_depth} must be at least n + 2 = {}",
            n + 2
        )));
    }
    let mut table = ConvergentTable::new(spec);
    table.ensure(n + 1)?;
    let next = spec.term_or_err(n + 2)?;
    let q0 = table.q(n).clone();
    let q1 = table.q(n + 1).clone();
    let (xi_lo, xi_hi) = match next.a {
        Sign::Plus => (q1.clone(), &q1 + &q0),
        Sign::Minus => (&q1 - &q0, q1.clone()),
    };
    if !xi_lo.is_positive() {
        return Err(CfError::InvariantBreach {
            index: n + 1,
            detail: format!("xi_{} lower bound {xi_lo} is not positive", n + 1),
        });
    }
    let mut err_lo = BigRational::new(BigInt::one(), &q0 * &xi_hi);
    let mut err_hi = BigRational::new(BigInt::one(), &q0 * &xi_lo);

    let enc = enclose(spec, eval_depth)?;
    let conv = BigRational::new(table.p(n).clone(), q0);
    let d_lo = (&enc.lo - &conv).abs();
    let d_hi = (&enc.hi - &conv).abs();
    let far = d_lo.clone().max(d_hi.clone());
    let near = if enc.contains(&conv) {
        BigRational::zero()
    } else {
        d_lo.min(d_hi)
    };
    if near > err_lo {
        err_lo = near;
    }
    if far < err_hi {
        err_hi = far;
    }
    Ok(ApproxError {
        n,
        xi_lo: BigRational::from_integer(xi_lo),
        xi_hi: BigRational::from_integer(xi_hi),
        err_lo,
        err_hi,
    })
}

/// Outcome of the exact invariant suite on a prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub checked_through: usize,
    pub determinant_checks: usize,
    pub coprime_checks: usize,
    pub growth_checks: usize,
    pub series_checks: usize,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Largest `n` for which the series identity is checked; sums of large
/// rationals grow quadratically in cost.
pub const SERIES_CHECK_LIMIT: usize = 200;

/// Checks the determinant identity, coprimality, the `q_n` growth
/// inequalities and the series identity for `1 <= n <= n_max`.
///
/// The strict growth inequalities are checked for `n >= 1`; at `n = 0`,
/// where `q_{-1} = 0`, only their non-strict forms hold.
pub fn check_invariants(spec: &CfSpec, n_max: usize) -> Result<InvariantReport> {
    validate(spec, n_max)?;
    let mut table = ConvergentTable::new(spec);
    table.ensure(n_max)?;
    let mut r = InvariantReport {
        checked_through: n_max,
        ..Default::default()
    };
    let mut series = BigRational::from_integer(spec.head().clone());
    let mut numer_sign: i64 = 1;
    for n in 1..=n_max {
        let conv = table.convergent(n);
        let prev = table.convergent(n - 1);
        let t = table.term(n);
        r.determinant_checks += 1;
        if &conv.p * &prev.q - &prev.p * &conv.q != BigInt::from(conv.det) {
            r.failures.push(format!("determinant identity fails at n = {n}"));
        }
        r.coprime_checks += 1;
        if !conv.p.gcd(&conv.q).is_one() {
            r.failures.push(format!("gcd(p_{n}, q_{n}) != 1"));
        }
        if n <= SERIES_CHECK_LIMIT {
            numer_sign *= t.a.to_i64();
            let sign = if n % 2 == 1 { numer_sign } else { -numer_sign };
            series += BigRational::new(BigInt::from(sign), table.q(n - 1) * &conv.q);
            r.series_checks += 1;
            if series != conv.value() {
                r.failures.push(format!("series identity fails at n = {n}"));
            }
        }
    }
    let q = |n: isize| -> BigInt {
        if n < 0 {
            BigInt::zero()
        } else {
            table.q(n as usize).clone()
        }
    };
    for n in 0..n_max {
        let next = table.term(n + 1);
        let ni = n as isize;
        let qn = q(ni);
        let q1 = q(ni + 1);
        r.growth_checks += 1;
        if qn < BigInt::one() {
            r.failures.push(format!("q_{n} < 1"));
        }
        if &qn + next.a.to_bigint() * q(ni - 1) < BigInt::one() {
            r.failures.push(format!("q_{n} + a_{} q_{} < 1", n + 1, ni - 1));
        }
        let strict = n >= 1;
        let gt = |x: &BigInt, y: &BigInt| if strict { x > y } else { x >= y };
        if next.b >= BigInt::from(2) || next.a == Sign::Plus {
            if !gt(&q1, &qn) {
                r.failures.push(format!("q_{} > q_{n} fails", n + 1));
            }
        } else {
            if !gt(&qn, &q1) {
                r.failures.push(format!("q_{n} > q_{} fails", n + 1));
            }
            if n + 2 <= n_max && !gt(&q(ni + 2), &qn) {
                r.failures.push(format!("q_{} > q_{n} fails", n + 2));
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{bessel_ratio, constant_ncf, lehner_sqrt2_half, omega};

    fn q_column(spec: &CfSpec, n: usize) -> Vec<i64> {
        convergents(spec, n)
            .unwrap()
            .iter()
            .map(|c| i64::try_from(&c.q).unwrap())
            .collect()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn fibonacci_denominators() {
        let spec = CfSpec::rcf_prefix(0, [1, 1, 1, 1, 1]);
        let cs = convergents(&spec, 4).unwrap();
        let p: Vec<i64> = cs.iter().map(|c| i64::try_from(&c.p).unwrap()).collect();
        assert_eq!(p, vec![0, 1, 1, 2, 3]);
        assert_eq!(q_column(&spec, 4), vec![1, 1, 2, 3, 5]);
    }

    #[test]
    fn constant_ncf_denominators() {
        let spec = constant_ncf(3, 0).unwrap();
        assert_eq!(q_column(&spec, 4), vec![1, 3, 8, 21, 55]);
    }

    #[test]
    fn omega_convergents() {
        let cs = convergents(&omega(), 5).unwrap();
        for c in cs {
            assert_eq!(c.value(), rat(c.n as i64, c.n as i64 + 1));
        }
    }

    #[test]
    fn base_case() {
        let cs = convergents(&bessel_ratio(), 0).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].p, BigInt::one());
        assert_eq!(cs[0].q, BigInt::one());
        assert_eq!(cs[0].det, -1);
    }

    #[test]
    fn tail_bounds() {
        let b = tail_bound(&bessel_ratio(), 4).unwrap();
        assert_eq!((b.lo.clone(), b.hi.clone(), b.open_lo, b.open_hi), (rat(0, 1), rat(1, 1), true, false));
        let n = tail_bound(&constant_ncf(3, 0).unwrap(), 4).unwrap();
        assert_eq!((n.lo.clone(), n.hi.clone(), n.open_lo, n.open_hi), (rat(-1, 1), rat(0, 1), false, true));
        let finite = CfSpec::rcf_prefix(0, [1, 2]);
        assert!(matches!(tail_bound(&finite, 2), Err(CfError::IndexOutOfRange { .. })));
    }

    #[test]
    fn omega_enclosure_contains_one() {
        for depth in [1usize, 5, 20] {
            let e = enclose(&omega(), depth).unwrap();
            assert_eq!(e.hi, rat(1, 1));
            assert_eq!(e.lo, rat(depth as i64 + 1, depth as i64 + 2));
        }
    }

    #[test]
    fn bessel_enclosure() {
        // I_0(2)/I_1(2) = sum 1/(k!)^2 / sum 1/(k!(k+1)!)
        let (mut s0, mut s1) = (rat(0, 1), rat(0, 1));
        let mut f = BigInt::one();
        for k in 0..40i64 {
            if k > 0 {
                f *= k;
            }
            s0 += BigRational::new(BigInt::one(), &f * &f);
            s1 += BigRational::new(BigInt::one(), &f * &f * (k + 1));
        }
        let e = enclose(&bessel_ratio(), 10).unwrap();
        assert!(e.contains(&(s0 / s1)));
        assert!(e.width() < rat(1, 1_000_000));
    }

    #[test]
    fn lehner_enclosure_brackets_sqrt2_half() {
        let e = enclose(&lehner_sqrt2_half(), 30).unwrap();
        // (lo - 1)^2 <= 1/2 <= (hi - 1)^2
        let half = rat(1, 2);
        let one = rat(1, 1);
        assert!((&e.lo - &one) * (&e.lo - &one) <= half);
        assert!((&e.hi - &one) * (&e.hi - &one) >= half);
        assert!(e.width() < rat(1, 1_000_000));
    }

    #[test]
    fn terminating_spec_has_point_enclosure() {
        let spec = CfSpec::finite(0, vec![PartialQuotient::plus(2), PartialQuotient::minus(3)]);
        let e = enclose(&spec, 5).unwrap();
        assert!(e.is_point());
        assert_eq!(e.lo, rat(3, 5));
    }

    #[test]
    fn short_prefix_clamps_depth() {
        let spec = CfSpec::rcf_prefix(0, [1, 2, 3, 4]);
        let e = enclose(&spec, 10).unwrap();
        assert_eq!(e.depth, 2);
        // [0; 1, ...] with a_2 = +1 forced: value in [1/2, 1]
        let e = enclose(&CfSpec::rcf_prefix(0, [1]), 0).unwrap();
        assert_eq!((e.lo, e.hi), (rat(1, 2), rat(1, 1)));
        // [2; 3, ...]^- lies in 2 - [1/4, 1/2]
        let e = enclose(&CfSpec::ncf_prefix(2, [3]), 5).unwrap();
        assert_eq!((e.lo, e.hi), (rat(3, 2), rat(7, 4)));
        let e = enclose(&CfSpec::prefix(4, vec![]), 0).unwrap();
        assert_eq!((e.lo, e.hi), (rat(3, 1), rat(5, 1)));
    }

    #[test]
    fn approx_error_constant_ncf() {
        let spec = constant_ncf(3, 0).unwrap();
        let e = approx_error(&spec, 3, 12).unwrap();
        assert_eq!(e.xi_lo, rat(34, 1));
        assert_eq!(e.xi_hi, rat(55, 1));
        assert!(e.err_lo <= e.err_hi);
        assert!(matches!(approx_error(&spec, 3, 4), Err(CfError::Precondition(_))));
    }

    #[test]
    fn approx_error_bessel() {
        let spec = bessel_ratio();
        let cs = convergents(&spec, 4).unwrap();
        let e = approx_error(&spec, 3, 20).unwrap();
        assert!(e.err_lo.is_positive());
        assert!(e.err_lo <= e.err_hi);
        assert!(e.err_hi <= BigRational::new(BigInt::one(), &cs[3].q * &cs[4].q));
    }

    #[test]
    fn backward_evaluation_agrees() {
        let terms = vec![
            PartialQuotient::plus(2),
            PartialQuotient::minus(3),
            PartialQuotient::plus(2),
            PartialQuotient::minus(2),
        ];
        let spec = CfSpec::finite(1, terms.clone());
        assert_eq!(
            evaluate_backward(&BigInt::one(), &terms).unwrap(),
            finite_value(&spec, 4).unwrap()
        );
    }

    #[test]
    fn invariant_suite_on_families() {
        for spec in [bessel_ratio(), omega(), lehner_sqrt2_half(), constant_ncf(5, 2).unwrap()] {
            let r = check_invariants(&spec, 40).unwrap();
            assert!(r.ok(), "{:?}", r.failures);
            assert_eq!(r.determinant_checks, 40);
        }
    }

    #[test]
    fn malformed_input_is_rejected() {
        let spec = CfSpec::prefix(0, vec![PartialQuotient::plus(1), PartialQuotient::minus(3)]);
        assert!(matches!(convergents(&spec, 2), Err(CfError::MalformedSpec { .. })));
    }
}

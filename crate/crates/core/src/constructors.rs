//! Continued fractions with prescribed irrationality exponent, and the
//! Adams–Davison expansion of `(b-1) sum b^{-floor(k alpha)}`.

use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::cf::{CfSpec, PartialQuotient, Provenance, Sign};
use crate::error::{CfError, Result};
use crate::families::{gap_ncf, lehner_blocks, omega, LehnerLayout};
use crate::transforms::Relation;

fn provenance(family: &str, params: Value) -> Provenance {
    let params = match params {
        Value::Object(map) => map,
        _ => Map::new(),
    };
    Provenance {
        family: family.to_string(),
        params,
    }
}

/// `floor(q^e)` for `q >= 1` and rational `e >= 0`, exactly.
pub fn floor_rational_power(q: &BigInt, e: &BigRational) -> Result<BigInt> {
    if e.is_negative() || !q.is_positive() {
        return Err(CfError::BadParams("floor_rational_power needs q >= 1, e >= 0".into()));
    }
    let u = e
        .numer()
        .to_u32()
        .ok_or_else(|| CfError::BadTarget(format!("exponent numerator of {e} too large")))?;
    let v = e
        .denom()
        .to_u32()
        .ok_or_else(|| CfError::BadTarget(format!("exponent denominator of {e} too large")))?;
    Ok(q.pow(u).nth_root(v))
}

/// Denominators `Q_0, Q_1, ...` of a regular expansion with quotients `c_1, c_2, ...`.
fn push_denominator(q: &mut Vec<BigInt>, c: &BigInt) {
    let n = q.len();
    let prev2 = if n >= 2 { q[n - 2].clone() } else { BigInt::zero() };
    let next = c * &q[n - 1] + prev2;
    q.push(next);
}

/// Output of [`construct_ncf_exponent`].
#[derive(Clone, Debug)]
pub struct NcfExponent {
    pub s: BigRational,
    /// The negative continued fraction; `(-1,3)` at the marks, `(-1,2)` elsewhere.
    pub spec: CfSpec,
    /// Regular companion `[head - 1; c_1, c_2, ...]` with `c_{2k+1}` the gaps and `c_{2k} = 1`.
    pub companion: Option<CfSpec>,
    /// `c_1, c_2, ...` of the companion.
    pub c: Vec<BigInt>,
    /// Indices `n_1 < n_2 < ...` of the quotients equal to 3.
    pub marks: Vec<BigUint>,
}

/// NCF `[0; 2, .., 2, 3, 2, ..]^-` whose companion regular expansion has
/// gaps `c_{2k+1} = floor(Q_{2k}^{s-2})` and `c_{2k} = 1`.
///
/// `s = 1` yields the rational-valued all-twos expansion.
pub fn construct_ncf_exponent(s: &BigRational, k_max: usize) -> Result<NcfExponent> {
    let params = json!({ "s": s.to_string(), "k_max": k_max });
    if s.is_one() {
        return Ok(NcfExponent {
            s: s.clone(),
            spec: omega().with_provenance(provenance("ncf_exponent", params)),
            companion: None,
            c: Vec::new(),
            marks: Vec::new(),
        });
    }
    let two = BigRational::from_integer(BigInt::from(2));
    if *s < two {
        return Err(CfError::BadTarget(format!("s = {s} must be 1 or at least 2")));
    }
    if k_max == 0 {
        return Err(CfError::BadParams("k_max must be at least 1".into()));
    }
    let e = s - &two;
    let mut q = vec![BigInt::one()];
    let mut c = Vec::with_capacity(2 * k_max);
    let mut marks = Vec::with_capacity(k_max);
    let mut n = BigUint::zero();
    for _ in 0..k_max {
        let gap = floor_rational_power(q.last().expect("non-empty"), &e)?;
        n += gap.magnitude();
        marks.push(n.clone());
        push_denominator(&mut q, &gap);
        c.push(gap);
        let one = BigInt::one();
        push_denominator(&mut q, &one);
        c.push(one);
    }
    let head = BigInt::zero();
    let spec = gap_ncf(head.clone(), marks.clone())?.with_provenance(provenance("ncf_exponent", params));
    let companion = CfSpec::rcf_prefix(head - 1, c.clone());
    Ok(NcfExponent {
        s: s.clone(),
        spec,
        companion: Some(companion),
        c,
        marks,
    })
}

/// Output of [`construct_lcf_exponent`].
#[derive(Clone, Debug)]
pub struct LcfExponent {
    pub s: BigRational,
    /// Lehner expansion with `l_k = 0`; holds the blocks whose positions fit in `usize`.
    pub spec: CfSpec,
    /// `[1; 1, m_1 + 2, m_2 + 2, ...]`, equal to the value of `spec`.
    pub companion: CfSpec,
    /// `m_1, m_2, ...` for all `k_max` rounds.
    pub m: Vec<BigInt>,
    /// Number of blocks present in `spec`.
    pub blocks_in_spec: usize,
}

/// Lehner expansion whose regular companion `[1; 1, m_1+2, ...]` has
/// `m_k + 2 = max(2, floor(Q_k^{s-2}))`.
pub fn construct_lcf_exponent(s: &BigRational, k_max: usize) -> Result<LcfExponent> {
    let two = BigRational::from_integer(BigInt::from(2));
    if *s <= two {
        return Err(CfError::BadTarget(format!("s = {s} must exceed 2")));
    }
    if k_max == 0 {
        return Err(CfError::BadParams("k_max must be at least 1".into()));
    }
    let e = s - &two;
    let min_quotient = BigInt::from(2);
    let mut q = vec![BigInt::one()];
    push_denominator(&mut q, &BigInt::one());
    let mut quotients = vec![BigInt::one()];
    let mut m: Vec<BigInt> = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        let c = floor_rational_power(q.last().expect("non-empty"), &e)?.max(min_quotient.clone());
        m.push(&c - 2);
        push_denominator(&mut q, &c);
        quotients.push(c);
    }
    // keep the blocks whose end positions stay addressable
    let limit = usize::MAX / 4;
    let mut m_small = Vec::new();
    let mut len = 1usize;
    for mk in &m {
        match mk.to_usize().and_then(|v| len.checked_add(v + 2)) {
            Some(next) if next <= limit => {
                m_small.push(mk.to_usize().expect("checked"));
                len = next;
            }
            _ => break,
        }
    }
    let blocks_in_spec = m_small.len();
    let layout = LehnerLayout::new(Relation::OnePlus, vec![0; blocks_in_spec + 1], m_small)?;
    let spec = lehner_blocks(layout).with_provenance(provenance(
        "lcf_exponent",
        json!({ "s": s.to_string(), "k_max": k_max }),
    ));
    Ok(LcfExponent {
        s: s.clone(),
        spec,
        companion: CfSpec::rcf_prefix(1, quotients),
        m,
        blocks_in_spec,
    })
}

/// Source of the irrational `alpha > 0` for [`construct_adams_davison`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSource {
    /// `[c_0, c_1, c_2, ...]`, the regular expansion of `1/alpha`.
    AlphaInverse(Vec<BigInt>),
    /// `alpha = [c_1; c_2, ..., c_H, c_1, ...]`, so `1/alpha = [0; c_1, c_2, ...]`.
    Period(Vec<BigInt>),
}

impl AlphaSource {
    fn quotient(&self, n: usize) -> Option<BigInt> {
        match self {
            AlphaSource::AlphaInverse(c) => c.get(n).cloned(),
            AlphaSource::Period(p) => Some(if n == 0 {
                BigInt::zero()
            } else {
                p[(n - 1) % p.len()].clone()
            }),
        }
    }

    fn check(&self) -> Result<()> {
        let (first, rest) = match self {
            AlphaSource::AlphaInverse(c) => match c.split_first() {
                Some((c0, rest)) => (c0.clone(), rest),
                None => return Err(CfError::BadParams("alpha_inverse must be non-empty".into())),
            },
            AlphaSource::Period(p) if p.is_empty() => {
                return Err(CfError::BadPeriod("period must be non-empty".into()))
            }
            AlphaSource::Period(p) => (BigInt::zero(), p.as_slice()),
        };
        if first.is_negative() {
            return Err(CfError::BadParams("alpha must be positive".into()));
        }
        if rest.iter().any(|c| !c.is_positive()) {
            return Err(CfError::BadParams("regular quotients must be >= 1".into()));
        }
        Ok(())
    }
}

/// Output of [`construct_adams_davison`].
#[derive(Clone, Debug)]
pub struct AdamsDavison {
    pub b: BigInt,
    /// Normalized semi-regular expansion.
    pub spec: CfSpec,
    /// `b_0 = c_0 b`.
    pub raw_head: BigInt,
    /// `b_n = (b^{q_n} - b^{q_{n-2}}) / (b^{q_{n-1}} - 1)` for `1 <= n <= n_max`, numerators all `+1`.
    pub raw_terms: Vec<BigInt>,
    /// Raw terms after moving signs into the numerators, before contraction.
    pub signed_terms: Vec<PartialQuotient>,
    /// Denominators `q_{-1}, q_0, ..., q_{n_max}` of `1/alpha`.
    pub q: Vec<u64>,
    /// Whether any sign flip or contraction was needed.
    pub normalized: bool,
}

/// Expansion of `S_b(alpha) = (b-1) sum_{k>=1} b^{-floor(k alpha)}` to `n_max` raw terms.
pub fn construct_adams_davison(alpha: &AlphaSource, b: &BigInt, n_max: usize) -> Result<AdamsDavison> {
    if b.abs() < BigInt::from(2) {
        return Err(CfError::BadParams("|b| must be at least 2".into()));
    }
    if n_max == 0 {
        return Err(CfError::BadParams("n_max must be at least 1".into()));
    }
    alpha.check()?;
    let c0 = alpha.quotient(0).expect("checked non-empty");
    let mut q: Vec<u64> = vec![0, 1];
    for n in 1..=n_max {
        let c = alpha.quotient(n).ok_or_else(|| {
            CfError::BadParams(format!("alpha_inverse needs {} quotients after c_0", n_max))
        })?;
        let next = c
            .to_u64()
            .and_then(|c| c.checked_mul(q[n]))
            .and_then(|v| v.checked_add(q[n - 1]))
            .filter(|&v| v <= u32::MAX as u64)
            .ok_or_else(|| CfError::BadParams(format!("q_{n} too large for exact powers")))?;
        q.push(next);
    }
    // q[i] holds q_{i-1}
    let pow = |e: u64| b.pow(e as u32);
    let mut raw_terms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let num = pow(q[n + 1]) - pow(q[n - 1]);
        let den = pow(q[n]) - 1;
        let (quot, rem) = num.div_rem(&den);
        if !rem.is_zero() || quot.is_zero() {
            return Err(CfError::DivisibilityBreach(n));
        }
        raw_terms.push(quot);
    }
    let raw_head = &c0 * b;

    let mut signed: Vec<(Sign, BigInt)> = raw_terms.iter().map(|t| (Sign::Plus, t.clone())).collect();
    let mut normalized = false;
    for i in 0..signed.len() {
        if signed[i].1.is_negative() {
            normalized = true;
            signed[i].1 = -signed[i].1.clone();
            signed[i].0 = signed[i].0.flip();
            if let Some(next) = signed.get_mut(i + 1) {
                next.0 = next.0.flip();
            }
        }
    }
    let signed_terms: Vec<PartialQuotient> = signed
        .iter()
        .map(|(a, b)| PartialQuotient::new(*a, b.clone()))
        .collect();
    let (head, mut terms, contracted) = normalize(raw_head.clone(), signed);
    normalized |= contracted;
    if normalized && !terms.is_empty() {
        // later raw terms could still rewrite the last normalized quotient
        terms.pop();
    }
    let params = json!({
        "b": b.to_string(),
        "n_max": n_max,
        "alpha": match alpha {
            AlphaSource::AlphaInverse(c) => json!({ "alpha_inverse": c.iter().map(|v| v.to_string()).collect::<Vec<_>>() }),
            AlphaSource::Period(p) => json!({ "period": p.iter().map(|v| v.to_string()).collect::<Vec<_>>() }),
        },
    });
    Ok(AdamsDavison {
        b: b.clone(),
        spec: CfSpec::prefix(head, terms).with_provenance(provenance("adams_davison", params)),
        raw_head,
        raw_terms,
        signed_terms,
        q,
        normalized,
    })
}

/// Rewrites signed terms into admissible form without changing the value.
///
/// Negative quotients are flipped together with the two adjacent numerators.
/// A zero quotient is absorbed into its predecessor:
/// `x + a/(0 + a'/T) = x + a a' T`. A pair with `b_n + a_{n+1} < 1` has
/// `b_n = 1, a_{n+1} = -1` and contracts by
/// `a/(1 - 1/(b + r)) = a + a/(b - 1 + r)`.
fn normalize(mut head: BigInt, input: Vec<(Sign, BigInt)>) -> (BigInt, Vec<PartialQuotient>, bool) {
    let mut queue: VecDeque<(Sign, BigInt)> = input.into();
    let mut out: Vec<PartialQuotient> = Vec::new();
    let mut rewritten = false;

    // adds `delta` to the latest quotient and requeues it for checking
    fn bump(head: &mut BigInt, out: &mut Vec<PartialQuotient>, queue: &mut VecDeque<(Sign, BigInt)>, delta: BigInt) {
        match out.pop() {
            Some(prev) => queue.push_front((prev.a, prev.b + delta)),
            None => *head += delta,
        }
    }

    while let Some((mut a, mut b)) = queue.pop_front() {
        if b.is_negative() {
            rewritten = true;
            b = -b;
            a = a.flip();
            if let Some(next) = queue.front_mut() {
                next.0 = next.0.flip();
            }
        }
        if b.is_zero() {
            rewritten = true;
            let Some((a2, b2)) = queue.pop_front() else {
                break;
            };
            let s = a * a2;
            if let Some(next) = queue.front_mut() {
                next.0 = next.0 * s;
            }
            bump(&mut head, &mut out, &mut queue, s.to_bigint() * b2);
            continue;
        }
        if let Some(prev) = out.pop_if(|p| p.pair_sum(a) < BigInt::one()) {
            rewritten = true;
            queue.push_front((prev.a, b - 1));
            bump(&mut head, &mut out, &mut queue, prev.a.to_bigint());
            continue;
        }
        out.push(PartialQuotient::new(a, b));
    }
    (head, out, rewritten)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{inspect, CfClass};
    use crate::convergents::{enclose, evaluate_backward};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_power_floors() {
        let f = |q: i64, n, d| floor_rational_power(&BigInt::from(q), &r(n, d)).unwrap();
        assert_eq!(f(7, 0, 1), BigInt::from(1));
        assert_eq!(f(7, 1, 1), BigInt::from(7));
        assert_eq!(f(10, 1, 2), BigInt::from(3));
        assert_eq!(f(16, 3, 4), BigInt::from(8));
        assert_eq!(f(17, 3, 4), BigInt::from(8));
    }

    #[test]
    fn ncf_s2_is_all_threes() {
        let c = construct_ncf_exponent(&r(2, 1), 5).unwrap();
        let marks: Vec<u32> = c.marks.iter().map(|m| m.to_u32().unwrap()).collect();
        assert_eq!(marks, vec![1, 2, 3, 4, 5]);
        for n in 1..=5 {
            assert_eq!(c.spec.term(n).unwrap(), PartialQuotient::minus(3));
        }
    }

    #[test]
    fn ncf_s3_gaps_equal_q() {
        let c = construct_ncf_exponent(&r(3, 1), 5).unwrap();
        let expect: Vec<BigInt> = [1, 1, 2, 1, 7, 1, 61, 1, 3836, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(c.c, expect);
        let marks: Vec<u32> = c.marks.iter().map(|m| m.to_u32().unwrap()).collect();
        assert_eq!(marks, vec![1, 3, 10, 71, 3907]);
        let rep = inspect(&c.spec, 3907).unwrap();
        assert!(rep.has(CfClass::Ncf));
    }

    #[test]
    fn ncf_targets() {
        assert!(matches!(construct_ncf_exponent(&r(3, 2), 3), Err(CfError::BadTarget(_))));
        let w = construct_ncf_exponent(&r(1, 1), 3).unwrap();
        assert_eq!(w.spec.term(2).unwrap(), PartialQuotient::minus(2));
        assert!(w.companion.is_none());
    }

    #[test]
    fn lcf_s3_quotients() {
        let c = construct_lcf_exponent(&r(3, 1), 4).unwrap();
        // Q_1 = 1 -> 2 (clamped), Q_2 = 3, Q_3 = 10, Q_4 = 103
        let m: Vec<i64> = c.m.iter().map(|v| v.to_i64().unwrap()).collect();
        assert_eq!(m, vec![0, 1, 8, 101]);
        assert_eq!(c.blocks_in_spec, 4);
        let rep = inspect(&c.spec, c.spec.available().unwrap()).unwrap();
        assert!(rep.has(CfClass::Lcf));
        assert!(matches!(construct_lcf_exponent(&r(2, 1), 3), Err(CfError::BadTarget(_))));
    }

    #[test]
    fn adams_davison_golden() {
        let ad = construct_adams_davison(&AlphaSource::Period(vec![BigInt::one()]), &BigInt::from(2), 8).unwrap();
        let b: Vec<i64> = ad.raw_terms.iter().map(|v| v.to_i64().unwrap()).collect();
        assert_eq!(b, vec![1, 2, 2, 4, 8, 32, 256, 8192]);
        assert!(!ad.normalized);
        assert_eq!(ad.spec.available(), Some(8));
    }

    #[test]
    fn adams_davison_negative_base() {
        let ad = construct_adams_davison(&AlphaSource::Period(vec![BigInt::one()]), &BigInt::from(-2), 12).unwrap();
        assert!(ad.normalized);
        // numerators (-1)^{F_n} at n >= 2
        let fib = [0i64, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for n in 2..=12 {
            let t = &ad.signed_terms[n - 1];
            let expect = if fib[n] % 2 == 0 { Sign::Plus } else { Sign::Minus };
            assert_eq!(t.a, expect, "n = {n}");
            assert_eq!(t.b, BigInt::from(2).pow(fib[n - 1] as u32));
        }
        let len = ad.spec.available().unwrap();
        let rep = inspect(&ad.spec, len).unwrap();
        assert!(rep.is_valid(), "{rep:?}");
        // same value as the raw expansion
        let raw: Vec<PartialQuotient> = ad.raw_terms.iter().map(|b| PartialQuotient::plus(b.clone())).collect();
        let raw_value = evaluate_backward(&ad.raw_head, &raw).unwrap();
        let enc = enclose(&ad.spec, len - 2).unwrap();
        let slack = r(1, 1_000_000);
        assert!(enc.lo.clone() - &slack <= raw_value && raw_value <= enc.hi.clone() + &slack);
    }

    #[test]
    fn normalize_zero_and_pairs() {
        // 1 + 1/(0 + 1/(2 + 1/3)) = 1 + 2 + 1/3
        let (h, t, changed) = normalize(
            BigInt::one(),
            vec![(Sign::Plus, BigInt::zero()), (Sign::Plus, BigInt::from(2)), (Sign::Plus, BigInt::from(3))],
        );
        assert!(changed);
        assert_eq!(h, BigInt::from(3));
        assert_eq!(t, vec![PartialQuotient::plus(3)]);
        // 0 + 1/(1 - 1/(3 + 1/2)) = 1 + 1/(2 + 1/2)
        let (h, t, _) = normalize(
            BigInt::zero(),
            vec![(Sign::Plus, BigInt::one()), (Sign::Minus, BigInt::from(3)), (Sign::Plus, BigInt::from(2))],
        );
        assert_eq!(h, BigInt::one());
        assert_eq!(t, vec![PartialQuotient::plus(2), PartialQuotient::plus(2)]);
    }

    #[test]
    fn adams_davison_params() {
        let one = AlphaSource::Period(vec![BigInt::one()]);
        assert!(matches!(construct_adams_davison(&one, &BigInt::one(), 5), Err(CfError::BadParams(_))));
        let short = AlphaSource::AlphaInverse(vec![BigInt::zero(), BigInt::one()]);
        assert!(matches!(construct_adams_davison(&short, &BigInt::from(2), 5), Err(CfError::BadParams(_))));
    }
}

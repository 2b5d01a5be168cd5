//! Generator rules for the named families and the family registry.

use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde_json::{Map, Value};

use crate::cf::{CfSpec, PartialQuotient, Provenance, Run, Sign};
use crate::constructors;
use crate::error::{CfError, Result};
use crate::fixed::pow2_floor;
use crate::transforms::Relation;

/// Sign pattern for families whose numerators are free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignPattern {
    Plus,
    Minus,
    Alternate,
}

impl SignPattern {
    pub fn parse(s: &str) -> Result<SignPattern> {
        match s {
            "plus" => Ok(SignPattern::Plus),
            "minus" => Ok(SignPattern::Minus),
            "alternate" => Ok(SignPattern::Alternate),
            other => Err(CfError::BadParams(format!(
                "signs must be plus, minus or alternate, got `{other}`"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignPattern::Plus => "plus",
            SignPattern::Minus => "minus",
            SignPattern::Alternate => "alternate",
        }
    }

    fn sign(self, n: usize) -> Sign {
        match self {
            SignPattern::Plus => Sign::Plus,
            SignPattern::Minus => Sign::Minus,
            SignPattern::Alternate if n % 2 == 1 => Sign::Plus,
            SignPattern::Alternate => Sign::Minus,
        }
    }
}

/// Run-length layout of a Lehner continued fraction with a closed last block.
///
/// Terms are `(+1,1)^l0`, then for each block `k`: `(+1,2)`, `(-1,2)^m_k`,
/// `(-1,1)`, `(+1,1)^l_k`. With [`Relation::TwoMinus`] the first numerator
/// is flipped to `-1` and the head is 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LehnerLayout {
    pub relation: Relation,
    pub l: Vec<usize>,
    pub m: Vec<usize>,
    starts: Vec<usize>,
    len: usize,
}

impl LehnerLayout {
    /// `l` holds `l_0..=l_K` (a missing trailing `l_K` counts as 0, an empty `l` means all zero); `m`
    /// holds `m_1..=m_K`.
    pub fn new(relation: Relation, mut l: Vec<usize>, m: Vec<usize>) -> Result<Self> {
        if relation == Relation::Identity {
            return Err(CfError::BadParams(
                "lehner relation must be one_plus or two_minus".into(),
            ));
        }
        if l.is_empty() {
            l = vec![0; m.len() + 1];
        }
        if l.len() == m.len() {
            l.push(0);
        }
        if l.len() != m.len() + 1 {
            return Err(CfError::BadParams(format!(
                "expected {} or {} run lengths l, got {}",
                m.len(),
                m.len() + 1,
                l.len()
            )));
        }
        let mut starts = Vec::with_capacity(m.len());
        let mut pos = l[0] + 1;
        for (k, &mk) in m.iter().enumerate() {
            starts.push(pos);
            pos = pos
                .checked_add(mk + 2 + l[k + 1])
                .ok_or_else(|| CfError::BadParams("lehner layout too long".into()))?;
        }
        Ok(LehnerLayout {
            relation,
            l,
            m,
            starts,
            len: pos - 1,
        })
    }

    pub fn head(&self) -> BigInt {
        match self.relation {
            Relation::TwoMinus => BigInt::from(2),
            _ => BigInt::one(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of the closing `(-1,1)` of block `k >= 1`.
    pub fn block_end(&self, k: usize) -> usize {
        self.starts[k - 1] + self.m[k - 1] + 1
    }

    fn raw_term(&self, n: usize) -> PartialQuotient {
        if n <= self.l[0] {
            return PartialQuotient::plus(1);
        }
        let k = self.starts.partition_point(|&s| s <= n);
        let offset = n - self.starts[k - 1];
        let mk = self.m[k - 1];
        if offset == 0 {
            PartialQuotient::plus(2)
        } else if offset <= mk {
            PartialQuotient::minus(2)
        } else if offset == mk + 1 {
            PartialQuotient::minus(1)
        } else {
            PartialQuotient::plus(1)
        }
    }

    fn term(&self, n: usize) -> PartialQuotient {
        let mut t = self.raw_term(n);
        if n == 1 && self.relation == Relation::TwoMinus {
            t.a = t.a.flip();
        }
        t
    }

    fn runs(&self, from: usize, to: usize) -> Vec<Run> {
        let mut raw: Vec<(usize, usize, PartialQuotient)> = Vec::new();
        let mut push = |start: usize, len: usize, term: PartialQuotient| {
            if len > 0 {
                raw.push((start, len, term));
            }
        };
        push(1, self.l[0], PartialQuotient::plus(1));
        for (k, &s) in self.starts.iter().enumerate() {
            push(s, 1, PartialQuotient::plus(2));
            push(s + 1, self.m[k], PartialQuotient::minus(2));
            push(s + 1 + self.m[k], 1, PartialQuotient::minus(1));
            push(s + 2 + self.m[k], self.l[k + 1], PartialQuotient::plus(1));
        }
        let mut out: Vec<Run> = Vec::new();
        for (start, len, term) in raw {
            let end = start + len - 1;
            if end < from || start > to {
                continue;
            }
            let lo = start.max(from);
            let hi = end.min(to);
            let mut pieces = vec![(lo, hi, term.clone())];
            if self.relation == Relation::TwoMinus && lo == 1 {
                let mut first = term.clone();
                first.a = first.a.flip();
                pieces = vec![(1, 1, first)];
                if hi > 1 {
                    pieces.push((2, hi, term));
                }
            }
            for (lo, hi, term) in pieces {
                match out.last_mut() {
                    Some(run) if run.term == term && run.end() + 1 == lo => run.len += hi - lo + 1,
                    _ => out.push(Run {
                        start: lo,
                        len: hi - lo + 1,
                        term,
                    }),
                }
            }
        }
        out
    }
}

/// A deterministic term rule. Pure: every index always yields the same term.
#[derive(Debug)]
pub(crate) enum Rule {
    /// `prefix` followed by `period` repeated forever.
    EventuallyPeriodic {
        prefix: Vec<PartialQuotient>,
        period: Vec<PartialQuotient>,
    },
    /// `(+1, n + 1)`.
    Bessel,
    /// `e^{1/b}` for `b >= 2`: `(+1, n b)` at odd `n`, `(-1, 2)` at even `n`.
    ERecip { b: BigInt },
    /// `e` rewritten with head 2: `(+1,1)`, then `(+1, n+1)` at even `n`, `(-1,2)` at odd `n`.
    ERecipOne,
    /// `b_{3k} = floor(2^{sigma^k})`, other quotients 2.
    Example4 {
        sigma: BigRational,
        signs: SignPattern,
        memo: Mutex<Vec<BigInt>>,
    },
    /// Negative continued fraction with `b = 3` at `marks` and 2 elsewhere.
    GapNcf { marks: Vec<BigUint>, len: usize },
    Lehner(LehnerLayout),
}

impl Rule {
    pub(crate) fn available(&self) -> Option<usize> {
        match self {
            Rule::GapNcf { len, .. } => Some(*len),
            Rule::Lehner(layout) => Some(layout.len()),
            _ => None,
        }
    }

    pub(crate) fn term(&self, n: usize) -> PartialQuotient {
        match self {
            Rule::EventuallyPeriodic { prefix, period } => {
                if n <= prefix.len() {
                    prefix[n - 1].clone()
                } else {
                    period[(n - prefix.len() - 1) % period.len()].clone()
                }
            }
            Rule::Bessel => PartialQuotient::plus(n + 1),
            Rule::ERecip { b } => {
                if n % 2 == 1 {
                    PartialQuotient::plus(b * BigInt::from(n))
                } else {
                    PartialQuotient::minus(2)
                }
            }
            Rule::ERecipOne => {
                if n == 1 {
                    PartialQuotient::plus(1)
                } else if n.is_multiple_of(2) {
                    PartialQuotient::plus(n + 1)
                } else {
                    PartialQuotient::minus(2)
                }
            }
            Rule::Example4 { sigma, signs, memo } => {
                let a = signs.sign(n);
                if !n.is_multiple_of(3) {
                    return PartialQuotient::new(a, 2);
                }
                let k = n / 3;
                let mut memo = memo.lock().expect("memo lock");
                while memo.len() < k {
                    let j = memo.len() as u32 + 1;
                    memo.push(pow2_floor(&Pow::pow(sigma, j)));
                }
                PartialQuotient::new(a, memo[k - 1].clone())
            }
            Rule::GapNcf { marks, .. } => {
                let key = BigUint::from(n);
                if marks.binary_search(&key).is_ok() {
                    PartialQuotient::minus(3)
                } else {
                    PartialQuotient::minus(2)
                }
            }
            Rule::Lehner(layout) => layout.term(n),
        }
    }

    /// Fast run-length encoding, when the rule has one.
    pub(crate) fn runs(&self, from: usize, to: usize) -> Option<Vec<Run>> {
        match self {
            Rule::EventuallyPeriodic { prefix, period } if period.len() == 1 => {
                let mut out: Vec<Run> = Vec::new();
                for n in from..=to.min(prefix.len()) {
                    let term = prefix[n - 1].clone();
                    match out.last_mut() {
                        Some(run) if run.term == term => run.len += 1,
                        _ => out.push(Run { start: n, len: 1, term }),
                    }
                }
                let tail_start = from.max(prefix.len() + 1);
                if tail_start <= to {
                    let term = period[0].clone();
                    let len = to - tail_start + 1;
                    match out.last_mut() {
                        Some(run) if run.term == term => run.len += len,
                        _ => out.push(Run {
                            start: tail_start,
                            len,
                            term,
                        }),
                    }
                }
                Some(out)
            }
            Rule::GapNcf { marks, .. } => {
                let mut out = Vec::new();
                let mut n = from;
                let from_key = BigUint::from(from);
                let first = marks.partition_point(|m| *m < from_key);
                for mark in &marks[first..] {
                    let Some(mark) = mark.to_usize() else { break };
                    if mark > to {
                        break;
                    }
                    if mark > n {
                        out.push(Run {
                            start: n,
                            len: mark - n,
                            term: PartialQuotient::minus(2),
                        });
                    }
                    match out.last_mut() {
                        Some(run) if run.term.b == BigInt::from(3) && run.end() + 1 == mark => run.len += 1,
                        _ => out.push(Run {
                            start: mark,
                            len: 1,
                            term: PartialQuotient::minus(3),
                        }),
                    }
                    n = mark + 1;
                }
                if n <= to {
                    out.push(Run {
                        start: n,
                        len: to - n + 1,
                        term: PartialQuotient::minus(2),
                    });
                }
                Some(out)
            }
            Rule::Lehner(layout) => Some(layout.runs(from, to)),
            _ => None,
        }
    }
}

/// Builds an eventually periodic spec.
pub fn periodic(
    head: impl Into<BigInt>,
    prefix: Vec<PartialQuotient>,
    period: Vec<PartialQuotient>,
) -> Result<CfSpec> {
    if period.is_empty() {
        return Err(CfError::BadParams("period must be non-empty".into()));
    }
    Ok(CfSpec::from_rule(
        head.into(),
        Rule::EventuallyPeriodic { prefix, period },
    ))
}

pub fn constant_ncf(b: impl Into<BigInt>, head: impl Into<BigInt>) -> Result<CfSpec> {
    let b = b.into();
    if b < BigInt::from(2) {
        return Err(CfError::BadParams("constant_ncf needs b >= 2".into()));
    }
    periodic(head, vec![], vec![PartialQuotient::minus(b)])
}

pub fn constant_rcf(b: impl Into<BigInt>, head: impl Into<BigInt>) -> Result<CfSpec> {
    let b = b.into();
    if b < BigInt::one() {
        return Err(CfError::BadParams("constant_rcf needs b >= 1".into()));
    }
    periodic(head, vec![], vec![PartialQuotient::plus(b)])
}

/// `I_0(2)/I_1(2) = 1 + 1/(2 + 1/(3 + ...))`.
pub fn bessel_ratio() -> CfSpec {
    CfSpec::from_rule(BigInt::one(), Rule::Bessel)
}

/// `e^{1/b}` for `b >= 1`.
///
/// For `b = 1` the plain display `1 + 1/(1 - 1/(2 + ...))` has `b_1 + a_2 = 0`,
/// so the first two levels are fused into the head: `e = 2 + 1/(1 + 1/(3 - 1/(2 + ...)))`.
pub fn e_recip(b: impl Into<BigInt>) -> Result<CfSpec> {
    let b = b.into();
    if b < BigInt::one() {
        return Err(CfError::BadParams("e_recip needs b >= 1".into()));
    }
    if b.is_one() {
        Ok(CfSpec::from_rule(BigInt::from(2), Rule::ERecipOne))
    } else {
        Ok(CfSpec::from_rule(BigInt::one(), Rule::ERecip { b }))
    }
}

/// `omega = 1/(2 - 1/(2 - ...)) = 1`, the rational value of an all-`(-1,2)` tail.
pub fn omega() -> CfSpec {
    periodic(
        0,
        vec![PartialQuotient::plus(2)],
        vec![PartialQuotient::minus(2)],
    )
    .expect("non-empty period")
}

/// Lehner expansion of `1 + sqrt(2)/2`: head 1, then `(+1,2), (-1,1)` repeating.
pub fn lehner_sqrt2_half() -> CfSpec {
    periodic(
        1,
        vec![],
        vec![PartialQuotient::plus(2), PartialQuotient::minus(1)],
    )
    .expect("non-empty period")
}

/// `b_{3k-2} = b_{3k-1} = 2`, `b_{3k} = floor(2^{sigma^k})` for rational `sigma > 1`.
pub fn example4(sigma: BigRational, signs: SignPattern) -> Result<CfSpec> {
    if sigma <= BigRational::one() {
        return Err(CfError::BadParams("example4 needs sigma > 1".into()));
    }
    Ok(CfSpec::from_rule(
        BigInt::zero(),
        Rule::Example4 {
            sigma,
            signs,
            memo: Mutex::new(Vec::new()),
        },
    ))
}

/// Negative continued fraction `[head; 2,..,2,3,2,..]^-` with 3 exactly at `marks`.
pub fn gap_ncf(head: impl Into<BigInt>, mut marks: Vec<BigUint>) -> Result<CfSpec> {
    marks.sort();
    marks.dedup();
    if marks.first().is_some_and(|m| m.is_zero()) {
        return Err(CfError::BadParams("marks must be >= 1".into()));
    }
    let len = match marks.last() {
        Some(last) => last.to_usize().unwrap_or(usize::MAX),
        None => return Err(CfError::BadParams("gap_ncf needs at least one mark".into())),
    };
    Ok(CfSpec::from_rule(head.into(), Rule::GapNcf { marks, len }))
}

/// Lehner continued fraction from its run lengths.
pub fn lehner_blocks(layout: LehnerLayout) -> CfSpec {
    CfSpec::from_rule(layout.head(), Rule::Lehner(layout))
}

/// Names accepted by [`family_generator`].
pub const FAMILIES: &[&str] = &[
    "constant_ncf",
    "constant_rcf",
    "periodic",
    "bessel_ratio",
    "e_recip",
    "omega",
    "lehner_sqrt2_half",
    "example4",
    "ncf_exponent",
    "lcf_exponent",
    "adams_davison",
    "lehner_blocks",
    "gap_ncf",
];

/// Builds a named family from JSON parameters.
///
/// Integers may be given as JSON numbers or decimal strings; rationals as
/// `"p/q"` strings or integers.
pub fn family_generator(name: &str, params: &Map<String, Value>) -> Result<CfSpec> {
    let p = Params(params);
    let spec = match name {
        "constant_ncf" => constant_ncf(p.int("b")?, p.int_or("head", 0)?)?,
        "constant_rcf" => constant_rcf(p.int("b")?, p.int_or("head", 0)?)?,
        "periodic" => periodic(
            p.int_or("head", 0)?,
            p.terms_or_empty("prefix")?,
            p.terms("period")?,
        )?,
        "bessel_ratio" => bessel_ratio(),
        "e_recip" => e_recip(p.int_or("b", 1)?)?,
        "omega" => omega(),
        "lehner_sqrt2_half" => lehner_sqrt2_half(),
        "example4" => example4(
            p.rational_or("sigma", "3/2")?,
            SignPattern::parse(&p.string_or("signs", "plus")?)?,
        )?,
        "ncf_exponent" => {
            constructors::construct_ncf_exponent(&p.rational("s")?, p.usize_or("k_max", 10)?)?.spec
        }
        "lcf_exponent" => {
            constructors::construct_lcf_exponent(&p.rational("s")?, p.usize_or("k_max", 10)?)?.spec
        }
        "adams_davison" => {
            let b = p.int_or("b", 2)?;
            let n_max = p.usize_or("n_max", 25)?;
            let alpha = if p.0.contains_key("alpha_inverse") {
                constructors::AlphaSource::AlphaInverse(p.int_list("alpha_inverse")?)
            } else {
                constructors::AlphaSource::Period(p.int_list_or("alpha_period", &[1])?)
            };
            constructors::construct_adams_davison(&alpha, &b, n_max)?.spec
        }
        "lehner_blocks" => {
            let relation = match p.string_or("relation", "one_plus")?.as_str() {
                "one_plus" => Relation::OnePlus,
                "two_minus" => Relation::TwoMinus,
                other => {
                    return Err(CfError::BadParams(format!(
                        "relation must be one_plus or two_minus, got `{other}`"
                    )))
                }
            };
            lehner_blocks(LehnerLayout::new(
                relation,
                p.usize_list_or("l", &[])?,
                p.usize_list("m")?,
            )?)
        }
        "gap_ncf" => {
            let marks = p
                .int_list("marks")?
                .into_iter()
                .map(|m| {
                    m.to_biguint()
                        .ok_or_else(|| CfError::BadParams("marks must be positive".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            gap_ncf(p.int_or("head", 0)?, marks)?
        }
        other => return Err(CfError::UnknownFamily(other.to_string())),
    };
    Ok(spec.with_provenance(Provenance {
        family: name.to_string(),
        params: params.clone(),
    }))
}

struct Params<'a>(&'a Map<String, Value>);

fn value_to_int(key: &str, v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| CfError::BadParams(format!("`{key}` must be an integer"))),
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| CfError::BadParams(format!("`{key}` must be an integer, got `{s}`"))),
        _ => Err(CfError::BadParams(format!("`{key}` must be an integer"))),
    }
}

/// Parses `"p/q"`, `"p"` or a decimal like `"2.5"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = i.trim_start().starts_with('-');
        let int: BigInt = if i.is_empty() || i == "-" {
            BigInt::zero()
        } else {
            i.parse().ok()?
        };
        let frac: BigInt = f.parse().ok()?;
        let scale = BigInt::from(10).pow(f.len() as u32);
        let frac = BigRational::new(frac, scale);
        let int = BigRational::from_integer(int);
        return Some(if negative { int - frac } else { int + frac });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

impl Params<'_> {
    fn get(&self, key: &str) -> Result<&Value> {
        self.0
            .get(key)
            .ok_or_else(|| CfError::BadParams(format!("missing parameter `{key}`")))
    }

    fn int(&self, key: &str) -> Result<BigInt> {
        value_to_int(key, self.get(key)?)
    }

    fn int_or(&self, key: &str, default: i64) -> Result<BigInt> {
        match self.0.get(key) {
            Some(v) => value_to_int(key, v),
            None => Ok(BigInt::from(default)),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            Some(v) => value_to_int(key, v)?
                .to_usize()
                .ok_or_else(|| CfError::BadParams(format!("`{key}` must be a non-negative index"))),
            None => Ok(default),
        }
    }

    fn rational(&self, key: &str) -> Result<BigRational> {
        match self.get(key)? {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigRational::from_integer(BigInt::from(i)))
                } else {
                    parse_rational(&n.to_string())
                        .ok_or_else(|| CfError::BadParams(format!("`{key}` must be rational")))
                }
            }
            Value::String(s) => parse_rational(s)
                .ok_or_else(|| CfError::BadParams(format!("`{key}` must be rational, got `{s}`"))),
            _ => Err(CfError::BadParams(format!("`{key}` must be rational"))),
        }
    }

    fn rational_or(&self, key: &str, default: &str) -> Result<BigRational> {
        if self.0.contains_key(key) {
            self.rational(key)
        } else {
            Ok(parse_rational(default).expect("valid default"))
        }
    }

    fn string_or(&self, key: &str, default: &str) -> Result<String> {
        match self.0.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(CfError::BadParams(format!("`{key}` must be a string"))),
            None => Ok(default.to_string()),
        }
    }

    fn int_list(&self, key: &str) -> Result<Vec<BigInt>> {
        match self.get(key)? {
            Value::Array(items) => items.iter().map(|v| value_to_int(key, v)).collect(),
            Value::String(s) => s
                .split(',')
                .map(|t| value_to_int(key, &Value::String(t.to_string())))
                .collect(),
            _ => Err(CfError::BadParams(format!("`{key}` must be a list of integers"))),
        }
    }

    fn int_list_or(&self, key: &str, default: &[i64]) -> Result<Vec<BigInt>> {
        if self.0.contains_key(key) {
            self.int_list(key)
        } else {
            Ok(default.iter().map(|&v| BigInt::from(v)).collect())
        }
    }

    fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        self.int_list(key)?
            .into_iter()
            .map(|v| {
                v.to_usize()
                    .ok_or_else(|| CfError::BadParams(format!("`{key}` entries must be >= 0")))
            })
            .collect()
    }

    fn usize_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        if self.0.contains_key(key) {
            self.usize_list(key)
        } else {
            Ok(default.to_vec())
        }
    }

    fn terms(&self, key: &str) -> Result<Vec<PartialQuotient>> {
        crate::interchange::parse_terms(self.get(key)?)
    }

    fn terms_or_empty(&self, key: &str) -> Result<Vec<PartialQuotient>> {
        match self.0.get(key) {
            Some(v) => crate::interchange::parse_terms(v),
            None => Ok(Vec::new()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn obj(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn registry_knows_every_family() {
        let params = obj(json!({
            "b": 3, "s": "3", "k_max": 3, "period": [[1, "2"]], "m": [1, 2], "marks": [1, 3]
        }));
        for name in FAMILIES {
            let spec = family_generator(name, &params).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(spec.term(1).is_some(), "{name}");
            assert_eq!(spec.provenance().unwrap().family, *name);
        }
        assert_eq!(
            family_generator("nope", &Map::new()).unwrap_err(),
            CfError::UnknownFamily("nope".into())
        );
    }

    #[test]
    fn bessel_terms() {
        let spec = bessel_ratio();
        assert_eq!(spec.head(), &BigInt::one());
        assert_eq!(spec.term(1).unwrap(), PartialQuotient::plus(2));
        assert_eq!(spec.term(7).unwrap(), PartialQuotient::plus(8));
    }

    #[test]
    fn omega_terms() {
        let spec = omega();
        assert_eq!(spec.head(), &BigInt::zero());
        assert_eq!(spec.term(1).unwrap(), PartialQuotient::plus(2));
        for n in 2..30 {
            assert_eq!(spec.term(n).unwrap(), PartialQuotient::minus(2));
        }
    }

    #[test]
    fn e_recip_terms() {
        let e3 = e_recip(3).unwrap();
        let got: Vec<_> = (1..=5).map(|n| e3.term(n).unwrap()).collect();
        assert_eq!(
            got,
            vec![
                PartialQuotient::plus(3),
                PartialQuotient::minus(2),
                PartialQuotient::plus(9),
                PartialQuotient::minus(2),
                PartialQuotient::plus(15),
            ]
        );
        let e = e_recip(1).unwrap();
        assert_eq!(e.head(), &BigInt::from(2));
        let got: Vec<_> = (1..=5).map(|n| e.term(n).unwrap()).collect();
        assert_eq!(
            got,
            vec![
                PartialQuotient::plus(1),
                PartialQuotient::plus(3),
                PartialQuotient::minus(2),
                PartialQuotient::plus(5),
                PartialQuotient::minus(2),
            ]
        );
        assert!(e_recip(0).is_err());
    }

    #[test]
    fn example4_terms() {
        let spec = example4(parse_rational("3/2").unwrap(), SignPattern::Plus).unwrap();
        assert_eq!(spec.term(1).unwrap().b, BigInt::from(2));
        assert_eq!(spec.term(3).unwrap().b, BigInt::from(2));
        assert_eq!(spec.term(6).unwrap().b, BigInt::from(4));
        assert_eq!(spec.term(9).unwrap().b, BigInt::from(10));
        let alt = example4(parse_rational("3/2").unwrap(), SignPattern::Alternate).unwrap();
        assert_eq!(alt.term(1).unwrap().a, Sign::Plus);
        assert_eq!(alt.term(2).unwrap().a, Sign::Minus);
        assert!(example4(BigRational::one(), SignPattern::Plus).is_err());
    }

    #[test]
    fn lehner_layout_terms_and_runs() {
        let layout = LehnerLayout::new(Relation::OnePlus, vec![2, 1], vec![1, 0]).unwrap();
        let spec = lehner_blocks(layout.clone());
        // 1,1 | 2,-2,-1,1 | 2,-1
        let expected = vec![
            PartialQuotient::plus(1),
            PartialQuotient::plus(1),
            PartialQuotient::plus(2),
            PartialQuotient::minus(2),
            PartialQuotient::minus(1),
            PartialQuotient::plus(1),
            PartialQuotient::plus(2),
            PartialQuotient::minus(1),
        ];
        assert_eq!(spec.available(), Some(8));
        assert_eq!(spec.terms_to(8).unwrap(), expected);
        assert_eq!(layout.block_end(1), 5);
        assert_eq!(layout.block_end(2), 8);
        let explicit = CfSpec::prefix(1, expected);
        for (from, to) in [(1, 8), (2, 5), (4, 4), (3, 7)] {
            assert_eq!(spec.runs(from, to), explicit.runs(from, to), "{from}..{to}");
        }
    }

    #[test]
    fn lehner_two_minus_flips_first_numerator() {
        let layout = LehnerLayout::new(Relation::TwoMinus, vec![0], vec![2]).unwrap();
        let spec = lehner_blocks(layout);
        assert_eq!(spec.head(), &BigInt::from(2));
        assert_eq!(spec.term(1).unwrap(), PartialQuotient::minus(2));
        let explicit = CfSpec::prefix(2, spec.terms_to(4).unwrap());
        assert_eq!(spec.runs(1, 4), explicit.runs(1, 4));
    }

    #[test]
    fn gap_ncf_runs_match_terms() {
        let marks: Vec<BigUint> = [2u32, 3, 7, 12].iter().map(|&m| BigUint::from(m)).collect();
        let spec = gap_ncf(0, marks).unwrap();
        assert_eq!(spec.available(), Some(12));
        let explicit = CfSpec::prefix(0, spec.terms_to(12).unwrap());
        for (from, to) in [(1, 12), (3, 9), (8, 11)] {
            assert_eq!(spec.runs(from, to), explicit.runs(from, to));
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("5/2"), parse_rational("2.5"));
        assert_eq!(
            parse_rational("-1.25").unwrap(),
            BigRational::new(BigInt::from(-5), BigInt::from(4))
        );
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}

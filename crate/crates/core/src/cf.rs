//! The semi-regular continued fraction data model.
//!
//! A [`CfSpec`] is an integer head `b_0` followed by signed partial quotients
//! `(a_n, b_n)`, `n >= 1`, each standing for the level `a_n / (b_n + ...)`.
//! Terms come either from a stored prefix or from a deterministic rule that
//! can be queried at any index.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{CfError, Result, Violation, ViolationRule};
use crate::families::Rule;

/// Sign of a partial numerator. Only `±1` numerators exist in this model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.to_i64())
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// One level `a / (b + ...)` of a continued fraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialQuotient {
    pub a: Sign,
    pub b: BigInt,
}

impl PartialQuotient {
    pub fn new(a: Sign, b: impl Into<BigInt>) -> Self {
        PartialQuotient { a, b: b.into() }
    }

    pub fn plus(b: impl Into<BigInt>) -> Self {
        Self::new(Sign::Plus, b)
    }

    pub fn minus(b: impl Into<BigInt>) -> Self {
        Self::new(Sign::Minus, b)
    }

    /// `b + a'` for the following numerator `a'`.
    pub fn pair_sum(&self, next: Sign) -> BigInt {
        &self.b + next.to_i64()
    }
}

impl fmt::Display for PartialQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}, {})", self.a.to_i64(), self.b)
    }
}

/// A maximal block of identical consecutive terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    pub len: usize,
    pub term: PartialQuotient,
}

impl Run {
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }
}

/// Family name and parameters a spec was generated from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub family: String,
    pub params: serde_json::Map<String, serde_json::Value>,
}

#[derive(Clone, Debug)]
enum Source {
    Explicit {
        terms: Arc<[PartialQuotient]>,
        terminates: bool,
    },
    Rule(Arc<Rule>),
}

/// A semi-regular continued fraction `b_0 + a_1/(b_1 + a_2/(b_2 + ...))`.
///
/// Explicit specs either terminate (the value is the finite fraction) or are
/// a known prefix of an infinite expansion. Rule specs answer any index up to
/// their availability bound.
#[derive(Clone, Debug)]
pub struct CfSpec {
    head: BigInt,
    source: Source,
    provenance: Option<Provenance>,
}

impl CfSpec {
    /// A known prefix of an infinite expansion.
    pub fn prefix(head: impl Into<BigInt>, terms: Vec<PartialQuotient>) -> Self {
        CfSpec {
            head: head.into(),
            source: Source::Explicit {
                terms: terms.into(),
                terminates: false,
            },
            provenance: None,
        }
    }

    /// A terminating continued fraction whose value is the finite fraction.
    pub fn finite(head: impl Into<BigInt>, terms: Vec<PartialQuotient>) -> Self {
        CfSpec {
            head: head.into(),
            source: Source::Explicit {
                terms: terms.into(),
                terminates: true,
            },
            provenance: None,
        }
    }

    /// Regular prefix `[head; c_1, c_2, ...]`.
    pub fn rcf_prefix<I, T>(head: impl Into<BigInt>, quotients: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::prefix(head, quotients.into_iter().map(PartialQuotient::plus).collect())
    }

    /// Negative prefix `[head; b_1, b_2, ...]^-`.
    pub fn ncf_prefix<I, T>(head: impl Into<BigInt>, quotients: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::prefix(head, quotients.into_iter().map(PartialQuotient::minus).collect())
    }

    pub(crate) fn from_rule(head: BigInt, rule: Rule) -> Self {
        CfSpec {
            head,
            source: Source::Rule(Arc::new(rule)),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn head(&self) -> &BigInt {
        &self.head
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub(crate) fn rule(&self) -> Option<&Rule> {
        match &self.source {
            Source::Rule(rule) => Some(rule),
            Source::Explicit { .. } => None,
        }
    }

    /// Stored terms, when the spec is explicit.
    pub fn explicit_terms(&self) -> Option<&[PartialQuotient]> {
        match &self.source {
            Source::Explicit { terms, .. } => Some(terms),
            Source::Rule(_) => None,
        }
    }

    /// Number of queryable terms; `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Explicit { terms, .. } => Some(terms.len()),
            Source::Rule(rule) => rule.available(),
        }
    }

    /// True when the continued fraction ends after its last available term.
    pub fn terminates(&self) -> bool {
        match &self.source {
            Source::Explicit { terminates, .. } => *terminates,
            Source::Rule(_) => false,
        }
    }

    pub fn has_term(&self, n: usize) -> bool {
        n >= 1 && self.available().is_none_or(|len| n <= len)
    }

    /// Term `n >= 1`, or `None` past the available range.
    pub fn term(&self, n: usize) -> Option<PartialQuotient> {
        if !self.has_term(n) {
            return None;
        }
        match &self.source {
            Source::Explicit { terms, .. } => Some(terms[n - 1].clone()),
            Source::Rule(rule) => Some(rule.term(n)),
        }
    }

    pub fn term_or_err(&self, n: usize) -> Result<PartialQuotient> {
        self.term(n).ok_or(CfError::IndexOutOfRange {
            index: n,
            available: self.available().unwrap_or(usize::MAX),
        })
    }

    /// Terms `1..=n` collected into a vector.
    pub fn terms_to(&self, n: usize) -> Result<Vec<PartialQuotient>> {
        (1..=n).map(|i| self.term_or_err(i)).collect()
    }

    /// Run-length encoding of terms `from..=to`, clipped to the available range.
    pub fn runs(&self, from: usize, to: usize) -> Vec<Run> {
        let from = from.max(1);
        let to = match self.available() {
            Some(len) => to.min(len),
            None => to,
        };
        if from > to {
            return Vec::new();
        }
        if let Some(runs) = self.rule().and_then(|rule| rule.runs(from, to)) {
            return runs;
        }
        let mut out: Vec<Run> = Vec::new();
        for n in from..=to {
            let term = self.term(n).expect("index within available range");
            match out.last_mut() {
                Some(run) if run.term == term => run.len += 1,
                _ => out.push(Run { start: n, len: 1, term }),
            }
        }
        out
    }

    /// Same spec, truncated to the first `n` terms, kept as a prefix.
    pub fn truncated(&self, n: usize) -> Result<CfSpec> {
        let terms = self.terms_to(n)?;
        let mut out = if self.terminates() && Some(n) == self.available() {
            CfSpec::finite(self.head.clone(), terms)
        } else {
            CfSpec::prefix(self.head.clone(), terms)
        };
        out.provenance = self.provenance.clone();
        Ok(out)
    }
}

/// Named subfamilies of semi-regular continued fractions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CfClass {
    Rcf,
    Ncf,
    Nicf,
    Scf,
    Lcf,
    General,
}

/// Prefix-only classification and admissibility report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    /// Terms `1..=depth` were inspected.
    pub depth: usize,
    /// Last `n` whose pair `b_n + a_{n+1}` could be checked.
    pub pairs_checked_through: usize,
    pub classes: BTreeSet<CfClass>,
    /// Indices `n` in the prefix with `b_n + a_{n+1} >= 2`.
    pub cond1_witness_count: usize,
    /// Witnesses restricted to the second half of the prefix.
    pub tail_cond1_witness_count: usize,
    /// No witness in the second half of a prefix of at least four pairs.
    pub cond1_suspect: bool,
    /// Length of the final run of `a_n = -1` ending at `depth`.
    pub trailing_negative_run: usize,
    /// Number of `b_n >= 3` inside that run.
    pub trailing_negative_large: usize,
    /// The final negative run spans the second half and holds no `b_n >= 3`.
    pub negative_tail_suspect: bool,
    #[serde(serialize_with = "serialize_violations")]
    pub violations: Vec<Violation>,
}

fn serialize_violations<S: serde::Serializer>(
    v: &[Violation],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for violation in v {
        seq.serialize_element(&(violation.index, violation.to_string()))?;
    }
    seq.end()
}

impl ClassReport {
    pub fn has(&self, class: CfClass) -> bool {
        self.classes.contains(&class)
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scans terms `1..=depth` without failing on violations.
pub fn inspect(spec: &CfSpec, depth: usize) -> Result<ClassReport> {
    if let Some(len) = spec.available() {
        if depth > len {
            return Err(CfError::IndexOutOfRange {
                index: depth,
                available: len,
            });
        }
    }
    let two = BigInt::from(2);
    let three = BigInt::from(3);

    let mut terms = spec.terms_to(depth)?;
    let lookahead = spec.term(depth + 1);
    let pairs_checked_through = if lookahead.is_some() {
        depth
    } else {
        depth.saturating_sub(1)
    };
    if let Some(t) = lookahead {
        terms.push(t);
    }
    let term = |n: usize| &terms[n - 1];

    let mut violations = Vec::new();
    let mut rcf = true;
    let mut ncf = true;
    let mut nicf = true;
    let mut scf = true;
    let mut lcf = depth >= 1 && lehner_pair(spec.head(), term(1).a);
    let mut witnesses = 0;
    let mut tail_witnesses = 0;
    let tail_start = depth.div_ceil(2).max(1);

    for n in 1..=depth {
        let t = term(n);
        rcf &= t.a == Sign::Plus;
        ncf &= t.a == Sign::Minus;
        if t.b < BigInt::one() {
            violations.push(Violation {
                index: n,
                rule: ViolationRule::NonPositiveQuotient,
            });
        }
        scf &= t.b >= two && &t.b + t.a.to_i64() >= two;
        nicf &= t.b >= two;
        if n <= pairs_checked_through {
            let sum = t.pair_sum(term(n + 1).a);
            if sum < BigInt::one() {
                violations.push(Violation {
                    index: n,
                    rule: ViolationRule::PairSumBelowOne,
                });
            }
            if sum >= two {
                witnesses += 1;
                if n >= tail_start {
                    tail_witnesses += 1;
                }
            } else {
                nicf = false;
            }
            lcf &= lehner_pair(&t.b, term(n + 1).a);
        }
    }

    let mut trailing_negative_run = 0;
    let mut trailing_negative_large = 0;
    for n in (1..=depth).rev() {
        let t = term(n);
        if t.a != Sign::Minus {
            break;
        }
        trailing_negative_run += 1;
        if t.b >= three {
            trailing_negative_large += 1;
        }
    }

    let mut classes = BTreeSet::new();
    if depth >= 1 {
        for (flag, class) in [
            (rcf, CfClass::Rcf),
            (ncf, CfClass::Ncf),
            (nicf, CfClass::Nicf),
            (scf, CfClass::Scf),
            (lcf, CfClass::Lcf),
        ] {
            if flag {
                classes.insert(class);
            }
        }
    }
    if violations.is_empty() {
        classes.insert(CfClass::General);
    }
    let tail_pairs = (pairs_checked_through + 1).saturating_sub(tail_start);
    Ok(ClassReport {
        depth,
        pairs_checked_through,
        classes,
        cond1_witness_count: witnesses,
        tail_cond1_witness_count: tail_witnesses,
        cond1_suspect: tail_pairs >= 4 && tail_witnesses == 0,
        trailing_negative_run,
        trailing_negative_large,
        negative_tail_suspect: depth >= 4
            && trailing_negative_run > depth / 2
            && trailing_negative_large == 0,
        violations,
    })
}

fn lehner_pair(b: &BigInt, next: Sign) -> bool {
    match next {
        Sign::Plus => b.is_one(),
        Sign::Minus => *b == BigInt::from(2),
    }
}

/// Checks admissibility of terms `1..=depth` and classifies the prefix.
///
/// Fails with [`CfError::MalformedSpec`] on any violation of `b_n >= 1` or
/// `b_n + a_{n+1} >= 1`.
pub fn validate(spec: &CfSpec, depth: usize) -> Result<ClassReport> {
    let report = inspect(spec, depth)?;
    if report.violations.is_empty() {
        Ok(report)
    } else {
        Err(CfError::MalformedSpec {
            violations: report.violations,
        })
    }
}

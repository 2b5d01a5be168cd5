//! Rewriting between continued-fraction families, with certified alignment.
//!
//! Every transform returns the rewritten expansion together with alignment
//! points: index pairs at which a finite truncation of the source equals a
//! finite truncation of the output, possibly with the last partial quotient
//! replaced. These equalities are exact and are re-checked by
//! [`certify_equivalence`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cf::{CfSpec, PartialQuotient, Sign};
use crate::convergents::{enclose, ConvergentTable, Enclosure};
use crate::error::{CfError, Result, Violation, ViolationRule};

/// How the output value relates to the source value `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `alpha = beta`.
    Identity,
    /// `alpha = 1 + beta`.
    OnePlus,
    /// `alpha = 2 - beta`.
    TwoMinus,
}

impl Relation {
    pub fn apply(self, beta: &BigRational) -> BigRational {
        match self {
            Relation::Identity => beta.clone(),
            Relation::OnePlus => BigRational::one() + beta,
            Relation::TwoMinus => BigRational::from_integer(BigInt::from(2)) - beta,
        }
    }

    pub fn apply_enclosure(self, e: &Enclosure) -> Enclosure {
        let (lo, hi) = match self {
            Relation::TwoMinus => (self.apply(&e.hi), self.apply(&e.lo)),
            _ => (self.apply(&e.lo), self.apply(&e.hi)),
        };
        Enclosure {
            depth: e.depth,
            lo,
            hi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::Identity => "identity",
            Relation::OnePlus => "one_plus",
            Relation::TwoMinus => "two_minus",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "identity" => Some(Relation::Identity),
            "one_plus" => Some(Relation::OnePlus),
            "two_minus" => Some(Relation::TwoMinus),
            _ => None,
        }
    }
}

/// Truncation `source` of the source equals truncation `target` of the output.
///
/// A `*_last` override replaces the partial quotient at that index (the head
/// when the index is 0). An override past the end of an expansion is read
/// with numerator `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentPoint {
    pub source: usize,
    pub target: usize,
    pub source_last: Option<BigInt>,
    pub target_last: Option<BigInt>,
}

impl AlignmentPoint {
    pub fn plain(source: usize, target: usize) -> Self {
        AlignmentPoint {
            source,
            target,
            source_last: None,
            target_last: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransformResult {
    pub output: CfSpec,
    pub alignment: Vec<AlignmentPoint>,
    pub relation: Relation,
    /// Source terms inspected.
    pub source_depth: usize,
    /// Source terms (or pending output digits) not reflected in the output.
    pub withheld: usize,
}

/// Exact value of the truncation at `n`, optionally overriding the last quotient.
pub fn truncated_value(spec: &CfSpec, n: usize, last: Option<&BigInt>) -> Result<BigRational> {
    if n == 0 {
        let head = last.unwrap_or(spec.head()).clone();
        return Ok(BigRational::from_integer(head));
    }
    let mut table = ConvergentTable::new(spec);
    match last {
        None => {
            table.ensure(n)?;
            Ok(BigRational::new(table.p(n).clone(), table.q(n).clone()))
        }
        Some(b) => {
            table.ensure(n - 1)?;
            let a = spec.term(n).map(|t| t.a).unwrap_or(Sign::Plus).to_bigint();
            let (p1, q1) = (table.p(n - 1), table.q(n - 1));
            let (p2, q2) = if n >= 2 {
                (table.p(n - 2).clone(), table.q(n - 2).clone())
            } else {
                (BigInt::one(), BigInt::zero())
            };
            let num = b * p1 + &a * p2;
            let den = b * q1 + &a * q2;
            if den.is_zero() {
                return Err(CfError::InvariantBreach {
                    index: n,
                    detail: "zero denominator in overridden truncation".into(),
                });
            }
            Ok(BigRational::new(num, den))
        }
    }
}

fn require_depth(spec: &CfSpec, depth: usize) -> Result<()> {
    match spec.available() {
        Some(len) if depth > len => Err(CfError::IndexOutOfRange {
            index: depth,
            available: len,
        }),
        _ => Ok(()),
    }
}

/// Negative continued fraction to regular, through the indices `n_k` of the
/// quotients `b_n >= 3`.
///
/// With `c_0 = b_0 - 1`, `c_{2k-1} = n_k - n_{k-1}` and `c_{2k} = b_{n_k} - 2`,
/// the identity `[b_0; b_1, ..., b_{n_k}]^- = [c_0; c_1, ..., c_{2k}, 1]`
/// holds for every `k`.
pub fn ncf_to_rcf(spec: &CfSpec, depth: usize) -> Result<TransformResult> {
    require_depth(spec, depth)?;
    let two = BigInt::from(2);
    let mut marks: Vec<(usize, BigInt)> = Vec::new();
    for run in spec.runs(1, depth) {
        if run.term.a != Sign::Minus || run.term.b < two {
            return Err(CfError::NotNcf(run.start));
        }
        if run.term.b > two {
            for n in run.start..=run.end() {
                marks.push((n, run.term.b.clone()));
            }
        }
    }
    if marks.is_empty() {
        return Err(CfError::NoLargeTerm);
    }
    let c0 = spec.head() - 1;
    let mut terms = Vec::with_capacity(2 * marks.len());
    let mut alignment = vec![AlignmentPoint {
        source: 0,
        target: 0,
        source_last: None,
        target_last: Some(&c0 + 1),
    }];
    let mut prev = 0usize;
    for (k, (n, b)) in marks.iter().enumerate() {
        let c_even = b - &two;
        terms.push(PartialQuotient::plus(*n - prev));
        terms.push(PartialQuotient::plus(c_even.clone()));
        alignment.push(AlignmentPoint {
            source: *n,
            target: 2 * (k + 1),
            source_last: None,
            target_last: Some(c_even + 1),
        });
        prev = *n;
    }
    Ok(TransformResult {
        output: CfSpec::prefix(c0, terms),
        alignment,
        relation: Relation::Identity,
        source_depth: depth,
        withheld: depth - prev,
    })
}

/// Regular continued fraction to negative:
/// `[h; a_1, a_2, ...] = [h + 1; 2^(a_1 - 1), a_2 + 2, 2^(a_3 - 1), a_4 + 2, ...]^-`,
/// where `2^r` stands for `r` copies of 2.
pub fn rcf_to_ncf(spec: &CfSpec, depth: usize) -> Result<TransformResult> {
    require_depth(spec, depth)?;
    let terms = spec.terms_to(depth)?;
    for (i, t) in terms.iter().enumerate() {
        if t.a != Sign::Plus || t.b < BigInt::one() {
            return Err(CfError::NotRcf(i + 1));
        }
    }
    let head: BigInt = spec.head() + 1;
    let mut out = Vec::new();
    let mut alignment = vec![AlignmentPoint {
        source: 0,
        target: 0,
        source_last: Some(head.clone()),
        target_last: None,
    }];
    let mut aligned = 0;
    for (i, t) in terms.iter().enumerate() {
        let n = i + 1;
        if n % 2 == 1 {
            let twos = (&t.b - BigInt::one())
                .to_usize()
                .ok_or_else(|| CfError::BadParams(format!("a_{n} too large to expand")))?;
            out.extend(std::iter::repeat_n(PartialQuotient::minus(2), twos));
        } else {
            out.push(PartialQuotient::minus(&t.b + 2));
            alignment.push(AlignmentPoint {
                source: n,
                target: out.len(),
                source_last: Some(&t.b + 1),
                target_last: None,
            });
            aligned = n;
        }
    }
    Ok(TransformResult {
        output: CfSpec::prefix(head, out),
        alignment,
        relation: Relation::Identity,
        source_depth: depth,
        withheld: depth - aligned,
    })
}

/// Run-length structure of a Lehner continued fraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LehnerRuns {
    /// `l_0, l_1, ...`; the last entry may be cut off by the prefix end.
    pub l: Vec<usize>,
    /// `m_k` of every closed block.
    pub m: Vec<usize>,
    pub head_relation: Relation,
    /// Index of the closing `(-1, 1)` of each closed block.
    pub block_ends: Vec<usize>,
    /// `(-1, 2)` terms seen in a block the prefix leaves open.
    pub open_block: Option<usize>,
    pub depth: usize,
}

impl LehnerRuns {
    pub fn complete_blocks(&self) -> usize {
        self.m.len()
    }
}

fn lehner_pair_ok(b: &BigInt, next: Sign) -> bool {
    match next {
        Sign::Plus => b.is_one(),
        Sign::Minus => *b == BigInt::from(2),
    }
}

/// Splits a Lehner prefix into runs of `(+1,1)` and `(-1,2)` terms.
pub fn lcf_decompose(spec: &CfSpec, depth: usize) -> Result<LehnerRuns> {
    require_depth(spec, depth)?;
    let first = spec.term_or_err(1)?;
    if !lehner_pair_ok(spec.head(), first.a) {
        return Err(CfError::NotLcf(0));
    }
    let head_relation = if spec.head().is_one() {
        Relation::OnePlus
    } else {
        Relation::TwoMinus
    };
    // merge runs by b only; signs follow from the Lehner pairs
    let mut b_runs: Vec<(usize, usize, bool)> = Vec::new(); // (start, len, is_two)
    let mut prev_b: Option<BigInt> = None;
    for run in spec.runs(1, depth) {
        let b = &run.term.b;
        if let Some(pb) = &prev_b {
            if !lehner_pair_ok(pb, run.term.a) {
                return Err(CfError::NotLcf(run.start - 1));
            }
        }
        if !(b.is_one() || *b == BigInt::from(2)) {
            return Err(CfError::NotLcf(run.start));
        }
        if run.len > 1 && !lehner_pair_ok(b, run.term.a) {
            return Err(CfError::NotLcf(run.start));
        }
        let is_two = !b.is_one();
        match b_runs.last_mut() {
            Some(last) if last.2 == is_two => last.1 += run.len,
            _ => b_runs.push((run.start, run.len, is_two)),
        }
        prev_b = Some(b.clone());
    }
    if let (Some(pb), Some(next)) = (&prev_b, spec.term(depth + 1)) {
        if !lehner_pair_ok(pb, next.a) {
            return Err(CfError::NotLcf(depth));
        }
    }

    let mut l = Vec::new();
    let mut m = Vec::new();
    let mut block_ends = Vec::new();
    let mut open_block = None;
    let mut iter = b_runs.into_iter().peekable();
    match iter.peek() {
        Some((_, len, false)) => {
            l.push(*len);
            iter.next();
        }
        _ => l.push(0),
    }
    while let Some((start, len, is_two)) = iter.next() {
        debug_assert!(is_two);
        match iter.next() {
            Some((ones_start, ones, false)) => {
                m.push(len - 1);
                block_ends.push(ones_start);
                l.push(ones - 1);
                debug_assert_eq!(ones_start, start + len);
            }
            _ => {
                open_block = Some(len - 1);
            }
        }
    }
    Ok(LehnerRuns {
        l,
        m,
        head_relation,
        block_ends,
        open_block,
        depth,
    })
}

/// Lehner continued fraction to the regular expansion of `beta`, where
/// `alpha = 1 + beta` or `alpha = 2 - beta`:
/// `beta = [0; 1^(l_0 + 1), m_1 + 2, 1^(l_1), m_2 + 2, ...]`.
///
/// The truncation of `alpha` at the end of block `k` equals the relation
/// applied to the regular convergent of `beta` just before `m_k + 2`.
pub fn lcf_to_rcf(spec: &CfSpec, depth: usize) -> Result<TransformResult> {
    let runs = lcf_decompose(spec, depth)?;
    let blocks = runs.complete_blocks();
    if blocks == 0 {
        return Err(CfError::IncompleteBlock(depth));
    }
    let mut terms = Vec::new();
    let mut alignment = vec![AlignmentPoint::plain(0, 0)];
    let ones = |n: usize, terms: &mut Vec<PartialQuotient>| {
        terms.extend(std::iter::repeat_n(PartialQuotient::plus(1), n));
    };
    ones(runs.l[0] + 1, &mut terms);
    for k in 0..blocks {
        if k > 0 {
            ones(runs.l[k], &mut terms);
        }
        alignment.push(AlignmentPoint::plain(runs.block_ends[k], terms.len()));
        terms.push(PartialQuotient::plus(runs.m[k] + 2));
    }
    let last_end = runs.block_ends[blocks - 1];
    Ok(TransformResult {
        output: CfSpec::prefix(0, terms),
        alignment,
        relation: runs.head_relation,
        source_depth: depth,
        withheld: depth - last_end,
    })
}

struct SrcfState {
    d: Vec<BigInt>,
}

impl SrcfState {
    fn open(&self) -> usize {
        self.d.len() - 1
    }

    fn pending_zero(&self) -> bool {
        self.open() >= 1 && self.d[self.open()].is_zero()
    }

    fn push_term(&mut self, n: usize, t: &PartialQuotient) -> Result<()> {
        let malformed = |index, rule| CfError::MalformedSpec {
            violations: vec![Violation { index, rule }],
        };
        if t.b < BigInt::one() {
            return Err(malformed(n, ViolationRule::NonPositiveQuotient));
        }
        match t.a {
            Sign::Plus => {
                if self.pending_zero() {
                    // x + 1/(0 + 1/y) = x + y
                    self.d.pop();
                    *self.d.last_mut().expect("head present") += &t.b;
                } else {
                    self.d.push(t.b.clone());
                }
            }
            Sign::Minus => {
                if self.pending_zero() {
                    return Err(malformed(n - 1, ViolationRule::PairSumBelowOne));
                }
                // x - 1/y = (x - 1) + 1/(1 + 1/(y - 1))
                let j = self.open();
                self.d[j] -= 1;
                if j >= 1 && self.d[j].is_zero() {
                    self.d.pop();
                    *self.d.last_mut().expect("head present") += 1;
                } else {
                    if j >= 1 && self.d[j].is_negative() {
                        return Err(malformed(n - 1, ViolationRule::PairSumBelowOne));
                    }
                    self.d.push(BigInt::one());
                }
                self.d.push(&t.b - 1);
            }
        }
        Ok(())
    }

    /// Digits that no further input can change, given the next numerator.
    fn stable(&self, next: Option<Sign>, terminated: bool) -> Vec<BigInt> {
        let j = self.open();
        let v = &self.d[j];
        if terminated {
            if self.pending_zero() {
                // [.., c, x, 0] = [.., c]
                return self.d[..j - 1].to_vec();
            }
            return self.d.clone();
        }
        if self.pending_zero() {
            return self.d[..j - 1].to_vec();
        }
        match next {
            Some(Sign::Plus) => self.d.clone(),
            Some(Sign::Minus) => {
                if j == 0 || v > &BigInt::one() {
                    let mut out = self.d.clone();
                    out[j] -= 1;
                    out
                } else {
                    self.d[..j - 1].to_vec()
                }
            }
            None => {
                if j == 0 {
                    Vec::new()
                } else if v > &BigInt::one() {
                    self.d[..j].to_vec()
                } else {
                    self.d[..j - 1].to_vec()
                }
            }
        }
    }
}

/// Any semi-regular continued fraction to a regular one.
///
/// Each negative numerator is rewritten as
/// `x - 1/y = (x - 1) + 1/(1 + 1/(y - 1))` and zero quotients are fused with
/// `x + 1/(0 + 1/y) = x + y`. Only digits that deeper input can no longer
/// change are emitted; the rest are counted in `withheld`.
pub fn srcf_to_rcf(spec: &CfSpec, depth: usize) -> Result<TransformResult> {
    require_depth(spec, depth)?;
    let mut state = SrcfState {
        d: vec![spec.head().clone()],
    };
    // (source n, open j, open value, d[j-1] at that time)
    let mut candidates: Vec<(usize, usize, BigInt, Option<BigInt>)> = Vec::new();
    candidates.push((0, 0, spec.head().clone(), None));
    for n in 1..=depth {
        let t = spec.term_or_err(n)?;
        state.push_term(n, &t)?;
        if !state.pending_zero() {
            let j = state.open();
            let snap = if j >= 1 {
                Some(state.d[j - 1].clone())
            } else {
                None
            };
            candidates.push((n, j, state.d[j].clone(), snap));
        }
    }
    let terminated = spec.terminates() && Some(depth) == spec.available();
    let next = spec.term(depth + 1).map(|t| t.a);
    if let Some(Sign::Minus) = next {
        if state.pending_zero() {
            return Err(CfError::MalformedSpec {
                violations: vec![Violation {
                    index: depth,
                    rule: ViolationRule::PairSumBelowOne,
                }],
            });
        }
    }
    let digits = state.stable(next, terminated);
    if digits.is_empty() {
        return Err(CfError::TruncationEmpty(depth));
    }
    let withheld = state.d.len() - digits.len().min(state.d.len());

    let mut alignment = Vec::new();
    for (n, j, v, snap) in candidates {
        if j > digits.len() {
            continue;
        }
        if let Some(s) = &snap {
            if digits[j - 1] != *s {
                continue;
            }
        }
        let target_last = if digits.get(j) == Some(&v) { None } else { Some(v) };
        alignment.push(AlignmentPoint {
            source: n,
            target: j,
            source_last: None,
            target_last,
        });
    }

    let head = digits[0].clone();
    let terms: Vec<PartialQuotient> = digits[1..].iter().cloned().map(PartialQuotient::plus).collect();
    let output = if terminated {
        CfSpec::finite(head, terms)
    } else {
        CfSpec::prefix(head, terms)
    };
    Ok(TransformResult {
        output,
        alignment,
        relation: Relation::Identity,
        source_depth: depth,
        withheld,
    })
}

/// Details behind [`certify_equivalence`].
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    /// Alignment points whose exact values differ.
    pub mismatches: Vec<usize>,
    pub source_enclosure: Enclosure,
    /// Output enclosure mapped through the relation.
    pub target_enclosure: Enclosure,
    pub intersects: bool,
    pub widths_ok: bool,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty() && self.intersects && self.widths_ok
    }
}

fn deepest_enclosure(spec: &CfSpec, wanted: usize) -> Result<Enclosure> {
    let depth = match spec.available() {
        Some(len) => len.min(wanted.saturating_add(2)),
        None => wanted,
    };
    enclose(spec, depth)
}

/// Exact alignment check plus enclosure comparison, with details.
pub fn equivalence_report(
    a: &CfSpec,
    b: &CfSpec,
    alignment: &[AlignmentPoint],
    relation: Relation,
    tolerance: &BigRational,
) -> Result<EquivalenceReport> {
    if tolerance.is_negative() {
        return Err(CfError::BadParams("tolerance must be >= 0".into()));
    }
    let mut mismatches = Vec::new();
    for (i, pt) in alignment.iter().enumerate() {
        let left = truncated_value(a, pt.source, pt.source_last.as_ref())?;
        let right = truncated_value(b, pt.target, pt.target_last.as_ref())?;
        if left != relation.apply(&right) {
            mismatches.push(i);
        }
    }
    let src_want = alignment.iter().map(|p| p.source).max().unwrap_or(0);
    let tgt_want = alignment.iter().map(|p| p.target).max().unwrap_or(0);
    let source_enclosure = deepest_enclosure(a, src_want)?;
    let target_enclosure = relation.apply_enclosure(&deepest_enclosure(b, tgt_want)?);
    let width_ok = |e: &Enclosure| e.is_point() || e.width() < *tolerance;
    Ok(EquivalenceReport {
        intersects: source_enclosure.intersects(&target_enclosure),
        widths_ok: width_ok(&source_enclosure) && width_ok(&target_enclosure),
        mismatches,
        source_enclosure,
        target_enclosure,
    })
}

/// True iff every alignment point holds exactly and the deepest enclosures of
/// both expansions intersect with widths below `tolerance` (or exactly zero).
pub fn certify_equivalence(
    a: &CfSpec,
    b: &CfSpec,
    alignment: &[AlignmentPoint],
    relation: Relation,
    tolerance: &BigRational,
) -> Result<bool> {
    Ok(equivalence_report(a, b, alignment, relation, tolerance)?.holds())
}

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use srcf_core::constructors::{construct_lcf_exponent, construct_ncf_exponent};
use srcf_core::convergents::{check_invariants, convergents, enclose, evaluate_backward};
use srcf_core::exponent::{check_conditions, verify_sandwich, BoundConstants, Condition, Verdict};
use srcf_core::families::{e_recip, example4, gap_ncf, lehner_blocks, LehnerLayout, SignPattern};
use srcf_core::interchange::{spec_from_json, spec_to_json};
use srcf_core::transforms::{
    equivalence_report, lcf_decompose, lcf_to_rcf, ncf_to_rcf, rcf_to_ncf, srcf_to_rcf, Relation,
};
use srcf_core::{CfSpec, PartialQuotient, Sign};

/// Admissible prefixes: a numerator `-1` only follows a quotient `>= 2`.
fn srcf_prefix(max_len: usize) -> impl Strategy<Value = CfSpec> {
    (
        -20i64..20,
        prop::collection::vec((any::<bool>(), 1u64..12), 2..max_len),
    )
        .prop_map(|(head, raw)| {
            let mut terms: Vec<PartialQuotient> = Vec::with_capacity(raw.len());
            for (neg, b) in raw {
                let allowed = terms.last().is_none_or(|t| t.b >= BigInt::from(2));
                let a = if neg && allowed { Sign::Minus } else { Sign::Plus };
                terms.push(PartialQuotient::new(a, b));
            }
            CfSpec::prefix(head, terms)
        })
}

fn ncf_prefix(max_len: usize) -> impl Strategy<Value = CfSpec> {
    (-5i64..5, prop::collection::vec(2u64..8, 1..max_len), any::<prop::sample::Index>()).prop_map(
        |(head, mut b, idx)| {
            let i = idx.index(b.len());
            if b.iter().all(|&v| v == 2) {
                b[i] = 3;
            }
            CfSpec::ncf_prefix(head, b)
        },
    )
}

fn rcf_prefix(max_len: usize) -> impl Strategy<Value = CfSpec> {
    (-5i64..5, prop::collection::vec(1u64..9, 1..max_len)).prop_map(|(h, c)| CfSpec::rcf_prefix(h, c))
}

fn values_agree(src: &CfSpec, r: &srcf_core::TransformResult) -> bool {
    let rep = equivalence_report(src, &r.output, &r.alignment, r.relation, &BigRational::one()).unwrap();
    rep.mismatches.is_empty() && rep.intersects
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convergents_match_backward_evaluation(spec in srcf_prefix(40)) {
        let len = spec.available().unwrap();
        let table = convergents(&spec, len).unwrap();
        let terms = spec.explicit_terms().unwrap();
        for n in 0..=len {
            let v = evaluate_backward(spec.head(), &terms[..n]).unwrap();
            prop_assert_eq!(table[n].value(), v);
        }
    }

    #[test]
    fn invariants_hold(spec in srcf_prefix(60)) {
        let len = spec.available().unwrap();
        let r = check_invariants(&spec, len).unwrap();
        prop_assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn enclosures_nest(spec in srcf_prefix(40)) {
        let len = spec.available().unwrap();
        let deep = enclose(&spec, len - 2).unwrap();
        for d in 0..len.saturating_sub(2) {
            let e = enclose(&spec, d).unwrap();
            prop_assert!(e.lo <= deep.lo && deep.hi <= e.hi, "depth {} does not contain depth {}", d, len - 2);
        }
    }

    #[test]
    fn ncf_round_trip(spec in ncf_prefix(40)) {
        let len = spec.available().unwrap();
        let r = ncf_to_rcf(&spec, len).unwrap();
        prop_assert!(values_agree(&spec, &r));
        let out_len = r.output.available().unwrap();
        let back = rcf_to_ncf(&r.output, out_len).unwrap();
        prop_assert_eq!(back.output.head(), spec.head());
        let kept = len - r.withheld;
        prop_assert_eq!(back.output.explicit_terms().unwrap(), &spec.explicit_terms().unwrap()[..kept]);
    }

    #[test]
    fn rcf_to_ncf_alignment(spec in rcf_prefix(20)) {
        let len = spec.available().unwrap();
        let r = rcf_to_ncf(&spec, len).unwrap();
        prop_assert!(values_agree(&spec, &r));
        prop_assert!(r.output.explicit_terms().unwrap().iter().all(|t| t.a == Sign::Minus && t.b >= BigInt::from(2)));
    }

    #[test]
    fn srcf_to_rcf_alignment(spec in srcf_prefix(40)) {
        let len = spec.available().unwrap();
        match srcf_to_rcf(&spec, len) {
            Ok(r) => {
                prop_assert!(values_agree(&spec, &r));
                let terms = r.output.explicit_terms().unwrap();
                prop_assert!(terms.iter().all(|t| t.a == Sign::Plus && t.b >= BigInt::one()));
            }
            Err(e) => prop_assert!(matches!(e, srcf_core::CfError::TruncationEmpty(_)), "{e}"),
        }
    }

    #[test]
    fn srcf_to_rcf_is_stable_under_extension(spec in srcf_prefix(40)) {
        let len = spec.available().unwrap();
        let short = spec.truncated(len - 1).unwrap();
        if let (Ok(a), Ok(b)) = (srcf_to_rcf(&short, len - 1), srcf_to_rcf(&spec, len)) {
            let a = a.output.explicit_terms().unwrap().to_vec();
            let b = b.output.explicit_terms().unwrap().to_vec();
            prop_assert!(a.len() <= b.len() && b[..a.len()] == a[..], "{:?} is not a prefix of {:?}", a, b);
        }
    }

    #[test]
    fn lehner_layouts_convert(
        relation in prop_oneof![Just(Relation::OnePlus), Just(Relation::TwoMinus)],
        blocks in prop::collection::vec((0usize..4, 0usize..4), 1..8),
        l0 in 0usize..4,
    ) {
        let mut l = vec![l0];
        let mut m = Vec::new();
        for (mk, lk) in &blocks {
            m.push(*mk);
            l.push(*lk);
        }
        let layout = LehnerLayout::new(relation, l.clone(), m.clone()).unwrap();
        let spec = lehner_blocks(layout);
        let len = spec.available().unwrap();
        let runs = lcf_decompose(&spec, len).unwrap();
        prop_assert_eq!(&runs.m, &m);
        prop_assert_eq!(runs.head_relation, relation);
        let r = lcf_to_rcf(&spec, len).unwrap();
        prop_assert_eq!(r.relation, relation);
        prop_assert!(values_agree(&spec, &r));
    }

    #[test]
    fn interchange_round_trip(spec in srcf_prefix(30)) {
        let v = spec_to_json(&spec, None).unwrap();
        let back = spec_from_json(&v).unwrap();
        prop_assert_eq!(back.head(), spec.head());
        prop_assert_eq!(back.explicit_terms(), spec.explicit_terms());
    }

    #[test]
    fn regular_prefixes_satisfy_c_and_sandwich(c in prop::collection::vec(1u64..6, 14..30)) {
        let spec = CfSpec::rcf_prefix(0, c.clone());
        let len = c.len();
        let cond = check_conditions(&spec, 1, len).unwrap();
        prop_assert!(cond.holds_c);
        let k = BoundConstants::for_condition(Condition::C, 0);
        let rep = verify_sandwich(&spec, &k, 1, len - 3, len - 1).unwrap();
        prop_assert_eq!(rep.failed, 0);
        prop_assert!(rep.checks.iter().all(|c| c.growth == Verdict::Pass));
    }
}

#[test]
fn ncf_construction_closes_the_loop() {
    for s in [BigRational::from_integer(BigInt::from(3)), BigRational::new(BigInt::from(5), BigInt::from(2))] {
        let c = construct_ncf_exponent(&s, 6).unwrap();
        let depth = c.marks.last().unwrap().to_usize().unwrap();
        let r = ncf_to_rcf(&c.spec, depth).unwrap();
        let companion = c.companion.as_ref().unwrap();
        assert_eq!(r.output.head(), companion.head());
        assert_eq!(r.output.explicit_terms(), companion.explicit_terms());
        assert_eq!(r.withheld, 0);
    }
}

#[test]
fn lcf_construction_closes_the_loop() {
    let c = construct_lcf_exponent(&BigRational::from_integer(BigInt::from(3)), 5).unwrap();
    assert_eq!(c.blocks_in_spec, 5);
    let len = c.spec.available().unwrap();
    let r = lcf_to_rcf(&c.spec, len).unwrap();
    assert_eq!(r.relation, Relation::OnePlus);
    assert_eq!(r.output.head() + 1, *c.companion.head());
    assert_eq!(r.output.explicit_terms(), c.companion.explicit_terms());
}

#[test]
fn e_satisfies_condition_a_with_one() {
    let r = check_conditions(&e_recip(1).unwrap(), 1, 200).unwrap();
    assert!(r.holds_a);
    assert_eq!(r.max_run_neg_a, 1);
}

#[test]
fn example4_satisfies_condition_b_past_the_first_large_term() {
    let spec = example4(BigRational::new(BigInt::from(3), BigInt::from(2)), SignPattern::Alternate).unwrap();
    // floor(2^{(3/2)^3}) = 11 is the first value >= 3
    let r = check_conditions(&spec, 9, 60).unwrap();
    assert!(r.holds_b);
    assert_eq!(r.max_run_b2, 2);
}

#[test]
fn gap_ncf_with_huge_marks_is_lazy() {
    let far = BigUint::from(10u32).pow(30);
    let spec = gap_ncf(0, vec![BigUint::from(3u32), far]).unwrap();
    assert_eq!(spec.term(3).unwrap(), PartialQuotient::minus(3));
    assert_eq!(spec.term(1_000_000).unwrap(), PartialQuotient::minus(2));
    let runs = spec.runs(1, 1_000_000);
    assert_eq!(runs.len(), 3);
    assert!(BigInt::zero() < BigInt::from(runs[2].len));
}

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use srcf_core::constructors::{construct_adams_davison, construct_lcf_exponent, construct_ncf_exponent, AlphaSource};
use srcf_core::convergents::{check_invariants, enclose, tail_bound};
use srcf_core::exponent::{
    check_encad, estimate_mu, periodic_quadratic_mu, verify_sandwich, BoundConstants, Condition, Method,
};
use srcf_core::families::{bessel_ratio, e_recip, example4, lehner_sqrt2_half, omega, SignPattern};
use srcf_core::transforms::{ncf_to_rcf, rcf_to_ncf, AlignmentPoint};
use srcf_core::{CfSpec, PartialQuotient, QuadSurd, Sign};

type Outcome = Result<String, String>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

/// Backward evaluation of `head + a_1/(b_1 + ...)` over `(a, b)` pairs.
fn backward(head: &BigInt, terms: &[(i64, BigInt)]) -> Option<BigRational> {
    let mut tail = BigRational::zero();
    for (a, b) in terms.iter().rev() {
        let den = BigRational::from_integer(b.clone()) + &tail;
        if den.is_zero() {
            return None;
        }
        tail = BigRational::from_integer(BigInt::from(*a)) / den;
    }
    Some(BigRational::from_integer(head.clone()) + tail)
}

fn pairs(terms: &[PartialQuotient]) -> Vec<(i64, BigInt)> {
    terms.iter().map(|t| (t.a.to_i64(), t.b.clone())).collect()
}

/// Value of the first `n` levels with the last quotient optionally replaced.
fn truncation(head: &BigInt, terms: &[(i64, BigInt)], n: usize, last: Option<&BigInt>) -> BigRational {
    let mut head = head.clone();
    let mut t: Vec<(i64, BigInt)> = terms[..n.min(terms.len())].to_vec();
    if let Some(v) = last {
        if n == 0 {
            head = v.clone();
        } else if n > terms.len() {
            t.push((1, v.clone()));
        } else {
            t[n - 1].1 = v.clone();
        }
    }
    backward(&head, &t).expect("admissible truncation")
}

fn fib(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ad = construct_adams_davison(&AlphaSource::Period(vec![BigInt::one()]), &BigInt::from(2), 25)
        .map_err(|e| e.to_string())?;
    let rep = estimate_mu(&ad.spec, 25, Method::Form, 0.5).map_err(|e| e.to_string())?;
    let mu = rep.mu_form.ok_or("no estimate")?.value;
    ensure((mu - 2.618034).abs() <= 0.01, || format!("mu_form = {mu}"))?;
    let exact = periodic_quadratic_mu(&[BigInt::one()]).map_err(|e| e.to_string())?;
    let golden_sq = QuadSurd::new(rat(3, 2), rat(1, 2), BigInt::from(5));
    ensure(exact.mu == golden_sq, || format!("exact mu = {}", exact.mu))?;
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("mu_form = {mu:.6}, exact = {}", exact.mu))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let spec = example4(rat(3, 2), SignPattern::Plus).map_err(|e| e.to_string())?;
    let rep = estimate_mu(&spec, 60, Method::Form1, 0.5).map_err(|e| e.to_string())?;
    let mu = rep.mu_form1.ok_or("no estimate")?.value;
    ensure((mu - 2.5).abs() <= 0.05, || format!("mu_form1 = {mu}"))?;
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("mu_form1 = {mu:.6}"))
}

fn criterion_3() -> Outcome {
    let ncf = construct_ncf_exponent(&rat(3, 1), 8).map_err(|e| e.to_string())?;
    let companion = ncf.companion.ok_or("no companion")?;
    let n = companion.available().unwrap_or(0);
    let mu_ncf = estimate_mu(&companion, n, Method::Form, 0.5)
        .map_err(|e| e.to_string())?
        .mu_form
        .ok_or("no estimate")?
        .value;
    ensure((mu_ncf - 3.0).abs() <= 0.1, || format!("ncf companion mu = {mu_ncf}"))?;
    let lcf = construct_lcf_exponent(&rat(5, 2), 10).map_err(|e| e.to_string())?;
    let n = lcf.companion.available().unwrap_or(0);
    let mu_lcf = estimate_mu(&lcf.companion, n, Method::Form, 0.5)
        .map_err(|e| e.to_string())?
        .mu_form
        .ok_or("no estimate")?
        .value;
    ensure((mu_lcf - 2.5).abs() <= 0.1, || format!("lcf companion mu = {mu_lcf}"))?;
    Ok(format!("ncf(s=3) mu = {mu_ncf:.4}, lcf(s=5/2) mu = {mu_lcf:.4}"))
}

fn alignment_holds(
    src_head: &BigInt,
    src: &[(i64, BigInt)],
    dst_head: &BigInt,
    dst: &[(i64, BigInt)],
    points: &[AlignmentPoint],
) -> Result<(), String> {
    for p in points {
        let l = truncation(src_head, src, p.source, p.source_last.as_ref());
        let r = truncation(dst_head, dst, p.target, p.target_last.as_ref());
        ensure(l == r, || format!("alignment {p:?}: {l} != {r}"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut points = 0usize;
    for case in 0..100 {
        let len = rng.gen_range(1..=50usize);
        let mut b: Vec<i64> = (0..len).map(|_| rng.gen_range(2..=10)).collect();
        if b.iter().all(|&v| v == 2) {
            let i = rng.gen_range(0..len);
            b[i] = rng.gen_range(3..=10);
        }
        let head = BigInt::from(rng.gen_range(-5i64..=5));
        let src = CfSpec::ncf_prefix(head.clone(), b.iter().copied());
        let r = ncf_to_rcf(&src, len).map_err(|e| format!("case {case}: {e}"))?;
        let src_terms = pairs(src.explicit_terms().expect("explicit"));
        let out_terms = pairs(r.output.explicit_terms().expect("explicit"));
        alignment_holds(&head, &src_terms, r.output.head(), &out_terms, &r.alignment)
            .map_err(|e| format!("case {case}: {e}"))?;
        points += r.alignment.len();
        // back to the negative expansion, up to the last large quotient
        let last_mark = b.iter().rposition(|&v| v > 2).expect("has a large term") + 1;
        let back = rcf_to_ncf(&r.output, out_terms.len()).map_err(|e| format!("case {case}: {e}"))?;
        let back_terms = pairs(back.output.explicit_terms().expect("explicit"));
        ensure(back.output.head() == &head && back_terms == src_terms[..last_mark], || {
            format!("case {case}: round trip gave {back_terms:?}")
        })?;
    }
    Ok(format!("100 prefixes, {points} alignment points exact, round trips exact"))
}

fn random_srcf(rng: &mut StdRng) -> (BigInt, Vec<(i64, BigInt)>) {
    let len = rng.gen_range(1..=100usize);
    let head = BigInt::from(rng.gen_range(-10i64..=10));
    let mut terms: Vec<(i64, BigInt)> = Vec::with_capacity(len);
    for _ in 0..len {
        let may_be_negative = terms.last().is_none_or(|(_, b)| *b >= BigInt::from(2));
        let a = if may_be_negative && rng.gen_bool(0.5) { -1 } else { 1 };
        let b = if rng.gen_bool(0.05) {
            BigInt::from(rng.gen_range(10u64..1_000_000_000))
        } else {
            BigInt::from(rng.gen_range(1..=4))
        };
        terms.push((a, b));
    }
    (head, terms)
}

/// Checks determinant, coprimality, growth inequalities, series identity,
/// tail-bound membership and the Fibonacci upper bound with an independent
/// recurrence.
fn check_prefix(head: &BigInt, terms: &[(i64, BigInt)], spec: &CfSpec) -> Result<(), String> {
    let n_max = terms.len();
    let mut p = vec![BigInt::one(), head.clone()];
    let mut q = vec![BigInt::zero(), BigInt::one()];
    for (a, b) in terms {
        let k = p.len();
        p.push(b * &p[k - 1] + a * &p[k - 2]);
        q.push(b * &q[k - 1] + a * &q[k - 2]);
    }
    // index i of p, q holds p_{i-1}, q_{i-1}
    let a = |n: usize| terms[n - 1].0;
    let b = |n: usize| &terms[n - 1].1;
    let mut prod = 1i64;
    let mut series = BigRational::from_integer(head.clone());
    let mut bprod = BigInt::one();
    for n in 1..=n_max {
        prod *= a(n);
        let det = &p[n + 1] * &q[n] - &p[n] * &q[n + 1];
        let expect = if n % 2 == 1 { prod } else { -prod };
        ensure(det == BigInt::from(expect), || format!("determinant at n = {n}"))?;
        ensure(p[n + 1].gcd(&q[n + 1]).is_one(), || format!("coprimality at n = {n}"))?;
        series += BigRational::new(BigInt::from(expect), &q[n] * &q[n + 1]);
        ensure(series == BigRational::new(p[n + 1].clone(), q[n + 1].clone()), || {
            format!("series identity at n = {n}")
        })?;
        bprod *= b(n);
        ensure(q[n + 1] <= fib(n + 1) * &bprod, || format!("Fibonacci upper bound at n = {n}"))?;
    }
    // growth: q_n >= 1, q_n + a_{n+1} q_{n-1} >= 1, and the monotonicity cases
    for n in 0..n_max {
        let qn = &q[n + 1];
        let qp = &q[n];
        ensure(*qn >= BigInt::one(), || format!("q_{n} < 1"))?;
        ensure(qn + a(n + 1) * qp >= BigInt::one(), || format!("q_{n} + a q_{{n-1}} < 1"))?;
        let strict = n >= 1;
        let up = *b(n + 1) >= BigInt::from(2) || a(n + 1) == 1;
        if up {
            let q1 = &q[n + 2];
            ensure(if strict { q1 > qn } else { q1 >= qn }, || format!("q_{} vs q_{n}", n + 1))?;
        } else if n + 2 <= n_max {
            let (q1, q2) = (&q[n + 2], &q[n + 3]);
            let ok = if strict { q2 > qn && qn > q1 } else { q2 >= qn && qn >= q1 };
            ensure(ok, || format!("q_{} > q_{n} > q_{} fails", n + 2, n + 1))?;
        }
    }
    // x_{n,k} lies in the stated interval
    for n in 0..n_max {
        let bound = tail_bound(spec, n).map_err(|e| e.to_string())?;
        for k in 1..=(n_max - n).min(6) {
            let x = backward(&BigInt::zero(), &terms[n..n + k]).ok_or("zero denominator")?;
            ensure(bound.contains(&x), || format!("x_{{{n},{k}}} = {x} outside tail bound"))?;
        }
    }
    let lib = check_invariants(spec, n_max).map_err(|e| e.to_string())?;
    ensure(lib.ok(), || format!("library invariants: {:?}", lib.failures))?;
    let encad = check_encad(spec, n_max).map_err(|e| e.to_string())?;
    ensure(encad.upper_ok, || "library Fibonacci bound".to_string())?;
    Ok(())
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut total = 0usize;
    for case in 0..1000 {
        let (head, terms) = random_srcf(&mut rng);
        let spec = CfSpec::prefix(
            head.clone(),
            terms
                .iter()
                .map(|(a, b)| PartialQuotient::new(Sign::from_i64(*a).expect("sign"), b.clone()))
                .collect(),
        );
        check_prefix(&head, &terms, &spec).map_err(|e| format!("case {case}: {e}"))?;
        total += terms.len();
    }
    Ok(format!("1000 prefixes, {total} indices checked"))
}

fn criterion_6() -> Outcome {
    let k = BoundConstants::for_condition(Condition::C, 0);
    ensure(k.rho == rat(1, 1) && k.sigma == rat(1, 2) && k.tau == rat(2, 1), || "constants for C".into())?;
    let bessel = verify_sandwich(&bessel_ratio(), &k, 5, 30, 60).map_err(|e| e.to_string())?;
    ensure(bessel.passed == 26, || format!("bessel: {} pass, {} fail, {} indeterminate", bessel.passed, bessel.failed, bessel.indeterminate))?;
    let ka = BoundConstants::for_condition(Condition::A, 1);
    ensure(ka == k, || "constants for A with L = 1".into())?;
    let e = e_recip(1).map_err(|e| e.to_string())?;
    let er = verify_sandwich(&e, &ka, 5, 30, 60).map_err(|e| e.to_string())?;
    ensure(er.passed == 26, || format!("e: {} pass, {} fail, {} indeterminate", er.passed, er.failed, er.indeterminate))?;
    Ok("bessel 26/26, e 26/26 certified".into())
}

fn criterion_7() -> Outcome {
    let tiny = rat(1, 10_000_000_000);
    // e in [S_N, S_N + 2/(N+1)!]
    let (mut s, mut f) = (BigRational::zero(), BigInt::one());
    for k in 0..60i64 {
        if k > 0 {
            f *= k;
        }
        s += BigRational::new(BigInt::one(), f.clone());
    }
    let e_hi = &s + BigRational::new(BigInt::from(2), f * 60);
    let enc = enclose(&e_recip(1).map_err(|e| e.to_string())?, 40).map_err(|e| e.to_string())?;
    ensure(enc.lo <= s && e_hi <= enc.hi && enc.width() < tiny, || format!("e: [{}, {}]", enc.lo, enc.hi))?;

    // I_0(2)/I_1(2) from both series with tail bounds
    let (mut s0, mut s1, mut f) = (BigRational::zero(), BigRational::zero(), BigInt::one());
    for k in 0..40i64 {
        if k > 0 {
            f *= k;
        }
        s0 += BigRational::new(BigInt::one(), &f * &f);
        s1 += BigRational::new(BigInt::one(), &f * &f * (k + 1));
    }
    let t = BigRational::new(BigInt::one(), &f * &f);
    let lo = &s0 / (&s1 + &t);
    let hi = (&s0 + &t) / &s1;
    let enc = enclose(&bessel_ratio(), 20).map_err(|e| e.to_string())?;
    ensure(enc.lo <= lo && hi <= enc.hi && enc.width() < tiny, || format!("bessel: [{}, {}]", enc.lo, enc.hi))?;
    // the independently summed ratio is 1.43312742672...
    ensure(enc.lo > rat(14331274, 10_000_000) && enc.hi < rat(14331275, 10_000_000), || "bessel digits".into())?;

    // 1 + sqrt(2)/2: (lo - 1)^2 <= 1/2 <= (hi - 1)^2
    let enc = enclose(&lehner_sqrt2_half(), 50).map_err(|e| e.to_string())?;
    let one = BigRational::one();
    let sq = |x: &BigRational| (x - &one) * (x - &one);
    ensure(
        enc.lo > one && sq(&enc.lo) <= rat(1, 2) && sq(&enc.hi) >= rat(1, 2) && enc.width() < tiny,
        || format!("1 + sqrt(2)/2: [{}, {}]", enc.lo, enc.hi),
    )?;

    for d in [10usize, 50] {
        let enc = enclose(&omega(), d).map_err(|e| e.to_string())?;
        ensure(enc.contains(&one) && enc.width() == rat(1, d as i64 + 2), || format!("omega depth {d}"))?;
    }
    Ok("e, bessel ratio, 1 + sqrt(2)/2 within 1e-10; omega contains 1 with width 1/(d+2)".into())
}

fn criterion_8() -> Outcome {
    let b = BigInt::from(2);
    let ad = construct_adams_davison(&AlphaSource::Period(vec![BigInt::one()]), &b, 25).map_err(|e| e.to_string())?;
    for n in 2..=20usize {
        let expect = BigInt::one() << fib(n - 1).to_usize().expect("small");
        ensure(ad.raw_terms[n - 1] == expect, || format!("b_{n} = {}", ad.raw_terms[n - 1]))?;
        let term = ad.spec.term(n).ok_or("missing term")?;
        ensure(term == PartialQuotient::plus(expect), || format!("spec term {n}"))?;
    }
    // (b - 1) sum_{k <= 60} b^{-floor(k phi)}, floor(k phi) = floor((k + isqrt(5 k^2)) / 2)
    let mut sum = BigRational::zero();
    for k in 1..=60u64 {
        let kk = BigInt::from(k);
        let fl: BigInt = (&kk + (BigInt::from(5) * &kk * &kk).sqrt()) / 2;
        sum += BigRational::new(BigInt::one(), BigInt::one() << fl.to_usize().expect("small"));
    }
    let sum = sum * BigRational::from_integer(&b - 1);
    let enc = enclose(&ad.spec, 20).map_err(|e| e.to_string())?;
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(12));
    ensure(enc.lo.clone() - &tol <= sum && sum <= enc.hi.clone() + &tol, || {
        format!("series {} vs [{}, {}]", sum, enc.lo, enc.hi)
    })?;
    ensure(sum.is_positive(), || "series".into())?;
    Ok("b_n = 2^F_{n-1} for 2 <= n <= 20; series within 1e-12".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden-ratio Adams-Davison exponent", criterion_1),
        ("sigma = 3/2 double-exponential exponent", criterion_2),
        ("prescribed-exponent constructions", criterion_3),
        ("transform equivalence suite", criterion_4),
        ("invariant suite", criterion_5),
        ("sandwich verification", criterion_6),
        ("known values", criterion_7),
        ("Adams-Davison structure", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}) [{t:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({detail}) [{t:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use srcf_core::constructors::{
    construct_adams_davison, construct_lcf_exponent, construct_ncf_exponent, AlphaSource,
};
use srcf_core::convergents::{check_invariants, convergents, enclose};
use srcf_core::exponent::{
    check_conditions, check_encad, default_constants, estimate_mu, periodic_quadratic_mu,
    verify_sandwich, BoundConstants, Condition, Method, Verdict,
};
use srcf_core::interchange::{
    alignment_to_json, convergent_to_json, enclosure_to_json, ratio_to_f64, rational_from_str,
    spec_from_json, spec_from_str, spec_to_json, terms_to_json, transform_to_json,
};
use srcf_core::transforms::{equivalence_report, lcf_to_rcf, ncf_to_rcf, rcf_to_ncf, srcf_to_rcf};
use srcf_core::{inspect, CfError, CfSpec, Enclosure, PartialQuotient};

use crate::report::{CommandResult, Table};
use crate::{CheckArg, ConditionArg, ConvertMode, Input, MethodArg, TargetArg};

pub type Outcome = Result<CommandResult, CommandResult>;

/// Terms written by default when an expansion has no natural end.
const DEFAULT_EMIT: usize = 20;
/// Cap on terms written by default for constructed expansions.
const MAX_DEFAULT_EMIT: usize = 10_000;
/// Rows shown in `--pretty` term listings.
const PRETTY_ROWS: usize = 60;

fn err(e: CfError) -> CommandResult {
    CommandResult::from_error(&e)
}

fn parse_params(raw: &[String]) -> Result<Map<String, Value>, CommandResult> {
    let mut map = Map::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CommandResult::usage(format!("--param `{p}` is not KEY=VALUE")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

fn load(input: &Input) -> Result<CfSpec, CommandResult> {
    if let Some(family) = &input.family {
        let params = parse_params(&input.params)?;
        return spec_from_json(&json!({ "family": family, "params": params })).map_err(err);
    }
    if !input.params.is_empty() {
        return Err(CommandResult::usage("--param requires --family"));
    }
    let text = match input.file.as_deref() {
        None => return Err(CommandResult::usage("give a spec file or --family")),
        Some(p) if p == Path::new("-") => std::io::read_to_string(std::io::stdin())
            .map_err(|e| CommandResult::usage(format!("reading stdin: {e}")))?,
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CommandResult::usage(format!("reading {}: {e}", p.display())))?,
    };
    spec_from_str(&text).map_err(err)
}

fn parse_rational_arg(name: &str, s: &str) -> Result<num_rational::BigRational, CommandResult> {
    rational_from_str(s).map_err(|_| CommandResult::usage(format!("--{name}: `{s}` is not a rational")))
}

fn parse_int_list(name: &str, s: &str) -> Result<Vec<BigInt>, CommandResult> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|_| CommandResult::usage(format!("--{name}: `{x}` is not an integer")))
        })
        .collect()
}

/// Inclusive `a..b` or `a..=b`.
fn parse_range(s: &str) -> Result<(usize, usize), CommandResult> {
    let bad = || CommandResult::usage(format!("--range `{s}` is not of the form a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn write_doc(path: &Path, doc: &Value) -> Result<(), CommandResult> {
    let text = serde_json::to_string_pretty(doc).expect("serializable document") + "\n";
    std::fs::write(path, text).map_err(|e| CommandResult::usage(format!("writing {}: {e}", path.display())))
}

fn term_table(head: &BigInt, terms: &[PartialQuotient]) -> Table {
    let mut t = Table::new(&["n", "a", "b"]);
    t.row(vec!["0".into(), String::new(), head.to_string()]);
    for (i, q) in terms.iter().take(PRETTY_ROWS).enumerate() {
        t.row(vec![(i + 1).to_string(), q.a.to_i64().to_string(), q.b.to_string()]);
    }
    t
}

fn enclosure_brief(e: &Enclosure) -> Value {
    json!({ "depth": e.depth, "lo": e.lo.to_string(), "hi": e.hi.to_string() })
}

pub fn expand(input: &Input, terms: usize) -> Outcome {
    let spec = load(input)?;
    let rows = convergents(&spec, terms).map_err(err)?;
    let listed = spec.terms_to(terms).map_err(err)?;
    let mut table = Table::new(&["n", "a", "b", "p", "q", "det"]);
    let mut json_rows = Vec::with_capacity(rows.len());
    for c in &rows {
        let mut row = convergent_to_json(c);
        let (a, b) = match c.n {
            0 => (String::new(), spec.head().to_string()),
            n => {
                let t = &listed[n - 1];
                row["a"] = json!(t.a.to_i64());
                row["b"] = json!(t.b.to_string());
                (t.a.to_i64().to_string(), t.b.to_string())
            }
        };
        row["approx"] = json!(ratio_to_f64(&c.value()));
        table.row(vec![c.n.to_string(), a, b, c.p.to_string(), c.q.to_string(), c.det.to_string()]);
        json_rows.push(row);
    }
    let mut payload = json!({ "terms": terms, "convergents": json_rows });
    if terms >= 1 {
        let report = inspect(&spec, terms).map_err(err)?;
        payload["classes"] = serde_json::to_value(&report.classes).expect("serializable");
        payload["cond1_witness_count"] = json!(report.cond1_witness_count);
    }
    Ok(CommandResult::ok(payload).with_table(table))
}

pub fn value(input: &Input, depth: usize, digits: u32) -> Outcome {
    let spec = load(input)?;
    let e = enclose(&spec, depth).map_err(err)?;
    let mut res = CommandResult::ok(enclosure_to_json(&e, digits));
    if e.depth != depth {
        res = res.note(format!("enclosure taken at depth {} to keep the denominator sign-definite", e.depth));
    }
    Ok(res)
}

pub fn convert(
    input: &Input,
    mode: ConvertMode,
    depth: Option<usize>,
    tolerance: &str,
    out: Option<&Path>,
) -> Outcome {
    let spec = load(input)?;
    let depth = depth
        .or_else(|| spec.available())
        .ok_or_else(|| CommandResult::usage("an unbounded spec needs --depth"))?;
    let tol = parse_rational_arg("tolerance", tolerance)?;
    let result = match mode {
        ConvertMode::Ncf2rcf => ncf_to_rcf(&spec, depth),
        ConvertMode::Rcf2ncf => rcf_to_ncf(&spec, depth),
        ConvertMode::Lcf2rcf => lcf_to_rcf(&spec, depth),
        ConvertMode::Srcf2rcf => srcf_to_rcf(&spec, depth),
    }
    .map_err(err)?;
    let rep = equivalence_report(&spec, &result.output, &result.alignment, result.relation, &tol).map_err(err)?;
    let doc = transform_to_json(&result).map_err(err)?;
    if let Some(path) = out {
        write_doc(path, &doc)?;
    }
    let payload = json!({
        "mode": format!("{mode:?}").to_lowercase(),
        "relation": result.relation.name(),
        "output": doc,
        "certificate": {
            "holds": rep.holds(),
            "alignment_points": result.alignment.len(),
            "mismatches": rep.mismatches,
            "intersects": rep.intersects,
            "widths_ok": rep.widths_ok,
            "tolerance": tol.to_string(),
            "source_enclosure": enclosure_brief(&rep.source_enclosure),
            "target_enclosure": enclosure_brief(&rep.target_enclosure),
        },
    });
    let mut table = Table::new(&["source", "target", "source_last", "target_last"]);
    if let Value::Array(points) = alignment_to_json(&result.alignment) {
        for p in points {
            let cell = |k: &str| p.get(k).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default();
            table.row(vec![cell("source"), cell("target"), cell("source_last"), cell("target_last")]);
        }
    }
    let mut res = if rep.holds() {
        CommandResult::ok(payload)
    } else {
        CommandResult::failed(payload).note("equivalence certificate failed")
    };
    if result.withheld > 0 {
        res = res.note(format!(
            "{} trailing source terms are not yet reflected in the output",
            result.withheld
        ));
    }
    Ok(res.with_table(table))
}

/// Exact exponent for Adams–Davison specs built from a periodic `alpha`.
fn exact_mu(spec: &CfSpec) -> Option<Value> {
    let p = spec.provenance()?;
    if p.family != "adams_davison" || p.params.contains_key("alpha_inverse") {
        return None;
    }
    let period: Vec<BigInt> = match p.params.get("alpha_period") {
        None => vec![BigInt::from(1)],
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::Number(n) => n.as_i64().map(BigInt::from),
                Value::String(s) => s.parse().ok(),
                _ => None,
            })
            .collect::<Option<_>>()?,
        Some(_) => return None,
    };
    let mu = periodic_quadratic_mu(&period).ok()?;
    Some(json!({ "expression": mu.mu.to_string(), "decimal": mu.decimal(12) }))
}

pub fn mu(input: &Input, terms: usize, method: MethodArg, window: f64) -> Outcome {
    let spec = load(input)?;
    let method = match method {
        MethodArg::Form => Method::Form,
        MethodArg::Form1 => Method::Form1,
        MethodArg::Both => Method::Both,
    };
    let report = estimate_mu(&spec, terms, method, window).map_err(err)?;
    let mut payload = serde_json::to_value(&report).expect("serializable report");
    if let Some(exact) = exact_mu(&spec) {
        payload["exact"] = exact;
    }
    let mut table = Table::new(&["n", "lambda", "lo", "hi"]);
    for p in report.lambda_series.iter().filter(|p| p.n >= report.window.start) {
        table.row(vec![
            p.n.to_string(),
            format!("{:.6}", p.value),
            format!("{:.6}", p.lo),
            format!("{:.6}", p.hi),
        ]);
    }
    let mut res = CommandResult::ok(payload).note(format!(
        "limsup window [{}, {}] (fraction {})",
        report.window.start,
        terms.saturating_sub(1),
        report.window.start_fraction
    ));
    if report.suspect_rational {
        res = res.note("no b_n + a_(n+1) >= 2 in the second half of the prefix; the value may be rational");
    }
    Ok(res.with_table(table))
}

fn condition_of(c: ConditionArg) -> Condition {
    match c {
        ConditionArg::A => Condition::A,
        ConditionArg::B => Condition::B,
        ConditionArg::C => Condition::C,
        ConditionArg::D => Condition::D,
    }
}

pub fn verify(
    input: &Input,
    check: CheckArg,
    range: &str,
    condition: Option<ConditionArg>,
    overrides: [Option<String>; 3],
    eval_depth: Option<usize>,
) -> Outcome {
    let spec = load(input)?;
    let (from, to) = parse_range(range)?;
    match check {
        CheckArg::Sandwich => sandwich(&spec, from, to, condition.map(condition_of), overrides, eval_depth),
        CheckArg::Encad => {
            let r = check_encad(&spec, to).map_err(err)?;
            let payload = serde_json::to_value(&r).expect("serializable report");
            Ok(if r.upper_ok {
                CommandResult::ok(payload)
            } else {
                CommandResult::failed(payload)
            })
        }
        CheckArg::Invariants => {
            let r = check_invariants(&spec, to).map_err(err)?;
            let payload = serde_json::to_value(&r).expect("serializable report");
            Ok(if r.ok() {
                CommandResult::ok(payload)
            } else {
                CommandResult::failed(payload)
            })
        }
        CheckArg::Conditions => {
            let r = check_conditions(&spec, from, to).map_err(err)?;
            let mut payload = serde_json::to_value(&r).expect("serializable report");
            payload["best"] = json!(r.best().map(|c| format!("{c:?}")));
            let ok = match condition {
                Some(c) => r.holds(condition_of(c)),
                None => r.best().is_some(),
            };
            Ok(if ok {
                CommandResult::ok(payload)
            } else {
                CommandResult::failed(payload).note("no requested condition holds on the range")
            })
        }
    }
}

fn sandwich(
    spec: &CfSpec,
    from: usize,
    to: usize,
    condition: Option<Condition>,
    [rho, sigma, tau]: [Option<String>; 3],
    eval_depth: Option<usize>,
) -> Outcome {
    let mut notes = Vec::new();
    let explicit = rho.is_some() && sigma.is_some() && tau.is_some();
    let base = if explicit {
        None
    } else {
        let cond = match condition {
            Some(c) => c,
            None => match check_conditions(spec, from, to).map_err(err)?.best() {
                Some(c) => c,
                None => {
                    return Err(CommandResult::failed(json!({ "error": "condition_not_verified" }))
                        .note("none of the conditions A-D holds on the range; pass --rho, --sigma and --tau"))
                }
            },
        };
        let k = default_constants(spec, cond, from, to).map_err(err)?;
        notes.push(format!("constants derived from condition {cond:?}"));
        Some(k)
    };
    let pick = |name: &str, given: &Option<String>, fallback: Option<&num_rational::BigRational>| match given {
        Some(s) => parse_rational_arg(name, s),
        None => Ok(fallback.expect("fallback constants exist").clone()),
    };
    let k = BoundConstants::new(
        pick("rho", &rho, base.as_ref().map(|k| &k.rho))?,
        pick("sigma", &sigma, base.as_ref().map(|k| &k.sigma))?,
        pick("tau", &tau, base.as_ref().map(|k| &k.tau))?,
    )
    .map_err(err)?;
    let eval = eval_depth.unwrap_or((2 * to).max(to + 2));
    let r = verify_sandwich(spec, &k, from, to, eval).map_err(err)?;
    let mut table = Table::new(&["n", "verdict", "growth", "lower", "upper"]);
    let name = |v: Verdict| format!("{v:?}").to_lowercase();
    for c in &r.checks {
        table.row(vec![c.n.to_string(), name(c.verdict), name(c.growth), name(c.lower), name(c.upper)]);
    }
    let mut payload = serde_json::to_value(&r).expect("serializable report");
    payload["verdict"] = json!(name(r.verdict()));
    let mut res = match r.verdict() {
        Verdict::Pass => CommandResult::ok(payload),
        Verdict::Fail => {
            let bad: Vec<String> = r
                .checks
                .iter()
                .filter(|c| c.verdict == Verdict::Fail)
                .map(|c| c.n.to_string())
                .collect();
            CommandResult::failed(payload).note(format!("failed at n = {}", bad.join(", ")))
        }
        Verdict::Indeterminate => CommandResult::indeterminate(payload)
            .note("some bounds could not be decided; raise --eval-depth"),
    };
    notes.append(&mut res.diagnostics);
    res.diagnostics = notes;
    Ok(res.with_table(table))
}

pub struct ConstructArgs {
    pub target: TargetArg,
    pub s: Option<String>,
    pub k_max: usize,
    pub b: String,
    pub alpha_period: Option<String>,
    pub alpha_inverse: Option<String>,
    pub n_max: usize,
    pub family: Option<String>,
    pub params: Vec<String>,
    pub depth: Option<usize>,
    pub out: Option<PathBuf>,
}

fn emitted(spec: &CfSpec, depth: Option<usize>, natural: Option<usize>) -> (usize, Option<String>) {
    if let Some(d) = depth {
        return (d, None);
    }
    if let Some(len) = spec.available() {
        if len <= MAX_DEFAULT_EMIT {
            return (len, None);
        }
    }
    match natural {
        Some(n) if n <= MAX_DEFAULT_EMIT => (n, None),
        Some(n) => (
            MAX_DEFAULT_EMIT,
            Some(format!("expansion has {n} meaningful terms; writing the first {MAX_DEFAULT_EMIT} (use --depth)")),
        ),
        None => (DEFAULT_EMIT, Some(format!("unbounded expansion; writing {DEFAULT_EMIT} terms (use --depth)"))),
    }
}

fn strings<T: ToString>(v: &[T]) -> Value {
    v.iter().map(|x| Value::String(x.to_string())).collect()
}

pub fn construct(args: ConstructArgs) -> Outcome {
    let need_s = || {
        args.s
            .as_deref()
            .ok_or_else(|| CommandResult::usage("--s is required for this target"))
            .and_then(|s| parse_rational_arg("s", s))
    };
    let (mut payload, spec, natural) = match args.target {
        TargetArg::NcfExp => {
            let s = need_s()?;
            let c = construct_ncf_exponent(&s, args.k_max).map_err(err)?;
            let natural = c.marks.last().map(|m| m.to_usize().unwrap_or(usize::MAX));
            let companion = match &c.companion {
                Some(comp) => spec_to_json(comp, None).map_err(err)?,
                None => Value::Null,
            };
            let payload = json!({
                "target": "ncf_exp",
                "s": s.to_string(),
                "k_max": args.k_max,
                "c": strings(&c.c),
                "marks": strings(&c.marks),
                "companion": companion,
            });
            (payload, c.spec, natural)
        }
        TargetArg::LcfExp => {
            let s = need_s()?;
            let c = construct_lcf_exponent(&s, args.k_max).map_err(err)?;
            let payload = json!({
                "target": "lcf_exp",
                "s": s.to_string(),
                "k_max": args.k_max,
                "m": strings(&c.m),
                "blocks_in_spec": c.blocks_in_spec,
                "companion": spec_to_json(&c.companion, None).map_err(err)?,
            });
            (payload, c.spec, None)
        }
        TargetArg::AdamsDavison => {
            let b: BigInt = args
                .b
                .trim()
                .parse()
                .map_err(|_| CommandResult::usage(format!("--b: `{}` is not an integer", args.b)))?;
            let (alpha, period) = match (&args.alpha_inverse, &args.alpha_period) {
                (Some(inv), _) => (AlphaSource::AlphaInverse(parse_int_list("alpha-inverse", inv)?), None),
                (None, Some(p)) => {
                    let p = parse_int_list("alpha-period", p)?;
                    (AlphaSource::Period(p.clone()), Some(p))
                }
                (None, None) => (AlphaSource::Period(vec![BigInt::from(1)]), Some(vec![BigInt::from(1)])),
            };
            let ad = construct_adams_davison(&alpha, &b, args.n_max).map_err(err)?;
            let mut payload = json!({
                "target": "adams_davison",
                "b": ad.b.to_string(),
                "n_max": args.n_max,
                "raw_head": ad.raw_head.to_string(),
                "raw_terms": strings(&ad.raw_terms),
                "signed_terms": terms_to_json(&ad.signed_terms),
                "q": strings(&ad.q[1..]),
                "normalized": ad.normalized,
            });
            if let Some(p) = period {
                let mu = periodic_quadratic_mu(&p).map_err(err)?;
                payload["exact_mu"] = json!({ "expression": mu.mu.to_string(), "decimal": mu.decimal(12) });
            }
            (payload, ad.spec, None)
        }
        TargetArg::Named => {
            let family = args
                .family
                .as_deref()
                .ok_or_else(|| CommandResult::usage("--family is required for target named"))?;
            let params = parse_params(&args.params)?;
            let spec = spec_from_json(&json!({ "family": family, "params": params })).map_err(err)?;
            (json!({ "target": "named", "family": family }), spec, None)
        }
    };
    let (depth, note) = emitted(&spec, args.depth, natural);
    let doc = spec_to_json(&spec, Some(depth)).map_err(err)?;
    if let Some(path) = &args.out {
        write_doc(path, &doc)?;
    }
    let terms = spec.terms_to(depth.min(spec.available().unwrap_or(depth))).map_err(err)?;
    payload["depth"] = json!(terms.len());
    payload["spec"] = doc;
    let mut res = CommandResult::ok(payload).with_table(term_table(spec.head(), &terms));
    if let Some(n) = note {
        res = res.note(n);
    }
    Ok(res)
}

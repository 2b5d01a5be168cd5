//! Python bindings: `srcf.CF` plus the constructors, with reports returned as
//! plain dicts and exact values as `int` and `fractions.Fraction`.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use srcf_core::constructors::{
    construct_adams_davison, construct_lcf_exponent, construct_ncf_exponent, AlphaSource,
};
use srcf_core::exponent::{
    check_conditions, check_encad, default_constants, estimate_mu, periodic_quadratic_mu,
    verify_sandwich, BoundConstants, Condition, Method,
};
use srcf_core::interchange::{
    alignment_to_json, enclosure_to_json, spec_from_json, spec_from_str, spec_to_json,
};
use srcf_core::transforms::{
    certify_equivalence, lcf_to_rcf, ncf_to_rcf, rcf_to_ncf, srcf_to_rcf, TransformResult,
};
use srcf_core::{
    check_invariants, convergents, enclose, inspect, tail_bound, CfError, CfSpec, PartialQuotient,
    Sign,
};

create_exception!(srcf, SrcfError, PyValueError, "Raised for invalid input or failed preconditions.");

fn py_err(e: CfError) -> PyErr {
    SrcfError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| SrcfError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| SrcfError::new_err(e.to_string()))
}

/// A rational given as `Fraction`, `int` or a `"p/q"` / decimal string.
#[derive(FromPyObject)]
enum RationalArg {
    Int(BigInt),
    Frac(BigRational),
    Text(String),
}

impl RationalArg {
    fn get(self) -> PyResult<BigRational> {
        match self {
            RationalArg::Int(i) => Ok(BigRational::from_integer(i)),
            RationalArg::Frac(r) => Ok(r),
            RationalArg::Text(s) => srcf_core::interchange::rational_from_str(&s).map_err(py_err),
        }
    }
}

/// A semi-regular continued fraction `b_0 + a_1/(b_1 + a_2/(b_2 + ...))`.
#[pyclass(name = "CF", module = "srcf", frozen)]
struct Cf {
    spec: CfSpec,
}

fn sign_of(a: i64) -> PyResult<Sign> {
    Sign::from_i64(a).ok_or_else(|| SrcfError::new_err(format!("numerator must be +1 or -1, got {a}")))
}

#[pymethods]
impl Cf {
    /// Explicit expansion from the head and `(a, b)` pairs. With
    /// `terminates=False` the terms are a prefix of an infinite expansion.
    #[new]
    #[pyo3(signature = (head, terms, terminates = false))]
    fn new(head: BigInt, terms: Vec<(i64, BigInt)>, terminates: bool) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(a, b)| Ok(PartialQuotient::new(sign_of(a)?, b)))
            .collect::<PyResult<Vec<_>>>()?;
        let spec = if terminates {
            CfSpec::finite(head, terms)
        } else {
            CfSpec::prefix(head, terms)
        };
        Ok(Cf { spec })
    }

    /// Named family, e.g. `CF.family("constant_ncf", b=3)`.
    #[staticmethod]
    #[pyo3(signature = (name, **params))]
    fn family(name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let params = match params {
            Some(p) => from_py(p.as_any())?,
            None => Value::Object(Default::default()),
        };
        let doc = serde_json::json!({ "family": name, "params": params });
        Ok(Cf {
            spec: spec_from_json(&doc).map_err(py_err)?,
        })
    }

    /// Reads the JSON interchange format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Cf {
            spec: spec_from_str(text).map_err(py_err)?,
        })
    }

    /// JSON interchange document with the first `depth` terms.
    #[pyo3(signature = (depth = None))]
    fn to_json(&self, depth: Option<usize>) -> PyResult<String> {
        Ok(spec_to_json(&self.spec, depth).map_err(py_err)?.to_string())
    }

    #[getter]
    fn head(&self) -> BigInt {
        self.spec.head().clone()
    }

    /// Number of stored terms, or `None` for an unbounded rule.
    #[getter]
    fn available(&self) -> Option<usize> {
        self.spec.available()
    }

    #[getter]
    fn terminates(&self) -> bool {
        self.spec.terminates()
    }

    /// `(a_n, b_n)` for `1 <= n <= count`.
    fn terms(&self, count: usize) -> PyResult<Vec<(i64, BigInt)>> {
        let terms = self.spec.terms_to(count).map_err(py_err)?;
        Ok(terms.into_iter().map(|t| (t.a.to_i64(), t.b)).collect())
    }

    /// Classification and admissibility report for terms `1..=depth`.
    fn validate<'py>(&self, py: Python<'py>, depth: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &inspect(&self.spec, depth).map_err(py_err)?)
    }

    /// `(p_n, q_n)` for `0 <= n <= n_max`.
    fn convergents(&self, n_max: usize) -> PyResult<Vec<(BigInt, BigInt)>> {
        let rows = convergents(&self.spec, n_max).map_err(py_err)?;
        Ok(rows.into_iter().map(|c| (c.p, c.q)).collect())
    }

    /// Exact value of the truncation after `n` terms.
    fn finite_value(&self, n: usize) -> PyResult<BigRational> {
        srcf_core::finite_value(&self.spec, n).map_err(py_err)
    }

    /// Range of the tail `x_{n+1}` as a dict with `lo`, `hi` and openness flags.
    fn tail_bound<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &tail_bound(&self.spec, n).map_err(py_err)?)
    }

    /// Certified `(lo, hi)` around the value.
    fn enclose(&self, depth: usize) -> PyResult<(BigRational, BigRational)> {
        let e = enclose(&self.spec, depth).map_err(py_err)?;
        Ok((e.lo, e.hi))
    }

    /// Enclosure with decimal renderings to `digits` places.
    #[pyo3(signature = (depth, digits = 20))]
    fn value<'py>(&self, py: Python<'py>, depth: usize, digits: u32) -> PyResult<Bound<'py, PyAny>> {
        let e = enclose(&self.spec, depth).map_err(py_err)?;
        to_py(py, &enclosure_to_json(&e, digits))
    }

    /// Exponent estimate; `method` is `form`, `form1` or `both`.
    #[pyo3(signature = (n_max, method = "both", window = 0.5))]
    fn mu<'py>(&self, py: Python<'py>, n_max: usize, method: &str, window: f64) -> PyResult<Bound<'py, PyAny>> {
        let method = Method::parse(method)
            .ok_or_else(|| SrcfError::new_err(format!("unknown method `{method}`")))?;
        to_py(py, &estimate_mu(&self.spec, n_max, method, window).map_err(py_err)?)
    }

    fn check_invariants<'py>(&self, py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &check_invariants(&self.spec, n_max).map_err(py_err)?)
    }

    fn check_conditions<'py>(&self, py: Python<'py>, start: usize, end: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &check_conditions(&self.spec, start, end).map_err(py_err)?)
    }

    fn check_encad<'py>(&self, py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &check_encad(&self.spec, n_max).map_err(py_err)?)
    }

    /// Sandwich check over `start..=end`. `constants` is a condition letter
    /// (`"A"`..`"D"`), a `(rho, sigma, tau)` tuple, or `None` for the first
    /// condition that holds.
    #[pyo3(signature = (start, end, constants = None, eval_depth = None))]
    fn verify_sandwich<'py>(
        &self,
        py: Python<'py>,
        start: usize,
        end: usize,
        constants: Option<&Bound<'py, PyAny>>,
        eval_depth: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let from_condition = |c: Condition| default_constants(&self.spec, c, start, end).map_err(py_err);
        let k = match constants {
            None => {
                let report = check_conditions(&self.spec, start, end).map_err(py_err)?;
                let c = report
                    .best()
                    .ok_or_else(|| SrcfError::new_err("none of the conditions A-D holds on the range"))?;
                from_condition(c)?
            }
            Some(obj) => match obj.extract::<String>() {
                Ok(letter) => {
                    let c = Condition::parse(&letter)
                        .ok_or_else(|| SrcfError::new_err(format!("unknown condition `{letter}`")))?;
                    from_condition(c)?
                }
                Err(_) => {
                    let (rho, sigma, tau): (RationalArg, RationalArg, RationalArg) = obj.extract()?;
                    BoundConstants::new(rho.get()?, sigma.get()?, tau.get()?).map_err(py_err)?
                }
            },
        };
        let eval = eval_depth.unwrap_or((2 * end).max(end + 2));
        let report = verify_sandwich(&self.spec, &k, start, end, eval).map_err(py_err)?;
        let out = to_py(py, &report)?;
        out.set_item("verdict", format!("{:?}", report.verdict()).to_lowercase())?;
        Ok(out)
    }

    /// Rewrites the first `depth` terms; `mode` is `ncf2rcf`, `rcf2ncf`,
    /// `lcf2rcf` or `srcf2rcf`.
    fn convert(&self, mode: &str, depth: usize) -> PyResult<Transform> {
        let f = match mode {
            "ncf2rcf" => ncf_to_rcf,
            "rcf2ncf" => rcf_to_ncf,
            "lcf2rcf" => lcf_to_rcf,
            "srcf2rcf" => srcf_to_rcf,
            _ => return Err(SrcfError::new_err(format!("unknown mode `{mode}`"))),
        };
        Ok(Transform {
            source: self.spec.clone(),
            result: f(&self.spec, depth).map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        let shown = self.spec.available().unwrap_or(6).min(6);
        let terms: Vec<String> = self
            .spec
            .terms_to(shown)
            .unwrap_or_default()
            .iter()
            .map(|t| format!("({}, {})", t.a.to_i64(), t.b))
            .collect();
        let more = if self.spec.available() == Some(shown) { "" } else { ", ..." };
        format!("CF({}; {}{})", self.spec.head(), terms.join(", "), more)
    }
}

/// Output of `CF.convert`: the new expansion and its alignment with the source.
#[pyclass(module = "srcf", frozen)]
struct Transform {
    source: CfSpec,
    result: TransformResult,
}

#[pymethods]
impl Transform {
    #[getter]
    fn output(&self) -> Cf {
        Cf {
            spec: self.result.output.clone(),
        }
    }

    /// `identity`, `one_plus` (`alpha = 1 + beta`) or `two_minus` (`alpha = 2 - beta`).
    #[getter]
    fn relation(&self) -> &'static str {
        self.result.relation.name()
    }

    #[getter]
    fn withheld(&self) -> usize {
        self.result.withheld
    }

    /// Points where source and output truncations are equal.
    #[getter]
    fn alignment<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &alignment_to_json(&self.result.alignment))
    }

    /// Checks every alignment point exactly and compares enclosures.
    #[pyo3(signature = (tolerance = None))]
    fn certify(&self, tolerance: Option<RationalArg>) -> PyResult<bool> {
        let tol = match tolerance {
            Some(t) => t.get()?,
            None => BigRational::from_integer(1.into()),
        };
        let r = &self.result;
        certify_equivalence(&self.source, &r.output, &r.alignment, r.relation, &tol).map_err(py_err)
    }
}

/// NCF with irrationality exponent `s` and its regular companion.
#[pyfunction]
#[pyo3(signature = (s, k_max = 8))]
fn construct_ncf<'py>(py: Python<'py>, s: RationalArg, k_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let c = construct_ncf_exponent(&s.get()?, k_max).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("spec", Cf { spec: c.spec })?;
    d.set_item("companion", c.companion.map(|spec| Cf { spec }))?;
    d.set_item("c", c.c)?;
    d.set_item("marks", c.marks)?;
    Ok(d)
}

/// Lehner expansion with irrationality exponent `s` and its regular companion.
#[pyfunction]
#[pyo3(signature = (s, k_max = 8))]
fn construct_lcf<'py>(py: Python<'py>, s: RationalArg, k_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let c = construct_lcf_exponent(&s.get()?, k_max).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("spec", Cf { spec: c.spec })?;
    d.set_item("companion", Cf { spec: c.companion })?;
    d.set_item("m", c.m)?;
    d.set_item("blocks_in_spec", c.blocks_in_spec)?;
    Ok(d)
}

/// Expansion of `(b-1) sum_{k>=1} b^{-floor(k alpha)}`. `alpha` is given by
/// its period (`alpha = [c_1; c_2, ..., c_1, ...]`, default golden ratio) or
/// by the regular quotients of `1/alpha`.
#[pyfunction]
#[pyo3(signature = (b = BigInt::from(2), alpha_period = None, alpha_inverse = None, n_max = 25))]
fn adams_davison<'py>(
    py: Python<'py>,
    b: BigInt,
    alpha_period: Option<Vec<BigInt>>,
    alpha_inverse: Option<Vec<BigInt>>,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let alpha = match (alpha_period, alpha_inverse) {
        (Some(_), Some(_)) => return Err(SrcfError::new_err("give alpha_period or alpha_inverse, not both")),
        (None, Some(inv)) => AlphaSource::AlphaInverse(inv),
        (Some(p), None) => AlphaSource::Period(p),
        (None, None) => AlphaSource::Period(vec![BigInt::from(1)]),
    };
    let ad = construct_adams_davison(&alpha, &b, n_max).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("spec", Cf { spec: ad.spec })?;
    d.set_item("raw_head", ad.raw_head)?;
    d.set_item("raw_terms", ad.raw_terms)?;
    d.set_item("q", ad.q[1..].to_vec())?;
    d.set_item("normalized", ad.normalized)?;
    Ok(d)
}

/// Exact exponent `1 + max beta_n` for the Adams–Davison expansion with the
/// given period, as `(expression, decimal)`.
#[pyfunction]
#[pyo3(signature = (period, digits = 12))]
fn periodic_mu(period: Vec<BigInt>, digits: u32) -> PyResult<(String, String)> {
    let mu = periodic_quadratic_mu(&period).map_err(py_err)?;
    Ok((mu.mu.to_string(), mu.decimal(digits)))
}

/// Names of the registered families.
#[pyfunction]
fn families<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
    PyList::new(py, srcf_core::FAMILIES)
}

#[pymodule]
pub fn srcf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SrcfError", m.py().get_type::<SrcfError>())?;
    m.add_class::<Cf>()?;
    m.add_class::<Transform>()?;
    m.add_function(wrap_pyfunction!(construct_ncf, m)?)?;
    m.add_function(wrap_pyfunction!(construct_lcf, m)?)?;
    m.add_function(wrap_pyfunction!(adams_davison, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_mu, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    Ok(())
}

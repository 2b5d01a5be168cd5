//! Exact arithmetic for semi-regular continued fractions
//! `b_0 + a_1/(b_1 + a_2/(b_2 + ...))` with `a_n = ±1` and `b_n >= 1`.
//!
//! The crate computes convergents and certified value enclosures, converts
//! between negative, regular, Lehner and general semi-regular expansions,
//! estimates and verifies irrationality exponents, and builds expansions with
//! a prescribed exponent.

pub mod cf;
pub mod constructors;
pub mod convergents;
pub mod error;
pub mod exponent;
pub mod families;
pub mod fixed;
pub mod interchange;
pub mod quadratic;
pub mod transforms;

pub use cf::{inspect, validate, CfClass, CfSpec, ClassReport, PartialQuotient, Provenance, Run, Sign};
pub use constructors::{
    construct_adams_davison, construct_lcf_exponent, construct_ncf_exponent, AdamsDavison, AlphaSource,
    LcfExponent, NcfExponent,
};
pub use convergents::{
    approx_error, check_invariants, convergents, enclose, finite_value, tail_bound, ApproxError, Convergent,
    ConvergentTable, Enclosure, InvariantReport, TailBound,
};
pub use error::{CfError, Result, Violation, ViolationRule};
pub use exponent::{
    check_conditions, check_encad, default_constants, estimate_mu, lambda_series, periodic_quadratic_mu,
    verify_sandwich, BoundConstants, Condition, ConditionReport, EncadReport, ExponentReport, Method, PeriodicMu,
    SandwichReport, Verdict,
};
pub use families::{family_generator, FAMILIES};
pub use quadratic::QuadSurd;
pub use transforms::{
    certify_equivalence, equivalence_report, lcf_decompose, lcf_to_rcf, ncf_to_rcf, rcf_to_ncf, srcf_to_rcf,
    AlignmentPoint, EquivalenceReport, LehnerRuns, Relation, TransformResult,
};

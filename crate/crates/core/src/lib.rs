//! Exact-arithmetic engine for polynomial differential operators acting on
//! the Segal-Bargmann space, and the complex they generate.
//!
//! The crate is organized around a small tower:
//! - [`scalar`]: Gaussian rationals and multiindices — every symbolic value
//!   in the crate is exact.
//! - [`weyl`]: the Weyl algebra (normal-ordered operators, products,
//!   adjoints, commutators) and a text DSL for entering operators.
//! - [`fock`]: polynomials as Fock-space elements with exact inner products
//!   in units of πⁿ.
//! - [`forms`]: (p,0)-forms and the operators D, D*, and the box operator.
//! - [`estimates`]: the commutator quadratic form, the energy identity, the
//!   degree-2 condition checkers with coercivity constants, and a
//!   counterexample scanner.
//! - [`spectral`]: floating-point truncations in one dimension — coercivity
//!   bounds and canonical solutions of Du = α.

pub mod error;
pub mod estimates;
pub mod fock;
pub mod forms;
pub mod scalar;
pub mod spectral;
pub mod weyl;

mod dsl;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{CoreError, Result};
pub use estimates::{
    check_conditions_dim2, commutator_expansion, commutator_identity_1d,
    decompose_quadratic_form, energy_identity_check, quadratic_form, scan_counterexample,
    scan_counterexample_with, ConditionVerdict, CounterexampleHit, QuadraticFormReport,
    SignChoice, TheoremTag,
};
pub use fock::{fock_inner, norm_sq, FockPoly, FockScalar};
pub use forms::{box_apply, d_apply, dstar_apply, duality_check, OperatorFamily, PForm};
pub use scalar::{factorial, GaussianRational, MultiIndex};
pub use spectral::{
    assemble_d_1d, assemble_dstar_1d, coercivity_bound_1d, solve_canonical_1d, CanonicalSolution,
    CoercivityReport, TruncatedOperator,
};
pub use weyl::{hamil_expansion, parse_operator, SymbolPoly, WeylOp};

//! Exact-arithmetic factorization invariants of numerical monoids.
//!
//! A numerical monoid is the set of non-negative integer combinations of a
//! finite set of positive generators with greatest common divisor 1. This
//! crate computes its factorization invariants from the definitions (catenary
//! degree, tame degree, elasticity, Betti elements, Apéry sets), evaluates
//! closed forms for two- and three-generator monoids, constructs
//! Dirichlet-prime generator families stratified by a shape parameter,
//! falsifies candidate polynomial formulas for invariants against those
//! families, and produces exact linear-algebra certificates that no low-degree
//! polynomial interpolates an invariant across strata.
//!
//! All arithmetic is exact: machine integers with checked operations and
//! explicit range guards in the enumeration core, and arbitrary-precision
//! integers and rationals everywhere values can grow (closed-form
//! intermediates, polynomial evaluation, matrix elimination).

pub mod closedform;
pub mod falsifier;
pub mod families;
pub mod invariants;
pub mod linalg;
pub mod monoid;
pub mod poly;
pub mod primes;

pub use closedform::{cat2, cat3, comp3_lambdas, ClosedForm3, ClosedFormError, LambdaForms};
pub use falsifier::{
    degree_certificate, eval_candidate, eval_candidate_values, explicit_to_implicit, falsify,
    parse_formula, CandidateValues, CertificateOutcome, Counterexample, DegreeCertificate,
    FalsifierError, FalsifyOutcome, FormulaBody, FormulaCandidate, FormulaKind, InvariantKind,
};
pub use families::{
    audit_record, comp3_generate, dirichlet_find, strata_dataset, DirichletQuery, FamilyError,
    GenerateOptions, StrataDataset, StratumRecord, Verification,
};
pub use invariants::{
    betti_elements, catenary, catenary_of_element, elasticity, invariant_report,
    positive_catenary_set, tame, tame_local, InvariantError, InvariantReport,
};
pub use monoid::{Factorization, MonoidError, NumericalMonoid};
pub use poly::{parse_polynomial, MultiPoly, ParseError};

//! Exact construction of large subsets of the line that contain no infinite
//! arithmetic progression, with certificates showing why each progression
//! leaves them.
//!
//! The interval algebra is generic over the endpoint type; the aliases below
//! name the instantiations used throughout the crate.

pub mod construction;
pub mod equidist;
pub mod error;
pub mod escape;
pub(crate) mod exact_str;
pub mod finite_complement;
pub mod interval_set;
pub mod quadratic;
pub mod real;
pub mod scalar;
pub mod spec;

pub use construction::{
    avoiding_set_for_lambda, base_cell, beta, block_index, cell, cell_residue,
    choose_mu_for_lambda, choose_n_for_lambda, contains, contains_1d, deleted_subinterval,
    exclusion, exclusion_1d, scaled_set_for_lambda, window, BlockIndex, BlockWitness, Exclusion,
};
pub use equidist::{equidist_stats, EquidistDiagnostics};
pub use error::{Error, Result};
pub use escape::{
    block_conditions, certify_escape_rational, certify_escape_search, claim1_verify,
    count_in_half_open, verify_certificate, ClaimOneReport, ConstructiveDetail, EscapeCertificate,
    HypothesisCheck, Method, Progression, SearchOutcome,
};
pub use finite_complement::{find_two_sided_ap, verify_ap_avoids, ApWitness};
pub use interval_set::IntervalSet;
pub use quadratic::QuadraticNumber;
pub use real::{CertifiedReal, Oracle, RealKind};
pub use scalar::{ceil_div, frac_rational, parse_rational, ExactField, Rational, Scalar};
pub use spec::SetSpec;

/// Interval sets with exact rational endpoints: every window of `S(N)`.
pub type RationalIntervalSet = IntervalSet<Rational>;
/// Interval sets with endpoints in a quadratic field, for scaled intersections.
pub type QuadraticIntervalSet = IntervalSet<QuadraticNumber>;
/// Floating-point interval sets, for plotting output only.
pub type FloatIntervalSet = IntervalSet<f64>;

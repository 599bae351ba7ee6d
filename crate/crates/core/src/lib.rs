//! Exact arithmetic over GF(2^r), binary Kloosterman sums and their power
//! moments, the trace statistics of SL(2,q) and O(3,q), and the weight
//! distributions of the binary codes built from those traces.
//!
//! All results are exact integers or rationals; nothing is rounded.

pub mod charsums;
pub mod codes;
pub mod error;
pub mod field;
pub mod groups;
pub mod identities;
pub mod matrix;
pub mod report;
pub mod suite;

pub use charsums::{gl_kloosterman, kloosterman, moments, KloostermanTable, MomentTable};
pub use codes::{
    analytic_dual_spectrum, build_trace_vector, code_length, d_sequence, dual_weight_spectrum,
    macwilliams, weight_distribution_dp, DualSpectrum, Mode, TraceVector, WeightDistribution,
};
pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElement, FieldSpec};
pub use groups::{
    gauss_sum_formula, group_order, trace_distribution, GroupKind, TraceDistribution,
};
pub use identities::{
    first_moment_closed_forms, mk_recursion, pless_check, stirling2, t1k_recursion, StirlingTable,
};
pub use matrix::Matrix;
pub use report::{Row, Status, VerificationReport};
pub use suite::{run_suite, Check, SuiteConfig};

//! Lucas sequences `u_n`, `v_n` with `x_n = P x_{n-1} + x_{n-2}` modulo powers
//! of 3: evaluation, 3-adic valuations, shortest periods, brute-force residue
//! censuses and the closed-form frequency predictor.

pub mod census;
pub mod discrepancy;
pub mod error;
pub mod identities;
pub mod modulus;
pub mod period;
pub mod predictor;
pub mod sequence;
pub mod valuation;

pub use census::{
    aggregate_lift_holds, census, census_with, check_lift_refinement, class_counts,
    lift_refinement_counterexample, omega, stability_report, Census, Histogram, IndexClass,
    IndexSelection, OmegaSet, StabilityReport,
};
pub use discrepancy::DiscrepancyFlag;
pub use error::{LucasError, Result};
pub use identities::{check_identity, run_identity_suite, IdentityGrid, IdentityName};
pub use modulus::{Modulus3Pow, K_MAX};
pub use period::{
    period_bruteforce, period_bruteforce_with, period_closed, PeriodResult, SearchOptions,
};
pub use predictor::{
    classify, predicted_freq, predicted_histogram, verify, verify_with, Prediction, Predictor,
    TheoremCase, VerificationReport,
};
pub use sequence::{eval_exact, eval_mod, LucasParams, SequenceKind};
pub use valuation::{delta_of, ord3, Branch, DeltaProfile, Valuation};

//! Numerical verification of `‖Θ∘(id - T)‖◇ ≤ (d/√2)‖id - T‖◇` and of the
//! supporting lemmas, plus tools for probing why the bound is never tight.

mod lemmas;
mod search;
mod theorem;
mod uhlmann;
mod witness;

pub use lemmas::{
    lemma_suite, run_trial, trial_dimension, trial_seed, LemmaSuiteReport, LemmaTally, Statement, TrialOutcome,
    LEMMA_TOL,
};
pub use search::{search_max_ratio, theorem_ratio, Move, SearchResult, TracePoint, FRESH_PER_TEN, PERTURBATION};
pub use theorem::{
    sweep_task, task_seed, theorem_sweep, verify_theorem, verify_theorem_with, AscentPair, CertificatePair, EnvMode,
    VerificationReport, VerifyOptions, ALPHA, THEOREM_TOL,
};
pub use uhlmann::{
    rank_defect, uhlmann_unitary, RankDefectReport, UhlmannResult, MARGINAL_TOL, RANK_TOL, SPECTRUM_TOL, UNITARY_TOL,
};
pub use witness::{
    equality_witness_analysis, gap_demonstration, EqualityAnalysis, GapWitness, REVIEW_FLOOR, STRICT_GAP, TIGHT_TOL,
};

//! Randomized checks of every lemma and identity used by the inequality and
//! by the equality-gap argument.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{id_minus, random_channel, seeded_rng, Channel};
use crate::error::Result;
use crate::linalg::random::{gaussian_matrix, random_density, random_traceless_hermitian};
use crate::linalg::{
    hermitian_trace_norm, hs_norm, kron, lift_k, partial_trace, partial_transpose, swap_operator, trace_norm, vec,
    BipartiteOperator, ComplexMatrix, Factor,
};

/// Largest violation accepted for any statement.
pub const LEMMA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    /// `‖X‖₂ ≤ ‖X‖₁/√2` for traceless Hermitian `X`.
    TracelessHs,
    /// `‖Y‖₁ ≤ √N ‖Y‖₂`.
    CauchySchwarz,
    /// `‖(Θ⊗id)(X)‖₂ = ‖X‖₂`.
    PartialTransposeIsometry,
    /// `tr_H((T⊗id)(Z)) = tr_H(Z)`.
    PartialTraceInvariance,
    /// `tr_H((Φ⊗id)(ρ)) = 0` for `Φ = id - T`.
    TraceHVanishes,
    /// `(M⊗N)|vec A> = |vec(M A Nᵀ)>`.
    VecIdentity,
    /// `F(X⊗Y) = (Y⊗X)F`.
    SwapIdentity,
    /// `(Θ⊗id)(|vec A><vec B|) = (id⊗Aᵀ) F (id⊗B*)`.
    PartialTransposeOuter,
}

impl Statement {
    pub const ALL: [Statement; 8] = [
        Statement::TracelessHs,
        Statement::CauchySchwarz,
        Statement::PartialTransposeIsometry,
        Statement::PartialTraceInvariance,
        Statement::TraceHVanishes,
        Statement::VecIdentity,
        Statement::SwapIdentity,
        Statement::PartialTransposeOuter,
    ];

    pub fn formula(self) -> &'static str {
        match self {
            Self::TracelessHs => "||X||_2 <= ||X||_1/sqrt(2), X = X^dag, tr X = 0",
            Self::CauchySchwarz => "||Y||_1 <= sqrt(N) ||Y||_2",
            Self::PartialTransposeIsometry => "||(Theta x id)(X)||_2 = ||X||_2",
            Self::PartialTraceInvariance => "tr_H((T x id)(Z)) = tr_H(Z)",
            Self::TraceHVanishes => "tr_H(((id - T) x id)(rho)) = 0",
            Self::VecIdentity => "(M x N)|vec A> = |vec(M A N^T)>",
            Self::SwapIdentity => "F(X x Y) = (Y x X)F",
            Self::PartialTransposeOuter => "(Theta x id)(|vec A><vec B|) = (id x A^T) F (id x B^*)",
        }
    }

    fn is_inequality(self) -> bool {
        matches!(self, Self::TracelessHs | Self::CauchySchwarz)
    }
}

/// One trial: `violation` is how far the statement fails (0 when it holds),
/// `slack` is `rhs - lhs` for inequalities.
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub violation: f64,
    pub slack: Option<f64>,
}

fn inequality(lhs: f64, rhs: f64) -> TrialOutcome {
    TrialOutcome {
        violation: (lhs - rhs).max(0.0),
        slack: Some(rhs - lhs),
    }
}

fn identity(err: f64) -> TrialOutcome {
    TrialOutcome {
        violation: err,
        slack: None,
    }
}

fn random_channel_from(rng: &mut ChaCha8Rng, d: usize) -> Channel {
    let env = [1, d, d * d][rng.random_range(0..3)];
    random_channel(d, env, rng.random())
}

fn bipartite(d: usize, m: ComplexMatrix) -> BipartiteOperator {
    BipartiteOperator::new(d, d, m).expect("square d² matrix")
}

/// Runs one random instance of `statement` at dimension `d`.
pub fn run_trial(statement: Statement, d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let n = d * d;
    Ok(match statement {
        Statement::TracelessHs => {
            let x = random_traceless_hermitian(rng, n);
            inequality(hs_norm(&x), hermitian_trace_norm(&x)? / std::f64::consts::SQRT_2)
        }
        Statement::CauchySchwarz => {
            let y = gaussian_matrix(rng, n, n);
            inequality(trace_norm(&y)?, (n as f64).sqrt() * hs_norm(&y))
        }
        Statement::PartialTransposeIsometry => {
            let x = bipartite(d, gaussian_matrix(rng, n, n));
            identity((hs_norm(partial_transpose(&x).matrix()) - hs_norm(x.matrix())).abs())
        }
        Statement::PartialTraceInvariance => {
            let t = random_channel_from(rng, d);
            let z = bipartite(d, gaussian_matrix(rng, n, n));
            let tz = t.apply_extended(&z)?;
            identity(partial_trace(&tz, Factor::H).max_abs_diff(&partial_trace(&z, Factor::H)))
        }
        Statement::TraceHVanishes => {
            let t = random_channel_from(rng, d);
            let rho = bipartite(d, random_density(rng, n));
            let x = id_minus(&t).apply_extended(&rho)?;
            identity(partial_trace(&x, Factor::H).max_abs())
        }
        Statement::VecIdentity => {
            let m = gaussian_matrix(rng, d, d);
            let nn = gaussian_matrix(rng, d, d);
            let a = gaussian_matrix(rng, d, d);
            let lhs = kron(&m, &nn).mul_vec(&vec(&a)?);
            let rhs = vec(&(&(&m * &a) * &nn.transpose()))?;
            identity(lhs.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max))
        }
        Statement::SwapIdentity => {
            let f = swap_operator(d).into_matrix();
            let x = gaussian_matrix(rng, d, d);
            let y = gaussian_matrix(rng, d, d);
            let lhs = &f * &kron(&x, &y);
            let rhs = &kron(&y, &x) * &f;
            identity(lhs.max_abs_diff(&rhs))
        }
        Statement::PartialTransposeOuter => {
            let a = gaussian_matrix(rng, d, d);
            let b = gaussian_matrix(rng, d, d);
            let outer = bipartite(d, ComplexMatrix::outer(&vec(&a)?, &vec(&b)?));
            let lhs = partial_transpose(&outer).into_matrix();
            let f = swap_operator(d).into_matrix();
            let rhs = &(&lift_k(d, &a.transpose()) * &f) * &lift_k(d, &b.conj());
            identity(lhs.max_abs_diff(&rhs))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaTally {
    pub statement: Statement,
    pub formula: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub max_violation: f64,
    /// Smallest `rhs - lhs` seen (inequalities only).
    pub min_slack: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub tallies: Vec<LemmaTally>,
    pub pass: bool,
}

/// Dimension used by trial `t` (cycles through 2, 3, 4).
pub fn trial_dimension(t: usize) -> usize {
    [2, 3, 4][t % 3]
}

/// Seed of trial `t` of statement number `s`.
pub fn trial_seed(seed: u64, s: usize, t: usize) -> u64 {
    seed ^ (((s as u64) << 32) | t as u64)
}

fn tally(statement: Statement, index: usize, seed: u64, trials: usize) -> Result<LemmaTally> {
    let mut max_violation = 0.0f64;
    let mut min_slack: Option<f64> = None;
    let mut passed = 0;
    for t in 0..trials {
        let mut rng = seeded_rng(trial_seed(seed, index, t));
        let out = run_trial(statement, trial_dimension(t), &mut rng)?;
        max_violation = max_violation.max(out.violation);
        if let Some(s) = out.slack {
            min_slack = Some(min_slack.map_or(s, |m: f64| m.min(s)));
        }
        if out.violation <= LEMMA_TOL {
            passed += 1;
        }
    }
    debug_assert_eq!(min_slack.is_some(), statement.is_inequality() && trials > 0);
    Ok(LemmaTally {
        statement,
        formula: statement.formula(),
        trials,
        passed,
        max_violation,
        min_slack,
        pass: max_violation <= LEMMA_TOL,
    })
}

/// `trials` random instances of each of the eight statements.
pub fn lemma_suite(seed: u64, trials: usize) -> Result<LemmaSuiteReport> {
    if trials == 0 {
        return Err(crate::Error::InvalidArgument("trials must be at least 1".into()));
    }
    let run = |(i, s): (usize, &Statement)| tally(*s, i, seed, trials);
    #[cfg(feature = "parallel")]
    let tallies: Result<Vec<_>> = {
        use rayon::prelude::*;
        Statement::ALL.par_iter().enumerate().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let tallies: Result<Vec<_>> = Statement::ALL.iter().enumerate().map(run).collect();
    let tallies = tallies?;
    let pass = tallies.iter().all(|t| t.pass);
    Ok(LemmaSuiteReport {
        seed,
        trials,
        tolerance: LEMMA_TOL,
        tallies,
        pass,
    })
}

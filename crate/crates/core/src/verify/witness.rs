//! Why the two norm inequalities in the chain cannot be tight together.
//!
//! Equality in `‖X‖₂ ≤ ‖X‖₁/√2` forces a rank-2 spectrum `{t, -t}`, while
//! equality in `‖Y‖₁ ≤ d‖Y‖₂` for `Y = (Θ⊗id)(X)` forces `Y` to have all
//! singular values equal, hence full rank `d²`. When `X = (Φ⊗id)(ρ)` is
//! rank 2 its eigenvectors share a `K` marginal, so they differ by a unitary
//! `U` on `H`, and then `rank Y ≤ rank(I - Uᵀ⊗U*) ≤ d² - d`.

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{id_minus, Channel};
use crate::diamond::diamond_norm_ascent;
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eigenvalues, hs_norm, partial_trace, partial_transpose, singular_values, BipartiteOperator, Factor,
};

/// Relative tolerance for calling an inequality tight.
pub const TIGHT_TOL: f64 = 1e-9;

/// A slack above this is a strict gap.
pub const STRICT_GAP: f64 = 1e-8;

/// Slacks between [`TIGHT_TOL`] and [`STRICT_GAP`] are flagged for review.
pub const REVIEW_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityAnalysis {
    pub rank: usize,
    /// Exactly two nonzero eigenvalues, `t` and `-t`.
    pub balanced: bool,
    /// `‖X‖₂ = ‖X‖₁/√2`.
    pub lemma1_tight: bool,
    /// `(Θ⊗id)(X)` has all singular values equal.
    pub lemma2_tight_after_pt: bool,
    /// Both tight at once; expected never to happen for `X ≠ 0`.
    pub incompatible_pair: bool,
    pub spectrum: Vec<f64>,
    pub pt_singular_values: Vec<f64>,
}

/// Inspects a traceless Hermitian `X` on `H⊗K` for the two equality conditions.
pub fn equality_witness_analysis(x: &BipartiteOperator) -> Result<EqualityAnalysis> {
    let m = x.matrix();
    let spectrum = herm_eigenvalues(m).map_err(|_| Error::InvalidArgument("X is not Hermitian".into()))?;
    let scale = spectrum.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let tr: f64 = spectrum.iter().sum();
    if tr.abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::InvalidArgument(format!("X is not traceless (trace {tr:.3e})")));
    }
    let pt_sv = singular_values(partial_transpose(x).matrix());
    if scale == 0.0 {
        return Ok(EqualityAnalysis {
            rank: 0,
            balanced: false,
            lemma1_tight: false,
            lemma2_tight_after_pt: false,
            incompatible_pair: false,
            spectrum,
            pt_singular_values: pt_sv,
        });
    }

    let nonzero: Vec<f64> = spectrum.iter().copied().filter(|l| l.abs() > 1e-10 * scale).collect();
    let rank = nonzero.len();
    let balanced = rank == 2 && (nonzero[0] + nonzero[1]).abs() <= 1e-10 * scale;

    let trace_norm: f64 = spectrum.iter().map(|l| l.abs()).sum();
    let rhs = trace_norm / std::f64::consts::SQRT_2;
    let lemma1_tight = (rhs - hs_norm(m)) <= TIGHT_TOL * rhs;

    let smax = pt_sv.first().copied().unwrap_or(0.0);
    let smin = pt_sv.last().copied().unwrap_or(0.0);
    let lemma2_tight_after_pt = smax > 0.0 && (smax - smin) <= TIGHT_TOL * smax;

    Ok(EqualityAnalysis {
        rank,
        balanced,
        lemma1_tight,
        lemma2_tight_after_pt,
        incompatible_pair: lemma1_tight && lemma2_tight_after_pt,
        spectrum,
        pt_singular_values: pt_sv,
    })
}

/// Empirical witness that the chain is strict at an (approximate) optimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapWitness {
    pub d: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Best input found by ascent on `id - T`.
    pub psi: Vec<Complex64>,
    /// `‖X‖₁` at `psi`; a lower bound on `‖id - T‖◇`.
    pub r_lower: f64,
    pub rank_x: usize,
    pub rank_y: usize,
    pub spectrum_x: Vec<f64>,
    pub trace_x: f64,
    /// `max |tr_H X|`.
    pub trace_h_residual: f64,
    pub norm1_x: f64,
    pub norm2_x: f64,
    pub norm1_y: f64,
    /// `d‖X‖₂ - ‖Y‖₁`.
    pub slack_lemma2: f64,
    /// `(d/√2)‖X‖₁ - d‖X‖₂`.
    pub slack_lemma1: f64,
    pub total_slack: f64,
    pub corollary_ok: bool,
    /// At least one slack exceeds [`STRICT_GAP`].
    pub strict_gap: bool,
    /// Largest slack sits between [`REVIEW_FLOOR`] and [`STRICT_GAP`].
    pub needs_review: bool,
    pub analysis: EqualityAnalysis,
    pub label: &'static str,
}

/// Runs ascent on `id - T`, then measures both slacks at the maximizer.
pub fn gap_demonstration(t: &Channel, restarts: usize, seed: u64) -> Result<GapWitness> {
    let d = t.d();
    let phi = id_minus(t);
    if phi.is_zero() {
        return Err(Error::Precondition(
            "T is the identity channel; there is no gap to witness".into(),
        ));
    }
    let state = diamond_norm_ascent(&phi, restarts, seed)?;
    let rho = BipartiteOperator::pure(d, d, &state.psi)?;
    let x = phi.apply_extended(&rho)?;
    let y = partial_transpose(&x);

    let spectrum_x = herm_eigenvalues(x.matrix())?;
    let trace_x: f64 = spectrum_x.iter().sum();
    let trace_h_residual = partial_trace(&x, Factor::H).max_abs();
    let norm1_x: f64 = spectrum_x.iter().map(|l| l.abs()).sum();
    let norm2_x = hs_norm(x.matrix());
    let sv_y = singular_values(y.matrix());
    let norm1_y: f64 = sv_y.iter().sum();
    let df = d as f64;
    let slack_lemma2 = df * norm2_x - norm1_y;
    let slack_lemma1 = df / std::f64::consts::SQRT_2 * norm1_x - df * norm2_x;

    let scale = norm1_x.max(1e-300);
    let rank_of = |vals: &[f64]| vals.iter().filter(|v| v.abs() > 1e-10 * scale).count();
    let analysis = equality_witness_analysis(&x)?;
    let largest = slack_lemma1.max(slack_lemma2);

    Ok(GapWitness {
        d,
        seed,
        restarts,
        r_lower: state.value,
        psi: state.psi,
        rank_x: rank_of(&spectrum_x),
        rank_y: rank_of(&sv_y),
        spectrum_x,
        trace_x,
        trace_h_residual,
        norm1_x,
        norm2_x,
        norm1_y,
        slack_lemma2,
        slack_lemma1,
        total_slack: slack_lemma1 + slack_lemma2,
        corollary_ok: trace_x.abs() <= 1e-10 && trace_h_residual <= 1e-10,
        strict_gap: largest > STRICT_GAP,
        needs_review: largest > REVIEW_FLOOR && largest <= STRICT_GAP,
        analysis,
        label: "empirical witness",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{named_channel, phase_unitary, random_channel, ChannelFamily};
    use crate::linalg::{kron, ComplexMatrix};

    fn op(m: ComplexMatrix) -> BipartiteOperator {
        let d = (m.rows() as f64).sqrt() as usize;
        BipartiteOperator::new(d, d, m).unwrap()
    }

    #[test]
    fn balanced_rank_two_is_lemma1_tight_only() {
        let x = op(ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, -0.5]));
        let a = equality_witness_analysis(&x).unwrap();
        assert_eq!(a.rank, 2);
        assert!(a.balanced && a.lemma1_tight);
        assert!(!a.lemma2_tight_after_pt && !a.incompatible_pair);
    }

    #[test]
    fn flat_partial_transpose_is_lemma2_tight_only() {
        // σ_z ⊗ σ_x is fixed by the partial transpose and unitary
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let mut x = ComplexMatrix::zeros(2, 2);
        x.set(0, 1, crate::linalg::ONE);
        x.set(1, 0, crate::linalg::ONE);
        let a = equality_witness_analysis(&op(kron(&z, &x))).unwrap();
        assert_eq!(a.rank, 4);
        assert!(a.lemma2_tight_after_pt && !a.lemma1_tight && !a.incompatible_pair);
    }

    #[test]
    fn zero_operator_has_no_equality() {
        let a = equality_witness_analysis(&op(ComplexMatrix::zeros(4, 4))).unwrap();
        assert_eq!(a.rank, 0);
        assert!(!a.incompatible_pair);
    }

    #[test]
    fn rejects_invalid_operators() {
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set(0, 1, crate::linalg::ONE);
        assert!(equality_witness_analysis(&op(m)).is_err());
        assert!(equality_witness_analysis(&op(ComplexMatrix::identity(4))).is_err());
    }

    #[test]
    fn unitary_channel_witness_is_strict_in_second_link() {
        let t = named_channel(&ChannelFamily::Unitary(phase_unitary(2, 0.9)), 2).unwrap();
        let w = gap_demonstration(&t, 5, 1).unwrap();
        assert_eq!(w.rank_x, 2);
        assert!(w.slack_lemma1.abs() < 1e-9);
        assert!(w.slack_lemma2 > 1e-3 && w.strict_gap && w.corollary_ok);
        assert!(w.analysis.lemma1_tight && !w.analysis.lemma2_tight_after_pt);
        assert!(w.rank_y <= 2);
    }

    #[test]
    fn random_channel_witness() {
        let w = gap_demonstration(&random_channel(2, 4, 21), 5, 3).unwrap();
        assert!(w.strict_gap && w.corollary_ok && !w.analysis.incompatible_pair);
        assert!((w.total_slack - w.slack_lemma1 - w.slack_lemma2).abs() < 1e-15);
        assert_eq!(w.label, "empirical witness");
    }

    #[test]
    fn identity_channel_rejected() {
        assert!(matches!(
            gap_demonstration(&crate::channels::Channel::identity(2), 3, 0),
            Err(Error::Precondition(_))
        ));
    }
}

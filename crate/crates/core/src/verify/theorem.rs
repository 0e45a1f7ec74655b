use serde::Serialize;

use crate::channels::{compose_theta, id_minus, random_channel, Channel};
use crate::diamond::{diamond_norm_ascent, diamond_norm_sdp, DiamondResult};
use crate::error::Result;

/// `1/√2`, the constant of the inequality.
pub const ALPHA: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Slack allowed on `L ≤ (d/√2) R`.
pub const THEOREM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificatePair {
    #[serde(rename = "L")]
    pub l: DiamondResult,
    #[serde(rename = "R")]
    pub r: DiamondResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AscentPair {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

/// One evaluation of `‖Θ∘Φ‖◇ ≤ (d/√2)‖Φ‖◇` with `Φ = id - T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub d: usize,
    pub seed: u64,
    /// `‖Θ∘(id - T)‖◇`.
    #[serde(rename = "L")]
    pub l: f64,
    /// `‖id - T‖◇`.
    #[serde(rename = "R")]
    pub r: f64,
    pub bound: f64,
    /// `L / (d R)`, or 0 when `R = 0`.
    pub ratio: f64,
    pub alpha_bound: f64,
    pub pass: bool,
    /// `T = id`: both sides vanish.
    pub trivial: bool,
    pub certificates: CertificatePair,
    /// Ascent lower bounds; `None` when the cross-check was skipped.
    pub ascent: Option<AscentPair>,
    /// Ascent never exceeds the SDP upper certificate.
    pub cross_check_pass: bool,
    pub channel_description: String,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Restarts for the ascent cross-check; 0 skips it.
    pub ascent_restarts: usize,
    pub description: String,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            ascent_restarts: 2,
            description: String::new(),
        }
    }
}

pub fn verify_theorem(t: &Channel) -> Result<VerificationReport> {
    verify_theorem_with(t, &VerifyOptions::default())
}

pub fn verify_theorem_with(t: &Channel, opts: &VerifyOptions) -> Result<VerificationReport> {
    let d = t.d();
    let phi = id_minus(t);
    let theta_phi = compose_theta(&phi);
    let r_cert = diamond_norm_sdp(&phi)?;
    let l_cert = diamond_norm_sdp(&theta_phi)?;
    let (l, r) = (l_cert.value, r_cert.value);
    let trivial = phi.is_zero();
    let bound = d as f64 * ALPHA * r;
    let ratio = if r > 0.0 { l / (d as f64 * r) } else { 0.0 };

    let (ascent, cross_check_pass) = if opts.ascent_restarts > 0 && !trivial {
        let ar = diamond_norm_ascent(&phi, opts.ascent_restarts, opts.seed)?.value;
        let al = diamond_norm_ascent(&theta_phi, opts.ascent_restarts, opts.seed)?.value;
        let ok = ar <= r_cert.upper_certificate + THEOREM_TOL && al <= l_cert.upper_certificate + THEOREM_TOL;
        (Some(AscentPair { l: al, r: ar }), ok)
    } else {
        (None, true)
    };

    Ok(VerificationReport {
        d,
        seed: opts.seed,
        l,
        r,
        bound,
        ratio,
        alpha_bound: ALPHA,
        pass: l <= bound + THEOREM_TOL,
        trivial,
        certificates: CertificatePair { l: l_cert, r: r_cert },
        ascent,
        cross_check_pass,
        channel_description: opts.description.clone(),
    })
}

/// Environment dimensions used by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvMode {
    One,
    D,
    DSquared,
    /// Cycles through `1, d, d²`.
    Mixed,
}

impl EnvMode {
    pub fn env_for(self, d: usize, index: usize) -> usize {
        match self {
            Self::One => 1,
            Self::D => d,
            Self::DSquared => d * d,
            Self::Mixed => [1, d, d * d][index % 3],
        }
    }
}

impl std::str::FromStr for EnvMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Self::One),
            "d" => Ok(Self::D),
            "d2" => Ok(Self::DSquared),
            "mixed" => Ok(Self::Mixed),
            other => Err(crate::Error::Parse(format!(
                "unknown env mode '{other}' (expected 1, d, d2, mixed)"
            ))),
        }
    }
}

/// Seed of the `index`-th task in a sweep seeded with `seed`.
pub fn task_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Sweep task `index`: its channel and the options used to verify it.
pub fn sweep_task(d: usize, seed: u64, env: EnvMode, index: usize, ascent_restarts: usize) -> (Channel, VerifyOptions) {
    let s = task_seed(seed, index as u64);
    let e = env.env_for(d, index);
    (
        random_channel(d, e, s),
        VerifyOptions {
            seed: s,
            ascent_restarts,
            description: format!("random:env={e},seed={s}"),
        },
    )
}

/// Verifies `samples` Haar-random channels. Results are in task order and do
/// not depend on how tasks are scheduled.
pub fn theorem_sweep(
    d: usize,
    samples: usize,
    seed: u64,
    env: EnvMode,
    ascent_restarts: usize,
) -> Vec<Result<VerificationReport>> {
    let run = |i: usize| {
        let (ch, opts) = sweep_task(d, seed, env, i, ascent_restarts);
        verify_theorem_with(&ch, &opts)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..samples).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..samples).map(run).collect()
    }
}

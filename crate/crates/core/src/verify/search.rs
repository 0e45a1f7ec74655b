use serde::Serialize;

use crate::channels::{compose_theta, id_minus, seeded_rng, Channel};
use crate::diamond::diamond_norm_sdp;
use crate::error::{Error, Result};
use crate::linalg::random::{gaussian_matrix, haar_isometry, orthonormalize_columns};
use crate::linalg::ComplexMatrix;

/// Out of every ten iterations, this many draw a fresh channel; the rest
/// perturb the current best.
pub const FRESH_PER_TEN: usize = 7;

/// Size of the Gaussian kick applied to the best Stinespring isometry.
pub const PERTURBATION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Fresh,
    Perturb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub kind: Move,
    pub env: usize,
    /// `None` when the SDP failed for this candidate.
    pub ratio: Option<f64>,
    pub best_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub d: usize,
    pub seed: u64,
    pub budget: usize,
    pub best_ratio: f64,
    pub best_iteration: Option<usize>,
    pub best_env: usize,
    pub best_channel: Channel,
    pub trace: Vec<TracePoint>,
    pub failures: usize,
}

/// `L / (d R)` for `T`; 0 when `T = id`.
pub fn theorem_ratio(t: &Channel) -> Result<f64> {
    let phi = id_minus(t);
    if phi.is_zero() {
        return Ok(0.0);
    }
    let r = diamond_norm_sdp(&phi)?.value;
    let l = diamond_norm_sdp(&compose_theta(&phi))?.value;
    Ok(if r > 0.0 { l / (t.d() as f64 * r) } else { 0.0 })
}

/// Random search for channels that push `L / (d R)` up.
///
/// Iteration `i` draws from a generator seeded with `seed ^ i`. Fresh draws
/// cycle the environment through `1, d, d²` (iteration 0 is a unitary
/// channel); perturbations kick the best Stinespring isometry and
/// re-orthonormalize it.
pub fn search_max_ratio(d: usize, budget: usize, seed: u64) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    let envs = [1, d, d * d];
    let mut best: Option<(f64, usize, usize, ComplexMatrix)> = None;
    let mut trace = Vec::with_capacity(budget);
    let mut failures = 0;

    for i in 0..budget {
        let mut rng = seeded_rng(seed ^ i as u64);
        let (kind, env, v) = match &best {
            Some((_, _, env, v)) if i % 10 >= FRESH_PER_TEN => {
                let kick = gaussian_matrix(&mut rng, v.rows(), v.cols()).scale(PERTURBATION);
                (Move::Perturb, *env, orthonormalize_columns(&(v + &kick)))
            }
            _ => {
                let env = envs[i % envs.len()];
                (Move::Fresh, env, haar_isometry(&mut rng, d * env, d))
            }
        };
        let channel = Channel::from_stinespring(d, env, &v)?;
        let ratio = match theorem_ratio(&channel) {
            Ok(r) => Some(r),
            Err(Error::SolverFailure { .. }) => {
                failures += 1;
                None
            }
            Err(e) => return Err(e),
        };
        if let Some(r) = ratio {
            if best.as_ref().is_none_or(|(b, ..)| r > *b) {
                best = Some((r, i, env, v));
            }
        }
        trace.push(TracePoint {
            iteration: i,
            kind,
            env,
            ratio,
            best_ratio: best.as_ref().map_or(0.0, |b| b.0),
        });
    }

    let (best_ratio, best_iteration, best_env, best_channel) = match best {
        Some((r, i, env, v)) => (r, Some(i), env, Channel::from_stinespring(d, env, &v)?),
        None => (0.0, None, 1, Channel::identity(d)),
    };
    Ok(SearchResult {
        d,
        seed,
        budget,
        best_ratio,
        best_iteration,
        best_env,
        best_channel,
        trace,
        failures,
    })
}

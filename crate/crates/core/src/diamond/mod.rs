//! Diamond norm by two independent routes (a certified SDP and a multi-start
//! pure-state ascent) plus the pointwise quantities `L(ρ)` and `R(ρ)`.
//!
//! The ancilla is always taken to have the same dimension as the system.

mod ascent;
mod problem;
pub mod sdp;

use serde::{Deserialize, Serialize};

pub use ascent::{ascent_objective, diamond_norm_ascent, diamond_norm_ascent_with, AscentOptions, AscentState};
pub use problem::{diamond_norm_sdp, diamond_norm_sdp_with, SdpOptions};

use crate::channels::{compose_theta, id_minus, Channel};
use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, hermitian_trace_norm, partial_transpose, trace_norm, BipartiteOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sdp,
    Ascent,
}

/// A diamond-norm value bracketed by certificates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondResult {
    pub value: f64,
    #[serde(rename = "lower")]
    pub lower_certificate: f64,
    #[serde(rename = "upper")]
    pub upper_certificate: f64,
    pub gap: f64,
    pub method: Method,
    pub iterations: usize,
}

impl DiamondResult {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            lower_certificate: value,
            upper_certificate: value,
            gap: 0.0,
            method,
            iterations: 0,
        }
    }

    /// Midpoint of the bracket. Rounding can leave `upper` a hair below
    /// `lower`; the bracket is then collapsed.
    pub fn from_bounds(lower: f64, upper: f64, iterations: usize, method: Method) -> Self {
        let upper = upper.max(lower);
        Self {
            value: 0.5 * (lower + upper),
            lower_certificate: lower,
            upper_certificate: upper,
            gap: upper - lower,
            method,
            iterations,
        }
    }
}

/// `L(ρ)` and `R(ρ)` for `Φ = id - T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseLR {
    /// `‖(Θ∘Φ ⊗ id)(ρ)‖₁`.
    pub l: f64,
    /// `‖(Φ ⊗ id)(ρ)‖₁`.
    pub r: f64,
    /// `(d/√2) R`.
    pub bound: f64,
}

/// Density-matrix tolerance for inputs to [`pointwise_lr`].
pub const DENSITY_TOL: f64 = 1e-10;

pub(crate) fn check_density(rho: &BipartiteOperator) -> Result<()> {
    let spectrum =
        herm_eigenvalues(rho.matrix()).map_err(|_| Error::InvalidArgument("input state is not Hermitian".into()))?;
    let tr: f64 = spectrum.iter().sum();
    let min = spectrum.last().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL || (tr - 1.0).abs() > DENSITY_TOL {
        return Err(Error::InvalidArgument(format!(
            "input is not a density matrix (trace {tr:.3e}, min eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

pub fn pointwise_lr(t: &Channel, rho: &BipartiteOperator) -> Result<PointwiseLR> {
    let d = t.d();
    if rho.dh() != d || rho.dk() != d {
        return Err(Error::Dimension(format!(
            "state on {}x{} for a channel on d={d}",
            rho.dh(),
            rho.dk()
        )));
    }
    check_density(rho)?;
    let phi = id_minus(t);
    let x = phi.apply_extended(rho)?;
    let r = hermitian_trace_norm(x.matrix())?;
    let l = trace_norm(partial_transpose(&x).matrix())?;
    Ok(PointwiseLR {
        l,
        r,
        bound: d as f64 / std::f64::consts::SQRT_2 * r,
    })
}

/// `Θ ∘ (id - T)`, the left-hand map of the inequality.
pub fn theta_id_minus(t: &Channel) -> crate::channels::SuperOperator {
    compose_theta(&id_minus(t))
}

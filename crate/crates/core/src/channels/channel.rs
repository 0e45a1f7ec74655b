use serde::{Deserialize, Deserializer, Serialize};

use super::superop::SuperOperator;
use crate::error::{Error, Result};
use crate::linalg::{kron, spectral_norm, BipartiteOperator, ComplexMatrix};

/// Trace-preservation tolerance enforced at construction.
pub const TP_TOL: f64 = 1e-10;

/// CPTP map on `L(C^d)` in Kraus form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    d: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CptpReport {
    pub tp_error: f64,
    pub pass: bool,
}

impl Channel {
    /// Validates shapes and trace preservation (within [`TP_TOL`]).
    pub fn new(d: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(d, kraus)?;
        let report = ch.is_cptp(TP_TOL);
        if !report.pass {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not trace preserving (error {:.3e})",
                report.tp_error
            )));
        }
        Ok(ch)
    }

    /// Shape checks only; used to inspect candidate Kraus lists.
    pub fn new_unchecked(d: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidChannel("d must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus list".into()));
        }
        for (k, e) in kraus.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator {k} is {}x{}, expected {d}x{d}",
                    e.rows(),
                    e.cols()
                )));
            }
            if !e.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { d, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖Σ E_k† E_k - I‖_∞` against `tol`.
    pub fn is_cptp(&self, tol: f64) -> CptpReport {
        let mut sum = ComplexMatrix::zeros(self.d, self.d);
        for e in &self.kraus {
            sum = &sum + &(&e.adjoint() * e);
        }
        let tp_error = spectral_norm(&(&sum - &ComplexMatrix::identity(self.d)));
        CptpReport {
            tp_error,
            pass: tp_error <= tol,
        }
    }

    /// `T(X) = Σ E_k X E_k†`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for e in &self.kraus {
            out = &out + &(&(e * x) * &e.adjoint());
        }
        out
    }

    /// `Σ (E_k ⊗ I) X (E_k ⊗ I)†`.
    pub fn apply_extended(&self, x: &BipartiteOperator) -> Result<BipartiteOperator> {
        if x.dh() != self.d {
            return Err(Error::Dimension(format!(
                "channel on d={} applied to H factor of dimension {}",
                self.d,
                x.dh()
            )));
        }
        let id_k = ComplexMatrix::identity(x.dk());
        let mut out = ComplexMatrix::zeros(x.matrix().rows(), x.matrix().cols());
        for e in &self.kraus {
            let lifted = kron(e, &id_k);
            out = &out + &(&(&lifted * x.matrix()) * &lifted.adjoint());
        }
        BipartiteOperator::new(x.dh(), x.dk(), out)
    }

    /// Transfer matrix `Σ E_k ⊗ E_k*`.
    pub fn to_superop(&self) -> SuperOperator {
        let n = self.d * self.d;
        let mut t = ComplexMatrix::zeros(n, n);
        for e in &self.kraus {
            t = &t + &kron(e, &e.conj());
        }
        SuperOperator::new(self.d, t).expect("Kraus transfer has d² x d² shape")
    }

    /// Stacks the Kraus operators into the isometry `V = Σ E_k ⊗ |k>`,
    /// rows indexed H-major by (output, environment).
    pub fn stinespring(&self) -> ComplexMatrix {
        let env = self.kraus.len();
        ComplexMatrix::from_fn(self.d * env, self.d, |row, col| {
            let (a, k) = (row / env, row % env);
            self.kraus[k].get(a, col)
        })
    }

    /// Inverse of [`Channel::stinespring`].
    pub fn from_stinespring(d: usize, env: usize, v: &ComplexMatrix) -> Result<Self> {
        if v.rows() != d * env || v.cols() != d {
            return Err(Error::Dimension(format!(
                "isometry for d={d}, env={env} must be {}x{d}",
                d * env
            )));
        }
        let kraus = (0..env)
            .map(|k| ComplexMatrix::from_fn(d, d, |a, i| v.get(a * env + k, i)))
            .collect();
        Self::new(d, kraus)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            kraus: Vec<ComplexMatrix>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Channel::new(raw.d, raw.kraus).map_err(serde::de::Error::custom)
    }
}

/// `Φ = id - T`.
pub fn id_minus(t: &Channel) -> SuperOperator {
    SuperOperator::identity(t.d())
        .sub(&t.to_superop())
        .expect("identity and channel share d")
}

/// `Θ ∘ S`.
pub fn compose_theta(s: &SuperOperator) -> SuperOperator {
    SuperOperator::transpose_map(s.d())
        .compose(s)
        .expect("transpose map built with matching d")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_channel_is_cptp() {
        let r = Channel::identity(3).is_cptp(1e-10);
        assert_eq!(r.tp_error, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn half_identity_fails_tp() {
        let ch = Channel::new_unchecked(2, vec![ComplexMatrix::identity(2).scale(0.5)]).unwrap();
        let r = ch.is_cptp(1e-10);
        assert!((r.tp_error - 0.75).abs() < 1e-15);
        assert!(!r.pass);
        assert!(Channel::new(2, vec![ComplexMatrix::identity(2).scale(0.5)]).is_err());
    }

    #[test]
    fn rejects_bad_kraus_shapes() {
        assert!(Channel::new(2, vec![]).is_err());
        assert!(Channel::new(2, vec![ComplexMatrix::identity(3)]).is_err());
    }

    #[test]
    fn identity_transfer_and_id_minus() {
        let t = Channel::identity(2).to_superop();
        assert_eq!(t.transfer(), &ComplexMatrix::identity(4));
        assert!(id_minus(&Channel::identity(2)).is_zero());
    }

    #[test]
    fn channel_json_round_trip() {
        let ch = Channel::identity(2);
        let s = serde_json::to_string(&ch).unwrap();
        assert!(s.starts_with(r#"{"d":2,"kraus":[{"rows":2"#));
        let back: Channel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
        let bad = r#"{"d":2,"kraus":[{"rows":2,"cols":2,"entries":[[0.5,0],[0,0],[0,0],[0.5,0]]}]}"#;
        assert!(serde_json::from_str::<Channel>(bad).is_err());
    }
}

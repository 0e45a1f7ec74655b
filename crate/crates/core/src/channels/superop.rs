use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hs_norm, pair_index, swap_operator, unvec, vec, BipartiteOperator, ComplexMatrix, ONE};

/// Linear map on `L(C^d)` as its `d² x d²` transfer matrix:
/// `vec(Φ(X)) = transfer · vec(X)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperOperator {
    d: usize,
    transfer: ComplexMatrix,
}

impl SuperOperator {
    pub fn new(d: usize, transfer: ComplexMatrix) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("d must be positive".into()));
        }
        if transfer.rows() != d * d || transfer.cols() != d * d {
            return Err(Error::Dimension(format!(
                "transfer matrix for d={d} must be {0}x{0}, got {1}x{2}",
                d * d,
                transfer.rows(),
                transfer.cols()
            )));
        }
        if !transfer.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, transfer })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d,
            transfer: ComplexMatrix::identity(d * d),
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            transfer: ComplexMatrix::zeros(d * d, d * d),
        }
    }

    /// Transposition `Θ(X) = Xᵀ`; its transfer matrix is the swap.
    pub fn transpose_map(d: usize) -> Self {
        Self {
            d,
            transfer: swap_operator(d).into_matrix(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn transfer(&self) -> &ComplexMatrix {
        &self.transfer
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SuperOperator) -> Result<Self> {
        self.check_same_d(inner)?;
        Ok(Self {
            d: self.d,
            transfer: &self.transfer * &inner.transfer,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            d: self.d,
            transfer: self.transfer.scale(c),
        }
    }

    pub fn sub(&self, other: &SuperOperator) -> Result<Self> {
        self.check_same_d(other)?;
        Ok(Self {
            d: self.d,
            transfer: &self.transfer - &other.transfer,
        })
    }

    /// Adjoint with respect to the Hilbert–Schmidt inner product.
    pub fn adjoint(&self) -> Self {
        Self {
            d: self.d,
            transfer: self.transfer.adjoint(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.transfer.max_abs() == 0.0
    }

    fn check_same_d(&self, other: &SuperOperator) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Dimension(format!(
                "maps act on different dimensions ({} vs {})",
                self.d, other.d
            )));
        }
        Ok(())
    }

    /// `Φ(X)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d || x.cols() != self.d {
            return Err(Error::Dimension(format!(
                "map on d={} applied to a {}x{} matrix",
                self.d,
                x.rows(),
                x.cols()
            )));
        }
        unvec(&self.transfer.mul_vec(&vec(x)?))
    }

    /// `(Φ ⊗ id_K)(X)`.
    ///
    /// `X` is regrouped so that its `H` indices form the rows of a
    /// `d² x dK²` matrix, the transfer matrix acts on those rows, and the
    /// result is scattered back. See [`GroupedIndex`].
    pub fn apply_extended(&self, x: &BipartiteOperator) -> Result<BipartiteOperator> {
        if x.dh() != self.d {
            return Err(Error::Dimension(format!(
                "map on d={} applied to H factor of dimension {}",
                self.d,
                x.dh()
            )));
        }
        let grouping = GroupedIndex::new(self.d, x.dk());
        let grouped = grouping.group(x.matrix());
        let out = &self.transfer * &grouped;
        BipartiteOperator::new(self.d, x.dk(), grouping.ungroup(&out))
    }

    /// Maximum deviation of `Φ(E_ij†) - Φ(E_ij)†` over matrix units.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let out = self
                    .apply(&matrix_unit(d, i, j))
                    .expect("matrix unit has matching size");
                let out_t = self
                    .apply(&matrix_unit(d, j, i))
                    .expect("matrix unit has matching size");
                worst = worst.max(out_t.max_abs_diff(&out.adjoint()));
            }
        }
        worst
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * hs_norm(&self.transfer).max(1.0)
    }

    /// Largest `|tr Φ(E_ij)|` over matrix units.
    pub fn trace_defect(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let out = self
                    .apply(&matrix_unit(d, i, j))
                    .expect("matrix unit has matching size");
                worst = worst.max(out.trace().norm());
            }
        }
        worst
    }
}

impl<'de> Deserialize<'de> for SuperOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            transfer: ComplexMatrix,
        }
        let raw = Raw::deserialize(deserializer)?;
        SuperOperator::new(raw.d, raw.transfer).map_err(serde::de::Error::custom)
    }
}

/// `E_ij = |i><j|`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d, d);
    e.set(i, j, ONE);
    e
}

/// Index bijection between an operator on `H ⊗ K` and its grouped form.
///
/// Entry `((i, j), (k, l))` of the operator (H-major pairs) maps to entry
/// `((i, k), (j, l))` of a `d² x dK²` matrix whose row index is the `vec`
/// position of the `H` block entry `(i, k)`.
#[derive(Debug, Clone)]
pub struct GroupedIndex {
    d: usize,
    dk: usize,
    /// `source[r * dK² + c]` = flat row-major position in the operator.
    source: Vec<usize>,
}

impl GroupedIndex {
    pub fn new(d: usize, dk: usize) -> Self {
        let n = d * dk;
        let mut source = vec![0; d * d * dk * dk];
        for i in 0..d {
            for j in 0..dk {
                for k in 0..d {
                    for l in 0..dk {
                        let row = pair_index(i, k, d);
                        let col = pair_index(j, l, dk);
                        let flat = pair_index(i, j, dk) * n + pair_index(k, l, dk);
                        source[row * dk * dk + col] = flat;
                    }
                }
            }
        }
        Self { d, dk, source }
    }

    /// Flat-position map; a permutation of `0..(d·dK)²`.
    pub fn permutation(&self) -> &[usize] {
        &self.source
    }

    pub fn group(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.d * self.dk;
        let cols = self.dk * self.dk;
        ComplexMatrix::from_fn(self.d * self.d, cols, |r, c| {
            let flat = self.source[r * cols + c];
            x.get(flat / n, flat % n)
        })
    }

    pub fn ungroup(&self, g: &ComplexMatrix) -> ComplexMatrix {
        let n = self.d * self.dk;
        let cols = self.dk * self.dk;
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..self.d * self.d {
            for c in 0..cols {
                let flat = self.source[r * cols + c];
                out.set(flat / n, flat % n, g.get(r, c));
            }
        }
        out
    }
}

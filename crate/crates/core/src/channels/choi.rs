use serde::Serialize;

use super::superop::SuperOperator;
use crate::error::Result;
use crate::linalg::{herm_eigenvalues, pair_index, partial_trace, BipartiteOperator, ComplexMatrix, Factor};

/// Unnormalized Choi matrix `J(Φ) = Σ_ij Φ(E_ij) ⊗ E_ij`.
///
/// The first factor carries the output of `Φ`, the second the input, so
/// `J(id) = |vec(I)><vec(I)|` with trace `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChoiMatrix {
    d: usize,
    matrix: BipartiteOperator,
}

impl ChoiMatrix {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn operator(&self) -> &BipartiteOperator {
        &self.matrix
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    /// Smallest eigenvalue; negative means `Φ` is not completely positive.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eigenvalues(self.matrix())?.last().copied().unwrap_or(0.0))
    }

    /// Partial trace over the output factor; `I` for trace-preserving maps.
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, Factor::H)
    }

    /// Rebuilds the transfer matrix.
    pub fn to_superop(&self) -> SuperOperator {
        let d = self.d;
        let j = self.matrix();
        let t = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (a, b) = (row / d, row % d);
            let (i, jj) = (col / d, col % d);
            j.get(pair_index(a, i, d), pair_index(b, jj, d))
        });
        SuperOperator::new(d, t).expect("Choi reshuffle keeps d² x d² shape")
    }
}

/// `J(S)`: a reshuffle of the transfer matrix,
/// `J[(a,i),(b,j)] = transfer[(a,b),(i,j)]`.
pub fn superop_choi(s: &SuperOperator) -> ChoiMatrix {
    let d = s.d();
    let t = s.transfer();
    let n = d * d;
    let mut j = ComplexMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            for i in 0..d {
                for jj in 0..d {
                    j.set(
                        pair_index(a, i, d),
                        pair_index(b, jj, d),
                        t.get(pair_index(a, b, d), pair_index(i, jj, d)),
                    );
                }
            }
        }
    }
    ChoiMatrix {
        d,
        matrix: BipartiteOperator::new(d, d, j).expect("choi has (d·d)² shape"),
    }
}

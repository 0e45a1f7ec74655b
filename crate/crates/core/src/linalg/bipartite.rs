//! Tensor-product structure on `H ⊗ K`.
//!
//! Composite basis vectors `|i>_H ⊗ |j>_K` are ordered H-major: the pair
//! `(i, j)` sits at index `i * dK + j`. Every routine here (and `kron`, `vec`)
//! goes through [`pair_index`] so the ordering is defined in exactly one place.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Composite index of `|i>_H ⊗ |j>_K` when `K` has dimension `dk`.
#[inline]
pub fn pair_index(i: usize, j: usize, dk: usize) -> usize {
    i * dk + j
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    H,
    K,
}

/// Operator on `H ⊗ K` tagged with its factor dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteOperator {
    dh: usize,
    dk: usize,
    matrix: ComplexMatrix,
}

impl BipartiteOperator {
    pub fn new(dh: usize, dk: usize, matrix: ComplexMatrix) -> Result<Self> {
        if dh == 0 || dk == 0 {
            return Err(Error::Dimension("factor dimensions must be positive".into()));
        }
        let n = dh * dk;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!(
                "bipartite operator with dH={dh}, dK={dk} needs a {n}x{n} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dh, dk, matrix })
    }

    pub fn zeros(dh: usize, dk: usize) -> Self {
        Self {
            dh,
            dk,
            matrix: ComplexMatrix::zeros(dh * dk, dh * dk),
        }
    }

    /// `|psi><psi|` for a vector on `H ⊗ K`.
    pub fn pure(dh: usize, dk: usize, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != dh * dk {
            return Err(Error::Dimension(format!(
                "state of length {} on a {dh}x{dk} system",
                psi.len()
            )));
        }
        Self::new(dh, dk, ComplexMatrix::outer(psi, psi))
    }

    pub fn dh(&self) -> usize {
        self.dh
    }

    pub fn dk(&self) -> usize {
        self.dk
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Entry at `((i, j), (k, l))`.
    pub fn block_entry(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.matrix.get(pair_index(i, j, self.dk), pair_index(k, l, self.dk))
    }
}

/// Kronecker product `A ⊗ B` in H-major order.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out.set(pair_index(i, k, br), pair_index(j, l, bc), aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// `|vec(A)> = Σ A_ij |i> ⊗ |j>`, so `A_ij` lands at index `i*d + j`.
pub fn vec(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let d = a.ensure_square()?;
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            v[pair_index(i, j, d)] = a.get(i, j);
        }
    }
    Ok(v)
}

/// Inverse of [`vec`].
pub fn unvec(v: &[Complex64]) -> Result<ComplexMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != v.len() {
        return Err(Error::Dimension(format!(
            "vector length {} is not a positive perfect square",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[pair_index(i, j, d)]))
}

/// Partial trace over `which`; tracing `H` leaves a `dK x dK` operator.
pub fn partial_trace(x: &BipartiteOperator, which: Factor) -> ComplexMatrix {
    let (dh, dk) = (x.dh, x.dk);
    match which {
        Factor::K => ComplexMatrix::from_fn(dh, dh, |i, k| (0..dk).map(|j| x.block_entry(i, j, k, j)).sum()),
        Factor::H => ComplexMatrix::from_fn(dk, dk, |j, l| (0..dh).map(|i| x.block_entry(i, j, i, l)).sum()),
    }
}

/// `(Θ ⊗ id)(X)`: transpose on the `H` factor only.
pub fn partial_transpose(x: &BipartiteOperator) -> BipartiteOperator {
    let (dh, dk) = (x.dh, x.dk);
    let n = dh * dk;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..dh {
        for j in 0..dk {
            for k in 0..dh {
                for l in 0..dk {
                    out.set(pair_index(i, j, dk), pair_index(k, l, dk), x.block_entry(k, j, i, l));
                }
            }
        }
    }
    BipartiteOperator { dh, dk, matrix: out }
}

/// Swap `F(|i> ⊗ |j>) = |j> ⊗ |i>` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> BipartiteOperator {
    let n = d * d;
    let mut f = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            f.set(pair_index(j, i, d), pair_index(i, j, d), ONE);
        }
    }
    BipartiteOperator {
        dh: d,
        dk: d,
        matrix: f,
    }
}

/// `I_dh ⊗ B`.
pub fn lift_k(dh: usize, b: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(dh), b)
}

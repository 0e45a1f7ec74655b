//! Dense complex linear algebra: norms, factorizations, and the tensor
//! primitives (`kron`, `vec`, swap, partial trace and transpose).

mod bipartite;
mod decomp;
mod matrix;
pub mod random;

pub use bipartite::{
    kron, lift_k, pair_index, partial_trace, partial_transpose, swap_operator, unvec, vec, BipartiteOperator, Factor,
};
pub use decomp::{
    eigenvalues, herm_eig, herm_eigenvalues, hermitian_trace_norm, hs_norm, numerical_rank, psd_sqrt, singular_values,
    spectral_norm, symmetrize, trace_norm, HermitianEigen, DEFAULT_RANK_TOL, HERMITIAN_TOL,
};
pub use matrix::{ComplexMatrix, I, ONE, ZERO};

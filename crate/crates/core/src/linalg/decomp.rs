use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Asymmetry (spectral norm of `H - H†`) accepted before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative threshold for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.as_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `tr sqrt(M† M)`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_square()?;
    Ok(singular_values(m).iter().sum())
}

/// Frobenius norm `sqrt(tr M† M)`.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.as_nalgebra().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let v = self.vectors.as_nalgebra();
        v.column(k).iter().copied().collect()
    }

    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.as_nalgebra();
        let n = self.values.len();
        let mut scaled = v.clone();
        for k in 0..n {
            let s = f(self.values[k]);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= s);
        }
        ComplexMatrix::from_nalgebra(scaled * v.adjoint())
    }
}

/// Symmetrizes `h` when its asymmetry is within tolerance.
///
/// The tolerance is `HERMITIAN_TOL` scaled by `max(1, ‖h‖_F)` so that large
/// operators carrying proportional rounding drift are still accepted.
pub fn symmetrize(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    h.ensure_square()?;
    let asym = h - &h.adjoint();
    let asym_norm = if asym.max_abs() == 0.0 {
        0.0
    } else {
        spectral_norm(&asym)
    };
    if asym_norm > HERMITIAN_TOL * hs_norm(h).max(1.0) {
        return Err(Error::NotHermitian(asym_norm));
    }
    Ok(h.hermitian_part())
}

/// Eigenvalues (descending, stable on ties) and an orthonormal eigenbasis.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let sym = symmetrize(h)?;
    let n = sym.rows();
    let eig = SymmetricEigen::new(sym.into_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::from_nalgebra(vectors),
    })
}

/// Eigenvalues only, descending.
pub fn herm_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = symmetrize(h)?;
    let mut v: Vec<f64> = sym.into_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Trace norm of a Hermitian matrix via its spectrum.
pub fn hermitian_trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigenvalues(h)?.iter().map(|l| l.abs()).sum())
}

/// Deflation threshold for the Schur iteration. Machine epsilon can stall on
/// exactly repeated eigenvalues.
const SCHUR_EPS: f64 = 1e-14;

/// Eigenvalues of a general square matrix from its complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.ensure_square()?;
    let schur = Schur::try_new(m.as_nalgebra().clone(), SCHUR_EPS, 10_000)
        .ok_or_else(|| Error::Domain("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|k| t[(k, k)]).collect())
}

/// Positive square root of a PSD matrix; negative eigenvalues are clipped.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn trace_norm_of_diagonals() {
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!((trace_norm(&z).unwrap() - 2.0).abs() < 1e-15);
        let t = 0.5;
        let m = ComplexMatrix::from_real_diagonal(&[t, -t, 0.0]);
        assert!((trace_norm(&m).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            trace_norm(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn hs_and_spectral_norms() {
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!((hs_norm(&z) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(hs_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        let m = ComplexMatrix::from_real_diagonal(&[0.5, -0.5, 0.0]);
        assert!((hs_norm(&m) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((spectral_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&ComplexMatrix::from_real_diagonal(&[3.0, -1.0])) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_sorts_descending() {
        let e = herm_eig(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, ONE);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
        // tiny drift is symmetrized away
        m.set(0, 1, Complex64::new(1e-13, 0.0));
        assert!(herm_eig(&m).is_ok());
    }

    #[test]
    fn rank_of_zero_is_zero() {
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(4, 4), DEFAULT_RANK_TOL), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3), DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn schur_eigenvalues_of_diagonal_unitary() {
        let u = ComplexMatrix::diagonal(&[ONE, Complex64::new(0.0, 1.0)]);
        let mut ev = eigenvalues(&u).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - ONE).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    /// Cyclic Jacobi on the real symmetric embedding `[[Re, -Im], [Im, Re]]`
    /// of a Hermitian matrix. Each eigenvalue appears twice in the embedding.
    #[allow(clippy::needless_range_loop)]
    fn jacobi_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
        let n = h.rows();
        let m = 2 * n;
        let mut a = vec![vec![0.0f64; m]; m];
        for i in 0..n {
            for j in 0..n {
                let z = h.get(i, j);
                a[i][j] = z.re;
                a[i + n][j + n] = z.re;
                a[i][j + n] = -z.im;
                a[i + n][j] = z.im;
            }
        }
        for _sweep in 0..100 {
            let off: f64 = (0..m)
                .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..m {
                for q in p + 1..m {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..m {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..m {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        ev.into_iter().step_by(2).collect()
    }

    fn sample(seed: u64, n: usize) -> ComplexMatrix {
        let mut rng = crate::channels::seeded_rng(seed);
        crate::linalg::random::gaussian_matrix(&mut rng, n, n)
    }

    #[test]
    fn singular_values_match_jacobi_on_gram_matrix() {
        for (seed, n) in [(1, 2), (2, 3), (3, 4), (4, 6), (5, 9)] {
            let m = sample(seed, n);
            let gram = &m.adjoint() * &m;
            let oracle: Vec<f64> = jacobi_eigenvalues(&gram)
                .into_iter()
                .map(|l| l.max(0.0).sqrt())
                .collect();
            let sv = singular_values(&m);
            for (a, b) in sv.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10 * (1.0 + b), "{sv:?} vs {oracle:?}");
            }
            let tn: f64 = oracle.iter().sum();
            assert!((trace_norm(&m).unwrap() - tn).abs() < 1e-9);
        }
    }

    #[test]
    fn herm_eig_matches_jacobi_and_reconstructs() {
        for (seed, n) in [(11, 2), (12, 4), (13, 9)] {
            let mut rng = crate::channels::seeded_rng(seed);
            let h = crate::linalg::random::random_hermitian(&mut rng, n);
            let e = herm_eig(&h).unwrap();
            for (a, b) in e.values.iter().zip(jacobi_eigenvalues(&h)) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!(e.reconstruct_with(|l| l).max_abs_diff(&h) < 1e-12);
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
            let tn: f64 = e.values.iter().map(|l| l.abs()).sum();
            assert!((hermitian_trace_norm(&h).unwrap() - tn).abs() < 1e-12);
            assert!((trace_norm(&h).unwrap() - tn).abs() < 1e-10);
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = crate::channels::seeded_rng(21);
        let rho = crate::linalg::random::random_density(&mut rng, 4);
        let r = psd_sqrt(&rho).unwrap();
        assert!((&r * &r).max_abs_diff(&rho) < 1e-12);
        assert!(r.max_abs_diff(&r.adjoint()) < 1e-14);
    }

    #[test]
    fn rank_counts_relative_to_largest() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, 1e-12, 0.5]);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), 2);
        assert_eq!(numerical_rank(&m.scale(1e6), DEFAULT_RANK_TOL), 2);
    }

    #[test]
    fn schur_eigenvalues_of_random_unitary_lie_on_circle() {
        let mut rng = crate::channels::seeded_rng(31);
        let u = crate::linalg::random::haar_unitary(&mut rng, 4);
        let ev = eigenvalues(&u).unwrap();
        let det: Complex64 = ev.iter().product();
        let det_lu = u.as_nalgebra().clone().determinant();
        assert!((det - det_lu).norm() < 1e-12);
        for z in ev {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }
}

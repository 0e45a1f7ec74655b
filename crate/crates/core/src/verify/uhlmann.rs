use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, herm_eig, kron, singular_values, unvec, vec, ComplexMatrix, ONE};

/// Largest `‖tr_H|ψ><ψ| - tr_H|φ><φ|‖` accepted by [`uhlmann_unitary`].
pub const MARGINAL_TOL: f64 = 1e-8;

/// Tolerance for unitarity and for matching spectra in [`rank_defect`].
pub const UNITARY_TOL: f64 = 1e-10;
pub const SPECTRUM_TOL: f64 = 1e-9;
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct UhlmannResult {
    pub unitary: ComplexMatrix,
    /// `min_θ ‖(U⊗I)ψ - e^{iθ} φ‖`.
    pub residual: f64,
    /// Global phase `e^{iθ}` attaining the residual.
    pub phase: Complex64,
}

/// Orthonormal basis of the complement of the column span of `p`
/// (given as orthonormal vectors).
fn complement(p: &[Vec<Complex64>], d: usize) -> Result<Vec<Vec<Complex64>>> {
    let mut proj = ComplexMatrix::identity(d);
    for v in p {
        proj = &proj - &ComplexMatrix::outer(v, v);
    }
    let eig = herm_eig(&proj)?;
    Ok((0..d - p.len()).map(|k| eig.vector(k)).collect())
}

/// A unitary `U` on `H` with `(U⊗I)|ψ> = e^{iθ}|φ>`, for unit vectors on
/// `H⊗K` with equal `K` marginals.
///
/// On the support the map is fixed by the Schmidt data; off the support the
/// complements are paired in eigen-solver order. The global phase is chosen
/// so the largest-magnitude entry of `U` is real and positive.
pub fn uhlmann_unitary(psi: &[Complex64], phi: &[Complex64]) -> Result<UhlmannResult> {
    if psi.len() != phi.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            psi.len(),
            phi.len()
        )));
    }
    let a = unvec(psi)?;
    let b = unvec(phi)?;
    let d = a.rows();

    // the K marginal of |vec A> is the conjugate of A†A
    let ma = &a.adjoint() * &a;
    let mb = &b.adjoint() * &b;
    let mismatch = ma.max_abs_diff(&mb);
    if mismatch > MARGINAL_TOL {
        return Err(Error::Precondition(format!(
            "reduced states on K differ by {mismatch:.3e}"
        )));
    }

    let svd = a.as_nalgebra().clone().svd(true, true);
    let wa = svd.u.expect("requested U");
    let va_t = svd.v_t.expect("requested V");
    let sigma = &svd.singular_values;
    let top = sigma.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::InvalidArgument("zero vector".into()));
    }

    let mut from: Vec<Vec<Complex64>> = Vec::new();
    let mut to: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..d {
        if sigma[k] <= 1e-10 * top {
            continue;
        }
        // A v_k = s_k u_k  and  B v_k = s_k u'_k
        let v: Vec<Complex64> = (0..d).map(|j| va_t[(k, j)].conj()).collect();
        let bv = b.mul_vec(&v);
        from.push((0..d).map(|i| wa[(i, k)]).collect());
        to.push(bv.iter().map(|z| z / sigma[k]).collect());
    }
    let from_rest = complement(&from, d)?;
    let to_rest = complement(&to, d)?;
    from.extend(from_rest);
    to.extend(to_rest);

    let mut u = ComplexMatrix::zeros(d, d);
    for (t, f) in to.iter().zip(&from) {
        u = &u + &ComplexMatrix::outer(t, f);
    }

    let (mut best, mut best_abs) = (ONE, 0.0);
    for i in 0..d {
        for j in 0..d {
            let z = u.get(i, j);
            if z.norm() > best_abs + 1e-12 {
                best_abs = z.norm();
                best = z / z.norm();
            }
        }
    }
    let u = u.scale_complex(best.conj());

    let image = vec(&(&u * &a))?;
    let overlap: Complex64 = phi.iter().zip(&image).map(|(p, q)| p.conj() * q).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    let residual = image
        .iter()
        .zip(phi)
        .map(|(x, p)| (x - phase * p).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(UhlmannResult {
        unitary: u,
        residual,
        phase,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDefectReport {
    pub d: usize,
    /// `rank(I - Uᵀ⊗U*)`.
    pub rank: usize,
    /// `d² - d`.
    pub bound: usize,
    pub pass: bool,
    /// Worst mismatch between the spectrum of `Uᵀ⊗U*` and `{λ_i λ_j*}`.
    pub spectrum_error: f64,
}

/// Checks `rank(I - Uᵀ⊗U*) ≤ d² - d` for a unitary `U`.
pub fn rank_defect(u: &ComplexMatrix) -> Result<RankDefectReport> {
    let d = u.ensure_square()?;
    let unitarity = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(d));
    if unitarity > UNITARY_TOL {
        return Err(Error::InvalidArgument(format!(
            "matrix is not unitary (defect {unitarity:.3e})"
        )));
    }
    let w = kron(&u.transpose(), &u.conj());
    let n = d * d;
    // ‖I - W‖ ≤ 2, so an absolute threshold is already scale-free
    let rank = singular_values(&(&ComplexMatrix::identity(n) - &w))
        .into_iter()
        .filter(|&s| s > RANK_TOL)
        .count();

    let lam = eigenvalues(u)?;
    let mut expected: Vec<Complex64> = Vec::with_capacity(n);
    for li in &lam {
        for lj in &lam {
            expected.push(li * lj.conj());
        }
    }
    let mut actual = eigenvalues(&w)?;
    let mut spectrum_error = 0.0f64;
    for e in &expected {
        let (k, dist) = actual
            .iter()
            .enumerate()
            .map(|(k, a)| (k, (a - e).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("same length");
        spectrum_error = spectrum_error.max(dist);
        actual.swap_remove(k);
    }

    let bound = n - d;
    Ok(RankDefectReport {
        d,
        rank,
        bound,
        pass: rank <= bound && spectrum_error <= SPECTRUM_TOL,
        spectrum_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::seeded_rng;
    use crate::linalg::random::{haar_unitary, random_unit_vector};
    use crate::linalg::{kron, I};

    #[test]
    fn recovers_a_unitary_relating_purifications() {
        let mut rng = seeded_rng(1);
        for d in 2..=3 {
            let psi = random_unit_vector(&mut rng, d * d);
            let u = haar_unitary(&mut rng, d);
            let phi = kron(&u, &ComplexMatrix::identity(d)).mul_vec(&psi);
            let r = uhlmann_unitary(&psi, &phi).unwrap();
            assert!(r.residual < 1e-10);
            // full Schmidt rank pins U down to a phase
            let ratio = u.get(0, 0) / r.unitary.get(0, 0);
            assert!(u.max_abs_diff(&r.unitary.scale_complex(ratio)) < 1e-9);
        }
    }

    #[test]
    fn handles_deficient_schmidt_rank() {
        let d = 3;
        let mut psi = vec![ZERO_C; d * d];
        psi[0] = ONE;
        let mut phi = vec![ZERO_C; d * d];
        phi[2 * d] = I;
        let r = uhlmann_unitary(&psi, &phi).unwrap();
        assert!(r.residual < 1e-12);
        let gram = &r.unitary.adjoint() * &r.unitary;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
    }

    #[test]
    fn largest_entry_is_real_positive() {
        let mut rng = seeded_rng(2);
        let psi = random_unit_vector(&mut rng, 4);
        let u = haar_unitary(&mut rng, 2).scale_complex(Complex64::from_polar(1.0, 2.0));
        let phi = kron(&u, &ComplexMatrix::identity(2)).mul_vec(&psi);
        let w = uhlmann_unitary(&psi, &phi).unwrap().unitary;
        let top = (0..4)
            .map(|k| w.get(k / 2, k % 2))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        assert!(top.im.abs() < 1e-12 && top.re > 0.0);
    }

    #[test]
    fn mismatched_marginals_are_rejected() {
        let mut rng = seeded_rng(3);
        let psi = random_unit_vector(&mut rng, 4);
        let phi = random_unit_vector(&mut rng, 4);
        assert!(matches!(uhlmann_unitary(&psi, &phi), Err(Error::Precondition(_))));
        assert!(matches!(uhlmann_unitary(&psi, &phi[..3]), Err(Error::Dimension(_))));
    }

    #[test]
    fn rank_defect_handles_repeated_unit_eigenvalues() {
        // this stream once produced d=4 unitaries whose Schur iteration stalled
        let mut rng = seeded_rng(0xD1A30D ^ 0x7);
        for d in [2, 3, 4] {
            for _ in 0..100 {
                assert!(rank_defect(&haar_unitary(&mut rng, d)).unwrap().pass);
            }
        }
    }

    #[test]
    fn rank_defect_of_phase_gate() {
        let u = ComplexMatrix::diagonal(&[ONE, I]);
        let r = rank_defect(&u).unwrap();
        assert_eq!((r.rank, r.bound), (2, 2));
        assert!(r.pass && r.spectrum_error < 1e-12);
        assert_eq!(rank_defect(&ComplexMatrix::identity(3)).unwrap().rank, 0);
        assert!(rank_defect(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0])).is_err());
    }

    const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);
}

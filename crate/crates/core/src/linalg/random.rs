//! Seeded Gaussian and Haar sampling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    // row-major fill so the draw order does not depend on storage layout
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        entries.push(complex_gaussian(rng));
    }
    ComplexMatrix::from_row_major(rows, cols, &entries).expect("finite gaussian entries")
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Random unit vector, uniform on the complex sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let mut v = gaussian_vector(rng, n);
    normalize(&mut v);
    v
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

/// Random density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale(1.0 / tr).hermitian_part()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// QR-orthonormalizes the columns of `m` (`rows >= cols`) and multiplies
/// each column by the phase of the matching `R` diagonal entry, so a Gaussian
/// input yields an exactly Haar-distributed isometry.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.rows() >= m.cols(), "need rows >= cols to orthonormalize columns");
    let qr = m.as_nalgebra().clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let cols = m.cols();
    let phases: Vec<Complex64> = (0..cols)
        .map(|k| {
            let rkk = r[(k, k)];
            if rkk.norm() > 0.0 {
                rkk / rkk.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let fixed = DMatrix::from_fn(m.rows(), cols, |i, j| q[(i, j)] * phases[j]);
    ComplexMatrix::from_nalgebra(fixed)
}

/// Haar-random isometry `C^cols -> C^rows`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    orthonormalize_columns(&gaussian_matrix(rng, rows, cols))
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    haar_isometry(rng, d, d)
}

/// Random traceless Hermitian matrix.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n);
    let shift = h.trace().re / n as f64;
    let mut out = h;
    for k in 0..n {
        let z = out.get(k, k);
        out.set(k, k, Complex64::new(z.re - shift, 0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::seeded_rng;

    #[test]
    fn haar_isometry_has_orthonormal_columns() {
        let mut rng = seeded_rng(1);
        for (rows, cols) in [(2, 2), (8, 2), (27, 3)] {
            let v = haar_isometry(&mut rng, rows, cols);
            let gram = &v.adjoint() * &v;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(cols)) < 1e-13);
        }
    }

    #[test]
    fn phase_fix_makes_qr_unique() {
        // with the phase fixed, Q†M is upper triangular with a positive diagonal
        let mut rng = seeded_rng(2);
        let m = gaussian_matrix(&mut rng, 4, 3);
        let q = orthonormalize_columns(&m);
        let r = &q.adjoint() * &m;
        for k in 0..3 {
            assert!(r.get(k, k).im.abs() < 1e-12 && r.get(k, k).re > 0.0);
        }
    }

    #[test]
    fn sampled_states_are_valid() {
        let mut rng = seeded_rng(3);
        let rho = random_density(&mut rng, 4);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(*crate::linalg::herm_eigenvalues(&rho).unwrap().last().unwrap() > -1e-14);
        let x = random_traceless_hermitian(&mut rng, 5);
        assert!(x.trace().norm() < 1e-14);
        assert!(x.max_abs_diff(&x.adjoint()) == 0.0);
        let v = random_unit_vector(&mut rng, 6);
        assert!((norm(&v) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn same_seed_same_draw() {
        let a = haar_unitary(&mut seeded_rng(9), 3);
        let b = haar_unitary(&mut seeded_rng(9), 3);
        assert_eq!(a, b);
    }
}

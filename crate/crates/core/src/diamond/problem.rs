//! Diamond norm as a semidefinite program over the Choi matrix.
//!
//! Hermiticity-preserving maps use the two-cone form
//!
//! ```text
//! max <J, P0 - P1>   s.t.  P0 + P1 = I ⊗ ρ,  P0, P1 ⪰ 0,  tr ρ = 1
//! min λmax(tr_out Y) s.t.  Y ⪰ J,  Y ⪰ -J
//! ```
//!
//! and any other map falls back to the block form
//! `[[I ⊗ ρ0, X], [X†, I ⊗ ρ1]] ⪰ 0` with objective `Re <J, X>`.
//! Both are posed as real LMIs through the embedding
//! `A + iB ↦ [[A, -B], [B, A]]`.
//!
//! Certificates are recomputed from the iterates rather than read off the
//! solver: the lower one is the trace norm actually achieved by the input
//! state built from `ρ`, the upper one is the dual objective after shifting
//! `Y` until it is exactly feasible.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::sdp::{Iterate, LmiProblem, SolverOptions, SparseBlocks, Status};
use super::{DiamondResult, Method};
use crate::channels::{superop_choi, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, herm_eigenvalues, hs_norm, lift_k, partial_trace, psd_sqrt, trace_norm, BipartiteOperator, ComplexMatrix,
    Factor,
};

/// Stopping and acceptance thresholds for [`diamond_norm_sdp`].
#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Stop once `upper - lower <= gap_tol * (1 + |value|)`.
    pub gap_tol: f64,
    /// A solve that ends above this relative gap is a failure.
    pub accept_tol: f64,
    pub max_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-7,
            accept_tol: 1e-6,
            max_iterations: 200,
        }
    }
}

type Sparse = Vec<(usize, usize, Complex64)>;

/// Orthonormal Hermitian basis of `n x n` matrices, as sparse entry lists.
fn hermitian_basis(n: usize) -> Vec<Sparse> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        out.push(vec![(p, p, Complex64::new(1.0, 0.0))]);
    }
    for p in 0..n {
        for q in p + 1..n {
            out.push(vec![(p, q, Complex64::new(s, 0.0)), (q, p, Complex64::new(s, 0.0))]);
            out.push(vec![(p, q, Complex64::new(0.0, s)), (q, p, Complex64::new(0.0, -s))]);
        }
    }
    out
}

/// Partial trace over the output (first) factor of a sparse Choi-space element.
fn sparse_trace_out(entries: &Sparse, d: usize) -> Sparse {
    let mut out: Sparse = Vec::new();
    for &(r, c, z) in entries {
        let (a, i) = (r / d, r % d);
        let (b, j) = (c / d, c % d);
        if a == b {
            match out.iter_mut().find(|(p, q, _)| *p == i && *q == j) {
                Some(e) => e.2 += z,
                None => out.push((i, j, z)),
            }
        }
    }
    out
}

/// Adds `factor * emb(H)` for a sparse Hermitian `H` of complex size `n`,
/// shifted by `offset` inside a larger complex block of size `n_block`.
fn push_embedded(sb: &mut SparseBlocks, block: usize, n_block: usize, offset: usize, h: &Sparse, factor: f64) {
    for &(r, c, z) in h {
        let (r, c) = (r + offset, c + offset);
        let (re, im) = (z.re * factor, z.im * factor);
        sb.push(block, r, c, re);
        sb.push(block, r + n_block, c + n_block, re);
        sb.push(block, r, c + n_block, -im);
        sb.push(block, r + n_block, c, im);
    }
}

fn embed_dense(m: &ComplexMatrix, factor: f64) -> DMatrix<f64> {
    let n = m.rows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = m.get(r % n, c % n);
        let v = match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        };
        v * factor
    })
}

fn decode(block: &DMatrix<f64>, n: usize, offset: usize, size: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(size, size, |r, c| {
        let (r, c) = (r + offset, c + offset);
        let re = 0.5 * (block[(r, c)] + block[(r + n, c + n)]);
        let im = 0.5 * (block[(r + n, c)] - block[(r, c + n)]);
        Complex64::new(re, im)
    })
}

fn hermitian_from_params(basis: &[Sparse], y: &[f64], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for (h, &coef) in basis.iter().zip(y) {
        for &(r, c, z) in h {
            m.set(r, c, m.get(r, c) + z * coef);
        }
    }
    m
}

/// Clips negative eigenvalues and renormalizes to unit trace. Falls back to
/// the maximally mixed state when nothing positive is left.
fn project_density(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = rho.rows();
    let eig = herm_eig(&rho.hermitian_part())?;
    let clipped = eig.reconstruct_with(|l| l.max(0.0));
    let tr = clipped.trace().re;
    if tr <= 0.0 || !tr.is_finite() {
        return Ok(ComplexMatrix::identity(d).scale(1.0 / d as f64));
    }
    Ok(clipped.scale(1.0 / tr).hermitian_part())
}

/// `‖(I ⊗ √ρ0) J (I ⊗ √ρ1)‖₁`, a value attained by the map.
pub(crate) fn attained_value(j: &ComplexMatrix, d: usize, rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<f64> {
    let s0 = lift_k(d, &psd_sqrt(&project_density(rho0)?)?);
    let s1 = lift_k(d, &psd_sqrt(&project_density(rho1)?)?);
    trace_norm(&(&(&s0 * j) * &s1))
}

fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigenvalues(h)?.first().copied().unwrap_or(0.0))
}

fn lambda_min(h: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigenvalues(h)?.last().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    lower: f64,
    upper: f64,
}

enum Form {
    Hermitian,
    General,
}

struct DiamondSdp {
    d: usize,
    n: usize,
    form: Form,
    /// Normalized Choi matrix.
    j: ComplexMatrix,
    basis: Vec<Sparse>,
    lmi: LmiProblem,
}

impl DiamondSdp {
    fn new(d: usize, j: ComplexMatrix, hermitian: bool) -> Self {
        let n = d * d;
        let basis = hermitian_basis(n);
        let traced: Vec<Sparse> = basis.iter().map(|h| sparse_trace_out(h, d)).collect();
        let ident: Sparse = (0..d).map(|k| (k, k, Complex64::new(1.0, 0.0))).collect();
        let nb = basis.len();
        let lmi = if hermitian {
            // blocks: Y - J, Y + J, μI - tr_out Y
            let mut a = Vec::with_capacity(nb + 1);
            for (h, t) in basis.iter().zip(&traced) {
                let mut sb = SparseBlocks::new(3);
                push_embedded(&mut sb, 0, n, 0, h, -0.5);
                push_embedded(&mut sb, 1, n, 0, h, -0.5);
                push_embedded(&mut sb, 2, d, 0, t, 0.5);
                a.push(sb);
            }
            let mut sb = SparseBlocks::new(3);
            push_embedded(&mut sb, 2, d, 0, &ident, -0.5);
            a.push(sb);
            let mut b = nalgebra::DVector::zeros(nb + 1);
            b[nb] = -1.0;
            LmiProblem {
                block_dims: vec![2 * n, 2 * n, 2 * d],
                c: vec![
                    embed_dense(&j, -0.5),
                    embed_dense(&j, 0.5),
                    DMatrix::zeros(2 * d, 2 * d),
                ],
                a,
                b,
            }
        } else {
            // blocks: [[Y0, -J], [-J†, Y1]], λ0 I - tr_out Y0, λ1 I - tr_out Y1
            let mut a = Vec::with_capacity(2 * nb + 2);
            for side in 0..2 {
                for (h, t) in basis.iter().zip(&traced) {
                    let mut sb = SparseBlocks::new(3);
                    push_embedded(&mut sb, 0, 2 * n, side * n, h, -0.5);
                    push_embedded(&mut sb, 1 + side, d, 0, t, 0.5);
                    a.push(sb);
                }
            }
            for side in 0..2 {
                let mut sb = SparseBlocks::new(3);
                push_embedded(&mut sb, 1 + side, d, 0, &ident, -0.5);
                a.push(sb);
            }
            let mut b = nalgebra::DVector::zeros(2 * nb + 2);
            b[2 * nb] = -0.5;
            b[2 * nb + 1] = -0.5;
            let mut c0 = ComplexMatrix::zeros(2 * n, 2 * n);
            for r in 0..n {
                for c in 0..n {
                    let z = j.get(r, c);
                    c0.set(r, n + c, -z);
                    c0.set(n + c, r, -z.conj());
                }
            }
            LmiProblem {
                block_dims: vec![4 * n, 2 * d, 2 * d],
                c: vec![
                    embed_dense(&c0, 0.5),
                    DMatrix::zeros(2 * d, 2 * d),
                    DMatrix::zeros(2 * d, 2 * d),
                ],
                a,
                b,
            }
        };
        Self {
            d,
            n,
            form: if hermitian { Form::Hermitian } else { Form::General },
            j,
            basis,
            lmi,
        }
    }

    fn lower_bound(&self, it: &Iterate) -> Result<f64> {
        let d = self.d;
        match self.form {
            Form::Hermitian => {
                let rho = decode(&it.x[2], d, 0, d);
                attained_value(&self.j, d, &rho, &rho)
            }
            Form::General => {
                let rho0 = decode(&it.x[1], d, 0, d);
                let rho1 = decode(&it.x[2], d, 0, d);
                attained_value(&self.j, d, &rho0, &rho1)
            }
        }
    }

    fn upper_bound(&self, it: &Iterate) -> Result<f64> {
        let (d, n) = (self.d, self.n);
        let nb = self.basis.len();
        let y: Vec<f64> = it.y.iter().copied().collect();
        match self.form {
            Form::Hermitian => {
                let ym = hermitian_from_params(&self.basis, &y[..nb], n);
                let shift = 0f64
                    .max(-lambda_min(&(&ym - &self.j))?)
                    .max(-lambda_min(&(&ym + &self.j))?);
                let reduced = partial_trace(&BipartiteOperator::new(d, d, ym)?, Factor::H);
                Ok(lambda_max(&reduced)? + shift * d as f64)
            }
            Form::General => {
                let y0 = hermitian_from_params(&self.basis, &y[..nb], n);
                let y1 = hermitian_from_params(&self.basis, &y[nb..2 * nb], n);
                let mut block = ComplexMatrix::zeros(2 * n, 2 * n);
                for r in 0..n {
                    for c in 0..n {
                        block.set(r, c, y0.get(r, c));
                        block.set(n + r, n + c, y1.get(r, c));
                        block.set(r, n + c, -self.j.get(r, c));
                        block.set(n + c, r, -self.j.get(r, c).conj());
                    }
                }
                let shift = 0f64.max(-lambda_min(&block)?);
                let r0 = partial_trace(&BipartiteOperator::new(d, d, y0)?, Factor::H);
                let r1 = partial_trace(&BipartiteOperator::new(d, d, y1)?, Factor::H);
                Ok(0.5 * (lambda_max(&r0)? + lambda_max(&r1)?) + shift * d as f64)
            }
        }
    }
}

/// `‖S‖◇` with primal (lower) and dual (upper) certificates.
pub fn diamond_norm_sdp(s: &SuperOperator) -> Result<DiamondResult> {
    diamond_norm_sdp_with(s, &SdpOptions::default())
}

pub fn diamond_norm_sdp_with(s: &SuperOperator, opts: &SdpOptions) -> Result<DiamondResult> {
    solve(s, opts, false)
}

fn solve(s: &SuperOperator, opts: &SdpOptions, force_general: bool) -> Result<DiamondResult> {
    let d = s.d();
    let choi = superop_choi(s);
    let j = choi.matrix();
    let scale = hs_norm(j);
    if scale == 0.0 {
        return Ok(DiamondResult::exact(0.0, Method::Sdp));
    }
    let jn = j.scale(1.0 / scale);
    let asym = (&jn - &jn.adjoint()).max_abs();
    let hermitian = asym <= 1e-12 && !force_general;
    let jn = if hermitian { jn.hermitian_part() } else { jn };
    let problem = DiamondSdp::new(d, jn, hermitian);

    let mut best = Bounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    let mut cert_error: Option<Error> = None;
    let solver_opts = SolverOptions {
        max_iterations: opts.max_iterations,
        ..SolverOptions::default()
    };
    let outcome = problem.lmi.solve(&solver_opts, |progress, it| {
        if progress.rel_gap > 1e-3 || progress.primal_infeas > 1e-3 {
            return false;
        }
        match (problem.lower_bound(it), problem.upper_bound(it)) {
            (Ok(lo), Ok(up)) => {
                best.lower = best.lower.max(lo);
                best.upper = best.upper.min(up);
            }
            (Err(e), _) | (_, Err(e)) => {
                cert_error = Some(e);
                return true;
            }
        }
        let mid = 0.5 * (best.lower + best.upper);
        best.upper - best.lower <= opts.gap_tol * (1.0 + mid.abs())
    });
    if let Some(e) = cert_error {
        return Err(e);
    }
    if outcome.status != Status::Stopped {
        // final iterate may not have been examined at a tight gap
        if let (Ok(lo), Ok(up)) = (
            problem.lower_bound(&outcome.iterate),
            problem.upper_bound(&outcome.iterate),
        ) {
            best.lower = best.lower.max(lo);
            best.upper = best.upper.min(up);
        }
    }

    let result = DiamondResult::from_bounds(best.lower * scale, best.upper * scale, outcome.iterations, Method::Sdp);
    if result.gap.is_nan() || result.gap > opts.accept_tol * (1.0 + result.value.abs()) {
        return Err(Error::SolverFailure {
            iterations: outcome.iterations,
            best: Box::new(result),
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{id_minus, named_channel, phase_unitary, random_channel, ChannelFamily};
    use crate::linalg::ComplexMatrix;

    fn within(r: &DiamondResult, exact: f64, tol: f64) -> bool {
        (r.value - exact).abs() <= tol && r.lower_certificate <= exact + tol && r.upper_certificate >= exact - tol
    }

    #[test]
    fn transpose_norm_is_dimension() {
        for d in 2..=3 {
            let r = diamond_norm_sdp(&SuperOperator::transpose_map(d)).unwrap();
            assert!(within(&r, d as f64, 1e-6), "{r:?}");
            assert!(r.gap <= 1e-6);
        }
    }

    #[test]
    fn general_form_agrees_with_hermitian_form() {
        let opts = SdpOptions::default();
        for s in [
            SuperOperator::transpose_map(2),
            id_minus(&random_channel(2, 2, 5)),
            random_channel(2, 4, 6).to_superop(),
        ] {
            let h = solve(&s, &opts, false).unwrap();
            let g = solve(&s, &opts, true).unwrap();
            assert!((h.value - g.value).abs() < 1e-6, "{h:?} vs {g:?}");
        }
    }

    #[test]
    fn unitary_difference_matches_eigenvalue_hull_formula() {
        // for U = diag(1, e^{iθ}) the origin sits cos(θ/2) from the hull of
        // the spectrum, so ‖id - U·U†‖◇ = 2 sqrt(1 - cos²(θ/2)) = 2 sin(θ/2)
        for theta in [0.3, 1.1, 2.5] {
            let t = named_channel(&ChannelFamily::Unitary(phase_unitary(2, theta)), 2).unwrap();
            let r = diamond_norm_sdp(&id_minus(&t)).unwrap();
            assert!(within(&r, 2.0 * (theta / 2.0).sin(), 1e-6), "{theta}: {r:?}");
        }
    }

    #[test]
    fn completely_depolarizing_difference() {
        // id - D has norm 2(1 - 1/d²)
        for d in 2..=3 {
            let t = named_channel(&ChannelFamily::Depolarizing(1.0), d).unwrap();
            let exact = 2.0 * (1.0 - 1.0 / (d * d) as f64);
            let r = diamond_norm_sdp(&id_minus(&t)).unwrap();
            assert!(within(&r, exact, 1e-6), "{r:?}");
        }
    }

    #[test]
    fn non_hermiticity_preserving_map_uses_block_form() {
        // Φ(X) = X + (i/2) X_10 E_01
        let mut t = ComplexMatrix::identity(4);
        t.set(1, 2, Complex64::new(0.0, 0.5));
        let s = SuperOperator::new(2, t).unwrap();
        assert!(!s.is_hermiticity_preserving(1e-10));
        let r = diamond_norm_sdp(&s).unwrap();
        let doubled = diamond_norm_sdp(&s.scale(2.0)).unwrap();
        assert!(r.gap < 1e-6);
        assert!((doubled.value - 2.0 * r.value).abs() < 1e-6);
        // every pure input stays below the upper certificate
        let mut rng = crate::channels::seeded_rng(12);
        for _ in 0..50 {
            let psi = crate::linalg::random::random_unit_vector(&mut rng, 4);
            let x = s.apply_extended(&BipartiteOperator::pure(2, 2, &psi).unwrap()).unwrap();
            assert!(trace_norm(x.matrix()).unwrap() <= r.upper_certificate + 1e-9);
        }
    }

    #[test]
    fn zero_map_is_exact() {
        let r = diamond_norm_sdp(&SuperOperator::zero(3)).unwrap();
        assert_eq!(r, DiamondResult::exact(0.0, Method::Sdp));
    }
}

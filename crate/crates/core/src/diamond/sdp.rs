//! Dense primal-dual interior-point solver for small real semidefinite
//! programs in block-diagonal form.
//!
//! Primal: minimize `<C, X>` s.t. `<A_i, X> = b_i`, `X ⪰ 0`.
//! Dual:   maximize `b·y`    s.t. `Σ y_i A_i + Z = C`, `Z ⪰ 0`.
//!
//! Infeasible-start path following with the HKM search direction and a
//! Mehrotra predictor-corrector. Constraint matrices are sparse (a handful of
//! entries each), so the Schur complement is assembled entry pair by entry
//! pair instead of through dense products.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// One nonzero of a symmetric constraint matrix. Both `(r, c)` and `(c, r)`
/// are stored for off-diagonal positions.
#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub val: f64,
}

/// Sparse symmetric block-diagonal matrix: `blocks[b]` lists entries of block `b`.
#[derive(Debug, Clone, Default)]
pub struct SparseBlocks {
    pub blocks: Vec<Vec<Entry>>,
}

impl SparseBlocks {
    pub fn new(nblocks: usize) -> Self {
        Self {
            blocks: vec![Vec::new(); nblocks],
        }
    }

    pub fn push(&mut self, block: usize, row: usize, col: usize, val: f64) {
        if val != 0.0 {
            self.blocks[block].push(Entry { row, col, val });
        }
    }

    fn inner(&self, x: &[DMatrix<f64>]) -> f64 {
        self.blocks
            .iter()
            .zip(x)
            .map(|(entries, xb)| entries.iter().map(|e| e.val * xb[(e.row, e.col)]).sum::<f64>())
            .sum()
    }

    fn add_scaled_to(&self, s: f64, out: &mut [DMatrix<f64>]) {
        for (entries, ob) in self.blocks.iter().zip(out.iter_mut()) {
            for e in entries {
                ob[(e.row, e.col)] += s * e.val;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmiProblem {
    pub block_dims: Vec<usize>,
    pub c: Vec<DMatrix<f64>>,
    pub a: Vec<SparseBlocks>,
    pub b: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Iterate {
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub z: Vec<DMatrix<f64>>,
}

/// Progress snapshot handed to the monitor each iteration.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub iteration: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Internal tolerances met.
    Converged,
    /// The monitor asked to stop.
    Stopped,
    MaxIterations,
    /// Steps collapsed or a factorization failed; the last iterate is returned.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub iterate: Iterate,
    pub status: Status,
    pub iterations: usize,
    pub progress: Progress,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gap_tol: 1e-11,
            feas_tol: 1e-11,
            step_fraction: 0.98,
        }
    }
}

fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    dot(a, a).sqrt()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Largest `α` with `x + α·dx ⪰ 0`, given `x ≻ 0`.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let chol = Cholesky::new(x.clone())?;
    let l = chol.l();
    let t = l.solve_lower_triangular(dx)?;
    let w = l.solve_lower_triangular(&t.transpose())?;
    let w = sym(w);
    let lmin = SymmetricEigen::new(w).eigenvalues.min();
    Some(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

fn block_max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> Option<f64> {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        alpha = alpha.min(max_step(xb, db)?);
    }
    Some(alpha)
}

fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(m.clone()).map(|c| sym(c.inverse()))
}

impl LmiProblem {
    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    fn op_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| ai.inner(x)))
    }

    fn op_at(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (ai, &yi) in self.a.iter().zip(y.iter()) {
            if yi != 0.0 {
                ai.add_scaled_to(yi, &mut out);
            }
        }
        out
    }

    /// `M_ij = tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.a.len();
        let mut mat = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for (b, (ei, ej)) in self.a[i].blocks.iter().zip(&self.a[j].blocks).enumerate() {
                    if ei.is_empty() || ej.is_empty() {
                        continue;
                    }
                    let (xb, zb) = (&x[b], &zinv[b]);
                    for e in ei {
                        for f in ej {
                            s += e.val * f.val * xb[(e.col, f.row)] * zb[(f.col, e.row)];
                        }
                    }
                }
                mat[(i, j)] = s;
                mat[(j, i)] = s;
            }
        }
        mat
    }

    /// Solves for the HKM direction given the complementarity residual
    /// `rc_zinv = R_c Z⁻¹` (per block).
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        chol_m: &Cholesky<f64, nalgebra::Dyn>,
        x: &[DMatrix<f64>],
        zinv: &[DMatrix<f64>],
        rp: &DVector<f64>,
        rd: &[DMatrix<f64>],
        rc_zinv: &[DMatrix<f64>],
    ) -> (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>) {
        // M Δy = Rp - A(R_c Z⁻¹ - X Rd Z⁻¹)
        let g: Vec<DMatrix<f64>> = rc_zinv
            .iter()
            .zip(x.iter().zip(rd.iter().zip(zinv)))
            .map(|(rcz, (xb, (rdb, zb)))| rcz - xb * rdb * zb)
            .collect();
        let rhs = rp - self.op_a(&g);
        let dy = chol_m.solve(&rhs);
        let at_dy = self.op_at(&dy);
        let dz: Vec<DMatrix<f64>> = rd.iter().zip(&at_dy).map(|(r, a)| r - a).collect();
        let dx: Vec<DMatrix<f64>> = rc_zinv
            .iter()
            .zip(x.iter().zip(dz.iter().zip(zinv)))
            .map(|(rcz, (xb, (dzb, zb)))| sym(rcz - xb * dzb * zb))
            .collect();
        (dx, dy, dz)
    }

    /// Runs the interior-point iteration. `monitor` sees every iterate and may
    /// stop the solve by returning `true`.
    pub fn solve<F>(&self, opts: &SolverOptions, mut monitor: F) -> SolveOutcome
    where
        F: FnMut(&Progress, &Iterate) -> bool,
    {
        let n_total = self.total_dim() as f64;
        let norm_b = self.b.norm();
        let norm_c = frob(&self.c);
        let scale = 10f64.max(n_total.sqrt()).max(norm_c);
        let mut it = Iterate {
            x: self
                .block_dims
                .iter()
                .map(|&n| DMatrix::identity(n, n) * scale)
                .collect(),
            y: DVector::zeros(self.a.len()),
            z: self
                .block_dims
                .iter()
                .map(|&n| DMatrix::identity(n, n) * scale)
                .collect(),
        };

        let mut last = Progress {
            iteration: 0,
            primal_obj: f64::NAN,
            dual_obj: f64::NAN,
            rel_gap: f64::INFINITY,
            primal_infeas: f64::INFINITY,
            dual_infeas: f64::INFINITY,
        };
        let mut stalled_steps = 0;

        for iter in 0..=opts.max_iterations {
            let ax = self.op_a(&it.x);
            let rp = &self.b - &ax;
            let at_y = self.op_at(&it.y);
            let rd: Vec<DMatrix<f64>> = self
                .c
                .iter()
                .zip(it.z.iter().zip(&at_y))
                .map(|(c, (z, a))| c - z - a)
                .collect();
            let pobj = dot(&self.c, &it.x);
            let dobj = self.b.dot(&it.y);
            let progress = Progress {
                iteration: iter,
                primal_obj: pobj,
                dual_obj: dobj,
                rel_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
                primal_infeas: rp.norm() / (1.0 + norm_b),
                dual_infeas: frob(&rd) / (1.0 + norm_c),
            };
            last = progress;

            if !(pobj.is_finite() && dobj.is_finite()) {
                return SolveOutcome {
                    iterate: it,
                    status: Status::Stalled,
                    iterations: iter,
                    progress,
                };
            }
            if monitor(&progress, &it) {
                return SolveOutcome {
                    iterate: it,
                    status: Status::Stopped,
                    iterations: iter,
                    progress,
                };
            }
            if progress.rel_gap < opts.gap_tol
                && progress.primal_infeas < opts.feas_tol
                && progress.dual_infeas < opts.feas_tol
            {
                return SolveOutcome {
                    iterate: it,
                    status: Status::Converged,
                    iterations: iter,
                    progress,
                };
            }
            if iter == opts.max_iterations {
                break;
            }

            let mu = dot(&it.x, &it.z) / n_total;
            let zinv: Option<Vec<DMatrix<f64>>> = it.z.iter().map(spd_inverse).collect();
            let Some(zinv) = zinv else {
                return SolveOutcome {
                    iterate: it,
                    status: Status::Stalled,
                    iterations: iter,
                    progress,
                };
            };
            let mut m = self.schur(&it.x, &zinv);
            let chol_m = match Cholesky::new(m.clone()) {
                Some(c) => c,
                None => {
                    let bump = 1e-13 * m.diagonal().amax().max(1.0);
                    for k in 0..m.nrows() {
                        m[(k, k)] += bump;
                    }
                    match Cholesky::new(m) {
                        Some(c) => c,
                        None => {
                            return SolveOutcome {
                                iterate: it,
                                status: Status::Stalled,
                                iterations: iter,
                                progress,
                            }
                        }
                    }
                }
            };

            // predictor: R_c = -XZ, so R_c Z⁻¹ = -X
            let rc_pred: Vec<DMatrix<f64>> = it.x.iter().map(|x| -x).collect();
            let (dx_p, _dy_p, dz_p) = self.direction(&chol_m, &it.x, &zinv, &rp, &rd, &rc_pred);
            let (Some(ap), Some(ad)) = (block_max_step(&it.x, &dx_p), block_max_step(&it.z, &dz_p)) else {
                return SolveOutcome {
                    iterate: it,
                    status: Status::Stalled,
                    iterations: iter,
                    progress,
                };
            };
            let ap = ap.min(1.0);
            let ad = ad.min(1.0);
            let mut mu_aff = 0.0;
            for b in 0..it.x.len() {
                let xa = &it.x[b] + &dx_p[b] * ap;
                let za = &it.z[b] + &dz_p[b] * ad;
                mu_aff += xa.dot(&za);
            }
            mu_aff /= n_total;
            let expon = (3.0 * ap.min(ad).powi(2)).max(1.0);
            let sigma = (mu_aff / mu).max(0.0).powf(expon).min(1.0);

            // corrector: R_c = σμI - XZ - ΔXp ΔZp
            let rc_corr: Vec<DMatrix<f64>> = (0..it.x.len())
                .map(|b| {
                    let zi = &zinv[b];
                    zi * (sigma * mu) - &it.x[b] - &dx_p[b] * &dz_p[b] * zi
                })
                .collect();
            let (dx, dy, dz) = self.direction(&chol_m, &it.x, &zinv, &rp, &rd, &rc_corr);
            let (Some(ap), Some(ad)) = (block_max_step(&it.x, &dx), block_max_step(&it.z, &dz)) else {
                return SolveOutcome {
                    iterate: it,
                    status: Status::Stalled,
                    iterations: iter,
                    progress,
                };
            };
            let ap = (opts.step_fraction * ap).min(1.0);
            let ad = (opts.step_fraction * ad).min(1.0);

            if ap.max(ad) < 1e-10 {
                stalled_steps += 1;
                if stalled_steps >= 3 {
                    return SolveOutcome {
                        iterate: it,
                        status: Status::Stalled,
                        iterations: iter,
                        progress,
                    };
                }
            } else {
                stalled_steps = 0;
            }

            for b in 0..it.x.len() {
                it.x[b] = sym(&it.x[b] + &dx[b] * ap);
                it.z[b] = sym(&it.z[b] + &dz[b] * ad);
            }
            it.y += dy * ad;
        }

        SolveOutcome {
            iterate: it,
            status: Status::MaxIterations,
            iterations: opts.max_iterations,
            progress: last,
        }
    }
}

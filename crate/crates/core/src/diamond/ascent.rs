use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{seeded_rng, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::random::{normalize, random_unit_vector};
use crate::linalg::{herm_eig, BipartiteOperator, ComplexMatrix};

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub restarts: usize,
    pub initial_step: f64,
    pub max_halvings: usize,
    /// Converged when the summed improvement over `window` steps is below this.
    pub tol: f64,
    pub window: usize,
    pub max_iterations: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            initial_step: 0.1,
            max_halvings: 30,
            tol: 1e-12,
            window: 5,
            max_iterations: 5000,
        }
    }
}

/// Best pure input found; `value` is attained at `psi`, so it is a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AscentState {
    pub psi: Vec<Complex64>,
    pub value: f64,
    pub restarts_used: usize,
    pub seed: u64,
}

/// `‖(S ⊗ id)(|ψ><ψ|)‖₁` together with the output operator's eigenbasis.
struct Evaluation {
    value: f64,
    /// `sign(X)` with `sign(0) = +1`.
    sign: ComplexMatrix,
}

fn evaluate(s: &SuperOperator, psi: &[Complex64]) -> Result<Evaluation> {
    let d = s.d();
    let rho = BipartiteOperator::pure(d, d, psi)?;
    let x = s.apply_extended(&rho)?;
    let eig = herm_eig(x.matrix())?;
    let value = eig.values.iter().map(|l| l.abs()).sum();
    let sign = eig.reconstruct_with(|l| if l >= 0.0 { 1.0 } else { -1.0 });
    Ok(Evaluation { value, sign })
}

/// The objective `ψ ↦ ‖(S ⊗ id)(|ψ><ψ|)‖₁`.
pub fn ascent_objective(s: &SuperOperator, psi: &[Complex64]) -> Result<f64> {
    Ok(evaluate(s, psi)?.value)
}

fn start_vector(d: usize, restart: usize, seed: u64) -> Vec<Complex64> {
    if restart == 0 {
        // maximally entangled start
        let mut v = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            v[i * d + i] = Complex64::new(1.0, 0.0);
        }
        normalize(&mut v);
        return v;
    }
    let mut rng = seeded_rng(seed);
    rng.set_stream(restart as u64);
    random_unit_vector(&mut rng, d * d)
}

fn climb(
    s: &SuperOperator,
    adj: &SuperOperator,
    mut psi: Vec<Complex64>,
    opts: &AscentOptions,
) -> Result<(Vec<Complex64>, f64)> {
    let d = s.d();
    let mut current = evaluate(s, &psi)?;
    let mut recent: Vec<f64> = Vec::with_capacity(opts.window);
    for _ in 0..opts.max_iterations {
        // G = (S† ⊗ id)(sign X); the Riemannian gradient is Gψ - <ψ|G|ψ> ψ
        let w = BipartiteOperator::new(d, d, current.sign.clone())?;
        let g = adj.apply_extended(&w)?;
        let g_psi = g.matrix().mul_vec(&psi);
        let along: Complex64 = psi.iter().zip(&g_psi).map(|(a, b)| a.conj() * b).sum();
        let dir: Vec<Complex64> = g_psi.iter().zip(&psi).map(|(gp, p)| gp - along * p).collect();
        let dir_norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if dir_norm < 1e-14 {
            break;
        }

        let mut step = opts.initial_step;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut trial: Vec<Complex64> = psi.iter().zip(&dir).map(|(p, g)| p + g * (step / dir_norm)).collect();
            normalize(&mut trial);
            let eval = evaluate(s, &trial)?;
            if eval.value > current.value {
                accepted = Some((trial, eval));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, eval)) = accepted else { break };
        let gain = eval.value - current.value;
        psi = trial;
        current = eval;

        if recent.len() == opts.window {
            recent.remove(0);
        }
        recent.push(gain);
        if recent.len() == opts.window && recent.iter().sum::<f64>() < opts.tol {
            break;
        }
    }
    Ok((psi, current.value))
}

/// Multi-start projected ascent over pure inputs on `H ⊗ K`, `dim K = d`.
pub fn diamond_norm_ascent(s: &SuperOperator, restarts: usize, seed: u64) -> Result<AscentState> {
    diamond_norm_ascent_with(
        s,
        &AscentOptions {
            restarts,
            ..AscentOptions::default()
        },
        seed,
    )
}

pub fn diamond_norm_ascent_with(s: &SuperOperator, opts: &AscentOptions, seed: u64) -> Result<AscentState> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if !s.is_hermiticity_preserving(1e-10) {
        return Err(Error::Domain("ascent requires a Hermiticity-preserving map".into()));
    }
    let adj = s.adjoint();
    let d = s.d();
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    for r in 0..opts.restarts {
        let (psi, value) = climb(s, &adj, start_vector(d, r, seed), opts)?;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((psi, value));
        }
    }
    let (psi, value) = best.expect("at least one restart");
    Ok(AscentState {
        psi,
        value,
        restarts_used: opts.restarts,
        seed,
    })
}

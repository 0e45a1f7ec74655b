use num_complex::Complex64;

use super::channel::Channel;
use super::superop::matrix_unit;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, spectral_norm, ComplexMatrix};

/// Reference channel families.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelFamily {
    Identity,
    /// `T(X) = (1-p) X + p tr(X) I/d`.
    Depolarizing(f64),
    /// Off-diagonal entries damped by `1-p`.
    Dephasing(f64),
    Unitary(ComplexMatrix),
    /// `T(X) = tr(X) σ`.
    Replacer(ComplexMatrix),
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("probability {p} is outside [0, 1]")));
    }
    Ok(())
}

pub fn named_channel(family: &ChannelFamily, d: usize) -> Result<Channel> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let id = ComplexMatrix::identity(d);
    match family {
        ChannelFamily::Identity => Ok(Channel::identity(d)),
        ChannelFamily::Depolarizing(p) => {
            check_probability(*p)?;
            let mut kraus = vec![id.scale((1.0 - p).sqrt())];
            let s = (p / d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    kraus.push(matrix_unit(d, i, j).scale(s));
                }
            }
            Channel::new(d, kraus)
        }
        ChannelFamily::Dephasing(p) => {
            check_probability(*p)?;
            let mut kraus = vec![id.scale((1.0 - p).sqrt())];
            for k in 0..d {
                kraus.push(matrix_unit(d, k, k).scale(p.sqrt()));
            }
            Channel::new(d, kraus)
        }
        ChannelFamily::Unitary(u) => {
            if u.rows() != d || u.cols() != d {
                return Err(Error::InvalidArgument(format!(
                    "unitary must be {d}x{d}, got {}x{}",
                    u.rows(),
                    u.cols()
                )));
            }
            let defect = spectral_norm(&(&(&u.adjoint() * u) - &id));
            if defect > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not unitary (‖U†U - I‖ = {defect:.3e})"
                )));
            }
            Channel::new(d, vec![u.clone()])
        }
        ChannelFamily::Replacer(sigma) => {
            if sigma.rows() != d || sigma.cols() != d {
                return Err(Error::InvalidArgument(format!("state must be {d}x{d}")));
            }
            let eig = herm_eig(sigma)?;
            let tr: f64 = eig.values.iter().sum();
            if eig.values.iter().any(|&l| l < -1e-10) || (tr - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(
                    "replacement state is not a density matrix".into(),
                ));
            }
            let mut kraus = Vec::new();
            for (m, &lambda) in eig.values.iter().enumerate() {
                if lambda <= 1e-15 {
                    continue;
                }
                let v = eig.vector(m);
                for i in 0..d {
                    // sqrt(λ) |v><i|
                    let k = ComplexMatrix::from_fn(d, d, |a, b| {
                        if b == i {
                            v[a] * lambda.sqrt()
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    });
                    kraus.push(k);
                }
            }
            Channel::new(d, kraus)
        }
    }
}

/// `diag(1, e^{iθ}, e^{2iθ}, …)`.
pub fn phase_unitary(d: usize, theta: f64) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..d).map(|k| Complex64::from_polar(1.0, theta * k as f64)).collect();
    ComplexMatrix::diagonal(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn sample(d: usize) -> ComplexMatrix {
        let mut rng = crate::channels::seeded_rng(d as u64);
        crate::linalg::random::random_density(&mut rng, d)
    }

    #[test]
    fn every_family_is_cptp() {
        let v = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        let families = [
            ChannelFamily::Identity,
            ChannelFamily::Depolarizing(0.3),
            ChannelFamily::Dephasing(0.6),
            ChannelFamily::Unitary(phase_unitary(3, 0.4)),
            ChannelFamily::Replacer(v),
        ];
        for f in &families {
            assert!(named_channel(f, 3).unwrap().is_cptp(1e-12).pass, "{f:?}");
        }
    }

    #[test]
    fn depolarizing_mixes_toward_identity() {
        let rho = sample(3);
        let p = 0.4;
        let out = named_channel(&ChannelFamily::Depolarizing(p), 3).unwrap().apply(&rho);
        let expected = &rho.scale(1.0 - p) + &ComplexMatrix::identity(3).scale(p / 3.0);
        assert!(out.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn full_dephasing_keeps_only_the_diagonal() {
        let rho = sample(3);
        let out = named_channel(&ChannelFamily::Dephasing(1.0), 3).unwrap().apply(&rho);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { rho.get(i, i) } else { ZERO };
                assert!((out.get(i, j) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn replacer_outputs_its_state() {
        let sigma = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        let out = named_channel(&ChannelFamily::Replacer(sigma.clone()), 2)
            .unwrap()
            .apply(&sample(2));
        assert!(out.max_abs_diff(&sigma) < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(named_channel(&ChannelFamily::Depolarizing(1.5), 2).is_err());
        assert!(named_channel(&ChannelFamily::Dephasing(-0.1), 2).is_err());
        let not_unitary = ComplexMatrix::from_real_diagonal(&[1.0, 0.5]);
        assert!(named_channel(&ChannelFamily::Unitary(not_unitary), 2).is_err());
        let mut not_state = ComplexMatrix::zeros(2, 2);
        not_state.set(0, 0, ONE.scale(2.0));
        assert!(named_channel(&ChannelFamily::Replacer(not_state), 2).is_err());
    }
}

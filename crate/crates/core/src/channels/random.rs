use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::channel::Channel;
use crate::linalg::random::haar_isometry;

/// Seeded generator used everywhere a reproducible draw is needed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Channel from a Haar-random Stinespring isometry `C^d -> C^d ⊗ C^env`.
///
/// `env = 1` gives a Haar-random unitary channel. Deterministic in `seed`.
pub fn random_channel(d: usize, env: usize, seed: u64) -> Channel {
    assert!(d >= 1 && env >= 1, "d and env must be positive");
    let mut rng = seeded_rng(seed);
    let v = haar_isometry(&mut rng, d * env, d);
    Channel::from_stinespring(d, env, &v).expect("Haar isometry is trace preserving")
}

/// Default environment dimension (`d²` reaches every channel).
pub fn default_env(d: usize) -> usize {
    d * d
}

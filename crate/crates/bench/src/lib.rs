//! Fixtures shared by the benchmarks.

use dofcsit_core::CsitProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random profile with `l` subbands.
pub fn random_profile(l: usize, seed: u64) -> CsitProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..l).map(|_| rng.random::<f64>()).collect();
    let b = (0..l).map(|_| rng.random::<f64>()).collect();
    CsitProfile::new(a, b).expect("qualities drawn from [0, 1)")
}

pub fn fig4() -> CsitProfile {
    CsitProfile::new(vec![0.7, 0.6, 0.4, 0.3], vec![0.3, 0.4, 0.7, 0.6]).unwrap()
}

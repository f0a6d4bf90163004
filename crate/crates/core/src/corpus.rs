//! Seeded test corpora: smooth monotone profiles and mean-convex star surfaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hyperbolic::Dimension;
use crate::profile::{ExponentialProfile, RadialProfile};
use crate::star::StarSurface;

pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// Increasing exponential profiles with damped wiggles.
///
/// Amplitudes are negative so f rises to 0; the wiggle stays small enough that
/// f′ keeps its sign. Every other profile decays at the critical rate and so
/// carries positive mass.
pub fn smooth_profiles(seed: u64, count: usize) -> Vec<RadialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = Dimension::new(3 + i % 3).expect("n ≥ 3");
            let critical = ExponentialProfile::critical_rate(n);
            let rate = if i % 2 == 0 { critical } else { critical + rng.gen_range(0.1..1.0) };
            let amplitude = -rng.gen_range(0.3..2.0);
            let wiggle = rng.gen_range(0.0..0.1);
            let damping = rng.gen_range(1.0..2.0);
            let frequency = rng.gen_range(0.5..2.0);
            ExponentialProfile::new(n, amplitude, rate)
                .with_wiggle(wiggle, damping, frequency)
                .shared()
        })
        .collect()
}

/// Perturbed coordinate spheres φ = r(1 + ε Σ c_k cos kθ) in ℍ³…ℍ⁵.
pub fn star_surfaces(seed: u64, count: usize) -> Vec<StarSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = Dimension::new(3 + i % 3).expect("n ≥ 3");
            let r = rng.gen_range(0.4..3.0);
            let eps = rng.gen_range(0.0..0.06);
            let modes = rng.gen_range(1..=3);
            let coefficients = (0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
            StarSurface::perturbed_sphere(n, r, eps, coefficients)
        })
        .collect()
}

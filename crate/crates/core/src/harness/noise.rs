use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Band-limited Gaussian sensor noise: one AR(1) channel per measured
/// quantity, scaled so the stationary mean absolute value equals the target.
#[derive(Debug, Clone)]
pub struct SensorNoise<const N: usize> {
    rng: ChaCha8Rng,
    pole: f64,
    sigma: [f64; N],
    state: [f64; N],
}

impl<const N: usize> SensorNoise<N> {
    /// `mean_abs` per channel, first-order bandwidth `cutoff_hz`, sampled
    /// every `dt`.
    pub fn new(seed: u64, mean_abs: [f64; N], cutoff_hz: f64, dt: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = mean_abs.map(|m| m * (PI / 2.0).sqrt());
        let mut state = [0.0; N];
        for (s, sd) in state.iter_mut().zip(sigma) {
            *s = sd * rng.sample::<f64, _>(StandardNormal);
        }
        Self {
            rng,
            pole: (-2.0 * PI * cutoff_hz * dt).exp(),
            sigma,
            state,
        }
    }

    pub fn sample(&mut self) -> [f64; N] {
        let a = self.pole;
        let b = (1.0 - a * a).sqrt();
        for (s, sd) in self.state.iter_mut().zip(self.sigma) {
            let w: f64 = self.rng.sample(StandardNormal);
            *s = a * *s + b * sd * w;
        }
        self.state
    }
}

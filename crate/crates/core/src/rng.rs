//! Deterministic random streams.
//!
//! Every independent work item (an optimizer restart, a Monte-Carlo sample)
//! draws from its own ChaCha8 stream keyed by `(seed, stream id)`, so results do
//! not depend on how the items are scheduled.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math::{cbrt, cos, sin, sqrt, PI};
use crate::scatter::Vec3;

/// Stream id for restart `restart` at radius index `radius`.
pub fn restart_stream(radius: usize, restart: usize) -> u64 {
    ((radius as u64) << 32) | restart as u64
}

/// A ChaCha8 generator positioned at the start of `stream` for `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform variate in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform direction on the unit sphere.
pub fn unit_vector(rng: &mut impl RngCore) -> Vec3 {
    let z = 2.0 * uniform(rng) - 1.0;
    let phi = 2.0 * PI * uniform(rng);
    let s = sqrt((1.0 - z * z).max(0.0));
    [s * cos(phi), s * sin(phi), z]
}

/// Uniform point in the ball of radius `radius` about the origin
/// (cube-root radial transform times a uniform direction).
pub fn in_ball(rng: &mut impl RngCore, radius: f64) -> Vec3 {
    let r = radius * cbrt(uniform(rng));
    let u = unit_vector(rng);
    [r * u[0], r * u[1], r * u[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: [u64; 4] = core::array::from_fn({
            let mut r = stream(7, 3);
            move |_| r.next_u64()
        });
        let b: [u64; 4] = core::array::from_fn({
            let mut r = stream(7, 3);
            move |_| r.next_u64()
        });
        let c: [u64; 4] = core::array::from_fn({
            let mut r = stream(7, 4);
            move |_| r.next_u64()
        });
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ball_samples_inside_and_centered() {
        let mut rng = stream(1, 0);
        let n = 20000;
        let mut mean = [0.0; 3];
        let mut mean_r = 0.0;
        for _ in 0..n {
            let p = in_ball(&mut rng, 2.0);
            let r = sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            assert!(r <= 2.0);
            mean_r += r / n as f64;
            for k in 0..3 {
                mean[k] += p[k] / n as f64;
            }
        }
        // E|r| = 3R/4
        assert!((mean_r - 1.5).abs() < 0.01);
        assert!(mean.iter().all(|m| m.abs() < 0.03));
    }
}

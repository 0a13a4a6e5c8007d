//! Random distributions, channels and families for property checks.

use rand::Rng;

use crate::channels::{DiscreteChannel, DiscreteDist, PrivacyLevel};
use crate::error::Result;
use crate::moduli::{FamilyMember, FiniteFamily};

/// Weights on `k` atoms; each atom is dropped with probability `sparsity`,
/// keeping at least one.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, k: usize, sparsity: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if rng.random::<f64>() < sparsity {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    if w.iter().all(|v| *v == 0.0) {
        w[rng.random_range(0..k)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Distribution on the symbols `0..k`.
pub fn random_dist<R: Rng + ?Sized>(rng: &mut R, k: usize, sparsity: f64) -> DiscreteDist {
    let values: Vec<f64> = (0..k).map(|i| i as f64).collect();
    DiscreteDist::scalar(&values, &random_weights(rng, k, sparsity)).expect("weights sum to one")
}

/// Channel from the symbols `0..k_in` to `0..k_out` whose columns have
/// likelihood ratios at most `e^alpha`.
pub fn random_private_channel<R: Rng + ?Sized>(
    rng: &mut R,
    k_in: usize,
    k_out: usize,
    level: PrivacyLevel,
) -> Result<DiscreteChannel> {
    // q(y | x) = w_y e^(a u_xy) / Z_x with a = alpha / 2 keeps every column
    // ratio below e^(alpha / 2) e^(alpha / 2)
    let a = 0.5 * level.alpha();
    let base = random_weights(rng, k_out, 0.0);
    let rows: Vec<Vec<f64>> = (0..k_in)
        .map(|_| {
            let mut row: Vec<f64> = base.iter().map(|w| w * (a * rng.random::<f64>()).exp()).collect();
            let z: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= z);
            row
        })
        .collect();
    let inputs = (0..k_in).map(|i| vec![i as f64]).collect();
    DiscreteChannel::new(inputs, (0..k_out).map(|j| j as f64).collect(), rows)
}

/// `size` random distributions on `0..k` with the mean as functional.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, size: usize, k: usize) -> Result<FiniteFamily> {
    let members = (0..size)
        .map(|_| {
            let dist = random_dist(rng, k, 0.2);
            let theta = dist.expectation(|x| x[0]);
            FamilyMember { dist, theta }
        })
        .collect();
    FiniteFamily::new(members)
}

/// Random family closed under mixtures on a grid of `points` weights.
pub fn random_convex_family<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    k: usize,
    points: usize,
) -> Result<FiniteFamily> {
    random_family(rng, size, k)?.with_mixtures(points)
}

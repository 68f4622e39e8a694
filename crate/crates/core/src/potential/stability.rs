use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Energy, PairPotential};
use crate::error::{check_range, Error, Result};

pub const MAX_STABILITY_PARTICLES: usize = 10;

/// Outcome of a passed spot check.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub particles: usize,
    pub trials: usize,
    /// Configurations with finite energy.
    pub finite: usize,
    /// Lowest finite energy seen, or `+inf` if none.
    pub min_energy: f64,
    /// `-B N`.
    pub bound: f64,
}

/// Free-space energy `Σ_{i<j} V(q_i - q_j)`.
pub fn configuration_energy(potential: &PairPotential, points: &[Vec<f64>]) -> Energy {
    let mut total = Energy::Finite(0.0);
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let r2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            total = total + potential.energy(r2.sqrt());
            if total.is_hard_core() {
                return total;
            }
        }
    }
    total
}

/// Samples `trials` uniform configurations of `n` points in cubes of a few
/// sizes around the interaction scale and checks `Σ V >= -B n` on each.
/// A violation is returned as an error carrying the configuration.
pub fn stability_check(
    potential: &PairPotential,
    dim: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    check_range("dimension", dim, 1, 3)?;
    check_range("particles", n, 1, MAX_STABILITY_PARTICLES)?;
    let bound = -potential.stability_b_in(dim) * n as f64;
    let scale = match potential.range() {
        r if r.is_finite() && r > 0.0 => r,
        _ => match potential.kind() {
            super::PotentialKind::Gaussian { width, .. } => width,
            _ => 1.0,
        },
    };
    let crowd = (n as f64).powf(1.0 / dim as f64);
    let sides = [0.25 * scale, scale, 2.0 * scale * crowd, 0.5 * scale * crowd];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StabilityReport {
        particles: n,
        trials,
        finite: 0,
        min_energy: f64::INFINITY,
        bound,
    };
    for t in 0..trials {
        let side = sides[t % sides.len()];
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(0.0..side)).collect())
            .collect();
        if let Energy::Finite(e) = configuration_energy(potential, &points) {
            report.finite += 1;
            report.min_energy = report.min_energy.min(e);
            if e < bound - 1e-12 * bound.abs().max(1.0) {
                return Err(Error::StabilityViolated {
                    energy: e,
                    bound,
                    configuration: points,
                });
            }
        }
    }
    Ok(report)
}

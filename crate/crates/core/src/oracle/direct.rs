//! `Z_N = (1/N!) ∫_{Λ^N} e^{-βH^per}`, with the first particle pinned at the
//! origin and the remaining integral done by nested Gauss-Legendre (1D) or
//! uniform sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{log_factorial, OracleIntegrator, OracleMethod, OracleResult};
use crate::error::{check_range, Error, Result};
use crate::potential::{periodize, BoxGeometry, Energy, PairPotential, PeriodicPotential};

pub const MAX_QUADRATURE_PARTICLES: usize = 5;
pub const MAX_MC_PARTICLES: usize = 4;

const LATTICE_CUTOFF: usize = 2;
const BATCH: u64 = 4096;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// `Z_N` by direct integration.
pub fn brute_force_z(
    particles: usize,
    geometry: &BoxGeometry,
    potential: &PairPotential,
    beta: f64,
    method: &OracleIntegrator,
) -> Result<OracleResult> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("{beta} must be finite and positive")));
    }
    let volume = geometry.volume();
    match *method {
        OracleIntegrator::Quadrature { subdivisions } => {
            check_range("particle number", particles, 0, MAX_QUADRATURE_PARTICLES)?;
            check_range("subdivisions", subdivisions, 1, 64)?;
            if geometry.dim() != 1 {
                return Err(Error::invalid("method", "direct quadrature is one-dimensional"));
            }
        }
        OracleIntegrator::MonteCarlo { samples, .. } => {
            check_range("particle number", particles, 0, MAX_MC_PARTICLES)?;
            if samples < 2 {
                return Err(Error::invalid("samples", "need at least two samples"));
            }
        }
    }
    let ideal_log = particles as f64 * volume.ln() - log_factorial(particles);
    if particles <= 1 || potential.is_zero() {
        let value = volume.powi(particles as i32) / (1..=particles).map(|k| k as f64).product::<f64>();
        return Ok(OracleResult::exact(value, ideal_log));
    }
    let per = periodize(potential, geometry, LATTICE_CUTOFF)?;
    let prefactor = volume / (1..=particles).map(|k| k as f64).product::<f64>();
    match *method {
        OracleIntegrator::Quadrature { subdivisions } => {
            let grid = Grid::new(&per, particles, subdivisions);
            let hi = grid.integrate(&per, beta, &GL5_NODES, &GL5_WEIGHTS);
            let lo = grid.integrate(&per, beta, &GL4_NODES, &GL4_WEIGHTS);
            let value = prefactor * hi.0;
            Ok(OracleResult {
                value,
                log_value: value.ln(),
                method: OracleMethod::Quadrature,
                error_estimate: prefactor * (hi.0 - lo.0).abs(),
                samples: hi.1,
                seed: None,
            })
        }
        OracleIntegrator::MonteCarlo { samples, seed } => {
            let (mean, stderr) = sample_mean(&per, particles, beta, samples, seed);
            let scale = prefactor * volume.powi(particles as i32 - 1);
            let value = scale * mean;
            Ok(OracleResult {
                value,
                log_value: value.ln(),
                method: OracleMethod::MonteCarlo,
                error_estimate: scale * stderr,
                samples,
                seed: Some(seed),
            })
        }
    }
}

/// `e^{-β Σ_j V^per(x - q_j)}` over the placed points.
fn boltzmann_with(per: &PeriodicPotential, beta: f64, x: &[f64], placed: &[[f64; 3]], dim: usize) -> f64 {
    let mut total = Energy::Finite(0.0);
    for q in placed {
        let mut d = [0.0; 3];
        for c in 0..dim {
            d[c] = x[c] - q[c];
        }
        total = total + per.energy(&d[..dim]);
        if total.is_hard_core() {
            return 0.0;
        }
    }
    total.boltzmann(beta)
}

/// Panel edges for the nested 1D rule.
struct Grid {
    particles: usize,
    half: f64,
    side: f64,
    subdivisions: usize,
    /// `offsets[d]`: sums of at most `d` jump displacements, wrapped.
    offsets: Vec<Vec<f64>>,
}

impl Grid {
    fn new(per: &PeriodicPotential, particles: usize, subdivisions: usize) -> Self {
        let side = per.geometry().side();
        let half = side / 2.0;
        let wrap = |x: f64| {
            let y = x - side * (x / side).round();
            if y <= -half {
                y + side
            } else {
                y
            }
        };
        let mut jumps = Vec::new();
        for r in per.potential().breakpoints() {
            for k in -(LATTICE_CUTOFF as i64)..=LATTICE_CUTOFF as i64 {
                for s in [r, -r] {
                    let x = s + k as f64 * side;
                    if x > -half && x < half {
                        jumps.push(x);
                    }
                }
            }
        }
        let mut offsets = vec![vec![0.0]];
        for d in 1..particles {
            let mut next: Vec<f64> = offsets[d - 1].clone();
            for &s in &offsets[d - 1] {
                for &j in &jumps {
                    next.push(wrap(s + j));
                }
            }
            next.sort_by(f64::total_cmp);
            next.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            offsets.push(next);
        }
        Grid {
            particles,
            half,
            side,
            subdivisions,
            offsets,
        }
    }

    fn edges(&self, placed: &[[f64; 3]], depth: usize) -> Vec<f64> {
        let mut e = vec![-self.half, self.half];
        for q in placed {
            for &s in &self.offsets[depth] {
                let mut x = q[0] + s;
                x -= self.side * (x / self.side).round();
                if x > -self.half && x < self.half {
                    e.push(x);
                }
            }
        }
        e.sort_by(f64::total_cmp);
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        e
    }

    fn nodes(&self, edges: &[f64], xs: &[f64], ws: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in edges.windows(2) {
            let step = (w[1] - w[0]) / self.subdivisions as f64;
            for s in 0..self.subdivisions {
                let a = w[0] + s as f64 * step;
                for (x, wt) in xs.iter().zip(ws) {
                    out.push((a + 0.5 * step * (x + 1.0), 0.5 * step * wt));
                }
            }
        }
        out
    }

    /// `∫ e^{-βH}` over points `2..N`, and the number of leaf evaluations.
    fn integrate(&self, per: &PeriodicPotential, beta: f64, xs: &[f64], ws: &[f64]) -> (f64, u64) {
        let placed = vec![[0.0; 3]];
        let top = self.nodes(&self.edges(&placed, self.particles - 1), xs, ws);
        let parts: Vec<(f64, u64)> = top
            .par_iter()
            .map(|&(x, w)| {
                let b = boltzmann_with(per, beta, &[x], &placed, 1);
                if b == 0.0 {
                    return (0.0, 1);
                }
                let mut next = placed.clone();
                next.push([x, 0.0, 0.0]);
                let (v, n) = self.level(per, beta, xs, ws, &mut next);
                (w * b * v, n)
            })
            .collect();
        parts.iter().fold((0.0, 0), |(s, c), &(v, n)| (s + v, c + n))
    }

    fn level(&self, per: &PeriodicPotential, beta: f64, xs: &[f64], ws: &[f64], placed: &mut Vec<[f64; 3]>) -> (f64, u64) {
        if placed.len() == self.particles {
            return (1.0, 1);
        }
        let depth = self.particles - placed.len();
        let mut total = 0.0;
        let mut count = 0;
        for (x, w) in self.nodes(&self.edges(placed, depth), xs, ws) {
            let b = boltzmann_with(per, beta, &[x], placed, 1);
            if b == 0.0 {
                count += 1;
                continue;
            }
            placed.push([x, 0.0, 0.0]);
            let (v, n) = self.level(per, beta, xs, ws, placed);
            placed.pop();
            total += w * b * v;
            count += n;
        }
        (total, count)
    }
}

/// Mean of `e^{-βH}` with `q_1 = 0` and the rest uniform in the box, and
/// its standard error. Batch `b` draws from stream `b`; batches are
/// combined in order.
fn sample_mean(per: &PeriodicPotential, particles: usize, beta: f64, samples: u64, seed: u64) -> (f64, f64) {
    let dim = per.geometry().dim();
    let half = per.geometry().side() / 2.0;
    let batches = samples.div_ceil(BATCH);
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH.min(samples - b * BATCH);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let mut placed: Vec<[f64; 3]> = vec![[0.0; 3]];
                let mut weight = 1.0;
                for _ in 1..particles {
                    let mut x = [0.0; 3];
                    for c in x.iter_mut().take(dim) {
                        *c = rng.gen_range(-half..half);
                    }
                    if weight != 0.0 {
                        weight *= boltzmann_with(per, beta, &x[..dim], &placed, dim);
                    }
                    placed.push(x);
                }
                s += weight;
                s2 += weight * weight;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = samples as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

//! Reference values that do not go through the expansion: direct
//! integration of the canonical and grand-canonical partition functions,
//! the exact hard-rod formula, and the audit of the series against them.
//!
//! Nothing here calls the integration code of [`crate::integrals`]; the
//! quadrature rule, panel placement and random sampler are separate.

mod direct;

use std::fmt;

use crate::error::{check_range, Error, Result};
use crate::expansion::{log_z_canonical, ExpansionParams, SeriesReport};
use crate::integrals::Integrator;
use crate::potential::{BoxGeometry, PairPotential};

pub use direct::{brute_force_z, MAX_MC_PARTICLES, MAX_QUADRATURE_PARTICLES};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    ExactFormula,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMethod::ExactFormula => "exact-formula",
            OracleMethod::Quadrature => "quadrature",
            OracleMethod::MonteCarlo => "monte-carlo",
        })
    }
}

/// How [`brute_force_z`] integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleIntegrator {
    /// Nested Gauss-Legendre in one dimension, panels split `subdivisions`
    /// times between the jumps of the Boltzmann factor.
    Quadrature { subdivisions: usize },
    MonteCarlo { samples: u64, seed: u64 },
}

impl OracleIntegrator {
    pub fn quadrature() -> Self {
        OracleIntegrator::Quadrature { subdivisions: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// `ln value`, formed directly where a closed form exists.
    pub log_value: f64,
    pub method: OracleMethod,
    pub error_estimate: f64,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl OracleResult {
    pub(crate) fn exact(value: f64, log_value: f64) -> Self {
        OracleResult {
            value,
            log_value,
            method: OracleMethod::ExactFormula,
            error_estimate: 0.0,
            samples: 0,
            seed: None,
        }
    }

    /// `error / value`.
    pub fn relative_error(&self) -> f64 {
        self.error_estimate / self.value.abs()
    }
}

pub(crate) fn log_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `Z = L (L - Nσ)^{N-1} / N!` for `N` hard rods of length `σ` on a circle
/// of length `L`.
pub fn tonks_exact_z(particles: usize, side: f64, sigma: f64) -> Result<OracleResult> {
    if particles == 0 {
        return Ok(OracleResult::exact(1.0, 0.0));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(Error::invalid("L", format!("{side} must be finite and positive")));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid("sigma", format!("{sigma} must be finite and nonnegative")));
    }
    let packed = particles as f64 * sigma;
    if packed >= side {
        return Err(Error::Jammed { packed, side });
    }
    let n = particles as i32;
    let free = side - packed;
    let value = side * free.powi(n - 1) / (1..=particles).map(|k| k as f64).product::<f64>();
    let log_value = side.ln() + (n - 1) as f64 * free.ln() - log_factorial(particles);
    Ok(OracleResult::exact(value, log_value))
}

/// Largest `N` summed in [`brute_force_xi`].
pub const MAX_XI_PARTICLES: usize = 5;

/// `Ξ = Σ_{N <= N_max} z^N Z_N` and a bound on the omitted terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiResult {
    pub value: f64,
    pub error_estimate: f64,
    /// `Σ_{N > N_max} (z|Λ|e^{βB})^N/N!`, bounded by the first omitted term
    /// times a geometric factor; infinite when that series is not yet
    /// decreasing.
    pub remainder_bound: f64,
    /// The remainder bound exceeds the tolerance passed in.
    pub flagged: bool,
}

impl XiResult {
    /// `(1/|Λ|) log Ξ`.
    pub fn log_per_volume(&self, volume: f64) -> f64 {
        self.value.ln() / volume
    }
}

pub fn brute_force_xi(
    z: f64,
    n_max: usize,
    geometry: &BoxGeometry,
    potential: &PairPotential,
    beta: f64,
    method: &OracleIntegrator,
    tolerance: f64,
) -> Result<XiResult> {
    check_range("N_max", n_max, 0, MAX_XI_PARTICLES)?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::invalid("z", format!("{z} must be finite and nonnegative")));
    }
    let (mut value, mut error) = (1.0, 0.0);
    for n in 1..=n_max {
        let zn = brute_force_z(n, geometry, potential, beta, method)?;
        let w = z.powi(n as i32);
        value += w * zn.value;
        error += w * zn.error_estimate;
    }
    let x = z * geometry.volume() * (beta * potential.stability_b_in(geometry.dim())).exp();
    let k = n_max + 1;
    let first = (k as f64 * x.ln() - log_factorial(k)).exp();
    let remainder_bound = if x == 0.0 {
        0.0
    } else if x < (k + 1) as f64 {
        first / (1.0 - x / (k + 1) as f64)
    } else {
        f64::INFINITY
    };
    Ok(XiResult {
        value,
        error_estimate: error,
        remainder_bound,
        flagged: remainder_bound > tolerance,
    })
}

/// Which reference the audit compares against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    /// The exact hard-rod formula; needs a hard-core potential in 1D.
    Tonks,
    Direct(OracleIntegrator),
}

/// The series and the reference side by side.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub expansion: SeriesReport,
    pub oracle: OracleResult,
    /// `(1/|Λ|) log Z` from the reference.
    pub oracle_log_z: f64,
    pub discrepancy: f64,
    /// Named error terms: integrator, truncation, series tail, oracle.
    pub budget_items: Vec<(&'static str, f64)>,
    /// Sum of the items, infinite without a convergence certificate.
    pub budget: f64,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

/// Runs the series and the reference and compares `(1/|Λ|) log Z`.
/// Passes when the discrepancy is within the declared budget and, if
/// given, within `tolerance`.
pub fn compare_expansion_vs_oracle(
    params: &ExpansionParams,
    potential: &PairPotential,
    integrator: &Integrator,
    reference: &Reference,
    tolerance: Option<f64>,
) -> Result<AuditReport> {
    let expansion = log_z_canonical(params, potential, integrator)?;
    let volume = params.volume();
    let oracle = match reference {
        Reference::Tonks => {
            let sigma = match potential.kind() {
                crate::potential::PotentialKind::HardCore { sigma } => sigma,
                _ => return Err(Error::invalid("reference", "the Tonks formula needs a hard-core potential")),
            };
            if params.geometry.dim() != 1 {
                return Err(Error::invalid("reference", "the Tonks formula is one-dimensional"));
            }
            tonks_exact_z(params.particles, params.geometry.side(), sigma)?
        }
        Reference::Direct(method) => brute_force_z(params.particles, &params.geometry, potential, params.beta, method)?,
    };
    let oracle_log_z = oracle.log_value / volume;
    let discrepancy = (expansion.log_z - oracle_log_z).abs();
    let oracle_term = match oracle.method {
        OracleMethod::MonteCarlo => 3.0 * oracle.relative_error() / volume,
        _ => oracle.relative_error() / volume,
    };
    let budget_items = vec![
        ("integrator", expansion.integrator_error),
        ("truncation", expansion.truncation_bound.unwrap_or(f64::INFINITY)),
        ("series_tail", expansion.series_tail.unwrap_or(f64::INFINITY)),
        ("oracle", oracle_term),
    ];
    let budget: f64 = budget_items.iter().map(|(_, v)| v).sum();
    let pass = discrepancy <= budget && tolerance.is_none_or(|t| discrepancy <= t);
    Ok(AuditReport {
        expansion,
        oracle,
        oracle_log_z,
        discrepancy,
        budget_items,
        budget,
        tolerance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tonks_values() {
        assert_eq!(tonks_exact_z(1, 10.0, 0.1).unwrap().value, 10.0);
        assert!((tonks_exact_z(2, 10.0, 0.1).unwrap().value - 49.0).abs() < 1e-12);
        let z3 = tonks_exact_z(3, 10.0, 0.1).unwrap();
        assert!((z3.value - 10.0 * 9.7 * 9.7 / 6.0).abs() < 1e-12);
        assert!((z3.log_value - z3.value.ln()).abs() < 1e-14);
        assert!(matches!(tonks_exact_z(5, 1.0, 0.2), Err(Error::Jammed { .. })));
    }

    #[test]
    fn ideal_grand_canonical() {
        let g = BoxGeometry::new(1, 10.0).unwrap();
        let z = 0.1;
        let xi = brute_force_xi(z, 5, &g, &PairPotential::zero(), 1.0, &OracleIntegrator::quadrature(), 1e-2).unwrap();
        let want = 1.0f64.exp();
        assert!((xi.value - want).abs() / want < 1e-3);
        assert!(xi.remainder_bound >= want - xi.value);
        assert!(!xi.flagged);
        let zero = brute_force_xi(0.0, 3, &g, &PairPotential::zero(), 1.0, &OracleIntegrator::quadrature(), 1e-3).unwrap();
        assert_eq!(zero.value, 1.0);
    }

    #[test]
    fn ideal_audit_is_exact() {
        let params = ExpansionParams::new(3, BoxGeometry::new(1, 10.0).unwrap(), 1.0, 2, 6).unwrap();
        let r = compare_expansion_vs_oracle(
            &params,
            &PairPotential::zero(),
            &Integrator::quadrature(),
            &Reference::Direct(OracleIntegrator::quadrature()),
            None,
        )
        .unwrap();
        assert_eq!(r.discrepancy, 0.0);
        assert!(r.pass);
    }
}

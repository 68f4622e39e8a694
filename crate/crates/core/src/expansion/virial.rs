//! Activity and density series: pressure in the activity, inversion of the
//! density, virial pressure and free energy.

use crate::error::{check_range, Error, Result};
use crate::estimate::IntegralResult;
use crate::integrals::{b_n_connected, weighted_sum, BoxModel, Integrator, MAX_B_ORDER};

fn check_density(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("rho", format!("{rho} must be finite and positive")))
    }
}

fn check_coefficients(beta_coeffs: &[f64], needed: usize) -> Result<()> {
    if beta_coeffs.len() < needed {
        return Err(Error::invalid(
            "beta coefficients",
            format!("need {needed}, got {}", beta_coeffs.len()),
        ));
    }
    if beta_coeffs[..needed].iter().any(|b| !b.is_finite()) {
        return Err(Error::invalid("beta coefficients", "values must be finite"));
    }
    Ok(())
}

/// `βp = Σ_{n=1}^{orders} b_n(Λ) z^n`.
pub fn pressure_activity_series(z: f64, orders: usize, model: &BoxModel, integrator: &Integrator) -> Result<IntegralResult> {
    check_range("orders", orders, 1, MAX_B_ORDER)?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::invalid("z", format!("{z} must be finite and nonnegative")));
    }
    let mut parts = Vec::with_capacity(orders);
    for n in 1..=orders {
        parts.push((z.powi(n as i32), b_n_connected(n, model, integrator)?));
    }
    Ok(weighted_sum(&parts, Some(integrator.seed)))
}

/// `z(ρ) = ρ exp(-Σ_{m=2}^{orders} β_{m-1} ρ^{m-1})`; `beta_coeffs[0]` is `β_1`.
pub fn activity_inversion(rho: f64, beta_coeffs: &[f64], orders: usize) -> Result<f64> {
    check_density(rho)?;
    check_coefficients(beta_coeffs, orders.saturating_sub(1))?;
    let exponent: f64 = (2..=orders).map(|m| beta_coeffs[m - 2] * rho.powi(m as i32 - 1)).sum();
    Ok(rho * (-exponent).exp())
}

/// `βp = ρ - Σ_{m=1}^{m_max} m/(m+1) β_m ρ^{m+1}`.
pub fn virial_pressure(rho: f64, beta_coeffs: &[f64], m_max: usize) -> Result<f64> {
    check_density(rho)?;
    check_coefficients(beta_coeffs, m_max)?;
    let sum: f64 = (1..=m_max)
        .map(|m| m as f64 / (m + 1) as f64 * beta_coeffs[m - 1] * rho.powi(m as i32 + 1))
        .sum();
    Ok(rho - sum)
}

/// `βf = ρ(ln ρ - 1) - Σ_{m=1}^{m_max} β_m ρ^{m+1}/(m+1)`.
pub fn free_energy_density(rho: f64, beta_coeffs: &[f64], m_max: usize) -> Result<f64> {
    check_density(rho)?;
    check_coefficients(beta_coeffs, m_max)?;
    let sum: f64 = (1..=m_max)
        .map(|m| beta_coeffs[m - 1] * rho.powi(m as i32 + 1) / (m + 1) as f64)
        .sum();
    Ok(rho * (rho.ln() - 1.0) - sum)
}

/// Virial coefficients `B_{m+1} = -m/(m+1) β_m`, for `m = 1..`.
pub fn virial_coefficients(beta_coeffs: &[f64]) -> Vec<f64> {
    beta_coeffs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let m = (i + 1) as f64;
            -m / (m + 1.0) * b
        })
        .collect()
}

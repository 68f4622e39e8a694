use std::f64::consts::PI;

use super::{periodize, BoxGeometry, PairPotential, PeriodicPotential, Periodization};
use crate::error::{check_range, Error, Result};
use crate::estimate::IntegralResult;
use crate::quadrature::{gauss_legendre, integrate};

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("beta", format!("{beta} must be finite and positive")))
    }
}

/// Surface measure of the sphere of radius `r` in `d` dimensions.
fn shell(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI * r,
        _ => 4.0 * PI * r * r,
    }
}

/// `∫_0^R g(f(r)) S_d(r) dr` over the breakpoints of `V`, plus the envelope
/// bound on `∫_R^∞ |f|`. `g` must satisfy `|g(f)| <= |f|`.
pub(crate) fn radial(
    potential: &PairPotential,
    beta: f64,
    dim: usize,
    g: impl Fn(f64) -> f64,
) -> Result<IntegralResult> {
    if potential.is_zero() {
        return Ok(IntegralResult::exact(0.0));
    }
    let reach = potential.support_radius(beta);
    let (order, splits) = if potential.is_piecewise_constant() && dim == 1 {
        (4, 1)
    } else {
        (24, 16)
    };
    let integrand = |r: f64| g(potential.mayer_f(beta, r)) * shell(dim, r);
    let (value, err) = integrate(integrand, 0.0, reach, potential.breakpoints(), order, splits);
    let pieces = potential.breakpoints().len() + 1;
    let nodes = (order * splits * pieces) as u64;
    let mut tail = 0.0;
    if reach < potential.range() {
        // beyond the reach |f| <= e^{βψ} - 1, decreasing
        let env = |r: f64| (beta * potential.psi(r)).exp_m1() * shell(dim, r);
        let width = reach.max(1.0);
        let (t, _) = integrate(env, reach, reach + 8.0 * width, [], 24, 16);
        let edge = env(reach + 8.0 * width);
        let settled = edge <= 1e-300 || edge <= 1e-3 * t;
        if !t.is_finite() || !settled {
            return Err(Error::NonConvergent(format!("envelope tail beyond r = {reach}")));
        }
        tail = t;
    }
    if !value.is_finite() {
        return Err(Error::NonConvergent("|e^(-bV) - 1| is not integrable".into()));
    }
    if potential.is_piecewise_constant() && dim == 1 {
        return Ok(IntegralResult::exact(value));
    }
    Ok(IntegralResult::quadrature(value, err + tail, nodes))
}

/// `C(β) = ∫_{R^d} |e^{-βV(q)} - 1| dq`, by radial quadrature with one panel
/// per piece of `V`.
pub fn c_beta(potential: &PairPotential, beta: f64, dim: usize) -> Result<IntegralResult> {
    check_beta(beta)?;
    check_range("dimension", dim, 1, 3)?;
    radial(potential, beta, dim, f64::abs)
}

/// `C_Λ(β) = ∫_Λ |e^{-βV^per(q)} - 1| dq`.
///
/// Equal to `C(β)` when the range is below `L/2`; otherwise a tensor
/// quadrature over the box with the lattice-summed potential.
pub fn c_beta_box(
    potential: &PairPotential,
    beta: f64,
    geometry: &BoxGeometry,
    lattice_cutoff: usize,
) -> Result<IntegralResult> {
    check_beta(beta)?;
    let per = periodize(potential, geometry, lattice_cutoff)?;
    if per.mode() == Periodization::NearestImage {
        return radial(potential, beta, geometry.dim(), f64::abs);
    }
    Ok(box_integral(&per, f64::abs, beta))
}

/// `∫_Λ g(f^per(q)) dq` by tensor Gauss-Legendre, with breakpoint-aligned
/// panels along each axis.
pub(crate) fn box_integral(per: &PeriodicPotential, g: impl Fn(f64) -> f64, beta: f64) -> IntegralResult {
    let geometry = per.geometry();
    let l = geometry.side();
    let d = geometry.dim();
    let (order, splits) = match d {
        1 => (24, 16),
        2 => (16, 8),
        _ => (10, 6),
    };
    let axis = |order: usize| {
        let rule = gauss_legendre(order);
        let edges = crate::quadrature::panel_edges(-l / 2.0, l / 2.0, per.breakpoints_1d());
        let mut pts = Vec::new();
        for w in edges.windows(2) {
            let step = (w[1] - w[0]) / splits as f64;
            for s in 0..splits {
                let mid = w[0] + (s as f64 + 0.5) * step;
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    pts.push((mid + step / 2.0 * x, step / 2.0 * wt));
                }
            }
        }
        pts
    };
    let tensor = |pts: &[(f64, f64)]| {
        let mut total = 0.0;
        let n = pts.len();
        let count = n.pow(d as u32);
        let mut q = [0.0; 3];
        for idx in 0..count {
            let mut rest = idx;
            let mut w = 1.0;
            for slot in q.iter_mut().take(d) {
                let (x, wt) = pts[rest % n];
                rest /= n;
                *slot = x;
                w *= wt;
            }
            total += w * g(per.mayer_f(beta, &q[..d]));
        }
        (total, count as u64)
    };
    let (hi, nodes) = tensor(&axis(order));
    let (lo, _) = tensor(&axis(order - 2));
    IntegralResult::quadrature(hi, (hi - lo).abs(), nodes)
}

use super::weight::abs_f64;
use super::{PolymerSystem, Weight};
use crate::error::{Error, Result};

/// `L(δ) = -ln(1 - δ) / δ`, the supremum of `-ln(1 - x)/x` on `(0, δ)`.
pub fn l_factor(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("{delta} is not in (0, 1)")));
    }
    Ok(-(-delta).ln_1p() / delta)
}

/// Outcome of checking both convergence hypotheses for given `a`, `c`, `δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct KpCertificate {
    pub holds: bool,
    pub delta: f64,
    pub l_factor: f64,
    /// `|ω(γ)| e^{a(γ)} <= δ` for every polymer.
    pub smallness_holds: bool,
    /// `δ - |ω(γ)| e^{a(γ)}` per polymer.
    pub smallness_slack: Vec<f64>,
    /// `a(γ')/L - sum_{γ ≁ γ'} |ω(γ)| e^{a(γ)+c(γ)}` per polymer.
    pub margins: Vec<f64>,
    /// Polymer with the smallest margin.
    pub worst_polymer: Option<usize>,
}

impl KpCertificate {
    /// Name of the first hypothesis that fails, if any.
    pub fn failed_hypothesis(&self) -> Option<&'static str> {
        if !self.smallness_holds {
            Some("smallness: |w| e^a <= delta")
        } else if !self.holds {
            Some("incompatible sum: sum |w| e^(a+c) <= a/L")
        } else {
            None
        }
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_parameters<W>(system: &PolymerSystem<W>, a: &[f64], c: &[f64]) -> Result<()> {
    for (name, values) in [("a", a), ("c", c)] {
        if values.len() != system.len() {
            return Err(Error::invalid(name, "one value per polymer required"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(name, "values must be finite and nonnegative"));
        }
    }
    Ok(())
}

/// Evaluates the smallness hypothesis and the incompatible-sum condition
/// `sum_{γ ≁ γ'} |ω(γ)| e^{a(γ)+c(γ)} <= a(γ')/L(δ)` for every `γ'`.
pub fn kp_condition_check<W: Weight>(
    system: &PolymerSystem<W>,
    a: &[f64],
    c: &[f64],
    delta: f64,
) -> Result<KpCertificate> {
    let l = l_factor(delta)?;
    check_parameters(system, a, c)?;
    let abs: Vec<f64> = (0..system.len()).map(|i| abs_f64(system.weight(i))).collect();
    let smallness_slack: Vec<f64> = (0..system.len()).map(|i| delta - abs[i] * a[i].exp()).collect();
    let smallness_holds = smallness_slack.iter().all(|&s| s >= 0.0);
    let margins: Vec<f64> = (0..system.len())
        .map(|target| {
            let load: f64 = std::iter::once(target)
                .chain(system.neighbours(target).iter().copied())
                .map(|g| abs[g] * (a[g] + c[g]).exp())
                .sum();
            a[target] / l - load
        })
        .collect();
    let worst_polymer = (0..margins.len()).min_by(|&i, &j| margins[i].total_cmp(&margins[j]));
    let holds = smallness_holds && margins.iter().all(|&m| m >= 0.0);
    Ok(KpCertificate {
        holds,
        delta,
        l_factor: l,
        smallness_holds,
        smallness_slack,
        margins,
        worst_polymer,
    })
}

/// Right side of the pinned bound, `L |ω(γ')| e^{a(γ')+c(γ')}`, with `δ`
/// taken as the smallest value the smallness hypothesis allows.
pub fn pinned_cluster_bound<W: Weight>(
    system: &PolymerSystem<W>,
    gamma_prime: usize,
    a: &[f64],
    c: &[f64],
) -> Result<f64> {
    if gamma_prime >= system.len() {
        return Err(Error::UnknownPolymer(format!("#{gamma_prime}")));
    }
    check_parameters(system, a, c)?;
    let delta = tight_delta(system, a)?;
    let cert = kp_condition_check(system, a, c, delta)?;
    if !cert.holds {
        return Err(Error::ConditionNotVerified(
            cert.failed_hypothesis().unwrap_or("unknown").to_string(),
        ));
    }
    Ok(cert.l_factor * abs_f64(system.weight(gamma_prime)) * (a[gamma_prime] + c[gamma_prime]).exp())
}

/// `max |ω| e^a`, nudged into `(0, 1)`.
fn tight_delta<W: Weight>(system: &PolymerSystem<W>, a: &[f64]) -> Result<f64> {
    let delta = (0..system.len())
        .map(|i| abs_f64(system.weight(i)) * a[i].exp())
        .fold(0.0f64, f64::max);
    if delta >= 1.0 {
        return Err(Error::ConditionNotVerified(format!(
            "smallness: max |w| e^a = {delta} is not below 1"
        )));
    }
    Ok(delta.max(f64::MIN_POSITIVE))
}

/// Bound on the clusters left out when truncating at total multiplicity
/// `M`: every omitted cluster contains some `γ'` and has `sum I c >=
/// c_min (M+1)`, so the pinned bound gives
/// `e^{-c_min (M+1)} sum_γ' L |ω(γ')| e^{a(γ')+c(γ')}`.
pub fn truncation_tail_bound<W: Weight>(
    system: &PolymerSystem<W>,
    a: &[f64],
    c: &[f64],
    max_total_multiplicity: usize,
) -> Result<f64> {
    check_parameters(system, a, c)?;
    let mut total = 0.0;
    for g in 0..system.len() {
        total += pinned_cluster_bound(system, g, a, c)?;
    }
    let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
    let c_min = if c_min.is_finite() { c_min } else { 0.0 };
    Ok((-c_min * (max_total_multiplicity as f64 + 1.0)).exp() * total)
}

/// Uniform parameters found by [`search_uniform_parameters`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KpParameters {
    pub a: f64,
    pub c: f64,
    pub delta: f64,
    /// Truncation tail bound at the requested `M`.
    pub tail: f64,
}

const C_CAP: f64 = 50.0;

/// Scans uniform `a` on a grid; for each, the largest uniform `c` making
/// every margin nonnegative is explicit. Returns the pair with the smallest
/// truncation tail at `M`, or `None` if no grid point certifies.
pub fn search_uniform_parameters<W: Weight>(
    system: &PolymerSystem<W>,
    max_total_multiplicity: usize,
) -> Option<KpParameters> {
    search_uniform_parameters_at(system, max_total_multiplicity, None)
}

/// As [`search_uniform_parameters`], with `δ` held fixed when given; grid
/// points violating smallness at that `δ` are skipped.
pub fn search_uniform_parameters_at<W: Weight>(
    system: &PolymerSystem<W>,
    max_total_multiplicity: usize,
    fixed_delta: Option<f64>,
) -> Option<KpParameters> {
    let n = system.len();
    let abs: Vec<f64> = (0..n).map(|i| abs_f64(system.weight(i))).collect();
    let max_abs = abs.iter().copied().fold(0.0f64, f64::max);
    let loads: Vec<f64> = (0..n)
        .map(|t| abs[t] + system.neighbours(t).iter().map(|&g| abs[g]).sum::<f64>())
        .collect();
    let mut best: Option<KpParameters> = None;
    for step in 1..=300 {
        let a = step as f64 * 0.01;
        let delta = match fixed_delta {
            Some(d) if max_abs * a.exp() > d => break,
            Some(d) => d,
            None => (max_abs * a.exp()).max(1e-12),
        };
        let Ok(l) = l_factor(delta) else { continue };
        // e^{a+c} load <= a/L for every target
        let c = loads
            .iter()
            .map(|&s| if s == 0.0 { C_CAP } else { (a / (l * s)).ln() - a })
            .fold(C_CAP, f64::min);
        // back off from the boundary so rounding cannot flip a margin
        let c = c - 1e-9 * c.abs().max(1.0);
        if c < 0.0 {
            continue;
        }
        let (av, cv) = (vec![a; n], vec![c; n]);
        if !kp_condition_check(system, &av, &cv, delta).is_ok_and(|k| k.holds) {
            continue;
        }
        let tail = (-c * (max_total_multiplicity as f64 + 1.0)).exp() * l * (a + c).exp() * abs.iter().sum::<f64>();
        if best.is_none_or(|b| tail < b.tail) {
            best = Some(KpParameters { a, c, delta, tail });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::{pinned_cluster_sum, Polymer};

    fn single(w: f64) -> PolymerSystem<f64> {
        PolymerSystem::new(vec![Polymer::new("g", w)], &[]).unwrap()
    }

    #[test]
    fn l_factor_values() {
        assert!((l_factor(0.5).unwrap() - 2.0f64.ln() / 0.5).abs() < 1e-15);
        assert!(l_factor(0.0).is_err());
        assert!(l_factor(1.0).is_err());
        assert!(l_factor(1e-9).unwrap() - 1.0 < 1e-8);
    }

    #[test]
    fn zero_weights_hold_with_full_slack() {
        let sys = PolymerSystem::new(vec![Polymer::new("a", 0.0), Polymer::new("b", 0.0)], &[(0, 1)]).unwrap();
        let cert = kp_condition_check(&sys, &[0.5, 0.5], &[0.1, 0.1], 0.1).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.margins, vec![0.5 / cert.l_factor; 2]);
    }

    #[test]
    fn single_polymer_example() {
        let sys = single(0.05);
        let cert = kp_condition_check(&sys, &[0.1], &[0.1], 0.06).unwrap();
        assert!(cert.holds, "{cert:?}");
        let bound = pinned_cluster_bound(&sys, 0, &[0.1], &[0.1]).unwrap();
        let lhs = pinned_cluster_sum(&sys, 0, &[0.1], 6).unwrap();
        assert!(lhs <= bound, "{lhs} > {bound}");
    }

    #[test]
    fn search_respects_a_fixed_delta() {
        let sys = PolymerSystem::new(vec![Polymer::new("a", 0.01), Polymer::new("b", 0.01)], &[(0, 1)]).unwrap();
        let p = search_uniform_parameters_at(&sys, 8, Some(0.5)).unwrap();
        assert_eq!(p.delta, 0.5);
        assert!(kp_condition_check(&sys, &[p.a; 2], &[p.c; 2], 0.5).unwrap().holds);
        assert!(search_uniform_parameters_at(&sys, 8, Some(0.005)).is_none());
    }

    #[test]
    fn oversized_weight_fails_smallness() {
        let sys = single(0.5);
        let cert = kp_condition_check(&sys, &[1.0], &[0.1], 0.2).unwrap();
        assert!(!cert.holds);
        assert_eq!(cert.failed_hypothesis(), Some("smallness: |w| e^a <= delta"));
        assert!(matches!(
            pinned_cluster_bound(&sys, 0, &[1.0], &[0.1]),
            Err(Error::ConditionNotVerified(_))
        ));
    }

    #[test]
    fn symmetric_pair_has_equal_bounds() {
        let sys = PolymerSystem::new(vec![Polymer::new("a", 0.02), Polymer::new("b", 0.02)], &[(0, 1)]).unwrap();
        let (a, c) = ([0.2, 0.2], [0.1, 0.1]);
        assert_eq!(
            pinned_cluster_bound(&sys, 0, &a, &c).unwrap(),
            pinned_cluster_bound(&sys, 1, &a, &c).unwrap()
        );
        let zero = PolymerSystem::new(vec![Polymer::new("a", 0.0)], &[]).unwrap();
        assert_eq!(pinned_cluster_bound(&zero, 0, &[0.2], &[0.1]).unwrap(), 0.0);
        assert_eq!(pinned_cluster_sum(&zero, 0, &[0.1], 4).unwrap(), 0.0);
    }

    #[test]
    fn search_finds_certifying_parameters() {
        let sys = PolymerSystem::new(
            (0..6).map(|i| Polymer::new(format!("p{i}"), 0.05)).collect(),
            &(0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect::<Vec<_>>(),
        )
        .unwrap();
        let p = search_uniform_parameters(&sys, 8).unwrap();
        let cert = kp_condition_check(&sys, &[p.a; 6], &[p.c; 6], p.delta).unwrap();
        assert!(cert.holds);
        let tail = truncation_tail_bound(&sys, &[p.a; 6], &[p.c; 6], 8).unwrap();
        assert!((tail - p.tail).abs() <= 1e-9 * tail.max(1.0));
    }
}

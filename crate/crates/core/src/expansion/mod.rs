//! The free-energy coefficients `F^M_{N,Λ}(n) = P·B/(n+1)`, the series for
//! `(1/|Λ|) log Z`, their bounds, the infinite-volume sweeps and the density
//! series.

mod cancellation;
mod certificate;
mod clusters;
mod virial;

use rayon::prelude::*;

use crate::error::{check_range, Error, Result};
use crate::estimate::IntegralResult;
use crate::integrals::{beta_n, tree_graph_bound_from, BoxModel, Integrator, ZetaTable};
use crate::potential::{c_beta, BoxGeometry, PairPotential};

pub use cancellation::{
    cancellation_check, default_block_weights, BlockMonomial, CancellationReport, MAX_CANCELLATION_DEGREE,
    MAX_CANCELLATION_ORDER,
};
pub use certificate::{
    search_vertex_parameters, vertex_certificate, VertexCertificate, VertexZeta, ZetaSource,
    MAX_CERTIFIED_PARTICLES,
};
pub use clusters::{
    f_graph_route, f_vertex_route, ClusterMonomial, GraphClusters, MAX_B_FACTOR_ORDER, MAX_TRUNCATION,
    MAX_VERTEX_ROUTE_PARTICLES,
};
pub use virial::{activity_inversion, free_energy_density, pressure_activity_series, virial_coefficients, virial_pressure};

/// Sizes up to which `|ζ_Λ(V)|` enters the certificate as a computed value;
/// larger sizes use the tree-graph bound.
pub const COMPUTED_ZETA_SIZE: usize = 5;

/// `P_{N,|Λ|}(n) = (N-1)…(N-n)/|Λ|^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PFactor {
    pub value: f64,
    /// `n >= N`: a factor `N - n <= 0` appears and the value is 0.
    pub vanishes: bool,
}

pub fn p_factor(particles: usize, volume: f64, n: usize) -> Result<PFactor> {
    if particles == 0 {
        return Err(Error::invalid("N", "need at least one particle"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "orders start at 1"));
    }
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::invalid("volume", format!("{volume} must be finite and positive")));
    }
    if n >= particles {
        return Ok(PFactor {
            value: 0.0,
            vanishes: true,
        });
    }
    let value = (1..=n).fold(1.0, |acc, i| acc * (particles - i) as f64 / volume);
    Ok(PFactor { value, vanishes: false })
}

/// `B^M_{β,Λ}(n) = |Λ|^n/n! Σ_{Ĩ: ‖Ĩ‖ <= M, ∪ Ĩ = {1..n+1}} c_Ĩ ζ̃^Ĩ`.
pub fn b_factor(n: usize, max_norm: usize, model: &BoxModel, integrator: &Integrator) -> Result<IntegralResult> {
    let table = ZetaTable::new(model, *integrator);
    Ok(b_factor_with(&table, n, max_norm)?.0)
}

/// [`b_factor`] on a shared table of graph activities, with the value split
/// by the power of `|Λ|` each term carries (highest first).
pub fn b_factor_with(table: &ZetaTable<'_>, n: usize, max_norm: usize) -> Result<(IntegralResult, Vec<(i32, f64)>)> {
    check_range("order n", n, 1, MAX_B_FACTOR_ORDER)?;
    check_range("truncation M", max_norm, n + 1, MAX_TRUNCATION)?;
    let clusters = GraphClusters::get(n, max_norm)?;
    table.prefill(&clusters.classes)?;
    let zeta = clusters
        .classes
        .iter()
        .map(|g| table.get(g))
        .collect::<Result<Vec<_>>>()?;
    clusters.b_value(&zeta, table.model().volume())
}

/// How the convergence parameters are chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Convergence {
    Given { a: f64, c: f64 },
    /// The largest certified `c` over a grid of `a`.
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionParams {
    pub particles: usize,
    pub geometry: BoxGeometry,
    pub beta: f64,
    pub n_max: usize,
    /// `M`.
    pub max_norm: usize,
    pub convergence: Convergence,
    pub lattice_cutoff: usize,
}

impl ExpansionParams {
    pub fn new(particles: usize, geometry: BoxGeometry, beta: f64, n_max: usize, max_norm: usize) -> Result<Self> {
        let params = ExpansionParams {
            particles,
            geometry,
            beta,
            n_max,
            max_norm,
            convergence: Convergence::Search,
            lattice_cutoff: 2,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_parameters(mut self, a: f64, c: f64) -> Result<Self> {
        self.convergence = Convergence::Given { a, c };
        self.validate()?;
        Ok(self)
    }

    pub fn with_lattice_cutoff(mut self, cutoff: usize) -> Self {
        self.lattice_cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_range("particle number N", self.particles, 1, MAX_CERTIFIED_PARTICLES)?;
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::invalid("beta", format!("{} must be finite and positive", self.beta)));
        }
        check_range("n_max", self.n_max, 1, MAX_B_FACTOR_ORDER)?;
        check_range("truncation M", self.max_norm, self.n_max + 1, MAX_TRUNCATION)?;
        if let Convergence::Given { a, c } = self.convergence {
            for (name, v) in [("a", a), ("c", c)] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::invalid(name, format!("{v} must be finite and positive")));
                }
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.geometry.volume()
    }

    /// `ρ = N/|Λ|`.
    pub fn rho(&self) -> f64 {
        self.particles as f64 / self.volume()
    }
}

/// One order of the series.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderRow {
    pub n: usize,
    pub p_factor: PFactor,
    pub b_factor: IntegralResult,
    /// `B` split by the power of `|Λ|` its terms carry, highest first.
    pub b_by_volume_power: Vec<(i32, f64)>,
    pub f_value: f64,
    pub f_error: f64,
    /// `L e^α e^{-cn}` when the certificate holds.
    pub tail_bound: Option<f64>,
    /// `L e^α e^{-c(n+M)/2}` when the certificate holds.
    pub truncation_bound: Option<f64>,
}

/// `(1/|Λ|) log Z` from the series, with every ingredient.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesReport {
    pub params: ExpansionParams,
    pub potential: PairPotential,
    pub integrator: Integrator,
    pub rows: Vec<OrderRow>,
    /// `(1/|Λ|) log(|Λ|^N/N!)`.
    pub ideal_term: f64,
    /// `ρ Σ_{n <= n_max} F^M(n)`.
    pub series_sum: f64,
    pub log_z: f64,
    /// `ρ Σ |error of F^M(n)|`.
    pub integrator_error: f64,
    /// `ρ Σ_{n <= n_max} L e^α e^{-c(n+M)/2}`.
    pub truncation_bound: Option<f64>,
    /// `ρ Σ_{n_max < n < N} L e^α e^{-cn}`; zero when `n_max >= N - 1`.
    pub series_tail: Option<f64>,
    pub certificate: Option<VertexCertificate>,
    /// `ρ e^{2βB+α+1} C(β)`, which the density condition wants below 1.
    pub delta_prime: Option<f64>,
    pub warnings: Vec<String>,
}

impl SeriesReport {
    /// Sum of every declared error term, or `None` if a bound is missing.
    pub fn error_budget(&self) -> Option<f64> {
        Some(self.integrator_error + self.truncation_bound? + self.series_tail?)
    }
}

fn log_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `(1/|Λ|) log(|Λ|^N/N!)`.
pub fn ideal_term(particles: usize, volume: f64) -> f64 {
    (particles as f64 * volume.ln() - log_factorial(particles)) / volume
}

/// Magnitudes of `ζ_Λ(V)` for `|V| = 2..=N`: computed from the table up to
/// [`COMPUTED_ZETA_SIZE`], the tree-graph bound beyond.
pub fn vertex_zetas(table: &ZetaTable<'_>, particles: usize) -> Result<Vec<VertexZeta>> {
    let model = table.model();
    let mut out = Vec::new();
    let mut bound_inputs = None;
    for k in 2..=particles {
        if k <= COMPUTED_ZETA_SIZE {
            let classes = crate::integrals::graph_classes(k, false)?;
            table.prefill(classes.iter().map(|c| &c.representative))?;
            let (mut value, mut error) = (0.0, 0.0);
            for c in classes.iter() {
                let r = table.get(&c.representative)?;
                value += c.count as f64 * r.value;
                error += c.count as f64 * r.error;
            }
            out.push(VertexZeta {
                size: k,
                magnitude: value.abs() + 3.0 * error,
                source: ZetaSource::Computed,
            });
        } else {
            if bound_inputs.is_none() {
                let c = model.c_lambda()?;
                bound_inputs = Some(c.value + c.error);
            }
            let c_lambda = bound_inputs.unwrap();
            let beta_b = model.beta() * model.potential().stability_b_in(model.dim());
            out.push(VertexZeta {
                size: k,
                magnitude: tree_graph_bound_from(k, model.volume(), c_lambda, beta_b, 0.0),
                source: ZetaSource::TreeGraphBound,
            });
        }
    }
    Ok(out)
}

/// Certificate for the parameters, searched or given.
pub fn certify(params: &ExpansionParams, table: &ZetaTable<'_>) -> Result<Option<VertexCertificate>> {
    let zeta = vertex_zetas(table, params.particles)?;
    match params.convergence {
        Convergence::Given { a, c } => Ok(Some(vertex_certificate(params.particles, &zeta, a, c)?)),
        Convergence::Search => search_vertex_parameters(params.particles, &zeta),
    }
}

fn order_row(
    params: &ExpansionParams,
    table: &ZetaTable<'_>,
    certificate: Option<&VertexCertificate>,
    n: usize,
) -> Result<OrderRow> {
    let p = p_factor(params.particles, params.volume(), n)?;
    let (b, by_power) = b_factor_with(table, n, params.max_norm)?;
    let scale = p.value / (n + 1) as f64;
    let certified = certificate.filter(|c| c.holds);
    Ok(OrderRow {
        n,
        p_factor: p,
        b_factor: b,
        b_by_volume_power: by_power,
        f_value: scale * b.value,
        f_error: scale.abs() * b.error,
        tail_bound: certified.map(|c| c.decay_bound(n)),
        truncation_bound: certified.map(|c| c.truncation_bound(n, params.max_norm)),
    })
}

/// `F^M_{N,Λ}(n) = P(n) B^M(n)/(n+1)` with its bounds; computed even when
/// no certificate holds, in which case the bounds are absent.
pub fn f_coefficient(
    params: &ExpansionParams,
    potential: &PairPotential,
    integrator: &Integrator,
    n: usize,
) -> Result<OrderRow> {
    params.validate()?;
    check_range("order n", n, 1, params.n_max)?;
    let model = BoxModel::new(potential, &params.geometry, params.beta, params.lattice_cutoff)?;
    let table = ZetaTable::new(&model, *integrator);
    let certificate = certify(params, &table)?;
    order_row(params, &table, certificate.as_ref(), n)
}

/// `(1/|Λ|) log Z ≈ (1/|Λ|) log(|Λ|^N/N!) + ρ Σ_{n <= n_max} F^M(n)`.
pub fn log_z_canonical(params: &ExpansionParams, potential: &PairPotential, integrator: &Integrator) -> Result<SeriesReport> {
    params.validate()?;
    let model = BoxModel::new(potential, &params.geometry, params.beta, params.lattice_cutoff)?;
    let table = ZetaTable::new(&model, *integrator);
    let certificate = certify(params, &table)?;
    let rows: Vec<OrderRow> = (1..=params.n_max)
        .into_par_iter()
        .map(|n| order_row(params, &table, certificate.as_ref(), n))
        .collect::<Result<_>>()?;
    let rho = params.rho();
    let mut warnings = Vec::new();
    let certified = certificate.as_ref().filter(|c| c.holds);
    match &certificate {
        None => warnings.push("no convergence parameters certify; bounds omitted".to_string()),
        Some(c) if !c.holds => warnings.push(format!(
            "certificate fails at a = {}, c = {}: {}",
            c.a,
            c.c,
            c.failed_hypothesis().unwrap_or("unknown")
        )),
        _ => {}
    }
    let series: f64 = rows.iter().map(|r| r.f_value).sum();
    let series_sum = rho * series;
    let ideal = ideal_term(params.particles, params.volume());
    let integrator_error = rho * rows.iter().map(|r| r.f_error).fold(0.0, |a, e| a + e);
    let truncation_bound = certified.map(|c| {
        rho * (1..=params.n_max.min(params.particles.saturating_sub(1)))
            .map(|n| c.truncation_bound(n, params.max_norm))
            .fold(0.0, |a, b| a + b)
    });
    let series_tail = certified.map(|c| {
        rho * (params.n_max + 1..params.particles)
            .map(|n| c.decay_bound(n))
            .fold(0.0, |a, b| a + b)
    });
    let delta_prime = match &certificate {
        Some(c) => {
            let cb = c_beta(potential, params.beta, params.geometry.dim())?;
            let exponent = 2.0 * params.beta * potential.stability_b_in(params.geometry.dim()) + c.alpha() + 1.0;
            let d = rho * exponent.exp() * cb.value;
            if d >= 1.0 {
                warnings.push(format!("density condition not met: delta' = {d}"));
            }
            Some(d)
        }
        None => None,
    };
    Ok(SeriesReport {
        params: *params,
        potential: *potential,
        integrator: *integrator,
        rows,
        ideal_term: ideal,
        series_sum,
        log_z: ideal + series_sum,
        integrator_error,
        truncation_bound,
        series_tail,
        certificate,
        delta_prime,
        warnings,
    })
}

/// One box size of a [`thermo_limit_sweep`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub side: f64,
    pub b_factor: IntegralResult,
    /// `|B - β_n|`.
    pub error: f64,
    /// Previous row's error over this one's.
    pub ratio: Option<f64>,
    /// `log2` of the ratio divided by `log2` of the side ratio.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSweep {
    pub n: usize,
    pub max_norm: usize,
    pub reference: IntegralResult,
    pub rows: Vec<SweepRow>,
}

/// `B^M_{β,Λ}(n)` over box sides against `β_n`.
pub fn thermo_limit_sweep(
    n: usize,
    sides: &[f64],
    potential: &PairPotential,
    beta: f64,
    dim: usize,
    max_norm: usize,
    integrator: &Integrator,
) -> Result<LimitSweep> {
    if sides.is_empty() {
        return Err(Error::invalid("sides", "need at least one box side"));
    }
    let reference = beta_n(n, potential, beta, dim, integrator, None)?;
    let values: Vec<IntegralResult> = sides
        .par_iter()
        .map(|&side| {
            let geometry = BoxGeometry::new(dim, side)?;
            let model = BoxModel::new(potential, &geometry, beta, 2)?;
            b_factor(n, max_norm, &model, integrator)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = Vec::with_capacity(sides.len());
    for (i, (&side, b)) in sides.iter().zip(values).enumerate() {
        let error = (b.value - reference.value).abs();
        let (ratio, order) = if i == 0 {
            (None, None)
        } else {
            let prev = &rows[i - 1];
            let r = prev.error / error;
            (Some(r), Some(r.log2() / (side / prev.side).log2()))
        };
        rows.push(SweepRow {
            side,
            b_factor: b,
            error,
            ratio,
            order,
        });
    }
    Ok(LimitSweep {
        n,
        max_norm,
        reference,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rods(sigma: f64, side: f64) -> BoxModel {
        let p = PairPotential::hard_core(sigma).unwrap();
        BoxModel::new(&p, &BoxGeometry::new(1, side).unwrap(), 1.0, 2).unwrap()
    }

    #[test]
    fn p_factor_values() {
        let p = p_factor(10, 10.0, 2).unwrap();
        assert!((p.value - 0.72).abs() < 1e-15 && !p.vanishes);
        assert_eq!(p_factor(7, 3.0, 1).unwrap().value, 2.0);
        let z = p_factor(3, 10.0, 3).unwrap();
        assert!(z.vanishes && z.value == 0.0);
        let mut last = f64::INFINITY;
        for n in [100, 1000, 10_000] {
            let e = (p_factor(n, n as f64 / 0.5, 2).unwrap().value - 0.25).abs();
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn b1_is_a_truncated_logarithm() {
        let (sigma, side) = (0.1, 10.0);
        let m = rods(sigma, side);
        let b = b_factor(1, 8, &m, &Integrator::quadrature()).unwrap();
        let x = -2.0 * sigma / side;
        let want = side * (x - x * x / 2.0 + x.powi(3) / 3.0 - x.powi(4) / 4.0);
        assert!((b.value - want).abs() < 1e-14, "{} vs {want}", b.value);
        assert_eq!(b.error, 0.0);
    }

    #[test]
    fn two_rods_exact() {
        // Z_2 = L(L - 2σ)/2: the series at n_max = 1 is L log(1 - 2σ/L)
        // truncated at M/2 powers
        let (sigma, side) = (0.1, 10.0);
        let p = PairPotential::hard_core(sigma).unwrap();
        let params = ExpansionParams::new(2, BoxGeometry::new(1, side).unwrap(), 1.0, 1, 8).unwrap();
        let r = log_z_canonical(&params, &p, &Integrator::quadrature()).unwrap();
        let exact = (side * (side - 2.0 * sigma) / 2.0).ln() / side;
        assert!((r.log_z - exact).abs() < 1e-10, "{} vs {exact}", r.log_z);
        assert_eq!(r.series_tail, Some(0.0));
    }

    #[test]
    fn ideal_gas_is_the_ideal_term() {
        let params = ExpansionParams::new(4, BoxGeometry::new(1, 10.0).unwrap(), 1.0, 3, 6).unwrap();
        let r = log_z_canonical(&params, &PairPotential::zero(), &Integrator::quadrature()).unwrap();
        assert_eq!(r.log_z, ideal_term(4, 10.0));
        assert!(r.rows.iter().all(|row| row.f_value == 0.0));
    }

    #[test]
    fn f1_assembled() {
        let p = PairPotential::hard_core(0.1).unwrap();
        let params = ExpansionParams::new(4, BoxGeometry::new(1, 10.0).unwrap(), 1.0, 1, 4).unwrap();
        let row = f_coefficient(&params, &p, &Integrator::quadrature(), 1).unwrap();
        let b = b_factor(1, 4, &rods(0.1, 10.0), &Integrator::quadrature()).unwrap();
        assert!((row.f_value - 0.5 * 0.3 * b.value).abs() < 1e-15);
    }

    #[test]
    fn b1_sweep_halves() {
        let p = PairPotential::hard_core(0.1).unwrap();
        let s = thermo_limit_sweep(1, &[5.0, 10.0, 20.0, 40.0], &p, 1.0, 1, 8, &Integrator::quadrature()).unwrap();
        for row in &s.rows[1..] {
            let r = row.ratio.unwrap();
            assert!((1.5..=2.5).contains(&r), "{r}");
        }
    }
}

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use canonical_cluster::config::{parse_polymer_system, Config, KpConfig, RunConfig};
use canonical_cluster::estimate::IntegralResult;
use canonical_cluster::expansion::{
    activity_inversion, free_energy_density, log_z_canonical, virial_pressure, SeriesReport,
};
use canonical_cluster::graph::{connected_graphs, enumerate_graphs, enumerate_trees, two_connected_graphs, LabeledGraph};
use canonical_cluster::integrals::{beta_n, Integrator};
use canonical_cluster::polymer::{kp_condition_check, search_uniform_parameters_at, truncation_tail_bound, KpCertificate, PolymerSystem};
use clap::ValueEnum;

use crate::output::{num, opt, Record, Report, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Graphs,
    Connected,
    TwoConnected,
    Trees,
}

pub fn enumerate(kind: GraphKind, n: usize) -> Result<Vec<LabeledGraph>> {
    Ok(match kind {
        GraphKind::Graphs => enumerate_graphs(n)?.collect(),
        GraphKind::Connected => connected_graphs(n)?.collect(),
        GraphKind::TwoConnected => two_connected_graphs(n)?.collect(),
        GraphKind::Trees => enumerate_trees(n)?.collect(),
    })
}

pub fn integrator_record(kind: &str, integrator: &Integrator) -> Record {
    Record::new(kind)
        .field("method", integrator.method)
        .field("samples", integrator.samples)
        .field("seed", integrator.seed)
        .field("sampling", format!("{:?}", integrator.sampling).to_lowercase())
}

pub fn result_record(kind: &str, r: &IntegralResult) -> Record {
    Record::new(kind)
        .value("value", r.value)
        .value("error", r.error)
        .field("method", r.method)
        .field("samples", r.samples)
        .field("seed", r.seed.map_or_else(|| "none".to_string(), |s| s.to_string()))
}

fn echo_config(report: &mut Report, config: &Config) {
    report.comment(format!("config\n{}", config.to_string().trim_end()));
}

pub fn series_table(series: &SeriesReport) -> Table {
    let mut t = Table::new(
        "order",
        &["n", "P", "B", "B_error", "F", "F_error", "tail_bound", "truncation_bound", "flag"],
    );
    for row in &series.rows {
        t.push(vec![
            row.n.to_string(),
            num(row.p_factor.value),
            num(row.b_factor.value),
            num(row.b_factor.error),
            num(row.f_value),
            num(row.f_error),
            opt(row.tail_bound),
            opt(row.truncation_bound),
            if row.p_factor.vanishes { "zero" } else { "-" }.to_string(),
        ]);
    }
    t
}

pub fn series_records(report: &mut Report, series: &SeriesReport) {
    report.record(
        Record::new("summary")
            .value("log_z", series.log_z)
            .value("ideal_term", series.ideal_term)
            .value("series_sum", series.series_sum)
            .value("integrator_error", series.integrator_error)
            .field("truncation_bound", opt(series.truncation_bound))
            .field("series_tail", opt(series.series_tail))
            .field("delta_prime", opt(series.delta_prime)),
    );
    if let Some(c) = &series.certificate {
        report.record(
            Record::new("certificate")
                .field("holds", c.holds)
                .value("a", c.a)
                .value("c", c.c)
                .value("delta", c.delta)
                .value("L", c.l_factor)
                .value("alpha", c.alpha())
                .value("worst_margin", c.worst_margin())
                .field("failed", c.failed_hypothesis().unwrap_or("none")),
        );
    }
    for w in &series.warnings {
        report.record(Record::new("warning").field("message", w));
    }
}

pub fn coeffs(config: &Config, run: &RunConfig) -> Result<Report> {
    let params = run.expansion_params()?;
    let series = log_z_canonical(&params, &run.system.potential, &run.integrator)?;
    let mut report = Report::default();
    echo_config(&mut report, config);
    report.record(integrator_record("integrator", &run.integrator));
    report.table(series_table(&series));
    series_records(&mut report, &series);
    Ok(report)
}

/// `β_1 … β_m` with their errors.
pub fn beta_coefficients(run: &RunConfig) -> Result<Vec<IntegralResult>> {
    let s = &run.system;
    (1..=run.virial.orders)
        .map(|m| {
            beta_n(m, &s.potential, s.beta, s.dim, &run.integrator, run.virial.domain_radius)
                .with_context(|| format!("beta_{m}"))
        })
        .collect()
}

pub fn coefficient_table(betas: &[IntegralResult]) -> Table {
    let mut t = Table::new("coefficient", &["m", "beta_m", "beta_m_error", "k", "B_k", "B_k_error"]);
    for (i, b) in betas.iter().enumerate() {
        let m = i + 1;
        let scale = m as f64 / (m + 1) as f64;
        t.push(vec![
            m.to_string(),
            num(b.value),
            num(b.error),
            (m + 1).to_string(),
            num(-scale * b.value),
            num(scale * b.error),
        ]);
    }
    t
}

pub fn virial(config: &Config, run: &RunConfig) -> Result<Report> {
    let betas = beta_coefficients(run)?;
    let values: Vec<f64> = betas.iter().map(|b| b.value).collect();
    let m = run.virial.orders;
    let mut report = Report::default();
    echo_config(&mut report, config);
    report.record(integrator_record("integrator", &run.integrator));
    report.table(coefficient_table(&betas));
    let mut t = Table::new("pressure", &["rho", "beta_p", "z"]);
    for &rho in &run.virial.rho {
        t.push(vec![
            num(rho),
            num(virial_pressure(rho, &values, m)?),
            num(activity_inversion(rho, &values, m + 1)?),
        ]);
    }
    report.table(t);
    Ok(report)
}

pub fn free_energy(config: &Config, run: &RunConfig) -> Result<Report> {
    let betas = beta_coefficients(run)?;
    let values: Vec<f64> = betas.iter().map(|b| b.value).collect();
    let m = run.virial.orders;
    let mut report = Report::default();
    echo_config(&mut report, config);
    report.record(integrator_record("integrator", &run.integrator));
    for b in &betas {
        report.record(result_record("beta", b));
    }
    let mut t = Table::new("free_energy", &["rho", "beta_f", "beta_p"]);
    for &rho in &run.virial.rho {
        t.push(vec![
            num(rho),
            num(free_energy_density(rho, &values, m)?),
            num(virial_pressure(rho, &values, m)?),
        ]);
    }
    report.table(t);
    Ok(report)
}

pub fn load_polymer_system(path: &Path) -> Result<PolymerSystem<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_polymer_system(&text).with_context(|| format!("in {}", path.display()))
}

const FALLBACK: (f64, f64) = (0.01, 0.0);

pub struct KpOutcome {
    pub certificate: Option<KpCertificate>,
    pub a: f64,
    pub c: f64,
    pub tail: Option<f64>,
    pub failure: Option<String>,
}

/// Checks the configured `(a, c, δ)`, or searches for uniform ones.
pub fn kp_evaluate(system: &PolymerSystem<f64>, kp: &KpConfig) -> Result<KpOutcome> {
    // without a certifying grid point, report the hypotheses at a small `a`
    let (a, c) = match kp.parameters {
        Some(p) => p,
        None => search_uniform_parameters_at(system, kp.truncation, kp.delta).map_or(FALLBACK, |p| (p.a, p.c)),
    };
    let n = system.len();
    let (av, cv) = (vec![a; n], vec![c; n]);
    let delta = match kp.delta {
        Some(d) => d,
        None => {
            let d = (0..n)
                .map(|i| system.weight(i).abs() * a.exp())
                .fold(0.0f64, f64::max);
            if d >= 1.0 {
                return Ok(KpOutcome {
                    certificate: None,
                    a,
                    c,
                    tail: None,
                    failure: Some(format!("smallness: max |w| e^a = {d} is not below 1")),
                });
            }
            d.max(f64::MIN_POSITIVE)
        }
    };
    let cert = kp_condition_check(system, &av, &cv, delta)?;
    let tail = if cert.holds {
        Some(truncation_tail_bound(system, &av, &cv, kp.truncation)?)
    } else {
        None
    };
    let failure = cert.failed_hypothesis().map(str::to_string);
    Ok(KpOutcome {
        certificate: Some(cert),
        a,
        c,
        tail,
        failure,
    })
}

pub fn kp_check(config: &Config, run: &RunConfig, base: Option<&Path>) -> Result<(Report, bool)> {
    let file = run.kp.system.as_deref().ok_or_else(|| anyhow!("kp.system: missing"))?;
    let path = match base {
        Some(dir) if Path::new(file).is_relative() => dir.join(file),
        _ => Path::new(file).to_path_buf(),
    };
    let system = load_polymer_system(&path)?;
    let outcome = kp_evaluate(&system, &run.kp)?;
    let mut report = Report::default();
    echo_config(&mut report, config);
    let pass = kp_report(&mut report, &system, &outcome);
    Ok((report, pass))
}

pub fn kp_report(report: &mut Report, system: &PolymerSystem<f64>, outcome: &KpOutcome) -> bool {
    if let Some(cert) = &outcome.certificate {
        let mut t = Table::new("polymer", &["name", "weight", "smallness_slack", "margin"]);
        for i in 0..system.len() {
            t.push(vec![
                system.polymer(i).name.clone(),
                num(*system.weight(i)),
                num(cert.smallness_slack[i]),
                num(cert.margins[i]),
            ]);
        }
        report.table(t);
    }
    let pass = outcome.failure.is_none();
    let mut r = Record::new("kp")
        .field("status", if pass { "PASS" } else { "FAIL" })
        .value("a", outcome.a)
        .value("c", outcome.c);
    if let Some(cert) = &outcome.certificate {
        r = r
            .value("delta", cert.delta)
            .value("L", cert.l_factor)
            .value("worst_margin", cert.worst_margin())
            .field(
                "worst_polymer",
                cert.worst_polymer.map_or("none".to_string(), |i| system.polymer(i).name.clone()),
            );
    }
    r = r.field("tail_bound", opt(outcome.tail));
    if let Some(f) = &outcome.failure {
        r = r.field("failed", f);
    }
    report.record(r);
    pass
}


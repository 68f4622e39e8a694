use std::path::Path;

use anyhow::Result;
use canonical_cluster::config::RunConfig;
use canonical_cluster::expansion::{cancellation_check, p_factor, thermo_limit_sweep, MAX_CANCELLATION_DEGREE};
use canonical_cluster::graph::connected_graphs;
use canonical_cluster::integrals::{beta_n, Integrator};
use canonical_cluster::oracle::{
    brute_force_z, compare_expansion_vs_oracle, tonks_exact_z, OracleIntegrator, Reference, MAX_QUADRATURE_PARTICLES,
};
use canonical_cluster::polymer::{
    cluster_log_sum, partition_function_direct, pinned_cluster_bound, pinned_cluster_sum, PolymerSystem,
};
use canonical_cluster::potential::PotentialKind;
use clap::ValueEnum;

use crate::commands::{integrator_record, kp_evaluate, kp_report, load_polymer_system, series_records, series_table};
use crate::output::{num, Record, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Cancellation,
    Oracle,
    Kp,
    Limits,
}

/// Used when `validate` runs without `--config`.
pub const DEFAULT_CONFIG: &str = "\
[system]
potential = kind=hard_rod sigma=0.1
side = 10
particles = 4

[expansion]
truncation = 8
";

/// Polymer system of the `kp` suite when none is configured.
pub const DEFAULT_KP_SYSTEM: &str = "\
polymer a 1/40 support 1 2
polymer b 1/50 support 2 3
polymer c -1/60 support 3 4
polymer d 1/80 support 4 1
polymer e 1/100 support 1 3
";

struct Checks<'r> {
    report: &'r mut Report,
    passed: usize,
    failed: usize,
}

impl Checks<'_> {
    fn check(&mut self, suite: &str, name: &str, pass: bool, detail: Record) {
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        let mut r = Record::new("check")
            .field("suite", suite)
            .field("name", name)
            .field("status", if pass { "PASS" } else { "FAIL" });
        r.fields.extend(detail.fields);
        self.report.record(r);
    }
}

pub fn validate(suite: Suite, run: &RunConfig, base: Option<&Path>) -> Result<(Report, bool)> {
    let mut report = Report::default();
    report.record(integrator_record("integrator", &run.integrator));
    let mut checks = Checks {
        report: &mut report,
        passed: 0,
        failed: 0,
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Cancellation {
        cancellation(&mut checks)?;
    }
    if all || suite == Suite::Oracle {
        oracle(&mut checks, run)?;
    }
    if all || suite == Suite::Kp {
        kp(&mut checks, run, base)?;
    }
    if all || suite == Suite::Limits {
        limits(&mut checks, run)?;
    }
    let (passed, failed) = (checks.passed, checks.failed);
    report.record(
        Record::new("verdict")
            .field("status", if failed == 0 { "PASS" } else { "FAIL" })
            .field("passed", passed)
            .field("failed", failed),
    );
    Ok((report, failed == 0))
}

fn cancellation(checks: &mut Checks) -> Result<()> {
    let degree = MAX_CANCELLATION_DEGREE.min(6);
    for n in [3, 4] {
        let (mut reducible, mut vanishing, mut irreducible, mut nonzero) = (0, 0, 0, 0);
        let mut residual_terms = 0;
        for g in connected_graphs(n)? {
            let r = cancellation_check(&g, degree, None)?;
            if g.is_two_connected()? {
                irreducible += 1;
                if r.nonzero_monomials() > 0 {
                    nonzero += 1;
                }
            } else {
                reducible += 1;
                residual_terms += r.nonzero_monomials();
                if r.vanishes() {
                    vanishing += 1;
                }
            }
        }
        checks.check(
            "cancellation",
            "reducible_vanish",
            vanishing == reducible,
            Record::default()
                .field("n", n)
                .field("graphs", reducible)
                .field("vanishing", vanishing)
                .field("residual_terms", residual_terms)
                .field("max_degree", degree),
        );
        checks.check(
            "cancellation",
            "irreducible_survive",
            nonzero == irreducible,
            Record::default()
                .field("n", n)
                .field("graphs", irreducible)
                .field("nonzero", nonzero),
        );
    }
    Ok(())
}

fn oracle(checks: &mut Checks, run: &RunConfig) -> Result<()> {
    let potential = run.system.potential;
    let hard_rod = match potential.kind() {
        PotentialKind::HardCore { sigma } if run.system.dim == 1 => Some(sigma),
        _ => None,
    };
    for &particles in &run.validate.particles {
        let mut cfg = run.clone();
        cfg.system.particles = particles;
        if cfg.expansion.n_max.is_none() {
            cfg.expansion.n_max = Some(particles.saturating_sub(1).clamp(1, 4));
        }
        let params = cfg.expansion_params()?;
        let reference = match hard_rod {
            Some(_) => Reference::Tonks,
            None if run.system.dim == 1 && particles <= MAX_QUADRATURE_PARTICLES => {
                Reference::Direct(OracleIntegrator::quadrature())
            }
            None => Reference::Direct(OracleIntegrator::MonteCarlo {
                samples: run.integrator.samples,
                seed: run.integrator.seed,
            }),
        };
        let audit = compare_expansion_vs_oracle(
            &params,
            &potential,
            &run.integrator,
            &reference,
            Some(run.validate.tolerance),
        )?;
        let mut detail = Record::default()
            .field("N", particles)
            .field("n_max", params.n_max)
            .field("M", params.max_norm)
            .value("log_z", audit.expansion.log_z)
            .value("oracle_log_z", audit.oracle_log_z)
            .field("oracle_method", audit.oracle.method)
            .value("discrepancy", audit.discrepancy)
            .value("budget", audit.budget);
        for (name, v) in &audit.budget_items {
            detail = detail.value(name, *v);
        }
        checks.check("oracle", "audit", audit.pass, detail.value("tolerance", run.validate.tolerance));

        let series = &audit.expansion;
        let (decay_ok, detail) = match series.certificate.as_ref().filter(|c| c.holds) {
            Some(cert) => {
                let live: Vec<_> = series.rows.iter().filter(|r| !r.p_factor.vanishes).collect();
                let bounded = live.iter().all(|r| r.f_value.abs() <= cert.decay_bound(r.n));
                let decreasing = live.windows(2).all(|w| w[1].f_value.abs() < w[0].f_value.abs());
                let worst = live
                    .iter()
                    .map(|r| r.f_value.abs() / cert.decay_bound(r.n))
                    .fold(0.0f64, f64::max);
                (
                    bounded && decreasing,
                    Record::default()
                        .field("N", particles)
                        .field("bounded", bounded)
                        .field("decreasing", decreasing)
                        .value("worst_ratio", worst)
                        .value("L", cert.l_factor)
                        .value("alpha", cert.alpha())
                        .value("c", cert.c),
                )
            }
            None => (false, Record::default().field("N", particles).field("certificate", "none")),
        };
        checks.check("oracle", "decay", decay_ok, detail);

        if let Some(sigma) = hard_rod {
            if particles <= 4 {
                let geometry = params.geometry;
                let exact = tonks_exact_z(particles, geometry.side(), sigma)?;
                let quad = brute_force_z(particles, &geometry, &potential, params.beta, &OracleIntegrator::quadrature())?;
                let rel = (quad.value - exact.value).abs() / exact.value;
                checks.check(
                    "oracle",
                    "tonks_vs_quadrature",
                    rel <= 1e-8,
                    Record::default()
                        .field("N", particles)
                        .value("exact", exact.value)
                        .value("quadrature", quad.value)
                        .value("relative", rel),
                );
            }
        }
        checks.report.table(series_table(series));
        series_records(checks.report, series);
    }
    Ok(())
}

fn kp(checks: &mut Checks, run: &RunConfig, base: Option<&Path>) -> Result<()> {
    let system: PolymerSystem<f64> = match run.kp.system.as_deref() {
        Some(file) => {
            let path = match base {
                Some(dir) if Path::new(file).is_relative() => dir.join(file),
                _ => Path::new(file).to_path_buf(),
            };
            load_polymer_system(&path)?
        }
        None => canonical_cluster::config::parse_polymer_system(DEFAULT_KP_SYSTEM)?,
    };
    let outcome = kp_evaluate(&system, &run.kp)?;
    let holds = kp_report(checks.report, &system, &outcome);
    let mut detail = Record::default().value("a", outcome.a).value("c", outcome.c);
    if let Some(f) = &outcome.failure {
        detail = detail.field("failed", f);
    }
    checks.check("kp", "certificate", holds, detail);
    if !holds {
        return Ok(());
    }
    let m = run.kp.truncation;
    let n = system.len();
    let (a, c) = (vec![outcome.a; n], vec![outcome.c; n]);
    let mut worst = 0.0f64;
    for g in 0..n {
        let lhs = pinned_cluster_sum(&system, g, &c, m)?;
        let rhs = pinned_cluster_bound(&system, g, &a, &c)?;
        worst = worst.max(lhs / rhs);
    }
    checks.check(
        "kp",
        "pinned_bound",
        worst <= 1.0,
        Record::default().field("M", m).value("worst_ratio", worst),
    );
    if let Ok(direct) = partition_function_direct(&system) {
        let sum = cluster_log_sum(&system, m)?;
        let gap = (sum.total.exp() - direct).abs();
        let tail = outcome.tail.unwrap_or(f64::INFINITY);
        checks.check(
            "kp",
            "exponentiation",
            gap <= 10.0 * tail,
            Record::default()
                .field("M", m)
                .value("log_sum", sum.total)
                .value("direct", direct)
                .value("gap", gap)
                .value("tail_bound", tail),
        );
    }
    Ok(())
}

fn ratio_ok(r: f64) -> bool {
    (1.5..=2.5).contains(&r)
}

fn limits(checks: &mut Checks, run: &RunConfig) -> Result<()> {
    let s = &run.system;
    let integrator: Integrator = run.integrator;
    let sweep = thermo_limit_sweep(1, &run.validate.sides, &s.potential, s.beta, s.dim, run.expansion.truncation, &integrator)?;
    for row in &sweep.rows {
        let ratio = row.ratio;
        checks.check(
            "limits",
            "b1_sweep",
            ratio.is_none_or(ratio_ok),
            Record::default()
                .value("side", row.side)
                .value("B", row.b_factor.value)
                .value("beta_1", sweep.reference.value)
                .value("error", row.error)
                .field("ratio", ratio.map_or("none".to_string(), num)),
        );
    }

    let side = s.side.unwrap_or(run.validate.sides[0]);
    let rho = s.particles as f64 / side.powi(s.dim as i32);
    let base = s.particles.max(4);
    for n in [1, 2] {
        let mut prev: Option<f64> = None;
        for k in 0..4 {
            let particles = base << k;
            let volume = particles as f64 / rho;
            let p = p_factor(particles, volume, n)?;
            let error = (p.value - rho.powi(n as i32)).abs();
            let ratio = prev.map(|e| e / error);
            checks.check(
                "limits",
                "p_factor",
                ratio.is_none_or(ratio_ok),
                Record::default()
                    .field("n", n)
                    .field("N", particles)
                    .value("rho", rho)
                    .value("P", p.value)
                    .value("error", error)
                    .field("ratio", ratio.map_or("none".to_string(), num)),
            );
            prev = Some(error);
        }
    }

    if let (PotentialKind::HardCore { sigma }, 1) = (s.potential.kind(), s.dim) {
        let b2 = beta_n(2, &s.potential, s.beta, 1, &integrator, None)?;
        let want = -1.5 * sigma * sigma;
        let rel = (b2.value - want).abs() / want.abs();
        checks.check(
            "limits",
            "beta_2",
            rel <= 0.01,
            Record::default().value("beta_2", b2.value).value("expected", want).value("relative", rel),
        );
        let b3 = -2.0 / 3.0 * b2.value;
        let rel3 = (b3 - sigma * sigma).abs() / (sigma * sigma);
        checks.check(
            "limits",
            "B_3",
            rel3 <= 0.01,
            Record::default().value("B_3", b3).value("expected", sigma * sigma).value("relative", rel3),
        );
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::{Command, Output};

use canonical_cluster::expansion::{log_z_canonical, ExpansionParams};
use canonical_cluster::integrals::Integrator;
use canonical_cluster::potential::{BoxGeometry, PairPotential};

const RODS: &str = "\
[system]
potential = kind=hard_rod sigma=0.1
side = 10
particles = 4

[expansion]
n_max = 3
truncation = 8
";

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn ccx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccx")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of the first CSV table.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .take_while(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn enumerate_counts() {
    for (kind, n, want) in [("trees", "4", 16), ("two-connected", "4", 10), ("connected", "3", 4)] {
        let out_path = scratch(&format!("{kind}-{n}.txt"));
        let out = ccx(&["enumerate", kind, n, "--out", out_path.to_str().unwrap()]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), format!("count={want}"));
        let text = std::fs::read_to_string(&out_path).unwrap();
        assert_eq!(text.lines().count(), want);
        for line in text.lines() {
            line.parse::<canonical_cluster::graph::LabeledGraph>().unwrap();
        }
    }
}

#[test]
fn coeffs_match_library_bit_for_bit() {
    let cfg = write("rods.cfg", RODS);
    let out = ccx(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("# potential = kind=hard_rod sigma=0.1"));
    let rows = csv_rows(&text);
    let params = ExpansionParams::new(4, BoxGeometry::new(1, 10.0).unwrap(), 1.0, 3, 8).unwrap();
    let series = log_z_canonical(&params, &PairPotential::hard_core(0.1).unwrap(), &Integrator::quadrature()).unwrap();
    assert_eq!(rows.len(), series.rows.len());
    for (row, lib) in rows.iter().zip(&series.rows) {
        assert_eq!(row[0].parse::<usize>().unwrap(), lib.n);
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), lib.p_factor.value.to_bits());
        assert_eq!(row[2].parse::<f64>().unwrap().to_bits(), lib.b_factor.value.to_bits());
        assert_eq!(row[4].parse::<f64>().unwrap().to_bits(), lib.f_value.to_bits());
    }
    let summary = text.lines().find(|l| l.starts_with("# summary")).unwrap();
    assert!(summary.contains(&format!("log_z={:e}", series.log_z)));
}

#[test]
fn ideal_gas_has_zero_coefficients() {
    let cfg = write("ideal.cfg", "[system]\nside = 5\nparticles = 6\n[expansion]\nn_max = 3\n");
    let out = ccx(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    for row in csv_rows(&stdout(&out)) {
        assert_eq!(row[4].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn orders_past_n_are_flagged() {
    let cfg = write("past.cfg", RODS);
    let out = ccx(&["coeffs", "--config", cfg.to_str().unwrap(), "--set", "system.particles=3"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][8], "zero");
    assert_eq!(rows[2][4].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][8], "-");
}

#[test]
fn virial_tables() {
    let cfg = write("virial.cfg", "[system]\npotential = kind=hard_rod sigma=0.1\n[virial]\norders = 2\nrho = 0.5\n");
    let text = stdout(&ccx(&["virial", "--config", cfg.to_str().unwrap()]));
    let rows = csv_rows(&text);
    assert!((rows[0][4].parse::<f64>().unwrap() - 0.1).abs() < 1e-12);
    assert!((rows[1][4].parse::<f64>().unwrap() - 0.01).abs() < 1e-12);

    let ideal = write("virial-ideal.cfg", "[virial]\nrho = 0.25 0.5\n");
    let text = stdout(&ccx(&["virial", "--config", ideal.to_str().unwrap(), "--format", "records"]));
    let pressure: Vec<&str> = text.lines().filter(|l| l.starts_with("pressure")).collect();
    assert_eq!(pressure, ["pressure rho=2.5e-1 beta_p=2.5e-1 z=2.5e-1", "pressure rho=5e-1 beta_p=5e-1 z=5e-1"]);
}

#[test]
fn free_energy_table() {
    let cfg = write("fe.cfg", "[system]\npotential = kind=hard_rod sigma=0.1\n[virial]\norders = 1\nrho = 0.5\n");
    let out = ccx(&["free-energy", "--config", cfg.to_str().unwrap(), "--format", "records"]);
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("free_energy")).unwrap();
    // βf = ρ(ln ρ - 1) + σρ²
    let want = 0.5 * (0.5f64.ln() - 1.0) + 0.1 * 0.25;
    let got: f64 = line.split(' ').find_map(|t| t.strip_prefix("beta_f=")).unwrap().parse().unwrap();
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn validate_suites() {
    let out = ccx(&["validate", "cancellation"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict status=PASS"));
    assert!(!text.contains("status=FAIL"));

    write("heavy.txt", "polymer a 0.5\npolymer b 0.7\nincompatible a b\n");
    let cfg = write("heavy.cfg", "[kp]\nsystem = heavy.txt\n");
    let out = ccx(&["validate", "kp", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("failed=incompatible_sum"));
    let out = ccx(&["kp-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn kp_check_passes_on_small_weights() {
    write("light.txt", "polymer a 1/100 support 1 2\npolymer b 1/100 support 2 3\n");
    let cfg = write("light.cfg", "[kp]\nsystem = light.txt\n");
    let out = ccx(&["kp-check", "--config", cfg.to_str().unwrap(), "--format", "records"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("kp status=PASS"));
}

#[test]
fn usage_errors_name_the_field() {
    let cfg = write("bad.cfg", "[system]\nside = -1\n");
    let out = ccx(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("system.side"));

    let cfg = write("mc.cfg", "[system]\nside = 5\n[integrals]\nmethod = monte-carlo\n");
    let out = ccx(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integrals.seed"));
    let out = ccx(&["coeffs", "--config", cfg.to_str().unwrap(), "--set", "system.dim=7"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("system.dim"));
}

#[test]
fn out_file_matches_stdout() {
    let cfg = write("rods-out.cfg", RODS);
    let path = scratch("rods-out.csv");
    let direct = ccx(&["coeffs", "--config", cfg.to_str().unwrap()]);
    let filed = ccx(&["coeffs", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert!(filed.status.success());
    assert!(filed.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

use canonical_cluster::config::{Config, RunConfig};
use canonical_cluster::estimate::IntegralResult;
use canonical_cluster::expansion::*;
use canonical_cluster::integrals::{BoxModel, Integrator};
use canonical_cluster::oracle::*;
use canonical_cluster::potential::{BoxGeometry, PairPotential};
use proptest::prelude::*;

fn rods() -> PairPotential {
    PairPotential::hard_core(0.1).unwrap()
}

fn geometry(side: f64) -> BoxGeometry {
    BoxGeometry::new(1, side).unwrap()
}

#[test]
fn zero_potential_gives_the_ideal_term() {
    for (n, side) in [(3, 10.0), (5, 4.0), (8, 20.0)] {
        let params = ExpansionParams::new(n, geometry(side), 1.0, 3, 8).unwrap();
        let r = log_z_canonical(&params, &PairPotential::zero(), &Integrator::quadrature()).unwrap();
        assert_eq!(r.log_z, ideal_term(n, side));
        assert!(r.rows.iter().all(|row| row.f_value == 0.0));
    }
}

#[test]
fn tail_bounds_decrease_in_n_and_m() {
    let params = ExpansionParams::new(8, geometry(10.0), 1.0, 4, 8).unwrap();
    let r = log_z_canonical(&params, &rods(), &Integrator::quadrature()).unwrap();
    let tails: Vec<f64> = r.rows.iter().map(|row| row.tail_bound.unwrap()).collect();
    assert!(tails.windows(2).all(|w| w[1] < w[0]), "{tails:?}");
    let cert = r.certificate.unwrap();
    for n in 1..=4 {
        let by_m: Vec<f64> = (n + 1..=8).map(|m| cert.truncation_bound(n, m)).collect();
        assert!(by_m.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn audit_stays_within_a_shrinking_budget() {
    let q = Integrator::quadrature();
    let audit = |n_max, m| {
        let params = ExpansionParams::new(5, geometry(10.0), 1.0, n_max, m).unwrap();
        compare_expansion_vs_oracle(&params, &rods(), &q, &Reference::Tonks, None).unwrap()
    };
    // the partial sums in M oscillate, so only the budget is monotone
    let by_order: Vec<f64> = (1..=3).map(|n| audit(n, 8).discrepancy).collect();
    assert!(by_order.windows(2).all(|w| w[1] < w[0]), "{by_order:?}");
    let mut last = f64::INFINITY;
    for m in 5..=8 {
        let r = audit(4, m);
        assert!(r.pass && r.discrepancy <= r.budget);
        assert!(r.budget < last);
        last = r.budget;
    }
    assert!(audit(4, 8).discrepancy < 1e-2 * audit(1, 8).discrepancy);
}

#[test]
fn grand_canonical_ideal_gas() {
    let g = geometry(10.0);
    let xi = brute_force_xi(0.1, 5, &g, &PairPotential::zero(), 1.0, &OracleIntegrator::quadrature(), 1e-2).unwrap();
    let want = 1.0f64.exp();
    assert!((want - xi.value) / want < 1e-3);
}

#[test]
fn log_xi_matches_the_activity_series() {
    let g = geometry(10.0);
    let p = rods();
    let model = BoxModel::new(&p, &g, 1.0, 2).unwrap();
    let q = Integrator::quadrature();
    for z in [0.005, 0.01] {
        let xi = brute_force_xi(z, 5, &g, &p, 1.0, &OracleIntegrator::quadrature(), 1e-6).unwrap();
        let series = pressure_activity_series(z, 5, &model, &q).unwrap();
        let lhs = xi.log_per_volume(g.volume());
        let slack = (xi.remainder_bound + xi.error_estimate) / (xi.value * g.volume()) + series.error + 1e-12;
        assert!((lhs - series.value).abs() <= slack, "z={z}: {lhs} vs {}", series.value);
    }
}

#[test]
fn tonks_matches_direct_quadrature() {
    for (n, side, sigma) in [(2, 3.0, 0.5), (3, 5.0, 0.7), (4, 10.0, 0.1), (4, 2.0, 0.3)] {
        let exact = tonks_exact_z(n, side, sigma).unwrap();
        let p = PairPotential::hard_core(sigma).unwrap();
        let direct = brute_force_z(n, &geometry(side), &p, 1.0, &OracleIntegrator::quadrature()).unwrap();
        assert!((direct.value - exact.value).abs() <= 1e-8 * exact.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tonks_oracle_on_random_boxes(n in 2usize..=4, side in 1.0f64..20.0, frac in 0.01f64..0.9) {
        let sigma = frac * side / n as f64;
        let exact = tonks_exact_z(n, side, sigma).unwrap();
        let p = PairPotential::hard_core(sigma).unwrap();
        let direct = brute_force_z(n, &geometry(side), &p, 1.0, &OracleIntegrator::quadrature()).unwrap();
        prop_assert!((direct.value - exact.value).abs() <= 1e-8 * exact.value);
    }

    #[test]
    fn p_factor_is_a_falling_product(n in 1usize..50, k in 1usize..6, volume in 0.5f64..100.0) {
        let p = p_factor(n, volume, k).unwrap();
        prop_assert_eq!(p.vanishes, k >= n);
        if !p.vanishes {
            let want: f64 = (1..=k).map(|i| (n - i) as f64 / volume).product();
            prop_assert!((p.value - want).abs() <= 1e-14 * want);
        }
    }

    #[test]
    fn integral_records_round_trip(value in -1e6f64..1e6, error in 0.0f64..1.0, samples in 1u64..1 << 40, seed in any::<u64>()) {
        let r = IntegralResult::monte_carlo(value, error, samples, seed);
        let back: IntegralResult = r.to_string().parse().unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn config_text_round_trips(side in 0.5f64..50.0, particles in 1usize..20, n_max in 1usize..=4) {
        let text = format!("[system]\nside = {side}\nparticles = {particles}\n[expansion]\nn_max = {n_max}\n");
        let c = Config::parse(&text).unwrap();
        let again = Config::parse(&c.to_string()).unwrap();
        prop_assert_eq!(RunConfig::from_config(&c).unwrap(), RunConfig::from_config(&again).unwrap());
    }

    #[test]
    fn config_parser_never_panics(s in "(\\[|\\]|=|#|[a-z_.]+|[0-9.e-]+| |\n){0,40}") {
        if let Ok(c) = Config::parse(&s) {
            let _ = RunConfig::from_config(&c);
        }
    }
}

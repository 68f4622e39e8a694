//! Gauss-Legendre rules and breakpoint-aware composite integration in one
//! variable.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const MAX_ORDER: usize = 64;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// The `n`-point Gauss-Legendre rule, `1 <= n <= 64`, computed once.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    static RULES: [OnceLock<Rule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    assert!((1..=MAX_ORDER).contains(&n), "rule order {n} unsupported");
    RULES[n].get_or_init(|| build(n))
}

fn build(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and its derivative by recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Sorted, deduplicated cut points inside `(a, b)` plus the endpoints.
pub fn panel_edges(a: f64, b: f64, breaks: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let width = b - a;
    let mut edges = vec![a, b];
    edges.extend(breaks.into_iter().filter(|&x| x > a && x < b));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * width.abs().max(1.0));
    edges
}

/// Composite Gauss-Legendre on `[a, b]`: one panel per interval between
/// breakpoints, each split into `splits` equal parts with an `order`-point
/// rule. Returns the value and `|Q_order - Q_{order-2}|` as error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: impl IntoIterator<Item = f64>,
    order: usize,
    splits: usize,
) -> (f64, f64) {
    if b <= a {
        return (0.0, 0.0);
    }
    let hi = gauss_legendre(order);
    let lo = gauss_legendre(order.saturating_sub(2).max(1));
    let edges = panel_edges(a, b, breaks);
    let (mut total, mut coarse) = (0.0, 0.0);
    for w in edges.windows(2) {
        let step = (w[1] - w[0]) / splits as f64;
        for s in 0..splits {
            let left = w[0] + s as f64 * step;
            let (mid, half) = (left + step / 2.0, step / 2.0);
            for (x, wt) in hi.nodes.iter().zip(&hi.weights) {
                total += half * wt * f(mid + half * x);
            }
            for (x, wt) in lo.nodes.iter().zip(&lo.weights) {
                coarse += half * wt * f(mid + half * x);
            }
        }
    }
    (total, (total - coarse).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in [1, 2, 3, 5, 8, 16, 32, 64] {
            let rule = gauss_legendre(n);
            assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            let deg = 2 * n - 1;
            let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let want = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-12, "n = {n}: {got} vs {want}");
        }
    }

    #[test]
    fn breakpoints_make_steps_exact() {
        let step = |x: f64| if x.abs() < 0.1 { -1.0 } else { 0.0 };
        let (v, e) = integrate(step, -5.0, 5.0, [-0.1, 0.1], 4, 1);
        assert!((v + 0.2).abs() < 1e-15);
        assert!(e < 1e-15);
    }

    #[test]
    fn smooth_integrand() {
        let (v, e) = integrate(|x: f64| (-x * x).exp(), -8.0, 8.0, [], 20, 8);
        assert!((v - PI.sqrt()).abs() < 1e-13);
        assert!(e < 1e-10);
    }
}

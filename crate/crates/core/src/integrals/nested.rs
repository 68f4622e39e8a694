//! Iterated one-dimensional quadrature over the positions of `n` points on a
//! line or circle, the first pinned at the origin.
//!
//! Panels at each level are cut where an already placed point plus a sum of
//! breakpoints of `f` lands. For a piecewise-constant `f` the inner integrals
//! are then piecewise polynomials of known degree on each panel and the rule
//! is exact.

use crate::quadrature::gauss_legendre;

/// Offsets kept per depth before giving up on exactness.
const MAX_OFFSETS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Domain {
    /// The circle `(-L/2, L/2]`.
    Periodic { side: f64 },
    /// The interval `[-R, R]`.
    Free { radius: f64 },
}

impl Domain {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Periodic { side } => (-side / 2.0, side / 2.0),
            Domain::Free { radius } => (-radius, radius),
        }
    }

    fn wrap(&self, x: f64) -> f64 {
        match *self {
            Domain::Periodic { side } => {
                let y = x - side * (x / side).round();
                if y <= -side / 2.0 {
                    y + side
                } else {
                    y
                }
            }
            Domain::Free { .. } => x,
        }
    }
}

/// What is integrated over the placed points.
pub(crate) enum Integrand<'a> {
    /// `Π_{(i,j) ∈ E} f(q_i - q_j)`; `earlier[m]` lists the neighbours of `m`
    /// below `m`.
    Graph { earlier: &'a [Vec<usize>] },
    /// `Σ_{g connected on all points} Π_{e ∈ g} f_e`.
    Connected,
}

pub(crate) struct Nested<'a> {
    pub n: usize,
    pub domain: Domain,
    /// Breakpoints of `f` as a function of the signed displacement.
    pub base: Vec<f64>,
    /// Whether `f` is constant between breakpoints.
    pub exact: bool,
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
}

pub(crate) struct Outcome {
    pub value: f64,
    pub error: f64,
    pub nodes: u64,
}

struct Plan {
    offsets: Vec<Vec<f64>>,
    orders: Vec<usize>,
    splits: usize,
}

impl Nested<'_> {
    fn plan(&self, smooth_order: usize) -> Plan {
        let depth = if self.exact { self.n } else { 1 };
        let mut offsets = vec![vec![0.0]];
        let mut exact = self.exact;
        for _ in 0..depth {
            let prev = offsets.last().unwrap();
            let mut next: Vec<f64> = prev
                .iter()
                .flat_map(|&s| std::iter::once(s).chain(self.base.iter().map(move |&b| s + b)))
                .map(|x| self.domain.wrap(x))
                .collect();
            next.sort_by(f64::total_cmp);
            next.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
            if next.len() > MAX_OFFSETS {
                exact = false;
                next = offsets[1.min(offsets.len() - 1)].clone();
            }
            offsets.push(next);
        }
        let orders = (0..self.n)
            .map(|m| {
                let remaining = self.n - m;
                if exact {
                    // inner integral has degree remaining - 1
                    (remaining.saturating_sub(1)) / 2 + 1
                } else {
                    smooth_order
                }
            })
            .collect();
        Plan {
            offsets,
            orders,
            splits: if exact { 1 } else { 4 },
        }
    }

    pub fn run(&self, integrand: &Integrand<'_>) -> Outcome {
        let hi = self.plan(10);
        let mut nodes = 0u64;
        let mut q = [0.0; 8];
        let value = self.level(&hi, integrand, 1, &mut q, 1.0, &mut nodes);
        if hi.splits == 1 {
            return Outcome { value, error: 0.0, nodes };
        }
        let lo = self.plan(8);
        let mut ignored = 0;
        let coarse = self.level(&lo, integrand, 1, &mut q, 1.0, &mut ignored);
        Outcome {
            value,
            error: (value - coarse).abs(),
            nodes,
        }
    }

    fn level(
        &self,
        plan: &Plan,
        integrand: &Integrand<'_>,
        m: usize,
        q: &mut [f64; 8],
        partial: f64,
        nodes: &mut u64,
    ) -> f64 {
        if m == self.n {
            *nodes += 1;
            return match integrand {
                Integrand::Graph { .. } => partial,
                Integrand::Connected => connected_sum(&q[..self.n], self.f),
            };
        }
        let (lo, hi) = self.domain.bounds();
        let remaining = self.n - m;
        let offsets = &plan.offsets[remaining.min(plan.offsets.len() - 1)];
        let mut edges = Vec::with_capacity(2 + m * offsets.len());
        edges.push(lo);
        edges.push(hi);
        for &qj in &q[..m] {
            for &s in offsets {
                let x = self.domain.wrap(qj + s);
                if x > lo && x < hi {
                    edges.push(x);
                }
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let rule = gauss_legendre(plan.orders[m]);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let step = (w[1] - w[0]) / plan.splits as f64;
            for s in 0..plan.splits {
                let mid = w[0] + (s as f64 + 0.5) * step;
                let half = step / 2.0;
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let qm = mid + half * x;
                    let factor = match integrand {
                        Integrand::Graph { earlier } => {
                            let mut p = partial;
                            for &j in &earlier[m] {
                                p *= (self.f)(qm - q[j]);
                                if p == 0.0 {
                                    break;
                                }
                            }
                            p
                        }
                        Integrand::Connected => 1.0,
                    };
                    if factor == 0.0 {
                        continue;
                    }
                    q[m] = qm;
                    total += half * wt * self.level(plan, integrand, m + 1, q, factor, nodes);
                }
            }
        }
        total
    }
}

/// `Σ_{g connected on all points} Π_{e ∈ g} f_e` from the products
/// `W(S) = Π_{i<j ∈ S} (1 + f_ij)` by peeling off the component of the
/// lowest point.
pub(crate) fn connected_sum(q: &[f64], f: &dyn Fn(f64) -> f64) -> f64 {
    let n = q.len();
    let mut fm = [[0.0; 8]; 8];
    for i in 0..n {
        for j in i + 1..n {
            let v = f(q[j] - q[i]);
            fm[i][j] = v;
            fm[j][i] = v;
        }
    }
    connected_from_matrix(n, &fm)
}

pub(crate) fn connected_from_matrix(n: usize, fm: &[[f64; 8]; 8]) -> f64 {
    let full = (1usize << n) - 1;
    let mut w = vec![1.0; full + 1];
    for s in 1..=full {
        let top = usize::BITS - 1 - s.leading_zeros();
        let rest = s & !(1 << top);
        let mut p = w[rest];
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            p *= 1.0 + fm[top as usize][j];
        }
        w[s] = p;
    }
    let mut c = vec![0.0; full + 1];
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let others = s & !low;
        let mut value = w[s];
        // proper subsets T of s containing the lowest point
        let mut sub = others;
        while sub != 0 {
            sub = (sub - 1) & others;
            let t = low | sub;
            value -= c[t] * w[s & !t];
        }
        c[s] = value;
    }
    c[full]
}

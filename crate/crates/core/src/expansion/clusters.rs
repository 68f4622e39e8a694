//! Clusters of labeled connected graphs whose vertex sets together cover
//! `{1, …, n+1}`, grouped by the isomorphism classes of their members.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{check_range, Error, Result};
use crate::estimate::{IntegralResult, Method};
use crate::graph::{CanonicalForm, LabeledGraph};
use crate::integrals::{graph_classes, GraphClass};
use crate::polymer::{for_each_cluster, ClusterSearch};
use crate::polymer::{Polymer, PolymerSystem, Weight};

/// Largest `n` for which the covering clusters are enumerated.
pub const MAX_B_FACTOR_ORDER: usize = 4;
/// Largest truncation `M` on `Σ Ĩ(g)|g|`.
pub const MAX_TRUNCATION: usize = 8;
/// Largest particle number for the vertex-subset cross-check.
pub const MAX_VERTEX_ROUTE_PARTICLES: usize = 6;

/// `8!`: every `Π Ĩ(g)!` with `Σ Ĩ(g) <= 8` divides it.
const DENOMINATOR: i64 = 40_320;

/// One monomial `Π_k ζ̃(class_k)^{e_k}` of the covering cluster sum, with
/// the summed Ursell coefficients of all clusters that produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterMonomial {
    /// `(class index, exponent)`, ascending by class.
    pub factors: Vec<(usize, u32)>,
    pub numerator: i64,
    pub denominator: i64,
    /// Power of `|Λ|` the term carries in `B`: `n - Σ e_k (|g_k| - 1)`.
    pub volume_power: i32,
    pub clusters: u64,
}

impl ClusterMonomial {
    pub fn coefficient(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator), BigInt::from(self.denominator))
    }
}

/// The covering clusters for one `(n, M)`.
#[derive(Clone, Debug)]
pub struct GraphClusters {
    pub n: usize,
    pub max_norm: usize,
    /// Class representatives on `1..=k`, for `k = 2..=n+1`, in canonical
    /// order within each size.
    pub classes: Vec<LabeledGraph>,
    /// Number of labeled graphs on `k` fixed vertices in each class.
    pub class_counts: Vec<u64>,
    pub polymers: usize,
    pub monomials: Vec<ClusterMonomial>,
    pub cluster_count: u64,
    /// Clusters outside the tree-like family whose volume power is not
    /// negative. Always zero.
    pub volume_violations: u64,
}

fn subset_graphs(mask: u64, classes: &[GraphClass], offset: usize) -> Vec<(LabeledGraph, usize)> {
    let labels: Vec<u32> = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
    let k = labels.len();
    let index: BTreeMap<CanonicalForm, usize> = classes.iter().enumerate().map(|(i, c)| (c.form, i)).collect();
    crate::graph::connected_graphs(k)
        .expect("order checked by caller")
        .map(|g| {
            let class = offset + index[&g.canonical_form()];
            let edges = g
                .edges()
                .iter()
                .map(|&(i, j)| (labels[i as usize - 1], labels[j as usize - 1]));
            (LabeledGraph::new(labels.iter().copied(), edges).expect("relabeling is valid"), class)
        })
        .collect()
}

impl GraphClusters {
    /// Enumerates (or fetches from the process-wide cache) the clusters for
    /// `n` and `M`.
    pub fn get(n: usize, max_norm: usize) -> Result<Arc<GraphClusters>> {
        check_range("order n", n, 1, MAX_B_FACTOR_ORDER)?;
        check_range("truncation M", max_norm, 2, MAX_TRUNCATION)?;
        static CACHE: OnceLock<Mutex<BTreeMap<(usize, usize), Arc<GraphClusters>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(&(n, max_norm)) {
            return Ok(hit.clone());
        }
        let built = Arc::new(Self::enumerate(n, max_norm)?);
        cache.lock().unwrap().insert((n, max_norm), built.clone());
        Ok(built)
    }

    fn enumerate(n: usize, max_norm: usize) -> Result<GraphClusters> {
        let k_max = n + 1;
        let mut classes = Vec::new();
        let mut class_counts = Vec::new();
        let mut class_order = Vec::new();
        let mut offsets = vec![0; k_max + 1];
        let mut lists = vec![Vec::new(); k_max + 1];
        for k in 2..=k_max {
            offsets[k] = classes.len();
            let list = graph_classes(k, false)?;
            for c in list.iter() {
                classes.push(c.representative.clone());
                class_counts.push(c.count);
                class_order.push(k);
            }
            lists[k] = list.to_vec();
        }
        let full: u64 = (1 << k_max) - 1;
        let mut polymers = Vec::new();
        let mut polymer_class = Vec::new();
        let mut masks = Vec::new();
        for mask in 1..=full {
            let k = mask.count_ones() as usize;
            if k < 2 {
                continue;
            }
            for (g, class) in subset_graphs(mask, &lists[k], offsets[k]) {
                polymers.push(Polymer::with_support(g.to_string(), 0.0f64, g.vertices().to_vec()));
                polymer_class.push(class);
                masks.push(mask);
            }
        }
        let system = PolymerSystem::from_supports(polymers)?;
        let sizes: Vec<u32> = masks.iter().map(|m| m.count_ones()).collect();
        let covers = |support: &[usize]| support.iter().fold(0u64, |acc, &p| acc | masks[p]) == full;
        let search = ClusterSearch {
            sizes: sizes.clone(),
            budget: max_norm as u32,
            max_total: (max_norm / 2) as u32,
            accept: Some(&covers),
        };
        type State = (BTreeMap<Vec<(usize, u32)>, (i64, u64)>, u64, u64);
        let parts: Vec<State> = for_each_cluster(
            &system,
            &search,
            || (BTreeMap::new(), 0, 0),
            |(acc, count, violations): &mut State, term| {
                let mut factors: Vec<(usize, u32)> = Vec::with_capacity(term.support.len());
                let mut shrink = 0i64;
                let mut singly = true;
                for (&p, &m) in term.support.iter().zip(term.mults) {
                    factors.push((polymer_class[p], m));
                    shrink += m as i64 * (sizes[p] as i64 - 1);
                    singly &= m == 1;
                }
                factors.sort_unstable();
                factors.dedup_by(|b, a| {
                    if a.0 == b.0 {
                        a.1 += b.1;
                        true
                    } else {
                        false
                    }
                });
                let power = n as i64 - shrink;
                let tree_like = singly && power == 0;
                if !tree_like && power >= 0 {
                    *violations += 1;
                }
                let entry = acc.entry(factors).or_insert((0, 0));
                entry.0 += term.signed_sum * (DENOMINATOR / term.factorial);
                entry.1 += 1;
                *count += 1;
            },
        );
        let mut merged: BTreeMap<Vec<(usize, u32)>, (i64, u64)> = BTreeMap::new();
        let (mut cluster_count, mut volume_violations) = (0, 0);
        for (part, count, violations) in parts {
            cluster_count += count;
            volume_violations += violations;
            for (key, (num, c)) in part {
                let e = merged.entry(key).or_insert((0, 0));
                e.0 += num;
                e.1 += c;
            }
        }
        let monomials = merged
            .into_iter()
            .filter(|(_, (num, _))| *num != 0)
            .map(|(factors, (num, clusters))| {
                let g = num.gcd(&DENOMINATOR);
                let shrink: i64 = factors
                    .iter()
                    .map(|&(c, e)| e as i64 * (class_order[c] as i64 - 1))
                    .sum();
                ClusterMonomial {
                    factors,
                    numerator: num / g,
                    denominator: DENOMINATOR / g,
                    volume_power: (n as i64 - shrink) as i32,
                    clusters,
                }
            })
            .collect();
        Ok(GraphClusters {
            n,
            max_norm,
            classes,
            class_counts,
            polymers: system.len(),
            monomials,
            cluster_count,
            volume_violations,
        })
    }

    /// Number of vertices of class `k`.
    pub fn class_order(&self, class: usize) -> usize {
        self.classes[class].order()
    }

    /// `Σ_Ĩ c_Ĩ ζ̃^Ĩ` for the given class weights.
    pub fn evaluate<W: Weight>(&self, weights: &[W]) -> Result<W> {
        self.check_weights(weights.len())?;
        Ok(self.monomials.iter().fold(W::zero(), |acc, m| {
            let product = m
                .factors
                .iter()
                .fold(W::from_ratio(m.numerator, m.denominator), |p, &(c, e)| p * weights[c].pow(e));
            acc + product
        }))
    }

    fn check_weights(&self, len: usize) -> Result<()> {
        if len != self.classes.len() {
            return Err(Error::invalid(
                "class weights",
                format!("expected {} values, got {len}", self.classes.len()),
            ));
        }
        Ok(())
    }

    /// `B = |Λ|^n/n! Σ_Ĩ c_Ĩ ζ̃^Ĩ`. Each term is formed as
    /// `|Λ|^{p} Π (|Λ|^{|g|-1} ζ̃(g))^{e}` so that no power of the volume
    /// is ever formed on its own. Errors of the inputs propagate linearly.
    pub fn b_value(&self, zeta: &[IntegralResult], volume: f64) -> Result<(IntegralResult, Vec<(i32, f64)>)> {
        self.check_weights(zeta.len())?;
        let scaled: Vec<(f64, f64)> = zeta
            .iter()
            .enumerate()
            .map(|(c, r)| {
                let s = volume.powi(self.class_order(c) as i32 - 1);
                (r.value * s, r.error * s)
            })
            .collect();
        let fact: f64 = (1..=self.n).map(|k| k as f64).product();
        let mut by_power: BTreeMap<i32, f64> = BTreeMap::new();
        let (mut value, mut error) = (0.0, 0.0);
        for m in &self.monomials {
            let coefficient = m.numerator as f64 / m.denominator as f64 / fact * volume.powi(m.volume_power);
            let mut product = coefficient;
            for &(c, e) in &m.factors {
                product *= scaled[c].0.powi(e as i32);
            }
            // d/dx_c of the product, times the error of x_c
            let mut spread = 0.0;
            for (i, &(c, e)) in m.factors.iter().enumerate() {
                let mut d = coefficient.abs() * e as f64 * scaled[c].0.abs().powi(e as i32 - 1) * scaled[c].1;
                for (j, &(c2, e2)) in m.factors.iter().enumerate() {
                    if i != j {
                        d *= scaled[c2].0.abs().powi(e2 as i32);
                    }
                }
                spread += d;
            }
            value += product;
            error += spread;
            *by_power.entry(m.volume_power).or_insert(0.0) += product;
        }
        let mut method = Method::Exact;
        let (mut samples, mut seed) = (0, None);
        for r in zeta {
            samples += r.samples;
            seed = seed.or(r.seed);
            method = match (method, r.method) {
                (_, Method::MonteCarlo) | (Method::MonteCarlo, _) => Method::MonteCarlo,
                (_, Method::Quadrature) | (Method::Quadrature, _) => Method::Quadrature,
                _ => Method::Exact,
            };
        }
        let result = IntegralResult {
            value,
            error,
            method,
            samples,
            seed,
        };
        Ok((result, by_power.into_iter().rev().collect()))
    }

    /// `ζ_k = Σ_{g ∈ C_k} ζ̃(g)` for `k = 0..=n+1` from class weights.
    pub fn vertex_weights<W: Weight>(&self, weights: &[W]) -> Result<Vec<W>> {
        self.check_weights(weights.len())?;
        let mut out = vec![W::zero(); self.n + 2];
        out[1] = W::one();
        for (c, w) in weights.iter().enumerate() {
            let k = self.class_order(c);
            out[k] = out[k].clone() + W::from_ratio(self.class_counts[c] as i64, 1) * w.clone();
        }
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// `F^M(n)` through the graph clusters: `(1/(n+1)) C(N-1, n) Σ c_Ĩ ζ̃^Ĩ`.
pub fn f_graph_route<W: Weight>(particles: usize, n: usize, max_norm: usize, class_weights: &[W]) -> Result<W> {
    let clusters = GraphClusters::get(n, max_norm)?;
    let sum = clusters.evaluate(class_weights)?;
    Ok(W::from_ratio(binomial(particles - 1, n), n as i64 + 1) * sum)
}

/// `F^M(n)` straight from its definition on the vertex-subset polymers of
/// `{1, …, N}`: clusters whose union has `n+1` elements including `1`,
/// with `Σ I(V)|V| <= M`. `zeta_by_size[k]` is `ζ(V)` for `|V| = k`.
pub fn f_vertex_route<W: Weight>(particles: usize, n: usize, max_norm: usize, zeta_by_size: &[W]) -> Result<W> {
    check_range("particle number", particles, 2, MAX_VERTEX_ROUTE_PARTICLES)?;
    check_range("order n", n, 1, particles - 1)?;
    check_range("truncation M", max_norm, 2, MAX_TRUNCATION)?;
    if zeta_by_size.len() <= particles {
        return Err(Error::invalid("zeta", format!("need weights for sizes up to {particles}")));
    }
    let mut polymers = Vec::new();
    let mut masks = Vec::new();
    for mask in 1u64..(1 << particles) {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let labels: Vec<u32> = (0..particles as u32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        polymers.push(Polymer::with_support(format!("{mask}"), zeta_by_size[k].clone(), labels));
        masks.push(mask);
    }
    let system = PolymerSystem::from_supports(polymers)?;
    let accept = |support: &[usize]| {
        let union = support.iter().fold(0u64, |acc, &p| acc | masks[p]);
        union & 1 == 1 && union.count_ones() as usize == n + 1
    };
    let search = ClusterSearch {
        sizes: masks.iter().map(|m| m.count_ones()).collect(),
        budget: max_norm as u32,
        max_total: (max_norm / 2) as u32,
        accept: Some(&accept),
    };
    let parts = for_each_cluster(&system, &search, W::zero, |acc, term| {
        *acc = acc.clone() + term.coefficient::<W>() * term.monomial(&system);
    });
    let sum = parts.into_iter().fold(W::zero(), |a, b| a + b);
    Ok(W::from_ratio(1, n as i64 + 1) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn single_order_is_a_logarithm() {
        // n = 1: only K2, clusters m K2 with c = (-1)^{m-1}/m
        let c = GraphClusters::get(1, 8).unwrap();
        assert_eq!(c.classes.len(), 1);
        assert_eq!(c.monomials.len(), 4);
        for (m, mono) in c.monomials.iter().enumerate() {
            let m = m as i64 + 1;
            let sign = if m % 2 == 1 { 1 } else { -1 };
            assert_eq!(mono.coefficient(), q(sign, m));
            assert_eq!(mono.volume_power, 1 - m as i32);
        }
    }

    #[test]
    fn volume_powers_negative_off_trees() {
        for n in 1..=3 {
            for m in n + 1..=6 {
                let c = GraphClusters::get(n, m).unwrap();
                assert_eq!(c.volume_violations, 0, "n = {n}, M = {m}");
                assert!(c.monomials.iter().all(|t| t.volume_power <= 0));
            }
        }
    }

    #[test]
    fn graph_and_vertex_routes_agree() {
        for particles in 2..=5 {
            for n in 1..particles.min(3) {
                let c = GraphClusters::get(n, 6).unwrap();
                let weights: Vec<BigRational> = (0..c.classes.len())
                    .map(|k| q(-(k as i64 % 3) - 1, 7 * (k as i64 + 2)))
                    .collect();
                let graph = f_graph_route(particles, n, 6, &weights).unwrap();
                let mut by_size = c.vertex_weights(&weights).unwrap();
                by_size.resize(particles + 1, q(0, 1));
                let vertex = f_vertex_route(particles, n, 6, &by_size).unwrap();
                assert_eq!(graph, vertex, "N = {particles}, n = {n}");
            }
        }
    }
}

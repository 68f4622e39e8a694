//! Abstract polymer systems: polymers with weights and a symmetric
//! incompatibility relation, their cluster coefficients and the convergence
//! certificate for the cluster expansion.

mod clusters;
mod kp;
mod product;
mod ursell;
mod weight;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

pub use clusters::{
    cluster_log_sum, partition_function_direct, pinned_cluster_sum, ClusterLogSum,
    MAX_CLUSTER_MULTIPLICITY, MAX_DIRECT_POLYMERS,
};
pub(crate) use clusters::{for_each_cluster, ClusterSearch};
pub use kp::{
    kp_condition_check, l_factor, pinned_cluster_bound, search_uniform_parameters,
    search_uniform_parameters_at,
    truncation_tail_bound, KpCertificate, KpParameters,
};
pub use product::{product_structure_cancellation, OrderResidual, ProductStructure};
pub use ursell::{ursell_by_derivative, ursell_coefficient};
pub(crate) use ursell::UrsellCache;
pub use weight::{parse_rational, Weight};

/// One polymer: an opaque name, a weight and optionally the set of labels it
/// occupies. Polymers with a support are incompatible exactly when their
/// supports meet.
#[derive(Clone, Debug, PartialEq)]
pub struct Polymer<W> {
    pub name: String,
    pub weight: W,
    pub support: Option<Vec<u32>>,
}

impl<W> Polymer<W> {
    pub fn new(name: impl Into<String>, weight: W) -> Self {
        Polymer {
            name: name.into(),
            weight,
            support: None,
        }
    }

    pub fn with_support(name: impl Into<String>, weight: W, mut support: Vec<u32>) -> Self {
        support.sort_unstable();
        support.dedup();
        Polymer {
            name: name.into(),
            weight,
            support: Some(support),
        }
    }

    /// `|γ|`: the support size, or 1 for a polymer without internal structure.
    pub fn size(&self) -> usize {
        self.support.as_ref().map_or(1, Vec::len)
    }
}

/// A finite polymer system `(Γ, incompatibility, ω)`.
///
/// Every polymer is incompatible with itself; the stored relation only
/// records distinct pairs.
#[derive(Clone, Debug)]
pub struct PolymerSystem<W> {
    polymers: Vec<Polymer<W>>,
    neighbours: Vec<Vec<usize>>,
    matrix: Vec<u64>,
    stride: usize,
}

impl<W: Weight> PolymerSystem<W> {
    /// Builds a system from explicit incompatible pairs of polymer indices.
    pub fn new(polymers: Vec<Polymer<W>>, incompatible: &[(usize, usize)]) -> Result<Self> {
        let n = polymers.len();
        let mut names: Vec<&str> = polymers.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid("polymers", format!("duplicate polymer `{}`", w[0])));
        }
        for p in &polymers {
            if !p.weight.is_finite() {
                return Err(Error::invalid(&p.name, "weight must be finite"));
            }
        }
        let stride = n.div_ceil(64).max(1);
        let mut matrix = vec![0u64; n * stride];
        let mut neighbours = vec![Vec::new(); n];
        for &(i, j) in incompatible {
            if i >= n || j >= n {
                return Err(Error::invalid("incompatibility", format!("index {} out of range", i.max(j))));
            }
            if i == j || matrix[i * stride + j / 64] >> (j % 64) & 1 == 1 {
                continue;
            }
            matrix[i * stride + j / 64] |= 1 << (j % 64);
            matrix[j * stride + i / 64] |= 1 << (i % 64);
            neighbours[i].push(j);
            neighbours[j].push(i);
        }
        for list in &mut neighbours {
            list.sort_unstable();
        }
        Ok(PolymerSystem {
            polymers,
            neighbours,
            matrix,
            stride,
        })
    }

    /// Subsystem on the given polymers (in the given order) with the
    /// induced incompatibility.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let polymers = keep
            .iter()
            .map(|&p| {
                self.polymers
                    .get(p)
                    .cloned()
                    .ok_or_else(|| Error::UnknownPolymer(format!("#{p}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::new();
        for (i, &p) in keep.iter().enumerate() {
            for (j, &q) in keep.iter().enumerate().skip(i + 1) {
                if self.incompatible(p, q) {
                    pairs.push((i, j));
                }
            }
        }
        Self::new(polymers, &pairs)
    }

    /// Builds a system from named pairs.
    pub fn from_named_pairs(polymers: Vec<Polymer<W>>, pairs: &[(&str, &str)]) -> Result<Self> {
        let index: BTreeMap<&str, usize> = polymers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.as_str(), i))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownPolymer(name.to_string()))
        };
        let pairs = pairs
            .iter()
            .map(|&(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(polymers, &pairs)
    }

    /// Builds a system in which incompatibility means overlapping supports.
    pub fn from_supports(polymers: Vec<Polymer<W>>) -> Result<Self> {
        let mut masks = Vec::with_capacity(polymers.len());
        for p in &polymers {
            let support = p
                .support
                .as_ref()
                .ok_or_else(|| Error::invalid(&p.name, "polymer has no support"))?;
            if support.is_empty() || support.iter().any(|&v| v == 0 || v > 64) {
                return Err(Error::invalid(&p.name, "support labels must lie in 1..=64"));
            }
            masks.push(support.iter().fold(0u64, |m, &v| m | 1 << (v - 1)));
        }
        let mut pairs = Vec::new();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                if masks[i] & masks[j] != 0 {
                    pairs.push((i, j));
                }
            }
        }
        Self::new(polymers, &pairs)
    }
}

impl<W> PolymerSystem<W> {
    pub fn len(&self) -> usize {
        self.polymers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polymers.is_empty()
    }

    pub fn polymers(&self) -> &[Polymer<W>] {
        &self.polymers
    }

    pub fn polymer(&self, i: usize) -> &Polymer<W> {
        &self.polymers[i]
    }

    pub fn weight(&self, i: usize) -> &W {
        &self.polymers[i].weight
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.polymers
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::UnknownPolymer(name.to_string()))
    }

    /// Incompatibility, reflexive.
    pub fn incompatible(&self, i: usize, j: usize) -> bool {
        i == j || self.matrix[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    /// Distinct polymers incompatible with `i`, ascending.
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    /// The same system with weights replaced.
    pub fn map_weights<V>(&self, f: impl Fn(usize, &W) -> V) -> PolymerSystem<V> {
        PolymerSystem {
            polymers: self
                .polymers
                .iter()
                .enumerate()
                .map(|(i, p)| Polymer {
                    name: p.name.clone(),
                    weight: f(i, &p.weight),
                    support: p.support.clone(),
                })
                .collect(),
            neighbours: self.neighbours.clone(),
            matrix: self.matrix.clone(),
            stride: self.stride,
        }
    }

    /// Multi-index from `(name, multiplicity)` pairs.
    pub fn multi_index(&self, entries: &[(&str, u32)]) -> Result<MultiIndex> {
        let pairs = entries
            .iter()
            .map(|&(name, m)| Ok((self.index_of(name)?, m)))
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::new(pairs)
    }

    /// The graph `G_I`: polymer `γ` becomes a clique on `I(γ)` vertices and
    /// all copies of incompatible polymers are joined. Vertices are labeled
    /// `1..` in polymer order.
    pub fn expanded_incompatibility_graph(&self, index: &MultiIndex) -> Result<LabeledGraph> {
        self.check_index(index)?;
        let mut owner = Vec::new();
        for (&p, &m) in &index.entries {
            owner.extend(std::iter::repeat_n(p, m as usize));
        }
        let mut edges = Vec::new();
        for a in 0..owner.len() {
            for b in a + 1..owner.len() {
                if self.incompatible(owner[a], owner[b]) {
                    edges.push((a as u32 + 1, b as u32 + 1));
                }
            }
        }
        Ok(LabeledGraph::from_sorted_unchecked(
            (1..=owner.len() as u32).collect(),
            edges,
        ))
    }

    pub(crate) fn check_index(&self, index: &MultiIndex) -> Result<()> {
        match index.entries.keys().find(|&&p| p >= self.len()) {
            Some(p) => Err(Error::UnknownPolymer(format!("#{p}"))),
            None => Ok(()),
        }
    }
}

/// Multiplicities `I: Γ -> {1, 2, ...}` on a finite support, keyed by
/// polymer index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex {
    entries: BTreeMap<usize, u32>,
}

impl MultiIndex {
    /// Repeated indices accumulate; zero multiplicities are rejected.
    pub fn new(entries: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, m) in entries {
            if m == 0 {
                return Err(Error::invalid("multiplicity", "must be at least 1"));
            }
            *map.entry(p).or_insert(0) += m;
        }
        Ok(MultiIndex { entries: map })
    }

    pub fn single(p: usize, m: u32) -> Self {
        MultiIndex {
            entries: BTreeMap::from([(p, m.max(1))]),
        }
    }

    pub fn entries(&self) -> &BTreeMap<usize, u32> {
        &self.entries
    }

    pub fn get(&self, p: usize) -> u32 {
        self.entries.get(&p).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// `sum_γ I(γ)`.
    pub fn total(&self) -> u32 {
        self.entries.values().sum()
    }

    /// `I! = prod_γ I(γ)!`.
    pub fn factorial(&self) -> BigInt {
        self.entries
            .values()
            .flat_map(|&m| 1..=m)
            .fold(BigInt::one(), |acc, k| acc * k)
    }

    /// `||I|| = sum_γ I(γ) |γ|`.
    pub fn norm<W>(&self, system: &PolymerSystem<W>) -> usize {
        self.entries
            .iter()
            .map(|(&p, &m)| m as usize * system.polymer(p).size())
            .sum()
    }

    /// `|I|`, the size of the union of supports; `None` when some polymer
    /// has no support.
    pub fn support_size<W>(&self, system: &PolymerSystem<W>) -> Option<usize> {
        let mut labels = Vec::new();
        for &p in self.entries.keys() {
            labels.extend(system.polymer(p).support.as_ref()?.iter().copied());
        }
        labels.sort_unstable();
        labels.dedup();
        Some(labels.len())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(p, m)| format!("{p}:{m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(p: i64) -> BigRational {
        BigRational::from_integer(p.into())
    }

    #[test]
    fn expanded_graph_examples() {
        let sys = PolymerSystem::from_named_pairs(
            vec![Polymer::new("a", r(1)), Polymer::new("b", r(1)), Polymer::new("c", r(1))],
            &[("a", "b")],
        )
        .unwrap();
        let g = sys.expanded_incompatibility_graph(&sys.multi_index(&[("a", 1)]).unwrap()).unwrap();
        assert_eq!((g.order(), g.edge_count()), (1, 0));
        let g = sys.expanded_incompatibility_graph(&sys.multi_index(&[("a", 2)]).unwrap()).unwrap();
        assert_eq!(g, LabeledGraph::complete([1, 2]).unwrap());
        let g = sys
            .expanded_incompatibility_graph(&sys.multi_index(&[("a", 1), ("b", 1)]).unwrap())
            .unwrap();
        assert_eq!(g, LabeledGraph::complete([1, 2]).unwrap());
        let g = sys
            .expanded_incompatibility_graph(&sys.multi_index(&[("a", 2), ("c", 1)]).unwrap())
            .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(matches!(sys.multi_index(&[("zz", 1)]), Err(Error::UnknownPolymer(_))));
    }

    #[test]
    fn supports_define_incompatibility_and_norms() {
        let sys = PolymerSystem::from_supports(vec![
            Polymer::with_support("12", 0.1, vec![1, 2]),
            Polymer::with_support("23", 0.1, vec![2, 3]),
            Polymer::with_support("45", 0.1, vec![4, 5]),
        ])
        .unwrap();
        assert!(sys.incompatible(0, 1));
        assert!(!sys.incompatible(0, 2));
        let idx = MultiIndex::new([(0, 2), (1, 1)]).unwrap();
        assert_eq!(idx.norm(&sys), 6);
        assert_eq!(idx.support_size(&sys), Some(3));
        assert_eq!(idx.total(), 3);
        assert_eq!(idx.factorial(), BigInt::from(2));
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(PolymerSystem::new(vec![Polymer::new("a", f64::NAN)], &[]).is_err());
        assert!(PolymerSystem::new(vec![Polymer::new("a", 1.0), Polymer::new("a", 1.0)], &[]).is_err());
        assert!(PolymerSystem::new(vec![Polymer::new("a", 1.0)], &[(0, 3)]).is_err());
        assert!(MultiIndex::new([(0, 0)]).is_err());
    }
}

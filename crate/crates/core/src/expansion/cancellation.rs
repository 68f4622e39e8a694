//! Cancellation of the clusters whose union is a graph with a cut vertex,
//! once the graph activities factorize over blocks.
//!
//! For a connected `g` with blocks `b_1, …, b_k` the polymers are the unions
//! of block sets that are connected through shared vertices, with weight
//! `Π ζ̃(b_i)`. The restricted sum runs over clusters of these polymers
//! whose union is `g`, truncated by the degree `Σ n_i |b_i|` of the block
//! monomial `Π ζ̃(b_i)^{n_i}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{check_range, Error, Result};
use crate::graph::{block_decomposition, LabeledGraph};
use crate::polymer::{for_each_cluster, ClusterSearch, Polymer, PolymerSystem};

/// Largest graph order accepted.
pub const MAX_CANCELLATION_ORDER: usize = 6;
/// Largest block-monomial degree accepted.
pub const MAX_CANCELLATION_DEGREE: usize = 8;

const DENOMINATOR: i64 = 40_320;

/// Coefficient of one block monomial `Π ζ̃(b_i)^{n_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMonomial {
    pub exponents: Vec<u32>,
    pub coefficient: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CancellationReport {
    pub graph: LabeledGraph,
    pub blocks: Vec<LabeledGraph>,
    pub two_connected: bool,
    pub max_degree: usize,
    /// Unions of connected block sets, as block masks.
    pub polymers: Vec<u32>,
    pub clusters: u64,
    pub monomials: Vec<BlockMonomial>,
    /// The restricted sum at the block weights passed in.
    pub weighted_sum: BigRational,
}

impl CancellationReport {
    /// Every monomial coefficient is zero.
    pub fn vanishes(&self) -> bool {
        self.monomials.iter().all(|m| m.coefficient.is_zero())
    }

    pub fn nonzero_monomials(&self) -> usize {
        self.monomials.iter().filter(|m| !m.coefficient.is_zero()).count()
    }
}

/// Default block weights: `-1/(i+2)` for block `i`.
pub fn default_block_weights(count: usize) -> Vec<BigRational> {
    (0..count)
        .map(|i| BigRational::new(BigInt::from(-1), BigInt::from(i as i64 + 2)))
        .collect()
}

fn connected_blocks(mask: u32, block_masks: &[u64]) -> bool {
    let first = mask.trailing_zeros();
    let mut reached = 1u32 << first;
    loop {
        let vertices = (0..block_masks.len())
            .filter(|&i| reached >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | block_masks[i]);
        let next = (0..block_masks.len() as u32)
            .filter(|&i| mask >> i & 1 == 1 && block_masks[i as usize] & vertices != 0)
            .fold(reached, |acc, i| acc | 1 << i);
        if next == reached {
            return reached == mask;
        }
        reached = next;
    }
}

/// Exact restricted cluster sum for `g`, grouped by block monomial, with
/// `Σ n_i |b_i| <= max_degree`.
pub fn cancellation_check(
    g: &LabeledGraph,
    max_degree: usize,
    block_weights: Option<&[BigRational]>,
) -> Result<CancellationReport> {
    check_range("graph order", g.order(), 2, MAX_CANCELLATION_ORDER)?;
    check_range("degree", max_degree, 2, MAX_CANCELLATION_DEGREE)?;
    let tree = block_decomposition(g)?;
    let blocks = tree.blocks;
    let k = blocks.len();
    let weights = match block_weights {
        Some(w) if w.len() == k => w.to_vec(),
        Some(w) => {
            return Err(Error::invalid(
                "block weights",
                format!("{k} blocks but {} weights", w.len()),
            ))
        }
        None => default_block_weights(k),
    };
    let block_masks: Vec<u64> = blocks
        .iter()
        .map(|b| b.vertices().iter().fold(0u64, |m, &v| m | 1 << (v - 1)))
        .collect();
    let mut polymers = Vec::new();
    let mut sets = Vec::new();
    for mask in 1u32..(1 << k) {
        if !connected_blocks(mask, &block_masks) {
            continue;
        }
        let mut support = Vec::new();
        let mut weight = BigRational::one();
        for i in (0..k).filter(|&i| mask >> i & 1 == 1) {
            support.extend(blocks[i].vertices().iter().copied());
            weight *= weights[i].clone();
        }
        polymers.push(Polymer::with_support(format!("{mask}"), weight, support));
        sets.push(mask);
    }
    let system = PolymerSystem::from_supports(polymers)?;
    let degree: Vec<u32> = sets
        .iter()
        .map(|&m| (0..k).filter(|&i| m >> i & 1 == 1).map(|i| blocks[i].order() as u32).sum())
        .collect();
    let all = (1u32 << k) - 1;
    let covers = |support: &[usize]| support.iter().fold(0u32, |acc, &p| acc | sets[p]) == all;
    let search = ClusterSearch {
        sizes: degree,
        budget: max_degree as u32,
        max_total: (max_degree / 2) as u32,
        accept: Some(&covers),
    };
    let parts = for_each_cluster(
        &system,
        &search,
        || (BTreeMap::<Vec<u32>, i64>::new(), 0u64),
        |(acc, count), term| {
            let mut exponents = vec![0u32; k];
            for (&p, &m) in term.support.iter().zip(term.mults) {
                for (i, e) in exponents.iter_mut().enumerate() {
                    if sets[p] >> i & 1 == 1 {
                        *e += m;
                    }
                }
            }
            *acc.entry(exponents).or_insert(0) += term.signed_sum * (DENOMINATOR / term.factorial);
            *count += 1;
        },
    );
    let mut merged: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
    let mut clusters = 0;
    for (part, count) in parts {
        clusters += count;
        for (key, num) in part {
            *merged.entry(key).or_insert(0) += num;
        }
    }
    let denominator = BigInt::from(DENOMINATOR);
    let mut weighted_sum = BigRational::zero();
    let monomials: Vec<BlockMonomial> = merged
        .into_iter()
        .map(|(exponents, num)| {
            let coefficient = BigRational::new(BigInt::from(num), denominator.clone());
            let mut term = coefficient.clone();
            for (w, &e) in weights.iter().zip(&exponents) {
                for _ in 0..e {
                    term *= w.clone();
                }
            }
            weighted_sum += term;
            BlockMonomial { exponents, coefficient }
        })
        .collect();
    Ok(CancellationReport {
        graph: g.clone(),
        two_connected: k == 1,
        blocks,
        max_degree,
        polymers: sets,
        clusters,
        monomials,
        weighted_sum,
    })
}

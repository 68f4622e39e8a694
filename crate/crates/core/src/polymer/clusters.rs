use rayon::prelude::*;

use super::weight::abs_f64;
use super::{PolymerSystem, UrsellCache, Weight};
use crate::error::{check_range, Error, Result};

/// Largest total multiplicity for which cluster coefficients are evaluated.
pub const MAX_CLUSTER_MULTIPLICITY: usize = 8;
/// Largest system accepted by the subset scan in [`partition_function_direct`].
pub const MAX_DIRECT_POLYMERS: usize = 20;

/// Which clusters to visit: connected supports under incompatibility, with
/// `sum I(γ) size(γ) <= budget` and `sum I(γ) <= max_total`.
pub(crate) struct ClusterSearch<'a> {
    pub sizes: Vec<u32>,
    pub budget: u32,
    pub max_total: u32,
    /// Supports failing this test are skipped (multiplicities untouched).
    pub accept: Option<&'a (dyn Fn(&[usize]) -> bool + Sync)>,
}

pub(crate) struct ClusterTerm<'a> {
    /// Ascending polymer indices.
    pub support: &'a [usize],
    pub mults: &'a [u32],
    pub signed_sum: i64,
    pub factorial: i64,
}

impl ClusterTerm<'_> {
    pub fn coefficient<W: Weight>(&self) -> W {
        W::from_ratio(self.signed_sum, self.factorial)
    }

    /// `ω^I`.
    pub fn monomial<W: Weight>(&self, system: &PolymerSystem<W>) -> W {
        self.support
            .iter()
            .zip(self.mults)
            .fold(W::one(), |acc, (&p, &m)| acc * system.weight(p).pow(m))
    }

    pub fn total(&self) -> u32 {
        self.mults.iter().sum()
    }

    pub fn weighted_size(&self, sizes: &[u32]) -> u32 {
        self.support.iter().zip(self.mults).map(|(&p, &m)| sizes[p] * m).sum()
    }
}

/// Visits every cluster selected by `search`. The search tree is split by
/// the smallest polymer of the support; each root runs on its own state
/// from `init`, and the states come back in root order so any reduction
/// over them is independent of the worker count.
pub(crate) fn for_each_cluster<W, T, I, F>(
    system: &PolymerSystem<W>,
    search: &ClusterSearch<'_>,
    init: I,
    visit: F,
) -> Vec<T>
where
    W: Weight,
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &ClusterTerm<'_>) + Sync,
{
    (0..system.len())
        .into_par_iter()
        .map(|root| {
            let mut state = init();
            if search.sizes[root] <= search.budget && search.max_total >= 1 {
                let mut walker = Walker {
                    system,
                    search,
                    closed: vec![0; system.len()],
                    set: Vec::new(),
                    cache: UrsellCache::default(),
                };
                walker.run(root, &mut |term| visit(&mut state, term));
            }
            state
        })
        .collect()
}

struct Walker<'s, 'a, W> {
    system: &'s PolymerSystem<W>,
    search: &'s ClusterSearch<'a>,
    /// How many members of `set` are equal or incompatible to each polymer.
    closed: Vec<u32>,
    set: Vec<usize>,
    cache: UrsellCache,
}

impl<W: Weight> Walker<'_, '_, W> {
    fn run(&mut self, root: usize, visit: &mut dyn FnMut(&ClusterTerm<'_>)) {
        let ext: Vec<usize> = self
            .system
            .neighbours(root)
            .iter()
            .copied()
            .filter(|&u| u > root)
            .collect();
        self.push(root);
        self.extend(root, ext, self.search.sizes[root], visit);
        self.pop(root);
    }

    fn push(&mut self, w: usize) {
        self.set.push(w);
        self.closed[w] += 1;
        for &u in self.system.neighbours(w) {
            self.closed[u] += 1;
        }
    }

    fn pop(&mut self, w: usize) {
        self.set.pop();
        self.closed[w] -= 1;
        for &u in self.system.neighbours(w) {
            self.closed[u] -= 1;
        }
    }

    // Enumeration of connected sets containing `root` with all other
    // members above it, each set produced exactly once.
    fn extend(&mut self, root: usize, mut ext: Vec<usize>, used: u32, visit: &mut dyn FnMut(&ClusterTerm<'_>)) {
        self.report(visit);
        if self.set.len() as u32 >= self.search.max_total {
            return;
        }
        while let Some(w) = ext.pop() {
            let size = self.search.sizes[w];
            if used + size > self.search.budget {
                continue;
            }
            let mut next = ext.clone();
            next.extend(
                self.system
                    .neighbours(w)
                    .iter()
                    .copied()
                    .filter(|&u| u > root && self.closed[u] == 0),
            );
            self.push(w);
            self.extend(root, next, used + size, visit);
            self.pop(w);
        }
    }

    fn report(&mut self, visit: &mut dyn FnMut(&ClusterTerm<'_>)) {
        let mut support = self.set.clone();
        support.sort_unstable();
        if let Some(accept) = self.search.accept {
            if !accept(&support) {
                return;
            }
        }
        let base: u32 = support.iter().map(|&p| self.search.sizes[p]).sum();
        let mut mults = vec![1u32; support.len()];
        self.assign(&support, &mut mults, 0, base, support.len() as u32, visit);
    }

    fn assign(
        &mut self,
        support: &[usize],
        mults: &mut Vec<u32>,
        k: usize,
        used: u32,
        total: u32,
        visit: &mut dyn FnMut(&ClusterTerm<'_>),
    ) {
        if k == support.len() {
            let system = self.system;
            let (signed_sum, factorial) = self
                .cache
                .get(mults, |a, b| system.incompatible(support[a], support[b]));
            visit(&ClusterTerm {
                support,
                mults,
                signed_sum,
                factorial,
            });
            return;
        }
        let size = self.search.sizes[support[k]];
        let (mut used, mut total) = (used, total);
        loop {
            self.assign(support, mults, k + 1, used, total, visit);
            if used + size > self.search.budget || total + 1 > self.search.max_total {
                break;
            }
            used += size;
            total += 1;
            mults[k] += 1;
        }
        mults[k] = 1;
    }
}

/// `Z = sum over pairwise compatible collections of prod ω(γ)`, the empty
/// collection contributing 1.
pub fn partition_function_direct<W: Weight>(system: &PolymerSystem<W>) -> Result<W> {
    check_range("polymer count", system.len(), 0, MAX_DIRECT_POLYMERS)?;
    fn collect<W: Weight>(system: &PolymerSystem<W>, chosen: &mut Vec<usize>, next: usize, product: W) -> W {
        let mut sum = product.clone();
        for p in next..system.len() {
            if chosen.iter().all(|&q| !system.incompatible(p, q)) {
                chosen.push(p);
                sum = sum + collect(system, chosen, p + 1, product.clone() * system.weight(p).clone());
                chosen.pop();
            }
        }
        sum
    }
    Ok(collect(system, &mut Vec::new(), 0, W::one()))
}

/// Truncated cluster sum `sum c_I ω^I` over `sum I(γ) <= M`, split by total
/// multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterLogSum<W> {
    /// Entry `k - 1` holds the clusters of total multiplicity `k`.
    pub by_order: Vec<W>,
    pub total: W,
}

pub fn cluster_log_sum<W: Weight>(system: &PolymerSystem<W>, max_total_multiplicity: usize) -> Result<ClusterLogSum<W>> {
    let m = max_total_multiplicity;
    check_range("max total multiplicity", m, 1, MAX_CLUSTER_MULTIPLICITY)?;
    let search = ClusterSearch {
        sizes: vec![1; system.len()],
        budget: m as u32,
        max_total: m as u32,
        accept: None,
    };
    let parts = for_each_cluster(
        system,
        &search,
        || vec![W::zero(); m],
        |acc, term| {
            let k = term.total() as usize - 1;
            acc[k] = acc[k].clone() + term.coefficient::<W>() * term.monomial(system);
        },
    );
    let mut by_order = vec![W::zero(); m];
    for part in parts {
        for (slot, v) in by_order.iter_mut().zip(part) {
            *slot = slot.clone() + v;
        }
    }
    let total = by_order.iter().cloned().fold(W::zero(), |a, b| a + b);
    Ok(ClusterLogSum { by_order, total })
}

/// Left side of the pinned bound, truncated at total multiplicity `M`:
/// `sum_{I: I(γ') >= 1} |c_I ω^I| exp(sum I(γ) c(γ))`.
pub fn pinned_cluster_sum<W: Weight>(
    system: &PolymerSystem<W>,
    gamma_prime: usize,
    c: &[f64],
    max_total_multiplicity: usize,
) -> Result<f64> {
    let m = max_total_multiplicity;
    check_range("max total multiplicity", m, 1, MAX_CLUSTER_MULTIPLICITY)?;
    if gamma_prime >= system.len() {
        return Err(Error::UnknownPolymer(format!("#{gamma_prime}")));
    }
    if c.len() != system.len() {
        return Err(Error::invalid("c", "one value per polymer required"));
    }
    let accept = move |s: &[usize]| s.binary_search(&gamma_prime).is_ok();
    let search = ClusterSearch {
        sizes: vec![1; system.len()],
        budget: m as u32,
        max_total: m as u32,
        accept: Some(&accept),
    };
    let parts = for_each_cluster(
        system,
        &search,
        || 0.0f64,
        |acc, term| {
            let coefficient = (term.signed_sum as f64 / term.factorial as f64).abs();
            let mut value = coefficient;
            for (&p, &k) in term.support.iter().zip(term.mults) {
                value *= (abs_f64(system.weight(p)) * c[p].exp()).powi(k as i32);
            }
            *acc += value;
        },
    );
    Ok(parts.into_iter().sum())
}

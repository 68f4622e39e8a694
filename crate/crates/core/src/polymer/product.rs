use std::collections::{BTreeMap, BTreeSet};

use super::clusters::{for_each_cluster, ClusterSearch, MAX_CLUSTER_MULTIPLICITY};
use super::{PolymerSystem, Weight};
use crate::error::{check_range, Error, Result};

const MAX_BASE: usize = 12;

/// A base set `Γ^b` with a map `φ` from its incompatible subsets into the
/// polymers. Keys of `phi` are ascending lists of base polymer indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductStructure {
    pub base: Vec<usize>,
    pub phi: BTreeMap<Vec<usize>, usize>,
}

/// Both sides of the product-structure identity at one order, the order
/// being the degree in the base weights.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderResidual<W> {
    pub order: usize,
    /// Clusters supported in the range of `φ`.
    pub lhs: W,
    /// Clusters on a single base polymer.
    pub rhs: W,
    pub residual: W,
}

impl ProductStructure {
    pub fn new(base: Vec<usize>, phi: BTreeMap<Vec<usize>, usize>) -> Self {
        ProductStructure { base, phi }
    }

    /// `R(φ)`, ascending.
    pub fn range(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.phi.values().copied().collect();
        set.into_iter().collect()
    }

    fn fail<W>(&self, system: &PolymerSystem<W>, subset: &[usize], reason: impl Into<String>) -> Error {
        Error::ProductStructure {
            subset: subset.iter().map(|&p| system.polymer(p).name.clone()).collect(),
            reason: reason.into(),
        }
    }

    /// Checks that `φ` is defined exactly on the incompatible subsets of the
    /// base, fixes singletons, is one-to-one, factorizes the weights and
    /// carries compatibility of subsets to compatibility of images.
    pub fn validate<W: Weight>(&self, system: &PolymerSystem<W>) -> Result<()> {
        check_range("base size", self.base.len(), 1, MAX_BASE)?;
        let mut base = self.base.clone();
        base.sort_unstable();
        base.dedup();
        if base.len() != self.base.len() {
            return Err(Error::invalid("base", "repeated polymer"));
        }
        if let Some(&p) = base.iter().find(|&&p| p >= system.len()) {
            return Err(Error::UnknownPolymer(format!("#{p}")));
        }
        let subsets = incompatible_subsets(system, &base);
        for a in &subsets {
            if !self.phi.contains_key(a) {
                return Err(self.fail(system, a, "phi is undefined on this incompatible subset"));
            }
        }
        for (a, &image) in &self.phi {
            if image >= system.len() {
                return Err(Error::UnknownPolymer(format!("#{image}")));
            }
            if !subsets.contains(a) {
                return Err(self.fail(system, a, "not an incompatible subset of the base"));
            }
            if a.len() == 1 && image != a[0] {
                return Err(self.fail(system, a, "phi must fix singletons"));
            }
            let product = a
                .iter()
                .fold(W::one(), |acc, &p| acc * system.weight(p).clone());
            if !same_weight(system.weight(image), &product) {
                return Err(self.fail(system, a, "weight of the image is not the product of weights"));
            }
        }
        let mut seen = BTreeMap::new();
        for (a, &image) in &self.phi {
            if let Some(prev) = seen.insert(image, a) {
                return Err(self.fail(system, a, format!("image shared with {prev:?}")));
            }
        }
        let entries: Vec<(&Vec<usize>, usize)> = self.phi.iter().map(|(a, &g)| (a, g)).collect();
        for (i, &(a, ga)) in entries.iter().enumerate() {
            for &(b, gb) in &entries[i + 1..] {
                let joined = a.iter().any(|p| b.iter().any(|q| system.incompatible(*p, *q)));
                if joined != system.incompatible(ga, gb) {
                    let mut both = a.clone();
                    both.extend(b);
                    return Err(self.fail(system, &both, "compatibility of images does not match the subsets"));
                }
            }
        }
        Ok(())
    }
}

fn same_weight<W: Weight>(x: &W, y: &W) -> bool {
    if W::is_exact() {
        x == y
    } else {
        let (x, y) = (x.to_f64(), y.to_f64());
        (x - y).abs() <= 1e-12 * y.abs().max(f64::MIN_POSITIVE)
    }
}

/// Nonempty subsets of `base` connected under incompatibility, each as an
/// ascending list.
fn incompatible_subsets<W>(system: &PolymerSystem<W>, base: &[usize]) -> BTreeSet<Vec<usize>> {
    let k = base.len();
    let mut out = BTreeSet::new();
    for mask in 1u32..1 << k {
        let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| base[i]).collect();
        let mut reached = vec![members[0]];
        let mut frontier = vec![members[0]];
        while let Some(p) = frontier.pop() {
            for &q in &members {
                if !reached.contains(&q) && system.incompatible(p, q) {
                    reached.push(q);
                    frontier.push(q);
                }
            }
        }
        if reached.len() == members.len() {
            out.insert(members);
        }
    }
    out
}

/// Compares, order by order in the base weights up to `M`, the cluster sum
/// over multi-indices supported in `R(φ)` with the sum over multi-indices
/// supported on a single base polymer. With exact weights the residual is
/// exactly zero at every order.
pub fn product_structure_cancellation<W: Weight>(
    system: &PolymerSystem<W>,
    ps: &ProductStructure,
    max_order: usize,
) -> Result<Vec<OrderResidual<W>>> {
    check_range("order", max_order, 1, MAX_CLUSTER_MULTIPLICITY)?;
    ps.validate(system)?;
    let range = ps.range();
    let sub = system.restrict(&range)?;
    let mut degree = vec![0u32; range.len()];
    for (a, image) in &ps.phi {
        degree[range.binary_search(image).unwrap()] = a.len() as u32;
    }
    let search = ClusterSearch {
        sizes: degree.clone(),
        budget: max_order as u32,
        max_total: max_order as u32,
        accept: None,
    };
    let parts = for_each_cluster(
        &sub,
        &search,
        || vec![W::zero(); max_order],
        |acc, term| {
            let k = term.weighted_size(&degree) as usize - 1;
            acc[k] = acc[k].clone() + term.coefficient::<W>() * term.monomial(&sub);
        },
    );
    let mut lhs = vec![W::zero(); max_order];
    for part in parts {
        for (slot, v) in lhs.iter_mut().zip(part) {
            *slot = slot.clone() + v;
        }
    }
    Ok(lhs
        .into_iter()
        .enumerate()
        .map(|(i, lhs)| {
            let k = i as i64 + 1;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let rhs = ps.base.iter().fold(W::zero(), |acc, &b| {
                acc + W::from_ratio(sign, k) * system.weight(b).pow(k as u32)
            });
            OrderResidual {
                order: i + 1,
                residual: lhs.clone() - rhs.clone(),
                lhs,
                rhs,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::Polymer;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn chain() -> (PolymerSystem<BigRational>, ProductStructure) {
        // b1 - b2 - b3 with every connected union present
        let (w1, w2, w3) = (r(1, 3), r(-1, 5), r(2, 7));
        let polymers = vec![
            Polymer::new("b1", w1.clone()),
            Polymer::new("b2", w2.clone()),
            Polymer::new("b3", w3.clone()),
            Polymer::new("b12", &w1 * &w2),
            Polymer::new("b23", &w2 * &w3),
            Polymer::new("b123", &w1 * &w2 * &w3),
        ];
        // images are incompatible whenever their subsets touch
        let touching = [
            (0, 1), (1, 2), (0, 3), (1, 3), (2, 3), (1, 4), (2, 4), (0, 4),
            (3, 4), (0, 5), (1, 5), (2, 5), (3, 5), (4, 5),
        ];
        let sys = PolymerSystem::new(polymers, &touching).unwrap();
        let phi = BTreeMap::from([
            (vec![0], 0),
            (vec![1], 1),
            (vec![2], 2),
            (vec![0, 1], 3),
            (vec![1, 2], 4),
            (vec![0, 1, 2], 5),
        ]);
        (sys, ProductStructure::new(vec![0, 1, 2], phi))
    }

    #[test]
    fn chain_residual_vanishes() {
        let (sys, ps) = chain();
        for row in product_structure_cancellation(&sys, &ps, 6).unwrap() {
            assert!(row.residual.is_zero(), "order {}: {:?}", row.order, row.residual);
        }
    }

    #[test]
    fn incompatible_pair_cross_terms_cancel() {
        let polymers = vec![
            Polymer::new("b1", r(1, 4)),
            Polymer::new("b2", r(1, 6)),
            Polymer::new("g12", r(1, 24)),
        ];
        let sys = PolymerSystem::new(polymers, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let ps = ProductStructure::new(vec![0, 1], BTreeMap::from([(vec![0], 0), (vec![1], 1), (vec![0, 1], 2)]));
        let rows = product_structure_cancellation(&sys, &ps, 6).unwrap();
        assert!(rows.iter().all(|row| row.residual.is_zero()));
    }

    #[test]
    fn compatible_base_is_trivial() {
        let sys = PolymerSystem::new(vec![Polymer::new("a", r(1, 2)), Polymer::new("b", r(1, 3))], &[]).unwrap();
        let ps = ProductStructure::new(vec![0, 1], BTreeMap::from([(vec![0], 0), (vec![1], 1)]));
        let rows = product_structure_cancellation(&sys, &ps, 4).unwrap();
        assert!(rows.iter().all(|row| row.residual.is_zero()));
        assert_eq!(rows[0].rhs, r(5, 6));
    }

    #[test]
    fn broken_factorization_names_the_subset() {
        let polymers = vec![
            Polymer::new("b1", r(1, 4)),
            Polymer::new("b2", r(1, 6)),
            Polymer::new("g12", r(1, 23)),
        ];
        let sys = PolymerSystem::new(polymers, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let ps = ProductStructure::new(vec![0, 1], BTreeMap::from([(vec![0], 0), (vec![1], 1), (vec![0, 1], 2)]));
        match product_structure_cancellation(&sys, &ps, 4) {
            Err(Error::ProductStructure { subset, .. }) => assert_eq!(subset, vec!["b1", "b2"]),
            other => panic!("{other:?}"),
        }
        let missing = ProductStructure::new(vec![0, 1], BTreeMap::from([(vec![0], 0), (vec![1], 1)]));
        assert!(missing.validate(&sys).is_err());
    }
}

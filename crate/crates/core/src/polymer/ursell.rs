use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::clusters::MAX_CLUSTER_MULTIPLICITY;
use super::{MultiIndex, PolymerSystem};
use crate::error::{check_range, Result};
use crate::graph::spanning::connected_signed_sum;

/// `c_I = (1/I!) sum (-1)^{|E(G)|}` over connected spanning subgraphs `G`
/// of the expanded incompatibility graph. Zero when the support of `I` is
/// not connected under incompatibility.
pub fn ursell_coefficient<W>(index: &MultiIndex, system: &PolymerSystem<W>) -> Result<BigRational> {
    system.check_index(index)?;
    check_range("total multiplicity", index.total() as usize, 1, MAX_CLUSTER_MULTIPLICITY)?;
    let support: Vec<usize> = index.support().collect();
    let mults: Vec<u32> = support.iter().map(|&p| index.get(p)).collect();
    let (num, den) = signed_sum(&mults, |a, b| system.incompatible(support[a], support[b]));
    Ok(BigRational::new(num.into(), den.into()))
}

/// Signed spanning sum of the expanded graph and `I!`, for a support whose
/// members are addressed by position.
fn signed_sum(mults: &[u32], incompatible: impl Fn(usize, usize) -> bool) -> (i64, i64) {
    let mut owner = Vec::new();
    for (k, &m) in mults.iter().enumerate() {
        owner.extend(std::iter::repeat_n(k, m as usize));
    }
    let n = owner.len();
    let mut adj = vec![0u64; n];
    for a in 0..n {
        for b in a + 1..n {
            if owner[a] == owner[b] || incompatible(owner[a], owner[b]) {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    let factorial: i64 = mults.iter().flat_map(|&m| 1..=m as i64).product();
    (connected_signed_sum(&adj), factorial)
}

/// Memo of `(signed sum, I!)` keyed by the multiplicity pattern and the
/// incompatibility pattern inside the support.
#[derive(Default)]
pub(crate) struct UrsellCache {
    memo: HashMap<([u8; 8], u32), (i64, i64)>,
}

impl UrsellCache {
    /// `support.len() <= 8` and `sum mults <= 8` are the caller's contract.
    pub(crate) fn get(&mut self, mults: &[u32], incompatible: impl Fn(usize, usize) -> bool) -> (i64, i64) {
        let k = mults.len();
        let mut pattern = [0u8; 8];
        for (slot, &m) in pattern.iter_mut().zip(mults) {
            *slot = m as u8;
        }
        let mut bits = 0u32;
        let mut bit = 0;
        for a in 0..k {
            for b in a + 1..k {
                if incompatible(a, b) {
                    bits |= 1 << bit;
                }
                bit += 1;
            }
        }
        *self
            .memo
            .entry((pattern, bits))
            .or_insert_with(|| signed_sum(mults, &incompatible))
    }
}

type Monomials = HashMap<Vec<u32>, BigRational>;

/// `c_I` as the Taylor coefficient of `ω^I` in `log Z`, from a truncated
/// multivariate expansion of `log(1 + (Z - 1))` in exact arithmetic. Only
/// polymers in the support of `I` matter, the others are set to zero.
pub fn ursell_by_derivative<W>(index: &MultiIndex, system: &PolymerSystem<W>) -> Result<BigRational> {
    system.check_index(index)?;
    check_range("total multiplicity", index.total() as usize, 1, MAX_CLUSTER_MULTIPLICITY)?;
    let support: Vec<usize> = index.support().collect();
    let cap: Vec<u32> = support.iter().map(|&p| index.get(p)).collect();
    let k = support.len();

    // Z - 1 over the support: nonempty compatible subsets.
    let mut x: Monomials = HashMap::new();
    for mask in 1u32..1 << k {
        let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let compatible = members.iter().enumerate().all(|(a, &i)| {
            members[a + 1..]
                .iter()
                .all(|&j| !system.incompatible(support[i], support[j]))
        });
        if compatible {
            let exps: Vec<u32> = (0..k).map(|i| mask >> i & 1).collect();
            x.insert(exps, BigRational::one());
        }
    }

    let multiply = |a: &Monomials, b: &Monomials| {
        let mut out: Monomials = HashMap::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(p, q)| p + q).collect();
                if e.iter().zip(&cap).all(|(p, c)| p <= c) {
                    *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
                }
            }
        }
        out
    };

    let mut coefficient = BigRational::zero();
    let mut power = x.clone();
    for j in 1..=index.total() as i64 {
        if let Some(c) = power.get(&cap) {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            coefficient += c * BigRational::new(sign.into(), j.into());
        }
        power = multiply(&power, &x);
        if power.is_empty() {
            break;
        }
    }
    Ok(coefficient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::Polymer;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn clique(k: usize) -> PolymerSystem<BigRational> {
        let polymers = (0..k).map(|i| Polymer::new(format!("g{i}"), r(1, 10))).collect();
        let pairs: Vec<_> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        PolymerSystem::new(polymers, &pairs).unwrap()
    }

    #[test]
    fn named_coefficients() {
        let sys = clique(3);
        let c = |e: &[(usize, u32)]| ursell_coefficient(&MultiIndex::new(e.iter().copied()).unwrap(), &sys).unwrap();
        assert_eq!(c(&[(0, 1)]), r(1, 1));
        assert_eq!(c(&[(0, 1), (1, 1)]), r(-1, 1));
        assert_eq!(c(&[(0, 2)]), r(-1, 2));
        assert_eq!(c(&[(0, 1), (1, 1), (2, 1)]), r(2, 1));
        assert_eq!(c(&[(0, 3)]), r(1, 3));
    }

    #[test]
    fn compatible_support_vanishes() {
        let sys = PolymerSystem::new(vec![Polymer::new("a", r(1, 2)), Polymer::new("b", r(1, 3))], &[]).unwrap();
        let idx = MultiIndex::new([(0, 2), (1, 1)]).unwrap();
        assert_eq!(ursell_coefficient(&idx, &sys).unwrap(), r(0, 1));
        assert_eq!(ursell_by_derivative(&idx, &sys).unwrap(), r(0, 1));
    }

    #[test]
    fn derivative_route_matches_on_a_clique() {
        let sys = clique(4);
        for e in [vec![(0, 1)], vec![(0, 2), (1, 1)], vec![(0, 1), (1, 1), (2, 1), (3, 1)], vec![(1, 4)]] {
            let idx = MultiIndex::new(e).unwrap();
            assert_eq!(ursell_coefficient(&idx, &sys).unwrap(), ursell_by_derivative(&idx, &sys).unwrap());
        }
    }

    #[test]
    fn cache_agrees_with_direct_evaluation() {
        let sys = clique(3);
        let mut cache = UrsellCache::default();
        let (num, den) = cache.get(&[2, 1], |a, b| sys.incompatible(a, b));
        let direct = ursell_coefficient(&MultiIndex::new([(0, 2), (1, 1)]).unwrap(), &sys).unwrap();
        assert_eq!(r(num, den), direct);
    }

    #[test]
    fn size_cap_is_enforced() {
        let sys = clique(1);
        assert!(ursell_coefficient(&MultiIndex::single(0, 9), &sys).is_err());
        assert!(ursell_coefficient(&MultiIndex::default(), &sys).is_err());
    }
}

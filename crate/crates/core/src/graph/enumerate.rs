use super::LabeledGraph;
use crate::error::{check_range, Result};

/// Largest vertex count accepted by the exhaustive enumerators.
pub const MAX_ENUMERATION_ORDER: usize = 8;

/// Every labeled simple graph on `1..=n`, one per edge subset.
///
/// Edge subsets are visited in increasing bitmask order over the
/// lexicographically ordered vertex pairs, so the stream is deterministic.
pub fn enumerate_graphs(n: usize) -> Result<GraphIter> {
    check_range("vertex count", n, 1, MAX_ENUMERATION_ORDER)?;
    let mut pairs = Vec::new();
    for i in 1..=n as u32 {
        for j in i + 1..=n as u32 {
            pairs.push((i, j));
        }
    }
    Ok(GraphIter {
        n: n as u32,
        end: 1u64 << pairs.len(),
        pairs,
        next: 0,
    })
}

pub fn connected_graphs(n: usize) -> Result<impl Iterator<Item = LabeledGraph>> {
    Ok(enumerate_graphs(n)?.filter(|g| g.is_connected().unwrap_or(false)))
}

pub fn two_connected_graphs(n: usize) -> Result<impl Iterator<Item = LabeledGraph>> {
    check_range("vertex count", n, 2, MAX_ENUMERATION_ORDER)?;
    Ok(enumerate_graphs(n)?.filter(|g| g.is_two_connected().unwrap_or(false)))
}

#[derive(Clone, Debug)]
pub struct GraphIter {
    n: u32,
    pairs: Vec<(u32, u32)>,
    next: u64,
    end: u64,
}

impl Iterator for GraphIter {
    type Item = LabeledGraph;

    fn next(&mut self) -> Option<LabeledGraph> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let edges = self
            .pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Some(LabeledGraph::from_sorted_unchecked((1..=self.n).collect(), edges))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for GraphIter {}

/// Every labeled tree on `1..=n`, decoded from Prüfer sequences in
/// lexicographic order.
pub fn enumerate_trees(n: usize) -> Result<TreeIter> {
    check_range("vertex count", n, 1, MAX_ENUMERATION_ORDER)?;
    let len = n.saturating_sub(2);
    Ok(TreeIter {
        n,
        code: vec![1; len],
        done: false,
    })
}

#[derive(Clone, Debug)]
pub struct TreeIter {
    n: usize,
    code: Vec<u32>,
    done: bool,
}

impl TreeIter {
    fn advance(&mut self) {
        for digit in self.code.iter_mut().rev() {
            if (*digit as usize) < self.n {
                *digit += 1;
                return;
            }
            *digit = 1;
        }
        self.done = true;
    }
}

impl Iterator for TreeIter {
    type Item = LabeledGraph;

    fn next(&mut self) -> Option<LabeledGraph> {
        if self.done {
            return None;
        }
        let tree = decode_pruefer(self.n, &self.code);
        self.advance();
        Some(tree)
    }
}

fn decode_pruefer(n: usize, code: &[u32]) -> LabeledGraph {
    let vertices: Vec<u32> = (1..=n as u32).collect();
    if n == 1 {
        return LabeledGraph::from_sorted_unchecked(vertices, Vec::new());
    }
    let mut degree = vec![1usize; n + 1];
    for &c in code {
        degree[c as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = (1..=n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(c as usize) as u32, leaf.max(c as usize) as u32));
        degree[leaf] -= 1;
        degree[c as usize] -= 1;
    }
    let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0] as u32, rest[1] as u32));
    edges.sort_unstable();
    LabeledGraph::from_sorted_unchecked(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn graph_counts_are_powers_of_two() {
        assert_eq!(enumerate_graphs(1).unwrap().count(), 1);
        assert_eq!(enumerate_graphs(3).unwrap().count(), 8);
        assert_eq!(enumerate_graphs(4).unwrap().count(), 64);
    }

    #[test]
    fn out_of_range_orders_are_rejected() {
        assert!(enumerate_graphs(0).is_err());
        assert!(enumerate_graphs(9).is_err());
        assert!(enumerate_trees(9).is_err());
    }

    #[test]
    fn trees_are_distinct_and_counted_by_cayley() {
        for n in 1..=7usize {
            let trees: Vec<_> = enumerate_trees(n).unwrap().collect();
            let expected = if n == 1 { 1 } else { n.pow(n as u32 - 2) };
            assert_eq!(trees.len(), expected, "n = {n}");
            let distinct: BTreeSet<_> = trees.iter().cloned().collect();
            assert_eq!(distinct.len(), expected);
            assert!(trees.iter().all(|t| t.is_tree().unwrap()));
        }
    }

    #[test]
    fn streams_are_deterministic() {
        let a: Vec<_> = enumerate_graphs(4).unwrap().collect();
        let b: Vec<_> = enumerate_graphs(4).unwrap().collect();
        assert_eq!(a, b);
        let a: Vec<_> = enumerate_trees(5).unwrap().collect();
        let b: Vec<_> = enumerate_trees(5).unwrap().collect();
        assert_eq!(a, b);
    }
}

//! Labeled simple graphs and the combinatorics built on them.
//!
//! Vertices carry positive integer labels. Every algorithm here works on
//! small graphs (exhaustive enumeration is capped at eight vertices), so the
//! representation favours clarity: sorted vertex labels plus a sorted list of
//! edges `(i, j)` with `i < j`.

mod blocks;
mod canon;
mod count;
mod enumerate;
pub(crate) mod spanning;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use blocks::{articulation_points, articulation_points_by_removal, block_decomposition, BlockTree};
pub use canon::CanonicalForm;
pub use count::{
    count_connected, count_connected_brute_force, count_two_connected,
    count_two_connected_brute_force,
};
pub use enumerate::{
    connected_graphs, enumerate_graphs, enumerate_trees, two_connected_graphs, GraphIter, TreeIter,
    MAX_ENUMERATION_ORDER,
};
pub use spanning::{signed_connected_spanning_sum, signed_connected_spanning_sum_by_enumeration};

/// A simple undirected graph on a set of positive integer labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledGraph {
    vertices: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl LabeledGraph {
    /// Builds a graph, rejecting label 0, self-loops, repeated edges and
    /// edges whose endpoints are not declared vertices.
    pub fn new(
        vertices: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let mut vertices: Vec<u32> = vertices.into_iter().collect();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("repeated vertex label".into()));
        }
        if vertices.first() == Some(&0) {
            return Err(Error::InvalidGraph("vertex labels must be positive".into()));
        }
        let mut normalized = Vec::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
            let e = (i.min(j), i.max(j));
            for v in [e.0, e.1] {
                if vertices.binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {}-{} uses undeclared vertex {v}",
                        e.0, e.1
                    )));
                }
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("repeated edge".into()));
        }
        Ok(LabeledGraph {
            vertices,
            edges: normalized,
        })
    }

    /// Graph whose vertex set is exactly the set of edge endpoints.
    pub fn from_edges(edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let edges: Vec<_> = edges.into_iter().collect();
        let mut vertices: Vec<u32> = edges.iter().flat_map(|&(i, j)| [i, j]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        Self::new(vertices, edges)
    }

    /// The complete graph on the given labels.
    pub fn complete(labels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let vertices: Vec<u32> = labels.into_iter().collect();
        let mut edges = Vec::new();
        for (a, &i) in vertices.iter().enumerate() {
            for &j in &vertices[a + 1..] {
                edges.push((i, j));
            }
        }
        Self::new(vertices, edges)
    }

    /// The path `1 - 2 - ... - n`.
    pub fn path(n: u32) -> Result<Self> {
        Self::new(1..=n, (1..n).map(|i| (i, i + 1)))
    }

    /// The edgeless graph on `1..=n`.
    pub fn edgeless(n: u32) -> Result<Self> {
        Self::new(1..=n, std::iter::empty())
    }

    pub(crate) fn from_sorted_unchecked(vertices: Vec<u32>, edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        LabeledGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Number of vertices, `|g|`.
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn has_edge(&self, i: u32, j: u32) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    /// Position of a label in the sorted vertex list.
    pub fn index_of(&self, v: u32) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Edges as pairs of vertex positions.
    pub fn index_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.index_of(i).unwrap(), self.index_of(j).unwrap()))
            .collect()
    }

    /// Neighbour lists indexed by vertex position.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.order()];
        for (a, b) in self.index_edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Adjacency bitmasks by vertex position. Only valid for graphs on at
    /// most 64 vertices.
    pub(crate) fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.order() <= 64, "mask representation limited to 64 vertices");
        let mut adj = vec![0u64; self.order()];
        for (a, b) in self.index_edges() {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// True iff every pair of vertices is joined by a path.
    pub fn is_connected(&self) -> Result<bool> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(self.component_of(0, None).len() == self.order())
    }

    /// Vertex positions reachable from `start`, optionally ignoring one vertex.
    fn component_of(&self, start: usize, removed: Option<usize>) -> Vec<usize> {
        let adj = self.neighbours();
        let mut seen = vec![false; self.order()];
        if let Some(r) = removed {
            seen[r] = true;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut out = vec![start];
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Connected, and still connected after deleting any single vertex with
    /// its edges. Under this definition the single edge `K2` is 2-connected;
    /// a lone vertex is not.
    pub fn is_two_connected(&self) -> Result<bool> {
        if !self.is_connected()? {
            return Ok(false);
        }
        if self.order() < 2 {
            return Ok(false);
        }
        Ok(articulation_points_by_removal(self)?.is_empty())
    }

    pub fn is_tree(&self) -> Result<bool> {
        Ok(self.is_connected()? && self.edge_count() + 1 == self.order())
    }

    /// The graph with vertex `v` and its incident edges removed.
    pub fn remove_vertex(&self, v: u32) -> LabeledGraph {
        LabeledGraph {
            vertices: self.vertices.iter().copied().filter(|&u| u != v).collect(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(i, j)| i != v && j != v)
                .collect(),
        }
    }

    /// Vertex and edge union.
    pub fn union(&self, other: &LabeledGraph) -> LabeledGraph {
        let mut vertices: Vec<u32> = self.vertices.iter().chain(&other.vertices).copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut edges: Vec<(u32, u32)> = self.edges.iter().chain(&other.edges).copied().collect();
        edges.sort_unstable();
        edges.dedup();
        LabeledGraph { vertices, edges }
    }

    /// True if the two graphs share at least one vertex.
    pub fn intersects(&self, other: &LabeledGraph) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.vertices.len() && b < other.vertices.len() {
            match self.vertices[a].cmp(&other.vertices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

impl fmt::Display for LabeledGraph {
    /// Canonical text form: sorted vertex labels, `|`, sorted `i-j` edges.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(u32::to_string).collect();
        write!(f, "{} |", vs.join(" "))?;
        for (i, j) in &self.edges {
            write!(f, " {i}-{j}")?;
        }
        Ok(())
    }
}

impl FromStr for LabeledGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (vs, es) = s
            .split_once('|')
            .ok_or_else(|| Error::parse(1, "expected `vertices | edges`"))?;
        let label = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::parse(1, format!("bad vertex label `{t}`")))
        };
        let vertices = vs.split_whitespace().map(label).collect::<Result<Vec<_>>>()?;
        let edges = es
            .split_whitespace()
            .map(|t| {
                let (i, j) = t
                    .split_once('-')
                    .ok_or_else(|| Error::parse(1, format!("bad edge `{t}`")))?;
                Ok((label(i)?, label(j)?))
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledGraph::new(vertices, edges)
    }
}

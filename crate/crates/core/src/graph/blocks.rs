use std::collections::BTreeSet;

use super::LabeledGraph;
use crate::error::{Error, Result};

/// Decomposition of a connected graph into maximal 2-connected blocks glued
/// at cut vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTree {
    pub blocks: Vec<LabeledGraph>,
    pub cut_vertices: Vec<u32>,
    /// `(block index, cut vertex)` for every cut vertex lying in a block.
    pub incidence: Vec<(usize, u32)>,
}

impl BlockTree {
    /// Union of all blocks.
    pub fn reassemble(&self) -> LabeledGraph {
        self.blocks
            .iter()
            .skip(1)
            .fold(self.blocks[0].clone(), |acc, b| acc.union(b))
    }
}

fn require_connected(g: &LabeledGraph) -> Result<()> {
    if g.is_connected()? {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Vertices whose removal disconnects `g`, found by deleting each vertex in
/// turn and re-testing connectivity.
pub fn articulation_points(g: &LabeledGraph) -> Result<BTreeSet<u32>> {
    require_connected(g)?;
    if g.order() < 2 {
        return Err(Error::size("vertex count", g.order(), 2, usize::MAX));
    }
    Ok(articulation_points_by_removal(g)?.into_iter().collect())
}

/// Remove-and-test without the connectivity precondition; callers must
/// pass a connected graph.
pub fn articulation_points_by_removal(g: &LabeledGraph) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for &v in g.vertices() {
        let rest = g.remove_vertex(v);
        if rest.order() > 0 && !rest.is_connected()? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Splits a connected graph into its blocks (maximal 2-connected
/// subgraphs, counting a bridge as a block) using a depth-first edge stack.
pub fn block_decomposition(g: &LabeledGraph) -> Result<BlockTree> {
    require_connected(g)?;
    if g.order() == 1 {
        return Ok(BlockTree {
            blocks: vec![g.clone()],
            cut_vertices: Vec::new(),
            incidence: Vec::new(),
        });
    }
    let adj = g.neighbours();
    let n = g.order();
    let mut search = EdgeStackSearch {
        adj: &adj,
        disc: vec![usize::MAX; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    search.visit(0, usize::MAX);

    let label = |i: usize| g.vertices()[i];
    let mut blocks: Vec<LabeledGraph> = search
        .blocks
        .into_iter()
        .map(|edges| {
            LabeledGraph::from_edges(edges.into_iter().map(|(a, b)| (label(a), label(b))))
                .expect("block edges come from a valid graph")
        })
        .collect();
    blocks.sort();

    let mut membership = vec![0usize; n];
    for b in &blocks {
        for &v in b.vertices() {
            membership[g.index_of(v).unwrap()] += 1;
        }
    }
    let cut_vertices: Vec<u32> = (0..n).filter(|&i| membership[i] >= 2).map(label).collect();
    let mut incidence = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        for &c in &cut_vertices {
            if b.contains_vertex(c) {
                incidence.push((k, c));
            }
        }
    }
    Ok(BlockTree {
        blocks,
        cut_vertices,
        incidence,
    })
}

struct EdgeStackSearch<'a> {
    adj: &'a [Vec<usize>],
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<(usize, usize)>,
    blocks: Vec<Vec<(usize, usize)>>,
}

impl EdgeStackSearch<'_> {
    fn visit(&mut self, u: usize, parent: usize) {
        self.disc[u] = self.time;
        self.low[u] = self.time;
        self.time += 1;
        let adj = self.adj;
        for &v in &adj[u] {
            if self.disc[v] == usize::MAX {
                self.stack.push((u, v));
                self.visit(v, u);
                self.low[u] = self.low[u].min(self.low[v]);
                if self.low[v] >= self.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = self.stack.pop() {
                        block.push(e);
                        if e == (u, v) {
                            break;
                        }
                    }
                    self.blocks.push(block);
                }
            } else if v != parent && self.disc[v] < self.disc[u] {
                self.stack.push((u, v));
                self.low[u] = self.low[u].min(self.disc[v]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_graphs;

    fn bowtie() -> LabeledGraph {
        LabeledGraph::from_edges([(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn articulation_point_examples() {
        let path = LabeledGraph::path(3).unwrap();
        assert_eq!(articulation_points(&path).unwrap(), BTreeSet::from([2]));
        let triangle = LabeledGraph::complete([1, 2, 3]).unwrap();
        assert!(articulation_points(&triangle).unwrap().is_empty());
        assert_eq!(articulation_points(&bowtie()).unwrap(), BTreeSet::from([3]));
        let split = LabeledGraph::new([1, 2, 3], [(1, 2)]).unwrap();
        assert_eq!(articulation_points(&split), Err(Error::Disconnected));
    }

    #[test]
    fn block_examples() {
        let t = block_decomposition(&LabeledGraph::complete([1, 2, 3]).unwrap()).unwrap();
        assert_eq!(t.blocks.len(), 1);
        assert!(t.cut_vertices.is_empty());

        let t = block_decomposition(&LabeledGraph::path(3).unwrap()).unwrap();
        assert_eq!(t.blocks, vec![
            LabeledGraph::from_edges([(1, 2)]).unwrap(),
            LabeledGraph::from_edges([(2, 3)]).unwrap(),
        ]);
        assert_eq!(t.cut_vertices, vec![2]);

        let t = block_decomposition(&bowtie()).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert!(t.blocks.iter().all(|b| b.order() == 3 && b.edge_count() == 3));
        assert_eq!(t.cut_vertices, vec![3]);
        assert_eq!(t.incidence, vec![(0, 3), (1, 3)]);
    }

    #[test]
    fn blocks_agree_with_remove_and_test_on_all_small_graphs() {
        for n in 2..=6 {
            for g in connected_graphs(n).unwrap() {
                let tree = block_decomposition(&g).unwrap();
                assert_eq!(tree.reassemble(), g);
                assert!(tree.blocks.iter().all(|b| b.is_two_connected().unwrap()));
                let cuts: BTreeSet<u32> = tree.cut_vertices.iter().copied().collect();
                assert_eq!(cuts, articulation_points(&g).unwrap(), "{g}");
                for (i, a) in tree.blocks.iter().enumerate() {
                    for b in &tree.blocks[i + 1..] {
                        let shared = a.vertices().iter().filter(|v| b.contains_vertex(**v)).count();
                        assert!(shared <= 1);
                    }
                }
            }
        }
    }
}

use super::LabeledGraph;
use crate::error::{check_range, Error, Result};

const MAX_SPANNING_ORDER: usize = 8;

/// `sum (-1)^{|E(H)|}` over connected spanning subgraphs `H` of `g`.
///
/// Evaluated exactly through the vertex-subset recursion
/// `C(S) = A(S) - sum_{T} C(T) A(S \ T)`, where `T` runs over proper
/// subsets of `S` holding its smallest vertex and `A(S)` is the signed sum
/// over all spanning subgraphs of `g[S]` (1 if `g[S]` has no edge, else 0).
/// A disconnected `g` gives 0.
pub fn signed_connected_spanning_sum(g: &LabeledGraph) -> Result<i64> {
    if g.order() == 0 {
        return Err(Error::EmptyGraph);
    }
    check_range("vertex count", g.order(), 1, MAX_SPANNING_ORDER)?;
    Ok(connected_signed_sum(&g.adjacency_masks()))
}

/// Same quantity by walking every edge subset, abandoning a branch as soon
/// as the chosen edges plus all undecided ones can no longer span `g`.
pub fn signed_connected_spanning_sum_by_enumeration(g: &LabeledGraph) -> Result<i64> {
    if g.order() == 0 {
        return Err(Error::EmptyGraph);
    }
    check_range("vertex count", g.order(), 1, MAX_SPANNING_ORDER)?;
    let n = g.order();
    let edges = g.index_edges();
    let full = (1u64 << n) - 1;
    if !spans(n, &edges, full, u64::MAX) {
        return Ok(0);
    }
    let mut total = 0i64;
    walk_edges(n, &edges, 0, 0, &mut total);
    Ok(total)
}

fn walk_edges(n: usize, edges: &[(usize, usize)], k: usize, chosen: u64, total: &mut i64) {
    if k == edges.len() {
        if spans(n, edges, (1 << n) - 1, chosen) {
            *total += if chosen.count_ones().is_multiple_of(2) { 1 } else { -1 };
        }
        return;
    }
    walk_edges(n, edges, k + 1, chosen | 1 << k, total);
    let optimistic = chosen | (u64::MAX << (k + 1));
    if spans(n, edges, (1 << n) - 1, optimistic) {
        walk_edges(n, edges, k + 1, chosen, total);
    }
}

/// Whether the edges selected by `edge_mask` connect all vertices in `vertices`.
fn spans(n: usize, edges: &[(usize, usize)], vertices: u64, edge_mask: u64) -> bool {
    let mut adj = vec![0u64; n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        if edge_mask >> k & 1 == 1 {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    reach(&adj, vertices) == vertices
}

/// Vertices of `within` reachable from its lowest member.
pub(crate) fn reach(adj: &[u64], within: u64) -> u64 {
    if within == 0 {
        return 0;
    }
    let mut seen = within & within.wrapping_neg();
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & within & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen
}

/// Subset recursion over vertex masks of a graph on `adj.len()` vertices.
pub(crate) fn connected_signed_sum(adj: &[u64]) -> i64 {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    let size = 1usize << n;
    let edgeless: Vec<bool> = (0..size as u64)
        .map(|s| (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
        .collect();
    let a = |s: u64| i64::from(edgeless[s as usize]);
    let mut c = vec![0i64; size];
    for s in 1..size as u64 {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut acc = a(s);
        // T = low | sub, sub a proper subset of rest
        let mut sub = rest;
        loop {
            sub = sub.wrapping_sub(1) & rest;
            if sub == rest {
                break;
            }
            let t = low | sub;
            let other = s ^ t;
            if c[t as usize] != 0 && edgeless[other as usize] {
                acc -= c[t as usize];
            }
            if sub == 0 {
                break;
            }
        }
        c[s as usize] = acc;
    }
    c[size - 1]
}

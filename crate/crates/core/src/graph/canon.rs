use super::LabeledGraph;

/// Isomorphism-class key of a small graph: the smallest edge bitmask over
/// all relabelings of its vertices by position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub order: u8,
    pub bits: u32,
}

const MAX_CANON_ORDER: usize = 8;

fn pair_index(a: usize, b: usize) -> usize {
    let (i, j) = (a.min(b), a.max(b));
    // position of (i, j) among pairs of 0..8 ordered by (j, i)
    j * (j - 1) / 2 + i
}

impl LabeledGraph {
    /// Canonical form by brute force over vertex permutations.
    ///
    /// # Panics
    /// If the graph has more than eight vertices.
    pub fn canonical_form(&self) -> CanonicalForm {
        let n = self.order();
        assert!(n <= MAX_CANON_ORDER, "canonical form limited to 8 vertices");
        let edges = self.index_edges();
        let mut perm: Vec<usize> = (0..n).collect();
        let encode = |perm: &[usize]| {
            edges
                .iter()
                .fold(0u32, |acc, &(a, b)| acc | 1 << pair_index(perm[a], perm[b]))
        };
        let mut best = encode(&perm);
        // Heap's algorithm
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                best = best.min(encode(&perm));
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        CanonicalForm {
            order: n as u8,
            bits: best,
        }
    }
}

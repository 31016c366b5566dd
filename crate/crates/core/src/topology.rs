//! Topological type of a multicurve: the labeled graph of its complement.
//!
//! Vertices are complementary pieces labeled `(genus, boundary count)`; edges
//! are the components, labeled by weight, joining the pieces on their two
//! sides. Two multicurves lie in the same mapping class group orbit exactly
//! when their canonical graphs agree.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeInvariant {
    /// `(genus, boundary)` per vertex, sorted.
    pub vertices: Vec<(u32, u32)>,
    /// `(u, v, weight)` with `u <= v`, sorted.
    pub edges: Vec<(u32, u32, u64)>,
}

impl TypeInvariant {
    /// Canonicalizes an arbitrarily labeled graph: the lexicographically
    /// smallest edge list over all vertex relabelings that sort the labels.
    pub fn from_graph(vertices: Vec<(u32, u32)>, edges: Vec<(u32, u32, u64)>) -> Self {
        let n = vertices.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| vertices[i]);
        let sorted_vertices: Vec<(u32, u32)> = order.iter().map(|&i| vertices[i]).collect();

        // blocks of equal labels; permutations act within blocks
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && sorted_vertices[j] == sorted_vertices[i] {
                j += 1;
            }
            blocks.push((i, j));
            i = j;
        }

        let mut best: Option<Vec<(u32, u32, u64)>> = None;
        let mut pos = order.clone();
        let mut label = vec![0u32; n];
        permute_blocks(&mut pos, &blocks, 0, &mut |perm| {
            for (new, &old) in perm.iter().enumerate() {
                label[old] = new as u32;
            }
            let mut e: Vec<(u32, u32, u64)> = edges
                .iter()
                .map(|&(a, b, w)| {
                    let (x, y) = (label[a as usize], label[b as usize]);
                    (x.min(y), x.max(y), w)
                })
                .collect();
            e.sort_unstable();
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
        });
        TypeInvariant {
            vertices: sorted_vertices,
            edges: best.unwrap_or_default(),
        }
    }

    pub fn num_components(&self) -> usize {
        self.edges.len()
    }

    /// Sum over vertices of `2 - 2 genus - boundary`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices
            .iter()
            .map(|&(g, b)| 2 - 2 * g as i64 - b as i64)
            .sum()
    }

    /// A single nonseparating simple closed curve of weight 1.
    pub fn is_nonseparating_scc(&self) -> bool {
        self.edges.len() == 1 && self.edges[0].2 == 1 && self.edges[0].0 == self.edges[0].1
    }

    /// A single separating simple closed curve of weight 1.
    pub fn is_separating_scc(&self) -> bool {
        self.edges.len() == 1 && self.edges[0].2 == 1 && self.edges[0].0 != self.edges[0].1
    }

    /// Type of a nonseparating simple closed curve on a genus-`g` surface.
    pub fn nonseparating_scc(genus: u32) -> Self {
        TypeInvariant::from_graph(vec![(genus - 1, 2)], vec![(0, 0, 1)])
    }

    /// Same graph with every weight multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        TypeInvariant {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|&(a, b, w)| (a, b, w * k)).collect(),
        }
    }
}

fn permute_blocks(
    pos: &mut Vec<usize>,
    blocks: &[(usize, usize)],
    b: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if b == blocks.len() {
        f(pos);
        return;
    }
    let (lo, hi) = blocks[b];
    permute_range(pos, lo, hi, lo, &mut |p: &mut Vec<usize>| {
        permute_blocks(p, blocks, b + 1, f)
    });
}

fn permute_range(
    v: &mut Vec<usize>,
    lo: usize,
    hi: usize,
    k: usize,
    f: &mut dyn FnMut(&mut Vec<usize>),
) {
    if hi - lo <= 1 || k + 1 >= hi {
        f(v);
        return;
    }
    for i in k..hi {
        v.swap(k, i);
        permute_range(v, lo, hi, k + 1, f);
        v.swap(k, i);
    }
}

/// Grouping key: `g1b2;g0b3|0-0w1;0-1w2`.
impl fmt::Display for TypeInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self
            .vertices
            .iter()
            .map(|(g, b)| format!("g{g}b{b}"))
            .collect();
        let e: Vec<String> = self
            .edges
            .iter()
            .map(|(a, b, w)| format!("{a}-{b}w{w}"))
            .collect();
        write!(f, "{}|{}", v.join(";"), e.join(";"))
    }
}

impl FromStr for TypeInvariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed type key {s:?}"));
        let (vs, es) = s.split_once('|').ok_or_else(bad)?;
        let mut vertices = Vec::new();
        for v in vs.split(';').filter(|x| !x.is_empty()) {
            let rest = v.strip_prefix('g').ok_or_else(bad)?;
            let (g, b) = rest.split_once('b').ok_or_else(bad)?;
            vertices.push((g.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
        }
        let mut edges = Vec::new();
        for e in es.split(';').filter(|x| !x.is_empty()) {
            let (ab, w) = e.split_once('w').ok_or_else(bad)?;
            let (a, b) = ab.split_once('-').ok_or_else(bad)?;
            let a: u32 = a.parse().map_err(|_| bad())?;
            let b: u32 = b.parse().map_err(|_| bad())?;
            if a as usize >= vertices.len() || b as usize >= vertices.len() {
                return Err(bad());
            }
            edges.push((a, b, w.parse().map_err(|_| bad())?));
        }
        Ok(TypeInvariant::from_graph(vertices, edges))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn key_format() {
        let t = TypeInvariant::nonseparating_scc(2);
        assert_eq!(t.to_string(), "g1b2|0-0w1");
        assert_eq!(t.to_string().parse::<TypeInvariant>().unwrap(), t);
        let empty = TypeInvariant::from_graph(vec![(2, 0)], vec![]);
        assert_eq!(empty.to_string(), "g2b0|");
        assert_eq!("g2b0|".parse::<TypeInvariant>().unwrap(), empty);
        assert!("g1b2|0-3w1".parse::<TypeInvariant>().is_err());
    }

    #[test]
    fn separating_vs_nonseparating() {
        let sep = TypeInvariant::from_graph(vec![(1, 1), (1, 1)], vec![(1, 0, 1)]);
        assert!(sep.is_separating_scc());
        assert!(!sep.is_nonseparating_scc());
        assert!(TypeInvariant::nonseparating_scc(2).is_nonseparating_scc());
        assert_eq!(sep.euler_characteristic(), -2);
    }

    fn graph() -> impl Strategy<Value = (Vec<(u32, u32)>, Vec<(u32, u32, u64)>)> {
        (1usize..6).prop_flat_map(|n| {
            (
                proptest::collection::vec((0u32..2, 0u32..4), n),
                proptest::collection::vec((0..n as u32, 0..n as u32, 1u64..4), 0..6),
            )
        })
    }

    proptest! {
        #[test]
        fn canonical_form_is_permutation_invariant(
            (v, e) in graph(),
            seed in any::<u64>(),
        ) {
            let n = v.len();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut pv = vec![(0, 0); n];
            for i in 0..n {
                pv[perm[i]] = v[i];
            }
            let pe: Vec<_> = e.iter().map(|&(a, b, w)| (perm[a as usize] as u32, perm[b as usize] as u32, w)).collect();
            let a = TypeInvariant::from_graph(v, e);
            let b = TypeInvariant::from_graph(pv, pe);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(TypeInvariant::from_graph(a.vertices.clone(), a.edges.clone()), a);
        }
    }
}

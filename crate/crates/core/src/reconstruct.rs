//! Rebuilding a unital from its confluence graph, lifting graph
//! isomorphisms to unital isomorphisms, and a backtracking isomorphism test
//! for incidence structures.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::cliques::enumerate_maximal_cliques;
use crate::confluence::{infer_order, ConfluenceGraph};
use crate::incidence::{affine_plane, IncidenceStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("not the confluence graph of a unital: {0}")]
    NotAUnitalGraph(String),
    #[error("not a unital: {0}")]
    NotAUnital(String),
    #[error("isomorphism extension needs order q > 2, got {0}")]
    OrderTooSmall(usize),
    #[error("block map is not an isomorphism of the confluence graphs")]
    NotAGraphIsomorphism,
    #[error("image of the pencil of point {0} is not a pencil")]
    PencilImageNotAPencil(usize),
}

/// A unital recovered from a bare confluence graph.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub q: usize,
    /// The `q³+1` cliques of size `q²`, each a sorted vertex list; point `j`
    /// of `structure` is clique `j`.
    pub points: Vec<Vec<usize>>,
    pub structure: IncidenceStructure,
    /// Graph vertex -> block index in `structure`.
    pub block_of_vertex: Vec<usize>,
    /// Set when the order-2 case returned the canonical AG(2,3).
    pub shortcut: bool,
}

/// Maximal cliques with at least `min` vertices, sorted.
pub fn large_maximal_cliques(g: &ConfluenceGraph, min: usize) -> Vec<Vec<usize>> {
    fn go(
        g: &ConfluenceGraph,
        min: usize,
        r: &mut Vec<usize>,
        mut p: FixedBitSet,
        mut x: FixedBitSet,
        out: &mut Vec<Vec<usize>>,
    ) {
        if r.len() + p.count_ones(..) < min {
            return;
        }
        if p.is_clear() {
            if x.is_clear() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = p
            .ones()
            .map(|u| (p.intersection_count(g.neighbors(u)), std::cmp::Reverse(u)))
            .max()
            .map(|(_, std::cmp::Reverse(u))| u)
            .expect("p is nonempty");
        let branch: Vec<usize> = p.difference(g.neighbors(pivot)).collect();
        for v in branch {
            let mut np = p.clone();
            np.intersect_with(g.neighbors(v));
            let mut nx = x.clone();
            nx.intersect_with(g.neighbors(v));
            r.push(v);
            go(g, min, r, np, nx, out);
            r.pop();
            p.remove(v);
            x.insert(v);
            if r.len() + p.count_ones(..) < min {
                return;
            }
        }
    }
    if min <= 1 {
        return enumerate_maximal_cliques(g);
    }
    let n = g.n();
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    let mut out = Vec::new();
    go(
        g,
        min,
        &mut Vec::new(),
        p,
        FixedBitSet::with_capacity(n),
        &mut out,
    );
    out.sort();
    out
}

/// Rebuilds the unital whose confluence graph is `g`.
///
/// For `q > 2` the points are the cliques of size `q²`. For `q = 2` every
/// unital is isomorphic to AG(2,3), which is returned directly.
pub fn reconstruct_unital(g: &ConfluenceGraph) -> Result<Reconstruction, ReconstructError> {
    let bad = |m: String| ReconstructError::NotAUnitalGraph(m);
    let q = infer_order(g).ok_or_else(|| {
        bad(format!(
            "{} vertices / degrees do not match any unital order",
            g.n()
        ))
    })?;
    if q == 2 {
        let structure = affine_plane(3).expect("AG(2,3) exists");
        let points = (0..structure.num_points())
            .map(|p| structure.pencil(p).to_vec())
            .collect();
        let block_of_vertex = (0..structure.num_blocks()).collect();
        return Ok(Reconstruction {
            q,
            points,
            structure,
            block_of_vertex,
            shortcut: true,
        });
    }
    let size = q * q;
    let points: Vec<Vec<usize>> = large_maximal_cliques(g, size)
        .into_iter()
        .filter(|c| c.len() == size)
        .collect();
    if points.len() != q * q * q + 1 {
        return Err(bad(format!(
            "{} cliques of size {size}, expected {}",
            points.len(),
            q * q * q + 1
        )));
    }
    let mut raw_blocks = vec![Vec::new(); g.n()];
    for (j, clique) in points.iter().enumerate() {
        for &v in clique {
            raw_blocks[v].push(j);
        }
    }
    if let Some(v) = raw_blocks.iter().position(|b| b.len() != q + 1) {
        return Err(bad(format!(
            "vertex {v} lies in {} cliques of size {size}, expected {}",
            raw_blocks[v].len(),
            q + 1
        )));
    }
    let structure = IncidenceStructure::new(points.len(), raw_blocks.clone(), None)
        .map_err(|e| bad(e.to_string()))?;
    if structure.validate_unital() != Some(q) {
        return Err(bad(format!(
            "rebuilt structure is not a unital of order {q}"
        )));
    }
    let index = structure.block_index_map();
    let block_of_vertex = raw_blocks.iter().map(|b| index[b.as_slice()]).collect();
    Ok(Reconstruction {
        q,
        points,
        structure,
        block_of_vertex,
        shortcut: false,
    })
}

/// Lifts an isomorphism `beta` between the confluence graphs of two unitals
/// of order `q > 2` to the point map `u ↦ u'` with `beta(pencil(u)) =
/// pencil(u')`.
pub fn extend_graph_isomorphism(
    beta: &[usize],
    s: &IncidenceStructure,
    s2: &IncidenceStructure,
) -> Result<Vec<usize>, ReconstructError> {
    let q = s
        .validate_unital()
        .ok_or_else(|| ReconstructError::NotAUnital("first argument".into()))?;
    let q2 = s2
        .validate_unital()
        .ok_or_else(|| ReconstructError::NotAUnital("second argument".into()))?;
    if q <= 2 {
        return Err(ReconstructError::OrderTooSmall(q));
    }
    if q != q2 {
        return Err(ReconstructError::NotAGraphIsomorphism);
    }
    let g = ConfluenceGraph::build(s);
    let g2 = ConfluenceGraph::build(s2);
    if !g.is_isomorphism(&g2, beta) {
        return Err(ReconstructError::NotAGraphIsomorphism);
    }
    let pencils2: HashMap<&[usize], usize> =
        (0..s2.num_points()).map(|p| (s2.pencil(p), p)).collect();
    let point_map = (0..s.num_points())
        .map(|u| {
            let mut image: Vec<usize> = s.pencil(u).iter().map(|&b| beta[b]).collect();
            image.sort_unstable();
            pencils2
                .get(image.as_slice())
                .copied()
                .ok_or(ReconstructError::PencilImageNotAPencil(u))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if !is_incidence_isomorphism(s, s2, &point_map, Some(beta)) {
        // beta(pencil) = pencil for every point already forces this
        return Err(ReconstructError::NotAGraphIsomorphism);
    }
    Ok(point_map)
}

/// Checks that `point_map` is a bijection carrying every block of `a` onto a
/// block of `b` (onto `block_map[i]` when given), with equal block counts.
pub fn is_incidence_isomorphism(
    a: &IncidenceStructure,
    b: &IncidenceStructure,
    point_map: &[usize],
    block_map: Option<&[usize]>,
) -> bool {
    let n = a.num_points();
    if b.num_points() != n || point_map.len() != n || a.num_blocks() != b.num_blocks() {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in point_map {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    let mut hit = vec![false; b.num_blocks()];
    for (i, block) in a.blocks().iter().enumerate() {
        let mut image: Vec<usize> = block.iter().map(|&p| point_map[p]).collect();
        image.sort_unstable();
        let Some(j) = b.find_block(&image) else {
            return false;
        };
        if block_map.is_some_and(|m| m.get(i) != Some(&j)) || std::mem::replace(&mut hit[j], true) {
            return false;
        }
    }
    true
}

struct IsoSearch<'a> {
    a: &'a IncidenceStructure,
    b: &'a IncidenceStructure,
    colour_a: Vec<usize>,
    colour_b: Vec<usize>,
    pair_a: Vec<u16>,
    pair_b: Vec<u16>,
    pencil_bits_b: Vec<FixedBitSet>,
    map: Vec<usize>,
    used: Vec<bool>,
}

fn pair_counts(s: &IncidenceStructure) -> Vec<u16> {
    let n = s.num_points();
    let mut m = vec![0u16; n * n];
    for block in s.blocks() {
        for &x in block {
            for &y in block {
                m[x * n + y] += 1;
            }
        }
    }
    m
}

/// Point colours from degree and the sizes of the blocks through the point,
/// refined once by the multiset of (pair count, colour) to other points.
fn colours(
    a: &IncidenceStructure,
    b: &IncidenceStructure,
    pa: &[u16],
    pb: &[u16],
) -> (Vec<usize>, Vec<usize>) {
    fn base(s: &IncidenceStructure) -> Vec<Vec<usize>> {
        (0..s.num_points())
            .map(|p| {
                let mut sizes: Vec<usize> = s.pencil(p).iter().map(|&x| s.block(x).len()).collect();
                sizes.sort_unstable();
                sizes
            })
            .collect()
    }
    fn intern<T: Ord + Clone>(xs: &[T], ys: &[T]) -> (Vec<usize>, Vec<usize>) {
        let mut keys: Vec<T> = xs.iter().chain(ys).cloned().collect();
        keys.sort();
        keys.dedup();
        let id = |x: &T| keys.binary_search(x).unwrap();
        (xs.iter().map(id).collect(), ys.iter().map(id).collect())
    }
    let (ca, cb) = intern(&base(a), &base(b));
    let refine =
        |s: &IncidenceStructure, pairs: &[u16], c: &[usize]| -> Vec<(usize, Vec<(u16, usize)>)> {
            let n = s.num_points();
            (0..n)
                .map(|p| {
                    let mut sig: Vec<(u16, usize)> = (0..n)
                        .filter(|&x| x != p)
                        .map(|x| (pairs[p * n + x], c[x]))
                        .collect();
                    sig.sort_unstable();
                    (c[p], sig)
                })
                .collect()
        };
    intern(&refine(a, pa, &ca), &refine(b, pb, &cb))
}

impl IsoSearch<'_> {
    fn consistent(&self, x: usize, y: usize) -> bool {
        let n = self.a.num_points();
        for (z, &w) in self.map.iter().enumerate() {
            if w != usize::MAX && self.pair_a[x * n + z] != self.pair_b[y * n + w] {
                return false;
            }
        }
        for &blk in self.a.pencil(x) {
            let block = self.a.block(blk);
            let mut common = self.pencil_bits_b[y].clone();
            let mut mapped = 1;
            for &z in block {
                if z != x && self.map[z] != usize::MAX {
                    common.intersect_with(&self.pencil_bits_b[self.map[z]]);
                    mapped += 1;
                }
            }
            if mapped >= 2 && !common.ones().any(|c| self.b.block(c).len() == block.len()) {
                return false;
            }
        }
        true
    }

    fn search(&mut self, x: usize) -> bool {
        let n = self.a.num_points();
        if x == n {
            return is_incidence_isomorphism(self.a, self.b, &self.map, None);
        }
        for y in 0..n {
            if self.used[y] || self.colour_b[y] != self.colour_a[x] || !self.consistent(x, y) {
                continue;
            }
            self.map[x] = y;
            self.used[y] = true;
            if self.search(x + 1) {
                return true;
            }
            self.map[x] = usize::MAX;
            self.used[y] = false;
        }
        false
    }
}

/// Searches for a point bijection carrying the blocks of `a` onto the blocks
/// of `b`. Points of `a` are mapped in index order, candidates tried in
/// index order, so `isomorphic(s, s)` finds the identity.
pub fn isomorphic(a: &IncidenceStructure, b: &IncidenceStructure) -> Option<Vec<usize>> {
    let n = a.num_points();
    if n != b.num_points() || a.num_blocks() != b.num_blocks() {
        return None;
    }
    let sizes = |s: &IncidenceStructure| {
        let mut v: Vec<usize> = s.blocks().iter().map(Vec::len).collect();
        v.sort_unstable();
        v
    };
    if sizes(a) != sizes(b) {
        return None;
    }
    let pair_a = pair_counts(a);
    let pair_b = pair_counts(b);
    let (colour_a, colour_b) = colours(a, b, &pair_a, &pair_b);
    let mut ca = colour_a.clone();
    let mut cb = colour_b.clone();
    ca.sort_unstable();
    cb.sort_unstable();
    if ca != cb {
        return None;
    }
    let pencil_bits_b = (0..n)
        .map(|p| {
            let mut bits = FixedBitSet::with_capacity(b.num_blocks());
            bits.extend(b.pencil(p).iter().copied());
            bits
        })
        .collect();
    let mut search = IsoSearch {
        a,
        b,
        colour_a,
        colour_b,
        pair_a,
        pair_b,
        pencil_bits_b,
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    search.search(0).then_some(search.map)
}

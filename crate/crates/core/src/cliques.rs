//! Maximal cliques of confluence graphs and their classification as
//! pencils, near pencils, or neither.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::confluence::ConfluenceGraph;
use crate::incidence::IncidenceStructure;

/// Vertex limit of [`naive_maximal_cliques`].
pub const NAIVE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliqueError {
    #[error("graph has {0} vertices; the naive enumerator handles at most {NAIVE_LIMIT}")]
    GraphTooLarge(usize),
    #[error("blocks {0} and {1} do not meet")]
    NotAClique(usize, usize),
    #[error("block {0} out of range")]
    UnknownBlock(usize),
    #[error("clique has {got} blocks, expected {expected}")]
    WrongCliqueSize { expected: usize, got: usize },
}

fn full_set(n: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert_range(..);
    s
}

/// Pivot: the candidate with the most neighbours among the candidates,
/// lowest index on ties.
fn choose_pivot(g: &ConfluenceGraph, p: &FixedBitSet) -> usize {
    let mut best = (0usize, usize::MAX);
    for u in p.ones() {
        let c = p.intersection_count(g.neighbors(u));
        if best.1 == usize::MAX || c > best.0 {
            best = (c, u);
        }
    }
    best.1
}

fn expand(
    g: &ConfluenceGraph,
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_clear() {
        if x.is_clear() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return;
    }
    let pivot = choose_pivot(g, &p);
    let branch: Vec<usize> = p.difference(g.neighbors(pivot)).collect();
    for v in branch {
        let mut np = p.clone();
        np.intersect_with(g.neighbors(v));
        let mut nx = x.clone();
        nx.intersect_with(g.neighbors(v));
        r.push(v);
        expand(g, r, np, nx, out);
        r.pop();
        p.remove(v);
        x.insert(v);
    }
}

/// Every inclusion-maximal clique exactly once, each sorted ascending, the
/// list sorted lexicographically.
///
/// Pivoted Bron–Kerbosch over bitsets. The top-level branches are
/// independent and run in parallel.
pub fn enumerate_maximal_cliques(g: &ConfluenceGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let p = full_set(n);
    if n == 0 {
        return vec![Vec::new()];
    }
    let pivot = choose_pivot(g, &p);
    let branch: Vec<usize> = p.difference(g.neighbors(pivot)).collect();
    let mut all: Vec<Vec<usize>> = branch
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &v)| {
            // state of P and X after the first i branches
            let mut pi = p.clone();
            let mut xi = FixedBitSet::with_capacity(n);
            for &done in &branch[..i] {
                pi.remove(done);
                xi.insert(done);
            }
            pi.intersect_with(g.neighbors(v));
            xi.intersect_with(g.neighbors(v));
            let mut out = Vec::new();
            expand(g, &mut vec![v], pi, xi, &mut out);
            out
        })
        .collect();
    all.sort();
    all
}

/// Greedy sequential colouring of `p`; returns vertices in colour order
/// with their colour numbers (1-based, non-decreasing).
fn colour_sort(g: &ConfluenceGraph, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
    let mut uncoloured = p.clone();
    let mut order = Vec::new();
    let mut colours = Vec::new();
    let mut colour = 0;
    while !uncoloured.is_clear() {
        colour += 1;
        let mut avail = uncoloured.clone();
        while let Some(v) = avail.minimum() {
            avail.remove(v);
            avail.difference_with(g.neighbors(v));
            uncoloured.remove(v);
            order.push(v);
            colours.push(colour);
        }
    }
    (order, colours)
}

fn max_search(g: &ConfluenceGraph, depth: usize, mut p: FixedBitSet, best: &mut usize) {
    let (order, colours) = colour_sort(g, &p);
    for i in (0..order.len()).rev() {
        if depth + colours[i] <= *best {
            return;
        }
        let v = order[i];
        let mut np = p.clone();
        np.intersect_with(g.neighbors(v));
        if np.is_clear() {
            *best = (*best).max(depth + 1);
        } else {
            max_search(g, depth + 1, np, best);
        }
        p.remove(v);
    }
}

/// Size of a largest clique (colouring branch-and-bound).
pub fn max_clique_size(g: &ConfluenceGraph) -> usize {
    let mut best = 0;
    if g.n() > 0 {
        max_search(g, 0, full_set(g.n()), &mut best);
    }
    best
}

/// Reference enumerator with no pivoting and no bitset machinery: subset
/// filtering for `n ≤ 24`, plain Bron–Kerbosch on `u64` masks above.
pub fn naive_maximal_cliques(g: &ConfluenceGraph) -> Result<Vec<Vec<usize>>, CliqueError> {
    let n = g.n();
    if n > NAIVE_LIMIT {
        return Err(CliqueError::GraphTooLarge(n));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&w| g.adjacent(v, w))
                .fold(0u64, |m, w| m | 1 << w)
        })
        .collect();
    let members = |mask: u64| -> Vec<usize> { (0..n).filter(|&v| mask >> v & 1 == 1).collect() };
    let mut out = Vec::new();
    if n <= 24 {
        for mask in 0u64..1 << n {
            let vs = members(mask);
            let is_clique = vs.iter().all(|&v| (mask & !(1 << v)) & !adj[v] == 0);
            if !is_clique {
                continue;
            }
            let extendable = (0..n).any(|w| mask >> w & 1 == 0 && adj[w] & mask == mask);
            if !extendable {
                out.push(vs);
            }
        }
    } else {
        fn bk(adj: &[u64], r: u64, p: u64, x: u64, out: &mut Vec<u64>) {
            if p == 0 && x == 0 {
                out.push(r);
                return;
            }
            let (mut p, mut x) = (p, x);
            while p != 0 {
                let v = p.trailing_zeros() as usize;
                bk(adj, r | 1 << v, p & adj[v], x & adj[v], out);
                p &= !(1 << v);
                x |= 1 << v;
            }
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut masks = Vec::new();
        bk(&adj, 0, all, 0, &mut masks);
        out = masks.into_iter().map(members).collect();
    }
    out.sort();
    Ok(out)
}

/// True if `clique` is a clique of `g` with no vertex outside adjacent to
/// all of it.
pub fn is_maximal_clique(g: &ConfluenceGraph, clique: &[usize]) -> bool {
    let pairwise = clique
        .iter()
        .enumerate()
        .all(|(i, &a)| clique[i + 1..].iter().all(|&b| g.adjacent(a, b)));
    pairwise
        && (0..g.n())
            .filter(|v| !clique.contains(v))
            .all(|v| !clique.iter().all(|&c| g.adjacent(v, c)))
}

/// How a set of mutually intersecting blocks sits in the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CliqueTag {
    /// All blocks through `point`, and nothing else.
    Pencil { point: usize },
    /// `line` plus the blocks joining `point` to each point of `line`.
    NearPencil { point: usize, line: usize },
    /// Neither; `sub_pencil` marks a proper subset of some pencil.
    Other { sub_pencil: bool },
}

impl CliqueTag {
    pub fn name(&self) -> &'static str {
        match self {
            CliqueTag::Pencil { .. } => "pencil",
            CliqueTag::NearPencil { .. } => "near_pencil",
            CliqueTag::Other { .. } => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueClassification {
    pub clique: Vec<usize>,
    pub tag: CliqueTag,
    pub size: usize,
}

fn common_points(s: &IncidenceStructure, blocks: &[usize]) -> Vec<usize> {
    let Some((&first, rest)) = blocks.split_first() else {
        return Vec::new();
    };
    s.block(first)
        .iter()
        .copied()
        .filter(|&p| rest.iter().all(|&b| s.incident(p, b)))
        .collect()
}

/// Tags `clique` as a full pencil, a near pencil, or other (in that order
/// of precedence).
pub fn classify_clique(
    s: &IncidenceStructure,
    clique: &[usize],
) -> Result<CliqueClassification, CliqueError> {
    let mut c = clique.to_vec();
    c.sort_unstable();
    c.dedup();
    if let Some(&b) = c.iter().find(|&&b| b >= s.num_blocks()) {
        return Err(CliqueError::UnknownBlock(b));
    }
    for (i, &a) in c.iter().enumerate() {
        if let Some(&b) = c[i + 1..].iter().find(|&&b| !s.blocks_meet(a, b)) {
            return Err(CliqueError::NotAClique(a, b));
        }
    }
    let size = c.len();
    let done = |tag| {
        Ok(CliqueClassification {
            clique: c.clone(),
            tag,
            size,
        })
    };
    let common = common_points(s, &c);
    if !common.is_empty() {
        return match common.iter().find(|&&p| s.pencil(p) == c.as_slice()) {
            Some(&point) => done(CliqueTag::Pencil { point }),
            None => done(CliqueTag::Other { sub_pencil: true }),
        };
    }
    for (i, &line) in c.iter().enumerate() {
        let rest: Vec<usize> = c
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &b)| b)
            .collect();
        for p in common_points(s, &rest) {
            if s.incident(p, line) {
                continue;
            }
            if s.near_pencil(p, line).map(|np| np == c).unwrap_or(false) {
                return done(CliqueTag::NearPencil { point: p, line });
            }
        }
    }
    done(CliqueTag::Other { sub_pencil: false })
}

/// Classifies every maximal clique of the confluence graph of `s`.
pub fn classify_all(s: &IncidenceStructure, g: &ConfluenceGraph) -> Vec<CliqueClassification> {
    enumerate_maximal_cliques(g)
        .par_iter()
        .map(|c| classify_clique(s, c).expect("maximal cliques of the confluence graph intersect"))
        .collect()
}

/// Outcome of checking that each block outside a `q²`-clique meets exactly
/// `q+1` of its members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarReport {
    pub pass: bool,
    pub expected: usize,
    /// members met -> number of outside blocks
    pub histogram: BTreeMap<usize, usize>,
    /// (outside block, members met) for every miss
    pub failures: Vec<(usize, usize)>,
}

pub fn verify_star_property(
    s: &IncidenceStructure,
    clique: &[usize],
    q: usize,
) -> Result<StarReport, CliqueError> {
    if clique.len() != q * q {
        return Err(CliqueError::WrongCliqueSize {
            expected: q * q,
            got: clique.len(),
        });
    }
    if let Some(&b) = clique.iter().find(|&&b| b >= s.num_blocks()) {
        return Err(CliqueError::UnknownBlock(b));
    }
    let mut inside = vec![false; s.num_blocks()];
    for &b in clique {
        inside[b] = true;
    }
    let mut histogram = BTreeMap::new();
    let mut failures = Vec::new();
    for b in (0..s.num_blocks()).filter(|&b| !inside[b]) {
        let met = clique.iter().filter(|&&c| s.blocks_meet(b, c)).count();
        *histogram.entry(met).or_insert(0) += 1;
        if met != q + 1 {
            failures.push((b, met));
        }
    }
    Ok(StarReport {
        pass: failures.is_empty(),
        expected: q + 1,
        histogram,
        failures,
    })
}

/// JSON report: one object per clique, sorted by size (descending) then
/// block list.
pub fn report_json(classified: &[CliqueClassification]) -> Value {
    let mut sorted: Vec<&CliqueClassification> = classified.iter().collect();
    sorted.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.clique.cmp(&b.clique)));
    Value::Array(
        sorted
            .into_iter()
            .map(|c| {
                let mut obj = json!({
                    "blocks": c.clique,
                    "size": c.size,
                    "tag": c.tag.name(),
                });
                match c.tag {
                    CliqueTag::Pencil { point } => {
                        obj["point"] = json!(point);
                    }
                    CliqueTag::NearPencil { point, line } => {
                        obj["point"] = json!(point);
                        obj["line"] = json!(line);
                    }
                    CliqueTag::Other { .. } => {}
                }
                obj
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{affine_plane, hermitian_unital};

    fn graph(n: usize, edges: &[(usize, usize)]) -> ConfluenceGraph {
        ConfluenceGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn triangle_and_square() {
        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(enumerate_maximal_cliques(&k3), vec![vec![0, 1, 2]]);
        assert_eq!(naive_maximal_cliques(&k3).unwrap(), vec![vec![0, 1, 2]]);
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let want = vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]];
        assert_eq!(enumerate_maximal_cliques(&c4), want);
        assert_eq!(naive_maximal_cliques(&c4).unwrap(), want);
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let e3 = ConfluenceGraph::empty(3);
        let want = vec![vec![0], vec![1], vec![2]];
        assert_eq!(enumerate_maximal_cliques(&e3), want);
        assert_eq!(naive_maximal_cliques(&e3).unwrap(), want);
    }

    #[test]
    fn naive_rejects_large_graphs() {
        assert_eq!(
            naive_maximal_cliques(&ConfluenceGraph::empty(65)),
            Err(CliqueError::GraphTooLarge(65))
        );
    }

    #[test]
    fn naive_paths_agree_above_subset_limit() {
        // 30 vertices forces the mask recursion path
        let edges: Vec<(usize, usize)> = (0..30)
            .flat_map(|i| (i + 1..30).map(move |j| (i, j)))
            .filter(|&(i, j)| (i * 7 + j * 3) % 5 < 3)
            .collect();
        let g = graph(30, &edges);
        assert_eq!(
            naive_maximal_cliques(&g).unwrap(),
            enumerate_maximal_cliques(&g)
        );
    }

    #[test]
    fn order_two_unital_has_many_q_squared_cliques() {
        let g = ConfluenceGraph::build(&affine_plane(3).unwrap());
        let cliques = enumerate_maximal_cliques(&g);
        assert_eq!(cliques, naive_maximal_cliques(&g).unwrap());
        assert_eq!(cliques.len(), 81);
        assert!(cliques.iter().all(|c| c.len() == 4));
        assert_eq!(max_clique_size(&g), 4);
    }

    #[test]
    fn max_clique_matches_enumeration() {
        let h3 = ConfluenceGraph::build(&hermitian_unital(3).unwrap());
        assert_eq!(max_clique_size(&h3), 9);
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert_eq!(max_clique_size(&c4), 2);
        assert_eq!(max_clique_size(&ConfluenceGraph::empty(0)), 0);
    }

    #[test]
    fn classification_in_hermitian_three() {
        let u = hermitian_unital(3).unwrap();
        let pencil = u.pencil(5).to_vec();
        let c = classify_clique(&u, &pencil).unwrap();
        assert_eq!(c.tag, CliqueTag::Pencil { point: 5 });
        assert_eq!(c.size, 9);

        let line = (0..u.num_blocks()).find(|&b| !u.incident(5, b)).unwrap();
        let np = u.near_pencil(5, line).unwrap();
        assert_eq!(np.len(), 5);
        let c = classify_clique(&u, &np).unwrap();
        assert_eq!(c.tag, CliqueTag::NearPencil { point: 5, line });

        let sub = classify_clique(&u, &pencil[..4]).unwrap();
        assert_eq!(sub.tag, CliqueTag::Other { sub_pencil: true });
    }

    #[test]
    fn triangle_classifies_as_other() {
        let u = hermitian_unital(3).unwrap();
        // brute-force search for three pairwise meeting blocks, not concurrent
        let n = u.num_blocks();
        let tri = (0..n)
            .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
            .find(|&[a, b, c]| {
                let (x, y, z) = (u.meet(a, b), u.meet(a, c), u.meet(b, c));
                x.is_some() && y.is_some() && z.is_some() && x != y && x != z && y != z
            })
            .unwrap();
        let c = classify_clique(&u, &tri).unwrap();
        assert_eq!(c.tag, CliqueTag::Other { sub_pencil: false });
    }

    #[test]
    fn classify_rejects_disjoint_blocks() {
        let u = hermitian_unital(3).unwrap();
        let b = (1..u.num_blocks()).find(|&b| !u.blocks_meet(0, b)).unwrap();
        assert_eq!(
            classify_clique(&u, &[0, b]),
            Err(CliqueError::NotAClique(0, b))
        );
    }

    #[test]
    fn star_property_on_pencils() {
        let u = hermitian_unital(3).unwrap();
        for p in [0, 13, 27] {
            let r = verify_star_property(&u, u.pencil(p), 3).unwrap();
            assert!(r.pass);
            assert_eq!(r.histogram, BTreeMap::from([(4, 63 - 9)]));
        }
        assert_eq!(
            verify_star_property(&u, &u.pencil(0)[..8], 3),
            Err(CliqueError::WrongCliqueSize {
                expected: 9,
                got: 8
            })
        );
    }

    #[test]
    fn report_is_sorted_by_size_then_blocks() {
        let u = hermitian_unital(3).unwrap();
        let line = (0..u.num_blocks()).find(|&b| !u.incident(0, b)).unwrap();
        let items = vec![
            classify_clique(&u, &u.near_pencil(0, line).unwrap()).unwrap(),
            classify_clique(&u, u.pencil(1)).unwrap(),
            classify_clique(&u, u.pencil(0)).unwrap(),
        ];
        let v = report_json(&items);
        let arr = v.as_array().unwrap();
        assert_eq!(arr[0]["size"], 9);
        assert_eq!(arr[2]["tag"], "near_pencil");
        assert_eq!(arr[2]["line"], line);
        assert!(
            arr[0]["blocks"].as_array().unwrap()[0].as_u64()
                <= arr[1]["blocks"].as_array().unwrap()[0].as_u64()
        );
        assert!(arr[0].get("line").is_none());
    }
}

//! Confluence (block intersection) graphs and their strongly regular
//! parameters.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::incidence::IncidenceStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfluenceError {
    #[error("smallest eigenvalue {0} is not negative")]
    NonNegativeSmallestEigenvalue(Eigenvalue),
    #[error("smallest eigenvalue {0} is irrational")]
    IrrationalEigenvalue(Eigenvalue),
    #[error("DIMACS line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
}

/// Simple undirected graph with one bitset adjacency row per vertex.
///
/// Built from an incidence structure, vertex `i` is block `i` and two
/// vertices are adjacent iff their blocks share a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluenceGraph {
    rows: Vec<FixedBitSet>,
    provenance: Option<String>,
}

impl ConfluenceGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        ConfluenceGraph {
            rows: vec![FixedBitSet::with_capacity(n); n],
            provenance: None,
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ConfluenceError> {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(ConfluenceError::InvalidEdge(a, b));
            }
            g.rows[a].insert(b);
            g.rows[b].insert(a);
        }
        Ok(g)
    }

    /// The confluence graph of `s`; vertex order is block order.
    pub fn build(s: &IncidenceStructure) -> Self {
        let mut g = Self::empty(s.num_blocks());
        for p in 0..s.num_points() {
            let pencil = s.pencil(p);
            for (i, &a) in pencil.iter().enumerate() {
                for &b in &pencil[i + 1..] {
                    g.rows[a].insert(b);
                    g.rows[b].insert(a);
                }
            }
        }
        g
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.ones().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// `Some(k)` if every vertex has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let k = self.rows.first().map(|r| r.count_ones(..)).unwrap_or(0);
        self.rows.iter().all(|r| r.count_ones(..) == k).then_some(k)
    }

    pub fn complement(&self) -> Self {
        let n = self.n();
        let rows = (0..n)
            .map(|i| {
                let mut r = self.rows[i].clone();
                r.toggle_range(..);
                r.set(i, false);
                r
            })
            .collect();
        ConfluenceGraph {
            rows,
            provenance: None,
        }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let edges = self.edges().map(|(a, b)| (perm[a], perm[b]));
        let mut g = Self::from_edges(self.n(), edges).expect("permutation keeps edges valid");
        g.provenance = self.provenance.clone();
        g
    }

    /// True if `beta` is a bijection `self → other` preserving adjacency and
    /// non-adjacency.
    pub fn is_isomorphism(&self, other: &ConfluenceGraph, beta: &[usize]) -> bool {
        let n = self.n();
        if other.n() != n || beta.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &x in beta {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return false;
            }
        }
        (0..n).all(|a| (a + 1..n).all(|b| self.adjacent(a, b) == other.adjacent(beta[a], beta[b])))
    }

    /// DIMACS text: optional `c` comment, `p edge n m`, then one `e i j`
    /// line per edge (1-based, `i < j`, lexicographic).
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.provenance {
            for line in p.lines() {
                out.push_str("c ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(&format!("p edge {} {}\n", self.n(), self.edge_count()));
        for (a, b) in self.edges() {
            out.push_str(&format!("e {} {}\n", a + 1, b + 1));
        }
        out
    }

    /// Parses DIMACS edge format. Comment lines become the provenance.
    /// Rejects self loops, repeated edges, out-of-range endpoints and an
    /// edge count that disagrees with the header.
    pub fn from_dimacs(text: &str) -> Result<Self, ConfluenceError> {
        let err = |line: usize, msg: &str| ConfluenceError::Dimacs {
            line,
            msg: msg.to_string(),
        };
        let mut comments = Vec::new();
        let mut graph: Option<(ConfluenceGraph, usize)> = None;
        let mut seen_edges = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("c") => comments.push(line[1..].trim_start().to_string()),
                Some("p") => {
                    if graph.is_some() {
                        return Err(err(lineno, "second problem line"));
                    }
                    if parts.next() != Some("edge") {
                        return Err(err(lineno, "expected `p edge <n> <m>`"));
                    }
                    let mut num = || -> Result<usize, ConfluenceError> {
                        parts
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err(lineno, "expected `p edge <n> <m>`"))
                    };
                    let n = num()?;
                    let m = num()?;
                    if parts.next().is_some() {
                        return Err(err(lineno, "trailing tokens"));
                    }
                    graph = Some((Self::empty(n), m));
                }
                Some("e") => {
                    let (g, _) = graph
                        .as_mut()
                        .ok_or_else(|| err(lineno, "edge before problem line"))?;
                    let ends: Vec<usize> = parts
                        .map(|t| t.parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| err(lineno, "bad edge endpoint"))?;
                    let [a, b] = ends[..] else {
                        return Err(err(lineno, "expected `e <i> <j>`"));
                    };
                    let n = g.n();
                    if a == 0 || b == 0 || a > n || b > n || a == b {
                        return Err(err(lineno, "edge endpoint out of range"));
                    }
                    let (a, b) = (a - 1, b - 1);
                    if g.rows[a].contains(b) {
                        return Err(err(lineno, "repeated edge"));
                    }
                    g.rows[a].insert(b);
                    g.rows[b].insert(a);
                    seen_edges += 1;
                }
                _ => return Err(err(lineno, "unrecognized line")),
            }
        }
        let (mut g, m) = graph.ok_or_else(|| err(0, "missing problem line"))?;
        if m != seen_edges {
            return Err(err(0, "edge count differs from header"));
        }
        if !comments.is_empty() {
            g.provenance = Some(comments.join("\n"));
        }
        Ok(g)
    }
}

/// An eigenvalue `(b ± √disc)/2` of a strongly regular graph, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Eigenvalue {
    Integer(i64),
    Irrational { b: i64, disc: i64, sign: i8 },
}

impl Eigenvalue {
    pub fn as_integer(&self) -> Option<i64> {
        match *self {
            Eigenvalue::Integer(x) => Some(x),
            Eigenvalue::Irrational { .. } => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Eigenvalue::Integer(x) => x as f64,
            Eigenvalue::Irrational { b, disc, sign } => {
                (b as f64 + sign as f64 * (disc as f64).sqrt()) / 2.0
            }
        }
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Eigenvalue::Integer(x) => write!(f, "{x}"),
            Eigenvalue::Irrational { b, disc, sign } => {
                let op = if sign > 0 { '+' } else { '-' };
                write!(f, "({b}{op}√{disc})/2")
            }
        }
    }
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Roots of `x² − (λ−μ)x − (k−μ)`, larger first.
fn srg_eigenvalues(k: i64, lambda: i64, mu: i64) -> (Eigenvalue, Eigenvalue) {
    let b = lambda - mu;
    let disc = b * b + 4 * (k - mu);
    match isqrt(disc) {
        // b and √disc have equal parity, so the halves are integral
        Some(root) => (
            Eigenvalue::Integer((b + root) / 2),
            Eigenvalue::Integer((b - root) / 2),
        ),
        None => (
            Eigenvalue::Irrational { b, disc, sign: 1 },
            Eigenvalue::Irrational { b, disc, sign: -1 },
        ),
    }
}

/// Standard parameters `(v, k, λ, μ)` and non-principal eigenvalues `r ≥ s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub v: i64,
    pub k: i64,
    pub lambda: i64,
    pub mu: i64,
    pub r: Eigenvalue,
    pub s: Eigenvalue,
}

impl SrgParams {
    /// Parameters with eigenvalues derived from the SRG quadratic.
    pub fn new(v: i64, k: i64, lambda: i64, mu: i64) -> Self {
        let (r, s) = srg_eigenvalues(k, lambda, mu);
        SrgParams {
            v,
            k,
            lambda,
            mu,
            r,
            s,
        }
    }

    /// `k(k − λ − 1) = (v − k − 1)μ`.
    pub fn is_feasible(&self) -> bool {
        self.k * (self.k - self.lambda - 1) == (self.v - self.k - 1) * self.mu
    }
}

impl fmt::Display for SrgParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}) r={} s={}",
            self.v, self.k, self.lambda, self.mu, self.r, self.s
        )
    }
}

/// Checks strong regularity by verifying every vertex pair.
///
/// Returns `None` for graphs with fewer than two vertices, complete or
/// edgeless graphs, irregular graphs, or inconsistent λ/μ counts.
pub fn srg_check(g: &ConfluenceGraph) -> Option<SrgParams> {
    let n = g.n();
    if n < 2 {
        return None;
    }
    let k = g.regular_degree()?;
    if k == 0 || k == n - 1 {
        return None;
    }
    let common = |a: usize, b: usize| g.neighbors(a).intersection_count(g.neighbors(b));
    let first = |adj: bool| -> Option<usize> {
        (0..n).find_map(|a| {
            (a + 1..n)
                .find(|&b| g.adjacent(a, b) == adj)
                .map(|b| common(a, b))
        })
    };
    let lambda = first(true)?;
    let mu = first(false)?;
    let consistent = (0..n).into_par_iter().all(|a| {
        (a + 1..n).all(|b| {
            let want = if g.adjacent(a, b) { lambda } else { mu };
            common(a, b) == want
        })
    });
    consistent.then(|| SrgParams::new(n as i64, k as i64, lambda as i64, mu as i64))
}

/// Parameters of the confluence graph of any unital of order `q`:
/// `v = q²(q²−q+1)`, `k = (q+1)²(q−1)`, `μ = (q+1)²`, `r = q²−q−2`,
/// `s = −q−1`, with `λ = μ + r + s = 2q² − 2`.
pub fn expected_unital_params(q: i64) -> SrgParams {
    let v = q * q * (q * q - q + 1);
    let k = (q + 1) * (q + 1) * (q - 1);
    let mu = (q + 1) * (q + 1);
    let r = q * q - q - 2;
    let s = -q - 1;
    let lambda = mu + r + s;
    let params = SrgParams::new(v, k, lambda, mu);
    debug_assert_eq!(params.r, Eigenvalue::Integer(r));
    debug_assert_eq!(params.s, Eigenvalue::Integer(s));
    params
}

/// Clique bound `1 + k/(−s)`, exact.
pub fn hoffman_bound(params: &SrgParams) -> Result<Ratio<i64>, ConfluenceError> {
    let s = match params.s {
        Eigenvalue::Integer(s) => s,
        e @ Eigenvalue::Irrational { .. } => {
            return Err(if e.to_f64() >= 0.0 {
                ConfluenceError::NonNegativeSmallestEigenvalue(e)
            } else {
                ConfluenceError::IrrationalEigenvalue(e)
            })
        }
    };
    if s >= 0 {
        return Err(ConfluenceError::NonNegativeSmallestEigenvalue(params.s));
    }
    Ok(Ratio::from_integer(1) + Ratio::new(params.k, -s))
}

/// The order `q ≥ 2` of a unital whose confluence graph could be `g`,
/// judged by vertex count and regular degree alone.
pub fn infer_order(g: &ConfluenceGraph) -> Option<usize> {
    let n = g.n();
    let q = (2usize..)
        .take_while(|&q| q * q * (q * q - q + 1) <= n)
        .find(|&q| q * q * (q * q - q + 1) == n)?;
    (g.regular_degree()? == (q + 1) * (q + 1) * (q - 1)).then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{affine_plane, hermitian_unital, projective_plane};

    fn naive(s: &IncidenceStructure) -> ConfluenceGraph {
        let n = s.num_blocks();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if s.block(a).iter().any(|p| s.block(b).contains(p)) {
                    edges.push((a, b));
                }
            }
        }
        ConfluenceGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn build_matches_pairwise_intersection() {
        for s in [
            projective_plane(3).unwrap(),
            affine_plane(4).unwrap(),
            hermitian_unital(2).unwrap(),
            hermitian_unital(3).unwrap(),
            projective_plane(5)
                .unwrap()
                .puncture(&[0, 1, 2, 7])
                .unwrap(),
        ] {
            assert_eq!(ConfluenceGraph::build(&s), naive(&s));
        }
    }

    #[test]
    fn order_two_unital_graph_is_complete_multipartite() {
        let g = ConfluenceGraph::build(&affine_plane(3).unwrap());
        assert_eq!(g.n(), 12);
        assert_eq!(g.regular_degree(), Some(9));
        let c = g.complement();
        assert_eq!(c.regular_degree(), Some(2));
        // complement is a disjoint union of triangles
        for v in 0..12 {
            for w in c.neighbors(v).ones() {
                assert_eq!(c.neighbors(v).intersection_count(c.neighbors(w)), 1);
            }
        }
    }

    #[test]
    fn single_block_graph() {
        let s = IncidenceStructure::new(2, vec![vec![0, 1]], None).unwrap();
        let g = ConfluenceGraph::build(&s);
        assert_eq!((g.n(), g.edge_count()), (1, 0));
    }

    #[test]
    fn srg_of_hermitian_three() {
        let g = ConfluenceGraph::build(&hermitian_unital(3).unwrap());
        assert_eq!(g.regular_degree(), Some(32));
        let p = srg_check(&g).unwrap();
        assert_eq!((p.v, p.k, p.lambda, p.mu), (63, 32, 16, 16));
        assert_eq!(
            (p.r, p.s),
            (Eigenvalue::Integer(4), Eigenvalue::Integer(-4))
        );
        assert!(p.is_feasible());
    }

    #[test]
    fn srg_rejects_non_srg() {
        let path = ConfluenceGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(srg_check(&path), None);
        let k3 = ConfluenceGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(srg_check(&k3), None);
        assert_eq!(srg_check(&ConfluenceGraph::empty(4)), None);
    }

    #[test]
    fn pentagon_has_irrational_eigenvalues() {
        let c5 = ConfluenceGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let p = srg_check(&c5).unwrap();
        assert_eq!((p.v, p.k, p.lambda, p.mu), (5, 2, 0, 1));
        assert!((p.r.to_f64() - 0.618_033_988_75).abs() < 1e-9);
        assert!(matches!(
            hoffman_bound(&p),
            Err(ConfluenceError::IrrationalEigenvalue(_))
        ));
    }

    #[test]
    fn expected_params_table() {
        let check = |q, v, k, mu, r, s| {
            let p = expected_unital_params(q);
            assert_eq!((p.v, p.k, p.mu), (v, k, mu));
            assert_eq!(p.r, Eigenvalue::Integer(r));
            assert_eq!(p.s, Eigenvalue::Integer(s));
            assert_eq!(p.lambda, 2 * q * q - 2);
            assert!(p.is_feasible());
        };
        check(3, 63, 32, 16, 4, -4);
        check(2, 12, 9, 9, 0, -3);
        check(4, 208, 75, 25, 10, -5);
    }

    #[test]
    fn hoffman_bound_is_q_squared() {
        for q in 2..=10 {
            let b = hoffman_bound(&expected_unital_params(q)).unwrap();
            assert_eq!(b, Ratio::from_integer(q * q));
        }
        let bad = SrgParams {
            s: Eigenvalue::Integer(0),
            ..expected_unital_params(3)
        };
        assert!(matches!(
            hoffman_bound(&bad),
            Err(ConfluenceError::NonNegativeSmallestEigenvalue(_))
        ));
    }

    #[test]
    fn order_inference() {
        let g3 = ConfluenceGraph::build(&hermitian_unital(3).unwrap());
        assert_eq!(infer_order(&g3), Some(3));
        let g2 = ConfluenceGraph::build(&affine_plane(3).unwrap());
        assert_eq!(infer_order(&g2), Some(2));
        assert_eq!(infer_order(&ConfluenceGraph::empty(50)), None);
        // right size, wrong degree
        assert_eq!(infer_order(&ConfluenceGraph::empty(63)), None);
    }

    #[test]
    fn dimacs_round_trip_and_errors() {
        let g =
            ConfluenceGraph::build(&hermitian_unital(2).unwrap()).with_provenance("hermitian q=2");
        let text = g.to_dimacs();
        assert!(text.starts_with("c hermitian q=2\np edge 12 54\ne 1 2\n"));
        let back = ConfluenceGraph::from_dimacs(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_dimacs(), text);
        for bad in [
            "e 1 2\n",
            "p edge 3 1\ne 1 1\n",
            "p edge 3 1\ne 1 4\n",
            "p edge 3 2\ne 1 2\ne 2 1\n",
            "p edge 3 2\ne 1 2\n",
            "p col 3 0\n",
            "x\n",
        ] {
            assert!(ConfluenceGraph::from_dimacs(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn isomorphism_check() {
        let g = ConfluenceGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let perm = [3, 2, 1, 0];
        assert!(g.is_isomorphism(&g.permute(&perm), &perm));
        assert!(g.is_isomorphism(&g, &perm));
        assert!(!g.is_isomorphism(&g, &[1, 0, 2, 3]));
        assert!(!g.is_isomorphism(&g, &[0, 0, 2, 3]));
    }
}

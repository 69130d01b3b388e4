//! Finite incidence structures: planes, unitals, and the linear spaces
//! obtained from them by deleting points.
//!
//! An [`IncidenceStructure`] is a point count plus a list of blocks, each
//! block a strictly increasing list of point indices. Block lists are kept
//! in lexicographic order without duplicates, so two structures built from
//! the same data compare equal and serialize identically.

mod construct;
mod onan;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::FieldError;

pub use construct::{
    affine_plane, conic_points, hermitian_unital, projective_plane, ProjectivePlane,
};
pub use onan::{find_onan, OnanConfiguration};

/// Format tag of the JSON incidence format.
pub const INCIDENCE_FORMAT: &str = "incidence-v1";

const NO_BLOCK: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error("malformed structure: {0}")]
    MalformedStructure(String),
    #[error("invalid point set: {0}")]
    InvalidPointSet(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("order {q} outside the supported range (at most {max})")]
    OrderOutOfRange { q: u32, max: u32 },
    #[error("point {0} lies on fewer than two blocks")]
    DegeneratePoint(usize),
    #[error("point {point} is incident with block {block}")]
    IncidentPair { point: usize, block: usize },
    #[error("internal consistency check failed: {0}")]
    InternalCheckFailed(String),
    #[error("invalid incidence JSON: {0}")]
    Format(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Points `0..num_points` and a set of blocks (lines).
#[derive(Debug, Clone)]
pub struct IncidenceStructure {
    num_points: usize,
    blocks: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
    pencils: Vec<Vec<usize>>,
    joins: OnceLock<Vec<u32>>,
}

impl PartialEq for IncidenceStructure {
    fn eq(&self, other: &Self) -> bool {
        self.num_points == other.num_points
            && self.blocks == other.blocks
            && self.labels == other.labels
    }
}

impl Eq for IncidenceStructure {}

/// Summary of the pair and degree statistics of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignReport {
    /// Every pair of points lies on at most one block.
    pub is_partial_linear: bool,
    /// Every pair of points lies on exactly one block.
    pub is_linear_space: bool,
    /// number of blocks through a pair -> number of such pairs
    pub pair_coverage: BTreeMap<usize, usize>,
    /// pencil size -> number of points
    pub point_degrees: BTreeMap<usize, usize>,
    /// block size -> number of blocks
    pub block_sizes: BTreeMap<usize, usize>,
}

impl IncidenceStructure {
    /// Builds a structure, sorting each block and the block list.
    ///
    /// Rejects out-of-range indices, blocks with fewer than two points,
    /// repeated points within a block, repeated blocks, and label vectors of
    /// the wrong length.
    pub fn new(
        num_points: usize,
        blocks: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, IncidenceError> {
        let mut blocks = blocks;
        for block in blocks.iter_mut() {
            block.sort_unstable();
        }
        blocks.sort();
        Self::from_sorted(num_points, blocks, labels)
    }

    fn from_sorted(
        num_points: usize,
        blocks: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, IncidenceError> {
        let malformed = |msg: String| Err(IncidenceError::MalformedStructure(msg));
        if num_points > u32::MAX as usize / 2 {
            return malformed(format!("{num_points} points is too many"));
        }
        if let Some(l) = &labels {
            if l.len() != num_points {
                return malformed(format!("{} labels for {num_points} points", l.len()));
            }
        }
        for (i, block) in blocks.iter().enumerate() {
            if block.len() < 2 {
                return malformed(format!("block {i} has fewer than two points"));
            }
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return malformed(format!("block {i} is not strictly increasing"));
            }
            if block[block.len() - 1] >= num_points {
                return malformed(format!("block {i} references a point out of range"));
            }
        }
        if let Some(i) = blocks.windows(2).position(|w| w[0] >= w[1]) {
            return malformed(format!(
                "blocks {i} and {} are duplicated or out of order",
                i + 1
            ));
        }
        let mut pencils = vec![Vec::new(); num_points];
        for (b, block) in blocks.iter().enumerate() {
            for &p in block {
                pencils[p].push(b);
            }
        }
        Ok(IncidenceStructure {
            num_points,
            blocks,
            labels,
            pencils,
            joins: OnceLock::new(),
        })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Human-readable name of a point: its label if present, else its index.
    pub fn point_name(&self, p: usize) -> String {
        match &self.labels {
            Some(l) => l[p].clone(),
            None => p.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> Result<Self, IncidenceError> {
        if let Some(l) = &labels {
            if l.len() != self.num_points {
                return Err(IncidenceError::MalformedStructure(format!(
                    "{} labels for {} points",
                    l.len(),
                    self.num_points
                )));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// The pencil of `p`: indices of all blocks through `p`, ascending.
    pub fn pencil(&self, p: usize) -> &[usize] {
        &self.pencils[p]
    }

    pub fn point_degree(&self, p: usize) -> usize {
        self.pencils[p].len()
    }

    pub fn incident(&self, p: usize, b: usize) -> bool {
        self.blocks[b].binary_search(&p).is_ok()
    }

    /// First point common to blocks `a` and `b`.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let (x, y) = (&self.blocks[a], &self.blocks[b]);
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(x[i]),
            }
        }
        None
    }

    pub fn blocks_meet(&self, a: usize, b: usize) -> bool {
        self.meet(a, b).is_some()
    }

    fn join_table(&self) -> &[u32] {
        self.joins.get_or_init(|| {
            let n = self.num_points;
            let mut table = vec![NO_BLOCK; n * n];
            for (b, block) in self.blocks.iter().enumerate() {
                for (i, &x) in block.iter().enumerate() {
                    for &y in &block[i + 1..] {
                        if table[x * n + y] == NO_BLOCK {
                            table[x * n + y] = b as u32;
                            table[y * n + x] = b as u32;
                        }
                    }
                }
            }
            table
        })
    }

    /// The (first) block containing both `a` and `b`, for `a != b`.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        let v = self.join_table()[a * self.num_points + b];
        (v != NO_BLOCK).then_some(v as usize)
    }

    /// Exhaustive pair scan producing the flags and histograms.
    pub fn validate(&self) -> DesignReport {
        let n = self.num_points;
        let mut cover = vec![0u32; n * n];
        for block in &self.blocks {
            for (i, &x) in block.iter().enumerate() {
                for &y in &block[i + 1..] {
                    cover[x * n + y] += 1;
                }
            }
        }
        let mut pair_coverage = BTreeMap::new();
        for x in 0..n {
            for y in x + 1..n {
                *pair_coverage.entry(cover[x * n + y] as usize).or_insert(0) += 1;
            }
        }
        let is_partial_linear = pair_coverage.keys().all(|&c| c <= 1);
        let is_linear_space = pair_coverage.keys().all(|&c| c == 1);
        let mut point_degrees = BTreeMap::new();
        for pencil in &self.pencils {
            *point_degrees.entry(pencil.len()).or_insert(0) += 1;
        }
        let mut block_sizes = BTreeMap::new();
        for block in &self.blocks {
            *block_sizes.entry(block.len()).or_insert(0) += 1;
        }
        DesignReport {
            is_partial_linear,
            is_linear_space,
            pair_coverage,
            point_degrees,
            block_sizes,
        }
    }

    /// Returns `q` if this is a unital of order `q > 1`: a linear space on
    /// `q³+1` points with `q²(q²−q+1)` blocks, all of size `q+1`, and every
    /// point on `q²` blocks.
    pub fn validate_unital(&self) -> Option<usize> {
        let first = self.blocks.first()?;
        let q = first.len() - 1;
        if q < 2 || self.num_points != q * q * q + 1 {
            return None;
        }
        if self.num_blocks() != q * q * (q * q - q + 1) {
            return None;
        }
        if self.blocks.iter().any(|b| b.len() != q + 1) {
            return None;
        }
        if self.pencils.iter().any(|p| p.len() != q * q) {
            return None;
        }
        self.validate().is_linear_space.then_some(q)
    }

    /// Deletes `deleted` and restricts every block to the survivors.
    ///
    /// Survivors are renumbered in increasing order; each keeps its old
    /// label, or gets its old index as label when there were none. Restricted
    /// blocks with fewer than two points are dropped and coinciding
    /// restrictions are merged.
    pub fn puncture(&self, deleted: &[usize]) -> Result<Self, IncidenceError> {
        let mut gone = vec![false; self.num_points];
        for &p in deleted {
            if p >= self.num_points {
                return Err(IncidenceError::InvalidPointSet(format!(
                    "point {p} out of range"
                )));
            }
            if gone[p] {
                return Err(IncidenceError::InvalidPointSet(format!(
                    "point {p} listed twice"
                )));
            }
            gone[p] = true;
        }
        let mut new_index = vec![usize::MAX; self.num_points];
        let mut labels = Vec::new();
        for p in (0..self.num_points).filter(|&p| !gone[p]) {
            new_index[p] = labels.len();
            labels.push(self.point_name(p));
        }
        let blocks: BTreeSet<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .filter(|&&p| !gone[p])
                    .map(|&p| new_index[p])
                    .collect::<Vec<_>>()
            })
            .filter(|b| b.len() >= 2)
            .collect();
        Self::from_sorted(labels.len(), blocks.into_iter().collect(), Some(labels))
    }

    /// Swaps the roles of points and blocks. Point `i` of the dual is block
    /// `i` of `self`; dual block `p` is the pencil of point `p`.
    pub fn dual(&self) -> Result<Self, IncidenceError> {
        if let Some(p) = (0..self.num_points).find(|&p| self.pencils[p].len() < 2) {
            return Err(IncidenceError::DegeneratePoint(p));
        }
        Self::new(self.num_blocks(), self.pencils.clone(), None)
    }

    /// The near pencil of a non-incident pair `(p, L)`: `L` together with the
    /// blocks joining `p` to the points of `L`. Points of `L` not joined to
    /// `p` (possible in a partial linear space) contribute nothing.
    pub fn near_pencil(&self, p: usize, line: usize) -> Result<Vec<usize>, IncidenceError> {
        if self.incident(p, line) {
            return Err(IncidenceError::IncidentPair {
                point: p,
                block: line,
            });
        }
        let mut out: Vec<usize> = self.blocks[line]
            .iter()
            .filter_map(|&x| self.join(p, x))
            .collect();
        out.push(line);
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Applies the point relabeling `p ↦ perm[p]`.
    pub fn permute_points(&self, perm: &[usize]) -> Result<Self, IncidenceError> {
        if perm.len() != self.num_points {
            return Err(IncidenceError::InvalidPointSet(
                "permutation has the wrong length".into(),
            ));
        }
        let mut seen = vec![false; perm.len()];
        for &x in perm {
            if x >= perm.len() || std::mem::replace(&mut seen[x], true) {
                return Err(IncidenceError::InvalidPointSet("not a permutation".into()));
            }
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| perm[p]).collect())
            .collect();
        let labels = self.labels.as_ref().map(|l| {
            let mut out = vec![String::new(); l.len()];
            for (p, name) in l.iter().enumerate() {
                out[perm[p]] = name.clone();
            }
            out
        });
        Self::new(self.num_points, blocks, labels)
    }

    /// Index of the block with exactly these (sorted) points.
    pub fn find_block(&self, points: &[usize]) -> Option<usize> {
        self.blocks
            .binary_search_by(|b| b.as_slice().cmp(points))
            .ok()
    }

    /// Lookup from block contents to block index.
    pub fn block_index_map(&self) -> HashMap<&[usize], usize> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (b.as_slice(), i))
            .collect()
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(IncidenceV1 {
            format: INCIDENCE_FORMAT.to_string(),
            num_points: self.num_points,
            blocks: self.blocks.clone(),
            labels: self.labels.clone(),
        })
        .expect("incidence data always serializes")
    }

    /// JSON text in the incidence-v1 format, one block per line.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{{\"format\":\"{INCIDENCE_FORMAT}\",\"num_points\":{},\"blocks\":[",
            self.num_points
        ));
        for (i, b) in self.blocks.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            out.push_str(&serde_json::to_string(b).expect("serializable"));
        }
        out.push_str("\n]");
        if let Some(l) = &self.labels {
            out.push_str(",\"labels\":");
            out.push_str(&serde_json::to_string(l).expect("serializable"));
        }
        out.push_str("}\n");
        out
    }

    /// Strict reader: sorting and bounds invariants are checked, never
    /// repaired.
    pub fn from_json_value(value: Value) -> Result<Self, IncidenceError> {
        let raw: IncidenceV1 =
            serde_json::from_value(value).map_err(|e| IncidenceError::Format(e.to_string()))?;
        if raw.format != INCIDENCE_FORMAT {
            return Err(IncidenceError::Format(format!(
                "unexpected format tag {:?}",
                raw.format
            )));
        }
        Self::from_sorted(raw.num_points, raw.blocks, raw.labels)
            .map_err(|e| IncidenceError::Format(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self, IncidenceError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| IncidenceError::Format(e.to_string()))?;
        Self::from_json_value(value)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IncidenceV1 {
    format: String,
    num_points: usize,
    blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

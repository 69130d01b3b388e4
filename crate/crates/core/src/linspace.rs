//! Linear spaces on `q²` points with at most `q+1` lines per point and at
//! most `q+1` points per line.
//!
//! Every such space with `q ≥ 3` is a projective plane of order `q` with
//! `q+1` points removed. [`classify`] decides which of the three shapes
//! occurs and produces an explicit [`EmbeddingWitness`] into a projective
//! plane:
//!
//! - no line has `q+1` points: an affine plane, completed by adding its
//!   parallel classes as points at infinity;
//! - some point lies on only `q` lines: rebuilt through an auxiliary affine
//!   plane in which that point is traded for a new one;
//! - otherwise every point has `q+1` lines, and the space is embedded into
//!   PG(2,q) by backtracking search (`q ≤ 4`).

use serde_json::{json, Value};
use thiserror::Error;

use crate::incidence::{IncidenceStructure, ProjectivePlane};

/// Largest `q` for which [`embed_full_pencils`] searches.
pub const MAX_SEARCH_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinSpaceError {
    #[error("q = {0} is too small; the classification needs q ≥ 3")]
    QTooSmall(usize),
    #[error("standing assumptions violated: {0:?}")]
    AssumptionViolation(Vec<Violation>),
    #[error("lemma violated: {0}")]
    LemmaViolation(String),
    #[error("not an affine plane: {0}")]
    NotAffinePlane(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("no embedding into PG(2,{0}) found")]
    NoEmbeddingFound(usize),
    #[error("embedding search is limited to q ≤ {MAX_SEARCH_ORDER}, got {0}")]
    QTooLargeForSearch(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not in scope: {0}")]
    NotInScope(String),
}

/// One failed standing assumption, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Violation {
    PointCount { expected: usize, actual: usize },
    PencilTooLarge { point: usize, size: usize },
    LineTooLarge { line: usize, size: usize },
    NotLinearSpace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionReport {
    pub q: usize,
    pub violations: Vec<Violation>,
}

impl AssumptionReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|D| = q²`, pencils of size ≤ `q+1`, lines of size ≤ `q+1`, and
/// that `d` is a linear space.
pub fn check_assumptions(d: &IncidenceStructure, q: usize) -> AssumptionReport {
    let mut violations = Vec::new();
    if !d.validate().is_linear_space {
        violations.push(Violation::NotLinearSpace);
    }
    if d.num_points() != q * q {
        violations.push(Violation::PointCount {
            expected: q * q,
            actual: d.num_points(),
        });
    }
    for p in 0..d.num_points() {
        if d.point_degree(p) > q + 1 {
            violations.push(Violation::PencilTooLarge {
                point: p,
                size: d.point_degree(p),
            });
        }
    }
    for (line, b) in d.blocks().iter().enumerate() {
        if b.len() > q + 1 {
            violations.push(Violation::LineTooLarge {
                line,
                size: b.len(),
            });
        }
    }
    AssumptionReport { q, violations }
}

/// Lines with `q+1` points. Each must meet every other line; a line that
/// misses one is reported as a hard error.
pub fn projective_lines(d: &IncidenceStructure, q: usize) -> Result<Vec<usize>, LinSpaceError> {
    let lines: Vec<usize> = (0..d.num_blocks())
        .filter(|&b| d.block(b).len() == q + 1)
        .collect();
    for &l in &lines {
        if let Some(x) = (0..d.num_blocks()).find(|&x| !d.blocks_meet(l, x)) {
            return Err(LinSpaceError::LemmaViolation(format!(
                "line {l} has {} points but misses line {x}",
                q + 1
            )));
        }
    }
    Ok(lines)
}

/// Points on at most `q` lines. There is at most one; if present it lies
/// on exactly `q` lines, exactly one of which has `q` points while the
/// rest have `q+1`.
pub fn thin_points(d: &IncidenceStructure, q: usize) -> Result<Vec<usize>, LinSpaceError> {
    let thin: Vec<usize> = (0..d.num_points())
        .filter(|&p| d.point_degree(p) <= q)
        .collect();
    if thin.len() > 1 {
        return Err(LinSpaceError::LemmaViolation(format!(
            "{} points with at most {q} lines: {thin:?}",
            thin.len()
        )));
    }
    if let Some(&u) = thin.first() {
        let pencil = d.pencil(u);
        if pencil.len() != q {
            return Err(LinSpaceError::LemmaViolation(format!(
                "thin point {u} lies on {} lines, expected {q}",
                pencil.len()
            )));
        }
        let short = pencil.iter().filter(|&&b| d.block(b).len() == q).count();
        let full = pencil
            .iter()
            .filter(|&&b| d.block(b).len() == q + 1)
            .count();
        if short != 1 || full != q - 1 {
            return Err(LinSpaceError::LemmaViolation(format!(
                "thin point {u}: {short} lines of size {q} and {full} of size {}",
                q + 1
            )));
        }
    }
    Ok(thin)
}

/// Which of the three shapes a space takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LinSpaceCase {
    AffinePlane,
    /// `u` lies on `q` lines; `line` is the one with `q` points.
    ThinPoint {
        u: usize,
        line: usize,
    },
    FullPencils,
}

impl LinSpaceCase {
    pub fn name(&self) -> &'static str {
        match self {
            LinSpaceCase::AffinePlane => "affine_plane",
            LinSpaceCase::ThinPoint { .. } => "thin_point",
            LinSpaceCase::FullPencils => "full_pencils",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinSpaceClass {
    pub q: usize,
    pub case: LinSpaceCase,
    pub line_count: usize,
    pub projective_lines: Vec<usize>,
    pub embedding: Option<EmbeddingWitness>,
}

impl LinSpaceClass {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "q": self.q,
            "case": self.case.name(),
            "line_count": self.line_count,
            "projective_lines": self.projective_lines,
        });
        if let LinSpaceCase::ThinPoint { u, line } = self.case {
            v["thin_point"] = json!(u);
            v["thin_line"] = json!(line);
        }
        if let Some(w) = &self.embedding {
            v["embedding"] = w.to_json();
        }
        v
    }
}

/// An injection of a linear space into a projective plane carrying lines
/// into lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub host: IncidenceStructure,
    /// space point -> host point
    pub point_map: Vec<usize>,
    /// Host points outside the image, ascending.
    pub deleted: Vec<usize>,
}

impl EmbeddingWitness {
    fn from_map(host: IncidenceStructure, point_map: Vec<usize>) -> Self {
        let mut hit = vec![false; host.num_points()];
        for &x in &point_map {
            hit[x] = true;
        }
        let deleted = (0..host.num_points()).filter(|&x| !hit[x]).collect();
        EmbeddingWitness {
            host,
            point_map,
            deleted,
        }
    }

    /// Checks the witness against `d` from scratch: the host is a projective
    /// plane of order `q`, the map is injective, `deleted` is the complement
    /// of the image with `q+1` points, and distinct lines of `d` land inside
    /// distinct host lines.
    pub fn verify(&self, d: &IncidenceStructure, q: usize) -> Result<(), String> {
        let host = &self.host;
        let n = q * q + q + 1;
        if host.num_points() != n || host.num_blocks() != n {
            return Err(format!("host is not of order {q}"));
        }
        if host.blocks().iter().any(|b| b.len() != q + 1) || !host.validate().is_linear_space {
            return Err("host is not a projective plane".into());
        }
        if self.point_map.len() != d.num_points() {
            return Err("point map has the wrong length".into());
        }
        let mut hit = vec![false; n];
        for &x in &self.point_map {
            if x >= n || std::mem::replace(&mut hit[x], true) {
                return Err("point map is not injective".into());
            }
        }
        let complement: Vec<usize> = (0..n).filter(|&x| !hit[x]).collect();
        if complement != self.deleted {
            return Err("deleted set is not the complement of the image".into());
        }
        if self.deleted.len() != q + 1 {
            return Err(format!(
                "{} points deleted, expected {}",
                self.deleted.len(),
                q + 1
            ));
        }
        let mut used = vec![false; n];
        for (i, line) in d.blocks().iter().enumerate() {
            let img: Vec<usize> = line.iter().map(|&p| self.point_map[p]).collect();
            let hosts: Vec<usize> = (0..n)
                .filter(|&h| img.iter().all(|&x| host.incident(x, h)))
                .collect();
            let [h] = hosts[..] else {
                return Err(format!("line {i} is not inside exactly one host line"));
            };
            if std::mem::replace(&mut used[h], true) {
                return Err(format!("line {i} shares its host line with another line"));
            }
        }
        Ok(())
    }

    /// Host line containing the image of `d`'s line `b`.
    pub fn host_line(&self, d: &IncidenceStructure, b: usize) -> usize {
        let line = d.block(b);
        self.host
            .join(self.point_map[line[0]], self.point_map[line[1]])
            .expect("images of two points are joined")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "host": self.host.to_json_value(),
            "point_map": self.point_map,
            "deleted": self.deleted,
        })
    }
}

fn isqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Projective completion of an affine plane: one new point per parallel
/// class and one new line through all of them. Old points keep their
/// indices; new points follow in class order.
pub fn complete_affine(d: &IncidenceStructure) -> Result<EmbeddingWitness, LinSpaceError> {
    let fail = |m: String| Err(LinSpaceError::NotAffinePlane(m));
    let Some(q) = isqrt(d.num_points()).filter(|&q| q >= 2) else {
        return fail(format!("{} points is not a square", d.num_points()));
    };
    if d.num_blocks() != q * q + q || d.blocks().iter().any(|b| b.len() != q) {
        return fail(format!("expected {} lines of size {q}", q * q + q));
    }
    if !d.validate().is_linear_space {
        return fail("not a linear space".into());
    }
    let nb = d.num_blocks();
    let mut class_of = vec![usize::MAX; nb];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for b in 0..nb {
        if class_of[b] != usize::MAX {
            continue;
        }
        let class: Vec<usize> = (0..nb)
            .filter(|&x| x == b || !d.blocks_meet(b, x))
            .collect();
        if class.len() != q {
            return fail(format!(
                "line {b} has {} parallels, expected {}",
                class.len() - 1,
                q - 1
            ));
        }
        for &x in &class {
            if class_of[x] != usize::MAX {
                return fail("parallelism is not an equivalence".into());
            }
            class_of[x] = classes.len();
        }
        classes.push(class);
    }
    if classes.len() != q + 1 {
        return fail(format!(
            "{} parallel classes, expected {}",
            classes.len(),
            q + 1
        ));
    }
    for class in &classes {
        for (i, &a) in class.iter().enumerate() {
            if class[i + 1..].iter().any(|&b| d.blocks_meet(a, b)) {
                return fail("parallel class contains meeting lines".into());
            }
        }
    }
    let base = q * q;
    let mut blocks: Vec<Vec<usize>> = d
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, line)| {
            let mut l = line.clone();
            l.push(base + class_of[b]);
            l
        })
        .collect();
    blocks.push((base..base + q + 1).collect());
    let labels = (0..base)
        .map(|p| d.point_name(p))
        .chain((0..=q).map(|c| format!("inf{c}")))
        .collect();
    let host = IncidenceStructure::new(base + q + 1, blocks, Some(labels))
        .map_err(|e| LinSpaceError::NotAffinePlane(e.to_string()))?;
    Ok(EmbeddingWitness::from_map(host, (0..base).collect()))
}

/// Embeds a space with a thin point `u`.
///
/// Let `S` be the line through `u` with `q` points. Each point `p` off `S`
/// lies on exactly one line `A_p` missing `S`. Trading `u` for a new point
/// `v` on `S` and on every `A_p` gives an affine plane; its completion hosts
/// the original space, with `u` at the point at infinity of `S`'s class and
/// the other points at infinity plus `v` deleted.
pub fn complete_thin_point(
    d: &IncidenceStructure,
    q: usize,
    u: usize,
) -> Result<EmbeddingWitness, LinSpaceError> {
    if u >= d.num_points() || d.point_degree(u) != q {
        return Err(LinSpaceError::PreconditionViolated(format!(
            "point {u} is not on exactly {q} lines"
        )));
    }
    let short: Vec<usize> = d
        .pencil(u)
        .iter()
        .copied()
        .filter(|&b| d.block(b).len() == q)
        .collect();
    let [s] = short[..] else {
        return Err(LinSpaceError::PreconditionViolated(format!(
            "point {u} is not on exactly one line of size {q}"
        )));
    };
    let fail = |m: String| LinSpaceError::ConstructionFailed(m);
    let mut gains_v = vec![false; d.num_blocks()];
    gains_v[s] = true;
    for p in (0..d.num_points()).filter(|&p| !d.incident(p, s)) {
        let missing: Vec<usize> = d
            .pencil(p)
            .iter()
            .copied()
            .filter(|&x| !d.blocks_meet(x, s))
            .collect();
        let [a_p] = missing[..] else {
            return Err(fail(format!(
                "point {p} lies on {} lines missing line {s}",
                missing.len()
            )));
        };
        gains_v[a_p] = true;
    }
    // index u now names v
    let blocks: Vec<Vec<usize>> = d
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, line)| {
            let mut l: Vec<usize> = line.iter().copied().filter(|&x| x != u).collect();
            if gains_v[b] {
                l.push(u);
            }
            l
        })
        .collect();
    let aux =
        IncidenceStructure::new(d.num_points(), blocks, None).map_err(|e| fail(e.to_string()))?;
    let completion = complete_affine(&aux).map_err(|e| fail(format!("auxiliary space: {e}")))?;
    let host = completion.host;
    let base = q * q;
    let s_line = host
        .join(d.block(s)[0], d.block(s)[1])
        .ok_or_else(|| fail("line S has no host line".into()))?;
    let infinity_of_s = *host
        .block(s_line)
        .iter()
        .find(|&&x| x >= base)
        .ok_or_else(|| fail("line S has no point at infinity".into()))?;
    let mut point_map: Vec<usize> = (0..d.num_points()).collect();
    point_map[u] = infinity_of_s;
    let witness = EmbeddingWitness::from_map(host, point_map);
    witness.verify(d, q).map_err(fail)?;
    check_thin_profile(d, q, u, &witness)?;
    Ok(witness)
}

/// Line sizes around the thin point `u` and the deleted point `v` (which
/// carries index `u` in the host): the line `uv` has `q` points, the other
/// lines through `u` have `q+1`, the other lines through `v` have `q−1`,
/// and every remaining line has `q`.
fn check_thin_profile(
    d: &IncidenceStructure,
    q: usize,
    u: usize,
    w: &EmbeddingWitness,
) -> Result<(), LinSpaceError> {
    let v = u;
    let hu = w.point_map[u];
    for b in 0..d.num_blocks() {
        let h = w.host_line(d, b);
        let size = d.block(b).len();
        let (through_u, through_v) = (w.host.incident(hu, h), w.host.incident(v, h));
        let want = match (through_u, through_v) {
            (true, true) => q,
            (true, false) => q + 1,
            (false, true) => q - 1,
            (false, false) => q,
        };
        if size != want {
            return Err(LinSpaceError::ConstructionFailed(format!(
                "line {b} has {size} points, expected {want}"
            )));
        }
    }
    Ok(())
}

struct EmbedSearch<'a> {
    d: &'a IncidenceStructure,
    host: &'a IncidenceStructure,
    map: Vec<usize>,
    used: Vec<bool>,
    line_img: Vec<usize>,
    host_owner: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl EmbedSearch<'_> {
    /// Next point: the one on most lines that already hold a mapped point.
    fn next_point(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for p in (0..self.d.num_points()).filter(|&p| self.map[p] == UNSET) {
            let score = self
                .d
                .pencil(p)
                .iter()
                .filter(|&&b| self.d.block(b).iter().any(|&z| self.map[z] != UNSET))
                .count();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, p));
            }
        }
        best.map(|(_, p)| p)
    }

    /// Tries `p ↦ h`; on success returns the lines whose image got fixed.
    fn assign(&mut self, p: usize, h: usize) -> Option<Vec<usize>> {
        let mut fixed = Vec::new();
        for &b in self.d.pencil(p) {
            let Some(&z) = self
                .d
                .block(b)
                .iter()
                .find(|&&z| z != p && self.map[z] != UNSET)
            else {
                continue;
            };
            let m = self
                .host
                .join(h, self.map[z])
                .expect("distinct host points");
            let ok = if self.line_img[b] == UNSET {
                if self.host_owner[m] == UNSET {
                    self.line_img[b] = m;
                    self.host_owner[m] = b;
                    fixed.push(b);
                    true
                } else {
                    false
                }
            } else {
                self.line_img[b] == m
            };
            if !ok {
                self.undo(&fixed);
                return None;
            }
        }
        self.map[p] = h;
        self.used[h] = true;
        Some(fixed)
    }

    fn undo(&mut self, fixed: &[usize]) {
        for &b in fixed {
            self.host_owner[self.line_img[b]] = UNSET;
            self.line_img[b] = UNSET;
        }
    }

    fn search(&mut self) -> bool {
        let Some(p) = self.next_point() else {
            return true;
        };
        for h in 0..self.host.num_points() {
            if self.used[h] {
                continue;
            }
            if let Some(fixed) = self.assign(p, h) {
                if self.search() {
                    return true;
                }
                self.map[p] = UNSET;
                self.used[h] = false;
                self.undo(&fixed);
            }
        }
        false
    }
}

/// Backtracking embedding of a space in which every point lies on `q+1`
/// lines into the coordinatized PG(2,q), `q ≤ 4`. The result is checked for
/// the expected shape of the deleted set: no `q` of its points collinear,
/// and every deleted point on a host line that meets the space in `q`
/// points.
pub fn embed_full_pencils(
    d: &IncidenceStructure,
    q: usize,
) -> Result<EmbeddingWitness, LinSpaceError> {
    if q > MAX_SEARCH_ORDER {
        return Err(LinSpaceError::QTooLargeForSearch(q));
    }
    if q < 2 {
        return Err(LinSpaceError::QTooSmall(q));
    }
    if d.num_points() != q * q
        || d.num_blocks() != q * q + q + 1
        || (0..d.num_points()).any(|p| d.point_degree(p) != q + 1)
    {
        return Err(LinSpaceError::PreconditionViolated(format!(
            "expected {} points on {} lines with {} lines per point",
            q * q,
            q * q + q + 1,
            q + 1
        )));
    }
    let plane = ProjectivePlane::new(q as u32)
        .map_err(|e| LinSpaceError::PreconditionViolated(e.to_string()))?;
    let host = plane.into_structure();
    let n = host.num_points();
    let mut search = EmbedSearch {
        d,
        host: &host,
        map: vec![UNSET; d.num_points()],
        used: vec![false; n],
        line_img: vec![UNSET; d.num_blocks()],
        host_owner: vec![UNSET; host.num_blocks()],
    };
    if !search.search() {
        return Err(LinSpaceError::NoEmbeddingFound(q));
    }
    let point_map = search.map;
    let witness = EmbeddingWitness::from_map(host, point_map);
    witness
        .verify(d, q)
        .map_err(LinSpaceError::ConstructionFailed)?;
    check_deleted_set(d, q, &witness)?;
    Ok(witness)
}

fn check_deleted_set(
    d: &IncidenceStructure,
    q: usize,
    w: &EmbeddingWitness,
) -> Result<(), LinSpaceError> {
    for (h, line) in w.host.blocks().iter().enumerate() {
        let on = line.iter().filter(|x| w.deleted.contains(x)).count();
        if on >= q {
            return Err(LinSpaceError::LemmaViolation(format!(
                "host line {h} carries {on} deleted points"
            )));
        }
    }
    for &y in &w.deleted {
        let tangent = (0..d.num_blocks())
            .any(|b| d.block(b).len() == q && w.host.incident(y, w.host_line(d, b)));
        if !tangent {
            return Err(LinSpaceError::LemmaViolation(format!(
                "deleted point {y} has no tangent line"
            )));
        }
    }
    Ok(())
}

/// Classifies `d` (with `|D| = q²`) and builds the matching embedding.
/// Embeddings in the full-pencil case are only searched for `q ≤ 4`; above
/// that `embedding` is `None`.
pub fn classify(d: &IncidenceStructure, q: usize) -> Result<LinSpaceClass, LinSpaceError> {
    if q < 3 {
        return Err(LinSpaceError::QTooSmall(q));
    }
    let report = check_assumptions(d, q);
    if !report.pass() {
        return Err(LinSpaceError::AssumptionViolation(report.violations));
    }
    let proj = projective_lines(d, q)?;
    let thin = thin_points(d, q)?;
    let line_count = d.num_blocks();
    let expect_count = |want: usize, what: &str| {
        if line_count == want {
            Ok(())
        } else {
            Err(LinSpaceError::LemmaViolation(format!(
                "{what}: {line_count} lines, expected {want}"
            )))
        }
    };
    let (case, embedding) = if proj.is_empty() {
        expect_count(q * q + q, "affine case")?;
        let w = complete_affine(d).map_err(|e| LinSpaceError::LemmaViolation(e.to_string()))?;
        (LinSpaceCase::AffinePlane, Some(w))
    } else if let Some(&u) = thin.first() {
        expect_count(q * q + q, "thin point case")?;
        let line = *d
            .pencil(u)
            .iter()
            .find(|&&b| d.block(b).len() == q)
            .expect("checked by thin_points");
        let w = complete_thin_point(d, q, u)?;
        (LinSpaceCase::ThinPoint { u, line }, Some(w))
    } else {
        expect_count(q * q + q + 1, "full pencil case")?;
        let w = if q <= MAX_SEARCH_ORDER {
            Some(embed_full_pencils(d, q)?)
        } else {
            None
        };
        (LinSpaceCase::FullPencils, w)
    };
    if let Some(w) = &embedding {
        w.verify(d, q).map_err(LinSpaceError::ConstructionFailed)?;
    }
    Ok(LinSpaceClass {
        q,
        case,
        line_count,
        projective_lines: proj,
        embedding,
    })
}

/// The two 4-point linear spaces with at most 3 points per line and at most
/// 3 lines per point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderTwoClass {
    AffinePlaneOfOrder2,
    /// One line of size 3 and three lines of size 2; contains no quadrangle.
    NearPencilStructure,
}

pub fn q2_special_classify(d: &IncidenceStructure) -> Result<OrderTwoClass, LinSpaceError> {
    let out = |m: &str| Err(LinSpaceError::NotInScope(m.to_string()));
    if d.num_points() != 4 {
        return out("expected 4 points");
    }
    if !d.validate().is_linear_space {
        return out("not a linear space");
    }
    if (0..4).any(|p| d.point_degree(p) > 3) || d.blocks().iter().any(|b| b.len() > 3) {
        return out("pencil or line too large");
    }
    let mut sizes: Vec<usize> = d.blocks().iter().map(Vec::len).collect();
    sizes.sort_unstable();
    match sizes[..] {
        [2, 2, 2, 2, 2, 2] => Ok(OrderTwoClass::AffinePlaneOfOrder2),
        [2, 2, 2, 3] => {
            // a quadrangle is all four points with no three collinear
            let has_quadrangle = d.blocks().iter().all(|b| b.len() < 3);
            if has_quadrangle {
                return Err(LinSpaceError::LemmaViolation(
                    "near pencil with a quadrangle".into(),
                ));
            }
            Ok(OrderTwoClass::NearPencilStructure)
        }
        _ => out("unexpected line sizes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{affine_plane, conic_points, projective_plane};
    use crate::reconstruct::isomorphic;

    fn pg(q: u32) -> ProjectivePlane {
        ProjectivePlane::new(q).unwrap()
    }

    /// The line z = 0, a point u on it, and a point v off it.
    fn line_swap_deletion(plane: &ProjectivePlane) -> (Vec<usize>, usize, usize) {
        let w = plane.line_index([0, 0, 1]).unwrap();
        let line = plane.structure().block(w).to_vec();
        let u = line[0];
        let v = (0..plane.structure().num_points())
            .find(|p| !line.contains(p))
            .unwrap();
        let mut deleted: Vec<usize> = line.iter().copied().filter(|&x| x != u).collect();
        deleted.push(v);
        (deleted, u, v)
    }

    #[test]
    fn assumptions() {
        assert!(check_assumptions(&affine_plane(3).unwrap(), 3).pass());
        let plane = pg(3);
        let conic = plane.structure().puncture(&conic_points(&plane)).unwrap();
        assert!(check_assumptions(&conic, 3).pass());
        let r = check_assumptions(plane.structure(), 3);
        assert!(r.violations.contains(&Violation::PointCount {
            expected: 9,
            actual: 13
        }));
    }

    #[test]
    fn projective_lines_of_examples() {
        assert!(projective_lines(&affine_plane(3).unwrap(), 3)
            .unwrap()
            .is_empty());

        let plane = pg(3);
        let conic = conic_points(&plane);
        let d = plane.structure().puncture(&conic).unwrap();
        // oracle: host lines disjoint from the conic
        let external = plane
            .structure()
            .blocks()
            .iter()
            .filter(|b| b.iter().all(|p| !conic.contains(p)))
            .count();
        assert_eq!(external, 3);
        let lines = projective_lines(&d, 3).unwrap();
        assert_eq!(lines.len(), external);

        let (deleted, _, _) = line_swap_deletion(&plane);
        let d = plane.structure().puncture(&deleted).unwrap();
        let lines = projective_lines(&d, 3).unwrap();
        // lines through u other than W and uv
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn lemma_violation_is_reported() {
        // two disjoint lines of size q+1 = 3 on 9 points, padded to a
        // linear space with pairs
        let mut blocks = vec![vec![0, 1, 2], vec![3, 4, 5]];
        for a in 0..9 {
            for b in a + 1..9 {
                let covered = blocks
                    .iter()
                    .any(|l: &Vec<usize>| l.contains(&a) && l.contains(&b));
                if !covered {
                    blocks.push(vec![a, b]);
                }
            }
        }
        let d = IncidenceStructure::new(9, blocks, None).unwrap();
        assert!(matches!(
            projective_lines(&d, 2),
            Err(LinSpaceError::LemmaViolation(_))
        ));
    }

    #[test]
    fn thin_points_of_examples() {
        assert!(thin_points(&affine_plane(3).unwrap(), 3)
            .unwrap()
            .is_empty());
        let plane = pg(3);
        let (deleted, u, _) = line_swap_deletion(&plane);
        let d = plane.structure().puncture(&deleted).unwrap();
        let thin = thin_points(&d, 3).unwrap();
        assert_eq!(thin.len(), 1);
        assert_eq!(d.point_name(thin[0]), plane.structure().point_name(u));
        let conic = plane.structure().puncture(&conic_points(&plane)).unwrap();
        assert!(thin_points(&conic, 3).unwrap().is_empty());
    }

    #[test]
    fn classify_three_examples_over_pg3() {
        let plane = pg(3);
        let host = plane.structure();
        let w = host.block(0).to_vec();
        let c1 = classify(&host.puncture(&w).unwrap(), 3).unwrap();
        assert_eq!(c1.case, LinSpaceCase::AffinePlane);
        assert_eq!(c1.line_count, 12);

        let (deleted, _, _) = line_swap_deletion(&plane);
        let c2 = classify(&host.puncture(&deleted).unwrap(), 3).unwrap();
        assert!(matches!(c2.case, LinSpaceCase::ThinPoint { .. }));
        assert_eq!(c2.line_count, 12);

        let c3 = classify(&host.puncture(&conic_points(&plane)).unwrap(), 3).unwrap();
        assert_eq!(c3.case, LinSpaceCase::FullPencils);
        assert_eq!(c3.line_count, 13);

        for c in [c1, c2, c3] {
            let e = c.embedding.unwrap();
            assert_eq!(e.deleted.len(), 4);
            assert!(isomorphic(&e.host, host).is_some());
        }
    }

    #[test]
    fn classify_rejects_small_q_and_bad_input() {
        assert_eq!(
            classify(&affine_plane(2).unwrap(), 2).unwrap_err(),
            LinSpaceError::QTooSmall(2)
        );
        assert!(matches!(
            classify(&projective_plane(3).unwrap(), 3),
            Err(LinSpaceError::AssumptionViolation(_))
        ));
    }

    #[test]
    fn affine_completion() {
        let ag3 = affine_plane(3).unwrap();
        let w = complete_affine(&ag3).unwrap();
        assert_eq!((w.host.num_points(), w.host.num_blocks()), (13, 13));
        assert!(isomorphic(&w.host, &projective_plane(3).unwrap()).is_some());
        let w2 = complete_affine(&affine_plane(2).unwrap()).unwrap();
        assert!(isomorphic(&w2.host, &projective_plane(2).unwrap()).is_some());
        let plane = pg(3);
        let conic = plane.structure().puncture(&conic_points(&plane)).unwrap();
        assert!(matches!(
            complete_affine(&conic),
            Err(LinSpaceError::NotAffinePlane(_))
        ));
    }

    #[test]
    fn thin_point_completion() {
        let plane = pg(3);
        let (deleted, _, _) = line_swap_deletion(&plane);
        let d = plane.structure().puncture(&deleted).unwrap();
        let u = thin_points(&d, 3).unwrap()[0];
        let w = complete_thin_point(&d, 3, u).unwrap();
        assert_eq!(w.deleted.len(), 4);
        assert!(isomorphic(&w.host, plane.structure()).is_some());
        // sizes of the lines through u
        let mut sizes: Vec<usize> = d.pencil(u).iter().map(|&b| d.block(b).len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 4, 4]);

        let ag = affine_plane(3).unwrap();
        assert!(matches!(
            complete_thin_point(&ag, 3, 0),
            Err(LinSpaceError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn full_pencil_embedding() {
        let plane = pg(3);
        let conic = conic_points(&plane);
        let d = plane.structure().puncture(&conic).unwrap();
        let w = embed_full_pencils(&d, 3).unwrap();
        w.verify(&d, 3).unwrap();
        assert_eq!(w.deleted.len(), 4);

        // a 5-arc of PG(2,4) grown greedily
        let plane = pg(4);
        let host = plane.structure();
        let mut arc: Vec<usize> = Vec::new();
        for p in 0..host.num_points() {
            let collinear = arc.iter().enumerate().any(|(i, &a)| {
                arc[i + 1..]
                    .iter()
                    .any(|&b| host.incident(p, host.join(a, b).unwrap()))
            });
            if !collinear {
                arc.push(p);
            }
            if arc.len() == 5 {
                break;
            }
        }
        assert_eq!(arc.len(), 5);
        let d = host.puncture(&arc).unwrap();
        let w = embed_full_pencils(&d, 4).unwrap();
        assert_eq!(w.deleted.len(), 5);

        assert!(matches!(
            embed_full_pencils(&affine_plane(3).unwrap(), 3),
            Err(LinSpaceError::PreconditionViolated(_))
        ));
        assert_eq!(
            embed_full_pencils(&affine_plane(5).unwrap(), 5),
            Err(LinSpaceError::QTooLargeForSearch(5))
        );
    }

    #[test]
    fn order_two_cases() {
        assert_eq!(
            q2_special_classify(&affine_plane(2).unwrap()).unwrap(),
            OrderTwoClass::AffinePlaneOfOrder2
        );
        let np = IncidenceStructure::new(
            4,
            vec![vec![0, 1, 2], vec![0, 3], vec![1, 3], vec![2, 3]],
            None,
        )
        .unwrap();
        assert_eq!(
            q2_special_classify(&np).unwrap(),
            OrderTwoClass::NearPencilStructure
        );
        let partial = IncidenceStructure::new(4, vec![vec![0, 1], vec![2, 3]], None).unwrap();
        assert!(matches!(
            q2_special_classify(&partial),
            Err(LinSpaceError::NotInScope(_))
        ));
    }

    #[test]
    fn witness_verifier_catches_tampering() {
        let ag = affine_plane(3).unwrap();
        let mut w = complete_affine(&ag).unwrap();
        w.verify(&ag, 3).unwrap();
        w.point_map[0] = w.deleted[0];
        assert!(w.verify(&ag, 3).is_err());
    }
}

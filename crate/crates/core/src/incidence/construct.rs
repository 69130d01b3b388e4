//! Coordinatized constructions: PG(2,q), AG(2,q), conics, and the Hermitian
//! unital as the absolute points of the standard unitary polarity.

use std::collections::HashMap;

use super::{IncidenceError, IncidenceStructure};
use crate::algebra::{prime_power, FieldSpec};

/// Largest plane order supported by the coordinatized constructions.
pub const MAX_PLANE_ORDER: u32 = 25;

/// Largest unital order supported by [`hermitian_unital`].
pub const MAX_UNITAL_ORDER: u32 = 5;

/// PG(2,q) together with the homogeneous coordinates of its points and lines.
///
/// Point coordinates are normalized so the first nonzero entry is 1; the
/// same holds for line (dual) coordinates. `line_coords(b)` is aligned with
/// block `b` of the sorted structure.
#[derive(Debug, Clone)]
pub struct ProjectivePlane {
    field: FieldSpec,
    points: Vec<[u32; 3]>,
    lookup: HashMap<[u32; 3], usize>,
    lines: Vec<[u32; 3]>,
    structure: IncidenceStructure,
}

fn checked_order(q: u32) -> Result<FieldSpec, IncidenceError> {
    if prime_power(q).is_none() {
        return Err(IncidenceError::NotPrimePower(q));
    }
    if q > MAX_PLANE_ORDER {
        return Err(IncidenceError::OrderOutOfRange {
            q,
            max: MAX_PLANE_ORDER,
        });
    }
    Ok(FieldSpec::of_order(q)?)
}

/// All normalized triples: (0,0,1), then (0,1,c), then (1,b,c).
fn normalized_triples(q: u32) -> Vec<[u32; 3]> {
    let mut out = vec![[0, 0, 1]];
    out.extend((0..q).map(|c| [0, 1, c]));
    for b in 0..q {
        out.extend((0..q).map(|c| [1, b, c]));
    }
    out
}

fn normalize(f: &FieldSpec, v: [u32; 3]) -> Option<[u32; 3]> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let inv = f.inv_idx(lead)?;
    Some(v.map(|x| f.mul_idx(x, inv)))
}

fn dot(f: &FieldSpec, a: [u32; 3], b: [u32; 3]) -> u32 {
    let s = f.add_idx(f.mul_idx(a[0], b[0]), f.mul_idx(a[1], b[1]));
    f.add_idx(s, f.mul_idx(a[2], b[2]))
}

fn coord_label(v: [u32; 3]) -> String {
    format!("({}:{}:{})", v[0], v[1], v[2])
}

impl ProjectivePlane {
    /// PG(2,q) for a prime power `q ≤ 25`.
    pub fn new(q: u32) -> Result<Self, IncidenceError> {
        Ok(Self::over(checked_order(q)?))
    }

    /// PG(2,F) over an arbitrary (small) field.
    pub fn over(field: FieldSpec) -> Self {
        let q = field.order();
        let points = normalized_triples(q);
        let lookup = points.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut rows: Vec<(Vec<usize>, [u32; 3])> = normalized_triples(q)
            .into_iter()
            .map(|line| {
                let block = points
                    .iter()
                    .enumerate()
                    .filter(|(_, &pt)| dot(&field, line, pt) == 0)
                    .map(|(i, _)| i)
                    .collect();
                (block, line)
            })
            .collect();
        rows.sort();
        let (blocks, lines): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let labels = points.iter().map(|&v| coord_label(v)).collect();
        let structure = IncidenceStructure::from_sorted(points.len(), blocks, Some(labels))
            .expect("projective plane is well formed");
        ProjectivePlane {
            field,
            points,
            lookup,
            lines,
            structure,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    pub fn into_structure(self) -> IncidenceStructure {
        self.structure
    }

    pub fn point_coords(&self, p: usize) -> [u32; 3] {
        self.points[p]
    }

    pub fn line_coords(&self, b: usize) -> [u32; 3] {
        self.lines[b]
    }

    /// Point index of the projective point with homogeneous coordinates `v`
    /// (any nonzero scalar multiple is accepted).
    pub fn point_index(&self, v: [u32; 3]) -> Option<usize> {
        if v.iter().any(|&x| x >= self.order()) {
            return None;
        }
        self.lookup.get(&normalize(&self.field, v)?).copied()
    }

    /// Block index of the line with dual coordinates `v`.
    pub fn line_index(&self, v: [u32; 3]) -> Option<usize> {
        let v = normalize(&self.field, v)?;
        self.lines.iter().position(|&l| l == v)
    }
}

/// The Desarguesian projective plane PG(2,q): q²+q+1 points and lines.
pub fn projective_plane(q: u32) -> Result<IncidenceStructure, IncidenceError> {
    Ok(ProjectivePlane::new(q)?.into_structure())
}

/// The affine plane AG(2,q): points (x,y) with index `x·q + y`; lines
/// `y = mx + b` and `x = c`.
pub fn affine_plane(q: u32) -> Result<IncidenceStructure, IncidenceError> {
    let f = checked_order(q)?;
    let n = q as usize;
    let idx = |x: u32, y: u32| x as usize * n + y as usize;
    let mut blocks = Vec::with_capacity(n * n + n);
    for m in 0..q {
        for b in 0..q {
            blocks.push(
                (0..q)
                    .map(|x| idx(x, f.add_idx(f.mul_idx(m, x), b)))
                    .collect(),
            );
        }
    }
    for c in 0..q {
        blocks.push((0..q).map(|y| idx(c, y)).collect());
    }
    let labels = (0..q)
        .flat_map(|x| (0..q).map(move |y| format!("({x},{y})")))
        .collect();
    IncidenceStructure::new(n * n, blocks, Some(labels))
}

/// The conic `{(1:t:t²)} ∪ {(0:0:1)}` of `plane`, as point indices.
///
/// It is an oval (q+1 points, no three collinear) in every characteristic.
pub fn conic_points(plane: &ProjectivePlane) -> Vec<usize> {
    let f = plane.field();
    let mut pts: Vec<usize> = (0..plane.order())
        .map(|t| {
            plane
                .point_index([1, t, f.mul_idx(t, t)])
                .expect("conic point exists")
        })
        .collect();
    pts.push(plane.point_index([0, 0, 1]).expect("point exists"));
    pts.sort_unstable();
    pts
}

/// The classical unital of order `q` (2 ≤ q ≤ 5): the points of PG(2,q²)
/// with `x₀^{q+1} + x₁^{q+1} + x₂^{q+1} = 0`, with the secant line sections
/// as blocks.
pub fn hermitian_unital(q: u32) -> Result<IncidenceStructure, IncidenceError> {
    if prime_power(q).is_none() {
        return Err(IncidenceError::NotPrimePower(q));
    }
    if q > MAX_UNITAL_ORDER {
        return Err(IncidenceError::OrderOutOfRange {
            q,
            max: MAX_UNITAL_ORDER,
        });
    }
    let field = FieldSpec::quadratic_extension(q)?;
    let plane = ProjectivePlane::over(field.clone());
    let norm =
        |x: u32| -> Result<u32, IncidenceError> { Ok(field.mul_idx(x, field.conjugate_idx(x)?)) };
    let host = plane.structure();
    let mut index = vec![usize::MAX; host.num_points()];
    let mut labels = Vec::new();
    for (p, slot) in index.iter_mut().enumerate() {
        let v = plane.point_coords(p);
        let form = field.add_idx(field.add_idx(norm(v[0])?, norm(v[1])?), norm(v[2])?);
        if form == 0 {
            *slot = labels.len();
            labels.push(host.point_name(p));
        }
    }
    let blocks: Vec<Vec<usize>> = host
        .blocks()
        .iter()
        .map(|line| {
            line.iter()
                .filter(|&&p| index[p] != usize::MAX)
                .map(|&p| index[p])
                .collect::<Vec<_>>()
        })
        .filter(|b| b.len() == q as usize + 1)
        .collect();
    let unital = IncidenceStructure::new(labels.len(), blocks, Some(labels))?;
    if unital.validate_unital() != Some(q as usize) {
        return Err(IncidenceError::InternalCheckFailed(format!(
            "Hermitian construction for q={q} is not a unital of order {q}"
        )));
    }
    Ok(unital)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_sizes() {
        let fano = projective_plane(2).unwrap();
        assert_eq!((fano.num_points(), fano.num_blocks()), (7, 7));
        assert!(fano.blocks().iter().all(|b| b.len() == 3));
        let pg3 = projective_plane(3).unwrap();
        assert_eq!((pg3.num_points(), pg3.num_blocks()), (13, 13));
        assert!(pg3.blocks().iter().all(|b| b.len() == 4));
        assert_eq!(
            projective_plane(6).unwrap_err(),
            IncidenceError::NotPrimePower(6)
        );
        assert!(matches!(
            projective_plane(27),
            Err(IncidenceError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn planes_are_linear_spaces_both_ways() {
        for q in [2, 3, 4, 5] {
            let pg = projective_plane(q).unwrap();
            assert!(pg.validate().is_linear_space, "PG(2,{q})");
            assert!(
                pg.dual().unwrap().validate().is_linear_space,
                "dual PG(2,{q})"
            );
        }
    }

    #[test]
    fn affine_sizes() {
        let ag3 = affine_plane(3).unwrap();
        assert_eq!((ag3.num_points(), ag3.num_blocks()), (9, 12));
        assert!(ag3.validate().is_linear_space);
        let ag2 = affine_plane(2).unwrap();
        assert_eq!((ag2.num_points(), ag2.num_blocks()), (4, 6));
        assert!(ag2.blocks().iter().all(|b| b.len() == 2));
    }

    #[test]
    fn conic_is_an_oval() {
        for q in [2, 3, 4, 5, 7] {
            let plane = ProjectivePlane::new(q).unwrap();
            let conic = conic_points(&plane);
            assert_eq!(conic.len(), q as usize + 1);
            for line in plane.structure().blocks() {
                let hits = line.iter().filter(|p| conic.contains(p)).count();
                assert!(hits <= 2, "q={q}: line meets conic in {hits} points");
            }
        }
    }

    #[test]
    fn point_lookup_normalizes() {
        let plane = ProjectivePlane::new(5).unwrap();
        let a = plane.point_index([2, 4, 1]).unwrap();
        let b = plane.point_index([1, 2, 3]).unwrap();
        assert_eq!(a, b);
        assert_eq!(plane.point_coords(a), [1, 2, 3]);
        assert_eq!(plane.point_index([0, 0, 0]), None);
        let w = plane.line_index([0, 0, 3]).unwrap();
        assert_eq!(plane.line_coords(w), [0, 0, 1]);
    }

    #[test]
    fn hermitian_parameters() {
        for (q, points, blocks) in [(2, 9, 12), (3, 28, 63), (4, 65, 208), (5, 126, 525)] {
            let u = hermitian_unital(q).unwrap();
            assert_eq!(u.num_points(), points);
            assert_eq!(u.num_blocks(), blocks);
            assert!(u.blocks().iter().all(|b| b.len() == q as usize + 1));
            assert_eq!(u.validate_unital(), Some(q as usize));
        }
        assert_eq!(
            hermitian_unital(6).unwrap_err(),
            IncidenceError::NotPrimePower(6)
        );
        assert!(matches!(
            hermitian_unital(7),
            Err(IncidenceError::OrderOutOfRange { .. })
        ));
    }
}

//! Search for O'Nan configurations: four mutually intersecting blocks, no
//! three of them through a common point.

use rayon::prelude::*;
use serde::Serialize;

use super::IncidenceStructure;

const NONE: u32 = u32::MAX;

/// Four blocks and their six pairwise intersection points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OnanConfiguration {
    /// Ascending block indices.
    pub blocks: [usize; 4],
    /// Ascending point indices.
    pub points: [usize; 6],
}

struct MeetTable {
    n: usize,
    meet: Vec<u32>,
}

impl MeetTable {
    fn new(s: &IncidenceStructure) -> Self {
        let n = s.num_blocks();
        let mut meet = vec![NONE; n * n];
        for p in 0..s.num_points() {
            let pencil = s.pencil(p);
            for (i, &a) in pencil.iter().enumerate() {
                for &b in &pencil[i + 1..] {
                    meet[a * n + b] = p as u32;
                    meet[b * n + a] = p as u32;
                }
            }
        }
        MeetTable { n, meet }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> u32 {
        self.meet[a * self.n + b]
    }
}

fn scan_from(t: &MeetTable, a: usize, limit: usize, out: &mut Vec<OnanConfiguration>) {
    let n = t.n;
    for b in a + 1..n {
        let ab = t.get(a, b);
        if ab == NONE {
            continue;
        }
        for c in b + 1..n {
            let (ac, bc) = (t.get(a, c), t.get(b, c));
            if ac == NONE || bc == NONE || ac == ab {
                continue;
            }
            for d in c + 1..n {
                let (ad, bd, cd) = (t.get(a, d), t.get(b, d), t.get(c, d));
                if ad == NONE || bd == NONE || cd == NONE {
                    continue;
                }
                // d must avoid the three existing intersection points
                if ad == ab || ad == ac || bd == bc || cd == ac {
                    continue;
                }
                let mut points = [ab, ac, ad, bc, bd, cd].map(|x| x as usize);
                points.sort_unstable();
                out.push(OnanConfiguration {
                    blocks: [a, b, c, d],
                    points,
                });
                if limit != 0 && out.len() >= limit {
                    return;
                }
            }
        }
    }
}

/// Enumerates O'Nan configurations of a partial linear space in
/// lexicographic order of block quadruples, stopping after `limit` hits
/// (`0` means exhaustive).
pub fn find_onan(s: &IncidenceStructure, limit: usize) -> Vec<OnanConfiguration> {
    let table = MeetTable::new(s);
    let n = s.num_blocks();
    if limit == 0 {
        let mut all: Vec<OnanConfiguration> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let mut out = Vec::new();
                scan_from(&table, a, 0, &mut out);
                out
            })
            .collect();
        all.sort();
        return all;
    }
    let mut out = Vec::new();
    for a in 0..n {
        let remaining = limit - out.len();
        let mut found = Vec::new();
        scan_from(&table, a, remaining, &mut found);
        out.extend(found);
        if out.len() >= limit {
            break;
        }
    }
    out
}

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde_json::{json, Value};

use unital::cliques::{
    classify_all, enumerate_maximal_cliques, max_clique_size, report_json, verify_star_property,
};
use unital::confluence::{expected_unital_params, hoffman_bound, srg_check};
use unital::incidence::{
    affine_plane, conic_points, find_onan, hermitian_unital, projective_plane, ProjectivePlane,
};
use unital::linspace::{classify, q2_special_classify};
use unital::reconstruct::reconstruct_unital;
use unital::{CliqueTag, ConfluenceGraph, IncidenceStructure, LinSpaceError};

use crate::{BuildKind, Failure};

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_structure(path: &Path) -> anyhow::Result<IncidenceStructure> {
    IncidenceStructure::from_json_str(&read_text(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

/// A DIMACS graph, or the confluence graph of an incidence-v1 structure.
fn read_graph(path: &Path) -> anyhow::Result<(ConfluenceGraph, Option<IncidenceStructure>)> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        let s = IncidenceStructure::from_json_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        Ok((ConfluenceGraph::build(&s), Some(s)))
    } else {
        let g = ConfluenceGraph::from_dimacs(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        Ok((g, None))
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn need_q(q: Option<u32>) -> anyhow::Result<u32> {
    q.ok_or_else(|| anyhow!("--q is required"))
}

fn parse_indices(spec: &str) -> anyhow::Result<Vec<usize>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .with_context(|| format!("bad point index {t:?} in --delete"))
        })
        .collect()
}

/// Points to delete from PG(2,q): the line z = 0; that line with (0:1:0)
/// traded for (0:0:1); the conic {(1:t:t²)} ∪ {(0:0:1)}; or explicit
/// indices.
fn plane_deletion(plane: &ProjectivePlane, spec: &str) -> anyhow::Result<Vec<usize>> {
    let s = plane.structure();
    let line_z = || {
        s.block(plane.line_index([0, 0, 1]).expect("line z = 0"))
            .to_vec()
    };
    Ok(match spec {
        "line" => line_z(),
        "line-swap" => {
            let u = plane.point_index([0, 1, 0]).expect("point (0:1:0)");
            let v = plane.point_index([0, 0, 1]).expect("point (0:0:1)");
            let mut d: Vec<usize> = line_z().into_iter().filter(|&p| p != u).collect();
            d.push(v);
            d.sort_unstable();
            d
        }
        "conic" => conic_points(plane),
        _ => parse_indices(spec)?,
    })
}

pub fn build(
    kind: BuildKind,
    q: Option<u32>,
    delete: Option<&str>,
    input: Option<&Path>,
    output: &Path,
) -> Outcome {
    if delete.is_some() && !matches!(kind, BuildKind::Puncture) {
        return Err(anyhow!("--delete only applies to `build puncture`").into());
    }
    if input.is_some() && !matches!(kind, BuildKind::Puncture) {
        return Err(anyhow!("--in only applies to `build puncture`").into());
    }
    let s = match kind {
        BuildKind::Hermitian => hermitian_unital(need_q(q)?).map_err(anyhow::Error::from)?,
        BuildKind::Pg => projective_plane(need_q(q)?).map_err(anyhow::Error::from)?,
        BuildKind::Ag => affine_plane(need_q(q)?).map_err(anyhow::Error::from)?,
        BuildKind::Puncture => {
            let spec = delete.ok_or_else(|| anyhow!("`build puncture` needs --delete"))?;
            let (base, deleted) = match input {
                Some(path) => (read_structure(path)?, parse_indices(spec)?),
                None => {
                    let plane = ProjectivePlane::new(need_q(q)?).map_err(anyhow::Error::from)?;
                    let deleted = plane_deletion(&plane, spec)?;
                    (plane.into_structure(), deleted)
                }
            };
            base.puncture(&deleted).map_err(anyhow::Error::from)?
        }
    };
    write_text(output, &s.to_json_string())?;
    println!(
        "wrote {} points, {} blocks to {}",
        s.num_points(),
        s.num_blocks(),
        output.display()
    );
    Ok(())
}

pub fn graph(file: &Path, output: &Path) -> Outcome {
    let s = read_structure(file)?;
    let name = file
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let g = ConfluenceGraph::build(&s).with_provenance(format!("confluence graph of {name}"));
    write_text(output, &g.to_dimacs())?;
    println!(
        "wrote {} vertices, {} edges to {}",
        g.n(),
        g.edge_count(),
        output.display()
    );
    Ok(())
}

pub fn srg(file: &Path, expect_unital: Option<i64>) -> Outcome {
    let (g, _) = read_graph(file)?;
    let Some(p) = srg_check(&g) else {
        println!("not strongly regular");
        return Err(Failure::Check(format!(
            "{} is not strongly regular",
            file.display()
        )));
    };
    println!("srg {p}");
    match hoffman_bound(&p) {
        Ok(b) => println!("hoffman bound {b}"),
        Err(e) => println!("hoffman bound unavailable: {e}"),
    }
    if let Some(q) = expect_unital {
        if q < 2 {
            return Err(anyhow!("--expect-unital needs q ≥ 2").into());
        }
        let want = expected_unital_params(q);
        if p != want {
            return Err(Failure::Check(format!("expected {want} for order {q}")));
        }
        println!("matches a unital of order {q}");
    }
    Ok(())
}

fn size_histogram(cliques: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for c in cliques {
        *h.entry(c.len()).or_insert(0) += 1;
    }
    h
}

/// For a unital of order `q > 2`: the `q²`-cliques are exactly the `q³+1`
/// pencils, each with the star property; if the unital has no O'Nan
/// configuration, every other maximal clique is a near pencil.
fn check_unital_cliques(
    s: &IncidenceStructure,
    q: usize,
    classified: &[unital::CliqueClassification],
) -> Result<String, String> {
    let big: Vec<_> = classified.iter().filter(|c| c.size == q * q).collect();
    if big.len() != q * q * q + 1 {
        return Err(format!(
            "{} cliques of size {}, expected {}",
            big.len(),
            q * q,
            q * q * q + 1
        ));
    }
    for c in &big {
        if !matches!(c.tag, CliqueTag::Pencil { .. }) {
            return Err(format!(
                "clique {:?} of size {} is not a pencil",
                c.clique,
                q * q
            ));
        }
        let star = verify_star_property(s, &c.clique, q).map_err(|e| e.to_string())?;
        if !star.pass {
            return Err(format!("pencil {:?} fails the star property", c.clique));
        }
    }
    if !find_onan(s, 1).is_empty() {
        return Ok(
            "q²-cliques are pencils (O'Nan configurations present, near pencils not checked)"
                .into(),
        );
    }
    for c in classified {
        let ok = match c.tag {
            CliqueTag::Pencil { .. } => c.size == q * q,
            CliqueTag::NearPencil { .. } => c.size == q + 2,
            CliqueTag::Other { .. } => false,
        };
        if !ok {
            return Err(format!(
                "clique {:?} ({}, size {}) is not allowed",
                c.clique,
                c.tag.name(),
                c.size
            ));
        }
    }
    Ok("every maximal clique is a pencil or a near pencil".into())
}

pub fn cliques(file: &Path, classify: bool, max_only: bool, json_out: Option<&Path>) -> Outcome {
    let (g, s) = read_graph(file)?;
    if max_only {
        if classify {
            return Err(anyhow!("--max-only and --classify are exclusive").into());
        }
        let w = max_clique_size(&g);
        println!("clique number {w}");
        if let Some(path) = json_out {
            write_text(path, &pretty(&json!({ "clique_number": w })))?;
        }
        return Ok(());
    }
    if !classify {
        let all = enumerate_maximal_cliques(&g);
        println!("{} maximal cliques", all.len());
        for (size, count) in size_histogram(&all).iter().rev() {
            println!("  size {size}: {count}");
        }
        if let Some(path) = json_out {
            let mut sorted = all;
            sorted.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            let report: Vec<Value> = sorted
                .iter()
                .map(|c| json!({ "blocks": c, "size": c.len() }))
                .collect();
            write_text(path, &pretty(&Value::Array(report)))?;
        }
        return Ok(());
    }
    let s =
        s.ok_or_else(|| anyhow!("--classify needs an incidence-v1 structure, not a bare graph"))?;
    let classified = classify_all(&s, &g);
    println!("{} maximal cliques", classified.len());
    let mut tags: BTreeMap<(&str, usize), usize> = BTreeMap::new();
    for c in &classified {
        *tags.entry((c.tag.name(), c.size)).or_insert(0) += 1;
    }
    for ((tag, size), count) in &tags {
        println!("  {tag} of size {size}: {count}");
    }
    if let Some(path) = json_out {
        write_text(path, &pretty(&report_json(&classified)))?;
    }
    match s.validate_unital() {
        Some(q) if q > 2 => {
            let msg = check_unital_cliques(&s, q, &classified).map_err(Failure::Check)?;
            println!("unital of order {q}: {msg}");
        }
        Some(q) => println!("unital of order {q}: clique theorems need q > 2, nothing checked"),
        None => println!("not a unital, nothing checked"),
    }
    Ok(())
}

pub fn onan(file: &Path, limit: usize, expect_none: bool) -> Outcome {
    let s = read_structure(file)?;
    let found = find_onan(&s, limit);
    println!("{} O'Nan configurations", found.len());
    for c in &found {
        println!("  blocks {:?} points {:?}", c.blocks, c.points);
    }
    if expect_none && !found.is_empty() {
        return Err(Failure::Check("O'Nan configurations present".into()));
    }
    Ok(())
}

pub fn classify_linspace(file: &Path, q: usize, embed: bool, json_out: Option<&Path>) -> Outcome {
    let d = read_structure(file)?;
    if q == 2 {
        let class = q2_special_classify(&d).map_err(|e| anyhow!(e))?;
        println!("q = 2: {class:?}");
        if let Some(path) = json_out {
            write_text(
                path,
                &pretty(&json!({ "q": 2, "case": format!("{class:?}") })),
            )?;
        }
        return Ok(());
    }
    let class = classify(&d, q).map_err(|e| match e {
        LinSpaceError::AssumptionViolation(_)
        | LinSpaceError::LemmaViolation(_)
        | LinSpaceError::ConstructionFailed(_)
        | LinSpaceError::NoEmbeddingFound(_) => Failure::Check(e.to_string()),
        _ => Failure::Usage(anyhow!(e)),
    })?;
    println!("case {}", class.case.name());
    println!("lines {}", class.line_count);
    println!("projective lines {}", class.projective_lines.len());
    if let unital::LinSpaceCase::ThinPoint { u, line } = class.case {
        println!("thin point {} on short line {line}", d.point_name(u));
    }
    let mut report = class.to_json();
    match &class.embedding {
        Some(w) if embed => {
            println!("embedding into a plane on {} points", w.host.num_points());
            println!("point map {:?}", w.point_map);
            println!("deleted {:?}", w.deleted);
        }
        Some(_) => {
            report.as_object_mut().expect("object").remove("embedding");
        }
        None if embed => println!("no embedding computed for q = {q}"),
        None => {}
    }
    if let Some(path) = json_out {
        write_text(path, &pretty(&report))?;
    }
    Ok(())
}

pub fn reconstruct(graph: &Path, verify: Option<&Path>, output: Option<&Path>) -> Outcome {
    let text = read_text(graph)?;
    let g = ConfluenceGraph::from_dimacs(&text)
        .with_context(|| format!("parsing {}", graph.display()))?;
    let expected = verify.map(read_structure).transpose()?;
    let r = reconstruct_unital(&g).map_err(|e| Failure::Check(e.to_string()))?;
    let out = r.structure.to_json_string();
    match output {
        Some(path) => {
            write_text(path, &out)?;
            eprintln!("unital of order {} written to {}", r.q, path.display());
        }
        None => print!("{out}"),
    }
    if r.shortcut {
        eprintln!("order 2: returned the affine plane of order 3");
    }
    if let Some(s) = expected {
        if unital::reconstruct::isomorphic(&r.structure, &s).is_none() {
            return Err(Failure::Check(
                "reconstruction is not isomorphic to the given structure".into(),
            ));
        }
        eprintln!("verified: isomorphic to {}", verify.expect("set").display());
    }
    Ok(())
}

pub fn isomorphic(a: &Path, b: &Path) -> Outcome {
    let (sa, sb) = (read_structure(a)?, read_structure(b)?);
    match unital::reconstruct::isomorphic(&sa, &sb) {
        Some(map) => {
            println!("{}", json!(map));
            Ok(())
        }
        None => {
            println!("none");
            Err(Failure::Check("structures are not isomorphic".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletion_specs() {
        let plane = ProjectivePlane::new(3).unwrap();
        assert_eq!(plane_deletion(&plane, "line").unwrap().len(), 4);
        let swap = plane_deletion(&plane, "line-swap").unwrap();
        let v = plane.point_index([0, 0, 1]).unwrap();
        assert!(swap.contains(&v) && swap.len() == 4);
        assert_eq!(plane_deletion(&plane, "conic").unwrap().len(), 4);
        assert_eq!(plane_deletion(&plane, "1, 2,5").unwrap(), vec![1, 2, 5]);
        assert!(plane_deletion(&plane, "1,x").is_err());
    }
}

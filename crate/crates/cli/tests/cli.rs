use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn unital(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unital"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn pipeline_for_small_orders() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for q in ["2", "3", "4"] {
        let s = format!("h{q}.json");
        let g = format!("h{q}.dimacs");
        let r = format!("r{q}.json");
        assert_eq!(
            code(&unital(d, &["build", "hermitian", "--q", q, "-o", &s])),
            0
        );
        assert_eq!(code(&unital(d, &["graph", &s, "-o", &g])), 0);
        let srg = unital(d, &["srg", &g, "--expect-unital", q]);
        assert_eq!(code(&srg), 0, "{}", stdout(&srg));
        assert_eq!(
            code(&unital(d, &["reconstruct", &g, "--verify", &s, "-o", &r])),
            0
        );
        assert_eq!(code(&unital(d, &["isomorphic", &r, &s])), 0);
    }
}

#[test]
fn order_three_reports() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    unital(d, &["build", "hermitian", "--q", "3", "-o", "h3.json"]);
    unital(d, &["graph", "h3.json", "-o", "h3.dimacs"]);

    let srg = stdout(&unital(d, &["srg", "h3.dimacs"]));
    assert!(srg.contains("(63, 32, 16, 16)"), "{srg}");

    let onan = unital(d, &["onan", "h3.json", "--expect-none"]);
    assert_eq!(code(&onan), 0);
    assert!(stdout(&onan).starts_with("0 O'Nan"));

    let cl = unital(d, &["cliques", "h3.json", "--classify", "--json", "c.json"]);
    assert_eq!(code(&cl), 0);
    assert!(stdout(&cl).contains("near_pencil of size 5: 1512"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
    let report = report.as_array().unwrap();
    assert_eq!(report.len(), 1540);
    assert_eq!(report[0]["tag"], "pencil");

    let max = unital(d, &["cliques", "h3.dimacs", "--max-only"]);
    assert_eq!(stdout(&max).trim(), "clique number 9");
}

#[test]
fn linear_space_cases() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for (spec, case) in [
        ("line", "affine_plane"),
        ("line-swap", "thin_point"),
        ("conic", "full_pencils"),
    ] {
        let file = format!("{spec}.json");
        assert_eq!(
            code(&unital(
                d,
                &["build", "puncture", "--q", "3", "--delete", spec, "-o", &file]
            )),
            0
        );
        let out = unital(
            d,
            &[
                "classify-linspace",
                &file,
                "--q",
                "3",
                "--embed",
                "--json",
                "c.json",
            ],
        );
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).starts_with(&format!("case {case}")));
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
        assert_eq!(v["embedding"]["deleted"].as_array().unwrap().len(), 4);
    }
    unital(d, &["build", "pg", "--q", "3", "-o", "pg3.json"]);
    assert_eq!(
        code(&unital(d, &["classify-linspace", "pg3.json", "--q", "3"])),
        1
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    unital(d, &["build", "pg", "--q", "2", "-o", "fano.json"]);
    unital(d, &["build", "ag", "--q", "3", "-o", "ag3.json"]);
    unital(d, &["build", "hermitian", "--q", "2", "-o", "h2.json"]);
    assert_eq!(code(&unital(d, &["onan", "fano.json", "--expect-none"])), 1);
    assert_eq!(code(&unital(d, &["onan", "fano.json"])), 0);
    assert_eq!(
        code(&unital(d, &["srg", "fano.json", "--expect-unital", "2"])),
        1
    );
    assert_eq!(code(&unital(d, &["isomorphic", "h2.json", "ag3.json"])), 0);
    let none = unital(d, &["isomorphic", "h2.json", "fano.json"]);
    assert_eq!((code(&none), stdout(&none).trim()), (1, "none"));

    assert_eq!(code(&unital(d, &["frobnicate"])), 2);
    assert_eq!(code(&unital(d, &["onan", "fano.json", "--bogus"])), 2);
    assert_eq!(code(&unital(d, &["graph", "missing.json", "-o", "x"])), 2);
    assert_eq!(code(&unital(d, &["build", "hermitian", "-o", "x.json"])), 2);
    assert_eq!(
        code(&unital(d, &["build", "pg", "--q", "6", "-o", "x.json"])),
        2
    );
    fs::write(d.join("bad.json"), "{\"format\":\"incidence-v1\"}").unwrap();
    assert_eq!(code(&unital(d, &["onan", "bad.json"])), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let run = |tag: &str| {
        let s = format!("h{tag}.json");
        let g = format!("h{tag}.dimacs");
        let r = format!("r{tag}.json");
        let c = format!("c{tag}.json");
        unital(d, &["build", "hermitian", "--q", "3", "-o", &s]);
        unital(d, &["graph", &s, "-o", &g]);
        unital(d, &["reconstruct", &g, "-o", &r]);
        unital(d, &["cliques", &s, "--classify", "--json", &c]);
        [r, c].map(|f| fs::read(d.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn puncture_from_file() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    unital(d, &["build", "pg", "--q", "3", "-o", "pg3.json"]);
    let out = unital(
        d,
        &[
            "build", "puncture", "--in", "pg3.json", "--delete", "0,1,2,3", "-o", "p.json",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("9 points"));
}

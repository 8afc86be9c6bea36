use std::path::PathBuf;
use std::process::Command;

use torus_trees::graph_file::parse_graph;
use torus_trees::table::Table;

fn graph(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("graphs").join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_torus-trees")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn delta_of_grid2() {
    let (code, out, _) = run(&["delta", &graph("grid2.graph")]);
    assert_eq!(code, 0);
    assert_eq!(out, "4 - x1 - x1^-1 - x2 - x2^-1\n");
    let (_, out, _) = run(&["delta", &graph("doubled-grid1.graph"), "--crsf"]);
    assert_eq!(out, "4 - 2*x1 - 2*x1^-1\ncrsf expansion agrees: true\n");
}

#[test]
fn count_cycle() {
    let (code, out, err) = run(&["count", &graph("grid1.graph"), "--lattice", "5", "--oracle", "dc"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("T = 5\n"), "{out}");
    assert!(out.contains("deletion-contraction T = 5\n"));
    assert!(err.starts_with("elapsed: "));
}

#[test]
fn count_torus_csv() {
    let (code, out, _) = run(&["--format", "csv", "count", &graph("grid2.graph"), "--diag", "3", "--oracle", "eigen"]);
    assert_eq!(code, 0);
    let t = Table::from_csv(&out).unwrap();
    // 3×3 torus: 11664 spanning trees
    assert_eq!(t.column("t").unwrap(), vec!["11664"]);
    let eigen: f64 = t.column("oracle").unwrap()[0].parse().unwrap();
    assert!((eigen - 11664f64.ln()).abs() < 1e-9);
}

#[test]
fn verify_product_grid2() {
    let (code, out, _) = run(&["--format", "csv", "verify-product", &graph("grid2.graph"), "--diag", "4"]);
    assert_eq!(code, 0);
    let t = Table::from_csv(&out).unwrap();
    let diff: f64 = t.column("diff").unwrap()[0].parse().unwrap();
    assert!(diff < 1e-6);
    assert_eq!(t.column("skipped").unwrap(), vec!["1"]);
}

#[test]
fn bits_flag() {
    let (_, nats, _) = run(&["--format", "csv", "mahler", &graph("doubled-grid1.graph")]);
    let (_, bits, _) = run(&["--format", "csv", "--bits", "mahler", &graph("doubled-grid1.graph")]);
    let v = |s: &str| Table::from_csv(s).unwrap().column("value").unwrap()[0].parse::<f64>().unwrap();
    assert!((v(&nats) - std::f64::consts::LN_2).abs() < 1e-9);
    assert!((v(&bits) - 1.0).abs() < 1e-9);
}

#[test]
fn tables() {
    let (code, out, _) = run(&["--format", "csv", "gap-table", "--s-max", "4"]);
    assert_eq!(code, 0);
    assert_eq!(Table::from_csv(&out).unwrap().column("at_least_log2").unwrap(), vec!["true"; 3]);
    let (code, out, _) = run(&["--format", "csv", "grid-table", "--d-max", "2", "--grid", "64"]);
    assert_eq!(code, 0);
    assert_eq!(Table::from_csv(&out).unwrap().rows.len(), 2);
    let (code, out, _) = run(&["regular-bound", "--d", "1", "--diag", "16"]);
    assert_eq!(code, 0);
    assert!(out.lines().count() == 2);
}

#[test]
fn generated_files_match_shipped() {
    for (args, file) in [
        (vec!["generate", "grid", "--d", "2"], "grid2.graph"),
        (vec!["generate", "grid-no-axis", "--d", "2", "--axis", "2"], "grid2-no-vertical.graph"),
        (vec!["generate", "two-orbit"], "two-orbit.graph"),
        (vec!["generate", "gap", "--r", "1", "--s", "2"], "gap-1-2.graph"),
    ] {
        let (code, out, _) = run(&args);
        assert_eq!(code, 0);
        let shipped = std::fs::read_to_string(graph(file)).unwrap();
        assert_eq!(parse_graph(&out).unwrap(), parse_graph(&shipped).unwrap(), "{file}");
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("torus-trees-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let closed = dir.join("closed.graph");
    std::fs::write(&closed, "d = 1\nn = 2\nedges = [[1, 2, [0]]]\n").unwrap();
    let bad = dir.join("bad.graph");
    std::fs::write(&bad, "d = 1\nn = 1\nedges = [[1, 3, [0]]]\n").unwrap();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (vec!["mahler".into(), closed.display().to_string()], "Δ ≡ 0"),
        (vec!["verify-product".into(), closed.display().to_string(), "--diag".into(), "3".into()], "closed component"),
        (vec!["delta".into(), bad.display().to_string()], "orbit 3"),
        (vec!["delta".into(), dir.join("missing.graph").display().to_string()], "cannot read"),
        (vec!["count".into(), graph("grid2.graph"), "--lattice".into(), "1,2;2,4".into()], "singular"),
        (vec!["count".into(), graph("grid2.graph"), "--lattice".into(), "1,2".into()], "lattice"),
        (vec!["count".into(), graph("grid2.graph"), "--diag".into(), "2000".into()], "limit"),
        (vec!["mahler".into(), graph("grid2.graph"), "--grid".into(), "100000".into()], "--grid"),
    ];
    for (args, needle) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.contains(needle), "{args:?}: {err}");
    }
    let (_, out, _) = run(&["delta", &closed.display().to_string()]);
    assert_eq!(out, "0\nclosed component: orbits 1 2\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn help_documents_grammar() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("GRAPH FILES") && out.contains("--lattice \"a,b;c,d\""));
}

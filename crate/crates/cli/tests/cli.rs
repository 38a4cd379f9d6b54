use std::process::{Command, Output};

fn run_in(cache: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expolog"))
        .args(args)
        .env("EXPOLOG_CACHE", cache)
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn counts() {
    assert_eq!(stdout(&["counts", "--family", "graph", "--n", "6"]), "70\n");
    assert_eq!(
        stdout(&["counts", "--family", "map", "--n", "3", "--all"]),
        "n,b_n\n0,1\n1,1\n2,4\n3,27\n"
    );
    assert_eq!(
        stdout(&["counts", "--family", "derange", "--n", "5", "--connected"]),
        "24\n"
    );
}

#[test]
fn table_rows() {
    let out = stdout(&[
        "table", "--family", "derange", "--kind", "largest", "--n", "5",
    ]);
    assert!(out.starts_with("n,k,count\n"));
    assert!(out.contains("5,3,20\n"));
    let json = stdout(&[
        "table", "--family", "map", "--kind", "smallest", "--n", "4", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(
        v["rows"][0]["cells"],
        serde_json::json!(["0", "87", "27", "0", "142"])
    );
    let float = stdout(&[
        "table",
        "--family",
        "permute",
        "--kind",
        "largest",
        "--n",
        "6",
        "--backend",
        "float",
    ]);
    assert!(float.contains("6,6,0.16666666666666"));
}

#[test]
fn stats_row_in_published_format() {
    let out = stdout(&["stats", "--family", "map", "--n", "300"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("Lmu_tilde,Lsigma2_tilde,Lnu_tilde,Smu_tilde,Ssigma2_tilde")
    );
    let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
    let decimals: Vec<usize> = cols
        .iter()
        .map(|c| c.split('.').nth(1).unwrap().len())
        .collect();
    assert_eq!(decimals, vec![6, 6, 4, 6, 6]);
    let full = stdout(&[
        "stats", "--family", "map", "--n", "300", "--full", "--median", "upper",
    ]);
    assert!(full
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .all(|c| c.len() >= 18));
}

#[test]
fn specfun_values() {
    let out = stdout(&["specfun", "constant", "golomb_dickman"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "golomb_dickman");
    assert!((row[1].parse::<f64>().unwrap() - 0.624_329_988_543_550_9).abs() < 1e-14);
    assert_eq!(row[3], "0.62432998854355087099");
    let rho = stdout(&["specfun", "rho", "--x", "3"]);
    assert!(rho.starts_with("value,abs_err\n0.0486083882911319"));
    let om = stdout(&["specfun", "omega", "--family", "derange", "--x", "2"]);
    assert!(om.contains("1.359140914229522"));
    let lg = stdout(&[
        "specfun", "moment", "--kind", "largest", "--a", "1", "--h", "2",
    ]);
    assert!(lg.contains("0.4266957646"));
}

#[test]
fn ratio_report_and_sweep() {
    let out = stdout(&[
        "ratio",
        "--table",
        "8",
        "--family",
        "graph",
        "--m",
        "300",
        "--x",
        "3",
        "--reproduce",
    ]);
    assert_eq!(
        out.lines().nth(1).unwrap(),
        "8,graph,300,3,900,228.098,228.476,0.378009,true"
    );
    let sweep = stdout(&[
        "ratio",
        "--table",
        "6,7",
        "--family",
        "graph",
        "--m",
        "100",
        "--x",
        "2",
        "--sweep",
        "--reproduce",
    ]);
    assert_eq!(
        sweep,
        "table,m,x=2\n6,100,0.995\n6,inf,1.000\n7,100,1.33745\n7,inf,1.32663\n"
    );
}

#[test]
fn sample_is_reproducible() {
    let a = stdout(&[
        "sample", "--family", "map", "--n", "50", "--trials", "500", "--seed", "9",
    ]);
    let b = stdout(&[
        "--sequential",
        "sample",
        "--family",
        "map",
        "--n",
        "50",
        "--trials",
        "500",
        "--seed",
        "9",
    ]);
    assert_eq!(a, b);
    let one = stdout(&["sample", "--family", "graph", "--n", "3", "--trials", "1"]);
    assert!(one.contains("largest,3.0000000000000000,0,0,3,"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["stats", "--family", "pig", "--n", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["stats", "--family", "graph", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["ratio", "--table", "5", "--family", "map", "--m", "10", "--x", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["specfun", "rho", "--x", "-1"]).status.code(), Some(2));
    assert_eq!(
        run(&["specfun", "rho", "--x", "30", "--tol", "1e-30"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["specfun", "constant", "nope"]).status.code(), Some(2));
}

#[test]
fn cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_in(dir.path(), &["counts", "--family", "graph", "--n", "40"]);
    let b = std::fs::read_to_string(dir.path().join("graph-b.txt")).unwrap();
    assert!(b.starts_with("EXPOLOG-CACHE v1 graph b\n0 1\n1 0\n"));
    let second = run_in(dir.path(), &["counts", "--family", "graph", "--n", "40"]);
    assert_eq!(first.stdout, second.stdout);
    // a corrupted cache is reported and ignored
    std::fs::write(
        dir.path().join("graph-b.txt"),
        b.replace("\n5 12\n", "\n5 13\n"),
    )
    .unwrap();
    let third = run_in(dir.path(), &["counts", "--family", "graph", "--n", "40"]);
    assert_eq!(first.stdout, third.stdout);
    assert!(String::from_utf8_lossy(&third.stderr).contains("ignoring cache"));
}

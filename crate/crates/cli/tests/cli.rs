use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_svsparse"));
    c.env_remove("SVSPARSE_ORACLE_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn svsparse")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn svsparse");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn tmp(name: &str, contents: &[u8]) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("svsparse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn graph(out: &Output) -> svsparse::WeightedDigraph {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    svsparse::parse_graph(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn gen_cycle() {
    let g = graph(&run(&["gen", "cycle", "5"]));
    let mut arcs: Vec<_> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
    arcs.sort();
    assert_eq!(arcs, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
}

#[test]
fn gen_lazy_cycle_weights() {
    let g = graph(&run(&["gen", "lazy-cycle", "8", "0.25"]));
    for e in g.edges() {
        let want = if e.tail == e.head { "3/4" } else { "1/4" };
        assert_eq!(e.w.to_string(), want);
    }
}

#[test]
fn gen_eulerian_random_is_eulerian() {
    let g = graph(&run(&["gen", "eulerian-random", "32", "4", "--seed", "7"]));
    assert!(svsparse::validate_eulerian(&g).unwrap().is_eulerian());
}

#[test]
fn gen_then_sparsify() {
    let g = run(&["gen", "cycle", "8"]);
    let out = run_stdin(&["sparsify", "--eps", "0.3", "--seed", "1"], &g.stdout);
    let h = graph(&out);
    assert_eq!(h.n(), 8);
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["command"], "sparsify");
    assert!(report["measured_eps"].as_f64().unwrap() <= 0.3);
}

#[test]
fn same_seed_same_bytes() {
    let g = run(&["gen", "regular-random", "40", "8", "--seed", "3"]);
    let args = ["sparsify", "--eps", "0.5", "--seed", "9", "--c", "0.000001", "--phi", "0.5", "--no-verify"];
    let a = run_stdin(&args, &g.stdout);
    let b = run_stdin(&args, &g.stdout);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let again = run(&["gen", "regular-random", "40", "8", "--seed", "3"]);
    assert_eq!(g.stdout, again.stdout);
}

#[test]
fn verify_self_is_zero() {
    let g = run(&["gen", "eulerian-random", "12", "3", "--seed", "2"]);
    let p = tmp("self.txt", &g.stdout);
    let ps = p.to_str().unwrap();
    for notion in ["sv", "standard", "uc"] {
        let out = run(&["verify", "--notion", notion, "--a", ps, "--b", ps, "--grid", "16"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(v["epsilon"].as_f64().unwrap() < 1e-9);
        assert_eq!(v["kernel_ok"], true);
    }
}

#[test]
fn stationary_and_cut() {
    let g = run(&["gen", "strongly-connected", "10", "15", "3", "--seed", "4"]);
    let st = run_stdin(&["stationary"], &g.stdout);
    let v: serde_json::Value = serde_json::from_slice(&st.stdout).unwrap();
    let pi: Vec<f64> = v["pi"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let q = tmp("queries.txt", b"0 1 2 ; 3 4\n# comment\n5,6 ; 0 9\n");
    let out = run_stdin(&["cut", "--ell", "4", "--eps", "0.25", "--queries", q.to_str().unwrap()], &g.stdout);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<serde_json::Value> =
        std::str::from_utf8(&out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let diff = (r["value"].as_f64().unwrap() - r["reference"].as_f64().unwrap()).abs();
        assert!(diff <= r["bound"].as_f64().unwrap() + 1e-12);
    }
}

#[test]
fn power_and_solve() {
    let g = run(&["gen", "eulerian-random", "16", "4", "--seed", "5"]);
    let out = run_stdin(&["power", "--eps", "0.4", "--ell", "3", "--lazy", "1/2"], &g.stdout);
    let h = graph(&out);
    assert!(svsparse::validate_eulerian(&h).unwrap().is_eulerian());

    let c = run(&["gen", "circulant", "16", "0", "1", "5"]);
    let out = run_stdin(&["solve", "--k", "3", "--mode", "exact"], &c.stdout);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 3);
    assert!(v["final_error"].as_f64().unwrap().is_finite());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sparsify"]).status.code(), Some(2));
    let dag = b"p 3 2\n0 1 1\n1 2 1\n";
    let out = run_stdin(&["stationary"], dag);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strongly connected"));
}

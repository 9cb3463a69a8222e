use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("swapopt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn swapopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swapopt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(name: &str, text: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_exit_codes() {
    let dev = data("tee4.json");
    let lowered = swapopt(&["lower", "--edge", "0,1", "--strategy", "optimized", "--device", &dev]);
    assert!(lowered.status.success());
    let path = write("opt.txt", &stdout(&lowered));
    assert!(stdout(&lowered).starts_with("qubits 4\n"));
    assert_eq!(swapopt(&["verify", &path, "--target", "swap"]).status.code(), Some(0));

    let pair = write("pair.json", &swapopt_pair_device());
    let lowered = swapopt(&["lower", "--edge", "0,1", "--device", &pair]);
    let path = write("opt2.txt", &stdout(&lowered));
    let ok = swapopt(&["verify", &path, "--target", "swap"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("equivalent phase="));

    let cnot = write("cnot.txt", "qubits 2\nrz -90 0\nry 180 0\nrx 90 1\ncr+- 0 1\n");
    assert_eq!(swapopt(&["verify", &cnot, "--target", "notc"]).status.code(), Some(1));
    assert_eq!(swapopt(&["verify", &cnot, "--target", "cnot"]).status.code(), Some(0));
    assert_eq!(swapopt(&["verify", "/no/such/file", "--target", "swap"]).status.code(), Some(2));
    let bad = write("bad.txt", "qubits 2\ncr 0 1\n");
    assert_eq!(swapopt(&["verify", &bad, "--target", "swap"]).status.code(), Some(2));
}

fn swapopt_pair_device() -> String {
    r#"{"name": "pair", "dt_ns": 0.2222222222222222,
        "qubits": [{"id": 0, "t1q_dt": 160, "T1_us": 75, "T2_us": 75},
                   {"id": 1, "t1q_dt": 160, "T1_us": 75, "T2_us": 75}],
        "edges": [{"control": 0, "target": 1, "tcr_dt": 1216}]}"#
        .to_string()
}

#[test]
fn verify_against_unitary_file_and_dump() {
    let cnot = write("cnot2.txt", "qubits 2\nrz -90 0\nry 180 0\nrx 90 1\ncr+- 0 1\n");
    let dumped = swapopt(&["verify", &cnot, "--target", "cnot", "--dump"]);
    assert_eq!(dumped.status.code(), Some(0));
    let text = stdout(&dumped);
    let csv: String = text.lines().filter(|l| !l.starts_with("equivalent")).map(|l| format!("{l}\n")).collect();
    let target = write("cnot.csv", &csv);
    assert_eq!(swapopt(&["verify", &cnot, "--target", &target]).status.code(), Some(0));
    assert_eq!(swapopt(&["verify", &cnot, "--target", &cnot, "--format", "json"]).status.code(), Some(0));
}

#[test]
fn demo_ledger_on_casablanca() {
    let out = swapopt(&["demo", "--device", &data("casablanca-sim.json")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("edge ").count(), 6);
    let last_edge = text.split("edge 5 -> 6").nth(1).unwrap();
    let final_row = last_edge.lines().find(|l| l.trim_start().starts_with("optimized ")).unwrap();
    assert!(final_row.contains("2t1q+3tCR"));
    assert!(final_row.contains("270+540"));
    assert!(final_row.contains("3968 dt"));
    assert!(!text.contains("UNVERIFIED"));
}

#[test]
fn demo_needs_edges() {
    let two = swapopt(&["demo", "--device", &data("tee4.json"), "--format", "csv"]);
    assert!(two.status.success());
    assert_eq!(stdout(&two).lines().count(), 1 + 3 * 6);
    let lonely = write(
        "lonely.json",
        r#"{"name": "lonely", "dt_ns": 0.2, "qubits": [{"id": 0, "t1q_dt": 160, "T1_us": 50, "T2_us": 60}], "edges": []}"#,
    );
    assert_eq!(swapopt(&["demo", "--device", &lonely]).status.code(), Some(2));
}

#[test]
fn model_prints_the_factor() {
    let out = swapopt(&[
        "model", "--error-opt", "0.033", "--error-std", "0.037", "--k", "14", "--dt-us", "0.63", "--t1-us", "75",
        "--t2-us", "75", "--n", "8",
    ]);
    assert!(out.status.success());
    let f: f64 = stdout(&out).trim().parse().unwrap();
    assert!((f - 1.21).abs() < 0.01);
    let bad = swapopt(&[
        "model", "--error-opt", "1.5", "--error-std", "0.037", "--k", "1", "--dt-us", "0", "--t1-us", "75", "--t2-us",
        "75", "--n", "1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn speedups_csv() {
    let csv = scratch("speedups.csv");
    let out = swapopt(&["speedups", "--device", &data("casablanca-sim.json"), "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "control,target,t1q_dt,tcr_dt,orientation_speedup,optimized_speedup");
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("5,6,160,1216,"));
}

#[test]
fn optimize_reproduces_the_final_template() {
    let swap = write("swap.txt", "qubits 2\nswap 1 0\n");
    let out = swapopt(&["optimize", &swap, "--device", &write("pair2.json", &swapopt_pair_device())]);
    assert!(out.status.success());
    let path = write("optimized.txt", &stdout(&out));
    let m = swapopt(&["metrics", &path, "--device", &write("pair3.json", &swapopt_pair_device())]);
    let text = stdout(&m);
    assert!(text.contains("depth 2t1q+3tCR"));
    assert!(text.contains("duration 3968 dt"));
    assert!(text.contains("rotation 270+540"));
}

#[test]
fn irb_sim_is_deterministic() {
    let run = |name: &str, seed: &str| {
        let out = scratch(name);
        let o = swapopt(&[
            "irb-sim", "--device", &data("line6.json"), "--noise", &data("noise.json"), "--swap", "standard",
            "--edge", "2,3", "--lengths", "1,2,4,8,16", "--sequences", "3", "--seed", seed, "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("irb-a.json", "5");
    assert_eq!(a, run("irb-b.json", "5"));
    assert_ne!(a, run("irb-c.json", "6"));
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["seed"], 5);
    let e = doc["result"]["gate_error"].as_f64().unwrap();
    assert!(e > 0.0 && e < 0.1);
}

#[test]
fn bench_reports_are_byte_identical() {
    let run = |tag: &str| {
        let (json, csv) = (scratch(&format!("bench-{tag}.json")), scratch(&format!("bench-{tag}.csv")));
        let o = swapopt(&[
            "bench", "--name", "long-swap", "--n", "2,3,4", "--device", &data("line6.json"), "--noise",
            &data("noise.json"), "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(json).unwrap(), std::fs::read_to_string(csv).unwrap())
    };
    let (ja, ca) = run("a");
    let (jb, cb) = run("b");
    assert_eq!(ja, jb);
    assert_eq!(ca, cb);
    assert_eq!(ca.lines().count(), 1 + 3 * 2);
    assert!(ca.starts_with("benchmark,n,strategy,k,swap_count,success"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(swapopt(&["lower", "--device", &data("tee4.json")]).status.code(), Some(2));
    assert_eq!(swapopt(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        swapopt(&["lower", "--edge", "0,2", "--device", &data("tee4.json")]).status.code(),
        Some(2)
    );
    assert_eq!(
        swapopt(&["verify", "x", "--target", "swap", "--tol", "-1"]).status.code(),
        Some(2)
    );
}

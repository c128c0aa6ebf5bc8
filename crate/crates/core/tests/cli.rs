use std::fs;
use std::path::Path;
use std::process::Command;

fn mecplace(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mecplace"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mecplace(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn select_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sites = dir.path().join("sites.json");
    let metrics = dir.path().join("metrics.csv");
    let reqs = dir.path().join("requests.json");
    let report = dir.path().join("report.json");
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"resources": {"servers_per_site": 2}}"#).unwrap();

    ok(&[
        "select",
        "--dmax",
        "2",
        "--out",
        p(&sites),
        "--metrics-csv",
        p(&metrics),
        "--seeds",
        "5",
    ]);
    let sel: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&sites).unwrap()).unwrap();
    assert_eq!(sel["sites"].as_array().unwrap().len(), 5);
    let csv = fs::read_to_string(&metrics).unwrap();
    assert!(csv.starts_with("k,avg_delay_ms,max_delay_ms,method\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 10);

    ok(&["generate", "--count", "8", "--seed", "3", "--out", p(&reqs)]);
    for solver in ["exact", "sa", "greedy", "baseline"] {
        ok(&[
            "solve",
            "--solver",
            solver,
            "--requests",
            p(&reqs),
            "--sites",
            p(&sites),
            "--config",
            p(&config),
            "--seed",
            "1",
            "--sa-iters",
            "10",
            "--out",
            p(&report),
        ]);
        let r: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(r["solver"], solver);
        let csv = ok(&[
            "verify",
            "--requests",
            p(&reqs),
            "--config",
            p(&config),
            "--solution",
            p(&report),
        ]);
        assert!(csv.starts_with("scenario,kind,target,affected,survived,pass\n"));
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    }
}

#[test]
fn random_selection_needs_k() {
    let out = mecplace(&["select", "--method", "random"]);
    assert_eq!(out.status.code(), Some(2));
    let s = ok(&["select", "--method", "random", "--k", "4", "--seed", "9"]);
    let sel: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(sel["sites"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_fails_on_a_broken_solution() {
    let dir = tempfile::tempdir().unwrap();
    let reqs = dir.path().join("requests.json");
    let sol = dir.path().join("solution.json");
    let sites = dir.path().join("sites.json");
    fs::write(&sites, "[25, 18]").unwrap();
    ok(&["generate", "--count", "1", "--seed", "3", "--out", p(&reqs)]);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&reqs).unwrap()).unwrap();
    let ty = r[0]["type"].as_u64().unwrap();
    // Primary and backup on the same server.
    let slot =
        |role: &str| serde_json::json!({"site": 0, "server": 0, "vnf_type": ty, "role": role});
    let s = serde_json::json!({
        "sites_used": [0],
        "active_servers": [{"site": 0, "server": 0}],
        "vnf_instances": [
            {"site": 0, "server": 0, "vnf_type": ty, "role": "primary", "count": 1},
            {"site": 0, "server": 0, "vnf_type": ty, "role": "backup", "count": 1}
        ],
        "assignments": [{"request": 0, "primary": slot("primary"), "backup": slot("backup")}]
    });
    fs::write(&sol, s.to_string()).unwrap();
    let out = mecplace(&[
        "verify",
        "--requests",
        p(&reqs),
        "--sites",
        p(&sites),
        "--solution",
        p(&sol),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv
        .lines()
        .any(|l| l.starts_with("0,server,") && l.ends_with(",false")));
}

#[test]
fn bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    fs::write(
        &plan,
        r#"{"request_counts": [8], "seeds_per_point": 1, "sa": {"max_iterations": 5}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&["bench", "--plan", p(&plan), "--out", p(&out)]);
    for f in ["raw.csv", "agg.csv", "timing.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let agg = fs::read_to_string(out.join("agg.csv")).unwrap();
    assert_eq!(agg.lines().count(), 1 + 4);
}

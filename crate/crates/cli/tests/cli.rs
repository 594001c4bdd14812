use std::fs;
use std::process::{Command, Output};

fn dcnflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcnflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn build_prints_sizes_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("gq");
    let o = dcnflow(&["build", "--topology", "gqstar:2:3", "--diameter", "--out", prefix.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in ["servers: 36", "switches: 9", "switch_ports: 4", "links: 54", "directional_links: 108"] {
        assert!(text.contains(line), "{line} missing from {text}");
    }
    assert!(text.contains("hop_diameter: 5"), "{text}");
    let nodes = fs::read_to_string(dir.path().join("gq.nodes.csv")).unwrap();
    let links = fs::read_to_string(dir.path().join("gq.links.csv")).unwrap();
    assert_eq!(nodes.lines().count(), 1 + 45);
    assert_eq!(links.lines().count(), 1 + 54);
}

#[test]
fn route_prints_path_or_failure() {
    let o = dcnflow(&["route", "--topology", "gqstar:2:3", "--router", "gq-star", "--src", "0", "--dst", "35"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("path: 0 "));
    assert!(text.contains("hops: 5"));

    // Cutting both links of server 9 isolates it.
    let dir = tempfile::tempdir().unwrap();
    let faults = dir.path().join("f.txt");
    let prefix = dir.path().join("gq");
    assert!(dcnflow(&["build", "--topology", "gqstar:2:3", "--out", prefix.to_str().unwrap()]).status.success());
    let links = fs::read_to_string(dir.path().join("gq.links.csv")).unwrap();
    let switch = links
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse::<u32>().unwrap()).collect::<Vec<_>>())
        .find(|f| f[0] == 9 && f[1] >= 36)
        .unwrap()[1];
    fs::write(&faults, format!("9 8\n9 {switch}\n")).unwrap();
    let o = dcnflow(&[
        "route",
        "--topology",
        "gqstar:2:3",
        "--router",
        "gq-star",
        "--src",
        "0",
        "--dst",
        "9",
        "--faults",
        faults.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("failed:"));
}

#[test]
fn run_writes_summary_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        "# degraded small network\ntopology = gqstar:3:3\nrouter = gq-star\nfault_fraction = 0.1\nseeds = 1, 2\nassert = true\n",
    )
    .unwrap();
    let prefix = dir.path().join("out");
    let o = dcnflow(&["--config", config.to_str().unwrap(), "run", "--out", prefix.to_str().unwrap(), "--loads"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(dir.path().join("out.summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("topology,router,pattern,fault_fraction,seed,N,F,ABT"));
    assert!(lines[1].starts_with("gqstar:3:3,gq-star,all2all,0.1,1,"));
    assert!(dir.path().join("out.seed2.loads.csv").exists());
    assert!(dir.path().join("out.seed2.hist.csv").exists());

    // The command line overrides the file.
    let o = dcnflow(&["--config", config.to_str().unwrap(), "run", "--seeds", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",0.1,5,"));
}

#[test]
fn cost_table_on_stdout() {
    let o = dcnflow(&["cost", "--topology", "dpillar:4:18,ficonn:2:24", "--rho", "0.05", "--gamma", "0.157"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,k,n,rho,gamma,cost_norm");
    assert!(lines[1].starts_with("dpillar,4,18,0.05,0.157,1.09"));
    assert!(lines[2].starts_with("ficonn,2,24,0.05,0.157,0.98"));
}

#[test]
fn sweep_exit_status_reflects_failed_cells() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.conf");
    fs::write(&grid, "topology = gqstar:2:3\nrouter = dimension-order\n").unwrap();
    let out = dir.path().join("ok");
    assert!(dcnflow(&["sweep", "--grid", grid.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap().lines().count(), 2);

    fs::write(&grid, "topology = gqstar:2:3\nrouter = dimension-order, tor\n").unwrap();
    let out = dir.path().join("bad");
    let o = dcnflow(&["sweep", "--grid", grid.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(out.join("failed.txt").exists());
}

#[test]
fn bad_arguments_fail_cleanly() {
    for args in [
        &["run", "--topology", "gqstar:2:3", "--router", "nope"][..],
        &["run", "--topology", "torus:2:3", "--router", "bfs"],
        &["run", "--topology", "gqstar:2:3", "--router", "tor"],
        &["run", "--topology", "gqstar:2:3", "--router", "gq-star", "--fault-fraction", "0.5"],
        &["--config", "/nonexistent/file", "run"],
    ] {
        let o = dcnflow(args);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

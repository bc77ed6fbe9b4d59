use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl-ou")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dunkl-ou-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn identity_suite_passes() {
    let csv = scratch("identity.csv");
    let json = scratch("identity.json");
    let o = run(&["verify", "--group", "rank1:k=1", "--suite", "identity", "--out-csv", csv.to_str().unwrap(), "--out-json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("id,group,function,params,kind,path,status,lhs,rhs,margin,tolerance,pass\n"));
    assert!(text.contains("identity.eigen_gate"));
    assert!(std::fs::read_to_string(&json).unwrap().trim_start().starts_with('['));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["verify", "--group", "rank1:q=1"],
        vec!["verify", "--suite", "everything"],
        vec!["verify", "--t", "0.1,-1"],
        vec!["taylor", "--function", "x2"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(&["verify", "--group", "z2:2:k=1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 2 multiplicities"));
}

#[test]
fn config_file_is_read_and_unknown_keys_rejected() {
    let good = scratch("good.cfg");
    std::fs::write(&good, "# sweep grid\ngroup = rank1:k=1\nk = 0, 1/2\nbattery_size = 4\n").unwrap();
    let o = run(&["sweep", "--config", good.to_str().unwrap(), "--print-config"]);
    assert_eq!(o.status.code(), Some(0));
    let canonical = stdout(&o);
    assert!(canonical.contains("k = 0,1/2\n") && canonical.contains("battery_size = 4\n"));

    let again = scratch("again.cfg");
    std::fs::write(&again, &canonical).unwrap();
    let o = run(&["sweep", "--config", again.to_str().unwrap(), "--print-config"]);
    assert_eq!(stdout(&o), canonical);

    let bad = scratch("bad.cfg");
    std::fs::write(&bad, "group = rank1:k=1\ncolour = blue\n").unwrap();
    let o = run(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}

#[test]
fn flags_override_the_config_file() {
    let cfg = scratch("override.cfg");
    std::fs::write(&cfg, "seed = 5\nquad_order = 32\n").unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "9", "--print-config"]);
    let text = stdout(&o);
    assert!(text.contains("seed = 9\n") && text.contains("quad_order = 32\n"));
}

#[test]
fn sweep_witness_tracks_the_constant() {
    let o = run(&["sweep", "--group", "rank1:k=1", "--k", "0,1/2,1,2", "--battery-size", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for (label, c) in [("rank1:k=0", "1"), ("rank1:k=1/2", "2"), ("rank1:k=1", "3"), ("rank1:k=2", "5")] {
        let line = text.lines().find(|l| l.starts_with(label) && l.split_whitespace().next() == Some(label)).unwrap();
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!((cols[1], cols[2], cols[3]), (c, c, "true"), "{line}");
    }
}

#[test]
fn taylor_table_starts_at_the_second_moment() {
    // f = x, k = 1: S_0 = ∫x² dm_k = 3 and ψ(1/2) = 3e^{−1}
    let o = run(&["taylor", "--group", "rank1:k=1", "--t", "0.5", "--terms", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = |n: &str| text.lines().find(|l| l.split_whitespace().next() == Some(n)).unwrap().to_string();
    let cols: Vec<f64> = row("0").split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(cols[0], 3.0);
    assert!((cols[1] - 3.0 * (-1f64).exp()).abs() < 1e-15);
    let last: Vec<f64> = row("12").split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
    assert!(last[2] < 1e-9);
}

#[test]
fn entropy_command_reports_ratios() {
    let o = run(&["entropy", "--group", "rank1:k=1", "--battery-size", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("entropy.log_sobolev_sup"));
}

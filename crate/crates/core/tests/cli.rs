use std::fs;
use std::process::{Command, Output};

fn pnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnc"))
        .args(args)
        .output()
        .expect("run pnc")
}

#[test]
fn verify_valid_table_exits_zero() {
    let out = pnc(&["verify", "--mod", "qam16"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("modulation,"));
    assert!(csv.contains("qam16,modular,256,49,16,pass,pass,pass"));
}

#[test]
fn verify_xor_pam4_exits_two_with_counterexample() {
    let out = pnc(&["verify", "--mod", "pam4", "--mapping", "xor", "--labeling", "binary"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("counterexample: C("), "{err}");
}

#[test]
fn invalid_input_exits_one() {
    assert_eq!(pnc(&["verify", "--mod", "qam512"]).status.code(), Some(1));
    assert_eq!(pnc(&["verify", "--bogus"]).status.code(), Some(1));
    assert_eq!(pnc(&["opp-ber", "--ratio-db", "0:x:5"]).status.code(), Some(1));
    assert_eq!(pnc(&["ber", "--symbols", "0", "--snr-db", "5"]).status.code(), Some(1));
    assert_eq!(pnc(&["nope"]).status.code(), Some(1));
    assert_eq!(pnc(&["--help"]).status.code(), Some(0));
    assert_eq!(pnc(&["--version"]).status.code(), Some(0));
}

#[test]
fn opp_ber_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let args = ["opp-ber", "--mod", "qam16", "--ratio-db", "0:40:5", "--symbols", "20000", "--seed", "7"];
    for out in [&a, &b] {
        let mut v = args.to_vec();
        v.extend(["--out", out.to_str().unwrap()]);
        assert_eq!(pnc(&v).status.code(), Some(0));
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    assert_eq!(String::from_utf8_lossy(&first).lines().count(), 10);

    let manifest = dir.path().join("a.csv.manifest");
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.starts_with("subcommand=opp-ber\n"));
    assert!(text.contains("seed=7\n"));
    let replay = pnc(&["opp-ber", "--config", manifest.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(first, fs::read(&c).unwrap());
}

#[test]
fn explicit_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "mod=pam4\nmapping=xor\nlabeling=binary\n").unwrap();
    let conf = conf.to_str().unwrap();
    assert_eq!(pnc(&["verify", "--config", conf]).status.code(), Some(2));
    assert_eq!(pnc(&["verify", "--config", conf, "--mapping", "modular"]).status.code(), Some(0));
}

#[test]
fn stdout_mode_writes_manifest_to_stderr() {
    let out = pnc(&["table", "--mod", "bpsk"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv, "index,label,bits,in_phase,quadrature,grid_i,grid_q\n0,0,0,-1,0,0,0\n1,1,1,1,0,1,0\n");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("# subcommand=table\n"));
    assert!(err.contains("# mod=pam2\n"));
}

#[test]
fn other_subcommands_emit_csv() {
    let runs: [&[&str]; 4] = [
        &["map", "--mod", "qam8"],
        &["analytic", "--mod", "qam64", "--snr-db", "10:20:5", "--ratio-db", "10,30"],
        &["ber", "--scenario", "relay", "--mod", "qpsk", "--snr-db", "8", "--symbols", "5000"],
        &["throughput", "--distance", "0,100", "--seeds", "20"],
    ];
    let rows = [64 + 1, 3 * 2 + 1, 2, 8 + 1];
    for (args, want) in runs.iter().zip(rows) {
        let out = pnc(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), want, "{args:?}");
    }
}

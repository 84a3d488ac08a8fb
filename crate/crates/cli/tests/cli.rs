//! End-to-end tests of the tdeg binary: flag parsing, exit codes, output
//! determinism, and the certificate round trip through `verify`.

use std::path::PathBuf;
use std::process::{Command, Output};

fn tdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tdeg_stdin(args: &[&str], input: &str) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_tdeg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tdeg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const CUBE: &str = r#"{"coeffs":["0","0","0","1"]}"#;
const ODD_SAMPLER: &str = r#"{"entries":["0","1"],"constant":"0"}"#;

#[test]
fn stream_emits_bits_and_reports_auto_offset() {
    let out = tdeg(&["stream", "--poly", r#"{"coeffs":["0","1"]}"#, "--blocks", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "1101001000\n");

    // (n-2)^3 needs offset 8, reported on stderr
    let out = tdeg(&[
        "stream",
        "--poly",
        r#"{"coeffs":["-8","12","-6","1"]}"#,
        "--blocks",
        "2",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "110000000\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset: 8"));
}

#[test]
fn stream_rejects_garbage_with_exit_2() {
    let out = tdeg(&["stream", "--poly", "not json", "--blocks", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn weight_machine_synthesis_run_and_compose() {
    let machine = tmp("odd.json");
    let out = tdeg(&[
        "fst-from-weight",
        "--weight",
        ODD_SAMPLER,
        "--skip",
        "0",
        "--out",
        machine.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // run it on the first blocks of the cube stream
    let cube_prefix = stdout_of(&tdeg(&["stream", "--poly", CUBE, "--blocks", "6"]));
    let out = tdeg(&[
        "fst-run",
        "--fst",
        machine.to_str().unwrap(),
        "--bits",
        cube_prefix.trim(),
    ]);
    assert!(out.status.success());
    // output must be a prefix of the (2n+1)^3 stream
    let target = stdout_of(&tdeg(&[
        "stream",
        "--poly",
        r#"{"coeffs":["1","6","12","8"]}"#,
        "--blocks",
        "3",
    ]));
    let got = stdout_of(&out);
    assert!(got.trim().starts_with(target.trim()));

    // compose with itself: (2n+1)^3 sampled odd again is (4n+3)^3
    let composed = tmp("odd2.json");
    let out = tdeg(&[
        "fst-compose",
        "--first",
        machine.to_str().unwrap(),
        "--second",
        machine.to_str().unwrap(),
        "--out",
        composed.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = tdeg_stdin(
        &["fst-run", "--fst", composed.to_str().unwrap(), "--stdin"],
        &cube_prefix,
    );
    assert!(out.status.success());
    let target = stdout_of(&tdeg(&[
        "stream",
        "--poly",
        r#"{"coeffs":["27","108","144","64"]}"#,
        "--blocks",
        "1",
    ]));
    assert!(stdout_of(&out).trim().starts_with(target.trim()));
}

#[test]
fn apply_weight_prints_the_product() {
    let out = tdeg(&["apply-weight", "--weight", ODD_SAMPLER, "--poly", CUBE]);
    assert!(out.status.success());
    assert_eq!(
        stdout_of(&out).trim(),
        r#"{"coeffs":["1","6","12","8"]}"#
    );
}

#[test]
fn classify_prints_degree_and_chain() {
    let out = tdeg(&["classify", "--weight", ODD_SAMPLER, "--shift", "0"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("OneT(2)\n"), "got:\n{text}");
    assert!(text.contains("product: 8n^3 + 12n^2 + 6n + 1"));

    let out = tdeg(&[
        "classify",
        "--weight",
        r#"{"entries":["1","3","3"],"constant":"7"}"#,
        "--shift",
        "0",
    ]);
    assert!(stdout_of(&out).starts_with("Bottom3\n"));

    // negative shifts parse
    let out = tdeg(&["classify", "--weight", ODD_SAMPLER, "--shift", "-3"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).starts_with("OneT(1)\n"));
}

#[test]
fn classify_certificate_round_trips_through_verify() {
    let cert = tmp("classify-odd.json");
    let out = tdeg(&[
        "classify",
        "--weight",
        ODD_SAMPLER,
        "--shift",
        "0",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = tdeg(&[
        "verify",
        "--certificate",
        cert.to_str().unwrap(),
        "--blocks",
        "25",
    ]);
    assert!(out.status.success(), "verify failed: {}", stdout_of(&out));
    assert_eq!(stdout_of(&out).trim(), "ok");

    // a 2-transform classification round-trips too
    let cert = tmp("classify-pair.json");
    let out = tdeg(&[
        "classify",
        "--weight",
        r#"{"entries":["1","1"],"constant":"0"}"#,
        "--shift",
        "0",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = tdeg(&["verify", "--certificate", cert.to_str().unwrap(), "--blocks", "20"]);
    assert!(out.status.success());
}

#[test]
fn reduce2_certificate_round_trips_through_verify() {
    let cert = tmp("reduce2.json");
    let out = tdeg(&[
        "reduce2", "--a", "1", "--b", "1", "--p", "2", "--r", "0", "--s", "1",
        "--certificate", cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("\"a1\": \"7/288\""), "got:\n{text}");
    assert!(text.contains("\"constant_delta\": \"7/16\""));

    let out = tdeg(&["verify", "--certificate", cert.to_str().unwrap(), "--blocks", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "ok");
}

#[test]
fn canonicalize_certificate_round_trips_through_verify() {
    let cert = tmp("canon.json");
    let out = tdeg(&[
        "canonicalize", "--a", "7", "--b", "3",
        "--certificate", cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).starts_with("canonical: 7\n"));
    let out = tdeg(&["verify", "--certificate", cert.to_str().unwrap(), "--blocks", "1"]);
    assert!(out.status.success());
}

#[test]
fn classify_tuple_inputs() {
    // a polynomial tuple product classifies through its collapse
    let twin = r#"{"weights":[{"entries":["1"],"constant":"0"},{"entries":["1"],"constant":"0"}]}"#;
    let out = tdeg(&["classify", "--tuple", twin]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_of(&out).contains("OneT(1)"));

    // a non-polynomial tuple product is refused with the residues listed
    let skewed = r#"{"weights":[{"entries":["1"],"constant":"0"},{"entries":["2"],"constant":"0"}]}"#;
    let out = tdeg(&["classify", "--tuple", skewed]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("not a polynomial"), "stderr: {err}");
    assert!(err.contains("residue"), "stderr: {err}");

    // tuple classification is pinned to shift 0
    let out = tdeg(&["classify", "--tuple", twin, "--shift", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_relations_and_exit_codes() {
    let out = tdeg(&["compare", "--left", "one:2", "--right", "one:6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).trim(), "above");

    // bare integers name 1-transform degrees too
    let out = tdeg(&["compare", "--left", "2", "--right", "6"]);
    assert_eq!(stdout_of(&out).trim(), "above");

    let out = tdeg(&["compare", "--left", "one:4", "--right", "one:6"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_of(&out).trim(), "incomparable");

    let out = tdeg(&["compare", "--left", "bottom", "--right", "one:7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).trim(), "below");

    let out = tdeg(&["compare", "--left", "zero", "--right", "bottom"]);
    assert_eq!(stdout_of(&out).trim(), "below");

    let out = tdeg(&["compare", "--left", "one:0", "--right", "one:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_certificate_replays_the_divisibility_step() {
    let cert = tmp("div.json");
    let out = tdeg(&[
        "compare", "--left", "one:2", "--right", "one:6",
        "--certificate", cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = tdeg(&["verify", "--certificate", cert.to_str().unwrap(), "--blocks", "30"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "ok");

    // no replayable certificate for bottom comparisons
    let out = tdeg(&[
        "compare", "--left", "bottom", "--right", "one:7",
        "--certificate", cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_rejects_tampered_certificates_with_exit_1() {
    let cert = tmp("tampered.json");
    let out = tdeg(&[
        "reduce2", "--a", "1", "--b", "1", "--p", "2", "--r", "0", "--s", "1",
        "--certificate", cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&cert).unwrap();
    std::fs::write(&cert, text.replace("\"7/288\"", "\"5/288\"")).unwrap();
    let out = tdeg(&["verify", "--certificate", cert.to_str().unwrap(), "--blocks", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).starts_with("invalid"));

    // unreadable JSON is invalid input, not a failed verification
    std::fs::write(&cert, "{").unwrap();
    let out = tdeg(&["verify", "--certificate", cert.to_str().unwrap(), "--blocks", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lattice_formats() {
    let out = tdeg(&["lattice", "--max", "6", "--format", "dot"]);
    assert!(out.status.success());
    let dot = stdout_of(&out);
    for edge in ["one1 -> one2;", "one1 -> one3;", "one1 -> one5;",
                 "one2 -> one4;", "one2 -> one6;", "one3 -> one6;"] {
        assert!(dot.contains(edge), "missing {edge} in:\n{dot}");
    }

    let out = tdeg(&["lattice", "--max", "12", "--format", "json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let edges: Vec<(u64, u64)> = parsed["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let from = e["from"].as_str().unwrap().strip_prefix("one").unwrap();
            let to = e["to"].as_str().unwrap().strip_prefix("one").unwrap();
            (from.parse().unwrap(), to.parse().unwrap())
        })
        .collect();
    assert!(edges.contains(&(4, 12)));
    assert!(edges.contains(&(6, 12)));
    assert!(!edges.contains(&(3, 12)));
}

#[test]
fn outputs_are_deterministic() {
    let a = tdeg(&["classify", "--weight", ODD_SAMPLER, "--shift", "0"]);
    let b = tdeg(&["classify", "--weight", ODD_SAMPLER, "--shift", "0"]);
    assert_eq!(a.stdout, b.stdout);
    let a = tdeg(&["lattice", "--max", "12", "--format", "json"]);
    let b = tdeg(&["lattice", "--max", "12", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

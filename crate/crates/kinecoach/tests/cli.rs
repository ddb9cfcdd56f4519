use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::mpsc;

use kinecoach::llm::{generate_feedback, LlmConfig};
use kinecoach_core::PromptBundle;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn kinecoach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinecoach"))
        .args(args)
        .env_remove("KINECOACH_API_KEY")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(dir: &Path) -> PathBuf {
    let out = dir.join("report.json");
    let o = kinecoach(&["features", "--input", path(&data("synthetic_forehand.json")), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

/// Serves one request and hands back (headers, body).
fn one_shot_server(reply: &'static str) -> (String, mpsc::Receiver<(String, String)>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/v1", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut headers = String::new();
        let mut length = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            if let Some((k, v)) = line.split_once(':') {
                if k.eq_ignore_ascii_case("content-length") {
                    length = v.trim().parse().unwrap();
                }
            }
            headers.push_str(&line);
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        let response = format!(
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
            reply.len()
        );
        stream.write_all(response.as_bytes()).unwrap();
        tx.send((headers, String::from_utf8(body).unwrap())).unwrap();
    });
    (base, rx)
}

#[test]
fn mock_reply_is_returned_verbatim() {
    let (base, rx) = one_shot_server(r#"{"choices":[{"message":{"role":"assistant","content":"Overall Score: 7/10\n  keep  spacing "}}]}"#);
    let bundle = PromptBundle { system_prompt: "sys".into(), user_prompt: "usr".into(), input_numbers: Default::default() };
    let config = LlmConfig { api_key: Some("secret".into()), api_base: base, model: "m-1".into(), ..LlmConfig::default() };
    let r = generate_feedback(&bundle, &config);
    assert!(r.ok);
    assert_eq!(r.text, "Overall Score: 7/10\n  keep  spacing ");
    let (headers, body) = rx.recv().unwrap();
    assert!(headers.starts_with("POST /v1/chat/completions"), "{headers}");
    assert!(headers.to_ascii_lowercase().contains("authorization: bearer secret"));
    let body: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(body["model"], "m-1");
    assert_eq!(body["temperature"], 0.2);
    assert_eq!(body["max_tokens"], 120);
    assert_eq!(body["messages"][0]["content"], "sys");
}

#[test]
fn malformed_reply_is_a_soft_failure() {
    let (base, _rx) = one_shot_server(r#"{"choices":[]}"#);
    let bundle = PromptBundle { system_prompt: "s".into(), user_prompt: "u".into(), input_numbers: Default::default() };
    let r = generate_feedback(&bundle, &LlmConfig { api_key: Some("k".into()), api_base: base, ..LlmConfig::default() });
    assert!(!r.ok);
    assert!(r.text.starts_with("ERROR: LLM request failed: malformed response"), "{}", r.text);
}

#[test]
fn ingest_reports_metrics_and_writes_canonical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("canonical.csv");
    let o = kinecoach(&["ingest", "--input", path(&data("synthetic_forehand.json")), "--report", "--out", path(&csv)]);
    assert!(o.status.success());
    let metrics: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(metrics["frame_count"], 90);
    assert_eq!(metrics["joint_count"], 21);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("frame,joint,x,y,z\n"));
    assert_eq!(text.lines().count(), 1 + 90 * 21);
}

#[test]
fn csv_and_json_fixtures_agree() {
    let dir = tempfile::tempdir().unwrap();
    let from_csv = dir.path().join("csv.json");
    let o = kinecoach(&["features", "--input", path(&data("synthetic_forehand.csv")), "--stroke", "forehand_flat", "--out", path(&from_csv)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a: Value = serde_json::from_str(&std::fs::read_to_string(report(dir.path())).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&std::fs::read_to_string(&from_csv).unwrap()).unwrap();
    assert_eq!(a["predicted_stroke"], b["predicted_stroke"]);
    assert_eq!(a["stroke_duration_frames"], b["stroke_duration_frames"]);
    let diff = (a["rotation_range_deg"].as_f64().unwrap() - b["rotation_range_deg"].as_f64().unwrap()).abs();
    assert!(diff < 1e-9, "{diff}");
}

#[test]
fn compare_prints_one_line_per_feature() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(dir.path());
    let o = kinecoach(&["compare", "--report", path(&r)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("Rotation range HIGH: 137.51 vs optimal 70–120"), "{text}");
    let o = kinecoach(&["compare", "--report", path(&r), "--json"]);
    let findings: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(findings.as_array().unwrap().len(), 8);
}

#[test]
fn feedback_dry_run_prints_the_prompt() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(dir.path());
    let o = kinecoach(&["feedback", "--report", path(&r), "--dry-run"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("[system]\n"));
    assert!(text.contains("Stroke type: forehand_flat"));
    assert!(text.contains("Optimal-range comparison:"));
}

#[test]
fn validate_exit_code_follows_compliance() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(dir.path());
    let good = dir.path().join("good.txt");
    std::fs::write(
        &good,
        "Overall Score: 5/10\nRacket velocity is low and the rotation range is excessive.\n\
         Actionable Corrections:\n1. Increase racket speed through contact.\n\
         2. Reduce the backswing rotation.\n3. Increase peak angular velocity with better sequencing.\n",
    )
    .unwrap();
    let o = kinecoach(&["validate", "--feedback", path(&good), "--report", path(&r)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, std::fs::read_to_string(&good).unwrap().replace("through contact", "to 42.7 m/s")).unwrap();
    let o = kinecoach(&["validate", "--feedback", path(&bad), "--report", path(&r), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let check: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(check["fabricated_numbers"], serde_json::json!(["42.7"]));
}

#[test]
fn stats_writes_json_and_box_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stats.json");
    let plots = dir.path().join("plots");
    let o = kinecoach(&["stats", "--samples", path(&data("cohort_12v12.csv")), "--out", path(&out), "--plots", path(&plots)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(stats["n_expert"], 12);
    assert_eq!(stats["features"].as_array().unwrap().len(), 4);
    for f in ["racket_velocity_max", "rotation_range_deg", "peak_angular_velocity", "stroke_duration_s"] {
        let csv = std::fs::read_to_string(plots.join(format!("{f}_boxplot.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }
}

#[test]
fn plot_writes_every_series() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(dir.path());
    let out = dir.path().join("plots");
    assert!(kinecoach(&["plot", "--report", path(&r), "--out", path(&out)]).status.success());
    for name in ["trunk_rotation", "trunk_angular_velocity", "racket_speed", "racket_acceleration", "kinetic_energy"] {
        assert!(out.join(format!("{name}.svg")).exists(), "{name}");
        assert!(out.join(format!("{name}.csv")).exists(), "{name}");
    }
}

#[test]
fn batch_survives_a_broken_file() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.csv");
    std::fs::write(&broken, "frame,joint,x,y,z\n0,left_shoulder,0,0,0\n0,left_shoulder,1,1,1\n").unwrap();
    let out = dir.path().join("out");
    let o = kinecoach(&[
        "run", "--dry-run", "--jobs", "2", "--input", path(&broken), path(&data("synthetic_forehand.json")), "--out", path(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["total"], 2);
    assert_eq!(summary["hard_failures"], 1);
    let broken_entry = summary["strokes"].as_array().unwrap().iter().find(|s| s["id"] == "broken").unwrap();
    let error = broken_entry["error"].as_str().unwrap();
    assert!(error.contains("line 3") && error.contains("duplicate"), "{error}");
    assert!(out.join("synthetic_forehand/prompt.txt").exists());
    let compliance: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("synthetic_forehand/compliance.json")).unwrap()).unwrap();
    assert_eq!(compliance["status"], "skipped");
}

#[test]
fn run_accepts_globs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let pattern = data("synthetic_forehand.*");
    let o = kinecoach(&["run", "--dry-run", "--glob", path(&pattern), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["total"], 2);
    assert!(out.join("synthetic_forehand/report.json").exists());
    assert!(out.join("synthetic_forehand_2/report.json").exists());
}

#[test]
fn usage_and_input_errors() {
    let o = kinecoach(&["features", "--input", "x.csv", "--rate", "-3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kinecoach(&["features", "--input", "/nonexistent/stroke.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    let o = kinecoach(&["run", "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn alias_file_maps_custom_marker_names() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("custom.csv");
    let csv = std::fs::read_to_string(data("synthetic_forehand.csv")).unwrap();
    std::fs::write(&input, csv.replace(",right_shoulder,", ",RSHO_marker,")).unwrap();
    let without = kinecoach(&["features", "--input", path(&input)]);
    let report: Value = serde_json::from_slice(&without.stdout).unwrap();
    assert!(report["rotation_range_deg"].is_null());

    let aliases = dir.path().join("aliases.json");
    std::fs::write(&aliases, r#"{"RSHO_marker": "right_shoulder"}"#).unwrap();
    let with = kinecoach(&["features", "--input", path(&input), "--aliases", path(&aliases)]);
    let report: Value = serde_json::from_slice(&with.stdout).unwrap();
    assert!((report["rotation_range_deg"].as_f64().unwrap() - 137.50987083139756).abs() < 1e-9);
}

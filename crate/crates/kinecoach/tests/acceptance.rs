//! Acceptance criteria 1–8. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails other than the known deviations listed in
//! `KNOWN`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use kinecoach::cohort_io::analyze;
use kinecoach::llm::{LlmConfig, MISSING_KEY_MESSAGE, REQUEST_FAILED_PREFIX};
use kinecoach::pipeline::{run_pipeline, FeedbackStatus, PipelineConfig, StrokeStatus};
use kinecoach::ranges::default_ranges;
use kinecoach_core::kinematics::{
    build_feature_report, central_acceleration, central_velocity, tennis_joint_angles, FeatureConfig, UpAxis,
};
use kinecoach_core::grounding::FeatureValue;
use kinecoach_core::prompt::StrokeContext;
use kinecoach_core::stats::{cohens_d, mann_whitney_u, welch_t};
use kinecoach_core::synthetic::scripted_stroke;
use kinecoach_core::{
    build_context_summary, check_feedback, compare_to_reference, Interval, JointMapper, ReferenceTable,
    SkeletonSequence, Vec3, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Criteria whose literal wording cannot hold. They are reported as FAIL,
/// and the run still requires their narrower substitute check to pass.
const KNOWN: &[u8] = &[1, 3];

struct Outcome {
    pass: bool,
    /// Result of the substitute check, for criteria in `KNOWN`.
    substitute: Option<bool>,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, substitute: None, detail: detail.into() }
}

fn known_outcome(pass: bool, substitute: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, substitute: Some(substitute), detail: detail.into() }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

// 1

fn comparator_fidelity() -> Outcome {
    let mut table = ReferenceTable::new();
    table.insert("forehand_flat", "racket_velocity_max", Interval::new(25.0, 35.0)).unwrap();
    let values = vec![("racket_velocity_max".to_string(), FeatureValue::Number(20.0))];
    let f = &compare_to_reference("forehand_flat", &values, &table)[0];
    let dev = f.deviation_pct.unwrap_or(f64::NAN);
    let abs_err = (dev - 50.0).abs();
    let rel_err = abs_err / 50.0;
    let text_ok = f.verdict == Verdict::Low && f.rendered.contains("20.00 vs optimal 25–35");
    let substitute = text_ok && rel_err <= 1e-9;
    if !substitute {
        return known_outcome(false, false, format!("verdict {:?}, line {:?}, deviation {dev}", f.verdict, f.rendered));
    }
    known_outcome(
        text_ok && abs_err <= 1e-9,
        substitute,
        format!(
            "LOW, \"{}\"; deviation {dev:.12}%: |dev-50| = {abs_err:.1e} (absolute bound 1e-9 unreachable, \
             the formula's own epsilon contributes 5e-9); relative error {rel_err:.1e} <= 1e-9",
            f.rendered
        ),
    )
}

// 2

fn kinematics_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_v: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for _ in 0..1000 {
        let degree = rng.random_range(0..=2);
        let coef: Vec<[f64; 3]> = (0..3)
            .map(|k| {
                if k > degree {
                    [0.0; 3]
                } else {
                    [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]
                }
            })
            .collect();
        let dt = 1.0 / rng.random_range(25.0..240.0);
        let n = rng.random_range(5..120usize);
        let t0 = rng.random_range(-1.0..1.0);
        let time = |i: usize| t0 + i as f64 * dt;
        let p = |t: f64| Vec3::new(
            coef[0][0] + coef[1][0] * t + coef[2][0] * t * t,
            coef[0][1] + coef[1][1] * t + coef[2][1] * t * t,
            coef[0][2] + coef[1][2] * t + coef[2][2] * t * t,
        );
        let v = |t: f64| Vec3::new(
            coef[1][0] + 2.0 * coef[2][0] * t,
            coef[1][1] + 2.0 * coef[2][1] * t,
            coef[1][2] + 2.0 * coef[2][2] * t,
        );
        let a = Vec3::new(2.0 * coef[2][0], 2.0 * coef[2][1], 2.0 * coef[2][2]);
        let positions: Vec<Vec3> = (0..n).map(|i| p(time(i))).collect();

        let vel = central_velocity(&positions, dt).unwrap();
        let exact_v: Vec<Vec3> = (1..n - 1).map(|i| v(time(i))).collect();
        let scale_v = exact_v.iter().map(|x| x.norm()).fold(1.0, f64::max);
        for (num, exact) in vel.iter().zip(&exact_v) {
            worst_v = worst_v.max((*num - *exact).norm() / scale_v);
        }
        let acc = central_acceleration(&positions, dt).unwrap();
        let scale_a = a.norm().max(1.0);
        for num in &acc {
            worst_a = worst_a.max((*num - a).norm() / scale_a);
        }
    }
    outcome(
        worst_v <= 1e-9 && worst_a <= 1e-9,
        format!(
            "1000 seeded degree<=2 trajectories; max relative error velocity {worst_v:.1e}, acceleration \
             {worst_a:.1e} (relative to max(|exact|, 1))"
        ),
    )
}

// 3

fn rotation_matrix(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let (w, x, y, z) = loop {
        let q: [f64; 4] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            break (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        }
    };
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn vertical_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let a: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    [[a.cos(), -a.sin(), 0.0], [a.sin(), a.cos(), 0.0], [0.0, 0.0, 1.0]]
}

fn rigid(seq: &SkeletonSequence, m: [[f64; 3]; 3], shift: Vec3, scale: f64) -> SkeletonSequence {
    seq.map_positions(|v| {
        let r = Vec3::new(
            m[0][0] * v.x() + m[0][1] * v.y() + m[0][2] * v.z(),
            m[1][0] * v.x() + m[1][1] * v.y() + m[1][2] * v.z(),
            m[2][0] * v.x() + m[2][1] * v.y() + m[2][2] * v.z(),
        );
        r * scale + shift
    })
}

fn three_point_angles(seq: &SkeletonSequence) -> BTreeMap<String, Vec<f64>> {
    tennis_joint_angles(seq, UpAxis::Z)
        .angles
        .into_iter()
        .filter(|(k, _)| k != "center_hip_rotation")
        .map(|(k, s)| (k, s.values))
        .collect()
}

fn geometric_invariance() -> Outcome {
    let config = FeatureConfig { up_axis: UpAxis::Z };
    let base = scripted_stroke(90, 60.0).unwrap();
    let base_angles = three_point_angles(&base);
    let base_range = build_feature_report(&base, None, &config).unwrap().rotation_range_deg.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_angle: f64 = 0.0;
    let mut worst_range: f64 = 0.0;
    let mut tilted_range: f64 = 0.0;
    for _ in 0..1000 {
        let shift = Vec3::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let scale = rng.random_range(0.1..10.0);

        let moved = rigid(&base, rotation_matrix(&mut rng), shift, scale);
        let angles = three_point_angles(&moved);
        if angles.keys().ne(base_angles.keys()) {
            return outcome(false, "angle set changed under a rigid transform");
        }
        for (k, series) in &angles {
            for (x, y) in series.iter().zip(&base_angles[k]) {
                worst_angle = worst_angle.max((x - y).abs());
            }
        }
        let r = build_feature_report(&moved, None, &config).unwrap().rotation_range_deg.unwrap();
        tilted_range = tilted_range.max((r - base_range).abs());

        let turned = rigid(&base, vertical_rotation(&mut rng), shift, scale);
        let r = build_feature_report(&turned, None, &config).unwrap().rotation_range_deg.unwrap();
        worst_range = worst_range.max((r - base_range).abs());
    }
    let substitute = worst_angle <= 1e-9 && worst_range <= 1e-9;
    known_outcome(
        substitute && tilted_range <= 1e-9,
        substitute,
        format!(
            "1000 seeded transforms of the synthetic forehand; joint angles (arbitrary rotations) max diff \
             {worst_angle:.1e}; trunk rotation range under arbitrary rotations moves by up to {tilted_range:.1}° \
             (a tilted body leaves the ground plane), under rotations about the vertical axis max diff {worst_range:.1e}"
        ),
    )
}

// 4

fn statistics_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..500 {
        let na = rng.random_range(1..=8);
        let nb = rng.random_range(1..=8);
        let a: Vec<f64> = (0..na).map(|_| f64::from(rng.random_range(0..6))).collect();
        let b: Vec<f64> = (0..nb).map(|_| f64::from(rng.random_range(0..6))).collect();
        let brute: f64 = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 }))
            .sum();
        match mann_whitney_u(&a, &b) {
            Ok(r) if r.statistic == brute => {}
            _ => mismatches += 1,
        }
    }
    let d = cohens_d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
    let mut min_p: f64 = 1.0;
    for _ in 0..50 {
        let g: Vec<f64> = (0..rng.random_range(2..20)).map(|_| rng.random_range(-5.0..5.0)).collect();
        min_p = min_p.min(welch_t(&g, &g).unwrap().p_value);
    }
    outcome(
        mismatches == 0 && (d + 1.0).abs() <= 1e-12 && min_p >= 0.99,
        format!(
            "MWU vs brute force: {} of 500 exact; d({{1,2,3}},{{2,3,4}}) = {d}; Welch identical groups min p = {min_p}",
            500 - mismatches
        ),
    )
}

// 5

const BACKHAND_FEEDBACK: &str = "Overall Score: 4/10
Metrics outside optimal range:
• Rotation range (°): HIGH – significantly excessive.
• Stroke duration (frames at 60fps): LOW – considerably shorter than optimal.
• Peak angular velocity (rad/s): LOW – substantially below the optimal range.
Diagnosis: The backhand stroke is characterized by an excessively large rotation range, leading to a significantly shortened stroke duration and reduced peak angular velocity. This suggests a loss of power and control due to inefficient movement.
Actionable Corrections:
1. Reduce the backswing rotation to a more compact range, focusing on generating power through the core and legs rather than relying on excessive arm swing.
2. Increase the stroke duration by slowing down the swing initiation and focusing on a smoother, more controlled acceleration through the ball.
3. Improve the sequencing of the swing to increase peak angular velocity, ensuring a more powerful and efficient transfer of energy from the lower body to the racket head.
";

fn compliance_determinism() -> Outcome {
    let mut table = ReferenceTable::new();
    for (k, lo, hi) in [("rotation_range_deg", 70.0, 120.0), ("stroke_duration_frames", 60.0, 90.0), ("peak_angular_velocity", 8.0, 16.0)] {
        table.insert("backhand", k, Interval::new(lo, hi)).unwrap();
    }
    let context = StrokeContext {
        stroke: "backhand".into(),
        sample_rate_hz: Some(60.0),
        values: vec![
            ("rotation_range_deg".into(), FeatureValue::Number(142.3)),
            ("stroke_duration_frames".into(), FeatureValue::Number(41.0)),
            ("peak_angular_velocity".into(), FeatureValue::Number(5.6)),
        ],
    };
    let findings = compare_to_reference("backhand", &context.values, &table);
    let verdicts: Vec<Verdict> = findings.iter().map(|f| f.verdict).collect();
    if verdicts != [Verdict::High, Verdict::Low, Verdict::Low] {
        return outcome(false, format!("unexpected findings {verdicts:?}"));
    }
    let bundle = build_context_summary(&context, &findings);
    let check = |text: &str| check_feedback(text, &bundle, &findings);

    let base = check(BACKHAND_FEEDBACK);
    let base_ok = base.pass && base.score == Some(4);

    let no_score = check(&BACKHAND_FEEDBACK.replacen("Overall Score: 4/10\n", "", 1));
    let no_score_ok = !no_score.pass
        && !no_score.has_score_line
        && no_score.has_three_corrections
        && no_score.directions_consistent
        && no_score.fabricated_numbers.is_empty();

    let flipped = check(&BACKHAND_FEEDBACK.replace("HIGH – significantly excessive.", "LOW – significantly below the optimal range."));
    let flipped_ok = !flipped.pass
        && flipped.has_score_line
        && flipped.has_three_corrections
        && flipped.direction_conflicts.len() == 1
        && flipped.direction_conflicts[0].contains("rotation_range_deg")
        && flipped.fabricated_numbers.is_empty();

    let fabricated = check(&BACKHAND_FEEDBACK.replace(
        "inefficient movement.",
        "inefficient movement. Increase racket speed to 42.7 m/s.",
    ));
    let fabricated_ok = !fabricated.pass
        && fabricated.has_score_line
        && fabricated.has_three_corrections
        && fabricated.directions_consistent
        && fabricated.fabricated_numbers == ["42.7"];

    outcome(
        base_ok && no_score_ok && flipped_ok && fabricated_ok,
        format!(
            "reference backhand feedback passes with score {:?}; missing score line fails only format ({no_score_ok}); \
             direction flip fails only direction ({flipped_ok}); 42.7 fails only grounding ({fabricated_ok})",
            base.score
        ),
    )
}

// 6

/// Minimal HTTP server answering every request with `status` and `body`;
/// counts connections.
fn mock_server(status: u16, body: &'static str) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/v1", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            counter.fetch_add(1, Ordering::SeqCst);
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0usize;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        length = v.trim().parse().unwrap_or(0);
                    }
                }
            }
            let mut sink = vec![0; length];
            let _ = reader.read_exact(&mut sink);
            let reply = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(reply.as_bytes());
        }
    });
    (base, hits)
}

fn features_report(dir: &Path) -> PathBuf {
    let out = dir.join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_kinecoach"))
        .args(["features", "--input"])
        .arg(data("synthetic_forehand.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    out
}

fn failure_modes() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let report = features_report(dir.path());

    let (silent_base, silent_hits) = mock_server(200, "{}");
    let no_key = Command::new(env!("CARGO_BIN_EXE_kinecoach"))
        .args(["feedback", "--report"])
        .arg(&report)
        .env_remove("KINECOACH_API_KEY")
        .env("KINECOACH_API_BASE", &silent_base)
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&no_key.stderr);
    let no_key_ok = no_key.status.code() == Some(1)
        && stderr.trim() == MISSING_KEY_MESSAGE
        && silent_hits.load(Ordering::SeqCst) == 0;

    let (failing_base, failing_hits) = mock_server(500, r#"{"error":"boom"}"#);
    let cli = Command::new(env!("CARGO_BIN_EXE_kinecoach"))
        .args(["feedback", "--report"])
        .arg(&report)
        .env("KINECOACH_API_KEY", "test-key")
        .env("KINECOACH_API_BASE", &failing_base)
        .output()
        .unwrap();
    let cli_err = String::from_utf8_lossy(&cli.stderr).trim().to_string();
    let cli_ok = cli.status.code() == Some(1) && cli_err == format!("{REQUEST_FAILED_PREFIX}HTTP 500 (server error)");

    let second = dir.path().join("second_stroke.json");
    std::fs::copy(data("synthetic_forehand.json"), &second).unwrap();
    let config = PipelineConfig {
        inputs: vec![data("synthetic_forehand.json"), second],
        format: None,
        rate: None,
        up_axis: UpAxis::Z,
        stroke: None,
        ranges: default_ranges(),
        out_dir: dir.path().join("batch"),
        dry_run: false,
        jobs: 2,
        llm: LlmConfig {
            api_key: Some("test-key".into()),
            api_base: failing_base,
            timeout: Duration::from_secs(5),
            ..LlmConfig::default()
        },
        mapper: JointMapper::new(),
    };
    let summary = run_pipeline(&config).unwrap();
    let batch_ok = summary.total == 2
        && summary.exit_code() == 0
        && summary.strokes.iter().all(|s| {
            s.status == StrokeStatus::Ok
                && s.feedback == FeedbackStatus::Failed
                && s.feedback_error.as_deref() == Some(cli_err.as_str())
        });

    outcome(
        no_key_ok && cli_ok && batch_ok,
        format!(
            "no key: exit 1, documented message, {} connections; mock 500: \"{cli_err}\"; batch of 2 finished \
             with both reports written ({} requests served)",
            silent_hits.load(Ordering::SeqCst),
            failing_hits.load(Ordering::SeqCst)
        ),
    )
}

// 7

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_kinecoach"))
            .args(["run", "--dry-run", "--input"])
            .arg(data("synthetic_forehand.json"))
            .arg("--out")
            .arg(&out)
            .env_remove("KINECOACH_API_KEY")
            .output()
            .unwrap();
        assert!(status.status.success());
        files_under(&out)
    };
    let (a, b) = (run("first"), run("second"));
    let required = ["report.json", "findings.txt", "prompt.txt"]
        .iter()
        .all(|f| a.contains_key(&Path::new("synthetic_forehand").join(f)));
    outcome(
        required && a == b,
        format!("two dry runs on the synthetic forehand: {} artifacts, byte-identical = {}", a.len(), a == b),
    )
}

// 8

fn not_reproducible_and_cohort() -> Outcome {
    let expected: Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/cohort_12v12_expected.json")).unwrap())
            .unwrap();
    let (stats, _) = analyze(&data("cohort_12v12.csv")).unwrap();
    let mut worst: f64 = 0.0;
    let mut tests_match = true;
    for f in &stats.features {
        let e = &expected["features"][&f.feature];
        tests_match &= e["test_used"].as_str() == Some(f.test_used.to_string().as_str());
        worst = worst.max((f.p_value - e["p_value"].as_f64().unwrap()).abs());
        worst = worst.max((f.cohens_d.unwrap_or(f64::NAN) - e["cohens_d"].as_f64().unwrap()).abs());
    }
    let largest = stats.largest_effect().map(|f| f.feature.clone()).unwrap_or_default();
    outcome(
        stats.features.len() == 4 && tests_match && worst <= 1e-6,
        format!(
            "not reproducible here: 79.17% classification accuracy (CNN-LSTM out of scope), coach Likert scores \
             (human study), 100% compliance over 317 videos (needs the authors' LLM outputs), d = 0.92 / p = 0.069 \
             (THETIS subset unspecified). Substitute: 12-vs-12 cohort CSV matches scipy 1.15.3 on test choice, d and p, \
             max |diff| {worst:.1e}; largest |d|: {largest}"
        ),
    )
}

fn main() {
    let criteria: [(u8, &str, fn() -> Outcome); 8] = [
        (1, "comparator fidelity", comparator_fidelity),
        (2, "kinematics exactness", kinematics_exactness),
        (3, "geometric invariance", geometric_invariance),
        (4, "statistics oracles", statistics_oracles),
        (5, "compliance determinism", compliance_determinism),
        (6, "failure-mode contract", failure_modes),
        (7, "end-to-end determinism", end_to_end_determinism),
        (8, "not reproducible, cohort substitute", not_reproducible_and_cohort),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let excused = KNOWN.contains(&n) && o.substitute == Some(true);
        let tag = match (o.pass, excused) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known; substitute passes)",
            (false, false) => "FAIL",
        };
        println!("acceptance {n} [{tag}] {name}: {} ({:.2}s)", o.detail, start.elapsed().as_secs_f64());
        if !o.pass && !excused {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kinecoach::cohort_io::{analyze, stats_to_json, write_box_plots};
use kinecoach::dashboard::emit_dashboard_data;
use kinecoach::formats::{load_mapper, load_sequence, parse_motion_file, table_to_csv, MotionFormat};
use kinecoach::llm::{generate_feedback, LlmConfig};
use kinecoach::pipeline::{findings_text, run_pipeline, PipelineConfig};
use kinecoach::ranges::load_ranges;
use kinecoach::report_io::{context_from_value, read_report_value, report_to_json, series_from_value};
use kinecoach_core::kinematics::{FeatureConfig, UpAxis};
use kinecoach_core::prompt::build_context_summary;
use kinecoach_core::{
    build_feature_report, check_feedback, compare_to_reference, map_joints, validate_sequence, impute_gaps,
    Finding, ReferenceTable,
};

#[derive(Parser)]
#[command(name = "kinecoach", version, about = "Tennis stroke biomechanics to grounded coaching feedback")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Sampling rate in Hz; overrides the rate stored in JSON motion files [default: 60]
    #[arg(long, global = true, value_parser = parse_rate)]
    rate: Option<f64>,
    /// Vertical axis of the input coordinates
    #[arg(long, global = true, default_value = "z", value_parser = parse_up_axis)]
    up_axis: UpAxis,
    /// Reference-range JSON [default: bundled placeholder table]
    #[arg(long, global = true)]
    ranges: Option<PathBuf>,
    /// JSON alias file mapping extra joint names to canonical joints
    #[arg(long, global = true)]
    aliases: Option<PathBuf>,
    /// Output file or directory, depending on the subcommand
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Build prompts but never contact the model endpoint
    #[arg(long, global = true)]
    dry_run: bool,
    /// Strokes processed concurrently by `run`
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, map and repair a motion file; print validation metrics
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_format)]
        format: Option<MotionFormat>,
        /// Print the validation metrics as JSON
        #[arg(long)]
        report: bool,
    },
    /// Extract the feature report from a motion file
    Features {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_format)]
        format: Option<MotionFormat>,
        /// Predicted stroke label
        #[arg(long)]
        stroke: Option<String>,
    },
    /// Compare a report with the reference ranges
    Compare {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the coaching prompt and request feedback from the model
    Feedback {
        #[arg(long)]
        report: PathBuf,
    },
    /// Check feedback text against the output constraints; exit 0 iff it passes
    Validate {
        #[arg(long)]
        feedback: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Expert-vs-beginner statistics over a cohort CSV
    Stats {
        #[arg(long)]
        samples: PathBuf,
        /// Directory for box-plot CSVs
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Full pipeline over one or more motion files
    Run {
        #[arg(long, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Glob pattern selecting input files (repeatable)
        #[arg(long)]
        glob: Vec<String>,
        #[arg(long, value_parser = parse_format)]
        format: Option<MotionFormat>,
        #[arg(long)]
        stroke: Option<String>,
    },
    /// Plot data (CSV + SVG) for the series in a report
    Plot {
        #[arg(long)]
        report: PathBuf,
    },
}

fn parse_rate(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(r) if r.is_finite() && r > 0.0 => Ok(r),
        _ => Err(format!("'{s}' is not a positive sampling rate")),
    }
}

fn parse_up_axis(s: &str) -> Result<UpAxis, String> {
    s.parse::<UpAxis>().map_err(|()| format!("unknown up axis '{s}' (expected x, y or z)"))
}

fn parse_format(s: &str) -> Result<MotionFormat, String> {
    s.parse()
}

fn ranges(global: &Global) -> Result<ReferenceTable> {
    let (table, warnings) = load_ranges(global.ranges.as_deref())?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(table)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn findings_for(report: &Path, global: &Global) -> Result<(kinecoach_core::prompt::StrokeContext, Vec<Finding>)> {
    let value = read_report_value(report)?;
    let context = context_from_value(&value);
    let findings = compare_to_reference(context.stroke_label(), &context.values, &ranges(global)?);
    Ok((context, findings))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let global = &cli.global;
    match cli.command {
        Command::Ingest { input, format, report } => {
            let file = parse_motion_file(&input, format, global.rate)?;
            let mapped = map_joints(&file.table, &load_mapper(global.aliases.as_deref())?).context("joint mapping")?;
            for w in &mapped.warnings {
                eprintln!("warning: {w}");
            }
            let seq = impute_gaps(&mapped.table).context("gap imputation")?;
            let metrics = validate_sequence(&seq);
            if report {
                emit(None, &(serde_json::to_string_pretty(&metrics)? + "\n"))?;
            } else {
                emit(None, &format!(
                    "{}: {} frames, {} joints at {} Hz\n",
                    input.display(),
                    metrics.frame_count,
                    metrics.joint_count,
                    seq.sample_rate_hz()
                ))?;
            }
            if let Some(out) = &global.out {
                emit(Some(out), &table_to_csv(&seq.to_table()))?;
            }
        }
        Command::Features { input, format, stroke } => {
            let loaded = load_sequence(&input, format, global.rate, &load_mapper(global.aliases.as_deref())?)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            let label = stroke.or(loaded.predicted_stroke);
            let config = FeatureConfig { up_axis: global.up_axis };
            let report = build_feature_report(&loaded.sequence, label.as_deref(), &config)
                .with_context(|| format!("feature extraction for {}", input.display()))?;
            emit(global.out.as_deref(), &report_to_json(&report))?;
        }
        Command::Compare { report, json } => {
            let (_, findings) = findings_for(&report, global)?;
            let text = if json { serde_json::to_string_pretty(&findings)? + "\n" } else { findings_text(&findings) };
            emit(global.out.as_deref(), &text)?;
        }
        Command::Feedback { report } => {
            let (context, findings) = findings_for(&report, global)?;
            let bundle = build_context_summary(&context, &findings);
            if global.dry_run {
                emit(global.out.as_deref(), &bundle.render())?;
                return Ok(ExitCode::SUCCESS);
            }
            let result = generate_feedback(&bundle, &LlmConfig::from_env());
            if !result.ok {
                eprintln!("{}", result.text);
                return Ok(ExitCode::FAILURE);
            }
            emit(global.out.as_deref(), &format!("{}\n", result.text.trim_end()))?;
        }
        Command::Validate { feedback, report, json } => {
            let text = std::fs::read_to_string(&feedback).with_context(|| format!("reading {}", feedback.display()))?;
            let (context, findings) = findings_for(&report, global)?;
            let bundle = build_context_summary(&context, &findings);
            let check = check_feedback(&text, &bundle, &findings);
            if json {
                emit(None, &(serde_json::to_string_pretty(&check)? + "\n"))?;
            } else {
                let mut text = format!(
                    "score line: {}\ncorrections: {} (need 3)\n",
                    if check.has_score_line { "ok" } else { "missing" },
                    check.correction_count
                );
                for c in &check.direction_conflicts {
                    text += &format!("direction conflict: {c}\n");
                }
                for n in &check.fabricated_numbers {
                    text += &format!("number not in prompt: {n}\n");
                }
                text += if check.pass { "PASS\n" } else { "FAIL\n" };
                emit(None, &text)?;
            }
            return Ok(if check.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Stats { samples, plots } => {
            let (stats, boxes) = analyze(&samples)?;
            for w in &stats.warnings {
                eprintln!("warning: {w}");
            }
            emit(global.out.as_deref(), &stats_to_json(&stats))?;
            if let Some(dir) = plots {
                write_box_plots(&boxes, &dir)?;
            }
        }
        Command::Run { mut input, glob, format, stroke } => {
            for pattern in &glob {
                for entry in glob::glob(pattern).with_context(|| format!("bad glob pattern '{pattern}'"))? {
                    input.push(entry?);
                }
            }
            if input.is_empty() {
                bail!("no input files (use --input or --glob)");
            }
            let config = PipelineConfig {
                inputs: input,
                format,
                rate: global.rate,
                up_axis: global.up_axis,
                stroke,
                ranges: ranges(global)?,
                out_dir: global.out.clone().unwrap_or_else(|| PathBuf::from("kinecoach_out")),
                dry_run: global.dry_run,
                jobs: usize::from(global.jobs),
                llm: LlmConfig::from_env(),
                mapper: load_mapper(global.aliases.as_deref())?,
            };
            let summary = run_pipeline(&config)?;
            for s in &summary.strokes {
                match &s.error {
                    Some(e) => eprintln!("{}: error: {e}", s.id),
                    None => eprintln!("{}: ok", s.id),
                }
            }
            eprintln!(
                "{} of {} strokes processed; summary in {}",
                summary.succeeded,
                summary.total,
                config.out_dir.join("summary.json").display()
            );
            return Ok(if summary.exit_code() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Plot { report } => {
            let value = read_report_value(&report)?;
            let out = global.out.clone().unwrap_or_else(|| PathBuf::from("plots"));
            for note in emit_dashboard_data(&series_from_value(&value), &out)? {
                eprintln!("note: {note}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let mut message = String::new();
            for cause in e.chain().map(|c| c.to_string()) {
                if !message.contains(&cause) {
                    if !message.is_empty() {
                        message.push_str(": ");
                    }
                    message.push_str(&cause);
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

//! Batch front end: construct / verify / trace.
//!
//! Exit codes: 0 success, 1 configuration or parse error, 2 certification
//! or floor failure (reports are still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use slow_birkhoff::config::RunConfig;
use slow_birkhoff::csvout::{report_csv, trace_csv, write_atomic};
use slow_birkhoff::funcspec::FunctionSpec;
use slow_birkhoff::text::format_rational;
use slow_birkhoff::trace::{sample_points, trace};
use slow_birkhoff::{run_construction, verify, DeviationReport, McSettings};

const USAGE: &str = "\
usage:
  slow-birkhoff construct --config <path> --out <dir>
  slow-birkhoff verify --spec <path> [--samples S] [--seed Z]
  slow-birkhoff trace --spec <path> --points P --nmax N [--seed Z]
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}

fn run(args: &[String]) -> Result<ExitCode, String> {
    let command = args.first().ok_or_else(|| format!("no command\n{}", USAGE))?;
    let flags = parse_flags(&args[1..])?;
    match command.as_str() {
        "construct" => cmd_construct(&flags),
        "verify" => cmd_verify(&flags),
        "trace" => cmd_trace(&flags),
        other => Err(format!("unknown command {:?}\n{}", other, USAGE)),
    }
}

struct Flags(Vec<(String, String)>);

impl Flags {
    fn get(&self, name: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, String> {
        self.get(name)
            .ok_or_else(|| format!("missing --{}\n{}", name, USAGE))
    }

    fn get_u64(&self, name: &str) -> Result<Option<u64>, String> {
        self.get(name)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| format!("--{} expects an integer, got {:?}", name, v))
            })
            .transpose()
    }
}

fn parse_flags(args: &[String]) -> Result<Flags, String> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let name = arg
            .strip_prefix("--")
            .ok_or_else(|| format!("unexpected argument {:?}\n{}", arg, USAGE))?;
        let value = it
            .next()
            .ok_or_else(|| format!("--{} needs a value", name))?;
        out.push((name.to_string(), value.clone()));
    }
    Ok(Flags(out))
}

fn print_summary(report: &DeviationReport) {
    for s in &report.stages {
        println!(
            "stage {}: N={} h={} int(f_{})={} stage_prob={} ({}) final_prob={} floor={} {}{}{}",
            s.k,
            s.n_scale,
            s.height,
            s.k,
            format_rational(&s.integral_fk),
            format_rational(&s.stage_estimate.probability),
            s.stage_estimate.method.as_str(),
            format_rational(&s.final_estimate.probability),
            format_rational(&s.floor),
            if s.floor_met { "floor=met" } else { "floor=MISSED" },
            if s.drop_ok { " drop=ok" } else { " drop=short" },
            if s.near_invariance_ok {
                " near-invariance=ok"
            } else {
                " near-invariance=off"
            },
        );
    }
    println!(
        "m(C) = {}, integral(f) = {}",
        format_rational(&report.c_measure),
        format_rational(&report.final_integral)
    );
    if let Some(k) = report.failed_stage {
        println!("stage {} failed certification", k);
    }
}

fn cmd_construct(flags: &Flags) -> Result<ExitCode, String> {
    let config_path = PathBuf::from(flags.require("config")?);
    let out_dir = PathBuf::from(flags.require("out")?);
    let config = RunConfig::from_file(&config_path).map_err(|e| e.to_string())?;
    let (spec, report) = run_construction(&config.params).map_err(|e| e.to_string())?;
    write_atomic(&out_dir.join("function.spec"), &spec.to_text())
        .map_err(|e| e.to_string())?;
    write_atomic(&out_dir.join("report.csv"), &report_csv(&report))
        .map_err(|e| e.to_string())?;
    print_summary(&report);
    Ok(if report.passed() {
        ExitCode::from(0)
    } else {
        ExitCode::from(2)
    })
}

fn load_spec(path: &Path) -> Result<FunctionSpec, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    FunctionSpec::parse_text(&text).map_err(|e| e.to_string())
}

fn cmd_verify(flags: &Flags) -> Result<ExitCode, String> {
    let spec_path = PathBuf::from(flags.require("spec")?);
    let spec = load_spec(&spec_path)?;
    let mc = McSettings {
        samples: flags.get_u64("samples")?.unwrap_or(10_000),
        seed: flags.get_u64("seed")?.unwrap_or(1),
        ..McSettings::default()
    };
    let report = verify(&spec, &mc, 4096).map_err(|e| e.to_string())?;
    let out = spec_path.with_file_name("verify.csv");
    write_atomic(&out, &report_csv(&report)).map_err(|e| e.to_string())?;
    print_summary(&report);
    Ok(if report.all_floors_met() {
        ExitCode::from(0)
    } else {
        ExitCode::from(2)
    })
}

fn cmd_trace(flags: &Flags) -> Result<ExitCode, String> {
    let spec_path = PathBuf::from(flags.require("spec")?);
    let spec = load_spec(&spec_path)?;
    let count = flags
        .get_u64("points")?
        .ok_or_else(|| format!("missing --points\n{}", USAGE))? as usize;
    let n_max = flags
        .get_u64("nmax")?
        .ok_or_else(|| format!("missing --nmax\n{}", USAGE))?;
    let seed = flags.get_u64("seed")?.unwrap_or(1);
    let points = sample_points(&spec, count, seed).map_err(|e| e.to_string())?;
    let rows = trace(&spec, &points, n_max).map_err(|e| e.to_string())?;
    let out = spec_path.with_file_name("trace.csv");
    write_atomic(&out, &trace_csv(&rows)).map_err(|e| e.to_string())?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(ExitCode::from(0))
}

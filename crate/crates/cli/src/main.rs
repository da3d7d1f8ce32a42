//! Runs one simulator scenario from a JSON config and writes `report.json`
//! (plus `series.csv` where the scenario has tabular output).
//!
//! Exit codes: 0 on success, 1 for config or I/O errors, 2 when a physics
//! check fails or the simulation itself reports an error. Every failure
//! also prints a JSON error object on stderr.

mod config;
mod run;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::{parse_config, ConfigError};

#[derive(Debug, Parser)]
#[command(name = "raman-cavity", version, about = "Cavity beam-splitter and discrimination scenarios")]
struct Args {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// `key=value` override with a dot path into the config; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn fail(kind: &str, message: String, extra: serde_json::Value, code: u8) -> ExitCode {
    let mut body = json!({ "kind": kind, "message": message });
    if let (Some(body), Some(extra)) = (body.as_object_mut(), extra.as_object()) {
        body.extend(extra.clone());
    }
    eprintln!("{}", json!({ "error": body }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail("io", format!("cannot read {}: {e}", args.config.display()), json!({}), 1),
    };
    let config = match parse_config(&text, &args.overrides) {
        Ok(c) => c,
        Err(e @ ConfigError::Parse { .. }) => {
            let ConfigError::Parse { path, line, column, .. } = &e else { unreachable!() };
            return fail("parse", e.to_string(), json!({ "path": path, "line": line, "column": column }), 1);
        }
        Err(e) => return fail("validation", e.to_string(), json!({}), 1),
    };
    let output = match run::run(&config) {
        Ok(o) => o,
        Err(e) => return fail("physics", e.to_string(), json!({}), 2),
    };

    let write = || -> std::io::Result<()> {
        fs::create_dir_all(&args.out)?;
        let mut report = serde_json::to_string_pretty(&output.report).expect("report serializes");
        report.push('\n');
        fs::write(args.out.join("report.json"), report)?;
        if let Some(series) = &output.series {
            fs::write(args.out.join("series.csv"), series.to_csv().map_err(std::io::Error::other)?)?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail("io", format!("cannot write to {}: {e}", args.out.display()), json!({}), 1);
    }

    let failed = output.failed_checks();
    if !args.quiet {
        for check in &output.checks {
            let status = if check.passed { "pass" } else { "FAIL" };
            println!("{status} {}: {:.6e} (threshold {:.1e})", check.name, check.value, check.threshold);
        }
        println!("report written to {}", args.out.join("report.json").display());
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        fail("physics", format!("failed checks: {}", failed.join(", ")), json!({ "checks": failed }), 2)
    }
}

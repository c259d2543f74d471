//! Command-line front end for the experiment runner.
//!
//! Configuration sources layer in a fixed order — named preset, then config
//! file, then repeated `--set key=value` overrides — and the merged text is
//! parsed and validated as one flat key=value document. Exit codes: `0` on
//! success, `2` for configuration problems (unknown preset, unreadable or
//! invalid config, missing output path), `3` for output I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gs_precode::sim::{experiment_catalog, parse_config_layers, preset_text, run, write_csv};
use gs_precode::Error;

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    version,
    about = "Run a precoding experiment and write its metrics as CSV",
    after_help = "Configuration layers apply in order: --preset, --config, --set.\n\
                  At least one of --preset / --config is required."
)]
struct Args {
    /// Config file (flat `key = value` lines, `#` comments).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Named preset supplying a baseline config (see `--list-presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Override a single config key, e.g. `--set trials=50`. Repeatable.
    #[arg(long, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output CSV path (overrides the config's `output` key).
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,

    /// List available presets and exit.
    #[arg(long)]
    list_presets: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config { .. } => ExitCode::from(2),
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn execute(args: &Args) -> Result<String, Error> {
    if args.list_presets {
        let mut lines = vec!["available presets:".to_string()];
        for (name, text) in experiment_catalog() {
            let experiment = text
                .lines()
                .find_map(|l| l.strip_prefix("experiment"))
                .map(|rest| rest.trim_start_matches([' ', '=']).trim())
                .unwrap_or("?");
            lines.push(format!("  {name:<6} {experiment}"));
        }
        return Ok(lines.join("\n"));
    }

    let mut layers: Vec<String> = Vec::new();
    if let Some(name) = &args.preset {
        let text = preset_text(name).ok_or_else(|| {
            let known: Vec<&str> = experiment_catalog().iter().map(|(n, _)| *n).collect();
            Error::config(format!(
                "unknown preset '{name}' (available: {})",
                known.join(", ")
            ))
        })?;
        layers.push(text.to_string());
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        layers.push(text);
    }
    if layers.is_empty() {
        return Err(Error::config(
            "no configuration given: pass --preset and/or --config",
        ));
    }
    if !args.set.is_empty() {
        for entry in &args.set {
            if !entry.contains('=') {
                return Err(Error::config(format!(
                    "--set expects key=value, got '{entry}'"
                )));
            }
        }
        layers.push(args.set.join("\n"));
    }

    let layer_refs: Vec<&str> = layers.iter().map(String::as_str).collect();
    let mut cfg = parse_config_layers(&layer_refs)?;
    if let Some(out) = &args.out {
        cfg.output_path = Some(out.clone());
    }
    let output = cfg
        .output_path
        .clone()
        .ok_or_else(|| Error::config("no output path: pass --out or set `output = <path>`"))?;

    let records = run(&cfg)?;
    write_csv(&records, &output)?;
    Ok(format!(
        "wrote {} records to {}",
        records.len(),
        output.display()
    ))
}

//! Command-line driver for the affine-hls verification chains.

pub mod chains;
pub mod config;
pub mod error;
pub mod export;

use std::io::Write;

use affine_hls::report::{ChainReport, SCHEMA_VERSION};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::chains::{run_chain, Chain};
use crate::config::{Format, Overrides, RunConfig};
use crate::error::{config_err, CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "affine-hls", version, about = "Verify affine HLS inequalities numerically")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one chain and write its report; exit 1 if it fails.
    Verify {
        #[arg(value_enum)]
        chain: Chain,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Run a chain over an alpha list and/or a parameter list, one row each.
    Sweep {
        #[arg(value_enum)]
        chain: Chain,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Write the sampled body S_alpha(f,h) or R_alpha(f,h) as JSON.
    BodyExport {
        #[command(flatten)]
        opts: Overrides,
    },
}

fn envelope(command: &str, cfg: &RunConfig, extra: Value) -> Result<Value> {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": serde_json::to_value(cfg)?,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    Ok(v)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_text(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn point_label(cfg: &RunConfig) -> String {
    match cfg.alpha {
        Some(a) => format!("n={};alpha={a}", cfg.n),
        None => format!("n={}", cfg.n),
    }
}

fn csv_text(rows: &[(String, std::result::Result<ChainReport, String>)], chain: Chain) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = ChainReport::csv_header();
    header.push("error".into());
    w.write_record(&header)?;
    for (params, row) in rows {
        let mut rec = match row {
            Ok(rep) => rep.csv_record(params),
            Err(_) => {
                let mut r = vec![String::new(); header.len() - 1];
                r[0] = chain.name().into();
                r[1] = params.clone();
                r[header.len() - 2] = "false".into();
                r
            }
        };
        rec.push(row.as_ref().err().cloned().unwrap_or_default());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

fn verify(chain: Chain, cfg: &RunConfig) -> Result<u8> {
    let rep = run_chain(chain, cfg)?;
    eprintln!("{}", rep.summary());
    let text = match cfg.format {
        Format::Json => {
            json_text(&envelope("verify", cfg, json!({ "chain": chain, "pass": rep.pass, "report": rep }))?)?
        }
        Format::Csv => csv_text(&[(point_label(cfg), Ok(rep.clone()))], chain)?,
    };
    emit(cfg, &text)?;
    Ok(if rep.pass { 0 } else { 1 })
}

/// Row configurations of a sweep with their parameter labels.
pub fn sweep_points(cfg: &RunConfig) -> Result<Vec<(String, RunConfig)>> {
    let s = &cfg.sweep;
    if s.alphas.is_empty() && s.param.is_none() {
        return config_err("empty sweep grid: give alphas and/or a param with values");
    }
    if s.param.is_some() && s.values.is_empty() {
        return config_err("empty sweep grid: the swept param has no values");
    }
    let alphas: Vec<Option<f64>> =
        if s.alphas.is_empty() { vec![cfg.alpha] } else { s.alphas.iter().map(|a| Some(*a)).collect() };
    let values: Vec<Option<f64>> = match &s.param {
        Some(_) => s.values.iter().map(|v| Some(*v)).collect(),
        None => vec![None],
    };
    let mut out = Vec::new();
    for a in &alphas {
        for v in &values {
            let mut c = cfg.clone();
            if let Some(a) = a {
                c.alpha = Some(*a);
                c.alphas = vec![*a];
            }
            let mut label = point_label(&c);
            if let (Some(p), Some(v)) = (&s.param, v) {
                c = c.with_param(p, *v)?;
                label.push_str(&format!(";{p}={v}"));
            }
            out.push((label, c.resolve()?));
        }
    }
    Ok(out)
}

fn sweep(chain: Chain, cfg: &RunConfig) -> Result<u8> {
    let points = sweep_points(cfg)?;
    let mut rows = Vec::new();
    for (label, c) in &points {
        let row = run_chain(chain, c).map_err(|e| e.to_string());
        match &row {
            Ok(rep) => eprintln!("{label}: {}", rep.summary()),
            Err(e) => eprintln!("{label}: error: {e}"),
        }
        rows.push((label.clone(), row));
    }
    let failed = rows.iter().any(|(_, r)| !matches!(r, Ok(rep) if rep.pass));
    let text = match cfg.format {
        Format::Csv => csv_text(&rows, chain)?,
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(label, r)| match r {
                    Ok(rep) => json!({ "parameters": label, "report": rep }),
                    Err(e) => json!({ "parameters": label, "error": e }),
                })
                .collect();
            json_text(&envelope("sweep", cfg, json!({ "chain": chain, "pass": !failed, "rows": items }))?)?
        }
    };
    emit(cfg, &text)?;
    Ok(if failed { 1 } else { 0 })
}

fn body_export(cfg: &RunConfig) -> Result<u8> {
    let body = export::export_body(cfg)?;
    if let Some(flagged) = body["metadata"]["flagged"].as_array().filter(|a| !a.is_empty()) {
        eprintln!("warning: {} nodes exceed the error tolerance", flagged.len());
    }
    if let Some(d) = body["roundness"]["max_relative_deviation"].as_f64() {
        eprintln!("largest relative deviation from the fitted ellipsoid: {d:.3e}");
    }
    emit(cfg, &json_text(&envelope("body-export", cfg, json!({ "body": body }))?)?)?;
    Ok(0)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match &cli.command {
        Command::Verify { chain, opts } => opts.apply().and_then(|c| verify(*chain, &c)),
        Command::Sweep { chain, opts } => opts.apply().and_then(|c| sweep(*chain, &c)),
        Command::BodyExport { opts } => opts.apply().and_then(|c| body_export(&c)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

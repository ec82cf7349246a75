//! Command-line front end for the `wring` spin-ring library.
//!
//! [`run`] parses arguments and executes a subcommand without touching the
//! process streams, so tests can drive the tool in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;


use std::ffi::OsString;

use clap::Parser;

use crate::commands::Report;
use crate::config::{Cli, Command, RunConfig};
use crate::error::{CliError, CliResult};

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn execute(cfg: &RunConfig, command: &Command) -> CliResult<Report> {
    let work = || match command {
        Command::Spectrum(a) => commands::cmd_spectrum(cfg, a),
        Command::Scan(a) => commands::cmd_scan(cfg, a),
        Command::Crossing(a) => commands::cmd_crossing(cfg, a),
        Command::Gap(a) => commands::cmd_gap(cfg, a),
        Command::Sweep(a) => commands::cmd_sweep(cfg, a),
        Command::Thermal(a) => commands::cmd_thermal(cfg, a),
        Command::Entangle(a) => commands::cmd_entangle(cfg, a),
        Command::Verify(a) => verify::cmd_verify(cfg, a),
    };
    match cfg.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Contract(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return RunOutput { code, stdout, stderr };
        }
    };
    let mut stderr = String::new();
    let result = RunConfig::resolve(&cli.globals).and_then(|cfg| {
        let report = execute(&cfg, &cli.command)?;
        let text = report.table.render(cfg.format)?;
        Ok((cfg, report, text))
    });
    match result {
        Err(e) => RunOutput { code: e.exit_code(), stdout: String::new(), stderr: format!("wring: {e}\n") },
        Ok((cfg, report, text)) => {
            for w in &report.warnings {
                stderr.push_str(&format!("wring: warning: {w}\n"));
            }
            let stdout = match &cfg.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        let e = CliError::from(e);
                        stderr.push_str(&format!("wring: {e}\n"));
                        return RunOutput { code: e.exit_code(), stdout: String::new(), stderr };
                    }
                    String::new()
                }
                None => text,
            };
            let code = match &report.failure {
                Some(msg) => {
                    stderr.push_str(&format!("wring: {}\n", CliError::Verification(msg.clone())));
                    1
                }
                None => 0,
            };
            RunOutput { code, stdout, stderr }
        }
    }
}

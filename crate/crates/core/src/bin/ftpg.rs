use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use ftpg::cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cfg: &RunConfig) -> anyhow::Result<bool> {
    let report = run(cfg)?;
    let text = report.render()?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    eprintln!("{}/{} trials passed", report.summary.passed, report.summary.trials);
    Ok(report.all_passed())
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use rectmix_cli::{is_usage_error, output_path, run, write_report, RunConfig, OUT_DIR_ENV};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let result = run(&cfg).and_then(|report| {
        match output_path(&cfg, out_dir.as_deref()) {
            Some(path) => {
                write_report(&path, &report.text)?;
                eprintln!("wrote {}", path.display());
            }
            None => std::io::stdout().write_all(report.text.as_bytes())?,
        }
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("rectmix: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("rectmix: {e:#}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}

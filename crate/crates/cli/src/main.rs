use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use uavplan_cli::{parse_quad_tol, run, Cli, QUAD_TOL_VAR};

fn write_file(path: &std::path::Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = std::env::var(QUAD_TOL_VAR).ok();
    let result = parse_quad_tol(tol.as_deref()).and_then(|tol| run(&cli, tol));
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    for note in &out.notes {
        eprintln!("note: {note}");
    }
    let written = match &cli.output {
        Some(path) => write_file(path, &out.body),
        None => std::io::stdout().write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
    };
    let written = written.and_then(|_| out.side_files.iter().try_for_each(|(p, text)| write_file(p, text)));
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(out.exit_code)
}

//! `hardcore-thin <experiment> [--config <file>] [--key value ...] --out <dir>`
//!
//! Exit status: 0 when every assertion passes, 1 when one fails, 2 on a
//! usage, configuration or output error.

use std::process::ExitCode;

use hardcore_thin::{parse_config, run, threads_from_env, HarnessError};

const USAGE: &str = "usage: hardcore-thin <experiment> [--config <file>] [--key value ...] --out <dir>";

fn main() -> ExitCode {
    match try_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn try_main() -> Result<bool, HarnessError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return Ok(true);
    }
    let Some((experiment, rest)) = args.split_first() else {
        return Err(HarnessError::Usage(USAGE.into()));
    };
    let mut overrides = vec![("experiment".to_string(), experiment.clone())];
    let mut config_path = None;
    let mut it = rest.iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            return Err(HarnessError::Usage(format!("unexpected argument `{flag}`\n{USAGE}")));
        };
        let Some(value) = it.next() else {
            return Err(HarnessError::Usage(format!("flag `{flag}` needs a value")));
        };
        if key == "config" {
            config_path = Some(value.clone());
        } else {
            overrides.push((key.replace('-', "_"), value.clone()));
        }
    }
    let text = match &config_path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|source| HarnessError::Io { path: p.into(), source })?,
        None => String::new(),
    };
    let config = parse_config(&text, &overrides)?;
    let out = run(&config, threads_from_env()?)?;
    for a in &out.summary.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!("wrote {} and {}", out.csv.display(), out.json.display());
    Ok(out.summary.passed)
}

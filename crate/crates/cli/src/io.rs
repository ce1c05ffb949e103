//! File helpers and the error type shared by the subcommands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use plankforge::program::program_from_json;
use plankforge::projector::drawing_from_json;
use plankforge::{parse_program, DrawingSet, Program};

pub const SEED_ENV: &str = "PLANKFORGE_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input (exit 1).
    Input(String),
    /// Anything else (exit 2).
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

pub fn input(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

pub fn internal(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(path, e))
}

pub fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| input(path, e))
}

pub fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// `.json` files are program JSON, anything else `.plank` text.
pub fn read_program(path: &Path) -> Result<Program, CliError> {
    let p = if is_json(path) {
        program_from_json(&read_json(path)?).map_err(|e| input(path, e))?
    } else {
        parse_program(&read_text(path)?).map_err(|e| input(path, e))?
    };
    if let Some(d) = p.validate().first() {
        return Err(input(path, d));
    }
    Ok(p)
}

pub fn read_drawing(path: &Path) -> Result<DrawingSet, CliError> {
    drawing_from_json(&read_json(path)?).map_err(|e| input(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| internal(dir, e))?;
    }
    fs::write(path, text).map_err(|e| internal(path, e))
}

/// Write to `out`, or stdout when it is `None`.
pub fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn json_text(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

/// The effective seed: the environment overrides the flag. Echoed to stderr.
pub fn seed(flag: u64) -> Result<u64, CliError> {
    let s = match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Input(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
        Err(_) => flag,
    };
    eprintln!("seed: {s}");
    Ok(s)
}

pub fn stem_id(path: &Path, suffix: &str) -> Option<String> {
    let name = path.file_name()?.to_str()?;
    name.strip_suffix(suffix).map(str::to_string)
}

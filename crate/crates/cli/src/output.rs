use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use ufg_core::bench::BenchError;
use ufg_core::extremal::ExtremalError;
use ufg_core::poset::PosetError;

pub const EXIT_SELFCHECK: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_TIMEOUT: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::data(e.to_string())
    }
}

impl From<PosetError> for Failure {
    fn from(e: PosetError) -> Self {
        Failure::data(e.to_string())
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::data(e.to_string())
    }
}

impl From<ExtremalError> for Failure {
    fn from(e: ExtremalError) -> Self {
        match e {
            ExtremalError::Timeout { .. } => Failure {
                code: EXIT_TIMEOUT,
                message: e.to_string(),
            },
            ExtremalError::Poset(p) => p.into(),
        }
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    write(dir, name, &text)
}

/// Fields every report carries so that results can be traced to their settings.
pub fn metadata(command: &str, config: Value) -> Value {
    json!({
        "tool": "ufg",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "conventions": {
            "dispersion": "share of all posets at least as deep as the ceil(alpha * n)-th largest observed depth",
            "rank_shift": "ascending ranks, ties broken by canonical poset order and flagged",
            "extremal_ties": "canonical poset order",
            "davidson_ties": "incomparable pairs count as ties",
        },
    })
}

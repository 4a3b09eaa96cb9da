use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use critex::ErrorKind;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(critex::Error),
    Io { path: PathBuf, source: io::Error },
}

impl From<critex::Error> for CliError {
    fn from(e: critex::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Io => 3,
                ErrorKind::NumericalBudget => 4,
            },
        }
    }

    fn to_json(&self) -> Value {
        let (code, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Core(e) => (e.code(), e.to_string()),
            CliError::Io { path, source } => ("io", format!("{}: {source}", path.display())),
        };
        json!({ "error": { "code": code, "message": message, "exit_code": self.exit_code() } })
    }

    /// Print the error document on standard error and pick the exit status.
    pub fn report(&self) -> ExitCode {
        log::debug!("{self:?}");
        let mut err = io::stderr().lock();
        let _ = writeln!(err, "{}", self.to_json());
        ExitCode::from(self.exit_code())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> Result<(String, String), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
    Ok((text, hash))
}

/// Add the input hash and library version to a report object.
pub fn stamp(mut report: Value, input_sha256: &str) -> Value {
    if let Value::Object(map) = &mut report {
        map.insert("input_sha256".into(), Value::String(input_sha256.into()));
        map.insert("version".into(), Value::String(VERSION.into()));
    }
    report
}

pub fn json_text(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    text
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|()| out.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

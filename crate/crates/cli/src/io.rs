use std::fmt;
use std::io::Write;
use std::path::Path;

use expgeo::GeometryError;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or arguments: exit 2.
    Validation(String),
    /// Computation failed or a tolerance was not met: exit 1.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Numeric(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid input: {m}"),
            Self::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::FlowOverflow { .. }
            | GeometryError::RootFinding(_)
            | GeometryError::NonFinite { .. } => Self::Numeric(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Numeric(format!("output: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Adds the argument name to validation errors.
pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for Result<T, GeometryError> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|e| match CliError::from(e) {
            CliError::Validation(m) => CliError::Validation(format!("{what}: {m}")),
            other => other,
        })
    }
}

/// Parses `arg` as inline JSON when it starts with `{` or `[`, otherwise reads
/// it as a file path. Errors name the argument and the offending field path.
pub fn read_json<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_owned()
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| CliError::Validation(format!("{what}: cannot read {arg}: {e}")))?
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { String::new() } else { format!(" at `{path}`") };
        CliError::Validation(format!("{what}{field}: {}", e.inner()))
    })
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Numeric(format!("serialization: {e}")))?;
    Ok(String::from_utf8(out).expect("JSON output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 7.0, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        let json = to_json(&vec![0.1f64, 2.0]).unwrap();
        assert_eq!(json, "[1.0000000000000001e-1,2.0000000000000000e0]");
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![0.1, 2.0]);
    }

    #[test]
    fn json_errors_name_the_field() {
        let err = read_json::<expgeo::VectorJson<f64>>(r#"{"weights":[1,"x"],"values":[1,1]}"#, "--density")
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("weights[1]"), "{msg}");
        assert_eq!(err.exit_code(), 2);
        let err = read_json::<expgeo::VectorJson<f64>>(r#"{"values":[1]}"#, "--density").unwrap_err();
        assert!(err.to_string().contains("weights"));
    }
}

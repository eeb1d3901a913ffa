use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use atlas_core::render::fmt_num;
use serde::Serialize;
use serde_json::value::RawValue;

#[derive(Debug)]
pub enum Failure {
    Core(atlas_core::Error),
    Usage(String),
    Io(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) => f.write_str(m),
            Failure::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<atlas_core::Error> for Failure {
    fn from(e: atlas_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// A JSON number with the fixed 12-digit formatting.
pub fn num(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { fmt_num(v) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted number is valid JSON")
}

pub fn nums(v: &[f64]) -> Vec<Box<RawValue>> {
    v.iter().map(|&x| num(x)).collect()
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, Failure> {
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

/// Standard output, or a file resolved against `ATLAS_OUT_DIR`.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        let path = path.map(|p| match std::env::var_os("ATLAS_OUT_DIR") {
            Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
            _ => p,
        });
        Sink { path }
    }

    pub fn write_bytes(&self, bytes: &[u8]) -> Result<(), Failure> {
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }

    pub fn write_str(&self, s: &str) -> Result<(), Failure> {
        self.write_bytes(s.as_bytes())
    }

    pub fn write_line(&self, s: &str) -> Result<(), Failure> {
        self.write_str(&format!("{s}\n"))
    }

    pub fn write_json<T: Serialize>(&self, body: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string(body)?;
        text.push('\n');
        self.write_str(&text)
    }
}

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::manifest::RunManifest;
use crate::CliError;

/// Shortest round-trip decimal representation, switching to exponent form
/// for very small or very large magnitudes. Never locale dependent.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Accumulates CSV text with `\n` line endings.
#[derive(Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn with_header(header: &str) -> Self {
        let mut csv = Self::default();
        csv.line(header);
        csv
    }

    pub fn line(&mut self, line: &str) {
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{}", f.as_ref());
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Where a command's payload goes: an explicit path, a default file name in
/// the output directory, or standard output.
pub struct Destination {
    path: Option<PathBuf>,
}

impl Destination {
    pub fn resolve(
        output: Option<PathBuf>,
        output_dir: Option<PathBuf>,
        default_name: &str,
    ) -> Self {
        let path = output.or_else(|| output_dir.map(|d| d.join(default_name)));
        Self { path }
    }

    fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(path, bytes).map_err(|e| CliError::io(path, e))
    }

    /// Writes a text payload; the manifest goes to `<path>.manifest.json`, or
    /// to standard error as a single JSON line when writing to standard output.
    pub fn emit_text(&self, payload: &str, manifest: &RunManifest) -> Result<(), CliError> {
        let manifest_json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        match &self.path {
            Some(path) => {
                Self::write_bytes(path, payload.as_bytes())?;
                let mut side = path.clone().into_os_string();
                side.push(".manifest.json");
                let side = PathBuf::from(side);
                Self::write_bytes(&side, format!("{manifest_json}\n").as_bytes())
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(payload.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
                eprintln!(
                    "{}",
                    serde_json::to_string(manifest).expect("manifest serializes")
                );
                Ok(())
            }
        }
    }

    /// Writes a JSON document with the manifest embedded under `"manifest"`.
    pub fn emit_json<T: Serialize>(
        &self,
        body: &T,
        manifest: &RunManifest,
    ) -> Result<(), CliError> {
        let mut doc = serde_json::to_value(body).expect("payload serializes");
        if let Value::Object(map) = &mut doc {
            map.insert(
                "manifest".to_string(),
                serde_json::to_value(manifest).expect("manifest serializes"),
            );
        }
        let text = format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("payload serializes")
        );
        match &self.path {
            Some(path) => Self::write_bytes(path, text.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io(Path::new("<stdout>"), e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.0,
            0.1,
            -0.6666666666666667,
            40.0,
            1e-300,
            3.5e-12,
            1e20,
            -123.456,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains(' '));
        }
        assert_eq!(fmt_f64(0.2224), "0.2224");
        assert_eq!(fmt_f64(2.5e-7), "2.5e-7");
    }

    #[test]
    fn csv_rows() {
        let mut csv = Csv::with_header("a,b");
        csv.row(["1", "2"]);
        assert_eq!(csv.into_string(), "a,b\n1,2\n");
    }
}

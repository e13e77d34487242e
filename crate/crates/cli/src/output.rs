//! CSV and JSON emission. CSV files carry a `#` header with the version,
//! seed and resolved config so that identical runs give identical bytes;
//! wall time goes to a `.meta.json` sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `x` with 12 significant digits: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub struct Csv {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, cfg: &RunConfig, command: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!("# hypwalk {VERSION} {command}\n"));
        s.push_str(&format!("# seed = {}\n", cfg.seed));
        for line in cfg.echo_lines() {
            s.push_str(&format!("# {line}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Output directory plus the run's metadata.
pub struct Sink<'a> {
    pub dir: PathBuf,
    pub cfg: &'a RunConfig,
    pub command: &'a str,
    pub started: std::time::Instant,
    written: Vec<String>,
}

impl<'a> Sink<'a> {
    pub fn new(dir: &Path, cfg: &'a RunConfig, command: &'a str) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            cfg,
            command,
            started: std::time::Instant::now(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Csv) -> Result<(), CliError> {
        let text = table.render(self.cfg, self.command);
        self.write(name, &text)
    }

    /// JSON report with the version, seed and config echo attached.
    pub fn json(&mut self, name: &str, body: serde_json::Value) -> Result<(), CliError> {
        let doc = serde_json::json!({
            "version": VERSION,
            "command": self.command,
            "seed": self.cfg.seed,
            "config": self.cfg.echo_json(),
            "report": body,
        });
        let text = serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n";
        self.write(name, &text)
    }

    /// Writes `<command>.meta.json` with the wall time and the file list.
    pub fn finish(mut self, status: &str) -> Result<(), CliError> {
        let doc = serde_json::json!({
            "version": VERSION,
            "command": self.command,
            "seed": self.cfg.seed,
            "config": self.cfg.echo_json(),
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "threads": rayon::current_num_threads(),
            "status": status,
            "files": self.written,
        });
        let text = serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n";
        let name = format!("{}.meta.json", self.command);
        self.write(&name, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_f64(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt_f64(1234567.0), "1234567");
        assert_eq!(fmt_f64(0.000123456789012345), "0.000123456789012");
        assert_eq!(fmt_f64(6.02e23), "6.02e23");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }
}

//! Run configuration: flat `key = value` lines plus raw text blocks.
//!
//! ```text
//! # comment
//! group = triangle 2,3,7
//! steps = 2000
//! [family]
//! 1 2 n
//! ...
//! [run]
//! seed = 4
//! ```
//!
//! A `[diagram]`, `[family]` or `[measure]` header starts a block that runs
//! to the next header; `[run]` switches back to `key = value` lines.

use std::collections::BTreeMap;

use hypwalk_core::tolerance::{Limits, Tolerances};

use crate::CliError;

/// Keys with their defaults, in echo order.
const DEFAULTS: &[(&str, &str)] = &[
    ("group", ""),
    ("family", ""),
    ("measure", "uniform-on-generators"),
    ("seed", "1"),
    ("steps", "2000"),
    ("trials", "4000"),
    ("trace_every", "0"),
    ("k_max", "8"),
    ("r_max", "8"),
    ("v_mode", "lattice"),
    ("prune_floor", "1e-15"),
    ("support_cap", "2000000"),
    ("depth_cap", "12"),
    ("ball_cap", "14"),
    ("bins", "64"),
    ("bands", "8"),
    ("longitudes", "8"),
    ("escape_radius", "0.999999"),
    ("max_steps", "100000"),
];

const TOLERANCE_KEYS: &[&str] = &[
    "tol.hyperboloid",
    "tol.distance_pair",
    "tol.determinant",
    "tol.lorentz_form",
    "tol.boundary_norm",
    "tol.psl_sign",
    "tol.key_grid",
    "tol.key_probe",
    "tol.key_audit",
    "tol.mass_total",
];

const BLOCKS: &[&str] = &["diagram", "family", "measure"];

/// Raw settings: `key = value` pairs and named text blocks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub values: BTreeMap<String, String>,
    pub blocks: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = RawConfig::default();
        let mut block: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let trimmed = raw.trim();
            if let Some(name) = trimmed.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                let name = name.trim().to_ascii_lowercase();
                if name == "run" {
                    block = None;
                } else if BLOCKS.contains(&name.as_str()) {
                    out.blocks.insert(name.clone(), String::new());
                    block = Some(name);
                } else {
                    return Err(CliError::Config(format!("line {}: unknown section [{name}]", no + 1)));
                }
                continue;
            }
            if let Some(b) = &block {
                let text = out.blocks.get_mut(b).expect("block inserted at its header");
                text.push_str(raw);
                text.push('\n');
                continue;
            }
            let line = trimmed.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            out.set(k.trim(), v.trim())?;
        }
        Ok(out)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !DEFAULTS.iter().any(|(k, _)| *k == key) && !TOLERANCE_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key {key:?}")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }
}

/// Resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub group: String,
    pub family: String,
    pub measure: String,
    pub seed: u64,
    pub steps: usize,
    pub trials: usize,
    pub trace_every: usize,
    pub k_max: usize,
    pub r_max: usize,
    pub ball_estimate: bool,
    pub prune_floor: f64,
    pub limits: Limits,
    pub bins: usize,
    pub bands: usize,
    pub longitudes: usize,
    pub escape_radius: f64,
    pub max_steps: usize,
    pub tolerances: Tolerances,
    pub tolerance_overridden: bool,
    pub blocks: BTreeMap<String, String>,
    echo: Vec<(String, String)>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("{key} = {v:?} is not a valid number")))
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self, CliError> {
        let mut echo = Vec::new();
        let mut get = |k: &str| -> String {
            let default = DEFAULTS.iter().find(|(d, _)| *d == k).map(|(_, v)| *v).unwrap_or("");
            let v = raw.values.get(k).map(String::as_str).unwrap_or(default).to_string();
            echo.push((k.to_string(), v.clone()));
            v
        };
        let group = get("group");
        let family = get("family");
        let measure = get("measure");
        let seed = num("seed", &get("seed"))?;
        let steps = num("steps", &get("steps"))?;
        let trials = num("trials", &get("trials"))?;
        let trace_every = num("trace_every", &get("trace_every"))?;
        let k_max = num("k_max", &get("k_max"))?;
        let r_max = num("r_max", &get("r_max"))?;
        let ball_estimate = match get("v_mode").as_str() {
            "lattice" => false,
            "ball" => true,
            other => return Err(CliError::Config(format!("v_mode must be lattice or ball, got {other:?}"))),
        };
        let prune_floor = num("prune_floor", &get("prune_floor"))?;
        let limits = Limits {
            support: num("support_cap", &get("support_cap"))?,
            convolution_depth: num("depth_cap", &get("depth_cap"))?,
            ball_radius: num("ball_cap", &get("ball_cap"))?,
        };
        let bins = num("bins", &get("bins"))?;
        let bands = num("bands", &get("bands"))?;
        let longitudes = num("longitudes", &get("longitudes"))?;
        let escape_radius = num("escape_radius", &get("escape_radius"))?;
        let max_steps = num("max_steps", &get("max_steps"))?;

        let mut tolerances = Tolerances::DEFAULT;
        let mut tolerance_overridden = false;
        for key in TOLERANCE_KEYS {
            if let Some(v) = raw.values.get(*key) {
                let x: f64 = num(key, v)?;
                tolerance_overridden = true;
                echo.push((key.to_string(), v.clone()));
                let field = match *key {
                    "tol.hyperboloid" => &mut tolerances.hyperboloid,
                    "tol.distance_pair" => &mut tolerances.distance_pair,
                    "tol.determinant" => &mut tolerances.determinant,
                    "tol.lorentz_form" => &mut tolerances.lorentz_form,
                    "tol.boundary_norm" => &mut tolerances.boundary_norm,
                    "tol.psl_sign" => &mut tolerances.psl_sign,
                    "tol.key_grid" => &mut tolerances.key_grid,
                    "tol.key_probe" => &mut tolerances.key_probe,
                    "tol.key_audit" => &mut tolerances.key_audit,
                    _ => &mut tolerances.mass_total,
                };
                *field = x;
            }
        }
        tolerances.prune_floor = prune_floor;

        if !(escape_radius > 0.0 && escape_radius < 1.0) {
            return Err(CliError::Config(format!("escape_radius = {escape_radius} must lie in (0, 1)")));
        }
        if bins == 0 || bands == 0 || longitudes == 0 {
            return Err(CliError::Config("bin counts must be positive".into()));
        }
        Ok(Self {
            group,
            family,
            measure,
            seed,
            steps,
            trials,
            trace_every,
            k_max,
            r_max,
            ball_estimate,
            prune_floor,
            limits,
            bins,
            bands,
            longitudes,
            escape_radius,
            max_steps,
            tolerances,
            tolerance_overridden,
            blocks: raw.blocks.clone(),
            echo,
        })
    }

    /// Every resolved setting, defaults included, followed by the blocks.
    pub fn echo_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.echo.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        for (name, text) in &self.blocks {
            lines.push(format!("[{name}]"));
            lines.extend(text.lines().map(str::to_string));
        }
        lines
    }

    /// Settings as a JSON object (string values, as written).
    pub fn echo_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in &self.echo {
            m.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        for (name, text) in &self.blocks {
            m.insert(format!("[{name}]"), serde_json::Value::String(text.clone()));
        }
        serde_json::Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_blocks() {
        let raw = RawConfig::parse(
            "# demo\ngroup = triangle 2,3,7\nsteps = 10 # inline\n[measure]\n1 : 1/2\n2 : 1/2\n[run]\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(raw.values["group"], "triangle 2,3,7");
        assert_eq!(raw.values["seed"], "9");
        assert_eq!(raw.blocks["measure"], "1 : 1/2\n2 : 1/2\n");
        let cfg = RunConfig::resolve(&raw).unwrap();
        assert_eq!((cfg.steps, cfg.seed, cfg.trials), (10, 9, 4000));
        assert!(cfg.echo_lines().contains(&"trials = 4000".to_string()));
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(RawConfig::parse("colour = red\n").is_err());
        assert!(RawConfig::parse("[graph]\n").is_err());
        assert!(RawConfig::parse("steps 10\n").is_err());
        let raw = RawConfig::parse("steps = many\n").unwrap();
        assert!(RunConfig::resolve(&raw).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let raw = RawConfig::parse("tol.key_audit = 1e-5\n").unwrap();
        let cfg = RunConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.tolerances.key_audit, 1e-5);
        assert!(cfg.tolerance_overridden);
    }
}

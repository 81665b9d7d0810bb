//! Flat `key = value` study configuration.
//!
//! ```text
//! # kinetic linear study
//! problem = kinetic
//! scheme = lie-euler, strang-cn
//! h = 0.09
//! tau_list = 2^-4, 2^-5, 2^-6
//! tau_ref = 2^-11
//! ```

use std::path::{Path, PathBuf};

use dynbc_core::study::{Nonlinearity, Norm, Problem, Scheme, StudyConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Study settings plus the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub study: StudyConfig,
    pub output_dir: PathBuf,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self { study: StudyConfig::default(), output_dir: PathBuf::from("out") }
    }
}

/// Parses a step size: a plain number or `2^-k`.
pub fn parse_step(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let e: i32 = exp.trim().parse().ok()?;
        return Some(2f64.powi(e));
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    value.split(',').map(|s| item(s.trim())).collect()
}

impl HarnessConfig {
    /// Applies one setting. Keys match the long CLI flags with `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::InvalidValue { key: key.to_string(), value: value.to_string() };
        let number = || value.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        let s = &mut self.study;
        match key.replace('-', "_").as_str() {
            "problem" => s.problem = Problem::parse(value).ok_or_else(bad)?,
            "scheme" | "schemes" => s.schemes = parse_list(value, Scheme::parse).ok_or_else(bad)?,
            "h" => s.h = number()?,
            "tau_list" => s.tau_list = parse_list(value, parse_step).ok_or_else(bad)?,
            "tau_ref" => s.tau_ref = parse_step(value).ok_or_else(bad)?,
            "T" | "final_time" => s.final_time = number()?,
            "beta" => s.beta = number()?,
            "kappa" => s.kappa = number()?,
            "nonlinearity" => s.nonlinearity = Nonlinearity::parse(value).ok_or_else(bad)?,
            "norms" => s.norms = parse_list(value, Norm::parse).ok_or_else(bad)?,
            "acoustic_k" => s.acoustic_k = number()?,
            "output_dir" | "out" => self.output_dir = PathBuf::from(value),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, message: "expected `key = value`".into() })?;
            self.set(key.trim(), value.trim()).map_err(|e| ConfigError::Syntax { line: i + 1, message: e.to_string() })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        self.apply_str(&text)
    }

    /// Serialized form accepted by [`HarnessConfig::apply_str`].
    pub fn to_text(&self) -> String {
        let s = &self.study;
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("problem", s.problem.name().into());
        kv("scheme", join(s.schemes.iter().map(|x| x.name().to_string()).collect()));
        kv("h", s.h.to_string());
        kv("tau_list", join(s.tau_list.iter().map(|t| t.to_string()).collect()));
        kv("tau_ref", s.tau_ref.to_string());
        kv("T", s.final_time.to_string());
        kv("beta", s.beta.to_string());
        kv("kappa", s.kappa.to_string());
        kv("nonlinearity", s.nonlinearity.name().into());
        kv("norms", join(s.norms.iter().map(|n| n.name().to_string()).collect()));
        kv("acoustic_k", s.acoustic_k.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_syntax() {
        let mut c = HarnessConfig::default();
        c.apply_str(
            "# comment\nproblem = acoustic\nscheme = lie-euler, reference-cn\ntau_list = 2^-3, 0.0625 # inline\n\nT=2\nnorms=L2L2\n",
        )
        .unwrap();
        assert_eq!(c.study.problem, Problem::Acoustic);
        assert_eq!(c.study.schemes.len(), 2);
        assert_eq!(c.study.tau_list, vec![0.125, 0.0625]);
        assert_eq!(c.study.final_time, 2.0);
        assert_eq!(c.study.norms, vec![Norm::L2L2]);
    }

    #[test]
    fn rejects_garbage() {
        let mut c = HarnessConfig::default();
        assert!(matches!(c.apply_str("h 0.1"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("h", "nan").is_err());
        assert!(c.set("scheme", "lie-euler, bogus").is_err());
        assert!(c.set("tau_ref", "2^x").is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = HarnessConfig::default();
        c.set("nonlinearity", "allen-cahn-bulk").unwrap();
        let mut d = HarnessConfig { study: StudyConfig { h: 0.5, ..StudyConfig::default() }, ..HarnessConfig::default() };
        d.apply_str(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }
}

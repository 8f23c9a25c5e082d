use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
}

/// Resource budgets and output options shared by the library operations.
///
/// Loaded from a `key = value` file (`#` comments allowed) named either by the
/// `BRGK_CONFIG` environment variable or a CLI flag; unknown keys are rejected
/// so typos do not silently fall back to defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Trial-division bound for integer factorization; larger survivors go to
    /// Pollard rho with an effort cap derived from this number.
    pub factor_budget: u64,
    /// Maximum degree accepted for polynomial factorization over Q.
    pub poly_degree_cap: usize,
    /// Extra p-adic digits allowed past the discriminant valuation before a
    /// local-solvability search declares an internal precision failure.
    pub hensel_cap_extra: u32,
    /// Search bound for the quadratic-subfield genus check over Q.
    pub height_bound: u64,
    pub output: OutputMode,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            factor_budget: 1_000_000,
            poly_degree_cap: 12,
            hensel_cap_extra: 3,
            height_bound: 1000,
            output: OutputMode::Text,
        }
    }
}

impl Config {
    pub fn apply_line(&mut self, line: &str) -> Result<()> {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            return Ok(());
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Parse(format!("bad value {value:?} for {what}"));
        match key {
            "factor_budget" => {
                self.factor_budget = value.parse().map_err(|_| bad(key))?;
                if self.factor_budget < 100 {
                    return Err(Error::Parse("factor_budget must be at least 100".into()));
                }
            }
            "poly_degree_cap" => self.poly_degree_cap = value.parse().map_err(|_| bad(key))?,
            "hensel_cap_extra" => self.hensel_cap_extra = value.parse().map_err(|_| bad(key))?,
            "height_bound" => self.height_bound = value.parse().map_err(|_| bad(key))?,
            "output" => {
                self.output = match value {
                    "text" => OutputMode::Text,
                    "json" => OutputMode::Json,
                    _ => return Err(bad(key)),
                }
            }
            _ => return Err(Error::Parse(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for line in text.lines() {
            cfg.apply_line(line)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &str) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {path}: {e}")))?;
        Config::parse(&text)
    }

    /// Default config, overridden by the file named in `BRGK_CONFIG` if set.
    pub fn from_env() -> Result<Config> {
        match std::env::var("BRGK_CONFIG") {
            Ok(path) if !path.is_empty() => Config::from_file(&path),
            _ => Ok(Config::default()),
        }
    }
}

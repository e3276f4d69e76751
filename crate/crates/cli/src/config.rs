//! Optional `key = value` defaults, read from the file named by
//! `APAVOID_CONFIG`. Command-line flags take precedence.

use std::fs;
use std::str::FromStr;

use apavoid::{parse_rational, Rational};
use num_bigint::BigInt;

pub const CONFIG_ENV: &str = "APAVOID_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown output format {other:?}; use json or csv")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub default_n: u64,
    pub search_depth: u64,
    pub max_refine_width: Rational,
    /// `None` lets each command pick its natural format.
    pub output_format: Option<Format>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            default_n: 3,
            search_depth: 1_000_000,
            max_refine_width: Rational::new(BigInt::from(1), BigInt::from(1) << 256),
            output_format: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut config = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| format!("line {}: {key} {what}", lineno + 1);
            match key {
                "default_N" => {
                    config.default_n = value.parse().map_err(|_| bad("must be an integer"))?;
                    if config.default_n < 1 {
                        return Err(bad("must be at least 1"));
                    }
                }
                "search_depth" => {
                    config.search_depth = value.parse().map_err(|_| bad("must be an integer"))?;
                    if config.search_depth < 1 {
                        return Err(bad("must be at least 1"));
                    }
                }
                "max_refine_width" => {
                    let w = parse_rational(value).map_err(|e| bad(&e.to_string()))?;
                    if w <= Rational::from_integer(BigInt::from(0)) {
                        return Err(bad("must be positive"));
                    }
                    config.max_refine_width = w;
                }
                "output_format" => {
                    config.output_format = Some(value.parse().map_err(|e: String| bad(&e))?)
                }
                _ => return Err(format!("line {}: unknown key {key:?}", lineno + 1)),
            }
        }
        Ok(config)
    }

    /// Defaults, overridden by the file in `APAVOID_CONFIG` when it is set.
    pub fn load() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            None => Ok(Config::default()),
            Some(path) => {
                let text = fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
                Config::parse(&text).map_err(|e| format!("config {}: {e}", path.to_string_lossy()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let c = Config::parse(
            "# defaults\ndefault_N = 5\nsearch_depth=1000\nmax_refine_width = 1/1024\noutput_format = csv\n",
        )
        .unwrap();
        assert_eq!(c.default_n, 5);
        assert_eq!(c.search_depth, 1000);
        assert_eq!(c.max_refine_width, Rational::new(1.into(), 1024.into()));
        assert_eq!(c.output_format, Some(Format::Csv));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("default_N = 0").is_err());
        assert!(Config::parse("search_depth").is_err());
        assert!(Config::parse("max_refine_width = 0.5").is_err());
        assert!(Config::parse("colour = blue").is_err());
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }
}

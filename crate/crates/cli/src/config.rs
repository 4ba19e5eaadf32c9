//! `key = value` config file, merged under command-line flags.

use std::path::Path;
use std::str::FromStr;

use hankel_core::arith::BigInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliConfig {
    pub format: Option<Format>,
    pub bound: Option<BigInt>,
    pub budget: Option<u64>,
    pub jobs: Option<usize>,
}

impl CliConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = CliConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| format!("line {}: invalid {what} {value:?}", lineno + 1);
            match key {
                "format" => {
                    cfg.format = Some(match value {
                        "text" => Format::Text,
                        "json" => Format::Json,
                        _ => return Err(bad("format")),
                    })
                }
                "bound" => cfg.bound = Some(BigInt::from_str(value).map_err(|_| bad("bound"))?),
                "budget" => cfg.budget = Some(value.parse().map_err(|_| bad("budget"))?),
                "jobs" => cfg.jobs = Some(value.parse().map_err(|_| bad("jobs"))?),
                other => return Err(format!("line {}: unknown key {other:?}", lineno + 1)),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Fields set in `flags` override those in `self`.
    pub fn merged_with(self, flags: CliConfig) -> CliConfig {
        CliConfig {
            format: flags.format.or(self.format),
            bound: flags.bound.or(self.bound),
            budget: flags.budget.or(self.budget),
            jobs: flags.jobs.or(self.jobs),
        }
    }
}

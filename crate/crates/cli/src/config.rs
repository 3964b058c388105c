//! Effective configuration: built-in defaults, then an optional TOML file,
//! then command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use afsmr_core::benchmark::DEFAULT_CROP;
use afsmr_core::{Method, ResamplerConfig};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEQUENCES: &str = "zoom15,affine4,rot30";
pub const DEFAULT_REPORT: &str = "report.csv";

/// Keys accepted in a config file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub block: Option<usize>,
    pub support: Option<usize>,
    pub iterations: Option<usize>,
    pub min_gain: Option<f64>,
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub method: Option<String>,
    pub methods: Option<String>,
    pub sequences: Option<String>,
    pub crop: Option<usize>,
    pub threads: Option<usize>,
    pub report: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Fills every unset key of `self` from `lower`.
    pub fn or(self, lower: FileConfig) -> FileConfig {
        FileConfig {
            block: self.block.or(lower.block),
            support: self.support.or(lower.support),
            iterations: self.iterations.or(lower.iterations),
            min_gain: self.min_gain.or(lower.min_gain),
            rho: self.rho.or(lower.rho),
            sigma: self.sigma.or(lower.sigma),
            alpha: self.alpha.or(lower.alpha),
            method: self.method.or(lower.method),
            methods: self.methods.or(lower.methods),
            sequences: self.sequences.or(lower.sequences),
            crop: self.crop.or(lower.crop),
            threads: self.threads.or(lower.threads),
            report: self.report.or(lower.report),
        }
    }
}

/// Fully resolved settings, printable as TOML that loads back unchanged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliConfig {
    pub block: usize,
    pub support: usize,
    pub iterations: usize,
    pub min_gain: f64,
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub method: String,
    pub methods: String,
    pub sequences: String,
    pub crop: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub report: PathBuf,
}

fn parse_methods(list: &str) -> Result<Vec<Method>, String> {
    let methods: Vec<Method> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Method>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if methods.is_empty() {
        return Err("no methods given".into());
    }
    Ok(methods)
}

impl CliConfig {
    pub fn resolve(c: FileConfig) -> Result<Self, String> {
        let d = ResamplerConfig::default();
        let all = Method::ALL.map(Method::name).join(",");
        let cfg = CliConfig {
            block: c.block.unwrap_or(d.block),
            support: c.support.unwrap_or(d.support),
            iterations: c.iterations.unwrap_or(d.stopping.max_iterations),
            min_gain: c.min_gain.unwrap_or(d.stopping.min_energy_reduction),
            rho: c.rho.unwrap_or(d.weighting.rho),
            sigma: c.sigma.unwrap_or(d.weighting.sigma),
            alpha: c.alpha.unwrap_or(d.weighting.alpha),
            method: c.method.unwrap_or_else(|| d.method.to_string()),
            methods: c.methods.unwrap_or(all),
            sequences: c.sequences.unwrap_or_else(|| DEFAULT_SEQUENCES.into()),
            crop: c.crop.unwrap_or(DEFAULT_CROP),
            threads: c.threads,
            report: c.report.unwrap_or_else(|| DEFAULT_REPORT.into()),
        };
        // Surface bad values before any work starts.
        cfg.resampler().validate().map_err(|e| e.to_string())?;
        cfg.method_list()?;
        Ok(cfg)
    }

    pub fn primary_method(&self) -> Result<Method, String> {
        self.method.parse().map_err(|e: afsmr_core::Error| e.to_string())
    }

    pub fn method_list(&self) -> Result<Vec<Method>, String> {
        parse_methods(&self.methods)
    }

    pub fn resampler(&self) -> ResamplerConfig {
        let mut r = ResamplerConfig {
            block: self.block,
            support: self.support,
            threads: self.threads,
            ..ResamplerConfig::default()
        };
        r.stopping.max_iterations = self.iterations;
        r.stopping.min_energy_reduction = self.min_gain;
        r.weighting.rho = self.rho;
        r.weighting.sigma = self.sigma;
        r.weighting.alpha = self.alpha;
        if let Ok(m) = self.primary_method() {
            r.method = m;
        }
        r
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_core() {
        let cfg = CliConfig::resolve(FileConfig::default()).unwrap();
        assert_eq!(cfg.resampler(), ResamplerConfig::default());
        assert_eq!(cfg.crop, 24);
        assert_eq!(cfg.method_list().unwrap().len(), 6);
    }

    #[test]
    fn printed_config_reloads() {
        let cfg = CliConfig::resolve(FileConfig {
            alpha: Some(0.25),
            threads: Some(3),
            ..FileConfig::default()
        })
        .unwrap();
        let back: FileConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(CliConfig::resolve(back).unwrap(), cfg);
    }

    #[test]
    fn flags_win_over_file() {
        let file = FileConfig {
            rho: Some(0.5),
            sigma: Some(0.7),
            ..FileConfig::default()
        };
        let flags = FileConfig {
            rho: Some(0.6),
            ..FileConfig::default()
        };
        let cfg = CliConfig::resolve(flags.or(file)).unwrap();
        assert_eq!((cfg.rho, cfg.sigma), (0.6, 0.7));
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |f: FileConfig| CliConfig::resolve(f).is_err();
        assert!(bad(FileConfig { rho: Some(1.0), ..FileConfig::default() }));
        assert!(bad(FileConfig { methods: Some("afsmr,nearest".into()), ..FileConfig::default() }));
        assert!(bad(FileConfig { iterations: Some(0), ..FileConfig::default() }));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}

//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use hypermass::mass::MassTolerances;

/// Configuration problems; the process exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
    /// Slack allowed in the hypothesis curly R ≥ 0.
    pub reg: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub start: Option<f64>,
    pub rungs: Option<usize>,
}

/// Every field is optional; flags fill or override them.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<String>,
    pub profile: Option<PathBuf>,
    pub n: Option<usize>,
    pub m: Option<f64>,
    pub masses: Option<Vec<f64>>,
    pub c: Option<f64>,
    pub amplitude: Option<f64>,
    pub rate: Option<f64>,
    pub kappa: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub h: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ladder: LadderConfig,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` win over `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            family: flags.family.or(self.family),
            profile: flags.profile.or(self.profile),
            n: flags.n.or(self.n),
            m: flags.m.or(self.m),
            masses: flags.masses.or(self.masses),
            c: flags.c.or(self.c),
            amplitude: flags.amplitude.or(self.amplitude),
            rate: flags.rate.or(self.rate),
            kappa: flags.kappa.or(self.kappa),
            beta: flags.beta.or(self.beta),
            rho: flags.rho.or(self.rho),
            h: flags.h.or(self.h),
            tolerances: Tolerances {
                abs: flags.tolerances.abs.or(self.tolerances.abs),
                rel: flags.tolerances.rel.or(self.tolerances.rel),
                reg: flags.tolerances.reg.or(self.tolerances.reg),
            },
            ladder: LadderConfig {
                start: flags.ladder.start.or(self.ladder.start),
                rungs: flags.ladder.rungs.or(self.ladder.rungs),
            },
            format: flags.format.or(self.format),
            output: flags.output.or(self.output),
            seed: flags.seed.or(self.seed),
        }
    }

    /// Range checks shared by every command.
    pub fn validate(&self) -> anyhow::Result<()> {
        if let Some(n) = self.n {
            if n < 3 {
                return Err(config_error(format!("n must be at least 3, got {n}")));
            }
        }
        if let Some(m) = self.m {
            if !(m > 0.0 && m.is_finite()) {
                return Err(config_error(format!("m must be positive, got {m}")));
            }
        }
        if let Some(ms) = &self.masses {
            if ms.is_empty() {
                return Err(config_error("mass list is empty"));
            }
            if ms.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
                return Err(config_error("masses must be positive"));
            }
        }
        for (name, v) in [("beta", self.beta), ("kappa", self.kappa), ("rho", self.rho)] {
            if let Some(v) = v {
                let ok = if name == "beta" { v > 1.0 } else { v > 0.0 };
                if !(ok && v.is_finite()) {
                    let bound = if name == "beta" { "exceed 1" } else { "be positive" };
                    return Err(config_error(format!("{name} must {bound}, got {v}")));
                }
            }
        }
        for (name, v) in [("tolerances.abs", self.tolerances.abs), ("tolerances.rel", self.tolerances.rel), ("tolerances.reg", self.tolerances.reg), ("ladder.start", self.ladder.start)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(config_error(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(k) = self.ladder.rungs {
            if k < 3 {
                return Err(config_error(format!("ladder.rungs must be at least 3, got {k}")));
            }
        }
        Ok(())
    }

    pub fn mass_tolerances(&self) -> MassTolerances {
        let mut t = MassTolerances::default();
        if let Some(a) = self.tolerances.abs {
            t.ladder_abs = a;
            t.quad_abs = a;
        }
        if let Some(r) = self.tolerances.rel {
            t.ladder_rel = r;
            t.quad_rel = r;
        }
        if let Some(s) = self.ladder.start {
            t.ladder_start = s;
        }
        if let Some(k) = self.ladder.rungs {
            t.ladder_rungs = k;
        }
        t
    }

    pub fn reg(&self) -> f64 {
        self.tolerances.reg.unwrap_or(1e-8)
    }
}

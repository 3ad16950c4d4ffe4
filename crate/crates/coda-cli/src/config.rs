//! Run configuration: defaults, a simple key=value config file, and the
//! validation of every numeric setting. The resolved configuration is echoed
//! verbatim into every report header.

use std::fmt::Write as _;
use std::path::Path;

use coda_core::GroupBy;

use crate::error::CliError;

/// Covariates that can be cross-tabulated against the clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Covariate {
    Nace,
    Year,
    LegalForm,
    Importer,
    Exporter,
}

impl Covariate {
    pub const ALL: [Covariate; 5] = [
        Covariate::Nace,
        Covariate::Year,
        Covariate::LegalForm,
        Covariate::Importer,
        Covariate::Exporter,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Covariate::Nace => "nace",
            Covariate::Year => "year",
            Covariate::LegalForm => "legal_form",
            Covariate::Importer => "importer",
            Covariate::Exporter => "exporter",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "nace" => Ok(Covariate::Nace),
            "year" => Ok(Covariate::Year),
            "legal_form" => Ok(Covariate::LegalForm),
            "importer" => Ok(Covariate::Importer),
            "exporter" => Ok(Covariate::Exporter),
            other => Err(CliError::Usage(format!(
                "unknown covariate '{other}' (expected nace, year, legal_form, importer, exporter)"
            ))),
        }
    }
}

/// All pipeline settings. `seed` has no default and must come from the
/// command line or the config file for any clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dl_percentile: f64,
    pub em_tol: f64,
    pub em_max_iter: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub seed: Option<u64>,
    pub employee_threshold: u32,
    /// Skip cluster-count selection and fit exactly this k.
    pub forced_k: Option<usize>,
    pub group_keys: Vec<GroupBy>,
    pub associations: Vec<Covariate>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dl_percentile: 5.0,
            em_tol: 1e-6,
            em_max_iter: 200,
            k_min: 2,
            k_max: 10,
            restarts: 50,
            seed: None,
            employee_threshold: 10,
            forced_k: None,
            group_keys: vec![GroupBy::Year, GroupBy::Nace, GroupBy::Cluster],
            associations: Covariate::ALL.to_vec(),
        }
    }
}

impl RunConfig {
    /// Applies one `key=value` setting. Unknown keys are usage errors.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Usage(format!("invalid {what} '{value}'"));
        match key {
            "dl_percentile" => self.dl_percentile = value.parse().map_err(|_| bad(key))?,
            "em_tol" => self.em_tol = value.parse().map_err(|_| bad(key))?,
            "em_max_iter" => self.em_max_iter = value.parse().map_err(|_| bad(key))?,
            "k_min" => self.k_min = value.parse().map_err(|_| bad(key))?,
            "k_max" => self.k_max = value.parse().map_err(|_| bad(key))?,
            "restarts" => self.restarts = value.parse().map_err(|_| bad(key))?,
            "seed" => self.seed = Some(value.parse().map_err(|_| bad(key))?),
            "employee_threshold" => {
                self.employee_threshold = value.parse().map_err(|_| bad(key))?
            }
            "k" => self.forced_k = Some(value.parse().map_err(|_| bad(key))?),
            "group_by" => {
                self.group_keys = split_list(value)
                    .map(|s| GroupBy::parse(s).map_err(|e| CliError::Usage(e.to_string())))
                    .collect::<Result<_, _>>()?
            }
            "associations" => {
                self.associations = split_list(value).map(Covariate::parse).collect::<Result<_, _>>()?
            }
            other => {
                return Err(CliError::Usage(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    /// Reads a `key=value` config file ('#' starts a comment).
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: expected key=value, got '{raw}'",
                    lineno + 1
                ))
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Range checks on every numeric setting.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.dl_percentile > 0.0 && self.dl_percentile < 100.0) {
            return Err(CliError::Usage(format!(
                "dl_percentile must be in (0, 100), got {}",
                self.dl_percentile
            )));
        }
        if !(self.em_tol > 0.0) {
            return Err(CliError::Usage(format!(
                "em_tol must be > 0, got {}",
                self.em_tol
            )));
        }
        if self.em_max_iter == 0 {
            return Err(CliError::Usage("em_max_iter must be >= 1".into()));
        }
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(CliError::Usage(format!(
                "need 2 <= k_min <= k_max, got k_min={} k_max={}",
                self.k_min, self.k_max
            )));
        }
        if self.restarts == 0 {
            return Err(CliError::Usage("restarts must be >= 1".into()));
        }
        if let Some(k) = self.forced_k {
            if k < 2 {
                return Err(CliError::Usage(format!("forced k must be >= 2, got {k}")));
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("--seed is mandatory for this command".into()))
    }

    /// Deterministic `key = value` echo for report headers.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dl_percentile = {}", self.dl_percentile);
        let _ = writeln!(s, "em_tol = {}", self.em_tol);
        let _ = writeln!(s, "em_max_iter = {}", self.em_max_iter);
        let _ = writeln!(s, "k_min = {}", self.k_min);
        let _ = writeln!(s, "k_max = {}", self.k_max);
        let _ = writeln!(s, "restarts = {}", self.restarts);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(s, "seed = {seed}");
            }
            None => {
                let _ = writeln!(s, "seed = (none)");
            }
        }
        let _ = writeln!(s, "employee_threshold = {}", self.employee_threshold);
        match self.forced_k {
            Some(k) => {
                let _ = writeln!(s, "k = {k}");
            }
            None => {
                let _ = writeln!(s, "k = (selected by scan)");
            }
        }
        let groups: Vec<&str> = self.group_keys.iter().map(|g| g.as_str()).collect();
        let _ = writeln!(s, "group_by = {}", groups.join(","));
        let assoc: Vec<&str> = self.associations.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(s, "associations = {}", assoc.join(","));
        s
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

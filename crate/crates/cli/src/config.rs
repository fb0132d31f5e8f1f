use crate::CliError;
use bmk_core::geometry::DomainSpec;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BmkVerify,
    BmkLp,
    Mollify,
    GreenStokes,
    YoungScan,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::BmkVerify,
        Experiment::BmkLp,
        Experiment::Mollify,
        Experiment::GreenStokes,
        Experiment::YoungScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::BmkVerify => "bmk-verify",
            Experiment::BmkLp => "bmk-lp",
            Experiment::Mollify => "mollify",
            Experiment::GreenStokes => "green-stokes",
            Experiment::YoungScan => "young-scan",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::Usage(format!("experiment: unknown name {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("format: expected csv or json, got {s:?}"))),
        }
    }
}

/// Verdict thresholds. Changing them never changes the measured rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Finest-level residual bound for the scalar case (`n = 1`).
    pub residual_c1: f64,
    /// Finest-level residual bound for `n >= 2`.
    pub residual_cn: f64,
    pub trace_error: f64,
    pub commutator_ratio: f64,
    pub green_stokes: f64,
    pub log_fit_residual: f64,
    /// Relative tolerance for `r = p` in the Young scan.
    pub exponent_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            residual_c1: 1e-3,
            residual_cn: 1e-2,
            trace_error: 1e-2,
            commutator_ratio: 1.0,
            green_stokes: 1e-8,
            log_fit_residual: 0.0,
            exponent_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub a: Vec<String>,
    pub b: String,
}

/// Exponents `(t, s, a, b)` of the Young scan; `"inf"` is accepted for `a`, `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YoungConfig {
    pub t: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub p_grid: Vec<f64>,
    pub samples: usize,
    pub fit_level: usize,
    pub x_level_offset: usize,
}

impl Default for YoungConfig {
    fn default() -> Self {
        YoungConfig {
            t: 1.0,
            s: 1.5,
            a: 4.0,
            b: f64::INFINITY,
            p_grid: vec![1.0, 1.25, 1.5, 2.0],
            samples: 20,
            fit_level: 8,
            x_level_offset: 3,
        }
    }
}

/// Everything an experiment reads. Unset optional fields take per-experiment
/// defaults, see [`ExperimentConfig::resolved`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub domain: Option<DomainSpec>,
    /// Complex dimension for the BMK experiments.
    pub n: Option<usize>,
    /// Form degree in `dzbar`.
    pub q: usize,
    pub f: Option<String>,
    pub f_boundary: Option<String>,
    pub u: Option<String>,
    pub v: Option<String>,
    pub bump_radius: Option<f64>,
    pub operator: Option<OperatorConfig>,
    pub level: Option<usize>,
    pub refinement_steps: usize,
    pub exclusion_factor: f64,
    pub eps: Vec<f64>,
    pub p: f64,
    pub grid: usize,
    pub points: usize,
    pub point_radius: Option<f64>,
    pub margin: f64,
    pub seed: u64,
    pub young: YoungConfig,
    pub thresholds: Thresholds,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            domain: None,
            n: None,
            q: 0,
            f: None,
            f_boundary: None,
            u: None,
            v: None,
            bump_radius: None,
            operator: None,
            level: None,
            refinement_steps: 2,
            exclusion_factor: 2.0,
            eps: vec![0.2, 0.1, 0.05, 0.025],
            p: 2.0,
            grid: 256,
            points: 4,
            point_radius: None,
            margin: 0.25,
            seed: 1,
            young: YoungConfig::default(),
            thresholds: Thresholds::default(),
            out: None,
            format: Format::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message().trim())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config: cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn experiment(&self) -> Result<Experiment, CliError> {
        self.experiment.ok_or_else(|| CliError::Usage("experiment: not set".into()))
    }

    /// Fill per-experiment defaults so the echoed config is complete.
    pub fn resolved(&self) -> Result<Self, CliError> {
        let e = self.experiment()?;
        let mut c = self.clone();
        match e {
            Experiment::BmkVerify => {
                c.n.get_or_insert(1);
                c.f.get_or_insert_with(|| "z1^2".into());
                c.level.get_or_insert(0);
                c.point_radius.get_or_insert(0.5);
            }
            Experiment::BmkLp => {
                c.n.get_or_insert(2);
                c.f.get_or_insert_with(|| "zb2*(1 + sqrt(1 - z1*zb1 - z2*zb2))".into());
                if self.f.is_none() && c.f_boundary.is_none() {
                    c.f_boundary = Some("zb2".into());
                }
                c.level.get_or_insert(0);
                c.point_radius.get_or_insert(0.4);
            }
            Experiment::Mollify => {
                c.f.get_or_insert_with(|| "1 + x1 + x2^2".into());
                c.bump_radius.get_or_insert(0.8);
                c.operator.get_or_insert_with(|| OperatorConfig {
                    a: vec!["1 + x2/2".into(), "0.5".into()],
                    b: "0".into(),
                });
            }
            Experiment::GreenStokes => {
                c.domain.get_or_insert(DomainSpec::IntervalBox {
                    lo: vec![-1.0, 0.0],
                    hi: vec![0.5, 1.0],
                });
                c.u.get_or_insert_with(|| "x1^2*x2 + i".into());
                c.v.get_or_insert_with(|| "x2 - x1".into());
                c.operator.get_or_insert_with(|| OperatorConfig {
                    a: vec!["1 + x2".into(), "i*x1".into()],
                    b: "0.5".into(),
                });
                c.level.get_or_insert(2);
            }
            Experiment::YoungScan => {
                c.level.get_or_insert(1);
            }
        }
        if matches!(e, Experiment::BmkVerify | Experiment::BmkLp) && c.domain.is_none() {
            c.domain = Some(DomainSpec::Ball {
                center: vec![0.0; 2 * c.n.unwrap_or(1)],
                radius: 1.0,
            });
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && !v.is_nan() {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{key}: must be positive, got {v}")))
            }
        };
        positive("exclusion_factor", self.exclusion_factor)?;
        positive("margin", self.margin)?;
        if self.p < 1.0 || self.p.is_nan() {
            return Err(CliError::Usage(format!("p: must be >= 1, got {}", self.p)));
        }
        if let Some(r) = self.point_radius {
            positive("point_radius", r)?;
        }
        if let Some(r) = self.bump_radius {
            positive("bump_radius", r)?;
        }
        if self.eps.is_empty() {
            return Err(CliError::Usage("eps: ladder is empty".into()));
        }
        for &e in &self.eps {
            positive("eps", e)?;
        }
        if self.n == Some(0) {
            return Err(CliError::Usage("n: must be positive".into()));
        }
        if self.grid < 2 {
            return Err(CliError::Usage(format!("grid: need at least 2 points per axis, got {}", self.grid)));
        }
        let y = &self.young;
        positive("young.t", y.t)?;
        positive("young.s", y.s)?;
        positive("young.a", y.a)?;
        positive("young.b", y.b)?;
        for &p in &y.p_grid {
            positive("young.p_grid", p)?;
        }
        if y.samples == 0 {
            return Err(CliError::Usage("young.samples: must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            let c = ExperimentConfig::from_toml(&format!("experiment = \"{e}\"")).unwrap();
            assert_eq!(c.experiment, Some(e));
        }
    }

    #[test]
    fn resolved_fills_defaults_and_echoes() {
        let c = ExperimentConfig {
            experiment: Some(Experiment::BmkLp),
            ..Default::default()
        };
        let r = c.resolved().unwrap();
        assert_eq!(r.n, Some(2));
        assert_eq!(r.f_boundary.as_deref(), Some("zb2"));
        assert!(matches!(&r.domain, Some(DomainSpec::Ball { center, .. }) if center.len() == 4));
        let echo = toml::to_string(&r).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&echo).unwrap(), r);
    }

    #[test]
    fn user_boundary_value_is_kept() {
        let c = ExperimentConfig::from_toml("experiment = \"bmk-lp\"\nf = \"z1\"").unwrap().resolved().unwrap();
        assert_eq!(c.f_boundary, None);
    }

    #[test]
    fn missing_experiment_is_a_usage_error() {
        assert!(matches!(ExperimentConfig::default().resolved(), Err(CliError::Usage(_))));
        assert!(matches!(ExperimentConfig::from_toml("p = 0.5\nexperiment = \"mollify\"").unwrap().resolved(), Err(CliError::Usage(m)) if m.starts_with("p:")));
        assert!("xml".parse::<Format>().is_err());
    }
}

//! Experiment configuration: defaults, then the `--config` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Roots,
    VerifyBasis,
    ReconstructLog,
    GinibreSample,
    PairVariance,
    Clt,
    FieldCovariance,
    SobolevTightness,
    DecayCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Roots,
        Experiment::VerifyBasis,
        Experiment::ReconstructLog,
        Experiment::GinibreSample,
        Experiment::PairVariance,
        Experiment::Clt,
        Experiment::FieldCovariance,
        Experiment::SobolevTightness,
        Experiment::DecayCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Roots => "roots",
            Experiment::VerifyBasis => "verify-basis",
            Experiment::ReconstructLog => "reconstruct-log",
            Experiment::GinibreSample => "ginibre-sample",
            Experiment::PairVariance => "pair-variance",
            Experiment::Clt => "clt",
            Experiment::FieldCovariance => "field-covariance",
            Experiment::SobolevTightness => "sobolev-tightness",
            Experiment::DecayCheck => "decay-check",
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
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
            CliError::Usage(format!("unknown experiment '{s}'; expected one of: {}", names.join(", ")))
        })
    }
}

/// Settings shared by the command line and the config file. Every field is
/// optional here; [`ExperimentConfig::resolve`] fills the gaps.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Overrides {
    /// Matrix size N; a comma-separated list where the experiment sweeps N.
    #[arg(long = "n-size", alias = "N", value_delimiter = ',', value_name = "N")]
    #[serde(default, alias = "N", deserialize_with = "one_or_many")]
    pub n_size: Option<Vec<usize>>,

    /// Number of Monte-Carlo draws M.
    #[arg(long, alias = "M", value_name = "M")]
    #[serde(default, alias = "M")]
    pub draws: Option<usize>,

    /// Largest |n| of the index cutoff.
    #[arg(long)]
    pub n_max: Option<u32>,

    /// Largest k of the index cutoff.
    #[arg(long)]
    pub k_max: Option<u32>,

    /// Sobolev exponent(s); comma-separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub sobolev_s: Option<Vec<f64>>,

    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Radial quadrature order (Gauss–Legendre nodes on [0, 1]).
    #[arg(long)]
    pub radial_order: Option<usize>,

    /// Angular quadrature order (equispaced nodes).
    #[arg(long)]
    pub angular_order: Option<usize>,

    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    }))
}

/// The optional `experiment` key of a config file, read separately so the
/// rest of the file can stay strict about unknown keys.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct FileHeader {
    experiment: Option<String>,
}

pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub overrides: Overrides,
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut table: toml::Table =
        text.parse().map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
    let header = FileHeader { experiment: table.remove("experiment").and_then(|v| v.as_str().map(String::from)) };
    let overrides = Overrides::deserialize(toml::Value::Table(table))
        .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
    Ok(ConfigFile { experiment: header.experiment.as_deref().map(str::parse).transpose()?, overrides })
}

impl Overrides {
    /// `self` with gaps filled from `base`.
    pub fn or(self, base: Overrides) -> Overrides {
        Overrides {
            n_size: self.n_size.or(base.n_size),
            draws: self.draws.or(base.draws),
            n_max: self.n_max.or(base.n_max),
            k_max: self.k_max.or(base.k_max),
            sobolev_s: self.sobolev_s.or(base.sobolev_s),
            seed: self.seed.or(base.seed),
            radial_order: self.radial_order.or(base.radial_order),
            angular_order: self.angular_order.or(base.angular_order),
            workers: self.workers.or(base.workers),
            out: self.out.or(base.out),
        }
    }
}

/// Fully resolved settings, echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_size: Vec<usize>,
    pub draws: usize,
    pub n_max: u32,
    pub k_max: u32,
    pub sobolev_s: Vec<f64>,
    pub seed: u64,
    pub radial_order: usize,
    pub angular_order: usize,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

fn defaults(e: Experiment) -> Overrides {
    let (n_size, draws, n_max, k_max, s): (&[usize], usize, u32, u32, &[f64]) = match e {
        Experiment::Roots => (&[1], 1, 16, 16, &[1.0]),
        Experiment::VerifyBasis => (&[1], 1, 8, 8, &[1.0]),
        Experiment::ReconstructLog => (&[1], 1, 60, 1_000_000, &[1.0]),
        Experiment::GinibreSample => (&[64], 10, 1, 1, &[1.0]),
        Experiment::PairVariance => (&[2, 8, 32, 64], 1, 4, 4, &[1.0]),
        Experiment::Clt => (&[256], 2000, 1, 2, &[1.0]),
        Experiment::FieldCovariance => (&[1], 100_000, 64, 64, &[1.0]),
        Experiment::SobolevTightness => (&[16, 64, 256], 2000, 8, 8, &[2.5]),
        Experiment::DecayCheck => (&[8, 32], 1, 8, 8, &[1.0]),
    };
    Overrides {
        n_size: Some(n_size.to_vec()),
        draws: Some(draws),
        n_max: Some(n_max),
        k_max: Some(k_max),
        sobolev_s: Some(s.to_vec()),
        seed: Some(DEFAULT_SEED),
        radial_order: Some(96),
        angular_order: Some(48),
        workers: Some(0),
        out: Some(PathBuf::from("diskfield-out").join(e.name())),
    }
}

impl ExperimentConfig {
    /// Flags over file over defaults, then validation.
    pub fn resolve(experiment: Experiment, flags: Overrides, file: Overrides) -> Result<Self, CliError> {
        let o = flags.or(file).or(defaults(experiment));
        let cfg = ExperimentConfig {
            experiment,
            n_size: o.n_size.unwrap_or_default(),
            draws: o.draws.unwrap_or_default(),
            n_max: o.n_max.unwrap_or_default(),
            k_max: o.k_max.unwrap_or_default(),
            sobolev_s: o.sobolev_s.unwrap_or_default(),
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            radial_order: o.radial_order.unwrap_or_default(),
            angular_order: o.angular_order.unwrap_or_default(),
            workers: o.workers.unwrap_or_default(),
            out: o.out.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Usage(format!("{what} (experiment {})", self.experiment)));
        if self.n_size.is_empty() || self.n_size.contains(&0) {
            return bad("--n-size must list positive matrix sizes");
        }
        if self.draws == 0 {
            return bad("--draws must be positive");
        }
        if self.k_max == 0 {
            return bad("--k-max must be positive");
        }
        if self.radial_order == 0 || self.angular_order == 0 {
            return bad("quadrature orders must be positive");
        }
        if self.sobolev_s.is_empty() || self.sobolev_s.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return bad("--sobolev-s must be positive");
        }
        match self.experiment {
            Experiment::Clt if self.draws < 2 => bad("clt needs at least two draws"),
            Experiment::SobolevTightness if self.draws < 2 => bad("sobolev-tightness needs at least two draws"),
            Experiment::SobolevTightness if self.sobolev_s.iter().any(|s| *s <= 2.0) => {
                bad("sobolev-tightness needs s' > 2")
            }
            Experiment::FieldCovariance if self.draws < 20 => bad("field-covariance needs at least 20 draws"),
            Experiment::Roots | Experiment::VerifyBasis if self.n_max == 0 => bad("--n-max must be positive"),
            _ => Ok(()),
        }
    }
}

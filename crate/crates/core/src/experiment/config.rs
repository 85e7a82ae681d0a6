//! TOML experiment configuration.
//!
//! ```toml
//! experiment = "theorem"        # baker-verify | baker-converge | packets-evolve | theorem
//! seed = 2024
//! output_dir = "out/theorem"    # overridden by --out
//!
//! [grid]                        # no defaults: every size used must be explicit
//! nu_max = 16.0
//! n_nu = 4096
//! sigma_min = 16.0              # sigma_* optional for the gaussian state
//! sigma_max = 16.0
//! n_sigma = 1
//! omega_max = 20.0              # packets only
//! n_omega = 1024
//! channels = 1
//!
//! [state]                       # theorem only
//! source = "gaussian"           # or "packets"
//! center = 0.0
//! width = 1.0
//!
//! [[packets]]
//! kind = "gaussian-monomial"
//! amplitude = 1.0
//! power = 0
//! center = 8.0
//! width = 0.8
//! channel = 0
//! weight = 1.0
//!
//! [schedule]
//! t = [0.0, 1.0, 2.0]           # or start / step / count
//!
//! [walsh]                       # baker-converge only
//! inline = ["F={-2,0} 1 0", "F={1} 0.5 0"]   # or file = "rho.txt"
//!
//! [baker]
//! depth = 12
//! steps = 6
//!
//! [thresholds]
//! decay = 1e-10
//! certification = 1e-8
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baker::WalshExpansion;
use crate::error::{Error, Result};
use crate::hardy_continuous::DEFAULT_CERTIFICATION_THRESHOLD;
use crate::liouville::{EnergyGrid, NuSigmaGrid, Profile, DEFAULT_DECAY_THRESHOLD, DEFAULT_WINDOW_TOLERANCE};
use crate::numerics::is_power_of_two;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BakerVerify,
    BakerConverge,
    PacketsEvolve,
    Theorem,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BakerVerify => "baker-verify",
            ExperimentKind::BakerConverge => "baker-converge",
            ExperimentKind::PacketsEvolve => "packets-evolve",
            ExperimentKind::Theorem => "theorem",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baker-verify" => Ok(ExperimentKind::BakerVerify),
            "baker-converge" => Ok(ExperimentKind::BakerConverge),
            "packets-evolve" => Ok(ExperimentKind::PacketsEvolve),
            "theorem" => Ok(ExperimentKind::Theorem),
            other => Err(Error::config("experiment", format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nu_max: Option<f64>,
    pub n_nu: Option<usize>,
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub n_sigma: Option<usize>,
    pub omega_max: Option<f64>,
    pub n_omega: Option<usize>,
    pub channels: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    #[serde(flatten)]
    pub profile: Profile,
    #[serde(default)]
    pub channel: usize,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSource {
    Gaussian,
    Packets,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub source: StateSource,
    pub center: Option<f64>,
    pub width: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub t: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub step: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalshSection {
    pub inline: Option<Vec<String>>,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BakerSection {
    /// Largest number of constraints in the exhaustive cylinder check.
    pub depth: usize,
    /// Cylinder coordinates range over `[-radius, radius]`.
    pub radius: i64,
    /// Random (expansion, tape, shift) triples per randomized check.
    pub samples: usize,
    pub max_terms: usize,
    pub index_radius: i64,
    pub shift_radius: i64,
    pub monte_carlo: usize,
    /// Rows of the convergence table.
    pub steps: u64,
}

impl Default for BakerSection {
    fn default() -> Self {
        BakerSection {
            depth: 12,
            radius: 6,
            samples: 1000,
            max_terms: 64,
            index_radius: 16,
            shift_radius: 8,
            monte_carlo: 100_000,
            steps: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub decay: f64,
    pub certification: f64,
    pub window: f64,
    pub commutator: f64,
    pub unitarity: f64,
    pub two_route: f64,
    pub oracle: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            decay: DEFAULT_DECAY_THRESHOLD,
            certification: DEFAULT_CERTIFICATION_THRESHOLD,
            window: DEFAULT_WINDOW_TOLERANCE,
            commutator: 1e-6,
            unitarity: 1e-12,
            two_route: 1e-10,
            oracle: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridSection,
    pub state: Option<StateSection>,
    #[serde(default)]
    pub packets: Vec<PacketSpec>,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub walsh: WalshSection,
    #[serde(default)]
    pub baker: BakerSection,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn required<T: Copy>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::config(field, "required for this experiment"))
}

fn power_of_two(value: Option<usize>, field: &str) -> Result<usize> {
    let n = required(value, field)?;
    if !is_power_of_two(n) || n < 16 {
        return Err(Error::config(field, format!("must be a power of two >= 16, got {n}")));
    }
    Ok(n)
}

fn positive(value: f64, field: &str) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::config(
            field,
            format!("must be positive and finite, got {value}"),
        ));
    }
    Ok(value)
}

impl ExperimentConfig {
    /// Parses TOML. Type errors carry the dotted path of the offending key.
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<document>", e.to_string().trim()))?;
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." { "<document>".to_string() } else { path },
                e.into_inner().to_string().trim(),
            )
        })?;
        cfg.validate_common()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
        Self::from_toml(&text)
    }

    fn validate_common(&self) -> Result<()> {
        let t = &self.thresholds;
        for (value, field) in [
            (t.decay, "thresholds.decay"),
            (t.certification, "thresholds.certification"),
            (t.window, "thresholds.window"),
            (t.commutator, "thresholds.commutator"),
            (t.unitarity, "thresholds.unitarity"),
            (t.two_route, "thresholds.two_route"),
            (t.oracle, "thresholds.oracle"),
        ] {
            positive(value, field)?;
        }
        if let Some(n) = self.grid.n_nu {
            power_of_two(Some(n), "grid.n_nu")?;
        }
        if let Some(n) = self.grid.n_omega {
            power_of_two(Some(n), "grid.n_omega")?;
        }
        if self.schedule.t.is_some() || self.schedule.count.is_some() {
            self.schedule()?;
        }
        for (i, p) in self.packets.iter().enumerate() {
            p.profile
                .validate()
                .map_err(|e| Error::config(format!("packets[{i}]"), e.to_string()))?;
            positive(p.weight, &format!("packets[{i}].weight"))?;
        }
        Ok(())
    }

    /// Checks the config against the experiment selected on the command
    /// line; a mismatching `experiment` key is an error.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<()> {
        match self.experiment {
            Some(k) if k != kind => Err(Error::config(
                "experiment",
                format!("config is for `{k}` but `{kind}` was requested"),
            )),
            _ => Ok(()),
        }
    }

    pub fn nu_grid(&self) -> Result<NuSigmaGrid> {
        let g = &self.grid;
        let nu_max = positive(required(g.nu_max, "grid.nu_max")?, "grid.nu_max")?;
        let n_nu = power_of_two(g.n_nu, "grid.n_nu")?;
        let sigma_min = required(g.sigma_min, "grid.sigma_min")?;
        let sigma_max = required(g.sigma_max, "grid.sigma_max")?;
        let n_sigma = required(g.n_sigma, "grid.n_sigma")?;
        NuSigmaGrid::new(nu_max, n_nu, sigma_min, sigma_max, n_sigma, g.channels.unwrap_or(1))
            .map_err(|e| Error::config("grid", e.to_string()))
    }

    /// One sigma slice at `sigma = nu_max` unless sigma fields are given.
    pub fn nu_grid_or_single(&self) -> Result<NuSigmaGrid> {
        let g = &self.grid;
        if g.sigma_min.is_some() || g.sigma_max.is_some() || g.n_sigma.is_some() {
            return self.nu_grid();
        }
        let nu_max = positive(required(g.nu_max, "grid.nu_max")?, "grid.nu_max")?;
        let n_nu = power_of_two(g.n_nu, "grid.n_nu")?;
        NuSigmaGrid::new(nu_max, n_nu, nu_max, nu_max, 1, g.channels.unwrap_or(1))
            .map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn energy_grid(&self) -> Result<EnergyGrid> {
        let g = &self.grid;
        let omega_max = positive(required(g.omega_max, "grid.omega_max")?, "grid.omega_max")?;
        let n_omega = power_of_two(g.n_omega, "grid.n_omega")?;
        EnergyGrid::new(omega_max, n_omega, g.channels.unwrap_or(1)).map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn schedule(&self) -> Result<Vec<f64>> {
        let s = &self.schedule;
        let times = match (&s.t, s.count) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "schedule",
                    "give either `t` or `start`/`step`/`count`, not both",
                ));
            }
            (Some(t), None) => t.clone(),
            (None, Some(count)) => {
                let start = required(s.start, "schedule.start")?;
                let step = positive(required(s.step, "schedule.step")?, "schedule.step")?;
                (0..count).map(|i| start + step * i as f64).collect()
            }
            (None, None) => return Err(Error::config("schedule.t", "required for this experiment")),
        };
        if times.is_empty() {
            return Err(Error::config("schedule.t", "must not be empty"));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("schedule.t", "must be finite and strictly increasing"));
        }
        Ok(times)
    }

    pub fn walsh_expansion(&self, base: Option<&Path>) -> Result<WalshExpansion> {
        let w = &self.walsh;
        let (text, field) = match (&w.inline, &w.file) {
            (Some(_), Some(_)) => return Err(Error::config("walsh", "give either `inline` or `file`, not both")),
            (Some(lines), None) => (lines.join("\n"), "walsh.inline"),
            (None, Some(file)) => {
                let path = match base {
                    Some(dir) if file.is_relative() => dir.join(file),
                    _ => file.clone(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
                (text, "walsh.file")
            }
            (None, None) => return Err(Error::config("walsh", "an `inline` or `file` source is required")),
        };
        text.parse::<WalshExpansion>()
            .map_err(|e| Error::config(field, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn non_power_of_two_grid_names_the_field() {
        let err = ExperimentConfig::from_toml("seed = 1\n[grid]\nnu_max = 16.0\nn_nu = 1000\n").unwrap_err();
        assert_eq!(field_of(err), "grid.n_nu");
    }

    #[test]
    fn type_errors_carry_the_key_path() {
        let err = ExperimentConfig::from_toml("[grid]\nn_nu = \"big\"\n").unwrap_err();
        assert_eq!(field_of(err), "grid.n_nu");
        let err = ExperimentConfig::from_toml("[grid]\nnumax = 3.0\n").unwrap_err();
        assert!(field_of(err).starts_with("grid"));
    }

    #[test]
    fn grid_sizes_have_no_defaults() {
        let cfg = ExperimentConfig::from_toml("[grid]\nnu_max = 16.0\n").unwrap();
        assert_eq!(field_of(cfg.nu_grid_or_single().unwrap_err()), "grid.n_nu");
        assert_eq!(field_of(cfg.energy_grid().unwrap_err()), "grid.omega_max");
    }

    #[test]
    fn schedules_and_thresholds_are_validated() {
        let err = ExperimentConfig::from_toml("[schedule]\nt = [0.0, 2.0, 1.0]\n").unwrap_err();
        assert_eq!(field_of(err), "schedule.t");
        let err = ExperimentConfig::from_toml("[thresholds]\ncertification = -1.0\n").unwrap_err();
        assert_eq!(field_of(err), "thresholds.certification");
        let cfg = ExperimentConfig::from_toml("[schedule]\nstart = 0.0\nstep = 0.5\ncount = 5\n").unwrap();
        assert_eq!(cfg.schedule().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn packets_and_walsh_sources_parse() {
        let text = r#"
experiment = "packets-evolve"
[[packets]]
kind = "gaussian-monomial"
amplitude = 1.0
power = 1
center = 8.0
width = 0.8
weight = 0.5

[walsh]
inline = ["F={-2,0} 1 0", "F={1} 0.5 0"]
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.packets.len(), 1);
        assert_eq!(cfg.packets[0].channel, 0);
        assert_eq!(cfg.walsh_expansion(None).unwrap().len(), 2);
        assert!(cfg.check_kind(ExperimentKind::PacketsEvolve).is_ok());
        assert_eq!(
            field_of(cfg.check_kind(ExperimentKind::Theorem).unwrap_err()),
            "experiment"
        );
    }
}

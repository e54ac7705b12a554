//! Experiment configuration, read from a TOML file.

use std::path::{Path, PathBuf};

use cantor_dynamics::maps::{LevelSpec, TowerKind};
use cantor_dynamics::rational::{rat, serde_str, Rational};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub map: MapConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub liyorke: LiYorkeConfig,
    #[serde(default)]
    pub entropy: EntropyConfig,
    #[serde(default)]
    pub chains: ChainsConfig,
    #[serde(default)]
    pub shadowing: ShadowingConfig,
    #[serde(default)]
    pub recurrence: RecurrenceConfig,
}

/// Either generator parameters or a map file written by `generate`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub kind: TowerKind,
    #[serde(default)]
    pub levels: Vec<LevelConfig>,
    #[serde(default)]
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub depth: usize,
    pub q: usize,
    pub components: usize,
    #[serde(default = "one_usize")]
    pub bar: usize,
}

impl From<&LevelConfig> for LevelSpec {
    fn from(l: &LevelConfig) -> Self {
        LevelSpec::new(l.depth, l.q, l.components).with_bar(l.bar)
    }
}

/// Simplex grid of cell measures with masses in multiples of `1/m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "one_usize")]
    pub m: usize,
    #[serde(default)]
    pub level: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiYorkeConfig {
    /// Sampled close pairs for the equicontinuity certificate.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(with = "serde_str", default = "half")]
    pub epsilon: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    #[serde(with = "rational_list", default = "default_epsilons")]
    pub epsilons: Vec<Rational>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainsConfig {
    #[serde(with = "serde_str", default = "three_quarters")]
    pub delta: Rational,
    /// Lengths `k_0..=k_0 + extra` are built for every grid pair.
    #[serde(default = "default_extra")]
    pub extra: usize,
    #[serde(with = "serde_str", default = "quarter")]
    pub epsilon: Rational,
    #[serde(default = "default_depth")]
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowingConfig {
    #[serde(with = "serde_str", default = "quarter")]
    pub epsilon: Rational,
    #[serde(with = "serde_str", default = "half")]
    pub delta: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceConfig {
    #[serde(with = "serde_str", default = "half")]
    pub epsilon: Rational,
    #[serde(with = "rational_list", default = "default_lambdas")]
    pub lambdas: Vec<Rational>,
    /// Periods to enumerate; empty means every divisor of the loop length.
    #[serde(default)]
    pub periods: Vec<usize>,
    /// Recurrent measures sampled for the periodic approximation.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_budget() -> usize {
    cantor_dynamics::dynamics::DEFAULT_BUDGET
}
fn one_usize() -> usize {
    1
}
fn default_pairs() -> usize {
    20
}
fn default_n_max() -> usize {
    8
}
fn default_extra() -> usize {
    2
}
fn default_depth() -> usize {
    4
}
fn default_samples() -> usize {
    5
}
fn half() -> Rational {
    rat(1, 2)
}
fn quarter() -> Rational {
    rat(1, 4)
}
fn three_quarters() -> Rational {
    rat(3, 4)
}
fn default_epsilons() -> Vec<Rational> {
    vec![rat(1, 2), rat(1, 4)]
}
fn default_lambdas() -> Vec<Rational> {
    vec![rat(1, 4), rat(1, 8)]
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { m: 1, level: 0 }
    }
}

impl Default for LiYorkeConfig {
    fn default() -> Self {
        Self {
            pairs: default_pairs(),
            epsilon: half(),
        }
    }
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            epsilons: default_epsilons(),
            n_max: default_n_max(),
        }
    }
}

impl Default for ChainsConfig {
    fn default() -> Self {
        Self {
            delta: three_quarters(),
            extra: default_extra(),
            epsilon: quarter(),
            depth: default_depth(),
        }
    }
}

impl Default for ShadowingConfig {
    fn default() -> Self {
        Self {
            epsilon: quarter(),
            delta: half(),
        }
    }
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        Self {
            epsilon: half(),
            lambdas: default_lambdas(),
            periods: Vec::new(),
            samples: default_samples(),
        }
    }
}

mod rational_list {
    use cantor_dynamics::rational::{self, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(rational::format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| rational::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let config: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    /// Reads the file and resolves a relative map path against its directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut config = Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(file) = &config.map.file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.map.file = Some(base.join(file));
            }
        }
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.map.file.is_none() && self.map.levels.is_empty() {
            return Err("[map] needs either `levels` or `file`".into());
        }
        if self.grid.m == 0 {
            return Err("[grid] m must be positive".into());
        }
        if self.entropy.n_max == 0 {
            return Err("[entropy] n_max must be positive".into());
        }
        let mut positive = vec![
            ("liyorke.epsilon", self.liyorke.epsilon),
            ("chains.delta", self.chains.delta),
            ("chains.epsilon", self.chains.epsilon),
            ("shadowing.epsilon", self.shadowing.epsilon),
            ("shadowing.delta", self.shadowing.delta),
            ("recurrence.epsilon", self.recurrence.epsilon),
        ];
        positive.extend(
            self.entropy
                .epsilons
                .iter()
                .map(|e| ("entropy.epsilons", *e)),
        );
        positive.extend(
            self.recurrence
                .lambdas
                .iter()
                .map(|l| ("recurrence.lambdas", *l)),
        );
        for (name, value) in positive {
            if value <= rat(0, 1) {
                return Err(format!("{name} must be positive, got {value}"));
            }
        }
        Ok(())
    }

    pub fn level_specs(&self) -> Vec<LevelSpec> {
        self.map.levels.iter().map(LevelSpec::from).collect()
    }
}

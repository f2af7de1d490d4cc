//! Flat key=value experiment configuration.
//!
//! The format is deliberately plain: one `key = value` pair per line, dotted
//! section prefixes, full-line `#` comments. Diff-friendly and hand-editable.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::learn::ExplorationPolicy;
use crate::meta::{DeltaSearchConfig, KnowledgeMode, UpdateSchedule};
use crate::net::{EntryLaw, GameDistribution, SocialNetwork, TieRule};

/// Where the experiment's network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    Example7,
    KarateClub,
    Diad,
    Star(usize),
    File(PathBuf),
}

impl NetworkSource {
    pub fn load(&self) -> Result<SocialNetwork> {
        match self {
            NetworkSource::Example7 => Ok(SocialNetwork::example7()),
            NetworkSource::KarateClub => Ok(SocialNetwork::karate_club()),
            NetworkSource::Diad => Ok(SocialNetwork::diad()),
            NetworkSource::Star(leaves) => Ok(SocialNetwork::star(*leaves)),
            NetworkSource::File(path) => SocialNetwork::load_edge_list(path),
        }
    }

    fn as_value(&self) -> String {
        match self {
            NetworkSource::Example7 => "example7".into(),
            NetworkSource::KarateClub => "karate_club".into(),
            NetworkSource::Diad => "diad".into(),
            NetworkSource::Star(l) => format!("star:{l}"),
            NetworkSource::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// Fixed trust levels: one shared value or one per agent in label order.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedDelta {
    Uniform(f64),
    PerAgent(Vec<f64>),
}

impl FixedDelta {
    pub fn resolve(&self, agents: usize) -> Result<Vec<f64>> {
        match self {
            FixedDelta::Uniform(d) => Ok(vec![*d; agents]),
            FixedDelta::PerAgent(v) if v.len() == agents => Ok(v.clone()),
            FixedDelta::PerAgent(v) => Err(Error::InvalidConfig(format!(
                "delta.fixed lists {} values for {} agents",
                v.len(),
                agents
            ))),
        }
    }
}

/// Whether trust levels are held fixed or adapt via the metagame.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaPolicy {
    Fixed(FixedDelta),
    Dynamics {
        schedule: UpdateSchedule,
        initial: f64,
        /// Pinned agents by vertex label.
        pinned: Vec<(u64, f64)>,
    },
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    pub dist: GameDistribution,
    pub k: usize,
    pub rounds: u64,
    pub warmup: u64,
    pub seed: u64,
    pub tie_rule: TieRule,
    pub knowledge: KnowledgeMode,
    pub delta: DeltaPolicy,
    pub search: DeltaSearchConfig,
    pub exploration: ExplorationPolicy,
    /// Output directory for artifacts; may be overridden by the CLI.
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A baseline config requiring only a network, distribution, and seed.
    pub fn new(network: NetworkSource, dist: GameDistribution, seed: u64) -> Self {
        Self {
            network,
            dist,
            k: 2,
            rounds: 1000,
            warmup: 0,
            seed,
            tie_rule: TieRule::UniformRandom,
            knowledge: KnowledgeMode::Known,
            delta: DeltaPolicy::Fixed(FixedDelta::Uniform(0.0)),
            search: DeltaSearchConfig::default(),
            exploration: ExplorationPolicy::default(),
            out: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Self::from_map(&map)
    }

    fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        fn get<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Option<&'a str> {
            map.get(key).map(|s| s.as_str())
        }
        fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value for {key}: {value}")))
        }

        let seed: u64 = match get(map, "seed") {
            Some(v) => parse_num("seed", v)?,
            None => return Err(Error::MissingConfigKey("seed".into())),
        };

        let network = match get(map, "network").unwrap_or("example7") {
            "example7" => NetworkSource::Example7,
            "karate_club" => NetworkSource::KarateClub,
            "diad" => NetworkSource::Diad,
            s if s.starts_with("star:") => {
                NetworkSource::Star(parse_num("network", &s["star:".len()..])?)
            }
            s if s.starts_with("file:") => {
                NetworkSource::File(PathBuf::from(&s["file:".len()..]))
            }
            s => return Err(Error::InvalidConfig(format!("unknown network: {s}"))),
        };

        let rows: usize = parse_num("dist.rows", get(map, "dist.rows").unwrap_or("2"))?;
        let cols: usize = parse_num("dist.cols", get(map, "dist.cols").unwrap_or("2"))?;
        let law = match get(map, "dist.kind").unwrap_or("exponential") {
            "exponential" => EntryLaw::ExponentialMean(parse_num(
                "dist.mean",
                get(map, "dist.mean").unwrap_or("2"),
            )?),
            "uniform" => EntryLaw::Uniform(
                parse_num("dist.lo", get(map, "dist.lo").unwrap_or("0"))?,
                parse_num("dist.hi", get(map, "dist.hi").unwrap_or("1"))?,
            ),
            s => return Err(Error::InvalidConfig(format!("unknown dist.kind: {s}"))),
        };
        let dist = GameDistribution::new(rows, cols, law)?;

        let tie_rule = match get(map, "tie_rule").unwrap_or("uniform_random") {
            "uniform_random" => TieRule::UniformRandom,
            "lexicographic" => TieRule::Lexicographic,
            s => return Err(Error::InvalidConfig(format!("unknown tie_rule: {s}"))),
        };
        let knowledge = match get(map, "knowledge").unwrap_or("known") {
            "known" => KnowledgeMode::Known,
            "learned" => KnowledgeMode::Learned,
            s => return Err(Error::InvalidConfig(format!("unknown knowledge: {s}"))),
        };

        let delta = match get(map, "delta.mode").unwrap_or("fixed") {
            "fixed" => {
                let spec = get(map, "delta.fixed").unwrap_or("0");
                let values: Result<Vec<f64>> = spec
                    .split(',')
                    .map(|v| parse_num("delta.fixed", v.trim()))
                    .collect();
                let values = values?;
                if values.iter().any(|&d| d < 0.0) {
                    return Err(Error::InvalidConfig("delta.fixed must be nonnegative".into()));
                }
                DeltaPolicy::Fixed(if values.len() == 1 {
                    FixedDelta::Uniform(values[0])
                } else {
                    FixedDelta::PerAgent(values)
                })
            }
            "dynamics" => {
                let schedule = match get(map, "delta.schedule").unwrap_or("synchronous") {
                    "synchronous" => UpdateSchedule::Synchronous,
                    "epoch" => UpdateSchedule::Epoch {
                        t: parse_num("delta.epoch", get(map, "delta.epoch").unwrap_or("100"))?,
                    },
                    "probabilistic" => UpdateSchedule::Probabilistic {
                        p: parse_num("delta.prob", get(map, "delta.prob").unwrap_or("0.01"))?,
                    },
                    s => {
                        return Err(Error::InvalidConfig(format!("unknown delta.schedule: {s}")))
                    }
                };
                let mut pinned = Vec::new();
                if let Some(spec) = get(map, "delta.pinned") {
                    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
                        let (label, value) = part.trim().split_once(':').ok_or_else(|| {
                            Error::InvalidConfig(format!("bad delta.pinned entry: {part}"))
                        })?;
                        pinned.push((
                            parse_num("delta.pinned", label)?,
                            parse_num("delta.pinned", value)?,
                        ));
                    }
                }
                DeltaPolicy::Dynamics {
                    schedule,
                    initial: parse_num(
                        "delta.initial",
                        get(map, "delta.initial").unwrap_or("0"),
                    )?,
                    pinned,
                }
            }
            s => return Err(Error::InvalidConfig(format!("unknown delta.mode: {s}"))),
        };

        let search = DeltaSearchConfig {
            delta_max: parse_num("delta.max", get(map, "delta.max").unwrap_or("30"))?,
            grid_points: parse_num(
                "delta.grid_points",
                get(map, "delta.grid_points").unwrap_or("61"),
            )?,
            samples: parse_num(
                "estimate.samples",
                get(map, "estimate.samples").unwrap_or("1000"),
            )?,
        };

        let exploration = match get(map, "exploration.policy").unwrap_or("epsilon_decreasing") {
            "epsilon_greedy" => ExplorationPolicy::EpsilonGreedy {
                epsilon: parse_num(
                    "exploration.epsilon",
                    get(map, "exploration.epsilon").unwrap_or("0.1"),
                )?,
            },
            "epsilon_first" => ExplorationPolicy::EpsilonFirst {
                epsilon: parse_num(
                    "exploration.epsilon",
                    get(map, "exploration.epsilon").unwrap_or("0.1"),
                )?,
                horizon: parse_num(
                    "exploration.horizon",
                    get(map, "exploration.horizon").unwrap_or("1000"),
                )?,
            },
            "epsilon_decreasing" => ExplorationPolicy::EpsilonDecreasing {
                scale: parse_num(
                    "exploration.scale",
                    get(map, "exploration.scale").unwrap_or("5"),
                )?,
            },
            s => return Err(Error::InvalidConfig(format!("unknown exploration.policy: {s}"))),
        };

        Ok(Self {
            network,
            dist,
            k: parse_num("k", get(map, "k").unwrap_or("2"))?,
            rounds: parse_num("rounds", get(map, "rounds").unwrap_or("1000"))?,
            warmup: parse_num("warmup", get(map, "warmup").unwrap_or("0"))?,
            seed,
            tie_rule,
            knowledge,
            delta,
            search,
            exploration,
            out: get(map, "out").map(PathBuf::from),
        })
    }

    /// Serialize the fully-resolved configuration (defaults expanded) back
    /// to the key=value format; `parse` round-trips it.
    pub fn to_resolved_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "network = {}", self.network.as_value());
        let _ = writeln!(s, "dist.rows = {}", self.dist.rows());
        let _ = writeln!(s, "dist.cols = {}", self.dist.cols());
        match self.dist.law() {
            EntryLaw::ExponentialMean(m) => {
                let _ = writeln!(s, "dist.kind = exponential");
                let _ = writeln!(s, "dist.mean = {m}");
            }
            EntryLaw::Uniform(lo, hi) => {
                let _ = writeln!(s, "dist.kind = uniform");
                let _ = writeln!(s, "dist.lo = {lo}");
                let _ = writeln!(s, "dist.hi = {hi}");
            }
        }
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "rounds = {}", self.rounds);
        let _ = writeln!(s, "warmup = {}", self.warmup);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(
            s,
            "tie_rule = {}",
            match self.tie_rule {
                TieRule::UniformRandom => "uniform_random",
                TieRule::Lexicographic => "lexicographic",
            }
        );
        let _ = writeln!(
            s,
            "knowledge = {}",
            match self.knowledge {
                KnowledgeMode::Known => "known",
                KnowledgeMode::Learned => "learned",
            }
        );
        match &self.delta {
            DeltaPolicy::Fixed(fixed) => {
                let _ = writeln!(s, "delta.mode = fixed");
                let spec = match fixed {
                    FixedDelta::Uniform(d) => d.to_string(),
                    FixedDelta::PerAgent(v) => v
                        .iter()
                        .map(|d| d.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                };
                let _ = writeln!(s, "delta.fixed = {spec}");
            }
            DeltaPolicy::Dynamics { schedule, initial, pinned } => {
                let _ = writeln!(s, "delta.mode = dynamics");
                match schedule {
                    UpdateSchedule::Synchronous => {
                        let _ = writeln!(s, "delta.schedule = synchronous");
                    }
                    UpdateSchedule::Epoch { t } => {
                        let _ = writeln!(s, "delta.schedule = epoch");
                        let _ = writeln!(s, "delta.epoch = {t}");
                    }
                    UpdateSchedule::Probabilistic { p } => {
                        let _ = writeln!(s, "delta.schedule = probabilistic");
                        let _ = writeln!(s, "delta.prob = {p}");
                    }
                }
                let _ = writeln!(s, "delta.initial = {initial}");
                if !pinned.is_empty() {
                    let spec = pinned
                        .iter()
                        .map(|(l, d)| format!("{l}:{d}"))
                        .collect::<Vec<_>>()
                        .join(",");
                    let _ = writeln!(s, "delta.pinned = {spec}");
                }
            }
        }
        let _ = writeln!(s, "delta.max = {}", self.search.delta_max);
        let _ = writeln!(s, "delta.grid_points = {}", self.search.grid_points);
        let _ = writeln!(s, "estimate.samples = {}", self.search.samples);
        match self.exploration {
            ExplorationPolicy::EpsilonGreedy { epsilon } => {
                let _ = writeln!(s, "exploration.policy = epsilon_greedy");
                let _ = writeln!(s, "exploration.epsilon = {epsilon}");
            }
            ExplorationPolicy::EpsilonFirst { epsilon, horizon } => {
                let _ = writeln!(s, "exploration.policy = epsilon_first");
                let _ = writeln!(s, "exploration.epsilon = {epsilon}");
                let _ = writeln!(s, "exploration.horizon = {horizon}");
            }
            ExplorationPolicy::EpsilonDecreasing { scale } => {
                let _ = writeln!(s, "exploration.policy = epsilon_decreasing");
                let _ = writeln!(s, "exploration.scale = {scale}");
            }
        }
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        s
    }
}

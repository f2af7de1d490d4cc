//! Experiment driver: wiring the round engine, learning, and metagame into
//! reproducible runs with CSV artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{DeltaPolicy, ExperimentConfig, FixedDelta, NetworkSource};
use crate::error::{Error, Result};
use crate::game::TrustLevel;
use crate::meta::{
    best_response_delta, invitation_probability, predicted_utility, run_dynamics, DynamicsConfig,
    DynamicsRecord, DynamicsRound, NeighborView,
};
use crate::net::{
    play_round, AgentState, EntryLaw, GameDistribution, MonteCarloEstimator, SocialNetwork,
};
use crate::rates::{
    estimate_discovery_probabilities, measure_discovery_time, theorem3_bound, LeaderProbePolicy,
    DISCOVERY_ROUND_CAP,
};

/// Headline metrics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub agents: usize,
    pub rounds: u64,
    pub warmup: u64,
    /// Average utility per agent per round, after warmup.
    pub avg_utility: f64,
    /// Mean trust level across agents in the final round.
    pub final_mean_delta: f64,
    /// Per agent (label order): share of post-warmup rounds spent at δ_max.
    pub pct_rounds_at_max: Vec<f64>,
}

/// A completed run: the full time series plus derived artifacts.
#[derive(Debug)]
pub struct OutputBundle {
    pub config: ExperimentConfig,
    pub net: SocialNetwork,
    pub record: DynamicsRecord,
    pub summary: Summary,
}

fn compute_summary(
    net: &SocialNetwork,
    record: &DynamicsRecord,
    cfg: &ExperimentConfig,
) -> Summary {
    let agents = net.vertex_count();
    let warmup = (cfg.warmup as usize).min(record.rounds.len());
    let post = &record.rounds[warmup..];
    let mut pct = vec![0.0; agents];
    if !post.is_empty() {
        for r in post {
            for (i, &d) in r.deltas.iter().enumerate() {
                if (d - cfg.search.delta_max).abs() < 1e-9 {
                    pct[i] += 1.0;
                }
            }
        }
        for p in &mut pct {
            *p /= post.len() as f64;
        }
    }
    Summary {
        agents,
        rounds: record.rounds.len() as u64,
        warmup: cfg.warmup,
        avg_utility: record.mean_utility(warmup),
        final_mean_delta: record.rounds.last().map_or(0.0, |r| r.mean_delta()),
        pct_rounds_at_max: pct,
    }
}

fn run_fixed(
    net: &SocialNetwork,
    cfg: &ExperimentConfig,
    fixed: &FixedDelta,
) -> Result<DynamicsRecord> {
    let deltas = fixed.resolve(net.vertex_count())?;
    let agents: Vec<AgentState> = (0..net.vertex_count())
        .map(|i| {
            Ok(AgentState::new(
                i,
                TrustLevel::new(deltas[i])
                    .map_err(|_| Error::InvalidConfig(format!("bad fixed delta {}", deltas[i])))?,
                cfg.k.min(net.degree(i)),
            ))
        })
        .collect::<Result<_>>()?;
    let estimator =
        MonteCarloEstimator::new(&cfg.dist, cfg.search.samples, cfg.seed.wrapping_add(0x5EED));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut record = DynamicsRecord { rounds: Vec::with_capacity(cfg.rounds as usize) };
    for t in 0..cfg.rounds {
        let rec = play_round(net, &agents, &cfg.dist, &estimator, cfg.tie_rule, t, &mut rng);
        record
            .rounds
            .push(DynamicsRound { deltas: deltas.clone(), v: rec.v, w: rec.w });
    }
    Ok(record)
}

/// Execute the experiment described by `cfg` entirely in memory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<OutputBundle> {
    let net = cfg.network.load()?;
    let record = match &cfg.delta {
        DeltaPolicy::Fixed(fixed) => run_fixed(&net, cfg, fixed)?,
        DeltaPolicy::Dynamics { schedule, initial, pinned } => {
            let mut dyn_cfg = DynamicsConfig::new(cfg.k, *schedule, cfg.knowledge, cfg.seed);
            dyn_cfg.tie_rule = cfg.tie_rule;
            dyn_cfg.rounds = cfg.rounds;
            dyn_cfg.initial_delta = *initial;
            dyn_cfg.search = cfg.search;
            dyn_cfg.exploration = cfg.exploration;
            for &(label, value) in pinned {
                let id = net.id_of_label(label).ok_or_else(|| {
                    Error::InvalidConfig(format!("pinned vertex {label} not in network"))
                })?;
                dyn_cfg.pinned.insert(id, value);
            }
            run_dynamics(&net, &cfg.dist, &dyn_cfg)
        }
    };
    let summary = compute_summary(&net, &record, cfg);
    Ok(OutputBundle { config: cfg.clone(), net, record, summary })
}

fn timeseries_csv(net: &SocialNetwork, record: &DynamicsRecord) -> String {
    let mut s = String::from("round,agent,delta,v,w,u\n");
    for (t, r) in record.rounds.iter().enumerate() {
        for i in 0..net.vertex_count() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                t,
                net.label(i),
                r.deltas[i],
                r.v[i],
                r.w[i],
                r.v[i] + r.w[i]
            );
        }
    }
    s
}

fn degree_delta_csv(net: &SocialNetwork, record: &DynamicsRecord) -> String {
    let mut degrees: Vec<usize> = (0..net.vertex_count()).map(|i| net.degree(i)).collect();
    let mut unique = degrees.clone();
    unique.sort_unstable();
    unique.dedup();
    degrees.shrink_to_fit();
    let mut s = String::from("round,degree,mean_delta\n");
    for (t, r) in record.rounds.iter().enumerate() {
        for &d in &unique {
            let members: Vec<usize> =
                (0..net.vertex_count()).filter(|&i| degrees[i] == d).collect();
            let mean: f64 =
                members.iter().map(|&i| r.deltas[i]).sum::<f64>() / members.len() as f64;
            let _ = writeln!(s, "{t},{d},{mean}");
        }
    }
    s
}

fn summary_csv(net: &SocialNetwork, summary: &Summary) -> String {
    let mut s = String::from("metric,value\n");
    let _ = writeln!(s, "agents,{}", summary.agents);
    let _ = writeln!(s, "rounds,{}", summary.rounds);
    let _ = writeln!(s, "warmup,{}", summary.warmup);
    let _ = writeln!(s, "avg_utility,{}", summary.avg_utility);
    let _ = writeln!(s, "final_mean_delta,{}", summary.final_mean_delta);
    for i in 0..summary.agents {
        let _ = writeln!(
            s,
            "pct_rounds_at_max_agent_{},{}",
            net.label(i),
            summary.pct_rounds_at_max[i]
        );
    }
    s
}

impl OutputBundle {
    /// Write the bundle's CSV artifacts plus the resolved config into `dir`.
    /// On failure, files written so far are removed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let files = [
            ("config.txt", self.config.to_resolved_string()),
            ("timeseries.csv", timeseries_csv(&self.net, &self.record)),
            ("degree_delta.csv", degree_delta_csv(&self.net, &self.record)),
            ("summary.csv", summary_csv(&self.net, &self.summary)),
        ];
        let mut written: Vec<PathBuf> = Vec::new();
        for (name, content) in files {
            let path = dir.join(name);
            if let Err(e) = std::fs::write(&path, content) {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e.into());
            }
            written.push(path);
        }
        Ok(())
    }
}

/// Run an experiment and persist its artifacts.
pub fn run_and_write(cfg: &ExperimentConfig, dir: &Path) -> Result<OutputBundle> {
    let bundle = run_experiment(cfg)?;
    bundle.write(dir)?;
    Ok(bundle)
}

/// Recompute a [`Summary`] from a bundle directory's CSVs; equals the
/// in-memory summary of the run that produced them.
pub fn summarize(dir: &Path) -> Result<Summary> {
    let cfg = ExperimentConfig::parse(&std::fs::read_to_string(dir.join("config.txt"))?)?;
    let net = cfg.network.load()?;
    let text = std::fs::read_to_string(dir.join("timeseries.csv"))?;
    let mut rows: BTreeMap<(usize, usize), (f64, f64, f64)> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::InvalidConfig(format!(
                "timeseries.csv line {}: expected 6 fields",
                lineno + 1
            )));
        }
        let parse = |f: &str| -> Result<f64> {
            f.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad number in timeseries.csv: {f}")))
        };
        let round = parse(fields[0])? as usize;
        let label = parse(fields[1])? as u64;
        let agent = net
            .id_of_label(label)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown agent label {label}")))?;
        rows.insert((round, agent), (parse(fields[2])?, parse(fields[3])?, parse(fields[4])?));
    }
    let n = net.vertex_count();
    let rounds = rows.keys().map(|&(t, _)| t + 1).max().unwrap_or(0);
    let mut record = DynamicsRecord { rounds: Vec::with_capacity(rounds) };
    for t in 0..rounds {
        let mut round = DynamicsRound {
            deltas: vec![0.0; n],
            v: vec![0.0; n],
            w: vec![0.0; n],
        };
        for i in 0..n {
            let &(d, v, w) = rows.get(&(t, i)).ok_or_else(|| {
                Error::InvalidConfig(format!("timeseries.csv missing round {t} agent {i}"))
            })?;
            round.deltas[i] = d;
            round.v[i] = v;
            round.w[i] = w;
        }
        record.rounds.push(round);
    }
    Ok(compute_summary(&net, &record, &cfg))
}

/// Named experiment presets reproducing the published setups.
pub fn preset_names() -> &'static [&'static str] {
    &[
        "table1_delta0",
        "table1_delta2",
        "table1_agent7",
        "table3_a",
        "table3_b",
        "zkc_delta0",
        "zkc_known_random",
        "zkc_known_lex",
        "zkc_known_lex_seeded",
        "zkc_epoch_learned",
        "zkc_prob_learned",
        "facebook_delta0",
        "facebook_known",
        "facebook_epoch_learned",
    ]
}

/// Build the configuration for a named preset.
pub fn preset(name: &str, seed: u64) -> Result<ExperimentConfig> {
    let exp2 = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0))?;
    let exp4 = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(4.0))?;
    let mut cfg = match name {
        "table1_delta0" | "table1_delta2" | "table1_agent7" | "table3_a" | "table3_b" => {
            ExperimentConfig::new(NetworkSource::Example7, exp2, seed)
        }
        n if n.starts_with("zkc") => ExperimentConfig::new(NetworkSource::KarateClub, exp4, seed),
        n if n.starts_with("facebook") => {
            let mut cfg = ExperimentConfig::new(
                NetworkSource::File(PathBuf::from("facebook_combined.txt")),
                exp4,
                seed,
            );
            cfg.k = 3;
            cfg
        }
        other => return Err(Error::InvalidConfig(format!("unknown preset: {other}"))),
    };
    match name {
        "table1_delta0" => {}
        "table1_delta2" => cfg.delta = DeltaPolicy::Fixed(FixedDelta::Uniform(2.0)),
        "table1_agent7" => {
            cfg.delta = DeltaPolicy::Fixed(FixedDelta::PerAgent(vec![
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.01,
            ]))
        }
        "table3_a" => {
            let deltas = (1..=7).map(|i| 2.0 * (i as f64 - 1.0) / 3.0).collect();
            cfg.delta = DeltaPolicy::Fixed(FixedDelta::PerAgent(deltas));
            cfg.search.samples = 100_000;
        }
        "table3_b" => {
            let deltas = (1..=7).map(|i| 2.0 * (7.0 - i as f64) / 3.0).collect();
            cfg.delta = DeltaPolicy::Fixed(FixedDelta::PerAgent(deltas));
            cfg.search.samples = 100_000;
        }
        "zkc_delta0" | "facebook_delta0" => {}
        "zkc_known_random" | "facebook_known" => {
            cfg.delta = DeltaPolicy::Dynamics {
                schedule: crate::meta::UpdateSchedule::Synchronous,
                initial: 0.0,
                pinned: vec![],
            };
            cfg.rounds = 1100;
            cfg.warmup = 100;
        }
        "zkc_known_lex" | "zkc_known_lex_seeded" => {
            cfg.delta = DeltaPolicy::Dynamics {
                schedule: crate::meta::UpdateSchedule::Synchronous,
                initial: 0.0,
                pinned: if name == "zkc_known_lex_seeded" {
                    (30..=34).map(|l| (l, 30.0)).collect()
                } else {
                    vec![]
                },
            };
            cfg.tie_rule = crate::net::TieRule::Lexicographic;
            cfg.rounds = 500;
            cfg.warmup = 100;
        }
        "zkc_epoch_learned" | "facebook_epoch_learned" => {
            cfg.delta = DeltaPolicy::Dynamics {
                schedule: crate::meta::UpdateSchedule::Epoch { t: 100 },
                initial: 0.0,
                pinned: vec![],
            };
            cfg.knowledge = crate::meta::KnowledgeMode::Learned;
            cfg.rounds = 8000;
            cfg.warmup = 7000;
        }
        "zkc_prob_learned" => {
            cfg.delta = DeltaPolicy::Dynamics {
                schedule: crate::meta::UpdateSchedule::Probabilistic { p: 0.01 },
                initial: 0.0,
                pinned: vec![],
            };
            cfg.knowledge = crate::meta::KnowledgeMode::Learned;
            cfg.rounds = 3000;
            cfg.warmup = 2000;
        }
        _ => unreachable!("matched above"),
    }
    Ok(cfg)
}

/// One point of a utility-vs-δ sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub utility: f64,
    /// Expected number of invitations received at this δ.
    pub expected_invitations: f64,
}

/// Sweep one agent's δ over the grid with everyone else's δ fixed at random
/// (drawn from the run seed), recording predicted utility and invitation
/// count curves.
pub fn sweep_delta(cfg: &ExperimentConfig, agent_label: u64) -> Result<Vec<SweepRow>> {
    let net = cfg.network.load()?;
    let agent = net
        .id_of_label(agent_label)
        .ok_or_else(|| Error::InvalidConfig(format!("agent {agent_label} not in network")))?;
    let estimator =
        MonteCarloEstimator::new(&cfg.dist, cfg.search.samples, cfg.seed.wrapping_add(0x5EED));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = net.vertex_count();
    let grid_step = cfg.search.delta_max / (cfg.search.grid_points - 1) as f64;
    let deltas: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0..cfg.search.grid_points) as f64 * grid_step)
        .collect();
    let budgets: Vec<usize> = (0..n).map(|i| cfg.k.min(net.degree(i))).collect();
    let view: Vec<NeighborView> = net
        .neighbors(agent)
        .iter()
        .map(|&j| NeighborView {
            id: j,
            budget: budgets[j],
            delta: deltas[j],
            rivals: net
                .neighbors(j)
                .iter()
                .filter(|&&l| l != agent)
                .map(|&l| (l, deltas[l]))
                .collect(),
        })
        .collect();
    Ok(cfg
        .search
        .grid()
        .into_iter()
        .map(|d| SweepRow {
            delta: d,
            utility: predicted_utility(agent, budgets[agent], &view, d, &estimator, cfg.tie_rule),
            expected_invitations: view
                .iter()
                .map(|j| invitation_probability(j, agent, d, &estimator, cfg.tie_rule))
                .sum(),
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("delta,utility,expected_invitations\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.delta, r.utility, r.expected_invitations);
    }
    s
}

/// Configuration of the discovery-rate harness.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesConfig {
    pub seed: u64,
    /// Trials per cell for probability estimation.
    pub prob_trials: usize,
    /// Trials per cell for empirical discovery time.
    pub time_trials: usize,
}

impl RatesConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut seed = None;
        let mut prob_trials = 50_000usize;
        let mut time_trials = 2_000usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parsed = value
                .parse::<u64>()
                .map_err(|_| Error::InvalidConfig(format!("bad value for {key}: {value}")));
            match key {
                "seed" => seed = Some(parsed?),
                "rates.prob_trials" => prob_trials = parsed? as usize,
                "rates.time_trials" => time_trials = parsed? as usize,
                other => {
                    return Err(Error::InvalidConfig(format!("unknown rates key: {other}")))
                }
            }
        }
        Ok(Self {
            seed: seed.ok_or_else(|| Error::MissingConfigKey("seed".into()))?,
            prob_trials,
            time_trials,
        })
    }
}

/// One cell of the rate-analysis sweep.
#[derive(Debug, Clone, Copy)]
pub struct RateRow {
    pub n: usize,
    pub delta2: f64,
    pub epsilon: f64,
    pub p_lower: f64,
    pub p_upper: f64,
    pub p_both: f64,
    pub se_lower: f64,
    pub se_upper: f64,
    pub t_bound: f64,
    pub empirical_mean: f64,
    pub empirical_se: f64,
    pub censored: usize,
}

/// Run the standard sweep: 1×n exponential(mean 2) games over
/// n ∈ {2,5,20}, δ₂ ∈ {0.5,2}, ε ∈ {0.1,0.5}.
pub fn rates_sweep(cfg: &RatesConfig) -> Result<Vec<RateRow>> {
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &n in &[2usize, 5, 20] {
        for &delta2 in &[0.5f64, 2.0] {
            for &epsilon in &[0.1f64, 0.5] {
                cell += 1;
                let dist = GameDistribution::new(1, n, EntryLaw::ExponentialMean(2.0))?;
                let d2 = TrustLevel::new(delta2).unwrap();
                let p = estimate_discovery_probabilities(
                    &dist,
                    d2,
                    epsilon,
                    cfg.prob_trials,
                    cfg.seed.wrapping_add(cell),
                )?;
                let t = measure_discovery_time(
                    &dist,
                    d2,
                    30.0,
                    epsilon,
                    LeaderProbePolicy::RandomRow,
                    cfg.time_trials,
                    DISCOVERY_ROUND_CAP,
                    cfg.seed.wrapping_add(1000 + cell),
                )?;
                rows.push(RateRow {
                    n,
                    delta2,
                    epsilon,
                    p_lower: p.p_lower,
                    p_upper: p.p_upper,
                    p_both: p.p_both,
                    se_lower: p.se_lower,
                    se_upper: p.se_upper,
                    t_bound: theorem3_bound(&p),
                    empirical_mean: t.mean,
                    empirical_se: t.se,
                    censored: t.censored,
                });
            }
        }
    }
    Ok(rows)
}

pub fn rates_csv(rows: &[RateRow]) -> String {
    let mut s = String::from(
        "n,delta2,epsilon,p_lower,p_upper,p_both,t_bound,empirical_mean,empirical_se,censored\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.delta2,
            r.epsilon,
            r.p_lower,
            r.p_upper,
            r.p_both,
            r.t_bound,
            r.empirical_mean,
            r.empirical_se,
            r.censored
        );
    }
    s
}

/// Best-response δ for every agent in a network from known trust levels;
/// a thin convenience wrapper used by tests and the CLI sweep.
pub fn best_responses_known(
    net: &SocialNetwork,
    deltas: &[f64],
    cfg: &ExperimentConfig,
) -> Vec<f64> {
    let estimator =
        MonteCarloEstimator::new(&cfg.dist, cfg.search.samples, cfg.seed.wrapping_add(0x5EED));
    let budgets: Vec<usize> = (0..net.vertex_count()).map(|i| cfg.k.min(net.degree(i))).collect();
    (0..net.vertex_count())
        .map(|i| {
            let view: Vec<NeighborView> = net
                .neighbors(i)
                .iter()
                .map(|&j| NeighborView {
                    id: j,
                    budget: budgets[j],
                    delta: deltas[j],
                    rivals: net
                        .neighbors(j)
                        .iter()
                        .filter(|&&l| l != i)
                        .map(|&l| (l, deltas[l]))
                        .collect(),
                })
                .collect();
            best_response_delta(i, budgets[i], &view, &estimator, cfg.tie_rule, &cfg.search)
        })
        .collect()
}

//! Trust-level selection dynamics on top of the round engine.
//!
//! Choosing a trust level is itself a game: a higher δ attracts invitations
//! (neighbors prefer more trusting partners) but costs per-game utility.
//! Agents grid-search a greedy best response against last round's trust
//! levels, predicting invitations two hops out via gossiped estimates.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{follower_ltse_response, leader_ltse_strategy, TrustLevel};
use crate::learn::{
    follower_response_frontier, follower_update_bounds, induced_leader_frontier,
    leader_update_bounds, schedule_round, BoundInterval, ExplorationPolicy, NeighborProspect,
    CHANGE_RECENCY_WINDOW,
};
use crate::net::{
    play_round, AgentState, GameDistribution, MonteCarloEstimator, SocialNetwork, TieRule,
};

/// Grid specification for the δ* search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSearchConfig {
    pub delta_max: f64,
    pub grid_points: usize,
    /// Monte Carlo sample count behind the shared estimator.
    pub samples: usize,
}

impl Default for DeltaSearchConfig {
    fn default() -> Self {
        Self { delta_max: 30.0, grid_points: 61, samples: 1000 }
    }
}

impl DeltaSearchConfig {
    pub fn grid(&self) -> Vec<f64> {
        assert!(self.grid_points >= 2, "grid needs at least its endpoints");
        (0..self.grid_points)
            .map(|g| self.delta_max * g as f64 / (self.grid_points - 1) as f64)
            .collect()
    }
}

/// When agents recompute their trust level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateSchedule {
    /// Every agent updates every round.
    Synchronous,
    /// Every agent updates every `t` rounds.
    Epoch { t: u64 },
    /// Each agent updates independently with probability `p` per round.
    Probabilistic { p: f64 },
}

/// Whether agents read true trust levels or learned interval midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnowledgeMode {
    Known,
    Learned,
}

/// What an agent knows about one neighbor when predicting invitations: the
/// neighbor's budget, its (estimated) trust level, and — via gossip — the
/// trust levels the neighbor holds for its other neighbors.
#[derive(Debug, Clone)]
pub struct NeighborView {
    pub id: usize,
    pub budget: usize,
    /// The neighbor's trust level as this agent estimates it.
    pub delta: f64,
    /// The neighbor's other neighbors and its trust estimates for them.
    pub rivals: Vec<(usize, f64)>,
}

/// Probability that the neighbor described by `view` invites an agent whose
/// trust level it perceives as `my_delta`.
///
/// The neighbor ranks all its viable neighbors by its expected leader
/// utility, equal utilities breaking toward the higher trust level (as in
/// invitation selection); a strict top-`budget` standing invites with
/// certainty. A full tie at the boundary resolves per the tie rule:
/// uniform-random ties contribute the expected share
/// (slots remaining)/(tied count), lexicographic ties go to the lowest ids.
/// Common random numbers in the estimator make equal trust levels tie
/// exactly.
pub fn invitation_probability(
    view: &NeighborView,
    my_id: usize,
    my_delta: f64,
    estimator: &MonteCarloEstimator,
    tie_rule: TieRule,
) -> f64 {
    let (my_val, my_fu) = estimator.pair_utilities(view.delta, my_delta);
    if my_val < 0.0 || my_fu < 0.0 {
        return 0.0;
    }
    let mut stronger = 0usize;
    let mut tied_rivals: Vec<usize> = Vec::new();
    for &(l, dl) in &view.rivals {
        let (rv, rfu) = estimator.pair_utilities(view.delta, dl);
        if rv < 0.0 || rfu < 0.0 {
            continue;
        }
        if rv > my_val || (rv == my_val && dl > my_delta) {
            stronger += 1;
        } else if rv == my_val && dl == my_delta {
            tied_rivals.push(l);
        }
    }
    if stronger >= view.budget {
        return 0.0;
    }
    let slots = view.budget - stronger;
    if tied_rivals.len() + 1 <= slots {
        return 1.0;
    }
    match tie_rule {
        TieRule::UniformRandom => slots as f64 / (tied_rivals.len() + 1) as f64,
        TieRule::Lexicographic => {
            let ahead = tied_rivals.iter().filter(|&&l| l < my_id).count();
            if ahead < slots {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Expected per-round utility v + w if the agent adopted `candidate` while
/// everyone else stays put.
pub fn predicted_utility(
    my_id: usize,
    budget: usize,
    neighbors: &[NeighborView],
    candidate: f64,
    estimator: &MonteCarloEstimator,
    tie_rule: TieRule,
) -> f64 {
    let mut lead: Vec<f64> = neighbors
        .iter()
        .filter_map(|j| {
            let (ui, uj) = estimator.pair_utilities(candidate, j.delta);
            (ui >= 0.0 && uj >= 0.0).then_some(ui)
        })
        .collect();
    lead.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let v: f64 = lead.iter().take(budget).sum();
    let w: f64 = neighbors
        .iter()
        .map(|j| {
            let fu = estimator.pair_utilities(j.delta, candidate).1;
            if fu < 0.0 {
                return 0.0;
            }
            invitation_probability(j, my_id, candidate, estimator, tie_rule) * fu
        })
        .sum();
    v + w
}

/// Grid argmax of [`predicted_utility`]; ties break toward the lowest δ.
pub fn best_response_delta(
    my_id: usize,
    budget: usize,
    neighbors: &[NeighborView],
    estimator: &MonteCarloEstimator,
    tie_rule: TieRule,
    search: &DeltaSearchConfig,
) -> f64 {
    let mut best_delta = 0.0;
    let mut best_value = f64::NEG_INFINITY;
    for candidate in search.grid() {
        let value = predicted_utility(my_id, budget, neighbors, candidate, estimator, tie_rule);
        if value > best_value {
            best_value = value;
            best_delta = candidate;
        }
    }
    best_delta
}

/// Per-neighbor trust levels: a follower-only optimum for most neighbors and
/// a leader+follower optimum for the `budget` neighbors where leading is
/// worth the most extra utility.
pub fn personalized_delta_profile(
    my_id: usize,
    budget: usize,
    neighbors: &[NeighborView],
    estimator: &MonteCarloEstimator,
    tie_rule: TieRule,
    search: &DeltaSearchConfig,
) -> BTreeMap<usize, f64> {
    struct Scored {
        id: usize,
        delta_f: f64,
        delta_l: f64,
        gain: f64,
    }
    let follow_value = |j: &NeighborView, d: f64| -> f64 {
        let fu = estimator.pair_utilities(j.delta, d).1;
        invitation_probability(j, my_id, d, estimator, tie_rule) * fu.max(0.0)
    };
    let lead_value = |j: &NeighborView, d: f64| -> f64 {
        let (lu, ju) = estimator.pair_utilities(d, j.delta);
        if ju >= 0.0 {
            lu.max(0.0)
        } else {
            0.0
        }
    };
    let argmax = |f: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let mut best = (0.0, f64::NEG_INFINITY);
        for d in search.grid() {
            let v = f(d);
            if v > best.1 {
                best = (d, v);
            }
        }
        best
    };
    let mut scored: Vec<Scored> = neighbors
        .iter()
        .map(|j| {
            let (delta_f, value_f) = argmax(&|d| follow_value(j, d));
            let (delta_l, value_l) = argmax(&|d| follow_value(j, d) + lead_value(j, d));
            Scored { id: j.id, delta_f, delta_l, gain: value_l - value_f }
        })
        .collect();
    scored.sort_by(|x, y| y.gain.partial_cmp(&x.gain).unwrap().then(x.id.cmp(&y.id)));
    let mut profile = BTreeMap::new();
    for (rank, s) in scored.iter().enumerate() {
        profile.insert(s.id, if rank < budget { s.delta_l } else { s.delta_f });
    }
    profile
}

/// Full dynamics run configuration.
#[derive(Debug, Clone)]
pub struct DynamicsConfig {
    /// Global invitation budget, clamped per agent to its degree.
    pub budget: usize,
    pub schedule: UpdateSchedule,
    pub knowledge: KnowledgeMode,
    pub tie_rule: TieRule,
    pub rounds: u64,
    /// Trust level everyone starts from (pinned agents excepted).
    pub initial_delta: f64,
    /// Agents (internal ids) pinned to fixed trust levels.
    pub pinned: BTreeMap<usize, f64>,
    pub search: DeltaSearchConfig,
    pub exploration: ExplorationPolicy,
    pub seed: u64,
}

impl DynamicsConfig {
    pub fn new(budget: usize, schedule: UpdateSchedule, knowledge: KnowledgeMode, seed: u64) -> Self {
        Self {
            budget,
            schedule,
            knowledge,
            tie_rule: TieRule::UniformRandom,
            rounds: 1000,
            initial_delta: 0.0,
            pinned: BTreeMap::new(),
            search: DeltaSearchConfig::default(),
            exploration: ExplorationPolicy::default(),
            seed,
        }
    }
}

/// State of one simulated round: trust levels in effect and realized
/// utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsRound {
    pub deltas: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl DynamicsRound {
    #[inline]
    pub fn utility(&self, agent: usize) -> f64 {
        self.v[agent] + self.w[agent]
    }

    pub fn mean_delta(&self) -> f64 {
        self.deltas.iter().sum::<f64>() / self.deltas.len() as f64
    }
}

/// Time series emitted by [`run_dynamics`].
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsRecord {
    pub rounds: Vec<DynamicsRound>,
}

impl DynamicsRecord {
    /// Average utility per agent per round, skipping the first `warmup`
    /// rounds.
    pub fn mean_utility(&self, warmup: usize) -> f64 {
        let rounds = &self.rounds[warmup.min(self.rounds.len())..];
        if rounds.is_empty() {
            return 0.0;
        }
        let agents = rounds[0].deltas.len() as f64;
        if agents == 0.0 {
            return 0.0;
        }
        let total: f64 = rounds
            .iter()
            .map(|r| r.v.iter().sum::<f64>() + r.w.iter().sum::<f64>())
            .sum();
        total / (agents * rounds.len() as f64)
    }

    /// Fraction of agents sitting at `delta` (within 1e-9) in round `t`.
    pub fn fraction_at(&self, t: usize, delta: f64) -> f64 {
        let r = &self.rounds[t];
        r.deltas.iter().filter(|&&d| (d - delta).abs() < 1e-9).count() as f64
            / r.deltas.len() as f64
    }
}

fn due_for_update<R: Rng>(
    schedule: UpdateSchedule,
    round: u64,
    agents: usize,
    rng: &mut R,
) -> Vec<bool> {
    match schedule {
        UpdateSchedule::Synchronous => vec![round > 0; agents],
        UpdateSchedule::Epoch { t } => vec![round > 0 && round % t == 0; agents],
        UpdateSchedule::Probabilistic { p } => {
            (0..agents).map(|_| round > 0 && rng.gen::<f64>() < p).collect()
        }
    }
}

fn known_view(
    net: &SocialNetwork,
    budgets: &[usize],
    deltas: &[f64],
    agent: usize,
) -> Vec<NeighborView> {
    net.neighbors(agent)
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
        .collect()
}

/// Run trust-adaptation dynamics: each round, agents due per the schedule
/// adopt a greedy best-response δ against last round's levels, then a round
/// of games is played. In learned mode agents act on interval midpoints,
/// refine intervals from observed play, and split invitation slots between
/// exploitation and exploration.
pub fn run_dynamics(
    net: &SocialNetwork,
    dist: &GameDistribution,
    cfg: &DynamicsConfig,
) -> DynamicsRecord {
    match cfg.knowledge {
        KnowledgeMode::Known => run_known(net, dist, cfg),
        KnowledgeMode::Learned => run_learned(net, dist, cfg),
    }
}

fn initial_deltas(net: &SocialNetwork, cfg: &DynamicsConfig) -> Vec<f64> {
    (0..net.vertex_count())
        .map(|i| cfg.pinned.get(&i).copied().unwrap_or(cfg.initial_delta))
        .collect()
}

fn run_known(net: &SocialNetwork, dist: &GameDistribution, cfg: &DynamicsConfig) -> DynamicsRecord {
    let n = net.vertex_count();
    let budgets: Vec<usize> = (0..n).map(|i| cfg.budget.min(net.degree(i))).collect();
    let estimator =
        MonteCarloEstimator::new(dist, cfg.search.samples, cfg.seed.wrapping_add(0x5EED));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut deltas = initial_deltas(net, cfg);
    let mut record = DynamicsRecord { rounds: Vec::with_capacity(cfg.rounds as usize) };
    for t in 0..cfg.rounds {
        let due = due_for_update(cfg.schedule, t, n, &mut rng);
        let mut next = deltas.clone();
        for i in 0..n {
            if !due[i] || cfg.pinned.contains_key(&i) {
                continue;
            }
            let view = known_view(net, &budgets, &deltas, i);
            next[i] =
                best_response_delta(i, budgets[i], &view, &estimator, cfg.tie_rule, &cfg.search);
        }
        deltas = next;
        let agents: Vec<AgentState> = (0..n)
            .map(|i| AgentState::new(i, TrustLevel::new(deltas[i]).unwrap(), budgets[i]))
            .collect();
        let rec = play_round(net, &agents, dist, &estimator, cfg.tie_rule, t, &mut rng);
        record.rounds.push(DynamicsRound { deltas: deltas.clone(), v: rec.v, w: rec.w });
    }
    record
}

struct PairKnowledge {
    interval: BoundInterval<f64>,
    last_change: Option<u64>,
}

fn run_learned(net: &SocialNetwork, dist: &GameDistribution, cfg: &DynamicsConfig) -> DynamicsRecord {
    let n = net.vertex_count();
    let budgets: Vec<usize> = (0..n).map(|i| cfg.budget.min(net.degree(i))).collect();
    let estimator =
        MonteCarloEstimator::new(dist, cfg.search.samples, cfg.seed.wrapping_add(0x5EED));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut deltas = initial_deltas(net, cfg);
    let delta_max = cfg.search.delta_max;
    // know[i][j]: i's interval for neighbor j's trust level
    let mut know: Vec<BTreeMap<usize, PairKnowledge>> = (0..n)
        .map(|i| {
            net.neighbors(i)
                .iter()
                .map(|&j| {
                    (j, PairKnowledge {
                        interval: BoundInterval::initial(delta_max),
                        last_change: None,
                    })
                })
                .collect()
        })
        .collect();
    let mut record = DynamicsRecord { rounds: Vec::with_capacity(cfg.rounds as usize) };
    for t in 0..cfg.rounds {
        let due = due_for_update(cfg.schedule, t, n, &mut rng);
        let mut next = deltas.clone();
        for i in 0..n {
            if !due[i] || cfg.pinned.contains_key(&i) {
                continue;
            }
            // views are built from learned midpoints; rivals via gossip of
            // the neighbor's own current estimates
            let view: Vec<NeighborView> = net
                .neighbors(i)
                .iter()
                .map(|&j| NeighborView {
                    id: j,
                    budget: budgets[j],
                    delta: know[i][&j].interval.midpoint(),
                    rivals: net
                        .neighbors(j)
                        .iter()
                        .filter(|&&l| l != i)
                        .map(|&l| (l, know[j][&l].interval.midpoint()))
                        .collect(),
                })
                .collect();
            next[i] =
                best_response_delta(i, budgets[i], &view, &estimator, cfg.tie_rule, &cfg.search);
        }
        deltas = next;

        // invitation scheduling: exploit best estimates, explore wide intervals
        let mut invites: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let prospects: Vec<NeighborProspect> = net
                .neighbors(i)
                .iter()
                .map(|&j| {
                    let k = &know[i][&j];
                    let mid = k.interval.midpoint();
                    let (ui, uj) = estimator.pair_utilities(deltas[i], mid);
                    NeighborProspect {
                        id: j,
                        my_utility: ui,
                        delta: mid,
                        acceptable: uj >= 0.0,
                        interval_width: k.interval.width(),
                        recently_changed: k
                            .last_change
                            .is_some_and(|c| t.saturating_sub(c) < CHANGE_RECENCY_WINDOW),
                    }
                })
                .collect();
            let sched =
                schedule_round(&prospects, budgets[i], cfg.exploration, t + 1, &mut rng);
            let mut chosen = sched.exploit;
            chosen.extend(sched.explore);
            // invitee accepts per its own estimate of the inviter
            chosen.retain(|&j| {
                let their_mid = know[j][&i].interval.midpoint();
                estimator.pair_utilities(their_mid, deltas[j]).1 >= 0.0
            });
            chosen.sort_unstable();
            invites[i] = chosen;
        }

        // play at true trust levels; leaders aim using their estimates
        let mut v = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            for &j in &invites[i].clone() {
                let game = dist.sample_game(&mut rng);
                let my_estimate_of_j = know[i][&j].interval.midpoint();
                let row = leader_ltse_strategy(
                    &game,
                    TrustLevel::new(deltas[i]).unwrap(),
                    TrustLevel::new(my_estimate_of_j).unwrap(),
                )
                .leader_strategy;
                let col =
                    follower_ltse_response(&game, row, TrustLevel::new(deltas[j]).unwrap());
                v[i] += game.leader_payoff(row, col);
                w[j] += game.follower_payoff(row, col);

                let leader_frontier = follower_response_frontier(&game, row);
                let ki = know[i].get_mut(&j).unwrap();
                let (ni, ci) =
                    leader_update_bounds(ki.interval, &leader_frontier, col, delta_max)
                        .expect("observed follower response lies on the frontier");
                ki.interval = ni;
                if ci {
                    ki.last_change = Some(t);
                }

                let follower_frontier = induced_leader_frontier(
                    &game,
                    TrustLevel::new(my_estimate_of_j).unwrap(),
                );
                let kj = know[j].get_mut(&i).unwrap();
                let (nj, cj) =
                    follower_update_bounds(kj.interval, &follower_frontier, row, delta_max)
                        .expect("observed leader row lies on the induced frontier");
                kj.interval = nj;
                if cj {
                    kj.last_change = Some(t);
                }
            }
        }
        record.rounds.push(DynamicsRound { deltas: deltas.clone(), v, w });
    }
    record
}

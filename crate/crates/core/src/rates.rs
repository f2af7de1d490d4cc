//! Empirical rates of trust-level discovery.
//!
//! How many games does a leader need before its interval for the follower's
//! trust level is tight? Each game reveals a lower bound (the sacrifice the
//! follower actually made) and sometimes an upper bound (the sacrifice the
//! next frontier strategy would have needed). This module estimates the
//! per-game probabilities of landing those bounds within a tolerance ε and
//! checks the closed-form expected-time upper bound against simulation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{follower_ltse_response, TrustLevel};
use crate::learn::{follower_response_frontier, leader_update_bounds, BoundInterval};
use crate::net::GameDistribution;

/// Monte Carlo estimates of the per-game bound-discovery probabilities.
#[derive(Debug, Clone, Copy)]
pub struct DiscoveryProbabilities {
    /// P^l(ε): one game reveals a lower bound within ε of the true level.
    pub p_lower: f64,
    /// P^u(ε): one game reveals a finite upper bound within ε.
    pub p_upper: f64,
    /// Q(ε): one game reveals both at once.
    pub p_both: f64,
    pub se_lower: f64,
    pub se_upper: f64,
    pub se_both: f64,
    pub trials: usize,
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Classify one game's revelation: did the follower's response pin the
/// lower/upper interval endpoint within ε of its true trust level?
fn classify_game(
    frontier_sacrifices: impl Fn(usize) -> (f64, Option<f64>),
    position: usize,
    delta2: f64,
    epsilon: f64,
) -> (bool, bool) {
    let (l, u) = frontier_sacrifices(position);
    let lower = delta2 - l <= epsilon;
    let upper = u.is_some_and(|u| u - delta2 <= epsilon);
    (lower, upper)
}

/// Estimate P^l, P^u, Q over single-row games drawn from `dist`.
pub fn estimate_discovery_probabilities(
    dist: &GameDistribution,
    delta2: TrustLevel<f64>,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<DiscoveryProbabilities> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if dist.rows() != 1 {
        return Err(Error::InvalidConfig("discovery probabilities use 1×n games".into()));
    }
    assert!(trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut nl, mut nu, mut nq) = (0usize, 0usize, 0usize);
    for _ in 0..trials {
        let game = dist.sample_game(&mut rng);
        let response = follower_ltse_response(&game, 0, delta2);
        let frontier = follower_response_frontier(&game, 0);
        let pos = frontier
            .iter()
            .position(|p| p.index == response)
            .expect("response lies on the frontier");
        let (lower, upper) = classify_game(
            |p| {
                let l = frontier[0].primary - frontier[p].primary;
                let u = (p + 1 < frontier.len())
                    .then(|| frontier[0].primary - frontier[p + 1].primary);
                (l, u)
            },
            pos,
            delta2.value(),
            epsilon,
        );
        nl += lower as usize;
        nu += upper as usize;
        nq += (lower && upper) as usize;
    }
    let (p_lower, p_upper, p_both) = (
        nl as f64 / trials as f64,
        nu as f64 / trials as f64,
        nq as f64 / trials as f64,
    );
    Ok(DiscoveryProbabilities {
        p_lower,
        p_upper,
        p_both,
        se_lower: binomial_se(p_lower, trials),
        se_upper: binomial_se(p_upper, trials),
        se_both: binomial_se(p_both, trials),
        trials,
    })
}

/// Closed-form upper bound on the expected number of games until both
/// bounds are discovered:
/// T = 1/(P^u+P^l−Q) · (1 + (P^u−Q)/P^l + (P^l−Q)/P^u).
/// Unbounded (infinite) when either probability is zero.
pub fn theorem3_bound(p: &DiscoveryProbabilities) -> f64 {
    if p.p_lower <= 0.0 || p.p_upper <= 0.0 {
        return f64::INFINITY;
    }
    let denom = p.p_upper + p.p_lower - p.p_both;
    1.0 / denom * (1.0 + (p.p_upper - p.p_both) / p.p_lower + (p.p_lower - p.p_both) / p.p_upper)
}

/// How the leader picks its row while probing the follower's trust level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeaderProbePolicy {
    /// Uniformly random row each game.
    RandomRow,
    /// Prefer rows whose response frontier has a sacrifice breakpoint
    /// strictly inside the current interval (those are the only rows that
    /// can refine it); fall back to random when none can.
    InformedRow,
}

/// Empirical discovery times from repeated simulated games.
#[derive(Debug, Clone, Copy)]
pub struct DiscoveryTime {
    pub mean: f64,
    pub se: f64,
    pub trials: usize,
    /// Trials that hit the round cap before converging; excluded from mean.
    pub censored: usize,
}

/// Default per-trial round cap.
pub const DISCOVERY_ROUND_CAP: u64 = 1_000_000;

fn row_is_informative(
    game: &crate::game::BimatrixGame<f64>,
    row: usize,
    interval: &BoundInterval<f64>,
) -> bool {
    let frontier = follower_response_frontier(game, row);
    frontier.iter().skip(1).any(|p| {
        let sacrifice = frontier[0].primary - p.primary;
        sacrifice > interval.lower() && sacrifice < interval.upper()
    })
}

/// Simulate fresh games with interval updates until the interval width is at
/// most 2ε; returns the mean number of games needed.
#[allow(clippy::too_many_arguments)]
pub fn measure_discovery_time(
    dist: &GameDistribution,
    delta2: TrustLevel<f64>,
    delta_max: f64,
    epsilon: f64,
    policy: LeaderProbePolicy,
    trials: usize,
    round_cap: u64,
    seed: u64,
) -> Result<DiscoveryTime> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    assert!(trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::with_capacity(trials);
    let mut censored = 0usize;
    for _ in 0..trials {
        let mut interval = BoundInterval::initial(delta_max);
        let mut rounds = 0u64;
        while interval.width() > 2.0 * epsilon {
            if rounds >= round_cap {
                censored += 1;
                break;
            }
            rounds += 1;
            let game = dist.sample_game(&mut rng);
            let row = match policy {
                LeaderProbePolicy::RandomRow => rng.gen_range(0..dist.rows()),
                LeaderProbePolicy::InformedRow => {
                    let informative: Vec<usize> = (0..dist.rows())
                        .filter(|&r| row_is_informative(&game, r, &interval))
                        .collect();
                    if informative.is_empty() {
                        rng.gen_range(0..dist.rows())
                    } else {
                        informative[rng.gen_range(0..informative.len())]
                    }
                }
            };
            let response = follower_ltse_response(&game, row, delta2);
            let frontier = follower_response_frontier(&game, row);
            let (next, _) = leader_update_bounds(interval, &frontier, response, delta_max)?;
            interval = next;
        }
        if interval.width() <= 2.0 * epsilon {
            times.push(rounds as f64);
        }
    }
    let n = times.len().max(1);
    let mean = times.iter().sum::<f64>() / n as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n as f64;
    Ok(DiscoveryTime {
        mean,
        se: (var / n as f64).sqrt(),
        trials,
        censored,
    })
}

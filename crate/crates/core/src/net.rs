//! The social-network round engine: graphs, game distributions, Monte Carlo
//! utility estimation, invitation selection, and round execution.
//!
//! Each round every agent invites up to `k_i` neighbors to games it will
//! lead, ranked by its estimated leader utility; invitees accept whenever
//! their expected follower utility is nonnegative. Accepted pairs realize a
//! freshly drawn game solved at the pair's trust levels.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Uniform};

use crate::error::{Error, Result};
use crate::game::{leader_ltse_strategy, BimatrixGame, LtseOutcome, TrustLevel};

/// Undirected simple graph over arbitrary integer vertex labels, stored
/// under dense 0-based internal ids in sorted label order.
#[derive(Debug, Clone)]
pub struct SocialNetwork {
    labels: Vec<u64>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl SocialNetwork {
    pub fn from_edges(edges: &[(u64, u64)]) -> Result<Self> {
        let mut labels = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidNetwork(format!("self-loop at vertex {a}")));
            }
            labels.insert(a);
            labels.insert(b);
        }
        let labels: Vec<u64> = labels.into_iter().collect();
        let index: BTreeMap<u64, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); labels.len()];
        for &(a, b) in edges {
            let (i, j) = (index[&a], index[&b]);
            // duplicate edges (in either orientation) collapse
            if seen.insert((i.min(j), i.max(j))) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self { labels, adjacency, edge_count: seen.len() })
    }

    /// Parse a SNAP-style edge list: one whitespace-separated vertex pair per
    /// line, lines starting with '#' ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>, lineno: usize| -> Result<u64> {
                tok.ok_or_else(|| Error::EdgeListParse {
                    line: lineno + 1,
                    msg: "expected two vertex ids".into(),
                })?
                .parse()
                .map_err(|e| Error::EdgeListParse {
                    line: lineno + 1,
                    msg: format!("bad vertex id: {e}"),
                })
            };
            let a = parse(it.next(), lineno)?;
            let b = parse(it.next(), lineno)?;
            if it.next().is_some() {
                return Err(Error::EdgeListParse {
                    line: lineno + 1,
                    msg: "trailing tokens after vertex pair".into(),
                });
            }
            edges.push((a, b));
        }
        Self::from_edges(&edges)
    }

    pub fn load_edge_list(path: &Path) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    /// The 7-node example network with degrees (3,4,3,4,4,2,4).
    pub fn example7() -> Self {
        let edges = [
            (1, 2), (1, 5), (1, 7), (2, 3), (2, 4), (2, 5),
            (3, 5), (3, 7), (4, 5), (4, 6), (4, 7), (6, 7),
        ];
        Self::from_edges(&edges).unwrap()
    }

    /// Zachary's karate club: 34 vertices, 78 edges.
    pub fn karate_club() -> Self {
        let edges = [
            (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (1, 9),
            (1, 11), (1, 12), (1, 13), (1, 14), (1, 18), (1, 20), (1, 22),
            (1, 32), (2, 3), (2, 4), (2, 8), (2, 14), (2, 18), (2, 20),
            (2, 22), (2, 31), (3, 4), (3, 8), (3, 9), (3, 10), (3, 14),
            (3, 28), (3, 29), (3, 33), (4, 8), (4, 13), (4, 14), (5, 7),
            (5, 11), (6, 7), (6, 11), (6, 17), (7, 17), (9, 31), (9, 33),
            (9, 34), (10, 34), (14, 34), (15, 33), (15, 34), (16, 33),
            (16, 34), (19, 33), (19, 34), (20, 34), (21, 33), (21, 34),
            (23, 33), (23, 34), (24, 26), (24, 28), (24, 30), (24, 33),
            (24, 34), (25, 26), (25, 28), (25, 32), (26, 32), (27, 30),
            (27, 34), (28, 34), (29, 32), (29, 34), (30, 33), (30, 34),
            (31, 33), (31, 34), (32, 33), (32, 34), (33, 34),
        ];
        Self::from_edges(&edges).unwrap()
    }

    /// Star with center labeled 1 and `leaves` leaves labeled 2..
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<(u64, u64)> = (0..leaves).map(|l| (1, 2 + l as u64)).collect();
        Self::from_edges(&edges).unwrap()
    }

    /// Two connected vertices.
    pub fn diad() -> Self {
        Self::from_edges(&[(1, 2)]).unwrap()
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn label(&self, id: usize) -> u64 {
        self.labels[id]
    }

    pub fn id_of_label(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    #[inline]
    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adjacency[id]
    }

    #[inline]
    pub fn degree(&self, id: usize) -> usize {
        self.adjacency[id].len()
    }

    /// Two-hop neighborhood: neighbors of neighbors, excluding the one-hop
    /// neighborhood and the vertex itself.
    pub fn two_hop(&self, id: usize) -> Vec<usize> {
        let one: BTreeSet<usize> = self.adjacency[id].iter().copied().collect();
        let mut two = BTreeSet::new();
        for &j in &self.adjacency[id] {
            for &l in &self.adjacency[j] {
                if l != id && !one.contains(&l) {
                    two.insert(l);
                }
            }
        }
        two.into_iter().collect()
    }
}

/// Law of a single payoff entry; all entries of both matrices are i.i.d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryLaw {
    /// Exponential with the given MEAN (scale, not rate).
    ExponentialMean(f64),
    /// Uniform on [lo, hi].
    Uniform(f64, f64),
}

/// Distribution over bimatrix games of a fixed shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameDistribution {
    rows: usize,
    cols: usize,
    law: EntryLaw,
}

impl GameDistribution {
    pub fn new(rows: usize, cols: usize, law: EntryLaw) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution("empty game shape".into()));
        }
        match law {
            EntryLaw::ExponentialMean(m) if !(m > 0.0 && m.is_finite()) => {
                return Err(Error::InvalidDistribution(format!("bad exponential mean {m}")));
            }
            EntryLaw::Uniform(lo, hi) if !(lo <= hi && lo.is_finite() && hi.is_finite()) => {
                return Err(Error::InvalidDistribution(format!("bad uniform range [{lo}, {hi}]")));
            }
            _ => {}
        }
        Ok(Self { rows, cols, law })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn law(&self) -> EntryLaw {
        self.law
    }

    pub fn sample_game<R: Rng>(&self, rng: &mut R) -> BimatrixGame<f64> {
        let n = self.rows * self.cols;
        let draw_all = |rng: &mut R| -> Vec<f64> {
            match self.law {
                EntryLaw::ExponentialMean(mean) => {
                    let exp = Exp::new(1.0 / mean).unwrap();
                    (0..n).map(|_| exp.sample(rng) as f64).collect()
                }
                EntryLaw::Uniform(lo, hi) => {
                    if lo == hi {
                        vec![lo; n]
                    } else {
                        let uni = Uniform::new_inclusive(lo, hi);
                        (0..n).map(|_| uni.sample(rng)).collect()
                    }
                }
            }
        };
        let a = draw_all(rng);
        let b = draw_all(rng);
        BimatrixGame::new(self.rows, self.cols, a, b).unwrap()
    }
}

/// Mean LTSE payoffs of leader and follower over `samples` games drawn
/// i.i.d. from `dist`, deterministic given `seed`.
pub fn estimate_expected_utilities(
    dist: &GameDistribution,
    delta_leader: TrustLevel<f64>,
    delta_follower: TrustLevel<f64>,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    assert!(samples >= 1, "need at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lsum = 0.0;
    let mut fsum = 0.0;
    for _ in 0..samples {
        let game = dist.sample_game(&mut rng);
        let out = leader_ltse_strategy(&game, delta_leader, delta_follower);
        lsum += out.leader_utility;
        fsum += out.follower_utility;
    }
    (lsum / samples as f64, fsum / samples as f64)
}

/// Quantization step for the estimator cache key. Fine enough that distinct
/// trust levels used anywhere in the experiments stay distinct.
pub const ESTIMATE_QUANT_STEP: f64 = 0.01;

/// Shared Monte Carlo estimator of expected pair utilities.
///
/// One fixed set of games is drawn up front and reused for every trust-level
/// pair (common random numbers), so comparisons across trust levels are
/// paired: equal levels give bit-equal estimates and per-game monotonicity
/// in one's own level holds exactly. Results are memoized per quantized
/// (leader δ, follower δ) pair.
#[derive(Debug)]
pub struct MonteCarloEstimator {
    games: Vec<BimatrixGame<f64>>,
    cache: RefCell<HashMap<(i64, i64), (f64, f64)>>,
}

impl MonteCarloEstimator {
    pub fn new(dist: &GameDistribution, samples: usize, seed: u64) -> Self {
        assert!(samples >= 1, "need at least one sample");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let games = (0..samples).map(|_| dist.sample_game(&mut rng)).collect();
        Self { games, cache: RefCell::new(HashMap::new()) }
    }

    fn quantize(delta: f64) -> i64 {
        (delta / ESTIMATE_QUANT_STEP).round() as i64
    }

    /// Mean (leader utility, follower utility) at the given trust levels.
    pub fn pair_utilities(&self, delta_leader: f64, delta_follower: f64) -> (f64, f64) {
        let key = (Self::quantize(delta_leader), Self::quantize(delta_follower));
        if let Some(&hit) = self.cache.borrow().get(&key) {
            return hit;
        }
        let dl = TrustLevel::new(key.0 as f64 * ESTIMATE_QUANT_STEP).unwrap();
        let df = TrustLevel::new(key.1 as f64 * ESTIMATE_QUANT_STEP).unwrap();
        let mut lsum = 0.0;
        let mut fsum = 0.0;
        for game in &self.games {
            let out = leader_ltse_strategy(game, dl, df);
            lsum += out.leader_utility;
            fsum += out.follower_utility;
        }
        let value = (lsum / self.games.len() as f64, fsum / self.games.len() as f64);
        self.cache.borrow_mut().insert(key, value);
        value
    }
}

/// One agent's standing state across rounds.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub id: usize,
    pub delta: TrustLevel<f64>,
    /// Invitation budget, already clamped to the agent's degree.
    pub budget: usize,
    /// Accumulated utility from games led.
    pub v: f64,
    /// Accumulated utility from games followed.
    pub w: f64,
}

impl AgentState {
    pub fn new(id: usize, delta: TrustLevel<f64>, budget: usize) -> Self {
        Self { id, delta, budget, v: 0.0, w: 0.0 }
    }

    #[inline]
    pub fn utility(&self) -> f64 {
        self.v + self.w
    }
}

/// Build one agent per vertex with a shared trust level and a global budget
/// clamped to each vertex's degree.
pub fn uniform_agents(net: &SocialNetwork, delta: f64, k: usize) -> Vec<AgentState> {
    (0..net.vertex_count())
        .map(|i| AgentState::new(i, TrustLevel::new(delta).unwrap(), k.min(net.degree(i))))
        .collect()
}

/// How invitation-ranking ties are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    UniformRandom,
    Lexicographic,
}

/// A candidate invitee with the inviter's estimated utilities.
#[derive(Debug, Clone, Copy)]
pub struct InviteEstimate {
    pub neighbor: usize,
    /// Inviter's expected utility leading against this neighbor.
    pub u_inviter: f64,
    /// Neighbor's expected utility following.
    pub u_invitee: f64,
    /// Neighbor's trust level as the inviter knows it. Equal estimated
    /// utilities break toward the higher trust level: identical
    /// distributions make expected utility monotone in the partner's δ, so
    /// a utility tie means the sample set cannot distinguish the levels and
    /// the more trusting neighbor is weakly better.
    pub delta: f64,
}

/// Whether an invitee accepts, given its estimated follower utility.
#[inline]
pub fn accept_invitation(estimated_utility: f64) -> bool {
    estimated_utility >= 0.0
}

/// Pick up to `budget` neighbors maximizing the inviter's estimated utility,
/// filtering out pairs either side expects to lose on. Equal utilities break
/// toward the higher trust level; full ties (equal utility and δ) resolve
/// per `tie_rule`.
pub fn select_invitations<R: Rng>(
    estimates: &[InviteEstimate],
    budget: usize,
    tie_rule: TieRule,
    rng: &mut R,
) -> Vec<usize> {
    let mut viable: Vec<&InviteEstimate> = estimates
        .iter()
        .filter(|e| e.u_inviter >= 0.0 && e.u_invitee >= 0.0)
        .collect();
    viable.sort_by(|x, y| {
        y.u_inviter
            .partial_cmp(&x.u_inviter)
            .unwrap()
            .then(y.delta.partial_cmp(&x.delta).unwrap())
            .then(x.neighbor.cmp(&y.neighbor))
    });
    if tie_rule == TieRule::UniformRandom {
        // shuffle within each maximal run of full ties
        let mut start = 0;
        while start < viable.len() {
            let mut end = start + 1;
            while end < viable.len()
                && viable[end].u_inviter == viable[start].u_inviter
                && viable[end].delta == viable[start].delta
            {
                end += 1;
            }
            for i in (start + 1..end).rev() {
                let j = start + rng.gen_range(0..=i - start);
                viable.swap(i, j);
            }
            start = end;
        }
    }
    viable.iter().take(budget).map(|e| e.neighbor).collect()
}

/// One realized game within a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamePlayed {
    pub leader: usize,
    pub follower: usize,
    pub outcome: LtseOutcome<f64>,
}

/// Everything that happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    /// Accepted invitations issued by each agent, in invitee-id order.
    pub invites: Vec<Vec<usize>>,
    /// Accepted invitations received by each agent, in inviter-id order.
    pub invited_by: Vec<Vec<usize>>,
    pub games: Vec<GamePlayed>,
    /// Utility earned leading, per agent, this round.
    pub v: Vec<f64>,
    /// Utility earned following, per agent, this round.
    pub w: Vec<f64>,
}

impl RoundRecord {
    #[inline]
    pub fn utility(&self, agent: usize) -> f64 {
        self.v[agent] + self.w[agent]
    }
}

/// Play one round: every agent invites its best neighbors per the shared
/// estimator at the agents' acting trust levels, acceptances resolve, and
/// each accepted ordered pair realizes one freshly drawn game. An agent may
/// both invite and be invited by the same neighbor (two games), but issues
/// at most one invitation per neighbor per round.
pub fn play_round<R: Rng>(
    net: &SocialNetwork,
    agents: &[AgentState],
    dist: &GameDistribution,
    estimator: &MonteCarloEstimator,
    tie_rule: TieRule,
    round: u64,
    rng: &mut R,
) -> RoundRecord {
    let n = net.vertex_count();
    assert_eq!(agents.len(), n, "one agent per vertex");
    let mut invites = vec![Vec::new(); n];
    let mut invited_by = vec![Vec::new(); n];
    for i in 0..n {
        let estimates: Vec<InviteEstimate> = net
            .neighbors(i)
            .iter()
            .map(|&j| {
                let (ui, uj) =
                    estimator.pair_utilities(agents[i].delta.value(), agents[j].delta.value());
                InviteEstimate {
                    neighbor: j,
                    u_inviter: ui,
                    u_invitee: uj,
                    delta: agents[j].delta.value(),
                }
            })
            .collect();
        let mut chosen = select_invitations(&estimates, agents[i].budget, tie_rule, rng);
        chosen.retain(|&j| {
            let (_, uj) =
                estimator.pair_utilities(agents[i].delta.value(), agents[j].delta.value());
            accept_invitation(uj)
        });
        chosen.sort_unstable();
        for &j in &chosen {
            invited_by[j].push(i);
        }
        invites[i] = chosen;
    }
    let mut games = Vec::new();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        for &j in &invites[i] {
            let game = dist.sample_game(rng);
            let outcome = leader_ltse_strategy(&game, agents[i].delta, agents[j].delta);
            v[i] += outcome.leader_utility;
            w[j] += outcome.follower_utility;
            games.push(GamePlayed { leader: i, follower: j, outcome });
        }
    }
    RoundRecord { round, invites, invited_by, games, v, w }
}

/// Expected number of games agent `i` follows per round when all agents
/// share one trust level and ties break uniformly at random:
/// Σ_{j ∈ N¹_i} k_j / |N¹_j|.
pub fn expected_following_count(net: &SocialNetwork, agent: usize, budgets: &[usize]) -> f64 {
    net.neighbors(agent)
        .iter()
        .map(|&j| budgets[j] as f64 / net.degree(j) as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example7_degrees() {
        let net = SocialNetwork::example7();
        assert_eq!(net.vertex_count(), 7);
        assert_eq!(net.edge_count(), 12);
        let degrees: Vec<usize> = (0..7).map(|i| net.degree(i)).collect();
        assert_eq!(degrees, vec![3, 4, 3, 4, 4, 2, 4]);
    }

    #[test]
    fn karate_club_shape() {
        let net = SocialNetwork::karate_club();
        assert_eq!(net.vertex_count(), 34);
        assert_eq!(net.edge_count(), 78);
        let max_deg = (0..34).map(|i| net.degree(i)).max().unwrap();
        assert_eq!(max_deg, 17);
        assert_eq!(net.degree(net.id_of_label(34).unwrap()), 17);
        assert_eq!(net.degree(net.id_of_label(1).unwrap()), 16);
        assert_eq!(net.degree(net.id_of_label(12).unwrap()), 1);
    }

    #[test]
    fn two_hop_excludes_one_hop_and_self() {
        let net = SocialNetwork::example7();
        // N¹_7 = {1,3,4,6}; their neighbors minus that set and 7 = {2,5}
        let id7 = net.id_of_label(7).unwrap();
        let two: Vec<u64> = net.two_hop(id7).iter().map(|&i| net.label(i)).collect();
        assert_eq!(two, vec![2, 5]);
    }

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let net = SocialNetwork::parse_edge_list("1 2\n2 1\n").unwrap();
        assert_eq!(net.vertex_count(), 2);
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let net = SocialNetwork::parse_edge_list("# header\n\n1 2\n# more\n2 3\n").unwrap();
        assert_eq!(net.edge_count(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = SocialNetwork::parse_edge_list("1 2\nx y\n").unwrap_err();
        match err {
            Error::EdgeListParse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn self_loops_rejected() {
        assert!(SocialNetwork::from_edges(&[(3, 3)]).is_err());
    }

    #[test]
    fn degenerate_uniform_estimates_exactly() {
        let dist = GameDistribution::new(2, 2, EntryLaw::Uniform(5.0, 5.0)).unwrap();
        for &(d1, d2) in &[(0.0, 0.0), (2.0, 0.0), (3.0, 7.0)] {
            let (l, f) = estimate_expected_utilities(
                &dist,
                TrustLevel::new(d1).unwrap(),
                TrustLevel::new(d2).unwrap(),
                100,
                9,
            );
            assert_eq!((l, f), (5.0, 5.0));
        }
    }

    #[test]
    fn single_sample_is_exact_ltse_of_the_drawn_game() {
        let dist = GameDistribution::new(3, 3, EntryLaw::ExponentialMean(2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let game = dist.sample_game(&mut rng);
        let out = leader_ltse_strategy(&game, TrustLevel::zero(), TrustLevel::zero());
        let (l, f) = estimate_expected_utilities(&dist, TrustLevel::zero(), TrustLevel::zero(), 1, 11);
        assert_eq!((l, f), (out.leader_utility, out.follower_utility));
    }

    #[test]
    fn exponential_mean_two_selfish_per_game_total() {
        // per-game leader+follower mean at δ=(0,0) backs out to ≈ 6.006
        let dist = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0)).unwrap();
        let (l, f) =
            estimate_expected_utilities(&dist, TrustLevel::zero(), TrustLevel::zero(), 200_000, 5);
        let total = l + f;
        assert!(
            (total - 6.006).abs() / 6.006 < 0.02,
            "per-game total {total} vs expected 6.006"
        );
    }

    #[test]
    fn estimator_caches_and_matches_direct_estimate() {
        let dist = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0)).unwrap();
        let est = MonteCarloEstimator::new(&dist, 500, 123);
        let a = est.pair_utilities(1.0, 2.0);
        let b = est.pair_utilities(1.0, 2.0);
        assert_eq!(a, b);
        let direct = estimate_expected_utilities(
            &dist,
            TrustLevel::new(1.0).unwrap(),
            TrustLevel::new(2.0).unwrap(),
            500,
            123,
        );
        assert_eq!(a, direct);
    }

    #[test]
    fn common_random_numbers_make_own_delta_monotonicity_exact() {
        let dist = GameDistribution::new(3, 3, EntryLaw::ExponentialMean(2.0)).unwrap();
        let est = MonteCarloEstimator::new(&dist, 2_000, 77);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let mut prev_leader = f64::INFINITY;
        for &d in &grid {
            let (l, _) = est.pair_utilities(d, 1.0);
            assert!(l <= prev_leader + 1e-12, "leader own-payoff rose at δ={d}");
            prev_leader = l;
        }
        let mut prev_follower = f64::INFINITY;
        for &d in &grid {
            let (_, f) = est.pair_utilities(1.0, d);
            assert!(f <= prev_follower + 1e-12, "follower own-payoff rose at δ={d}");
            prev_follower = f;
        }
    }

    #[test]
    fn higher_delta_neighbors_rank_weakly_higher() {
        let dist = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0)).unwrap();
        let est = MonteCarloEstimator::new(&dist, 20_000, 3);
        let deltas = [0.0, 0.5, 1.0, 2.0, 4.0];
        let mut prev = f64::NEG_INFINITY;
        for &d in &deltas {
            let (u, _) = est.pair_utilities(1.0, d);
            assert!(u >= prev, "leader utility fell as follower δ rose to {d}");
            prev = u;
        }
    }

    #[test]
    fn acceptance_boundary() {
        assert!(accept_invitation(0.0));
        assert!(!accept_invitation(-0.01));
        assert!(accept_invitation(3.5));
    }

    fn equal_estimates(neighbors: &[usize]) -> Vec<InviteEstimate> {
        neighbors
            .iter()
            .map(|&j| InviteEstimate { neighbor: j, u_inviter: 4.0, u_invitee: 4.0, delta: 1.0 })
            .collect()
    }

    #[test]
    fn lexicographic_ties_pick_lowest_ids() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // node 7's neighbors in example7 under internal ids: {0,2,3,5}
        let picked =
            select_invitations(&equal_estimates(&[0, 2, 3, 5]), 2, TieRule::Lexicographic, &mut rng);
        assert_eq!(picked, vec![0, 2]);
    }

    #[test]
    fn uniform_ties_cover_all_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0usize; 6];
        let rounds = 4000;
        for _ in 0..rounds {
            for j in
                select_invitations(&equal_estimates(&[0, 2, 3, 5]), 2, TieRule::UniformRandom, &mut rng)
            {
                counts[j] += 1;
            }
        }
        for &j in &[0usize, 2, 3, 5] {
            let freq = counts[j] as f64 / rounds as f64;
            assert!((freq - 0.5).abs() < 0.05, "neighbor {j} picked at rate {freq}");
        }
    }

    #[test]
    fn equal_utilities_break_toward_higher_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ests = vec![
            InviteEstimate { neighbor: 0, u_inviter: 4.0, u_invitee: 4.0, delta: 1.0 },
            InviteEstimate { neighbor: 1, u_inviter: 4.0, u_invitee: 4.0, delta: 2.5 },
            InviteEstimate { neighbor: 2, u_inviter: 4.0, u_invitee: 4.0, delta: 2.5 },
        ];
        // δ=2.5 pair outranks δ=1.0 despite equal utilities
        for _ in 0..50 {
            let picked = select_invitations(&ests, 1, TieRule::UniformRandom, &mut rng);
            assert_ne!(picked, vec![0]);
        }
        let picked = select_invitations(&ests, 1, TieRule::Lexicographic, &mut rng);
        assert_eq!(picked, vec![1]);
    }

    #[test]
    fn negative_invitee_utility_filtered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ests = vec![
            InviteEstimate { neighbor: 0, u_inviter: 9.0, u_invitee: -0.1, delta: 0.0 },
            InviteEstimate { neighbor: 1, u_inviter: 1.0, u_invitee: 1.0, delta: 0.0 },
        ];
        let picked = select_invitations(&ests, 2, TieRule::Lexicographic, &mut rng);
        assert_eq!(picked, vec![1]);
    }

    #[test]
    fn budget_covering_all_neighbors_invites_all() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let picked =
            select_invitations(&equal_estimates(&[0, 1, 2]), 5, TieRule::Lexicographic, &mut rng);
        assert_eq!(picked, vec![0, 1, 2]);
    }

    #[test]
    fn round_accounting_and_budgets_hold() {
        let net = SocialNetwork::example7();
        let dist = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0)).unwrap();
        let est = MonteCarloEstimator::new(&dist, 300, 10);
        let agents = uniform_agents(&net, 1.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rec = play_round(&net, &agents, &dist, &est, TieRule::UniformRandom, 0, &mut rng);
        for i in 0..7 {
            assert!(rec.invites[i].len() <= agents[i].budget);
            for &j in &rec.invites[i] {
                assert!(rec.invited_by[j].contains(&i));
            }
        }
        let played: f64 = rec
            .games
            .iter()
            .map(|g| g.outcome.leader_utility + g.outcome.follower_utility)
            .sum();
        let accounted: f64 = rec.v.iter().sum::<f64>() + rec.w.iter().sum::<f64>();
        assert!((played - accounted).abs() < 1e-9);
    }

    #[test]
    fn rounds_are_deterministic_given_seed() {
        let net = SocialNetwork::example7();
        let dist = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0)).unwrap();
        let agents = uniform_agents(&net, 1.0, 2);
        let run = || {
            let est = MonteCarloEstimator::new(&dist, 300, 10);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            play_round(&net, &agents, &dist, &est, TieRule::UniformRandom, 0, &mut rng)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_network_round_is_empty() {
        let net = SocialNetwork::from_edges(&[]).unwrap();
        let dist = GameDistribution::new(2, 2, EntryLaw::ExponentialMean(2.0)).unwrap();
        let est = MonteCarloEstimator::new(&dist, 10, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rec = play_round(&net, &[], &dist, &est, TieRule::Lexicographic, 0, &mut rng);
        assert!(rec.games.is_empty());
    }

    #[test]
    fn expected_following_counts() {
        let net = SocialNetwork::example7();
        let budgets = vec![2usize; 7];
        let id7 = net.id_of_label(7).unwrap();
        let got = expected_following_count(&net, id7, &budgets);
        assert!((got - 17.0 / 6.0).abs() < 1e-12);

        let star = SocialNetwork::star(5);
        let center = star.id_of_label(1).unwrap();
        // leaves have degree 1 and budget clamped to 1: center follows 5
        let budgets: Vec<usize> = (0..6).map(|i| 2usize.min(star.degree(i))).collect();
        assert_eq!(expected_following_count(&star, center, &budgets), 5.0);
    }
}

//! Interval learning of neighbors' trust levels from observed play.
//!
//! A player never sees another's trust level directly. What it sees is which
//! strategy the other picked, and each observed pick pins the hidden level
//! between two sacrifices on the Pareto frontier of the realized game. The
//! update keeps a half-open interval `[lower, upper)` that is intersected
//! when the observation is consistent with it and replaced (flagging a
//! change) when it is not.

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{follower_ltse_response, pareto_frontier, BimatrixGame, FrontierPoint, Scalar, TrustLevel};

/// Half-open interval `[lower, upper)` known to contain a neighbor's trust
/// level while that level stays fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInterval<F> {
    lower: F,
    upper: F,
}

impl<F: Scalar> BoundInterval<F> {
    pub fn new(lower: F, upper: F) -> Result<Self> {
        if !(lower >= F::zero() && lower <= upper) {
            return Err(Error::InvalidTrustLevel(format!(
                "bad interval [{lower:?}, {upper:?})"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The no-knowledge interval `[0, delta_max)`.
    pub fn initial(delta_max: F) -> Self {
        Self { lower: F::zero(), upper: delta_max }
    }

    #[inline]
    pub fn lower(&self) -> F {
        self.lower
    }

    #[inline]
    pub fn upper(&self) -> F {
        self.upper
    }

    #[inline]
    pub fn width(&self) -> F {
        self.upper - self.lower
    }

    /// Midpoint, the default point estimate of the neighbor's trust level.
    #[inline]
    pub fn midpoint(&self) -> F {
        (self.lower + self.upper) / F::from(2.0).unwrap()
    }

    #[inline]
    pub fn contains(&self, delta: F) -> bool {
        delta >= self.lower && delta < self.upper
    }
}

fn validate_frontier<F: Scalar>(frontier: &[FrontierPoint<F>]) -> Result<()> {
    if frontier.is_empty() {
        return Err(Error::MalformedFrontier("empty".into()));
    }
    for w in frontier.windows(2) {
        if !(w[0].primary > w[1].primary && w[0].net < w[1].net) {
            return Err(Error::MalformedFrontier(
                "expected strictly decreasing own payoff and increasing net".into(),
            ));
        }
    }
    Ok(())
}

/// Core interval update from one observed frontier pick.
///
/// The observed strategy at frontier position `p` implies a sacrifice of
/// `primary[0] - primary[p]`, bounded above by the sacrifice the next
/// frontier point would have required (infinite past the end, clamped to
/// `delta_max`). Disjoint evidence replaces the interval and flags a change;
/// consistent evidence intersects it.
fn update_interval<F: Scalar>(
    interval: BoundInterval<F>,
    frontier: &[FrontierPoint<F>],
    observed_index: usize,
    delta_max: F,
) -> Result<(BoundInterval<F>, bool)> {
    validate_frontier(frontier)?;
    let pos = frontier
        .iter()
        .position(|p| p.index == observed_index)
        .ok_or(Error::ObservedOffFrontier(observed_index))?;
    let top = frontier[0].primary;
    let lower = top - frontier[pos].primary;
    let upper = if pos + 1 < frontier.len() {
        (top - frontier[pos + 1].primary).min(delta_max)
    } else {
        delta_max
    };
    if lower >= interval.upper || upper <= interval.lower {
        Ok((BoundInterval { lower, upper }, true))
    } else {
        Ok((
            BoundInterval {
                lower: lower.max(interval.lower),
                upper: upper.min(interval.upper),
            },
            false,
        ))
    }
}

/// Leader-side update: refine bounds on the follower's trust level from its
/// observed column pick. `frontier` is the Pareto frontier of the realized
/// row in (follower payoff, net payoff), `observed_index` the column played.
pub fn leader_update_bounds<F: Scalar>(
    interval: BoundInterval<F>,
    frontier: &[FrontierPoint<F>],
    observed_index: usize,
    delta_max: F,
) -> Result<(BoundInterval<F>, bool)> {
    update_interval(interval, frontier, observed_index, delta_max)
}

/// Follower-side update: refine bounds on the leader's trust level from its
/// observed row pick. `frontier` is the Pareto frontier in (leader payoff,
/// net payoff) of the single-column game the leader anticipated,
/// `observed_index` the row played. Same arithmetic as the leader update
/// with leader payoffs in place of follower payoffs.
pub fn follower_update_bounds<F: Scalar>(
    interval: BoundInterval<F>,
    leader_frontier: &[FrontierPoint<F>],
    observed_leader_row: usize,
    delta_max: F,
) -> Result<(BoundInterval<F>, bool)> {
    update_interval(interval, leader_frontier, observed_leader_row, delta_max)
}

/// Frontier of one leader row in (follower payoff, net payoff), the view the
/// leader uses to read the follower's response.
pub fn follower_response_frontier<F: Scalar>(
    game: &BimatrixGame<F>,
    leader_row: usize,
) -> Vec<FrontierPoint<F>> {
    let pts: Vec<(F, F)> = (0..game.cols())
        .map(|j| {
            let b = game.follower_payoff(leader_row, j);
            (b, game.leader_payoff(leader_row, j) + b)
        })
        .collect();
    pareto_frontier(&pts)
}

/// Frontier the follower uses to read the leader's row pick: for every row,
/// the response the leader anticipated given its estimate of the follower's
/// trust level, scored in (leader payoff, net payoff).
pub fn induced_leader_frontier<F: Scalar>(
    game: &BimatrixGame<F>,
    leader_estimate_of_follower: TrustLevel<F>,
) -> Vec<FrontierPoint<F>> {
    let pts: Vec<(F, F)> = (0..game.rows())
        .map(|s| {
            let j = follower_ltse_response(game, s, leader_estimate_of_follower);
            let a = game.leader_payoff(s, j);
            (a, a + game.follower_payoff(s, j))
        })
        .collect();
    pareto_frontier(&pts)
}

/// One past game in which a neighbor led and we responded.
#[derive(Debug, Clone)]
pub struct FollowedGame<F> {
    pub game: BimatrixGame<F>,
    pub leader_row: usize,
    pub my_response: usize,
}

/// Replay the interval updates a neighbor must have made about our own trust
/// level from a shared history of games it led. Both sides see the same
/// games, so the result is exactly the interval the neighbor holds.
pub fn reconstruct_my_estimate_in_their_eyes<F: Scalar>(
    history: &[FollowedGame<F>],
    delta_max: F,
) -> Result<BoundInterval<F>> {
    let mut interval = BoundInterval::initial(delta_max);
    for h in history {
        let frontier = follower_response_frontier(&h.game, h.leader_row);
        let (next, _) = leader_update_bounds(interval, &frontier, h.my_response, delta_max)?;
        interval = next;
    }
    Ok(interval)
}

/// Multi-armed bandit policy deciding how many invitation slots to exploit
/// versus explore each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExplorationPolicy {
    /// Each slot explores independently with probability `epsilon`.
    EpsilonGreedy { epsilon: f64 },
    /// All slots explore for the first `epsilon * horizon` rounds, then all
    /// exploit.
    EpsilonFirst { epsilon: f64, horizon: u64 },
    /// Per-slot exploration probability `min(1, scale / t)`, fading as
    /// knowledge accrues.
    EpsilonDecreasing { scale: f64 },
}

impl Default for ExplorationPolicy {
    fn default() -> Self {
        ExplorationPolicy::EpsilonDecreasing { scale: 5.0 }
    }
}

impl ExplorationPolicy {
    /// Per-slot exploration probability at round `t` (1-based).
    pub fn explore_probability(&self, t: u64) -> f64 {
        match *self {
            ExplorationPolicy::EpsilonGreedy { epsilon } => epsilon,
            ExplorationPolicy::EpsilonFirst { epsilon, horizon } => {
                let cutoff = (epsilon * horizon as f64).floor() as u64;
                if t <= cutoff {
                    1.0
                } else {
                    0.0
                }
            }
            ExplorationPolicy::EpsilonDecreasing { scale } => (scale / t as f64).min(1.0),
        }
    }
}

/// What an agent knows about one neighbor when scheduling a round.
#[derive(Debug, Clone, Copy)]
pub struct NeighborProspect {
    pub id: usize,
    /// Estimated own utility from leading a game against this neighbor.
    pub my_utility: f64,
    /// Estimated trust level of this neighbor; breaks utility ties (a tie
    /// means the sample set cannot separate the levels and higher trust is
    /// weakly better).
    pub delta: f64,
    /// Whether the neighbor is expected to accept an invitation.
    pub acceptable: bool,
    /// Width of the trust-level interval held for this neighbor.
    pub interval_width: f64,
    pub recently_changed: bool,
}

/// Invitation slots split between exploitation and exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSchedule {
    pub exploit: Vec<usize>,
    pub explore: Vec<usize>,
}

/// Rounds after a detected trust change during which at least one slot is
/// reserved for exploration.
pub const CHANGE_RECENCY_WINDOW: u64 = 10;

const EXPLORE_WEIGHT_FLOOR: f64 = 1e-6;

/// Split an agent's invitation budget between the best-estimate neighbors
/// and exploration draws weighted by interval width.
pub fn schedule_round<R: Rng>(
    prospects: &[NeighborProspect],
    budget: usize,
    policy: ExplorationPolicy,
    round: u64,
    rng: &mut R,
) -> RoundSchedule {
    let budget = budget.min(prospects.len());
    if budget == 0 {
        return RoundSchedule { exploit: vec![], explore: vec![] };
    }
    let p = policy.explore_probability(round.max(1));
    let mut explore_slots = (0..budget).filter(|_| rng.gen::<f64>() < p).count();
    if prospects.iter().any(|n| n.recently_changed) {
        explore_slots = explore_slots.max(1);
    }
    let exploit_slots = budget - explore_slots;

    let mut viable: Vec<&NeighborProspect> = prospects
        .iter()
        .filter(|n| n.acceptable && n.my_utility >= 0.0)
        .collect();
    viable.sort_by(|x, y| {
        y.my_utility
            .partial_cmp(&x.my_utility)
            .unwrap()
            .then(y.delta.partial_cmp(&x.delta).unwrap())
            .then(x.id.cmp(&y.id))
    });
    let exploit: Vec<usize> = viable.iter().take(exploit_slots).map(|n| n.id).collect();

    // exploration favors the widest intervals; floor keeps support full
    let mut pool: Vec<&NeighborProspect> = prospects
        .iter()
        .filter(|n| n.acceptable && !exploit.contains(&n.id))
        .collect();
    let mut explore = Vec::new();
    let want = budget - exploit.len();
    while explore.len() < want && !pool.is_empty() {
        let total: f64 = pool.iter().map(|n| n.interval_width + EXPLORE_WEIGHT_FLOOR).sum();
        let mut draw = rng.gen::<f64>() * total;
        let mut pick = pool.len() - 1;
        for (idx, n) in pool.iter().enumerate() {
            draw -= n.interval_width + EXPLORE_WEIGHT_FLOOR;
            if draw <= 0.0 {
                pick = idx;
                break;
            }
        }
        explore.push(pool.remove(pick).id);
    }
    RoundSchedule { exploit, explore }
}

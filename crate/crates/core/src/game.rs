//! Single 2-player leader-follower games and their limited-trust solutions.
//!
//! A limited-trust player is willing to sacrifice up to `delta` of its own
//! payoff, relative to its greedy best response, whenever doing so raises the
//! combined payoff of both players. The solver below computes the resulting
//! equilibrium for a bimatrix game: the follower's constrained net-utility
//! maximization per leader row, then the leader's constrained row choice.

use num_traits::Float;

use crate::error::{Error, Result};

/// Scalar type the game math is generic over.
pub trait Scalar: Float + std::fmt::Debug {}
impl<T> Scalar for T where T: Float + std::fmt::Debug {}

/// Payoff matrices for one leader-follower interaction.
///
/// `a` holds the leader's payoffs, `b` the follower's, both `rows x cols`
/// row-major. The leader picks a row, the follower a column.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame<F> {
    rows: usize,
    cols: usize,
    a: Vec<F>,
    b: Vec<F>,
}

impl<F: Scalar> BimatrixGame<F> {
    pub fn new(rows: usize, cols: usize, a: Vec<F>, b: Vec<F>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame("empty payoff matrix".into()));
        }
        if a.len() != rows * cols || b.len() != rows * cols {
            return Err(Error::InvalidGame(format!(
                "payoff vectors must have {} entries",
                rows * cols
            )));
        }
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidGame("non-finite payoff entry".into()));
        }
        Ok(Self { rows, cols, a, b })
    }

    /// Construct from nested rows; panics on ragged input.
    pub fn from_rows(a: &[Vec<F>], b: &[Vec<F>]) -> Result<Self> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        if b.len() != rows || a.iter().chain(b.iter()).any(|r| r.len() != cols) {
            return Err(Error::InvalidGame("ragged payoff matrix".into()));
        }
        Self::new(
            rows,
            cols,
            a.iter().flatten().copied().collect(),
            b.iter().flatten().copied().collect(),
        )
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
    pub fn leader_payoff(&self, row: usize, col: usize) -> F {
        self.a[row * self.cols + col]
    }

    #[inline]
    pub fn follower_payoff(&self, row: usize, col: usize) -> F {
        self.b[row * self.cols + col]
    }
}

/// A player's trust level: the maximum payoff it will sacrifice, relative to
/// its greedy best response, to raise the combined payoff.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TrustLevel<F>(F);

impl<F: Scalar> TrustLevel<F> {
    pub fn new(delta: F) -> Result<Self> {
        if !(delta >= F::zero()) {
            return Err(Error::InvalidTrustLevel(format!("{delta:?} < 0")));
        }
        Ok(Self(delta))
    }

    pub fn zero() -> Self {
        Self(F::zero())
    }

    #[inline]
    pub fn value(self) -> F {
        self.0
    }
}

/// Equilibrium strategies and realized payoffs of one solved game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtseOutcome<F> {
    pub leader_strategy: usize,
    pub follower_strategy: usize,
    pub leader_utility: F,
    pub follower_utility: F,
}

/// The follower's greedy best response to a leader row: the column maximizing
/// the follower's own payoff, ties to the lowest column index.
pub fn greedy_follower_response<F: Scalar>(game: &BimatrixGame<F>, leader_strategy: usize) -> usize {
    assert!(leader_strategy < game.rows(), "leader strategy out of range");
    let mut best = 0;
    for j in 1..game.cols() {
        if game.follower_payoff(leader_strategy, j) > game.follower_payoff(leader_strategy, best) {
            best = j;
        }
    }
    best
}

/// The follower's limited-trust best response to a leader row.
///
/// Maximizes combined payoff over the columns whose sacrifice relative to the
/// greedy response stays within `delta2`. Among combined-payoff ties prefers
/// the higher own payoff, then the lowest column index. The greedy column is
/// always feasible, so a response always exists.
pub fn follower_ltse_response<F: Scalar>(
    game: &BimatrixGame<F>,
    leader_strategy: usize,
    delta2: TrustLevel<F>,
) -> usize {
    assert!(leader_strategy < game.rows(), "leader strategy out of range");
    let greedy = greedy_follower_response(game, leader_strategy);
    let greedy_b = game.follower_payoff(leader_strategy, greedy);
    let mut best: Option<(F, F, usize)> = None;
    for j in 0..game.cols() {
        let b = game.follower_payoff(leader_strategy, j);
        if greedy_b - b > delta2.value() {
            continue;
        }
        let net = game.leader_payoff(leader_strategy, j) + b;
        let better = match best {
            None => true,
            Some((bn, bb, _)) => net > bn || (net == bn && b > bb),
        };
        if better {
            best = Some((net, b, j));
        }
    }
    best.expect("greedy column is always feasible").2
}

/// The leader's limited-trust strategy and the full equilibrium outcome.
///
/// Anticipating the follower's limited-trust response per row, the leader
/// maximizes combined payoff over the rows whose own-payoff sacrifice
/// relative to its greedy best row stays within `delta1`. Ties prefer the
/// higher own payoff, then the lowest row index.
pub fn leader_ltse_strategy<F: Scalar>(
    game: &BimatrixGame<F>,
    delta1: TrustLevel<F>,
    delta2: TrustLevel<F>,
) -> LtseOutcome<F> {
    let responses: Vec<usize> = (0..game.rows())
        .map(|s| follower_ltse_response(game, s, delta2))
        .collect();
    let mut greedy_value = F::neg_infinity();
    for s in 0..game.rows() {
        let a = game.leader_payoff(s, responses[s]);
        if a > greedy_value {
            greedy_value = a;
        }
    }
    let mut best: Option<(F, F, usize)> = None;
    for s in 0..game.rows() {
        let a = game.leader_payoff(s, responses[s]);
        if greedy_value - a > delta1.value() {
            continue;
        }
        let net = a + game.follower_payoff(s, responses[s]);
        let better = match best {
            None => true,
            Some((bn, ba, _)) => net > bn || (net == bn && a > ba),
        };
        if better {
            best = Some((net, a, s));
        }
    }
    let (_, _, s) = best.expect("greedy row is always feasible");
    let j = responses[s];
    LtseOutcome {
        leader_strategy: s,
        follower_strategy: j,
        leader_utility: game.leader_payoff(s, j),
        follower_utility: game.follower_payoff(s, j),
    }
}

/// One non-dominated strategy in the (own payoff, combined payoff) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint<F> {
    /// The observed player's own payoff at this strategy.
    pub primary: F,
    /// Combined payoff of both players at this strategy.
    pub net: F,
    /// Index of the strategy in the original game.
    pub index: usize,
}

/// Maximal points of `(primary, net)` under coordinate-wise dominance,
/// ordered so `primary` strictly decreases (and thus `net` strictly
/// increases). Exact duplicates collapse to the lowest original index.
pub fn pareto_frontier<F: Scalar>(points: &[(F, F)]) -> Vec<FrontierPoint<F>> {
    assert!(!points.is_empty(), "frontier of an empty strategy set");
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (pi, ni) = points[i];
        let (pj, nj) = points[j];
        pj.partial_cmp(&pi)
            .unwrap()
            .then(nj.partial_cmp(&ni).unwrap())
            .then(i.cmp(&j))
    });
    let mut frontier = Vec::new();
    let mut best_net = F::neg_infinity();
    for &i in &order {
        let (primary, net) = points[i];
        if net > best_net {
            frontier.push(FrontierPoint { primary, net, index: i });
            best_net = net;
        }
    }
    frontier
}

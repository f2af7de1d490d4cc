//! Acceptance suite: one test per headline result or property the engine is
//! expected to reproduce, each printing a single `criterion N: PASS`/`FAIL`
//! line with the measured numbers (visible with `--nocapture`). A failing
//! criterion panics with the same line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trustnet_core::config::NetworkSource;
use trustnet_core::experiment::{preset, rates_sweep, run_experiment, RatesConfig};
use trustnet_core::game::{
    follower_ltse_response, greedy_follower_response, leader_ltse_strategy, BimatrixGame,
    LtseOutcome, TrustLevel,
};
use trustnet_core::learn::{follower_response_frontier, leader_update_bounds, BoundInterval};
use trustnet_core::meta::{
    run_dynamics, DynamicsConfig, DynamicsRecord, KnowledgeMode, UpdateSchedule,
};
use trustnet_core::net::{
    expected_following_count, play_round, uniform_agents, AgentState, EntryLaw, GameDistribution,
    MonteCarloEstimator, SocialNetwork, TieRule,
};
use trustnet_core::rates::{
    estimate_discovery_probabilities, theorem3_bound, DiscoveryProbabilities,
};

/// Collects labelled sub-checks for one criterion and emits a single
/// PASS/FAIL line.
struct Criterion {
    name: &'static str,
    details: Vec<String>,
    failed: bool,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion { name, details: Vec::new(), failed: false }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if ok {
            self.details.push(detail);
        } else {
            self.failed = true;
            self.details.push(format!("{detail} [FAILED]"));
        }
    }

    fn finish(self) {
        let status = if self.failed { "FAIL" } else { "PASS" };
        let line = format!("{}: {status} — {}", self.name, self.details.join("; "));
        println!("{line}");
        assert!(!self.failed, "{line}");
    }
}

fn within(measured: f64, target: f64, tol: f64) -> bool {
    (measured - target).abs() <= tol * target.abs()
}

fn exp_mean2(rows: usize, cols: usize) -> GameDistribution {
    GameDistribution::new(rows, cols, EntryLaw::ExponentialMean(2.0)).unwrap()
}

/// Per-agent average utility per round over a whole record, in label order.
fn per_agent_means(record: &DynamicsRecord, agents: usize) -> Vec<f64> {
    let rounds = record.rounds.len() as f64;
    (0..agents)
        .map(|i| record.rounds.iter().map(|r| r.utility(i)).sum::<f64>() / rounds)
        .collect()
}

#[test]
fn criterion_01_table_i() {
    let mut c = Criterion::new("criterion 1 (Table I, example network)");
    let seeds: Vec<u64> = (1..=5).collect();
    let mut d0 = 0.0;
    let mut d2 = 0.0;
    let mut a7 = 0.0;
    for &seed in &seeds {
        d0 += run_experiment(&preset("table1_delta0", seed).unwrap()).unwrap().summary.avg_utility;
        d2 += run_experiment(&preset("table1_delta2", seed).unwrap()).unwrap().summary.avg_utility;
        let b = run_experiment(&preset("table1_agent7", seed).unwrap()).unwrap();
        let id = b.net.id_of_label(7).unwrap();
        a7 += per_agent_means(&b.record, 7)[id];
    }
    let n = seeds.len() as f64;
    let (d0, d2, a7) = (d0 / n, d2 / n, a7 / n);
    c.check(within(d0, 12.012, 0.03), format!("all-δ=0 avg {d0:.3} vs 12.012±3%"));
    c.check(within(d2, 13.749, 0.03), format!("all-δ=2 avg {d2:.3} vs 13.749±3%"));
    c.check(within(a7, 18.025, 0.05), format!("agent 7 at δ₇=0.01 avg {a7:.3} vs 18.025±5%"));
    c.check(a7 >= 1.2 * 14.338, format!("agent 7 {a7:.3} ≥ 20% above selfish 14.338"));
    c.finish();
}

/// Expected Table III interaction patterns, as vertex labels.
struct Table3 {
    deltas: [f64; 7],
    invites: [&'static [u64]; 7],
    invited_by: [&'static [u64]; 7],
    utilities: [f64; 7],
    average: f64,
    preset: &'static str,
}

fn table3_variants() -> [Table3; 2] {
    let da: Vec<f64> = (1..=7).map(|i| 2.0 * (i as f64 - 1.0) / 3.0).collect();
    let db: Vec<f64> = (1..=7).map(|i| 2.0 * (7.0 - i as f64) / 3.0).collect();
    [
        Table3 {
            deltas: da.try_into().unwrap(),
            invites: [&[5, 7], &[4, 5], &[5, 7], &[6, 7], &[3, 4], &[4, 7], &[4, 6]],
            invited_by: [&[], &[], &[5], &[2, 5, 6, 7], &[1, 2, 3], &[4, 7], &[1, 3, 4, 6]],
            utilities: [7.750, 7.360, 11.040, 21.064, 15.193, 13.754, 18.931],
            average: 13.591,
            preset: "table3_a",
        },
        Table3 {
            deltas: db.try_into().unwrap(),
            invites: [&[2, 5], &[1, 3], &[2, 5], &[2, 5], &[1, 2], &[4, 7], &[1, 3]],
            invited_by: [&[2, 5, 7], &[1, 3, 4, 5], &[2, 7], &[6], &[1, 3, 4], &[], &[6]],
            utilities: [15.559, 20.446, 12.859, 9.960, 18.059, 6.607, 11.244],
            average: 13.559,
            preset: "table3_b",
        },
    ]
}

#[test]
fn criterion_02_table_iii() {
    let mut c = Criterion::new("criterion 2 (Table III, example network)");
    let net = SocialNetwork::example7();
    let dist = exp_mean2(2, 2);
    for variant in table3_variants() {
        // interaction sets from one round under a large-sample estimator
        let estimator = MonteCarloEstimator::new(&dist, 200_000, 424_242);
        let agents: Vec<AgentState> = (0..7)
            .map(|i| {
                AgentState::new(i, TrustLevel::new(variant.deltas[i]).unwrap(), 2.min(net.degree(i)))
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = play_round(&net, &agents, &dist, &estimator, TieRule::Lexicographic, 0, &mut rng);
        let to_labels = |ids: &[usize]| -> Vec<u64> {
            let mut v: Vec<u64> = ids.iter().map(|&j| net.label(j)).collect();
            v.sort_unstable();
            v
        };
        let mut sets_ok = true;
        for i in 0..7 {
            if to_labels(&rec.invites[i]) != variant.invites[i]
                || to_labels(&rec.invited_by[i]) != variant.invited_by[i]
            {
                sets_ok = false;
            }
        }
        c.check(sets_ok, format!("{}: invites/invited-by sets match exactly", variant.preset));

        // utilities from simulated rounds, averaged over seeds
        let seeds = [1u64, 2, 3];
        let mut means = vec![0.0; 7];
        for &seed in &seeds {
            let b = run_experiment(&preset(variant.preset, seed).unwrap()).unwrap();
            for (m, x) in means.iter_mut().zip(per_agent_means(&b.record, 7)) {
                *m += x / seeds.len() as f64;
            }
        }
        let worst = (0..7)
            .map(|i| (means[i] - variant.utilities[i]).abs() / variant.utilities[i])
            .fold(0.0f64, f64::max);
        c.check(
            worst <= 0.05,
            format!("{}: per-agent utilities within 5% (worst dev {:.1}%)", variant.preset, 100.0 * worst),
        );
        let avg = means.iter().sum::<f64>() / 7.0;
        c.check(
            within(avg, variant.average, 0.03),
            format!("{}: average {:.3} vs {}±3%", variant.preset, avg, variant.average),
        );
    }
    c.finish();
}

#[test]
fn criterion_03_following_count() {
    let mut c = Criterion::new("criterion 3 (expected following count, node 7)");
    let net = SocialNetwork::example7();
    let budgets: Vec<usize> = (0..7).map(|i| 2.min(net.degree(i))).collect();
    let id7 = net.id_of_label(7).unwrap();
    let exact = expected_following_count(&net, id7, &budgets);
    // neighbors of 7 are 1, 3, 4, 6 with degrees 3, 3, 4, 2
    let expected = 2.0 / 3.0 + 2.0 / 3.0 + 2.0 / 4.0 + 2.0 / 2.0;
    c.check(
        exact == expected && (exact - 17.0 / 6.0).abs() < 1e-12,
        format!("exact value {exact} = 17/6"),
    );

    let dist = exp_mean2(2, 2);
    let estimator = MonteCarloEstimator::new(&dist, 1000, 55);
    let agents = uniform_agents(&net, 0.0, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rounds = 10_000u64;
    let mut followed = 0usize;
    for t in 0..rounds {
        let rec = play_round(&net, &agents, &dist, &estimator, TieRule::UniformRandom, t, &mut rng);
        followed += rec.invited_by[id7].len();
    }
    let emp = followed as f64 / rounds as f64;
    c.check(
        within(emp, 17.0 / 6.0, 0.02),
        format!("empirical {emp:.4} vs 17/6 ≈ 2.8333 ±2% over 10⁴ uniform-tie rounds"),
    );
    c.finish();
}

#[test]
fn criterion_04_zkc_baselines() {
    let mut c = Criterion::new("criterion 4 (Karate Club baselines)");
    let run = |name: &str| run_experiment(&preset(name, 1).unwrap()).unwrap().summary.avg_utility;
    let d0 = run("zkc_delta0");
    // Note: 22.792 is inconsistent with exact accounting — 67 accepted games
    // per round at ≈12.02 total payoff each over 34 agents gives ≈23.68;
    // the simulation reproduces the accounting value, not the published one.
    c.check(within(d0, 22.792, 0.03), format!("fixed δ=0 avg {d0:.3} vs 22.792±3%"));
    let kr = run("zkc_known_random");
    c.check(within(kr, 27.578, 0.04), format!("known synchronous avg {kr:.3} vs 27.578±4%"));
    let el = run("zkc_epoch_learned");
    c.check(within(el, 27.540, 0.04), format!("epoch(100) learned avg {el:.3} vs 27.540±4%"));
    let pl = run("zkc_prob_learned");
    c.check(within(pl, 27.747, 0.04), format!("probabilistic(0.01) learned avg {pl:.3} vs 27.747±4%"));
    c.finish();
}

#[test]
fn criterion_05a_uniform_ties_plateau() {
    let mut c = Criterion::new("criterion 5a (ZKC uniform ties: δ_max plateau)");
    let b = run_experiment(&preset("zkc_known_random", 1).unwrap()).unwrap();
    let rounds = b.record.rounds.len();
    let qualifying = (101..rounds)
        .filter(|&t| b.record.fraction_at(t, 30.0) >= 0.6)
        .count() as f64
        / (rounds - 101) as f64;
    c.check(
        qualifying >= 0.8,
        format!("≥60% of agents at δ=30 in {:.1}% of rounds after round 100 (need ≥80%)", 100.0 * qualifying),
    );
    c.finish();
}

/// Count completed rise (mean δ > 25) then collapse (mean δ < 5) cycles.
fn count_cycles(record: &DynamicsRecord) -> usize {
    let mut above = false;
    let mut cycles = 0;
    for r in &record.rounds {
        let m = r.mean_delta();
        if !above && m > 25.0 {
            above = true;
        } else if above && m < 5.0 {
            cycles += 1;
            above = false;
        }
    }
    cycles
}

#[test]
fn criterion_05b_lexicographic_cycles() {
    let mut c = Criterion::new("criterion 5b (ZKC lexicographic ties: rise-collapse cycles)");
    let b = run_experiment(&preset("zkc_known_lex", 1).unwrap()).unwrap();
    let cycles = count_cycles(&b.record);
    c.check(cycles >= 2, format!("{cycles} full >25/<5 cycles in 500 rounds (need ≥2)"));
    c.finish();
}

#[test]
fn criterion_05c_leader_seeding() {
    let mut c = Criterion::new("criterion 5c (ZKC lexicographic ties: leader seeding)");
    let unseeded = run_experiment(&preset("zkc_known_lex", 1).unwrap()).unwrap();
    let seeded = run_experiment(&preset("zkc_known_lex_seeded", 1).unwrap()).unwrap();
    let min_mean = seeded.record.rounds[100..]
        .iter()
        .map(|r| r.mean_delta())
        .fold(f64::INFINITY, f64::min);
    c.check(
        min_mean >= 10.0,
        format!("seeded min mean δ after warmup {min_mean:.2} (need ≥10: collapses eliminated)"),
    );
    let gap = seeded.summary.avg_utility - unseeded.summary.avg_utility;
    // Note: the seeded average (≈26.8) lands on the published 26.884, but the
    // unseeded cycling run here is worth ≈27.5 rather than the published
    // 26.535, so the improvement does not materialize; see the δ=0 baseline
    // note in criterion 4 for the same low-δ utility discrepancy.
    c.check(
        gap > 0.0 && (gap - 0.349).abs() <= 0.5 * 0.349,
        format!(
            "utility gap {gap:+.3} ({:.3} → {:.3}) vs published +0.349 ±50%",
            unseeded.summary.avg_utility, seeded.summary.avg_utility
        ),
    );
    c.finish();
}

#[test]
fn criterion_06_degenerate_networks() {
    let mut c = Criterion::new("criterion 6 (star and diad fixed points)");
    let dist = exp_mean2(2, 2);
    let mut all_zero_from_round_2 = |net: &SocialNetwork, budget: usize, tag: &str| {
        let mut cfg =
            DynamicsConfig::new(budget, UpdateSchedule::Synchronous, KnowledgeMode::Known, 11);
        cfg.rounds = 6;
        cfg.initial_delta = 30.0;
        let rec = run_dynamics(net, &dist, &cfg);
        let ok = rec.rounds[2..].iter().all(|r| r.deltas.iter().all(|&d| d == 0.0));
        c.check(ok, format!("{tag}: all δ exactly 0 from round 2 onward (start δ=30)"));
    };
    // center budget 5 ≥ 5 leaves: every leaf is invited without competing
    all_zero_from_round_2(&SocialNetwork::star(5), 5, "star(5), k=5");
    all_zero_from_round_2(&SocialNetwork::diad(), 1, "diad, k=1");
    c.finish();
}

#[test]
fn criterion_07_learning_soundness() {
    let mut c = Criterion::new("criterion 7 (Algorithm 1 soundness and change detection)");
    let dist = exp_mean2(2, 3);
    let delta_max = 30.0;
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    let mut containment_violations = 0usize;
    let mut width_growths = 0usize;
    let mut spurious_flags = 0usize;
    let sequences = 100_000usize;
    for _ in 0..sequences {
        let hidden = rng.gen_range(0.0..delta_max);
        let trust = TrustLevel::new(hidden).unwrap();
        let mut interval = BoundInterval::initial(delta_max);
        for _ in 0..3 {
            let game = dist.sample_game(&mut rng);
            let row = rng.gen_range(0..game.rows());
            let response = follower_ltse_response(&game, row, trust);
            let frontier = follower_response_frontier(&game, row);
            let (next, changed) =
                leader_update_bounds(interval, &frontier, response, delta_max).unwrap();
            spurious_flags += changed as usize;
            width_growths += (next.width() > interval.width() + 1e-12) as usize;
            containment_violations += (!next.contains(hidden)) as usize;
            interval = next;
        }
    }
    c.check(
        containment_violations == 0,
        format!("true δ contained in all {sequences} sequences ({containment_violations} violations)"),
    );
    c.check(width_growths == 0, format!("widths non-increasing ({width_growths} growths)"));
    c.check(spurious_flags == 0, format!("no change flags under fixed δ ({spurious_flags} spurious)"));

    // Inject a δ change after the interval has tightened: the change flag
    // must fire exactly at the first observation inconsistent with the
    // maintained interval.
    let mut missed = 0usize;
    let mut premature = 0usize;
    let mut detected = 0usize;
    for _ in 0..10_000 {
        let old = TrustLevel::new(rng.gen_range(0.0..10.0)).unwrap();
        let new = TrustLevel::new(rng.gen_range(10.0..delta_max)).unwrap();
        let mut interval = BoundInterval::initial(delta_max);
        for _ in 0..10 {
            let game = dist.sample_game(&mut rng);
            let row = rng.gen_range(0..game.rows());
            let response = follower_ltse_response(&game, row, old);
            let frontier = follower_response_frontier(&game, row);
            interval = leader_update_bounds(interval, &frontier, response, delta_max).unwrap().0;
        }
        for _ in 0..50 {
            let game = dist.sample_game(&mut rng);
            let row = rng.gen_range(0..game.rows());
            let response = follower_ltse_response(&game, row, new);
            let frontier = follower_response_frontier(&game, row);
            // implied bounds of this observation alone
            let pos = frontier.iter().position(|p| p.index == response).unwrap();
            let lower = frontier[0].primary - frontier[pos].primary;
            let upper = if pos + 1 < frontier.len() {
                (frontier[0].primary - frontier[pos + 1].primary).min(delta_max)
            } else {
                delta_max
            };
            let inconsistent = lower >= interval.upper() || upper <= interval.lower();
            let (next, changed) =
                leader_update_bounds(interval, &frontier, response, delta_max).unwrap();
            match (inconsistent, changed) {
                (true, true) => {
                    detected += 1;
                    break;
                }
                (true, false) => {
                    missed += 1;
                    break;
                }
                (false, true) => premature += 1,
                (false, false) => {}
            }
            interval = next;
        }
    }
    c.check(
        missed == 0 && premature == 0,
        format!("injected changes flagged at the first inconsistent game ({detected} detected, {missed} missed, {premature} premature)"),
    );
    c.finish();
}

/// Independent exhaustive-enumeration oracle for the limited-trust
/// Stackelberg outcome, built from explicit feasible-set lists.
fn oracle_ltse(game: &BimatrixGame<f64>, d1: f64, d2: f64) -> LtseOutcome<f64> {
    let respond = |row: usize| -> usize {
        let payoffs: Vec<f64> = (0..game.cols()).map(|j| game.follower_payoff(row, j)).collect();
        let greedy = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let feasible: Vec<usize> =
            (0..game.cols()).filter(|&j| greedy - payoffs[j] <= d2).collect();
        *feasible
            .iter()
            .max_by(|&&x, &&y| {
                let key = |j: usize| (game.leader_payoff(row, j) + payoffs[j], payoffs[j]);
                let (nx, bx) = key(x);
                let (ny, by) = key(y);
                // max_by keeps the LAST maximal element; iterate ascending and
                // invert the index comparison so the lowest index wins ties
                nx.partial_cmp(&ny).unwrap().then(bx.partial_cmp(&by).unwrap()).then(y.cmp(&x))
            })
            .unwrap()
    };
    let responses: Vec<usize> = (0..game.rows()).map(respond).collect();
    let own: Vec<f64> =
        (0..game.rows()).map(|s| game.leader_payoff(s, responses[s])).collect();
    let greedy = own.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let feasible: Vec<usize> = (0..game.rows()).filter(|&s| greedy - own[s] <= d1).collect();
    let s = *feasible
        .iter()
        .max_by(|&&x, &&y| {
            let key = |s: usize| (own[s] + game.follower_payoff(s, responses[s]), own[s]);
            let (nx, ax) = key(x);
            let (ny, ay) = key(y);
            nx.partial_cmp(&ny).unwrap().then(ax.partial_cmp(&ay).unwrap()).then(y.cmp(&x))
        })
        .unwrap();
    LtseOutcome {
        leader_strategy: s,
        follower_strategy: responses[s],
        leader_utility: own[s],
        follower_utility: game.follower_payoff(s, responses[s]),
    }
}

#[test]
fn criterion_08_ltse_correctness() {
    let mut c = Criterion::new("criterion 8 (equilibrium oracle agreement and monotonicity)");
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let games = 10_000usize;
    let mut oracle_mismatches = 0usize;
    let mut reduction_mismatches = 0usize;
    let mut monotonicity_violations = 0usize;
    for g in 0..games {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let dist = if g % 2 == 0 {
            exp_mean2(rows, cols)
        } else {
            GameDistribution::new(rows, cols, EntryLaw::Uniform(0.0, 10.0)).unwrap()
        };
        let game = dist.sample_game(&mut rng);

        for _ in 0..3 {
            let d1 = 0.5 * rng.gen_range(0..=10) as f64;
            let d2 = 0.5 * rng.gen_range(0..=10) as f64;
            let got = leader_ltse_strategy(
                &game,
                TrustLevel::new(d1).unwrap(),
                TrustLevel::new(d2).unwrap(),
            );
            if got != oracle_ltse(&game, d1, d2) {
                oracle_mismatches += 1;
            }
        }

        // δ = 0 reduces to the greedy Stackelberg value
        let zero = leader_ltse_strategy(&game, TrustLevel::zero(), TrustLevel::zero());
        let stackelberg = (0..game.rows())
            .map(|s| game.leader_payoff(s, greedy_follower_response(&game, s)))
            .fold(f64::NEG_INFINITY, f64::max);
        if zero.leader_utility != stackelberg || zero != oracle_ltse(&game, 0.0, 0.0) {
            reduction_mismatches += 1;
        }

        // fixed-game sweep in δ₁: follower utility and net non-decreasing,
        // leader utility non-increasing
        let d2 = TrustLevel::new(rng.gen_range(0.0..5.0)).unwrap();
        let mut prev: Option<LtseOutcome<f64>> = None;
        for step in 0..=30 {
            let out = leader_ltse_strategy(&game, TrustLevel::new(step as f64).unwrap(), d2);
            if let Some(p) = prev {
                let eps = 1e-9;
                if out.follower_utility < p.follower_utility - eps
                    || out.leader_utility > p.leader_utility + eps
                    || out.leader_utility + out.follower_utility
                        < p.leader_utility + p.follower_utility - eps
                {
                    monotonicity_violations += 1;
                }
            }
            prev = Some(out);
        }
    }
    c.check(
        oracle_mismatches == 0,
        format!("oracle agreement on {games} games × 3 δ pairs ({oracle_mismatches} mismatches)"),
    );
    c.check(
        reduction_mismatches == 0,
        format!("δ=0 Stackelberg reduction ({reduction_mismatches} mismatches)"),
    );
    c.check(
        monotonicity_violations == 0,
        format!("monotone in δ₁ on {games} sweeps ({monotonicity_violations} violations)"),
    );
    c.finish();
}

#[test]
fn criterion_09_discovery_rates() {
    let mut c = Criterion::new("criterion 9 (bound-discovery rates)");
    let cfg = RatesConfig { seed: 2024, prob_trials: 50_000, time_trials: 2_000 };
    let rows = rates_sweep(&cfg).unwrap();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut bound_ok = true;
    for r in &rows {
        // propagate the probability standard errors through the bound
        let bound_at = |pl: f64, pu: f64, q: f64| {
            theorem3_bound(&DiscoveryProbabilities {
                p_lower: pl.max(1e-12),
                p_upper: pu.max(1e-12),
                p_both: q.clamp(0.0, pl.min(pu)),
                se_lower: 0.0,
                se_upper: 0.0,
                se_both: 0.0,
                trials: cfg.prob_trials,
            })
        };
        let se_q = (r.p_both * (1.0 - r.p_both) / cfg.prob_trials as f64).sqrt();
        let hi = bound_at(r.p_lower - r.se_lower, r.p_upper - r.se_upper, r.p_both + se_q);
        let lo = bound_at(r.p_lower + r.se_lower, r.p_upper + r.se_upper, r.p_both - se_q);
        let bound_se = 0.5 * (hi - lo).abs();
        let slack = 3.0 * r.empirical_se.hypot(bound_se);
        let excess = r.empirical_mean - r.t_bound;
        worst_excess = worst_excess.max(excess - slack);
        if !(r.t_bound.is_finite() && r.censored == 0 && excess <= slack) {
            bound_ok = false;
            c.check(
                false,
                format!(
                    "n={} δ₂={} ε={}: empirical {:.2} vs bound {:.2} (slack {:.2})",
                    r.n, r.delta2, r.epsilon, r.empirical_mean, r.t_bound, slack
                ),
            );
        }
    }
    if bound_ok {
        c.check(
            true,
            format!("empirical ≤ bound within 3 combined SE in all {} cells (worst slack-adjusted excess {worst_excess:.2})", rows.len()),
        );
    }

    let mut probs = Vec::new();
    for &n in &[10usize, 100, 1000] {
        let dist = GameDistribution::new(1, n, EntryLaw::Uniform(0.0, 1.0)).unwrap();
        let p = estimate_discovery_probabilities(
            &dist,
            TrustLevel::new(0.2).unwrap(),
            0.05,
            50_000,
            31 + n as u64,
        )
        .unwrap();
        probs.push(p.p_lower + p.p_upper - p.p_both);
    }
    c.check(
        probs[0] > probs[1] && probs[1] > probs[2],
        format!(
            "discovery probability decreases with n: {:.4} > {:.4} > {:.4} (uniform[0,1], δ₂=0.2, ε=0.05)",
            probs[0], probs[1], probs[2]
        ),
    );
    c.finish();
}

#[test]
fn criterion_10_facebook_optional() {
    let mut c = Criterion::new("criterion 10 (ego-Facebook, optional)");
    let path = ["facebook_combined.txt", "../../facebook_combined.txt"]
        .iter()
        .map(std::path::PathBuf::from)
        .find(|p| p.exists());
    let Some(path) = path else {
        println!("criterion 10 (ego-Facebook, optional): SKIP — facebook_combined.txt not present");
        return;
    };
    let run = |name: &str| {
        let mut cfg = preset(name, 1).unwrap();
        cfg.network = NetworkSource::File(path.clone());
        run_experiment(&cfg).unwrap()
    };
    let d0 = run("facebook_delta0").summary.avg_utility;
    c.check(within(d0, 30.905, 0.03), format!("fixed δ=0 avg {d0:.3} vs 30.905±3%"));
    let known = run("facebook_known");
    c.check(
        within(known.summary.avg_utility, 37.750, 0.04),
        format!("known dynamics avg {:.3} vs 37.750±4%", known.summary.avg_utility),
    );
    let mean_delta: f64 = known.record.rounds[100..]
        .iter()
        .map(|r| r.mean_delta())
        .sum::<f64>()
        / (known.record.rounds.len() - 100) as f64;
    c.check(
        (mean_delta - 25.0).abs() <= 3.0,
        format!("long-run mean δ {mean_delta:.2} vs 25±3"),
    );
    let el = run("facebook_epoch_learned").summary.avg_utility;
    c.check(within(el, 38.297, 0.04), format!("epoch learned avg {el:.3} vs 38.297±4%"));
    c.finish();
}

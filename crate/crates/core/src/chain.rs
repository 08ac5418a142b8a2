//! The classical three-step reduction pipeline: parity games to
//! mean-payoff games, mean-payoff to discounted-payoff games, and
//! discounted-payoff games to simple stochastic games. Kept alongside the
//! direct reduction for correctness cross-checks and for the size
//! comparison between the two routes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::analysis::lasso_decompose;
use crate::arena::{
    enumerate_positional_strategies, size_of, strategy_count, Arena, DiscountFactor, Owner, Player,
    PriorityMap, RewardMap, SizeReport, VertexId,
};
use crate::error::{Error, Result};
use crate::rational::{bit_length, Rational};
use crate::ssg::{Ssg, ValueVector};

/// A 2-player mean-payoff game; the value of a play is the long-run
/// average of the rewards along it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanPayoffGame {
    pub arena: Arena,
    pub rewards: RewardMap,
}

/// A 2-player discounted-payoff game; the value of a play is the
/// normalized discounted sum `(1 - lambda) sum lambda^i r(v_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscountedGame {
    pub arena: Arena,
    pub rewards: RewardMap,
    pub discount: DiscountFactor,
}

/// Same arena, reward `(-1)^p(v) * n^(d - rank(p(v)))` where rank is the
/// 0-based index of `p(v)` among the `d` distinct priorities in ascending
/// order. Lower priorities carry larger magnitudes, so the sign of every
/// simple-cycle sum matches the parity of its minimum priority; Eve wins
/// the parity game from a vertex iff the mean-payoff value there is at
/// least zero.
pub fn parity_to_meanpayoff(arena: &Arena, p: &PriorityMap) -> Result<MeanPayoffGame> {
    arena.require_valid()?;
    arena.require_two_player()?;
    p.require_total_for(arena)?;
    let distinct = p.distinct();
    let d = distinct.len() as u32;
    let n = BigInt::from(arena.num_vertices());
    let rewards = arena
        .vertices()
        .map(|v| {
            let priority = p.priority(v);
            let rank = distinct.binary_search(&priority).expect("own priority") as u32;
            let magnitude = n.pow(d - rank);
            let signed = if priority.is_multiple_of(2) {
                magnitude
            } else {
                -magnitude
            };
            Rational::from_integer(signed)
        })
        .collect();
    Ok(MeanPayoffGame {
        arena: arena.clone(),
        rewards: RewardMap::new(rewards),
    })
}

fn max_min_over_pairs(
    arena: &Arena,
    budget: u128,
    lasso_value: impl Fn(&crate::analysis::LassoDecomposition) -> Rational,
) -> Result<ValueVector> {
    arena.require_valid()?;
    arena.require_two_player()?;
    let pairs =
        strategy_count(arena, Player::Eve).saturating_mul(strategy_count(arena, Player::Adam));
    if pairs > budget {
        return Err(Error::BudgetExceeded { pairs, budget });
    }
    let adam_strategies: Vec<_> = enumerate_positional_strategies(arena, Player::Adam).collect();
    let mut best: Vec<Option<Rational>> = vec![None; arena.num_vertices()];
    for sigma in enumerate_positional_strategies(arena, Player::Eve) {
        let mut worst: Vec<Option<Rational>> = vec![None; arena.num_vertices()];
        for tau in &adam_strategies {
            for v in arena.vertices() {
                let lasso = lasso_decompose(arena, v, &sigma, tau)?;
                let value = lasso_value(&lasso);
                let slot = &mut worst[v.index()];
                if slot.as_ref().is_none_or(|held| value < *held) {
                    *slot = Some(value);
                }
            }
        }
        for (slot, guaranteed) in best.iter_mut().zip(worst) {
            let value = guaranteed.expect("at least one Adam strategy");
            if slot.as_ref().is_none_or(|held| value > *held) {
                *slot = Some(value);
            }
        }
    }
    Ok(ValueVector::new(
        best.into_iter()
            .map(|v| v.expect("at least one pair"))
            .collect(),
    ))
}

/// Optimal mean-payoff values by strategy-pair enumeration: the value of a
/// lasso is the average reward of its cycle.
pub fn solve_meanpayoff_bruteforce(game: &MeanPayoffGame, budget: u128) -> Result<ValueVector> {
    game.rewards.require_total_for(&game.arena)?;
    max_min_over_pairs(&game.arena, budget, |lasso| {
        let total: Rational = lasso
            .cycle
            .iter()
            .fold(Rational::zero(), |acc, &v| acc + game.rewards.reward(v));
        total / Rational::from_integer(BigInt::from(lasso.cycle.len()))
    })
}

/// Same arena and rewards with discount factor `1 - 1/(4 n^3 B)` where `B`
/// bounds the absolute integer rewards. The factor is close enough to one
/// that nonzero mean-payoff values keep their sign under discounting, so
/// the two games agree on the at-least-zero threshold at every vertex.
pub fn meanpayoff_to_discounted(game: &MeanPayoffGame) -> Result<DiscountedGame> {
    game.rewards.require_total_for(&game.arena)?;
    if !game.rewards.all_integer() {
        return Err(Error::NonIntegerRewards);
    }
    let n = Rational::from_integer(BigInt::from(game.arena.num_vertices()));
    let bound = game.rewards.magnitude_bound().max(Rational::one());
    let scale = Rational::from_integer(BigInt::from(4)) * &n * &n * &n * bound;
    let lambda = Rational::one() - scale.recip();
    Ok(DiscountedGame {
        arena: game.arena.clone(),
        rewards: game.rewards.clone(),
        discount: DiscountFactor::new(lambda)?,
    })
}

/// Exact discounted value of a lasso: the discounted prefix plus the
/// geometric sum of one cycle round,
/// `(1-l) sum_{i<len(path)} l^i r + l^len(path) (1-l) S_c / (1 - l^q)`.
pub fn discounted_lasso_value(
    lasso: &crate::analysis::LassoDecomposition,
    rewards: &RewardMap,
    lambda: &Rational,
) -> Rational {
    let one = Rational::one();
    let mut power = one.clone();
    let mut prefix = Rational::zero();
    for &v in &lasso.path {
        prefix += &power * rewards.reward(v);
        power *= lambda;
    }
    // power is now lambda^len(path)
    let mut cycle_sum = Rational::zero();
    let mut cycle_power = one.clone();
    for &v in &lasso.cycle {
        cycle_sum += &cycle_power * rewards.reward(v);
        cycle_power *= lambda;
    }
    // cycle_power is now lambda^q
    (one.clone() - lambda) * (prefix + power * cycle_sum / (one - cycle_power))
}

/// Optimal discounted values by strategy-pair enumeration with the exact
/// lasso closed form.
pub fn solve_discounted_bruteforce(game: &DiscountedGame, budget: u128) -> Result<ValueVector> {
    game.rewards.require_total_for(&game.arena)?;
    let lambda = game.discount.value();
    max_min_over_pairs(&game.arena, budget, |lasso| {
        discounted_lasso_value(lasso, &game.rewards, lambda)
    })
}

/// Largest absolute reward, the normalization bound of the final step.
pub fn reward_bound(game: &DiscountedGame) -> Rational {
    game.rewards.magnitude_bound()
}

/// Builds the simple stochastic game simulating a discounted game: rewards
/// are renormalized to `r'(v) = (r(v) + B) / 2B` in `[0, 1]`, and each
/// edge `(u, v)` becomes a random gadget that continues to `v` with
/// probability `lambda` and otherwise stops, winning with the normalized
/// reward of the vertex the play is leaving. The value of the game at a
/// copy of `v` is exactly `(value_disc(v) + B) / 2B`, so the discounted
/// at-least-zero threshold becomes the at-least-half threshold. All-zero
/// rewards degenerate to `r' = 1/2` everywhere and value one half.
pub fn discounted_to_ssg(game: &DiscountedGame) -> Result<Ssg> {
    game.arena.require_valid()?;
    game.arena.require_two_player()?;
    game.rewards.require_total_for(&game.arena)?;
    let n = game.arena.num_vertices();
    let bound = reward_bound(game);
    let normalized: Vec<Rational> = game
        .arena
        .vertices()
        .map(|v| {
            if bound.is_zero() {
                crate::rational::half()
            } else {
                (game.rewards.reward(v) + &bound)
                    / (Rational::from_integer(BigInt::from(2)) * &bound)
            }
        })
        .collect();
    let lambda = game.discount.value();
    let stop = Rational::one() - lambda;

    let source_edges: Vec<(VertexId, VertexId)> = game.arena.edges().collect();
    let m = source_edges.len();
    let win = VertexId(n + m);
    let lose = VertexId(n + m + 1);
    let mut owners: Vec<Owner> = game.arena.vertices().map(|v| game.arena.owner(v)).collect();
    owners.extend(std::iter::repeat_n(Owner::Random, m));
    owners.push(Owner::Eve);
    owners.push(Owner::Adam);

    let mut edges = Vec::new();
    let mut trans = BTreeMap::new();
    let mut gadgets = BTreeMap::new();
    for (i, &(u, v)) in source_edges.iter().enumerate() {
        let gadget = VertexId(n + i);
        gadgets.insert((u, v), gadget);
        edges.push((u, gadget));
        let win_mass = &stop * &normalized[u.index()];
        let lose_mass = &stop - &win_mass;
        let mut dist = vec![(v, lambda.clone())];
        edges.push((gadget, v));
        if win_mass.is_positive() {
            edges.push((gadget, win));
            dist.push((win, win_mass));
        }
        if lose_mass.is_positive() {
            edges.push((gadget, lose));
            dist.push((lose, lose_mass));
        }
        trans.insert(gadget, dist);
    }
    edges.push((win, win));
    edges.push((lose, lose));

    let ssg = Ssg {
        arena: Arena::new(owners, edges, trans),
        win,
        lose,
        embedding: game.arena.vertices().collect(),
        gadgets,
    };
    ssg.require_valid()?;
    Ok(ssg)
}

/// Size of one pipeline stage: the arena bits plus the bits of the
/// annotations stored next to it (priorities, rewards, discount factor).
#[derive(Clone, Debug, serde::Serialize)]
pub struct StageSize {
    pub arena: SizeReport,
    pub annotation_bits: u64,
    pub total_bits: u64,
}

fn stage(arena: &Arena, annotation_bits: u64) -> Result<StageSize> {
    let report = size_of(arena)?;
    let total_bits = report.total_bits + annotation_bits;
    Ok(StageSize {
        arena: report,
        annotation_bits,
        total_bits,
    })
}

fn u32_bits(x: u32) -> u64 {
    if x == 0 {
        1
    } else {
        (32 - x.leading_zeros()) as u64
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ChainSizes {
    pub parity: StageSize,
    pub meanpayoff: StageSize,
    pub discounted: StageSize,
    pub ssg: StageSize,
}

/// The intermediate games and per-stage sizes of the full pipeline.
#[derive(Clone, Debug)]
pub struct ChainReduction {
    pub meanpayoff: MeanPayoffGame,
    pub discounted: DiscountedGame,
    pub ssg: Ssg,
    pub sizes: ChainSizes,
}

/// Runs the three steps and records the size after each. The final game
/// satisfies the same contract as the direct reduction: Eve wins the
/// parity game from `v` iff the value at `embedding[v]` is at least 1/2.
pub fn chain_reduce(arena: &Arena, p: &PriorityMap) -> Result<ChainReduction> {
    let meanpayoff = parity_to_meanpayoff(arena, p)?;
    let discounted = meanpayoff_to_discounted(&meanpayoff)?;
    let ssg = discounted_to_ssg(&discounted)?;
    let priority_bits: u64 = p.values().iter().map(|&x| u32_bits(x)).sum();
    let reward_bits: u64 = meanpayoff.rewards.iter().map(|(_, r)| bit_length(r)).sum();
    let discount_bits = bit_length(discounted.discount.value());
    let sizes = ChainSizes {
        parity: stage(arena, priority_bits)?,
        meanpayoff: stage(&meanpayoff.arena, reward_bits)?,
        discounted: stage(&discounted.arena, reward_bits + discount_bits)?,
        ssg: stage(&ssg.arena, 0)?,
    };
    Ok(ChainReduction {
        meanpayoff,
        discounted,
        ssg,
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player::{Adam, Eve};
    use crate::rational::rat;
    use crate::ssg::solve_ssg_strategy_improvement;

    fn self_loop(owner: Player) -> Arena {
        Arena::two_player(vec![owner], vec![(VertexId(0), VertexId(0))])
    }

    #[test]
    fn rewards_follow_priority_ranks() {
        // priorities 0 < 1 < 2 on three vertices, n = 3, d = 3
        let arena = Arena::two_player(
            vec![Eve, Eve, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(0)),
            ],
        );
        let p = PriorityMap::new(vec![0, 1, 2]);
        let game = parity_to_meanpayoff(&arena, &p).unwrap();
        assert_eq!(*game.rewards.reward(VertexId(0)), rat(27, 1));
        assert_eq!(*game.rewards.reward(VertexId(1)), rat(-9, 1));
        assert_eq!(*game.rewards.reward(VertexId(2)), rat(3, 1));
        // magnitude bound n^d
        assert!(game.rewards.magnitude_bound() <= rat(27, 1));
    }

    #[test]
    fn meanpayoff_cycle_average() {
        // cycle with rewards 1 and 3 has value 2
        let arena = Arena::two_player(
            vec![Eve, Eve],
            vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))],
        );
        let game = MeanPayoffGame {
            arena,
            rewards: RewardMap::new(vec![rat(1, 1), rat(3, 1)]),
        };
        let values = solve_meanpayoff_bruteforce(&game, 1 << 20).unwrap();
        assert_eq!(*values.value(VertexId(0)), rat(2, 1));
        assert_eq!(*values.value(VertexId(1)), rat(2, 1));
    }

    #[test]
    fn meanpayoff_eve_choice() {
        // Eve chooses between self-loops of rewards -1 and 4
        let arena = Arena::two_player(
            vec![Eve, Eve, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
            ],
        );
        let game = MeanPayoffGame {
            arena,
            rewards: RewardMap::new(vec![rat(0, 1), rat(-1, 1), rat(4, 1)]),
        };
        let values = solve_meanpayoff_bruteforce(&game, 1 << 20).unwrap();
        assert_eq!(*values.value(VertexId(0)), rat(4, 1));
        // constant self-loop values
        assert_eq!(*values.value(VertexId(1)), rat(-1, 1));
        assert_eq!(*values.value(VertexId(2)), rat(4, 1));
    }

    #[test]
    fn discount_factor_formula() {
        // n = 1, B = 1: lambda = 1 - 1/4 = 3/4
        let game = MeanPayoffGame {
            arena: self_loop(Eve),
            rewards: RewardMap::new(vec![rat(1, 1)]),
        };
        let discounted = meanpayoff_to_discounted(&game).unwrap();
        assert_eq!(*discounted.discount.value(), rat(3, 4));
    }

    #[test]
    fn discounted_constant_play() {
        // self-loop with reward 1 at lambda = 1/2 has value 1
        let game = DiscountedGame {
            arena: self_loop(Eve),
            rewards: RewardMap::new(vec![rat(1, 1)]),
            discount: DiscountFactor::new(rat(1, 2)).unwrap(),
        };
        let values = solve_discounted_bruteforce(&game, 1 << 20).unwrap();
        assert_eq!(*values.value(VertexId(0)), rat(1, 1));
    }

    #[test]
    fn discounted_prefix_then_loop() {
        // reward 0 then a self-loop of reward 2 at lambda = 1/2: value 1
        let arena = Arena::two_player(
            vec![Eve, Eve],
            vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(1))],
        );
        let game = DiscountedGame {
            arena,
            rewards: RewardMap::new(vec![rat(0, 1), rat(2, 1)]),
            discount: DiscountFactor::new(rat(1, 2)).unwrap(),
        };
        let values = solve_discounted_bruteforce(&game, 1 << 20).unwrap();
        assert_eq!(*values.value(VertexId(0)), rat(1, 1));
        assert_eq!(*values.value(VertexId(1)), rat(2, 1));
    }

    #[test]
    fn discounted_closed_form_matches_partial_sums() {
        use crate::arena::PositionalStrategy;
        let arena = Arena::two_player(
            vec![Eve, Eve, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(1)),
            ],
        );
        let rewards = RewardMap::new(vec![rat(3, 1), rat(-2, 1), rat(5, 1)]);
        let lambda = rat(9, 10);
        let sigma = PositionalStrategy::from_pairs(
            Eve,
            [
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(1)),
            ],
        );
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(0), &sigma, &tau).unwrap();
        let closed = discounted_lasso_value(&lasso, &rewards, &lambda);
        // 200-term partial sum of (1 - l) sum l^i r(v_i)
        let walk = lasso.replay(200);
        let mut partial = Rational::zero();
        let mut power = Rational::one();
        for &v in &walk {
            partial += &power * rewards.reward(v);
            power *= &lambda;
        }
        partial *= Rational::one() - &lambda;
        let error = (closed - partial).abs();
        // |closed - partial| <= lambda^200 B / (1 - lambda)
        let bound_b = rewards.magnitude_bound();
        let tail = power * bound_b / (Rational::one() - &lambda);
        assert!(error <= tail);
    }

    #[test]
    fn ssg_from_constant_rewards() {
        // constant reward B: r' = 1, only win escapes, value 1
        let game = DiscountedGame {
            arena: self_loop(Eve),
            rewards: RewardMap::new(vec![rat(7, 1)]),
            discount: DiscountFactor::new(rat(1, 2)).unwrap(),
        };
        let ssg = discounted_to_ssg(&game).unwrap();
        assert!(ssg.validate().is_empty());
        let values = solve_ssg_strategy_improvement(&ssg).unwrap().values;
        assert_eq!(*values.value(VertexId(0)), rat(1, 1));

        let negative = DiscountedGame {
            arena: self_loop(Eve),
            rewards: RewardMap::new(vec![rat(-7, 1)]),
            discount: DiscountFactor::new(rat(1, 2)).unwrap(),
        };
        let ssg = discounted_to_ssg(&negative).unwrap();
        let values = solve_ssg_strategy_improvement(&ssg).unwrap().values;
        assert!(values.value(VertexId(0)).is_zero());
    }

    #[test]
    fn ssg_affine_correspondence() {
        // two vertices, asymmetric rewards: value_ssg = (value_disc + B) / 2B
        let arena = Arena::two_player(
            vec![Eve, Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(0)),
                (VertexId(1), VertexId(1)),
            ],
        );
        let game = DiscountedGame {
            arena,
            rewards: RewardMap::new(vec![rat(3, 1), rat(-2, 1)]),
            discount: DiscountFactor::new(rat(4, 5)).unwrap(),
        };
        let disc_values = solve_discounted_bruteforce(&game, 1 << 20).unwrap();
        let ssg = discounted_to_ssg(&game).unwrap();
        let ssg_values = solve_ssg_strategy_improvement(&ssg).unwrap().values;
        let bound = reward_bound(&game);
        for v in game.arena.vertices() {
            let expected = (disc_values.value(v) + &bound)
                / (Rational::from_integer(BigInt::from(2)) * &bound);
            assert_eq!(*ssg_values.value(ssg.embedded(v).unwrap()), expected);
        }
    }

    #[test]
    fn zero_rewards_give_half() {
        let game = DiscountedGame {
            arena: self_loop(Adam),
            rewards: RewardMap::new(vec![rat(0, 1)]),
            discount: DiscountFactor::new(rat(1, 2)).unwrap(),
        };
        let ssg = discounted_to_ssg(&game).unwrap();
        let values = solve_ssg_strategy_improvement(&ssg).unwrap().values;
        assert_eq!(*values.value(VertexId(0)), rat(1, 2));
    }

    #[test]
    fn chain_counts_match() {
        let arena = Arena::two_player(
            vec![Eve, Adam],
            vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))],
        );
        let p = PriorityMap::new(vec![0, 1]);
        let chain = chain_reduce(&arena, &p).unwrap();
        let n = 2;
        let m = 2;
        assert_eq!(chain.ssg.arena.num_vertices(), n + m + 2);
        assert_eq!(chain.ssg.arena.num_random(), m);
        assert!(chain.sizes.ssg.total_bits > chain.sizes.parity.total_bits);
    }
}

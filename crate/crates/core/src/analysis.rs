//! Exact analysis of the random walks induced by positional strategies on
//! a reduced game.
//!
//! Fixing positional strategies in a 2-player arena yields a unique lasso
//! play: a simple path followed by a simple cycle repeated forever. In the
//! reduced game the walk traverses one escape gadget per step, so all
//! absorption probabilities have closed forms built from survival products
//! over the entered vertices.
//!
//! The loop statistics are taken at the pivot cut: the prefix runs until
//! the walk first arrives at the cycle predecessor of the minimum-priority
//! cycle vertex, so that each subsequent loop round enters that vertex
//! first, which is where the round-mass bounds hold. The decomposition
//! itself is stored in walk order (the stored `path`, `cycle` and
//! `cycle^omega` concatenation reproduce the play exactly); the pivot cut
//! is a view. The absorption closed form is cut-independent and uses the
//! walk order directly.

use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_bigint::BigUint;

use crate::arena::{Arena, Owner, PositionalStrategy, PriorityMap, VertexId};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::reduction::EscapeProbabilities;
use crate::ssg::Ssg;

/// The unique play of a positional strategy pair from a start vertex:
/// `path · cycle^omega`, with path and cycle vertex-disjoint and each
/// duplicate-free. `cycle[0]` is the first vertex the walk revisits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoDecomposition {
    pub path: Vec<VertexId>,
    pub cycle: Vec<VertexId>,
}

impl LassoDecomposition {
    /// Vertices entered while crossing the path, in order: everything after
    /// the start vertex up to and including the cycle entry point.
    pub fn path_entries(&self) -> Vec<VertexId> {
        let mut entries: Vec<VertexId> = self.path.iter().skip(1).copied().collect();
        if !self.path.is_empty() {
            entries.push(self.cycle[0]);
        }
        entries
    }

    /// Vertices entered during one round of the cycle, starting after
    /// `cycle[0]` and ending by re-entering it.
    pub fn cycle_entries(&self) -> Vec<VertexId> {
        let mut entries: Vec<VertexId> = self.cycle.iter().skip(1).copied().collect();
        entries.push(self.cycle[0]);
        entries
    }

    /// The lowest priority on the cycle, which is the one deciding the
    /// parity winner of the play.
    pub fn minimum_cycle_priority(&self, p: &PriorityMap) -> u32 {
        self.cycle
            .iter()
            .map(|&v| p.priority(v))
            .min()
            .expect("cycle is nonempty")
    }

    /// Position of the pivot (first minimum-priority vertex) within
    /// [`Self::cycle_entries`].
    fn pivot_entry_index(&self, p: &PriorityMap) -> usize {
        let entries = self.cycle_entries();
        let min = self.minimum_cycle_priority(p);
        entries
            .iter()
            .position(|&v| p.priority(v) == min)
            .expect("minimum is attained")
    }

    /// Entries from the start up to the first arrival at the pivot's cycle
    /// predecessor; all distinct, so the survival product over them is the
    /// path-crossing probability of the pivot cut.
    pub fn entries_to_pivot(&self, p: &PriorityMap) -> Vec<VertexId> {
        let mut entries = self.path_entries();
        entries.extend(&self.cycle_entries()[..self.pivot_entry_index(p)]);
        entries
    }

    /// One cycle round of entries rotated to start with the pivot.
    pub fn cycle_entries_from_pivot(&self, p: &PriorityMap) -> Vec<VertexId> {
        let mut entries = self.cycle_entries();
        entries.rotate_left(self.pivot_entry_index(p));
        entries
    }

    /// The first `steps` vertices of the play.
    pub fn replay(&self, steps: usize) -> Vec<VertexId> {
        self.path
            .iter()
            .copied()
            .chain(self.cycle.iter().copied().cycle())
            .take(steps)
            .collect()
    }
}

/// Walks a 2-player arena under a positional strategy pair until a vertex
/// repeats; at most `n + 1` steps.
pub fn lasso_decompose(
    arena: &Arena,
    start: VertexId,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
) -> Result<LassoDecomposition> {
    arena.require_two_player()?;
    let mut first_seen = vec![usize::MAX; arena.num_vertices()];
    let mut walk: Vec<VertexId> = Vec::new();
    let mut current = start;
    loop {
        if first_seen[current.index()] != usize::MAX {
            let split = first_seen[current.index()];
            let cycle = walk.split_off(split);
            return Ok(LassoDecomposition { path: walk, cycle });
        }
        first_seen[current.index()] = walk.len();
        walk.push(current);
        current = match arena.owner(current) {
            Owner::Eve => sigma.require_choice(current)?,
            Owner::Adam => tau.require_choice(current)?,
            Owner::Random => unreachable!("arena is 2-player"),
        };
        debug_assert!(walk.len() <= arena.num_vertices() + 1);
    }
}

/// Escape statistics of a lasso at the pivot cut.
///
/// `alpha` is the probability of surviving every gadget entered before the
/// first loop round; `beta` and `gamma` are the probabilities of escaping
/// to the win and lose sink during one loop round, entered pivot-first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopStats {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl LoopStats {
    /// Probability that a loop round escapes at all.
    pub fn round_escape(&self) -> Rational {
        self.beta.clone() + &self.gamma
    }

    /// Conditional win probability of the looping game.
    pub fn loop_win_share(&self) -> Rational {
        self.beta.clone() / self.round_escape()
    }
}

fn survival(entries: &[VertexId], probs: &EscapeProbabilities) -> Rational {
    entries.iter().fold(Rational::one(), |acc, &v| {
        acc * (Rational::one() - probs.probability(v))
    })
}

/// Escape mass collected along a gadget chain, split by a predicate on the
/// entered vertex: for each entry the walk escapes there with its own
/// probability times the survival of all earlier entries.
fn escape_split(
    entries: &[VertexId],
    probs: &EscapeProbabilities,
    matches: impl Fn(VertexId) -> bool,
) -> (Rational, Rational) {
    let mut hit = Rational::zero();
    let mut miss = Rational::zero();
    let mut alive = Rational::one();
    for &v in entries {
        let escape = &alive * probs.probability(v);
        if matches(v) {
            hit += escape;
        } else {
            miss += escape;
        }
        alive *= Rational::one() - probs.probability(v);
    }
    (hit, miss)
}

/// Closed forms for `alpha`, `beta`, `gamma` by survival-product analysis
/// of the gadget chain.
pub fn loop_stats(
    lasso: &LassoDecomposition,
    p: &PriorityMap,
    probs: &EscapeProbabilities,
) -> LoopStats {
    let alpha = survival(&lasso.entries_to_pivot(p), probs);
    let round = lasso.cycle_entries_from_pivot(p);
    let (beta, gamma) = escape_split(&round, probs, |v| p.priority(v).is_multiple_of(2));
    debug_assert!(alpha.is_positive() && alpha <= Rational::one());
    debug_assert!((beta.clone() + &gamma).is_positive());
    debug_assert!(beta.clone() + &gamma <= Rational::one());
    LoopStats { alpha, beta, gamma }
}

/// Escape annotation of one source-game step: probability of diversion and
/// whether the diversion hits the win sink.
#[derive(Clone, Debug)]
struct GadgetStep {
    escape: Rational,
    to_win: bool,
}

fn gadget_step(ssg: &Ssg, u: VertexId, v: VertexId) -> Result<GadgetStep> {
    let gadget = ssg
        .gadget(u, v)
        .ok_or_else(|| Error::Semantic(format!("no gadget for source edge ({u}, {v})")))?;
    let dist = ssg
        .arena
        .distribution(gadget)
        .ok_or_else(|| Error::Semantic(format!("gadget {gadget} has no distribution")))?;
    // single-escape gadgets only: continue edge plus one sink edge
    let sinks: Vec<&(VertexId, Rational)> = dist.iter().filter(|(w, _)| ssg.is_sink(*w)).collect();
    if dist.len() != 2 || sinks.len() != 1 {
        return Err(Error::Semantic(format!(
            "gadget {gadget} is not a single-escape gadget"
        )));
    }
    let (sink, escape) = sinks[0];
    Ok(GadgetStep {
        escape: escape.clone(),
        to_win: *sink == ssg.win,
    })
}

/// The source-level lasso with escape annotations from the reduced game.
fn annotated_lasso(
    ssg: &Ssg,
    start: VertexId,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
) -> Result<(Vec<GadgetStep>, Vec<GadgetStep>)> {
    let n = ssg.embedding.len();
    if start.index() >= n {
        return Err(Error::Semantic(format!(
            "start vertex {start} is not a source vertex of the reduction"
        )));
    }
    let mut first_seen = vec![usize::MAX; n];
    let mut current = start;
    let mut steps: Vec<GadgetStep> = Vec::new();
    loop {
        if first_seen[current.index()] != usize::MAX {
            let split = first_seen[current.index()];
            let cycle = steps.split_off(split);
            return Ok((steps, cycle));
        }
        first_seen[current.index()] = steps.len();
        let copy = ssg
            .embedded(current)
            .ok_or_else(|| Error::Semantic(format!("vertex {current} has no embedding")))?;
        let next = match ssg.arena.owner(copy) {
            Owner::Eve => sigma.require_choice(current)?,
            Owner::Adam => tau.require_choice(current)?,
            Owner::Random => {
                return Err(Error::Semantic(format!(
                    "source vertex {current} maps to a random vertex"
                )))
            }
        };
        steps.push(gadget_step(ssg, current, next)?);
        current = next;
    }
}

/// Exact absorption probabilities `(p_win, p_lose)` of the reduced walk
/// under a source strategy pair, by closed form: escape mass collected on
/// the prefix plus the crossing probability times the looping-game share.
/// This is the route independent of the linear-system policy evaluation.
pub fn reach_probability_fixed(
    ssg: &Ssg,
    start: VertexId,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
) -> Result<(Rational, Rational)> {
    let (path_steps, cycle_steps) = annotated_lasso(ssg, start, sigma, tau)?;
    // The steps entering the cycle portion, in walk order: the path steps
    // (last one enters the cycle head), then one full round of the cycle.
    let mut win_prefix = Rational::zero();
    let mut lose_prefix = Rational::zero();
    let mut alive = Rational::one();
    for step in &path_steps {
        let escape = &alive * &step.escape;
        if step.to_win {
            win_prefix += escape;
        } else {
            lose_prefix += escape;
        }
        alive *= Rational::one() - &step.escape;
    }
    let mut beta = Rational::zero();
    let mut gamma = Rational::zero();
    let mut round_alive = Rational::one();
    for step in &cycle_steps {
        let escape = &round_alive * &step.escape;
        if step.to_win {
            beta += escape;
        } else {
            gamma += escape;
        }
        round_alive *= Rational::one() - &step.escape;
    }
    let round_escape = beta.clone() + &gamma;
    debug_assert!(round_escape.is_positive());
    let p_win = win_prefix + &alive * (beta / &round_escape);
    let p_lose = lose_prefix + alive * (gamma / round_escape);
    debug_assert!(p_win.clone() + &p_lose == Rational::one());
    Ok((p_win, p_lose))
}

/// Aggregated outcome of checking the escape-statistics inequalities over
/// the positional strategy pairs of a source game.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub pairs_checked: usize,
    /// True when the pair budget truncated the enumeration.
    pub sampled: bool,
    /// Smallest observed `alpha - 5/6`.
    pub min_alpha_slack: Option<Rational>,
    /// Smallest observed `winner_round_mass - P(pivot)`.
    pub min_major_slack: Option<Rational>,
    /// Smallest observed `(2/3) P(pivot) - loser_round_mass`.
    pub min_minor_slack: Option<Rational>,
    pub violations: Vec<String>,
}

impl PropertyReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

fn track_min(slot: &mut Option<Rational>, candidate: Rational) {
    if slot.as_ref().is_none_or(|held| candidate < *held) {
        *slot = Some(candidate);
    }
}

/// For every strategy pair (up to `budget`) and every start vertex, checks
/// the crossing bound `alpha >= 5/6` and the pivot-round bounds: the mass
/// on the pivot's parity is at least `P(pivot)` and the mass on the other
/// parity at most `(2/3) P(pivot)`. Requires the assumption inequalities
/// to hold for `probs`.
pub fn check_properties(
    ssg: &Ssg,
    arena: &Arena,
    p: &PriorityMap,
    probs: &EscapeProbabilities,
    budget: usize,
) -> Result<PropertyReport> {
    arena.require_two_player()?;
    let five_sixths = crate::rational::rat(5, 6);
    let two_thirds = crate::rational::rat(2, 3);
    let mut report = PropertyReport {
        pairs_checked: 0,
        sampled: false,
        min_alpha_slack: None,
        min_major_slack: None,
        min_minor_slack: None,
        violations: Vec::new(),
    };
    let _ = ssg; // the reduced game fixes the sink orientation checked via parities
    'pairs: for sigma in
        crate::arena::enumerate_positional_strategies(arena, crate::arena::Player::Eve)
    {
        for tau in crate::arena::enumerate_positional_strategies(arena, crate::arena::Player::Adam)
        {
            if report.pairs_checked == budget {
                report.sampled = true;
                break 'pairs;
            }
            report.pairs_checked += 1;
            for start in arena.vertices() {
                let lasso = lasso_decompose(arena, start, &sigma, &tau)?;
                let stats = loop_stats(&lasso, p, probs);
                let pivot_priority = lasso.minimum_cycle_priority(p);
                let pivot_escape = probs
                    .probability(lasso.cycle_entries_from_pivot(p)[0])
                    .clone();
                let alpha_slack = stats.alpha.clone() - &five_sixths;
                if alpha_slack.is_negative() {
                    report
                        .violations
                        .push(format!("alpha < 5/6 from {start}: {}", stats.alpha));
                }
                track_min(&mut report.min_alpha_slack, alpha_slack);
                let (major, minor) = if pivot_priority % 2 == 0 {
                    (&stats.beta, &stats.gamma)
                } else {
                    (&stats.gamma, &stats.beta)
                };
                let major_slack = major.clone() - &pivot_escape;
                if major_slack.is_negative() {
                    report
                        .violations
                        .push(format!("winner round mass below pivot escape from {start}"));
                }
                track_min(&mut report.min_major_slack, major_slack);
                let minor_slack = &two_thirds * &pivot_escape - minor;
                if minor_slack.is_negative() {
                    report.violations.push(format!(
                        "loser round mass above two thirds of pivot escape from {start}"
                    ));
                }
                track_min(&mut report.min_minor_slack, minor_slack);
            }
        }
    }
    Ok(report)
}

/// Empirical absorption frequencies from seeded simulation.
#[derive(Clone, Debug)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub wins: u64,
    pub losses: u64,
    pub frequency: f64,
    /// 99% Wilson score interval for the win probability.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MonteCarloReport {
    pub fn interval_contains(&self, exact: &Rational) -> bool {
        let x = rational_to_f64(exact);
        self.ci_low <= x && x <= self.ci_high
    }
}

fn rational_to_f64(x: &Rational) -> f64 {
    // values live in [0, 1]; split into quotient and scaled remainder
    let (q, r) = num_integer::Integer::div_rem(x.numer(), x.denom());
    let qf = q.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let scale = 1u64 << 53;
    let frac = (r * num_bigint::BigInt::from(scale)) / x.denom();
    qf + frac.to_string().parse::<f64>().unwrap_or(f64::NAN) / scale as f64
}

/// Prepared exact sampler for one distribution: numerators over the common
/// denominator `D`, decided by one uniform draw in `[0, D)`. Bit-exact
/// when `D` is a power of two; rejection from the next power of two
/// otherwise. Machine words when `D` fits, big integers beyond that.
enum Sampler {
    Word {
        /// number of random bits per draw
        bits: u32,
        /// rejection limit, `0` meaning the full power-of-two range
        limit: u64,
        cumulative: Vec<(u64, VertexId)>,
    },
    Wide {
        bits: u64,
        limit: BigUint,
        pow2: bool,
        cumulative: Vec<(BigUint, VertexId)>,
    },
}

impl Sampler {
    fn prepare(dist: &[(VertexId, Rational)]) -> Sampler {
        let common: BigUint = dist
            .iter()
            .map(|(_, p)| p.denom().magnitude().clone())
            .fold(BigUint::one(), num_integer::lcm);
        let mut cumulative = Vec::with_capacity(dist.len());
        let mut acc = BigUint::zero();
        for (w, p) in dist {
            acc += p.numer().magnitude() * (&common / p.denom().magnitude());
            cumulative.push((acc.clone(), *w));
        }
        debug_assert_eq!(acc, common);
        let pow2 = common.count_ones() == 1;
        if common.bits() <= 63 {
            let limit = common.to_u64_digits().first().copied().unwrap_or(0);
            let bits = if pow2 {
                limit.trailing_zeros()
            } else {
                common.bits() as u32
            };
            Sampler::Word {
                bits,
                limit: if pow2 { 0 } else { limit },
                cumulative: cumulative
                    .into_iter()
                    .map(|(c, w)| (c.to_u64_digits().first().copied().unwrap_or(0), w))
                    .collect(),
            }
        } else {
            Sampler::Wide {
                bits: if pow2 {
                    common.trailing_zeros().unwrap_or(0)
                } else {
                    common.bits()
                },
                limit: common,
                pow2,
                cumulative,
            }
        }
    }

    fn draw(&self, rng: &mut impl RngCore) -> VertexId {
        match self {
            Sampler::Word {
                bits,
                limit,
                cumulative,
            } => {
                let mask = if *bits >= 64 {
                    u64::MAX
                } else {
                    (1u64 << bits) - 1
                };
                let value = loop {
                    let candidate = rng.next_u64() & mask;
                    if *limit == 0 || candidate < *limit {
                        break candidate;
                    }
                };
                for (bound, target) in cumulative {
                    if value < *bound {
                        return *target;
                    }
                }
                unreachable!("distribution sums to one")
            }
            Sampler::Wide {
                bits,
                limit,
                pow2,
                cumulative,
            } => {
                let value = loop {
                    let candidate = random_bits(rng, *bits);
                    if *pow2 || candidate < *limit {
                        break candidate;
                    }
                };
                for (bound, target) in cumulative {
                    if value < *bound {
                        return *target;
                    }
                }
                unreachable!("distribution sums to one")
            }
        }
    }
}

fn random_bits(rng: &mut impl RngCore, bits: u64) -> BigUint {
    if bits == 0 {
        return BigUint::zero();
    }
    let bytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; bytes];
    rng.fill_bytes(&mut buf);
    let excess = (bytes as u64) * 8 - bits;
    buf[0] &= 0xffu8 >> excess;
    BigUint::from_bytes_be(&buf)
}

/// Simulates the reduced walk until absorption, `trials` times, each trial
/// on its own stream of a seeded generator. Exact-arithmetic sampling, so
/// identical seeds reproduce identical counts.
pub fn monte_carlo_reach(
    ssg: &Ssg,
    start: VertexId,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if !crate::ssg::check_stopping(ssg) {
        return Err(Error::NotStopping);
    }
    // pre-resolve every step so the trial loop only draws bits
    let n = ssg.arena.num_vertices();
    let mut samplers: Vec<Option<Sampler>> = Vec::with_capacity(n);
    let mut fixed_moves: Vec<Option<VertexId>> = Vec::with_capacity(n);
    for v in ssg.arena.vertices() {
        match ssg.arena.owner(v) {
            Owner::Eve => {
                fixed_moves.push(Some(sigma.require_choice(v)?));
                samplers.push(None);
            }
            Owner::Adam => {
                fixed_moves.push(Some(tau.require_choice(v)?));
                samplers.push(None);
            }
            Owner::Random => {
                fixed_moves.push(None);
                samplers.push(Some(Sampler::prepare(ssg.arena.distribution(v).unwrap())));
            }
        }
    }
    let mut wins = 0u64;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut current = start;
        while !ssg.is_sink(current) {
            current = match &samplers[current.index()] {
                Some(sampler) => sampler.draw(&mut rng),
                None => fixed_moves[current.index()].unwrap(),
            };
        }
        if current == ssg.win {
            wins += 1;
        }
    }
    let losses = trials - wins;
    let n = trials as f64;
    let p_hat = wins as f64 / n;
    let z = 2.575_829_303_548_901_f64; // 99% two-sided normal quantile
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the score interval closes exactly at the boundary for extreme counts
    let ci_low = if wins == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let ci_high = if wins == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok(MonteCarloReport {
        trials,
        wins,
        losses,
        frequency: p_hat,
        ci_low,
        ci_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player::{Adam, Eve};
    use crate::arena::PositionalStrategy;
    use crate::rational::rat;
    use crate::reduction::{lift_strategy, reduce_parity_to_ssg};

    fn eve_strategy(pairs: &[(usize, usize)]) -> PositionalStrategy {
        PositionalStrategy::from_pairs(Eve, pairs.iter().map(|&(v, w)| (VertexId(v), VertexId(w))))
    }

    #[test]
    fn self_loop_decomposes_to_pure_cycle() {
        let arena = Arena::two_player(vec![Eve], vec![(VertexId(0), VertexId(0))]);
        let sigma = eve_strategy(&[(0, 0)]);
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(0), &sigma, &tau).unwrap();
        assert!(lasso.path.is_empty());
        assert_eq!(lasso.cycle, vec![VertexId(0)]);
        assert_eq!(lasso.path_entries(), Vec::<VertexId>::new());
        assert_eq!(lasso.cycle_entries(), vec![VertexId(0)]);
    }

    #[test]
    fn chain_decomposition_and_replay() {
        // a -> b -> c, c -> b
        let arena = Arena::two_player(
            vec![Eve, Eve, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(1)),
            ],
        );
        let sigma = eve_strategy(&[(0, 1), (1, 2), (2, 1)]);
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(0), &sigma, &tau).unwrap();
        assert_eq!(lasso.path, vec![VertexId(0)]);
        assert_eq!(lasso.cycle, vec![VertexId(1), VertexId(2)]);
        assert_eq!(lasso.path_entries(), vec![VertexId(1)]);
        assert_eq!(lasso.cycle_entries(), vec![VertexId(2), VertexId(1)]);

        // replay reproduces the walk exactly
        let n = arena.num_vertices();
        let mut walk = Vec::new();
        let mut cur = VertexId(0);
        for _ in 0..3 * (n + 1) {
            walk.push(cur);
            cur = sigma.choice(cur).unwrap();
        }
        assert_eq!(lasso.replay(3 * (n + 1)), walk);
    }

    #[test]
    fn pivot_rotation() {
        // cycle b -> c -> d -> b entered at b; min priority at d
        let arena = Arena::two_player(
            vec![Eve, Eve, Eve, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(3)),
                (VertexId(3), VertexId(1)),
            ],
        );
        let p = PriorityMap::new(vec![6, 5, 7, 4]);
        let sigma = eve_strategy(&[(0, 1), (1, 2), (2, 3), (3, 1)]);
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(0), &sigma, &tau).unwrap();
        assert_eq!(lasso.cycle, vec![VertexId(1), VertexId(2), VertexId(3)]);
        assert_eq!(lasso.minimum_cycle_priority(&p), 4);
        assert_eq!(
            lasso.cycle_entries_from_pivot(&p),
            vec![VertexId(3), VertexId(1), VertexId(2)]
        );
        assert_eq!(lasso.entries_to_pivot(&p), vec![VertexId(1), VertexId(2)]);
    }

    #[test]
    fn loop_stats_examples() {
        // path enters priorities 4 then 5, then a priority-4 self loop:
        // alpha = (15/16)(31/32) = 465/512; pivot first entered, beta = 1/16
        let arena = Arena::two_player(
            vec![Eve, Eve, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(2)),
            ],
        );
        let sigma = eve_strategy(&[(0, 1), (1, 2), (2, 2)]);
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(0), &sigma, &tau).unwrap();
        // vertex 1 has priority 4 (P = 1/16), vertex 2 priority 5... use
        // entries 4 then 5 on the path by prioritizing: v1: 4, v2: 5
        let p = PriorityMap::new(vec![6, 4, 5]);
        let probs = EscapeProbabilities::new(vec![rat(1, 64), rat(1, 16), rat(1, 32)]).unwrap();
        let stats = loop_stats(&lasso, &p, &probs);
        assert_eq!(stats.alpha, rat(15, 16) * rat(31, 32));
        assert_eq!(stats.alpha, rat(465, 512));
        // the cycle is the odd-priority self loop: beta = 0, gamma = 1/32
        assert!(stats.beta.is_zero());
        assert_eq!(stats.gamma, rat(1, 32));
    }

    #[test]
    fn loop_stats_single_even_vertex() {
        let arena = Arena::two_player(vec![Eve], vec![(VertexId(0), VertexId(0))]);
        let sigma = eve_strategy(&[(0, 0)]);
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(0), &sigma, &tau).unwrap();
        let p = PriorityMap::new(vec![4]);
        let probs = EscapeProbabilities::new(vec![rat(1, 16)]).unwrap();
        let stats = loop_stats(&lasso, &p, &probs);
        assert_eq!(stats.alpha, rat(1, 1)); // empty prefix
        assert_eq!(stats.beta, rat(1, 16));
        assert!(stats.gamma.is_zero());
    }

    #[test]
    fn gamma_bound_example() {
        // cycle: even pivot with P = 1/16 entered first, then odd priority 7
        // with P = 1/128: gamma = (15/16)(1/128) = 15/2048 < 1/24
        let arena = Arena::two_player(
            vec![Eve, Eve],
            vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))],
        );
        let sigma = eve_strategy(&[(0, 1), (1, 0)]);
        let tau = PositionalStrategy::new(Adam);
        let lasso = lasso_decompose(&arena, VertexId(1), &sigma, &tau).unwrap();
        let p = PriorityMap::new(vec![4, 7]);
        let probs = EscapeProbabilities::new(vec![rat(1, 16), rat(1, 128)]).unwrap();
        let stats = loop_stats(&lasso, &p, &probs);
        assert_eq!(stats.gamma, rat(15, 2048));
        assert!(stats.gamma < rat(1, 24));
        assert_eq!(stats.beta, rat(1, 16));
    }

    #[test]
    fn reach_probability_on_even_loop() {
        let arena = Arena::two_player(vec![Eve], vec![(VertexId(0), VertexId(0))]);
        let p = PriorityMap::new(vec![0]);
        let (ssg, ..) = reduce_parity_to_ssg(&arena, &p).unwrap();
        let sigma = eve_strategy(&[(0, 0)]);
        let tau = PositionalStrategy::new(Adam);
        let (p_win, p_lose) = reach_probability_fixed(&ssg, VertexId(0), &sigma, &tau).unwrap();
        assert_eq!(p_win, rat(1, 1));
        assert!(p_lose.is_zero());
    }

    #[test]
    fn reach_probability_matches_policy_evaluation() {
        // two-vertex game with mixed parities
        let arena = Arena::two_player(
            vec![Eve, Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(0)),
                (VertexId(1), VertexId(1)),
            ],
        );
        let p = PriorityMap::new(vec![0, 1]);
        let (ssg, ..) = reduce_parity_to_ssg(&arena, &p).unwrap();
        for tau_choice in [0usize, 1usize] {
            let sigma = eve_strategy(&[(0, 1)]);
            let tau = PositionalStrategy::from_pairs(Adam, [(VertexId(1), VertexId(tau_choice))]);
            let (p_win, p_lose) = reach_probability_fixed(&ssg, VertexId(0), &sigma, &tau).unwrap();
            assert_eq!(p_win.clone() + &p_lose, rat(1, 1));
            let values = crate::ssg::evaluate_policy(
                &ssg,
                &lift_strategy(&ssg, &sigma).unwrap(),
                &lift_strategy(&ssg, &tau).unwrap(),
            )
            .unwrap();
            assert_eq!(&p_win, values.value(ssg.embedded(VertexId(0)).unwrap()));
        }
    }

    #[test]
    fn properties_hold_on_a_small_game() {
        let arena = Arena::two_player(
            vec![Eve, Adam, Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(0)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(0)),
                (VertexId(2), VertexId(2)),
            ],
        );
        let p = PriorityMap::new(vec![2, 1, 0]);
        let (ssg, compact, probs) = reduce_parity_to_ssg(&arena, &p).unwrap();
        let report = check_properties(&ssg, &arena, compact.as_map(), &probs, 256).unwrap();
        assert!(report.all_hold(), "violations: {:?}", report.violations);
        assert!(!report.sampled);
        assert!(report.min_alpha_slack.unwrap() >= rat(0, 1));
    }

    #[test]
    fn monte_carlo_sure_win() {
        let arena = Arena::two_player(vec![Eve], vec![(VertexId(0), VertexId(0))]);
        let p = PriorityMap::new(vec![0]);
        let (ssg, ..) = reduce_parity_to_ssg(&arena, &p).unwrap();
        let sigma = lift_strategy(&ssg, &eve_strategy(&[(0, 0)])).unwrap();
        let tau = lift_strategy(&ssg, &PositionalStrategy::new(Adam)).unwrap();
        let report = monte_carlo_reach(&ssg, VertexId(0), &sigma, &tau, 1000, 7).unwrap();
        assert_eq!(report.wins, 1000);
        assert_eq!(report.frequency, 1.0);
        assert!(report.interval_contains(&rat(1, 1)));
    }

    #[test]
    fn monte_carlo_fair_coin() {
        // single coin vertex: exact value 1/2 inside the interval
        use std::collections::BTreeMap;
        let mut trans = BTreeMap::new();
        trans.insert(
            VertexId(0),
            vec![(VertexId(1), rat(1, 2)), (VertexId(2), rat(1, 2))],
        );
        let arena = Arena::new(
            vec![Owner::Random, Owner::Eve, Owner::Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
            ],
            trans,
        );
        let ssg = Ssg::new(arena, VertexId(1), VertexId(2));
        let sigma = PositionalStrategy::from_pairs(Eve, [(VertexId(1), VertexId(1))]);
        let tau = PositionalStrategy::from_pairs(Adam, [(VertexId(2), VertexId(2))]);
        let report = monte_carlo_reach(&ssg, VertexId(0), &sigma, &tau, 100_000, 42).unwrap();
        assert!(report.interval_contains(&rat(1, 2)), "{report:?}");
        // deterministic for a fixed seed
        let again = monte_carlo_reach(&ssg, VertexId(0), &sigma, &tau, 100_000, 42).unwrap();
        assert_eq!(report.wins, again.wins);
    }

    #[test]
    fn rejection_sampling_is_exact_enough() {
        // non-dyadic distribution (1/3, 2/3): frequencies near 1/3
        use std::collections::BTreeMap;
        let mut trans = BTreeMap::new();
        trans.insert(
            VertexId(0),
            vec![(VertexId(1), rat(1, 3)), (VertexId(2), rat(2, 3))],
        );
        let arena = Arena::new(
            vec![Owner::Random, Owner::Eve, Owner::Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
            ],
            trans,
        );
        let ssg = Ssg::new(arena, VertexId(1), VertexId(2));
        let sigma = PositionalStrategy::from_pairs(Eve, [(VertexId(1), VertexId(1))]);
        let tau = PositionalStrategy::from_pairs(Adam, [(VertexId(2), VertexId(2))]);
        let report = monte_carlo_reach(&ssg, VertexId(0), &sigma, &tau, 100_000, 3).unwrap();
        assert!(report.interval_contains(&rat(1, 3)), "{report:?}");
    }
}

//! Arenas, annotations, strategies and bit-size accounting.
//!
//! An [`Arena`] is a finite directed graph whose vertices are partitioned
//! between Eve, Adam and Random, together with an exact probability
//! distribution over successors at each random vertex. Every vertex has at
//! least one successor, and an edge leaves a random vertex if and only if
//! it carries positive probability. The special case with no random
//! vertices is a 2-player arena.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{bit_length, Rational};

/// Dense index of a vertex within its arena.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// The two strategic players.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }
}

/// Who chooses the successor at a vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Owner {
    Eve,
    Adam,
    Random,
}

impl Owner {
    pub fn player(self) -> Option<Player> {
        match self {
            Owner::Eve => Some(Player::Eve),
            Owner::Adam => Some(Player::Adam),
            Owner::Random => None,
        }
    }
}

impl From<Player> for Owner {
    fn from(p: Player) -> Owner {
        match p {
            Player::Eve => Owner::Eve,
            Player::Adam => Owner::Adam,
        }
    }
}

/// A stochastic arena. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    owners: Vec<Owner>,
    succ: Vec<Vec<VertexId>>,
    /// Distribution at each random vertex, sorted by successor id. Only
    /// positive-probability entries are stored.
    trans: BTreeMap<VertexId, Vec<(VertexId, Rational)>>,
}

impl Arena {
    /// Builds an arena from an ownership vector, an edge list and the
    /// transition distributions of the random vertices. Successor lists are
    /// sorted and deduplicated; well-formedness is checked by [`validate`].
    pub fn new(
        owners: Vec<Owner>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
        trans: BTreeMap<VertexId, Vec<(VertexId, Rational)>>,
    ) -> Arena {
        let n = owners.len();
        let mut succ = vec![Vec::new(); n];
        for (u, v) in edges {
            if u.index() < n {
                succ[u.index()].push(v);
            } else {
                // keep the bogus edge visible to validate()
                succ.push(vec![v]);
            }
        }
        for list in &mut succ {
            list.sort();
            list.dedup();
        }
        let trans = trans
            .into_iter()
            .map(|(u, mut dist)| {
                dist.sort_by_key(|(v, _)| *v);
                (u, dist)
            })
            .collect();
        Arena {
            owners,
            succ,
            trans,
        }
    }

    /// A 2-player arena (no random vertices, no transition function).
    pub fn two_player(
        owners: Vec<Player>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Arena {
        Arena::new(
            owners.into_iter().map(Owner::from).collect(),
            edges,
            BTreeMap::new(),
        )
    }

    pub fn num_vertices(&self) -> usize {
        self.owners.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices()).map(VertexId)
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        self.owners[v.index()]
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v.index()]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.succ[v.index()].len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.succ[u.index()].binary_search(&v).is_ok()
    }

    /// The distribution at a random vertex, sorted by successor id.
    pub fn distribution(&self, v: VertexId) -> Option<&[(VertexId, Rational)]> {
        self.trans.get(&v).map(Vec::as_slice)
    }

    pub fn probability(&self, u: VertexId, v: VertexId) -> Option<&Rational> {
        self.trans
            .get(&u)?
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, p)| p)
    }

    pub fn random_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| self.owner(v) == Owner::Random)
    }

    pub fn num_random(&self) -> usize {
        self.random_vertices().count()
    }

    pub fn is_two_player(&self) -> bool {
        self.num_random() == 0 && self.trans.is_empty()
    }

    pub fn vertices_of(&self, player: Player) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices()
            .filter(move |&v| self.owner(v) == Owner::from(player))
    }

    /// Predecessor lists, computed on demand.
    pub fn predecessors(&self) -> Vec<Vec<VertexId>> {
        let mut preds = vec![Vec::new(); self.num_vertices()];
        for (u, v) in self.edges() {
            preds[v.index()].push(u);
        }
        preds
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    fn check_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArena(
                violations.iter().map(|v| v.to_string()).collect(),
            ))
        }
    }

    pub fn require_valid(&self) -> Result<()> {
        self.check_valid()
    }

    pub fn require_two_player(&self) -> Result<()> {
        match self.random_vertices().next() {
            Some(v) => Err(Error::NotTwoPlayer(v)),
            None => Ok(()),
        }
    }
}

/// One well-formedness violation, naming the offending vertex or edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Deadlock(VertexId),
    DanglingEdge(VertexId, VertexId),
    MissingDistribution(VertexId),
    DistributionOnNonRandom(VertexId),
    ProbabilityWithoutEdge(VertexId, VertexId),
    EdgeWithoutProbability(VertexId, VertexId),
    NonPositiveProbability(VertexId, VertexId),
    BadDistributionSum(VertexId, Rational),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Deadlock(v) => write!(f, "deadlock at {v}"),
            Violation::DanglingEdge(u, v) => write!(f, "edge ({u}, {v}) leaves the vertex set"),
            Violation::MissingDistribution(v) => {
                write!(f, "random vertex {v} has no distribution")
            }
            Violation::DistributionOnNonRandom(v) => {
                write!(f, "non-random vertex {v} carries a distribution")
            }
            Violation::ProbabilityWithoutEdge(u, v) => {
                write!(f, "positive probability on missing edge ({u}, {v})")
            }
            Violation::EdgeWithoutProbability(u, v) => {
                write!(f, "edge ({u}, {v}) from random vertex has no probability")
            }
            Violation::NonPositiveProbability(u, v) => {
                write!(f, "non-positive probability on edge ({u}, {v})")
            }
            Violation::BadDistributionSum(v, sum) => {
                write!(f, "distribution at {v} sums to {sum} != 1")
            }
        }
    }
}

/// Checks every arena invariant; the returned list is empty exactly when
/// the arena is well formed.
pub fn validate(arena: &Arena) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = arena.num_vertices();
    for v in arena.vertices() {
        if arena.out_degree(v) == 0 {
            out.push(Violation::Deadlock(v));
        }
        for &w in arena.successors(v) {
            if w.index() >= n {
                out.push(Violation::DanglingEdge(v, w));
            }
        }
    }
    for v in arena.vertices() {
        match arena.owner(v) {
            Owner::Random => match arena.distribution(v) {
                None => out.push(Violation::MissingDistribution(v)),
                Some(dist) => {
                    let mut sum = Rational::zero();
                    for (w, p) in dist {
                        if !p.is_positive() {
                            out.push(Violation::NonPositiveProbability(v, *w));
                        }
                        if !arena.has_edge(v, *w) {
                            out.push(Violation::ProbabilityWithoutEdge(v, *w));
                        }
                        sum += p;
                    }
                    for &w in arena.successors(v) {
                        if arena.probability(v, w).is_none() {
                            out.push(Violation::EdgeWithoutProbability(v, w));
                        }
                    }
                    if !sum.is_one() {
                        out.push(Violation::BadDistributionSum(v, sum));
                    }
                }
            },
            _ => {
                if arena.distribution(v).is_some() {
                    out.push(Violation::DistributionOnNonRandom(v));
                }
            }
        }
    }
    out
}

/// Priorities, one natural number per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityMap(Vec<u32>);

impl PriorityMap {
    pub fn new(priorities: Vec<u32>) -> PriorityMap {
        PriorityMap(priorities)
    }

    pub fn priority(&self, v: VertexId) -> u32 {
        self.0[v.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.0.iter().enumerate().map(|(i, &p)| (VertexId(i), p))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn max_priority(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }

    /// Distinct priority values, ascending.
    pub fn distinct(&self) -> Vec<u32> {
        let mut ds = self.0.clone();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    pub fn require_total_for(&self, arena: &Arena) -> Result<()> {
        if self.len() == arena.num_vertices() {
            Ok(())
        } else {
            Err(Error::NotTotal {
                expected: arena.num_vertices(),
                found: self.len(),
            })
        }
    }
}

/// Rewards, one exact rational per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewardMap(Vec<Rational>);

impl RewardMap {
    pub fn new(rewards: Vec<Rational>) -> RewardMap {
        RewardMap(rewards)
    }

    pub fn reward(&self, v: VertexId) -> &Rational {
        &self.0[v.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Rational)> + '_ {
        self.0.iter().enumerate().map(|(i, r)| (VertexId(i), r))
    }

    /// Largest absolute reward, or zero for an empty map.
    pub fn magnitude_bound(&self) -> Rational {
        self.0
            .iter()
            .map(|r| r.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn all_integer(&self) -> bool {
        self.0.iter().all(Rational::is_integer)
    }

    pub fn require_total_for(&self, arena: &Arena) -> Result<()> {
        if self.len() == arena.num_vertices() {
            Ok(())
        } else {
            Err(Error::NotTotal {
                expected: arena.num_vertices(),
                found: self.len(),
            })
        }
    }
}

/// A discount factor, strictly between zero and one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscountFactor(Rational);

impl DiscountFactor {
    pub fn new(lambda: Rational) -> Result<DiscountFactor> {
        if lambda.is_positive() && lambda < Rational::one() {
            Ok(DiscountFactor(lambda))
        } else {
            Err(Error::InvalidDiscount)
        }
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

/// A positional strategy: one successor choice per vertex of one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalStrategy {
    player: Player,
    choice: BTreeMap<VertexId, VertexId>,
}

impl PositionalStrategy {
    pub fn new(player: Player) -> PositionalStrategy {
        PositionalStrategy {
            player,
            choice: BTreeMap::new(),
        }
    }

    pub fn from_pairs(
        player: Player,
        pairs: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> PositionalStrategy {
        PositionalStrategy {
            player,
            choice: pairs.into_iter().collect(),
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn choice(&self, v: VertexId) -> Option<VertexId> {
        self.choice.get(&v).copied()
    }

    pub fn require_choice(&self, v: VertexId) -> Result<VertexId> {
        self.choice(v).ok_or(Error::IncompleteStrategy {
            player: self.player,
            vertex: v,
        })
    }

    pub fn set(&mut self, v: VertexId, w: VertexId) {
        self.choice.insert(v, w);
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.choice.iter().map(|(&v, &w)| (v, w))
    }

    /// Every chosen pair is an edge and the domain only contains vertices of
    /// this strategy's player.
    pub fn is_consistent_with(&self, arena: &Arena) -> bool {
        self.choice.iter().all(|(&v, &w)| {
            v.index() < arena.num_vertices()
                && arena.owner(v) == Owner::from(self.player)
                && arena.has_edge(v, w)
        })
    }

    /// Consistent and defined on exactly this player's vertex set.
    pub fn is_total_for(&self, arena: &Arena) -> bool {
        self.is_consistent_with(arena)
            && arena.vertices_of(self.player).count() == self.choice.len()
    }
}

/// Bit counts for storing an arena.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub vertex_bits: u64,
    pub edge_bits: u64,
    pub partition_bits: u64,
    pub trans_bits: u64,
    pub total_bits: u64,
}

/// `ceil(log2(n))`, floored at one bit so that `n = 1` still takes space.
pub fn ceil_log2(n: usize) -> u64 {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

/// Number of bits required to store the arena: `log(n)` for the vertex
/// count, `2 m log(n)` for the edges, `n + n_R log(n)` for the partition,
/// plus the binary length of every stored transition probability.
pub fn size_of(arena: &Arena) -> Result<SizeReport> {
    arena.require_valid()?;
    let n = arena.num_vertices();
    let m = arena.num_edges() as u64;
    let n_random = arena.num_random() as u64;
    let lg = ceil_log2(n);
    let vertex_bits = lg;
    let edge_bits = 2 * m * lg;
    let partition_bits = n as u64 + n_random * lg;
    let trans_bits: u64 = arena
        .random_vertices()
        .flat_map(|v| arena.distribution(v).unwrap())
        .map(|(_, p)| bit_length(p))
        .sum();
    Ok(SizeReport {
        vertex_bits,
        edge_bits,
        partition_bits,
        trans_bits,
        total_bits: vertex_bits + edge_bits + partition_bits + trans_bits,
    })
}

/// Iterates over all positional strategies of one player, in lexicographic
/// order of (vertex id, successor id). Yields exactly the product of the
/// out-degrees of the player's vertices; a player without vertices has one
/// empty strategy.
pub fn enumerate_positional_strategies<'a>(arena: &'a Arena, player: Player) -> StrategyIter<'a> {
    let domain: Vec<VertexId> = arena.vertices_of(player).collect();
    StrategyIter {
        arena,
        player,
        counters: vec![0; domain.len()],
        domain,
        done: false,
    }
}

/// Number of positional strategies of a player, saturating at `u128::MAX`.
pub fn strategy_count(arena: &Arena, player: Player) -> u128 {
    arena
        .vertices_of(player)
        .map(|v| arena.out_degree(v) as u128)
        .fold(1u128, u128::saturating_mul)
}

pub struct StrategyIter<'a> {
    arena: &'a Arena,
    player: Player,
    domain: Vec<VertexId>,
    counters: Vec<usize>,
    done: bool,
}

impl Iterator for StrategyIter<'_> {
    type Item = PositionalStrategy;

    fn next(&mut self) -> Option<PositionalStrategy> {
        if self.done {
            return None;
        }
        // A deadlocked vertex has no choices at all.
        if self.domain.iter().any(|&v| self.arena.out_degree(v) == 0) {
            self.done = true;
            return None;
        }
        let strategy = PositionalStrategy::from_pairs(
            self.player,
            self.domain
                .iter()
                .zip(&self.counters)
                .map(|(&v, &c)| (v, self.arena.successors(v)[c])),
        );
        // advance the odometer, least significant position last
        let mut pos = self.domain.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counters[pos] += 1;
            if self.counters[pos] < self.arena.out_degree(self.domain[pos]) {
                break;
            }
            self.counters[pos] = 0;
        }
        Some(strategy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn chain3() -> Arena {
        // a -> b -> c, c -> b; all Eve
        Arena::two_player(
            vec![Player::Eve; 3],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(1)),
            ],
        )
    }

    #[test]
    fn deadlock_is_reported() {
        let arena = Arena::two_player(vec![Player::Eve], vec![]);
        let violations = validate(&arena);
        assert_eq!(violations, vec![Violation::Deadlock(VertexId(0))]);
        assert_eq!(violations[0].to_string(), "deadlock at v0");
    }

    #[test]
    fn short_distribution_is_reported() {
        let mut trans = BTreeMap::new();
        trans.insert(
            VertexId(0),
            vec![(VertexId(1), rat(1, 2)), (VertexId(2), rat(1, 4))],
        );
        let arena = Arena::new(
            vec![Owner::Random, Owner::Eve, Owner::Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
            ],
            trans,
        );
        let violations = validate(&arena);
        assert_eq!(
            violations,
            vec![Violation::BadDistributionSum(VertexId(0), rat(3, 4))]
        );
    }

    #[test]
    fn probability_edge_correspondence() {
        // edge (0,2) exists but carries no probability
        let mut trans = BTreeMap::new();
        trans.insert(VertexId(0), vec![(VertexId(1), rat(1, 1))]);
        let arena = Arena::new(
            vec![Owner::Random, Owner::Eve, Owner::Eve],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
            ],
            trans,
        );
        assert_eq!(
            validate(&arena),
            vec![Violation::EdgeWithoutProbability(VertexId(0), VertexId(2))]
        );
    }

    #[test]
    fn size_of_two_vertex_arena() {
        // n = 2, m = 2, no random vertices: 1 + 2*2*1 + 2 = 7 bits
        let arena = Arena::two_player(
            vec![Player::Eve, Player::Adam],
            vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))],
        );
        let report = size_of(&arena).unwrap();
        assert_eq!(report.total_bits, 7);
        assert_eq!(
            report.total_bits,
            report.vertex_bits + report.edge_bits + report.partition_bits + report.trans_bits
        );
    }

    #[test]
    fn size_of_self_loop() {
        // n = 1 self-loop: 1 + 2 + 1 = 4 bits
        let arena = Arena::two_player(vec![Player::Eve], vec![(VertexId(0), VertexId(0))]);
        assert_eq!(size_of(&arena).unwrap().total_bits, 4);
    }

    #[test]
    fn size_of_rejects_invalid() {
        let arena = Arena::two_player(vec![Player::Eve], vec![]);
        assert!(size_of(&arena).is_err());
    }

    #[test]
    fn ceil_log2_convention() {
        assert_eq!(ceil_log2(1), 1);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
    }

    #[test]
    fn strategy_enumeration_counts() {
        let arena = chain3();
        // out-degrees 1, 1, 1 for Eve; Adam owns nothing
        assert_eq!(
            enumerate_positional_strategies(&arena, Player::Eve).count(),
            1
        );
        let adam: Vec<_> = enumerate_positional_strategies(&arena, Player::Adam).collect();
        assert_eq!(adam.len(), 1);
        assert!(adam[0].is_empty());

        // one Eve vertex with 3 successors
        let fan = Arena::two_player(
            vec![Player::Eve, Player::Adam, Player::Adam, Player::Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(0), VertexId(3)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
                (VertexId(3), VertexId(3)),
            ],
        );
        assert_eq!(
            enumerate_positional_strategies(&fan, Player::Eve).count(),
            3
        );
        assert_eq!(strategy_count(&fan, Player::Eve), 3);
    }

    #[test]
    fn strategy_enumeration_product() {
        // two Eve vertices with out-degrees 2 and 3: six strategies, no duplicates
        let arena = Arena::two_player(
            vec![Player::Eve, Player::Eve, Player::Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(0), VertexId(2)),
                (VertexId(1), VertexId(0)),
                (VertexId(1), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(2)),
            ],
        );
        let all: Vec<_> = enumerate_positional_strategies(&arena, Player::Eve).collect();
        assert_eq!(all.len(), 6);
        for s in &all {
            assert!(s.is_total_for(&arena));
        }
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
    }

    #[test]
    fn size_monotone_in_edges() {
        let small = Arena::two_player(
            vec![Player::Eve, Player::Adam],
            vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))],
        );
        let bigger = Arena::two_player(
            vec![Player::Eve, Player::Adam],
            vec![
                (VertexId(0), VertexId(0)),
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(0)),
            ],
        );
        assert!(size_of(&bigger).unwrap().total_bits > size_of(&small).unwrap().total_bits);
    }
}

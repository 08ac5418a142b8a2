//! The direct reduction from 2-player parity games to simple stochastic
//! games.
//!
//! The construction replaces every edge `(u, v)` of the parity game by a
//! random gadget vertex that follows the edge with high probability and
//! with small probability `P(v)` diverts the play to an absorbing sink:
//! the win sink when `p(v)` is even, the lose sink when it is odd. When
//! the escape probabilities satisfy the three closure assumptions checked
//! by [`check_assumptions`], Eve wins the parity game from `v` exactly
//! when the value of the stochastic game at the copy of `v` is at least
//! one half.
//!
//! The shipped probability scheme first compacts the priorities into
//! pairwise-distinct values starting at 4 or 5 and then assigns
//! `P(v) = 2^-p(v)`, which satisfies the assumptions with room to spare
//! and keeps every probability dyadic.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arena::{Arena, Owner, Player, PositionalStrategy, PriorityMap, VertexId};
use crate::error::{Error, Result};
use crate::rational::{pow2_recip, rat, Rational};
use crate::ssg::Ssg;

/// A priority map with pairwise-distinct values that preserves per-vertex
/// parity and the relative order of the input map, with the minimum pushed
/// up to 4 (even) or 5 (odd).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactPriorityMap {
    compact: PriorityMap,
    original: PriorityMap,
}

impl CompactPriorityMap {
    pub fn priority(&self, v: VertexId) -> u32 {
        self.compact.priority(v)
    }

    pub fn as_map(&self) -> &PriorityMap {
        &self.compact
    }

    pub fn original(&self) -> &PriorityMap {
        &self.original
    }

    pub fn max_priority(&self) -> u32 {
        self.compact.max_priority().unwrap_or(0)
    }
}

/// Remaps priorities monotonically so that they are pairwise distinct,
/// keep their parity, and start at 4 or 5: proceeding from the lowest
/// original priority upward (ties broken by vertex id), each vertex gets
/// the smallest integer of its parity greater than the last one used.
pub fn compact_priorities(arena: &Arena, p: &PriorityMap) -> Result<CompactPriorityMap> {
    arena.require_valid()?;
    arena.require_two_player()?;
    p.require_total_for(arena)?;
    let mut order: Vec<VertexId> = arena.vertices().collect();
    order.sort_by_key(|&v| (p.priority(v), v));
    let mut compact = vec![0u32; arena.num_vertices()];
    let mut last: u32 = 3;
    for v in order {
        let parity = p.priority(v) % 2;
        let mut next = last + 1;
        if next % 2 != parity {
            next += 1;
        }
        compact[v.index()] = next;
        last = next;
    }
    Ok(CompactPriorityMap {
        compact: PriorityMap::new(compact),
        original: p.clone(),
    })
}

/// Per-vertex escape probabilities, each strictly between zero and one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscapeProbabilities(Vec<Rational>);

impl EscapeProbabilities {
    pub fn new(probabilities: Vec<Rational>) -> Result<EscapeProbabilities> {
        for (i, p) in probabilities.iter().enumerate() {
            if !p.is_positive() || *p >= Rational::one() {
                return Err(Error::ProbabilityRange(VertexId(i)));
            }
        }
        Ok(EscapeProbabilities(probabilities))
    }

    pub fn probability(&self, v: VertexId) -> &Rational {
        &self.0[v.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Rational)> + '_ {
        self.0.iter().enumerate().map(|(i, p)| (VertexId(i), p))
    }

    pub fn require_total_for(&self, arena: &Arena) -> Result<()> {
        if self.len() == arena.num_vertices() {
            Ok(())
        } else {
            Err(Error::MissingProbability(VertexId(self.len())))
        }
    }
}

/// `P(v) = 2^-p(v)` for a compact priority map; all values dyadic.
pub fn assign_probabilities(p: &CompactPriorityMap) -> EscapeProbabilities {
    EscapeProbabilities(
        p.as_map()
            .values()
            .iter()
            .map(|&prio| pow2_recip(prio))
            .collect(),
    )
}

/// One checked inequality with its exact slack `rhs - lhs`.
#[derive(Clone, Debug, Serialize)]
pub struct AssumptionLine {
    pub holds: bool,
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub slack: Rational,
}

fn line(lhs: Rational, rhs: Rational) -> AssumptionLine {
    let slack = rhs - lhs;
    AssumptionLine {
        holds: !slack.is_negative(),
        slack,
    }
}

/// Exact evaluation of the three assumption families: the total escape
/// mass is at most 1/6, and for every vertex the escape mass sitting on
/// strictly higher priorities of either fixed parity is at most two thirds
/// of the vertex's own escape probability.
#[derive(Clone, Debug, Serialize)]
pub struct AssumptionCheck {
    /// Total escape mass at most 1/6.
    pub total_escape: AssumptionLine,
    /// Per vertex: odd escape mass strictly above it at most (2/3) P(v).
    pub odd_mass_above: Vec<AssumptionLine>,
    /// Per vertex: even escape mass strictly above it at most (2/3) P(v).
    pub even_mass_above: Vec<AssumptionLine>,
}

impl AssumptionCheck {
    pub fn all_hold(&self) -> bool {
        self.total_escape.holds
            && self.odd_mass_above.iter().all(|l| l.holds)
            && self.even_mass_above.iter().all(|l| l.holds)
    }
}

pub fn check_assumptions(p: &PriorityMap, probs: &EscapeProbabilities) -> AssumptionCheck {
    let n = p.len();
    debug_assert_eq!(probs.len(), n);
    let total = probs.iter().fold(Rational::zero(), |acc, (_, q)| acc + q);
    let total_escape = line(total, rat(1, 6));

    // suffix sums per parity over strictly greater priorities
    let mut by_priority: Vec<(u32, VertexId)> = (0..n)
        .map(|i| (p.priority(VertexId(i)), VertexId(i)))
        .collect();
    by_priority.sort();
    let mut odd_above = vec![Rational::zero(); n];
    let mut even_above = vec![Rational::zero(); n];
    let mut odd_sum = Rational::zero();
    let mut even_sum = Rational::zero();
    let mut idx = by_priority.len();
    while idx > 0 {
        // process one priority group at a time so ties are excluded
        let mut start = idx;
        while start > 0 && by_priority[start - 1].0 == by_priority[idx - 1].0 {
            start -= 1;
        }
        for &(_, v) in &by_priority[start..idx] {
            odd_above[v.index()] = odd_sum.clone();
            even_above[v.index()] = even_sum.clone();
        }
        for &(prio, v) in &by_priority[start..idx] {
            if prio % 2 == 1 {
                odd_sum += probs.probability(v);
            } else {
                even_sum += probs.probability(v);
            }
        }
        idx = start;
    }

    let bound = |v: usize| rat(2, 3) * probs.probability(VertexId(v));
    let odd_mass_above = (0..n)
        .map(|v| line(odd_above[v].clone(), bound(v)))
        .collect();
    let even_mass_above = (0..n)
        .map(|v| line(even_above[v].clone(), bound(v)))
        .collect();
    AssumptionCheck {
        total_escape,
        odd_mass_above,
        even_mass_above,
    }
}

/// Builds the stochastic arena simulating `(arena, p)` with escape
/// probabilities `probs`: original vertices keep their owners, one random
/// gadget per edge, and two absorbing sinks (the win sink on Eve's side of
/// the partition, the lose sink on Adam's).
pub fn reduce_direct(arena: &Arena, p: &PriorityMap, probs: &EscapeProbabilities) -> Result<Ssg> {
    arena.require_valid()?;
    arena.require_two_player()?;
    p.require_total_for(arena)?;
    probs.require_total_for(arena)?;

    let n = arena.num_vertices();
    let source_edges: Vec<(VertexId, VertexId)> = arena.edges().collect();
    let m = source_edges.len();
    let win = VertexId(n + m);
    let lose = VertexId(n + m + 1);

    let mut owners: Vec<Owner> = arena.vertices().map(|v| arena.owner(v)).collect();
    owners.extend(std::iter::repeat_n(Owner::Random, m));
    owners.push(Owner::Eve); // win sink
    owners.push(Owner::Adam); // lose sink

    let mut edges = Vec::with_capacity(3 * m + 2);
    let mut trans = BTreeMap::new();
    let mut gadgets = BTreeMap::new();
    for (i, &(u, v)) in source_edges.iter().enumerate() {
        let gadget = VertexId(n + i);
        gadgets.insert((u, v), gadget);
        let sink = if p.priority(v).is_multiple_of(2) {
            win
        } else {
            lose
        };
        let escape = probs.probability(v).clone();
        edges.push((u, gadget));
        edges.push((gadget, v));
        edges.push((gadget, sink));
        trans.insert(gadget, vec![(v, Rational::one() - &escape), (sink, escape)]);
    }
    edges.push((win, win));
    edges.push((lose, lose));

    let ssg = Ssg {
        arena: Arena::new(owners, edges, trans),
        win,
        lose,
        embedding: arena.vertices().collect(),
        gadgets,
    };
    ssg.require_valid()?;
    Ok(ssg)
}

/// The full reduction: compact the priorities, assign the dyadic escape
/// probabilities, check the assumptions (failure is a bug, not an input
/// error) and build the gadget arena. Eve wins the parity game from `v`
/// iff the value of the returned game at `embedding[v]` is at least 1/2.
pub fn reduce_parity_to_ssg(
    arena: &Arena,
    p: &PriorityMap,
) -> Result<(Ssg, CompactPriorityMap, EscapeProbabilities)> {
    let compact = compact_priorities(arena, p)?;
    let probs = assign_probabilities(&compact);
    if !check_assumptions(compact.as_map(), &probs).all_hold() {
        return Err(Error::AssumptionsViolated);
    }
    let ssg = reduce_direct(arena, compact.as_map(), &probs)?;
    Ok((ssg, compact, probs))
}

/// Carries a positional strategy of the source game over to a reduced
/// game: the choice `u -> v` becomes `u -> gadget(u, v)`, and the player's
/// own sink picks its self-loop.
pub fn lift_strategy(ssg: &Ssg, strategy: &PositionalStrategy) -> Result<PositionalStrategy> {
    let mut lifted = PositionalStrategy::new(strategy.player());
    for (u, v) in strategy.iter() {
        let gadget = ssg
            .gadget(u, v)
            .ok_or_else(|| Error::Semantic(format!("no gadget for source edge ({u}, {v})")))?;
        lifted.set(u, gadget);
    }
    let own_sink = match strategy.player() {
        Player::Eve => ssg.win,
        Player::Adam => ssg.lose,
    };
    if ssg.arena.owner(own_sink) == Owner::from(strategy.player()) {
        lifted.set(own_sink, own_sink);
    }
    Ok(lifted)
}

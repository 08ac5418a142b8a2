//! 2-player parity games: Zielonka's algorithm and a brute-force oracle.
//!
//! Throughout we use the min-priority convention: Eve wins a play if the
//! minimum priority seen infinitely often is even.

use std::collections::BTreeSet;

use crate::analysis::lasso_decompose;
use crate::arena::{
    enumerate_positional_strategies, strategy_count, Arena, Player, PositionalStrategy,
    PriorityMap, VertexId,
};
use crate::error::{Error, Result};

/// The determinacy partition of a 2-player parity game, with positional
/// strategies witnessing each region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegions {
    pub eve_wins: BTreeSet<VertexId>,
    pub adam_wins: BTreeSet<VertexId>,
    /// Defined on Eve's vertices inside `eve_wins`.
    pub eve_strategy: PositionalStrategy,
    /// Defined on Adam's vertices inside `adam_wins`.
    pub adam_strategy: PositionalStrategy,
}

impl WinningRegions {
    pub fn winner(&self, v: VertexId) -> Player {
        if self.eve_wins.contains(&v) {
            Player::Eve
        } else {
            Player::Adam
        }
    }

    pub fn eve_wins_from(&self, v: VertexId) -> bool {
        self.eve_wins.contains(&v)
    }
}

/// Least set containing `target` that `player` can force the play into:
/// closed under player vertices with some edge in and non-player vertices
/// with all edges in.
pub fn attractor(arena: &Arena, player: Player, target: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let all = vec![true; arena.num_vertices()];
    let (set, _) = attractor_in(arena, &all, player, target.iter().copied());
    set.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| VertexId(i))
        .collect()
}

/// Attractor restricted to the subgame `sub`, also returning, for each
/// player vertex attracted outside the target, a successor choice that
/// makes progress toward the target (lowest id among the closest).
fn attractor_in(
    arena: &Arena,
    sub: &[bool],
    player: Player,
    target: impl IntoIterator<Item = VertexId>,
) -> (Vec<bool>, Vec<(VertexId, VertexId)>) {
    let n = arena.num_vertices();
    let preds = arena.predecessors();
    let mut level: Vec<Option<usize>> = vec![None; n];
    let mut queue = std::collections::VecDeque::new();
    for v in target {
        if sub[v.index()] && level[v.index()].is_none() {
            level[v.index()] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let next_level = level[v.index()].unwrap() + 1;
        for &u in &preds[v.index()] {
            if !sub[u.index()] || level[u.index()].is_some() {
                continue;
            }
            let attracted = if arena.owner(u).player() == Some(player) {
                true
            } else {
                arena
                    .successors(u)
                    .iter()
                    .all(|&w| !sub[w.index()] || level[w.index()].is_some())
            };
            if attracted {
                level[u.index()] = Some(next_level);
                queue.push_back(u);
            }
        }
    }
    let in_set: Vec<bool> = level.iter().map(Option::is_some).collect();
    let mut moves = Vec::new();
    for u in arena.vertices() {
        let Some(lu) = level[u.index()] else { continue };
        if lu == 0 || arena.owner(u).player() != Some(player) {
            continue;
        }
        let choice = arena
            .successors(u)
            .iter()
            .copied()
            .filter(|w| sub[w.index()] && level[w.index()].is_some_and(|lw| lw < lu))
            .min_by_key(|w| (level[w.index()].unwrap(), *w))
            .expect("attracted player vertex has a progress edge");
        moves.push((u, choice));
    }
    (in_set, moves)
}

struct SubSolution {
    regions: [Vec<bool>; 2],
    strategies: [Vec<(VertexId, VertexId)>; 2],
}

fn index_player(i: usize) -> Player {
    if i == 0 {
        Player::Eve
    } else {
        Player::Adam
    }
}

fn solve_rec(arena: &Arena, p: &PriorityMap, sub: Vec<bool>) -> SubSolution {
    let n = arena.num_vertices();
    let empty = || SubSolution {
        regions: [vec![false; n], vec![false; n]],
        strategies: [Vec::new(), Vec::new()],
    };
    let Some(min_priority) = arena
        .vertices()
        .filter(|v| sub[v.index()])
        .map(|v| p.priority(v))
        .min()
    else {
        return empty();
    };
    let i = (min_priority % 2) as usize;
    let player = index_player(i);
    let target: Vec<VertexId> = arena
        .vertices()
        .filter(|v| sub[v.index()] && p.priority(*v) == min_priority)
        .collect();
    let (attr, attr_moves) = attractor_in(arena, &sub, player, target.iter().copied());
    let mut rest = sub.clone();
    for (r, a) in rest.iter_mut().zip(&attr) {
        *r = *r && !a;
    }
    let inner = solve_rec(arena, p, rest);
    if inner.regions[1 - i].iter().all(|&b| !b) {
        // the opponent wins nowhere in the subgame: `player` wins all of `sub`
        let mut strategies = inner.strategies;
        strategies[i].extend(attr_moves);
        for &v in &target {
            if arena.owner(v).player() == Some(player) {
                let choice = arena
                    .successors(v)
                    .iter()
                    .copied()
                    .find(|w| sub[w.index()])
                    .expect("subgame has no deadlocks");
                strategies[i].push((v, choice));
            }
        }
        let mut regions = [vec![false; n], vec![false; n]];
        regions[i] = sub;
        SubSolution {
            regions,
            strategies,
        }
    } else {
        let (escape, escape_moves) = attractor_in(
            arena,
            &sub,
            player.opponent(),
            inner.regions[1 - i]
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(v, _)| VertexId(v)),
        );
        let mut rest2 = sub.clone();
        for (r, e) in rest2.iter_mut().zip(&escape) {
            *r = *r && !e;
        }
        let outer = solve_rec(arena, p, rest2);
        let mut regions = outer.regions;
        for (r, e) in regions[1 - i].iter_mut().zip(&escape) {
            *r = *r || *e;
        }
        let mut strategies = outer.strategies;
        strategies[1 - i].extend(inner.strategies[1 - i].iter().copied());
        strategies[1 - i].extend(escape_moves);
        SubSolution {
            regions,
            strategies,
        }
    }
}

fn regions_from(arena: &Arena, solution: SubSolution) -> WinningRegions {
    let collect = |mask: &[bool]| -> BTreeSet<VertexId> {
        mask.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| VertexId(i))
            .collect()
    };
    let eve_wins = collect(&solution.regions[0]);
    let adam_wins = collect(&solution.regions[1]);
    debug_assert_eq!(eve_wins.len() + adam_wins.len(), arena.num_vertices());
    WinningRegions {
        eve_wins,
        adam_wins,
        eve_strategy: PositionalStrategy::from_pairs(
            Player::Eve,
            solution.strategies[0].iter().copied(),
        ),
        adam_strategy: PositionalStrategy::from_pairs(
            Player::Adam,
            solution.strategies[1].iter().copied(),
        ),
    }
}

/// Solves a 2-player parity game with Zielonka's recursive algorithm,
/// returning the winning regions and positional witness strategies.
pub fn solve_parity(arena: &Arena, p: &PriorityMap) -> Result<WinningRegions> {
    arena.require_valid()?;
    arena.require_two_player()?;
    p.require_total_for(arena)?;
    let sub = vec![true; arena.num_vertices()];
    Ok(regions_from(arena, solve_rec(arena, p, sub)))
}

/// Decides every vertex by enumerating positional strategy pairs and
/// evaluating the induced lasso plays. Positional determinacy makes this a
/// sound (if exponential) oracle for [`solve_parity`].
pub fn solve_parity_bruteforce(
    arena: &Arena,
    p: &PriorityMap,
    budget: u128,
) -> Result<WinningRegions> {
    arena.require_valid()?;
    arena.require_two_player()?;
    p.require_total_for(arena)?;
    let pairs =
        strategy_count(arena, Player::Eve).saturating_mul(strategy_count(arena, Player::Adam));
    if pairs > budget {
        return Err(Error::BudgetExceeded { pairs, budget });
    }
    let eve_strategies: Vec<_> = enumerate_positional_strategies(arena, Player::Eve).collect();
    let adam_strategies: Vec<_> = enumerate_positional_strategies(arena, Player::Adam).collect();
    let n = arena.num_vertices();

    let lasso_even = |v: VertexId, sigma: &PositionalStrategy, tau: &PositionalStrategy| -> bool {
        let lasso = lasso_decompose(arena, v, sigma, tau).expect("total strategies");
        lasso.minimum_cycle_priority(p).is_multiple_of(2)
    };

    // win set of a fixed Eve strategy: vertices from which it beats every tau
    let win_set = |sigma: &PositionalStrategy| -> BTreeSet<VertexId> {
        (0..n)
            .map(VertexId)
            .filter(|&v| adam_strategies.iter().all(|tau| lasso_even(v, sigma, tau)))
            .collect()
    };
    let lose_set = |tau: &PositionalStrategy| -> BTreeSet<VertexId> {
        (0..n)
            .map(VertexId)
            .filter(|&v| {
                eve_strategies
                    .iter()
                    .all(|sigma| !lasso_even(v, sigma, tau))
            })
            .collect()
    };

    let mut eve_wins = BTreeSet::new();
    let mut best_eve: Option<(PositionalStrategy, BTreeSet<VertexId>)> = None;
    for sigma in &eve_strategies {
        let set = win_set(sigma);
        if best_eve.as_ref().is_none_or(|(_, s)| set.len() > s.len()) {
            best_eve = Some((sigma.clone(), set.clone()));
        }
        eve_wins.extend(set);
    }
    let mut adam_wins = BTreeSet::new();
    let mut best_adam: Option<(PositionalStrategy, BTreeSet<VertexId>)> = None;
    for tau in &adam_strategies {
        let set = lose_set(tau);
        if best_adam.as_ref().is_none_or(|(_, s)| set.len() > s.len()) {
            best_adam = Some((tau.clone(), set.clone()));
        }
        adam_wins.extend(set);
    }

    // positional determinacy: regions partition V and single witnesses exist
    let (eve_witness, eve_covered) = best_eve.expect("at least one Eve strategy");
    let (adam_witness, adam_covered) = best_adam.expect("at least one Adam strategy");
    if eve_covered != eve_wins || adam_covered != adam_wins {
        return Err(Error::Internal(
            "no uniform positional witness found; determinacy violated".into(),
        ));
    }
    if eve_wins.len() + adam_wins.len() != n || !eve_wins.is_disjoint(&adam_wins) {
        return Err(Error::Internal(
            "brute-force regions do not partition the vertex set".into(),
        ));
    }

    let restrict = |strategy: &PositionalStrategy, region: &BTreeSet<VertexId>, player: Player| {
        PositionalStrategy::from_pairs(player, strategy.iter().filter(|(v, _)| region.contains(v)))
    };
    Ok(WinningRegions {
        eve_strategy: restrict(&eve_witness, &eve_wins, Player::Eve),
        adam_strategy: restrict(&adam_witness, &adam_wins, Player::Adam),
        eve_wins,
        adam_wins,
    })
}

/// True when the region partition holds and each winner's strategy defeats
/// every opposing positional strategy from every vertex of its region.
/// Exhaustive, so only suitable at small scale.
pub fn certify_regions(arena: &Arena, p: &PriorityMap, regions: &WinningRegions) -> bool {
    let partition_ok = regions.eve_wins.len() + regions.adam_wins.len() == arena.num_vertices()
        && regions.eve_wins.is_disjoint(&regions.adam_wins);
    if !partition_ok {
        return false;
    }
    let eve_ok = regions.eve_wins.iter().all(|&v| {
        enumerate_positional_strategies(arena, Player::Adam).all(|tau| {
            let full_sigma = complete_on_region(arena, &regions.eve_strategy, Player::Eve);
            let lasso = lasso_decompose(arena, v, &full_sigma, &tau).expect("total strategies");
            lasso.minimum_cycle_priority(p).is_multiple_of(2)
        })
    });
    let adam_ok = regions.adam_wins.iter().all(|&v| {
        enumerate_positional_strategies(arena, Player::Eve).all(|sigma| {
            let full_tau = complete_on_region(arena, &regions.adam_strategy, Player::Adam);
            let lasso = lasso_decompose(arena, v, &sigma, &full_tau).expect("total strategies");
            lasso.minimum_cycle_priority(p) % 2 == 1
        })
    });
    eve_ok && adam_ok
}

/// Extends a region-restricted strategy to a total one by picking the
/// lowest-id successor outside its domain (those vertices are losing for
/// the player, so the filler choice is irrelevant).
pub fn complete_on_region(
    arena: &Arena,
    strategy: &PositionalStrategy,
    player: Player,
) -> PositionalStrategy {
    let mut full = strategy.clone();
    for v in arena.vertices_of(player) {
        if full.choice(v).is_none() {
            full.set(v, arena.successors(v)[0]);
        }
    }
    full
}

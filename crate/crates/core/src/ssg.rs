//! Simple stochastic games and their exact solvers.
//!
//! A simple stochastic game is a stochastic reachability game with two
//! absorbing sinks; Eve maximizes the probability of reaching the win sink.
//! For stopping games the value vector is the unique solution of the
//! fixed-point system with `max` at Eve vertices, `min` at Adam vertices
//! and the weighted average at random vertices, anchored by value 1 at the
//! win sink and 0 at the lose sink. Everything here is exact rational
//! arithmetic; there is no floating point in any solver path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arena::{Arena, Owner, Player, PositionalStrategy, VertexId};
use crate::error::{Error, Result};
use crate::rational::{dyadic_exponent, int_bits, Rational};

/// A simple stochastic game. `embedding` and `gadgets` link a game produced
/// by a reduction back to its source: `embedding[v]` is the copy of source
/// vertex `v`, and `gadgets[(u, v)]` is the random vertex simulating source
/// edge `(u, v)`. Both are empty for games parsed from files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ssg {
    pub arena: Arena,
    pub win: VertexId,
    pub lose: VertexId,
    pub embedding: Vec<VertexId>,
    pub gadgets: BTreeMap<(VertexId, VertexId), VertexId>,
}

impl Ssg {
    pub fn new(arena: Arena, win: VertexId, lose: VertexId) -> Ssg {
        Ssg {
            arena,
            win,
            lose,
            embedding: Vec::new(),
            gadgets: BTreeMap::new(),
        }
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        v == self.win || v == self.lose
    }

    /// Copy of a source-game vertex, when this game came out of a reduction.
    pub fn embedded(&self, source: VertexId) -> Option<VertexId> {
        self.embedding.get(source.index()).copied()
    }

    pub fn gadget(&self, u: VertexId, v: VertexId) -> Option<VertexId> {
        self.gadgets.get(&(u, v)).copied()
    }

    /// Arena violations plus sink-specific ones.
    pub fn validate(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .arena
            .validate()
            .iter()
            .map(ToString::to_string)
            .collect();
        let n = self.arena.num_vertices();
        if self.win.index() >= n || self.lose.index() >= n {
            out.push("sink id out of range".into());
            return out;
        }
        if self.win == self.lose {
            out.push("win and lose sinks coincide".into());
        }
        for sink in [self.win, self.lose] {
            if self.arena.successors(sink) != [sink] {
                out.push(format!("sink {sink} is not absorbing"));
            }
        }
        for &copy in &self.embedding {
            if copy.index() >= n {
                out.push(format!("embedding target {copy} out of range"));
            }
        }
        out
    }

    pub fn require_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArena(violations))
        }
    }
}

/// Swaps the roles of the players and of the sinks; the mirrored game's
/// value at any vertex is one minus the original value.
pub fn mirror(ssg: &Ssg) -> Ssg {
    let owners = ssg
        .arena
        .vertices()
        .map(|v| match ssg.arena.owner(v) {
            Owner::Eve => Owner::Adam,
            Owner::Adam => Owner::Eve,
            Owner::Random => Owner::Random,
        })
        .collect();
    let trans = ssg
        .arena
        .random_vertices()
        .map(|v| (v, ssg.arena.distribution(v).unwrap().to_vec()))
        .collect();
    let arena = Arena::new(owners, ssg.arena.edges().collect::<Vec<_>>(), trans);
    Ssg {
        arena,
        win: ssg.lose,
        lose: ssg.win,
        embedding: ssg.embedding.clone(),
        gadgets: ssg.gadgets.clone(),
    }
}

/// Exact values, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueVector(Vec<Rational>);

impl ValueVector {
    pub fn new(values: Vec<Rational>) -> ValueVector {
        ValueVector(values)
    }

    pub fn value(&self, v: VertexId) -> &Rational {
        &self.0[v.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Rational)> + '_ {
        self.0.iter().enumerate().map(|(i, x)| (VertexId(i), x))
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    /// The half-threshold decision carried by simple stochastic games.
    pub fn at_least_half(&self, v: VertexId) -> bool {
        *self.value(v) >= crate::rational::half()
    }
}

/// True iff the sinks are reached almost surely from every vertex under
/// every strategy pair. Decided graph-theoretically: the players can avoid
/// absorption iff a nonempty set of non-sink vertices exists in which every
/// player vertex keeps some successor and every random vertex keeps its
/// whole support.
pub fn check_stopping(ssg: &Ssg) -> bool {
    closed_escape_set(ssg, |_, _| true).is_empty()
}

fn induced_next(
    ssg: &Ssg,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
    v: VertexId,
) -> Result<VertexId> {
    match ssg.arena.owner(v) {
        Owner::Eve => sigma.require_choice(v),
        Owner::Adam => tau.require_choice(v),
        Owner::Random => Err(Error::Internal(format!(
            "induced_next called on random vertex {v}"
        ))),
    }
}

/// Greatest set of non-sink vertices closed under `keep_edge`-restricted
/// player moves and full random supports.
fn closed_escape_set(ssg: &Ssg, keep_edge: impl Fn(VertexId, VertexId) -> bool) -> Vec<VertexId> {
    let n = ssg.arena.num_vertices();
    let mut in_set: Vec<bool> = (0..n).map(|i| !ssg.is_sink(VertexId(i))).collect();
    loop {
        let mut changed = false;
        for v in ssg.arena.vertices() {
            if !in_set[v.index()] {
                continue;
            }
            let stays = match ssg.arena.owner(v) {
                Owner::Random => ssg.arena.successors(v).iter().all(|&w| in_set[w.index()]),
                _ => ssg
                    .arena
                    .successors(v)
                    .iter()
                    .any(|&w| keep_edge(v, w) && in_set[w.index()]),
            };
            if !stays {
                in_set[v.index()] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).filter(|&i| in_set[i]).map(VertexId).collect()
}

/// Stopping check for the Markov chain induced by a fixed strategy pair.
fn chain_is_stopping(ssg: &Ssg, sigma: &PositionalStrategy, tau: &PositionalStrategy) -> bool {
    closed_escape_set(ssg, |v, w| match ssg.arena.owner(v) {
        Owner::Eve => sigma.choice(v) == Some(w),
        Owner::Adam => tau.choice(v) == Some(w),
        Owner::Random => true,
    })
    .is_empty()
}

/// Where a vertex's value comes from once player moves are fixed: a sink
/// constant or the value of a random vertex.
#[derive(Clone)]
enum Resolved {
    Const(Rational),
    Var(usize),
}

/// Exact absorption probabilities of the Markov chain induced by a
/// positional strategy pair: the unique solution of `x(v) = sum p x(w)`
/// with `x(win) = 1`, `x(lose) = 0`, solved by fraction-free elimination
/// over the random vertices.
pub fn evaluate_policy(
    ssg: &Ssg,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
) -> Result<ValueVector> {
    if !chain_is_stopping(ssg, sigma, tau) {
        return Err(Error::NotStopping);
    }
    let n = ssg.arena.num_vertices();
    let random: Vec<VertexId> = ssg.arena.random_vertices().collect();
    let var_of: BTreeMap<VertexId, usize> =
        random.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Follow deterministic moves until a sink or a random vertex. The
    // stopping check above rules out deterministic cycles.
    let mut memo: Vec<Option<Resolved>> = vec![None; n];
    fn resolve(
        ssg: &Ssg,
        sigma: &PositionalStrategy,
        tau: &PositionalStrategy,
        var_of: &BTreeMap<VertexId, usize>,
        memo: &mut Vec<Option<Resolved>>,
        v: VertexId,
    ) -> Result<Resolved> {
        if let Some(r) = &memo[v.index()] {
            return Ok(r.clone());
        }
        let r = if v == ssg.win {
            Resolved::Const(Rational::one())
        } else if v == ssg.lose {
            Resolved::Const(Rational::zero())
        } else if let Some(&i) = var_of.get(&v) {
            Resolved::Var(i)
        } else {
            let next = induced_next(ssg, sigma, tau, v)?;
            resolve(ssg, sigma, tau, var_of, memo, next)?
        };
        memo[v.index()] = Some(r.clone());
        Ok(r)
    }

    let k = random.len();
    let solution = if k == 0 {
        Vec::new()
    } else {
        // rows: x_i - sum_j coeff_ij x_j = const_i
        let mut matrix = vec![vec![Rational::zero(); k + 1]; k];
        for (i, &r) in random.iter().enumerate() {
            matrix[i][i] = Rational::one();
            for (w, p) in ssg.arena.distribution(r).unwrap() {
                match resolve(ssg, sigma, tau, &var_of, &mut memo, *w)? {
                    Resolved::Const(c) => matrix[i][k] += p * c,
                    Resolved::Var(j) => {
                        let entry = matrix[i][j].clone() - p;
                        matrix[i][j] = entry;
                    }
                }
            }
        }
        solve_linear_system(matrix)?
    };

    let mut values = Vec::with_capacity(n);
    for v in ssg.arena.vertices() {
        let value = match resolve(ssg, sigma, tau, &var_of, &mut memo, v)? {
            Resolved::Const(c) => c,
            Resolved::Var(j) => solution[j].clone(),
        };
        values.push(value);
    }
    Ok(ValueVector(values))
}

/// Solves `A x = b` given as `k` rows of `k + 1` rationals. Rows are scaled
/// to integers, eliminated fraction-free (Bareiss), and back-substituted
/// exactly. Pivot rows are picked by smallest pivot bit-length to curb
/// intermediate growth.
fn solve_linear_system(rows: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let k = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let scale = row
                .iter()
                .map(|x| x.denom().clone())
                .fold(BigInt::one(), num_integer::lcm);
            row.iter()
                .map(|x| {
                    let scaled = x * Rational::from_integer(scale.clone());
                    debug_assert!(scaled.is_integer());
                    scaled.to_integer()
                })
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    for col in 0..k {
        let pivot_row = (col..k)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| int_bits(&m[r][col]))
            .ok_or(Error::NotStopping)?;
        m.swap(col, pivot_row);
        for i in col + 1..k {
            for j in col + 1..=k {
                let num = &m[col][col] * &m[i][j] - &m[i][col] * &m[col][j];
                let (q, rem) = num_integer::Integer::div_rem(&num, &prev);
                debug_assert!(rem.is_zero(), "fraction-free step must divide exactly");
                m[i][j] = q;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }

    let mut x = vec![Rational::zero(); k];
    for i in (0..k).rev() {
        let mut acc = Rational::from_integer(m[i][k].clone());
        for j in i + 1..k {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

/// Outcome of verifying a candidate value vector against the fixed-point
/// equations. `residuals[v]` is `candidate(v) - rhs(v)` for the equation at
/// `v`, so the candidate is the value vector of a stopping game exactly
/// when every residual is zero.
#[derive(Clone, Debug)]
pub struct FixpointReport {
    pub holds: bool,
    pub residuals: Vec<Rational>,
}

/// Exact check of all five equation forms: the two sink anchors, `max` at
/// Eve vertices, `min` at Adam vertices and the weighted average at random
/// vertices.
pub fn verify_fixpoint(ssg: &Ssg, candidate: &ValueVector) -> Result<FixpointReport> {
    let n = ssg.arena.num_vertices();
    if candidate.len() != n {
        return Err(Error::NotTotal {
            expected: n,
            found: candidate.len(),
        });
    }
    let mut residuals = Vec::with_capacity(n);
    for v in ssg.arena.vertices() {
        let x = candidate.value(v);
        let residual = if v == ssg.win {
            x - Rational::one()
        } else if v == ssg.lose {
            x.clone()
        } else {
            let succ_values = ssg.arena.successors(v).iter().map(|&w| candidate.value(w));
            match ssg.arena.owner(v) {
                Owner::Eve => x - succ_values.max().expect("no deadlocks"),
                Owner::Adam => x - succ_values.min().expect("no deadlocks"),
                Owner::Random => {
                    let avg = ssg
                        .arena
                        .distribution(v)
                        .expect("random vertex has a distribution")
                        .iter()
                        .map(|(w, p)| p * candidate.value(*w))
                        .fold(Rational::zero(), |acc, t| acc + t);
                    x - avg
                }
            }
        };
        residuals.push(residual);
    }
    Ok(FixpointReport {
        holds: residuals.iter().all(Rational::is_zero),
        residuals,
    })
}

/// Result of strategy improvement: the exact value vector, optimal
/// positional strategies for both players, and the number of outer
/// improvement rounds taken.
#[derive(Clone, Debug)]
pub struct SsgSolution {
    pub values: ValueVector,
    pub eve_strategy: PositionalStrategy,
    pub adam_strategy: PositionalStrategy,
    pub improvements: usize,
}

fn initial_strategy(ssg: &Ssg, player: Player) -> PositionalStrategy {
    PositionalStrategy::from_pairs(
        player,
        ssg.arena
            .vertices_of(player)
            .map(|v| (v, ssg.arena.successors(v)[0])),
    )
}

fn best_response_adam(
    ssg: &Ssg,
    sigma: &PositionalStrategy,
    mut tau: PositionalStrategy,
) -> Result<(PositionalStrategy, ValueVector)> {
    loop {
        let vals = evaluate_policy(ssg, sigma, &tau)?;
        let mut improved = false;
        for v in ssg.arena.vertices_of(Player::Adam) {
            let best = ssg
                .arena
                .successors(v)
                .iter()
                .copied()
                .min_by(|a, b| vals.value(*a).cmp(vals.value(*b)).then(a.cmp(b)))
                .expect("no deadlocks");
            if vals.value(best) < vals.value(tau.require_choice(v)?) {
                tau.set(v, best);
                improved = true;
            }
        }
        if !improved {
            return Ok((tau, vals));
        }
    }
}

/// Solves a stopping simple stochastic game exactly by strategy
/// improvement for Eve against Adam's exact best response. The returned
/// vector satisfies the fixed-point equations (checked before returning)
/// and the strategies admit no improving switch for either player.
pub fn solve_ssg_strategy_improvement(ssg: &Ssg) -> Result<SsgSolution> {
    ssg.require_valid()?;
    if !check_stopping(ssg) {
        return Err(Error::NotStopping);
    }
    let mut sigma = initial_strategy(ssg, Player::Eve);
    let mut tau = initial_strategy(ssg, Player::Adam);
    let mut improvements = 0usize;
    loop {
        let (best_tau, vals) = best_response_adam(ssg, &sigma, tau)?;
        tau = best_tau;
        improvements += 1;
        let mut improved = false;
        for v in ssg.arena.vertices_of(Player::Eve) {
            let best = ssg
                .arena
                .successors(v)
                .iter()
                .copied()
                .max_by(|a, b| vals.value(*a).cmp(vals.value(*b)).then(b.cmp(a)))
                .expect("no deadlocks");
            if vals.value(best) > vals.value(sigma.require_choice(v)?) {
                sigma.set(v, best);
                improved = true;
            }
        }
        if !improved {
            let report = verify_fixpoint(ssg, &vals)?;
            if !report.holds {
                return Err(Error::Internal(
                    "strategy improvement converged to a non-fixpoint".into(),
                ));
            }
            return Ok(SsgSolution {
                values: vals,
                eve_strategy: sigma,
                adam_strategy: tau,
                improvements,
            });
        }
        if improvements > 100_000 {
            return Err(Error::Internal(
                "strategy improvement did not converge".into(),
            ));
        }
    }
}

/// Rewrites every random vertex with a dyadic distribution of denominator
/// `2^k` into a depth-`k` tree of fair-coin vertices; subtrees whose leaves
/// all point at the same successor collapse to a direct edge. The rewritten
/// vertex keeps its id as the tree root, so values at all original
/// vertices are unchanged. Rejects non-dyadic probabilities.
pub fn to_half_probability_form(ssg: &Ssg) -> Result<Ssg> {
    ssg.require_valid()?;
    let n = ssg.arena.num_vertices();
    let mut owners: Vec<Owner> = ssg.arena.vertices().map(|v| ssg.arena.owner(v)).collect();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut trans: BTreeMap<VertexId, Vec<(VertexId, Rational)>> = BTreeMap::new();
    let mut next_id = n;

    for v in ssg.arena.vertices() {
        if ssg.arena.owner(v) != Owner::Random {
            for &w in ssg.arena.successors(v) {
                edges.push((v, w));
            }
            continue;
        }
        let dist = ssg.arena.distribution(v).unwrap();
        let mut depth = 0u64;
        for (_, p) in dist {
            let k = dyadic_exponent(p).ok_or(Error::NonDyadic(v))?;
            depth = depth.max(k);
        }
        // leaf runs: successor repeated (numerator * 2^(depth - k)) times
        let runs: Vec<(VertexId, BigInt)> = dist
            .iter()
            .map(|(w, p)| {
                let k = dyadic_exponent(p).unwrap();
                (*w, p.numer() << (depth - k) as usize)
            })
            .collect();
        build_coin_tree(
            v,
            depth,
            runs,
            &mut owners,
            &mut edges,
            &mut trans,
            &mut next_id,
        );
    }

    let arena = Arena::new(owners, edges, trans);
    let out = Ssg {
        arena,
        win: ssg.win,
        lose: ssg.lose,
        embedding: ssg.embedding.clone(),
        gadgets: ssg.gadgets.clone(),
    };
    out.require_valid()?;
    Ok(out)
}

/// Builds the coin tree for one random vertex. `runs` are (successor,
/// multiplicity) pairs covering `2^depth` leaf slots in successor order.
fn build_coin_tree(
    root: VertexId,
    depth: u64,
    runs: Vec<(VertexId, BigInt)>,
    owners: &mut Vec<Owner>,
    edges: &mut Vec<(VertexId, VertexId)>,
    trans: &mut BTreeMap<VertexId, Vec<(VertexId, Rational)>>,
    next_id: &mut usize,
) {
    if runs.len() == 1 {
        // probability-one transition: nothing to split
        let target = runs[0].0;
        edges.push((root, target));
        trans.insert(root, vec![(target, Rational::one())]);
        return;
    }
    let half = BigInt::one() << (depth - 1) as usize;
    let mut left: Vec<(VertexId, BigInt)> = Vec::new();
    let mut right: Vec<(VertexId, BigInt)> = Vec::new();
    let mut remaining = half;
    for (w, count) in runs {
        if remaining.is_zero() {
            right.push((w, count));
        } else if count <= remaining {
            remaining -= &count;
            left.push((w, count));
        } else {
            let overflow = &count - &remaining;
            left.push((w, remaining.clone()));
            right.push((w, overflow));
            remaining = BigInt::zero();
        }
    }
    let mut child = |runs: Vec<(VertexId, BigInt)>| -> VertexId {
        if runs.len() == 1 {
            runs[0].0
        } else {
            let id = VertexId(*next_id);
            *next_id += 1;
            owners.push(Owner::Random);
            build_coin_tree(id, depth - 1, runs, owners, edges, trans, next_id);
            id
        }
    };
    let l = child(left);
    let r = child(right);
    debug_assert_ne!(l, r, "uniform subtrees collapse before reaching here");
    edges.push((root, l));
    edges.push((root, r));
    trans.insert(
        root,
        vec![(l, crate::rational::half()), (r, crate::rational::half())],
    );
}

/// Extends a value vector of a game to a candidate vector for its
/// fair-coin form: values of the original vertices are kept, and each
/// appended coin averages its successors. Coins are filled in decreasing
/// id order, which suffices because coin edges point only to original
/// vertices or to younger coins. A candidate that then passes
/// [`verify_fixpoint`] certifies value preservation without re-solving.
pub fn extend_values_to_coins(normalized: &Ssg, original_values: &ValueVector) -> ValueVector {
    let n0 = original_values.len();
    let n = normalized.arena.num_vertices();
    debug_assert!(n >= n0);
    let mut values = original_values.values().to_vec();
    values.resize(n, Rational::zero());
    for id in (n0..n).rev() {
        let v = VertexId(id);
        let dist = normalized
            .arena
            .distribution(v)
            .expect("appended vertices are coins");
        values[id] = dist
            .iter()
            .map(|(w, p)| p * &values[w.index()])
            .fold(Rational::zero(), |acc, t| acc + t);
    }
    ValueVector(values)
}

/// The guess-length bound on fair-coin-form values: every value, in lowest
/// terms, has numerator and denominator at most `4^(n-1)`.
pub fn within_denominator_bound(vertex_count: usize, values: &ValueVector) -> bool {
    let bound = BigInt::one() << (2 * (vertex_count - 1));
    values
        .iter()
        .all(|(_, x)| !x.is_negative() && *x.numer() <= bound && *x.denom() <= bound)
}

fn require_half_form(ssg: &Ssg) -> Result<()> {
    for v in ssg.arena.random_vertices() {
        let dist = ssg.arena.distribution(v).unwrap();
        let fair_coin = dist.len() == 2 && dist.iter().all(|(_, p)| *p == crate::rational::half());
        let sure_step = dist.len() == 1 && dist[0].1.is_one();
        if !fair_coin && !sure_step {
            return Err(Error::Semantic(format!(
                "vertex {v} is not a fair coin; normalize first"
            )));
        }
    }
    Ok(())
}

/// True iff every solved value of a fair-coin-form game stays within the
/// guess-length bound, with `n` the vertex count of the normalized game.
pub fn denominator_bound_check(ssg: &Ssg) -> Result<bool> {
    require_half_form(ssg)?;
    let solution = solve_ssg_strategy_improvement(ssg)?;
    Ok(within_denominator_bound(
        ssg.arena.num_vertices(),
        &solution.values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, Rational};

    /// v0 random coin between sinks; v1 = win, v2 = lose.
    fn coin_game() -> Ssg {
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
        Ssg::new(arena, VertexId(1), VertexId(2))
    }

    #[test]
    fn coin_value_is_half() {
        let ssg = coin_game();
        assert!(ssg.validate().is_empty());
        assert!(check_stopping(&ssg));
        let sigma = initial_strategy(&ssg, Player::Eve);
        let tau = initial_strategy(&ssg, Player::Adam);
        let vals = evaluate_policy(&ssg, &sigma, &tau).unwrap();
        assert_eq!(*vals.value(VertexId(0)), rat(1, 2));
        assert!(vals.at_least_half(VertexId(0)));
    }

    #[test]
    fn geometric_escape_has_value_one() {
        // gadget g loops back to itself via original vertex: x = 15/16 x + 1/16
        let mut trans = BTreeMap::new();
        trans.insert(
            VertexId(0),
            vec![(VertexId(0), rat(15, 16)), (VertexId(1), rat(1, 16))],
        );
        let arena = Arena::new(
            vec![Owner::Random, Owner::Eve, Owner::Adam],
            vec![
                (VertexId(0), VertexId(0)),
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(1)),
                (VertexId(2), VertexId(2)),
            ],
            trans,
        );
        let ssg = Ssg::new(arena, VertexId(1), VertexId(2));
        let vals = solve_ssg_strategy_improvement(&ssg).unwrap().values;
        assert_eq!(*vals.value(VertexId(0)), Rational::one());
    }

    #[test]
    fn eve_prefers_win_adam_prefers_coin() {
        // v0 Eve chooses between sinks; v1 Adam chooses between coin and win
        let mut trans = BTreeMap::new();
        trans.insert(
            VertexId(2),
            vec![(VertexId(3), rat(1, 2)), (VertexId(4), rat(1, 2))],
        );
        let arena = Arena::new(
            vec![
                Owner::Eve,
                Owner::Adam,
                Owner::Random,
                Owner::Eve,
                Owner::Adam,
            ],
            vec![
                (VertexId(0), VertexId(3)),
                (VertexId(0), VertexId(4)),
                (VertexId(1), VertexId(2)),
                (VertexId(1), VertexId(3)),
                (VertexId(2), VertexId(3)),
                (VertexId(2), VertexId(4)),
                (VertexId(3), VertexId(3)),
                (VertexId(4), VertexId(4)),
            ],
            trans,
        );
        let ssg = Ssg::new(arena, VertexId(3), VertexId(4));
        let solution = solve_ssg_strategy_improvement(&ssg).unwrap();
        assert_eq!(*solution.values.value(VertexId(0)), Rational::one());
        assert_eq!(solution.eve_strategy.choice(VertexId(0)), Some(VertexId(3)));
        assert_eq!(*solution.values.value(VertexId(1)), rat(1, 2));
        assert_eq!(
            solution.adam_strategy.choice(VertexId(1)),
            Some(VertexId(2))
        );
        let report = verify_fixpoint(&ssg, &solution.values).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn fixpoint_rejects_perturbation() {
        let ssg = coin_game();
        let solution = solve_ssg_strategy_improvement(&ssg).unwrap();
        assert!(verify_fixpoint(&ssg, &solution.values).unwrap().holds);
        let mut perturbed: Vec<Rational> = solution.values.values().to_vec();
        perturbed[0] += rat(1, 1000);
        let report = verify_fixpoint(&ssg, &ValueVector::new(perturbed)).unwrap();
        assert!(!report.holds);
        assert!(!report.residuals[0].is_zero());
    }

    #[test]
    fn non_stopping_rejected() {
        // two-player cycle that never reaches a sink
        let arena = Arena::two_player(
            vec![Player::Eve, Player::Adam, Player::Eve, Player::Adam],
            vec![
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(0)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(2)),
                (VertexId(3), VertexId(3)),
            ],
        );
        let ssg = Ssg::new(arena, VertexId(2), VertexId(3));
        assert!(!check_stopping(&ssg));
        assert!(matches!(
            solve_ssg_strategy_improvement(&ssg),
            Err(Error::NotStopping)
        ));
    }

    #[test]
    fn sinks_only_is_stopping() {
        let arena = Arena::two_player(
            vec![Player::Eve, Player::Adam],
            vec![(VertexId(0), VertexId(0)), (VertexId(1), VertexId(1))],
        );
        let ssg = Ssg::new(arena, VertexId(0), VertexId(1));
        assert!(check_stopping(&ssg));
        let solution = solve_ssg_strategy_improvement(&ssg).unwrap();
        assert_eq!(*solution.values.value(VertexId(0)), Rational::one());
        assert!(solution.values.value(VertexId(1)).is_zero());
        assert!(denominator_bound_check(&ssg).unwrap());
    }

    #[test]
    fn half_form_leaves_fair_coins_alone() {
        let ssg = coin_game();
        let normalized = to_half_probability_form(&ssg).unwrap();
        assert_eq!(normalized.arena.num_vertices(), 3);
        assert_eq!(normalized, ssg);
        assert!(denominator_bound_check(&normalized).unwrap());
    }

    #[test]
    fn half_form_splits_quarters() {
        // distribution (1/4, 3/4) over the sinks
        let mut trans = BTreeMap::new();
        trans.insert(
            VertexId(0),
            vec![(VertexId(1), rat(1, 4)), (VertexId(2), rat(3, 4))],
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
        let before = solve_ssg_strategy_improvement(&ssg).unwrap().values;
        let normalized = to_half_probability_form(&ssg).unwrap();
        // depth-2 tree: root plus one extra coin; the all-3/4 side collapsed
        assert_eq!(normalized.arena.num_vertices(), 4);
        for v in normalized.arena.random_vertices() {
            let dist = normalized.arena.distribution(v).unwrap();
            assert_eq!(dist.len(), 2);
            assert!(dist.iter().all(|(_, p)| *p == rat(1, 2)));
        }
        let after = solve_ssg_strategy_improvement(&normalized).unwrap().values;
        for v in ssg.arena.vertices() {
            assert_eq!(before.value(v), after.value(v));
        }
        assert_eq!(*after.value(VertexId(0)), rat(1, 4));
        assert!(denominator_bound_check(&normalized).unwrap());
    }

    #[test]
    fn half_form_rejects_non_dyadic() {
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
        assert!(matches!(
            to_half_probability_form(&ssg),
            Err(Error::NonDyadic(_))
        ));
    }

    #[test]
    fn mirror_complements_values() {
        let ssg = coin_game();
        let solution = solve_ssg_strategy_improvement(&ssg).unwrap();
        let mirrored = mirror(&ssg);
        let complements = solve_ssg_strategy_improvement(&mirrored).unwrap();
        for v in ssg.arena.vertices() {
            assert_eq!(
                Rational::one() - solution.values.value(v),
                *complements.values.value(v)
            );
        }
    }
}

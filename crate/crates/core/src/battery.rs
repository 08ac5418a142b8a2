//! Deterministic test batteries of small parity games.
//!
//! The exhaustive battery walks the space of 2-player parity games with up
//! to five vertices, out-degree at most two and priorities at most three.
//! The space grows far beyond any workable cap from three vertices on, so
//! each size level is sampled with a fixed stride that spreads the quota
//! evenly over the level; the whole listing is a pure function of the cap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{Arena, Player, PriorityMap, VertexId};
use crate::io::generate::generate_random_parity;

pub const MAX_VERTICES: usize = 5;
pub const MAX_PRIORITY: u32 = 3;

/// One battery member with a reproducible label.
#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub arena: Arena,
    pub priorities: PriorityMap,
}

/// Successor sets of out-degree 1 or 2 over `n` vertices: singletons in id
/// order, then pairs in lexicographic order.
fn successor_sets(n: usize) -> Vec<Vec<VertexId>> {
    let mut sets: Vec<Vec<VertexId>> = (0..n).map(|i| vec![VertexId(i)]).collect();
    for i in 0..n {
        for j in i + 1..n {
            sets.push(vec![VertexId(i), VertexId(j)]);
        }
    }
    sets
}

fn configs_per_vertex(n: usize) -> u128 {
    2 * (MAX_PRIORITY as u128 + 1) * (n as u128 + (n * (n - 1) / 2) as u128)
}

/// Number of distinct instances with exactly `n` vertices.
pub fn instance_space(n: usize) -> u128 {
    configs_per_vertex(n).pow(n as u32)
}

/// Decodes the instance at `index` within the level of `n`-vertex games:
/// the index is a mixed-radix numeral whose digit for each vertex selects
/// owner, priority and successor set.
pub fn decode_instance(n: usize, index: u128) -> Instance {
    let sets = successor_sets(n);
    let per_vertex = configs_per_vertex(n);
    let mut owners = Vec::with_capacity(n);
    let mut priorities = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut rest = index;
    for v in 0..n {
        let config = (rest % per_vertex) as usize;
        rest /= per_vertex;
        let owner = if config.is_multiple_of(2) {
            Player::Eve
        } else {
            Player::Adam
        };
        let priority = ((config / 2) % (MAX_PRIORITY as usize + 1)) as u32;
        let set = &sets[config / (2 * (MAX_PRIORITY as usize + 1))];
        owners.push(owner);
        priorities.push(priority);
        edges.extend(set.iter().map(|&w| (VertexId(v), w)));
    }
    Instance {
        label: format!("exhaustive-n{n}-i{index}"),
        arena: Arena::two_player(owners, edges),
        priorities: PriorityMap::new(priorities),
    }
}

fn quota_plan(cap: usize) -> Vec<(usize, usize)> {
    let mut remaining = cap;
    let mut plan = Vec::new();
    for n in 1..=2usize {
        let take = remaining.min(instance_space(n) as usize);
        plan.push((n, take));
        remaining -= take;
    }
    // split what is left across the larger levels, biased toward the
    // smaller ones where the stride is denser
    let shares = [(3usize, 40usize), (4, 30), (5, 30)];
    let left = remaining;
    for (i, (n, percent)) in shares.iter().enumerate() {
        let take = if i + 1 == shares.len() {
            remaining
        } else {
            (left * percent / 100).min(remaining)
        };
        plan.push((*n, take));
        remaining -= take;
    }
    plan
}

/// The deterministic exhaustive battery, capped at `cap` instances: sizes
/// one and two are complete, larger sizes are stride-sampled.
pub fn exhaustive_battery(cap: usize) -> Vec<Instance> {
    let mut out = Vec::with_capacity(cap);
    for (n, quota) in quota_plan(cap) {
        let total = instance_space(n);
        if quota == 0 {
            continue;
        }
        if quota as u128 >= total {
            for index in 0..total {
                out.push(decode_instance(n, index));
            }
        } else {
            for i in 0..quota as u128 {
                out.push(decode_instance(n, i * total / quota as u128));
            }
        }
    }
    out
}

/// Seeded random instances with up to `max_n` vertices.
pub fn random_battery(count: usize, max_n: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_n);
            let density = rng.gen_range(0.05..0.4);
            let instance_seed = rng.gen::<u64>();
            let (arena, priorities) =
                generate_random_parity(n, density, MAX_PRIORITY + 2, instance_seed);
            Instance {
                label: format!("random-{i}-n{n}-s{instance_seed}"),
                arena,
                priorities,
            }
        })
        .collect()
}

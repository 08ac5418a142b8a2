//! Seeded random parity game generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{Arena, Player, PriorityMap, VertexId};

/// Generates a random 2-player parity game: uniform owners, priorities
/// uniform in `[0, max_priority]`, one guaranteed successor per vertex
/// (deadlock-freedom) plus each further edge independently with the given
/// density. Deterministic for a fixed seed.
pub fn generate_random_parity(
    n: usize,
    density: f64,
    max_priority: u32,
    seed: u64,
) -> (Arena, PriorityMap) {
    assert!(n >= 1, "need at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owners: Vec<Player> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Player::Eve
            } else {
                Player::Adam
            }
        })
        .collect();
    let priorities: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_priority)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        let forced = rng.gen_range(0..n);
        edges.push((VertexId(u), VertexId(forced)));
        for v in 0..n {
            if v != forced && rng.gen_bool(density) {
                edges.push((VertexId(u), VertexId(v)));
            }
        }
    }
    (
        Arena::two_player(owners, edges),
        PriorityMap::new(priorities),
    )
}

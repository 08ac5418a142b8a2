//! Benchmark families and CSV reporting for the size comparison between
//! the direct reduction and the three-step chain.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{size_of, Arena, Player, PriorityMap, VertexId};
use crate::chain::chain_reduce;
use crate::error::{Error, Result};
use crate::parity::solve_parity;
use crate::reduction::reduce_parity_to_ssg;
use crate::ssg::solve_ssg_strategy_improvement;

/// One measured instance. Timings are wall-clock and therefore excluded
/// from the CSV by default to keep its bytes reproducible.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub direct_bits: u64,
    pub chain_meanpayoff_bits: u64,
    pub chain_discounted_bits: u64,
    pub chain_ssg_bits: u64,
    /// "ok" when all solver cross-checks agreed, "FAIL" otherwise,
    /// "skipped" when the instance is too large to solve.
    pub agreement: String,
    pub reduce_direct_ms: u128,
    pub reduce_chain_ms: u128,
    pub solve_ms: u128,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis())
}

/// The fixed arena of the priority sweep: `n` vertices on a deterministic
/// ring (no deadlocks) plus seeded extra edges up to exactly `m` edges.
pub fn sweep_arena(n: usize, m: usize, seed: u64) -> Arena {
    assert!(m >= n, "need at least a ring");
    assert!(m <= n * n, "cannot place that many distinct edges");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = vec![false; n * n];
    let mut edges = Vec::with_capacity(m);
    for u in 0..n {
        let v = (u + 1) % n;
        present[u * n + v] = true;
        edges.push((VertexId(u), VertexId(v)));
    }
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if !present[u * n + v] {
            present[u * n + v] = true;
            edges.push((VertexId(u), VertexId(v)));
        }
    }
    let owners = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                Player::Eve
            } else {
                Player::Adam
            }
        })
        .collect();
    Arena::two_player(owners, edges)
}

/// Priorities `i mod d`: exactly `d` distinct values when `d <= n`.
pub fn sweep_priorities(n: usize, d: usize) -> PriorityMap {
    PriorityMap::new((0..n).map(|i| (i % d) as u32).collect())
}

/// Sizes of both reductions at fixed `n = 64`, `m = 256`, with the number
/// of distinct priorities sweeping 2..=32. No solving; sizes only.
pub fn run_d_sweep() -> Result<Vec<BenchRecord>> {
    let n = 64;
    let m = 256;
    let arena = sweep_arena(n, m, 0xd5ee9);
    let mut records = Vec::new();
    for d in 2..=32usize {
        let p = sweep_priorities(n, d);
        let ((direct, chain), direct_ms, chain_ms) = {
            let (direct, direct_ms) = timed(|| reduce_parity_to_ssg(&arena, &p));
            let (chain, chain_ms) = timed(|| chain_reduce(&arena, &p));
            ((direct?, chain?), direct_ms, chain_ms)
        };
        let direct_bits = size_of(&direct.0.arena)?.total_bits;
        records.push(BenchRecord {
            instance: format!("d-sweep-{d:02}"),
            n,
            m,
            d,
            direct_bits,
            chain_meanpayoff_bits: chain.sizes.meanpayoff.total_bits,
            chain_discounted_bits: chain.sizes.discounted.total_bits,
            chain_ssg_bits: chain.sizes.ssg.total_bits,
            agreement: "skipped".into(),
            reduce_direct_ms: direct_ms,
            reduce_chain_ms: chain_ms,
            solve_ms: 0,
        });
    }
    Ok(records)
}

/// Small random instances, fully solved along both routes with all
/// cross-checks: parity winner, direct value threshold and chain value
/// threshold must coincide at every vertex.
pub fn run_small(count: usize, seed: u64) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for i in 0..count {
        let (arena, p) =
            crate::io::generate::generate_random_parity(4, 0.2, 5, seed.wrapping_add(i as u64));
        let d = p.distinct().len();
        let (direct_result, direct_ms) = timed(|| reduce_parity_to_ssg(&arena, &p));
        let (direct, ..) = direct_result?;
        let (chain_result, chain_ms) = timed(|| chain_reduce(&arena, &p));
        let chain = chain_result?;
        let (agreement, solve_ms) = timed(|| -> Result<bool> {
            let regions = solve_parity(&arena, &p)?;
            let direct_values = solve_ssg_strategy_improvement(&direct)?.values;
            let chain_values = solve_ssg_strategy_improvement(&chain.ssg)?.values;
            Ok(arena.vertices().all(|v| {
                let winner = regions.eve_wins_from(v);
                winner == direct_values.at_least_half(direct.embedded(v).unwrap())
                    && winner == chain_values.at_least_half(chain.ssg.embedded(v).unwrap())
            }))
        });
        records.push(BenchRecord {
            instance: format!("small-{i:03}"),
            n: arena.num_vertices(),
            m: arena.num_edges(),
            d,
            direct_bits: size_of(&direct.arena)?.total_bits,
            chain_meanpayoff_bits: chain.sizes.meanpayoff.total_bits,
            chain_discounted_bits: chain.sizes.discounted.total_bits,
            chain_ssg_bits: chain.sizes.ssg.total_bits,
            agreement: if agreement? {
                "ok".into()
            } else {
                "FAIL".into()
            },
            reduce_direct_ms: direct_ms,
            reduce_chain_ms: chain_ms,
            solve_ms,
        });
    }
    Ok(records)
}

/// CSV rows sorted by instance id. Timing columns only with
/// `with_timings`, since they vary across runs.
pub fn write_csv(records: &[BenchRecord], with_timings: bool) -> Result<String> {
    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.instance.cmp(&b.instance));
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "instance",
        "n",
        "m",
        "d",
        "direct_bits",
        "chain_meanpayoff_bits",
        "chain_discounted_bits",
        "chain_ssg_bits",
        "agreement",
    ];
    if with_timings {
        header.extend(["reduce_direct_ms", "reduce_chain_ms", "solve_ms"]);
    }
    writer
        .write_record(&header)
        .map_err(|e| Error::Internal(e.to_string()))?;
    for r in sorted {
        let mut row = vec![
            r.instance.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.d.to_string(),
            r.direct_bits.to_string(),
            r.chain_meanpayoff_bits.to_string(),
            r.chain_discounted_bits.to_string(),
            r.chain_ssg_bits.to_string(),
            r.agreement.clone(),
        ];
        if with_timings {
            row.extend([
                r.reduce_direct_ms.to_string(),
                r.reduce_chain_ms.to_string(),
                r.solve_ms.to_string(),
            ]);
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Human-readable table, timings included.
pub fn render_table(records: &[BenchRecord]) -> String {
    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.instance.cmp(&b.instance));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>4} {:>5} {:>3} {:>12} {:>12} {:>7} {:>9} {:>8}",
        "instance", "n", "m", "d", "direct_bits", "chain_bits", "ratio", "agreement", "time_ms"
    );
    for r in sorted {
        let ratio = r.chain_ssg_bits as f64 / r.direct_bits as f64;
        let _ = writeln!(
            out,
            "{:<14} {:>4} {:>5} {:>3} {:>12} {:>12} {:>7.2} {:>9} {:>8}",
            r.instance,
            r.n,
            r.m,
            r.d,
            r.direct_bits,
            r.chain_ssg_bits,
            ratio,
            r.agreement,
            r.reduce_direct_ms + r.reduce_chain_ms + r.solve_ms
        );
    }
    out
}

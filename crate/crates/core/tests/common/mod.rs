#![allow(dead_code)]

use std::sync::OnceLock;

use pg2ssg::battery::{exhaustive_battery, random_battery, Instance};

pub const EXHAUSTIVE_CAP: usize = 10_000;
pub const RANDOM_COUNT: usize = 1_000;
pub const RANDOM_MAX_N: usize = 8;
pub const RANDOM_SEED: u64 = 2024;

/// The shared battery: the capped exhaustive enumeration plus seeded
/// random instances. Built once per test binary.
pub fn battery() -> &'static [Instance] {
    static BATTERY: OnceLock<Vec<Instance>> = OnceLock::new();
    BATTERY.get_or_init(|| {
        let mut instances = exhaustive_battery(EXHAUSTIVE_CAP);
        instances.extend(random_battery(RANDOM_COUNT, RANDOM_MAX_N, RANDOM_SEED));
        instances
    })
}

/// Splits work across threads by instance, preserving determinism of the
/// aggregate via order-independent reduction.
pub fn for_each_parallel<T: Send>(
    instances: &'static [Instance],
    worker: impl Fn(&'static Instance) -> T + Send + Sync,
    mut combine: impl FnMut(T),
) {
    let threads = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some(instance) = instances.get(index) else {
                    break;
                };
                let out = worker(instance);
                results.lock().unwrap().push(out);
            });
        }
    });
    for item in results.into_inner().unwrap() {
        combine(item);
    }
}

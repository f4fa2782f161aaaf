//! Deterministic parallel replication driver.
//!
//! Replication `k` always draws from stream `k` of a ChaCha8 generator keyed
//! by the run seed, so results do not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Replications per reduction block; fixed so summation order is independent
/// of the thread count.
pub const BLOCK: u64 = 256;

/// Generator for replication `rep` of run `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Run `reps` independent replications and return their outputs in
/// replication order.
pub fn run_replications<T, F>(seed: u64, reps: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|rep| f(&mut replication_rng(seed, rep), rep))
        .collect()
}

/// Sum per-replication vectors of length `width`, reducing in fixed blocks.
pub fn sum_replications<F>(seed: u64, reps: u64, width: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [f64]) -> Result<()> + Sync,
{
    let blocks = reps.div_ceil(BLOCK);
    let partials: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; width];
            for rep in b * BLOCK..((b + 1) * BLOCK).min(reps) {
                f(&mut replication_rng(seed, rep), rep, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0.0; width];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

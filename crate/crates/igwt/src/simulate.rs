//! Generation-wise simulation of trees with deterministic seeding.
//!
//! Each ensemble replicate draws from its own ChaCha substream keyed by
//! (seed, replicate index), so corpora are bit-reproducible regardless of
//! how replicates are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::offspring::NativeParams;
use crate::structure::ModelSpec;
use crate::tree::OrderedTree;

/// Seed and runaway guards for simulation.
///
/// Hitting a guard is diagnostic, not routine: it usually signals a
/// parameterization whose trees are not almost-surely finite.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub seed: u64,
    pub max_vertices: usize,
    pub max_generations: u32,
}

impl SimConfig {
    pub fn new(seed: u64) -> Self {
        SimConfig { seed, max_vertices: 1_000_000, max_generations: 10_000 }
    }
}

/// Samples one tree: generation 0 is a single root, and every
/// generation-`n` vertex draws its offspring count from that generation's
/// distribution. Construction stops at the first empty generation.
/// Vertex ids are assigned in breadth-first order.
///
/// Feasibility is checked lazily, only for generations that are actually
/// reached.
pub fn sample_tree<R: Rng + ?Sized>(
    model: &ModelSpec,
    config: &SimConfig,
    rng: &mut R,
) -> Result<OrderedTree> {
    let mut natives: Vec<NativeParams> = Vec::new();
    let mut parents: Vec<i64> = vec![-1];
    // current generation as a range of vertex ids
    let mut gen_start = 0usize;
    let mut gen_end = 1usize;
    let mut generation = 0u32;
    while gen_start < gen_end {
        if generation >= config.max_generations {
            return Err(Error::GuardExceeded(format!(
                "generation limit {} reached",
                config.max_generations
            )));
        }
        if natives.len() <= generation as usize {
            natives.push(model.native_at(generation)?);
        }
        let native = &natives[generation as usize];
        for parent in gen_start..gen_end {
            let offspring = native.sample(rng) as usize;
            if parents.len() + offspring > config.max_vertices {
                return Err(Error::GuardExceeded(format!(
                    "vertex limit {} reached",
                    config.max_vertices
                )));
            }
            for _ in 0..offspring {
                parents.push(parent as i64);
            }
        }
        gen_start = gen_end;
        gen_end = parents.len();
        generation += 1;
    }
    OrderedTree::from_parents(&parents)
}

/// The substream used for replicate `index` of an ensemble.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples `count` independent trees, one substream per replicate.
/// Output order is replicate order and independent of scheduling.
pub fn sample_ensemble(
    model: &ModelSpec,
    count: usize,
    config: &SimConfig,
) -> Result<Vec<OrderedTree>> {
    let mut trees = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = replicate_rng(config.seed, i as u64);
        let tree = sample_tree(model, config, &mut rng).map_err(|e| Error::InReplicate {
            replicate: i,
            source: Box::new(e),
        })?;
        trees.push(tree);
    }
    Ok(trees)
}

//! Sampling weighted graphs from measure-valued graphons and exact-count
//! block models from step kernels.

use graphon_dynamics::graphon::{cut_norm, hom_density, SimpleGraph, StepKernel, ValueRange};
use graphon_dynamics::metropolis::esbm_sample;
use graphon_dynamics::mvg::{sample_weighted_graph, DiscreteMeasure, MvgStepKernel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> graphon_dynamics::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = MvgStepKernel::from_fn(2, |i, j| DiscreteMeasure::bernoulli(if i == j { 0.7 } else { 0.2 }))?;
    let mean = w.project();
    for n in [25, 50, 100, 200] {
        let g = sample_weighted_graph(&w, n, &mut rng);
        println!("n = {n:>3}: edge density {:.4} (limit {:.4})", hom_density(&SimpleGraph::edge(), &g), hom_density(&SimpleGraph::edge(), &mean));
    }

    let q = StepKernel::from_fn(3, ValueRange::UNIT, |i, j| if i == j { 0.1 } else { 0.6 })?;
    let esbm = esbm_sample(3, 20, &q, &mut rng)?;
    println!("ESBM: {} edges, rounded {}, cut distance of realized densities to q {:.2e}", esbm.edges.len(), esbm.quantized, cut_norm(&esbm.density.sub(&q)?));
    Ok(())
}

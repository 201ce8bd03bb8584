//! Sampled `n`-vertex objects from a measure-valued step kernel.

use rand::Rng;

use super::kernel::MvgStepKernel;
use crate::graphon::{StepKernel, ValueRange};

/// Blocks of `n` i.i.d. uniform positions.
pub fn sample_blocks<R: Rng + ?Sized>(r: usize, n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| ((rng.gen::<f64>() * r as f64) as usize).min(r - 1)).collect()
}

/// `μ(n, W)`: the `n × n` measure-valued kernel with cell `(a, b)` equal to
/// `W(U_a, U_b)`, including the diagonal.
pub fn sample_mvg<R: Rng + ?Sized>(w: &MvgStepKernel, n: usize, rng: &mut R) -> MvgStepKernel {
    let blocks = sample_blocks(w.r(), n.max(1), rng);
    MvgStepKernel::from_fn(n.max(1), |a, b| Ok(w.cell(blocks[a], blocks[b]).clone())).expect("cells come from a valid kernel")
}

/// `𝔾(n, W)`: positions as in [`sample_mvg`], then one independent draw from
/// each cell law `W(U_a, U_b)` for `a ≤ b`, mirrored.
pub fn sample_weighted_graph<R: Rng + ?Sized>(w: &MvgStepKernel, n: usize, rng: &mut R) -> StepKernel {
    let n = n.max(1);
    let blocks = sample_blocks(w.r(), n, rng);
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let x = w.cell(blocks[a], blocks[b]).quantile(rng.gen());
            values[a * n + b] = x;
            values[b * n + a] = x;
        }
    }
    let range = ValueRange::infer(&values);
    StepKernel::new(n, values, range).expect("draws lie in [-1, 1]")
}

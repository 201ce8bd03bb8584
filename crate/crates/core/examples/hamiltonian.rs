//! Energies built from homomorphism densities and their derivatives.

use graphon_dynamics::graphon::{SimpleGraph, StepKernel, ValueRange};
use graphon_dynamics::hamiltonian::{Hamiltonian, Objective};

fn main() -> graphon_dynamics::Result<()> {
    let h = Hamiltonian::triangle_edge(0.25);
    let ent = Hamiltonian::new(vec![(1.0, SimpleGraph::triangle()), (-0.5, SimpleGraph::edge())], 0.0)?.with_entropy(0.1)?;

    for p in [0.1, 0.3, 0.5, 0.7] {
        let w = StepKernel::constant(3, p, ValueRange::UNIT)?;
        println!("p = {p}: H = {:+.4}  H_ent = {:+.4}", h.evaluate(&w)?, ent.evaluate(&w)?);
    }

    let w = StepKernel::from_fn(3, ValueRange::UNIT, |i, j| 0.2 + 0.2 * ((i + j) % 3) as f64)?;
    let d = h.frechet_derivative(&w)?;
    println!("derivative at a 3-block kernel:");
    for i in 0..3 {
        println!("  {:+.4} {:+.4} {:+.4}", d.get(i, 0), d.get(i, 1), d.get(i, 2));
    }

    // at the boundary the entropy derivative blows up; dynamics use a clipped one
    let edge = StepKernel::from_fn(2, ValueRange::UNIT, |i, j| if i == j { 0.0 } else { 1.0 })?;
    println!("strict derivative at boundary: {}", ent.frechet_derivative(&edge).map(|_| "finite".to_string()).unwrap_or_else(|e| e.to_string()));
    println!("regularized: {:?}", ent.gradient(&edge).values());
    Ok(())
}

//! Projected gradient flow and its convergence rate.

use graphon_dynamics::flow::{measure_rates, run_flow};
use graphon_dynamics::graphon::{hom_density, SimpleGraph, StepKernel, ValueRange};
use graphon_dynamics::hamiltonian::{Hamiltonian, QuadraticWell};

fn main() -> graphon_dynamics::Result<()> {
    let init = StepKernel::from_fn(4, ValueRange::UNIT, |i, j| 0.3 + 0.1 * ((i * j) % 4) as f64)?;

    let target = StepKernel::constant(4, 0.6, ValueRange::UNIT)?;
    let well = QuadraticWell { lambda: 2.0, target: target.clone() };
    let traj = run_flow(&well, 1.0, &init, 1e-3, 5.0, 10, |_| {})?;
    let rep = measure_rates(&traj, &target, &well, 1.0)?;
    println!("quadratic well: slope {:.4} (expect -2), R^2 {:.6}, envelope ok {}", rep.slope, rep.r_squared, rep.envelope_ok);

    let h = Hamiltonian::triangle_edge(0.25).with_entropy(2.0)?;
    let w_star = run_flow(&h, 0.5, &init, 0.01, 40.0, 4000, |_| {})?.pop().expect("non-empty").w;
    let traj = run_flow(&h, 0.5, &init, 0.01, 2.0, 5, |_| {})?;
    for rec in traj.iter().step_by(8) {
        println!("t {:>4.1}  H {:+.6}  edge {:.4}", rec.t, rec.h, hom_density(&SimpleGraph::edge(), &rec.w));
    }
    let rep = measure_rates(&traj, &w_star, &h, 0.5)?;
    println!("entropic flow: slope {:.3} over t in [{:.1}, {:.1}]", rep.slope, rep.window.0, rep.window.1);
    Ok(())
}

//! Metropolis chain on block edge counts, with drift and quadratic
//! variation estimates against the diffusion limit.

use graphon_dynamics::graphon::{hom_density, SimpleGraph, StepKernel, ValueRange};
use graphon_dynamics::hamiltonian::{Hamiltonian, LinearObjective};
use graphon_dynamics::metropolis::{empirical_drift, empirical_qv, run_chain, ChainConfig};
use graphon_dynamics::sde::chain_drift_prediction;

fn main() -> graphon_dynamics::Result<()> {
    let cfg = ChainConfig { n: 16, r: 4, beta: 1.0, sigma: 1.0, gamma_n: 1.0 / 16.0, iterations: 2000, record_every: 500, seed: 1, ..Default::default() };
    let sc = cfg.scalings();
    println!("beta_nr = {:.3e}, s_n = {}, ell = {}, dt = {:.3e}", sc.beta_nr, sc.s_n, sc.ell, sc.dt);
    for w in cfg.warnings() {
        println!("warning: {w}");
    }

    let h = Hamiltonian::triangle_edge(0.25);
    let traj = run_chain(&cfg, &h, |_| {})?;
    for rec in &traj {
        println!("step {:>5}  t {:.4}  H {:+.5}  triangle {:.4}", rec.step, rec.t, rec.h, hom_density(&SimpleGraph::triangle(), &rec.q));
    }

    // one-step drift under a constant derivative
    let drift_cfg = ChainConfig { n: 32, gamma_n: 1.0 / 128.0, ..cfg.clone() };
    let g = StepKernel::from_fn(4, ValueRange::REAL, |i, j| if i == j { 0.0 } else { 16.0 })?;
    let q0 = StepKernel::constant(4, 0.5, ValueRange::UNIT)?;
    let est = empirical_drift(&drift_cfg, &LinearObjective { g: g.clone() }, &q0, 5000, 0.05)?;
    let pred = chain_drift_prediction(&g, &drift_cfg);
    println!("drift[0][1]: empirical {:.3} ± {:.3}, predicted {:.3}", est.mean[1], est.se[1], pred.get(0, 1));

    let qv = empirical_qv(&ChainConfig { n: 32, r: 2, gamma_n: 1.0 / 512.0, ..cfg }, &Hamiltonian::zero(), 0.05, 8)?;
    println!("quadratic variation over t = 0.05: off-diagonal {:.4}, diagonal {:.4}", qv.qv[1], qv.qv[0]);
    Ok(())
}

//! Reflected diffusion on `[0,1]^{r×r}`: Euler–Maruyama paths, local times
//! and the mean-field average over replicas.

use graphon_dynamics::graphon::{StepKernel, ValueRange};
use graphon_dynamics::hamiltonian::Hamiltonian;
use graphon_dynamics::sde::{drift_b, mean_field, run_sde, skorokhod_1d, DriftModel, SdeConfig};

fn main() -> graphon_dynamics::Result<()> {
    let h = Hamiltonian::triangle_edge(0.25);
    let init = StepKernel::constant(3, 0.5, ValueRange::UNIT)?;
    for model in [DriftModel::Gibbs, DriftModel::Displayed, DriftModel::Limit] {
        println!("b_r[0][1] under {:<9} = {:+.5}", model.name(), drift_b(&h, &init, 1.0, model).get(0, 1));
    }

    let cfg = SdeConfig { r: 3, sigma: 0.5, dt: 1e-3, horizon_t: 2.0, record_every: 500, seed: 4, ..Default::default() };
    let path = run_sde(&cfg, &h, &init, |_| {})?;
    for rec in &path {
        println!("t {:.2}  H {:+.4}  X[0][1] {:.4}  L0 {:.4}  L1 {:.4}", rec.t, rec.h, rec.x.get(0, 1), rec.l0_norm, rec.l1_norm);
    }

    let mf = mean_field(&SdeConfig { sigma: 0.1, ..cfg }, &h, &init, 64)?;
    let (t, m) = mf.last().expect("non-empty");
    println!("mean field at t = {t:.2}: X[0][1] = {:.4}", m.get(0, 1));

    let sk = skorokhod_1d(&[0.5, -0.2, 0.4, 1.6, 0.9], 0.0, 1.0)?;
    println!("reflected path {:?}, lower push {:?}, upper push {:?}", sk.path, sk.l_lo, sk.l_hi);
    Ok(())
}

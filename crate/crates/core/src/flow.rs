//! Deterministic gradient flow `ẇ = −β Dℋ(w)` on `[0,1]`-valued step
//! kernels, restricted to directions that keep `w` in the box, and
//! convergence-rate measurement along its trajectories.

use crate::error::{Error, Result};
use crate::graphon::{l2_dist, StepKernel, ValueRange};
use crate::hamiltonian::Objective;
use crate::sde::{drift_from_derivative, DriftModel};

const BOUNDARY_TOL: f64 = 1e-12;

/// Coordinates free to move under velocity `−β g`: interior entries, and
/// boundary entries whose velocity points into `[0, 1]`.
pub fn active_mask(w: &StepKernel, g: &StepKernel) -> Vec<bool> {
    w.values()
        .iter()
        .zip(g.values())
        .map(|(&x, &d)| {
            if x <= BOUNDARY_TOL {
                d < 0.0
            } else if x >= 1.0 - BOUNDARY_TOL {
                d > 0.0
            } else {
                true
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub w: StepKernel,
    pub t: f64,
    pub step: u64,
}

impl FlowState {
    pub fn new(init: &StepKernel) -> Result<Self> {
        if !init.values().iter().all(|&v| ValueRange::UNIT.contains(v)) {
            return Err(Error::InvalidKernel("flow state must lie in [0, 1]".into()));
        }
        Ok(FlowState { w: init.with_range(ValueRange::UNIT)?, t: 0.0, step: 0 })
    }
}

/// Velocity field driving the flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Velocity {
    /// `−β Dℋ(w)`
    #[default]
    Gradient,
    /// The diffusion drift `b_r(w)` of the given model.
    Drift(DriftModel),
}

/// One forward Euler step `w ← clamp(w − β dt Dℋ(w) 1_active)`.
pub fn flow_step(state: &mut FlowState, h: &dyn Objective, beta: f64, dt: f64) -> Result<()> {
    flow_step_with(state, h, beta, dt, Velocity::Gradient)
}

pub fn flow_step_with(state: &mut FlowState, h: &dyn Objective, beta: f64, dt: f64, velocity: Velocity) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("dt = {dt} must be positive")));
    }
    let g = h.gradient(&state.w);
    let mask = active_mask(&state.w, &g);
    let next: Vec<f64> = match velocity {
        Velocity::Gradient => {
            let step = beta * dt;
            state.w.values().iter().zip(g.values()).zip(&mask).map(|((&x, &d), &m)| if m { x - step * d } else { x }).collect()
        }
        Velocity::Drift(model) => {
            let b = drift_from_derivative(&g, beta, model);
            state.w.values().iter().zip(b.values()).zip(&mask).map(|((&x, &v), &m)| if m { x + v * dt } else { x }).collect()
        }
    };
    if let Some(k) = next.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: state.step + 1, what: format!("w entry {k}") });
    }
    let r = state.w.r();
    state.w = StepKernel::new(r, next.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(), ValueRange::UNIT)?;
    state.t += dt;
    state.step += 1;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowRecord {
    pub step: u64,
    pub t: f64,
    pub h: f64,
    pub w: StepKernel,
}

/// Integrates for `⌈horizon / dt⌉` steps, recording the start, every
/// `record_every`-th step and the last.
pub fn run_flow(
    h: &dyn Objective,
    beta: f64,
    init: &StepKernel,
    dt: f64,
    horizon: f64,
    record_every: u64,
    mut observer: impl FnMut(&FlowRecord),
) -> Result<Vec<FlowRecord>> {
    if record_every == 0 {
        return Err(Error::Precondition("record_every must be positive".into()));
    }
    let mut state = FlowState::new(init)?;
    let steps = (horizon / dt - 1e-9).ceil().max(0.0) as u64;
    let rec = |s: &FlowState| FlowRecord { step: s.step, t: s.t, h: h.energy(&s.w), w: s.w.clone() };
    let first = rec(&state);
    observer(&first);
    let mut out = vec![first];
    for k in 1..=steps {
        flow_step(&mut state, h, beta, dt)?;
        if k % record_every == 0 || k == steps {
            let r = rec(&state);
            observer(&r);
            out.push(r);
        }
    }
    Ok(out)
}

/// Convergence diagnostics of a flow trajectory toward `w*`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    /// Fit window `(t_start, t_end)`.
    pub window: (f64, f64),
    /// Least-squares slope of `log ‖w(t) − w*‖₂` against `t`.
    pub slope: f64,
    pub r_squared: f64,
    /// Points used by the fit.
    pub points: usize,
    /// Whether `H(w(t)) − H(w*) ≤ ‖w(0) − w*‖₂² / (2βt)` at every recorded `t > 0`.
    pub envelope_ok: bool,
}

/// Fits the exponential rate over the final half of the trajectory (points
/// where the distance has not underflowed) and checks the `1/(2βt)` envelope.
/// The `L²` distance stands in for `δ₂` in the envelope, which only loosens it.
pub fn measure_rates(traj: &[FlowRecord], w_star: &StepKernel, h: &dyn Objective, beta: f64) -> Result<RateReport> {
    let Some(last) = traj.last() else {
        return Err(Error::Precondition("empty trajectory".into()));
    };
    let t_half = last.t / 2.0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for rec in traj.iter().filter(|r| r.t >= t_half) {
        let d = l2_dist(&rec.w, w_star)?;
        if d > 1e-13 {
            xs.push(rec.t);
            ys.push(d.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::Precondition("fewer than two usable points in the fit window".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };

    let h_star = h.energy(w_star);
    let d0 = l2_dist(&traj[0].w, w_star)?;
    let envelope_ok = traj.iter().filter(|r| r.t > 0.0).all(|r| r.h - h_star <= d0 * d0 / (2.0 * beta * r.t) + 1e-12);
    Ok(RateReport { window: (xs[0], *xs.last().unwrap()), slope, r_squared, points: xs.len(), envelope_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Hamiltonian, QuadraticWell};

    fn k(r: usize, v: Vec<f64>) -> StepKernel {
        StepKernel::new(r, v, ValueRange::REAL).unwrap()
    }

    #[test]
    fn mask_case_table() {
        let w = k(2, vec![0.0, 1.0, 1.0, 0.5]).with_range(ValueRange::UNIT).unwrap();
        // outward pull at both boundaries
        assert_eq!(active_mask(&w, &k(2, vec![1.0, -1.0, -1.0, 3.0])), vec![false, false, false, true]);
        // inward pull at both boundaries
        assert_eq!(active_mask(&w, &k(2, vec![-1.0, 1.0, 1.0, -3.0])), vec![true, true, true, true]);
    }

    #[test]
    fn triangle_edge_first_step() {
        let h = Hamiltonian::triangle_edge(0.25);
        let mut s = FlowState::new(&StepKernel::constant(3, 0.5, ValueRange::UNIT).unwrap()).unwrap();
        flow_step(&mut s, &h, 2.0, 0.01).unwrap();
        assert!(s.w.values().iter().all(|&v| (v - (0.5 - 2.0 * 0.01 * 0.5)).abs() < 1e-15));
    }

    #[test]
    fn zero_derivative_is_fixed() {
        let init = StepKernel::from_fn(3, ValueRange::UNIT, |i, j| 0.2 * (i + j) as f64 / 2.0).unwrap();
        let traj = run_flow(&Hamiltonian::zero(), 1.0, &init, 0.1, 1.0, 1, |_| {}).unwrap();
        assert!(traj.iter().all(|r| r.w == init));
    }

    #[test]
    fn reparametrization_is_exact() {
        let h = Hamiltonian::triangle_edge(0.25);
        let init = StepKernel::from_fn(3, ValueRange::UNIT, |i, j| 0.1 + 0.1 * (i * j) as f64).unwrap();
        let a = run_flow(&h, 0.5, &init, 0.02, 1.0, 1, |_| {}).unwrap();
        let b = run_flow(&h, 1.0, &init, 0.01, 0.5, 1, |_| {}).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.w, y.w);
        }
    }

    #[test]
    fn quadratic_rate() {
        let target = StepKernel::from_fn(2, ValueRange::UNIT, |i, j| 0.3 + 0.1 * (i + j) as f64).unwrap();
        let h = QuadraticWell { lambda: 1.0, target: target.clone() };
        let init = StepKernel::constant(2, 0.9, ValueRange::UNIT).unwrap();
        let traj = run_flow(&h, 2.0, &init, 1e-3, 5.0, 10, |_| {}).unwrap();
        let rep = measure_rates(&traj, &target, &h, 2.0).unwrap();
        assert!((rep.slope / -2.0 - 1.0).abs() < 0.01, "{rep:?}");
        assert!(rep.r_squared > 0.999);
        assert!(rep.envelope_ok);
    }
}

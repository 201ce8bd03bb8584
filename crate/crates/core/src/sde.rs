//! The reflected diffusion on `r × r` kernels, its closed-form drift, and
//! the Skorokhod map on an interval.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphon::{l2_norm, StepKernel, ValueRange};
use crate::hamiltonian::Objective;
use crate::metropolis::{capacity, ChainConfig};

/// `Φ̄(x) = P(N(0,1) > x)`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `−2t v exp(t²‖v‖_F²) Φ̄(√2 t ‖v‖_F)` for a symmetric `r × r` matrix `v`
/// (row-major). This is `E[Y exp(−t⟨v, Y⟩_F⁺)]` for `Y` a symmetric
/// Gaussian matrix with `N(0,1)` off-diagonal and `N(0,2)` diagonal entries.
pub fn explicit_drift_formula(v: &[f64], t: f64) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k = -2.0 * t * (t * t * norm * norm).exp() * gaussian_tail(std::f64::consts::SQRT_2 * t * norm);
    v.iter().map(|x| k * x).collect()
}

/// Which version of the `r`-indexed drift to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DriftModel {
    /// `−2βg exp(β²r⁻⁶‖g‖₂²) Φ̄(√2 β r⁻³ ‖g‖₂)`: the form matching the
    /// Metropolis acceptance exponent `β_{n,r} ΔH`.
    #[default]
    Gibbs,
    /// `−2βg exp(β²r⁻²‖g‖₂²) Φ̄(√2 β r⁻¹ ‖g‖₂)`.
    Displayed,
    /// The `r → ∞` limit `−βg`.
    Limit,
}

impl DriftModel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gibbs" => Ok(DriftModel::Gibbs),
            "displayed" => Ok(DriftModel::Displayed),
            "limit" => Ok(DriftModel::Limit),
            _ => Err(Error::Parse(format!("unknown drift model '{s}' (gibbs, displayed, limit)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DriftModel::Gibbs => "gibbs",
            DriftModel::Displayed => "displayed",
            DriftModel::Limit => "limit",
        }
    }
}

/// Drift as a function of the derivative kernel `g = Dℋ(w)`.
pub fn drift_from_derivative(g: &StepKernel, beta: f64, model: DriftModel) -> StepKernel {
    let r = g.r() as f64;
    let norm = l2_norm(g);
    let k = match model {
        DriftModel::Limit => -beta,
        DriftModel::Gibbs => {
            -2.0 * beta
                * (beta * beta * norm * norm / r.powi(6)).exp()
                * gaussian_tail(std::f64::consts::SQRT_2 * beta * norm / r.powi(3))
        }
        DriftModel::Displayed => {
            -2.0 * beta
                * (beta * beta * norm * norm / (r * r)).exp()
                * gaussian_tail(std::f64::consts::SQRT_2 * beta * norm / r)
        }
    };
    g.map(ValueRange::REAL, |x| k * x).expect("finite drift")
}

/// `b_r(w)` for the objective `h`.
pub fn drift_b(h: &dyn Objective, w: &StepKernel, beta: f64, model: DriftModel) -> StepKernel {
    drift_from_derivative(&h.gradient(w), beta, model)
}

/// Expected normalized one-step increment `E[Δq]/(γ_n r⁻⁴)` of the
/// Metropolis chain at an interior state with derivative `g`, accounting
/// for the per-coordinate proposal variance `s_n / (cap γ_n)²` (diagonal
/// pairs have fewer slots, so their proposals are wider). Agrees with the
/// Gibbs drift when every proposal variance is 1.
pub fn chain_drift_prediction(g: &StepKernel, cfg: &ChainConfig) -> StepKernel {
    let r = g.r();
    let sc = cfg.scalings();
    let t = cfg.beta / (r as f64).powi(4);
    let mut tau2 = vec![0.0; r * r];
    let mut s2 = 0.0;
    for i in 0..r {
        for j in i..r {
            let cap = capacity(cfg.n, i, j) as f64;
            let tau = sc.s_n as f64 / (cap * cfg.gamma_n).powi(2);
            let m = if i == j { 1.0 } else { 2.0 };
            tau2[i * r + j] = tau;
            tau2[j * r + i] = tau;
            s2 += m * m * g.get(i, j).powi(2) * tau;
        }
    }
    let s = s2.sqrt();
    let k = -cfg.beta * (t * t * s2 / 2.0).exp() * gaussian_tail(t * s);
    StepKernel::from_fn(r, ValueRange::REAL, |i, j| {
        let m = if i == j { 1.0 } else { 2.0 };
        k * m * g.get(i, j) * tau2[i * r + j]
    })
    .expect("finite prediction")
}

/// Output of [`skorokhod_1d`]: the constrained path and cumulative pushing
/// at each end.
#[derive(Clone, Debug, PartialEq)]
pub struct Skorokhod {
    pub path: Vec<f64>,
    pub l_lo: Vec<f64>,
    pub l_hi: Vec<f64>,
}

/// Two-sided Skorokhod map on `[lo, hi]` of a path sampled at discrete
/// times (piecewise constant or piecewise linear between samples).
pub fn skorokhod_1d(path: &[f64], lo: f64, hi: f64) -> Result<Skorokhod> {
    if !(lo < hi) {
        return Err(Error::Precondition(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let Some(&first) = path.first() else {
        return Ok(Skorokhod { path: vec![], l_lo: vec![], l_hi: vec![] });
    };
    if !(lo..=hi).contains(&first) {
        return Err(Error::Precondition(format!("path starts at {first}, outside [{lo}, {hi}]")));
    }
    let mut out = Skorokhod { path: vec![first], l_lo: vec![0.0], l_hi: vec![0.0] };
    let (mut x, mut a, mut b) = (first, 0.0, 0.0);
    for w in path.windows(2) {
        let z = x + (w[1] - w[0]);
        if z < lo {
            a += lo - z;
            x = lo;
        } else if z > hi {
            b += z - hi;
            x = hi;
        } else {
            x = z;
        }
        out.path.push(x);
        out.l_lo.push(a);
        out.l_hi.push(b);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdeConfig {
    pub r: usize,
    pub beta: f64,
    pub sigma: f64,
    pub dt: f64,
    pub seed: u64,
    pub horizon_t: f64,
    pub drift: DriftModel,
    pub record_every: u64,
}

impl Default for SdeConfig {
    fn default() -> Self {
        SdeConfig { r: 4, beta: 1.0, sigma: 1.0, dt: 1e-3, seed: 0, horizon_t: 1.0, drift: DriftModel::Gibbs, record_every: 100 }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Precondition(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Precondition(format!("sigma = {} must be nonnegative", self.sigma)));
        }
        if !(self.horizon_t >= 0.0) {
            return Err(Error::Precondition("horizon_t must be nonnegative".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Precondition("record_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of Euler steps to reach the horizon.
    pub fn steps(&self) -> u64 {
        (self.horizon_t / self.dt - 1e-9).ceil().max(0.0) as u64
    }

    /// Warns when `dt ‖b(w)‖∞ > 0.1`.
    pub fn stability_warning(&self, h: &dyn Objective, w: &StepKernel) -> Option<String> {
        let b = drift_b(h, w, self.beta, self.drift).sup_norm();
        (self.dt * b > 0.1).then(|| format!("dt * |b|_inf = {:.3} > 0.1: step may be too coarse", self.dt * b))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdeState {
    pub x: StepKernel,
    /// Cumulative pushing at 0, `r × r`.
    pub l0: Vec<f64>,
    /// Cumulative pushing at 1, `r × r`.
    pub l1: Vec<f64>,
    pub t: f64,
    pub step: u64,
}

impl SdeState {
    pub fn new(init: &StepKernel) -> Result<Self> {
        if !init.values().iter().all(|&v| ValueRange::UNIT.contains(v)) {
            return Err(Error::InvalidKernel("initial state must lie in [0, 1]".into()));
        }
        let x = init.with_range(ValueRange::UNIT)?;
        let n = x.r() * x.r();
        Ok(SdeState { x, l0: vec![0.0; n], l1: vec![0.0; n], t: 0.0, step: 0 })
    }

    pub fn l0_norm(&self) -> f64 {
        self.l0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// One projected Euler–Maruyama step with the given standard normals, one
/// per unordered pair `i ≤ j` in row-major order.
pub fn em_step_with_noise(state: &mut SdeState, cfg: &SdeConfig, h: &dyn Objective, noise: &[f64]) -> Result<()> {
    let r = state.x.r();
    if noise.len() != r * (r + 1) / 2 {
        return Err(Error::Precondition(format!("expected {} normals, got {}", r * (r + 1) / 2, noise.len())));
    }
    let b = drift_b(h, &state.x, cfg.beta, cfg.drift);
    let scale = cfg.sigma * cfg.dt.sqrt();
    let mut next = state.x.values().to_vec();
    let mut k = 0;
    for i in 0..r {
        for j in i..r {
            let y = state.x.get(i, j) + b.get(i, j) * cfg.dt + scale * noise[k];
            k += 1;
            if !y.is_finite() {
                return Err(Error::NonFinite { step: state.step + 1, what: format!("X[{i}][{j}]") });
            }
            let (down, up) = ((-y).max(0.0), (y - 1.0).max(0.0));
            let v = y.clamp(0.0, 1.0);
            for (a, c) in [(i, j), (j, i)] {
                next[a * r + c] = v;
                state.l0[a * r + c] += down;
                state.l1[a * r + c] += up;
                if a == c {
                    break;
                }
            }
        }
    }
    state.x = StepKernel::new(r, next, ValueRange::UNIT)?;
    state.t += cfg.dt;
    state.step += 1;
    Ok(())
}

pub fn em_step(state: &mut SdeState, cfg: &SdeConfig, h: &dyn Objective, rng: &mut ChaCha8Rng) -> Result<()> {
    let r = state.x.r();
    let noise: Vec<f64> = (0..r * (r + 1) / 2).map(|_| StandardNormal.sample(rng)).collect();
    em_step_with_noise(state, cfg, h, &noise)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdeRecord {
    pub step: u64,
    pub t: f64,
    pub h: f64,
    pub x: StepKernel,
    pub l0_norm: f64,
    pub l1_norm: f64,
}

fn record(state: &SdeState, h: &dyn Objective) -> SdeRecord {
    SdeRecord {
        step: state.step,
        t: state.t,
        h: h.energy(&state.x),
        x: state.x.clone(),
        l0_norm: state.l0_norm(),
        l1_norm: state.l1_norm(),
    }
}

fn run_with_rng(
    cfg: &SdeConfig,
    h: &dyn Objective,
    init: &StepKernel,
    rng: &mut ChaCha8Rng,
    observer: &mut dyn FnMut(&SdeRecord),
) -> Result<Vec<SdeRecord>> {
    cfg.validate()?;
    let mut state = SdeState::new(init)?;
    let steps = cfg.steps();
    let first = record(&state, h);
    observer(&first);
    let mut out = vec![first];
    for k in 1..=steps {
        em_step(&mut state, cfg, h, rng)?;
        if k % cfg.record_every == 0 || k == steps {
            let rec = record(&state, h);
            observer(&rec);
            out.push(rec);
        }
    }
    Ok(out)
}

/// Integrates for `⌈horizon_t / dt⌉` steps, recording the start, every
/// `record_every`-th step and the last.
pub fn run_sde(cfg: &SdeConfig, h: &dyn Objective, init: &StepKernel, mut observer: impl FnMut(&SdeRecord)) -> Result<Vec<SdeRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    run_with_rng(cfg, h, init, &mut rng, &mut observer)
}

/// Entrywise average of `replicas` independent paths from `init`, at the
/// recorded times of [`run_sde`]. Replica `k` uses RNG stream `k + 1`.
pub fn mean_field(cfg: &SdeConfig, h: &dyn Objective, init: &StepKernel, replicas: usize) -> Result<Vec<(f64, StepKernel)>> {
    if replicas == 0 {
        return Err(Error::Precondition("need at least one replica".into()));
    }
    let paths: Vec<Vec<SdeRecord>> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64 + 1);
            run_with_rng(cfg, h, init, &mut rng, &mut |_| {})
        })
        .collect::<Result<_>>()?;
    let r = init.r();
    let m = replicas as f64;
    (0..paths[0].len())
        .map(|idx| {
            let mut acc = vec![0.0; r * r];
            for p in &paths {
                acc.iter_mut().zip(p[idx].x.values()).for_each(|(a, v)| *a += v / m);
            }
            let acc = acc.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
            Ok((paths[0][idx].t, StepKernel::new(r, acc, ValueRange::UNIT)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Hamiltonian;

    #[test]
    fn tail_values() {
        assert_eq!(gaussian_tail(0.0), 0.5);
        assert!((gaussian_tail(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        for x in [0.3, 1.7, 4.0] {
            assert!((gaussian_tail(-x) - (1.0 - gaussian_tail(x))).abs() < 1e-15);
        }
    }

    #[test]
    fn small_t_limit() {
        let v = [0.3, -1.0, -1.0, 2.0];
        let t = 1e-4;
        for (a, x) in explicit_drift_formula(&v, t).iter().zip(v) {
            assert!((a / (-t * x) - 1.0).abs() < 1e-3);
        }
        assert!(explicit_drift_formula(&[0.0; 4], 0.5).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn drift_models_agree_for_large_r() {
        // triangle-edge derivative at w = 1/2 is 3/4 - 1/4
        let g = StepKernel::constant(1000, 0.5, ValueRange::REAL).unwrap();
        for model in [DriftModel::Gibbs, DriftModel::Displayed] {
            let b = drift_from_derivative(&g, 1.0, model);
            assert!((b.get(3, 7) / (-0.5) - 1.0).abs() < 0.01, "{model:?}");
        }
    }

    #[test]
    fn drift_opposes_derivative() {
        let g = StepKernel::new(2, vec![0.4, -2.0, -2.0, 1.0], ValueRange::REAL).unwrap();
        for model in [DriftModel::Gibbs, DriftModel::Displayed, DriftModel::Limit] {
            let b = drift_from_derivative(&g, 3.0, model);
            assert!(b.values().iter().zip(g.values()).all(|(x, y)| x * y < 0.0));
            assert!(b.sup_norm() <= 2.0 * 3.0 * g.sup_norm() * (9.0 * l2_norm(&g).powi(2) / 4.0).exp());
        }
    }

    #[test]
    fn prediction_matches_gibbs_drift_off_diagonal() {
        let cfg = ChainConfig { n: 32, r: 4, beta: 2.0, gamma_n: 1.0 / 128.0, ..Default::default() };
        let g = StepKernel::from_fn(4, ValueRange::REAL, |i, j| if i == j { 0.0 } else { (i + j) as f64 - 2.5 }).unwrap();
        let p = chain_drift_prediction(&g, &cfg);
        let b = drift_from_derivative(&g, 2.0, DriftModel::Gibbs);
        for k in 0..16 {
            assert!((p.values()[k] - b.values()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn skorokhod_cases() {
        let down: Vec<f64> = (0..10).map(|k| -(k as f64) * 0.1).collect();
        let s = skorokhod_1d(&down, 0.0, 1.0).unwrap();
        assert!(s.path.iter().all(|&x| x == 0.0));
        for (l, y) in s.l_lo.iter().zip(&down) {
            assert!((l - y.abs()).abs() < 1e-15);
        }
        let inside = [0.5, 0.6, 0.4, 0.55];
        let s = skorokhod_1d(&inside, 0.0, 1.0).unwrap();
        assert_eq!(s.path, inside);
        assert!(s.l_lo.iter().chain(&s.l_hi).all(|&l| l == 0.0));
        assert!(skorokhod_1d(&[2.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_noise_zero_h_is_static() {
        let cfg = SdeConfig { sigma: 0.0, horizon_t: 0.1, dt: 0.01, ..Default::default() };
        let init = StepKernel::from_fn(4, ValueRange::UNIT, |i, j| 0.1 * (i + j) as f64).unwrap();
        let traj = run_sde(&cfg, &Hamiltonian::zero(), &init, |_| {}).unwrap();
        assert_eq!(traj.len(), 2);
        assert_eq!(traj[1].x, init);
        assert_eq!(traj[1].step, 10);
        let none = SdeConfig { horizon_t: 0.0, ..cfg };
        assert_eq!(run_sde(&none, &Hamiltonian::zero(), &init, |_| {}).unwrap().len(), 1);
    }

    #[test]
    fn local_times_only_move_on_pushes() {
        let cfg = SdeConfig { sigma: 2.0, dt: 0.05, r: 3, ..Default::default() };
        let mut s = SdeState::new(&StepKernel::constant(3, 0.02, ValueRange::UNIT).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (l0, l1) = (s.l0.clone(), s.l1.clone());
            em_step(&mut s, &cfg, &Hamiltonian::zero(), &mut rng).unwrap();
            for k in 0..9 {
                assert!(s.l0[k] >= l0[k] && s.l1[k] >= l1[k]);
                if s.l0[k] > l0[k] {
                    assert_eq!(s.x.values()[k], 0.0);
                }
                if s.l1[k] > l1[k] {
                    assert_eq!(s.x.values()[k], 1.0);
                }
            }
        }
    }
}

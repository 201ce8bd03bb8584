//! The empirical stochastic block model and the relaxed Metropolis chain on
//! its edge counts.
//!
//! Only the `r × r` matrix of per-colour-pair edge counts is tracked; the
//! chain on graphs projects exactly onto it. Off-diagonal pairs hold up to
//! `n²` edges, diagonal pairs up to `n(n−1)/2`.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphon::{StepKernel, ValueRange};
use crate::hamiltonian::Objective;

#[derive(Clone, Debug, PartialEq)]
pub enum ChainInit {
    /// Every density set to the nearest admissible value to this constant.
    Constant(f64),
    /// Densities quantized from a kernel.
    Kernel(StepKernel),
    /// Each count drawn uniformly from `0..=capacity`.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub n: usize,
    pub r: usize,
    pub beta: f64,
    pub sigma: f64,
    pub gamma_n: f64,
    pub iterations: u64,
    pub seed: u64,
    pub record_every: u64,
    /// Extra steps to record regardless of `record_every`.
    pub milestones: Vec<u64>,
    pub init: ChainInit,
    /// Replace the `s_n` proposal steps by a folded binomial draw. For
    /// profiling only; the law differs at the boundary.
    pub fast_proposal: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            n: 16,
            r: 4,
            beta: 1.0,
            sigma: 1.0,
            gamma_n: 1.0 / 16.0,
            iterations: 1000,
            seed: 0,
            record_every: 100,
            milestones: Vec::new(),
            init: ChainInit::Constant(0.5),
            fast_proposal: false,
        }
    }
}

/// Derived quantities of a chain configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalings {
    /// `β_{n,r} = β r⁻² / γ_n`
    pub beta_nr: f64,
    /// `s_n = ⌈γ_n² n⁴⌉` proposal steps
    pub s_n: u64,
    /// `ℓ_{n,r} = ⌈r⁻⁴ σ² γ_n n⁴⌉` relaxation steps
    pub ell: u64,
    /// Diffusion time per Metropolis step, `γ_n r⁻⁴`.
    pub dt: f64,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Precondition("n must be at least 2".into()));
        }
        if self.r == 0 {
            return Err(Error::Precondition("r must be positive".into()));
        }
        if !(self.gamma_n > 0.0 && self.gamma_n.is_finite()) {
            return Err(Error::Precondition(format!("gamma_n = {} must be positive", self.gamma_n)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Precondition(format!("sigma = {} must be nonnegative", self.sigma)));
        }
        if !self.beta.is_finite() {
            return Err(Error::Precondition("beta must be finite".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Precondition("record_every must be positive".into()));
        }
        Ok(())
    }

    pub fn scalings(&self) -> Scalings {
        let n4 = (self.n as f64).powi(4);
        let r = self.r as f64;
        let ell = if self.sigma == 0.0 {
            0
        } else {
            (self.sigma * self.sigma * self.gamma_n * n4 / r.powi(4)).ceil() as u64
        };
        Scalings {
            beta_nr: self.beta / (r * r * self.gamma_n),
            s_n: (self.gamma_n * self.gamma_n * n4).ceil() as u64,
            ell,
            dt: self.gamma_n / r.powi(4),
        }
    }

    /// Soft checks of the asymptotic regime for `γ_n`.
    pub fn warnings(&self) -> Vec<String> {
        let ln = (self.n as f64).ln();
        let mut out = Vec::new();
        if self.gamma_n * ln * ln > 1.0 {
            out.push(format!("gamma_n (log n)^2 = {:.3} > 1: gamma_n is large for this n", self.gamma_n * ln * ln));
        }
        if self.gamma_n * (self.n * self.n) as f64 / ln < 10.0 {
            out.push(format!(
                "gamma_n n^2 / log n = {:.3} < 10: proposals are close to single edge flips",
                self.gamma_n * (self.n * self.n) as f64 / ln
            ));
        }
        out
    }
}

/// Number of possible edges between colours `i` and `j`.
pub fn capacity(n: usize, i: usize, j: usize) -> u64 {
    let n = n as u64;
    if i == j {
        n * (n - 1) / 2
    } else {
        n * n
    }
}

/// One move of the lazy reflected walk on a count: interior counts step
/// `±1` by the coin; at `0` (resp. `cap`) heads moves inward, tails stays.
#[inline]
pub fn base_move(c: u64, cap: u64, heads: bool) -> u64 {
    if cap == 0 {
        0
    } else if c == 0 {
        heads as u64
    } else if c == cap {
        cap - heads as u64
    } else if heads {
        c + 1
    } else {
        c - 1
    }
}

/// Transition law of [`base_move`] from `c`, as `(next, probability)` pairs.
pub fn base_transition(c: u64, cap: u64) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = Vec::new();
    for heads in [true, false] {
        let next = base_move(c, cap, heads);
        match out.iter_mut().find(|(x, _)| *x == next) {
            Some(e) => e.1 += 0.5,
            None => out.push((next, 0.5)),
        }
    }
    out
}

/// State of the count chain. Counts are stored for the upper triangle in
/// row-major order.
#[derive(Clone, Debug)]
pub struct ChainState {
    n: usize,
    r: usize,
    counts: Vec<u64>,
    caps: Vec<u64>,
    step: u64,
    rng: ChaCha8Rng,
}

fn upper_pairs(r: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..r).flat_map(move |i| (i..r).map(move |j| (i, j)))
}

/// Nearest admissible count for density `q`.
pub fn quantize(q: f64, cap: u64) -> u64 {
    ((q.clamp(0.0, 1.0) * cap as f64).round() as u64).min(cap)
}

impl ChainState {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let caps: Vec<u64> = upper_pairs(cfg.r).map(|(i, j)| capacity(cfg.n, i, j)).collect();
        let counts = match &cfg.init {
            ChainInit::Constant(p) => caps.iter().map(|&c| quantize(*p, c)).collect(),
            ChainInit::Kernel(w) => {
                if w.r() != cfg.r {
                    return Err(Error::BlockMismatch { left: w.r(), right: cfg.r });
                }
                upper_pairs(cfg.r).zip(&caps).map(|((i, j), &c)| quantize(w.get(i, j), c)).collect()
            }
            ChainInit::Uniform => caps.iter().map(|&c| rng.gen_range(0..=c)).collect(),
        };
        Ok(ChainState { n: cfg.n, r: cfg.r, counts, caps, step: 0, rng })
    }

    /// Chain started from the quantization of `q`, with its own RNG stream.
    pub fn from_density(n: usize, q: &StepKernel, seed: u64, stream: u64) -> Self {
        let r = q.r();
        let caps: Vec<u64> = upper_pairs(r).map(|(i, j)| capacity(n, i, j)).collect();
        let counts = upper_pairs(r).zip(&caps).map(|((i, j), &c)| quantize(q.get(i, j), c)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ChainState { n, r, counts, caps, step: 0, rng }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    /// Upper-triangular edge counts, row-major.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn capacities(&self) -> &[u64] {
        &self.caps
    }

    pub fn density(&self) -> StepKernel {
        density_of(self.r, &self.counts, &self.caps)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `sweeps` independent base steps on a copy of `counts`.
    pub fn run_base(&mut self, counts: &mut [u64], sweeps: u64) {
        base_sweeps(counts, &self.caps, sweeps, &mut self.rng);
    }

    /// Draws a proposal: `s_n` base steps from the current counts.
    pub fn propose(&mut self, s_n: u64, fast: bool) -> Vec<u64> {
        let mut next = self.counts.clone();
        if fast {
            for (c, &cap) in next.iter_mut().zip(&self.caps) {
                let b = Binomial::new(s_n, 0.5).expect("valid binomial").sample(&mut self.rng) as i64;
                *c = fold(*c as i64 + 2 * b - s_n as i64, cap);
            }
        } else {
            base_sweeps(&mut next, &self.caps, s_n, &mut self.rng);
        }
        next
    }
}

fn fold(x: i64, cap: u64) -> u64 {
    if cap == 0 {
        return 0;
    }
    let period = 2 * cap as i64;
    let m = x.rem_euclid(period);
    if m <= cap as i64 {
        m as u64
    } else {
        (period - m) as u64
    }
}

fn density_of(r: usize, counts: &[u64], caps: &[u64]) -> StepKernel {
    let mut values = vec![0.0; r * r];
    for (k, (i, j)) in upper_pairs(r).enumerate() {
        let q = if caps[k] == 0 { 0.0 } else { counts[k] as f64 / caps[k] as f64 };
        values[i * r + j] = q;
        values[j * r + i] = q;
    }
    StepKernel::new(r, values, ValueRange::UNIT).expect("densities lie in [0, 1]")
}

fn base_sweeps<R: RngCore>(counts: &mut [u64], caps: &[u64], sweeps: u64, rng: &mut R) {
    let mut bits = 0u64;
    let mut left = 0u32;
    for _ in 0..sweeps {
        for (c, &cap) in counts.iter_mut().zip(caps) {
            if left == 0 {
                bits = rng.next_u64();
                left = 64;
            }
            *c = base_move(*c, cap, bits & 1 == 1);
            bits >>= 1;
            left -= 1;
        }
    }
}

/// One sweep of the base chain: every count moves independently.
pub fn base_step(state: &mut ChainState) {
    let mut counts = std::mem::take(&mut state.counts);
    state.run_base(&mut counts, 1);
    state.counts = counts;
    state.step += 1;
}

/// Outcome of one Metropolis step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub h_before: f64,
    pub h_proposal: f64,
    pub delta_h: f64,
    pub acc_prob: f64,
    pub accepted: bool,
}

/// Proposal by `s_n` base steps, acceptance with probability
/// `exp(−β_{n,r} [H_r(q̃) − H_r(q)]⁺)`, then `ℓ_{n,r}` unconditional base steps.
pub fn metropolis_step(state: &mut ChainState, cfg: &ChainConfig, sc: &Scalings, h: &dyn Objective) -> StepDiagnostics {
    let h_before = h.energy(&state.density());
    let proposal = state.propose(sc.s_n, cfg.fast_proposal);
    let h_proposal = h.energy(&density_of(state.r, &proposal, &state.caps));
    let delta_h = h_proposal - h_before;
    let acc_prob = if delta_h > 0.0 { (-sc.beta_nr * delta_h).exp() } else { 1.0 };
    let accepted = acc_prob >= 1.0 || state.rng.gen::<f64>() < acc_prob;
    if accepted {
        state.counts = proposal;
    }
    if sc.ell > 0 {
        let mut counts = std::mem::take(&mut state.counts);
        state.run_base(&mut counts, sc.ell);
        state.counts = counts;
    }
    state.step += 1;
    StepDiagnostics { h_before, h_proposal, delta_h, acc_prob, accepted }
}

/// A recorded point of a chain trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainRecord {
    pub step: u64,
    /// Diffusion time `step · γ_n r⁻⁴`.
    pub t: f64,
    pub h: f64,
    pub acc_prob: f64,
    pub accepted: bool,
    pub q: StepKernel,
}

/// Runs `cfg.iterations` Metropolis steps, recording the initial state,
/// every `record_every`-th step, each milestone and the last step. `observer` sees each record
/// as it is produced.
pub fn run_chain(cfg: &ChainConfig, h: &dyn Objective, mut observer: impl FnMut(&ChainRecord)) -> Result<Vec<ChainRecord>> {
    let sc = cfg.scalings();
    let mut state = ChainState::new(cfg)?;
    let q0 = state.density();
    let h0 = h.energy(&q0);
    if !h0.is_finite() {
        return Err(Error::NonFinite { step: 0, what: "H".into() });
    }
    let first = ChainRecord { step: 0, t: 0.0, h: h0, acc_prob: 1.0, accepted: true, q: q0 };
    observer(&first);
    let mut out = vec![first];
    for k in 1..=cfg.iterations {
        let d = metropolis_step(&mut state, cfg, &sc, h);
        if !d.h_proposal.is_finite() || !d.acc_prob.is_finite() {
            return Err(Error::NonFinite { step: k, what: "H or acceptance probability".into() });
        }
        if k % cfg.record_every == 0 || k == cfg.iterations || cfg.milestones.contains(&k) {
            let q = state.density();
            let rec = ChainRecord { step: k, t: k as f64 * sc.dt, h: h.energy(&q), acc_prob: d.acc_prob, accepted: d.accepted, q };
            observer(&rec);
            out.push(rec);
        }
    }
    Ok(out)
}

/// A sampled empirical stochastic block model.
#[derive(Clone, Debug, PartialEq)]
pub struct Esbm {
    /// Vertex `v` has colour `v / n`.
    pub edges: Vec<(usize, usize)>,
    pub density: StepKernel,
    /// Whether any entry of `q` had to be moved to an admissible value.
    pub quantized: bool,
}

/// Samples an ESBM with `r` colour classes of `n` vertices: for each colour
/// pair the nearest admissible number of edges is drawn uniformly without
/// replacement.
pub fn esbm_sample<R: Rng + ?Sized>(r: usize, n: usize, q: &StepKernel, rng: &mut R) -> Result<Esbm> {
    if q.r() != r {
        return Err(Error::BlockMismatch { left: q.r(), right: r });
    }
    if !(0..r * r).all(|k| ValueRange::UNIT.contains(q.values()[k])) {
        return Err(Error::InvalidKernel("ESBM densities must lie in [0, 1]".into()));
    }
    let mut edges = Vec::new();
    let mut counts = Vec::new();
    let mut caps = Vec::new();
    let mut quantized = false;
    for (i, j) in upper_pairs(r) {
        let cap = capacity(n, i, j);
        let m = quantize(q.get(i, j), cap);
        if (m as f64 - q.get(i, j) * cap as f64).abs() > 1e-9 {
            quantized = true;
        }
        for idx in sample_indices(rng, cap as usize, m as usize).into_iter() {
            if i == j {
                // decode the idx-th pair a < b within the block
                let (mut a, mut rest) = (0usize, idx);
                while rest >= n - 1 - a {
                    rest -= n - 1 - a;
                    a += 1;
                }
                edges.push((i * n + a, i * n + a + 1 + rest));
            } else {
                edges.push((i * n + idx / n, j * n + idx % n));
            }
        }
        counts.push(m);
        caps.push(cap);
    }
    Ok(Esbm { edges, density: density_of(r, &counts, &caps), quantized })
}

/// Monte-Carlo drift estimate at a fixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftEstimate {
    /// `E[Δq] / (γ_n r⁻⁴)`, `r × r`.
    pub mean: Vec<f64>,
    /// Standard errors of `mean`.
    pub se: Vec<f64>,
    pub trials: usize,
}

/// Runs `trials` independent Metropolis steps from the quantization of `q0`
/// and returns the normalized mean increment. Every entry of `q0` must lie
/// in `[eps, 1 − eps]`.
pub fn empirical_drift(cfg: &ChainConfig, h: &dyn Objective, q0: &StepKernel, trials: usize, eps: f64) -> Result<DriftEstimate> {
    cfg.validate()?;
    if q0.r() != cfg.r {
        return Err(Error::BlockMismatch { left: q0.r(), right: cfg.r });
    }
    if let Some(v) = q0.values().iter().find(|&&v| v < eps || v > 1.0 - eps) {
        return Err(Error::Precondition(format!("q0 entry {v} is within {eps} of the boundary")));
    }
    let sc = cfg.scalings();
    let r = cfg.r;
    let start = ChainState::from_density(cfg.n, q0, cfg.seed, 0);
    let base = start.density();
    let (sum, sumsq) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut s = ChainState::from_density(cfg.n, q0, cfg.seed, trial as u64 + 1);
            metropolis_step(&mut s, cfg, &sc, h);
            let d: Vec<f64> = s.density().values().iter().zip(base.values()).map(|(a, b)| a - b).collect();
            let d2 = d.iter().map(|x| x * x).collect::<Vec<f64>>();
            (d, d2)
        })
        .reduce(
            || (vec![0.0; r * r], vec![0.0; r * r]),
            |(mut a, mut b), (c, d)| {
                a.iter_mut().zip(&c).for_each(|(x, y)| *x += y);
                b.iter_mut().zip(&d).for_each(|(x, y)| *x += y);
                (a, b)
            },
        );
    let t = trials as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / t / sc.dt).collect();
    let se: Vec<f64> = sum
        .iter()
        .zip(&sumsq)
        .map(|(s, ss)| {
            let m = s / t;
            let var = (ss / t - m * m).max(0.0) * t / (t - 1.0).max(1.0);
            (var / t).sqrt() / sc.dt
        })
        .collect();
    Ok(DriftEstimate { mean, se, trials })
}

/// Realized quadratic variation of the density process.
#[derive(Clone, Debug, PartialEq)]
pub struct QvReport {
    /// Per-coordinate `Σ_k (Δq_k − mean Δq)²`, `r × r`, averaged over replicas.
    pub qv: Vec<f64>,
    /// Realized covariation between upper-triangular coordinates `a, b`,
    /// indexed `a · u + b` with `u = r(r+1)/2`.
    pub cross: Vec<f64>,
    pub steps: u64,
    pub replicas: usize,
}

/// Runs `replicas` chains for `⌊horizon_t r⁴ / γ_n⌋` steps each and
/// accumulates the realized quadratic variation of every coordinate.
pub fn empirical_qv(cfg: &ChainConfig, h: &dyn Objective, horizon_t: f64, replicas: usize) -> Result<QvReport> {
    cfg.validate()?;
    let sc = cfg.scalings();
    let steps = (horizon_t / sc.dt + 1e-9).floor() as u64;
    let r = cfg.r;
    let u = r * (r + 1) / 2;
    let per: Vec<(Vec<f64>, Vec<f64>)> = (0..replicas.max(1))
        .into_par_iter()
        .map(|rep| {
            let mut state = ChainState::new(cfg).expect("validated");
            state.rng.set_stream(rep as u64 + 1);
            let mut incs: Vec<Vec<f64>> = Vec::with_capacity(steps as usize);
            let mut prev = state.density().upper_triangle();
            for _ in 0..steps {
                metropolis_step(&mut state, cfg, &sc, h);
                let now = state.density().upper_triangle();
                incs.push(now.iter().zip(&prev).map(|(a, b)| a - b).collect());
                prev = now;
            }
            let k = incs.len().max(1) as f64;
            let mean: Vec<f64> = (0..u).map(|a| incs.iter().map(|d| d[a]).sum::<f64>() / k).collect();
            let mut cross = vec![0.0; u * u];
            for d in &incs {
                for a in 0..u {
                    for b in 0..u {
                        cross[a * u + b] += (d[a] - mean[a]) * (d[b] - mean[b]);
                    }
                }
            }
            let diag = (0..u).map(|a| cross[a * u + a]).collect();
            (diag, cross)
        })
        .collect();
    let reps = per.len() as f64;
    let mut qv_upper = vec![0.0; u];
    let mut cross = vec![0.0; u * u];
    for (d, c) in &per {
        qv_upper.iter_mut().zip(d).for_each(|(x, y)| *x += y / reps);
        cross.iter_mut().zip(c).for_each(|(x, y)| *x += y / reps);
    }
    let mut qv = vec![0.0; r * r];
    for (k, (i, j)) in upper_pairs(r).enumerate() {
        qv[i * r + j] = qv_upper[k];
        qv[j * r + i] = qv_upper[k];
    }
    Ok(QvReport { qv, cross, steps, replicas: per.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Hamiltonian;

    #[test]
    fn scalings_follow_the_definitions() {
        let cfg = ChainConfig { n: 16, r: 16, sigma: 1.0, gamma_n: 1.0 / 64.0, beta: 0.25, ..Default::default() };
        let sc = cfg.scalings();
        assert_eq!(sc.s_n, 16);
        assert_eq!(sc.ell, 1);
        assert!((sc.beta_nr - 0.0625).abs() < 1e-15);
        let zero = ChainConfig { sigma: 0.0, ..cfg.clone() };
        assert_eq!(zero.scalings().ell, 0);
    }

    #[test]
    fn base_move_cases() {
        assert_eq!(base_move(0, 10, false), 0);
        assert_eq!(base_move(0, 10, true), 1);
        assert_eq!(base_move(10, 10, true), 9);
        assert_eq!(base_move(10, 10, false), 10);
        assert_eq!(base_move(4, 10, true), 5);
        assert_eq!(base_move(4, 10, false), 3);
        assert_eq!(base_transition(0, 3), vec![(1, 0.5), (0, 0.5)]);
    }

    #[test]
    fn detailed_balance_for_uniform_law() {
        for cap in [1u64, 2, 4, 6] {
            let p = |from: u64, to: u64| base_transition(from, cap).iter().filter(|(x, _)| *x == to).map(|e| e.1).sum::<f64>();
            for a in 0..=cap {
                for b in 0..=cap {
                    assert_eq!(p(a, b), p(b, a));
                }
            }
        }
    }

    #[test]
    fn fold_reflects() {
        assert_eq!(fold(-1, 5), 1);
        assert_eq!(fold(6, 5), 4);
        assert_eq!(fold(13, 5), 3);
        assert_eq!(fold(3, 5), 3);
    }

    #[test]
    fn esbm_counts_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = StepKernel::new(2, vec![0.5, 0.25, 0.25, 1.0], ValueRange::UNIT).unwrap();
        let g = esbm_sample(2, 4, &q, &mut rng).unwrap();
        assert_eq!(g.density, q);
        assert!(!g.quantized);
        assert_eq!(g.edges.len(), 3 + 4 + 6);
        let mut dedup = g.edges.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), g.edges.len());
        assert!(g.edges.iter().all(|&(a, b)| a != b && a < 8 && b < 8));
        let empty = esbm_sample(2, 4, &StepKernel::constant(2, 0.0, ValueRange::UNIT).unwrap(), &mut rng).unwrap();
        assert!(empty.edges.is_empty());
    }

    #[test]
    fn zero_hamiltonian_always_accepts() {
        let cfg = ChainConfig { n: 8, r: 2, iterations: 50, ..Default::default() };
        let traj = run_chain(&cfg, &Hamiltonian::zero(), |_| {}).unwrap();
        assert!(traj.iter().all(|rec| rec.acc_prob == 1.0 && rec.accepted));
    }

    #[test]
    fn zero_iterations_records_the_start() {
        let cfg = ChainConfig { n: 8, r: 2, iterations: 0, ..Default::default() };
        let traj = run_chain(&cfg, &Hamiltonian::zero(), |_| {}).unwrap();
        assert_eq!(traj.len(), 1);
        assert!(traj[0].q.values().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn boundary_start_is_rejected_for_drift() {
        let cfg = ChainConfig { n: 8, r: 2, ..Default::default() };
        let q0 = StepKernel::constant(2, 0.0, ValueRange::UNIT).unwrap();
        assert!(empirical_drift(&cfg, &Hamiltonian::zero(), &q0, 10, 0.05).is_err());
    }
}

//! Monte-Carlo self-checks of the drift, tail and reflection formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graphon::{StepKernel, ValueRange};
use crate::hamiltonian::{Hamiltonian, LinearObjective};
use crate::metropolis::{empirical_drift, ChainConfig};
use crate::runner::OracleSpec;
use crate::sde::{drift_from_derivative, explicit_drift_formula, gaussian_tail, skorokhod_1d, DriftModel};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Runs every oracle check with RNG streams derived from `seed`.
pub fn run_oracles(spec: &OracleSpec, seed: u64) -> Vec<OracleResult> {
    vec![
        tail_quadrature(),
        explicit_drift(spec.gaussian_samples, seed),
        metropolis_drift(spec.drift_trials, seed, false),
        metropolis_drift(spec.drift_trials, seed, true),
        skorokhod_lipschitz(spec.skorokhod_pairs, seed),
    ]
}

fn tail_quadrature() -> OracleResult {
    // composite Simpson on [x, x + 12]
    let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut worst: f64 = 0.0;
    for x in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let m = 20_000;
        let h = 12.0 / m as f64;
        let mut s = density(x) + density(x + 12.0);
        for k in 1..m {
            s += density(x + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let q = s * h / 3.0;
        worst = worst.max((q - gaussian_tail(x)).abs() / q);
    }
    OracleResult { name: "gaussian_tail", pass: worst < 1e-9, detail: format!("max relative error {worst:.2e}") }
}

fn explicit_drift(samples: usize, seed: u64) -> OracleResult {
    let r = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1001);
    let mut v = vec![0.0; r * r];
    for i in 0..r {
        for j in i..r {
            let x: f64 = rng.gen_range(-1.0..1.0);
            v[i * r + j] = x;
            v[j * r + i] = x;
        }
    }
    let t = 0.2;
    let want = explicit_drift_formula(&v, t);
    let (mut sum, mut sq) = (vec![0.0; r * r], vec![0.0; r * r]);
    let mut y = vec![0.0; r * r];
    for _ in 0..samples {
        for i in 0..r {
            for j in i..r {
                let z: f64 = StandardNormal.sample(&mut rng);
                let z = if i == j { z * std::f64::consts::SQRT_2 } else { z };
                y[i * r + j] = z;
                y[j * r + i] = z;
            }
        }
        let dot: f64 = v.iter().zip(&y).map(|(a, b)| a * b).sum();
        let wgt = (-t * dot.max(0.0)).exp();
        for k in 0..r * r {
            sum[k] += y[k] * wgt;
            sq[k] += (y[k] * wgt).powi(2);
        }
    }
    let n = samples as f64;
    let worst = (0..r * r)
        .map(|k| {
            let m = sum[k] / n;
            let se = ((sq[k] / n - m * m).max(0.0) / n).sqrt();
            (m - want[k]).abs() / se
        })
        .fold(0.0, f64::max);
    OracleResult { name: "explicit_drift", pass: worst <= 4.0, detail: format!("max |z| = {worst:.2} over {samples} samples") }
}

fn metropolis_drift(trials: usize, seed: u64, control: bool) -> OracleResult {
    let r = 4;
    let cfg = ChainConfig { n: 32, r, beta: 1.0, sigma: 1.0, gamma_n: 1.0 / 128.0, seed, ..Default::default() };
    let q0 = StepKernel::constant(r, 0.5, ValueRange::UNIT).expect("valid");
    let g = if control {
        StepKernel::constant(r, 0.0, ValueRange::REAL).expect("valid")
    } else {
        let pattern = [1.0, -1.0, 0.5];
        StepKernel::from_fn(r, ValueRange::REAL, |i, j| if i == j { 0.0 } else { 32.0 * pattern[(i + j) % 3] }).expect("valid")
    };
    let expected = drift_from_derivative(&g, cfg.beta, DriftModel::Gibbs);
    let name = if control { "metropolis_drift_zero" } else { "metropolis_drift" };
    let result = if control {
        empirical_drift(&cfg, &Hamiltonian::zero(), &q0, trials, 0.05)
    } else {
        empirical_drift(&cfg, &LinearObjective { g }, &q0, trials, 0.05)
    };
    match result {
        Err(e) => OracleResult { name, pass: false, detail: e.to_string() },
        Ok(est) => {
            let worst = (0..r * r)
                .map(|k| (est.mean[k] - expected.values()[k]).abs() / est.se[k].max(1e-300))
                .fold(0.0, f64::max);
            OracleResult { name, pass: worst <= 3.0, detail: format!("max |z| = {worst:.2} over {trials} trials") }
        }
    }
}

fn skorokhod_lipschitz(pairs: usize, seed: u64) -> OracleResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1002);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let len = 200;
        let mut walk = || {
            let mut x: f64 = rng.gen();
            (0..len)
                .map(|k| {
                    if k > 0 {
                        x += 0.2 * rng.gen_range(-1.0..1.0);
                    }
                    x
                })
                .collect::<Vec<f64>>()
        };
        let a = walk();
        let b = walk();
        let sup_in = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let (ra, rb) = (skorokhod_1d(&a, 0.0, 1.0), skorokhod_1d(&b, 0.0, 1.0));
        if let (Ok(ra), Ok(rb)) = (ra, rb) {
            let sup_out = ra.path.iter().zip(&rb.path).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(sup_out / sup_in);
        }
    }
    OracleResult { name: "skorokhod_lipschitz", pass: worst <= 4.0, detail: format!("max ratio {worst:.3} over {pairs} pairs") }
}

use std::sync::Mutex;

use graphon_dynamics::flow::run_flow;
use graphon_dynamics::graphon::{
    cut_metric_upper, cut_norm, hom_density, l2_dist, PermSearch, SimpleGraph, StepKernel, ValueRange,
};
use graphon_dynamics::hamiltonian::{Hamiltonian, Objective};
use graphon_dynamics::metropolis::{empirical_qv, metropolis_step, ChainConfig, ChainInit, ChainState};
use graphon_dynamics::mvg::{w1, DiscreteMeasure};
use graphon_dynamics::sde::{em_step_with_noise, skorokhod_1d, DriftModel, SdeConfig, SdeState};
use proptest::prelude::*;

fn kernel_from(r: usize, raw: &[f64], range: ValueRange) -> StepKernel {
    StepKernel::from_fn(r, range, |i, j| raw[i.min(j) * r + i.max(j)]).unwrap()
}

fn kernel(lo: f64, hi: f64, range: ValueRange) -> impl Strategy<Value = StepKernel> {
    (2usize..=6).prop_flat_map(move |r| {
        prop::collection::vec(lo..hi, r * r).prop_map(move |raw| kernel_from(r, &raw, range))
    })
}

fn same_r_triple() -> impl Strategy<Value = (StepKernel, StepKernel, StepKernel)> {
    (2usize..=5).prop_flat_map(|r| {
        prop::collection::vec(0.0..1.0f64, 3 * r * r).prop_map(move |raw| {
            let k = |s: usize| kernel_from(r, &raw[s * r * r..(s + 1) * r * r], ValueRange::UNIT);
            (k(0), k(1), k(2))
        })
    })
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-1.0..1.0f64, 0.05..1.0f64), 1..5).prop_map(|pairs| {
        let s: f64 = pairs.iter().map(|p| p.1).sum();
        let atoms = pairs.iter().map(|p| p.0).collect();
        let mut w: Vec<f64> = pairs.iter().map(|p| p.1 / s).collect();
        let head: f64 = w[..w.len() - 1].iter().sum();
        *w.last_mut().unwrap() = 1.0 - head;
        DiscreteMeasure::new(atoms, w).unwrap()
    })
}

/// W1 as `∫₀¹ |F⁻¹(u) − G⁻¹(u)| du`, integrated exactly between the joint
/// jumps of the two quantile functions.
fn w1_quantile(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    fn sorted(m: &DiscreteMeasure) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = m.atoms().iter().copied().zip(m.weights().iter().copied()).collect();
        v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        v
    }
    let (sa, sb) = (sorted(a), sorted(b));
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (sa[0].1, sb[0].1);
    let mut total = 0.0;
    while i < sa.len() && j < sb.len() {
        let m = ra.min(rb);
        total += m * (sa[i].0 - sb[j].0).abs();
        ra -= m;
        rb -= m;
        if ra <= 1e-15 {
            i += 1;
            if i < sa.len() {
                ra = sa[i].1;
            }
        }
        if rb <= 1e-15 {
            j += 1;
            if j < sb.len() {
                rb = sb[j].1;
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_density_is_permutation_invariant(w in kernel(0.0, 1.0, ValueRange::UNIT), seed in any::<u64>()) {
        let r = w.r();
        let mut perm: Vec<usize> = (0..r).collect();
        let mut s = seed;
        for i in (1..r).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = w.permute(&perm).unwrap();
        for f in [SimpleGraph::edge(), SimpleGraph::path2(), SimpleGraph::triangle(), SimpleGraph::cycle4()] {
            prop_assert!((hom_density(&f, &w) - hom_density(&f, &p)).abs() < 1e-12);
        }
    }

    #[test]
    fn cut_norm_is_bounded_by_l1(w in kernel(-1.0, 1.0, ValueRange::SIGNED)) {
        let l1 = w.values().iter().map(|v| v.abs()).sum::<f64>() / (w.r() * w.r()) as f64;
        prop_assert!(cut_norm(&w) <= l1 + 1e-12);
    }

    #[test]
    fn fractional_cut_never_beats_vertex_optimum(
        w in kernel(-1.0, 1.0, ValueRange::SIGNED),
        f in prop::collection::vec(0.0..1.0f64, 12),
    ) {
        let r = w.r();
        let (x, y) = (&f[..r], &f[6..6 + r]);
        let mut s = 0.0;
        for i in 0..r {
            for j in 0..r {
                s += x[i] * w.get(i, j) * y[j];
            }
        }
        prop_assert!(s.abs() / (r * r) as f64 <= cut_norm(&w) + 1e-12);
    }

    #[test]
    fn cut_metric_triangle_inequality((a, b, c) in same_r_triple()) {
        let s = PermSearch::default();
        let ab = cut_metric_upper(&a, &b, &s).unwrap();
        let bc = cut_metric_upper(&b, &c, &s).unwrap();
        let ac = cut_metric_upper(&a, &c, &s).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12, "{ac} > {ab} + {bc}");
    }

    #[test]
    fn w1_matches_quantile_coupling(a in measure(), b in measure()) {
        prop_assert!((w1(&a, &b) - w1_quantile(&a, &b)).abs() < 1e-10);
    }

    #[test]
    fn skorokhod_one_sided_formula(steps in prop::collection::vec(-0.3..0.3f64, 1..200), x0 in 0.0..1.0f64) {
        // far upper barrier: reflection at 0 only, Z = X + max(0, sup(−X))
        let mut path = vec![x0];
        for d in &steps {
            path.push(path.last().unwrap() + d);
        }
        let out = skorokhod_1d(&path, 0.0, 1e9).unwrap();
        let mut run_min: f64 = 0.0;
        for (k, x) in path.iter().enumerate() {
            run_min = run_min.max(-x);
            prop_assert!((out.path[k] - (x + run_min)).abs() < 1e-12);
            prop_assert!((out.l_lo[k] - run_min).abs() < 1e-12);
        }
    }

    #[test]
    fn sde_is_permutation_equivariant(
        w in kernel(0.1, 0.9, ValueRange::UNIT),
        normals in prop::collection::vec(-2.0..2.0f64, 21 * 5),
        rot in 0usize..6,
    ) {
        let r = w.r();
        let perm: Vec<usize> = (0..r).map(|i| (i + rot) % r).collect();
        let u = r * (r + 1) / 2;
        let h = Hamiltonian::triangle_edge(0.25);
        let cfg = SdeConfig { r, dt: 1e-2, ..Default::default() };
        let (mut a, mut b) = (SdeState::new(&w).unwrap(), SdeState::new(&w.permute(&perm).unwrap()).unwrap());
        for step in 0..5 {
            let z = &normals[step * 21..step * 21 + u];
            let full = StepKernel::from_fn(r, ValueRange::REAL, |i, j| {
                let (i, j) = (i.min(j), i.max(j));
                z[i * r - i * (i + 1) / 2 + j]
            }).unwrap().permute(&perm).unwrap();
            em_step_with_noise(&mut a, &cfg, &h, z).unwrap();
            em_step_with_noise(&mut b, &cfg, &h, &full.upper_triangle()).unwrap();
        }
        let pa = a.x.permute(&perm).unwrap();
        prop_assert!(l2_dist(&pa, &b.x).unwrap() < 1e-12);
    }

    #[test]
    fn sigma_zero_leaves_no_free_steps(n in 2usize..64, r in 1usize..8, g in 0.001..0.5f64) {
        let cfg = ChainConfig { n, r, sigma: 0.0, gamma_n: g, ..Default::default() };
        prop_assert_eq!(cfg.scalings().ell, 0);
    }
}

#[test]
fn counts_stay_within_capacity() {
    // a steep energy drives the chain against both walls
    struct Wall;
    impl Objective for Wall {
        fn energy(&self, w: &StepKernel) -> f64 {
            w.values().iter().enumerate().map(|(k, v)| if k % 2 == 0 { -v } else { *v }).sum::<f64>() * 100.0
        }
        fn gradient(&self, w: &StepKernel) -> StepKernel {
            StepKernel::from_fn(w.r(), ValueRange::REAL, |i, j| if (i * w.r() + j) % 2 == 0 { -100.0 } else { 100.0 }).unwrap()
        }
    }
    let cfg = ChainConfig { n: 3, r: 3, beta: 50.0, gamma_n: 0.5, seed: 11, init: ChainInit::Uniform, ..Default::default() };
    let sc = cfg.scalings();
    let mut state = ChainState::new(&cfg).unwrap();
    for _ in 0..200_000 {
        metropolis_step(&mut state, &cfg, &sc, &Wall);
        assert!(state.counts().iter().zip(state.capacities()).all(|(c, cap)| c <= cap));
    }
}

#[test]
fn proposal_displacement_matches_gamma_squared() {
    let (n, gamma) = (32, 1.0 / 64.0);
    let cfg = ChainConfig { n, r: 2, gamma_n: gamma, seed: 5, ..Default::default() };
    let sc = cfg.scalings();
    let mut state = ChainState::new(&cfg).unwrap();
    let (c0, cap) = (state.counts()[1], state.capacities()[1]);
    let trials = 20_000;
    let mut sq = 0.0;
    for _ in 0..trials {
        let p = state.propose(sc.s_n, false);
        sq += ((p[1] as f64 - c0 as f64) / cap as f64).powi(2);
    }
    let msd = sq / trials as f64;
    // s_n / cap² = ⌈γ²n⁴⌉ / n⁴
    assert!((msd / (gamma * gamma) - 1.0).abs() < 0.05, "msd {msd}");
}

#[test]
fn acceptance_is_one_half_at_log_two() {
    // every move costs exactly log 2 / β_nr relative to the current state
    struct Moving {
        current: Mutex<Vec<f64>>,
        cost: f64,
    }
    impl Objective for Moving {
        fn energy(&self, w: &StepKernel) -> f64 {
            if *self.current.lock().unwrap() == w.values() { 0.0 } else { self.cost }
        }
        fn gradient(&self, w: &StepKernel) -> StepKernel {
            StepKernel::constant(w.r(), 0.0, ValueRange::REAL).unwrap()
        }
    }
    let cfg = ChainConfig { n: 16, r: 2, sigma: 0.0, gamma_n: 1.0 / 16.0, seed: 9, ..Default::default() };
    let sc = cfg.scalings();
    let mut state = ChainState::new(&cfg).unwrap();
    let h = Moving { current: Mutex::new(state.density().values().to_vec()), cost: std::f64::consts::LN_2 / sc.beta_nr };
    let (mut moved, mut accepted) = (0u32, 0u32);
    for _ in 0..20_000 {
        *h.current.lock().unwrap() = state.density().values().to_vec();
        let d = metropolis_step(&mut state, &cfg, &sc, &h);
        if d.delta_h > 0.0 {
            assert!((d.acc_prob - 0.5).abs() < 1e-12);
            moved += 1;
            accepted += d.accepted as u32;
        }
    }
    let rate = accepted as f64 / moved as f64;
    assert!((rate - 0.5).abs() < 0.02, "rate {rate} over {moved}");
}

#[test]
fn cross_variation_is_negligible() {
    let cfg = ChainConfig { n: 32, r: 2, gamma_n: 1.0 / 512.0, seed: 3, ..Default::default() };
    let rep = empirical_qv(&cfg, &Hamiltonian::zero(), 0.05, 16).unwrap();
    let u = 3;
    for a in 0..u {
        for b in 0..u {
            if a != b {
                let scale = (rep.cross[a * u + a] * rep.cross[b * u + b]).sqrt();
                assert!(rep.cross[a * u + b].abs() < 0.1 * scale, "{a},{b}: {:?}", rep.cross);
            }
        }
    }
}

#[test]
fn noiseless_sde_with_limit_drift_is_the_flow() {
    let h = Hamiltonian::triangle_edge(0.25);
    let init = StepKernel::from_fn(3, ValueRange::UNIT, |i, j| 0.2 + 0.15 * (i + j) as f64).unwrap();
    let cfg = SdeConfig { r: 3, sigma: 0.0, dt: 0.01, horizon_t: 2.0, drift: DriftModel::Limit, ..Default::default() };
    let flow = run_flow(&h, cfg.beta, &init, cfg.dt, cfg.horizon_t, 1, |_| {}).unwrap();
    let mut s = SdeState::new(&init).unwrap();
    for rec in &flow[1..] {
        em_step_with_noise(&mut s, &cfg, &h, &[0.0; 6]).unwrap();
        assert!(l2_dist(&s.x, &rec.w).unwrap() < 1e-12);
    }
}

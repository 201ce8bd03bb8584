//! Generalized cut norm, the two cut-type metrics on measure-valued step
//! kernels, and the invariant Wasserstein-2 metric.
//!
//! Both `‖·‖_■` and `𝕎_■` reduce to maximizing a vector-valued bilinear form
//! over row/column subsets `(s, t)`: every cell is summarized by a fixed
//! feature vector, features add over a rectangle, and a cheap functional of
//! the aggregate gives the value for that rectangle.

use super::kernel::{mvg_diff, MvgStepKernel, SignedMvg};
use super::measure::{w2, SignedMeasure};
use super::net::{level_value, LipschitzNet};
use crate::error::{Error, Result};
use crate::graphon::{cut_norm_exhaustive, minimize_over_permutations, same_r, PermSearch};

/// Largest `r` for which rectangle enumeration (`4^r` pairs) is attempted.
pub const RECTANGLE_LIMIT: usize = 10;

/// Result of a generalized cut norm evaluation: the true value lies in
/// `[lower, lower + epsilon]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenCut {
    pub lower: f64,
    pub epsilon: f64,
}

/// Feature vector of a signed measure for the lattice net with `m` segments:
/// entry 0 is the mass, entry `k ≥ 1` is `h·∫φ_k dν` with
/// `φ_k(ζ) = clamp((ζ − x_{k−1})/h, 0, 1)`. A lattice function with start
/// value `v₀` and steps `d_k ∈ {-1, 0, 1}` integrates to `v₀·f₀ + Σ d_k f_k`.
fn lattice_features(nu: &SignedMeasure, m: usize) -> Vec<f64> {
    let h = 2.0 / m as f64;
    let mut f = vec![0.0; m + 1];
    for (&a, &w) in nu.atoms().iter().zip(nu.weights()) {
        f[0] += w;
        for (k, fk) in f.iter_mut().enumerate().skip(1) {
            let x0 = -1.0 + (k - 1) as f64 * h;
            *fk += w * h * ((a - x0) / h).clamp(0.0, 1.0);
        }
    }
    f
}

/// `max |∫ψ dν|` over the lattice net for a measure with features `f`.
fn lattice_value(f: &[f64], m: usize, scratch: &mut [f64]) -> f64 {
    let mass = f[0];
    if mass.abs() <= 1e-14 {
        // every step word fits between the walls for some start level
        return f[1..].iter().map(|c| c.abs()).sum::<f64>() + mass.abs();
    }
    let (hi, lo) = scratch.split_at_mut(m + 1);
    for j in 0..=m {
        hi[j] = mass * level_value(j, m);
        lo[j] = hi[j];
    }
    for &c in &f[1..] {
        let (ph, pl): (Vec<f64>, Vec<f64>) = (hi.to_vec(), lo.to_vec());
        for j in 0..=m {
            let mut best_h = ph[j];
            let mut best_l = pl[j];
            if j > 0 {
                best_h = best_h.max(ph[j - 1] + c);
                best_l = best_l.min(pl[j - 1] + c);
            }
            if j < m {
                best_h = best_h.max(ph[j + 1] - c);
                best_l = best_l.min(pl[j + 1] - c);
            }
            hi[j] = best_h;
            lo[j] = best_l;
        }
    }
    let max = hi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = lo.iter().cloned().fold(f64::INFINITY, f64::min);
    max.max(-min).max(0.0)
}

/// `max_{s,t} value(Σ_{i∈s, j∈t} feats_ij)` with cells given as row-major
/// `r × r` blocks of `dim` features. Stops as soon as the running maximum
/// reaches `bound`.
fn max_over_rectangles(
    r: usize,
    dim: usize,
    feats: &[f64],
    bound: f64,
    mut value: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let mut col = vec![0.0; r * dim];
    let mut in_s = vec![false; r];
    let mut agg = vec![0.0; dim];
    let mut best = 0.0f64;
    for ks in 1u64..(1u64 << r) {
        let i = ks.trailing_zeros() as usize;
        let sign = if in_s[i] { -1.0 } else { 1.0 };
        in_s[i] = !in_s[i];
        for (c, v) in col.iter_mut().zip(&feats[i * r * dim..(i + 1) * r * dim]) {
            *c += sign * v;
        }
        agg.iter_mut().for_each(|a| *a = 0.0);
        let mut in_t = vec![false; r];
        for kt in 1u64..(1u64 << r) {
            let j = kt.trailing_zeros() as usize;
            let sgn = if in_t[j] { -1.0 } else { 1.0 };
            in_t[j] = !in_t[j];
            for (a, c) in agg.iter_mut().zip(&col[j * dim..(j + 1) * dim]) {
                *a += sgn * c;
            }
            let v = value(&agg);
            if v > best {
                best = v;
                if best >= bound {
                    return best;
                }
            }
        }
    }
    best
}

fn check_rectangles(r: usize) -> Result<()> {
    if r > RECTANGLE_LIMIT {
        Err(Error::TooLarge { r, limit: RECTANGLE_LIMIT })
    } else {
        Ok(())
    }
}

fn lattice_feature_table(w: &SignedMvg, m: usize) -> Vec<f64> {
    w.cells().iter().flat_map(|c| lattice_features(c, m)).collect()
}

/// `‖W‖_■` bracketed by the net: `lower = max_{ψ ∈ net} ‖Γ(ψ, W)‖_□`, and
/// `epsilon = radius · max cell total variation` bounds the gap to the
/// supremum over all BL-1 functions.
pub fn gen_cut_norm(w: &SignedMvg, net: &LipschitzNet) -> Result<GenCut> {
    let r = w.r();
    let epsilon = net.radius() * w.max_total_variation();
    let lower = match net.explicit() {
        Some(functions) => {
            let mut best = 0.0f64;
            for psi in functions {
                best = best.max(cut_norm_exhaustive(&w.gamma(psi))?);
            }
            best
        }
        None => {
            check_rectangles(r)?;
            let m = net.segments().expect("lattice net");
            let feats = lattice_feature_table(w, m);
            let mut scratch = vec![0.0; 2 * (m + 1)];
            max_over_rectangles(r, m + 1, &feats, f64::INFINITY, |agg| lattice_value(agg, m, &mut scratch))
                / (r * r) as f64
        }
    };
    Ok(GenCut { lower, epsilon })
}

/// `Δ_■(W1, W2)` over block permutations: `min_π` of the net lower bound of
/// `‖W1 − W2∘π‖_■`. The true cut distance is at most this plus the net gap.
pub fn delta_black(w1: &MvgStepKernel, w2: &MvgStepKernel, net: &LipschitzNet, search: &PermSearch) -> Result<f64> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r();
    if net.explicit().is_some() {
        let (best, _) = minimize_over_permutations(r, search, |p, _| {
            let d = mvg_diff(w1, &w2.permute(p).expect("valid permutation")).expect("same r");
            gen_cut_norm(&d, net).map(|g| g.lower).unwrap_or(f64::INFINITY)
        });
        return Ok(best);
    }
    check_rectangles(r)?;
    let m = net.segments().expect("lattice net");
    let dim = m + 1;
    let f1 = lattice_feature_table(&w1.to_signed(), m);
    let f2 = lattice_feature_table(&w2.to_signed(), m);
    let mut diff = vec![0.0; r * r * dim];
    let mut scratch = vec![0.0; 2 * dim];
    let norm = (r * r) as f64;
    let (best, _) = minimize_over_permutations(r, search, |p, bound| {
        for i in 0..r {
            for j in 0..r {
                let src = (p[i] * r + p[j]) * dim;
                let dst = (i * r + j) * dim;
                for k in 0..dim {
                    diff[dst + k] = f1[dst + k] - f2[src + k];
                }
            }
        }
        max_over_rectangles(r, dim, &diff, bound * norm, |agg| lattice_value(agg, m, &mut scratch)) / norm
    });
    Ok(best)
}

/// `𝕎_■(W1, W2)` over block permutations, computed exactly: for each
/// rectangle the aggregated cell laws are compared in `W₁`, via the integral
/// of the absolute difference of their distribution functions.
pub fn wass_cut(w1: &MvgStepKernel, w2: &MvgStepKernel, search: &PermSearch) -> Result<f64> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r();
    check_rectangles(r)?;
    let mut grid: Vec<f64> = w1.cells().iter().chain(w2.cells()).flat_map(|c| c.atoms().to_vec()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 2 {
        return Ok(0.0);
    }
    let dim = grid.len() - 1;
    // cdf of each cell at grid[k], weighted by the gap to grid[k + 1]
    let table = |w: &MvgStepKernel| -> Vec<f64> {
        w.cells()
            .iter()
            .flat_map(|c| {
                let mut acc = 0.0;
                let mut idx = 0;
                (0..dim)
                    .map(|k| {
                        while idx < c.len() && c.atoms()[idx] <= grid[k] {
                            acc += c.weights()[idx];
                            idx += 1;
                        }
                        acc * (grid[k + 1] - grid[k])
                    })
                    .collect::<Vec<f64>>()
            })
            .collect()
    };
    let f1 = table(w1);
    let f2 = table(w2);
    let mut diff = vec![0.0; r * r * dim];
    let norm = (r * r) as f64;
    let (best, _) = minimize_over_permutations(r, search, |p, bound| {
        for i in 0..r {
            for j in 0..r {
                let src = (p[i] * r + p[j]) * dim;
                let dst = (i * r + j) * dim;
                for k in 0..dim {
                    diff[dst + k] = f1[dst + k] - f2[src + k];
                }
            }
        }
        max_over_rectangles(r, dim, &diff, bound * norm, |agg| agg.iter().map(|x| x.abs()).sum()) / norm
    });
    Ok(best)
}

/// `D₂(W1, W2) = sqrt((1/r²) Σ W₂(W1_ij, W2_ij)²)`.
pub fn d2(w1: &MvgStepKernel, w2: &MvgStepKernel) -> Result<f64> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r();
    let s: f64 = w1.cells().iter().zip(w2.cells()).map(|(a, b)| w2_sq(a, b)).sum();
    Ok((s / (r * r) as f64).sqrt())
}

fn w2_sq(a: &super::measure::DiscreteMeasure, b: &super::measure::DiscreteMeasure) -> f64 {
    let d = w2(a, b);
    d * d
}

/// `min_π D₂(W1, W2∘π)`, an upper bound on the invariant metric `Δ₂`.
pub fn delta2_mvg_upper(w1: &MvgStepKernel, w2: &MvgStepKernel, search: &PermSearch) -> Result<f64> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r();
    let rr = r * r;
    // cost[(i,j), (k,l)] = W₂(W1_ij, W2_kl)²
    let mut cost = vec![0.0; rr * rr];
    for a in 0..rr {
        for b in 0..rr {
            cost[a * rr + b] = w2_sq(&w1.cells()[a], &w2.cells()[b]);
        }
    }
    let (best, _) = minimize_over_permutations(r, search, |p, _| {
        let mut s = 0.0;
        for i in 0..r {
            for j in 0..r {
                s += cost[(i * r + j) * rr + p[i] * r + p[j]];
            }
        }
        (s / rr as f64).sqrt()
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::{cut_norm_exhaustive, l2_dist, StepKernel, ValueRange};
    use crate::mvg::func::PLFunction;
    use crate::mvg::measure::DiscreteMeasure;
    use crate::mvg::net::build_net;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mvg(r: usize, rng: &mut ChaCha8Rng) -> MvgStepKernel {
        MvgStepKernel::from_fn(r, |_, _| {
            let k = rng.gen_range(1..=3);
            let atoms: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let mut weights: Vec<f64> = raw.iter().map(|w| w / s).collect();
            let tail: f64 = weights[..k - 1].iter().sum();
            weights[k - 1] = 1.0 - tail;
            DiscreteMeasure::new(atoms, weights)
        })
        .unwrap()
    }

    fn wg_wk(r: usize) -> (MvgStepKernel, MvgStepKernel) {
        (
            MvgStepKernel::constant(r, &DiscreteMeasure::bernoulli(0.5).unwrap()).unwrap(),
            MvgStepKernel::constant(r, &DiscreteMeasure::dirac(0.5).unwrap()).unwrap(),
        )
    }

    #[test]
    fn lattice_route_matches_explicit_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = build_net(0.5).unwrap();
        let explicit = LipschitzNet::from_functions(net.functions(), net.radius()).unwrap();
        for _ in 0..4 {
            let a = random_mvg(3, &mut rng);
            let b = random_mvg(3, &mut rng);
            for w in [mvg_diff(&a, &b).unwrap(), a.to_signed()] {
                let fast = gen_cut_norm(&w, &net).unwrap();
                let slow = gen_cut_norm(&w, &explicit).unwrap();
                assert!((fast.lower - slow.lower).abs() < 1e-12, "{fast:?} vs {slow:?}");
            }
        }
    }

    #[test]
    fn bernoulli_against_dirac() {
        let (g, k) = wg_wk(2);
        let net = build_net(0.25).unwrap();
        let res = gen_cut_norm(&mvg_diff(&g, &k).unwrap(), &net).unwrap();
        assert!(res.lower <= 0.5 + 1e-12 && res.lower >= 0.5 - 0.25);
        let search = PermSearch::default();
        let db = delta_black(&g, &k, &net, &search).unwrap();
        assert!((db - res.lower).abs() < 1e-12);
        assert!((wass_cut(&g, &k, &search).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dirac_cells_reduce_to_cut_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = StepKernel::from_fn(3, ValueRange::SIGNED, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let v = StepKernel::from_fn(3, ValueRange::SIGNED, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let (eu, ev) = (MvgStepKernel::dirac_embedding(&u).unwrap(), MvgStepKernel::dirac_embedding(&v).unwrap());
        assert!((d2(&eu, &ev).unwrap() - l2_dist(&u, &v).unwrap()).abs() < 1e-14);
        // identity is in every lattice net with an even segment count
        let net = build_net(0.5).unwrap();
        let lower = gen_cut_norm(&mvg_diff(&eu, &ev).unwrap(), &net).unwrap().lower;
        assert!(lower >= cut_norm_exhaustive(&u.sub(&v).unwrap()).unwrap() - 1e-12);
    }

    #[test]
    fn zero_distance_on_identical_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_mvg(3, &mut rng);
        let net = build_net(0.5).unwrap();
        let search = PermSearch::default();
        assert_eq!(delta_black(&a, &a, &net, &search).unwrap(), 0.0);
        assert_eq!(wass_cut(&a, &a, &search).unwrap(), 0.0);
        assert_eq!(d2(&a, &a).unwrap(), 0.0);
        let p = a.permute(&[2, 0, 1]).unwrap();
        assert!(delta2_mvg_upper(&a, &p, &search).unwrap() < 1e-15);
        assert!(delta_black(&a, &p, &net, &search).unwrap() < 1e-15);
    }

    #[test]
    fn explicit_net_route() {
        let (g, k) = wg_wk(1);
        let psi = PLFunction::new(vec![-1.0, 0.5, 1.0], vec![1.0, -0.5, 0.0]).unwrap();
        let net = LipschitzNet::from_functions(vec![psi], 0.1).unwrap();
        let res = gen_cut_norm(&mvg_diff(&g, &k).unwrap(), &net).unwrap();
        assert!((res.lower - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rectangle_guard() {
        let w = MvgStepKernel::constant(11, &DiscreteMeasure::dirac(0.0).unwrap()).unwrap();
        let net = build_net(1.0).unwrap();
        assert!(matches!(gen_cut_norm(&w.to_signed(), &net), Err(Error::TooLarge { .. })));
    }
}

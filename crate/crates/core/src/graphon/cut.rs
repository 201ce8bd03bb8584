//! Cut norm, cut distance and L² distances for step kernels.
//!
//! For a step kernel the cut norm is `max_{s,t ∈ {0,1}^r} |sᵀAt| / r²`:
//! the objective is bilinear in fractional block-inclusion vectors, so the
//! supremum over measurable sets is attained at a vertex of the cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kernel::{same_r, StepKernel};
use super::perm::{minimize_over_permutations, PermSearch};
use crate::error::{Error, Result};

/// Largest `r` accepted by the exhaustive search (`2^r` row subsets).
pub const EXHAUSTIVE_LIMIT: usize = 24;
/// Default number of random restarts for the alternating heuristic.
pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMethod {
    /// Exact; `r ≤ 24`.
    Exhaustive,
    /// Alternating sign maximization; a lower bound.
    Heuristic { restarts: usize, seed: u64 },
    /// Exhaustive up to `r = 16`, heuristic with default restarts beyond.
    Auto,
}

/// Exact cut norm by enumerating row subsets in Gray-code order.
///
/// For a fixed row subset `s` the best column subset takes every column with
/// positive (resp. negative) partial sum, so only `2^r` subsets are visited
/// with `O(r)` work each.
pub fn cut_norm_exhaustive(w: &StepKernel) -> Result<f64> {
    let r = w.r();
    if r > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { r, limit: EXHAUSTIVE_LIMIT });
    }
    let a = w.values();
    let mut col = vec![0.0f64; r];
    let mut in_s = vec![false; r];
    let mut best = 0.0f64;
    for k in 1u64..(1u64 << r) {
        // Gray code: flip the lowest set bit of k
        let i = k.trailing_zeros() as usize;
        let row = &a[i * r..(i + 1) * r];
        if in_s[i] {
            col.iter_mut().zip(row).for_each(|(c, v)| *c -= v);
        } else {
            col.iter_mut().zip(row).for_each(|(c, v)| *c += v);
        }
        in_s[i] = !in_s[i];
        let (mut pos, mut neg) = (0.0, 0.0);
        for &c in &col {
            if c > 0.0 {
                pos += c;
            } else {
                neg -= c;
            }
        }
        best = best.max(pos).max(neg);
    }
    Ok(best / (r * r) as f64)
}

/// Lower bound on the cut norm by alternating maximization from random
/// starting row subsets, run for both `A` and `-A`.
pub fn cut_norm_heuristic(w: &StepKernel, restarts: usize, seed: u64) -> f64 {
    let r = w.r();
    let a = w.values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut s = vec![false; r];
    let mut t = vec![false; r];
    for sign in [1.0, -1.0] {
        for _ in 0..restarts.max(1) {
            s.iter_mut().for_each(|x| *x = rng.gen());
            let mut value = f64::NEG_INFINITY;
            loop {
                // best columns for the current rows
                let mut col = vec![0.0; r];
                for i in (0..r).filter(|&i| s[i]) {
                    for j in 0..r {
                        col[j] += sign * a[i * r + j];
                    }
                }
                for j in 0..r {
                    t[j] = col[j] > 0.0;
                }
                // best rows for those columns
                let mut rowsum = vec![0.0; r];
                for i in 0..r {
                    for j in (0..r).filter(|&j| t[j]) {
                        rowsum[i] += sign * a[i * r + j];
                    }
                }
                let mut next = 0.0;
                for i in 0..r {
                    s[i] = rowsum[i] > 0.0;
                    if s[i] {
                        next += rowsum[i];
                    }
                }
                if next <= value + 1e-15 {
                    break;
                }
                value = next;
            }
            best = best.max(value.max(0.0));
        }
    }
    best / (r * r) as f64
}

/// `‖w‖_□` with the chosen method.
pub fn cut_norm_with(w: &StepKernel, method: CutMethod) -> Result<f64> {
    match method {
        CutMethod::Exhaustive => cut_norm_exhaustive(w),
        CutMethod::Heuristic { restarts, seed } => Ok(cut_norm_heuristic(w, restarts, seed)),
        CutMethod::Auto if w.r() <= 16 => cut_norm_exhaustive(w),
        CutMethod::Auto => Ok(cut_norm_heuristic(w, DEFAULT_RESTARTS, 0)),
    }
}

/// `‖w‖_□`, exact for `r ≤ 16` and a heuristic lower bound above.
pub fn cut_norm(w: &StepKernel) -> f64 {
    cut_norm_with(w, CutMethod::Auto).expect("auto method never exceeds the exhaustive limit")
}

/// `min_π ‖w1 − w2∘π‖_□` over block permutations: an upper bound on the cut
/// distance between the represented graphons. Both kernels must share `r`.
///
/// Beyond the exhaustive permutation limit the search is annealed with a
/// cheap heuristic cut norm and the returned value is the cut norm of the
/// best permutation found.
pub fn cut_metric_upper(w1: &StepKernel, w2: &StepKernel, search: &PermSearch) -> Result<f64> {
    Ok(cut_metric_search(w1, w2, search)?.0)
}

/// Like [`cut_metric_upper`] but also returns the minimizing permutation.
pub fn cut_metric_search(w1: &StepKernel, w2: &StepKernel, search: &PermSearch) -> Result<(f64, Vec<usize>)> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r();
    let exhaustive_perms = r <= search.exhaustive_limit;
    let inner = if exhaustive_perms || r <= 10 {
        CutMethod::Exhaustive
    } else {
        CutMethod::Heuristic { restarts: 8, seed: search.seed }
    };
    let (_, perm) = minimize_over_permutations(r, search, |p, _| {
        let d = w1.sub(&w2.permute(p).expect("valid permutation")).expect("same r");
        cut_norm_with(&d, inner).expect("method fits r")
    });
    let d = w1.sub(&w2.permute(&perm)?)?;
    let value = if r <= EXHAUSTIVE_LIMIT { cut_norm_exhaustive(&d)? } else { cut_norm_heuristic(&d, DEFAULT_RESTARTS, search.seed) };
    Ok((value, perm))
}

/// `‖w‖₂ = sqrt((1/r²) Σ w_ij²)`.
pub fn l2_norm(w: &StepKernel) -> f64 {
    let r = w.r() as f64;
    (w.values().iter().map(|v| v * v).sum::<f64>() / (r * r)).sqrt()
}

pub fn l2_dist(w1: &StepKernel, w2: &StepKernel) -> Result<f64> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r() as f64;
    let s: f64 = w1.values().iter().zip(w2.values()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((s / (r * r)).sqrt())
}

/// `min_π ‖w1 − w2∘π‖₂` over block permutations; an upper bound on δ₂.
pub fn delta2_upper(w1: &StepKernel, w2: &StepKernel, search: &PermSearch) -> Result<f64> {
    same_r(w1.r(), w2.r())?;
    let r = w1.r();
    let (best, _) = minimize_over_permutations(r, search, |p, _| {
        let mut s = 0.0;
        for i in 0..r {
            for j in 0..r {
                let d = w1.get(i, j) - w2.get(p[i], p[j]);
                s += d * d;
            }
        }
        (s / (r * r) as f64).sqrt()
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::kernel::ValueRange;

    fn random_signed(r: usize, seed: u64) -> StepKernel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StepKernel::from_fn(r, ValueRange::SIGNED, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
    }

    // independent oracle: double loop over all (s, t) pairs
    fn brute_cut(w: &StepKernel) -> f64 {
        let r = w.r();
        let mut best = 0.0f64;
        for s in 0u32..(1 << r) {
            for t in 0u32..(1 << r) {
                let mut v = 0.0;
                for i in 0..r {
                    for j in 0..r {
                        if s >> i & 1 == 1 && t >> j & 1 == 1 {
                            v += w.get(i, j);
                        }
                    }
                }
                best = best.max(f64::abs(v));
            }
        }
        best / (r * r) as f64
    }

    #[test]
    fn zero_and_constant() {
        let z = StepKernel::constant(5, 0.0, ValueRange::SIGNED).unwrap();
        assert_eq!(cut_norm_exhaustive(&z).unwrap(), 0.0);
        let c = StepKernel::constant(5, -0.4, ValueRange::SIGNED).unwrap();
        assert!((cut_norm_exhaustive(&c).unwrap() - 0.4).abs() < 1e-15);
        assert!((cut_norm_heuristic(&c, 4, 1) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn exhaustive_matches_double_enumeration() {
        for seed in 0..5 {
            let w = random_signed(5, seed);
            assert!((cut_norm_exhaustive(&w).unwrap() - brute_cut(&w)).abs() < 1e-13);
        }
    }

    #[test]
    fn heuristic_on_six_blocks() {
        let w = random_signed(6, 42);
        let exact = cut_norm_exhaustive(&w).unwrap();
        let h = cut_norm_heuristic(&w, DEFAULT_RESTARTS, 7);
        assert!(h <= exact + 1e-14);
        assert!((h - exact).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_guard() {
        let w = StepKernel::constant(25, 0.0, ValueRange::UNIT).unwrap();
        assert!(matches!(cut_norm_exhaustive(&w), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn cut_metric_of_permuted_copy_is_zero() {
        let w = random_signed(5, 9);
        let p = w.permute(&[3, 0, 4, 1, 2]).unwrap();
        let search = PermSearch::default();
        assert!(cut_metric_upper(&w, &p, &search).unwrap() < 1e-15);
        assert!(delta2_upper(&w, &p, &search).unwrap() < 1e-15);
        assert_eq!(cut_metric_upper(&w, &w, &search).unwrap(), 0.0);
    }

    #[test]
    fn refinement_preserves_cut_norm() {
        for seed in 0..3 {
            let w = random_signed(3, seed);
            let a = cut_norm_exhaustive(&w).unwrap();
            let b = cut_norm_exhaustive(&w.refine(6).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn l2_of_constant() {
        let c = StepKernel::constant(4, -0.3, ValueRange::SIGNED).unwrap();
        assert!((l2_norm(&c) - 0.3).abs() < 1e-15);
        assert_eq!(l2_dist(&c, &c).unwrap(), 0.0);
    }
}

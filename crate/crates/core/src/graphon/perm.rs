//! Search over block permutations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Controls how permutation minimizations are carried out.
#[derive(Clone, Debug, PartialEq)]
pub struct PermSearch {
    /// Enumerate all `r!` permutations up to this `r`.
    pub exhaustive_limit: usize,
    /// Proposals per annealing run beyond the limit.
    pub anneal_iters: usize,
    pub seed: u64,
}

impl Default for PermSearch {
    fn default() -> Self {
        PermSearch { exhaustive_limit: 8, anneal_iters: 4000, seed: 0 }
    }
}

impl PermSearch {
    pub fn with_seed(seed: u64) -> Self {
        PermSearch { seed, ..Self::default() }
    }
}

/// Minimizes `f` over permutations of `0..r`.
///
/// `f(perm, best_so_far)` may stop early and return any value that is not
/// smaller than `best_so_far` once it knows the permutation cannot win.
/// Exhaustive (Heap's algorithm) for `r ≤ exhaustive_limit`, otherwise
/// simulated annealing over transpositions from the identity.
pub fn minimize_over_permutations<F>(r: usize, search: &PermSearch, mut f: F) -> (f64, Vec<usize>)
where
    F: FnMut(&[usize], f64) -> f64,
{
    let mut perm: Vec<usize> = (0..r).collect();
    let mut best = f(&perm, f64::INFINITY);
    let mut best_perm = perm.clone();
    if r <= 1 || best == 0.0 {
        return (best, best_perm);
    }
    if r <= search.exhaustive_limit {
        let mut c = vec![0usize; r];
        let mut i = 0;
        while i < r {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                let v = f(&perm, best);
                if v < best {
                    best = v;
                    best_perm.copy_from_slice(&perm);
                    if best == 0.0 {
                        break;
                    }
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        return (best, best_perm);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut current = best;
    let iters = search.anneal_iters.max(1);
    let t0 = (0.1 * best).max(1e-9);
    let t1 = 1e-4 * t0;
    for k in 0..iters {
        let temp = t0 * (t1 / t0).powf(k as f64 / iters as f64);
        let a = rng.gen_range(0..r);
        let mut b = rng.gen_range(0..r - 1);
        if b >= a {
            b += 1;
        }
        perm.swap(a, b);
        let v = f(&perm, f64::INFINITY);
        let accept = v <= current || rng.gen::<f64>() < ((current - v) / temp).exp();
        if accept {
            current = v;
            if v < best {
                best = v;
                best_perm.copy_from_slice(&perm);
            }
        } else {
            perm.swap(a, b);
        }
    }
    (best, best_perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_every_permutation() {
        let mut seen = std::collections::HashSet::new();
        let search = PermSearch::default();
        minimize_over_permutations(5, &search, |p, _| {
            seen.insert(p.to_vec());
            1.0
        });
        assert_eq!(seen.len(), 120);
    }

    #[test]
    fn annealing_finds_sorting_permutation() {
        let target: Vec<usize> = vec![9, 3, 0, 7, 1, 8, 2, 6, 4, 5, 11, 10];
        let search = PermSearch { anneal_iters: 20_000, ..PermSearch::default() };
        let (best, perm) = minimize_over_permutations(12, &search, |p, _| {
            p.iter().zip(&target).filter(|(a, b)| a != b).count() as f64
        });
        assert_eq!(best, 0.0);
        assert_eq!(perm, target);
    }
}

//! Homomorphism densities of simple graphs in step kernels.
//!
//! For a step kernel the integral defining `t(F, w)` collapses to the
//! normalised sum `r^{-m} Σ_φ Π_{(a,b)∈E} w[φ(a)][φ(b)]` over block
//! assignments `φ: V(F) → [r]`. Edges, cherries, triangles and 4-cycles use
//! matrix-power forms; everything else goes through the nested sum.

use super::graph::{Shape, SimpleGraph};
use super::kernel::StepKernel;

pub(crate) fn matmul(r: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; r * r];
    for i in 0..r {
        for k in 0..r {
            let aik = a[i * r + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * r..(k + 1) * r];
            let dst = &mut out[i * r..(i + 1) * r];
            for (d, &bkj) in dst.iter_mut().zip(row) {
                *d += aik * bkj;
            }
        }
    }
    out
}

fn row_means(r: usize, a: &[f64]) -> Vec<f64> {
    (0..r).map(|i| a[i * r..(i + 1) * r].iter().sum::<f64>() / r as f64).collect()
}

/// `t(F, w)`.
pub fn hom_density(f: &SimpleGraph, w: &StepKernel) -> f64 {
    let r = w.r();
    let a = w.values();
    let rf = r as f64;
    match f.shape() {
        Shape::Edge => a.iter().sum::<f64>() / (rf * rf),
        Shape::Path2 => row_means(r, a).iter().map(|d| d * d).sum::<f64>() / rf,
        Shape::Triangle => {
            let a2 = matmul(r, a, a);
            a2.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() / (rf * rf * rf)
        }
        Shape::Cycle4 => {
            let a2 = matmul(r, a, a);
            a2.iter().map(|x| x * x).sum::<f64>() / (rf * rf * rf * rf)
        }
        Shape::General => hom_density_nested(f, w),
    }
}

/// `t(F, w)` by direct summation over all `r^m` block assignments.
pub fn hom_density_nested(f: &SimpleGraph, w: &StepKernel) -> f64 {
    let kernels: Vec<&[f64]> = vec![w.values(); f.edge_count()];
    hom_density_edgewise(f, w.r(), &kernels)
}

/// Nested sum where edge `e` of `F` is weighted by its own matrix
/// `kernels[e]`. This is the form decorated densities reduce to.
pub(crate) fn hom_density_edgewise(f: &SimpleGraph, r: usize, kernels: &[&[f64]]) -> f64 {
    let m = f.vertex_count();
    let edges = f.edges();
    debug_assert_eq!(kernels.len(), edges.len());
    let mut phi = vec![0usize; m];
    let mut total = 0.0;
    loop {
        let mut prod = 1.0;
        for (e, &(a, b)) in edges.iter().enumerate() {
            prod *= kernels[e][phi[a] * r + phi[b]];
            if prod == 0.0 {
                break;
            }
        }
        total += prod;
        if !advance(&mut phi, r) {
            break;
        }
    }
    total / (r as f64).powi(m as i32)
}

/// `T_e(i, j)`: the density of `F` with the endpoints of edge `e` pinned to
/// blocks `(i, j)` and the factor for `e` itself removed, normalised by
/// `r^{m-2}`. Not symmetric in general.
pub(crate) fn pinned_edge_density(f: &SimpleGraph, edge: usize, w: &StepKernel) -> Vec<f64> {
    let r = w.r();
    let a = w.values();
    let m = f.vertex_count();
    let (pa, pb) = f.edges()[edge];
    let free: Vec<usize> = (0..m).filter(|&v| v != pa && v != pb).collect();
    let others: Vec<(usize, usize)> =
        f.edges().iter().enumerate().filter(|&(e, _)| e != edge).map(|(_, &ab)| ab).collect();
    let norm = (r as f64).powi(free.len() as i32);
    let mut out = vec![0.0; r * r];
    let mut phi = vec![0usize; m];
    let mut free_idx = vec![0usize; free.len()];
    for i in 0..r {
        for j in 0..r {
            phi[pa] = i;
            phi[pb] = j;
            free_idx.iter_mut().for_each(|x| *x = 0);
            let mut total = 0.0;
            loop {
                for (k, &v) in free.iter().enumerate() {
                    phi[v] = free_idx[k];
                }
                let mut prod = 1.0;
                for &(x, y) in &others {
                    prod *= a[phi[x] * r + phi[y]];
                    if prod == 0.0 {
                        break;
                    }
                }
                total += prod;
                if !advance(&mut free_idx, r) {
                    break;
                }
            }
            out[i * r + j] = total / norm;
        }
    }
    out
}

/// Odometer increment over `[r]^len`; false once it wraps around.
fn advance(idx: &mut [usize], r: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Row means `d_i = (1/r) Σ_j w_ij`, the degree function of a step kernel.
pub(crate) fn degrees(w: &StepKernel) -> Vec<f64> {
    row_means(w.r(), w.values())
}

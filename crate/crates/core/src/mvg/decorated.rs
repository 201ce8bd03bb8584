use super::func::{Decoration, RealFunction};
use super::kernel::MvgStepKernel;
use crate::error::{Error, Result};
use crate::graphon::{hom_density_edgewise, SimpleGraph};

/// `t_d(F, W)`: each edge `e` of `F` contributes `∫ f_e dW(x_a, x_b)` and the
/// product is averaged over block assignments. `decorations[e]` decorates
/// `F.edges()[e]`.
pub fn decorated_hom_density(f: &SimpleGraph, decorations: &[Decoration], w: &MvgStepKernel) -> Result<f64> {
    if decorations.len() < f.edge_count() {
        return Err(Error::MissingDecoration(decorations.len()));
    }
    let per_edge: Vec<Vec<f64>> = decorations[..f.edge_count()]
        .iter()
        .map(|d| w.gamma(d as &dyn RealFunction).into_values())
        .collect();
    let views: Vec<&[f64]> = per_edge.iter().map(|v| v.as_slice()).collect();
    Ok(hom_density_edgewise(f, w.r(), &views))
}

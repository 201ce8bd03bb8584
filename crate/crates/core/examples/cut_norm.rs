//! Cut norm and cut distance between small step kernels.

use graphon_dynamics::graphon::{
    cut_metric_search, cut_norm, cut_norm_exhaustive, cut_norm_heuristic, delta2_upper, hom_density, PermSearch,
    SimpleGraph, StepKernel, ValueRange,
};

fn main() -> graphon_dynamics::Result<()> {
    let r = 6;
    // two-community graphon and a relabelled copy of it
    let sbm = StepKernel::from_fn(r, ValueRange::UNIT, |i, j| if (i < 3) == (j < 3) { 0.8 } else { 0.1 })?;
    let shuffled = sbm.permute(&[3, 0, 4, 1, 5, 2])?;
    let er = StepKernel::constant(r, 0.45, ValueRange::UNIT)?;

    let diff = sbm.sub(&er)?;
    println!("||SBM - ER||_cut exhaustive = {:.4}", cut_norm_exhaustive(&diff)?);
    println!("||SBM - ER||_cut heuristic  = {:.4}", cut_norm_heuristic(&diff, 64, 1));
    println!("||SBM - shuffled||_cut      = {:.4}", cut_norm(&sbm.sub(&shuffled)?));

    let (d, perm) = cut_metric_search(&sbm, &shuffled, &PermSearch::default())?;
    println!("cut distance to shuffled copy = {d:.2e} via permutation {perm:?}");
    println!("delta_2 upper bound to ER = {:.4}", delta2_upper(&sbm, &er, &PermSearch::default())?);

    for (name, f) in [("edge", SimpleGraph::edge()), ("triangle", SimpleGraph::triangle()), ("C4", SimpleGraph::cycle4())] {
        println!("t({name}, SBM) = {:.4}   t({name}, ER) = {:.4}", hom_density(&f, &sbm), hom_density(&f, &er));
    }
    Ok(())
}

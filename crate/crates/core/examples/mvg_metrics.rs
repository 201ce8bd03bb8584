//! Measure-valued graphons: generalized cut norm, Wasserstein cut
//! distance, decorated homomorphism densities.

use graphon_dynamics::graphon::{PermSearch, SimpleGraph};
use graphon_dynamics::mvg::{
    build_net, d2, delta2_mvg_upper, delta_black, decorated_hom_density, gen_cut_norm, mvg_diff, wass_cut, Decoration,
    DiscreteMeasure, MvgStepKernel, Polynomial,
};

fn main() -> graphon_dynamics::Result<()> {
    let ber = MvgStepKernel::constant(2, &DiscreteMeasure::bernoulli(0.5)?)?;
    let dirac = MvgStepKernel::constant(2, &DiscreteMeasure::dirac(0.5)?)?;
    // same mean everywhere, so every projected quantity agrees
    println!("projections agree: {}", ber.project() == dirac.project());

    for eps in [0.5, 0.25] {
        let net = build_net(eps)?;
        let g = gen_cut_norm(&mvg_diff(&ber, &dirac)?, &net)?;
        println!("eps {eps:<5} net size {:>6}  lower {:.4}  (true value within +{:.3})", net.len(), g.lower, g.epsilon);
    }

    let search = PermSearch::default();
    let tern = MvgStepKernel::from_fn(2, |i, j| if i == j { DiscreteMeasure::ternoulli(0.3, 0.2) } else { DiscreteMeasure::dirac(0.1) })?;
    let net = build_net(0.25)?;
    println!("delta_black  = {:.4}", delta_black(&ber, &tern, &net, &search)?);
    println!("W-cut        = {:.4}", wass_cut(&ber, &tern, &search)?);
    println!("d2           = {:.4}", d2(&ber, &tern)?);
    println!("delta2 upper = {:.4}", delta2_mvg_upper(&ber, &tern, &search)?);

    // second moments separate Bernoulli from Dirac although first moments do not
    let square = Decoration::Poly(Polynomial::monomial(2));
    for (name, w) in [("bernoulli", &ber), ("dirac", &dirac)] {
        let t = decorated_hom_density(&SimpleGraph::edge(), std::slice::from_ref(&square), w)?;
        println!("t(edge decorated by x^2, {name}) = {t:.4}");
    }
    Ok(())
}

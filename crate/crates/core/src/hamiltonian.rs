//! Hamiltonians on kernels: linear combinations of homomorphism densities
//! plus an optional entropy penalty, with their Fréchet-like derivatives.
//!
//! Inner products are `⟨u, v⟩ = (1/r²) Σ u_ij v_ij`, so the derivative of a
//! Hamiltonian restricted to `r × r` matrices satisfies `r²∇H_r = Dℋ`.

use crate::error::{Error, Result};
use crate::graphon::{degrees, hom_density, matmul, pinned_edge_density, Shape, SimpleGraph, StepKernel, ValueRange};

/// Entries are clipped to `[ENTROPY_CLAMP, 1 − ENTROPY_CLAMP]` before taking
/// the log-ratio in the regularized derivative.
pub const ENTROPY_CLAMP: f64 = 1e-9;

/// Anything the dynamics can descend: an energy and its kernel derivative.
pub trait Objective: Sync {
    fn energy(&self, w: &StepKernel) -> f64;
    /// The derivative as a kernel (REAL range). Must be finite on `[0, 1]`
    /// kernels, regularizing any boundary singularity.
    fn gradient(&self, w: &StepKernel) -> StepKernel;
}

/// Constants `λ, L, κ` with `λ/2‖v−u‖² ≤ ℋ(v) − ℋ(u) − ⟨Dℋ(u), v−u⟩ ≤ L/2‖v−u‖²`
/// and `κ` the cut-norm Lipschitz constant of `Dℋ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Semiconvexity {
    pub lambda: f64,
    pub big_l: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    terms: Vec<(f64, SimpleGraph)>,
    entropy_gamma: f64,
    semiconvexity: Option<Semiconvexity>,
}

/// `h(p) = p log p + (1 − p) log(1 − p)`, zero at the endpoints.
pub fn entropy(p: f64) -> f64 {
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    xlogx(p) + xlogx(1.0 - p)
}

impl Hamiltonian {
    /// Every graph must be connected with at most four vertices.
    pub fn new(terms: Vec<(f64, SimpleGraph)>, entropy_gamma: f64) -> Result<Self> {
        for (c, f) in &terms {
            if !c.is_finite() {
                return Err(Error::InvalidGraph(format!("non-finite coefficient {c}")));
            }
            if f.vertex_count() > 4 || !f.is_connected() {
                return Err(Error::InvalidGraph(format!(
                    "terms must be connected graphs on at most 4 vertices, got {f:?}"
                )));
            }
        }
        if !(entropy_gamma >= 0.0 && entropy_gamma.is_finite()) {
            return Err(Error::Precondition(format!("entropy weight {entropy_gamma} must be nonnegative")));
        }
        Ok(Hamiltonian { terms, entropy_gamma, semiconvexity: None })
    }

    /// `ℋ = 0`.
    pub fn zero() -> Self {
        Hamiltonian { terms: Vec::new(), entropy_gamma: 0.0, semiconvexity: None }
    }

    /// `t(△, ·) − α·t(−, ·)`.
    pub fn triangle_edge(alpha: f64) -> Self {
        Hamiltonian {
            terms: vec![(1.0, SimpleGraph::triangle()), (-alpha, SimpleGraph::edge())],
            entropy_gamma: 0.0,
            // |E||V|(|V|−1) = 18 bounds the second variation; κ = |E|(|E|−1)
            semiconvexity: Some(Semiconvexity { lambda: -9.0, big_l: 9.0, kappa: 6.0 }),
        }
    }

    /// Adds `γ ∫ h(w)`. Since `h″ ≥ 4`, `λ` grows by `4γ`; `L` becomes
    /// infinite.
    pub fn with_entropy(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Precondition(format!("entropy weight {gamma} must be nonnegative")));
        }
        self.entropy_gamma = gamma;
        if let Some(s) = &mut self.semiconvexity {
            s.lambda += 4.0 * gamma;
            if gamma > 0.0 {
                s.big_l = f64::INFINITY;
            }
        }
        Ok(self)
    }

    pub fn with_semiconvexity(mut self, s: Semiconvexity) -> Self {
        self.semiconvexity = Some(s);
        self
    }

    pub fn terms(&self) -> &[(f64, SimpleGraph)] {
        &self.terms
    }

    pub fn entropy_gamma(&self) -> f64 {
        self.entropy_gamma
    }

    pub fn semiconvexity(&self) -> Option<Semiconvexity> {
        self.semiconvexity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| *c == 0.0) && self.entropy_gamma == 0.0
    }

    fn check_entropy_domain(&self, w: &StepKernel, open: bool) -> Result<()> {
        if self.entropy_gamma == 0.0 {
            return Ok(());
        }
        let r = w.r();
        for i in 0..r {
            for j in i..r {
                let v = w.get(i, j);
                let bad = if open { v <= 0.0 || v >= 1.0 } else { !ValueRange::UNIT.contains(v) };
                if bad {
                    return Err(Error::EntropyDomain { i, j, value: v });
                }
            }
        }
        Ok(())
    }

    /// `ℋ(w)`.
    pub fn evaluate(&self, w: &StepKernel) -> Result<f64> {
        self.check_entropy_domain(w, false)?;
        let mut total: f64 = self.terms.iter().map(|(c, f)| c * hom_density(f, w)).sum();
        if self.entropy_gamma > 0.0 {
            let r = w.r() as f64;
            let ent: f64 = w.values().iter().map(|&p| entropy(p.clamp(0.0, 1.0))).sum();
            total += self.entropy_gamma * ent / (r * r);
        }
        Ok(total)
    }

    /// `Dℋ(w)`. With an entropy term every entry must lie in `(0, 1)`.
    pub fn frechet_derivative(&self, w: &StepKernel) -> Result<StepKernel> {
        self.check_entropy_domain(w, true)?;
        Ok(self.derivative_inner(w, 0.0))
    }

    /// `Dℋ(w)` with entries clipped to `[ENTROPY_CLAMP, 1 − ENTROPY_CLAMP]`
    /// inside the entropy log-ratio.
    pub fn frechet_derivative_regularized(&self, w: &StepKernel) -> StepKernel {
        self.derivative_inner(w, ENTROPY_CLAMP)
    }

    fn derivative_inner(&self, w: &StepKernel, clamp: f64) -> StepKernel {
        let r = w.r();
        let mut out = vec![0.0; r * r];
        for (c, f) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            let d = density_derivative(f, w);
            out.iter_mut().zip(&d).for_each(|(o, v)| *o += c * v);
        }
        if self.entropy_gamma > 0.0 {
            for (o, &p) in out.iter_mut().zip(w.values()) {
                let p = p.clamp(clamp, 1.0 - clamp);
                *o += self.entropy_gamma * (p / (1.0 - p)).ln();
            }
        }
        symmetric_kernel(r, out)
    }
}

impl Objective for Hamiltonian {
    fn energy(&self, w: &StepKernel) -> f64 {
        self.evaluate(w).unwrap_or(f64::NAN)
    }

    fn gradient(&self, w: &StepKernel) -> StepKernel {
        self.frechet_derivative_regularized(w)
    }
}

fn symmetric_kernel(r: usize, mut values: Vec<f64>) -> StepKernel {
    for i in 0..r {
        for j in (i + 1)..r {
            let m = 0.5 * (values[i * r + j] + values[j * r + i]);
            values[i * r + j] = m;
            values[j * r + i] = m;
        }
    }
    StepKernel::new(r, values, ValueRange::REAL).expect("symmetrized")
}

/// `D t(F, ·)(w)` as an `r × r` matrix: the sum over edges of `F` of the
/// density with that edge removed and its endpoints pinned, symmetrized.
pub fn density_derivative(f: &SimpleGraph, w: &StepKernel) -> Vec<f64> {
    let r = w.r();
    let rf = r as f64;
    let a = w.values();
    match f.shape() {
        Shape::Edge => return vec![1.0; r * r],
        Shape::Path2 => {
            let d = degrees(w);
            return (0..r * r).map(|k| d[k / r] + d[k % r]).collect();
        }
        Shape::Triangle => return matmul(r, a, a).into_iter().map(|v| 3.0 * v / rf).collect(),
        Shape::Cycle4 => {
            let a2 = matmul(r, a, a);
            return matmul(r, &a2, a).into_iter().map(|v| 4.0 * v / (rf * rf)).collect();
        }
        Shape::General => {}
    }
    let mut out = vec![0.0; r * r];
    for e in 0..f.edge_count() {
        let t = pinned_edge_density(f, e, w);
        for i in 0..r {
            for j in 0..r {
                out[i * r + j] += 0.5 * (t[i * r + j] + t[j * r + i]);
            }
        }
    }
    out
}

/// `ℋ(w) = ⟨g, w⟩` for a fixed kernel `g`; its derivative is `g` everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearObjective {
    pub g: StepKernel,
}

impl Objective for LinearObjective {
    fn energy(&self, w: &StepKernel) -> f64 {
        self.g.inner(w).unwrap_or(f64::NAN)
    }

    fn gradient(&self, _w: &StepKernel) -> StepKernel {
        self.g.clone()
    }
}

/// `ℋ(w) = ½λ‖w − w*‖₂²` with derivative `λ(w − w*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticWell {
    pub lambda: f64,
    pub target: StepKernel,
}

impl Objective for QuadraticWell {
    fn energy(&self, w: &StepKernel) -> f64 {
        let d = crate::graphon::l2_dist(w, &self.target).unwrap_or(f64::NAN);
        0.5 * self.lambda * d * d
    }

    fn gradient(&self, w: &StepKernel) -> StepKernel {
        let r = w.r();
        let values = w.values().iter().zip(self.target.values()).map(|(a, b)| self.lambda * (a - b)).collect();
        StepKernel::new(r, values, ValueRange::REAL).expect("same shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(r: usize, seed: u64) -> StepKernel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StepKernel::from_fn(r, ValueRange::UNIT, |_, _| rng.gen_range(0.05..0.95)).unwrap()
    }

    #[test]
    fn triangle_edge_values() {
        let h = Hamiltonian::triangle_edge(0.25);
        let half = StepKernel::constant(4, 0.5, ValueRange::UNIT).unwrap();
        assert!(h.evaluate(&half).unwrap().abs() < 1e-15);
        let bip = StepKernel::new(2, vec![0.0, 1.0, 1.0, 0.0], ValueRange::UNIT).unwrap();
        assert!((h.evaluate(&bip).unwrap() + 0.125).abs() < 1e-15);
    }

    #[test]
    fn entropy_at_half() {
        let h = Hamiltonian::zero().with_entropy(5.0).unwrap();
        let half = StepKernel::constant(3, 0.5, ValueRange::UNIT).unwrap();
        assert!((h.evaluate(&half).unwrap() + 5.0 * 2f64.ln()).abs() < 1e-14);
        assert_eq!(entropy(0.0), 0.0);
        assert_eq!(entropy(1.0), 0.0);
    }

    #[test]
    fn derivative_at_constant() {
        let h = Hamiltonian::triangle_edge(0.25);
        for p in [0.0, 0.3, 0.5, 1.0] {
            let w = StepKernel::constant(3, p, ValueRange::UNIT).unwrap();
            let d = h.frechet_derivative(&w).unwrap();
            assert!(d.values().iter().all(|&v| (v - (3.0 * p * p - 0.25)).abs() < 1e-14));
        }
        let e = Hamiltonian::new(vec![(2.5, SimpleGraph::edge())], 0.0).unwrap();
        let w = random_unit(4, 1);
        assert!(e.frechet_derivative(&w).unwrap().values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn entropy_derivative_is_strict_at_boundary() {
        let h = Hamiltonian::triangle_edge(0.25).with_entropy(5.0).unwrap();
        let w = StepKernel::constant(2, 1.0, ValueRange::UNIT).unwrap();
        assert!(matches!(h.frechet_derivative(&w), Err(Error::EntropyDomain { .. })));
        let d = h.frechet_derivative_regularized(&w);
        assert!(d.values().iter().all(|v| v.is_finite() && *v > 100.0));
    }

    #[test]
    fn closed_forms_match_pinned_sums() {
        let w = random_unit(4, 2);
        for f in [SimpleGraph::path2(), SimpleGraph::triangle(), SimpleGraph::cycle4()] {
            let fast = density_derivative(&f, &w);
            let mut slow = vec![0.0; 16];
            for e in 0..f.edge_count() {
                let t = pinned_edge_density(&f, e, &w);
                for i in 0..4 {
                    for j in 0..4 {
                        slow[i * 4 + j] += 0.5 * (t[i * 4 + j] + t[j * 4 + i]);
                    }
                }
            }
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-13, "{f:?}");
            }
        }
    }

    #[test]
    fn finite_differences_match_for_a_star() {
        // a graph outside the closed forms exercises the pinned route
        let star = SimpleGraph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let h = Hamiltonian::new(vec![(1.0, star)], 0.0).unwrap();
        let w = random_unit(3, 4);
        let d = h.frechet_derivative(&w).unwrap();
        let r = 3;
        let step = 1e-5;
        for i in 0..r {
            for j in i..r {
                let bump = |s: f64| {
                    let mut v = w.values().to_vec();
                    v[i * r + j] += s;
                    if i != j {
                        v[j * r + i] += s;
                    }
                    h.evaluate(&StepKernel::new(r, v, ValueRange::REAL).unwrap()).unwrap()
                };
                let fd = (bump(step) - bump(-step)) / (2.0 * step);
                let scaled = if i == j { 9.0 * fd } else { 9.0 * fd / 2.0 };
                assert!((scaled - d.get(i, j)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_large_or_disconnected_terms() {
        let five = SimpleGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(Hamiltonian::new(vec![(1.0, five)], 0.0).is_err());
        let split = SimpleGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(Hamiltonian::new(vec![(1.0, split)], 0.0).is_err());
        assert!(Hamiltonian::new(vec![], -1.0).is_err());
    }

    #[test]
    fn quadratic_well_gradient() {
        let target = random_unit(3, 5);
        let q = QuadraticWell { lambda: 2.0, target: target.clone() };
        assert_eq!(q.energy(&target), 0.0);
        assert!(q.gradient(&target).values().iter().all(|&v| v == 0.0));
    }
}

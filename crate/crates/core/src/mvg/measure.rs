use crate::error::{Error, Result};
use crate::graphon::VALIDATION_TOL;

/// A finitely supported probability measure on `[-1, 1]`, stored with
/// strictly increasing atoms and positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

/// A finitely supported signed measure on `[-1, 1]`. Differences of
/// measure-valued kernels are built from these.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignedMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

/// Sorts by atom, merges coincident atoms and drops zero weights.
fn canonical(pairs: impl IntoIterator<Item = (f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
    for (a, w) in pairs {
        match atoms.last() {
            Some(&last) if last == a => *weights.last_mut().unwrap() += w,
            _ => {
                atoms.push(a);
                weights.push(w);
            }
        }
    }
    let keep: Vec<bool> = weights.iter().map(|&w| w != 0.0).collect();
    let atoms = atoms.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(a, _)| a).collect();
    let weights = weights.into_iter().filter(|&w| w != 0.0).collect();
    (atoms, weights)
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        for (&a, &w) in atoms.iter().zip(&weights) {
            if !a.is_finite() || a.abs() > 1.0 + VALIDATION_TOL {
                return Err(Error::InvalidMeasure(format!("atom {a} outside [-1, 1]")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative or non-finite weight {w}")));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        let (atoms, weights) = canonical(atoms.into_iter().map(|a| a.clamp(-1.0, 1.0)).zip(weights));
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn dirac(c: f64) -> Result<Self> {
        Self::new(vec![c], vec![1.0])
    }

    /// `(1 − p)δ₀ + pδ₁`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidMeasure(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Self::new(vec![0.0, 1.0], vec![1.0 - p, p])
    }

    /// `aδ₋₁ + (1 − a − b)δ₀ + bδ₁`.
    pub fn ternoulli(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![-1.0, 0.0, 1.0], vec![a, 1.0 - a - b, b])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `∫ ψ dμ`.
    pub fn integrate(&self, psi: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(&a, &w)| w * psi(a)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x| x)
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.integrate(|x| x.powi(k))
    }

    /// Draws one atom by inverse-CDF with a uniform `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for (&a, &w) in self.atoms.iter().zip(&self.weights) {
            acc += w;
            if u < acc {
                return a;
            }
        }
        *self.atoms.last().expect("measures are non-empty")
    }

    pub fn to_signed(&self) -> SignedMeasure {
        SignedMeasure { atoms: self.atoms.clone(), weights: self.weights.clone() }
    }
}

impl SignedMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure("atom and weight counts differ".into()));
        }
        if atoms.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite atom or weight".into()));
        }
        let (atoms, weights) = canonical(atoms.into_iter().zip(weights));
        Ok(SignedMeasure { atoms, weights })
    }

    /// `μ − ν`.
    pub fn difference(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Self {
        let pairs = mu
            .atoms
            .iter()
            .copied()
            .zip(mu.weights.iter().copied())
            .chain(nu.atoms.iter().copied().zip(nu.weights.iter().map(|w| -w)));
        let (atoms, weights) = canonical(pairs);
        SignedMeasure { atoms, weights }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, psi: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(&a, &w)| w * psi(a)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.weights.iter().fold(0.0, |acc, w| acc + w.abs())
    }
}

/// Walks the quantile coupling of two probability measures, calling
/// `f(mass, x, y)` for each piece that moves `mass` from `x` to `y`.
fn quantile_coupling(mu: &DiscreteMeasure, nu: &DiscreteMeasure, mut f: impl FnMut(f64, f64, f64)) {
    let (mut i, mut j) = (0, 0);
    let (mut left_i, mut left_j) = (mu.weights[0], nu.weights[0]);
    loop {
        let m = left_i.min(left_j);
        f(m, mu.atoms[i], nu.atoms[j]);
        left_i -= m;
        left_j -= m;
        if left_i <= 0.0 {
            i += 1;
            if i == mu.len() {
                break;
            }
            left_i = mu.weights[i];
        }
        if left_j <= 0.0 {
            j += 1;
            if j == nu.len() {
                break;
            }
            left_j = nu.weights[j];
        }
    }
}

/// Wasserstein-1 distance on the line.
pub fn w1(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut cost = 0.0;
    quantile_coupling(mu, nu, |m, x, y| cost += m * (x - y).abs());
    cost
}

/// Wasserstein-2 distance on the line.
pub fn w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut cost = 0.0;
    quantile_coupling(mu, nu, |m, x, y| cost += m * (x - y) * (x - y));
    cost.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_merges_and_sorts() {
        let m = DiscreteMeasure::new(vec![0.5, -0.5, 0.5, 0.0], vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert_eq!(m.atoms(), &[-0.5, 0.0, 0.5]);
        assert_eq!(m.weights(), &[0.25, 0.25, 0.5]);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(DiscreteMeasure::new(vec![0.0], vec![0.9]).is_err());
        assert!(DiscreteMeasure::new(vec![1.5], vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0], vec![]).is_err());
    }

    #[test]
    fn dirac_distances() {
        let a = DiscreteMeasure::dirac(-0.3).unwrap();
        let b = DiscreteMeasure::dirac(0.6).unwrap();
        assert!((w1(&a, &b) - 0.9).abs() < 1e-15);
        assert!((w2(&a, &b) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_versus_half() {
        let g = DiscreteMeasure::bernoulli(0.5).unwrap();
        let k = DiscreteMeasure::dirac(0.5).unwrap();
        assert!((w1(&g, &k) - 0.5).abs() < 1e-15);
        assert!((w2(&g, &k) - 0.5).abs() < 1e-15);
        assert_eq!(g.mean(), k.mean());
        assert!((g.moment(2) - 0.5).abs() < 1e-15);
        assert!((k.moment(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn difference_cancels() {
        let g = DiscreteMeasure::bernoulli(0.3).unwrap();
        let d = SignedMeasure::difference(&g, &g);
        assert!(d.atoms().is_empty());
        assert_eq!(d.total_variation(), 0.0);
    }

    #[test]
    fn quantile_sampling() {
        let g = DiscreteMeasure::bernoulli(0.25).unwrap();
        assert_eq!(g.quantile(0.0), 0.0);
        assert_eq!(g.quantile(0.74), 0.0);
        assert_eq!(g.quantile(0.76), 1.0);
        assert_eq!(g.quantile(1.0), 1.0);
    }
}

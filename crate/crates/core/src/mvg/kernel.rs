use super::func::RealFunction;
use super::measure::{DiscreteMeasure, SignedMeasure};
use crate::error::{Error, Result};
use crate::graphon::{check_permutation, same_r, StepKernel, ValueRange};

/// A measure-valued step kernel: a symmetric `r × r` array of probability
/// measures on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MvgStepKernel {
    r: usize,
    cells: Vec<DiscreteMeasure>,
}

/// A symmetric `r × r` array of signed measures, typically `W1 − W2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMvg {
    r: usize,
    cells: Vec<SignedMeasure>,
}

impl MvgStepKernel {
    /// `cells` is row-major `r × r` and must be symmetric.
    pub fn new(r: usize, cells: Vec<DiscreteMeasure>) -> Result<Self> {
        if r == 0 || cells.len() != r * r {
            return Err(Error::InvalidMeasure(format!("expected {} cells for r = {r}", r * r)));
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if cells[i * r + j] != cells[j * r + i] {
                    return Err(Error::InvalidMeasure(format!("cells ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(MvgStepKernel { r, cells })
    }

    /// Builds the kernel from `f(i, j)` on the upper triangle.
    pub fn from_fn(r: usize, mut f: impl FnMut(usize, usize) -> Result<DiscreteMeasure>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidMeasure("r must be positive".into()));
        }
        let mut cells = vec![None; r * r];
        for i in 0..r {
            for j in i..r {
                let m = f(i, j)?;
                cells[j * r + i] = Some(m.clone());
                cells[i * r + j] = Some(m);
            }
        }
        Ok(MvgStepKernel { r, cells: cells.into_iter().map(Option::unwrap).collect() })
    }

    pub fn constant(r: usize, m: &DiscreteMeasure) -> Result<Self> {
        Self::from_fn(r, |_, _| Ok(m.clone()))
    }

    /// Each entry `c` becomes the cell `δ_c`; entries must lie in `[-1, 1]`.
    pub fn dirac_embedding(w: &StepKernel) -> Result<Self> {
        Self::from_fn(w.r(), |i, j| DiscreteMeasure::dirac(w.get(i, j)))
    }

    /// Each entry `p ∈ [0, 1]` becomes `Ber(p)`.
    pub fn bernoulli_embedding(w: &StepKernel) -> Result<Self> {
        Self::from_fn(w.r(), |i, j| DiscreteMeasure::bernoulli(w.get(i, j)))
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn cell(&self, i: usize, j: usize) -> &DiscreteMeasure {
        &self.cells[i * self.r + j]
    }

    pub fn cells(&self) -> &[DiscreteMeasure] {
        &self.cells
    }

    /// `W∘π`: cell `(i, j)` of the result is `W[π(i)][π(j)]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.r)?;
        let r = self.r;
        let cells = (0..r * r).map(|k| self.cell(perm[k / r], perm[k % r]).clone()).collect();
        Ok(MvgStepKernel { r, cells })
    }

    pub fn refine(&self, target_r: usize) -> Result<Self> {
        if target_r == 0 || target_r % self.r != 0 {
            return Err(Error::NotDivisible { r: self.r, target: target_r });
        }
        let f = target_r / self.r;
        let cells = (0..target_r * target_r)
            .map(|k| self.cell(k / target_r / f, k % target_r / f).clone())
            .collect();
        Ok(MvgStepKernel { r: target_r, cells })
    }

    /// The natural projection: cellwise expectation.
    pub fn project(&self) -> StepKernel {
        let values: Vec<f64> = self.cells.iter().map(|c| c.mean()).collect();
        let range = if self.cells.iter().all(|c| c.atoms()[0] >= 0.0) {
            ValueRange::UNIT
        } else {
            ValueRange::SIGNED
        };
        StepKernel::new(self.r, values, range).expect("cell means are symmetric and in range")
    }

    /// `Γ(ψ, W)`: entry `(i, j)` is `∫ ψ dW_ij`.
    pub fn gamma<F: RealFunction + ?Sized>(&self, psi: &F) -> StepKernel {
        let values: Vec<f64> = self.cells.iter().map(|c| c.integrate(|x| psi.eval(x))).collect();
        StepKernel::new(self.r, values, ValueRange::REAL).expect("symmetric by construction")
    }

    pub fn to_signed(&self) -> SignedMvg {
        SignedMvg { r: self.r, cells: self.cells.iter().map(|c| c.to_signed()).collect() }
    }
}

impl SignedMvg {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn cell(&self, i: usize, j: usize) -> &SignedMeasure {
        &self.cells[i * self.r + j]
    }

    pub fn cells(&self) -> &[SignedMeasure] {
        &self.cells
    }

    pub fn gamma<F: RealFunction + ?Sized>(&self, psi: &F) -> StepKernel {
        let values: Vec<f64> = self.cells.iter().map(|c| c.integrate(|x| psi.eval(x))).collect();
        StepKernel::new(self.r, values, ValueRange::REAL).expect("symmetric by construction")
    }

    /// Cellwise expectation of the signed cells.
    pub fn project(&self) -> StepKernel {
        self.gamma(&|x: f64| x)
    }

    pub fn max_total_variation(&self) -> f64 {
        self.cells.iter().map(|c| c.total_variation()).fold(0.0, f64::max)
    }
}

/// `W1 − W2` as signed cells, so that `Γ(ψ, diff) = Γ(ψ, W1) − Γ(ψ, W2)`.
pub fn mvg_diff(w1: &MvgStepKernel, w2: &MvgStepKernel) -> Result<SignedMvg> {
    same_r(w1.r, w2.r)?;
    let cells = w1.cells.iter().zip(&w2.cells).map(|(a, b)| SignedMeasure::difference(a, b)).collect();
    Ok(SignedMvg { r: w1.r, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvg::func::Polynomial;

    fn wg() -> MvgStepKernel {
        MvgStepKernel::constant(3, &DiscreteMeasure::bernoulli(0.5).unwrap()).unwrap()
    }

    fn wk() -> MvgStepKernel {
        MvgStepKernel::constant(3, &DiscreteMeasure::dirac(0.5).unwrap()).unwrap()
    }

    #[test]
    fn moments_distinguish_bernoulli_from_dirac() {
        let id = |x: f64| x;
        let sq = Polynomial::monomial(2);
        assert!(wg().gamma(&id).values().iter().all(|&v| v == 0.5));
        assert!(wk().gamma(&id).values().iter().all(|&v| v == 0.5));
        assert!(wg().gamma(&sq).values().iter().all(|&v| v == 0.5));
        assert!(wk().gamma(&sq).values().iter().all(|&v| v == 0.25));
        assert_eq!(wg().project(), wk().project());
    }

    #[test]
    fn dirac_embedding_round_trips_through_gamma() {
        let w = StepKernel::new(2, vec![0.2, -0.7, -0.7, 1.0], ValueRange::SIGNED).unwrap();
        let e = MvgStepKernel::dirac_embedding(&w).unwrap();
        assert_eq!(e.gamma(&|x: f64| x).values(), w.values());
        assert_eq!(e.project().values(), w.values());
    }

    #[test]
    fn ternoulli_reconstruction() {
        let m = MvgStepKernel::constant(1, &DiscreteMeasure::ternoulli(0.2, 0.3).unwrap()).unwrap();
        let a = m.gamma(&|z: f64| z * (z - 1.0) / 2.0).get(0, 0);
        let b = m.gamma(&|z: f64| z * (z + 1.0) / 2.0).get(0, 0);
        assert!((a - 0.2).abs() < 1e-15);
        assert!((b - 0.3).abs() < 1e-15);
    }

    #[test]
    fn diff_is_linear_in_gamma() {
        let d = mvg_diff(&wg(), &wk()).unwrap();
        let sq = Polynomial::monomial(2);
        assert!(d.gamma(&sq).values().iter().all(|&v| (v - 0.25).abs() < 1e-15));
        assert!(d.project().values().iter().all(|&v| v.abs() < 1e-15));
        let zero = mvg_diff(&wg(), &wg()).unwrap();
        assert!(zero.gamma(&|x: f64| x).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn refine_and_permute() {
        let w = StepKernel::new(2, vec![0.2, 0.7, 0.7, 1.0], ValueRange::UNIT).unwrap();
        let e = MvgStepKernel::bernoulli_embedding(&w).unwrap();
        assert_eq!(e.refine(4).unwrap().project(), w.refine(4).unwrap());
        assert_eq!(e.permute(&[1, 0]).unwrap().project(), w.permute(&[1, 0]).unwrap());
        assert!(e.permute(&[0, 0]).is_err());
    }
}

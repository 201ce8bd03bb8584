use std::fmt;

use crate::error::{Error, Result};

/// Tolerance used when validating symmetry and range membership.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Closed interval that every entry of a kernel is declared to lie in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValueRange {
    /// `[0, 1]`, the range of graphons and edge densities.
    pub const UNIT: ValueRange = ValueRange { lo: 0.0, hi: 1.0 };
    /// `[-1, 1]`, the range of signed kernels.
    pub const SIGNED: ValueRange = ValueRange { lo: -1.0, hi: 1.0 };
    /// No constraint. Used for derivatives and drifts.
    pub const REAL: ValueRange = ValueRange {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidKernel(format!("bad range [{lo}, {hi}]")));
        }
        Ok(ValueRange { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo - VALIDATION_TOL && v <= self.hi + VALIDATION_TOL
    }

    /// Smallest of UNIT, SIGNED, REAL containing every value.
    pub fn infer(values: &[f64]) -> Self {
        if values.iter().all(|&v| ValueRange::UNIT.contains(v)) {
            ValueRange::UNIT
        } else if values.iter().all(|&v| ValueRange::SIGNED.contains(v)) {
            ValueRange::SIGNED
        } else {
            ValueRange::REAL
        }
    }
}

/// A kernel on `[0,1]²` that is constant on the blocks of the uniform
/// `r`-equipartition, stored as a symmetric row-major `r × r` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct StepKernel {
    r: usize,
    values: Vec<f64>,
    range: ValueRange,
}

impl StepKernel {
    /// Validates symmetry (within 1e-12, then mirrored exactly from the upper
    /// triangle) and range membership.
    pub fn new(r: usize, mut values: Vec<f64>, range: ValueRange) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidKernel("r must be positive".into()));
        }
        if values.len() != r * r {
            return Err(Error::InvalidKernel(format!(
                "expected {} values for r = {r}, got {}",
                r * r,
                values.len()
            )));
        }
        for i in 0..r {
            for j in i..r {
                let a = values[i * r + j];
                let b = values[j * r + i];
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidKernel(format!("non-finite entry at ({i}, {j})")));
                }
                if (a - b).abs() > VALIDATION_TOL {
                    return Err(Error::InvalidKernel(format!(
                        "asymmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                if !range.contains(a) {
                    return Err(Error::InvalidKernel(format!(
                        "entry {a} at ({i}, {j}) outside [{}, {}]",
                        range.lo, range.hi
                    )));
                }
                values[j * r + i] = a;
            }
        }
        Ok(StepKernel { r, values, range })
    }

    pub fn constant(r: usize, c: f64, range: ValueRange) -> Result<Self> {
        Self::new(r, vec![c; r * r], range)
    }

    /// Builds a kernel from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(r: usize, range: ValueRange, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = vec![0.0; r * r];
        for i in 0..r {
            for j in i..r {
                let v = f(i, j);
                values[i * r + j] = v;
                values[j * r + i] = v;
            }
        }
        Self::new(r, values, range)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn range(&self) -> ValueRange {
        self.range
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.r + j]
    }

    /// Same entries with a different declared range.
    pub fn with_range(&self, range: ValueRange) -> Result<Self> {
        Self::new(self.r, self.values.clone(), range)
    }

    /// `w∘π`: entry `(i, j)` of the result is `w[π(i)][π(j)]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.r)?;
        let r = self.r;
        let mut values = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                values[i * r + j] = self.values[perm[i] * r + perm[j]];
            }
        }
        Ok(StepKernel { r, values, range: self.range })
    }

    /// Entrywise `self - other`, range `REAL` unless both are `UNIT`
    /// (then the difference lies in `SIGNED`).
    pub fn sub(&self, other: &StepKernel) -> Result<StepKernel> {
        same_r(self.r, other.r)?;
        let values: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        let range = if self.range == ValueRange::UNIT && other.range == ValueRange::UNIT {
            ValueRange::SIGNED
        } else {
            ValueRange::REAL
        };
        Ok(StepKernel { r: self.r, values, range })
    }

    /// `⟨u, v⟩ = (1/r²) Σ u_ij v_ij`, the L² inner product of the step functions.
    pub fn inner(&self, other: &StepKernel) -> Result<f64> {
        same_r(self.r, other.r)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s / (self.r * self.r) as f64)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, range: ValueRange, f: impl Fn(f64) -> f64) -> Result<StepKernel> {
        Self::new(self.r, self.values.iter().map(|&v| f(v)).collect(), range)
    }

    /// Replicates every block into `(target_r / r)²` sub-blocks. The
    /// represented function on `[0,1]²` is unchanged.
    pub fn refine(&self, target_r: usize) -> Result<StepKernel> {
        if target_r == 0 || target_r % self.r != 0 {
            return Err(Error::NotDivisible { r: self.r, target: target_r });
        }
        let f = target_r / self.r;
        let mut values = vec![0.0; target_r * target_r];
        for i in 0..target_r {
            for j in 0..target_r {
                values[i * target_r + j] = self.get(i / f, j / f);
            }
        }
        Ok(StepKernel { r: target_r, values, range: self.range })
    }

    /// Upper-triangular entries in row-major order, `(0,0), (0,1), …, (r-1,r-1)`.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let r = self.r;
        let mut out = Vec::with_capacity(r * (r + 1) / 2);
        for i in 0..r {
            for j in i..r {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

impl fmt::Display for StepKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.r {
            let row: Vec<String> = (0..self.r).map(|j| format!("{:.4}", self.get(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Refines both kernels to the least common multiple of their block counts.
pub fn refine_to_common_r(a: &StepKernel, b: &StepKernel) -> Result<(StepKernel, StepKernel)> {
    let l = lcm(a.r(), b.r());
    Ok((a.refine(l)?, b.refine(l)?))
}

pub(crate) fn same_r(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::BlockMismatch { left, right })
    }
}

pub(crate) fn check_permutation(perm: &[usize], r: usize) -> Result<()> {
    if perm.len() != r {
        return Err(Error::BlockMismatch { left: perm.len(), right: r });
    }
    let mut seen = vec![false; r];
    for &p in perm {
        if p >= r || seen[p] {
            return Err(Error::InvalidKernel(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_and_out_of_range() {
        assert!(StepKernel::new(2, vec![0.0, 0.5, 0.4, 0.0], ValueRange::UNIT).is_err());
        assert!(StepKernel::new(2, vec![0.0, 1.5, 1.5, 0.0], ValueRange::UNIT).is_err());
        assert!(StepKernel::new(0, vec![], ValueRange::UNIT).is_err());
        assert!(StepKernel::new(2, vec![0.0, -0.5, -0.5, 0.0], ValueRange::SIGNED).is_ok());
    }

    #[test]
    fn refine_by_one_is_identity() {
        let w = StepKernel::new(2, vec![0.1, 0.7, 0.7, 0.3], ValueRange::UNIT).unwrap();
        assert_eq!(w.refine(2).unwrap(), w);
        assert!(w.refine(3).is_err());
    }

    #[test]
    fn refine_replicates_blocks() {
        let w = StepKernel::new(2, vec![0.1, 0.7, 0.7, 0.3], ValueRange::UNIT).unwrap();
        let w4 = w.refine(4).unwrap();
        assert_eq!(w4.get(0, 1), 0.1);
        assert_eq!(w4.get(1, 2), 0.7);
        assert_eq!(w4.get(3, 2), 0.3);
    }

    #[test]
    fn common_refinement_uses_lcm() {
        let a = StepKernel::constant(2, 0.5, ValueRange::UNIT).unwrap();
        let b = StepKernel::constant(3, 0.5, ValueRange::UNIT).unwrap();
        let (a6, b6) = refine_to_common_r(&a, &b).unwrap();
        assert_eq!((a6.r(), b6.r()), (6, 6));
    }
}

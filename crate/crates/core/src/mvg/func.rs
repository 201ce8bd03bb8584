//! Bounded test functions on `[-1, 1]`: piecewise-linear interpolants and
//! polynomials. Both serve as Γ test functions and as edge decorations.

use crate::error::{Error, Result};

/// A real function on `[-1, 1]`.
pub trait RealFunction {
    fn eval(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> RealFunction for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Continuous piecewise-linear function given by its values at increasing
/// breakpoints, the first at `-1` and the last at `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PLFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PLFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::InvalidMeasure(
                "a piecewise-linear function needs at least two matching breakpoints and values".into(),
            ));
        }
        if breakpoints[0] != -1.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidMeasure("breakpoints must span exactly [-1, 1]".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMeasure("breakpoints must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite value".into()));
        }
        Ok(PLFunction { breakpoints, values })
    }

    pub fn constant(c: f64) -> Self {
        PLFunction { breakpoints: vec![-1.0, 1.0], values: vec![c, c] }
    }

    pub fn identity() -> Self {
        PLFunction { breakpoints: vec![-1.0, 1.0], values: vec![-1.0, 1.0] }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn lipschitz(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    /// `max(‖ψ‖∞, ‖ψ‖_Lip)`.
    pub fn bl_norm(&self) -> f64 {
        self.sup_norm().max(self.lipschitz())
    }
}

impl RealFunction for PLFunction {
    fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let k = self.breakpoints.partition_point(|&b| b < x);
        if k == 0 {
            return self.values[0];
        }
        let (x0, x1) = (self.breakpoints[k - 1], self.breakpoints[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// `Σ c_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Polynomial { coeffs }
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect(),
        }
    }

    /// `max(‖p‖∞, ‖p′‖∞)` on `[-1, 1]`, evaluated on a grid of 4001 points
    /// (accurate to about `‖p″‖∞ · 1.3e-7`).
    pub fn bl_norm(&self) -> f64 {
        let d = self.derivative();
        (0..=4000)
            .map(|k| -1.0 + k as f64 / 2000.0)
            .map(|x| self.eval(x).abs().max(d.eval(x).abs()))
            .fold(0.0, f64::max)
    }
}

impl RealFunction for Polynomial {
    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// A function attached to one edge of a decorated graph.
#[derive(Clone, Debug, PartialEq)]
pub enum Decoration {
    Pl(PLFunction),
    Poly(Polynomial),
}

impl Decoration {
    pub fn identity() -> Self {
        Decoration::Poly(Polynomial::monomial(1))
    }

    pub fn one() -> Self {
        Decoration::Poly(Polynomial::new(vec![1.0]))
    }

    pub fn bl_norm(&self) -> f64 {
        match self {
            Decoration::Pl(f) => f.bl_norm(),
            Decoration::Poly(p) => p.bl_norm(),
        }
    }
}

impl RealFunction for Decoration {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Decoration::Pl(f) => f.eval(x),
            Decoration::Poly(p) => p.eval(x),
        }
    }
}

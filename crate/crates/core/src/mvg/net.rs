//! Finite nets of bounded-Lipschitz test functions.
//!
//! The lattice net with `m` segments consists of every continuous function
//! that is linear on the cells of the grid `x_k = -1 + k·h` (`h = 2/m`),
//! takes values on the same grid `{-1, -1 + h, …, 1}` at the knots, and has
//! slope in `{-1, 0, 1}` on each cell. Every `ψ` with `‖ψ‖_BL ≤ 1` is within
//! sup-distance `h` of some member, so `m = ⌈2/ε⌉` certifies radius `ε`.

use super::func::{PLFunction, RealFunction};
use crate::error::{Error, Result};

/// Default cap on the number of functions a net may enumerate.
pub const DEFAULT_NET_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
enum NetKind {
    Lattice { segments: usize },
    Explicit(Vec<PLFunction>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzNet {
    epsilon: f64,
    kind: NetKind,
}

/// Number of lattice paths with `m` steps in `{-1, 0, 1}` staying in `0..=m`.
pub fn lattice_path_count(m: usize) -> u128 {
    let mut ways = vec![1u128; m + 1];
    for _ in 0..m {
        let mut next = vec![0u128; m + 1];
        for j in 0..=m {
            let mut s = ways[j];
            if j > 0 {
                s = s.saturating_add(ways[j - 1]);
            }
            if j < m {
                s = s.saturating_add(ways[j + 1]);
            }
            next[j] = s;
        }
        ways = next;
    }
    ways.into_iter().fold(0u128, |a, b| a.saturating_add(b))
}

/// Lattice net with cover radius at most `epsilon`, refusing to build nets
/// with more than `DEFAULT_NET_CAP` members.
pub fn build_net(epsilon: f64) -> Result<LipschitzNet> {
    build_net_with_cap(epsilon, DEFAULT_NET_CAP)
}

pub fn build_net_with_cap(epsilon: f64, cap: u128) -> Result<LipschitzNet> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::Precondition(format!("net epsilon {epsilon} outside (0, 2]")));
    }
    let m = ((2.0 / epsilon).ceil() as usize).max(2);
    let needed = if m > 70 { u128::MAX } else { lattice_path_count(m) };
    if needed > cap {
        return Err(Error::NetTooLarge { needed, cap });
    }
    Ok(LipschitzNet { epsilon, kind: NetKind::Lattice { segments: m } })
}

impl LipschitzNet {
    /// A net given by an explicit list; every member must have BL norm at
    /// most 1. `epsilon` is the caller's claimed cover radius.
    pub fn from_functions(functions: Vec<PLFunction>, epsilon: f64) -> Result<Self> {
        if let Some(f) = functions.iter().find(|f| f.bl_norm() > 1.0 + 1e-12) {
            return Err(Error::Precondition(format!("net member has BL norm {} > 1", f.bl_norm())));
        }
        Ok(LipschitzNet { epsilon, kind: NetKind::Explicit(functions) })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Sup-distance within which every BL-1 function has a net member.
    pub fn radius(&self) -> f64 {
        match &self.kind {
            NetKind::Lattice { segments } => 2.0 / *segments as f64,
            NetKind::Explicit(_) => self.epsilon,
        }
    }

    /// Grid segment count for lattice nets.
    pub fn segments(&self) -> Option<usize> {
        match &self.kind {
            NetKind::Lattice { segments } => Some(*segments),
            NetKind::Explicit(_) => None,
        }
    }

    pub fn len(&self) -> u128 {
        match &self.kind {
            NetKind::Lattice { segments } => lattice_path_count(*segments),
            NetKind::Explicit(f) => f.len() as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn explicit(&self) -> Option<&[PLFunction]> {
        match &self.kind {
            NetKind::Explicit(f) => Some(f),
            NetKind::Lattice { .. } => None,
        }
    }

    /// Every member, materialized.
    pub fn functions(&self) -> Vec<PLFunction> {
        match &self.kind {
            NetKind::Explicit(f) => f.clone(),
            NetKind::Lattice { segments } => {
                let m = *segments;
                let h = 2.0 / m as f64;
                let knots: Vec<f64> = (0..=m).map(|k| if k == m { 1.0 } else { -1.0 + k as f64 * h }).collect();
                let mut out = Vec::new();
                let mut levels = vec![0usize; m + 1];
                for start in 0..=m {
                    levels[0] = start;
                    enumerate_paths(m, 1, &mut levels, &mut |lv| {
                        let values = lv.iter().map(|&j| level_value(j, m)).collect();
                        out.push(PLFunction::new(knots.clone(), values).expect("valid grid"));
                    });
                }
                out
            }
        }
    }

    /// One member per line as `breakpoint:value` pairs.
    pub fn export<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        for f in self.functions() {
            let parts: Vec<String> =
                f.breakpoints().iter().zip(f.values()).map(|(b, v)| format!("{b}:{v}")).collect();
            writeln!(out, "{}", parts.join(" "))?;
        }
        Ok(())
    }

    /// Best approximation distance of `psi` by a member, measured on a fine
    /// grid. Used to spot-check the cover radius.
    pub fn sup_distance_to<F: RealFunction + ?Sized>(&self, psi: &F, grid: usize) -> f64 {
        let xs: Vec<f64> = (0..=grid).map(|k| -1.0 + 2.0 * k as f64 / grid as f64).collect();
        let target: Vec<f64> = xs.iter().map(|&x| psi.eval(x)).collect();
        self.functions()
            .iter()
            .map(|f| xs.iter().zip(&target).map(|(&x, &y)| (f.eval(x) - y).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn level_value(j: usize, m: usize) -> f64 {
    if 2 * j == m {
        0.0
    } else {
        -1.0 + 2.0 * j as f64 / m as f64
    }
}

fn enumerate_paths(m: usize, k: usize, levels: &mut [usize], emit: &mut impl FnMut(&[usize])) {
    if k > m {
        emit(levels);
        return;
    }
    let prev = levels[k - 1];
    for next in [prev.wrapping_sub(1), prev, prev + 1] {
        if next <= m {
            levels[k] = next;
            enumerate_paths(m, k + 1, levels, emit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarsest_net() {
        let net = build_net(2.0).unwrap();
        assert_eq!(net.segments(), Some(2));
        let fs = net.functions();
        assert_eq!(fs.len() as u128, net.len());
        let has = |vals: [f64; 3]| fs.iter().any(|f| f.values() == vals);
        assert!(has([0.0, 0.0, 0.0]));
        assert!(has([-1.0, 0.0, 1.0]));
        assert!(has([1.0, 0.0, -1.0]));
        assert!(fs.iter().all(|f| f.bl_norm() <= 1.0));
    }

    #[test]
    fn counts_match_enumeration() {
        for eps in [1.0, 0.5, 0.4] {
            let net = build_net(eps).unwrap();
            let fs = net.functions();
            assert_eq!(fs.len() as u128, net.len());
            let mut dedup = fs.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), fs.len());
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(build_net(0.01), Err(Error::NetTooLarge { .. })));
        assert!(matches!(build_net_with_cap(0.5, 10), Err(Error::NetTooLarge { .. })));
        assert!(build_net(0.0).is_err());
        assert!(build_net(2.5).is_err());
    }

    #[test]
    fn covers_smooth_functions() {
        let net = build_net(0.5).unwrap();
        let h = net.radius();
        for psi in [|x: f64| (3.0 * x).sin() / 3.0, |x: f64| 0.9 * x.abs() - 0.2, |x: f64| 0.5 * x * x] {
            assert!(net.sup_distance_to(&psi, 400) <= h + 1e-12);
        }
    }
}

//! Text format for measure-valued step kernels: header `r k_max`, then one
//! line per cell `(i, j)` with `j ≤ i`: `i j a₁ w₁ a₂ w₂ …`.

use std::io::{BufRead, Write};

use super::kernel::MvgStepKernel;
use super::measure::DiscreteMeasure;
use crate::error::{Error, Result};

pub fn write_mvg<W: Write>(w: &MvgStepKernel, out: &mut W) -> Result<()> {
    let k_max = w.cells().iter().map(|c| c.len()).max().unwrap_or(0);
    writeln!(out, "{} {}", w.r(), k_max)?;
    for i in 0..w.r() {
        for j in 0..=i {
            let c = w.cell(i, j);
            let mut line = format!("{i} {j}");
            for (a, p) in c.atoms().iter().zip(c.weights()) {
                line.push_str(&format!(" {a} {p}"));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

pub fn read_mvg<R: BufRead>(input: R) -> Result<MvgStepKernel> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty mvg file".into()))?;
    let header = header?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("line 1: bad header `{header}`"))))
        .collect::<Result<_>>()?;
    if h.len() != 2 || h[0] == 0 {
        return Err(Error::Parse("line 1: expected `r k_max`".into()));
    }
    let (r, k_max) = (h[0], h[1]);
    let mut cells: Vec<Option<DiscreteMeasure>> = vec![None; r * r];
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: malformed cell", n + 1));
        if toks.len() < 4 || toks.len() % 2 != 0 || (toks.len() - 2) / 2 > k_max {
            return Err(bad());
        }
        let i: usize = toks[0].parse().map_err(|_| bad())?;
        let j: usize = toks[1].parse().map_err(|_| bad())?;
        if i >= r || j > i {
            return Err(Error::Parse(format!("line {}: cell ({i}, {j}) out of range", n + 1)));
        }
        let nums: Vec<f64> = toks[2..].iter().map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let atoms = nums.iter().step_by(2).copied().collect();
        let weights = nums.iter().skip(1).step_by(2).copied().collect();
        let m = DiscreteMeasure::new(atoms, weights)?;
        cells[i * r + j] = Some(m.clone());
        cells[j * r + i] = Some(m);
    }
    let cells = cells
        .into_iter()
        .enumerate()
        .map(|(k, c)| c.ok_or_else(|| Error::Parse(format!("cell ({}, {}) missing", k / r, k % r))))
        .collect::<Result<Vec<_>>>()?;
    MvgStepKernel::new(r, cells)
}

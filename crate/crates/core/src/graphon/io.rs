//! Text, CSV and PGM formats for step kernels.
//!
//! Text: first line `r lo hi`, then `r` lines of `r` decimals.
//! CSV: header `b0,b1,…`, then `r` rows; the range is inferred on read.
//! PGM: ASCII graymap (`P2`), one pixel per block, gray level
//! `round(255·(v − lo)/(hi − lo))`.

use std::io::{BufRead, Write};

use super::kernel::{StepKernel, ValueRange};
use crate::error::{Error, Result};

pub fn write_kernel_text<W: Write>(w: &StepKernel, out: &mut W) -> Result<()> {
    let range = w.range();
    writeln!(out, "{} {} {}", w.r(), range.lo, range.hi)?;
    for i in 0..w.r() {
        let row: Vec<String> = (0..w.r()).map(|j| format!("{}", w.get(i, j))).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_kernel_text<R: BufRead>(input: R) -> Result<StepKernel> {
    let mut lines = input.lines().enumerate().filter_map(|(n, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('#') => None,
        other => Some((n + 1, other)),
    });
    let (n, header) = lines.next().ok_or_else(|| Error::Parse("empty kernel file".into()))?;
    let header = header?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("line {n}: expected `r lo hi`")));
    }
    let r: usize = parse_num(parts[0], n)?;
    let range = ValueRange::new(parse_num(parts[1], n)?, parse_num(parts[2], n)?)?;
    let mut values = Vec::with_capacity(r * r);
    for _ in 0..r {
        let (n, line) = lines.next().ok_or_else(|| Error::Parse(format!("expected {r} rows")))?;
        let line = line?;
        let row: Vec<f64> = line.split_whitespace().map(|t| parse_num(t, n)).collect::<Result<_>>()?;
        if row.len() != r {
            return Err(Error::Parse(format!("line {n}: expected {r} values, got {}", row.len())));
        }
        values.extend(row);
    }
    StepKernel::new(r, values, range)
}

pub fn write_kernel_csv<W: Write>(w: &StepKernel, out: &mut W) -> Result<()> {
    let header: Vec<String> = (0..w.r()).map(|j| format!("b{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..w.r() {
        let row: Vec<String> = (0..w.r()).map(|j| format!("{}", w.get(i, j))).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_kernel_csv<R: BufRead>(input: R) -> Result<StepKernel> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in input.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(line.split(',').map(|t| parse_num(t.trim(), n + 1)).collect::<Result<_>>()?);
    }
    let r = rows.len();
    if rows.iter().any(|row| row.len() != r) {
        return Err(Error::Parse("csv kernel is not square".into()));
    }
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let range = ValueRange::infer(&values);
    StepKernel::new(r, values, range)
}

/// Gray level of `v` on the declared range. Infinite ranges fall back to the
/// observed min/max.
pub fn gray_level(v: f64, lo: f64, hi: f64) -> u8 {
    if hi <= lo {
        return 0;
    }
    (255.0 * ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).round() as u8
}

pub fn write_pgm<W: Write>(w: &StepKernel, out: &mut W) -> Result<()> {
    let r = w.r();
    let mut range = w.range();
    if !range.lo.is_finite() || !range.hi.is_finite() {
        let lo = w.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = w.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        range = ValueRange { lo, hi };
    }
    writeln!(out, "P2\n{r} {r}\n255")?;
    for i in 0..r {
        let row: Vec<String> = (0..r).map(|j| gray_level(w.get(i, j), range.lo, range.hi).to_string()).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse(format!("line {line}: cannot parse `{tok}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StepKernel {
        StepKernel::new(3, vec![0.0, 0.25, 1.0, 0.25, 0.5, 0.125, 1.0, 0.125, 0.75], ValueRange::UNIT).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let w = sample();
        let mut buf = Vec::new();
        write_kernel_text(&w, &mut buf).unwrap();
        assert_eq!(read_kernel_text(&buf[..]).unwrap(), w);
    }

    #[test]
    fn csv_round_trip() {
        let w = sample();
        let mut buf = Vec::new();
        write_kernel_csv(&w, &mut buf).unwrap();
        assert!(buf.starts_with(b"b0,b1,b2\n"));
        assert_eq!(read_kernel_csv(&buf[..]).unwrap(), w);
    }

    #[test]
    fn pgm_levels() {
        let mut buf = Vec::new();
        write_pgm(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "P2");
        assert_eq!(lines[3], "0 64 255");
        assert_eq!(gray_level(0.5, 0.0, 1.0), 128);
    }

    #[test]
    fn rejects_short_rows() {
        assert!(read_kernel_text("2 0 1\n0 1\n1\n".as_bytes()).is_err());
    }
}

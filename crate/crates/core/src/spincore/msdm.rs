//! `MSDM v1` text format for density matrices.
//!
//! ```text
//! MSDM v1
//! N <n> S2 <twice_spin>
//! re,im re,im ...      (D rows of D entries)
//! ```

use std::fmt::Write as _;

use super::{DensityMatrix, SystemDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};
use crate::numfmt::sig17;

pub fn write_msdm(rho: &DensityMatrix) -> String {
    let desc = rho.descriptor();
    let d = rho.dim();
    let mut s = String::with_capacity(d * d * 50 + 32);
    s.push_str("MSDM v1\n");
    let _ = writeln!(s, "N {} S2 {}", desc.num_sites(), desc.twice_spin());
    for i in 0..d {
        for j in 0..d {
            let z = rho.matrix()[(i, j)];
            if j > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{},{}", sig17(z.re), sig17(z.im));
        }
        s.push('\n');
    }
    s
}

fn bad(detail: impl Into<String>) -> Error {
    Error::format("MSDM file", detail)
}

pub fn parse_msdm(text: &str) -> Result<DensityMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(l) if l.trim() == "MSDM v1" => {}
        _ => return Err(bad("missing 'MSDM v1' header")),
    }
    let head: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("missing size line"))?
        .split_whitespace()
        .collect();
    if head.len() != 4 || head[0] != "N" || head[2] != "S2" {
        return Err(bad("size line must read 'N <n> S2 <twice_spin>'"));
    }
    let n: usize = head[1].parse().map_err(|_| bad("bad N"))?;
    let ts: u32 = head[3].parse().map_err(|_| bad("bad S2"))?;
    let desc = SystemDescriptor::new(n, ts).map_err(|e| bad(e.to_string()))?;
    let d = desc.dim();
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        let line = lines.next().ok_or_else(|| bad(format!("expected {d} rows, found {i}")))?;
        let mut count = 0;
        for (j, tok) in line.split_whitespace().enumerate() {
            if j >= d {
                return Err(bad(format!("row {i} has more than {d} entries")));
            }
            let (re, im) = tok.split_once(',').ok_or_else(|| bad(format!("entry '{tok}' is not re,im")))?;
            let re: f64 = re.parse().map_err(|_| bad(format!("bad number '{re}'")))?;
            let im: f64 = im.parse().map_err(|_| bad(format!("bad number '{im}'")))?;
            m[(i, j)] = C64::new(re, im);
            count += 1;
        }
        if count != d {
            return Err(bad(format!("row {i} has {count} entries, expected {d}")));
        }
    }
    if lines.next().is_some() {
        return Err(bad("trailing content after the matrix"));
    }
    DensityMatrix::new(desc, m).map_err(|e| bad(e.to_string()))
}

pub fn read_msdm(path: &std::path::Path) -> Result<DensityMatrix> {
    parse_msdm(&std::fs::read_to_string(path)?)
}

// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! On-disk wave functions.
//!
//! CSV: `# L=<L>,basis=<phase|charge>,ordering=row-major-kplus-outer`,
//! then a `re,im` header and L² rows.
//!
//! Binary (little endian): magic `CRWF`, u32 version, u64 L, u8 basis
//! (0 phase, 1 charge), u8 ordering (0 row-major), then L² (re, im) f64 pairs.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64 as C64;

use super::{Basis, PhaseGrid, WaveFunction};
use crate::error::{Error, Result};

const ORDERING: &str = "row-major-kplus-outer";
const MAGIC: &[u8; 4] = b"CRWF";
const VERSION: u32 = 1;

pub fn write_csv<W: Write>(psi: &WaveFunction, mut w: W) -> Result<()> {
    writeln!(
        w,
        "# L={},basis={},ordering={}",
        psi.grid().len(),
        psi.basis().as_str(),
        ORDERING
    )?;
    writeln!(w, "re,im")?;
    for a in psi.amplitudes() {
        // `{:e}` round-trips f64 exactly.
        writeln!(w, "{:e},{:e}", a.re, a.im)?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<WaveFunction> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".into()))??;
    let header = header
        .strip_prefix("# ")
        .ok_or_else(|| Error::Format("missing metadata line".into()))?;
    let mut l = None;
    let mut basis = None;
    for field in header.split(',') {
        match field.split_once('=') {
            Some(("L", v)) => l = v.parse::<usize>().ok(),
            Some(("basis", "phase")) => basis = Some(Basis::Phase),
            Some(("basis", "charge")) => basis = Some(Basis::Charge),
            Some(("ordering", o)) if o != ORDERING => {
                return Err(Error::Format(format!("unsupported ordering `{o}`")))
            }
            _ => {}
        }
    }
    let grid = PhaseGrid::new(l.ok_or_else(|| Error::Format("missing L".into()))?)?;
    let basis = basis.ok_or_else(|| Error::Format("missing basis".into()))?;
    match lines.next() {
        Some(Ok(h)) if h.trim() == "re,im" => {}
        _ => return Err(Error::Format("missing column header".into())),
    }
    let mut amps = Vec::with_capacity(grid.dim());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("bad row `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(e.to_string()))
        };
        amps.push(C64::new(parse(re)?, parse(im)?));
    }
    WaveFunction::new(grid, basis, amps)
}

pub fn write_binary<W: Write>(psi: &WaveFunction, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(psi.grid().len() as u64).to_le_bytes())?;
    w.write_all(&[matches!(psi.basis(), Basis::Charge) as u8, 0])?;
    for a in psi.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<WaveFunction> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != VERSION {
        return Err(Error::Format("unsupported version".into()));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let grid = PhaseGrid::new(u64::from_le_bytes(b8) as usize)?;
    let mut tags = [0u8; 2];
    r.read_exact(&mut tags)?;
    let basis = match tags[0] {
        0 => Basis::Phase,
        1 => Basis::Charge,
        t => return Err(Error::Format(format!("unknown basis tag {t}"))),
    };
    if tags[1] != 0 {
        return Err(Error::Format("unsupported ordering".into()));
    }
    let mut amps = Vec::with_capacity(grid.dim());
    for _ in 0..grid.dim() {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        amps.push(C64::new(re, f64::from_le_bytes(b8)));
    }
    WaveFunction::new(grid, basis, amps)
}

//! On-disk formats: `%.17g` floats, the series CSV and BNLS1 snapshots.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use bnls_core::evolution::TimeSeries;

use crate::error::{CliError, Result};

pub const SNAPSHOT_MAGIC: &[u8; 5] = b"BNLS1";

/// C's `%.17g`: 17 significant digits, exponent form outside 1e-4..1e17,
/// trailing zeros removed. Enough digits to round-trip every f64.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_else(|| "nan".into())
}

fn radius_label(r: f64) -> String {
    g17(r)
}

/// Header of the series CSV. Depends only on the recorded radii and
/// exponents, which come straight from the config.
pub fn series_header(series: &TimeSeries) -> Vec<String> {
    let mut h: Vec<String> = ["t", "mass", "energy", "kinetic", "potential", "constraint_k", "virial"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(series.morawetz_r.iter().map(|r| format!("morawetz_R{}", radius_label(*r))));
    h.extend(series.cutoff_r.iter().map(|r| format!("local_mass_R{}", radius_label(*r))));
    h.push("sup_norm".into());
    h.push("boundary_mass".into());
    h.extend(series.norm_exponents.iter().map(|p| format!("norm_L{}", radius_label(*p))));
    for s in ["spacetime_density", "me", "mg", "energy_defect"] {
        h.push(s.into());
    }
    h
}

pub fn write_series(path: &Path, series: &TimeSeries) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(e, ctx()))?;
    w.write_record(series_header(series)).map_err(|e| csv_err(e, ctx()))?;
    for rec in &series.records {
        let mut row: Vec<String> =
            [rec.t, rec.mass, rec.energy, rec.kinetic, rec.potential, rec.constraint_k, rec.virial]
                .into_iter()
                .map(g17)
                .collect();
        row.extend(rec.morawetz.iter().chain(&rec.local_mass).copied().map(g17));
        row.push(g17(rec.sup_norm));
        row.push(g17(rec.boundary_mass));
        row.extend(rec.norms.iter().copied().map(g17));
        row.push(g17(rec.spacetime_density));
        row.push(opt(rec.me));
        row.push(opt(rec.mg));
        row.push(g17(rec.energy_defect));
        w.write_record(&row).map_err(|e| csv_err(e, ctx()))?;
    }
    w.flush().map_err(CliError::io(ctx()))
}

fn csv_err(e: csv::Error, context: String) -> CliError {
    CliError::Io { context, source: std::io::Error::other(e) }
}

/// A decoded BNLS1 file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub r_max: f64,
    pub t: f64,
    pub values: Vec<Complex64>,
}

/// Little-endian: magic, u32 K, f64 R_max, f64 t, then K (re, im) f64 pairs.
pub fn write_snapshot(path: &Path, r_max: f64, t: f64, values: &[Complex64]) -> Result<()> {
    let ctx = format!("writing {}", path.display());
    let k = u32::try_from(values.len()).map_err(|_| CliError::Snapshot("more than u32::MAX samples".into()))?;
    let mut w = BufWriter::new(File::create(path).map_err(CliError::io(ctx.clone()))?);
    let mut buf = Vec::with_capacity(25 + 16 * values.len());
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&k.to_le_bytes());
    buf.extend_from_slice(&r_max.to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for z in values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf).map_err(CliError::io(ctx.clone()))?;
    w.flush().map_err(CliError::io(ctx))
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotFile> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path).map_err(CliError::io(format!("reading {}", path.display())))?)
        .read_to_end(&mut bytes)
        .map_err(CliError::io(format!("reading {}", path.display())))?;
    decode_snapshot(&bytes)
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<SnapshotFile> {
    if bytes.len() < 25 || &bytes[..5] != SNAPSHOT_MAGIC {
        return Err(CliError::Snapshot("missing BNLS1 header".into()));
    }
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let k = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes")) as usize;
    if bytes.len() != 25 + 16 * k {
        return Err(CliError::Snapshot(format!("K={k} but {} payload bytes", bytes.len() - 25)));
    }
    let values = (0..k).map(|j| Complex64::new(f64_at(25 + 16 * j), f64_at(33 + 16 * j))).collect();
    Ok(SnapshotFile { r_max: f64_at(9), t: f64_at(17), values })
}

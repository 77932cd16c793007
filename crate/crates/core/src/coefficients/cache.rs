//! Text cache for exact coefficient tables.
//!
//! Format: a header line `# cusplf-coeffs v1 weight=<k> label=<label>
//! length=<N> checksum=<hex>` followed by one decimal integer per line,
//! `a_f(1)` through `a_f(N)`. The checksum is FNV-1a over the body bytes, so
//! a truncated or edited file is rejected and rebuilt by callers.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};

const MAGIC: &str = "# cusplf-coeffs v1";

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Write a table atomically (temp file in the same directory, then rename).
pub fn save(table: &CoefficientTable, path: &Path) -> Result<()> {
    let mut body = String::new();
    for n in 1..=table.len() {
        body.push_str(&table.a(n).to_string());
        body.push('\n');
    }
    let header = format!(
        "{MAGIC} weight={} label={} length={} checksum={:016x}\n",
        table.spec().weight(),
        table.spec().label(),
        table.len(),
        fnv1a(body.as_bytes())
    );
    let tmp = path.with_extension("tmp");
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(header.as_bytes())?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Load a table, verifying header fields and checksum.
pub fn load(path: &Path) -> Result<CoefficientTable> {
    let text = fs::read_to_string(path)?;
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::Cache("empty cache file".into()))?;
    if !header.starts_with(MAGIC) {
        return Err(Error::Cache("bad magic".into()));
    }
    let mut weight = None;
    let mut length = None;
    let mut checksum = None;
    for field in header.split_whitespace() {
        if let Some((k, v)) = field.split_once('=') {
            match k {
                "weight" => weight = v.parse::<u32>().ok(),
                "length" => length = v.parse::<usize>().ok(),
                "checksum" => checksum = u64::from_str_radix(v, 16).ok(),
                _ => {}
            }
        }
    }
    let weight = weight.ok_or_else(|| Error::Cache("missing weight".into()))?;
    let length = length.ok_or_else(|| Error::Cache("missing length".into()))?;
    let checksum = checksum.ok_or_else(|| Error::Cache("missing checksum".into()))?;
    if fnv1a(body.as_bytes()) != checksum {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let mut a = Vec::with_capacity(length + 1);
    a.push(BigInt::zero());
    for (i, line) in body.lines().enumerate() {
        let v = BigInt::from_str(line.trim())
            .map_err(|e| Error::Cache(format!("line {}: {e}", i + 2)))?;
        a.push(v);
    }
    if a.len() != length + 1 {
        return Err(Error::Cache(format!(
            "expected {length} records, found {}",
            a.len() - 1
        )));
    }
    let spec = EigenformSpec::new(weight)?;
    CoefficientTable::from_exact(spec, a)
}

/// Load if present and valid, otherwise build and save.
pub fn load_or_build(spec: EigenformSpec, n: usize, path: &Path) -> Result<(CoefficientTable, bool)> {
    if path.exists() {
        match load(path) {
            Ok(t) if t.spec().weight() == spec.weight() && t.len() >= n => {
                return Ok((t, true));
            }
            Ok(_) => {}     // too short or wrong weight: rebuild
            Err(_) => {}    // corrupted: rebuild
        }
    }
    let table = CoefficientTable::build(spec, n)?;
    save(&table, path)?;
    Ok((table, false))
}

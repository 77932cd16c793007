//! Run configuration: plain-text key=value file with flag overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub weight: u32,
    pub orders: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub precision: Precision,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub table_len: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            weight: 12,
            orders: vec![0, 1],
            t_grid: vec![20.0, 30.0, 40.0],
            sigma_grid: vec![0.55, 0.65, 0.75, 0.85, 0.95],
            precision: Precision::Double,
            jobs: 0,
            out_dir: PathBuf::from("out"),
            cache_dir: PathBuf::from("cache"),
            table_len: 100_000,
        }
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().context("bad list entry"))
        .collect()
}

impl RunConfig {
    /// Read a key=value file ('#' comments allowed).
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value", i + 1))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        for (k, v) in map {
            cfg.apply(&k, &v)?;
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "weight" => self.weight = value.parse()?,
            "m" => self.orders = parse_list(value)?,
            "T" => self.t_grid = parse_list(value)?,
            "sigma" => self.sigma_grid = parse_list(value)?,
            "precision" => {
                self.precision = match value {
                    "double" => Precision::Double,
                    "extended" => Precision::Extended,
                    other => bail!("unknown precision {other}"),
                }
            }
            "jobs" => self.jobs = value.parse()?,
            "out" => self.out_dir = PathBuf::from(value),
            "cache" => self.cache_dir = PathBuf::from(value),
            "length" => self.table_len = value.parse()?,
            other => bail!("unknown config key {other}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() {
            bail!("T grid is empty");
        }
        if self.sigma_grid.is_empty() {
            bail!("sigma grid is empty");
        }
        if self.orders.is_empty() {
            bail!("order list is empty");
        }
        if self.orders.iter().any(|&m| m > 4) {
            bail!("derivative orders above 4 are not configured");
        }
        cusplf::coefficients::EigenformSpec::new(self.weight)?;
        Ok(())
    }

    pub fn cache_file(&self) -> PathBuf {
        self.cache_dir
            .join(format!("w{}_n{}.coeffs", self.weight, self.table_len))
    }
}

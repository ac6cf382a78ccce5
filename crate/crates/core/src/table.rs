//! Jump-size condition on per-stock jump-diffusion parameter estimates.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::{Error, Result, Scalar};

/// The bundled 23-row dataset (`ticker,drift,sigma,nu,gamma`).
pub const BUNDLED_TABLE: &str = include_str!("../data/table1.csv");

/// Default risk-free rate for the report.
pub const DEFAULT_RISK_FREE: f64 = 0.04;

/// Constant-coefficient jump-diffusion estimates for one stock or index.
#[derive(Debug, Clone, PartialEq)]
pub struct StockParamRecord<T> {
    pub ticker: String,
    /// Drift `mu` of the price process.
    pub drift: T,
    pub sigma: T,
    /// Jump intensity `nu(R)`.
    pub nu_total: T,
    /// Relative jump size.
    pub gamma: T,
    /// Line in the source file (header is line 1).
    pub line: usize,
}

#[derive(Deserialize)]
struct RawRecord {
    ticker: String,
    drift: f64,
    sigma: f64,
    nu: f64,
    gamma: f64,
}

/// `zeta gamma = -(mu - r) gamma / (sigma^2 + gamma^2 nu(R))`.
pub fn zeta_gamma<T: Scalar>(rec: &StockParamRecord<T>, r: T) -> Result<T> {
    let denom = rec.sigma * rec.sigma + rec.gamma * rec.gamma * rec.nu_total;
    if !(denom > T::zero()) {
        return Err(Error::DegenerateMarket {
            z: f64::NAN,
            reason: format!("{}: sigma^2 + gamma^2 nu = 0", rec.ticker),
        });
    }
    Ok(-(rec.drift - r) * rec.gamma / denom)
}

pub fn load_records<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<StockParamRecord<T>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_records(file)
}

/// Parses CSV with header `ticker,drift,sigma,nu,gamma`.
pub fn parse_records<T: Scalar, R: Read>(input: R) -> Result<Vec<StockParamRecord<T>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected = ["ticker", "drift", "sigma", "nu", "gamma"];
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            row: 1,
            message: format!("header must be {}", expected.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let raw: RawRecord = rec.deserialize(Some(&header)).map_err(|e| Error::Parse {
            row: line,
            message: e.to_string(),
        })?;
        out.push(validate(raw, line)?);
    }
    Ok(out)
}

fn validate<T: Scalar>(raw: RawRecord, line: usize) -> Result<StockParamRecord<T>> {
    let fail = |field, message: &str| Error::Validation {
        row: line,
        field,
        message: message.to_string(),
    };
    if raw.ticker.is_empty() {
        return Err(fail("ticker", "must not be empty"));
    }
    if !raw.drift.is_finite() {
        return Err(fail("drift", "must be finite"));
    }
    if !(raw.sigma > 0.0) || !raw.sigma.is_finite() {
        return Err(fail("sigma", "must be > 0"));
    }
    if !(raw.nu >= 0.0) || !raw.nu.is_finite() {
        return Err(fail("nu", "must be >= 0"));
    }
    if !(raw.gamma > -1.0) || !raw.gamma.is_finite() {
        return Err(fail("gamma", "must be > -1"));
    }
    Ok(StockParamRecord {
        ticker: raw.ticker,
        drift: T::of(raw.drift),
        sigma: T::of(raw.sigma),
        nu_total: T::of(raw.nu),
        gamma: T::of(raw.gamma),
        line,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow<T> {
    pub ticker: String,
    pub zeta_gamma: T,
    /// `zeta gamma >= -1`.
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport<T> {
    pub r: T,
    pub rows: Vec<TableRow<T>>,
    pub min_ticker: String,
    pub min_zeta_gamma: T,
}

impl<T: Scalar> TableReport<T> {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.passes)
    }

    pub fn summary(&self) -> String {
        format!(
            "rows={} passing={} min_zeta_gamma={:.6} min_ticker={}",
            self.rows.len(),
            self.rows.iter().filter(|r| r.passes).count(),
            self.min_zeta_gamma,
            self.min_ticker
        )
    }
}

pub fn build_report<T: Scalar>(records: &[StockParamRecord<T>], r: T) -> Result<TableReport<T>> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to report".into()));
    }
    let mut rows = Vec::with_capacity(records.len());
    let mut min: Option<(usize, T)> = None;
    for (k, rec) in records.iter().enumerate() {
        let v = zeta_gamma(rec, r)?;
        if min.is_none_or(|(_, m)| v < m) {
            min = Some((k, v));
        }
        rows.push(TableRow {
            ticker: rec.ticker.clone(),
            zeta_gamma: v,
            passes: v >= -T::one(),
        });
    }
    let (k, v) = min.expect("records are nonempty");
    Ok(TableReport {
        r,
        min_ticker: rows[k].ticker.clone(),
        min_zeta_gamma: v,
        rows,
    })
}

/// The bundled dataset.
pub fn bundled_records<T: Scalar>() -> Vec<StockParamRecord<T>> {
    parse_records(BUNDLED_TABLE.as_bytes()).expect("bundled table is valid")
}

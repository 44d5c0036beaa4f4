//! Census tables and their CSV and JSON forms.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use systole_core::arith::is_squarefree;
use systole_core::census::{exponent_row_from_matrix, exponent_row_with_matrix};
use systole_core::geodesics::IntersectionLimits;
use systole_core::{ExponentRow, IntersectionMatrix};

use crate::cache::MatrixCache;
use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1.0";

pub const CSV_HEADER: [&str; 12] = [
    "N",
    "squarefree",
    "index",
    "genus",
    "cusps",
    "h",
    "systole_count",
    "total_int",
    "cr_bound",
    "log_systole_ratio",
    "log_crossing_ratio",
    "log_index_ratio",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusParameters {
    pub n_min: i64,
    pub n_max: i64,
    pub squarefree_only: bool,
    pub max_candidates: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub schema_version: String,
    /// RFC 3339, absent with `--no-timestamp`.
    pub generated_at: Option<String>,
    pub parameters: CensusParameters,
    pub rows: Vec<ExponentRow>,
    pub matrices: Option<BTreeMap<i64, IntersectionMatrix>>,
}

impl CensusRecord {
    pub fn incomplete_rows(&self) -> Vec<i64> {
        self.rows.iter().filter(|r| !r.is_complete()).map(|r| r.n).collect()
    }

    /// Recomputes each row's derived fields from its stored primitives and
    /// reports the first mismatch.
    pub fn check_consistency(&self) -> Result<(), String> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        for r in &self.rows {
            let ln = (r.n as f64).ln();
            let bad = |what: &str| Err(format!("N = {}: {what} does not match", r.n));
            if r.systole_count != r.index * r.class_number as u128 {
                return bad("systole_count");
            }
            if !close(r.log_systole_ratio, (r.systole_count as f64).ln() / ln) {
                return bad("log_systole_ratio");
            }
            if !close(r.log_index_ratio, (r.index as f64).ln() / ln) {
                return bad("log_index_ratio");
            }
            match (r.total_intersections, r.crossing_bound, r.log_crossing_ratio) {
                (Some(t), Some(c), Some(x)) => {
                    if c != r.index * t as u128 {
                        return bad("cr_bound");
                    }
                    if !close(x, (c as f64).ln() / ln) {
                        return bad("log_crossing_ratio");
                    }
                }
                (None, None, None) if !r.is_complete() => {}
                _ => return bad("intersection fields"),
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census records serialize") + "\n"
    }

    pub fn to_csv(&self) -> Vec<u8> {
        rows_to_csv(&self.rows)
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[ExponentRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.squarefree.to_string(),
            r.index.to_string(),
            r.genus.to_string(),
            r.cusps.to_string(),
            r.class_number.to_string(),
            r.systole_count.to_string(),
            opt(r.total_intersections),
            opt(r.crossing_bound),
            format!("{:.6}", r.log_systole_ratio),
            opt(r.log_crossing_ratio.map(|x| format!("{x:.6}"))),
            format!("{:.6}", r.log_index_ratio),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub n_min: i64,
    pub n_max: i64,
    pub squarefree_only: bool,
    pub limits: IntersectionLimits,
    pub include_matrices: bool,
    pub timestamp: bool,
    pub seed: Option<u64>,
}

/// Builds the census, reusing and filling the matrix cache. Rows are
/// computed in parallel and assembled in order of `N`.
pub fn run_census(opts: &CensusOptions, cache: Option<&MatrixCache>) -> anyhow::Result<CensusRecord> {
    if opts.n_min < 3 || opts.n_min > opts.n_max {
        return Err(CliError::Usage(format!(
            "invalid range {}..={}: need 3 <= n-min <= n-max",
            opts.n_min, opts.n_max
        ))
        .into());
    }
    let levels: Vec<i64> = (opts.n_min..=opts.n_max)
        .filter(|&n| !opts.squarefree_only || is_squarefree(n * n - 4).unwrap_or(false))
        .collect();
    let computed: Vec<(ExponentRow, Option<IntersectionMatrix>)> = levels
        .par_iter()
        .map(|&n| -> anyhow::Result<_> {
            if let Some(m) = cache.and_then(|c| c.load(n)) {
                return Ok((exponent_row_from_matrix(&m)?, Some(m)));
            }
            let (row, m) = exponent_row_with_matrix(n, opts.limits)?;
            if let (Some(c), Some(m)) = (cache, &m) {
                c.store(m)?;
            }
            Ok((row, m))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut rows = Vec::with_capacity(computed.len());
    let mut matrices = BTreeMap::new();
    for (row, m) in computed {
        if let Some(m) = m {
            matrices.insert(row.n, m);
        }
        rows.push(row);
    }
    Ok(CensusRecord {
        schema_version: SCHEMA_VERSION.into(),
        generated_at: opts.timestamp.then(|| chrono::Utc::now().to_rfc3339()),
        parameters: CensusParameters {
            n_min: opts.n_min,
            n_max: opts.n_max,
            squarefree_only: opts.squarefree_only,
            max_candidates: opts.limits.max_candidates,
            seed: opts.seed,
        },
        rows,
        matrices: opts.include_matrices.then_some(matrices),
    })
}

//! Item-by-item checks of the library against independent computations.

use clap::ValueEnum;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use systole_core::arith::is_squarefree;
use systole_core::census::exponent_row_from_matrix;
use systole_core::dirichlet::{verify_class_number_formula, CheckStatus};
use systole_core::geodesics::IntersectionLimits;
use systole_core::oracle::{
    cusp_count_bruteforce, exhaustive_subfamily_mean, genus_bruteforce, sl2_order_bruteforce,
};
use systole_core::{
    cusps, find_subfamily, genus, index, proposition_lower_bound, subfamily_average,
    CurveSystemMatrix,
};

use crate::cache::{cached_matrix, MatrixCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyKind {
    /// Class number formula at D = N² − 4.
    Cnf,
    /// Index of Γ(N) against a count of SL₂(ℤ/N).
    Index,
    /// Genus and cusps against Riemann-Hurwitz with counted cusps.
    Genus,
    /// Subfamily averages on seeded random matrices.
    Lemma4,
    /// Lower bound against the census crossing bound.
    Prop2,
}

impl VerifyKind {
    /// Default level range; for `lemma4` the range is the matrix size.
    pub fn default_range(self) -> (i64, i64) {
        match self {
            VerifyKind::Cnf => (3, 60),
            VerifyKind::Index => (2, 30),
            VerifyKind::Genus => (3, 30),
            VerifyKind::Lemma4 => (1, 12),
            VerifyKind::Prop2 => (3, 60),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyItem {
    pub item: String,
    pub status: ItemStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub kind: VerifyKind,
    pub n_min: i64,
    pub n_max: i64,
    pub passed: bool,
    pub items: Vec<VerifyItem>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| i.status == ItemStatus::Fail).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            let tag = match i.status {
                ItemStatus::Pass => "pass",
                ItemStatus::Fail => "FAIL",
                ItemStatus::Skipped => "skip",
            };
            out += &format!("{tag:4}  {:<14} {}\n", i.item, i.detail);
        }
        out += &format!(
            "{:?}: {} items, {} failed\n",
            self.kind,
            self.items.len(),
            self.failures()
        );
        out
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["item", "status", "detail"]).expect("in-memory write");
        for i in &self.items {
            let status = serde_json::to_value(i.status).expect("status serializes");
            w.write_record([i.item.as_str(), status.as_str().unwrap_or(""), i.detail.as_str()])
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub kind: VerifyKind,
    pub n_min: i64,
    pub n_max: i64,
    pub tol: f64,
    pub seed: u64,
    pub limits: IntersectionLimits,
}

fn item(name: String, ok: bool, detail: String) -> VerifyItem {
    VerifyItem {
        item: name,
        status: if ok { ItemStatus::Pass } else { ItemStatus::Fail },
        detail,
    }
}

pub fn run_verify(opts: &VerifyOptions, cache: Option<&MatrixCache>) -> anyhow::Result<VerifyReport> {
    let (lo, hi) = (opts.n_min, opts.n_max);
    if lo > hi {
        return Err(crate::error::CliError::Usage(format!("empty range {lo}..={hi}")).into());
    }
    let items = match opts.kind {
        VerifyKind::Cnf => cnf(lo, hi, opts.tol)?,
        VerifyKind::Index => index_items(lo, hi)?,
        VerifyKind::Genus => genus_items(lo, hi)?,
        VerifyKind::Lemma4 => lemma4(lo, hi, opts.seed)?,
        VerifyKind::Prop2 => prop2(lo, hi, opts.limits, cache)?,
    };
    Ok(VerifyReport {
        kind: opts.kind,
        n_min: lo,
        n_max: hi,
        passed: items.iter().all(|i| i.status != ItemStatus::Fail),
        items,
    })
}

fn cnf(lo: i64, hi: i64, tol: f64) -> anyhow::Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    for n in lo.max(3)..=hi {
        let r = verify_class_number_formula(n, tol)?;
        let name = format!("N={n}");
        if r.status == CheckStatus::Skipped {
            items.push(VerifyItem {
                item: name,
                status: ItemStatus::Skipped,
                detail: format!("D = {} not squarefree", r.d),
            });
            continue;
        }
        let residual = r.residual.unwrap_or(f64::NAN);
        let budget = (r.d as f64).sqrt() * tol;
        items.push(item(
            name,
            r.status == CheckStatus::Pass && residual <= budget,
            format!(
                "h = {}, h log eps = {:.9}, sqrt(D) L = {:.9}, residual {residual:.2e}",
                r.class_number.unwrap_or(0),
                r.algebraic_side.unwrap_or(f64::NAN),
                r.analytic_side.unwrap_or(f64::NAN),
            ),
        ));
    }
    Ok(items)
}

fn index_items(lo: i64, hi: i64) -> anyhow::Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    for n in lo.max(1)..=hi {
        let fast = index(n)?;
        let slow = sl2_order_bruteforce(n as u64)? as u128;
        items.push(item(
            format!("N={n}"),
            fast == slow,
            format!("index {fast}, counted {slow}"),
        ));
    }
    Ok(items)
}

fn genus_items(lo: i64, hi: i64) -> anyhow::Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    for n in lo.max(3)..=hi {
        let (g, c) = (genus(n)?, cusps(n)?);
        let (g2, c2) = (genus_bruteforce(n as u64)?, cusp_count_bruteforce(n as u64)?);
        items.push(item(
            format!("N={n}"),
            g == g2 as u128 && c == c2 as u128,
            format!("genus {g} (counted {g2}), cusps {c} (counted {c2})"),
        ));
    }
    Ok(items)
}

const LEMMA4_MATRICES: u64 = 50;

fn lemma4(lo: i64, hi: i64, seed: u64) -> anyhow::Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    for n in lo.max(1) as usize..=hi as usize {
        let mut ok = true;
        let mut detail = format!("{LEMMA4_MATRICES} matrices, all k");
        'draws: for draw in 0..LEMMA4_MATRICES {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(draw * 64 + n as u64);
            let m = CurveSystemMatrix::random(n, 9, s);
            let cr = m.crossing_number();
            for k in 1..=n {
                let avg = subfamily_average::<u128>(&m, k)?;
                let exact = exhaustive_subfamily_mean(&m, k)?;
                let chosen = if k < n { find_subfamily(&m, k, s)?.crossing_number } else { cr };
                let within = Ratio::from_integer(chosen) <= Ratio::new((k * k) as u128 * cr, (n * n) as u128);
                if avg != exact || !within {
                    ok = false;
                    detail = format!("seed {s}, k = {k}: average {avg}, enumerated {exact}, cr(S) = {chosen}");
                    break 'draws;
                }
            }
        }
        items.push(item(format!("n={n}"), ok, detail));
    }
    Ok(items)
}

fn prop2(
    lo: i64,
    hi: i64,
    limits: IntersectionLimits,
    cache: Option<&MatrixCache>,
) -> anyhow::Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    let mut boundary_ok = true;
    let mut monotone_ok = true;
    for g in 2..=30u64 {
        let mut prev = 0;
        for n in 1..=400u64 {
            let lb = proposition_lower_bound(g, n)?;
            boundary_ok &= (lb == 0) == (n <= 3 * g - 3);
            monotone_ok &= lb >= prev;
            prev = lb;
        }
    }
    items.push(item("zero-boundary".into(), boundary_ok, "g = 2..=30, n = 1..=400".into()));
    items.push(item("monotone".into(), monotone_ok, "nondecreasing in n".into()));

    for n in lo.max(3)..=hi {
        if !is_squarefree(n * n - 4)? {
            continue;
        }
        let name = format!("N={n}");
        let g = genus(n)?;
        if g < 2 {
            items.push(VerifyItem {
                item: name,
                status: ItemStatus::Skipped,
                detail: format!("genus {g}"),
            });
            continue;
        }
        let row = exponent_row_from_matrix(&cached_matrix(n, limits, cache)?)?;
        let cr = row.crossing_bound.expect("complete row");
        let lb = proposition_lower_bound(g as u64, row.systole_count as u64)?;
        items.push(item(name, lb <= cr, format!("lower {lb} <= crossing bound {cr}")));
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(kind: VerifyKind, lo: i64, hi: i64) -> VerifyReport {
        let opts = VerifyOptions {
            kind,
            n_min: lo,
            n_max: hi,
            tol: 1e-3,
            seed: 0,
            limits: IntersectionLimits::default(),
        };
        run_verify(&opts, None).unwrap()
    }

    #[test]
    fn kinds_pass_on_small_ranges() {
        for kind in [VerifyKind::Cnf, VerifyKind::Index, VerifyKind::Genus, VerifyKind::Prop2] {
            let r = run(kind, 3, 20);
            assert!(r.passed, "{kind:?}: {}", r.to_text());
        }
        assert!(run(VerifyKind::Lemma4, 1, 7).passed);
    }

    #[test]
    fn cnf_skips_non_squarefree() {
        let r = run(VerifyKind::Cnf, 4, 4);
        assert_eq!(r.items[0].status, ItemStatus::Skipped);
        assert!(r.passed);
    }

    #[test]
    fn text_and_csv_output() {
        let r = run(VerifyKind::Index, 2, 4);
        assert!(r.to_text().contains("pass  N=3"));
        let csv = String::from_utf8(r.to_csv()).unwrap();
        assert!(csv.contains("N=4,pass,"));
    }
}

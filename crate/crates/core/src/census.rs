//! Crossing-number bounds for the systoles of `X(N)`, exponent tables, the
//! lower bound from the disjoint-curve argument, and subfamilies of curve
//! systems with few crossings.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{NumCast, One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, omega};
use crate::error::{domain, Error, Result};
use crate::forms::class_number;
use crate::geodesics::{IntersectionContext, IntersectionLimits, IntersectionMatrix};
use crate::surface::{cusps, genus, index, systole_count};

/// One level of the census.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub n: i64,
    pub squarefree: bool,
    pub omega: u32,
    pub index: u128,
    pub genus: u128,
    pub cusps: u128,
    pub class_number: usize,
    pub systole_count: u128,
    /// Distinct pairs plus self-intersections.
    pub total_intersections: Option<u64>,
    /// Distinct pairs only.
    pub total_distinct: Option<u64>,
    /// `index × total_intersections`.
    pub crossing_bound: Option<u128>,
    pub log_systole_ratio: f64,
    pub log_crossing_ratio: Option<f64>,
    pub log_index_ratio: f64,
    /// `total / (N log N)²`, the implied constant of the upper bound.
    pub crossing_constant: Option<f64>,
    /// `total / (h log ε)²`.
    pub total_over_hlog2: Option<f64>,
    /// Set when the intersection computation did not finish.
    pub failure: Option<String>,
}

impl ExponentRow {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

fn log_ratio(x: u128, n: i64) -> f64 {
    (x as f64).ln() / (n as f64).ln()
}

/// `[Γ(1):Γ(N)] × total_intersections(N)`.
pub fn crossing_bound(n: i64) -> Result<u128> {
    let m = IntersectionContext::new(n)?.matrix()?;
    index(n)?
        .checked_mul(m.total() as u128)
        .ok_or(Error::Overflow("crossing bound"))
}

/// Builds the row for `N`. Intersection failures are recorded in the row;
/// only invalid input is an error.
pub fn exponent_row(n: i64, limits: IntersectionLimits) -> Result<ExponentRow> {
    exponent_row_with_matrix(n, limits).map(|(row, _)| row)
}

/// As [`exponent_row`], also returning the intersection matrix on success.
pub fn exponent_row_with_matrix(
    n: i64,
    limits: IntersectionLimits,
) -> Result<(ExponentRow, Option<IntersectionMatrix>)> {
    let mut row = base_row(n)?;
    match IntersectionContext::with_limits(n, limits).and_then(|ctx| ctx.matrix()) {
        Ok(m) => {
            attach_matrix(&mut row, &m)?;
            Ok((row, Some(m)))
        }
        Err(e @ (Error::Resource { .. } | Error::Incomplete(_) | Error::Overflow(_))) => {
            row.failure = Some(e.to_string());
            Ok((row, None))
        }
        Err(e) => Err(e),
    }
}

/// The row for `m.n`, taking the intersection data from a precomputed matrix.
pub fn exponent_row_from_matrix(m: &IntersectionMatrix) -> Result<ExponentRow> {
    let mut row = base_row(m.n)?;
    if m.class_number() != row.class_number {
        return domain(format!(
            "matrix for N = {} has {} classes, expected {}",
            m.n,
            m.class_number(),
            row.class_number
        ));
    }
    attach_matrix(&mut row, m)?;
    Ok(row)
}

fn base_row(n: i64) -> Result<ExponentRow> {
    if n < 3 {
        return domain(format!("census rows need N >= 3, got {n}"));
    }
    let d = n * n - 4;
    let idx = index(n)?;
    let h = class_number(d)?;
    let count = systole_count(n)?;
    Ok(ExponentRow {
        n,
        squarefree: is_squarefree(d)?,
        omega: omega(n)?,
        index: idx,
        genus: genus(n)?,
        cusps: cusps(n)?,
        class_number: h,
        systole_count: count,
        total_intersections: None,
        total_distinct: None,
        crossing_bound: None,
        log_systole_ratio: log_ratio(count, n),
        log_crossing_ratio: None,
        log_index_ratio: log_ratio(idx, n),
        crossing_constant: None,
        total_over_hlog2: None,
        failure: None,
    })
}

fn attach_matrix(row: &mut ExponentRow, m: &IntersectionMatrix) -> Result<()> {
    let total = m.total();
    let bound = row
        .index
        .checked_mul(total as u128)
        .ok_or(Error::Overflow("crossing bound"))?;
    let nf = row.n as f64;
    let d = (row.n * row.n - 4) as f64;
    let log_eps = ((nf + d.sqrt()) / 2.0).ln();
    row.total_intersections = Some(total);
    row.total_distinct = Some(m.total_distinct());
    row.crossing_bound = Some(bound);
    row.log_crossing_ratio = Some(log_ratio(bound, row.n));
    row.crossing_constant = Some(total as f64 / (nf * nf.ln()).powi(2));
    row.total_over_hlog2 = Some(total as f64 / (row.class_number as f64 * log_eps).powi(2));
    Ok(())
}

/// Rows for every `N` in `[n_min, n_max]`, optionally restricted to
/// squarefree `N² − 4`, computed in parallel and returned in order.
pub fn exponent_table(n_min: i64, n_max: i64, squarefree_only: bool) -> Result<Vec<ExponentRow>> {
    exponent_table_with_limits(n_min, n_max, squarefree_only, IntersectionLimits::default())
}

pub fn exponent_table_with_limits(
    n_min: i64,
    n_max: i64,
    squarefree_only: bool,
    limits: IntersectionLimits,
) -> Result<Vec<ExponentRow>> {
    if n_min < 3 || n_min > n_max {
        return domain(format!("invalid census range {n_min}..={n_max}"));
    }
    let levels: Vec<i64> = (n_min..=n_max)
        .filter(|&n| !squarefree_only || is_squarefree(n * n - 4).unwrap_or(false))
        .collect();
    levels
        .par_iter()
        .map(|&n| exponent_row(n, limits))
        .collect()
}

/// Acceptance bands for the finite-`N` exponent trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendBands {
    pub crossing: (f64, f64),
    pub systole: (f64, f64),
    pub min_fraction: f64,
    pub n_start: i64,
}

impl Default for TrendBands {
    fn default() -> Self {
        TrendBands {
            crossing: (4.3, 5.7),
            systole: (3.6, 4.4),
            min_fraction: 0.9,
            n_start: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub bands: TrendBands,
    /// Squarefree rows with `N ≥ n_start`.
    pub rows: usize,
    pub failed_rows: usize,
    pub crossing_in_band: usize,
    pub systole_in_band: usize,
    pub index_in_band: usize,
    pub crossing_fraction: f64,
    pub systole_fraction: f64,
    pub crossing_ok: bool,
    pub systole_ok: bool,
    pub index_ok: bool,
    /// Running minimum of `log cr / log N` over the rows, in order of `N`.
    pub running_min_crossing: Vec<(i64, f64)>,
}

const INDEX_SLACK: f64 = 1e-9;

fn index_in_band(row: &ExponentRow) -> bool {
    let ln = (row.n as f64).ln();
    let lower = 3.0 - (4.0f64 / 3.0).ln() * row.omega as f64 / ln;
    lower - INDEX_SLACK <= row.log_index_ratio && row.log_index_ratio <= 3.0 + INDEX_SLACK
}

pub fn trend_report(rows: &[ExponentRow], bands: TrendBands) -> TrendReport {
    let mut considered: Vec<&ExponentRow> = rows
        .iter()
        .filter(|r| r.squarefree && r.n >= bands.n_start)
        .collect();
    considered.sort_by_key(|r| r.n);
    let inside = |x: f64, (lo, hi): (f64, f64)| lo <= x && x <= hi;
    let crossing_in_band = considered
        .iter()
        .filter(|r| r.log_crossing_ratio.is_some_and(|x| inside(x, bands.crossing)))
        .count();
    let systole_in_band = considered
        .iter()
        .filter(|r| inside(r.log_systole_ratio, bands.systole))
        .count();
    let index_hits = considered.iter().filter(|r| index_in_band(r)).count();
    let total = considered.len();
    let frac = |k: usize| if total == 0 { 0.0 } else { k as f64 / total as f64 };
    let mut running = Vec::new();
    let mut best = f64::INFINITY;
    for r in &considered {
        if let Some(x) = r.log_crossing_ratio {
            best = best.min(x);
            running.push((r.n, best));
        }
    }
    TrendReport {
        bands,
        rows: total,
        failed_rows: considered.iter().filter(|r| !r.is_complete()).count(),
        crossing_in_band,
        systole_in_band,
        index_in_band: index_hits,
        crossing_fraction: frac(crossing_in_band),
        systole_fraction: frac(systole_in_band),
        crossing_ok: total > 0 && frac(crossing_in_band) >= bands.min_fraction,
        systole_ok: total > 0 && frac(systole_in_band) >= bands.min_fraction,
        index_ok: total > 0 && index_hits == total,
        running_min_crossing: running,
    }
}

/// Lower bound on the crossing number of any `n` pairwise non-homotopic
/// simple closed curves on a closed surface of genus `g ≥ 2`:
/// `max_m ⌈m (n − (3g − 3) m) / 2⌉`.
///
/// Curves with fewer than `m` double points number at most `(3g − 3) m`,
/// and the others at most `2 cr / m`.
pub fn proposition_lower_bound(g: u64, n: u64) -> Result<u128> {
    if g < 2 {
        return domain(format!("genus {g} is below 2"));
    }
    if n == 0 {
        return domain("curve count must be positive");
    }
    let k = 3 * g as u128 - 3;
    let n = n as u128;
    if n <= k {
        return Ok(0);
    }
    let value = |m: u128| -> u128 {
        let excess = n.saturating_sub(k * m);
        (m * excess).div_ceil(2)
    };
    // concave in m with vertex at n / 2k
    let vertex = n / (2 * k);
    let best = [vertex.saturating_sub(1), vertex, vertex + 1, vertex + 2]
        .into_iter()
        .filter(|&m| m >= 1)
        .map(value)
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// Pairwise intersection numbers of a family of curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSystemMatrix {
    pub entries: Vec<Vec<u64>>,
    pub genus: Option<u64>,
}

impl CurveSystemMatrix {
    /// Checks that `entries` is square, symmetric and zero on the diagonal.
    pub fn new(entries: Vec<Vec<u64>>, genus: Option<u64>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return domain(format!("row {i} has length {}, expected {n}", row.len()));
            }
            if row[i] != 0 {
                return domain(format!("diagonal entry {i} is {}", row[i]));
            }
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return domain(format!("entries ({i}, {j}) and ({j}, {i}) differ"));
                }
            }
        }
        Ok(CurveSystemMatrix { entries, genus })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `cr = Σ_{k<l} i(c_k, c_l)`.
    pub fn crossing_number(&self) -> u128 {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[i][j] as u128)
            .sum()
    }

    /// Crossing number of the subfamily with the given indices.
    pub fn crossing_number_of(&self, subset: &[usize]) -> u128 {
        let mut cr = 0u128;
        for (x, &i) in subset.iter().enumerate() {
            for &j in &subset[x + 1..] {
                cr += self.entries[i][j] as u128;
            }
        }
        cr
    }

    /// Uniformly random symmetric matrix with entries in `0..=max_entry`.
    pub fn random(n: usize, max_entry: u64, seed: u64) -> Self {
        use rand::RngExt;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.random_range(0..=max_entry);
                entries[i][j] = v;
                entries[j][i] = v;
            }
        }
        CurveSystemMatrix {
            entries,
            genus: None,
        }
    }
}

/// Mean crossing number over all `k`-subfamilies,
/// `k(k − 1) / (n(n − 1)) · cr`, as an exact rational.
pub fn subfamily_average<T>(m: &CurveSystemMatrix, k: usize) -> Result<Ratio<T>>
where
    T: Integer + Clone + NumCast,
{
    let n = m.len();
    if k == 0 || k > n {
        return domain(format!("subfamily size {k} outside 1..={n}"));
    }
    if k == 1 {
        return Ok(Ratio::zero());
    }
    let cast = |v: u128| -> Result<T> {
        <T as NumCast>::from(v).ok_or(Error::Overflow("subfamily average"))
    };
    let num = (k as u128 * (k as u128 - 1))
        .checked_mul(m.crossing_number())
        .ok_or(Error::Overflow("subfamily average"))?;
    let den = n as u128 * (n as u128 - 1);
    Ok(Ratio::new(cast(num)?, cast(den)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubfamilyStrategy {
    Trivial,
    Greedy,
    Random,
    Exhaustive,
    ConditionalExpectation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subfamily {
    /// Sorted curve indices.
    pub indices: Vec<usize>,
    pub crossing_number: u128,
    pub strategy: SubfamilyStrategy,
    pub seed: u64,
    /// Random subsets drawn before success or fallback.
    pub random_draws: u64,
}

const RANDOM_DRAWS: u64 = 2_000;
const EXHAUSTIVE_LIMIT: usize = 20;

// cr(S) < (k/n)² cr, cleared of denominators.
fn below_bound(cr_s: u128, cr: u128, k: usize, n: usize) -> bool {
    cr_s * (n as u128).pow(2) < (k as u128).pow(2) * cr
}

fn greedy(m: &CurveSystemMatrix, k: usize) -> Vec<usize> {
    let n = m.len();
    let mut alive = vec![true; n];
    let mut load: Vec<u128> = (0..n)
        .map(|i| m.entries[i].iter().map(|&v| v as u128).sum())
        .collect();
    for _ in k..n {
        let worst = (0..n)
            .filter(|&i| alive[i])
            .max_by(|&x, &y| load[x].cmp(&load[y]).then(y.cmp(&x)))
            .expect("some curve remains");
        alive[worst] = false;
        for i in 0..n {
            load[i] -= m.entries[i][worst] as u128;
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}

// Lexicographic successor of a k-combination of 0..n.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

// Derandomized uniform sampling: decide curves in order, keeping the
// conditional expectation of the completed subset's crossing number from
// increasing. The final subset is no worse than the average.
fn conditional_expectation(m: &CurveSystemMatrix, k: usize) -> Vec<usize> {
    let n = m.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    // to_chosen[i] = crossings of i with chosen curves
    let mut to_chosen = vec![0u128; n];
    let expectation = |chosen_cr: u128, pool: &[usize], to_chosen: &[u128], need: usize| {
        let p = pool.len() as u128;
        let need = need as u128;
        let cross: u128 = pool.iter().map(|&i| to_chosen[i]).sum();
        let inner: u128 = {
            let mut s = 0u128;
            for (x, &i) in pool.iter().enumerate() {
                for &j in &pool[x + 1..] {
                    s += m.entries[i][j] as u128;
                }
            }
            s
        };
        // chosen_cr + cross * need/p + inner * need(need-1)/(p(p-1))
        let mut e = Ratio::from_integer(chosen_cr);
        if p > 0 {
            e += Ratio::new(cross * need, p);
        }
        if p > 1 {
            e += Ratio::new(inner * need * need.saturating_sub(1), p * (p - 1));
        }
        e
    };
    let mut chosen_cr = 0u128;
    for i in 0..n {
        let need = k - chosen.len();
        let remaining = n - i;
        if need == 0 {
            break;
        }
        if need == remaining {
            chosen.extend(i..n);
            break;
        }
        let rest: Vec<usize> = (i + 1..n).collect();
        let take = expectation(chosen_cr + to_chosen[i], &rest, &{
            let mut t = to_chosen.clone();
            for &j in &rest {
                t[j] += m.entries[i][j] as u128;
            }
            t
        }, need - 1);
        let skip = expectation(chosen_cr, &rest, &to_chosen, need);
        if take <= skip {
            chosen_cr += to_chosen[i];
            chosen.push(i);
            for j in 0..n {
                to_chosen[j] += m.entries[i][j] as u128;
            }
        }
    }
    chosen
}

/// A `k`-subfamily whose crossing number is strictly below `(k/n)² cr`, or
/// zero when `cr = 0`.
pub fn find_subfamily(m: &CurveSystemMatrix, k: usize, seed: u64) -> Result<Subfamily> {
    let n = m.len();
    if k == 0 || k >= n {
        return domain(format!("subfamily size {k} outside 1..{n}"));
    }
    let cr = m.crossing_number();
    let done = |indices: Vec<usize>, strategy, draws| {
        let crossing_number = m.crossing_number_of(&indices);
        Subfamily {
            indices,
            crossing_number,
            strategy,
            seed,
            random_draws: draws,
        }
    };
    if cr == 0 {
        return Ok(done((0..k).collect(), SubfamilyStrategy::Trivial, 0));
    }
    let g = greedy(m, k);
    if below_bound(m.crossing_number_of(&g), cr, k, n) {
        return Ok(done(g, SubfamilyStrategy::Greedy, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=RANDOM_DRAWS {
        let mut s = sample(&mut rng, n, k).into_vec();
        s.sort_unstable();
        if below_bound(m.crossing_number_of(&s), cr, k, n) {
            return Ok(done(s, SubfamilyStrategy::Random, draw));
        }
    }
    if n <= EXHAUSTIVE_LIMIT {
        let mut c: Vec<usize> = (0..k).collect();
        loop {
            if below_bound(m.crossing_number_of(&c), cr, k, n) {
                return Ok(done(c, SubfamilyStrategy::Exhaustive, RANDOM_DRAWS));
            }
            if !next_combination(&mut c, n) {
                break;
            }
        }
    } else {
        let s = conditional_expectation(m, k);
        if s.len() == k && below_bound(m.crossing_number_of(&s), cr, k, n) {
            return Ok(done(s, SubfamilyStrategy::ConditionalExpectation, RANDOM_DRAWS));
        }
    }
    Err(Error::Internal(format!(
        "no {k}-subfamily below the average bound among {n} curves"
    )))
}

/// Exponent bookkeeping for passing from a family of `g^{1+α}` curves with
/// at most `g^{1+2α}` crossings to a subfamily of `g^{1+β}` curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub g: u64,
    pub alpha: Ratio<i64>,
    pub beta: Ratio<i64>,
    pub family_size_exponent: Ratio<i64>,
    pub family_crossing_exponent: Ratio<i64>,
    pub subfamily_size_exponent: Ratio<i64>,
    /// `2(1 + β) − 2(1 + α)`.
    pub size_ratio_exponent: Ratio<i64>,
    /// `size_ratio_exponent + family_crossing_exponent`.
    pub subfamily_crossing_exponent: Ratio<i64>,
    /// Whether the derived exponent equals `1 + 2β`.
    pub exponent_identity: bool,
    pub family_size: f64,
    pub subfamily_size: f64,
    pub subfamily_crossing_bound: f64,
    /// Relative gap between `g^{2β−2α} g^{1+2α}` and `g^{1+2β}` in floating point.
    pub numeric_residual: f64,
    /// `N(g) ≥ c g^{1+α}` contradicts the crossing bound for this `c`.
    pub limsup_constant: u32,
    /// The same constant when `α = 0`.
    pub limsup_constant_alpha_zero: u32,
    /// `4 g^{1+α} > 3g + 3 g^{1+α}`, i.e. `g^α > 3`: the counting argument
    /// closes at this genus.
    pub contradiction_reached: bool,
}

fn rat_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn section4_scaling_check(g: u64, alpha: Ratio<i64>, beta: Ratio<i64>) -> Result<ScalingReport> {
    if g < 2 {
        return domain(format!("genus {g} is below 2"));
    }
    if beta <= Ratio::zero() || beta >= alpha {
        return domain(format!("need 0 < beta < alpha, got beta = {beta}, alpha = {alpha}"));
    }
    let one = Ratio::<i64>::one();
    let two = Ratio::from_integer(2);
    let family_size_exponent = one + alpha;
    let family_crossing_exponent = one + two * alpha;
    let subfamily_size_exponent = one + beta;
    let size_ratio_exponent = two * subfamily_size_exponent - two * family_size_exponent;
    let subfamily_crossing_exponent = size_ratio_exponent + family_crossing_exponent;
    let gf = g as f64;
    let pow = |e: &Ratio<i64>| gf.powf(rat_f64(e));
    let target = pow(&(one + two * beta));
    let derived = pow(&size_ratio_exponent) * pow(&family_crossing_exponent);
    Ok(ScalingReport {
        g,
        alpha,
        beta,
        family_size_exponent,
        family_crossing_exponent,
        subfamily_size_exponent,
        size_ratio_exponent,
        subfamily_crossing_exponent,
        exponent_identity: subfamily_crossing_exponent == one + two * beta,
        family_size: pow(&family_size_exponent),
        subfamily_size: pow(&subfamily_size_exponent),
        subfamily_crossing_bound: target,
        numeric_residual: (derived - target).abs() / target,
        limsup_constant: 6,
        limsup_constant_alpha_zero: 4,
        contradiction_reached: pow(&alpha) > 3.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_examples() {
        assert_eq!(proposition_lower_bound(2, 3).unwrap(), 0);
        assert_eq!(proposition_lower_bound(2, 10).unwrap(), 4);
        assert!(proposition_lower_bound(1, 10).is_err());
        assert!(proposition_lower_bound(2, 0).is_err());
    }

    #[test]
    fn lower_bound_matches_full_search() {
        for g in 2..7u64 {
            let k = 3 * g - 3;
            let mut prev = 0;
            for n in 1..300u64 {
                let brute = (1..=n)
                    .map(|m| {
                        let v = m as i128 * (n as i128 - k as i128 * m as i128);
                        if v <= 0 {
                            0
                        } else {
                            ((v + 1) / 2) as u128
                        }
                    })
                    .max()
                    .unwrap();
                let lb = proposition_lower_bound(g, n).unwrap();
                assert_eq!(lb, brute, "g = {g}, n = {n}");
                assert_eq!(lb == 0, n <= k);
                assert!(lb >= prev);
                prev = lb;
            }
        }
    }

    #[test]
    fn lower_bound_grows_like_g_to_one_plus_two_alpha() {
        // n = 6 g^{4/3} with g = t^3; the optimum is about 1.5 g^{5/3}
        let mut pts = Vec::new();
        for t in [4u64, 8, 16, 32, 64] {
            let g = t.pow(3);
            let n = 6 * t.pow(4);
            let lb = proposition_lower_bound(g, n).unwrap() as f64;
            pts.push(((g as f64).ln(), lb.ln()));
        }
        for w in pts.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!((slope - 5.0 / 3.0).abs() < 0.02, "slope {slope}");
        }
        let (lg, llb) = *pts.last().unwrap();
        assert!(((llb - 5.0 / 3.0 * lg).exp() - 1.5).abs() < 0.05);
    }

    fn complete(n: usize) -> CurveSystemMatrix {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| (i != j) as u64).collect())
            .collect();
        CurveSystemMatrix::new(entries, None).unwrap()
    }

    #[test]
    fn curve_system_validation() {
        assert!(CurveSystemMatrix::new(vec![vec![0, 1], vec![2, 0]], None).is_err());
        assert!(CurveSystemMatrix::new(vec![vec![1]], None).is_err());
        assert!(CurveSystemMatrix::new(vec![vec![0, 1]], None).is_err());
        assert_eq!(complete(5).crossing_number(), 10);
    }

    #[test]
    fn average_examples() {
        let m = CurveSystemMatrix::random(6, 5, 11);
        let cr = m.crossing_number() as i128;
        assert_eq!(subfamily_average::<i128>(&m, 6).unwrap(), Ratio::from_integer(cr));
        assert_eq!(subfamily_average::<i128>(&m, 1).unwrap(), Ratio::zero());
        assert!(subfamily_average::<i128>(&m, 0).is_err());
        assert!(subfamily_average::<i128>(&m, 7).is_err());
        let small: Ratio<i64> = subfamily_average(&m, 3).unwrap();
        assert_eq!(small, Ratio::new(6 * cr as i64, 30));
    }

    #[test]
    fn subfamily_examples() {
        let zero = CurveSystemMatrix::new(vec![vec![0; 4]; 4], None).unwrap();
        let s = find_subfamily(&zero, 2, 0).unwrap();
        assert_eq!((s.crossing_number, s.strategy), (0, SubfamilyStrategy::Trivial));
        for n in 2..12 {
            let m = complete(n);
            for k in 1..n {
                let s = find_subfamily(&m, k, 3).unwrap();
                assert_eq!(s.indices.len(), k);
                assert_eq!(s.crossing_number, (k * (k - 1) / 2) as u128);
                assert!(below_bound(s.crossing_number, m.crossing_number(), k, n));
            }
        }
        assert!(find_subfamily(&complete(4), 4, 0).is_err());
    }

    #[test]
    fn fallbacks_meet_the_bound() {
        for seed in 0..20 {
            let m = CurveSystemMatrix::random(30, 9, seed);
            let cr = m.crossing_number();
            for k in [2, 7, 15, 29] {
                let s = conditional_expectation(&m, k);
                assert_eq!(s.len(), k);
                let avg: Ratio<u128> = Ratio::new(k as u128 * (k as u128 - 1) * cr, 30 * 29);
                assert!(Ratio::from_integer(m.crossing_number_of(&s)) <= avg);
                let f = find_subfamily(&m, k, seed).unwrap();
                assert!(below_bound(f.crossing_number, cr, k, 30));
            }
        }
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn scaling_report() {
        let r = section4_scaling_check(4096, Ratio::new(1, 3), Ratio::new(1, 6)).unwrap();
        assert!(r.exponent_identity);
        assert_eq!(r.subfamily_crossing_exponent, Ratio::new(4, 3));
        assert_eq!(r.size_ratio_exponent, Ratio::new(-1, 3));
        assert!(r.numeric_residual < 1e-12);
        assert!(r.contradiction_reached); // 4096^{1/3} = 16
        assert!(section4_scaling_check(4096, Ratio::new(1, 3), Ratio::new(1, 3)).is_err());
        assert!(section4_scaling_check(4096, Ratio::new(1, 3), Ratio::new(0, 1)).is_err());
        assert!(!section4_scaling_check(8, Ratio::new(1, 3), Ratio::new(1, 6))
            .unwrap()
            .contradiction_reached);
    }

    #[test]
    fn table_rows() {
        let rows = exponent_table(3, 10, false).unwrap();
        assert_eq!(rows.len(), 8);
        let r7 = rows.iter().find(|r| r.n == 7).unwrap();
        assert_eq!(r7.genus, 3);
        assert_eq!(rows[0].crossing_bound, Some(24 * 2));
        for r in &rows {
            assert_eq!(r.crossing_bound, Some(r.index * r.total_intersections.unwrap() as u128));
            assert!(index_in_band(r));
            assert!(r.log_index_ratio.is_finite() && r.log_systole_ratio.is_finite());
        }
        let sf = exponent_table(3, 10, true).unwrap();
        assert!(sf.iter().all(|r| r.squarefree));
        assert!(!sf.iter().any(|r| r.n == 4));
        assert!(exponent_table(2, 10, false).is_err());
        assert!(exponent_table(9, 8, false).is_err());
    }

    #[test]
    fn failures_stay_in_the_row() {
        let limits = IntersectionLimits { max_candidates: 5 };
        let rows = exponent_table_with_limits(5, 7, false, limits).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.failure.is_some() && r.crossing_bound.is_none()));
    }
}

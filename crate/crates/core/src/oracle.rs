//! Slow independent computations used to cross-check the fast paths.

use std::collections::{BTreeMap, HashMap};

use num_integer::gcd;
use num_rational::Ratio;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::census::CurveSystemMatrix;
use crate::error::{domain, Error, Result};
use crate::forms::{automorph, check_discriminant, class_cycles, QuadForm};
use crate::geodesics::{class_orbit, pairing};
use crate::matrix::Mat2;

/// `|SL₂(ℤ/N)|` by counting all matrices mod `N` with determinant 1.
pub fn sl2_order_bruteforce(n: u64) -> Result<u64> {
    if n == 0 {
        return domain("modulus must be positive");
    }
    if n == 1 {
        return Ok(1);
    }
    // For each ad, count the (b, c) with bc = ad - 1.
    let mut products = vec![0u64; n as usize];
    for b in 0..n {
        for c in 0..n {
            products[((b * c) % n) as usize] += 1;
        }
    }
    let mut count = 0;
    for a in 0..n {
        for d in 0..n {
            count += products[((a * d + n - 1) % n) as usize];
        }
    }
    Ok(count)
}

/// Cusps of Γ(N) for `N ≥ 3`: classes `±v` of vectors `v ∈ (ℤ/N)²` of
/// order exactly `N`.
pub fn cusp_count_bruteforce(n: u64) -> Result<u64> {
    if n < 3 {
        return domain(format!("cusp count needs N >= 3, got {n}"));
    }
    let mut count = 0;
    for a in 0..n {
        for c in 0..n {
            if gcd(gcd(a, c), n) == 1 {
                count += 1;
            }
        }
    }
    Ok(count / 2)
}

/// Genus of X(N) for `N ≥ 3` by Riemann-Hurwitz over X(1), with the degree
/// and cusp count taken from [`sl2_order_bruteforce`] and
/// [`cusp_count_bruteforce`]. Γ(N) has no elliptic elements for `N ≥ 2`.
pub fn genus_bruteforce(n: u64) -> Result<u64> {
    let degree = sl2_order_bruteforce(n)? / 2;
    let cusps = cusp_count_bruteforce(n)?;
    // 2g - 2 = degree/6 - cusps
    let twelve_chi = 12 * cusps as i128 - 2 * degree as i128;
    if twelve_chi % 24 != 0 {
        return Err(Error::Internal(format!("Riemann-Hurwitz at N = {n} is not integral")));
    }
    Ok((1 - twelve_chi / 24) as u64)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        self.0[rx] = ry;
    }
}

/// Number of SL₂(ℤ)-orbits of primitive forms of discriminant `d`, found by
/// joining every form with `max |coef| ≤ ⌊4√d⌋` to its images under `S` and
/// `T^{±1}`. A `T`-run that leaves the box is followed until it returns.
pub fn class_number_by_orbits(d: i64) -> Result<usize> {
    check_discriminant(d)?;
    let bound = isqrt(16 * d as u64) as i64;
    let mut forms = Vec::new();
    for a in -bound..=bound {
        if a == 0 {
            continue;
        }
        for b in -bound..=bound {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadForm::new(a, b, c);
            if c.abs() <= bound && f.is_primitive() {
                forms.push(f);
            }
        }
    }
    let index: HashMap<QuadForm, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut dsu = Dsu((0..forms.len()).collect());
    for (i, f) in forms.iter().enumerate() {
        let s = QuadForm::new(f.c, -f.b, f.a);
        dsu.union(i, index[&s]);
        for dir in [1i64, -1] {
            let mut g = *f;
            for _ in 0..=2 * bound + 2 {
                g = QuadForm::new(g.a, g.b + 2 * dir * g.a, g.a + dir * g.b + g.c);
                if let Some(&j) = index.get(&g) {
                    dsu.union(i, j);
                    break;
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..forms.len()).map(|i| dsu.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// Mean crossing number over all `k`-subsets, by enumeration.
pub fn exhaustive_subfamily_mean(m: &CurveSystemMatrix, k: usize) -> Result<Ratio<u128>> {
    let n = m.len();
    if k == 0 || k > n {
        return domain(format!("subfamily size {k} outside 1..={n}"));
    }
    let mut total = 0u128;
    let mut count = 0u128;
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        total += m.crossing_number_of(&c);
        count += 1;
        // advance to the next k-combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(Ratio::new(total, count));
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnfoldingMatrix {
    pub n: i64,
    pub entries: Vec<Vec<u64>>,
    /// Orbit bound of the last pass.
    pub bound: u64,
    pub passes: u32,
}

const MAX_PASSES: u32 = 5;

fn to_t<T: Float>(v: i128) -> T {
    T::from(v).expect("integer fits the float type")
}

/// Intersection matrix of the classes of discriminant `N² − 4` by unfolding:
/// every lift of class `j` with coefficients up to `X` that crosses the axis
/// of the canonical representative of class `i` is located by its arclength
/// parameter along that axis, reduced modulo the period `2 log ε`, and
/// lifts are bucketed by (parameter, pairing with the axis form). The
/// number of buckets counts crossings on the closed geodesic.
///
/// `X` starts at `8D` and doubles until the matrix repeats. Parameters
/// closer than `√ε_mach` are compared exactly by searching for the automorph
/// power relating the two lifts.
pub fn unfolding_intersection_matrix<T: Float>(n: i64) -> Result<UnfoldingMatrix> {
    if n <= 2 {
        return domain(format!("unfolding needs N >= 3, got {n}"));
    }
    let d = n * n - 4;
    let cycles = class_cycles(d)?;
    let reps: Vec<QuadForm> = cycles.iter().map(|c| c.canonical()).collect();
    let mut bound = 8 * d as u64;
    let mut previous: Option<Vec<Vec<u64>>> = None;
    for pass in 1..=MAX_PASSES {
        let orbits: Vec<Vec<QuadForm>> = reps
            .iter()
            .map(|r| class_orbit(r, bound).map(|o| o.forms))
            .collect::<Result<_>>()?;
        let h = reps.len();
        let mut entries = vec![vec![0u64; h]; h];
        for (i, f) in reps.iter().enumerate() {
            for (j, orbit) in orbits.iter().enumerate() {
                let buckets = count_buckets::<T>(f, orbit, n)?;
                entries[i][j] = if i == j {
                    if buckets % 2 != 0 {
                        return Err(Error::Internal(format!("odd self-crossing count on {f}")));
                    }
                    buckets / 2
                } else {
                    buckets
                };
            }
        }
        if previous.as_ref() == Some(&entries) {
            return Ok(UnfoldingMatrix {
                n,
                entries,
                bound,
                passes: pass,
            });
        }
        previous = Some(entries);
        bound *= 2;
    }
    Err(Error::Incomplete(format!(
        "unfolding counts at N = {n} did not stabilize within {MAX_PASSES} doublings"
    )))
}

// Forms g, h cross the axis of f at points one automorph power apart.
fn same_orbit(g: &QuadForm, h: &QuadForm, m: &Mat2, shift: i64) -> Result<bool> {
    let reach = shift.unsigned_abs() + 1;
    let minv = m.inverse_sl2()?;
    for step in [*m, minv] {
        let mut x = *g;
        for _ in 0..reach {
            x = x.transform(&step)?;
            if x == *h {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn count_buckets<T: Float>(f: &QuadForm, orbit: &[QuadForm], n: i64) -> Result<u64> {
    let d = f.discriminant()?;
    let m = automorph(f, n)?;
    let two = T::one() + T::one();
    let sqrt_d = to_t::<T>(d as i128).sqrt();
    let a = to_t::<T>(f.a as i128);
    let centre = -to_t::<T>(f.b as i128) / (two * a);
    let radius = sqrt_d / (two * a.abs());
    let period = two * (to_t::<T>(n as i128) / two).acosh();

    // pairing -> (reduced parameter, raw parameter, form)
    let mut groups: BTreeMap<i128, Vec<(T, T, QuadForm)>> = BTreeMap::new();
    for g in orbit {
        let delta = pairing(f, g);
        if delta.abs() >= d as i128 {
            continue;
        }
        let num = f.a as i128 * g.c as i128 - g.a as i128 * f.c as i128;
        let den = g.a as i128 * f.b as i128 - f.a as i128 * g.b as i128;
        let x = to_t::<T>(num) / to_t::<T>(den);
        let t = ((x - centre) / radius).atanh();
        if !t.is_finite() {
            return Err(Error::Incomplete(format!("crossing of {g} with {f} is out of range")));
        }
        let s = t - (t / period).floor() * period;
        groups.entry(delta).or_default().push((s, t, *g));
    }

    let near = T::epsilon().sqrt();
    let mut buckets = 0u64;
    for (_, mut pts) in groups {
        pts.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite parameters"));
        // runs of parameters closer than `near`, the last run joined to the
        // first across the period boundary
        let mut runs: Vec<Vec<usize>> = Vec::new();
        for i in 0..pts.len() {
            match runs.last_mut() {
                Some(run) if pts[i].0 - pts[run[run.len() - 1]].0 <= near => run.push(i),
                _ => runs.push(vec![i]),
            }
        }
        if runs.len() > 1 {
            let first = pts[runs[0][0]].0;
            let last_run = runs.last().expect("nonempty");
            if first + period - pts[last_run[last_run.len() - 1]].0 <= near {
                let tail = runs.pop().expect("nonempty");
                runs[0].extend(tail);
            }
        }
        // inside a run, lifts are distinct unless an automorph power relates them
        for run in runs {
            let mut reps: Vec<usize> = Vec::new();
            for &i in &run {
                let mut found = false;
                for &r in &reps {
                    let shift = ((pts[i].1 - pts[r].1) / period).round();
                    let shift = shift.to_i64().ok_or(Error::Overflow("unfolding shift"))?;
                    if same_orbit(&pts[r].2, &pts[i].2, &m, shift)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    reps.push(i);
                }
            }
            buckets += reps.len() as u64;
        }
    }
    Ok(buckets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::class_number;
    use crate::geodesics::intersection_matrix;
    use crate::surface::index;

    #[test]
    fn sl2_orders() {
        assert_eq!(sl2_order_bruteforce(1).unwrap(), 1);
        assert_eq!(sl2_order_bruteforce(2).unwrap(), 6);
        assert_eq!(sl2_order_bruteforce(3).unwrap(), 24);
        for n in 2..15 {
            assert_eq!(sl2_order_bruteforce(n).unwrap() as u128, index(n as i64).unwrap());
        }
    }

    #[test]
    fn cusps_and_genus_by_counting() {
        use crate::surface::{cusps, genus};
        assert_eq!(cusp_count_bruteforce(7).unwrap(), 24);
        assert_eq!(genus_bruteforce(7).unwrap(), 3);
        for n in 3..25 {
            assert_eq!(cusp_count_bruteforce(n).unwrap() as u128, cusps(n as i64).unwrap());
            assert_eq!(genus_bruteforce(n).unwrap() as u128, genus(n as i64).unwrap());
        }
    }

    #[test]
    fn orbit_class_numbers() {
        for d in [5, 8, 12, 21, 60, 77, 96, 140, 221] {
            assert_eq!(class_number_by_orbits(d).unwrap(), class_number(d).unwrap(), "D = {d}");
        }
    }

    #[test]
    fn exhaustive_mean_of_complete_system() {
        let entries = (0..5).map(|i| (0..5).map(|j| (i != j) as u64).collect()).collect();
        let m = CurveSystemMatrix::new(entries, None).unwrap();
        assert_eq!(exhaustive_subfamily_mean(&m, 3).unwrap(), Ratio::from_integer(3));
        assert_eq!(exhaustive_subfamily_mean(&m, 1).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn unfolding_agrees_on_small_levels() {
        for n in 3..=7 {
            let unfolded = unfolding_intersection_matrix::<f64>(n).unwrap();
            assert_eq!(unfolded.entries, intersection_matrix(n).unwrap().entries, "N = {n}");
        }
    }
}

//! Modular geodesics of discriminant `D = N² − 4` and their intersection
//! numbers on the modular surface.
//!
//! A primitive form `f = (a, b, c)` determines the oriented geodesic in ℍ
//! joining the roots of `a x² + b x + c`. Its stabilizer in SL₂(ℤ) is
//! generated by the automorph `M` (trace `N`), which translates the axis by
//! `2 log ε`. The intersection number of two closed geodesics `A`, `B` is
//! the number of lifts of `B` crossing a fundamental segment `[P, M·P)` of
//! the axis of a fixed lift of `A`.
//!
//! Lifts of `B` are the forms `g` of class `B`. A lift crossing the segment
//! passes through a point of height at least `y_min` over a bounded window,
//! which bounds `|a_g| ≤ √D / (2 y_min)` and confines `b_g` to an interval;
//! inside that box every candidate is tested exactly.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_square, is_squarefree, isqrt};
use crate::error::{domain, Error, Result};
use crate::forms::{automorph, reduce, reduction_step, ClassCensus, FormClassCycle, QuadForm};
use crate::matrix::Mat2;
use crate::surd::{QuadSurd, Q};

/// Oriented geodesic of a form: from `roots.0 = (−b − √D)/2a` to
/// `roots.1 = (−b + √D)/2a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeodesicAxis {
    pub form: QuadForm,
    pub roots: (QuadSurd, QuadSurd),
}

fn eval_surd(f: &QuadForm, x: &QuadSurd) -> Result<QuadSurd> {
    let k = |v: i64| QuadSurd::rational(Q::from_integer(v as i128), x.d);
    k(f.a)
        .checked_mul(x)?
        .checked_add(&k(f.b))?
        .checked_mul(x)?
        .checked_add(&k(f.c))
}

/// The axis of `f`, with both roots checked by exact substitution.
pub fn axis(f: &QuadForm) -> Result<GeodesicAxis> {
    let d = f.discriminant()?;
    if d <= 0 || is_square(d) {
        return domain(format!("{f} has discriminant {d}, not a positive non-square"));
    }
    let two_a = 2 * f.a as i128;
    let p = Q::new(-(f.b as i128), two_a);
    let q = Q::new(1, two_a);
    let r0 = QuadSurd::new(p, -q, d);
    let r1 = QuadSurd::new(p, q, d);
    for r in [&r0, &r1] {
        let v = eval_surd(f, r)?;
        if !(v.p.is_zero() && v.q.is_zero()) {
            return Err(Error::Internal(format!("{r} is not a root of {f}")));
        }
    }
    Ok(GeodesicAxis {
        form: *f,
        roots: (r0, r1),
    })
}

impl GeodesicAxis {
    pub fn discriminant(&self) -> i64 {
        self.roots.0.d
    }

    /// Endpoints in increasing order.
    pub fn sorted_roots(&self) -> Result<(QuadSurd, QuadSurd)> {
        let (r0, r1) = self.roots;
        Ok(match r0.checked_cmp(&r1)? {
            Ordering::Greater => (r1, r0),
            _ => (r0, r1),
        })
    }

    /// Number of endpoints of `other` strictly inside this axis's interval,
    /// and whether an endpoint is shared. Both axes must lie over the same
    /// quadratic field.
    pub fn separation(&self, other: &GeodesicAxis) -> Result<(usize, bool)> {
        let (lo, hi) = self.sorted_roots()?;
        let mut inside = 0;
        let mut shared = false;
        for r in [other.roots.0, other.roots.1] {
            let below = r.checked_cmp(&lo)?;
            let above = r.checked_cmp(&hi)?;
            if below == Ordering::Equal || above == Ordering::Equal {
                shared = true;
            } else if below == Ordering::Greater && above == Ordering::Less {
                inside += 1;
            }
        }
        Ok((inside, shared))
    }

    /// Whether `point` is fixed by the Möbius action of `m`.
    pub fn fixed_by(&self, m: &Mat2) -> Result<bool> {
        for r in [self.roots.0, self.roots.1] {
            if r.mobius(m)? != Some(r) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Relative position of two geodesic axes in ℍ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    /// The axes meet in a single interior point.
    Transverse,
    /// No common point in ℍ and no shared endpoint.
    Disjoint,
    /// At least one common endpoint; this includes `g = ±f`.
    SharedEndpoint,
}

/// `Res(f, g)`; the axes cross iff it is negative and share an endpoint iff
/// it vanishes.
pub fn resultant(f: &QuadForm, g: &QuadForm) -> Result<i128> {
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let ovf = || Error::Overflow("resultant");
    let m = |x: i128, y: i128| x.checked_mul(y).ok_or_else(ovf);
    let s = |x: i128, y: i128| x.checked_sub(y).ok_or_else(ovf);
    let ac = s(m(a, c2)?, m(a2, c)?)?;
    let ab = s(m(a, b2)?, m(a2, b)?)?;
    let bc = s(m(b, c2)?, m(b2, c)?)?;
    s(m(ac, ac)?, m(ab, bc)?)
}

/// Exact crossing test. For equal discriminants this agrees with
/// `|b b' − 2a c' − 2a' c| < D`.
pub fn crossing(f: &QuadForm, g: &QuadForm) -> Result<Crossing> {
    for h in [f, g] {
        let d = h.discriminant()?;
        if d <= 0 || is_square(d) {
            return domain(format!("{h} has discriminant {d}, not a positive non-square"));
        }
    }
    Ok(match resultant(f, g)?.cmp(&0) {
        Ordering::Less => Crossing::Transverse,
        Ordering::Equal => Crossing::SharedEndpoint,
        Ordering::Greater => Crossing::Disjoint,
    })
}

/// True iff the axes of `f` and `g` cross transversally.
pub fn interlace(f: &QuadForm, g: &QuadForm) -> Result<bool> {
    Ok(crossing(f, g)? == Crossing::Transverse)
}

/// `b b' − 2 a c' − 2 a' c`, invariant under simultaneous SL₂(ℤ) action.
/// For equal discriminants `D`, `Δ/D` is the cosine of the crossing angle.
pub fn pairing(f: &QuadForm, g: &QuadForm) -> i128 {
    f.b as i128 * g.b as i128 - 2 * f.a as i128 * g.c as i128 - 2 * g.a as i128 * f.c as i128
}

fn s_move(f: &QuadForm) -> QuadForm {
    QuadForm::new(f.c, -f.b, f.a)
}

fn t_move(f: &QuadForm, dir: i64) -> Option<QuadForm> {
    let b = f.b.checked_add(2 * dir * f.a)?;
    let c = f.a.checked_add(dir * f.b)?.checked_add(f.c)?;
    Some(QuadForm::new(f.a, b, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    Complete,
    /// The bound does not contain the reduced cycle of the class.
    BoundBelowCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOrbit {
    pub bound: u64,
    pub working_bound: u64,
    /// Sorted lexicographically.
    pub forms: Vec<QuadForm>,
    pub status: OrbitStatus,
}

/// Forms equivalent to `g` with all coefficients at most `bound` in
/// absolute value.
///
/// Breadth-first search over `S` and `T^{±1}`, pruned at twice the output
/// bound. A run of `T` steps that leaves the working box is followed until it
/// re-enters, since `c` is quadratic along the run.
pub fn class_orbit(g: &QuadForm, bound: u64) -> Result<ClassOrbit> {
    let d = g.discriminant()?;
    if d <= 0 || is_square(d) {
        return domain(format!("{g} has discriminant {d}, not a positive non-square"));
    }
    if !g.is_primitive() {
        return domain(format!("{g} is not primitive"));
    }
    if bound == 0 {
        return domain("orbit bound must be positive");
    }
    let working = bound
        .checked_mul(2)
        .filter(|&w| w <= i64::MAX as u64 / 4)
        .ok_or(Error::Overflow("orbit working bound"))?;
    let inside = |f: &QuadForm| f.max_abs() <= working;

    let start = reduce(g)?;
    let mut cycle = vec![start];
    let mut h = reduction_step(&start)?;
    while h != start {
        cycle.push(h);
        h = reduction_step(&h)?;
    }
    let status = if cycle.iter().all(|f| f.max_abs() <= bound) {
        OrbitStatus::Complete
    } else {
        OrbitStatus::BoundBelowCycle
    };

    let mut seen: HashSet<QuadForm> = HashSet::new();
    let mut queue = VecDeque::new();
    for f in cycle.iter().chain(std::iter::once(g)) {
        if inside(f) && seen.insert(*f) {
            queue.push_back(*f);
        }
    }
    while let Some(f) = queue.pop_front() {
        let mut next = vec![s_move(&f)];
        for dir in [1i64, -1] {
            let mut h = f;
            while let Some(t) = t_move(&h, dir) {
                if inside(&t) {
                    next.push(t);
                    break;
                }
                // |b| only grows once the run has moved past the box
                if t.b.unsigned_abs() > working && t.b.unsigned_abs() > h.b.unsigned_abs() {
                    break;
                }
                h = t;
            }
        }
        for h in next {
            if inside(&h) && seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    let forms: BTreeSet<QuadForm> = seen.into_iter().filter(|f| f.max_abs() <= bound).collect();
    Ok(ClassOrbit {
        bound,
        working_bound: working,
        forms: forms.into_iter().collect(),
        status,
    })
}

/// Caps on the crossing enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionLimits {
    /// Maximum number of `(a, b)` candidates examined per pass.
    pub max_candidates: u64,
}

impl Default for IntersectionLimits {
    fn default() -> Self {
        IntersectionLimits {
            max_candidates: 20_000_000_000,
        }
    }
}

/// Crossings of the lifts of every class with one fundamental segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentCrossings {
    pub form: QuadForm,
    /// Number of crossing lifts per class index.
    pub counts: Vec<u64>,
    /// `|a|` bound of the final pass.
    pub a_bound: u64,
    /// Candidates examined in the final pass.
    pub candidates: u64,
}

/// Precomputed class data for one level `N`.
#[derive(Debug, Clone)]
pub struct IntersectionContext {
    pub n: i64,
    pub census: ClassCensus,
    pub limits: IntersectionLimits,
}

fn ovf() -> Error {
    Error::Overflow("crossing window")
}

fn ck(v: Option<i128>) -> Result<i128> {
    v.ok_or_else(ovf)
}

// Window on the axis of f: the arc from P to M(P), described by the
// x-coordinates of its ends and their squared heights.
struct Window {
    x_p: Ratio<i128>,
    x_q: Ratio<i128>,
    y2_p: Ratio<i128>,
    y2_q: Ratio<i128>,
}

impl Window {
    fn forward(&self) -> bool {
        self.x_q > self.x_p
    }

    fn contains(&self, x: &Ratio<i128>) -> bool {
        if self.forward() {
            self.x_p <= *x && *x < self.x_q
        } else {
            self.x_q < *x && *x <= self.x_p
        }
    }
}

fn ratio_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

// Sign of 2 a x + b, i.e. the side of the axis center that x = p/q lies on.
fn side(f: &QuadForm, x: &Ratio<i128>) -> Result<Ordering> {
    let v = ck((2 * f.a as i128).checked_mul(*x.numer()))?;
    let w = ck((f.b as i128).checked_mul(*x.denom()))?;
    Ok(ck(v.checked_add(w))?.cmp(&0))
}

// q² f(p/q); has the sign of -a iff p/q lies strictly between the roots.
fn scaled_value(f: &QuadForm, p: i128, q: i128) -> Result<i128> {
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    let t1 = ck(a.checked_mul(p).and_then(|x| x.checked_mul(p)))?;
    let t2 = ck(b.checked_mul(p).and_then(|x| x.checked_mul(q)))?;
    let t3 = ck(c.checked_mul(q).and_then(|x| x.checked_mul(q)))?;
    ck(t1.checked_add(t2).and_then(|x| x.checked_add(t3)))
}

fn window(f: &QuadForm, m: &Mat2, n: i64) -> Result<Window> {
    let d = f.discriminant()? as f64;
    let a = f.a as f64;
    let center = -(f.b as f64) / (2.0 * a);
    let radius = d.sqrt() / (2.0 * a.abs());
    let offset = radius * ((n as f64 + d.sqrt()) / 2.0).ln().tanh();
    let (al, be, ga, de) = (m.a as i128, m.b as i128, m.c as i128, m.d as i128);
    let fa = f.a as i128;

    for sign in [-1.0, 1.0] {
        let mut k: i128 = 64 * n as i128;
        for _ in 0..40 {
            let q = ck((2 * fa.abs()).checked_mul(k))?;
            let p = ((center + sign * offset) * q as f64).round() as i128;
            let val = scaled_value(f, p, q)?;
            if ck(val.checked_mul(fa.signum()))? >= 0 {
                k *= 2;
                continue;
            }
            // Re M(P) for P = p/q + i y, y² = -f(p/q)/a, cleared of q² and 1/a.
            let u = ck(al.checked_mul(p).and_then(|x| x.checked_add(be * q)))?;
            let v = ck(ga.checked_mul(p).and_then(|x| x.checked_add(de * q)))?;
            let num = ck(fa
                .checked_mul(u)
                .and_then(|x| x.checked_mul(v))
                .and_then(|x| x.checked_sub(al.checked_mul(ga)?.checked_mul(val)?)))?;
            let den = ck(fa
                .checked_mul(v)
                .and_then(|x| x.checked_mul(v))
                .and_then(|x| x.checked_sub(ga.checked_mul(ga)?.checked_mul(val)?)))?;
            if den == 0 {
                return Err(Error::Internal(format!("degenerate window on {f}")));
            }
            let x_p = Ratio::new(p, q);
            let x_q = Ratio::new(num, den);
            if side(f, &x_q)? == side(f, &x_p)? {
                break;
            }
            let y2 = |x: &Ratio<i128>| -> Result<Ratio<i128>> {
                let v = scaled_value(f, *x.numer(), *x.denom())?;
                let den = ck(x.denom().checked_mul(*x.denom()))?;
                let den = ck(den.checked_mul(fa))?;
                Ok(Ratio::new(-v, den))
            };
            let (y2_p, y2_q) = (y2(&x_p)?, y2(&x_q)?);
            if !y2_q.is_positive() {
                return Err(Error::Internal(format!("M(P) left the axis of {f}")));
            }
            return Ok(Window {
                x_p,
                x_q,
                y2_p,
                y2_q,
            });
        }
    }
    Err(Error::Internal(format!("no fundamental window found on the axis of {f}")))
}

/// Crossing point abscissa of two transverse axes.
fn crossing_x(f: &QuadForm, g: &QuadForm) -> Result<Ratio<i128>> {
    let num = f.a as i128 * g.c as i128 - g.a as i128 * f.c as i128;
    let den = g.a as i128 * f.b as i128 - f.a as i128 * g.b as i128;
    if den == 0 {
        return Err(Error::Internal(format!("axes of {f} and {g} are concentric")));
    }
    Ok(Ratio::new(num, den))
}

impl IntersectionContext {
    pub fn new(n: i64) -> Result<Self> {
        Self::with_limits(n, IntersectionLimits::default())
    }

    pub fn with_limits(n: i64, limits: IntersectionLimits) -> Result<Self> {
        if n <= 2 {
            return domain(format!("intersection numbers need N >= 3, got {n}"));
        }
        let d = n
            .checked_mul(n)
            .and_then(|s| s.checked_sub(4))
            .ok_or(Error::Overflow("N^2 - 4"))?;
        Ok(IntersectionContext {
            n,
            census: ClassCensus::new(d)?,
            limits,
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.census.discriminant
    }

    pub fn class_number(&self) -> usize {
        self.census.class_number()
    }

    /// One enumeration pass with the coefficient bounds multiplied by `scale`.
    pub fn crossings_at_scale(&self, f: &QuadForm, scale: u64) -> Result<SegmentCrossings> {
        self.check_form(f)?;
        if scale == 0 {
            return domain("enumeration scale must be positive");
        }
        let d = self.discriminant();
        let m = automorph(f, self.n)?;
        let w = window(f, &m, self.n)?;
        let sqrt_d = (d as f64).sqrt();
        let y_min = ratio_f64(&w.y2_p.min(w.y2_q)).sqrt();
        let lo = ratio_f64(&w.x_p.min(w.x_q));
        let hi = ratio_f64(&w.x_p.max(w.x_q));
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        let scale_f = scale as f64;
        let a_bound = ((sqrt_d / (2.0 * y_min)) * scale_f).floor() as u64 + 1;

        let mut counts = vec![0u64; self.class_number()];
        let mut candidates = 0u64;
        let parity = d & 1;
        for a2 in -(a_bound as i64)..=(a_bound as i64) {
            if a2 == 0 {
                continue;
            }
            let span = (2.0 * a2.unsigned_abs() as f64 * half + sqrt_d) * scale_f + 2.0;
            let centre = -2.0 * a2 as f64 * mid;
            let mut b2 = (centre - span).floor() as i64;
            if b2.rem_euclid(2) != parity {
                b2 += 1;
            }
            let b_end = (centre + span).ceil() as i64;
            candidates += ((b_end - b2).max(0) as u64) / 2 + 1;
            if candidates > self.limits.max_candidates {
                return Err(Error::Resource {
                    limit: "max_candidates",
                    needed: candidates as u128,
                    allowed: self.limits.max_candidates as u128,
                });
            }
            let four_a = 4 * a2 as i128;
            let modulus = 4 * a2.abs();
            // r = (b² − D) mod 4|a|, u = (4b + 4) mod 4|a|, updated as b steps by 2
            let mut r = (b2 as i128 * b2 as i128 - d as i128).rem_euclid(modulus as i128) as i64;
            let mut u = (4 * b2 as i128 + 4).rem_euclid(modulus as i128) as i64;
            let step = 8 % modulus;
            while b2 <= b_end {
                if r == 0 {
                    let num = b2 as i128 * b2 as i128 - d as i128;
                    let c2 = i64::try_from(num / four_a).map_err(|_| ovf())?;
                    let g = QuadForm::new(a2, b2, c2);
                    if g.is_primitive()
                        && pairing(f, &g).abs() < d as i128
                        && w.contains(&crossing_x(f, &g)?)
                    {
                        counts[self.census.classify(&g)?] += 1;
                    }
                }
                r += u;
                if r >= modulus {
                    r -= modulus;
                }
                u += step;
                if u >= modulus {
                    u -= modulus;
                }
                b2 += 2;
            }
        }
        Ok(SegmentCrossings {
            form: *f,
            counts,
            a_bound,
            candidates,
        })
    }

    /// Crossing counts per class along one period of the axis of `f`,
    /// certified by repeating the enumeration with doubled bounds.
    pub fn segment_crossings(&self, f: &QuadForm) -> Result<(SegmentCrossings, u32)> {
        let first = self.crossings_at_scale(f, 1)?;
        let second = self.crossings_at_scale(f, 2)?;
        if first.counts != second.counts {
            return Err(Error::Incomplete(format!(
                "crossing counts on the axis of {f} changed when the bounds were doubled"
            )));
        }
        Ok((second, 2))
    }

    fn check_form(&self, f: &QuadForm) -> Result<()> {
        if f.discriminant()? != self.discriminant() || !f.is_primitive() {
            return domain(format!(
                "{f} is not a primitive form of discriminant {}",
                self.discriminant()
            ));
        }
        Ok(())
    }

    fn check_class(&self, i: usize) -> Result<()> {
        if i >= self.class_number() {
            return domain(format!("class index {i} out of range (h = {})", self.class_number()));
        }
        Ok(())
    }

    fn entry(&self, i: usize, j: usize, row: &SegmentCrossings) -> Result<u64> {
        if i != j {
            return Ok(row.counts[j]);
        }
        let c = row.counts[i];
        if !c.is_multiple_of(2) {
            return Err(Error::Internal(format!(
                "odd self-crossing count {c} on {}",
                row.form
            )));
        }
        Ok(c / 2)
    }

    /// Intersection number between classes `i` and `j`, computed from the
    /// axis of the given member `f` of class `i`.
    pub fn intersection_number_from(&self, f: &QuadForm, j: usize) -> Result<u64> {
        self.check_class(j)?;
        let i = self.census.classify(f)?;
        let (row, _) = self.segment_crossings(f)?;
        self.entry(i, j, &row)
    }

    /// Intersection number of the classes with indices `i` and `j`.
    pub fn intersection_number(&self, i: usize, j: usize) -> Result<u64> {
        self.check_class(i)?;
        self.intersection_number_from(&self.census.cycles[i].widest(), j)
    }

    pub fn matrix(&self) -> Result<IntersectionMatrix> {
        let h = self.class_number();
        let rows: Vec<(SegmentCrossings, u32)> = self
            .census
            .cycles
            .par_iter()
            .map(|cy| self.segment_crossings(&cy.widest()))
            .collect::<Result<_>>()?;
        let mut entries = vec![vec![0u64; h]; h];
        for (i, (row, _)) in rows.iter().enumerate() {
            for j in 0..h {
                entries[i][j] = self.entry(i, j, row)?;
            }
        }
        for i in 0..h {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::Internal(format!(
                        "intersection matrix at N = {} is not symmetric at ({i}, {j})",
                        self.n
                    )));
                }
            }
        }
        let d = self.discriminant();
        Ok(IntersectionMatrix {
            n: self.n,
            discriminant: d,
            squarefree: is_squarefree(d)?,
            classes: self.census.cycles.iter().map(FormClassCycle::canonical).collect(),
            entries,
            certificate: StabilityCertificate {
                final_a_bound: rows.iter().map(|(r, _)| r.a_bound).max().unwrap_or(0),
                doubling_passes: rows.iter().map(|(_, p)| *p).max().unwrap_or(0),
                candidates: rows.iter().map(|(r, _)| r.candidates).sum(),
            },
        })
    }
}

/// Enumeration metadata backing an [`IntersectionMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    /// Largest `|a|` bound used in the final (doubled) pass.
    pub final_a_bound: u64,
    /// Enumeration passes per class; counts agreed across all of them.
    pub doubling_passes: u32,
    /// Candidates examined in the final passes, summed over classes.
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionMatrix {
    pub n: i64,
    pub discriminant: i64,
    pub squarefree: bool,
    /// Canonical representatives, in class order.
    pub classes: Vec<QuadForm>,
    /// Symmetric; diagonal holds self-intersection numbers.
    pub entries: Vec<Vec<u64>>,
    pub certificate: StabilityCertificate,
}

impl IntersectionMatrix {
    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.class_number()).map(|i| self.entries[i][i]).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let h = self.class_number();
        (0..h).all(|i| (0..h).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// Unordered pairs of distinct classes plus self-intersections.
    pub fn total(&self) -> u64 {
        self.total_distinct() + self.diagonal().iter().sum::<u64>()
    }

    /// Unordered pairs of distinct classes only.
    pub fn total_distinct(&self) -> u64 {
        let h = self.class_number();
        (0..h).flat_map(|i| (i + 1..h).map(move |j| (i, j))).map(|(i, j)| self.entries[i][j]).sum()
    }
}

/// Intersection number of two class cycles of discriminant `N² − 4`.
pub fn intersection_number(a: &FormClassCycle, b: &FormClassCycle, n: i64) -> Result<u64> {
    let ctx = IntersectionContext::new(n)?;
    for cy in [a, b] {
        if cy.discriminant != ctx.discriminant() || cy.is_empty() {
            return domain(format!(
                "cycle of discriminant {} does not belong to N = {n}",
                cy.discriminant
            ));
        }
    }
    let j = ctx.census.classify(&b.canonical())?;
    ctx.intersection_number_from(&a.widest(), j)
}

pub fn intersection_matrix(n: i64) -> Result<IntersectionMatrix> {
    IntersectionContext::new(n)?.matrix()
}

pub fn total_intersections(n: i64) -> Result<u64> {
    Ok(intersection_matrix(n)?.total())
}

/// Largest coefficient of any reduced form of discriminant `d`, a floor for
/// sensible orbit bounds.
pub fn reduced_coefficient_bound(d: i64) -> u64 {
    isqrt(d.max(0) as u64) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::class_cycles;

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn axis_of_golden_form() {
        let ax = axis(&q(1, 1, -1)).unwrap();
        assert_eq!(ax.roots.0, QuadSurd::new(Q::new(-1, 2), Q::new(-1, 2), 5));
        assert_eq!(ax.roots.1, QuadSurd::new(Q::new(-1, 2), Q::new(1, 2), 5));
        let neg = axis(&q(-1, -1, 1)).unwrap();
        assert_eq!(neg.sorted_roots().unwrap(), ax.sorted_roots().unwrap());
        assert!(ax.fixed_by(&automorph(&q(1, 1, -1), 3).unwrap()).unwrap());
        assert!(axis(&q(1, 3, 2)).is_err());
    }

    #[test]
    fn automorphs_fix_their_axes() {
        for n in 3..25 {
            for cy in class_cycles(n * n - 4).unwrap() {
                for f in &cy.forms {
                    let m = automorph(f, n).unwrap();
                    assert!(axis(f).unwrap().fixed_by(&m).unwrap());
                }
            }
        }
    }

    #[test]
    fn interlace_examples() {
        let f = q(1, 1, -1);
        assert!(!interlace(&f, &f).unwrap());
        assert_eq!(crossing(&f, &f).unwrap(), Crossing::SharedEndpoint);
        assert_eq!(crossing(&f, &f.neg()).unwrap(), Crossing::SharedEndpoint);
        // T-translate: roots shifted by -1
        let g = f.transform(&Mat2::T).unwrap();
        assert_eq!(g, q(1, 3, 1));
        let (inside, shared) = axis(&f).unwrap().separation(&axis(&g).unwrap()).unwrap();
        assert_eq!(interlace(&f, &g).unwrap(), inside == 1 && !shared);
        assert!(interlace(&f, &g).unwrap());
        let far = f.transform(&Mat2::new(1, 5, 0, 1)).unwrap();
        assert!(!interlace(&f, &far).unwrap());
    }

    #[test]
    fn resultant_matches_pairing_for_equal_discriminants() {
        for n in 3..12 {
            let d = n * n - 4;
            let forms: Vec<QuadForm> = class_orbit(&class_cycles(d).unwrap()[0].canonical(), 12)
                .unwrap()
                .forms;
            for f in forms.iter().step_by(3) {
                for g in forms.iter().step_by(5) {
                    let r = resultant(f, g).unwrap();
                    let delta = pairing(f, g);
                    assert_eq!(4 * r, delta * delta - d as i128 * d as i128);
                    let (inside, shared) =
                        axis(f).unwrap().separation(&axis(g).unwrap()).unwrap();
                    let exact = if shared {
                        Crossing::SharedEndpoint
                    } else if inside == 1 {
                        Crossing::Transverse
                    } else {
                        Crossing::Disjoint
                    };
                    assert_eq!(crossing(f, g).unwrap(), exact);
                    assert_eq!(crossing(g, f).unwrap(), exact);
                }
            }
        }
    }

    #[test]
    fn crossing_of_different_discriminants() {
        // roots ±sqrt 2 and ±sqrt 3
        assert!(!interlace(&q(1, 0, -2), &q(1, 0, -3)).unwrap());
        // roots ±sqrt 2 and (1 ± sqrt 13)/2 ~ -1.30, 2.30
        assert!(interlace(&q(1, 0, -2), &q(1, -1, -3)).unwrap());
    }

    #[test]
    fn orbit_contains_cycle_and_is_closed() {
        let f = q(1, 1, -1);
        let orbit = class_orbit(&f, 10).unwrap();
        assert_eq!(orbit.status, OrbitStatus::Complete);
        assert!(orbit.forms.contains(&f) && orbit.forms.contains(&q(-1, 1, 1)));
        let set: HashSet<QuadForm> = orbit.forms.iter().copied().collect();
        for g in &orbit.forms {
            assert_eq!(g.discriminant().unwrap(), 5);
            for h in [Some(s_move(g)), t_move(g, 1), t_move(g, -1)].into_iter().flatten() {
                if h.max_abs() <= 10 {
                    assert!(set.contains(&h), "{h} missing");
                }
            }
        }
        let tiny = class_orbit(&q(5, 9, -1), 1).unwrap();
        assert_eq!(tiny.status, OrbitStatus::BoundBelowCycle);
        assert!(class_orbit(&q(2, 2, -2), 10).is_err());
    }

    #[test]
    fn orbits_partition_forms_by_class() {
        let d = 60;
        let cycles = class_cycles(d).unwrap();
        let mut all = HashSet::new();
        for cy in &cycles {
            let orbit = class_orbit(&cy.canonical(), 20).unwrap();
            for g in orbit.forms {
                assert!(cy.contains(&reduce(&g).unwrap()));
                assert!(all.insert(g));
            }
        }
    }

    #[test]
    fn small_intersection_matrices() {
        let m3 = intersection_matrix(3).unwrap();
        assert_eq!(m3.entries, vec![vec![2]]);
        assert_eq!(m3.total(), 2);
        let m4 = intersection_matrix(4).unwrap();
        assert_eq!(m4.entries, vec![vec![3, 6], vec![6, 3]]);
        assert!(!m4.squarefree);
        let m5 = intersection_matrix(5).unwrap();
        assert_eq!(m5.entries, vec![vec![4, 8], vec![8, 4]]);
        assert_eq!((m5.total(), m5.total_distinct()), (16, 8));
        assert_eq!(m5.certificate.doubling_passes, 2);
    }

    #[test]
    fn representative_independence() {
        for n in [5i64, 8, 9] {
            let ctx = IntersectionContext::new(n).unwrap();
            let base = ctx.matrix().unwrap();
            for (i, cy) in ctx.census.cycles.iter().enumerate() {
                for f in &cy.forms {
                    for j in 0..ctx.class_number() {
                        assert_eq!(
                            ctx.intersection_number_from(f, j).unwrap(),
                            base.entries[i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conjugation_invariance() {
        let ctx = IntersectionContext::new(7).unwrap();
        let base = ctx.matrix().unwrap();
        let conj = Mat2::new(2, 3, 1, 2);
        for (i, cy) in ctx.census.cycles.iter().enumerate() {
            let f = cy.canonical().transform(&conj).unwrap();
            for j in 0..ctx.class_number() {
                assert_eq!(ctx.intersection_number_from(&f, j).unwrap(), base.entries[i][j]);
            }
        }
    }

    #[test]
    fn resource_limit_is_reported() {
        let ctx =
            IntersectionContext::with_limits(9, IntersectionLimits { max_candidates: 10 }).unwrap();
        assert!(matches!(ctx.matrix(), Err(Error::Resource { .. })));
        assert!(intersection_matrix(2).is_err());
    }
}

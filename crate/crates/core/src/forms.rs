//! Indefinite binary quadratic forms `ax² + bxy + cy²`.
//!
//! Reduction follows the classical indefinite theory: a form of discriminant
//! `D > 0` is reduced when `0 < b < √D` and `√D − b < 2|a| < √D + b`. The
//! neighbor operator ρ permutes the finitely many reduced forms, and its
//! cycles are exactly the proper (narrow) equivalence classes. Every
//! comparison against `√D` is done on squares, never in floating point.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_integer::Integer;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::arith::{is_square, isqrt};
use crate::error::{domain, Error, Result};
use crate::matrix::Mat2;

const MAX_REDUCTION_STEPS: usize = 100_000;

/// The binary quadratic form `a x² + b x y + c y²`.
///
/// Ordering is lexicographic on `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    /// Builds a form and checks that it is primitive, indefinite and has a
    /// non-square discriminant.
    pub fn checked(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        let d = f.discriminant()?;
        if d <= 0 {
            return domain(format!("{f} is not indefinite (discriminant {d})"));
        }
        if is_square(d) {
            return domain(format!("{f} has square discriminant {d}"));
        }
        if !f.is_primitive() {
            return domain(format!("{f} is not primitive"));
        }
        Ok(f)
    }

    /// `b² − 4ac`.
    pub fn discriminant(&self) -> Result<i64> {
        let d = self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128;
        i64::try_from(d).map_err(|_| Error::Overflow("discriminant"))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn neg(&self) -> QuadForm {
        QuadForm::new(-self.a, -self.b, -self.c)
    }

    pub fn max_abs(&self) -> u64 {
        self.a
            .unsigned_abs()
            .max(self.b.unsigned_abs())
            .max(self.c.unsigned_abs())
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// The substituted form `(x, y) -> f(m.a x + m.b y, m.c x + m.d y)`.
    pub fn transform(&self, m: &Mat2) -> Result<QuadForm> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (m.a as i128, m.b as i128, m.c as i128, m.d as i128);
        let overflow = || Error::Overflow("form substitution");
        // Sum of coef * x * y over the given terms, all checked.
        let combine = |terms: [(i128, i128, i128); 3]| -> Result<i64> {
            let mut acc: i128 = 0;
            for (k, x, y) in terms {
                let t = x
                    .checked_mul(y)
                    .and_then(|xy| xy.checked_mul(k))
                    .ok_or_else(overflow)?;
                acc = acc.checked_add(t).ok_or_else(overflow)?;
            }
            i64::try_from(acc).map_err(|_| overflow())
        };
        let na = combine([(a, p, p), (b, p, r), (c, r, r)])?;
        let nc = combine([(a, q, q), (b, q, s), (c, s, s)])?;
        let ps_qr = (p * s).checked_add(q * r).ok_or_else(overflow)?;
        let nb = combine([(2 * a, p, q), (b, ps_qr, 1), (2 * c, r, s)])?;
        Ok(QuadForm::new(na, nb, nc))
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Checks that `d` is a valid indefinite discriminant: positive, `≡ 0, 1 (mod 4)`
/// and not a perfect square.
pub fn check_discriminant(d: i64) -> Result<()> {
    if d <= 0 {
        return domain(format!("discriminant {d} is not positive"));
    }
    if !matches!(d.rem_euclid(4), 0 | 1) {
        return domain(format!("discriminant {d} is not 0 or 1 mod 4"));
    }
    if is_square(d) {
        return domain(format!("discriminant {d} is a perfect square"));
    }
    Ok(())
}

pub fn discriminant(f: &QuadForm) -> Result<i64> {
    f.discriminant()
}

fn nonsquare_disc(f: &QuadForm) -> Result<i64> {
    let d = f.discriminant()?;
    if d <= 0 || is_square(d) {
        return domain(format!("{f} has discriminant {d}, not a positive non-square"));
    }
    Ok(d)
}

fn reduced_with(f: &QuadForm, d: i64, s: i64) -> bool {
    if f.b <= 0 || f.b > s {
        return false;
    }
    let two_a = 2 * f.a.unsigned_abs() as i128;
    let b = f.b as i128;
    let d = d as i128;
    let upper = (two_a + b) * (two_a + b) > d;
    let lower = two_a - b < 0 || (two_a - b) * (two_a - b) < d;
    upper && lower
}

/// The reduction criterion `0 < b < √D`, `√D − b < 2|a| < √D + b`.
pub fn is_reduced(f: &QuadForm) -> Result<bool> {
    let d = nonsquare_disc(f)?;
    Ok(reduced_with(f, d, isqrt(d as u64) as i64))
}

// One application of ρ with the normalization that makes it well defined on
// every form: b' ≡ −b (mod 2c) taken in (√D − 2|c|, √D) when |c| < √D and in
// (−|c|, |c|] otherwise.
fn rho(f: &QuadForm, d: i64, s: i64) -> Result<QuadForm> {
    let c = f.c as i128;
    let m = 2 * c.abs();
    let b = f.b as i128;
    let s = s as i128;
    let bp = if c.abs() <= s {
        s - (s + b).rem_euclid(m)
    } else {
        let r = (-b).rem_euclid(m);
        if r > c.abs() {
            r - m
        } else {
            r
        }
    };
    let num = bp * bp - d as i128;
    if num % (4 * c) != 0 {
        return Err(Error::Internal(format!("rho step from {f} is not integral")));
    }
    let cp = i64::try_from(num / (4 * c)).map_err(|_| Error::Overflow("reduction step"))?;
    Ok(QuadForm::new(f.c, bp as i64, cp))
}

/// The right neighbor ρ(f) of a reduced form; the result is reduced and
/// properly equivalent to `f`.
pub fn reduction_step(f: &QuadForm) -> Result<QuadForm> {
    let d = nonsquare_disc(f)?;
    let s = isqrt(d as u64) as i64;
    if !reduced_with(f, d, s) {
        return domain(format!("{f} is not reduced"));
    }
    let g = rho(f, d, s)?;
    if !reduced_with(&g, d, s) {
        return Err(Error::Internal(format!("rho({f}) = {g} is not reduced")));
    }
    Ok(g)
}

/// Iterates ρ from an arbitrary indefinite form until it reaches a reduced
/// form in the same proper class.
pub fn reduce(f: &QuadForm) -> Result<QuadForm> {
    let d = nonsquare_disc(f)?;
    let s = isqrt(d as u64) as i64;
    let mut g = *f;
    for _ in 0..MAX_REDUCTION_STEPS {
        if reduced_with(&g, d, s) {
            return Ok(g);
        }
        g = rho(&g, d, s)?;
    }
    Err(Error::Internal(format!("reduction of {f} did not terminate")))
}

/// One ρ-cycle of reduced forms, i.e. one narrow class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormClassCycle {
    pub discriminant: i64,
    /// Reduced forms in ρ order, starting at the canonical representative.
    pub forms: Vec<QuadForm>,
}

impl FormClassCycle {
    /// Lexicographically least form of the cycle.
    pub fn canonical(&self) -> QuadForm {
        self.forms[0]
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn contains(&self, f: &QuadForm) -> bool {
        self.forms.contains(f)
    }

    /// The member with the smallest `|a|`, ties broken lexicographically.
    /// Its geodesic axis is the widest semicircle in the cycle.
    pub fn widest(&self) -> QuadForm {
        *self
            .forms
            .iter()
            .min_by_key(|f| (f.a.unsigned_abs(), **f))
            .expect("cycles are nonempty")
    }
}

/// All reduced primitive forms of discriminant `d`, in lexicographic order.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    check_discriminant(d)?;
    let s = isqrt(d as u64) as i64;
    let mut out = Vec::new();
    for a in -s..=s {
        if a == 0 {
            continue;
        }
        let mut b = if d % 2 == 0 { 2 } else { 1 };
        while b <= s {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let f = QuadForm::new(a, b, num / (4 * a));
                if f.is_primitive() && reduced_with(&f, d, s) {
                    out.push(f);
                }
            }
            b += 2;
        }
    }
    Ok(out)
}

/// Partitions the reduced primitive forms of discriminant `d` into ρ-cycles,
/// sorted by canonical representative.
pub fn class_cycles(d: i64) -> Result<Vec<FormClassCycle>> {
    let reduced = reduced_forms(d)?;
    let s = isqrt(d as u64) as i64;
    let mut seen: HashSet<QuadForm> = HashSet::with_capacity(reduced.len());
    let mut cycles = Vec::new();
    for &start in &reduced {
        if seen.contains(&start) {
            continue;
        }
        let mut forms = vec![start];
        seen.insert(start);
        let mut g = rho(&start, d, s)?;
        while g != start {
            if !reduced_with(&g, d, s) || !seen.insert(g) {
                return Err(Error::Internal(format!(
                    "rho orbit of {start} leaves the reduced set at {g}"
                )));
            }
            forms.push(g);
            g = rho(&g, d, s)?;
        }
        // `start` is the least unseen form, hence the least in its cycle.
        cycles.push(FormClassCycle {
            discriminant: d,
            forms,
        });
    }
    Ok(cycles)
}

/// The narrow class number `h(d)`: the number of ρ-cycles.
pub fn class_number(d: i64) -> Result<usize> {
    Ok(class_cycles(d)?.len())
}

/// The class cycles of one discriminant together with a lookup from reduced
/// form to class index.
#[derive(Debug, Clone)]
pub struct ClassCensus {
    pub discriminant: i64,
    pub cycles: Vec<FormClassCycle>,
    index: HashMap<QuadForm, usize>,
}

impl ClassCensus {
    pub fn new(d: i64) -> Result<Self> {
        let cycles = class_cycles(d)?;
        let index = cycles
            .iter()
            .enumerate()
            .flat_map(|(i, cy)| cy.forms.iter().map(move |f| (*f, i)))
            .collect();
        Ok(ClassCensus {
            discriminant: d,
            cycles,
            index,
        })
    }

    pub fn class_number(&self) -> usize {
        self.cycles.len()
    }

    /// Index of the class containing `f`.
    pub fn classify(&self, f: &QuadForm) -> Result<usize> {
        let d = f.discriminant()?;
        if d != self.discriminant {
            return domain(format!(
                "{f} has discriminant {d}, census is for {}",
                self.discriminant
            ));
        }
        if !f.is_primitive() {
            return domain(format!("{f} is not primitive"));
        }
        let r = reduce(f)?;
        self.index
            .get(&r)
            .copied()
            .ok_or_else(|| Error::Internal(format!("reduced form {r} missing from census")))
    }
}

/// The unit `ε = (t + u√D)/2` with `t² − D u² = 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub t: u64,
    pub u: u64,
    pub d: i64,
}

impl FundamentalUnit {
    /// `t² − D u²`, which is 4 for a valid unit.
    pub fn norm_times_four(&self) -> i128 {
        (self.t as i128).pow(2) - self.d as i128 * (self.u as i128).pow(2)
    }

    /// `log ε`, evaluated as `acosh(t/2)` which is well conditioned for `t ≥ 3`.
    pub fn log_epsilon<T: Float>(&self) -> T {
        let two = T::one() + T::one();
        (T::from(self.t).expect("t fits the float type") / two).acosh()
    }
}

/// The totally positive fundamental unit `(N + √(N² − 4))/2` of discriminant
/// `N² − 4`.
///
/// Any unit `(t + u√D)/2 > 1` of norm one has `u ≥ 1`, and `u = 1` forces
/// `t = N`, so this is the smallest one.
pub fn fundamental_unit(n: i64) -> Result<FundamentalUnit> {
    if n <= 2 {
        return domain(format!("fundamental unit needs N >= 3, got {n}"));
    }
    let d = n
        .checked_mul(n)
        .and_then(|sq| sq.checked_sub(4))
        .ok_or(Error::Overflow("N^2 - 4"))?;
    Ok(FundamentalUnit {
        t: n as u64,
        u: 1,
        d,
    })
}

/// The generator `[[(N − b)/2, −c], [a, (N + b)/2]]` of the stabilizer of `f`
/// in SL₂(ℤ), for `disc(f) = N² − 4`.
pub fn automorph(f: &QuadForm, n: i64) -> Result<Mat2> {
    let d = f.discriminant()?;
    let expected = (n as i128) * (n as i128) - 4;
    if d as i128 != expected {
        return domain(format!(
            "{f} has discriminant {d}, expected N^2 - 4 = {expected}"
        ));
    }
    if (n - f.b).rem_euclid(2) != 0 {
        return Err(Error::Internal(format!(
            "{f}: b and N = {n} have different parity"
        )));
    }
    let m = Mat2::new((n - f.b) / 2, -f.c, f.a, (n + f.b) / 2);
    if m.det() != 1 {
        return Err(Error::Internal(format!("automorph {m} has det {}", m.det())));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&q(1, 1, -1)).unwrap(), 5);
        assert_eq!(discriminant(&q(1, 2, -2)).unwrap(), 12);
        assert_eq!(discriminant(&q(1, 0, -3)).unwrap(), 12);
    }

    #[test]
    fn reduced_examples() {
        assert!(is_reduced(&q(1, 1, -1)).unwrap());
        assert!(!is_reduced(&q(1, 0, -3)).unwrap());
        assert!(is_reduced(&q(-2, 2, 1)).unwrap());
    }

    #[test]
    fn square_discriminant_is_rejected() {
        assert!(is_reduced(&q(1, 3, 2)).is_err()); // D = 1
        assert!(QuadForm::checked(1, 3, 2).is_err());
        assert!(QuadForm::checked(2, 2, -2).is_err()); // not primitive
    }

    #[test]
    fn reduction_step_examples() {
        assert_eq!(reduction_step(&q(1, 1, -1)).unwrap(), q(-1, 1, 1));
        assert_eq!(reduction_step(&q(1, 2, -2)).unwrap(), q(-2, 2, 1));
        assert!(reduction_step(&q(1, 0, -3)).is_err());
    }

    #[test]
    fn cycles_of_small_discriminants() {
        let c5 = class_cycles(5).unwrap();
        assert_eq!(c5.len(), 1);
        assert!(c5[0].contains(&q(1, 1, -1)));

        let c12 = class_cycles(12).unwrap();
        assert_eq!(c12.len(), 2);
        let mut sets: Vec<Vec<QuadForm>> = c12
            .iter()
            .map(|c| {
                let mut v = c.forms.clone();
                v.sort();
                v
            })
            .collect();
        sets.sort();
        assert_eq!(
            sets,
            vec![vec![q(-2, 2, 1), q(1, 2, -2)], vec![q(-1, 2, 2), q(2, 2, -1)]]
        );
        for cy in c5.iter().chain(&c12) {
            assert!(cy.forms.iter().all(|f| is_reduced(f).unwrap()));
            assert_eq!(cy.canonical(), *cy.forms.iter().min().unwrap());
        }
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(5).unwrap(), 1);
        assert_eq!(class_number(12).unwrap(), 2);
        assert_eq!(class_number(21).unwrap(), 2);
        assert_eq!(class_number(3 * 3 - 4).unwrap(), class_number(5).unwrap());
        assert!(class_number(7).is_err());
        assert!(class_number(16).is_err());
        assert!(class_number(-3).is_err());
    }

    #[test]
    fn cycle_partition_covers_reduced_forms() {
        for d in 5..600 {
            if check_discriminant(d).is_err() {
                continue;
            }
            let cycles = class_cycles(d).unwrap();
            let total: usize = cycles.iter().map(FormClassCycle::len).sum();
            assert_eq!(total, reduced_forms(d).unwrap().len(), "d = {d}");
            for cy in &cycles {
                let mut g = cy.forms[0];
                for _ in 0..cy.len() {
                    g = reduction_step(&g).unwrap();
                }
                assert_eq!(g, cy.forms[0]);
            }
        }
    }

    #[test]
    fn reduce_lands_in_the_same_cycle_as_equivalent_forms() {
        let census = ClassCensus::new(21).unwrap();
        for cy in &census.cycles {
            let f = cy.canonical();
            let moved = f
                .transform(&Mat2::new(3, 2, 4, 3))
                .unwrap()
                .transform(&Mat2::S)
                .unwrap();
            assert_eq!(census.classify(&moved).unwrap(), census.classify(&f).unwrap());
        }
    }

    #[test]
    fn fundamental_unit_examples() {
        let e3 = fundamental_unit(3).unwrap();
        assert_eq!(e3.norm_times_four(), 4);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((e3.log_epsilon::<f64>() - 0.9624236501192069).abs() < 1e-13);
        assert!((e3.log_epsilon::<f64>() - 2.0 * golden.ln()).abs() < 1e-13);
        let e5 = fundamental_unit(5).unwrap();
        assert_eq!((e5.t, e5.u, e5.d), (5, 1, 21));
        let e10 = fundamental_unit(10).unwrap();
        assert_eq!(e10.d, 96);
        assert_eq!(e10.norm_times_four(), 4);
        assert!(fundamental_unit(2).is_err());
    }

    #[test]
    fn automorph_examples() {
        let m = automorph(&q(1, 1, -1), 3).unwrap();
        assert_eq!(m, Mat2::new(1, 1, 1, 2));
        assert_eq!((m.det(), m.trace()), (1, 3));
        assert_eq!(q(1, 1, -1).transform(&m).unwrap(), q(1, 1, -1));
        assert!(automorph(&q(1, 1, -1), 4).is_err());
    }

    proptest::proptest! {
        #[test]
        fn reduction_preserves_discriminant_and_class(
            n in 3i64..40, idx in 0usize..64, p in -6i64..6, r in -6i64..6,
        ) {
            let d = n * n - 4;
            let census = ClassCensus::new(d).unwrap();
            let cy = &census.cycles[idx % census.class_number()];
            let f = cy.forms[idx % cy.len()];
            // any word in S and T^k
            let m = Mat2::T.checked_mul(&Mat2::new(1, p, 0, 1)).unwrap()
                .checked_mul(&Mat2::S).unwrap()
                .checked_mul(&Mat2::new(1, r, 0, 1)).unwrap();
            let g = f.transform(&m).unwrap();
            proptest::prop_assert_eq!(g.discriminant().unwrap(), d);
            proptest::prop_assert!(g.is_primitive());
            let red = reduce(&g).unwrap();
            proptest::prop_assert!(cy.contains(&red));
            proptest::prop_assert_eq!(reduction_step(&red).unwrap().discriminant().unwrap(), d);

            let auto = automorph(&f, n).unwrap();
            proptest::prop_assert_eq!(auto.trace(), n as i128);
            proptest::prop_assert_eq!(f.transform(&auto).unwrap(), f);
        }
    }
}

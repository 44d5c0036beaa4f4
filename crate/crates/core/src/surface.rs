//! Exact invariants of the congruence surfaces `X(N) = Γ(N)\ℍ`.
//!
//! Index and genus follow the SL₂ formulas
//! `[Γ(1):Γ(N)] = N³ Π_{p|N} (1 − p⁻²)` and
//! `g = 1 + [Γ(1):Γ(N)] (1/24 − 1/(4N))`; the cusp count divides the index by
//! `2N` since `±I` act identically on ℍ.
//!
//! Systoles of `X(N)` come from elements `A = I − N·B` with `B ∈ SL₂(ℤ)` of
//! trace `N`, so `|tr A| = N² − 2` and `2 cosh(ℓ/2) = N² − 2`.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_squarefree, omega};
use crate::error::{domain, Error, Result};
use crate::forms::class_number;
use crate::matrix::{proportional, Mat2};

fn level(n: i64, min: i64) -> Result<()> {
    if n < min {
        return domain(format!("level N = {n} must be at least {min}"));
    }
    Ok(())
}

/// `[Γ(1) : Γ(N)] = |SL₂(ℤ/N)|`, computed with exact cancellation.
pub fn index(n: i64) -> Result<u128> {
    level(n, 1)?;
    let f = factorize(n)?;
    let mut idx = (n as u128)
        .checked_pow(3)
        .ok_or(Error::Overflow("index"))?;
    for p in f.primes() {
        let p2 = (p as u128) * (p as u128);
        idx = (idx / p2).checked_mul(p2 - 1).ok_or(Error::Overflow("index"))?;
    }
    Ok(idx)
}

/// Genus of `X(N)` for `N > 2`, evaluated in exact rational arithmetic.
pub fn genus(n: i64) -> Result<u128> {
    level(n, 3)?;
    let idx = i128::try_from(index(n)?).map_err(|_| Error::Overflow("genus"))?;
    // 24N g = 24N + idx (N - 6)
    let den = 24 * n as i128;
    let num = idx
        .checked_mul(n as i128 - 6)
        .and_then(|t| t.checked_add(den))
        .ok_or(Error::Overflow("genus"))?;
    if num % den != 0 || num < 0 {
        return Err(Error::Internal(format!(
            "genus formula at N = {n} gives {num}/{den}"
        )));
    }
    Ok((num / den) as u128)
}

/// Number of cusps of `X(N)`, `index / 2N`.
pub fn cusps(n: i64) -> Result<u128> {
    level(n, 3)?;
    let idx = index(n)?;
    let den = 2 * n as u128;
    if idx % den != 0 {
        return Err(Error::Internal(format!("2N does not divide the index at N = {n}")));
    }
    Ok(idx / den)
}

/// `|tr A| = N² − 2` for a systole `A`.
pub fn systole_trace(n: i64) -> Result<i128> {
    level(n, 3)?;
    Ok(n as i128 * n as i128 - 2)
}

/// Systole length `ℓ = 2 arccosh((N² − 2)/2)`.
pub fn systole_length<T: Float>(n: i64) -> Result<T> {
    let tr = systole_trace(n)?;
    let two = T::one() + T::one();
    let half_trace = T::from(tr).ok_or(Error::Overflow("systole trace"))? / two;
    Ok(two * half_trace.acosh())
}

/// The Schmutz-Schaller lift `Φ(B) = I − N·B` of a trace-`N` element of
/// SL₂(ℤ) to a trace `2 − N²` element of Γ(N).
///
/// All defining identities are checked, including `Φ(B) = −B²` and the
/// agreement of fixed points on `∂ℍ`.
pub fn schmutz_schaller_lift(b: &Mat2, n: i64) -> Result<Mat2> {
    level(n, 3)?;
    if b.det() != 1 {
        return domain(format!("lift: det({b}) = {} is not 1", b.det()));
    }
    if b.trace() != n as i128 {
        return domain(format!("lift: trace({b}) = {} is not N = {n}", b.trace()));
    }
    let a = Mat2::IDENTITY.checked_sub(&b.checked_scale(n)?)?;
    let fail = |what: &str| Err(Error::Internal(format!("lift of {b} at N = {n}: {what}")));
    if !a.congruent_mod(&Mat2::IDENTITY, n) {
        return fail("not congruent to I mod N");
    }
    if a.det() != 1 {
        return fail("determinant is not 1");
    }
    if a.trace() != 2 - n as i128 * n as i128 {
        return fail("trace is not 2 - N^2");
    }
    if a != b.checked_mul(b)?.neg() {
        return fail("I - N B differs from -B^2");
    }
    if !proportional(a.fixed_point_quadratic(), b.fixed_point_quadratic()) {
        return fail("fixed points differ");
    }
    Ok(a)
}

/// `|C(N)| = [Γ(1):Γ(N)] · h(N² − 4)`, without the unspecified constant.
pub fn systole_count(n: i64) -> Result<u128> {
    level(n, 3)?;
    let h = class_number(n * n - 4)? as u128;
    index(n)?
        .checked_mul(h)
        .ok_or(Error::Overflow("systole count"))
}

/// The band `3 log N − log(4/3) ω(N) ≤ log [Γ(1):Γ(N)] ≤ 3 log N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexBand {
    pub n: i64,
    pub omega: u32,
    pub lower: f64,
    pub log_index: f64,
    pub upper: f64,
    pub holds: bool,
}

pub const INDEX_BAND_SLACK: f64 = 1e-9;

pub fn index_exponent_check(n: i64) -> Result<IndexBand> {
    level(n, 2)?;
    let w = omega(n)?;
    let ln = (n as f64).ln();
    let upper = 3.0 * ln;
    let lower = upper - (4.0f64 / 3.0).ln() * w as f64;
    let log_index = (index(n)? as f64).ln();
    Ok(IndexBand {
        n,
        omega: w,
        lower,
        log_index,
        upper,
        holds: lower - INDEX_BAND_SLACK <= log_index && log_index <= upper + INDEX_BAND_SLACK,
    })
}

/// Per-level record of the surface invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceInvariants {
    pub n: i64,
    pub index: u128,
    pub genus: u128,
    pub cusps: u128,
    pub systole_trace: i128,
    pub systole_length: f64,
    pub class_number: usize,
    pub systole_count: u128,
    /// Whether `N² − 4` is squarefree.
    pub squarefree: bool,
}

pub fn surface_invariants(n: i64) -> Result<SurfaceInvariants> {
    level(n, 3)?;
    let idx = index(n)?;
    let h = class_number(n * n - 4)?;
    Ok(SurfaceInvariants {
        n,
        index: idx,
        genus: genus(n)?,
        cusps: cusps(n)?,
        systole_trace: systole_trace(n)?,
        systole_length: systole_length(n)?,
        class_number: h,
        systole_count: idx.checked_mul(h as u128).ok_or(Error::Overflow("systole count"))?,
        squarefree: is_squarefree(n * n - 4)?,
    })
}

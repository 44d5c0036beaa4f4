use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2×2 integer matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);
    /// `(x, y) -> (-y, x)`
    pub const S: Mat2 = Mat2::new(0, -1, 1, 0);
    /// `(x, y) -> (x + y, y)`
    pub const T: Mat2 = Mat2::new(1, 1, 0, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn trace(&self) -> i128 {
        self.a as i128 + self.d as i128
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_sl2(&self) -> Result<Mat2> {
        if self.det() != 1 {
            return Err(Error::Domain(format!("{self} is not in SL2(Z)")));
        }
        Ok(Mat2::new(self.d, -self.b, -self.c, self.a))
    }

    pub fn checked_mul(&self, rhs: &Mat2) -> Result<Mat2> {
        let e = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).map_err(|_| Error::Overflow("matrix product"))
        };
        Ok(Mat2::new(
            e(self.a, rhs.a, self.b, rhs.c)?,
            e(self.a, rhs.b, self.b, rhs.d)?,
            e(self.c, rhs.a, self.d, rhs.c)?,
            e(self.c, rhs.b, self.d, rhs.d)?,
        ))
    }

    pub fn checked_scale(&self, k: i64) -> Result<Mat2> {
        let s = |x: i64| x.checked_mul(k).ok_or(Error::Overflow("matrix scaling"));
        Ok(Mat2::new(s(self.a)?, s(self.b)?, s(self.c)?, s(self.d)?))
    }

    pub fn checked_sub(&self, rhs: &Mat2) -> Result<Mat2> {
        let s = |x: i64, y: i64| x.checked_sub(y).ok_or(Error::Overflow("matrix difference"));
        Ok(Mat2::new(
            s(self.a, rhs.a)?,
            s(self.b, rhs.b)?,
            s(self.c, rhs.c)?,
            s(self.d, rhs.d)?,
        ))
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// Coefficients `(c, d - a, -b)` of the fixed-point equation
    /// `c z^2 + (d - a) z - b = 0` of the Möbius map `z -> (az + b)/(cz + d)`.
    pub fn fixed_point_quadratic(&self) -> (i128, i128, i128) {
        (
            self.c as i128,
            self.d as i128 - self.a as i128,
            -(self.b as i128),
        )
    }

    /// Entrywise congruence to `other` modulo `n`.
    pub fn congruent_mod(&self, other: &Mat2, n: i64) -> bool {
        [
            (self.a, other.a),
            (self.b, other.b),
            (self.c, other.c),
            (self.d, other.d),
        ]
        .iter()
        .all(|&(x, y)| (x as i128 - y as i128).rem_euclid(n as i128) == 0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    /// Panics on overflow; use [`Mat2::checked_mul`] for untrusted sizes.
    fn mul(self, rhs: Mat2) -> Mat2 {
        self.checked_mul(&rhs).expect("matrix product overflow")
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Two integer triples are proportional (same projective point).
pub fn proportional(u: (i128, i128, i128), v: (i128, i128, i128)) -> bool {
    u.0 * v.1 == u.1 * v.0 && u.0 * v.2 == u.2 * v.0 && u.1 * v.2 == u.2 * v.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        assert_eq!(Mat2::S * Mat2::S, Mat2::IDENTITY.neg());
        assert_eq!(Mat2::T.det(), 1);
        assert_eq!(Mat2::T.inverse_sl2().unwrap() * Mat2::T, Mat2::IDENTITY);
        assert!(Mat2::new(2, 0, 0, 1).inverse_sl2().is_err());
    }

    #[test]
    fn congruence_and_overflow() {
        let m = Mat2::new(1, 3, -3, -8);
        assert!(m.congruent_mod(&Mat2::IDENTITY, 3));
        assert!(!m.congruent_mod(&Mat2::IDENTITY, 2));
        let big = Mat2::new(i64::MAX, 1, 1, 1);
        assert!(big.checked_mul(&big).is_err());
    }
}

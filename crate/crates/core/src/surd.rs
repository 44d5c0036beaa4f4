//! Exact elements `p + q√D` of a real quadratic field, with rational `p, q`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat2;

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    pub p: Q,
    pub q: Q,
    pub d: i64,
}

fn ovf() -> Error {
    Error::Overflow("quadratic surd arithmetic")
}

fn q_sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl QuadSurd {
    pub fn new(p: Q, q: Q, d: i64) -> Self {
        QuadSurd { p, q, d }
    }

    pub fn rational(p: Q, d: i64) -> Self {
        QuadSurd::new(p, Q::zero(), d)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Domain(format!(
                "mixing Q(sqrt {}) and Q(sqrt {})",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(QuadSurd::new(
            self.p.checked_add(&o.p).ok_or_else(ovf)?,
            self.q.checked_add(&o.q).ok_or_else(ovf)?,
            self.d,
        ))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(QuadSurd::new(
            self.p.checked_sub(&o.p).ok_or_else(ovf)?,
            self.q.checked_sub(&o.q).ok_or_else(ovf)?,
            self.d,
        ))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        let d = Q::from_integer(self.d as i128);
        let pp = self.p.checked_mul(&o.p).ok_or_else(ovf)?;
        let qq = self.q.checked_mul(&o.q).ok_or_else(ovf)?;
        let qqd = qq.checked_mul(&d).ok_or_else(ovf)?;
        let pq = self.p.checked_mul(&o.q).ok_or_else(ovf)?;
        let qp = self.q.checked_mul(&o.p).ok_or_else(ovf)?;
        Ok(QuadSurd::new(
            pp.checked_add(&qqd).ok_or_else(ovf)?,
            pq.checked_add(&qp).ok_or_else(ovf)?,
            self.d,
        ))
    }

    pub fn conj(&self) -> Self {
        QuadSurd::new(self.p, -self.q, self.d)
    }

    /// `p² − D q²`.
    pub fn norm(&self) -> Result<Q> {
        let p2 = self.p.checked_mul(&self.p).ok_or_else(ovf)?;
        let q2 = self.q.checked_mul(&self.q).ok_or_else(ovf)?;
        let dq2 = q2
            .checked_mul(&Q::from_integer(self.d as i128))
            .ok_or_else(ovf)?;
        p2.checked_sub(&dq2).ok_or_else(ovf)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        let n = o.norm()?;
        if n.is_zero() {
            return Err(Error::Domain("division by zero in Q(sqrt D)".into()));
        }
        let t = self.checked_mul(&o.conj())?;
        Ok(QuadSurd::new(
            t.p.checked_div(&n).ok_or_else(ovf)?,
            t.q.checked_div(&n).ok_or_else(ovf)?,
            self.d,
        ))
    }

    /// Exact sign, using `p² ⋛ D q²` when `p` and `q` disagree.
    pub fn signum(&self) -> Result<i32> {
        let (sp, sq) = (q_sign(&self.p), q_sign(&self.q));
        if sp == 0 || sq == 0 || sp == sq {
            return Ok(if sp != 0 { sp } else { sq });
        }
        let p2 = self.p.checked_mul(&self.p).ok_or_else(ovf)?;
        let dq2 = self
            .q
            .checked_mul(&self.q)
            .and_then(|q2| q2.checked_mul(&Q::from_integer(self.d as i128)))
            .ok_or_else(ovf)?;
        Ok(match p2.cmp(&dq2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        })
    }

    pub fn checked_cmp(&self, o: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(o)?.signum()?.cmp(&0))
    }

    /// Image under the Möbius map of `m`; `None` for the point at infinity.
    pub fn mobius(&self, m: &Mat2) -> Result<Option<Self>> {
        let k = |v: i64| QuadSurd::rational(Q::from_integer(v as i128), self.d);
        let num = k(m.a).checked_mul(self)?.checked_add(&k(m.b))?;
        let den = k(m.c).checked_mul(self)?.checked_add(&k(m.d))?;
        if den.p.is_zero() && den.q.is_zero() {
            return Ok(None);
        }
        num.checked_div(&den).map(Some)
    }

    pub fn to_f64(&self) -> f64 {
        let f = |x: &Q| *x.numer() as f64 / *x.denom() as f64;
        f(&self.p) + f(&self.q) * (self.d as f64).sqrt()
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.p, self.q, self.d)
    }
}

//! Exact integer utilities: factorization, squarefree testing, the Kronecker
//! symbol and prime-divisor counting.
//!
//! Factorization uses trial division up to the cube root of the input. The
//! remaining cofactor has at most two prime factors, so it is settled by a
//! deterministic Miller-Rabin test, a perfect-square test, or a single
//! Pollard-Brent split.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` pairs in ascending prime order.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Distinct primes dividing `n`.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Multiplies the factors back together.
    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }
}

fn positive(n: i64, what: &str) -> Result<u64> {
    if n <= 0 {
        return domain(format!("{what} requires a positive integer, got {n}"));
    }
    Ok(n as u64)
}

/// Factors `n >= 1`; `factorize(1)` has no factors.
pub fn factorize(n: i64) -> Result<Factorization> {
    let n = positive(n, "factorize")?;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;

    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while m.is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };

    push(2, &mut m);
    let mut p = 3u64;
    while (p as u128).pow(3) <= n as u128 && p * p <= m {
        push(p, &mut m);
        p += 2;
    }

    let mut tail: Vec<(u64, u32)> = Vec::new();
    if m > 1 {
        if is_prime(m) {
            tail.push((m, 1));
        } else if let Some(r) = exact_sqrt(m) {
            tail.push((r, 2));
        } else {
            let d = pollard_brent(m);
            let (a, b) = (d.min(m / d), d.max(m / d));
            tail.push((a, 1));
            tail.push((b, 1));
        }
    }
    factors.extend(tail);
    factors.sort_unstable();
    Ok(Factorization { n, factors })
}

/// `true` iff no prime square divides `n`.
pub fn is_squarefree(n: i64) -> Result<bool> {
    Ok(factorize(n)?.is_squarefree())
}

/// Number of distinct prime divisors.
pub fn omega(n: i64) -> Result<u32> {
    Ok(factorize(n)?.factors.len() as u32)
}

/// The Kronecker symbol `(d / n)`.
///
/// At `n = 0` the value is 1 for `d = ±1` and 0 otherwise.
pub fn kronecker(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let d = d as i128;
    let v = n.trailing_zeros();
    let mut n = (n >> v) as i128;
    let mut sign: i8 = 1;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol (d / n) for odd n > 0.
    let mut a = d.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// Whether a (possibly negative) integer is a perfect square.
pub fn is_square(n: i64) -> bool {
    n >= 0 && exact_sqrt(n as u64).is_some()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Returns a nontrivial divisor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    use num_integer::Integer;
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

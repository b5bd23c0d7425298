//! Valuations, radii and truncated p-adic integers over exact rationals.

pub(crate) mod radius;
pub(crate) mod truncated;

pub use radius::{quad_root_norms, LogRadius};
pub use truncated::{hensel_sqrt, invert_unit, HenselRoot, TruncatedPadicInt, DEFAULT_PRECISION};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_integer(self.to_bigint())
    }

    /// p^k as an exact rational, k may be negative.
    pub fn pow(self, k: i64) -> Rational {
        let m = num_traits::pow(self.to_bigint(), k.unsigned_abs() as usize);
        if k >= 0 {
            Rational::from_integer(m)
        } else {
            Rational::new(BigInt::one(), m)
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

// Deterministic Miller-Rabin; these bases cover all of u64.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
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

/// p-adic valuation, with `Infinity` reserved for zero.
///
/// Derived ordering puts `Infinity` above every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(Rational),
    Infinity,
}

impl Valuation {
    pub fn int(v: i64) -> Valuation {
        Valuation::Finite(Rational::from_integer(v.into()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// The valuation as an integer, if it is a finite integer.
    pub fn to_i64(&self) -> Option<i64> {
        self.finite().filter(|v| v.is_integer()).and_then(|v| v.to_integer().to_i64())
    }

    /// The radius p^(-v) this valuation encodes.
    pub fn to_radius(&self) -> LogRadius {
        match self {
            Valuation::Finite(v) => LogRadius::pow(-v),
            Valuation::Infinity => LogRadius::Zero,
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", v),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Exponent of p in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: Prime) -> u64 {
    debug_assert!(!n.is_zero());
    if p.0 == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let pb = p.to_bigint();
    let mut m = n.abs();
    let mut v = 0u64;
    // strip p^(2^j) chunks first so huge valuations stay cheap
    let mut chunks = vec![pb.clone()];
    loop {
        let (q, r) = m.div_rem(chunks.last().unwrap());
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1u64 << (chunks.len() - 1);
        let sq = chunks.last().unwrap() * chunks.last().unwrap();
        chunks.push(sq);
    }
    while let Some(c) = chunks.pop() {
        loop {
            let (q, r) = m.div_rem(&c);
            if !r.is_zero() {
                break;
            }
            m = q;
            v += 1u64 << chunks.len();
        }
    }
    v
}

/// Returns v with x = p^v * u, |u|_p = 1, and `Infinity` for zero.
pub fn valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::int(val_i64(x, p))
}

/// Integer valuation of a nonzero rational.
pub(crate) fn val_i64(x: &Rational, p: Prime) -> i64 {
    int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64
}

/// |x|_p as a radius.
pub fn norm(x: &Rational, p: Prime) -> LogRadius {
    valuation(x, p).to_radius()
}

/// Splits a nonzero rational into (v, u) with x = p^v u and u a unit.
pub fn split_unit(x: &Rational, p: Prime) -> (i64, Rational) {
    let v = val_i64(x, p);
    (v, x * p.pow(-v))
}

/// Parses "n", "n/d" or "-n/d" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {:?}", s));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{pow_mod, split_unit, Prime, Rational};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 64;

/// Element of Z/p^N Z, used as a p-adic integer known to N digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedPadicInt {
    residue: BigUint,
    prime: Prime,
    precision: u32,
}

impl TruncatedPadicInt {
    pub fn new(residue: &BigInt, prime: Prime, precision: u32) -> TruncatedPadicInt {
        assert!(precision > 0, "precision must be positive");
        let m = BigInt::from(modulus(prime, precision));
        let residue = residue.mod_floor(&m).to_biguint().unwrap();
        TruncatedPadicInt { residue, prime, precision }
    }

    pub fn from_u64(n: u64, prime: Prime, precision: u32) -> TruncatedPadicInt {
        TruncatedPadicInt::new(&BigInt::from(n), prime, precision)
    }

    /// Reduction of a rational with denominator prime to p.
    pub fn from_rational(x: &Rational, prime: Prime, precision: u32) -> Result<TruncatedPadicInt> {
        let den = TruncatedPadicInt::new(x.denom(), prime, precision);
        let num = TruncatedPadicInt::new(x.numer(), prime, precision);
        Ok(num.mul(&invert_unit(&den).map_err(|_| Error::NotIntegral)?))
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> BigUint {
        modulus(self.prime, self.precision)
    }

    pub fn is_unit(&self) -> bool {
        !(&self.residue % self.prime.get()).is_zero()
    }

    /// Residue modulo p^k for k ≤ N.
    pub fn reduce(&self, k: u32) -> BigUint {
        assert!(k <= self.precision);
        &self.residue % modulus(self.prime, k)
    }

    fn check(&self, other: &TruncatedPadicInt) {
        assert_eq!(self.prime, other.prime, "mixed primes");
        assert_eq!(self.precision, other.precision, "mixed precisions");
    }

    fn wrap(&self, residue: BigUint) -> TruncatedPadicInt {
        let residue = residue % self.modulus();
        TruncatedPadicInt { residue, prime: self.prime, precision: self.precision }
    }

    pub fn add(&self, other: &TruncatedPadicInt) -> TruncatedPadicInt {
        self.check(other);
        self.wrap(&self.residue + &other.residue)
    }

    pub fn sub(&self, other: &TruncatedPadicInt) -> TruncatedPadicInt {
        self.check(other);
        self.wrap(&self.residue + self.modulus() - &other.residue)
    }

    pub fn mul(&self, other: &TruncatedPadicInt) -> TruncatedPadicInt {
        self.check(other);
        self.wrap(&self.residue * &other.residue)
    }

    pub fn neg(&self) -> TruncatedPadicInt {
        self.wrap(self.modulus() - &self.residue)
    }
}

impl fmt::Display for TruncatedPadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.prime, self.precision)
    }
}

fn modulus(p: Prime, n: u32) -> BigUint {
    num_traits::pow(BigUint::from(p.get()), n as usize)
}

/// Multiplicative inverse modulo p^N.
pub fn invert_unit(u: &TruncatedPadicInt) -> Result<TruncatedPadicInt> {
    if !u.is_unit() {
        return Err(Error::NonUnit);
    }
    let m = BigInt::from(u.modulus());
    let g = BigInt::from(u.residue.clone()).extended_gcd(&m);
    debug_assert!(g.gcd.is_one());
    Ok(TruncatedPadicInt::new(&g.x, u.prime, u.precision))
}

/// Square root split as p^half_valuation * unit_root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselRoot {
    pub half_valuation: i64,
    pub unit_root: TruncatedPadicInt,
}

/// Square root of a nonzero rational in Q_p, lifted to N digits.
///
/// Of the two roots the one whose leading digit is smaller is returned
/// (for p = 2, the root ≡ 1 mod 4).
pub fn hensel_sqrt(x: &Rational, p: Prime, n: u32) -> Result<HenselRoot> {
    assert!(!x.is_zero(), "square root of zero");
    let (v, u) = split_unit(x, p);
    if v % 2 != 0 {
        return Err(Error::OddValuation);
    }
    let unit_root = if p.get() == 2 {
        sqrt_unit_2(&u, n)?
    } else {
        sqrt_unit_odd(&u, p, n)?
    };
    Ok(HenselRoot { half_valuation: v / 2, unit_root })
}

fn sqrt_unit_2(u: &Rational, n: u32) -> Result<TruncatedPadicInt> {
    let p = Prime::new(2).unwrap();
    let work = n.max(3);
    let target = TruncatedPadicInt::from_rational(u, p, work + 1)?;
    if target.reduce(3) != BigUint::from(1u32) {
        return Err(Error::NonSquareUnit);
    }
    let t = BigInt::from(target.residue().clone());
    let mut s = BigInt::one();
    // s² ≡ u mod 2^i  ⇒  s or s + 2^(i-1) works mod 2^(i+1)
    for i in 3..n {
        let m = BigInt::one() << (i + 1);
        if !(&s * &s - &t).mod_floor(&m).is_zero() {
            s += BigInt::one() << (i - 1);
        }
    }
    Ok(TruncatedPadicInt::new(&s, p, n))
}

fn sqrt_unit_odd(u: &Rational, p: Prime, n: u32) -> Result<TruncatedPadicInt> {
    let pu = p.get();
    let u1 = TruncatedPadicInt::from_rational(u, p, 1)?.residue().to_u64().unwrap();
    let s0 = sqrt_mod_prime(u1, pu).ok_or(Error::NonSquareUnit)?;
    let s0 = s0.min(pu - s0);
    let target = TruncatedPadicInt::from_rational(u, p, n)?;
    let mut s = TruncatedPadicInt::from_u64(s0, p, n);
    let two = TruncatedPadicInt::from_u64(2, p, n);
    // Newton: each step doubles the number of correct digits
    let mut correct = 1u32;
    while correct < n {
        let f = s.mul(&s).sub(&target);
        let df = invert_unit(&two.mul(&s))?;
        s = s.sub(&f.mul(&df));
        correct *= 2;
    }
    Ok(s)
}

/// Tonelli-Shanks for an odd prime.
fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r)
}

/// Exact integer square root of a rational, if it is a perfect square.
pub(crate) fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.numer().sign() == Sign::Minus {
        return None;
    }
    let sn = x.numer().sqrt();
    let sd = x.denom().sqrt();
    (&sn * &sn == *x.numer() && &sd * &sd == *x.denom()).then(|| Rational::new(sn, sd))
}

//! Haar measure on spheres, invariant balls for odd p, the mod-4 ergodicity
//! criterion on 1+2Z_2, and orbit equidistribution by simulation.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::rho_r;
use crate::error::{Error, Result};
use crate::map::CanonicalMap;
use crate::norm::NormCase;
use crate::padic::{hensel_sqrt, invert_unit, val_i64, LogRadius, Prime, Rational, TruncatedPadicInt};

/// S_r(0) with Haar measure normalized to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereMeasureContext {
    pub p: Prime,
    pub r: LogRadius,
}

/// μ(V_ρ(c)) = pρ / ((p-1)r) for a ball inside S_r(0).
pub fn haar_measure(ctx: &SphereMeasureContext, rho: &LogRadius) -> Result<Rational> {
    if rho.is_zero() {
        return Ok(Rational::zero());
    }
    if *rho > ctx.r {
        return Err(Error::BallExceedsSphere);
    }
    let k = (rho / &ctx.r).int_log().ok_or(Error::NotIntegerPower)?;
    let p = ctx.p.to_rational();
    let mu = &p * ctx.p.pow(k) / (p - Rational::from_integer(1.into()));
    if mu > Rational::from_integer(1.into()) {
        return Err(Error::BallExceedsSphere);
    }
    Ok(mu)
}

/// A ball V_rho(center) ⊂ S_r(0) mapped onto itself, with its measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantBall {
    pub center: Rational,
    pub r: LogRadius,
    pub rho: LogRadius,
    pub measure: Rational,
}

/// For odd p the minimal invariant ball around p^k ∈ S_r(0) is a proper invariant set.
pub fn not_ergodic_p_odd(f: &CanonicalMap, r: &LogRadius) -> Result<InvariantBall> {
    let p = f.p();
    if p.get() == 2 {
        return Err(Error::WrongPrime { expected: "odd".into() });
    }
    let k = r.int_log().ok_or(Error::NotIntegerPower)?;
    let (rho, _) = rho_r(f, r)?;
    let measure = haar_measure(&SphereMeasureContext { p, r: r.clone() }, &rho)?;
    Ok(InvariantBall { center: p.pow(-k), r: r.clone(), rho, measure })
}

/// Odd- and even-index coefficient sums of numerator (A) and denominator (B), mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mod4Signature {
    pub a1: u8,
    pub a2: u8,
    pub b1: u8,
    pub b2: u8,
}

impl Mod4Signature {
    fn matches(self) -> Option<u8> {
        match (self.a1, self.a2, self.b1, self.b2) {
            (1, 2, 0, 1) => Some(1),
            (3, 2, 0, 3) => Some(2),
            (1, 0, 2, 1) => Some(3),
            (3, 0, 2, 3) => Some(4),
            _ => None,
        }
    }

    fn swapped(self) -> Mod4Signature {
        Mod4Signature { a1: self.b1, a2: self.b2, b1: self.a1, b2: self.a2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriterionVerdict {
    pub ergodic: bool,
    pub signature: Mod4Signature,
    /// Matching condition 1..=4, and whether it matched with numerator and denominator swapped.
    pub condition: Option<(u8, bool)>,
}

fn two() -> Prime {
    Prime::new(2).unwrap()
}

fn mod_2k(x: &Rational, k: u32) -> Result<u64> {
    let t = TruncatedPadicInt::from_rational(x, two(), k)?;
    Ok(t.residue().to_u64().unwrap())
}

fn poly_mod_2k(c: &[Rational], t: u64, k: u32) -> Result<u64> {
    let m = 1u64 << k;
    let mut acc = 0u64;
    for coef in c.iter().rev() {
        acc = (acc * t + mod_2k(coef, k)?) % m;
    }
    Ok(acc)
}

/// Ergodicity of t ↦ num(t)/den(t) on 1+2Z_2 from coefficient sums mod 4.
/// Coefficients are low degree first and must be 2-adic integers.
pub fn mod4_criterion(num: &[Rational], den: &[Rational]) -> Result<CriterionVerdict> {
    for t in [1u64, 3, 5, 7] {
        if poly_mod_2k(num, t, 3)? % 2 == 0 || poly_mod_2k(den, t, 3)? % 2 == 0 {
            return Err(Error::NotSelfMap);
        }
    }
    let sum = |c: &[Rational], parity: usize| -> Result<u8> {
        let mut s = 0u64;
        for (i, x) in c.iter().enumerate() {
            if i % 2 == parity {
                s += mod_2k(x, 2)?;
            }
        }
        Ok((s % 4) as u8)
    };
    let signature = Mod4Signature { a1: sum(num, 1)?, a2: sum(num, 0)?, b1: sum(den, 1)?, b2: sum(den, 0)? };
    let condition = signature
        .matches()
        .map(|c| (c, false))
        .or_else(|| signature.swapped().matches().map(|c| (c, true)));
    Ok(CriterionVerdict { ergodic: condition.is_some(), signature, condition })
}

/// t ↦ num(t)/den(t) on the unit sphere, conjugate to f on S_r(0) via x = p^(-l) t, r = p^l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSphereMap {
    pub p: Prime,
    pub l: i64,
    /// Coefficients low degree first.
    pub num: Vec<Rational>,
    pub den: Vec<Rational>,
    /// False when the direct coefficients were not integral and a common factor was cleared.
    pub direct: bool,
}

impl UnitSphereMap {
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let ev = |c: &[Rational]| c.iter().rev().fold(Rational::zero(), |acc, x| acc * t + x);
        let d = ev(&self.den);
        if d.is_zero() {
            return Err(Error::PoleHit { step: 0 });
        }
        Ok(ev(&self.num) / d)
    }

    fn truncated(&self, n: u32) -> Result<(Vec<TruncatedPadicInt>, Vec<TruncatedPadicInt>)> {
        let conv = |c: &[Rational]| -> Result<Vec<TruncatedPadicInt>> {
            c.iter().map(|x| TruncatedPadicInt::from_rational(x, self.p, n)).collect()
        };
        Ok((conv(&self.num)?, conv(&self.den)?))
    }
}

fn horner(c: &[TruncatedPadicInt], t: &TruncatedPadicInt) -> TruncatedPadicInt {
    let zero = TruncatedPadicInt::from_u64(0, t.prime(), t.precision());
    c.iter().rev().fold(zero, |acc, x| acc.mul(t).add(x))
}

fn sphere_exponent(f: &CanonicalMap, r: &LogRadius) -> Result<i64> {
    let l = r.int_log().ok_or(Error::NotIntegerPower)?;
    if !NormCase::detect(f).invariant_set().contains(r) {
        return Err(Error::NotInvariant);
    }
    Ok(l)
}

fn raw_conjugate(f: &CanonicalMap, l: i64) -> (Vec<Rational>, Vec<Rational>) {
    let s = f.p().pow(-l);
    let one = Rational::from_integer(1.into());
    let num = vec![Rational::zero(), one.clone(), &s * f.a() / f.b()];
    let den = vec![one, &s * f.d() / f.b(), &s * &s / f.b()];
    (num, den)
}

/// The conjugated map ((p^-l a/b) t² + t) / ((p^-2l / b) t² + (p^-l d/b) t + 1).
///
/// Every non-constant coefficient must have norm < 1, so that the map
/// fixes residues mod p of units.
pub fn conjugate_to_unit_sphere(f: &CanonicalMap, r: &LogRadius) -> Result<UnitSphereMap> {
    let l = sphere_exponent(f, r)?;
    let (num, den) = raw_conjugate(f, l);
    for (name, c) in [("t^2 numerator", &num[2]), ("t^2 denominator", &den[2]), ("t denominator", &den[1])] {
        if !c.is_zero() && val_i64(c, f.p()) < 1 {
            return Err(Error::NormBoundViolated(name.into()));
        }
    }
    Ok(UnitSphereMap { p: f.p(), l, num, den, direct: true })
}

/// Like `conjugate_to_unit_sphere`, but when the direct coefficients are not
/// p-adic integers, numerator and denominator are rescaled by a common power of p.
pub fn unit_sphere_form(f: &CanonicalMap, r: &LogRadius) -> Result<UnitSphereMap> {
    match conjugate_to_unit_sphere(f, r) {
        Err(Error::NormBoundViolated(_)) => {}
        other => return other,
    }
    let l = sphere_exponent(f, r)?;
    let (num, den) = raw_conjugate(f, l);
    let low = num.iter().chain(den.iter()).filter(|c| !c.is_zero()).map(|c| val_i64(c, f.p())).min().unwrap();
    let k = f.p().pow(-low);
    let scale = |c: Vec<Rational>| c.into_iter().map(|x| x * &k).collect::<Vec<_>>();
    Ok(UnitSphereMap { p: f.p(), l, num: scale(num), den: scale(den), direct: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Erg2Condition {
    /// |a| < β, |d| = β, r = α/2
    One,
    /// |a| = β, r = β/2
    Two,
    /// |a| > β, r = αβ/(2|a|)
    Three,
}

impl Erg2Condition {
    pub fn index(self) -> u8 {
        match self {
            Erg2Condition::One => 1,
            Erg2Condition::Two => 2,
            Erg2Condition::Three => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErgodicityVerdict {
    pub ergodic: bool,
    pub condition: Option<Erg2Condition>,
    /// Why no condition holds, when none does.
    pub reason: Option<String>,
    pub criterion: CriterionVerdict,
    /// Whether the criterion ran on the direct conjugate or a rescaled one.
    pub direct_conjugate: bool,
    pub agrees: bool,
    /// Whether √(d² - 4b) lies in Q_2, which the radius conditions presuppose.
    pub poles_in_qp: bool,
}

/// Ergodicity of f on S_r(0) for p = 2, r ∈ I, r ≠ |a-d|.
pub fn erg2_verdict(f: &CanonicalMap, r: &LogRadius) -> Result<ErgodicityVerdict> {
    if f.p().get() != 2 {
        return Err(Error::WrongPrime { expected: "2".into() });
    }
    sphere_exponent(f, r)?;
    if *r == f.norm(&f.x2()) {
        return Err(Error::ExceptionalRadius);
    }
    let case = NormCase::detect(f);
    let (a, al, be) = (&case.a_norm, &case.alpha, &case.beta);
    let half = LogRadius::p_pow(-1);
    let (condition, reason) = match a.cmp(be) {
        std::cmp::Ordering::Less => {
            if f.d_norm() != *be {
                (None, Some("|a| < beta but |d| != beta".to_string()))
            } else if *r == al * &half {
                (Some(Erg2Condition::One), None)
            } else {
                (None, Some("|a| < beta and r != alpha/2".to_string()))
            }
        }
        std::cmp::Ordering::Equal => {
            if *r == be * &half {
                (Some(Erg2Condition::Two), None)
            } else {
                (None, Some("|a| = beta and r != beta/2".to_string()))
            }
        }
        std::cmp::Ordering::Greater => {
            if *r == &case.ab_over_a() * &half {
                (Some(Erg2Condition::Three), None)
            } else {
                (None, Some("|a| > beta and r != alpha*beta/(2|a|)".to_string()))
            }
        }
    };
    let g = unit_sphere_form(f, r)?;
    let criterion = mod4_criterion(&g.num, &g.den)?;
    let disc = f.d() * f.d() - Rational::from_integer(4.into()) * f.b();
    let poles_in_qp = disc.is_zero() || hensel_sqrt(&disc, f.p(), 3).is_ok();
    let ergodic = condition.is_some();
    Ok(ErgodicityVerdict {
        ergodic,
        condition,
        reason,
        criterion,
        direct_conjugate: g.direct,
        agrees: criterion.ergodic == ergodic,
        poles_in_qp,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bin {
    pub residue: u64,
    pub count: u64,
    pub freq: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquidistributionReport {
    pub p: Prime,
    pub depth: u32,
    pub steps: u64,
    pub start: BigUint,
    /// One bin per unit residue mod p^depth.
    pub bins: Vec<Bin>,
}

impl EquidistributionReport {
    pub fn unvisited(&self) -> Vec<u64> {
        self.bins.iter().filter(|b| b.count == 0).map(|b| b.residue).collect()
    }

    /// Largest |freq - u| / u over the bins, u the uniform frequency.
    pub fn max_relative_deviation(&self) -> Rational {
        let u = Rational::new(1.into(), (self.bins.len() as u64).into());
        self.bins.iter().map(|b| ((&b.freq - &u) / &u).abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn lines(&self) -> Vec<String> {
        self.bins.iter().map(|b| format!("ball={} count={} freq={}", b.residue, b.count, b.freq)).collect()
    }
}


/// Orbit of the unit-sphere conjugate in N-digit arithmetic, binned by residue mod p^depth.
///
/// `start` is a point of S_r(0); without it a unit is drawn from `seed`.
pub fn empirical_equidistribution(
    f: &CanonicalMap,
    r: &LogRadius,
    depth: u32,
    steps: u64,
    precision: u32,
    seed: u64,
    start: Option<&Rational>,
) -> Result<EquidistributionReport> {
    assert!(depth >= 1 && depth <= precision && depth < 32);
    let g = unit_sphere_form(f, r)?;
    let p = f.p();
    let (num, den) = g.truncated(precision)?;
    let mut t = match start {
        Some(x) => {
            if f.norm(x) != *r {
                return Err(Error::NotInvariant);
            }
            TruncatedPadicInt::from_rational(&(x * p.pow(g.l)), p, precision)?
        }
        None => random_unit(p, precision, seed),
    };
    let start = t.residue().clone();
    let cells = p.get().pow(depth);
    let mut counts = vec![0u64; cells as usize];
    for _ in 0..steps {
        counts[t.reduce(depth).to_u64().unwrap() as usize] += 1;
        let d = invert_unit(&horner(&den, &t))?;
        t = horner(&num, &t).mul(&d);
    }
    let bins = (0..cells)
        .filter(|k| k % p.get() != 0)
        .map(|k| Bin {
            residue: k,
            count: counts[k as usize],
            freq: Rational::new(counts[k as usize].into(), steps.into()),
        })
        .collect();
    Ok(EquidistributionReport { p, depth, steps, start, bins })
}

fn random_unit(p: Prime, precision: u32, seed: u64) -> TruncatedPadicInt {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let digits: Vec<u64> = (0..precision).map(|_| rng.gen_range(0..p.get())).collect();
        if digits[0] == 0 {
            continue;
        }
        let mut acc = BigUint::zero();
        for d in digits.iter().rev() {
            acc = acc * p.get() + *d;
        }
        return TruncatedPadicInt::new(&acc.into(), p, precision);
    }
}

/// The first `steps` residues mod p^k of a simulated orbit started at t0.
pub fn simulate_residues(g: &UnitSphereMap, t0: &Rational, steps: usize, precision: u32, k: u32) -> Result<Vec<BigUint>> {
    let (num, den) = g.truncated(precision)?;
    let mut t = TruncatedPadicInt::from_rational(t0, g.p, precision)?;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        out.push(t.reduce(k));
        t = horner(&num, &t).mul(&invert_unit(&horner(&den, &t))?);
    }
    Ok(out)
}

//! The (2,2)-rational map: validation, canonical form, evaluation,
//! derivative and displacement norms, pre-images.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::truncated::rational_sqrt;
use crate::padic::{
    hensel_sqrt, norm, quad_root_norms, split_unit, val_i64, valuation, LogRadius, Prime,
    Rational, TruncatedPadicInt, Valuation,
};

/// f(x) = (ax² + bx + c) / (x² + dx + e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralMap {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
    pub p: Prime,
}

impl GeneralMap {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational, e: Rational, p: Prime) -> Result<GeneralMap> {
        if a.is_zero() {
            return Err(Error::InvalidMap("a = 0".into()));
        }
        if b == &a * &d && c == &a * &e {
            return Err(Error::InvalidMap("numerator is a multiple of the denominator".into()));
        }
        Ok(GeneralMap { a, b, c, d, e, p })
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let den = x * x + &self.d * x + &self.e;
        if den.is_zero() {
            return Err(Error::PoleHit { step: 0 });
        }
        Ok((&self.a * x * x + &self.b * x + &self.c) / den)
    }
}

/// f(x) = (ax² + bx) / (x² + dx + b) over Q_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMap {
    a: Rational,
    b: Rational,
    d: Rational,
    p: Prime,
    alpha: LogRadius,
    beta: LogRadius,
    // a, b, d scaled by the common denominator l, for one-division evaluation
    ia: BigInt,
    ib: BigInt,
    id: BigInt,
    il: BigInt,
}

impl CanonicalMap {
    pub fn new(a: Rational, b: Rational, d: Rational, p: Prime) -> Result<CanonicalMap> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidMap("ab = 0".into()));
        }
        if a == d {
            return Err(Error::InvalidMap("a = d".into()));
        }
        // b + (a-d)a = 0 puts the fixed point a-d on a pole
        if (&b + (&a - &d) * &a).is_zero() {
            return Err(Error::PoleCoincidesWithFixedPoint);
        }
        let (alpha, beta) = quad_root_norms(&d, &b, p)?;
        let il = a.denom().lcm(b.denom()).lcm(d.denom());
        let scale = |x: &Rational| x.numer() * (&il / x.denom());
        Ok(CanonicalMap {
            ia: scale(&a),
            ib: scale(&b),
            id: scale(&d),
            il,
            a,
            b,
            d,
            p,
            alpha,
            beta,
        })
    }

    /// Parses "a,b,d" over the given prime.
    pub fn parse(s: &str, p: Prime) -> Result<CanonicalMap> {
        let v = parse_list(s)?;
        match <[Rational; 3]>::try_from(v) {
            Ok([a, b, d]) => CanonicalMap::new(a, b, d, p),
            Err(_) => Err(Error::Parse(format!("expected a,b,d: {:?}", s))),
        }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    /// Smaller pole norm.
    pub fn alpha(&self) -> &LogRadius {
        &self.alpha
    }

    /// Larger pole norm.
    pub fn beta(&self) -> &LogRadius {
        &self.beta
    }

    pub fn norm(&self, x: &Rational) -> LogRadius {
        norm(x, self.p)
    }

    pub fn a_norm(&self) -> LogRadius {
        self.norm(&self.a)
    }

    pub fn d_norm(&self) -> LogRadius {
        self.norm(&self.d)
    }

    /// The simple fixed point a - d (the other one is 0).
    pub fn x2(&self) -> Rational {
        &self.a - &self.d
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let (u, w) = (x.numer(), x.denom());
        let uw = u * w;
        let den = &self.il * u * u + &self.id * &uw + &self.ib * w * w;
        if den.is_zero() {
            return Err(Error::PoleHit { step: 0 });
        }
        let num = &self.ia * u * u + &self.ib * &uw;
        Ok(Rational::new(num, den))
    }

    /// x, f(x), ..., f^n(x). A pole hit reports the index of the step that failed.
    pub fn orbit(&self, x: &Rational, n: usize) -> Result<Vec<Rational>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        for step in 1..=n {
            let next = self.eval(out.last().unwrap()).map_err(|_| Error::PoleHit { step })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn derivative(&self, x: &Rational) -> Result<Rational> {
        let (a, b, d) = (&self.a, &self.b, &self.d);
        let den = x * x + d * x + b;
        if den.is_zero() {
            return Err(Error::PoleHit { step: 0 });
        }
        let num = (a * d - b) * x * x + Rational::from_integer(2.into()) * a * b * x + b * b;
        Ok(num / (&den * &den))
    }

    pub fn derivative_norm(&self, x: &Rational) -> Result<Valuation> {
        Ok(valuation(&self.derivative(x)?, self.p))
    }

    /// f'(x₂) = (b + (a-d)d) / (b + (a-d)a).
    pub fn x2_multiplier(&self) -> Rational {
        let s = self.x2();
        (&self.b + &s * &self.d) / (&self.b + &s * &self.a)
    }

    /// |f(c) - c|_p.
    pub fn displacement_norm(&self, c: &Rational) -> Result<Valuation> {
        Ok(valuation(&(self.eval(c)? - c), self.p))
    }

    pub fn poles(&self) -> PoleData {
        let disc = &self.d * &self.d - Rational::from_integer(4.into()) * &self.b;
        let exact_poles = rational_sqrt(&disc).map(|s| {
            let two = Rational::from_integer(2.into());
            let x1 = (-&self.d + &s) / &two;
            let x2 = (-&self.d - &s) / &two;
            if self.norm(&x1) <= self.norm(&x2) {
                (x1, x2)
            } else {
                (x2, x1)
            }
        });
        PoleData { alpha: self.alpha.clone(), beta: self.beta.clone(), exact_poles }
    }

    /// Solutions of f(x) = y in Q_p, from (a-y)x² + (b-dy)x - by = 0.
    pub fn solve_preimage(&self, y: &Rational, precision: u32) -> Result<Vec<Preimage>> {
        let qa = &self.a - y;
        let qb = &self.b - &self.d * y;
        let qc = -(&self.b * y);
        if qa.is_zero() {
            // y = a: linear, and constant when b = ad
            if qb.is_zero() {
                return Ok(vec![]);
            }
            return Ok(vec![Preimage::Rational(-qc / qb)]);
        }
        if qc.is_zero() {
            return Ok(vec![Preimage::Rational(Rational::zero()), Preimage::Rational(-qb / qa)]);
        }
        let disc = &qb * &qb - Rational::from_integer(4.into()) * &qa * &qc;
        let two_a = Rational::from_integer(2.into()) * &qa;
        if disc.is_zero() {
            return Ok(vec![Preimage::Rational(-qb / two_a)]);
        }
        if let Some(s) = rational_sqrt(&disc) {
            return Ok(vec![Preimage::Rational((-&qb + &s) / &two_a), Preimage::Rational((-&qb - s) / two_a)]);
        }
        let (r1, r2) = quad_root_norms(&(&qb / &qa), &(&qc / &qa), self.p)?;
        match padic_quadratic_roots(&qa, &qb, &disc, (&r1, &r2), self.p, precision) {
            Some(roots) => Ok(roots.into_iter().map(Preimage::Padic).collect()),
            None => Ok(vec![Preimage::NotInField { norm: r1 }, Preimage::NotInField { norm: r2 }]),
        }
    }
}

/// Pole norms, and the poles themselves when d² - 4b is a rational square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleData {
    pub alpha: LogRadius,
    pub beta: LogRadius,
    pub exact_poles: Option<(Rational, Rational)>,
}

/// x = p^valuation * unit with the unit known to the stated precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicRoot {
    pub valuation: i64,
    pub unit: TruncatedPadicInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    Rational(Rational),
    Padic(PadicRoot),
    /// The root lives in an extension of Q_p; only its norm is known.
    NotInField { norm: LogRadius },
}

impl Preimage {
    pub fn norm(&self, p: Prime) -> LogRadius {
        match self {
            Preimage::Rational(x) => norm(x, p),
            Preimage::Padic(r) => LogRadius::p_pow(-r.valuation),
            Preimage::NotInField { norm } => norm.clone(),
        }
    }
}

// Roots of A x² + B x + C with discriminant `disc` (not a rational square).
// None when the square root of disc is not in Q_p.
fn padic_quadratic_roots(
    qa: &Rational,
    qb: &Rational,
    disc: &Rational,
    norms: (&LogRadius, &LogRadius),
    p: Prime,
    precision: u32,
) -> Option<Vec<PadicRoot>> {
    let h = hensel_sqrt(disc, p, 1).ok()?.half_valuation;
    let two_a = Rational::from_integer(2.into()) * qa;
    let (e, eu) = split_unit(&two_a, p);
    // a root in Q_p forces integer root valuations
    let vmax = [norms.0, norms.1].iter().map(|r| -r.int_log().expect("integral root valuation")).max().unwrap();
    // work with (-B ± √D) / p^low, which are p-adic integers
    let low = if qb.is_zero() { h } else { h.min(val_i64(qb, p)) };
    let m = (precision as i64 + vmax + e - h).max(1) as u32 + 1;
    let root = hensel_sqrt(disc, p, m).ok()?;
    // the unit root is only pinned down to m - 1 digits up to sign
    let abs_prec = (m as i64 - 1 + h - low) as u32;
    let s = TruncatedPadicInt::from_rational(&p.pow(h - low), p, abs_prec)
        .ok()?
        .mul(&truncate(&root.unit_root, abs_prec));
    let b = TruncatedPadicInt::from_rational(&(qb * p.pow(-low)), p, abs_prec).ok()?;
    let mut out = Vec::new();
    for num in [b.neg().add(&s), b.neg().sub(&s)] {
        let v = residue_valuation(&num)?;
        let digits = (abs_prec - v).min(precision);
        let shifted = Rational::new(BigInt::from(num.residue().clone()), BigInt::one()) * p.pow(-(v as i64));
        let unit = TruncatedPadicInt::from_rational(&(shifted / &eu), p, digits).ok()?;
        out.push(PadicRoot { valuation: v as i64 + low - e, unit });
    }
    Some(out)
}

fn truncate(x: &TruncatedPadicInt, precision: u32) -> TruncatedPadicInt {
    TruncatedPadicInt::new(&BigInt::from(x.residue().clone()), x.prime(), precision)
}

fn residue_valuation(x: &TruncatedPadicInt) -> Option<u32> {
    if x.residue().is_zero() {
        return None;
    }
    let r = Rational::from_integer(BigInt::from(x.residue().clone()));
    Some(val_i64(&r, x.prime()) as u32)
}

/// Result of conjugating a general map by h(t) = t + shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyRecord {
    pub shift: Rational,
    /// The simple fixed point of the general map.
    pub simple_root: Rational,
    pub canonical: CanonicalMap,
}

/// Conjugates a map with a double fixed point to canonical form.
pub fn canonicalize(g: &GeneralMap) -> Result<ConjugacyRecord> {
    // x³ + (d-a)x² + (e-b)x - c, low degree first
    let cubic = vec![-g.c.clone(), &g.e - &g.b, &g.d - &g.a, Rational::one()];
    let deriv = derivative(&cubic);
    let gcd = poly_gcd(cubic, deriv);
    let x2 = match gcd.len() {
        1 => return Err(Error::ThreeDistinctRoots),
        2 => -&gcd[0] / &gcd[1],
        _ => return Err(Error::TripleRoot),
    };
    // roots sum to a - d
    let x1 = &g.a - &g.d - Rational::from_integer(2.into()) * &x2;
    let big_e = &x2 * &x2 + &g.d * &x2 + &g.e;
    if big_e.is_zero() {
        return Err(Error::PoleCoincidesWithFixedPoint);
    }
    let ca = &g.a - &x2;
    let cd = Rational::from_integer(2.into()) * &x2 + &g.d;
    let canonical = CanonicalMap::new(ca, big_e, cd, g.p)?;
    Ok(ConjugacyRecord { shift: x2, simple_root: x1, canonical })
}

/// Either "a,b,d" or "a,b,c,d,e", the latter canonicalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedMap {
    Canonical(CanonicalMap),
    General(GeneralMap, ConjugacyRecord),
}

impl ParsedMap {
    pub fn parse(s: &str, p: Prime) -> Result<ParsedMap> {
        let v = parse_list(s)?;
        match v.len() {
            3 => CanonicalMap::parse(s, p).map(ParsedMap::Canonical),
            5 => {
                let mut it = v.into_iter();
                let mut next = || it.next().unwrap();
                let g = GeneralMap::new(next(), next(), next(), next(), next(), p)?;
                let rec = canonicalize(&g)?;
                Ok(ParsedMap::General(g, rec))
            }
            _ => Err(Error::Parse(format!("expected 3 or 5 coefficients: {:?}", s))),
        }
    }

    pub fn canonical(&self) -> &CanonicalMap {
        match self {
            ParsedMap::Canonical(f) => f,
            ParsedMap::General(_, rec) => &rec.canonical,
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(crate::padic::parse_rational).collect()
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    let d: Vec<Rational> =
        p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer((i as i64).into())).collect();
    trim(d)
}

fn poly_rem(mut num: Vec<Rational>, den: &[Rational]) -> Vec<Rational> {
    let lead = den.last().unwrap();
    while num.len() >= den.len() && !(num.len() == 1 && num[0].is_zero()) {
        let shift = num.len() - den.len();
        let q = num.last().unwrap() / lead;
        for (i, c) in den.iter().enumerate() {
            num[i + shift] -= &q * c;
        }
        num.pop();
        num = trim(num);
        if num.is_empty() {
            num.push(Rational::zero());
        }
    }
    num
}

// monic gcd, low degree first
fn poly_gcd(mut a: Vec<Rational>, mut b: Vec<Rational>) -> Vec<Rational> {
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = poly_rem(a, &b);
        a = b;
        b = r;
    }
    let lead = a.last().unwrap().clone();
    a.iter().map(|c| c / &lead).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn canon(a: Rational, b: i64, d: i64, pr: u64) -> CanonicalMap {
        CanonicalMap::new(a, q(b, 1), q(d, 1), p(pr)).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let g = GeneralMap::new(q(4, 1), q(-7, 1), q(4, 1), q(-2, 1), q(2, 1), p(3)).unwrap();
        let rec = canonicalize(&g).unwrap();
        assert_eq!(rec.shift, q(1, 1));
        assert_eq!(rec.simple_root, q(4, 1));
        assert_eq!((rec.canonical.a(), rec.canonical.b(), rec.canonical.d()), (&q(3, 1), &q(1, 1), &q(0, 1)));

        let g = GeneralMap::new(q(3, 1), q(1, 1), q(0, 1), q(0, 1), q(1, 1), p(3)).unwrap();
        let rec = canonicalize(&g).unwrap();
        assert_eq!(rec.shift, q(0, 1));
        assert_eq!((rec.canonical.a(), rec.canonical.b(), rec.canonical.d()), (&q(3, 1), &q(1, 1), &q(0, 1)));

        let g = GeneralMap::new(q(3, 1), q(1, 1), q(0, 1), q(0, 1), q(3, 1), p(3)).unwrap();
        assert_eq!(canonicalize(&g), Err(Error::ThreeDistinctRoots));
    }

    #[test]
    fn canonicalize_rejections() {
        let g = GeneralMap::new(q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), p(3));
        assert!(g.is_err(), "b = ad and c = ae");
        let g = GeneralMap::new(q(2, 1), q(1, 1), q(0, 1), q(2, 1), q(1, 1), p(3)).unwrap();
        assert_eq!(canonicalize(&g), Err(Error::TripleRoot));
        // double root 0 sitting on a pole: e = 0
        let g = GeneralMap::new(q(2, 1), q(0, 1), q(0, 1), q(1, 1), q(0, 1), p(3)).unwrap();
        assert_eq!(canonicalize(&g), Err(Error::PoleCoincidesWithFixedPoint));
    }

    #[test]
    fn eval_examples() {
        let f = canon(q(3, 1), 1, 0, 3);
        assert_eq!(f.eval(&q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(f.eval(&q(9, 1)).unwrap(), q(126, 41));
        for a in [q(1, 1), q(5, 7), q(-2, 1)] {
            let g = canon(a, 27, -12, 3);
            assert_eq!(g.eval(&q(3, 1)), Err(Error::PoleHit { step: 0 }));
        }
    }

    #[test]
    fn derivative_examples() {
        let f = canon(q(3, 1), 1, 0, 3);
        assert_eq!(f.derivative_norm(&q(9, 1)).unwrap(), Valuation::int(0));
        assert_eq!(f.derivative_norm(&q(3, 1)).unwrap(), Valuation::int(0));
        let g = canon(q(1, 3), 1, 0, 3);
        assert_eq!(g.derivative_norm(&q(1, 3)).unwrap(), Valuation::int(2));
        assert_eq!(g.derivative(&g.x2()).unwrap(), g.x2_multiplier());
    }

    #[test]
    fn displacement_examples() {
        let f = canon(q(3, 1), 1, 0, 3);
        assert_eq!(f.eval(&q(9, 1)).unwrap() - q(9, 1), q(-243, 41));
        assert_eq!(f.displacement_norm(&q(9, 1)).unwrap(), Valuation::int(5));
        assert_eq!(f.displacement_norm(&q(0, 1)).unwrap(), Valuation::Infinity);
        let g = canon(q(4, 1), 8, -6, 2);
        assert_eq!(g.displacement_norm(&q(8, 1)).unwrap(), Valuation::int(4));
    }

    #[test]
    fn preimage_examples() {
        let f = canon(q(3, 1), 1, 0, 3);
        let roots = f.solve_preimage(&q(126, 41), 10).unwrap();
        assert!(roots.contains(&Preimage::Rational(q(9, 1))));
        let roots = f.solve_preimage(&q(0, 1), 10).unwrap();
        assert_eq!(roots, vec![Preimage::Rational(q(0, 1)), Preimage::Rational(q(-1, 3))]);
        // 5x² - 3x + 6: discriminant -111 has odd 3-adic valuation
        let g = canon(q(1, 3), 1, 0, 3);
        let roots = g.solve_preimage(&q(2, 1), 4).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| matches!(r, Preimage::NotInField { .. })));
        // y = a is linear
        let roots = f.solve_preimage(&q(3, 1), 10).unwrap();
        assert_eq!(roots, vec![Preimage::Rational(q(3, 1))]);
    }

    #[test]
    fn padic_preimages_solve_the_quadratic() {
        let mut found = 0;
        for (f, pr) in [(canon(q(3, 1), 1, 0, 7), 7), (canon(q(1, 3), 1, 0, 3), 3), (canon(q(4, 1), 8, -6, 2), 2)] {
            let pr = p(pr);
            for y in (-30..30).map(|k| q(k, 1) * pr.pow(k % 4)).filter(|y| y != f.a()) {
                let roots = f.solve_preimage(&y, 24).unwrap();
                let (r1, r2) = quad_root_norms(&((f.b() - f.d() * &y) / (f.a() - &y)), &(-(f.b() * &y) / (f.a() - &y)), pr)
                    .unwrap_or((LogRadius::Zero, LogRadius::Zero));
                for root in roots {
                    let Preimage::Padic(r) = root else { continue };
                    found += 1;
                    let rn = LogRadius::p_pow(-r.valuation);
                    assert!(rn == r1 || rn == r2);
                    // plug x = p^v u into (a-y)x² + (b-dy)x - by, scaled to be integral
                    let n = r.unit.precision();
                    let lift = |c: Rational| {
                        let (cv, cu) = split_unit(&c, pr);
                        (cv, TruncatedPadicInt::from_rational(&cu, pr, n).unwrap())
                    };
                    let u = r.unit.clone();
                    let terms = [
                        lift((f.a() - &y) * pr.pow(2 * r.valuation)),
                        lift((f.b() - f.d() * &y) * pr.pow(r.valuation)),
                        lift(-(f.b() * &y)),
                    ];
                    let low = terms.iter().map(|t| t.0).min().unwrap();
                    let one = TruncatedPadicInt::from_u64(1, pr, n);
                    let mut acc = TruncatedPadicInt::from_u64(0, pr, n);
                    for (k, (cv, cu)) in terms.into_iter().enumerate() {
                        let pk = TruncatedPadicInt::from_rational(&pr.pow(cv - low), pr, n).unwrap();
                        let upow = if k == 0 { u.mul(&u) } else if k == 1 { u.clone() } else { one.clone() };
                        acc = acc.add(&cu.mul(&pk).mul(&upow));
                    }
                    assert!(acc.reduce(n / 2).is_zero(), "y = {}", y);
                }
            }
        }
        assert!(found > 10, "found {}", found);
    }

    #[test]
    fn poles_when_rational() {
        let g = canon(q(4, 1), 8, -6, 2);
        let poles = g.poles();
        assert_eq!(poles.exact_poles, Some((q(4, 1), q(2, 1))));
        assert_eq!((poles.alpha, poles.beta), (LogRadius::p_pow(-2), LogRadius::p_pow(-1)));
        assert_eq!(canon(q(3, 1), 1, 0, 3).poles().exact_poles, None);
    }

    #[test]
    fn canonical_validation() {
        assert!(CanonicalMap::new(q(0, 1), q(1, 1), q(0, 1), p(3)).is_err());
        assert!(CanonicalMap::new(q(1, 1), q(0, 1), q(0, 1), p(3)).is_err());
        assert!(CanonicalMap::new(q(2, 1), q(1, 1), q(2, 1), p(3)).is_err());
        // b + (a-d)a = 0
        assert_eq!(CanonicalMap::new(q(1, 1), q(-1, 1), q(0, 1), p(3)), Err(Error::PoleCoincidesWithFixedPoint));
    }

    #[test]
    fn parse_maps() {
        let f = ParsedMap::parse("4,8,-6", p(2)).unwrap();
        assert_eq!(f.canonical().d(), &q(-6, 1));
        let g = ParsedMap::parse("4,-7,4,-2,2", p(3)).unwrap();
        assert_eq!(g.canonical().a(), &q(3, 1));
        assert!(ParsedMap::parse("1,2", p(3)).is_err());
    }
}

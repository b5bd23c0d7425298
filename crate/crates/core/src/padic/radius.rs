use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{parse_rational, val_i64, Prime, Rational, Valuation};
use crate::error::{Error, Result};

/// A radius p^e with rational exponent e, or the zero radius.
///
/// The prime is not stored; it is supplied when printing or parsing.
/// `Zero` sorts below every power, powers sort by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogRadius {
    Zero,
    Pow(Rational),
}

impl LogRadius {
    pub fn pow(e: Rational) -> LogRadius {
        LogRadius::Pow(e)
    }

    pub fn p_pow(e: i64) -> LogRadius {
        LogRadius::Pow(Rational::from_integer(e.into()))
    }

    pub fn one() -> LogRadius {
        LogRadius::p_pow(0)
    }

    /// log_p of the radius, `None` for zero.
    pub fn log(&self) -> Option<&Rational> {
        match self {
            LogRadius::Zero => None,
            LogRadius::Pow(e) => Some(e),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogRadius::Zero)
    }

    /// Integer exponent, if the radius is p^k with k an integer.
    pub fn int_log(&self) -> Option<i64> {
        self.log().filter(|e| e.is_integer()).and_then(|e| e.to_integer().to_i64())
    }

    pub fn powi(&self, k: i64) -> LogRadius {
        self.pow_q(&Rational::from_integer(k.into()))
    }

    pub fn pow_q(&self, k: &Rational) -> LogRadius {
        match self {
            LogRadius::Zero => {
                assert!(k.is_positive(), "zero radius to a non-positive power");
                LogRadius::Zero
            }
            LogRadius::Pow(e) => LogRadius::Pow(e * k),
        }
    }

    pub fn to_valuation(&self) -> Valuation {
        match self {
            LogRadius::Zero => Valuation::Infinity,
            LogRadius::Pow(e) => Valuation::Finite(-e),
        }
    }

    /// The radius as an exact rational number when the exponent is an integer.
    pub fn to_rational(&self, p: Prime) -> Option<Rational> {
        match self {
            LogRadius::Zero => Some(Rational::zero()),
            LogRadius::Pow(_) => self.int_log().map(|k| p.pow(k)),
        }
    }

    /// Text form "p^(e)" or "0".
    pub fn format(&self, p: Prime) -> String {
        match self {
            LogRadius::Zero => "0".to_string(),
            LogRadius::Pow(e) => format!("{}^({})", p, e),
        }
    }

    pub fn display(&self, p: Prime) -> RadiusDisplay<'_> {
        RadiusDisplay(self, p)
    }

    /// Parses "p^(e)", "p^e" or "0"; the base must equal `p`.
    pub fn parse(s: &str, p: Prime) -> Result<LogRadius> {
        let s = s.trim();
        if s == "0" {
            return Ok(LogRadius::Zero);
        }
        let bad = |why: &str| Error::Parse(format!("radius {:?}: {}", s, why));
        let (base, exp) = s.split_once('^').ok_or_else(|| bad("expected p^(e)"))?;
        let base: u64 = base.trim().parse().map_err(|_| bad("bad base"))?;
        if base != p.get() {
            return Err(bad(&format!("base must be the prime {}", p)));
        }
        let exp = exp.trim();
        let exp = match exp.strip_prefix('(') {
            Some(rest) => rest.strip_suffix(')').ok_or_else(|| bad("unbalanced parenthesis"))?,
            None => exp,
        };
        Ok(LogRadius::Pow(parse_rational(exp)?))
    }
}

pub struct RadiusDisplay<'a>(&'a LogRadius, Prime);

impl fmt::Display for RadiusDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.format(self.1))
    }
}

impl Mul for &LogRadius {
    type Output = LogRadius;

    fn mul(self, rhs: &LogRadius) -> LogRadius {
        match (self, rhs) {
            (LogRadius::Pow(a), LogRadius::Pow(b)) => LogRadius::Pow(a + b),
            _ => LogRadius::Zero,
        }
    }
}

impl Mul for LogRadius {
    type Output = LogRadius;

    fn mul(self, rhs: LogRadius) -> LogRadius {
        &self * &rhs
    }
}

impl Div for &LogRadius {
    type Output = LogRadius;

    fn div(self, rhs: &LogRadius) -> LogRadius {
        match (self, rhs) {
            (_, LogRadius::Zero) => panic!("division by the zero radius"),
            (LogRadius::Zero, _) => LogRadius::Zero,
            (LogRadius::Pow(a), LogRadius::Pow(b)) => LogRadius::Pow(a - b),
        }
    }
}

impl Div for LogRadius {
    type Output = LogRadius;

    fn div(self, rhs: LogRadius) -> LogRadius {
        &self / &rhs
    }
}

/// Norms (α, β), α ≤ β, of the two roots of x² + dx + b, read off the
/// Newton polygon of the quadratic.
pub fn quad_root_norms(d: &Rational, b: &Rational, p: Prime) -> Result<(LogRadius, LogRadius)> {
    if b.is_zero() {
        return Err(Error::ZeroB);
    }
    let vb = Rational::from_integer(val_i64(b, p).into());
    let two = Rational::from_integer(2.into());
    // vertices (0, vb), (1, vd), (2, 0)
    let split = if d.is_zero() {
        None
    } else {
        let vd = Rational::from_integer(val_i64(d, p).into());
        match (&vd * &two).cmp(&vb) {
            Ordering::Less => Some(vd),
            _ => None,
        }
    };
    Ok(match split {
        // two segments: slopes -(vb - vd) and -vd
        Some(vd) => {
            let small = LogRadius::Pow(-(&vb - &vd));
            let large = LogRadius::Pow(-vd);
            (small, large)
        }
        None => {
            let r = LogRadius::Pow(-(vb / two));
            (r.clone(), r)
        }
    })
}

/// Exact ceiling of a rational, as i64.
pub(crate) fn ceil_i64(x: &Rational) -> i64 {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    let q = q.to_i64().expect("step count overflow");
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

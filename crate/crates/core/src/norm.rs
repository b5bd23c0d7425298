//! Radius dynamics: the eight piecewise maps r ↦ |f(x)|_p for |x|_p = r,
//! their exceptional radii, and the invariant radius set.

use std::fmt;

use crate::error::{Error, Result};
use crate::map::CanonicalMap;
use crate::padic::radius::ceil_i64;
use crate::padic::{LogRadius, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// |a| < α = β
    C1,
    /// |a| = α = β
    C2,
    /// |a| > α = β
    C3,
    /// |a| < α < β
    C4,
    /// |a| = α < β
    C5,
    /// α < |a| < β
    C6,
    /// α < |a| = β
    C7,
    /// α < β < |a|
    C8,
}

impl CaseId {
    pub const ALL: [CaseId; 8] =
        [CaseId::C1, CaseId::C2, CaseId::C3, CaseId::C4, CaseId::C5, CaseId::C6, CaseId::C7, CaseId::C8];
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// The unnamed radius a sphere is sent to at an exceptional radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarkerKind {
    AlphaStar,
    AStar,
    AlphaHat,
    APrime,
    AlphaPrime,
    AlphaCheck,
    BetaCheck,
    ACheck,
    AlphaTilde,
    BetaTilde,
    AlphaBreve,
    ABreve,
    BetaBreve,
    AlphaAcute,
    BetaAcute,
    AGrave,
    AlphaGrave,
    BetaGrave,
}

impl MarkerKind {
    pub fn name(self) -> &'static str {
        use MarkerKind::*;
        match self {
            AlphaStar => "alpha_star",
            AStar => "a_star",
            AlphaHat => "alpha_hat",
            APrime => "a_prime",
            AlphaPrime => "alpha_prime",
            AlphaCheck => "alpha_check",
            BetaCheck => "beta_check",
            ACheck => "a_check",
            AlphaTilde => "alpha_tilde",
            BetaTilde => "beta_tilde",
            AlphaBreve => "alpha_breve",
            ABreve => "a_breve",
            BetaBreve => "beta_breve",
            AlphaAcute => "alpha_acute",
            BetaAcute => "beta_acute",
            AGrave => "a_grave",
            AlphaGrave => "alpha_grave",
            BetaGrave => "beta_grave",
        }
    }
}

/// One-sided constraint known for a marker's value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    AtLeast(LogRadius),
    AtMost(LogRadius),
}

impl Bound {
    pub fn admits(&self, r: &LogRadius) -> bool {
        match self {
            Bound::AtLeast(b) => r >= b,
            Bound::AtMost(b) => r <= b,
        }
    }
}

/// An exceptional radius: the image sphere depends on the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marker {
    pub case: CaseId,
    pub kind: MarkerKind,
    /// The exceptional radius itself.
    pub radius: LogRadius,
}

impl Marker {
    /// "C1:alpha_star" style label.
    pub fn label(&self) -> String {
        format!("{}:{}", self.case, self.kind.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Determined(LogRadius),
    DataDependent(Marker),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    FixedAt(LogRadius),
    ConvergesTo(LogRadius),
    /// Reaches `radius` after `steps` steps; `marker` is set when that radius is exceptional.
    ReachesAfter { steps: u64, radius: LogRadius, marker: Option<Marker> },
    Blocked(Marker),
}

/// I₁ = (0, α), I₂ = (0, α) ∪ (α, β), I₃ = (0, αβ/|a|).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantRadiusSet {
    I1 { alpha: LogRadius },
    I2 { alpha: LogRadius, beta: LogRadius },
    I3 { bound: LogRadius },
}

impl InvariantRadiusSet {
    pub fn contains(&self, r: &LogRadius) -> bool {
        if r.is_zero() {
            return false;
        }
        match self {
            InvariantRadiusSet::I1 { alpha } => r < alpha,
            InvariantRadiusSet::I2 { alpha, beta } => r < beta && r != alpha,
            InvariantRadiusSet::I3 { bound } => r < bound,
        }
    }

    /// Supremum of the set.
    pub fn upper(&self) -> &LogRadius {
        match self {
            InvariantRadiusSet::I1 { alpha } => alpha,
            InvariantRadiusSet::I2 { beta, .. } => beta,
            InvariantRadiusSet::I3 { bound } => bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Action {
    Identity,
    Const(LogRadius),
    /// r ↦ coef · r^power
    Scale { coef: LogRadius, power: i64 },
}

enum Place {
    Point(usize),
    Interval(usize),
}

enum Stop {
    Exhausted,
    Fixed,
    Hit(Marker),
}

/// Norm regime of a canonical map, with |a|_p, α, β cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormCase {
    pub id: CaseId,
    pub a_norm: LogRadius,
    pub alpha: LogRadius,
    pub beta: LogRadius,
}

impl NormCase {
    /// Classifies abstract radii; requires 0 < α ≤ β and |a| > 0.
    pub fn from_radii(a_norm: LogRadius, alpha: LogRadius, beta: LogRadius) -> NormCase {
        assert!(!a_norm.is_zero() && !alpha.is_zero() && alpha <= beta);
        use std::cmp::Ordering::*;
        let id = if alpha == beta {
            match a_norm.cmp(&alpha) {
                Less => CaseId::C1,
                Equal => CaseId::C2,
                Greater => CaseId::C3,
            }
        } else {
            match (a_norm.cmp(&alpha), a_norm.cmp(&beta)) {
                (Less, _) => CaseId::C4,
                (Equal, _) => CaseId::C5,
                (Greater, Less) => CaseId::C6,
                (Greater, Equal) => CaseId::C7,
                (Greater, Greater) => CaseId::C8,
            }
        };
        NormCase { id, a_norm, alpha, beta }
    }

    pub fn detect(f: &CanonicalMap) -> NormCase {
        NormCase::from_radii(f.a_norm(), f.alpha().clone(), f.beta().clone())
    }

    /// α²/|a| or αβ/|a| (they agree when α = β).
    pub fn ab_over_a(&self) -> LogRadius {
        &(&self.alpha * &self.beta) / &self.a_norm
    }

    // exceptional radii in increasing order, and the action on each open
    // interval between them (one more interval than points)
    fn table(&self) -> (Vec<(LogRadius, MarkerKind)>, Vec<Action>) {
        use Action::*;
        use MarkerKind::*;
        let (a, al, be) = (&self.a_norm, &self.alpha, &self.beta);
        let k = self.ab_over_a();
        let c = |r: &LogRadius| Const(r.clone());
        match self.id {
            CaseId::C1 => (
                vec![(al.clone(), AlphaStar), (k, AStar)],
                vec![Identity, Scale { coef: al.powi(2), power: -1 }, c(a)],
            ),
            CaseId::C2 => (vec![(al.clone(), AlphaHat)], vec![Identity, c(a)]),
            CaseId::C3 => (
                vec![(k, APrime), (al.clone(), AlphaPrime)],
                vec![Identity, Scale { coef: a / &al.powi(2), power: 2 }, c(a)],
            ),
            CaseId::C4 => (
                vec![(al.clone(), AlphaCheck), (be.clone(), BetaCheck), (k, ACheck)],
                vec![Identity, c(al), Scale { coef: al * be, power: -1 }, c(a)],
            ),
            CaseId::C5 => (vec![(al.clone(), AlphaTilde), (be.clone(), BetaTilde)], vec![Identity, c(al), c(a)]),
            CaseId::C6 => (
                vec![(al.clone(), AlphaBreve), (k, ABreve), (be.clone(), BetaBreve)],
                vec![Identity, c(al), Scale { coef: a / be, power: 1 }, c(a)],
            ),
            CaseId::C7 => (vec![(al.clone(), AlphaAcute), (be.clone(), BetaAcute)], vec![Identity, Identity, c(a)]),
            CaseId::C8 => (
                vec![(k, AGrave), (al.clone(), AlphaGrave), (be.clone(), BetaGrave)],
                vec![Identity, Scale { coef: a / &(al * be), power: 2 }, Scale { coef: a / be, power: 1 }, c(a)],
            ),
        }
    }

    /// The exceptional radii with their markers, increasing.
    pub fn exceptional_radii(&self) -> Vec<Marker> {
        self.table().0.into_iter().map(|(radius, kind)| Marker { case: self.id, kind, radius }).collect()
    }

    /// The one-sided bound the lemmas give for a marker's value, if any.
    pub fn marker_bound(&self, kind: MarkerKind) -> Option<Bound> {
        use MarkerKind::*;
        let (a, al, be) = (&self.a_norm, &self.alpha, &self.beta);
        Some(match kind {
            AlphaStar | AlphaCheck | BetaCheck | AlphaTilde | AlphaBreve => Bound::AtLeast(al.clone()),
            AStar | ACheck => Bound::AtMost(a.clone()),
            APrime => Bound::AtMost(&al.powi(2) / a),
            AlphaPrime | BetaBreve | BetaAcute | BetaGrave => Bound::AtLeast(a.clone()),
            ABreve => Bound::AtMost(al.clone()),
            AGrave => Bound::AtMost(self.ab_over_a()),
            AlphaGrave => Bound::AtLeast(&(a * al) / be),
            AlphaHat | BetaTilde | AlphaAcute => return None,
        })
    }

    fn locate(&self, points: &[(LogRadius, MarkerKind)], r: &LogRadius) -> Place {
        for (i, (t, _)) in points.iter().enumerate() {
            if r == t {
                return Place::Point(i);
            }
            if r < t {
                return Place::Interval(i);
            }
        }
        Place::Interval(points.len())
    }

    fn marker_at(&self, points: &[(LogRadius, MarkerKind)], i: usize) -> Marker {
        Marker { case: self.id, kind: points[i].1, radius: points[i].0.clone() }
    }

    /// One application of the case's radius map.
    pub fn predict_step(&self, r: &LogRadius) -> StepOutcome {
        if r.is_zero() {
            return StepOutcome::Determined(LogRadius::Zero);
        }
        let (points, actions) = self.table();
        match self.locate(&points, r) {
            Place::Point(i) => StepOutcome::DataDependent(self.marker_at(&points, i)),
            Place::Interval(i) => StepOutcome::Determined(match &actions[i] {
                Action::Identity => r.clone(),
                Action::Const(c) => c.clone(),
                Action::Scale { coef, power } => coef * &r.powi(*power),
            }),
        }
    }

    // Iterates with whole-interval jumps on translation pieces.
    fn run(&self, r: &LogRadius, max: Option<u64>) -> (u64, LogRadius, Stop) {
        let (points, actions) = self.table();
        let mut r = r.clone();
        let mut steps = 0u64;
        loop {
            if max == Some(steps) {
                return (steps, r, Stop::Exhausted);
            }
            if r.is_zero() {
                return (steps, r, Stop::Fixed);
            }
            let i = match self.locate(&points, &r) {
                Place::Point(i) => return (steps, r.clone(), Stop::Hit(self.marker_at(&points, i))),
                Place::Interval(i) => i,
            };
            match &actions[i] {
                Action::Identity => return (steps, r, Stop::Fixed),
                Action::Const(c) => {
                    if *c == r {
                        return (steps, r, Stop::Fixed);
                    }
                    r = c.clone();
                    steps += 1;
                }
                Action::Scale { coef, power: 1 } => {
                    let t = coef.log().unwrap().clone();
                    let e = r.log().unwrap().clone();
                    let zero = Rational::from_integer(0.into());
                    if t == zero {
                        return (steps, r, Stop::Fixed);
                    }
                    // steps until the orbit leaves this interval
                    let exit = if t > zero {
                        let hi = points[i].0.log().unwrap();
                        ceil_i64(&((hi - &e) / &t))
                    } else {
                        let lo = points[i - 1].0.log().unwrap();
                        ceil_i64(&((&e - lo) / -&t))
                    };
                    let mut j = exit.max(1) as u64;
                    if let Some(m) = max {
                        j = j.min(m - steps);
                    }
                    r = &r * &coef.powi(j as i64);
                    steps += j;
                }
                Action::Scale { coef, power } => {
                    r = coef * &r.powi(*power);
                    steps += 1;
                }
            }
        }
    }

    /// n-fold iterate, stopping at the first exceptional radius crossed.
    pub fn predict_n(&self, r: &LogRadius, n: u64) -> StepOutcome {
        match self.run(r, Some(n)) {
            (_, r, Stop::Exhausted | Stop::Fixed) => StepOutcome::Determined(r),
            (_, _, Stop::Hit(m)) => StepOutcome::DataDependent(m),
        }
    }

    /// Eventual fate of the radius.
    pub fn limit_behavior(&self, r: &LogRadius) -> Limit {
        if matches!(self.id, CaseId::C3 | CaseId::C8) {
            // everything outside the closed threshold ball is drawn to |a|
            let threshold = self.ab_over_a();
            return match r.cmp(&threshold) {
                std::cmp::Ordering::Less => Limit::FixedAt(r.clone()),
                std::cmp::Ordering::Equal => Limit::Blocked(self.exceptional_radii().remove(0)),
                std::cmp::Ordering::Greater if *r == self.a_norm => Limit::FixedAt(r.clone()),
                std::cmp::Ordering::Greater => Limit::ConvergesTo(self.a_norm.clone()),
            };
        }
        match self.run(r, None) {
            (0, r, Stop::Fixed) => Limit::FixedAt(r),
            (0, _, Stop::Hit(m)) => Limit::Blocked(m),
            (steps, radius, Stop::Fixed) => Limit::ReachesAfter { steps, radius, marker: None },
            (steps, radius, Stop::Hit(m)) => Limit::ReachesAfter { steps, radius, marker: Some(m) },
            (_, _, Stop::Exhausted) => unreachable!("unbounded run"),
        }
    }

    pub fn invariant_set(&self) -> InvariantRadiusSet {
        match self.a_norm.cmp(&self.beta) {
            std::cmp::Ordering::Less => InvariantRadiusSet::I1 { alpha: self.alpha.clone() },
            std::cmp::Ordering::Equal => {
                InvariantRadiusSet::I2 { alpha: self.alpha.clone(), beta: self.beta.clone() }
            }
            std::cmp::Ordering::Greater => InvariantRadiusSet::I3 { bound: self.ab_over_a() },
        }
    }

    /// Membership in B = {α(β/|a|)^(n+1)}, n = 0 or 1 ≤ n < log_{β/|a|}(|a|/α).
    pub fn in_b(&self, r: &LogRadius) -> Result<bool> {
        if self.id != CaseId::C6 {
            return Err(Error::WrongCase { expected: "C6".into() });
        }
        let Some(e) = r.log() else { return Ok(false) };
        let la = self.a_norm.log().unwrap();
        let lal = self.alpha.log().unwrap();
        let step = self.beta.log().unwrap() - la;
        let n = (e - lal) / &step - Rational::from_integer(1.into());
        if !n.is_integer() {
            return Ok(false);
        }
        let zero = Rational::from_integer(0.into());
        let bound = (la - lal) / step;
        Ok(n == zero || (n >= Rational::from_integer(1.into()) && n < bound))
    }
}

pub fn detect_case(f: &CanonicalMap) -> NormCase {
    NormCase::detect(f)
}

pub fn invariant_radii_contains(f: &CanonicalMap, r: &LogRadius) -> bool {
    NormCase::detect(f).invariant_set().contains(r)
}

/// One comparison between a prediction and an exact norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lf2Check {
    /// Index of the orbit point the prediction starts from.
    pub from: usize,
    pub steps: u64,
    pub predicted: StepOutcome,
    pub observed: LogRadius,
    /// For `DataDependent` predictions: whether the observed value meets the marker's bound.
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lf2Report {
    pub case: NormCase,
    pub orbit: Vec<Rational>,
    pub norms: Vec<LogRadius>,
    pub checks: Vec<Lf2Check>,
}

impl Lf2Report {
    pub fn failures(&self) -> impl Iterator<Item = &Lf2Check> {
        self.checks.iter().filter(|c| !c.ok)
    }

    /// Markers met along the orbit with the norm they resolved to.
    pub fn resolved(&self) -> impl Iterator<Item = (&Marker, &LogRadius)> {
        self.checks.iter().filter(|c| c.steps == 1).filter_map(|c| match &c.predicted {
            StepOutcome::DataDependent(m) => Some((m, &c.observed)),
            _ => None,
        })
    }

    pub fn determined_count(&self) -> usize {
        self.checks.iter().filter(|c| matches!(c.predicted, StepOutcome::Determined(_))).count()
    }
}

/// Checks radius predictions against the exact orbit of x for n steps.
pub fn verify_lf2(f: &CanonicalMap, x: &Rational, n: usize) -> Result<Lf2Report> {
    let case = NormCase::detect(f);
    let orbit = f.orbit(x, n)?;
    let norms: Vec<LogRadius> = orbit.iter().map(|y| f.norm(y)).collect();
    let mut checks = Vec::new();
    let judge = |predicted: StepOutcome, observed: &LogRadius| match &predicted {
        StepOutcome::Determined(r) => r == observed,
        StepOutcome::DataDependent(m) => case.marker_bound(m.kind).is_none_or(|b| b.admits(observed)),
    };
    for k in 0..n {
        let predicted = case.predict_step(&norms[k]);
        let ok = judge(predicted.clone(), &norms[k + 1]);
        checks.push(Lf2Check { from: k, steps: 1, predicted, observed: norms[k + 1].clone(), ok });
    }
    for k in 2..=n {
        let predicted = case.predict_n(&norms[0], k as u64);
        let blocked = matches!(predicted, StepOutcome::DataDependent(_));
        if let StepOutcome::Determined(r) = &predicted {
            let ok = *r == norms[k];
            checks.push(Lf2Check { from: 0, steps: k as u64, predicted, observed: norms[k].clone(), ok });
        }
        if blocked {
            break;
        }
    }
    Ok(Lf2Report { case, orbit, norms, checks })
}

//! Fixed-point characters, Siegel disks, basins and repelling balls,
//! pre-pole sphere radii, minimal invariant balls, periodic orbits.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::map::CanonicalMap;
use crate::norm::{CaseId, NormCase};
use crate::padic::{valuation, LogRadius, Rational, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPointKind {
    Indifferent,
    Attractor,
    Repeller,
}

impl FixedPointKind {
    pub fn from_multiplier(v: &Valuation) -> FixedPointKind {
        let zero = Valuation::int(0);
        match v.cmp(&zero) {
            Ordering::Greater => FixedPointKind::Attractor,
            Ordering::Equal => FixedPointKind::Indifferent,
            Ordering::Less => FixedPointKind::Repeller,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FixedPointKind::Indifferent => "indifferent",
            FixedPointKind::Attractor => "attractor",
            FixedPointKind::Repeller => "repeller",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointCharacter {
    /// "x1" or "x2".
    pub which: &'static str,
    pub point: Rational,
    pub kind: FixedPointKind,
    pub derivative_norm: Valuation,
}

/// A radius together with how it is built from |a|, α, β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radius {
    pub value: LogRadius,
    pub form: &'static str,
}

/// Where x₂ sits relative to the Siegel disk of x₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum X2Geometry {
    /// x₂ lies in SI(x₁) and shares it.
    SiegelEqualsX1,
    /// SI(x₂) = U_radius(x₂), disjoint from SI(x₁).
    SiegelDisjointBall(Radius),
    /// Attractor with basin U_radius(x₂).
    BasinBall(Radius),
    /// Attractor with basin the complement of V_threshold(0), up to pre-poles.
    BasinComplement(Radius),
    /// Every x ≠ x₂ in U_radius(x₂) moves away from x₂.
    RepellingBall(Radius),
}

impl X2Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            X2Geometry::SiegelEqualsX1 => "SiegelEqualsX1",
            X2Geometry::SiegelDisjointBall(_) => "SiegelDisjointBall",
            X2Geometry::BasinBall(_) => "BasinBall",
            X2Geometry::BasinComplement(_) => "BasinComplement",
            X2Geometry::RepellingBall(_) => "RepellingBall",
        }
    }

    pub fn radius(&self) -> Option<&Radius> {
        match self {
            X2Geometry::SiegelEqualsX1 => None,
            X2Geometry::SiegelDisjointBall(r)
            | X2Geometry::BasinBall(r)
            | X2Geometry::BasinComplement(r)
            | X2Geometry::RepellingBall(r) => Some(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub case: NormCase,
    pub x2: Rational,
    pub characters: [FixedPointCharacter; 2],
    /// SI(x₁) = U_radius(0).
    pub siegel_x1: Radius,
    pub x2_geometry: X2Geometry,
}

pub fn classify(f: &CanonicalMap) -> Result<ClassificationReport> {
    let case = NormCase::detect(f);
    let (al, be) = (&case.alpha, &case.beta);
    let x2 = f.x2();
    let x2_norm = f.norm(&x2);
    let d = f.d_norm();
    let alpha = || Radius { value: al.clone(), form: "alpha" };
    let beta = || Radius { value: be.clone(), form: "beta" };
    let threshold = Radius {
        value: case.ab_over_a(),
        form: if case.id == CaseId::C3 { "alpha^2/|a|" } else { "alpha*beta/|a|" },
    };
    let alpha_sq = al.powi(2);
    let boundary = |what: &str| Err(Error::UnhandledBoundary(format!("{}: {}", case.id, what)));

    let geometry = match case.id {
        CaseId::C1 => {
            if d < *al {
                X2Geometry::SiegelEqualsX1
            } else {
                let m = f.norm(&(f.b() + &x2 * f.d()));
                if m < alpha_sq {
                    X2Geometry::BasinBall(alpha())
                } else {
                    X2Geometry::SiegelDisjointBall(alpha())
                }
            }
        }
        CaseId::C2 => {
            if d < *al {
                let m = f.norm(&(f.b() + &x2 * f.a()));
                if m < alpha_sq {
                    X2Geometry::RepellingBall(alpha())
                } else {
                    X2Geometry::SiegelDisjointBall(alpha())
                }
            } else if x2_norm < *al {
                X2Geometry::SiegelEqualsX1
            } else {
                return boundary("|d| = alpha and |a-d| = alpha");
            }
        }
        CaseId::C3 | CaseId::C8 => X2Geometry::BasinComplement(threshold.clone()),
        CaseId::C4 | CaseId::C5 | CaseId::C6 => X2Geometry::RepellingBall(beta()),
        CaseId::C7 => match x2_norm.cmp(al) {
            Ordering::Less => X2Geometry::SiegelEqualsX1,
            Ordering::Greater => X2Geometry::SiegelDisjointBall(Radius { value: x2_norm.clone(), form: "|a-d|" }),
            Ordering::Equal => return boundary("|a-d| = alpha"),
        },
    };

    let siegel_x1 = match case.id {
        CaseId::C3 | CaseId::C8 => threshold,
        _ => alpha(),
    };
    let x2_mult = valuation(&f.x2_multiplier(), f.p());
    let characters = [
        FixedPointCharacter {
            which: "x1",
            point: Rational::from_integer(0.into()),
            kind: FixedPointKind::Indifferent,
            derivative_norm: f.derivative_norm(&Rational::from_integer(0.into()))?,
        },
        FixedPointCharacter {
            which: "x2",
            point: x2.clone(),
            kind: FixedPointKind::from_multiplier(&x2_mult),
            derivative_norm: x2_mult,
        },
    ];
    Ok(ClassificationReport { case, x2, characters, siegel_x1, x2_geometry: geometry })
}

/// r_k = α(α/|a|)^((2^k - 1)/2^k): the sphere carrying the k-th pre-images of the poles.
pub fn pk_radius(f: &CanonicalMap, k: u32) -> Result<LogRadius> {
    let case = NormCase::detect(f);
    if case.id != CaseId::C3 {
        return Err(Error::WrongCase { expected: "C3".into() });
    }
    assert!(k < 63, "k too large");
    let two_k = 1i64 << k;
    let frac = Rational::new((two_k - 1).into(), two_k.into());
    Ok(&case.alpha * &(&case.alpha / &case.a_norm).pow_q(&frac))
}

/// Which branch of the displacement table applies on S_r(0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisplacementRow {
    /// r ∈ I₁, α < β: r²/α
    I1Split,
    /// r ∈ I₁, |a-d| = α = β: r²/α
    I1DiffAtAlpha,
    /// r ∈ I₁, |a-d| < α = β, r < |a-d|: r²|a-d|/α²
    I1BelowDiff,
    /// r ∈ I₁, |a-d| < α = β, r > |a-d|: r³/α²
    I1AboveDiff,
    /// r ∈ I₂, r < α, r < |a-d|: r²|a-d|/(αβ)
    I2LowBelowDiff,
    /// r ∈ I₂, r < α, r > |a-d|: r³/(αβ)
    I2LowAboveDiff,
    /// r ∈ I₂, α < r, r < |a-d|: r|a-d|/β
    I2HighBelowDiff,
    /// r ∈ I₂, α < r, r > |a-d|: r²/β
    I2HighAboveDiff,
    /// r ∈ I₃: |a|r²/(αβ)
    I3,
}

impl DisplacementRow {
    pub fn formula(self) -> &'static str {
        use DisplacementRow::*;
        match self {
            I1Split | I1DiffAtAlpha => "r^2/alpha",
            I1BelowDiff => "r^2|a-d|/alpha^2",
            I1AboveDiff => "r^3/alpha^2",
            I2LowBelowDiff => "r^2|a-d|/(alpha*beta)",
            I2LowAboveDiff => "r^3/(alpha*beta)",
            I2HighBelowDiff => "r|a-d|/beta",
            I2HighAboveDiff => "r^2/beta",
            I3 => "|a|r^2/(alpha*beta)",
        }
    }
}

/// ρ_r = |f(c) - c|_p for every c on S_r(0), r ∈ I, r ≠ |a-d|_p.
pub fn rho_r(f: &CanonicalMap, r: &LogRadius) -> Result<(LogRadius, DisplacementRow)> {
    use crate::norm::InvariantRadiusSet as I;
    use DisplacementRow::*;
    let case = NormCase::detect(f);
    let set = case.invariant_set();
    if !set.contains(r) {
        return Err(Error::NotInvariant);
    }
    let diff = f.norm(&f.x2());
    if *r == diff {
        return Err(Error::ExceptionalRadius);
    }
    let (a, al, be) = (&case.a_norm, &case.alpha, &case.beta);
    let ab = al * be;
    let row = match set {
        I::I1 { .. } if al < be => I1Split,
        I::I1 { .. } if diff == *al => I1DiffAtAlpha,
        I::I1 { .. } if *r < diff => I1BelowDiff,
        I::I1 { .. } => I1AboveDiff,
        I::I2 { .. } if r < al && *r < diff => I2LowBelowDiff,
        I::I2 { .. } if r < al => I2LowAboveDiff,
        I::I2 { .. } if *r < diff => I2HighBelowDiff,
        I::I2 { .. } => I2HighAboveDiff,
        I::I3 { .. } => I3,
    };
    let value = match row {
        I1Split | I1DiffAtAlpha => &r.powi(2) / al,
        I1BelowDiff => &(&r.powi(2) * &diff) / &al.powi(2),
        I1AboveDiff => &r.powi(3) / &al.powi(2),
        I2LowBelowDiff => &(&r.powi(2) * &diff) / &ab,
        I2LowAboveDiff => &r.powi(3) / &ab,
        I2HighBelowDiff => &(r * &diff) / be,
        I2HighAboveDiff => &r.powi(2) / be,
        I3 => &(a * &r.powi(2)) / &ab,
    };
    Ok((value, row))
}

/// The smallest closed ball around c that f maps onto itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalBallRecord {
    pub center: Rational,
    pub r: LogRadius,
    pub rho_r: LogRadius,
    pub row: DisplacementRow,
}

impl MinimalBallRecord {
    /// |f^(n+1)(c) - f^n(c)|_p for n = 0..depth.
    pub fn displacements(&self, f: &CanonicalMap, depth: usize) -> Result<Vec<LogRadius>> {
        let orbit = f.orbit(&self.center, depth + 1)?;
        Ok(orbit.windows(2).map(|w| f.norm(&(&w[1] - &w[0]))).collect())
    }
}

pub fn minimal_invariant_ball(f: &CanonicalMap, c: &Rational) -> Result<MinimalBallRecord> {
    let r = f.norm(c);
    if r.is_zero() {
        return Err(Error::NotInvariant);
    }
    let (rho, row) = rho_r(f, &r)?;
    Ok(MinimalBallRecord { center: c.clone(), r, rho_r: rho, row })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<Rational>,
    /// |(f^k)'| at the orbit points (the same at each by the chain rule).
    pub multiplier_norm: Valuation,
}

impl PeriodicOrbit {
    pub fn indifferent(&self) -> bool {
        self.multiplier_norm == Valuation::int(0)
    }
}

/// Smallest k ≤ kmax with f^k(x) = x.
pub fn find_periodic(f: &CanonicalMap, x: &Rational, kmax: usize) -> Result<Option<PeriodicOrbit>> {
    let mut points = vec![x.clone()];
    for k in 1..=kmax {
        let next = f.eval(points.last().unwrap()).map_err(|_| Error::PoleHit { step: k })?;
        if next == *x {
            let mut mult = Valuation::int(0);
            for y in &points {
                mult = mult + f.derivative_norm(y)?;
            }
            return Ok(Some(PeriodicOrbit { period: k, points, multiplier_norm: mult }));
        }
        points.push(next);
    }
    Ok(None)
}

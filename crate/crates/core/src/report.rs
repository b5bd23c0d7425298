//! JSON documents for reports. Radii print as "p^(e)" and rationals as "n/d",
//! both of which parse back to equal values.

use serde_json::{json, Map, Value};

use crate::classify::{ClassificationReport, MinimalBallRecord, PeriodicOrbit, Radius};
use crate::ergodic::{CriterionVerdict, EquidistributionReport, ErgodicityVerdict, InvariantBall, UnitSphereMap};
use crate::error::Error;
use crate::map::{CanonicalMap, ConjugacyRecord, Preimage};
use crate::norm::{Limit, Marker, NormCase, StepOutcome};
use crate::padic::{LogRadius, Prime, Rational, Valuation};
use crate::suites::SuiteReport;

pub fn rational(x: &Rational) -> Value {
    Value::String(x.to_string())
}

pub fn radius(r: &LogRadius, p: Prime) -> Value {
    Value::String(r.format(p))
}

pub fn valuation(v: &Valuation) -> Value {
    Value::String(v.to_string())
}

fn named_radius(r: &Radius, p: Prime) -> Value {
    json!({ "radius": radius(&r.value, p), "form": r.form })
}

pub fn marker(m: &Marker, p: Prime) -> Value {
    json!({ "marker": m.label(), "bound": radius(&m.radius, p) })
}

pub fn step_outcome(s: &StepOutcome, p: Prime) -> Value {
    match s {
        StepOutcome::Determined(r) => json!({ "determined": radius(r, p) }),
        StepOutcome::DataDependent(m) => json!({ "data_dependent": marker(m, p) }),
    }
}

pub fn map(f: &CanonicalMap) -> Value {
    json!({
        "a": rational(f.a()),
        "b": rational(f.b()),
        "d": rational(f.d()),
        "p": f.p().get(),
    })
}

pub fn norm_case(c: &NormCase, p: Prime) -> Value {
    json!({
        "id": c.id.to_string(),
        "a_norm": radius(&c.a_norm, p),
        "alpha": radius(&c.alpha, p),
        "beta": radius(&c.beta, p),
    })
}

pub fn conjugacy(rec: &ConjugacyRecord) -> Value {
    json!({
        "shift": rational(&rec.shift),
        "simple_root": rational(&rec.simple_root),
        "canonical": map(&rec.canonical),
    })
}

pub fn classification(rep: &ClassificationReport, p: Prime) -> Value {
    let chars: Vec<Value> = rep
        .characters
        .iter()
        .map(|c| {
            json!({
                "which": c.which,
                "point": rational(&c.point),
                "kind": c.kind.name(),
                "derivative_norm": radius(&c.derivative_norm.to_radius(), p),
            })
        })
        .collect();
    let mut geo = Map::new();
    geo.insert("kind".into(), rep.x2_geometry.name().into());
    if let Some(r) = rep.x2_geometry.radius() {
        geo.insert("radius".into(), radius(&r.value, p));
        geo.insert("form".into(), r.form.into());
    }
    json!({
        "case": norm_case(&rep.case, p),
        "x2": rational(&rep.x2),
        "characters": chars,
        "siegel_x1": named_radius(&rep.siegel_x1, p),
        "x2_geometry": Value::Object(geo),
    })
}

pub fn limit(l: &Limit, p: Prime) -> Value {
    match l {
        Limit::FixedAt(r) => json!({ "fixed_at": radius(r, p) }),
        Limit::ConvergesTo(r) => json!({ "converges_to": radius(r, p) }),
        Limit::ReachesAfter { steps, radius: r, marker: m } => json!({
            "reaches": radius(r, p),
            "steps": steps,
            "marker": m.as_ref().map(|m| marker(m, p)),
        }),
        Limit::Blocked(m) => json!({ "blocked": marker(m, p) }),
    }
}

pub fn preimage(x: &Preimage, p: Prime) -> Value {
    match x {
        Preimage::Rational(v) => json!({ "kind": "rational", "value": rational(v), "norm": radius(&x.norm(p), p) }),
        Preimage::Padic(r) => json!({
            "kind": "padic",
            "valuation": r.valuation,
            "unit": r.unit.residue().to_string(),
            "digits": r.unit.precision(),
            "norm": radius(&x.norm(p), p),
        }),
        Preimage::NotInField { norm } => json!({ "kind": "not_in_field", "norm": radius(norm, p) }),
    }
}

pub fn minimal_ball(b: &MinimalBallRecord, p: Prime) -> Value {
    json!({
        "center": rational(&b.center),
        "r": radius(&b.r, p),
        "rho_r": radius(&b.rho_r, p),
        "row": b.row.formula(),
    })
}

pub fn periodic(o: &PeriodicOrbit, p: Prime) -> Value {
    json!({
        "period": o.period,
        "points": o.points.iter().map(rational).collect::<Vec<_>>(),
        "multiplier_norm": radius(&o.multiplier_norm.to_radius(), p),
        "indifferent": o.indifferent(),
    })
}

pub fn invariant_ball(w: &InvariantBall, p: Prime) -> Value {
    json!({
        "center": rational(&w.center),
        "r": radius(&w.r, p),
        "rho": radius(&w.rho, p),
        "measure": rational(&w.measure),
    })
}

pub fn unit_sphere_map(g: &UnitSphereMap) -> Value {
    json!({
        "l": g.l,
        "numerator": g.num.iter().map(rational).collect::<Vec<_>>(),
        "denominator": g.den.iter().map(rational).collect::<Vec<_>>(),
        "direct": g.direct,
    })
}

pub fn criterion(c: &CriterionVerdict) -> Value {
    let s = c.signature;
    json!({
        "ergodic": c.ergodic,
        "signature": { "A1": s.a1, "A2": s.a2, "B1": s.b1, "B2": s.b2 },
        "condition": c.condition.map(|(k, _)| k),
        "interchanged": c.condition.map(|(_, swapped)| swapped),
    })
}

pub fn verdict(v: &ErgodicityVerdict) -> Value {
    json!({
        "ergodic": v.ergodic,
        "condition": v.condition.map(|c| c.index()),
        "reason": v.reason,
        "criterion": criterion(&v.criterion),
        "direct_conjugate": v.direct_conjugate,
        "agrees": v.agrees,
        "poles_in_qp": v.poles_in_qp,
    })
}

pub fn histogram(h: &EquidistributionReport) -> Value {
    json!({
        "depth": h.depth,
        "steps": h.steps,
        "start": h.start.to_string(),
        "lines": h.lines(),
        "unvisited": h.unvisited(),
        "max_relative_deviation": rational(&h.max_relative_deviation()),
    })
}

pub fn suite(s: &SuiteReport) -> Value {
    json!({
        "suite": s.suite,
        "passed": s.passed(),
        "checks": s.checks,
        "failures": s.failures,
        "notes": s.notes,
    })
}

pub fn error(e: &Error) -> Value {
    let mut m = Map::new();
    m.insert("error".into(), e.name().into());
    m.insert("message".into(), e.to_string().into());
    if let Error::PoleHit { step } = e {
        m.insert("step".into(), (*step).into());
    }
    Value::Object(m)
}

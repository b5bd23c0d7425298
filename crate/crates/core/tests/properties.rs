use num_traits::{Signed, Zero};
use proptest::prelude::*;

use padyn::classify::rho_r;
use padyn::map::{canonicalize, CanonicalMap, GeneralMap};
use padyn::norm::{Limit, MarkerKind, NormCase, StepOutcome};
use padyn::padic::{hensel_sqrt, norm, quad_root_norms, valuation, LogRadius, Prime, Rational, TruncatedPadicInt};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..1_000_000, 1i64..2000, -6i32..6).prop_map(|(n, d, e)| {
        let base = q(n, d);
        if e >= 0 {
            base * q(6i64.pow(e as u32), 1)
        } else {
            base / q(6i64.pow((-e) as u32), 1)
        }
    })
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn exponent() -> impl Strategy<Value = Rational> {
    (-24i64..24, prop::sample::select(vec![1i64, 1, 1, 2, 3, 4])).prop_map(|(n, d)| q(n, d))
}

/// A point with |x|_p = p^k.
fn on_sphere(p: Prime, k: i64, u: &Rational) -> Rational {
    p.pow(-k) * u
}

fn unit_for(p: Prime, n: i64, d: i64) -> Rational {
    let fix = |m: i64| if m % p.get() as i64 == 0 { m + 1 } else { m };
    q(fix(n), fix(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn valuation_is_multiplicative(p in prime(), x in rational(), y in rational()) {
        prop_assert_eq!(valuation(&(&x * &y), p), valuation(&x, p) + valuation(&y, p));
        prop_assert_eq!(norm(&(&x * &y), p), &norm(&x, p) * &norm(&y, p));
    }

    #[test]
    fn valuation_is_ultrametric(p in prime(), x in rational(), y in rational()) {
        let (vx, vy, vs) = (valuation(&x, p), valuation(&y, p), valuation(&(&x + &y), p));
        let m = vx.clone().min(vy.clone());
        prop_assert!(vs >= m);
        if vx != vy {
            prop_assert_eq!(vs, m);
        }
    }

    #[test]
    fn hensel_roots_square_back(p in prime(), y in nonzero(), noise in nonzero(), n in 4u32..40) {
        for x in [&y * &y, &y * &y + noise] {
            let Ok(root) = hensel_sqrt(&x, p, n) else { continue };
            let u = &root.unit_root;
            let k = u.precision();
            let unit = &x * p.pow(-2 * root.half_valuation);
            let target = TruncatedPadicInt::from_rational(&unit, p, k).unwrap();
            prop_assert_eq!(u.mul(u), target);
        }
    }

    #[test]
    fn root_norms_match_factors(p in prime(), r1 in nonzero(), r2 in nonzero()) {
        let d = -(&r1 + &r2);
        let b = &r1 * &r2;
        let (lo, hi) = quad_root_norms(&d, &b, p).unwrap();
        let mut expect = [norm(&r1, p), norm(&r2, p)];
        expect.sort();
        prop_assert_eq!([lo, hi], expect);
    }

    #[test]
    fn conjugacy_round_trip(
        p in prime(), a in nonzero(), b in nonzero(), d in rational(), s in rational(), xs in prop::collection::vec(rational(), 1..12)
    ) {
        let Ok(f) = CanonicalMap::new(a.clone(), b.clone(), d.clone(), p) else { return Ok(()) };
        // g(x) = s + f(x - s)
        let two = q(2, 1);
        let ga = &a + &s;
        let gb = &s * (&d - &s * &two) + &b - &a * &s * &two;
        let gc = &s * &s * &s - &d * &s * &s + &a * &s * &s;
        let gd = &d - &s * &two;
        let ge = &s * &s - &d * &s + &b;
        let g = GeneralMap::new(ga, gb, gc, gd, ge, p).unwrap();
        let rec = canonicalize(&g).unwrap();
        prop_assert_eq!(&rec.shift, &s);
        prop_assert_eq!(&rec.canonical, &f);
        for x in xs {
            match (g.eval(&x), rec.canonical.eval(&(&x - &rec.shift))) {
                (Ok(gx), Ok(fx)) => prop_assert_eq!(gx, &rec.shift + fx),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "pole mismatch {:?}", other),
            }
        }
    }

    #[test]
    fn norm_identity(p in prime(), u in nonzero(), v in nonzero(), a in nonzero(), x in nonzero()) {
        let Ok(f) = CanonicalMap::new(a.clone(), &u * &v, -(&u + &v), p) else { return Ok(()) };
        let Ok(fx) = f.eval(&x) else { return Ok(()) };
        let n = |y: &Rational| norm(y, p);
        let rhs = &(&n(&x) * &n(&(&a * &x + f.b()))) / &(&n(&(&x - &u)) * &n(&(&x - &v)));
        prop_assert_eq!(n(&fx), rhs);
    }

    #[test]
    fn norm_identity_from_pole_norms(p in prime(), a in nonzero(), b in nonzero(), d in rational(), x in nonzero()) {
        let Ok(f) = CanonicalMap::new(a.clone(), b.clone(), d, p) else { return Ok(()) };
        let r = norm(&x, p);
        if r == *f.alpha() || r == *f.beta() {
            return Ok(());
        }
        let Ok(fx) = f.eval(&x) else { return Ok(()) };
        let below = &r.clone().max(f.alpha().clone()) * &r.clone().max(f.beta().clone());
        prop_assert_eq!(norm(&fx, p), &(&r * &norm(&(&a * &x + &b), p)) / &below);
    }

    #[test]
    fn predict_n_is_composition(la in exponent(), gap in exponent(), l_a in exponent(), lr in exponent(), n in 1u64..10) {
        let (alpha, beta) = (LogRadius::pow(la.clone()), LogRadius::pow(&la + gap.abs()));
        let case = NormCase::from_radii(LogRadius::pow(l_a), alpha, beta);
        let r = LogRadius::pow(lr);
        let mut cur = StepOutcome::Determined(r.clone());
        for _ in 0..n {
            if let StepOutcome::Determined(s) = &cur {
                cur = case.predict_step(s);
            }
        }
        prop_assert_eq!(case.predict_n(&r, n), cur);
    }

    #[test]
    fn b_set_matches_trajectory(la in exponent(), s1 in 1i64..12, s2 in 1i64..12, t in 1i64..400) {
        // α < |a| < β, r strictly between α and β
        let alpha = la.clone();
        let a = &la + q(s1, 2);
        let beta = &a + q(s2, 2);
        let lr = &alpha + (&beta - &alpha) * q(t, 401);
        let case = NormCase::from_radii(LogRadius::pow(a), LogRadius::pow(alpha), LogRadius::pow(beta));
        let r = LogRadius::pow(lr);
        let hits_a_breve = match case.limit_behavior(&r) {
            Limit::Blocked(m) => m.kind == MarkerKind::ABreve,
            Limit::ReachesAfter { marker: Some(m), .. } => m.kind == MarkerKind::ABreve,
            _ => false,
        };
        prop_assert_eq!(case.in_b(&r).unwrap(), hits_a_breve);
    }

    #[test]
    fn isometry_on_invariant_balls(
        p in prime(), a in nonzero(), b in nonzero(), d in rational(),
        depth in 0i64..4, m in 0i64..5, un in 1i64..100_000, ud in 1i64..500, vn in 1i64..100_000, vd in 1i64..500
    ) {
        let Ok(f) = CanonicalMap::new(a, b, d, p) else { return Ok(()) };
        let set = NormCase::detect(&f).invariant_set();
        let top = set.upper().log().unwrap().ceil().to_integer();
        let top: i64 = i64::try_from(top).unwrap() - 1 - depth;
        let r = LogRadius::p_pow(top);
        if !set.contains(&r) {
            return Ok(());
        }
        let c = on_sphere(p, top, &unit_for(p, un, ud));
        let x = &c + on_sphere(p, top - m, &unit_for(p, vn, vd));
        let (fx, fc) = (f.eval(&x).unwrap(), f.eval(&c).unwrap());
        prop_assert_eq!(norm(&(fx - fc), p), norm(&(&x - &c), p));
        prop_assert_eq!(f.norm(&f.eval(&c).unwrap()), r.clone());
        prop_assert!(f.derivative_norm(&c).unwrap() == padyn::Valuation::int(0));
        if r != f.norm(&f.x2()) {
            let (rho, _) = rho_r(&f, &r).unwrap();
            prop_assert_eq!(f.displacement_norm(&c).unwrap().to_radius(), rho);
        }
    }
}

#[test]
fn conjugacy_example() {
    let p = Prime::new(3).unwrap();
    let g = GeneralMap::new(q(4, 1), q(-7, 1), q(4, 1), q(-2, 1), q(2, 1), p).unwrap();
    let rec = canonicalize(&g).unwrap();
    assert_eq!(rec.shift, q(1, 1));
    assert_eq!(rec.canonical, CanonicalMap::new(q(3, 1), q(1, 1), q(0, 1), p).unwrap());
    assert_eq!(rec.simple_root, q(4, 1));
}

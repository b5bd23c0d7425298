use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use padyn::classify::{find_periodic, pk_radius, rho_r};
use padyn::ergodic::{
    conjugate_to_unit_sphere, erg2_verdict, haar_measure, not_ergodic_p_odd, simulate_residues, unit_sphere_form,
    SphereMeasureContext, UnitSphereMap,
};
use padyn::map::{CanonicalMap, Preimage};
use padyn::padic::{norm, LogRadius, Prime, Rational};
use padyn::suites::{erg_combinations, periodic_seeds, two_cycle_map, Sampler};
use padyn::Error;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn map(a: Rational, b: Rational, d: Rational, p: u64) -> CanonicalMap {
    CanonicalMap::new(a, b, d, prime(p)).unwrap()
}

// x mod m for a rational with denominator prime to m
fn residue(x: &Rational, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let den = x.denom().mod_floor(&mb);
    let g = den.extended_gcd(&mb);
    if !g.gcd.is_one() {
        return None;
    }
    let r = (x.numer().mod_floor(&mb) * g.x).mod_floor(&mb);
    r.to_u64()
}

fn poly_mod(c: &[u64], t: u64, m: u64) -> u64 {
    c.iter().rev().fold(0u128, |acc, &x| (acc * t as u128 + x as u128) % m as u128) as u64
}

fn inv_mod(x: u64, m: u64) -> Option<u64> {
    residue(&Rational::new(BigInt::one(), BigInt::from(x)), m)
}

// t ↦ num(t)/den(t) on units mod p^k; None when it fails to be a permutation
fn unit_permutation(g: &UnitSphereMap, p: u64, k: u32) -> Option<Vec<u64>> {
    let m = p.pow(k);
    let num: Option<Vec<u64>> = g.num.iter().map(|c| residue(c, m)).collect();
    let den: Option<Vec<u64>> = g.den.iter().map(|c| residue(c, m)).collect();
    let (num, den) = (num?, den?);
    let mut perm = vec![u64::MAX; m as usize];
    for t in (0..m).filter(|t| t % p != 0) {
        let d = inv_mod(poly_mod(&den, t, m), m)?;
        let y = (poly_mod(&num, t, m) as u128 * d as u128 % m as u128) as u64;
        if y.is_multiple_of(p) {
            return None;
        }
        perm[t as usize] = y;
    }
    Some(perm)
}

fn orbit_length(perm: &[u64], start: u64) -> usize {
    let mut n = 1;
    let mut t = perm[start as usize];
    while t != start {
        t = perm[t as usize];
        n += 1;
    }
    n
}

// a single cycle through all units mod p^k, for every k ≤ kmax
fn transitive(g: &UnitSphereMap, p: u64, kmax: u32) -> Option<bool> {
    for k in 1..=kmax {
        let perm = unit_permutation(g, p, k)?;
        let units = (p - 1) * p.pow(k - 1);
        if orbit_length(&perm, 1) as u64 != units {
            return Some(false);
        }
    }
    Some(true)
}

#[test]
fn verdicts_match_transitivity() {
    let (mut checked, mut positive) = (0, 0);
    for (f, r) in erg_combinations() {
        let v = erg2_verdict(&f, &r).unwrap();
        let g = unit_sphere_form(&f, &r).unwrap();
        let Some(tr) = transitive(&g, 2, 8) else { continue };
        assert_eq!(v.criterion.ergodic, tr, "criterion ({},{},{}) r={}", f.a(), f.b(), f.d(), r.format(f.p()));
        if v.poles_in_qp {
            assert_eq!(v.ergodic, tr, "conditions ({},{},{}) r={}", f.a(), f.b(), f.d(), r.format(f.p()));
        }
        checked += 1;
        positive += tr as usize;
    }
    assert!(checked >= 100 && positive >= 20, "{} checked, {} ergodic", checked, positive);
}

#[test]
fn conditions_fail_without_pole_square_root() {
    // d² - 4b = 13 is not a square in Q_2
    let f = map(q(5, 1), q(-3, 1), q(1, 1), 2);
    let r = LogRadius::p_pow(-1);
    let v = erg2_verdict(&f, &r).unwrap();
    assert!(!v.poles_in_qp);
    assert!(v.ergodic && !v.criterion.ergodic);
    assert_eq!(transitive(&unit_sphere_form(&f, &r).unwrap(), 2, 6), Some(false));
}

#[test]
fn measure_by_counting_residues() {
    for p in [2u64, 3, 5] {
        for r in [0i64, -1, -3] {
            for depth in 0..4i64 {
                let rho = r - depth;
                let ctx = SphereMeasureContext { p: prime(p), r: LogRadius::p_pow(r) };
                let mu = haar_measure(&ctx, &LogRadius::p_pow(rho));
                if depth == 0 {
                    // V_r(c) holds all of S_r(0) and more
                    assert_eq!(mu, Err(Error::BallExceedsSphere));
                    continue;
                }
                // x = p^(-r) u lies in V_rho(c) iff u ≡ u_c mod p^(r - rho)
                let m = p.pow(depth as u32);
                let classes = (0..m).filter(|u| u % p != 0).count();
                assert_eq!(mu.unwrap(), q(1, classes as i64), "p={} r={} rho={}", p, r, rho);
            }
        }
    }
    let ctx = SphereMeasureContext { p: prime(3), r: LogRadius::p_pow(0) };
    assert_eq!(haar_measure(&ctx, &LogRadius::pow(q(-1, 2))), Err(Error::NotIntegerPower));
}

#[test]
fn simulator_agrees_with_exact_iteration() {
    let mut s = Sampler::new(5);
    let cases = [
        (map(q(4, 1), q(8, 1), q(-6, 1), 2), -3),
        (map(q(4, 1), q(8, 1), q(-6, 1), 2), -4),
        (map(q(3, 1), q(1, 1), q(0, 1), 3), -2),
        (map(q(2, 1), q(1, 1), q(0, 1), 5), -1),
        (map(q(1, 2), q(8, 1), q(-6, 1), 2), -5),
    ];
    for (f, l) in cases {
        let p = f.p();
        let g = unit_sphere_form(&f, &LogRadius::p_pow(l)).unwrap();
        for _ in 0..5 {
            let t0 = s.unit(p);
            let k = 6;
            let sim = simulate_residues(&g, &t0, 10, 40, k).unwrap();
            let mut t = t0.clone();
            let m = p.get().pow(k);
            for (n, got) in sim.iter().enumerate() {
                assert_eq!(got.to_u64().unwrap(), residue(&t, m).unwrap(), "step {}", n);
                t = g.eval(&t).unwrap();
                // the conjugate agrees with f on the sphere
                assert!(norm(&t, p) == LogRadius::one());
            }
        }
    }
}

#[test]
fn conjugate_tracks_the_map() {
    let f = map(q(4, 1), q(8, 1), q(-6, 1), 2);
    let g = conjugate_to_unit_sphere(&f, &LogRadius::p_pow(-3)).unwrap();
    let s = prime(2).pow(3);
    for t in [q(1, 1), q(3, 5), q(-7, 3), q(129, 17)] {
        assert_eq!(f.eval(&(&t * &s)).unwrap() / &s, g.eval(&t).unwrap());
    }
}

#[test]
fn two_cycles_map_balls_to_balls() {
    let mut s = Sampler::new(9);
    for (u, w, a, p) in periodic_seeds() {
        let f = two_cycle_map(&u, &w, &a, prime(p)).unwrap();
        assert_eq!(f.eval(&u).unwrap(), w);
        assert_eq!(f.eval(&w).unwrap(), u);
        let orb = find_periodic(&f, &u, 5).unwrap().unwrap();
        assert_eq!(orb.period, 2);
        assert!(orb.indifferent());
        let r = f.norm(&u);
        let (rho, _) = rho_r(&f, &r).unwrap();
        assert_eq!(f.norm(&(&u - &w)), rho);
        for j in 0..4 {
            let k = rho.int_log().unwrap() - j;
            for _ in 0..10 {
                let x = &u + s.on_sphere(prime(p), k);
                assert_eq!(f.norm(&(f.eval(&x).unwrap() - &w)), LogRadius::p_pow(k));
            }
        }
    }
}

#[test]
fn pre_poles_sit_on_first_sphere() {
    let f = map(q(1, 9), q(-1, 1), q(0, 1), 3);
    let r1 = pk_radius(&f, 1).unwrap();
    assert_eq!(r1, LogRadius::p_pow(-1));
    for pole in [q(1, 1), q(-1, 1)] {
        let pre = f.solve_preimage(&pole, 32).unwrap();
        assert_eq!(pre.len(), 2);
        for x in &pre {
            assert_eq!(x.norm(f.p()), r1);
            if let Preimage::Rational(x) = x {
                assert!(matches!(f.orbit(x, 2), Err(Error::PoleHit { step: 2 })));
            }
        }
    }
}

#[test]
fn odd_prime_witness_is_invariant() {
    let mut s = Sampler::new(3);
    for (f, l) in [(map(q(3, 1), q(1, 1), q(0, 1), 3), -2), (map(q(2, 1), q(1, 1), q(0, 1), 5), -1)] {
        let p = f.p();
        let w = not_ergodic_p_odd(&f, &LogRadius::p_pow(l)).unwrap();
        assert!(w.measure <= q(1, p.get() as i64 - 1));
        let k = w.rho.int_log().unwrap();
        for _ in 0..20 {
            let j = s.rng().gen_range(0..3);
            let x = &w.center + s.on_sphere(p, k - j);
            let y = f.eval(&x).unwrap();
            assert!(f.norm(&(&y - &w.center)) <= w.rho);
        }
    }
}

// On S_1(0) for (1/3, 3, -28/3) over Q_3 the displacement equals r, so no
// proper invariant ball exists around a point, yet the orbit mod 9 misses units.
#[test]
fn odd_prime_gap_at_upper_sphere() {
    let f = map(q(1, 3), q(3, 1), q(-28, 3), 3);
    let r = LogRadius::one();
    assert_eq!(f.norm(&f.x2()), *f.beta());
    assert!(r > *f.alpha() && r < *f.beta());
    assert_eq!(f.displacement_norm(&q(1, 1)).unwrap().to_radius(), r);
    assert_eq!(not_ergodic_p_odd(&f, &r), Err(Error::BallExceedsSphere));
    let g = unit_sphere_form(&f, &r).unwrap();
    let perm = unit_permutation(&g, 3, 2).unwrap();
    let orbit = orbit_length(&perm, 1);
    assert!(orbit < 6);
    assert_eq!(transitive(&g, 3, 2), Some(false));
}

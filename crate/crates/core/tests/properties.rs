use num_traits::{One, Zero};
use proptest::prelude::*;

use koch_billiards::billiard::{reverse_state, run_orbit, Direction, InitialCondition};
use koch_billiards::compat::{build_sequence, family_grid, family_seed, Tower};
use koch_billiards::exact::{
    int, lattice_dot, rat, reflect_direction, rotate60, to_cartesian, LatticeDir, LatticeVector, Rational, Rotation,
    SideOrientation,
};
use koch_billiards::prefractal::{build_prefractal, BoundaryPoint, PointLocation};
use koch_billiards::ternary::{classify, expand, is_ternary_rational, CharSet};

fn small_vector() -> impl Strategy<Value = LatticeVector> {
    (-1000i64..=1000, 1i64..=50, -1000i64..=1000, 1i64..=50)
        .prop_map(|(an, ad, bn, bd)| LatticeVector::new(rat(an, ad), rat(bn, bd)))
}

fn orientation() -> impl Strategy<Value = SideOrientation> {
    prop::sample::select(SideOrientation::ALL.to_vec())
}

fn unit_fraction(max_den: i64) -> impl Strategy<Value = Rational> {
    (2i64..=max_den).prop_flat_map(|d| (1..d).prop_map(move |n| rat(n, d)))
}

/// Membership in the middle-thirds Cantor set by removing open middle
/// thirds down to `depth` levels.
fn cantor_oracle(t: &Rational, depth: u32) -> bool {
    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let mut x = t.clone();
    for _ in 0..depth {
        if x == third || x == two_thirds || x.is_zero() || x.is_one() {
            return true;
        }
        if x < third {
            x *= int(3);
        } else if x > two_thirds {
            x = x * int(3) - int(2);
        } else {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn lattice_norm_is_positive_definite(v in small_vector()) {
        let n = lattice_dot(&v, &v);
        prop_assert!(n >= Rational::zero());
        prop_assert_eq!(n.is_zero(), v.is_zero());
    }

    #[test]
    fn reflections_and_rotations_are_isometries(v in small_vector(), o in orientation()) {
        let n = lattice_dot(&v, &v);
        let r = reflect_direction(&v, o);
        prop_assert_eq!(lattice_dot(&r, &r), n.clone());
        prop_assert_eq!(reflect_direction(&r, o), v.clone());
        let mut w = v.clone();
        for _ in 0..6 {
            w = rotate60(&w, Rotation::Ccw);
            prop_assert_eq!(lattice_dot(&w, &w), n.clone());
        }
        prop_assert_eq!(&w, &v);
        prop_assert_eq!(rotate60(&rotate60(&v, Rotation::Ccw), Rotation::Cw), v);
    }

    #[test]
    fn cartesian_agrees_with_lattice_dot(a in -1_000_000i64..=1_000_000, b in -1_000_000i64..=1_000_000) {
        prop_assume!(a != 0 || b != 0);
        let v = LatticeVector::from_ints(a, b);
        let (x, y) = to_cartesian(&v);
        let exact = (a * a + b * b + a * b) as f64;
        prop_assert!(((x * x + y * y) - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn expansion_round_trips(t in unit_fraction(2_000)) {
        let e = expand(&t).unwrap();
        prop_assert_eq!(e.value(), t.clone());
        prop_assert!(e.period != vec![0]);
    }

    #[test]
    fn ternary_rationals_end_in_r((m, d) in (1u32..=12).prop_flat_map(|k| {
        let d = 3i64.pow(k);
        ((0..d / 3).prop_flat_map(|q| (1i64..=2).prop_map(move |j| 3 * q + j)), Just(d))
    })) {
        let e = expand(&rat(m, d)).unwrap();
        prop_assert_eq!(e.period, vec![2]);
        prop_assert!(classify(&rat(m, d)).unwrap().infinite.contains(CharSet::R));
    }

    #[test]
    fn no_middle_digit_iff_cantor(t in unit_fraction(3_000)) {
        prop_assume!(!is_ternary_rational(&t));
        let ty = classify(&t).unwrap();
        let has_c = ty.infinite.union(ty.finite).contains(CharSet::C);
        prop_assert_eq!(!has_c, cantor_oracle(&t, 40));
    }

    #[test]
    fn dividing_by_three_keeps_the_tail(t in unit_fraction(3_000)) {
        let a = classify(&t).unwrap();
        let b = classify(&(t / int(3))).unwrap();
        prop_assert_eq!(a.infinite, b.infinite);
    }
}

#[test]
fn canonical_zero_period_only_at_zero() {
    assert_eq!(expand(&Rational::zero()).unwrap().period, vec![0]);
}

#[test]
fn prefractal_invariants() {
    let levels: Vec<_> = (0..=5).map(|n| build_prefractal(n).unwrap()).collect();
    for (n, p) in levels.iter().enumerate() {
        let n = n as u32;
        assert_eq!(p.num_sides(), 3 * 4usize.pow(n));
        assert_eq!(p.perimeter(), int(3) * rat(4, 3).pow(n as i32));
        let expected = rat(8, 5) - rat(3, 5) * rat(4, 9).pow(n as i32);
        assert_eq!(p.area_ratio(), expected);
        let scale = int(3i64.pow(n));
        for v in p.vertices() {
            assert!((&v.alpha * &scale).is_integer() && (&v.beta * &scale).is_integer());
        }
        for i in 0..p.num_sides() {
            assert!(SideOrientation::of_vector(&p.side_vector(i)).is_some());
        }
        if let Some(next) = levels.get(n as usize + 1) {
            for v in p.vertices() {
                assert_ne!(next.locate_point(v), PointLocation::Outside);
            }
        }
    }
}

fn family_orbits() -> Vec<koch_billiards::billiard::Orbit> {
    let p0 = build_prefractal(0).unwrap();
    family_grid(&[1, 3, 5], 2)
        .into_iter()
        .filter_map(|(case, r, s)| run_orbit(&p0, &family_seed(&p0, case, r, s).unwrap(), 1_000_000).ok())
        .filter(|o| o.period().is_some())
        .collect()
}

#[test]
fn periodic_orbits_recur_from_every_basepoint() {
    let p0 = build_prefractal(0).unwrap();
    for o in family_orbits() {
        let p = o.period().unwrap();
        for k in 0..p {
            let s = &o.footprint[k];
            let init = InitialCondition::new(&p0, s.point.clone(), Direction::Exact(s.dir)).unwrap();
            let again = run_orbit(&p0, &init, 1_000_000).unwrap();
            assert_eq!(again.period(), Some(p));
            let rotated: Vec<_> = (0..p).map(|i| o.footprint[(k + i) % p].clone()).collect();
            assert_eq!(again.footprint, rotated);
        }
    }
}

#[test]
fn direction_length_is_conserved() {
    for o in family_orbits() {
        let n = o.footprint[0].dir.norm2();
        assert!(o.footprint.iter().all(|s| s.dir.norm2() == n));
    }
}

#[test]
fn reversed_orbit_retraces_the_footprint() {
    let p0 = build_prefractal(0).unwrap();
    for o in family_orbits() {
        let p = o.period().unwrap();
        let back = reverse_state(&p0, &o.footprint[0]);
        let init = InitialCondition::new(&p0, back.point, Direction::Exact(back.dir)).unwrap();
        let r = run_orbit(&p0, &init, 1_000_000).unwrap();
        assert_eq!(r.period(), Some(p));
        let forward: Vec<_> = (0..p).map(|i| o.footprint[(p - i) % p].point.clone()).collect();
        let points: Vec<_> = r.footprint.iter().map(|s| s.point.clone()).collect();
        assert_eq!(points, forward);
    }
}

#[test]
fn sequences_are_determined_by_their_seed() {
    let tower = Tower::new(3).unwrap();
    let init = InitialCondition::new(
        tower.get(0),
        BoundaryPoint::new(0, rat(1, 4)),
        Direction::Exact(LatticeDir::new(1, 1).unwrap()),
    )
    .unwrap();
    let a = build_sequence(&tower, 0, &init, 3, 1_000_000).unwrap();
    let b = build_sequence(&tower, 0, &init, 3, 1_000_000).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());
}

/// Denominators are drawn log-uniformly so that every magnitude up to 10^6
/// is represented without the largest periods dominating the run time.
#[test]
fn expansion_round_trips_up_to_a_million() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let d = 10f64.powf(rng.gen_range(0.31..=6.0)).round() as i64;
        let t = rat(rng.gen_range(1..d), d);
        assert_eq!(expand(&t).unwrap().value(), t, "t = {t}");
    }
}

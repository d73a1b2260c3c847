use koch_billiards::billiard::{footprint_types, is_hybrid};
use koch_billiards::compat::{build_sequence, family_grid, family_sweep, hook_trace, Tower};
use koch_billiards::paths::midpoint_seed;
use koch_billiards::ternary::{CharSet, TernaryType};

#[test]
fn hook_family_over_four_levels() {
    let tower = Tower::new(3).unwrap();
    let trace = hook_trace(&tower, 3, 1_000_000).unwrap();
    let periods: Vec<_> = trace.levels.iter().map(|l| l.period).collect();
    assert_eq!(periods, [Some(4), Some(6), Some(10), Some(14)]);
    assert!(trace.levels[0].degenerate);
    for l in &trace.levels[1..] {
        assert!(l.same_seed, "level {}", l.level);
        assert!(l.second_is_cantor, "level {}", l.level);
    }
    // The hook foot closes in on its limit by a factor of three per level.
    for w in trace.foot_gaps.windows(2) {
        assert!((w[1] / w[0] - 1.0 / 3.0).abs() < 1e-9, "{:?}", trace.foot_gaps);
    }
}

#[test]
fn midpoint_family_is_periodic_and_hybrid() {
    let tower = Tower::new(4).unwrap();
    let seq = build_sequence(&tower, 0, &midpoint_seed(&tower).unwrap(), 4, 1_000_000).unwrap();
    let periods: Vec<_> = seq.orbits().map(|o| o.period()).collect();
    assert_eq!(periods, [Some(18), Some(18), Some(38), Some(82), Some(318)]);
    assert!(seq.orbits().all(|o| is_hybrid(o).unwrap()));
    let cantor = TernaryType::new(CharSet::LR, CharSet::EMPTY);
    assert!(seq.orbits().skip(1).all(|o| footprint_types(o).contains(&cantor)));
}

#[test]
fn sweep_failures_are_lattice_collisions() {
    let tower = Tower::new(3).unwrap();
    let rows = family_sweep(&tower, &family_grid(&[1, 3, 5], 2), 3, 1_000_000, 2);
    assert_eq!(rows.len(), 99);
    for r in &rows {
        if !r.passed() {
            assert_eq!(r.avoidance, Some(false), "{:?}", r.to_json());
        }
    }
}

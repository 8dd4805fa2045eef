//! Property tests over generated streets.

use std::collections::BTreeSet;
use std::time::Duration;

use proptest::prelude::*;

use streetwalker::families::{gen_corridor, gen_funnel};
use streetwalker::harness::{read_csv, write_csv, RunReport, CORRIDOR_WIDTH};
use streetwalker::navigator::{run, StrategyConfig, StrategyKind, Trajectory};
use streetwalker::sensor::{EventCounts, EventKind, GapId};
use streetwalker::street::{shortest_path, Street};

fn strategy(randomized: bool, seed: u64) -> StrategyConfig {
    if randomized {
        StrategyConfig::randomized(seed)
    } else {
        StrategyConfig::deterministic()
    }
}

/// Every gap that comes or goes between two samples is named by exactly one
/// event, and split parents and merge survivors live on both sides.
fn check_bookkeeping(tr: &Trajectory) -> Result<(), TestCaseError> {
    for w in tr.samples.windows(2) {
        let ids = |s: &streetwalker::navigator::Sample| s.frame.gaps.iter().map(|g| g.id).collect::<BTreeSet<GapId>>();
        let (before, after) = (ids(&w[0]), ids(&w[1]));
        let mut born = BTreeSet::new();
        let mut died = BTreeSet::new();
        for e in &w[1].events {
            match e.kind {
                EventKind::Appearance => prop_assert!(born.insert(e.gaps[0])),
                EventKind::Split => {
                    prop_assert!(before.contains(&e.gaps[0]) && after.contains(&e.gaps[0]));
                    prop_assert!(born.insert(e.gaps[1]));
                }
                EventKind::Disappearance => prop_assert!(died.insert(e.gaps[0])),
                EventKind::Merge => {
                    prop_assert!(before.contains(&e.gaps[0]) && after.contains(&e.gaps[0]));
                    prop_assert!(died.insert(e.gaps[1]));
                }
            }
        }
        prop_assert_eq!(&born, &after.difference(&before).copied().collect());
        prop_assert_eq!(&died, &before.difference(&after).copied().collect());
    }
    Ok(())
}

/// Doubling walk on a line with unit steps, right first, target at `x`.
fn line_walk(x: f64) -> f64 {
    let mut pos = 0.0f64;
    let mut walked = 0.0;
    let mut reach = 1.0f64;
    let mut right = true;
    loop {
        let turn = if right { reach } else { -reach };
        let hit = if right { x > 0.0 && x <= turn } else { x < 0.0 && x >= turn };
        if hit {
            return walked + (x - pos).abs();
        }
        walked += (turn - pos).abs();
        pos = turn;
        reach *= 2.0;
        right = !right;
    }
}

fn ratio(st: &Street, tr: &Trajectory) -> f64 {
    tr.total_length / shortest_path(st).length
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corridor_ratio_at_least_one(r in 1.2f64..300.0, neg: bool, randomized: bool, seed: u64) {
        let st = gen_corridor(if neg { -r } else { r }, CORRIDOR_WIDTH).unwrap();
        let tr = run(&st, &strategy(randomized, seed).with_base_step(1.0)).unwrap();
        prop_assert!(ratio(&st, &tr) >= 1.0 - 1e-9);
        check_bookkeeping(&tr)?;
    }

    #[test]
    fn funnel_ratio_at_least_one(deg in 5.0f64..170.0, depth in 1.0f64..50.0, randomized: bool, seed: u64) {
        let st = gen_funnel(deg.to_radians(), depth).unwrap();
        let tr = run(&st, &strategy(randomized, seed)).unwrap();
        prop_assert!(ratio(&st, &tr) >= 1.0 - 1e-9);
        check_bookkeeping(&tr)?;
    }

    #[test]
    fn deterministic_corridor_follows_line_walk(r in 1.5f64..300.0, neg: bool) {
        let x = if neg { -r } else { r };
        let st = gen_corridor(x, CORRIDOR_WIDTH).unwrap();
        let tr = run(&st, &StrategyConfig::deterministic().with_base_step(1.0)).unwrap();
        let expect = (line_walk(x) + CORRIDOR_WIDTH) / (r + CORRIDOR_WIDTH);
        let got = ratio(&st, &tr);
        prop_assert!((got - expect).abs() <= 1e-2 * expect, "{} vs {}", got, expect);
    }

    #[test]
    fn randomized_runs_repeat(r in 1.2f64..100.0, seed: u64) {
        let st = gen_corridor(r, CORRIDOR_WIDTH).unwrap();
        let cfg = StrategyConfig::randomized(seed).with_base_step(1.0);
        prop_assert_eq!(run(&st, &cfg).unwrap(), run(&st, &cfg).unwrap());
    }

    #[test]
    fn csv_round_trip(
        name in "[a-z0-9:_.+-]{1,24}",
        randomized: bool,
        seed: u64,
        path in 0.0f64..1e6,
        geo in 1e-3f64..1e6,
        counts in proptest::array::uniform4(0u32..1000),
    ) {
        let report = RunReport {
            instance: name,
            strategy: if randomized { StrategyKind::Randomized } else { StrategyKind::Deterministic },
            seed,
            path_len: path,
            geo_len: geo,
            ratio: path / geo,
            events: EventCounts { appear: counts[0], disappear: counts[1], split: counts[2], merge: counts[3] },
            wall_time: Duration::ZERO,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, std::slice::from_ref(&report)).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![report]);
    }
}

#[test]
fn line_walk_worst_case_approaches_nine() {
    let x = 257.0;
    assert!((line_walk(x) / x - 8.96).abs() < 0.01);
    assert_eq!(line_walk(1.0), 1.0);
    assert_eq!(line_walk(-2.0), 1.0 + 3.0);
}

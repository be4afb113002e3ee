mod common;

use common::{random, square, tiny, with_slots};
use fdbackhaul::engine::evaluate;
use fdbackhaul::oracle::{enumerate_feasible_sets, recompute_metrics, solve_exact, Allocation};
use fdbackhaul::{Cell, Error, Scenario, Schedule, SchedulerKind};

fn schedule_from(alloc: &Allocation, scenario: &Scenario, reverse: bool) -> Schedule {
    let mut s = Schedule::new(scenario.num_flows(), scenario.timing.num_slots);
    let mut blocks: Vec<_> = alloc.counts.iter().collect();
    if reverse {
        blocks.reverse();
    }
    let mut slot = 0;
    for (set, count) in blocks {
        for _ in 0..*count {
            s.schedule_all(slot, &set.flows);
            slot += 1;
        }
    }
    s
}

#[test]
fn feasible_sets_of_small_cases() {
    let relay = square([3.0; 4], &[(0, 1, 1e9), (1, 2, 1e9)]);
    let sets: Vec<Vec<usize>> = enumerate_feasible_sets(&relay)
        .unwrap()
        .into_iter()
        .map(|s| s.flows)
        .collect();
    assert_eq!(sets, vec![vec![], vec![0], vec![1], vec![0, 1]]);

    // the diagonal shares a transmitter with flow 0 and a receiver with flow 1
    let three = square([3.0; 4], &[(0, 1, 1e9), (2, 3, 1e9), (0, 3, 1e9)]);
    let sets: Vec<Vec<usize>> = enumerate_feasible_sets(&three)
        .unwrap()
        .into_iter()
        .map(|s| s.flows)
        .collect();
    assert_eq!(sets, vec![vec![], vec![0], vec![1], vec![0, 1], vec![2]]);
}

#[test]
fn feasible_set_rates_match_links() {
    let s = square([3.0; 4], &[(0, 1, 1e9), (1, 2, 1e9)]);
    let sets = enumerate_feasible_sets(&s).unwrap();
    let pair = sets.iter().find(|s| s.flows == [0, 1]).unwrap();
    assert_eq!(pair.rate_of(0), fdbackhaul::phy::slot_rate(0, &[0, 1], &s).unwrap());
    assert_eq!(pair.rate_of(2), 0.0);
}

#[test]
fn too_many_flows_is_refused() {
    let s = random(1, 7);
    assert!(matches!(enumerate_feasible_sets(&s), Err(Error::TooLarge(_))));
    assert!(matches!(solve_exact(&s), Err(Error::TooLarge(_))));
}

#[test]
fn no_flows() {
    let s = with_slots(square([3.0; 4], &[]), 4);
    let (best, alloc) = solve_exact(&s).unwrap();
    assert_eq!(best, 0);
    assert_eq!(alloc.total_slots(), 0);
}

#[test]
fn single_flow_needs_ceil_demand() {
    // ξ = 4.16 with five slots, 4.08 with four
    let five = with_slots(square([3.0; 4], &[(0, 1, 1e9)]), 5);
    let (best, alloc) = solve_exact(&five).unwrap();
    assert_eq!(best, 1);
    assert_eq!(alloc.slots_for(0), 5);
    let four = with_slots(square([3.0; 4], &[(0, 1, 1e9)]), 4);
    assert_eq!(solve_exact(&four).unwrap().0, 0);
}

#[test]
fn relay_pair_optimum_runs_both_together() {
    let s = with_slots(square([3.0; 4], &[(0, 1, 1e9), (1, 2, 1e9)]), 9);
    let (best, alloc) = solve_exact(&s).unwrap();
    assert_eq!(best, 2);
    assert_eq!(alloc.total_slots(), 5);
    assert_eq!(alloc.counts.len(), 1);
    assert_eq!(alloc.counts[0].0.flows, vec![0, 1]);
}

#[test]
fn witness_achieves_the_optimum() {
    for i in 0..40 {
        let s = tiny(i);
        let (best, alloc) = solve_exact(&s).unwrap();
        assert!(alloc.total_slots() <= s.timing.num_slots);
        let m = recompute_metrics(&schedule_from(&alloc, &s, false), &s).unwrap();
        assert_eq!(m.completed_count, best, "instance {i}");
    }
}

#[test]
fn slot_order_does_not_change_throughput() {
    for i in 0..40 {
        let s = tiny(i);
        let (_, alloc) = solve_exact(&s).unwrap();
        let a = recompute_metrics(&schedule_from(&alloc, &s, false), &s).unwrap();
        let b = recompute_metrics(&schedule_from(&alloc, &s, true), &s).unwrap();
        assert_eq!(a.completed_count, b.completed_count);
        for (x, y) in a.per_flow_throughput.iter().zip(&b.per_flow_throughput) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}

#[test]
fn schedulers_never_beat_the_optimum() {
    for i in 0..60 {
        let s = tiny(i);
        let (best, _) = solve_exact(&s).unwrap();
        for kind in SchedulerKind::ALL {
            let got = evaluate(&kind.schedule(&s).unwrap(), &s).unwrap().completed_count;
            assert!(got <= best, "instance {i} {kind}: {got} > {best}");
        }
    }
}

#[test]
fn recomputation_matches_engine_exactly() {
    for seed in 0..10 {
        let s = random(seed, 40);
        for kind in SchedulerKind::ALL {
            let sch = kind.schedule(&s).unwrap();
            assert_eq!(recompute_metrics(&sch, &s).unwrap(), evaluate(&sch, &s).unwrap());
        }
    }
}

#[test]
fn recomputation_rejects_invalid_schedules() {
    let s = square([3.0; 4], &[(0, 1, 1e9), (0, 2, 1e9)]);
    let mut sch = Schedule::new(2, s.timing.num_slots);
    sch.set(0, 0, Cell::Scheduled);
    sch.set(1, 0, Cell::Scheduled);
    assert!(matches!(recompute_metrics(&sch, &s), Err(Error::Invalid(_))));
}

//! Phase-based full-duplex baseline designed for frames with ample slots.
//!
//! Each phase is anchored on the uncompleted flow with the largest remaining
//! slot demand. Remaining flows are then offered in decreasing remaining
//! demand; a flow joins if it shares no transmitter or receiver with any
//! member and its relative interference with every member, in both
//! directions, is at most σ. The phase runs with a fixed membership until all
//! members meet their QoS (or the frame ends). Members that finish early keep
//! transmitting until the phase closes.

use std::cmp::Ordering;

use crate::contention::{classify_pair, pair_interference};
use crate::error::Result;
use crate::phy::LinkBudget;
use crate::scenario::Scenario;
use crate::schedule::Schedule;

use super::{demand_slots, FrameState};

pub fn fdp(scenario: &Scenario) -> Result<Schedule> {
    scenario.ensure_valid()?;
    let links = LinkBudget::new(scenario)?;
    let n = scenario.num_flows();
    let m = scenario.timing.num_slots;
    let timing = &scenario.timing;

    let mut schedule = Schedule::new(n, m);
    let mut state = FrameState::new(n);
    let mut slot = 0;

    while slot < m {
        let remaining: Vec<f64> = (0..n)
            .map(|f| {
                let left = scenario.flows[f].qos_bps - state.throughput(f, timing);
                demand_slots(left, links.solo_rate(f), timing)
            })
            .collect();
        let mut pending: Vec<usize> = (0..n).filter(|&f| !state.is_met(f)).collect();
        if pending.is_empty() {
            break;
        }
        pending.sort_by(|&a, &b| match remaining[b].total_cmp(&remaining[a]) {
            Ordering::Equal => a.cmp(&b),
            o => o,
        });

        let mut phase: Vec<usize> = Vec::new();
        for &c in &pending {
            let fits = phase.iter().all(|&p| {
                let kind = classify_pair(&scenario.flows[c], &scenario.flows[p]);
                if kind.is_role_conflict() {
                    return false;
                }
                let (a, b) = pair_interference(&links, c, p, kind)
                    .expect("role conflicts rejected above");
                a.max(b) <= scenario.sigma
            });
            if fits {
                phase.push(c);
            }
        }
        phase.sort_unstable();

        while slot < m && phase.iter().any(|&f| !state.is_met(f)) {
            schedule.schedule_all(slot, &phase);
            for f in state.serve(&phase, &links, scenario) {
                schedule.completion_slot[f] = Some(slot);
            }
            slot += 1;
        }
        for &f in &phase {
            if state.is_met(f) {
                schedule.complete_after(f, slot - 1);
            }
        }
    }
    Ok(schedule)
}

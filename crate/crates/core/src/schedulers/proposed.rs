//! QoS-aware concurrent scheduling with slot-demand ordering and a
//! sum-rate profit check.
//!
//! 1. Flows whose interference-free slot demand exceeds the frame are dropped.
//! 2. Survivors are ordered by nondecreasing demand.
//! 3. At the first slot and after every completion, the ordered list is
//!    scanned once; a flow joins the active set if it is neither active nor
//!    completed, has no contention edge to any active flow, and strictly raises
//!    the slot's sum rate.
//! 4. The active set is carried forward otherwise. A flow leaves it in the
//!    slot where its frame throughput reaches its QoS and is never served again.

use crate::contention::{graph_from_links, Duplex};
use crate::error::Result;
use crate::phy::LinkBudget;
use crate::scenario::Scenario;
use crate::schedule::Schedule;

use super::{by_demand, demand_from, with_flow, FrameState};

pub fn proposed_fd(scenario: &Scenario) -> Result<Schedule> {
    run(scenario, Duplex::Full)
}

/// Same algorithm restricted to half duplex: any shared station conflicts.
pub fn proposed_hd(scenario: &Scenario) -> Result<Schedule> {
    run(scenario, Duplex::Half)
}

fn run(scenario: &Scenario, duplex: Duplex) -> Result<Schedule> {
    scenario.ensure_valid()?;
    let links = LinkBudget::new(scenario)?;
    let n = scenario.num_flows();
    let m = scenario.timing.num_slots;
    let demand = demand_from(&links, scenario);

    let mut schedule = Schedule::new(n, m);
    schedule.dropped = demand.exceeding(m).into_iter().collect();
    let order = by_demand((0..n).filter(|f| !schedule.dropped.contains(f)), &demand);
    let graph = graph_from_links(&links, &scenario.flows, scenario.sigma, duplex);

    let mut state = FrameState::new(n);
    let mut completed = vec![false; n];
    let mut active: Vec<usize> = Vec::new();

    for slot in 0..m {
        if state.change {
            let mut total = links.sum_rate(&active);
            for &f in &order {
                if completed[f] || active.contains(&f) || !graph.compatible_with(f, &active) {
                    continue;
                }
                let candidate = with_flow(&active, f);
                let with = links.sum_rate(&candidate);
                if with > total {
                    active = candidate;
                    total = with;
                }
            }
            state.change = false;
        }

        schedule.schedule_all(slot, &active);
        let finished = state.serve(&active, &links, scenario);
        if !finished.is_empty() {
            for &f in &finished {
                completed[f] = true;
                schedule.complete_after(f, slot);
            }
            active.retain(|f| !finished.contains(f));
            state.change = true;
        }
    }
    Ok(schedule)
}

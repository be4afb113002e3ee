use crate::error::Result;
use crate::phy::LinkBudget;
use crate::scenario::Scenario;
use crate::schedule::Schedule;

use super::{by_demand, demand_from, FrameState};

/// Serial service, shortest slot demand first. Each flow holds the channel
/// alone until its QoS is met; the frame simply ends on whoever is current.
pub fn tdma(scenario: &Scenario) -> Result<Schedule> {
    scenario.ensure_valid()?;
    let links = LinkBudget::new(scenario)?;
    let n = scenario.num_flows();
    let m = scenario.timing.num_slots;
    let demand = demand_from(&links, scenario);
    let order = by_demand(0..n, &demand);

    let mut schedule = Schedule::new(n, m);
    let mut state = FrameState::new(n);
    let mut queue = order.into_iter();
    let mut current = queue.next();

    for slot in 0..m {
        let Some(f) = current else { break };
        schedule.schedule_all(slot, &[f]);
        if !state.serve(&[f], &links, scenario).is_empty() {
            schedule.complete_after(f, slot);
            current = queue.next();
        }
    }
    Ok(schedule)
}

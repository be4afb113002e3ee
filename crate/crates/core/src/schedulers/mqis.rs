//! Maximal-independent-set baseline on the half-duplex contention graph.
//!
//! Whenever a scheduled flow completes, the set is rebuilt from all
//! uncompleted flows by repeatedly taking the minimum-degree vertex of the
//! residual graph (smaller slot demand, then smaller id, breaks ties) and
//! deleting it with its neighbours. No flows are dropped and no profit check
//! is applied.

use crate::contention::{graph_from_links, ContentionGraph, Duplex};
use crate::error::Result;
use crate::phy::LinkBudget;
use crate::scenario::Scenario;
use crate::schedule::Schedule;

use super::{demand_from, FrameState, SlotDemand};

/// Greedy minimum-degree independent set over `candidates`; ascending ids.
pub fn min_degree_independent_set(
    graph: &ContentionGraph,
    candidates: &[usize],
    demand: &SlotDemand,
) -> Vec<usize> {
    let n = graph.num_flows();
    let mut alive = vec![false; n];
    for &c in candidates {
        alive[c] = true;
    }
    let mut degree = vec![0usize; n];
    for &c in candidates {
        degree[c] = graph.neighbors(c).filter(|&g| alive[g]).count();
    }

    let mut chosen = Vec::new();
    loop {
        let pick = (0..n).filter(|&f| alive[f]).min_by(|&a, &b| {
            degree[a]
                .cmp(&degree[b])
                .then(demand.get(a).total_cmp(&demand.get(b)))
                .then(a.cmp(&b))
        });
        let Some(v) = pick else { break };
        chosen.push(v);

        let mut removed: Vec<usize> = graph.neighbors(v).filter(|&g| alive[g]).collect();
        removed.push(v);
        for &r in &removed {
            alive[r] = false;
        }
        for &r in &removed {
            for g in graph.neighbors(r) {
                if alive[g] {
                    degree[g] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

pub fn mqis(scenario: &Scenario) -> Result<Schedule> {
    scenario.ensure_valid()?;
    let links = LinkBudget::new(scenario)?;
    let n = scenario.num_flows();
    let m = scenario.timing.num_slots;
    let demand = demand_from(&links, scenario);
    let graph = graph_from_links(&links, &scenario.flows, scenario.sigma, Duplex::Half);

    let mut schedule = Schedule::new(n, m);
    let mut state = FrameState::new(n);
    let mut completed = vec![false; n];
    let mut active = Vec::new();

    for slot in 0..m {
        if state.change {
            let pending: Vec<usize> = (0..n).filter(|&f| !completed[f]).collect();
            active = min_degree_independent_set(&graph, &pending, &demand);
            state.change = false;
        }
        schedule.schedule_all(slot, &active);
        let finished = state.serve(&active, &links, scenario);
        if !finished.is_empty() {
            for &f in &finished {
                completed[f] = true;
                schedule.complete_after(f, slot);
            }
            state.change = true;
        }
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contention::EdgeCause;

    #[test]
    fn star_graph_first_set() {
        // flows 1..4 as ids 0..3, edges 1-2 and 1-4
        let g = ContentionGraph::from_edges(
            4,
            &[(0, 1, EdgeCause::RiExceeded), (0, 3, EdgeCause::RiExceeded)],
        );
        for demand in [vec![1.0; 4], vec![5.0, 4.0, 3.0, 2.0], vec![1.0, 9.0, 1.0, 1.0]] {
            let set = min_degree_independent_set(&g, &[0, 1, 2, 3], &SlotDemand(demand));
            assert_eq!(set, vec![1, 2, 3]);
        }
    }

    #[test]
    fn empty_graph_takes_everything() {
        let g = ContentionGraph::new(5);
        let set = min_degree_independent_set(&g, &[0, 1, 2, 3, 4], &SlotDemand(vec![1.0; 5]));
        assert_eq!(set, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn complete_graph_takes_smallest_demand() {
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push((a, b, EdgeCause::RoleConflict));
            }
        }
        let g = ContentionGraph::from_edges(4, &edges);
        let d = SlotDemand(vec![7.0, 3.0, 9.0, 3.0]);
        assert_eq!(min_degree_independent_set(&g, &[0, 1, 2, 3], &d), vec![1]);
        assert_eq!(min_degree_independent_set(&g, &[0, 2], &d), vec![0]);
    }

    #[test]
    fn candidates_restrict_the_graph() {
        // path 0-1-2: with 1 excluded, 0 and 2 are both free
        let g = ContentionGraph::from_edges(
            3,
            &[(0, 1, EdgeCause::RoleConflict), (1, 2, EdgeCause::RoleConflict)],
        );
        let d = SlotDemand(vec![1.0; 3]);
        assert_eq!(min_degree_independent_set(&g, &[0, 2], &d), vec![0, 2]);
        assert_eq!(min_degree_independent_set(&g, &[0, 1, 2], &d), vec![0, 2]);
    }
}

//! Scheduling strategies. Every strategy maps a [`Scenario`] to a
//! [`Schedule`] deterministically and single-threaded.

mod fdp;
mod mqis;
mod proposed;
mod tdma;

pub use fdp::fdp;
pub use mqis::{min_degree_independent_set, mqis};
pub use proposed::{proposed_fd, proposed_hd};
pub use tdma::tdma;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::LinkBudget;
use crate::scenario::{FrameTiming, Scenario};
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerKind {
    ProposedFd,
    ProposedHd,
    Mqis,
    Tdma,
    Fdp,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 5] = [
        SchedulerKind::ProposedFd,
        SchedulerKind::ProposedHd,
        SchedulerKind::Mqis,
        SchedulerKind::Tdma,
        SchedulerKind::Fdp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::ProposedFd => "proposed-fd",
            SchedulerKind::ProposedHd => "proposed-hd",
            SchedulerKind::Mqis => "mqis",
            SchedulerKind::Tdma => "tdma",
            SchedulerKind::Fdp => "fdp",
        }
    }

    pub fn schedule(self, scenario: &Scenario) -> Result<Schedule> {
        match self {
            SchedulerKind::ProposedFd => proposed_fd(scenario),
            SchedulerKind::ProposedHd => proposed_hd(scenario),
            SchedulerKind::Mqis => mqis(scenario),
            SchedulerKind::Tdma => tdma(scenario),
            SchedulerKind::Fdp => fdp(scenario),
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        SchedulerKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scheduler '{s}' (expected one of proposed-fd, proposed-hd, mqis, tdma, fdp)"
                ))
            })
    }
}

/// Slots each flow would need at its interference-free rate to reach its
/// QoS within the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDemand(pub Vec<f64>);

impl SlotDemand {
    pub fn get(&self, f: usize) -> f64 {
        self.0[f]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Flows whose demand exceeds the frame. Infinite demand (zero solo rate)
    /// counts as exceeding.
    pub fn exceeding(&self, num_slots: usize) -> Vec<usize> {
        (0..self.0.len())
            .filter(|&f| !(self.0[f] <= num_slots as f64))
            .collect()
    }
}

/// `ξ = q·(T_s + M·Δt) / (R·Δt)`. Zero demand needs zero slots even at zero
/// rate; positive demand at zero rate is infinite.
pub fn demand_slots(qos_bps: f64, rate_bps: f64, timing: &FrameTiming) -> f64 {
    if qos_bps <= 0.0 {
        return 0.0;
    }
    if rate_bps <= 0.0 {
        return f64::INFINITY;
    }
    qos_bps * timing.frame_duration() / (rate_bps * timing.slot_duration_s)
}

pub(crate) fn demand_from(links: &LinkBudget, scenario: &Scenario) -> SlotDemand {
    SlotDemand(
        scenario
            .flows
            .iter()
            .enumerate()
            .map(|(f, flow)| demand_slots(flow.qos_bps, links.solo_rate(f), &scenario.timing))
            .collect(),
    )
}

pub fn slot_demand(scenario: &Scenario) -> Result<SlotDemand> {
    Ok(demand_from(&LinkBudget::new(scenario)?, scenario))
}

/// Flow ids sorted by nondecreasing demand, ties by id.
pub(crate) fn by_demand(ids: impl IntoIterator<Item = usize>, demand: &SlotDemand) -> Vec<usize> {
    let mut v: Vec<usize> = ids.into_iter().collect();
    v.sort_by(|&a, &b| demand.get(a).total_cmp(&demand.get(b)).then(a.cmp(&b)));
    v
}

/// Returns `set` with `f` inserted in ascending position.
pub(crate) fn with_flow(set: &[usize], f: usize) -> Vec<usize> {
    let mut out = set.to_vec();
    let pos = out.partition_point(|&g| g < f);
    out.insert(pos, f);
    out
}

/// Bits delivered so far in the frame, and the rate cache for the current
/// active set.
#[derive(Debug, Clone)]
pub struct FrameState {
    pub current_slot: usize,
    pub cumulative_bits: Vec<f64>,
    /// Raised when the active set must be re-derived before the next slot.
    pub change: bool,
    met: Vec<bool>,
    cached_set: Vec<usize>,
    cached_rates: Vec<f64>,
}

impl FrameState {
    pub fn new(num_flows: usize) -> Self {
        Self {
            current_slot: 0,
            cumulative_bits: vec![0.0; num_flows],
            change: true,
            met: vec![false; num_flows],
            cached_set: Vec::new(),
            cached_rates: Vec::new(),
        }
    }

    /// Frame throughput so far, `Σ R·Δt / (T_s + M·Δt)`.
    pub fn throughput(&self, f: usize, timing: &FrameTiming) -> f64 {
        self.cumulative_bits[f] / timing.frame_duration()
    }

    pub fn is_met(&self, f: usize) -> bool {
        self.met[f]
    }

    /// Transmits one slot with `active` (ascending ids) and returns the flows
    /// whose throughput reached their QoS in this slot.
    pub fn serve(&mut self, active: &[usize], links: &LinkBudget, scenario: &Scenario) -> Vec<usize> {
        if self.cached_set != active {
            self.cached_set = active.to_vec();
            self.cached_rates = links.rates(active);
        }
        let dt = scenario.timing.slot_duration_s;
        let mut newly = Vec::new();
        for (&f, &rate) in active.iter().zip(&self.cached_rates) {
            self.cumulative_bits[f] += rate * dt;
            if !self.met[f] && self.throughput(f, &scenario.timing) >= scenario.flows[f].qos_bps {
                self.met[f] = true;
                newly.push(f);
            }
        }
        self.current_slot += 1;
        newly
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demand_examples() {
        let t = FrameTiming::standard();
        assert_eq!(demand_slots(0.0, 4e9, &t), 0.0);
        let xi = demand_slots(2e9, 4e9, &t);
        // 2e9 * 0.03685 / (4e9 * 18e-6)
        assert!((xi - 1_023.611_111_111).abs() < 1e-6, "{xi}");
        assert!((demand_slots(4e9, 4e9, &t) - 2.0 * xi).abs() < 1e-9);
        assert_eq!(demand_slots(1e9, 0.0, &t), f64::INFINITY);
    }

    #[test]
    fn exceeding_includes_infinite() {
        let d = SlotDemand(vec![10.0, 2000.0, 2000.5, f64::INFINITY]);
        assert_eq!(d.exceeding(2000), vec![2, 3]);
    }

    #[test]
    fn names_roundtrip() {
        for k in SchedulerKind::ALL {
            assert_eq!(k.name().parse::<SchedulerKind>().unwrap(), k);
        }
        assert_eq!("Proposed_FD".parse::<SchedulerKind>().unwrap(), SchedulerKind::ProposedFd);
        assert!(matches!("greedy".parse::<SchedulerKind>(), Err(Error::Config(_))));
    }

    #[test]
    fn sorted_insert() {
        assert_eq!(with_flow(&[1, 4, 7], 5), vec![1, 4, 5, 7]);
        assert_eq!(with_flow(&[], 3), vec![3]);
    }
}

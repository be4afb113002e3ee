//! Frame schedules: one row per flow, one column per transmission slot.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(i8)]
pub enum Cell {
    Unscheduled = 0,
    Scheduled = 1,
    /// The flow met its QoS earlier and is no longer served.
    Completed = -1,
}

/// `F × M` schedule matrix plus the set of flows dropped before scheduling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    num_flows: usize,
    num_slots: usize,
    cells: Vec<Cell>,
    pub dropped: BTreeSet<usize>,
    /// Slot in which each flow's cumulative throughput first met its QoS,
    /// as observed by the scheduler.
    pub completion_slot: Vec<Option<usize>>,
}

impl Schedule {
    pub fn new(num_flows: usize, num_slots: usize) -> Self {
        Self {
            num_flows,
            num_slots,
            cells: vec![Cell::Unscheduled; num_flows * num_slots],
            dropped: BTreeSet::new(),
            completion_slot: vec![None; num_flows],
        }
    }

    pub fn num_flows(&self) -> usize {
        self.num_flows
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn cell(&self, flow: usize, slot: usize) -> Cell {
        self.cells[flow * self.num_slots + slot]
    }

    pub fn set(&mut self, flow: usize, slot: usize, cell: Cell) {
        self.cells[flow * self.num_slots + slot] = cell;
    }

    /// Schedules every flow in `active` for `slot`.
    pub fn schedule_all(&mut self, slot: usize, active: &[usize]) {
        for &f in active {
            self.set(f, slot, Cell::Scheduled);
        }
    }

    /// Marks `flow` Completed in every slot after `slot`.
    pub fn complete_after(&mut self, flow: usize, slot: usize) {
        self.completion_slot[flow].get_or_insert(slot);
        for later in slot + 1..self.num_slots {
            self.set(flow, later, Cell::Completed);
        }
    }

    pub fn row(&self, flow: usize) -> &[Cell] {
        &self.cells[flow * self.num_slots..(flow + 1) * self.num_slots]
    }

    /// Flows scheduled in `slot`, ascending by id.
    pub fn active_in(&self, slot: usize) -> Vec<usize> {
        (0..self.num_flows)
            .filter(|&f| self.cell(f, slot) == Cell::Scheduled)
            .collect()
    }

    pub fn slots_used(&self, flow: usize) -> usize {
        self.row(flow)
            .iter()
            .filter(|&&c| c == Cell::Scheduled)
            .count()
    }

    /// Checks the hard full-duplex constraints, completion finality and
    /// dropped-flow rows against `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        if self.num_flows != scenario.flows.len() {
            out.push(Violation::new(
                "shape",
                format!(
                    "schedule has {} rows, scenario has {} flows",
                    self.num_flows,
                    scenario.flows.len()
                ),
            ));
            return Err(out);
        }
        if self.num_slots != scenario.timing.num_slots {
            out.push(Violation::new(
                "shape",
                format!(
                    "schedule has {} slots, frame has {}",
                    self.num_slots, scenario.timing.num_slots
                ),
            ));
        }

        for slot in 0..self.num_slots {
            let active = self.active_in(slot);
            for (i, &a) in active.iter().enumerate() {
                for &b in &active[i + 1..] {
                    let (fa, fb) = (&scenario.flows[a], &scenario.flows[b]);
                    if fa.tx == fb.tx {
                        out.push(Violation::new(
                            "shared-transmitter",
                            format!("slot {slot}: flows {a},{b} transmit from station {}", fa.tx),
                        ));
                    }
                    if fa.rx == fb.rx {
                        out.push(Violation::new(
                            "shared-receiver",
                            format!("slot {slot}: flows {a},{b} receive at station {}", fa.rx),
                        ));
                    }
                }
            }
        }

        for f in 0..self.num_flows {
            let row = self.row(f);
            if let Some(first) = row.iter().position(|&c| c == Cell::Completed) {
                if let Some(bad) = row[first..].iter().position(|&c| c != Cell::Completed) {
                    out.push(Violation::new(
                        "rescheduled-after-completion",
                        format!("flow {f} completed at slot {first} but active at {}", first + bad),
                    ));
                }
                match self.completion_slot[f] {
                    Some(c) if c < first => {}
                    other => out.push(Violation::new(
                        "completion-slot",
                        format!("flow {f} turns Completed at {first}, completion slot {other:?}"),
                    )),
                }
            }
            if self.dropped.contains(&f) && row.iter().any(|&c| c != Cell::Unscheduled) {
                out.push(Violation::new(
                    "dropped-scheduled",
                    format!("dropped flow {f} has non-empty row"),
                ));
            }
        }
        if let Some(&bad) = self.dropped.iter().find(|&&f| f >= self.num_flows) {
            out.push(Violation::new("shape", format!("dropped flow {bad} out of range")));
        }

        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn export(&self) -> ScheduleExport {
        ScheduleExport {
            num_flows: self.num_flows,
            num_slots: self.num_slots,
            dropped: self.dropped.iter().copied().collect(),
            completion_slot: self.completion_slot.clone(),
            slots: (0..self.num_slots).map(|i| self.active_in(i)).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.export())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ScheduleExport>(text)?.into_schedule()
    }
}

/// Text form of a [`Schedule`]: the active set of every slot plus each
/// flow's completion slot. Cells after a flow's completion slot in which it
/// is not listed are Completed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleExport {
    pub num_flows: usize,
    pub num_slots: usize,
    pub dropped: Vec<usize>,
    pub completion_slot: Vec<Option<usize>>,
    pub slots: Vec<Vec<usize>>,
}

impl ScheduleExport {
    pub fn into_schedule(self) -> Result<Schedule> {
        if self.slots.len() != self.num_slots || self.completion_slot.len() != self.num_flows {
            return Err(Error::Contract("schedule export has inconsistent sizes".into()));
        }
        let mut s = Schedule::new(self.num_flows, self.num_slots);
        for (slot, active) in self.slots.iter().enumerate() {
            for &f in active {
                if f >= self.num_flows {
                    return Err(Error::Contract(format!("slot {slot} lists unknown flow {f}")));
                }
                s.set(f, slot, Cell::Scheduled);
            }
        }
        for (f, c) in self.completion_slot.iter().enumerate() {
            if let Some(c) = *c {
                for slot in c + 1..self.num_slots {
                    if s.cell(f, slot) == Cell::Unscheduled {
                        s.set(f, slot, Cell::Completed);
                    }
                }
            }
        }
        s.completion_slot = self.completion_slot;
        s.dropped = self.dropped.into_iter().collect();
        Ok(s)
    }
}

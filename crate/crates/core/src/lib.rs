//! Full-duplex millimeter-wave backhaul scheduling.
//!
//! The crate models a network of base stations, each with one steerable
//! transmit and one steerable receive antenna, serving directed flows that
//! carry minimum-throughput requirements over a frame of `M` slots.
//!
//! - [`phy`]: antenna pattern, received power, noise and Shannon rates.
//! - [`scenario`]: seeded scenario generation, validation and JSON I/O.
//! - [`contention`]: pair classification, relative interference and the
//!   contention graph.
//! - [`schedulers`]: the QoS-aware full-duplex scheduler, its half-duplex
//!   variant and three baselines (MQIS, TDMA, FDP).
//! - [`engine`]: trial evaluation, paired Monte Carlo sweeps, CSV output.
//! - [`oracle`]: exact optimum for desk-sized instances.

pub mod contention;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod phy;
pub mod scenario;
pub mod schedule;
pub mod schedulers;

pub use contention::{build_graph, classify_pair, hd_graph, ContentionGraph, EdgeCause, PairKind};
pub use engine::{
    aggregate, run_sweep, run_trial, run_trial_with, AggregateRow, SweepAxis, SweepRow, SweepSpec,
    TrialMetrics,
};
pub use error::{Error, Result, Violation};
pub use phy::{LinkBudget, Position, RadioConstants};
pub use scenario::{generate, BaseStation, Flow, FrameTiming, GenerationParams, Scenario};
pub use schedule::{Cell, Schedule};
pub use schedulers::{slot_demand, SchedulerKind, SlotDemand};

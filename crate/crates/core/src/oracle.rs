//! Exact solutions for desk-sized instances.
//!
//! Frame throughput is a sum of per-slot contributions, so only how many
//! slots each concurrent set receives matters, not their order. The solver
//! therefore enumerates slot-count vectors over feasible sets instead of
//! `2^(M·F)` schedule matrices.

use crate::engine::TrialMetrics;
use crate::error::{Error, Result};
use crate::phy::{noise_power, received_power, shannon_rate, LinkBudget};
use crate::scenario::Scenario;
use crate::schedule::{Cell, Schedule};

/// Largest flow count [`enumerate_feasible_sets`] accepts.
pub const MAX_FLOWS: usize = 6;

/// Upper limit on the number of slot-count vectors [`solve_exact`] visits.
pub const SEARCH_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    /// Ascending flow ids.
    pub flows: Vec<usize>,
    /// Rate of each listed flow when exactly this set transmits.
    pub per_flow_rate: Vec<f64>,
}

impl FeasibleSet {
    pub fn rate_of(&self, f: usize) -> f64 {
        self.flows
            .iter()
            .position(|&g| g == f)
            .map_or(0.0, |i| self.per_flow_rate[i])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Allocation {
    /// Concurrent sets with the number of slots each receives.
    pub counts: Vec<(FeasibleSet, usize)>,
}

impl Allocation {
    pub fn total_slots(&self) -> usize {
        self.counts.iter().map(|(_, c)| c).sum()
    }

    pub fn slots_for(&self, f: usize) -> usize {
        self.counts
            .iter()
            .filter(|(s, _)| s.flows.contains(&f))
            .map(|(_, c)| c)
            .sum()
    }
}

/// All subsets of flows, the empty set included, in which no station
/// transmits twice or receives twice.
pub fn enumerate_feasible_sets(scenario: &Scenario) -> Result<Vec<FeasibleSet>> {
    let n = scenario.num_flows();
    if n > MAX_FLOWS {
        return Err(Error::TooLarge(format!(
            "{n} flows; exact enumeration supports at most {MAX_FLOWS}"
        )));
    }
    scenario.ensure_valid()?;
    let links = LinkBudget::new(scenario)?;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let flows: Vec<usize> = (0..n).filter(|&f| mask & (1 << f) != 0).collect();
        let feasible = flows.iter().enumerate().all(|(i, &a)| {
            flows[i + 1..].iter().all(|&b| {
                let (fa, fb) = (&scenario.flows[a], &scenario.flows[b]);
                fa.tx != fb.tx && fa.rx != fb.rx
            })
        });
        if feasible {
            let per_flow_rate = links.rates(&flows);
            out.push(FeasibleSet {
                flows,
                per_flow_rate,
            });
        }
    }
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

struct Search<'a> {
    sets: &'a [FeasibleSet],
    /// `rate · Δt` per set and flow.
    bits_per_slot: Vec<Vec<f64>>,
    frame: f64,
    qos: Vec<f64>,
    upper_bound: usize,
    counts: Vec<usize>,
    best: usize,
    best_counts: Vec<usize>,
}

impl Search<'_> {
    fn completed(&self, counts: &[usize]) -> usize {
        (0..self.qos.len())
            .filter(|&f| {
                let bits: f64 = counts
                    .iter()
                    .zip(&self.bits_per_slot)
                    .map(|(&c, b)| c as f64 * b[f])
                    .sum();
                bits / self.frame >= self.qos[f]
            })
            .count()
    }

    fn visit(&mut self, k: usize, slots_left: usize) {
        if self.best == self.upper_bound {
            return;
        }
        if k == self.sets.len() {
            let value = self.completed(&self.counts);
            if value > self.best {
                self.best = value;
                self.best_counts = self.counts.clone();
            }
            return;
        }
        for c in (0..=slots_left).rev() {
            self.counts[k] = c;
            self.visit(k + 1, slots_left - c);
        }
        self.counts[k] = 0;
    }
}

/// Maximum number of flows that can meet their QoS within the frame,
/// together with one allocation achieving it.
///
/// Sets whose rate vector is componentwise dominated by another set are
/// discarded before the search; this keeps the optimum intact because
/// swapping a dominated set's slots to its dominator never lowers any
/// flow's throughput.
pub fn solve_exact(scenario: &Scenario) -> Result<(usize, Allocation)> {
    let all = enumerate_feasible_sets(scenario)?;
    let n = scenario.num_flows();
    let m = scenario.timing.num_slots;
    let dt = scenario.timing.slot_duration_s;
    let frame = scenario.timing.frame_duration();
    let rate_vec = |s: &FeasibleSet| -> Vec<f64> { (0..n).map(|f| s.rate_of(f)).collect() };

    let vectors: Vec<Vec<f64>> = all.iter().map(rate_vec).collect();
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..all.len() {
        if all[i].flows.is_empty() {
            continue;
        }
        let dominated = (0..all.len()).any(|j| {
            j != i
                && !all[j].flows.is_empty()
                && vectors[j].iter().zip(&vectors[i]).all(|(a, b)| a >= b)
                && (vectors[j] != vectors[i] || j < i)
        });
        if !dominated {
            kept.push(i);
        }
    }
    let sets: Vec<FeasibleSet> = kept.iter().map(|&i| all[i].clone()).collect();

    // count vectors with Σ ≤ M over k sets: C(M + k, k)
    let space = binomial((m + sets.len()) as u64, sets.len() as u64);
    if space > SEARCH_BUDGET {
        return Err(Error::TooLarge(format!(
            "{space} slot allocations over {} sets exceed the budget of {SEARCH_BUDGET}",
            sets.len()
        )));
    }

    let qos: Vec<f64> = scenario.flows.iter().map(|f| f.qos_bps).collect();
    let upper_bound = (0..n)
        .filter(|&f| {
            let best_rate = sets.iter().map(|s| s.rate_of(f)).fold(0.0, f64::max);
            m as f64 * (best_rate * dt) / frame >= qos[f]
        })
        .count();
    let mut search = Search {
        sets: &sets,
        bits_per_slot: sets
            .iter()
            .map(|s| (0..n).map(|f| s.rate_of(f) * dt).collect())
            .collect(),
        frame,
        qos,
        upper_bound,
        counts: vec![0; sets.len()],
        best: 0,
        best_counts: vec![0; sets.len()],
    };
    search.visit(0, m);

    // Trim the witness to a locally minimal allocation.
    let best = search.best;
    let mut counts = search.best_counts.clone();
    for k in 0..counts.len() {
        while counts[k] > 0 {
            counts[k] -= 1;
            if search.completed(&counts) < best {
                counts[k] += 1;
                break;
            }
        }
    }
    let allocation = Allocation {
        counts: sets
            .into_iter()
            .zip(counts)
            .filter(|(_, c)| *c > 0)
            .collect(),
    };
    Ok((best, allocation))
}

/// Recomputes frame throughputs from a schedule without going through the
/// simulation engine's link table.
pub fn recompute_metrics(schedule: &Schedule, scenario: &Scenario) -> Result<TrialMetrics> {
    schedule.validate(scenario).map_err(Error::Invalid)?;
    let c = &scenario.constants;
    let pattern = c.antenna();
    let noise = noise_power(c);
    let dt = scenario.timing.slot_duration_s;
    let pos = |bs: usize| scenario.stations[bs].position;
    let flows = &scenario.flows;

    let mut bits = vec![0.0; flows.len()];
    for slot in 0..schedule.num_slots() {
        let on: Vec<usize> = (0..flows.len())
            .filter(|&f| schedule.cell(f, slot) == Cell::Scheduled)
            .collect();
        for &f in &on {
            let (t, r) = (flows[f].tx, flows[f].rx);
            let signal = received_power(pos(t), pos(r), pos(r), pos(t), c, &pattern, false)?;
            let mut denom = noise;
            for &h in &on {
                if h != f && flows[h].tx == r {
                    denom += scenario.stations[flows[h].tx].si_cancel * noise;
                }
            }
            for &l in &on {
                let (tl, rl) = (flows[l].tx, flows[l].rx);
                if l != f && tl != t && tl != r && rl != t && rl != r {
                    denom += received_power(pos(tl), pos(rl), pos(r), pos(t), c, &pattern, true)?;
                }
            }
            bits[f] += shannon_rate(c, signal / denom) * dt;
        }
    }
    let frame = scenario.timing.frame_duration();
    Ok(TrialMetrics::from_throughputs(
        bits.into_iter().map(|b| b / frame).collect(),
        scenario,
    ))
}

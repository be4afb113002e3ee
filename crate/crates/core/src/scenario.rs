//! Simulation inputs: station layout, flows, radio constants and frame timing.
//!
//! Scenarios are generated with [`ChaCha8Rng`] seeded through
//! `SeedableRng::seed_from_u64`, and sampled with `rand` 0.8's uniform
//! distributions. Draw order per seed:
//!
//! 1. for each station in id order: `x ~ U[0, area)`, `y ~ U[0, area)`,
//!    redrawn while it coincides with an earlier station;
//! 2. for each station in id order: `β ~ U[β_low, β_high]`;
//! 3. for each flow in id order: `tx ~ U{0..N}`, then `rx ~ U{0..N}` redrawn
//!    until `rx != tx`, then `q ~ U[q_low, q_high]`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::phy::{Position, RadioConstants};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StationRecord", from = "StationRecord")]
pub struct BaseStation {
    pub id: usize,
    pub position: Position,
    /// Self-interference cancelation level β; residual SI is `β·N0·W`.
    pub si_cancel: f64,
}

#[derive(Serialize, Deserialize)]
struct StationRecord {
    id: usize,
    x_m: f64,
    y_m: f64,
    beta: f64,
}

impl From<BaseStation> for StationRecord {
    fn from(s: BaseStation) -> Self {
        Self {
            id: s.id,
            x_m: s.position.x,
            y_m: s.position.y,
            beta: s.si_cancel,
        }
    }
}

impl From<StationRecord> for BaseStation {
    fn from(r: StationRecord) -> Self {
        Self {
            id: r.id,
            position: Position::new(r.x_m, r.y_m),
            si_cancel: r.beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: usize,
    pub tx: usize,
    pub rx: usize,
    pub qos_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTiming {
    pub slot_duration_s: f64,
    pub scheduling_phase_s: f64,
    pub num_slots: usize,
}

impl FrameTiming {
    /// 18 µs slots, 850 µs scheduling phase, 2000 slots.
    pub fn standard() -> Self {
        Self {
            slot_duration_s: 18e-6,
            scheduling_phase_s: 850e-6,
            num_slots: 2000,
        }
    }

    /// Whole frame length `T_s + M·Δt`; the denominator of every throughput.
    pub fn frame_duration(&self) -> f64 {
        self.scheduling_phase_s + self.num_slots as f64 * self.slot_duration_s
    }
}

impl Default for FrameTiming {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub stations: Vec<BaseStation>,
    pub flows: Vec<Flow>,
    pub constants: RadioConstants,
    pub timing: FrameTiming,
    /// Contention threshold σ on relative interference.
    pub sigma: f64,
}

impl Scenario {
    pub fn num_flows(&self) -> usize {
        self.flows.len()
    }

    /// Every broken invariant, or `Ok` when there are none.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let v = violations(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    /// Like [`Scenario::validate`] but folded into the crate error type.
    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().map_err(Error::Invalid)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Checks all scenario invariants and returns every violation found.
pub fn validate(scenario: &Scenario) -> std::result::Result<(), Vec<Violation>> {
    scenario.validate()
}

fn violations(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.stations.len();

    for (i, bs) in s.stations.iter().enumerate() {
        if bs.id != i {
            out.push(Violation::new(
                "station-id",
                format!("station at index {i} has id {}", bs.id),
            ));
        }
        if !(bs.si_cancel >= 0.0 && bs.si_cancel.is_finite()) {
            out.push(Violation::new(
                "negative-beta",
                format!("station {} has beta {}", bs.id, bs.si_cancel),
            ));
        }
        if !(bs.position.x.is_finite() && bs.position.y.is_finite()) {
            out.push(Violation::new(
                "bad-position",
                format!("station {} is not at a finite position", bs.id),
            ));
        }
        for other in &s.stations[..i] {
            if other.position == bs.position {
                out.push(Violation::new(
                    "colocated-bs",
                    format!("stations {} and {} share a position", other.id, bs.id),
                ));
            }
        }
    }

    for (i, f) in s.flows.iter().enumerate() {
        if f.id != i {
            out.push(Violation::new(
                "flow-id",
                format!("flow at index {i} has id {}", f.id),
            ));
        }
        if f.tx >= n || f.rx >= n {
            out.push(Violation::new(
                "unknown-station",
                format!("flow {} references {}->{} with {n} stations", f.id, f.tx, f.rx),
            ));
        }
        if f.tx == f.rx {
            out.push(Violation::new(
                "self-flow",
                format!("flow {} starts and ends at station {}", f.id, f.tx),
            ));
        }
        if !(f.qos_bps > 0.0 && f.qos_bps.is_finite()) {
            out.push(Violation::new(
                "bad-qos",
                format!("flow {} has qos {}", f.id, f.qos_bps),
            ));
        }
    }

    for msg in s.constants.check() {
        out.push(Violation::new("bad-constants", msg));
    }
    let t = &s.timing;
    if !(t.slot_duration_s > 0.0 && t.slot_duration_s.is_finite()) {
        out.push(Violation::new(
            "bad-timing",
            format!("slot duration {}", t.slot_duration_s),
        ));
    }
    if !(t.scheduling_phase_s >= 0.0 && t.scheduling_phase_s.is_finite()) {
        out.push(Violation::new(
            "bad-timing",
            format!("scheduling phase {}", t.scheduling_phase_s),
        ));
    }
    if t.num_slots == 0 {
        out.push(Violation::new("bad-timing", "frame has no slots"));
    }
    if !(s.sigma > 0.0) {
        out.push(Violation::new("bad-sigma", format!("sigma {}", s.sigma)));
    }
    out
}

/// Everything [`generate`] needs besides the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub num_bs: usize,
    /// Side of the square deployment area, meters.
    pub area_m: f64,
    pub num_flows: usize,
    pub qos_range_bps: (f64, f64),
    pub beta_range: (f64, f64),
    pub constants: RadioConstants,
    pub timing: FrameTiming,
    pub sigma: f64,
}

impl Default for GenerationParams {
    /// Ten stations in a 100 m square, QoS in [1, 3] Gbps, β in [2, 4],
    /// σ = 10⁻³, with the default radio constants and frame timing.
    fn default() -> Self {
        Self {
            num_bs: 10,
            area_m: 100.0,
            num_flows: 30,
            qos_range_bps: (1e9, 3e9),
            beta_range: (2.0, 4.0),
            constants: RadioConstants::standard(),
            timing: FrameTiming::standard(),
            sigma: 1e-3,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} range [{lo}, {hi}] is empty")))
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Draws a scenario; a pure function of `(seed, params)`.
pub fn generate(seed: u64, params: &GenerationParams) -> Result<Scenario> {
    if params.num_bs < 2 {
        return Err(Error::Config(format!(
            "need at least 2 stations, got {}",
            params.num_bs
        )));
    }
    if !(params.area_m > 0.0 && params.area_m.is_finite()) {
        return Err(Error::Config(format!("area side {} m", params.area_m)));
    }
    check_range("qos", params.qos_range_bps)?;
    check_range("beta", params.beta_range)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<Position> = Vec::with_capacity(params.num_bs);
    while positions.len() < params.num_bs {
        let p = Position::new(
            rng.gen_range(0.0..params.area_m),
            rng.gen_range(0.0..params.area_m),
        );
        if !positions.contains(&p) {
            positions.push(p);
        }
    }
    let betas: Vec<f64> = (0..params.num_bs)
        .map(|_| uniform(&mut rng, params.beta_range))
        .collect();
    let stations = positions
        .into_iter()
        .zip(betas)
        .enumerate()
        .map(|(id, (position, si_cancel))| BaseStation {
            id,
            position,
            si_cancel,
        })
        .collect();

    let flows = (0..params.num_flows)
        .map(|id| {
            let tx = rng.gen_range(0..params.num_bs);
            let mut rx = rng.gen_range(0..params.num_bs);
            while rx == tx {
                rx = rng.gen_range(0..params.num_bs);
            }
            Flow {
                id,
                tx,
                rx,
                qos_bps: uniform(&mut rng, params.qos_range_bps),
            }
        })
        .collect();

    let scenario = Scenario {
        stations,
        flows,
        constants: params.constants,
        timing: params.timing,
        sigma: params.sigma,
    };
    scenario.ensure_valid()?;
    Ok(scenario)
}

#![allow(dead_code)]

use fdbackhaul::{
    generate, BaseStation, Flow, FrameTiming, GenerationParams, Position, RadioConstants, Scenario,
};

/// Corners of a 50 m square: 0 = (0,0), 1 = (50,0), 2 = (0,50), 3 = (50,50).
pub fn square(betas: [f64; 4], flows: &[(usize, usize, f64)]) -> Scenario {
    let corners = [(0.0, 0.0), (50.0, 0.0), (0.0, 50.0), (50.0, 50.0)];
    Scenario {
        stations: corners
            .iter()
            .zip(betas)
            .enumerate()
            .map(|(id, (&(x, y), beta))| BaseStation {
                id,
                position: Position::new(x, y),
                si_cancel: beta,
            })
            .collect(),
        flows: flows
            .iter()
            .enumerate()
            .map(|(id, &(tx, rx, qos_bps))| Flow { id, tx, rx, qos_bps })
            .collect(),
        constants: RadioConstants::standard(),
        timing: FrameTiming::standard(),
        sigma: 1e-3,
    }
}

pub fn with_slots(mut s: Scenario, num_slots: usize) -> Scenario {
    s.timing.num_slots = num_slots;
    s
}

/// Default generation with a chosen flow count.
pub fn random(seed: u64, num_flows: usize) -> Scenario {
    let params = GenerationParams {
        num_flows,
        ..GenerationParams::default()
    };
    generate(seed, &params).unwrap()
}

/// Small instances the exact solver handles: up to 4 flows, 3 to 6 slots,
/// QoS scaled so demands land around one to seven slots.
pub fn tiny(index: u64) -> Scenario {
    let params = GenerationParams {
        num_bs: 3 + (index % 3) as usize,
        num_flows: 1 + (index % 4) as usize,
        qos_range_bps: (0.1e9, 1.5e9),
        timing: FrameTiming {
            num_slots: 3 + ((index / 4) % 4) as usize,
            ..FrameTiming::standard()
        },
        ..GenerationParams::default()
    };
    generate(0x7157_u64.wrapping_mul(31).wrapping_add(index), &params).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    ((a - b) / b).abs() <= tol
}

//! Line-of-sight mmWave link model.
//!
//! Everything here works in SI linear units (watts, hertz, meters, seconds).
//! Decibel values only appear in constructors and conversion helpers.

mod rate;

pub use rate::{check_feasible, slot_rate, solo_rate, LinkBudget};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// 60 GHz carrier, rounded to the customary 5 mm wavelength.
pub const DEFAULT_WAVELENGTH_M: f64 = 0.005;

/// Main lobe width as a multiple of the half-power beamwidth.
pub const MAINLOBE_FACTOR: f64 = 2.6;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a noise density in dBm/MHz to W/Hz.
pub fn dbm_per_mhz_to_w_per_hz(dbm_per_mhz: f64) -> f64 {
    dbm_to_watts(dbm_per_mhz) / 1e6
}

pub fn w_per_hz_to_dbm_per_mhz(w_per_hz: f64) -> f64 {
    watts_to_dbm(w_per_hz * 1e6)
}

/// Free-space constant `(λ/4π)²`.
pub fn friis_constant(wavelength_m: f64) -> f64 {
    (wavelength_m / (4.0 * PI)).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConstants {
    pub wavelength_m: f64,
    pub tx_power_w: f64,
    pub pathloss_exponent: f64,
    /// Multi-user interference factor ρ.
    pub mui_factor: f64,
    /// Transceiver efficiency η, strictly inside (0, 1).
    pub efficiency: f64,
    pub bandwidth_hz: f64,
    /// One-sided noise power spectral density N0.
    pub noise_psd_w_per_hz: f64,
    /// Friis constant k multiplying every received power.
    pub pathloss_constant: f64,
    pub halfpower_beamwidth_deg: f64,
}

impl RadioConstants {
    /// 60 GHz backhaul defaults: 1 W, n = 2, ρ = 1, η = 0.5, 1200 MHz,
    /// −134 dBm/MHz, 30° half-power beamwidth.
    pub fn standard() -> Self {
        Self {
            wavelength_m: DEFAULT_WAVELENGTH_M,
            tx_power_w: 1.0,
            pathloss_exponent: 2.0,
            mui_factor: 1.0,
            efficiency: 0.5,
            bandwidth_hz: 1200e6,
            noise_psd_w_per_hz: dbm_per_mhz_to_w_per_hz(-134.0),
            pathloss_constant: friis_constant(DEFAULT_WAVELENGTH_M),
            halfpower_beamwidth_deg: 30.0,
        }
    }

    pub fn antenna(&self) -> AntennaPattern {
        AntennaPattern::from_beamwidth(self.halfpower_beamwidth_deg)
    }

    /// Returns one message per broken invariant.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let positive = [
            ("wavelength_m", self.wavelength_m),
            ("tx_power_w", self.tx_power_w),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_psd_w_per_hz", self.noise_psd_w_per_hz),
            ("pathloss_constant", self.pathloss_constant),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.efficiency > 0.0 && self.efficiency < 1.0) {
            out.push(format!("efficiency must lie in (0,1), got {}", self.efficiency));
        }
        if !(self.pathloss_exponent >= 1.0 && self.pathloss_exponent.is_finite()) {
            out.push(format!(
                "pathloss_exponent must be >= 1, got {}",
                self.pathloss_exponent
            ));
        }
        if !(self.mui_factor >= 0.0 && self.mui_factor.is_finite()) {
            out.push(format!("mui_factor must be nonnegative, got {}", self.mui_factor));
        }
        let max_bw = 360.0 / MAINLOBE_FACTOR;
        if !(self.halfpower_beamwidth_deg > 0.0 && self.halfpower_beamwidth_deg < max_bw) {
            out.push(format!(
                "halfpower_beamwidth_deg must lie in (0,{max_bw:.3}), got {}",
                self.halfpower_beamwidth_deg
            ));
        }
        out
    }
}

impl Default for RadioConstants {
    fn default() -> Self {
        Self::standard()
    }
}

/// Cone-plus-sidelobe directional antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub g0_db: f64,
    pub mainlobe_width_deg: f64,
    pub sidelobe_gain_db: f64,
    pub halfpower_beamwidth_deg: f64,
}

impl AntennaPattern {
    pub fn from_beamwidth(halfpower_beamwidth_deg: f64) -> Self {
        let half = (halfpower_beamwidth_deg / 2.0).to_radians();
        Self {
            g0_db: 10.0 * (1.6162 / half.sin()).powi(2).log10(),
            mainlobe_width_deg: MAINLOBE_FACTOR * halfpower_beamwidth_deg,
            sidelobe_gain_db: -0.4111 * halfpower_beamwidth_deg.ln() - 10.579,
            halfpower_beamwidth_deg,
        }
    }

    /// Gain in dB at `theta` degrees off boresight. No range check.
    pub fn gain_db(&self, theta: f64) -> f64 {
        if theta <= self.mainlobe_width_deg / 2.0 {
            self.g0_db - 3.01 * (2.0 * theta / self.halfpower_beamwidth_deg).powi(2)
        } else {
            self.sidelobe_gain_db
        }
    }
}

/// Linear antenna gain at `theta` degrees off boresight, `theta` in [0, 180].
pub fn antenna_gain(pattern: &AntennaPattern, theta: f64) -> Result<f64> {
    if !(0.0..=180.0).contains(&theta) {
        return Err(Error::Domain(format!(
            "off-boresight angle {theta} outside [0,180] degrees"
        )));
    }
    Ok(db_to_linear(pattern.gain_db(theta)))
}

/// Planar angle in degrees between the rays `antenna_at → aimed_at` and
/// `antenna_at → other`.
pub fn boresight_angle(antenna_at: Position, aimed_at: Position, other: Position) -> Result<f64> {
    let (ax, ay) = (aimed_at.x - antenna_at.x, aimed_at.y - antenna_at.y);
    let (ox, oy) = (other.x - antenna_at.x, other.y - antenna_at.y);
    if ax == 0.0 && ay == 0.0 {
        return Err(Error::DegenerateGeometry(
            "antenna aimed at its own position".into(),
        ));
    }
    if ox == 0.0 && oy == 0.0 {
        return Err(Error::DegenerateGeometry(
            "peer colocated with the antenna".into(),
        ));
    }
    let cross = ax * oy - ay * ox;
    let dot = ax * ox + ay * oy;
    Ok(cross.atan2(dot).abs().to_degrees().clamp(0.0, 180.0))
}

/// Power at `rx` from `tx`, each antenna steered at its own aim point.
///
/// `is_interference` applies the MUI factor ρ.
pub fn received_power(
    tx: Position,
    tx_aim: Position,
    rx: Position,
    rx_aim: Position,
    constants: &RadioConstants,
    pattern: &AntennaPattern,
    is_interference: bool,
) -> Result<f64> {
    let d = tx.distance(&rx);
    if d == 0.0 {
        return Err(Error::Domain("zero transmitter-receiver distance".into()));
    }
    let g_t = antenna_gain(pattern, boresight_angle(tx, tx_aim, rx)?)?;
    let g_r = antenna_gain(pattern, boresight_angle(rx, rx_aim, tx)?)?;
    let p = constants.pathloss_constant
        * constants.tx_power_w
        * g_t
        * g_r
        * d.powf(-constants.pathloss_exponent);
    Ok(if is_interference {
        p * constants.mui_factor
    } else {
        p
    })
}

/// Thermal noise power N0·W.
pub fn noise_power(constants: &RadioConstants) -> f64 {
    constants.noise_psd_w_per_hz * constants.bandwidth_hz
}

/// Shannon rate η·W·log2(1 + sinr).
pub fn shannon_rate(constants: &RadioConstants, sinr: f64) -> f64 {
    constants.efficiency * constants.bandwidth_hz * (1.0 + sinr).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EAST: Position = Position::new(10.0, 0.0);
    const ORIGIN: Position = Position::new(0.0, 0.0);

    fn pattern30() -> AntennaPattern {
        AntennaPattern::from_beamwidth(30.0)
    }

    // Reference values evaluated independently with Python's math module.
    #[test]
    fn pattern_closed_forms_at_30_degrees() {
        let p = pattern30();
        assert!((p.g0_db - 15.909_977_437).abs() < 1e-8, "{}", p.g0_db);
        assert!((p.sidelobe_gain_db - (-11.977_232_2)).abs() < 1e-6);
        assert_eq!(p.mainlobe_width_deg, 78.0);
    }

    #[test]
    fn gain_examples() {
        let p = pattern30();
        let g0 = antenna_gain(&p, 0.0).unwrap();
        assert!((g0 - 38.993_996_08).abs() < 1e-7, "{g0}");
        let half = antenna_gain(&p, 15.0).unwrap();
        assert!((10.0 * half.log10() - 12.899_977_437).abs() < 1e-8);
        let side = antenna_gain(&p, 100.0).unwrap();
        assert!((10.0 * side.log10() - (-11.977_232_2)).abs() < 1e-6);
    }

    #[test]
    fn gain_rejects_out_of_range() {
        let p = pattern30();
        assert!(matches!(antenna_gain(&p, -0.1), Err(Error::Domain(_))));
        assert!(matches!(antenna_gain(&p, 180.5), Err(Error::Domain(_))));
        assert!(antenna_gain(&p, f64::NAN).is_err());
        assert!(antenna_gain(&p, 180.0).is_ok());
    }

    #[test]
    fn boresight_cardinal_directions() {
        let north = Position::new(0.0, 3.0);
        let west = Position::new(-4.0, 0.0);
        assert_eq!(boresight_angle(ORIGIN, EAST, Position::new(2.0, 0.0)).unwrap(), 0.0);
        assert!((boresight_angle(ORIGIN, EAST, north).unwrap() - 90.0).abs() < 1e-12);
        assert!((boresight_angle(ORIGIN, EAST, west).unwrap() - 180.0).abs() < 1e-12);
        assert!(matches!(
            boresight_angle(ORIGIN, EAST, ORIGIN),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn power_law_and_alignment() {
        let c = RadioConstants::standard();
        let p = c.antenna();
        let near = received_power(ORIGIN, EAST, EAST, ORIGIN, &c, &p, false).unwrap();
        let far_rx = Position::new(20.0, 0.0);
        let far = received_power(ORIGIN, far_rx, far_rx, ORIGIN, &c, &p, false).unwrap();
        assert!((near / far - 4.0).abs() < 1e-12);

        let g0 = db_to_linear(p.g0_db);
        let expect = c.pathloss_constant * c.tx_power_w * g0 * g0 / 100.0;
        assert!((near - expect).abs() / expect < 1e-14);

        // rho = 1 leaves interference power unchanged.
        let intf = received_power(ORIGIN, EAST, EAST, ORIGIN, &c, &p, true).unwrap();
        assert_eq!(intf, near);
        let scaled = RadioConstants { mui_factor: 0.5, ..c };
        let half = received_power(ORIGIN, EAST, EAST, ORIGIN, &scaled, &p, true).unwrap();
        assert!((half - 0.5 * near).abs() < 1e-24);

        assert!(matches!(
            received_power(ORIGIN, EAST, ORIGIN, EAST, &c, &p, false),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn received_power_symmetric_when_aligned() {
        let c = RadioConstants::standard();
        let p = c.antenna();
        let a = Position::new(3.0, 7.0);
        let b = Position::new(41.0, -12.0);
        let ab = received_power(a, b, b, a, &c, &p, false).unwrap();
        let ba = received_power(b, a, a, b, &c, &p, false).unwrap();
        assert!((ab - ba).abs() / ab < 1e-14);
    }

    #[test]
    fn noise_examples() {
        let c = RadioConstants::standard();
        let n = noise_power(&c);
        assert!((watts_to_dbm(n) - (-103.208_187_54)).abs() < 1e-8);
        assert!((n - 4.777_286_047e-14).abs() < 1e-22, "{n}");
        let zero = RadioConstants { bandwidth_hz: 0.0, ..c };
        assert_eq!(noise_power(&zero), 0.0);
        let double = RadioConstants { bandwidth_hz: 2.0 * c.bandwidth_hz, ..c };
        assert!((noise_power(&double) - 2.0 * n).abs() < 1e-27);
    }

    #[test]
    fn standard_constants_are_valid() {
        let c = RadioConstants::standard();
        assert!(c.check().is_empty(), "{:?}", c.check());
        assert!((c.pathloss_constant - 1.583_143_494e-7).abs() < 1e-16);
        let bad = RadioConstants {
            efficiency: 1.0,
            halfpower_beamwidth_deg: 140.0,
            ..c
        };
        assert_eq!(bad.check().len(), 2);
    }

    #[test]
    fn db_helpers_roundtrip() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        let psd = dbm_per_mhz_to_w_per_hz(-134.0);
        assert!((w_per_hz_to_dbm_per_mhz(psd) + 134.0).abs() < 1e-9);
    }
}

use crate::error::{Error, Result};
use crate::phy::{noise_power, received_power, shannon_rate, RadioConstants};
use crate::scenario::Scenario;

/// Per-scenario table of every desired-signal and cross-link power.
///
/// Built once per scenario so schedulers can evaluate slot rates in
/// `O(k²)` for `k` concurrently active flows.
#[derive(Debug, Clone)]
pub struct LinkBudget {
    constants: RadioConstants,
    noise_w: f64,
    /// `P_r(t_f, r_f)` per flow.
    signal: Vec<f64>,
    /// `β_{t_f}·N0W`: what flow `f`'s transmitter leaks into its own receiver.
    rsi: Vec<f64>,
    /// Row-major `[l][f]`: MUI power from `t_l` at `r_f`, zero where `t_l == r_f`.
    mui: Vec<f64>,
    endpoints: Vec<(usize, usize)>,
}

impl LinkBudget {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let constants = scenario.constants;
        let pattern = constants.antenna();
        let noise_w = noise_power(&constants);
        let n = scenario.flows.len();
        let pos = |bs: usize| -> Result<_> {
            scenario
                .stations
                .get(bs)
                .map(|s| s.position)
                .ok_or_else(|| Error::Contract(format!("flow references unknown station {bs}")))
        };

        let mut signal = Vec::with_capacity(n);
        let mut rsi = Vec::with_capacity(n);
        let mut endpoints = Vec::with_capacity(n);
        for f in &scenario.flows {
            let (t, r) = (pos(f.tx)?, pos(f.rx)?);
            signal.push(received_power(t, r, r, t, &constants, &pattern, false)?);
            rsi.push(scenario.stations[f.tx].si_cancel * noise_w);
            endpoints.push((f.tx, f.rx));
        }

        let mut mui = vec![0.0; n * n];
        for (l, fl) in scenario.flows.iter().enumerate() {
            for (f, ff) in scenario.flows.iter().enumerate() {
                if l == f || fl.tx == ff.rx {
                    continue;
                }
                mui[l * n + f] = received_power(
                    pos(fl.tx)?,
                    pos(fl.rx)?,
                    pos(ff.rx)?,
                    pos(ff.tx)?,
                    &constants,
                    &pattern,
                    true,
                )?;
            }
        }

        Ok(Self {
            constants,
            noise_w,
            signal,
            rsi,
            mui,
            endpoints,
        })
    }

    pub fn num_flows(&self) -> usize {
        self.signal.len()
    }

    pub fn noise(&self) -> f64 {
        self.noise_w
    }

    pub fn signal(&self, f: usize) -> f64 {
        self.signal[f]
    }

    /// Residual self-interference `β_{t_f}·N0W` that flow `f`'s transmitter
    /// imposes on whichever flow its transmitter is receiving.
    pub fn rsi(&self, f: usize) -> f64 {
        self.rsi[f]
    }

    /// MUI power from flow `l`'s transmitter at flow `f`'s receiver, with both
    /// antennas steered along their own flows. Zero when `t_l == r_f`.
    pub fn mui(&self, l: usize, f: usize) -> f64 {
        self.mui[l * self.num_flows() + f]
    }

    pub fn endpoints(&self, f: usize) -> (usize, usize) {
        self.endpoints[f]
    }

    pub fn constants(&self) -> &RadioConstants {
        &self.constants
    }

    /// Interference-free Shannon rate of flow `f`.
    pub fn solo_rate(&self, f: usize) -> f64 {
        shannon_rate(&self.constants, self.signal[f] / self.noise_w)
    }

    /// Rate of `f` when exactly the flows in `active` transmit.
    ///
    /// `active` must be feasible; this is not checked. Interference terms are
    /// summed in the order `active` lists them, RSI before MUI.
    pub fn rate_in(&self, f: usize, active: &[usize]) -> f64 {
        if !active.contains(&f) {
            return 0.0;
        }
        let (t_f, r_f) = self.endpoints[f];
        let mut denom = self.noise_w;
        for &h in active {
            if h != f && self.endpoints[h].0 == r_f {
                denom += self.rsi[h];
            }
        }
        for &l in active {
            if l != f && !shares_node(self.endpoints[l], (t_f, r_f)) {
                denom += self.mui(l, f);
            }
        }
        shannon_rate(&self.constants, self.signal[f] / denom)
    }

    /// Rates of every flow in `active`, in the same order.
    pub fn rates(&self, active: &[usize]) -> Vec<f64> {
        active.iter().map(|&f| self.rate_in(f, active)).collect()
    }

    /// Instantaneous sum rate of `active`, accumulated in listing order.
    pub fn sum_rate(&self, active: &[usize]) -> f64 {
        active.iter().map(|&f| self.rate_in(f, active)).sum()
    }
}

pub(crate) fn shares_node(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1
}

/// Checks the full-duplex hard constraints on a concurrent set: no station
/// transmits for two flows or receives for two flows. Together these cap
/// each station at two flows with opposite roles.
pub fn check_feasible(active: &[usize], scenario: &Scenario) -> Result<()> {
    for (i, &a) in active.iter().enumerate() {
        let fa = scenario
            .flows
            .get(a)
            .ok_or_else(|| Error::Contract(format!("unknown flow {a}")))?;
        for &b in &active[i + 1..] {
            let fb = scenario
                .flows
                .get(b)
                .ok_or_else(|| Error::Contract(format!("unknown flow {b}")))?;
            if a == b {
                return Err(Error::Contract(format!("flow {a} listed twice")));
            }
            if fa.tx == fb.tx {
                return Err(Error::Contract(format!(
                    "flows {a} and {b} both transmit from station {}",
                    fa.tx
                )));
            }
            if fa.rx == fb.rx {
                return Err(Error::Contract(format!(
                    "flows {a} and {b} both receive at station {}",
                    fa.rx
                )));
            }
        }
    }
    Ok(())
}

/// Rate of `flow` in a slot where exactly `active` transmits.
pub fn slot_rate(flow: usize, active: &[usize], scenario: &Scenario) -> Result<f64> {
    check_feasible(active, scenario)?;
    Ok(LinkBudget::new(scenario)?.rate_in(flow, active))
}

pub fn solo_rate(flow: usize, scenario: &Scenario) -> Result<f64> {
    if flow >= scenario.flows.len() {
        return Err(Error::Contract(format!("unknown flow {flow}")));
    }
    Ok(LinkBudget::new(scenario)?.solo_rate(flow))
}

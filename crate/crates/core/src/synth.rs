//! Seeded synthetic vibration signals for bearing health states.
//!
//! A recording is white Gaussian noise, plus an optional shaft-rate tone,
//! plus (for fault states) a periodic train of impacts, each ringing the
//! structure at `resonance_hz` and dying off as `exp(-decay·t)`.
//!
//! The shaft tone matters for the histogram features: its arcsine-shaped
//! amplitude distribution keeps every bin populated, whereas the thin tails
//! of pure noise regularly leave the outermost Scott bins empty.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::signal_io::SignalSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HealthState {
    Normal,
    Inner,
    Ball,
    Outer,
}

impl HealthState {
    pub const ALL: [HealthState; 4] = [Self::Normal, Self::Inner, Self::Ball, Self::Outer];

    pub fn name(self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::Inner => "inner",
            Self::Ball => "ball",
            Self::Outer => "outer",
        }
    }
}

impl fmt::Display for HealthState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HealthState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown health state '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub state: HealthState,
    /// Impacts per second; 0 for a healthy machine.
    pub impulse_rate_hz: f64,
    pub resonance_hz: f64,
    /// Envelope decay constant, 1/s.
    pub decay: f64,
    pub impulse_amp: f64,
    pub noise_std: f64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub shaft_hz: f64,
    #[serde(default)]
    pub shaft_amp: f64,
}

/// Sample rate of the default suite, Hz.
pub const SUITE_SAMPLE_RATE: f64 = 12_000.0;

impl FaultSpec {
    /// Healthy baseline of the default suite.
    pub fn normal() -> Self {
        FaultSpec {
            state: HealthState::Normal,
            impulse_rate_hz: 0.0,
            resonance_hz: 3100.0,
            decay: 200.0,
            impulse_amp: 0.0,
            noise_std: 0.02,
            duration_s: 0.35,
            sample_rate_hz: SUITE_SAMPLE_RATE,
            shaft_hz: 29.17,
            shaft_amp: 1.0,
        }
    }

    fn fault(state: HealthState, rate: f64, amp: f64) -> Self {
        FaultSpec {
            state,
            impulse_rate_hz: rate,
            impulse_amp: amp,
            ..Self::normal()
        }
    }

    /// Every violated constraint, one message each.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let fields = [
            ("impulse_rate_hz", self.impulse_rate_hz),
            ("resonance_hz", self.resonance_hz),
            ("decay", self.decay),
            ("impulse_amp", self.impulse_amp),
            ("noise_std", self.noise_std),
            ("duration_s", self.duration_s),
            ("sample_rate_hz", self.sample_rate_hz),
            ("shaft_hz", self.shaft_hz),
            ("shaft_amp", self.shaft_amp),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                out.push(format!("{name}: must be finite and >= 0, got {v}"));
            }
        }
        if self.sample_rate_hz <= 0.0 {
            out.push("sample_rate_hz: must be > 0".into());
        }
        if self.resonance_hz >= self.sample_rate_hz / 2.0 {
            out.push(format!(
                "resonance_hz: {} must be below Nyquist ({})",
                self.resonance_hz,
                self.sample_rate_hz / 2.0
            ));
        }
        if self.shaft_hz >= self.sample_rate_hz / 2.0 {
            out.push(format!("shaft_hz: {} must be below Nyquist", self.shaft_hz));
        }
        let samples = self.duration_s * self.sample_rate_hz;
        if samples.is_nan() || samples < 1000.0 {
            out.push(format!(
                "duration_s: duration_s * sample_rate_hz must be >= 1000, got {}",
                samples
            ));
        }
        if self.impulse_amp > 0.0 && (self.impulse_rate_hz <= 0.0 || self.decay <= 0.0) {
            out.push("impulse_rate_hz: impacts need a positive rate and decay".into());
        }
        if self.noise_std == 0.0 && self.shaft_amp == 0.0 && self.impulse_amp == 0.0 {
            out.push("noise_std: signal would be constant".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }

    pub fn len(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Four-state suite: normal, inner-race, ball and outer-race faults at
/// 12 kHz, 0.35 s each, with distinct impact rates and strengths.
pub fn default_suite() -> Vec<FaultSpec> {
    vec![
        FaultSpec::normal(),
        FaultSpec::fault(HealthState::Inner, 162.0, 1.4),
        FaultSpec::fault(HealthState::Ball, 70.0, 1.1),
        FaultSpec::fault(HealthState::Outer, 107.0, 1.3),
    ]
}

/// `n` i.i.d. `N(mean, std²)` samples.
pub fn gen_gaussian_signal(n: usize, mean: f64, std: f64, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooFewSamples { got: n });
    }
    if !(std.is_finite() && std >= 0.0 && mean.is_finite()) {
        return Err(Error::invalid(format!(
            "bad Gaussian parameters mean={mean} std={std}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    Ok((0..n).map(|_| mean + std * rng.normal()).collect())
}

/// Ignore ringing below this fraction of the impact amplitude.
const RING_CUTOFF: f64 = 1e-6;

pub fn gen_bearing_state(spec: &FaultSpec, seed: u64) -> Result<SignalSeries> {
    spec.validate()?;
    let n = spec.len();
    let fs = spec.sample_rate_hz;
    let mut rng = SeededRng::new(seed);
    let mut x: Vec<f64> = (0..n).map(|_| spec.noise_std * rng.normal()).collect();

    if spec.shaft_amp > 0.0 {
        let phase = 2.0 * PI * rng.uniform();
        let w = 2.0 * PI * spec.shaft_hz / fs;
        for (i, v) in x.iter_mut().enumerate() {
            *v += spec.shaft_amp * (w * i as f64 + phase).sin();
        }
    }

    if spec.impulse_amp > 0.0 {
        let period = fs / spec.impulse_rate_hz;
        let ring = ((-RING_CUTOFF.ln()) / spec.decay * fs).ceil() as usize;
        let w = 2.0 * PI * spec.resonance_hz / fs;
        let mut t0 = period * rng.uniform();
        while t0 < n as f64 {
            let start = t0.ceil() as usize;
            let end = (start + ring).min(n);
            for (i, v) in x.iter_mut().enumerate().take(end).skip(start) {
                let dt = i as f64 - t0;
                *v += spec.impulse_amp * (-spec.decay * dt / fs).exp() * (w * dt).sin();
            }
            t0 += period;
        }
    }

    let name = spec.state.name();
    SignalSeries::new(x, fs, name, format!("synth-{name}"))
}

/// One recording per spec; spec `i` uses stream `i` of `seed`.
pub fn gen_suite(specs: &[FaultSpec], seed: u64) -> Result<Vec<SignalSeries>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let stream = SeededRng::derived(seed, i as u64).next_u64();
            gen_bearing_state(s, stream).map_err(|e| e.in_state(s.state.name()))
        })
        .collect()
}

//! Synthetic minute-level household load generator.
//!
//! Stands in for proprietary smart-meter data. Four documented parametric
//! profiles are available; aggregating any of them across households gives a
//! series with clear daily periodicity:
//!
//! * `ac`     - duty-cycled compressor (30-minute cycle) whose duty follows a
//!              temperature-like envelope peaking mid-afternoon.
//! * `ev`     - sparse charging blocks (3.3 kW), most minutes exactly zero.
//! * `lights` - evening plateau between 17:00 and 23:30 with ramps.
//! * `fridge` - short compressor cycles with a per-household period.
//!
//! Per-household parameters are drawn once up front, so with zero noise each
//! non-EV household trace repeats with a period of one day (1440 minutes).
//! Identical seeds yield identical tables.

use crate::error::{Error, Result};
use crate::numerics::Rng;
use crate::pipeline::{RawRow, RawTable};

/// 2020-01-01T00:00:00Z, the fixed origin of generated tables.
pub const SYNTH_START_EPOCH: i64 = 1_577_836_800;

pub const PROFILES: [&str; 4] = ["ac", "ev", "lights", "fridge"];

const MINUTES_PER_DAY: usize = 1440;

struct Household {
    scale: f64,
    phase: usize,
    period: usize,
    // EV charging blocks as global minute ranges
    sessions: Vec<(usize, usize)>,
}

fn draw_household(profile: &str, days: usize, rng: &mut Rng) -> Household {
    match profile {
        "ac" => Household {
            scale: rng.uniform(0.9, 1.4),
            phase: rng.below(30),
            period: 30,
            sessions: Vec::new(),
        },
        "lights" => Household {
            scale: rng.uniform(0.8, 1.2),
            phase: 0,
            period: MINUTES_PER_DAY,
            sessions: Vec::new(),
        },
        "fridge" => Household {
            scale: rng.uniform(0.10, 0.15),
            period: 40 + rng.below(31),
            phase: 0,
            sessions: Vec::new(),
        },
        "ev" => {
            let mut sessions = Vec::new();
            for day in 0..days {
                if rng.next_f64() < 0.35 {
                    let start = day * MINUTES_PER_DAY + 1020 + rng.below(240);
                    let duration = 90 + rng.below(150);
                    sessions.push((start, start + duration));
                }
            }
            Household {
                scale: 3.3,
                phase: 0,
                period: 1,
                sessions,
            }
        }
        _ => unreachable!("profile validated by caller"),
    }
}

impl Household {
    fn value_at(&self, profile: &str, minute: usize) -> f64 {
        let m = minute % MINUTES_PER_DAY;
        match profile {
            "ac" => {
                // Duty rises from 08:00, peaks at 16:00, back to base at midnight.
                let envelope = if m >= 480 {
                    (std::f64::consts::PI * (m - 480) as f64 / 960.0).sin().max(0.0)
                } else {
                    0.0
                };
                let duty = 0.08 + 0.72 * envelope;
                let pos = ((minute + self.phase) % self.period) as f64;
                if pos < self.period as f64 * duty {
                    self.scale
                } else {
                    0.02
                }
            }
            "lights" => {
                let plateau = 0.3 * self.scale;
                let v = if (1020..1080).contains(&m) {
                    plateau * (m - 1020) as f64 / 60.0
                } else if (1080..1350).contains(&m) {
                    plateau
                } else if (1350..1410).contains(&m) {
                    plateau * (1410 - m) as f64 / 60.0
                } else {
                    0.0
                };
                v + 0.02
            }
            "fridge" => {
                let on_minutes = (self.period as f64 * 0.35) as usize;
                if (minute + self.phase) % self.period < on_minutes {
                    self.scale
                } else {
                    0.01
                }
            }
            "ev" => {
                if self
                    .sessions
                    .iter()
                    .any(|&(start, end)| minute >= start && minute < end)
                {
                    self.scale
                } else {
                    0.0
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Generates a minute-level raw table for one appliance profile. `noise`
/// adds uniform jitter of that amplitude (kW) to every reading, clamped at
/// zero; pass 0.0 for exactly repeating daily patterns.
pub fn synth_generate(
    profile: &str,
    days: usize,
    households: usize,
    noise: f64,
    rng: &mut Rng,
) -> Result<RawTable> {
    if !PROFILES.contains(&profile) {
        return Err(Error::UnknownProfile(profile.to_string()));
    }
    if days == 0 {
        return Err(Error::ZeroDimension { what: "days" });
    }
    if households == 0 {
        return Err(Error::ZeroDimension { what: "households" });
    }
    let minutes = days * MINUTES_PER_DAY;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(households);
    for _ in 0..households {
        let hh = draw_household(profile, days, rng);
        let mut values = Vec::with_capacity(minutes);
        for minute in 0..minutes {
            let mut v = hh.value_at(profile, minute);
            if noise > 0.0 {
                v = (v + rng.uniform(-noise, noise)).max(0.0);
            }
            values.push(v);
        }
        columns.push(values);
    }
    let mut rows = Vec::with_capacity(minutes * households);
    for minute in 0..minutes {
        for (h, column) in columns.iter().enumerate() {
            rows.push(RawRow {
                timestamp: SYNTH_START_EPOCH + 60 * minute as i64,
                household_id: format!("h{:03}", h + 1),
                readings: vec![Some(column[minute])],
            });
        }
    }
    Ok(RawTable {
        appliances: vec![profile.to_string()],
        rows,
    })
}

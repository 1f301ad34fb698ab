//! Frame structures and transport-block sizing.

use std::fmt;
use std::str::FromStr;

use crate::link::mcs::McsEntry;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulerKind {
    /// LTE: resource blocks shared in frequency, whole-subframe TTI.
    RbRoundRobin,
    /// mmWave: the subframe's data symbols shared in time.
    TtiRoundRobin,
}

impl SchedulerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::RbRoundRobin => "rb_round_robin",
            SchedulerKind::TtiRoundRobin => "tti_round_robin",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rb_round_robin" => Ok(SchedulerKind::RbRoundRobin),
            "tti_round_robin" => Ok(SchedulerKind::TtiRoundRobin),
            _ => Err(format!(
                "expected rb_round_robin or tti_round_robin, got `{s}`"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    pub subframe: SimTime,
    pub symbols_per_subframe: u32,
    pub control_overhead_symbols: u32,
    /// Resource blocks per subframe (LTE).
    pub n_rb: u32,
    pub subcarriers_per_rb: u32,
    pub scheduler: SchedulerKind,
    /// Delay between a packet reaching the UE buffer and its first
    /// possible uplink grant (scheduling request + grant pipeline).
    pub ul_access_delay: SimTime,
    /// Delay between a packet reaching the eNB downlink buffer and its
    /// first possible downlink grant.
    pub dl_sched_delay: SimTime,
    /// Smallest grant in symbols (mmWave).
    pub min_tti_symbols: u32,
}

impl FrameConfig {
    /// 1 ms, 14 symbols, 3 control symbols.
    pub fn lte() -> Self {
        FrameConfig {
            subframe: SimTime::from_millis(1),
            symbols_per_subframe: 14,
            control_overhead_symbols: 3,
            n_rb: 12,
            subcarriers_per_rb: 12,
            scheduler: SchedulerKind::RbRoundRobin,
            ul_access_delay: SimTime::from_millis(9),
            dl_sched_delay: SimTime::from_millis(1),
            min_tti_symbols: 1,
        }
    }

    /// 100 us, 24 symbols, 2 control symbols, flexible TTI.
    pub fn mmwave() -> Self {
        FrameConfig {
            subframe: SimTime::from_micros(100),
            symbols_per_subframe: 24,
            control_overhead_symbols: 2,
            n_rb: 0,
            subcarriers_per_rb: 12,
            scheduler: SchedulerKind::TtiRoundRobin,
            ul_access_delay: SimTime::from_micros(100),
            dl_sched_delay: SimTime::from_micros(100),
            min_tti_symbols: 1,
        }
    }

    /// Symbol length, floored to whole nanoseconds (4166 ns for mmWave).
    pub fn symbol_duration(&self) -> SimTime {
        SimTime::from_nanos(self.subframe.as_nanos() / self.symbols_per_subframe as u64)
    }

    pub fn data_symbols(&self) -> u32 {
        self.symbols_per_subframe - self.control_overhead_symbols
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.subframe == SimTime::ZERO {
            return Err("subframe duration must be > 0".into());
        }
        if self.symbols_per_subframe == 0 {
            return Err("symbols_per_subframe must be > 0".into());
        }
        if self.control_overhead_symbols >= self.symbols_per_subframe {
            return Err(format!(
                "control_overhead_symbols ({}) must be < symbols_per_subframe ({})",
                self.control_overhead_symbols, self.symbols_per_subframe
            ));
        }
        match self.scheduler {
            SchedulerKind::RbRoundRobin if self.n_rb == 0 || self.subcarriers_per_rb == 0 => {
                Err("n_rb and subcarriers_per_rb must be > 0 for rb_round_robin".into())
            }
            SchedulerKind::TtiRoundRobin
                if self.min_tti_symbols == 0 || self.min_tti_symbols > self.data_symbols() =>
            {
                Err(format!(
                    "min_tti_symbols must be in 1..={}",
                    self.data_symbols()
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Bits carried by `units` resource units at `mcs`: resource blocks for
/// LTE, data symbols for mmWave.
pub fn tbs_bits(mcs: &McsEntry, units: u32, frame: &FrameConfig, bandwidth_hz: f64) -> u64 {
    if units == 0 {
        return 0;
    }
    let raw = match frame.scheduler {
        SchedulerKind::RbRoundRobin => {
            let res = units as u64 * frame.subcarriers_per_rb as u64 * frame.data_symbols() as u64;
            mcs.spectral_efficiency * res as f64
        }
        SchedulerKind::TtiRoundRobin => {
            // bandwidth x duration first: both integral, so the product is exact
            let hz_ns = bandwidth_hz * (units as u64 * frame.symbol_duration().as_nanos()) as f64;
            mcs.spectral_efficiency * hz_ns / 1e9
        }
    };
    raw.floor() as u64
}

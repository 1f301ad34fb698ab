//! Scenario configuration: flat `key = value` text with `#` comments and
//! dotted keys for nested groups.
//!
//! ```text
//! backhaul = lte
//! n_pairs_list = 1, 10, 20
//! channel.fc_ghz = 2.1      # trailing comments are fine
//! ```
//!
//! Resolution order is: defaults for the chosen backhaul, then file keys,
//! then command-line overrides. The backhaul is decided first (last entry
//! wins) because it selects the radio defaults. Unknown keys, duplicate
//! keys within one source, malformed values and constraint violations are
//! all rejected with the source, line and key.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::app::{EcServerParams, TrafficProfile};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::link::{FrameConfig, RfidDelay, DEFAULT_QUEUE_CAP_BYTES};
use crate::time::SimTime;

/// Flat core-network delay used when RCO mode is switched `on`.
pub const DEFAULT_RCO_CORE_DELAY: SimTime = SimTime::from_millis(20);
/// Consumer-IoT deadline.
pub const EPSILON_CIOT: SimTime = SimTime::from_millis(50);
/// Industrial-IoT deadline.
pub const EPSILON_IIOT: SimTime = SimTime::from_millis(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Backhaul {
    Lte,
    Mmwave,
}

impl Backhaul {
    pub fn as_str(self) -> &'static str {
        match self {
            Backhaul::Lte => "lte",
            Backhaul::Mmwave => "mmwave",
        }
    }
}

impl fmt::Display for Backhaul {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backhaul {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lte" => Ok(Backhaul::Lte),
            "mmwave" => Ok(Backhaul::Mmwave),
            _ => Err(format!("expected lte or mmwave, got `{s}`")),
        }
    }
}

/// Where the latency tag is stamped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagAt {
    /// When the TSN senses the event; T_D then includes the RFID read.
    TsnEvent,
    /// When the DRN application receives the sensed payload.
    DrnIngress,
}

impl TagAt {
    pub fn as_str(self) -> &'static str {
        match self {
            TagAt::TsnEvent => "tsn_event",
            TagAt::DrnIngress => "drn_ingress",
        }
    }
}

impl FromStr for TagAt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tsn_event" => Ok(TagAt::TsnEvent),
            "drn_ingress" => Ok(TagAt::DrnIngress),
            _ => Err(format!("expected tsn_event or drn_ingress, got `{s}`")),
        }
    }
}

/// One experiment point family: everything but the pair count and run
/// index, which the sweep iterates over.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub backhaul: Backhaul,
    pub n_pairs_list: Vec<usize>,
    pub runs_per_point: u32,
    pub root_seed: u64,
    pub sim_duration: SimTime,
    pub epsilon: SimTime,
    pub side_m: f64,
    pub traffic: TrafficProfile,
    pub channel: ChannelParams,
    pub frame: FrameConfig,
    pub ec: EcServerParams,
    pub t_rfid: RfidDelay,
    pub tag_at: TagAt,
    pub rco_core_delay: Option<SimTime>,
    pub queue_cap_bytes: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::defaults_for(Backhaul::Mmwave)
    }
}

impl ScenarioConfig {
    pub fn defaults_for(backhaul: Backhaul) -> Self {
        let (channel, frame) = match backhaul {
            Backhaul::Lte => (ChannelParams::lte(), FrameConfig::lte()),
            Backhaul::Mmwave => (ChannelParams::mmwave(), FrameConfig::mmwave()),
        };
        ScenarioConfig {
            backhaul,
            n_pairs_list: std::iter::once(1).chain((10..=120).step_by(10)).collect(),
            runs_per_point: 5,
            root_seed: 1,
            sim_duration: SimTime::from_secs(10),
            epsilon: EPSILON_CIOT,
            side_m: 100.0,
            traffic: TrafficProfile::default(),
            channel,
            frame,
            ec: EcServerParams::default(),
            t_rfid: RfidDelay::Fixed(SimTime::from_micros(2_500)),
            tag_at: TagAt::TsnEvent,
            rco_core_delay: None,
            queue_cap_bytes: DEFAULT_QUEUE_CAP_BYTES,
        }
    }

    pub fn payload_bytes(&self) -> u32 {
        self.traffic.payload_bytes
    }

    /// Parses a config file from disk.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let source = ConfigSource::parse(&path.display().to_string(), &text)?;
        Self::resolve(&[source])
    }

    pub fn from_text(origin: &str, text: &str) -> Result<Self> {
        Self::resolve(&[ConfigSource::parse(origin, text)?])
    }

    /// Applies sources in order over the backhaul's defaults.
    pub fn resolve(sources: &[ConfigSource]) -> Result<Self> {
        let mut backhaul = Backhaul::Mmwave;
        for src in sources {
            for e in &src.entries {
                if e.key == "backhaul" {
                    backhaul = e.value.parse().map_err(|msg| src.err(e, msg))?;
                }
            }
        }
        let mut cfg = Self::defaults_for(backhaul);
        let mut lines: BTreeMap<&str, (&ConfigSource, &Entry)> = BTreeMap::new();
        for src in sources {
            for e in &src.entries {
                cfg.apply(&e.key, &e.value).map_err(|msg| src.err(e, msg))?;
                lines.insert(e.key.as_str(), (src, e));
            }
        }
        if let Err((key, msg)) = cfg.validate() {
            return Err(match lines.get(key) {
                Some((src, e)) => src.err(e, msg),
                None => Error::Config {
                    path: "<resolved>".into(),
                    line: 0,
                    key: key.into(),
                    msg,
                },
            });
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "backhaul" => self.backhaul = v.parse()?,
            "n_pairs_list" => {
                let list = parse_list(v)?;
                if list.is_empty() {
                    return Err("list must not be empty".into());
                }
                if list.contains(&0) {
                    return Err("pair counts must be >= 1".into());
                }
                self.n_pairs_list = list;
            }
            "payload_bytes" => self.traffic.payload_bytes = parse_num(v)?,
            "runs_per_point" => {
                self.runs_per_point = parse_num(v)?;
                if self.runs_per_point == 0 {
                    return Err("must be >= 1".into());
                }
            }
            "root_seed" => self.root_seed = parse_num(v)?,
            "sim_duration_ms" => self.sim_duration = parse_ms(v)?,
            "epsilon_ms" => {
                self.epsilon = match v {
                    "ciot" => EPSILON_CIOT,
                    "iiot" => EPSILON_IIOT,
                    _ => parse_ms(v)?,
                }
            }
            "side_m" => self.side_m = parse_num(v)?,
            "t_rfid_ms" => {
                let d = parse_ms(v)?;
                self.t_rfid = match self.t_rfid {
                    RfidDelay::Fixed(_) => RfidDelay::Fixed(d),
                    RfidDelay::Uniform { max, .. } => RfidDelay::Uniform { min: d, max },
                }
            }
            "t_rfid_max_ms" => {
                let min = match self.t_rfid {
                    RfidDelay::Fixed(d) => d,
                    RfidDelay::Uniform { min, .. } => min,
                };
                self.t_rfid = match v {
                    "none" => RfidDelay::Fixed(min),
                    _ => RfidDelay::Uniform {
                        min,
                        max: parse_ms(v)?,
                    },
                }
            }
            "tag_at" => self.tag_at = v.parse()?,
            "rco_core_delay_ms" => {
                self.rco_core_delay = match v {
                    "none" | "off" => None,
                    "on" => Some(DEFAULT_RCO_CORE_DELAY),
                    _ => Some(parse_ms(v)?),
                }
            }
            "queue_cap_bytes" => self.queue_cap_bytes = parse_num(v)?,
            "traffic.mode" => self.traffic.mode = v.parse()?,
            "traffic.period_ms" => self.traffic.period = parse_ms(v)?,
            "traffic.start_jitter_ms" => self.traffic.start_jitter = parse_ms(v)?,
            "ec.service_time_ms" => self.ec.service_time = parse_ms(v)?,
            "ec.queue_capacity" => self.ec.queue_capacity = parse_num(v)?,
            "channel.fc_ghz" => self.channel.fc_ghz = parse_num(v)?,
            "channel.bandwidth_hz" => self.channel.bandwidth_hz = parse_num(v)?,
            "channel.tx_power_ue_dbm" => self.channel.tx_power_ue_dbm = parse_num(v)?,
            "channel.tx_power_enb_dbm" => self.channel.tx_power_enb_dbm = parse_num(v)?,
            "channel.noise_figure_db" => self.channel.noise_figure_db = parse_num(v)?,
            "channel.beamforming_gain_db" => self.channel.beamforming_gain_db = parse_num(v)?,
            "channel.shadow_sigma_los_db" => self.channel.shadow_sigma_los_db = parse_num(v)?,
            "channel.shadow_sigma_nlos_db" => self.channel.shadow_sigma_nlos_db = parse_num(v)?,
            "channel.shadow_update_period_ms" => self.channel.shadow_update_period = parse_ms(v)?,
            "channel.shadow_corr" => self.channel.shadow_corr = parse_num(v)?,
            "frame.subframe_us" => self.frame.subframe = parse_us(v)?,
            "frame.symbols_per_subframe" => self.frame.symbols_per_subframe = parse_num(v)?,
            "frame.control_overhead_symbols" => self.frame.control_overhead_symbols = parse_num(v)?,
            "frame.n_rb" => self.frame.n_rb = parse_num(v)?,
            "frame.subcarriers_per_rb" => self.frame.subcarriers_per_rb = parse_num(v)?,
            "frame.scheduler" => self.frame.scheduler = v.parse()?,
            "frame.ul_access_delay_us" => self.frame.ul_access_delay = parse_us(v)?,
            "frame.dl_sched_delay_us" => self.frame.dl_sched_delay = parse_us(v)?,
            "frame.min_tti_symbols" => self.frame.min_tti_symbols = parse_num(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Cross-field checks. Returns the key to blame on failure.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.n_pairs_list.is_empty() || self.n_pairs_list.contains(&0) {
            return Err(("n_pairs_list", "pair counts must be >= 1".into()));
        }
        if self.runs_per_point == 0 {
            return Err(("runs_per_point", "must be >= 1".into()));
        }
        if self.sim_duration == SimTime::ZERO {
            return Err(("sim_duration_ms", "must be > 0".into()));
        }
        if !(self.side_m.is_finite() && self.side_m > 0.0) {
            return Err(("side_m", "must be > 0".into()));
        }
        self.traffic
            .validate()
            .map_err(|m| ("traffic.period_ms", m))?;
        self.frame.validate().map_err(|m| ("frame.scheduler", m))?;
        self.channel
            .validate()
            .map_err(|m| ("channel.shadow_corr", m))?;
        if let RfidDelay::Uniform { min, max } = self.t_rfid {
            if max < min {
                return Err(("t_rfid_max_ms", "must be >= t_rfid_ms".into()));
            }
        }
        if self.queue_cap_bytes == 0 {
            return Err(("queue_cap_bytes", "must be > 0".into()));
        }
        Ok(())
    }

    /// Fully resolved config in the input format; parsing it back yields an
    /// identical config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let pairs = self
            .n_pairs_list
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        kv("backhaul", self.backhaul.to_string());
        kv("n_pairs_list", pairs);
        kv("payload_bytes", self.traffic.payload_bytes.to_string());
        kv("runs_per_point", self.runs_per_point.to_string());
        kv("root_seed", self.root_seed.to_string());
        kv("sim_duration_ms", fmt_ms(self.sim_duration));
        kv("epsilon_ms", fmt_ms(self.epsilon));
        kv("side_m", fmt_f64(self.side_m));
        match self.t_rfid {
            RfidDelay::Fixed(d) => {
                kv("t_rfid_ms", fmt_ms(d));
                kv("t_rfid_max_ms", "none".into());
            }
            RfidDelay::Uniform { min, max } => {
                kv("t_rfid_ms", fmt_ms(min));
                kv("t_rfid_max_ms", fmt_ms(max));
            }
        }
        kv("tag_at", self.tag_at.as_str().into());
        kv(
            "rco_core_delay_ms",
            self.rco_core_delay.map_or("none".into(), fmt_ms),
        );
        kv("queue_cap_bytes", self.queue_cap_bytes.to_string());
        kv("traffic.mode", self.traffic.mode.to_string());
        kv("traffic.period_ms", fmt_ms(self.traffic.period));
        kv("traffic.start_jitter_ms", fmt_ms(self.traffic.start_jitter));
        kv("ec.service_time_ms", fmt_ms(self.ec.service_time));
        kv("ec.queue_capacity", self.ec.queue_capacity.to_string());
        let c = &self.channel;
        kv("channel.fc_ghz", fmt_f64(c.fc_ghz));
        kv("channel.bandwidth_hz", fmt_f64(c.bandwidth_hz));
        kv("channel.tx_power_ue_dbm", fmt_f64(c.tx_power_ue_dbm));
        kv("channel.tx_power_enb_dbm", fmt_f64(c.tx_power_enb_dbm));
        kv("channel.noise_figure_db", fmt_f64(c.noise_figure_db));
        kv(
            "channel.beamforming_gain_db",
            fmt_f64(c.beamforming_gain_db),
        );
        kv(
            "channel.shadow_sigma_los_db",
            fmt_f64(c.shadow_sigma_los_db),
        );
        kv(
            "channel.shadow_sigma_nlos_db",
            fmt_f64(c.shadow_sigma_nlos_db),
        );
        kv(
            "channel.shadow_update_period_ms",
            fmt_ms(c.shadow_update_period),
        );
        kv("channel.shadow_corr", fmt_f64(c.shadow_corr));
        let f = &self.frame;
        kv("frame.subframe_us", fmt_us(f.subframe));
        kv(
            "frame.symbols_per_subframe",
            f.symbols_per_subframe.to_string(),
        );
        kv(
            "frame.control_overhead_symbols",
            f.control_overhead_symbols.to_string(),
        );
        kv("frame.n_rb", f.n_rb.to_string());
        kv("frame.subcarriers_per_rb", f.subcarriers_per_rb.to_string());
        kv("frame.scheduler", f.scheduler.to_string());
        kv("frame.ul_access_delay_us", fmt_us(f.ul_access_delay));
        kv("frame.dl_sched_delay_us", fmt_us(f.dl_sched_delay));
        kv("frame.min_tti_symbols", f.min_tti_symbols.to_string());
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// The `key = value` entries of one source (a file, or the command line).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSource {
    pub origin: String,
    pub entries: Vec<Entry>,
}

impl ConfigSource {
    pub fn parse(origin: &str, text: &str) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(Error::Config {
                    path: origin.into(),
                    line,
                    key: content.into(),
                    msg: "expected `key = value`".into(),
                });
            };
            let (key, value) = (k.trim(), v.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config {
                    path: origin.into(),
                    line,
                    key: key.into(),
                    msg: "empty key or value".into(),
                });
            }
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                return Err(Error::Config {
                    path: origin.into(),
                    line,
                    key: key.into(),
                    msg: format!("duplicate key (first set on line {})", prev.line),
                });
            }
            entries.push(Entry {
                line,
                key: key.into(),
                value: value.into(),
            });
        }
        Ok(ConfigSource {
            origin: origin.into(),
            entries,
        })
    }

    /// Overrides that do not come from a file, e.g. CLI flags.
    pub fn overrides(origin: &str, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        ConfigSource {
            origin: origin.into(),
            entries: pairs
                .into_iter()
                .map(|(key, value)| Entry {
                    line: 0,
                    key,
                    value,
                })
                .collect(),
        }
    }

    fn err(&self, e: &Entry, msg: String) -> Error {
        Error::Config {
            path: self.origin.clone(),
            line: e.line,
            key: e.key.clone(),
            msg,
        }
    }
}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| format!("cannot parse `{v}` as {}: {e}", std::any::type_name::<T>()))
}

fn parse_ms(v: &str) -> Result<SimTime, String> {
    let ms: f64 = parse_num(v)?;
    SimTime::from_millis_f64(ms).ok_or_else(|| format!("`{v}` is not a non-negative duration"))
}

fn parse_us(v: &str) -> Result<SimTime, String> {
    let us: f64 = parse_num(v)?;
    SimTime::from_millis_f64(us / 1e3)
        .ok_or_else(|| format!("`{v}` is not a non-negative duration"))
}

fn parse_list(v: &str) -> Result<Vec<usize>, String> {
    let inner = v.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_num)
        .collect()
}

fn trim_decimal(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fmt_ms(t: SimTime) -> String {
    let ns = t.as_nanos();
    trim_decimal(format!("{}.{:06}", ns / 1_000_000, ns % 1_000_000))
}

fn fmt_us(t: SimTime) -> String {
    let ns = t.as_nanos();
    trim_decimal(format!("{}.{:03}", ns / 1_000, ns % 1_000))
}

fn fmt_f64(x: f64) -> String {
    // shortest representation that parses back to the same value
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::SchedulerKind;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ScenarioConfig::from_text("t", "").unwrap();
        assert_eq!(cfg.backhaul, Backhaul::Mmwave);
        assert_eq!(
            cfg.n_pairs_list,
            vec![1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120]
        );
        assert_eq!(cfg.payload_bytes(), 1024);
        assert_eq!(cfg.runs_per_point, 5);
        assert_eq!(cfg.sim_duration, SimTime::from_secs(10));
        assert_eq!(cfg.epsilon, SimTime::from_millis(50));
    }

    #[test]
    fn overrides_and_comments() {
        let text =
            "# scenario 2\nbackhaul = lte\npayload_bytes = 5120  # big\nn_pairs_list = [1, 60]\n";
        let cfg = ScenarioConfig::from_text("s2.cfg", text).unwrap();
        assert_eq!(cfg.backhaul, Backhaul::Lte);
        assert_eq!(cfg.payload_bytes(), 5120);
        assert_eq!(cfg.n_pairs_list, vec![1, 60]);
        assert_eq!(cfg.frame, FrameConfig::lte());
        assert_eq!(cfg.channel, ChannelParams::lte());
    }

    #[test]
    fn backhaul_defaults_follow_last_source() {
        let file = ConfigSource::parse("f", "backhaul = lte\nframe.n_rb = 50\n").unwrap();
        let cli = ConfigSource::overrides("cli", [("backhaul".into(), "mmwave".into())]);
        let cfg = ScenarioConfig::resolve(&[file, cli]).unwrap();
        assert_eq!(cfg.backhaul, Backhaul::Mmwave);
        assert_eq!(cfg.frame.scheduler, SchedulerKind::TtiRoundRobin);
        assert_eq!(cfg.frame.n_rb, 50);
    }

    #[test]
    fn zero_pairs_rejected_with_line() {
        let err = ScenarioConfig::from_text("x.cfg", "\n\nn_pairs_list = [0]\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("x.cfg:3"), "{msg}");
        assert!(msg.contains("n_pairs_list"), "{msg}");
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        let err = ScenarioConfig::from_text("x", "bogus = 1").unwrap_err();
        assert!(err.to_string().contains("`bogus`: unknown key"));
        let err = ScenarioConfig::from_text("x", "runs_per_point = five").unwrap_err();
        assert!(err.to_string().contains("x:1"));
        let err =
            ScenarioConfig::from_text("x", "payload_bytes = 1\npayload_bytes = 2").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = ScenarioConfig::from_text("x", "just words").unwrap_err();
        assert!(err.to_string().contains("key = value"));
        let err = ScenarioConfig::from_text("x", "channel.shadow_corr = 1.5").unwrap_err();
        assert!(err.to_string().contains("channel.shadow_corr"));
    }

    #[test]
    fn presets_and_optional_values() {
        let cfg = ScenarioConfig::from_text(
            "x",
            "epsilon_ms = iiot\nrco_core_delay_ms = on\nt_rfid_ms = 1\nt_rfid_max_ms = 5\n",
        )
        .unwrap();
        assert_eq!(cfg.epsilon, SimTime::from_millis(5));
        assert_eq!(cfg.rco_core_delay, Some(SimTime::from_millis(20)));
        assert_eq!(
            cfg.t_rfid,
            RfidDelay::Uniform {
                min: SimTime::from_millis(1),
                max: SimTime::from_millis(5)
            }
        );
        assert!(ScenarioConfig::from_text("x", "t_rfid_ms = 5\nt_rfid_max_ms = 1").is_err());
    }

    #[test]
    fn text_round_trip() {
        for b in [Backhaul::Lte, Backhaul::Mmwave] {
            let mut cfg = ScenarioConfig::defaults_for(b);
            cfg.rco_core_delay = Some(SimTime::from_micros(12_345));
            cfg.t_rfid = RfidDelay::Uniform {
                min: SimTime::from_millis(1),
                max: SimTime::from_micros(4_500),
            };
            let back = ScenarioConfig::from_text("echo", &cfg.to_text()).unwrap();
            assert_eq!(back, cfg);
        }
        let d = ScenarioConfig::default();
        assert_eq!(ScenarioConfig::from_text("echo", &d.to_text()).unwrap(), d);
    }
}

//! Hand calculation of a single packet's end-to-end latency.
//!
//! Works in plain `f64` milliseconds with its own copies of every constant,
//! so that a mistake in the simulator's channel, MCS, frame or scheduler
//! code cannot cancel out here.

use tagsim::config::{Backhaul, ScenarioConfig};
use tagsim::sim::{run_once, TraceOptions};

const EFFICIENCY: [f64; 15] = [
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223, 3.9023,
    4.5234, 5.1152, 5.5547,
];

struct Radio {
    fc_ghz: f64,
    bw_hz: f64,
    ue_dbm: f64,
    enb_dbm: f64,
    gain_db: f64,
    nf_db: f64,
    sf_ms: f64,
    ctrl_syms: u32,
    syms: u32,
    ul_access_ms: f64,
    dl_sched_ms: f64,
}

const LTE: Radio = Radio {
    fc_ghz: 2.1,
    bw_hz: 20e6,
    ue_dbm: 23.0,
    enb_dbm: 30.0,
    gain_db: 0.0,
    nf_db: 5.0,
    sf_ms: 1.0,
    ctrl_syms: 3,
    syms: 14,
    ul_access_ms: 9.0,
    dl_sched_ms: 1.0,
};

const MMWAVE: Radio = Radio {
    fc_ghz: 28.0,
    bw_hz: 1e9,
    ue_dbm: 23.0,
    enb_dbm: 30.0,
    gain_db: 20.0,
    nf_db: 5.0,
    sf_ms: 0.1,
    ctrl_syms: 2,
    syms: 24,
    ul_access_ms: 0.1,
    dl_sched_ms: 0.1,
};

const LTE_RBS: f64 = 12.0;
const MMWAVE_SYMBOL_MS: f64 = 0.004166;

fn path_loss(d: f64, fc: f64, los: bool) -> f64 {
    let d = d.max(1.0);
    let los_pl = 32.4 + 21.0 * d.log10() + 20.0 * fc.log10();
    if los {
        los_pl
    } else {
        los_pl.max(22.4 + 35.3 * d.log10() + 21.3 * fc.log10())
    }
}

fn efficiency(snr: f64) -> Option<f64> {
    (0..15)
        .rev()
        .find(|&i| snr >= -6.7 + 2.1 * i as f64)
        .map(|i| EFFICIENCY[i])
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Completion time of a sole user's transfer whose first opportunity is
/// the subframe boundary at or after `eligible_ms`.
fn serialize(r: &Radio, backhaul: Backhaul, eff: f64, bits: f64, eligible_ms: f64) -> f64 {
    // snap to the ns grid first so that exact boundaries stay exact
    let eligible_ns = (eligible_ms * 1e6).round();
    let sf_ns = (r.sf_ms * 1e6).round();
    let first = (eligible_ns / sf_ns).ceil() * r.sf_ms;
    let data = (r.syms - r.ctrl_syms) as f64;
    match backhaul {
        Backhaul::Lte => {
            let tbs = (eff * LTE_RBS * 12.0 * data).floor();
            first + (bits / tbs).ceil() * r.sf_ms
        }
        Backhaul::Mmwave => {
            let per_symbol = (eff * r.bw_hz * MMWAVE_SYMBOL_MS / 1e3).floor();
            let full = (eff * r.bw_hz * data * MMWAVE_SYMBOL_MS / 1e3).floor();
            let full_subframes = ((bits - 1.0) / full).floor();
            let rest = bits - full_subframes * full;
            let last_syms = (rest / per_symbol).ceil();
            first + full_subframes * r.sf_ms + (r.ctrl_syms as f64 + last_syms) * MMWAVE_SYMBOL_MS
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Check {
    pub backhaul: Backhaul,
    pub run_index: u32,
    pub t_rfid_ms: f64,
    /// `None` when either hop has no usable MCS.
    pub expected_ms: Option<f64>,
    pub simulated_ms: Option<f64>,
    pub tolerance_ms: f64,
}

impl Check {
    pub fn ok(&self) -> bool {
        match (self.expected_ms, self.simulated_ms) {
            (Some(e), Some(s)) => (e - s).abs() <= self.tolerance_ms,
            (None, None) => true,
            _ => false,
        }
    }
}

/// One pair, one reading at t = 0, no shadowing, instant EC.
pub fn single_packet(backhaul: Backhaul, run_index: u32, t_rfid_ms: f64) -> Check {
    let text = format!(
        "backhaul = {backhaul}\n\
         payload_bytes = 1024\n\
         traffic.mode = one_shot\n\
         traffic.start_jitter_ms = 0\n\
         t_rfid_ms = {t_rfid_ms}\n\
         ec.service_time_ms = 0\n\
         channel.shadow_sigma_los_db = 0\n\
         channel.shadow_sigma_nlos_db = 0\n\
         sim_duration_ms = 2000\n"
    );
    let cfg = ScenarioConfig::from_text("oracle", &text).expect("oracle config");
    let out = run_once(&cfg, 1, run_index, TraceOptions::default()).expect("run");

    let r = match backhaul {
        Backhaul::Lte => &LTE,
        Backhaul::Mmwave => &MMWAVE,
    };
    let p = |q: tagsim::topology::Position| [q.x, q.y, q.z];
    let enb = p(out.deployment.enb);
    let d_ul = dist(p(out.deployment.drns[0]), enb);
    let d_dl = dist(p(out.deployment.lcos[0]), enb);
    let los_ul = out.initial_links[&tagsim::topology::NodeId::drn(0)].los;
    let los_dl = out.initial_links[&tagsim::topology::NodeId::lco(0)].los;

    let noise = -174.0 + 10.0 * r.bw_hz.log10() + r.nf_db;
    let snr_ul = r.ue_dbm + r.gain_db - path_loss(d_ul, r.fc_ghz, los_ul) - noise;
    let snr_dl = r.enb_dbm + r.gain_db - path_loss(d_dl, r.fc_ghz, los_dl) - noise;
    let bits = (1024.0 + 48.0) * 8.0;

    let expected_ms = efficiency(snr_ul)
        .zip(efficiency(snr_dl))
        .map(|(e_ul, e_dl)| {
            let at_drn = t_rfid_ms;
            let at_ec = serialize(r, backhaul, e_ul, bits, at_drn + r.ul_access_ms);
            serialize(r, backhaul, e_dl, bits, at_ec + r.dl_sched_ms)
        });
    let symbol_ms = r.sf_ms / r.syms as f64;
    Check {
        backhaul,
        run_index,
        t_rfid_ms,
        expected_ms,
        simulated_ms: out.records.first().map(|rec| rec.t_d_ms()),
        tolerance_ms: symbol_ms,
    }
}

/// The oracle over a spread of deployments and RFID delays.
pub fn all_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for backhaul in [Backhaul::Lte, Backhaul::Mmwave] {
        for run in 0..12 {
            for t_rfid in [2.5, 0.73, 4.05] {
                out.push(single_packet(backhaul, run, t_rfid));
            }
        }
    }
    out
}

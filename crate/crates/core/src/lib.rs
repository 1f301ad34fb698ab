//! `tagsim` is a deterministic discrete-event simulator for a sensing and
//! control pipeline built on batteryless RFID touch sensors:
//!
//! ```text
//! TSN --rfid read--> DRN --UL--> eNB + EC forwarder --DL--> LCO (or RCO)
//! ```
//!
//! The radio access is either LTE (1 ms, 14-symbol subframes, resource
//! blocks shared round-robin) or 28 GHz mmWave (100 us, 24-symbol subframes
//! with a flexible TTI). Every datagram carries a creation-time tag and the
//! end-to-end latency `T_D` is measured when the control object has
//! reassembled it.
//!
//! The crate is organized bottom-up:
//!
//! * [`time`], [`engine`], [`rng`]: virtual clock, event queue, keyed
//!   random streams.
//! * [`topology`], [`channel`]: node placement, path loss, shadowing, SNR.
//! * [`link`]: MCS table, frame timing, schedulers, buffers, RFID hop.
//! * [`transport`]: datagrams, segmentation and reassembly.
//! * [`app`]: traffic, EC forwarder, latency records.
//! * [`sim`]: one full run.
//! * [`config`], [`metrics`], [`sweep`]: experiment orchestration and
//!   CSV output.
//!
//! ```
//! use tagsim::config::{Backhaul, ScenarioConfig};
//! use tagsim::sim::{run_once, TraceOptions};
//! use tagsim::time::SimTime;
//!
//! let mut cfg = ScenarioConfig::defaults_for(Backhaul::Lte);
//! cfg.sim_duration = SimTime::from_secs(1);
//! let out = run_once(&cfg, 4, 0, TraceOptions::default()).unwrap();
//! assert_eq!(out.sent, out.delivered + out.dropped + out.in_flight);
//! ```

pub mod app;
pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod link;
pub mod metrics;
pub mod rng;
pub mod sim;
pub mod sweep;
pub mod time;
pub mod topology;
pub mod transport;

pub use error::{Error, Result};

// The guide's code listings are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/link.md")]
    mod link {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}

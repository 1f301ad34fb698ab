//! Property checks shared by the standalone property tests and the
//! acceptance report. Each one drives a deterministic proptest runner and
//! returns the first counterexample as a message.

#![allow(dead_code)]

pub mod oracle;

use std::fmt::Debug;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tagsim::channel::{update_shadowing, ChannelParams, Direction, LinkState};
use tagsim::config::{Backhaul, ScenarioConfig};
use tagsim::engine::Engine;
use tagsim::link::{
    select_mcs, Demand, FrameConfig, McsEntry, Resources, RoundRobin, TxQueue, CQI_TABLE,
};
use tagsim::sim::{run_once, TraceOptions};
use tagsim::time::SimTime;
use tagsim::topology::NodeId;
use tagsim::transport::{segment_bits, PacketId, Reassembler};

fn check<S>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// Any packet size over any grant sequence reassembles to its original
/// size, through both the plain segmenter and a FIFO of several packets.
pub fn segmentation_round_trip(cases: u32) -> Result<(), String> {
    let strat = (
        prop::collection::vec(0u64..40_000, 1..6),
        prop::collection::vec(1u64..9_000, 1..40),
    );
    check(cases, strat, |(sizes, grants)| {
        for (i, &bits) in sizes.iter().enumerate() {
            let frags = segment_bits(PacketId(i as u64), bits, grants.iter().copied().cycle());
            let mut r = Reassembler::new();
            let mut done = None;
            for f in frags {
                prop_assert!(done.is_none(), "fragment after the last one");
                done = r.push(f).map_err(|e| TestCaseError::fail(e.to_string()))?;
            }
            let done = done.ok_or_else(|| TestCaseError::fail("never completed"))?;
            prop_assert_eq!(done.total_bits, bits);
        }

        let mut q = TxQueue::new(NodeId::drn(0), Direction::Uplink, u64::MAX);
        for (i, &bits) in sizes.iter().enumerate() {
            q.push(PacketId(i as u64), (bits / 8) as u32 + 1, SimTime::ZERO)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
        }
        let mut r = Reassembler::new();
        let mut completed = Vec::new();
        for g in grants.iter().copied().cycle() {
            if q.is_empty() {
                break;
            }
            for f in q.pull(g, SimTime::ZERO) {
                if let Some(done) = r.push(f).map_err(|e| TestCaseError::fail(e.to_string()))? {
                    completed.push(done);
                }
            }
        }
        prop_assert_eq!(completed.len(), sizes.len());
        for (i, done) in completed.iter().enumerate() {
            prop_assert_eq!(done.packet_id, PacketId(i as u64));
            prop_assert_eq!(done.total_bits, 8 * ((sizes[i] / 8) + 1));
        }
        Ok(())
    })
}

/// Every run accounts for every datagram it created.
pub fn packet_conservation(cases: u32) -> Result<(), String> {
    let strat = (
        prop::bool::ANY,
        1usize..25,
        prop::sample::select(vec![64u32, 512, 1024, 5120]),
        0u32..3,
        prop::sample::select(vec![1_000u64, 8_000, 1 << 20]),
        prop::bool::ANY,
    );
    check(cases, strat, |(lte, n, payload, run, cap, one_shot)| {
        let backhaul = if lte { Backhaul::Lte } else { Backhaul::Mmwave };
        let mut cfg = ScenarioConfig::defaults_for(backhaul);
        cfg.sim_duration = SimTime::from_millis(400);
        cfg.traffic.payload_bytes = payload;
        cfg.queue_cap_bytes = cap;
        cfg.ec.queue_capacity = 3;
        cfg.ec.service_time = SimTime::from_micros(300);
        if one_shot {
            cfg.traffic.mode = tagsim::app::TrafficMode::OneShot;
        }
        let out = run_once(&cfg, n, run, TraceOptions::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(out.sent, out.delivered + out.dropped + out.in_flight);
        prop_assert_eq!(out.delivered, out.records.len() as u64);
        Ok(())
    })
}

/// Spectral efficiency never decreases with SNR, and the chosen entry's
/// threshold is never above the SNR it was chosen for.
pub fn mcs_monotonic() -> Result<(), String> {
    let mut prev: Option<McsEntry> = None;
    for step in 0..=60_000 {
        let snr = -20.0 + step as f64 * 0.001;
        let cur = select_mcs(snr, &CQI_TABLE);
        if let Some(c) = cur {
            if c.min_snr_db > snr {
                return Err(format!("threshold {} above snr {snr}", c.min_snr_db));
            }
        }
        match (prev, cur) {
            (Some(_), None) => return Err(format!("service lost at {snr} dB")),
            (Some(p), Some(c)) if c.spectral_efficiency < p.spectral_efficiency => {
                return Err(format!("efficiency fell at {snr} dB"));
            }
            _ => {}
        }
        prev = cur;
    }
    Ok(())
}

fn demands_strategy() -> impl Strategy<Value = Vec<(u64, f64)>> {
    prop::collection::vec(
        (
            prop_oneof![1u64..200, 200u64..20_000, 20_000u64..500_000],
            -12.0f64..35.0,
        ),
        1..40,
    )
}

/// Grants never overlap, stay inside the subframe, only go to nodes that
/// have data and a usable MCS, and leave nothing idle while a served node
/// still has backlog left over.
pub fn scheduler_disjoint_and_work_conserving(cases: u32) -> Result<(), String> {
    let strat = (prop::bool::ANY, demands_strategy(), 1u32..4, 0u64..20);
    check(cases, strat, |(lte, raw, min_tti, rounds)| {
        let (mut frame, bw) = if lte {
            (FrameConfig::lte(), ChannelParams::lte().bandwidth_hz)
        } else {
            (FrameConfig::mmwave(), ChannelParams::mmwave().bandwidth_hz)
        };
        frame.min_tti_symbols = min_tti;
        let demands: Vec<Demand> = raw
            .iter()
            .enumerate()
            .map(|(i, &(bits, snr))| Demand {
                node: NodeId::drn(i as u32),
                backlog_bits: bits,
                snr_db: snr,
            })
            .collect();
        let mut rr = RoundRobin::new();
        // advance the rotation to an arbitrary point first
        for k in 0..rounds {
            rr.schedule_subframe(k, Direction::Uplink, &demands, &frame, &CQI_TABLE, bw);
        }
        let allocs =
            rr.schedule_subframe(rounds, Direction::Uplink, &demands, &frame, &CQI_TABLE, bw);

        let (lo, hi) = if lte {
            (0, frame.n_rb)
        } else {
            (frame.control_overhead_symbols, frame.symbols_per_subframe)
        };
        let mut used = vec![false; hi as usize];
        for a in &allocs {
            let d = demands.iter().find(|d| d.node == a.node).unwrap();
            prop_assert!(select_mcs(d.snr_db, &CQI_TABLE).is_some());
            prop_assert!(a.resources.count() > 0);
            prop_assert!(a.resources.start() >= lo && a.resources.end() <= hi);
            match (lte, a.resources) {
                (true, Resources::ResourceBlocks { .. }) | (false, Resources::Symbols { .. }) => {}
                _ => prop_assert!(false, "wrong resource kind {:?}", a.resources),
            }
            for u in a.resources.start()..a.resources.end() {
                prop_assert!(!used[u as usize], "unit {} granted twice", u);
                used[u as usize] = true;
            }
        }
        let mut nodes: Vec<_> = allocs.iter().map(|a| a.node).collect();
        nodes.sort();
        nodes.dedup();
        prop_assert_eq!(nodes.len(), allocs.len(), "node served twice");

        let servable = demands
            .iter()
            .filter(|d| select_mcs(d.snr_db, &CQI_TABLE).is_some())
            .count();
        let total = hi - lo;
        let granted: u32 = allocs.iter().map(|a| a.resources.count()).sum();
        if servable > 0 {
            prop_assert!(!allocs.is_empty(), "servable demand left unserved");
        }
        let unmet = allocs.iter().any(|a| {
            let d = demands.iter().find(|d| d.node == a.node).unwrap();
            a.tbs_bits < d.backlog_bits
        });
        // idle units are only allowed when too few remain for a minimum TTI
        if unmet || servable > allocs.len() {
            let slack = if lte { 0 } else { min_tti - 1 };
            prop_assert!(
                granted + slack >= total,
                "{} of {} units idle with unmet demand",
                total - granted,
                total
            );
        }
        Ok(())
    })
}

/// Long-run variance of the AR(1) shadowing process relative to sigma^2,
/// for several seeds. Returns the worst relative error.
pub fn ar1_variance_error(steps: usize) -> f64 {
    let params = ChannelParams::mmwave();
    let mut worst = 0.0f64;
    for (seed, los) in [(1u64, true), (2, false), (3, true), (4, false)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = params.shadow_sigma_db(los);
        let mut link = LinkState::new(50.0, los);
        // start from the stationary distribution
        for _ in 0..100 {
            link = update_shadowing(link, &params, &mut rng);
        }
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..steps {
            link = update_shadowing(link, &params, &mut rng);
            sum += link.shadow_db;
            sum2 += link.shadow_db * link.shadow_db;
        }
        let n = steps as f64;
        let var = sum2 / n - (sum / n).powi(2);
        worst = worst.max((var / (sigma * sigma) - 1.0).abs());
    }
    worst
}

/// Random schedules fire in (time, insertion) order, and replaying the
/// same schedule gives the same trace.
pub fn engine_replay(cases: u32) -> Result<(), String> {
    let strat = prop::collection::vec((0u64..1_000, 0u64..50, 0u8..3), 1..200);
    check(cases, strat, |plan| {
        let run = |plan: &[(u64, u64, u8)]| {
            let mut eng: Engine<(usize, u8)> = Engine::new();
            for (i, &(at, _, _)) in plan.iter().enumerate() {
                eng.schedule(SimTime::from_nanos(at), (i, 0));
            }
            let mut trace = Vec::new();
            eng.run_until(SimTime::from_nanos(1_500), |e, (i, depth)| {
                trace.push((e.now(), i, depth));
                let (_, delay, spawn) = plan[i % plan.len()];
                if depth < spawn {
                    e.schedule_in(SimTime::from_nanos(delay), (i, depth + 1));
                }
            });
            trace
        };
        let a = run(&plan);
        let b = run(&plan);
        prop_assert_eq!(&a, &b);
        for w in a.windows(2) {
            prop_assert!(w[0].0 <= w[1].0, "time went backwards");
        }
        // initial events at equal times fire in insertion order
        let initial: Vec<_> = a.iter().filter(|t| t.2 == 0).map(|t| (t.0, t.1)).collect();
        let mut sorted = initial.clone();
        sorted.sort();
        prop_assert_eq!(initial, sorted);
        Ok(())
    })
}

/// Bits carried over the air never exceed what the subframes elapsed could
/// hold at the top MCS.
pub fn throughput_bound(cases: u32) -> Result<(), String> {
    let strat = (prop::bool::ANY, 1usize..60, 0u32..3);
    check(cases, strat, |(lte, n, run)| {
        let backhaul = if lte { Backhaul::Lte } else { Backhaul::Mmwave };
        let mut cfg = ScenarioConfig::defaults_for(backhaul);
        cfg.sim_duration = SimTime::from_millis(300);
        cfg.traffic.payload_bytes = 5120;
        let out = run_once(&cfg, n, run, TraceOptions::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let top = CQI_TABLE.last().unwrap();
        let f = &cfg.frame;
        let units = if lte { f.n_rb } else { f.data_symbols() };
        let per_sf = tagsim::link::tbs_bits(top, units, f, cfg.channel.bandwidth_hz);
        let subframes = cfg.sim_duration.as_nanos() / f.subframe.as_nanos() + 1;
        prop_assert!(out.ul_bits <= per_sf * subframes);
        prop_assert!(out.dl_bits <= per_sf * subframes);
        Ok(())
    })
}

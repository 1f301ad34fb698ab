//! One simulation run: a deployment of DRN-LCO pairs around one eNB, with
//! traffic flowing TSN -> DRN -> (UL) -> eNB/EC -> (DL) -> LCO.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::app::{co_app_receive, EcServer, LatencyRecord};
use crate::channel::{snr_db, update_shadowing, Direction, LinkState, SnrSample};
use crate::config::{ScenarioConfig, TagAt};
use crate::engine::{Engine, RunStats};
use crate::link::{
    rfid_read, Demand, ResourceAllocation, Resources, RoundRobin, SchedulerKind, TxQueue, CQI_TABLE,
};
use crate::rng::{Purpose, RngStream, StreamKey};
use crate::time::SimTime;
use crate::topology::{distance_3d, place_random, Deployment, NodeId};
use crate::transport::{make_datagram, Fragment, Packet, PacketId, Reassembler};

/// Which per-run traces to collect.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraceOptions {
    /// SNR of DRN1 (UL) and LCO1 (DL) at each of their grants.
    pub snr: bool,
    /// Every resource allocation.
    pub alloc: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub n_pairs: usize,
    pub run_index: u32,
    pub deployment: Deployment,
    /// Link state of every node at t = 0.
    pub initial_links: BTreeMap<NodeId, LinkState>,
    pub records: Vec<LatencyRecord>,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    /// Payload-carrying bits moved over the air, per direction.
    pub ul_bits: u64,
    pub dl_bits: u64,
    pub snr_trace: Vec<SnrSample>,
    pub alloc_trace: Vec<ResourceAllocation>,
    pub engine: RunStats,
}

#[derive(Debug)]
enum Event {
    TsnSense {
        drn: u32,
    },
    DrnIngress {
        packet: PacketId,
    },
    Subframe {
        index: u64,
    },
    RadioDelivery {
        direction: Direction,
        node: NodeId,
        frags: Vec<Fragment>,
    },
    EcDeparture {
        packet: PacketId,
    },
    DlEnqueue {
        packet: PacketId,
    },
    ShadowUpdate,
}

struct World<'a> {
    cfg: &'a ScenarioConfig,
    n_pairs: usize,
    trace: TraceOptions,

    ul_links: Vec<LinkState>,
    dl_links: Vec<LinkState>,
    ul_snr: Vec<f64>,
    dl_snr: Vec<f64>,
    ul_shadow_rng: Vec<ChaCha8Rng>,
    dl_shadow_rng: Vec<ChaCha8Rng>,
    rfid_rng: Vec<ChaCha8Rng>,

    ul_queues: Vec<TxQueue>,
    dl_queues: Vec<TxQueue>,
    ul_rr: RoundRobin,
    dl_rr: RoundRobin,
    ul_reasm: Vec<Reassembler>,
    dl_reasm: Vec<Reassembler>,
    ec: EcServer,

    packets: BTreeMap<PacketId, Packet>,
    next_packet: u64,
    /// Index of the subframe tick currently scheduled, if any.
    next_tick: Option<u64>,
    last_tick: Option<u64>,

    records: Vec<LatencyRecord>,
    sent: u64,
    dropped: u64,
    ul_bits: u64,
    dl_bits: u64,
    snr_trace: Vec<SnrSample>,
    alloc_trace: Vec<ResourceAllocation>,
}

/// Runs one `(n_pairs, run_index)` point of `cfg`.
pub fn run_once(
    cfg: &ScenarioConfig,
    n_pairs: usize,
    run_index: u32,
    trace: TraceOptions,
) -> crate::Result<RunOutcome> {
    let streams = RngStream::new(cfg.root_seed);
    let deployment = place_random(n_pairs, cfg.side_m, &streams, run_index)?;
    let key = |node, purpose| StreamKey::new(run_index, node, purpose);

    let mut initial_links = BTreeMap::new();
    let mut shadow_rngs = Vec::new();
    let mut links = Vec::new();
    for node in (0..n_pairs as u32)
        .map(NodeId::drn)
        .chain((0..n_pairs as u32).map(NodeId::lco))
    {
        let d = distance_3d(deployment.position(node), deployment.enb);
        let mut los_rng = streams.stream(key(node, Purpose::LineOfSight));
        let mut shadow_rng = streams.stream(key(node, Purpose::Shadowing));
        let link = LinkState::draw(d, &cfg.channel, &mut los_rng, &mut shadow_rng);
        initial_links.insert(node, link);
        links.push(link);
        shadow_rngs.push(shadow_rng);
    }
    let dl_links = links.split_off(n_pairs);
    let dl_shadow_rng = shadow_rngs.split_off(n_pairs);
    let ul_snr = links
        .iter()
        .map(|l| snr_db(l, &cfg.channel, Direction::Uplink))
        .collect();
    let dl_snr = dl_links
        .iter()
        .map(|l| snr_db(l, &cfg.channel, Direction::Downlink))
        .collect();

    let mut world = World {
        cfg,
        n_pairs,
        trace,
        ul_links: links,
        dl_links,
        ul_snr,
        dl_snr,
        ul_shadow_rng: shadow_rngs,
        dl_shadow_rng,
        rfid_rng: (0..n_pairs as u32)
            .map(|i| streams.stream(key(NodeId::drn(i), Purpose::RfidDelay)))
            .collect(),
        ul_queues: (0..n_pairs as u32)
            .map(|i| TxQueue::new(NodeId::drn(i), Direction::Uplink, cfg.queue_cap_bytes))
            .collect(),
        dl_queues: (0..n_pairs as u32)
            .map(|i| TxQueue::new(NodeId::lco(i), Direction::Downlink, cfg.queue_cap_bytes))
            .collect(),
        ul_rr: RoundRobin::new(),
        dl_rr: RoundRobin::new(),
        ul_reasm: vec![Reassembler::new(); n_pairs],
        dl_reasm: vec![Reassembler::new(); n_pairs],
        ec: EcServer::new(cfg.ec),
        packets: BTreeMap::new(),
        next_packet: 0,
        next_tick: None,
        last_tick: None,
        records: Vec::new(),
        sent: 0,
        dropped: 0,
        ul_bits: 0,
        dl_bits: 0,
        snr_trace: Vec::new(),
        alloc_trace: Vec::new(),
    };

    let mut engine = Engine::new();
    let jitter_ns = cfg.traffic.start_jitter.as_nanos();
    for i in 0..n_pairs as u32 {
        let offset = if jitter_ns == 0 {
            SimTime::ZERO
        } else {
            let mut r = streams.stream(key(NodeId::drn(i), Purpose::StartJitter));
            SimTime::from_nanos(r.random_range(0..jitter_ns))
        };
        if offset < cfg.sim_duration {
            engine.schedule(offset, Event::TsnSense { drn: i });
        }
    }
    let period = cfg.channel.shadow_update_period;
    if period > SimTime::ZERO && period < cfg.sim_duration {
        engine.schedule(period, Event::ShadowUpdate);
    }

    let stats = engine.run_until(cfg.sim_duration, |eng, ev| world.handle(eng, ev));

    let delivered = world.records.len() as u64;
    let in_flight = world.packets.len() as u64;
    assert_eq!(
        world.sent,
        delivered + world.dropped + in_flight,
        "packet conservation violated"
    );
    Ok(RunOutcome {
        n_pairs,
        run_index,
        deployment,
        initial_links,
        records: world.records,
        sent: world.sent,
        delivered,
        dropped: world.dropped,
        in_flight,
        ul_bits: world.ul_bits,
        dl_bits: world.dl_bits,
        snr_trace: world.snr_trace,
        alloc_trace: world.alloc_trace,
        engine: stats,
    })
}

impl World<'_> {
    fn handle(&mut self, eng: &mut Engine<Event>, ev: Event) {
        match ev {
            Event::TsnSense { drn } => self.on_tsn_sense(eng, drn),
            Event::DrnIngress { packet } => self.on_drn_ingress(eng, packet),
            Event::Subframe { index } => self.on_subframe(eng, index),
            Event::RadioDelivery {
                direction,
                node,
                frags,
            } => self.on_radio_delivery(eng, direction, node, frags),
            Event::EcDeparture { packet } => self.on_ec_departure(eng, packet),
            Event::DlEnqueue { packet } => self.on_dl_enqueue(eng, packet),
            Event::ShadowUpdate => self.on_shadow_update(eng),
        }
    }

    fn new_packet_id(&mut self) -> PacketId {
        let id = PacketId(self.next_packet);
        self.next_packet += 1;
        id
    }

    fn on_tsn_sense(&mut self, eng: &mut Engine<Event>, drn: u32) {
        let now = eng.now();
        let id = self.new_packet_id();
        let packet = make_datagram(
            id,
            self.cfg.traffic.payload_bytes,
            NodeId::drn(drn),
            NodeId::lco(drn),
            now,
        );
        self.packets.insert(id, packet);
        self.sent += 1;
        let t_rfid = self.cfg.t_rfid.sample(&mut self.rfid_rng[drn as usize]);
        eng.schedule(rfid_read(now, t_rfid), Event::DrnIngress { packet: id });

        if self.cfg.traffic.mode == crate::app::TrafficMode::Periodic {
            let next = now + self.cfg.traffic.period;
            if next < self.cfg.sim_duration {
                eng.schedule(next, Event::TsnSense { drn });
            }
        }
    }

    fn on_drn_ingress(&mut self, eng: &mut Engine<Event>, id: PacketId) {
        let now = eng.now();
        let tag_at = self.cfg.tag_at;
        let packet = self.packets.get_mut(&id).expect("live packet");
        if tag_at == TagAt::DrnIngress {
            packet.restamp(now);
        }
        packet.log_hop(packet.src, now);
        let drn = packet.src.index as usize;
        let wire = packet.wire_bytes();
        let eligible = now + self.cfg.frame.ul_access_delay;
        match self.ul_queues[drn].push(id, wire, eligible) {
            Ok(()) => self.wake(eng, eligible),
            Err(_) => self.drop_packet(id),
        }
    }

    fn drop_packet(&mut self, id: PacketId) {
        self.packets.remove(&id).expect("live packet");
        self.dropped += 1;
    }

    /// Makes sure a subframe tick is scheduled no later than the first
    /// boundary at or after `eligible`.
    fn wake(&mut self, eng: &mut Engine<Event>, eligible: SimTime) {
        let sf = self.cfg.frame.subframe;
        let mut index = eligible.max(eng.now()).ceil_to(sf).as_nanos() / sf.as_nanos();
        if let Some(last) = self.last_tick {
            index = index.max(last + 1);
        }
        if self.next_tick.is_some_and(|t| t <= index) {
            return;
        }
        // an already-scheduled later tick goes stale and is ignored
        self.next_tick = Some(index);
        eng.schedule(
            SimTime::from_nanos(index * sf.as_nanos()),
            Event::Subframe { index },
        );
    }

    fn on_subframe(&mut self, eng: &mut Engine<Event>, index: u64) {
        if self.next_tick != Some(index) {
            return;
        }
        self.next_tick = None;
        self.last_tick = Some(index);
        let now = eng.now();
        self.schedule_direction(eng, index, Direction::Uplink);
        self.schedule_direction(eng, index, Direction::Downlink);

        // next wake-up: the earliest head-of-line eligibility
        let earliest = self
            .ul_queues
            .iter()
            .chain(&self.dl_queues)
            .filter_map(|q| q.head_eligible_at())
            .min();
        if let Some(t) = earliest {
            self.wake(eng, t.max(now));
        }
    }

    fn schedule_direction(&mut self, eng: &mut Engine<Event>, index: u64, dir: Direction) {
        let now = eng.now();
        let (queues, snrs, rr) = match dir {
            Direction::Uplink => (&mut self.ul_queues, &self.ul_snr, &mut self.ul_rr),
            Direction::Downlink => (&mut self.dl_queues, &self.dl_snr, &mut self.dl_rr),
        };
        let demands: Vec<Demand> = queues
            .iter()
            .zip(snrs)
            .filter_map(|(q, snr)| {
                let bits = q.eligible_bits(now);
                (bits > 0).then_some(Demand {
                    node: q.node,
                    backlog_bits: bits,
                    snr_db: *snr,
                })
            })
            .collect();
        if demands.is_empty() {
            return;
        }
        let frame = &self.cfg.frame;
        let allocs = rr.schedule_subframe(
            index,
            dir,
            &demands,
            frame,
            &CQI_TABLE,
            self.cfg.channel.bandwidth_hz,
        );
        for alloc in allocs {
            let i = alloc.node.index as usize;
            let frags = queues[i].pull(alloc.tbs_bits, now);
            let bits: u64 = frags.iter().map(|f| f.size_bits).sum();
            match dir {
                Direction::Uplink => self.ul_bits += bits,
                Direction::Downlink => self.dl_bits += bits,
            }
            let done_at = match (frame.scheduler, alloc.resources) {
                (SchedulerKind::TtiRoundRobin, Resources::Symbols { .. }) => {
                    now + SimTime::from_nanos(
                        alloc.resources.end() as u64 * frame.symbol_duration().as_nanos(),
                    )
                }
                _ => now + frame.subframe,
            };
            if self.trace.snr && alloc.node.index == 0 {
                self.snr_trace.push(SnrSample {
                    time: now,
                    node_label: alloc.node.to_string(),
                    direction: dir,
                    snr_db: snrs[i],
                });
            }
            if !frags.is_empty() {
                eng.schedule(
                    done_at,
                    Event::RadioDelivery {
                        direction: dir,
                        node: alloc.node,
                        frags,
                    },
                );
            }
            if self.trace.alloc {
                self.alloc_trace.push(alloc);
            }
        }
    }

    fn on_radio_delivery(
        &mut self,
        eng: &mut Engine<Event>,
        dir: Direction,
        node: NodeId,
        frags: Vec<Fragment>,
    ) {
        let now = eng.now();
        let i = node.index as usize;
        for frag in frags {
            let reasm = match dir {
                Direction::Uplink => &mut self.ul_reasm[i],
                Direction::Downlink => &mut self.dl_reasm[i],
            };
            let done = match reasm.push(frag) {
                Ok(Some(done)) => done,
                Ok(None) => continue,
                Err(e) => panic!("reassembly at {node}: {e}"),
            };
            let packet = self.packets.get_mut(&done.packet_id).expect("live packet");
            assert_eq!(
                done.total_bits,
                packet.wire_bits(),
                "size mismatch after reassembly"
            );
            match dir {
                Direction::Uplink => {
                    packet.log_hop(NodeId::ENB, now);
                    match self.ec.admit(now) {
                        Some(dep) => {
                            eng.schedule(
                                dep,
                                Event::EcDeparture {
                                    packet: done.packet_id,
                                },
                            );
                        }
                        None => self.drop_packet(done.packet_id),
                    }
                }
                Direction::Downlink => {
                    let packet = self.packets.remove(&done.packet_id).expect("live packet");
                    self.records.push(co_app_receive(
                        packet.id.0,
                        i as u32,
                        packet.dst.index,
                        packet.created_at(),
                        now,
                        self.cfg.epsilon,
                    ));
                }
            }
        }
    }

    fn on_ec_departure(&mut self, eng: &mut Engine<Event>, id: PacketId) {
        let ul = self.packets.remove(&id).expect("live packet");
        let dl_id = self.new_packet_id();
        let dl = ul.forwarded(dl_id, NodeId::ENB, ul.dst);
        self.packets.insert(dl_id, dl);
        match self.cfg.rco_core_delay {
            Some(core) => {
                eng.schedule_in(core, Event::DlEnqueue { packet: dl_id });
            }
            None => self.on_dl_enqueue(eng, dl_id),
        }
    }

    fn on_dl_enqueue(&mut self, eng: &mut Engine<Event>, id: PacketId) {
        let now = eng.now();
        let packet = &self.packets[&id];
        let lco = packet.dst.index as usize;
        let wire = packet.wire_bytes();
        let eligible = now + self.cfg.frame.dl_sched_delay;
        match self.dl_queues[lco].push(id, wire, eligible) {
            Ok(()) => self.wake(eng, eligible),
            Err(_) => self.drop_packet(id),
        }
    }

    fn on_shadow_update(&mut self, eng: &mut Engine<Event>) {
        let params = &self.cfg.channel;
        for i in 0..self.n_pairs {
            self.ul_links[i] =
                update_shadowing(self.ul_links[i], params, &mut self.ul_shadow_rng[i]);
            self.ul_snr[i] = snr_db(&self.ul_links[i], params, Direction::Uplink);
            self.dl_links[i] =
                update_shadowing(self.dl_links[i], params, &mut self.dl_shadow_rng[i]);
            self.dl_snr[i] = snr_db(&self.dl_links[i], params, Direction::Downlink);
        }
        let next = eng.now() + params.shadow_update_period;
        if next < self.cfg.sim_duration {
            eng.schedule(next, Event::ShadowUpdate);
        }
    }
}

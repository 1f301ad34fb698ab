//! Per-subframe round-robin schedulers.
//!
//! Both variants walk the backlogged, in-service nodes in rotation order:
//! ascending node id starting from a cursor that moves every subframe.
//! LTE splits the resource blocks equally; mmWave hands out contiguous
//! symbol runs sized to each node's need, capped at a fair share, and then
//! redistributes what is left.

use std::fmt;

use crate::channel::Direction;
use crate::link::frame::{tbs_bits, FrameConfig, SchedulerKind};
use crate::link::mcs::{select_mcs, McsEntry};
use crate::topology::NodeId;

/// What one node asks for in one subframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demand {
    pub node: NodeId,
    /// Schedulable bits in the node's queue.
    pub backlog_bits: u64,
    pub snr_db: f64,
}

/// Granted resources, as a half-open range of unit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resources {
    ResourceBlocks { start: u32, count: u32 },
    Symbols { start: u32, count: u32 },
}

impl Resources {
    pub fn count(&self) -> u32 {
        match *self {
            Resources::ResourceBlocks { count, .. } | Resources::Symbols { count, .. } => count,
        }
    }

    pub fn start(&self) -> u32 {
        match *self {
            Resources::ResourceBlocks { start, .. } | Resources::Symbols { start, .. } => start,
        }
    }

    pub fn end(&self) -> u32 {
        self.start() + self.count()
    }
}

impl fmt::Display for Resources {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Resources::ResourceBlocks { start, count } => {
                write!(f, "rb:{}-{}", start, start + count - 1)
            }
            Resources::Symbols { start, count } => {
                write!(f, "sym:{}-{}", start, start + count - 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceAllocation {
    pub subframe_index: u64,
    pub node: NodeId,
    pub direction: Direction,
    pub resources: Resources,
    pub mcs: McsEntry,
    pub tbs_bits: u64,
}

/// Round-robin state for one direction of one cell.
#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    cursor: Option<NodeId>,
}

fn successor(id: NodeId) -> NodeId {
    NodeId::new(id.role, id.index + 1)
}

impl RoundRobin {
    pub fn new() -> Self {
        Self::default()
    }

    /// Nodes with id >= cursor ascending, then the rest ascending.
    fn rotation<'a>(&self, nodes: &'a [Candidate]) -> Vec<&'a Candidate> {
        let split = match self.cursor {
            Some(c) => nodes.partition_point(|n| n.node < c),
            None => 0,
        };
        nodes[split..].iter().chain(&nodes[..split]).collect()
    }

    /// Allocates one subframe in one direction.
    ///
    /// Nodes with no backlog or below the lowest MCS threshold get nothing.
    pub fn schedule_subframe(
        &mut self,
        subframe_index: u64,
        direction: Direction,
        demands: &[Demand],
        frame: &FrameConfig,
        table: &[McsEntry],
        bandwidth_hz: f64,
    ) -> Vec<ResourceAllocation> {
        let mut candidates: Vec<Candidate> = demands
            .iter()
            .filter(|d| d.backlog_bits > 0)
            .filter_map(|d| {
                select_mcs(d.snr_db, table).map(|mcs| Candidate {
                    node: d.node,
                    backlog_bits: d.backlog_bits,
                    mcs,
                })
            })
            .collect();
        if candidates.is_empty() {
            return Vec::new();
        }
        candidates.sort_by_key(|c| c.node);
        candidates.dedup_by_key(|c| c.node);
        let order = self.rotation(&candidates);

        let grants = match frame.scheduler {
            SchedulerKind::RbRoundRobin => split_rbs(order.len(), frame.n_rb),
            SchedulerKind::TtiRoundRobin => {
                let per_symbol: Vec<u64> = order
                    .iter()
                    .map(|c| tbs_bits(&c.mcs, 1, frame, bandwidth_hz).max(1))
                    .collect();
                let needs: Vec<u32> = order
                    .iter()
                    .zip(&per_symbol)
                    .map(|(c, cap)| {
                        let n = c.backlog_bits.div_ceil(*cap);
                        (n.min(u32::MAX as u64) as u32).max(frame.min_tti_symbols)
                    })
                    .collect();
                split_symbols(&needs, frame.data_symbols(), frame.min_tti_symbols)
            }
        };

        let mut out = Vec::with_capacity(order.len());
        let mut next_unit = match frame.scheduler {
            SchedulerKind::RbRoundRobin => 0,
            SchedulerKind::TtiRoundRobin => frame.control_overhead_symbols,
        };
        let mut last_served = None;
        for (cand, &units) in order.iter().zip(&grants) {
            if units == 0 {
                continue;
            }
            let resources = match frame.scheduler {
                SchedulerKind::RbRoundRobin => Resources::ResourceBlocks {
                    start: next_unit,
                    count: units,
                },
                SchedulerKind::TtiRoundRobin => Resources::Symbols {
                    start: next_unit,
                    count: units,
                },
            };
            next_unit += units;
            last_served = Some(cand.node);
            out.push(ResourceAllocation {
                subframe_index,
                node: cand.node,
                direction,
                resources,
                mcs: cand.mcs,
                tbs_bits: tbs_bits(&cand.mcs, units, frame, bandwidth_hz),
            });
        }

        let everyone_served = grants.iter().all(|g| *g > 0);
        self.cursor = if everyone_served {
            Some(successor(order[0].node))
        } else {
            last_served.map(successor)
        };
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    node: NodeId,
    backlog_bits: u64,
    mcs: McsEntry,
}

/// Equal split of `n_rb` over `k` claimants; the first `n_rb % k` get one
/// extra. With more claimants than blocks, the first `n_rb` get one each.
fn split_rbs(k: usize, n_rb: u32) -> Vec<u32> {
    let k32 = k as u32;
    if k32 <= n_rb {
        let (base, rem) = (n_rb / k32, n_rb % k32);
        (0..k32).map(|i| base + u32::from(i < rem)).collect()
    } else {
        (0..k32).map(|i| u32::from(i < n_rb)).collect()
    }
}

/// Need-capped fair share of `data_symbols`, then leftover symbols to
/// still-hungry nodes in rotation order.
fn split_symbols(needs: &[u32], data_symbols: u32, min_tti: u32) -> Vec<u32> {
    let k = needs.len() as u32;
    let even = data_symbols / k;
    let (fair, extra) = if even >= min_tti {
        (even, data_symbols % k)
    } else {
        (min_tti, 0)
    };
    let mut grants = vec![0u32; needs.len()];
    let mut remaining = data_symbols;
    for (i, need) in needs.iter().enumerate() {
        if remaining < min_tti {
            break;
        }
        let share = fair + u32::from((i as u32) < extra);
        let g = (*need).min(share).min(remaining);
        grants[i] = g;
        remaining -= g;
    }
    for (i, need) in needs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if grants[i] == 0 && remaining < min_tti {
            continue;
        }
        let add = need.saturating_sub(grants[i]).min(remaining);
        grants[i] += add;
        remaining -= add;
    }
    grants
}

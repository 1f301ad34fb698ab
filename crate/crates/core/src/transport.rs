//! UDP/IPv6 datagrams, radio-bearer segmentation and in-order reassembly.

use thiserror::Error;

use crate::time::SimTime;
use crate::topology::NodeId;

pub const IPV6_HEADER_BYTES: u32 = 40;
pub const UDP_HEADER_BYTES: u32 = 8;
pub const HEADER_BYTES: u32 = IPV6_HEADER_BYTES + UDP_HEADER_BYTES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId(pub u64);

/// An application datagram. `created_at` is the latency tag and is fixed
/// at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub id: PacketId,
    pub src: NodeId,
    pub dst: NodeId,
    pub payload_bytes: u32,
    pub header_bytes: u32,
    created_at: SimTime,
    pub hop_log: Vec<(NodeId, SimTime)>,
}

impl Packet {
    pub fn created_at(&self) -> SimTime {
        self.created_at
    }

    pub fn wire_bytes(&self) -> u32 {
        self.payload_bytes + self.header_bytes
    }

    pub fn wire_bits(&self) -> u64 {
        8 * self.wire_bytes() as u64
    }

    pub fn log_hop(&mut self, node: NodeId, at: SimTime) {
        self.hop_log.push((node, at));
    }

    /// A new datagram carrying the same payload and the same latency tag,
    /// as emitted by a forwarder.
    pub fn forwarded(&self, id: PacketId, src: NodeId, dst: NodeId) -> Packet {
        Packet {
            id,
            src,
            dst,
            payload_bytes: self.payload_bytes,
            header_bytes: self.header_bytes,
            created_at: self.created_at,
            hop_log: self.hop_log.clone(),
        }
    }

    /// Moves the latency tag. Only the ingress point may do this, before
    /// the packet enters the radio path.
    pub(crate) fn restamp(&mut self, at: SimTime) {
        self.created_at = at;
    }
}

pub fn make_datagram(
    id: PacketId,
    payload_bytes: u32,
    src: NodeId,
    dst: NodeId,
    now: SimTime,
) -> Packet {
    Packet {
        id,
        src,
        dst,
        payload_bytes,
        header_bytes: HEADER_BYTES,
        created_at: now,
        hop_log: Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fragment {
    pub packet_id: PacketId,
    pub index: u32,
    pub size_bits: u64,
    pub is_last: bool,
}

/// Splits `total_bits` greedily over successive grants. A zero-bit packet
/// yields one empty terminal fragment. Grants beyond the last fragment are
/// left unused.
///
/// # Panics
///
/// If a zero-capacity grant is offered, or the grants run out first.
pub fn segment_bits(
    packet_id: PacketId,
    total_bits: u64,
    grants: impl IntoIterator<Item = u64>,
) -> Vec<Fragment> {
    let mut out = Vec::new();
    let mut remaining = total_bits;
    let mut grants = grants.into_iter();
    loop {
        let cap = grants
            .next()
            .expect("grant schedule exhausted before packet");
        assert!(cap > 0, "zero-capacity grant");
        let take = remaining.min(cap);
        remaining -= take;
        out.push(Fragment {
            packet_id,
            index: out.len() as u32,
            size_bits: take,
            is_last: remaining == 0,
        });
        if remaining == 0 {
            return out;
        }
    }
}

pub fn segment(packet: &Packet, grants: impl IntoIterator<Item = u64>) -> Vec<Fragment> {
    segment_bits(packet.id, packet.wire_bits(), grants)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReassemblyError {
    #[error("fragment {got} of packet {packet:?} arrived, expected {expected}")]
    OutOfOrder {
        packet: PacketId,
        expected: u32,
        got: u32,
    },
    #[error("fragment of packet {got:?} arrived while packet {pending:?} is incomplete")]
    Interleaved { pending: PacketId, got: PacketId },
}

/// A packet whose final fragment has arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reassembled {
    pub packet_id: PacketId,
    pub total_bits: u64,
    pub fragments: u32,
}

/// Per-flow reassembly. Fragments must arrive in order, one packet at a
/// time; anything else is a model violation.
#[derive(Debug, Default, Clone)]
pub struct Reassembler {
    pending: Option<(PacketId, u32, u64)>,
}

impl Reassembler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn in_progress(&self) -> Option<PacketId> {
        self.pending.map(|(id, _, _)| id)
    }

    pub fn push(&mut self, frag: Fragment) -> Result<Option<Reassembled>, ReassemblyError> {
        let (id, next, bits) = match self.pending {
            None => {
                if frag.index != 0 {
                    return Err(ReassemblyError::OutOfOrder {
                        packet: frag.packet_id,
                        expected: 0,
                        got: frag.index,
                    });
                }
                (frag.packet_id, 0, 0)
            }
            Some((id, next, bits)) => {
                if id != frag.packet_id {
                    return Err(ReassemblyError::Interleaved {
                        pending: id,
                        got: frag.packet_id,
                    });
                }
                if frag.index != next {
                    return Err(ReassemblyError::OutOfOrder {
                        packet: id,
                        expected: next,
                        got: frag.index,
                    });
                }
                (id, next, bits)
            }
        };
        let bits = bits + frag.size_bits;
        if frag.is_last {
            self.pending = None;
            Ok(Some(Reassembled {
                packet_id: id,
                total_bits: bits,
                fragments: next + 1,
            }))
        } else {
            self.pending = Some((id, next + 1, bits));
            Ok(None)
        }
    }
}

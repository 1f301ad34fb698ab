use std::collections::VecDeque;

use thiserror::Error;

use crate::channel::Direction;
use crate::time::SimTime;
use crate::topology::NodeId;
use crate::transport::{Fragment, PacketId};

/// Default per-queue cap: 1 MiB.
pub const DEFAULT_QUEUE_CAP_BYTES: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("queue full: {backlogged} + {incoming} bytes exceeds cap {cap}")]
pub struct QueueFull {
    pub backlogged: u64,
    pub incoming: u64,
    pub cap: u64,
}

#[derive(Debug, Clone)]
struct Pending {
    packet_id: PacketId,
    wire_bits: u64,
    sent_bits: u64,
    next_index: u32,
    eligible_at: SimTime,
}

impl Pending {
    fn remaining(&self) -> u64 {
        self.wire_bits - self.sent_bits
    }
}

/// FIFO of datagrams waiting for radio grants on one node and direction.
///
/// A grant is filled greedily from the head: the head packet's remaining
/// bits first, then the next eligible packet, and so on.
#[derive(Debug, Clone)]
pub struct TxQueue {
    pub node: NodeId,
    pub direction: Direction,
    fifo: VecDeque<Pending>,
    bytes_backlogged: u64,
    bits_remaining: u64,
    cap_bytes: u64,
}

impl TxQueue {
    pub fn new(node: NodeId, direction: Direction, cap_bytes: u64) -> Self {
        TxQueue {
            node,
            direction,
            fifo: VecDeque::new(),
            bytes_backlogged: 0,
            bits_remaining: 0,
            cap_bytes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    /// Wire bytes of every packet not yet fully transmitted.
    pub fn bytes_backlogged(&self) -> u64 {
        self.bytes_backlogged
    }

    pub fn bits_remaining(&self) -> u64 {
        self.bits_remaining
    }

    pub fn push(
        &mut self,
        packet_id: PacketId,
        wire_bytes: u32,
        eligible_at: SimTime,
    ) -> Result<(), QueueFull> {
        let incoming = wire_bytes as u64;
        if self.bytes_backlogged + incoming > self.cap_bytes {
            return Err(QueueFull {
                backlogged: self.bytes_backlogged,
                incoming,
                cap: self.cap_bytes,
            });
        }
        self.bytes_backlogged += incoming;
        self.bits_remaining += 8 * incoming;
        self.fifo.push_back(Pending {
            packet_id,
            wire_bits: 8 * incoming,
            sent_bits: 0,
            next_index: 0,
            eligible_at,
        });
        Ok(())
    }

    pub fn head_eligible_at(&self) -> Option<SimTime> {
        self.fifo.front().map(|p| p.eligible_at)
    }

    /// Bits that a grant issued at `now` could carry: the head-of-line run of
    /// packets whose access delay has elapsed.
    pub fn eligible_bits(&self, now: SimTime) -> u64 {
        self.fifo
            .iter()
            .take_while(|p| p.eligible_at <= now)
            .map(Pending::remaining)
            .sum()
    }

    /// Fills a grant of `bits` from the head, returning the fragments sent.
    pub fn pull(&mut self, mut bits: u64, now: SimTime) -> Vec<Fragment> {
        let mut out = Vec::new();
        while bits > 0 {
            let Some(head) = self.fifo.front_mut() else {
                break;
            };
            if head.eligible_at > now {
                break;
            }
            let take = head.remaining().min(bits);
            bits -= take;
            head.sent_bits += take;
            self.bits_remaining -= take;
            let is_last = head.remaining() == 0;
            out.push(Fragment {
                packet_id: head.packet_id,
                index: head.next_index,
                size_bits: take,
                is_last,
            });
            head.next_index += 1;
            if is_last {
                let done = self.fifo.pop_front().expect("head exists");
                self.bytes_backlogged -= done.wire_bits / 8;
            }
        }
        out
    }
}

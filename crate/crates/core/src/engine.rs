//! Sequential discrete-event engine.
//!
//! Events carry an arbitrary payload `E` and are dequeued strictly in
//! `(fire_at, seq)` order, where `seq` is a monotone insertion counter.
//! Two events scheduled for the same instant therefore fire in the order
//! they were scheduled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::time::SimTime;

/// Identifies a scheduled event by its insertion sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventHandle(u64);

impl EventHandle {
    pub fn seq(self) -> u64 {
        self.0
    }
}

#[derive(Debug)]
struct EventRecord<E> {
    fire_at: SimTime,
    seq: u64,
    action: E,
}

impl<E> PartialEq for EventRecord<E> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<E> Eq for EventRecord<E> {}

impl<E> Ord for EventRecord<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the earliest (time, seq) pops first.
        (other.fire_at, other.seq).cmp(&(self.fire_at, self.seq))
    }
}

impl<E> PartialOrd for EventRecord<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Counters returned by [`Engine::run_until`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStats {
    pub events_fired: u64,
    pub final_time: SimTime,
}

/// Virtual clock plus pending-event queue.
#[derive(Debug)]
pub struct Engine<E> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<EventRecord<E>>,
}

impl<E> Default for Engine<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Engine<E> {
    pub fn new() -> Self {
        Engine {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Schedules `action` to fire at `at`.
    ///
    /// # Panics
    ///
    /// Scheduling into the past is a model bug and aborts the run.
    pub fn schedule(&mut self, at: SimTime, action: E) -> EventHandle {
        assert!(
            at >= self.now,
            "event scheduled in the past: at={at} now={}",
            self.now
        );
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(EventRecord {
            fire_at: at,
            seq,
            action,
        });
        EventHandle(seq)
    }

    pub fn schedule_in(&mut self, delay: SimTime, action: E) -> EventHandle {
        let at = self.now + delay;
        self.schedule(at, action)
    }

    /// Fires every event with `fire_at <= t_end` (inclusive), then parks the
    /// clock at `t_end`.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> RunStats
    where
        F: FnMut(&mut Engine<E>, E),
    {
        let mut fired = 0;
        while self.queue.peek().is_some_and(|ev| ev.fire_at <= t_end) {
            let ev = self.queue.pop().expect("peeked");
            debug_assert!(ev.fire_at >= self.now);
            self.now = ev.fire_at;
            handler(self, ev.action);
            fired += 1;
        }
        if t_end > self.now {
            self.now = t_end;
        }
        RunStats {
            events_fired: fired,
            final_time: self.now,
        }
    }
}

//! Application endpoints: DRN client traffic, the EC forwarder on the eNB,
//! and the control-object server that records latency.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficMode {
    Periodic,
    OneShot,
}

impl TrafficMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TrafficMode::Periodic => "periodic",
            TrafficMode::OneShot => "one_shot",
        }
    }
}

impl fmt::Display for TrafficMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrafficMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "periodic" => Ok(TrafficMode::Periodic),
            "one_shot" => Ok(TrafficMode::OneShot),
            _ => Err(format!("expected periodic or one_shot, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficProfile {
    pub mode: TrafficMode,
    pub period: SimTime,
    pub payload_bytes: u32,
    /// First send is offset by a per-DRN uniform draw on `[0, start_jitter)`.
    pub start_jitter: SimTime,
}

impl Default for TrafficProfile {
    fn default() -> Self {
        TrafficProfile {
            mode: TrafficMode::Periodic,
            period: SimTime::from_millis(100),
            payload_bytes: 1024,
            start_jitter: SimTime::from_millis(100),
        }
    }
}

impl TrafficProfile {
    pub fn validate(&self) -> Result<(), String> {
        if self.mode == TrafficMode::Periodic && self.period == SimTime::ZERO {
            return Err("period must be > 0 in periodic mode".into());
        }
        Ok(())
    }

    /// Send instants of one DRN whose first send is at `offset`, strictly
    /// before `until`.
    pub fn send_times(&self, offset: SimTime, until: SimTime) -> Vec<SimTime> {
        match self.mode {
            TrafficMode::OneShot => {
                if offset < until {
                    vec![offset]
                } else {
                    Vec::new()
                }
            }
            TrafficMode::Periodic => {
                let mut out = Vec::new();
                let mut t = offset;
                while t < until {
                    out.push(t);
                    t += self.period;
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EcServerParams {
    pub service_time: SimTime,
    /// Packets in the server (waiting or in service).
    pub queue_capacity: usize,
}

impl Default for EcServerParams {
    fn default() -> Self {
        EcServerParams {
            service_time: SimTime::ZERO,
            queue_capacity: 10_000,
        }
    }
}

/// Single FIFO server on the eNB. Departure of each arrival is
/// `max(arrival, previous departure) + service_time`.
#[derive(Debug, Clone)]
pub struct EcServer {
    params: EcServerParams,
    last_departure: SimTime,
    departures: VecDeque<SimTime>,
}

impl EcServer {
    pub fn new(params: EcServerParams) -> Self {
        EcServer {
            params,
            last_departure: SimTime::ZERO,
            departures: VecDeque::new(),
        }
    }

    /// Admits an arrival and returns its departure time, or `None` if the
    /// server is full and the packet is dropped.
    pub fn admit(&mut self, arrival: SimTime) -> Option<SimTime> {
        while self.departures.front().is_some_and(|d| *d <= arrival) {
            self.departures.pop_front();
        }
        if self.departures.len() >= self.params.queue_capacity {
            return None;
        }
        let departure = arrival.max(self.last_departure) + self.params.service_time;
        self.last_departure = departure;
        self.departures.push_back(departure);
        Some(departure)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyRecord {
    pub packet_id: u64,
    pub drn_index: u32,
    pub lco_index: u32,
    pub created_at: SimTime,
    pub delivered_at: SimTime,
    pub t_d: SimTime,
    pub met_deadline: bool,
}

impl LatencyRecord {
    pub fn t_d_ms(&self) -> f64 {
        self.t_d.as_millis_f64()
    }
}

/// Server-side bookkeeping when a datagram is fully received at the
/// control object.
pub fn co_app_receive(
    packet_id: u64,
    drn_index: u32,
    lco_index: u32,
    created_at: SimTime,
    delivered_at: SimTime,
    epsilon: SimTime,
) -> LatencyRecord {
    let t_d = delivered_at - created_at;
    LatencyRecord {
        packet_id,
        drn_index,
        lco_index,
        created_at,
        delivered_at,
        t_d,
        met_deadline: t_d <= epsilon,
    }
}

/// Share of deliveries within the deadline. With nothing delivered this is
/// 1 when nothing was sent either, else 0.
pub fn deadline_fraction(records: &[LatencyRecord], sent: u64) -> f64 {
    if records.is_empty() {
        return if sent == 0 { 1.0 } else { 0.0 };
    }
    let met = records.iter().filter(|r| r.met_deadline).count();
    met as f64 / records.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(delivered_ms: f64, eps_ms: u64) -> LatencyRecord {
        co_app_receive(
            0,
            0,
            0,
            SimTime::ZERO,
            SimTime::from_millis_f64(delivered_ms).unwrap(),
            SimTime::from_millis(eps_ms),
        )
    }

    #[test]
    fn periodic_schedule_counts() {
        let p = TrafficProfile::default();
        let ten_s = SimTime::from_secs(10);
        assert_eq!(p.send_times(SimTime::ZERO, ten_s).len(), 100);
        assert_eq!(p.send_times(SimTime::from_millis(99), ten_s).len(), 100);
        let one = TrafficProfile {
            mode: TrafficMode::OneShot,
            ..p
        };
        assert_eq!(one.send_times(SimTime::from_millis(37), ten_s).len(), 1);
    }

    #[test]
    fn ec_immediate_forwarding() {
        let mut ec = EcServer::new(EcServerParams::default());
        let t = SimTime::from_millis(5);
        assert_eq!(ec.admit(t), Some(t));
    }

    #[test]
    fn ec_fifo_recurrence() {
        let mut ec = EcServer::new(EcServerParams {
            service_time: SimTime::from_millis(1),
            queue_capacity: 10,
        });
        let t = SimTime::from_millis(5);
        assert_eq!(ec.admit(t), Some(SimTime::from_millis(6)));
        assert_eq!(ec.admit(t), Some(SimTime::from_millis(7)));
        // idle gap: the server restarts from the arrival
        assert_eq!(
            ec.admit(SimTime::from_millis(20)),
            Some(SimTime::from_millis(21))
        );
    }

    #[test]
    fn ec_overflow_drops() {
        let mut ec = EcServer::new(EcServerParams {
            service_time: SimTime::from_millis(1),
            queue_capacity: 2,
        });
        let t = SimTime::ZERO;
        assert!(ec.admit(t).is_some());
        assert!(ec.admit(t).is_some());
        assert_eq!(ec.admit(t), None);
        // after both have left there is room again
        assert!(ec.admit(SimTime::from_millis(2)).is_some());
    }

    #[test]
    fn deadline_checks() {
        let r = rec(14.4, 50);
        assert_eq!(r.t_d, SimTime::from_micros(14_400));
        assert!(r.met_deadline);
        assert!(!rec(713.55, 50).met_deadline);
        let z = rec(0.0, 50);
        assert_eq!(z.t_d, SimTime::ZERO);
        assert!(z.met_deadline);
    }

    #[test]
    fn deadline_fraction_conventions() {
        let all = [rec(1.0, 50), rec(2.0, 50)];
        assert_eq!(deadline_fraction(&all, 2), 1.0);
        let mixed = [rec(1.0, 50), rec(2.0, 50), rec(3.0, 50), rec(90.0, 50)];
        assert_eq!(deadline_fraction(&mixed, 4), 0.75);
        assert_eq!(deadline_fraction(&[], 5), 0.0);
        assert_eq!(deadline_fraction(&[], 0), 1.0);
    }
}

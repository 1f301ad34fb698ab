//! TSN to DRN read hop, modeled as a delay.

use rand::Rng;

use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfidDelay {
    Fixed(SimTime),
    /// Uniform on `[min, max]`, drawn per event.
    Uniform {
        min: SimTime,
        max: SimTime,
    },
}

impl RfidDelay {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SimTime {
        match *self {
            RfidDelay::Fixed(d) => d,
            RfidDelay::Uniform { min, max } => {
                SimTime::from_nanos(rng.random_range(min.as_nanos()..=max.as_nanos()))
            }
        }
    }
}

/// Time at which the DRN application holds the sensed payload.
pub fn rfid_read(tsn_event_time: SimTime, t_rfid: SimTime) -> SimTime {
    tsn_event_time + t_rfid
}

//! Radio access: MCS selection, frame timing, schedulers, UE/eNB buffers
//! and the RFID read hop.

pub mod frame;
pub mod mcs;
pub mod queue;
pub mod rfid;
pub mod scheduler;

pub use frame::{tbs_bits, FrameConfig, SchedulerKind};
pub use mcs::{select_mcs, McsEntry, CQI_TABLE};
pub use queue::{QueueFull, TxQueue, DEFAULT_QUEUE_CAP_BYTES};
pub use rfid::{rfid_read, RfidDelay};
pub use scheduler::{Demand, ResourceAllocation, Resources, RoundRobin};

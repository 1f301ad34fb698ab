//! Per-run metrics, cross-run aggregation, and the CSV schemas.
//!
//! `runs.csv` and `summary.csv` share a column layout; floats are printed
//! with three decimals, latencies in milliseconds, and a latency statistic
//! with no deliveries behind it prints as `nan`.

use std::io::{self, Write};

use crate::app::deadline_fraction;
use crate::channel::SnrSample;
use crate::config::Backhaul;
use crate::link::ResourceAllocation;
use crate::sim::RunOutcome;

pub const RUNS_HEADER: &str = "backhaul,n_pairs,payload_bytes,run_index,mean_td_ms,min_td_ms,max_td_ms,sent,delivered,dropped,loss_ratio,deadline_fraction";
pub const SUMMARY_HEADER: &str = "backhaul,n_pairs,payload_bytes,runs,mean_td_ms,min_td_ms,max_td_ms,sent,delivered,dropped,loss_ratio,deadline_fraction";
pub const SNR_TRACE_HEADER: &str = "time_s,node_label,direction,snr_db";
pub const ALLOC_TRACE_HEADER: &str = "subframe,node,direction,resources,tbs_bits";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub backhaul: Backhaul,
    pub n_pairs: usize,
    pub payload_bytes: u32,
    pub run_index: u32,
    pub mean_td_ms: Option<f64>,
    pub min_td_ms: Option<f64>,
    pub max_td_ms: Option<f64>,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub loss_ratio: f64,
    pub deadline_fraction: f64,
}

impl MetricsRow {
    pub fn from_outcome(backhaul: Backhaul, payload_bytes: u32, out: &RunOutcome) -> Self {
        let tds: Vec<f64> = out.records.iter().map(|r| r.t_d_ms()).collect();
        let (mean, min, max) = if tds.is_empty() {
            (None, None, None)
        } else {
            (
                Some(tds.iter().sum::<f64>() / tds.len() as f64),
                tds.iter().copied().reduce(f64::min),
                tds.iter().copied().reduce(f64::max),
            )
        };
        MetricsRow {
            backhaul,
            n_pairs: out.n_pairs,
            payload_bytes,
            run_index: out.run_index,
            mean_td_ms: mean,
            min_td_ms: min,
            max_td_ms: max,
            sent: out.sent,
            delivered: out.delivered,
            dropped: out.dropped,
            loss_ratio: ratio(out.dropped, out.sent),
            deadline_fraction: deadline_fraction(&out.records, out.sent),
        }
    }

    pub fn sort_key(&self) -> (Backhaul, usize, u32, u32) {
        (
            self.backhaul,
            self.n_pairs,
            self.payload_bytes,
            self.run_index,
        )
    }

    pub fn write_csv_line<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{:.3},{:.3}",
            self.backhaul,
            self.n_pairs,
            self.payload_bytes,
            self.run_index,
            fmt_opt(self.mean_td_ms),
            fmt_opt(self.min_td_ms),
            fmt_opt(self.max_td_ms),
            self.sent,
            self.delivered,
            self.dropped,
            self.loss_ratio,
            self.deadline_fraction
        )
    }
}

/// One point of a sweep, pooled over its runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub backhaul: Backhaul,
    pub n_pairs: usize,
    pub payload_bytes: u32,
    pub runs: u32,
    /// Mean of the per-run means (runs without deliveries are skipped).
    pub mean_td_ms: Option<f64>,
    pub min_td_ms: Option<f64>,
    pub max_td_ms: Option<f64>,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub loss_ratio: f64,
    pub deadline_fraction: f64,
}

impl SummaryRow {
    pub fn write_csv_line<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{:.3},{:.3}",
            self.backhaul,
            self.n_pairs,
            self.payload_bytes,
            self.runs,
            fmt_opt(self.mean_td_ms),
            fmt_opt(self.min_td_ms),
            fmt_opt(self.max_td_ms),
            self.sent,
            self.delivered,
            self.dropped,
            self.loss_ratio,
            self.deadline_fraction
        )
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), |v| format!("{v:.3}"))
}

/// Groups rows by `(backhaul, n_pairs, payload)` and pools each group.
/// Output is ordered by that key.
pub fn aggregate(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&MetricsRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| {
        (a.backhaul, a.n_pairs, a.payload_bytes) == (b.backhaul, b.n_pairs, b.payload_bytes)
    }) {
        let means: Vec<f64> = group.iter().filter_map(|r| r.mean_td_ms).collect();
        let sent = group.iter().map(|r| r.sent).sum();
        let delivered: u64 = group.iter().map(|r| r.delivered).sum();
        let dropped = group.iter().map(|r| r.dropped).sum();
        let met: f64 = group
            .iter()
            .map(|r| r.deadline_fraction * r.delivered as f64)
            .sum();
        let deadline = if delivered == 0 {
            if sent == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            met / delivered as f64
        };
        out.push(SummaryRow {
            backhaul: group[0].backhaul,
            n_pairs: group[0].n_pairs,
            payload_bytes: group[0].payload_bytes,
            runs: group.len() as u32,
            mean_td_ms: (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64),
            min_td_ms: group.iter().filter_map(|r| r.min_td_ms).reduce(f64::min),
            max_td_ms: group.iter().filter_map(|r| r.max_td_ms).reduce(f64::max),
            sent,
            delivered,
            dropped,
            loss_ratio: ratio(dropped, sent),
            deadline_fraction: deadline,
        });
    }
    out
}

pub fn write_runs_csv<W: Write>(mut w: W, rows: &[MetricsRow]) -> io::Result<()> {
    writeln!(w, "{RUNS_HEADER}")?;
    for r in rows {
        r.write_csv_line(&mut w)?;
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        r.write_csv_line(&mut w)?;
    }
    Ok(())
}

/// Node labels are suffixed with `@<n_pairs>` so that traces from several
/// network sizes can share one file.
pub fn write_snr_trace<W: Write>(mut w: W, traces: &[(usize, Vec<SnrSample>)]) -> io::Result<()> {
    writeln!(w, "{SNR_TRACE_HEADER}")?;
    for (n_pairs, samples) in traces {
        for s in samples {
            writeln!(
                w,
                "{:.6},{}@{},{},{:.3}",
                s.time.as_secs_f64(),
                s.node_label,
                n_pairs,
                s.direction,
                s.snr_db
            )?;
        }
    }
    Ok(())
}

pub fn write_alloc_trace<W: Write>(
    mut w: W,
    traces: &[(usize, Vec<ResourceAllocation>)],
) -> io::Result<()> {
    writeln!(w, "{ALLOC_TRACE_HEADER}")?;
    for (n_pairs, allocs) in traces {
        for a in allocs {
            writeln!(
                w,
                "{},{}@{},{},{},{}",
                a.subframe_index, a.node, n_pairs, a.direction, a.resources, a.tbs_bits
            )?;
        }
    }
    Ok(())
}

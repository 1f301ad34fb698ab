//! Sweeps over `(n_pairs, run_index)` points and writes the result files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::channel::SnrSample;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::link::ResourceAllocation;
use crate::metrics::{
    aggregate, write_alloc_trace, write_runs_csv, write_snr_trace, write_summary_csv, MetricsRow,
    SummaryRow,
};
use crate::sim::{run_once, TraceOptions};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads; 0 picks the number of CPUs.
    pub jobs: usize,
    pub trace: TraceOptions,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    /// Sorted by `(backhaul, n_pairs, payload, run_index)`.
    pub rows: Vec<MetricsRow>,
    pub summary: Vec<SummaryRow>,
    /// Traces of run 0 at each network size, ascending by size.
    pub snr_traces: Vec<(usize, Vec<SnrSample>)>,
    pub alloc_traces: Vec<(usize, Vec<ResourceAllocation>)>,
}

/// Every `(n_pairs, run_index)` point of `cfg`, each on its own fresh
/// deployment. Results do not depend on `jobs`.
pub fn run_sweep(cfg: &ScenarioConfig, opts: SweepOptions) -> Result<SweepResult> {
    let mut sizes = cfg.n_pairs_list.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let points: Vec<(usize, u32)> = sizes
        .iter()
        .flat_map(|&n| (0..cfg.runs_per_point).map(move |r| (n, r)))
        .collect();

    let run_point = |&(n, r): &(usize, u32)| {
        let trace = if r == 0 {
            opts.trace
        } else {
            TraceOptions::default()
        };
        run_once(cfg, n, r, trace)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| points.par_iter().map(run_point).collect::<Result<Vec<_>>>())?;

    let mut result = SweepResult::default();
    for out in outcomes {
        result.rows.push(MetricsRow::from_outcome(
            cfg.backhaul,
            cfg.payload_bytes(),
            &out,
        ));
        if out.run_index == 0 {
            if opts.trace.snr {
                result.snr_traces.push((out.n_pairs, out.snr_trace));
            }
            if opts.trace.alloc {
                result.alloc_traces.push((out.n_pairs, out.alloc_trace));
            }
        }
    }
    result.rows.sort_by_key(|r| r.sort_key());
    result.snr_traces.sort_by_key(|t| t.0);
    result.alloc_traces.sort_by_key(|t| t.0);
    result.summary = aggregate(&result.rows);
    Ok(result)
}

/// Text that, together with this binary version, regenerates every output.
pub fn manifest_text(cfg: &ScenarioConfig) -> String {
    format!(
        "# tagsim {}\n# resolved configuration; feed back with `tagsim run --config manifest.txt`\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.to_text()
    )
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `summary.csv`, `runs.csv`, `manifest.txt` and any traces into
/// `dir`, creating it if needed. Returns the files written.
pub fn write_outputs(
    dir: &Path,
    cfg: &ScenarioConfig,
    result: &SweepResult,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&mut BufWriter<fs::File>) -> std::io::Result<()>| {
        let path = dir.join(name);
        let mut w = create(&path)?;
        f(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok::<_, Error>(())
    };
    emit("summary.csv", &|w| write_summary_csv(w, &result.summary))?;
    emit("runs.csv", &|w| write_runs_csv(w, &result.rows))?;
    emit("manifest.txt", &|w| {
        w.write_all(manifest_text(cfg).as_bytes())
    })?;
    if !result.snr_traces.is_empty() {
        emit("snr_trace.csv", &|w| write_snr_trace(w, &result.snr_traces))?;
    }
    if !result.alloc_traces.is_empty() {
        emit("alloc_trace.csv", &|w| {
            write_alloc_trace(w, &result.alloc_traces)
        })?;
    }
    Ok(written)
}

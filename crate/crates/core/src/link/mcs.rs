//! SNR to modulation-and-coding mapping.

use std::cmp::Ordering;

/// One rung of the efficiency ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub index: u8,
    /// bits/s/Hz
    pub spectral_efficiency: f64,
    /// Lowest SNR (dB, inclusive) at which this entry is usable.
    pub min_snr_db: f64,
}

const fn entry(index: u8, spectral_efficiency: f64) -> McsEntry {
    McsEntry {
        index,
        spectral_efficiency,
        // -6.7 dB to 22.7 dB in 2.1 dB steps
        min_snr_db: -6.7 + 2.1 * (index as f64 - 1.0),
    }
}

/// 4-bit CQI efficiencies (QPSK through 64QAM), shared by LTE and mmWave.
pub const CQI_TABLE: [McsEntry; 15] = [
    entry(1, 0.1523),
    entry(2, 0.2344),
    entry(3, 0.3770),
    entry(4, 0.6016),
    entry(5, 0.8770),
    entry(6, 1.1758),
    entry(7, 1.4766),
    entry(8, 1.9141),
    entry(9, 2.4063),
    entry(10, 2.7305),
    entry(11, 3.3223),
    entry(12, 3.9023),
    entry(13, 4.5234),
    entry(14, 5.1152),
    entry(15, 5.5547),
];

/// Checks that efficiencies and thresholds both increase strictly.
pub fn validate_table(table: &[McsEntry]) -> Result<(), String> {
    if table.is_empty() {
        return Err("empty MCS table".into());
    }
    for w in table.windows(2) {
        if w[1]
            .spectral_efficiency
            .partial_cmp(&w[0].spectral_efficiency)
            != Some(Ordering::Greater)
        {
            return Err(format!("efficiency not increasing at index {}", w[1].index));
        }
        if w[1].min_snr_db.partial_cmp(&w[0].min_snr_db) != Some(Ordering::Greater) {
            return Err(format!("threshold not increasing at index {}", w[1].index));
        }
    }
    Ok(())
}

/// Highest entry whose threshold does not exceed `snr_db`, or `None` when
/// the link is below the lowest threshold (no service this subframe).
pub fn select_mcs(snr_db: f64, table: &[McsEntry]) -> Option<McsEntry> {
    table.iter().rev().find(|e| e.min_snr_db <= snr_db).copied()
}

//! Large-scale channel: urban-micro street-canyon LOS probability and path
//! loss, AR(1) log-normal shadowing, and the SNR link budget.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::time::SimTime;

/// Thermal noise density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Uplink,
    Downlink,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Uplink => "UL",
            Direction::Downlink => "DL",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub fc_ghz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_ue_dbm: f64,
    pub tx_power_enb_dbm: f64,
    pub noise_figure_db: f64,
    pub beamforming_gain_db: f64,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
    /// Zero disables shadowing updates.
    pub shadow_update_period: SimTime,
    pub shadow_corr: f64,
}

impl ChannelParams {
    /// 28 GHz, 1 GHz wide, with +20 dB combined array gain.
    pub fn mmwave() -> Self {
        ChannelParams {
            fc_ghz: 28.0,
            bandwidth_hz: 1e9,
            tx_power_ue_dbm: 23.0,
            tx_power_enb_dbm: 30.0,
            noise_figure_db: 5.0,
            beamforming_gain_db: 20.0,
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 7.82,
            shadow_update_period: SimTime::from_millis(100),
            shadow_corr: 0.9,
        }
    }

    /// 2.1 GHz, 20 MHz, no array gain.
    pub fn lte() -> Self {
        ChannelParams {
            fc_ghz: 2.1,
            bandwidth_hz: 20e6,
            beamforming_gain_db: 0.0,
            ..ChannelParams::mmwave()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.fc_ghz.is_nan() || self.fc_ghz <= 0.0 {
            return Err(format!("fc_ghz must be > 0, got {}", self.fc_ghz));
        }
        if self.bandwidth_hz.is_nan() || self.bandwidth_hz <= 0.0 {
            return Err(format!(
                "bandwidth_hz must be > 0, got {}",
                self.bandwidth_hz
            ));
        }
        if !(0.0..1.0).contains(&self.shadow_corr) {
            return Err(format!(
                "shadow_corr must be in [0,1), got {}",
                self.shadow_corr
            ));
        }
        if self.shadow_sigma_los_db < 0.0 || self.shadow_sigma_nlos_db < 0.0 {
            return Err("shadowing sigma must be >= 0".into());
        }
        Ok(())
    }

    pub fn shadow_sigma_db(&self, los: bool) -> f64 {
        if los {
            self.shadow_sigma_los_db
        } else {
            self.shadow_sigma_nlos_db
        }
    }

    pub fn tx_power_dbm(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Uplink => self.tx_power_ue_dbm,
            Direction::Downlink => self.tx_power_enb_dbm,
        }
    }

    /// Receiver noise floor in dBm.
    pub fn noise_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_HZ + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }
}

/// Probability that a link of length `d` meters is line-of-sight.
pub fn los_probability(d: f64) -> f64 {
    let d = d.max(0.0);
    if d <= 18.0 {
        return 1.0;
    }
    let e = (-d / 36.0).exp();
    (18.0 / d).min(1.0) * (1.0 - e) + e
}

/// Path loss in dB; distances under 1 m are clamped to 1 m.
pub fn path_loss_db(d: f64, fc_ghz: f64, los: bool) -> f64 {
    let d = d.max(1.0);
    let pl_los = 32.4 + 21.0 * d.log10() + 20.0 * fc_ghz.log10();
    if los {
        pl_los
    } else {
        let pl_nlos = 22.4 + 35.3 * d.log10() + 21.3 * fc_ghz.log10();
        pl_los.max(pl_nlos)
    }
}

/// Quasi-static state of one node-to-eNB link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub los: bool,
    pub shadow_db: f64,
    pub distance: f64,
}

impl LinkState {
    pub fn new(distance: f64, los: bool) -> Self {
        LinkState {
            los,
            shadow_db: 0.0,
            distance,
        }
    }

    /// Draws the LOS state once, and an initial shadowing value from the
    /// stationary distribution.
    pub fn draw<R: Rng + ?Sized>(
        distance: f64,
        params: &ChannelParams,
        los_rng: &mut R,
        shadow_rng: &mut R,
    ) -> Self {
        let los = los_rng.random::<f64>() < los_probability(distance);
        let sigma = params.shadow_sigma_db(los);
        let z: f64 = shadow_rng.sample(StandardNormal);
        LinkState {
            los,
            shadow_db: sigma * z,
            distance,
        }
    }
}

/// Link-budget SNR in dB.
pub fn snr_db(link: &LinkState, params: &ChannelParams, dir: Direction) -> f64 {
    params.tx_power_dbm(dir) + params.beamforming_gain_db
        - path_loss_db(link.distance, params.fc_ghz, link.los)
        - link.shadow_db
        - params.noise_dbm()
}

/// One AR(1) step of the shadowing process. LOS state is untouched.
pub fn update_shadowing<R: Rng + ?Sized>(
    link: LinkState,
    params: &ChannelParams,
    rng: &mut R,
) -> LinkState {
    let rho = params.shadow_corr;
    let sigma = params.shadow_sigma_db(link.los);
    let z: f64 = rng.sample(StandardNormal);
    LinkState {
        shadow_db: rho * link.shadow_db + (1.0 - rho * rho).sqrt() * sigma * z,
        ..link
    }
}

/// One point of the SNR time series for a traced node.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSample {
    pub time: SimTime,
    pub node_label: String,
    pub direction: Direction,
    pub snr_db: f64,
}

//! Simulation parameters, presets and validation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Pilot-assignment scheme under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Proposed,
    Random,
    Scalable,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::Random, Scheme::Scalable];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Random => "random",
            Scheme::Scalable => "scalable",
        }
    }

    /// Stable small integer used when deriving per-scheme RNG streams.
    pub(crate) fn stream_id(self) -> u64 {
        match self {
            Scheme::Proposed => 0,
            Scheme::Random => 1,
            Scheme::Scalable => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "random" => Ok(Scheme::Random),
            "scalable" => Ok(Scheme::Scalable),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// Which schemes an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSelection {
    One(Scheme),
    All,
}

impl SchemeSelection {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeSelection::One(s) => vec![s],
            SchemeSelection::All => Scheme::ALL.to_vec(),
        }
    }
}

impl fmt::Display for SchemeSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSelection::One(s) => s.fmt(f),
            SchemeSelection::All => f.write_str("all"),
        }
    }
}

impl FromStr for SchemeSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "all" {
            Ok(SchemeSelection::All)
        } else {
            s.parse().map(SchemeSelection::One)
        }
    }
}

/// Scale on which controller selection measures LSFC gaps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GapScale {
    #[default]
    Linear,
    /// Gaps in dB, i.e. ratios of LSFCs.
    Db,
}

impl fmt::Display for GapScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapScale::Linear => "linear",
            GapScale::Db => "db",
        })
    }
}

impl FromStr for GapScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" => Ok(GapScale::Linear),
            "db" => Ok(GapScale::Db),
            other => Err(format!("unknown gap scale `{other}`")),
        }
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Small network that runs in seconds.
    Desk,
    /// The full evaluation scale: 100 APs over 2 km x 2 km, 50 instances of
    /// 500 realizations each. Slow.
    Paper,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(format!("unknown preset `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub area_side_m: f64,
    pub n_aps: usize,
    pub n_ues: usize,
    pub n_antennas: usize,
    pub n_pilots: usize,
    pub coherence_block: usize,
    pub ul_power_mw: f64,
    pub dl_power_mw: f64,
    pub bandwidth_hz: f64,
    pub ap_height_m: f64,
    pub n_instances: usize,
    pub n_realizations: usize,
    pub seed: u64,
    pub scheme: SchemeSelection,
    pub asd_deg: f64,
    pub shadow_sigma_db: f64,
    /// Path-loss intercept in dB at 1 m.
    pub pathloss_intercept_db: f64,
    /// Path-loss slope in dB per decade of distance.
    pub pathloss_slope_db: f64,
    pub noise_figure_db: f64,
    /// Iteration bound for the distributed pilot loop; `None` means `4 * n_pilots`.
    pub alg2_max_iter: Option<usize>,
    pub controller_gap_scale: GapScale,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::preset(Preset::Desk)
    }
}

/// Every key accepted by [`SimConfig::set`], in dump order.
pub const CONFIG_KEYS: &[&str] = &[
    "area_side_m",
    "n_aps",
    "n_ues",
    "n_antennas",
    "n_pilots",
    "coherence_block",
    "ul_power_mw",
    "dl_power_mw",
    "bandwidth_hz",
    "ap_height_m",
    "n_instances",
    "n_realizations",
    "seed",
    "scheme",
    "asd_deg",
    "shadow_sigma_db",
    "pathloss_intercept_db",
    "pathloss_slope_db",
    "noise_figure_db",
    "alg2_max_iter",
    "controller_gap_scale",
];

impl SimConfig {
    pub fn preset(preset: Preset) -> Self {
        let desk = SimConfig {
            area_side_m: 1000.0,
            n_aps: 25,
            n_ues: 30,
            n_antennas: 4,
            n_pilots: 5,
            coherence_block: 200,
            ul_power_mw: 100.0,
            dl_power_mw: 1000.0,
            bandwidth_hz: 20e6,
            ap_height_m: 10.0,
            n_instances: 20,
            n_realizations: 100,
            seed: 1,
            scheme: SchemeSelection::All,
            asd_deg: 15.0,
            shadow_sigma_db: 4.0,
            pathloss_intercept_db: -30.5,
            pathloss_slope_db: 36.7,
            noise_figure_db: 7.0,
            alg2_max_iter: None,
            controller_gap_scale: GapScale::Linear,
        };
        match preset {
            Preset::Desk => desk,
            Preset::Paper => SimConfig {
                area_side_m: 2000.0,
                n_aps: 100,
                n_ues: 100,
                n_pilots: 10,
                n_instances: 50,
                n_realizations: 500,
                ..desk
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(key: &'static str, reason: impl Into<String>) -> Result<()> {
            Err(Error::InvalidConfig {
                key,
                reason: reason.into(),
            })
        }
        let positive = [
            ("area_side_m", self.area_side_m),
            ("ul_power_mw", self.ul_power_mw),
            ("dl_power_mw", self.dl_power_mw),
            ("bandwidth_hz", self.bandwidth_hz),
            ("ap_height_m", self.ap_height_m),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return bad(key, format!("must be strictly positive, got {value}"));
            }
        }
        for (key, value) in [
            ("n_aps", self.n_aps),
            ("n_ues", self.n_ues),
            ("n_antennas", self.n_antennas),
            ("n_pilots", self.n_pilots),
            ("n_instances", self.n_instances),
        ] {
            if value == 0 {
                return bad(key, "must be at least 1");
            }
        }
        if self.n_pilots > self.coherence_block {
            return bad(
                "n_pilots",
                format!(
                    "must not exceed coherence_block ({} > {})",
                    self.n_pilots, self.coherence_block
                ),
            );
        }
        if self.n_realizations < 2 {
            return bad("n_realizations", "must be at least 2");
        }
        if !(self.asd_deg.is_finite() && self.asd_deg >= 0.0) {
            return bad("asd_deg", "must be non-negative");
        }
        if !(self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0) {
            return bad("shadow_sigma_db", "must be non-negative");
        }
        for (key, value) in [
            ("pathloss_intercept_db", self.pathloss_intercept_db),
            ("pathloss_slope_db", self.pathloss_slope_db),
            ("noise_figure_db", self.noise_figure_db),
        ] {
            if !value.is_finite() {
                return bad(key, "must be finite");
            }
        }
        if self.alg2_max_iter == Some(0) {
            return bad("alg2_max_iter", "must be at least 1");
        }
        Ok(())
    }

    pub fn max_pilot_iterations(&self) -> usize {
        self.alg2_max_iter.unwrap_or(4 * self.n_pilots)
    }

    /// Fraction of the coherence block left for data.
    pub fn prelog(&self) -> f64 {
        prelog(self.n_pilots, self.coherence_block)
    }

    /// Thermal noise power in mW over the configured bandwidth.
    pub fn noise_power_mw(&self) -> f64 {
        let dbm = -174.0 + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db;
        10f64.powf(dbm / 10.0)
    }

    /// Assigns one field from its textual form. Does not validate cross-field
    /// invariants; call [`SimConfig::validate`] afterwards.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(value: &str) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| format!("malformed value `{value}`: {e}"))
        }
        match key {
            "area_side_m" => self.area_side_m = num(value)?,
            "n_aps" => self.n_aps = num(value)?,
            "n_ues" => self.n_ues = num(value)?,
            "n_antennas" => self.n_antennas = num(value)?,
            "n_pilots" => self.n_pilots = num(value)?,
            "coherence_block" => self.coherence_block = num(value)?,
            "ul_power_mw" => self.ul_power_mw = num(value)?,
            "dl_power_mw" => self.dl_power_mw = num(value)?,
            "bandwidth_hz" => self.bandwidth_hz = num(value)?,
            "ap_height_m" => self.ap_height_m = num(value)?,
            "n_instances" => self.n_instances = num(value)?,
            "n_realizations" => self.n_realizations = num(value)?,
            "seed" => self.seed = num(value)?,
            "scheme" => self.scheme = value.parse()?,
            "asd_deg" => self.asd_deg = num(value)?,
            "shadow_sigma_db" => self.shadow_sigma_db = num(value)?,
            "pathloss_intercept_db" => self.pathloss_intercept_db = num(value)?,
            "pathloss_slope_db" => self.pathloss_slope_db = num(value)?,
            "noise_figure_db" => self.noise_figure_db = num(value)?,
            "alg2_max_iter" => self.alg2_max_iter = Some(num(value)?),
            "controller_gap_scale" => self.controller_gap_scale = value.parse()?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// `key = value` lines accepted back by the config parser.
    pub fn to_kv_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("area_side_m = {}", self.area_side_m),
            format!("n_aps = {}", self.n_aps),
            format!("n_ues = {}", self.n_ues),
            format!("n_antennas = {}", self.n_antennas),
            format!("n_pilots = {}", self.n_pilots),
            format!("coherence_block = {}", self.coherence_block),
            format!("ul_power_mw = {}", self.ul_power_mw),
            format!("dl_power_mw = {}", self.dl_power_mw),
            format!("bandwidth_hz = {}", self.bandwidth_hz),
            format!("ap_height_m = {}", self.ap_height_m),
            format!("n_instances = {}", self.n_instances),
            format!("n_realizations = {}", self.n_realizations),
            format!("seed = {}", self.seed),
            format!("scheme = {}", self.scheme),
            format!("asd_deg = {}", self.asd_deg),
            format!("shadow_sigma_db = {}", self.shadow_sigma_db),
            format!("pathloss_intercept_db = {}", self.pathloss_intercept_db),
            format!("pathloss_slope_db = {}", self.pathloss_slope_db),
            format!("noise_figure_db = {}", self.noise_figure_db),
            format!("controller_gap_scale = {}", self.controller_gap_scale),
        ];
        if let Some(n) = self.alg2_max_iter {
            lines.push(format!("alg2_max_iter = {n}"));
        }
        lines
    }
}

/// Data fraction `1 - L_p / L_c` of a coherence block.
pub fn prelog(n_pilots: usize, coherence_block: usize) -> f64 {
    1.0 - n_pilots as f64 / coherence_block as f64
}

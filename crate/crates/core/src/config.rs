//! Engine configuration.
//!
//! Every tunable constant of the engine lives here with a pinned default:
//! scoring weights and the redistribution rule, per-mode transport factors,
//! traffic-light percentiles, nudge parameters, accommodation bands, and the
//! file locations used by the service. A configuration file (TOML) may
//! override any subset; omitted keys keep their defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::WeightVector;
use crate::transport::TransportMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub weights: WeightVector,
    pub redistribution: Redistribution,
    pub transport: TransportConstants,
    pub traffic_light: TrafficLightThresholds,
    pub nudge: NudgeConfig,
    pub accommodation: AccommodationBands,
    pub server: ServerConfig,
}

impl EngineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<inline>"),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        let config: Self = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Apply `GREENTRIP_*` environment overrides to the server section.
    pub fn apply_env_overrides(&mut self) -> Result<(), ConfigError> {
        self.apply_overrides(|key| std::env::var(key).ok())
    }

    pub fn apply_overrides<F>(&mut self, lookup: F) -> Result<(), ConfigError>
    where
        F: Fn(&str) -> Option<String>,
    {
        if let Some(port) = lookup("GREENTRIP_PORT") {
            self.server.port = port
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("GREENTRIP_PORT is not a port: {port:?}")))?;
        }
        if let Some(path) = lookup("GREENTRIP_CATALOG") {
            self.server.catalog_path = PathBuf::from(path);
        }
        if let Some(path) = lookup("GREENTRIP_MAPPING") {
            self.server.mapping_path = PathBuf::from(path);
        }
        if let Some(path) = lookup("GREENTRIP_BOOKING_STORE") {
            self.server.booking_store = PathBuf::from(path);
        }
        if let Some(path) = lookup("GREENTRIP_EVENT_LOG") {
            self.server.event_log = PathBuf::from(path);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.weights.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let share = self.redistribution.transport_share;
        if !(0.0..=1.0).contains(&share) {
            return Err(ConfigError::Invalid(format!(
                "redistribution.transport_share must be in [0,1], got {share}"
            )));
        }
        self.transport.validate()?;
        self.traffic_light.validate()?;
        self.nudge.validate()?;
        self.accommodation.validate()?;
        Ok(())
    }
}

/// How the personalization weight is handed to transport and interest when
/// the traveler sets no personalization priorities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Redistribution {
    /// Fraction of the freed weight that goes to transport; the rest goes to interest.
    pub transport_share: f64,
}

impl Default for Redistribution {
    fn default() -> Self {
        Self { transport_share: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConstants {
    /// Multiplier applied to great-circle distance.
    pub detour_factor: f64,
    /// kg CO2e per passenger-km.
    pub emission_factor: f64,
    pub base_fare_eur: f64,
    pub per_km_eur: f64,
    pub speed_kmh: f64,
    pub overhead_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportConstants {
    pub train: ModeConstants,
    pub bus: ModeConstants,
    pub flight: ModeConstants,
    /// Flights are only offered when the flight route is at least this long.
    pub flight_min_route_km: f64,
}

impl Default for TransportConstants {
    fn default() -> Self {
        Self {
            train: ModeConstants {
                detour_factor: 1.20,
                emission_factor: 0.035,
                base_fare_eur: 10.0,
                per_km_eur: 0.12,
                speed_kmh: 120.0,
                overhead_h: 0.5,
            },
            bus: ModeConstants {
                detour_factor: 1.30,
                emission_factor: 0.027,
                base_fare_eur: 5.0,
                per_km_eur: 0.08,
                speed_kmh: 70.0,
                overhead_h: 0.5,
            },
            flight: ModeConstants {
                detour_factor: 1.10,
                emission_factor: 0.246,
                base_fare_eur: 40.0,
                per_km_eur: 0.10,
                speed_kmh: 700.0,
                overhead_h: 2.5,
            },
            flight_min_route_km: 300.0,
        }
    }
}

impl TransportConstants {
    pub fn mode(&self, mode: TransportMode) -> &ModeConstants {
        match mode {
            TransportMode::Train => &self.train,
            TransportMode::Bus => &self.bus,
            TransportMode::Flight => &self.flight,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for mode in TransportMode::ALL {
            let c = self.mode(mode);
            let fields = [
                ("detour_factor", c.detour_factor),
                ("emission_factor", c.emission_factor),
                ("base_fare_eur", c.base_fare_eur),
                ("per_km_eur", c.per_km_eur),
                ("speed_kmh", c.speed_kmh),
                ("overhead_h", c.overhead_h),
            ];
            for (name, value) in fields {
                if !value.is_finite() || value < 0.0 {
                    return Err(ConfigError::Invalid(format!(
                        "transport.{mode}.{name} must be finite and non-negative, got {value}"
                    )));
                }
            }
            // Strict growth of emissions with distance and positive durations.
            if c.detour_factor <= 0.0 || c.emission_factor <= 0.0 || c.speed_kmh <= 0.0 || c.overhead_h <= 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "transport.{mode}: detour_factor, emission_factor, speed_kmh and overhead_h must be positive"
                )));
            }
        }
        if !self.flight_min_route_km.is_finite() || self.flight_min_route_km < 0.0 {
            return Err(ConfigError::Invalid("transport.flight_min_route_km must be >= 0".into()));
        }
        Ok(())
    }

    /// Key-value listing used by `--show-constants`.
    pub fn to_key_values(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for mode in TransportMode::ALL {
            let c = self.mode(mode);
            out.insert(format!("{mode}.detour_factor"), c.detour_factor);
            out.insert(format!("{mode}.emission_factor"), c.emission_factor);
            out.insert(format!("{mode}.base_fare_eur"), c.base_fare_eur);
            out.insert(format!("{mode}.per_km_eur"), c.per_km_eur);
            out.insert(format!("{mode}.speed_kmh"), c.speed_kmh);
            out.insert(format!("{mode}.overhead_h"), c.overhead_h);
        }
        out.insert("flight_min_route_km".into(), self.flight_min_route_km);
        out
    }
}

/// Nearest-rank percentiles splitting green / yellow / red.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficLightThresholds {
    pub green_percentile: u32,
    pub red_percentile: u32,
}

impl Default for TrafficLightThresholds {
    fn default() -> Self {
        Self { green_percentile: 33, red_percentile: 66 }
    }
}

impl TrafficLightThresholds {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.green_percentile == 0 || self.red_percentile > 100 || self.green_percentile > self.red_percentile {
            return Err(ConfigError::Invalid(format!(
                "traffic_light percentiles must satisfy 0 < green <= red <= 100, got {} / {}",
                self.green_percentile, self.red_percentile
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineRule {
    /// Median of the candidate set's best-mode CO2e.
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NudgeConfig {
    /// Alternatives may trail the selection's interest match by at most this much.
    pub interest_tolerance: f64,
    pub max_alternatives: usize,
    /// kg CO2e absorbed by one tree in one year.
    pub tree_kg_per_year: f64,
    pub baseline: BaselineRule,
}

impl Default for NudgeConfig {
    fn default() -> Self {
        Self {
            interest_tolerance: 0.15,
            max_alternatives: 3,
            tree_kg_per_year: 21.0,
            baseline: BaselineRule::Median,
        }
    }
}

impl NudgeConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.interest_tolerance) {
            return Err(ConfigError::Invalid("nudge.interest_tolerance must be in [0,1]".into()));
        }
        if self.max_alternatives == 0 {
            return Err(ConfigError::Invalid("nudge.max_alternatives must be positive".into()));
        }
        if !self.tree_kg_per_year.is_finite() || self.tree_kg_per_year <= 0.0 {
            return Err(ConfigError::Invalid("nudge.tree_kg_per_year must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceBand {
    pub min_eur_per_night: f64,
    pub max_eur_per_night: f64,
    pub co2e_kg_per_night: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccommodationBands {
    pub budget: PriceBand,
    pub standard: PriceBand,
    pub eco: PriceBand,
}

impl Default for AccommodationBands {
    fn default() -> Self {
        Self {
            budget: PriceBand { min_eur_per_night: 60.0, max_eur_per_night: 90.0, co2e_kg_per_night: 20.0 },
            standard: PriceBand { min_eur_per_night: 100.0, max_eur_per_night: 160.0, co2e_kg_per_night: 15.0 },
            eco: PriceBand { min_eur_per_night: 90.0, max_eur_per_night: 140.0, co2e_kg_per_night: 6.0 },
        }
    }
}

impl AccommodationBands {
    fn validate(&self) -> Result<(), ConfigError> {
        for (name, band) in [("budget", self.budget), ("standard", self.standard), ("eco", self.eco)] {
            if !(band.min_eur_per_night > 0.0
                && band.min_eur_per_night <= band.max_eur_per_night
                && band.max_eur_per_night.is_finite()
                && band.co2e_kg_per_night >= 0.0
                && band.co2e_kg_per_night.is_finite())
            {
                return Err(ConfigError::Invalid(format!("accommodation.{name} band is malformed")));
            }
        }
        if self.eco.co2e_kg_per_night > crate::booking::ECO_LABEL_MAX_CO2E_PER_NIGHT {
            return Err(ConfigError::Invalid(format!(
                "accommodation.eco.co2e_kg_per_night must be <= {}",
                crate::booking::ECO_LABEL_MAX_CO2E_PER_NIGHT
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub port: u16,
    pub catalog_path: PathBuf,
    pub mapping_path: PathBuf,
    pub booking_store: PathBuf,
    pub event_log: PathBuf,
    /// Events held back per session while waiting for a missing sequence number.
    pub max_pending_events_per_session: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            port: 8080,
            catalog_path: PathBuf::from("data/eu-cities.csv"),
            mapping_path: PathBuf::from("data/mapping.toml"),
            booking_store: PathBuf::from("var/bookings.jsonl"),
            event_log: PathBuf::from("var/events.jsonl"),
            max_pending_events_per_session: 1024,
        }
    }
}

//! Distance, emissions, cost and duration per transport mode, plus the
//! traffic-light classification and radar comparison built on top of them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{TrafficLightThresholds, TransportConstants};
use crate::dataset::{CityRecord, GeoPoint};
use crate::scoring::{minmax_normalize, Orientation};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("origin and destination are the same city ({0})")]
    SameCity(String),
    #[error("no candidate values to classify against")]
    EmptyCandidates,
    #[error("radar comparison needs at least two modes, got {0}")]
    TooFewModes(usize),
    #[error("non-finite value in comparison")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportMode {
    Train,
    Bus,
    Flight,
}

impl TransportMode {
    pub const ALL: [TransportMode; 3] = [TransportMode::Train, TransportMode::Bus, TransportMode::Flight];

    pub fn as_str(self) -> &'static str {
        match self {
            TransportMode::Train => "train",
            TransportMode::Bus => "bus",
            TransportMode::Flight => "flight",
        }
    }
}

impl fmt::Display for TransportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportEstimate {
    pub mode: TransportMode,
    pub distance_km: f64,
    /// Per passenger.
    pub co2e_kg: f64,
    pub cost_eur: f64,
    pub duration_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficLightClass {
    Green,
    Yellow,
    Red,
}

impl TrafficLightClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TrafficLightClass::Green => "green",
            TrafficLightClass::Yellow => "yellow",
            TrafficLightClass::Red => "red",
        }
    }
}

/// Normalized axes, 0 = best among the compared modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarAxes {
    pub emissions: f64,
    pub cost: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadarProfile(pub BTreeMap<TransportMode, RadarAxes>);

/// Great-circle distance in km (haversine, R = 6371 km).
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat().to_radians(), b.lat().to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon() - a.lon()).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    // clamp guards asin against h drifting past 1 for antipodal points
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

pub fn route_distance_km(mode: TransportMode, gc_km: f64, constants: &TransportConstants) -> f64 {
    gc_km * constants.mode(mode).detour_factor
}

fn estimate_mode(mode: TransportMode, gc_km: f64, constants: &TransportConstants) -> TransportEstimate {
    let c = constants.mode(mode);
    let route = route_distance_km(mode, gc_km, constants);
    TransportEstimate {
        mode,
        distance_km: route,
        co2e_kg: route * c.emission_factor,
        cost_eur: c.base_fare_eur + c.per_km_eur * route,
        duration_h: route / c.speed_kmh + c.overhead_h,
    }
}

/// One estimate per available mode, in train, bus, flight order.
///
/// Flights are offered only when the flight route reaches the configured minimum.
pub fn estimate_transport(
    from: &CityRecord,
    to: &CityRecord,
    constants: &TransportConstants,
) -> Result<Vec<TransportEstimate>, TransportError> {
    if from.id == to.id {
        return Err(TransportError::SameCity(from.id.clone()));
    }
    Ok(estimates_for_distance(haversine_km(from.location, to.location), constants))
}

pub fn estimates_for_distance(gc_km: f64, constants: &TransportConstants) -> Vec<TransportEstimate> {
    TransportMode::ALL
        .into_iter()
        .filter(|&mode| {
            mode != TransportMode::Flight
                || route_distance_km(mode, gc_km, constants) >= constants.flight_min_route_km
        })
        .map(|mode| estimate_mode(mode, gc_km, constants))
        .collect()
}

/// Lowest per-passenger CO2e among the available modes.
pub fn min_co2e_kg(estimates: &[TransportEstimate]) -> f64 {
    estimates.iter().map(|e| e.co2e_kg).fold(f64::INFINITY, f64::min)
}

/// Nearest-rank percentile: the value at 1-based rank `ceil(p/100 * n)`.
pub fn nearest_rank_percentile(sorted: &[f64], percentile: u32) -> f64 {
    let n = sorted.len();
    let rank = (percentile as usize * n).div_ceil(100).max(1);
    sorted[rank.min(n) - 1]
}

/// Green at or below the green percentile, red above the red percentile, yellow between.
pub fn classify_traffic_light(
    value: f64,
    candidate_values: &[f64],
    thresholds: &TrafficLightThresholds,
) -> Result<TrafficLightClass, TransportError> {
    if candidate_values.is_empty() {
        return Err(TransportError::EmptyCandidates);
    }
    if !value.is_finite() || candidate_values.iter().any(|v| !v.is_finite()) {
        return Err(TransportError::NonFinite);
    }
    let mut sorted = candidate_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let green_cut = nearest_rank_percentile(&sorted, thresholds.green_percentile);
    let red_cut = nearest_rank_percentile(&sorted, thresholds.red_percentile);
    Ok(if value <= green_cut {
        TrafficLightClass::Green
    } else if value > red_cut {
        TrafficLightClass::Red
    } else {
        TrafficLightClass::Yellow
    })
}

pub fn radar_profile(estimates: &[TransportEstimate]) -> Result<RadarProfile, TransportError> {
    if estimates.len() < 2 {
        return Err(TransportError::TooFewModes(estimates.len()));
    }
    let axis = |f: fn(&TransportEstimate) -> f64| {
        let values: Vec<f64> = estimates.iter().map(f).collect();
        minmax_normalize(&values, Orientation::LowerIsBetter).map_err(|_| TransportError::NonFinite)
    };
    let emissions = axis(|e| e.co2e_kg)?;
    let cost = axis(|e| e.cost_eur)?;
    let duration = axis(|e| e.duration_h)?;
    Ok(RadarProfile(
        estimates
            .iter()
            .enumerate()
            .map(|(i, e)| (e.mode, RadarAxes { emissions: emissions[i], cost: cost[i], duration: duration[i] }))
            .collect(),
    ))
}

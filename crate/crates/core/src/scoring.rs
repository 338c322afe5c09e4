//! Composite "less is better" scoring and ranking.
//!
//! Each candidate city gets five components in `[0, 1]`, all oriented so
//! that lower is better:
//!
//! | component               | source                                             |
//! |-------------------------|----------------------------------------------------|
//! | transport               | min-max of the best-mode CO2e over the candidates  |
//! | popularity              | min-max of the raw review count over the candidates|
//! | seasonality             | the city's crowdedness in the travel month         |
//! | interest_penalty        | `1 - interest_match`                               |
//! | personalization_penalty | mean of the prioritized attributes (lower better)  |
//!
//! The composite score is the dot product with the (possibly adapted) weight
//! vector. Ties are broken by ascending city id, so the ranking is a total order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{EngineConfig, Redistribution, TransportConstants};
use crate::dataset::{seasonality_of, Catalog, CityRecord, InterestCategory};
use crate::transport::{estimates_for_distance, haversine_km, min_co2e_kg};

/// Neutral value for degenerate normalizations and empty preference sets.
pub const NEUTRAL: f64 = 0.5;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("cannot normalize an empty list")]
    EmptyInput,
    #[error("cannot normalize non-finite values")]
    NonFiniteInput,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoringError {
    #[error("unknown departure city {0:?}")]
    UnknownDeparture(String),
    #[error("month {0} is outside 1..=12")]
    MonthOutOfRange(u32),
    #[error("interest {0:?} is not a declared category")]
    UnknownInterest(String),
    #[error("no candidate destinations besides the departure city")]
    EmptyCandidateSet,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    LowerIsBetter,
    HigherIsBetter,
}

/// Affine map onto `[0, 1]`; a constant input maps to 0.5 everywhere.
///
/// With `HigherIsBetter` the result is flipped so that 0 still means best.
pub fn minmax_normalize(values: &[f64], orientation: Orientation) -> Result<Vec<f64>, NormalizeError> {
    if values.is_empty() {
        return Err(NormalizeError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(NormalizeError::NonFiniteInput);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Ok(vec![NEUTRAL; values.len()]);
    }
    let span = hi - lo;
    Ok(values
        .iter()
        .map(|v| {
            let n = ((v - lo) / span).clamp(0.0, 1.0);
            match orientation {
                Orientation::LowerIsBetter => n,
                Orientation::HigherIsBetter => 1.0 - n,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SustainabilityAttribute {
    AirQuality,
    ClimateVulnerability,
    Walkability,
}

impl SustainabilityAttribute {
    pub const ALL: [SustainabilityAttribute; 3] = [
        SustainabilityAttribute::AirQuality,
        SustainabilityAttribute::ClimateVulnerability,
        SustainabilityAttribute::Walkability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SustainabilityAttribute::AirQuality => "air_quality",
            SustainabilityAttribute::ClimateVulnerability => "climate_vulnerability",
            SustainabilityAttribute::Walkability => "walkability",
        }
    }

    /// The city's value for this attribute, oriented lower-is-better.
    pub fn penalty(self, city: &CityRecord) -> f64 {
        match self {
            SustainabilityAttribute::AirQuality => city.air_quality,
            SustainabilityAttribute::ClimateVulnerability => city.climate_vulnerability,
            SustainabilityAttribute::Walkability => 1.0 - city.walkability,
        }
    }
}

impl fmt::Display for SustainabilityAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SustainabilityAttribute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| format!("unknown sustainability attribute {s:?}"))
    }
}

/// What the traveler asked for. An empty `personalization` set means the
/// traveler skipped the advanced survey.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserQuery {
    pub departure_id: String,
    pub month: u32,
    #[serde(default)]
    pub interests: BTreeSet<InterestCategory>,
    #[serde(default)]
    pub personalization: BTreeSet<SustainabilityAttribute>,
}

impl UserQuery {
    pub fn has_personalization(&self) -> bool {
        !self.personalization.is_empty()
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<(), ScoringError> {
        if !(1..=12).contains(&self.month) {
            return Err(ScoringError::MonthOutOfRange(self.month));
        }
        if let Some(unknown) = self.interests.iter().find(|i| !catalog.categories().contains(*i)) {
            return Err(ScoringError::UnknownInterest(unknown.to_string()));
        }
        catalog
            .get_city(&self.departure_id)
            .map_err(|_| ScoringError::UnknownDeparture(self.departure_id.clone()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightVector {
    pub transport: f64,
    pub popularity: f64,
    pub seasonality: f64,
    pub interest: f64,
    pub personalization: f64,
}

impl Default for WeightVector {
    fn default() -> Self {
        Self { transport: 0.30, popularity: 0.15, seasonality: 0.15, interest: 0.20, personalization: 0.20 }
    }
}

impl WeightVector {
    pub fn new(
        transport: f64,
        popularity: f64,
        seasonality: f64,
        interest: f64,
        personalization: f64,
    ) -> Result<Self, ScoringError> {
        let w = Self { transport, popularity, seasonality, interest, personalization };
        w.validate()?;
        Ok(w)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.transport, self.popularity, self.seasonality, self.interest, self.personalization]
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        if let Some(w) = self.as_array().iter().find(|w| !(w.is_finite() && (0.0..=1.0).contains(*w))) {
            return Err(ScoringError::InvalidWeights(format!("weight {w} outside [0, 1]")));
        }
        let sum = self.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(ScoringError::InvalidWeights(format!("weights sum to {sum}, expected 1")));
        }
        Ok(())
    }

    pub fn dot(&self, c: &ComponentScores) -> f64 {
        self.transport * c.transport
            + self.popularity * c.popularity
            + self.seasonality * c.seasonality
            + self.interest * c.interest_penalty
            + self.personalization * c.personalization_penalty
    }
}

/// Drop the personalization weight when the traveler set no priorities,
/// moving its mass onto transport and interest and renormalizing.
pub fn adapt_weights(query: &UserQuery, defaults: &WeightVector, rule: &Redistribution) -> WeightVector {
    if query.has_personalization() || defaults.personalization == 0.0 {
        return *defaults;
    }
    let freed = defaults.personalization;
    let raw = WeightVector {
        transport: defaults.transport + freed * rule.transport_share,
        popularity: defaults.popularity,
        seasonality: defaults.seasonality,
        interest: defaults.interest + freed * (1.0 - rule.transport_share),
        personalization: 0.0,
    };
    let sum = raw.sum();
    WeightVector {
        transport: raw.transport / sum,
        popularity: raw.popularity / sum,
        seasonality: raw.seasonality / sum,
        interest: raw.interest / sum,
        personalization: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub transport: f64,
    pub popularity: f64,
    pub seasonality: f64,
    pub interest_penalty: f64,
    pub personalization_penalty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCity {
    pub city_id: String,
    pub rank: usize,
    pub score: f64,
    pub components: ComponentScores,
    pub weights: WeightVector,
    /// Higher is better; shown as the interest alignment bar.
    pub interest_match: f64,
    /// Per-passenger CO2e of the cleanest available mode.
    pub min_co2e_kg: f64,
}

/// Mean of the city's scores over the selected interests; 0.5 when none are selected.
pub fn interest_match(query: &UserQuery, city: &CityRecord) -> f64 {
    if query.interests.is_empty() {
        return NEUTRAL;
    }
    let total: f64 = query
        .interests
        .iter()
        .map(|c| city.interest_scores.get(c).copied().unwrap_or(0.0))
        .sum();
    total / query.interests.len() as f64
}

pub fn personalization_penalty(query: &UserQuery, city: &CityRecord) -> f64 {
    if query.personalization.is_empty() {
        return NEUTRAL;
    }
    let total: f64 = query.personalization.iter().map(|a| a.penalty(city)).sum();
    total / query.personalization.len() as f64
}

/// Raw per-candidate inputs, before candidate-set normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateInputs {
    pub city_id: String,
    pub min_co2e_kg: f64,
    pub popularity_count: u64,
    pub seasonality: f64,
    pub interest_match: f64,
    pub personalization_penalty: f64,
}

pub fn candidate_inputs(
    catalog: &Catalog,
    query: &UserQuery,
    transport: &TransportConstants,
) -> Result<Vec<CandidateInputs>, ScoringError> {
    query.validate(catalog)?;
    let departure = catalog
        .get_city(&query.departure_id)
        .map_err(|_| ScoringError::UnknownDeparture(query.departure_id.clone()))?;
    catalog
        .cities()
        .iter()
        .filter(|c| c.id != departure.id)
        .map(|city| {
            let gc = haversine_km(departure.location, city.location);
            Ok(CandidateInputs {
                city_id: city.id.clone(),
                min_co2e_kg: min_co2e_kg(&estimates_for_distance(gc, transport)),
                popularity_count: city.popularity_count,
                seasonality: seasonality_of(city, query.month)
                    .map_err(|_| ScoringError::MonthOutOfRange(query.month))?,
                interest_match: interest_match(query, city),
                personalization_penalty: personalization_penalty(query, city),
            })
        })
        .collect()
}

/// Normalize over the candidate set, score with `weights`, and rank.
pub fn score_candidates(
    candidates: &[CandidateInputs],
    weights: &WeightVector,
) -> Result<Vec<ScoredCity>, ScoringError> {
    if candidates.is_empty() {
        return Err(ScoringError::EmptyCandidateSet);
    }
    weights.validate()?;
    let co2e: Vec<f64> = candidates.iter().map(|c| c.min_co2e_kg).collect();
    let popularity: Vec<f64> = candidates.iter().map(|c| c.popularity_count as f64).collect();
    let transport = minmax_normalize(&co2e, Orientation::LowerIsBetter)?;
    let popularity = minmax_normalize(&popularity, Orientation::LowerIsBetter)?;

    let mut scored: Vec<ScoredCity> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let components = ComponentScores {
                transport: transport[i],
                popularity: popularity[i],
                seasonality: c.seasonality,
                interest_penalty: 1.0 - c.interest_match,
                personalization_penalty: c.personalization_penalty,
            };
            ScoredCity {
                city_id: c.city_id.clone(),
                rank: 0,
                score: weights.dot(&components),
                components,
                weights: *weights,
                interest_match: c.interest_match,
                min_co2e_kg: c.min_co2e_kg,
            }
        })
        .collect();
    scored.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| a.city_id.cmp(&b.city_id)));
    for (i, city) in scored.iter_mut().enumerate() {
        city.rank = i + 1;
    }
    Ok(scored)
}

/// Rank every catalog city except the departure, best (lowest score) first.
pub fn rank_destinations(
    catalog: &Catalog,
    query: &UserQuery,
    config: &EngineConfig,
) -> Result<Vec<ScoredCity>, ScoringError> {
    config.weights.validate()?;
    let candidates = candidate_inputs(catalog, query, &config.transport)?;
    let weights = adapt_weights(query, &config.weights, &config.redistribution);
    score_candidates(&candidates, &weights)
}

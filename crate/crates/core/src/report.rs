//! Response documents shared by the HTTP API and the CLI's JSON output.
//!
//! [`Engine`] bundles a loaded catalog with its configuration and assembles
//! the full recommendation, transport-detail, explanation and confirmation
//! payloads from the lower-level modules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::booking::{accommodation_options, AccommodationOption, BookingDraft, BookingError};
use crate::config::EngineConfig;
use crate::dataset::{Catalog, GeoPoint, LookupError};
use crate::nudge::{assign_badges, candidate_co2e, evaluate_selection, Badge, NudgeBanner, NudgeContext, NudgeError};
use crate::scoring::{adapt_weights, rank_destinations, ComponentScores, ScoredCity, ScoringError, UserQuery, WeightVector};
use crate::transport::{
    classify_traffic_light, estimate_transport, haversine_km, radar_profile, RadarProfile, TrafficLightClass,
    TransportError, TransportEstimate,
};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Lookup(#[from] LookupError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Nudge(#[from] NudgeError),
    #[error(transparent)]
    Booking(#[from] BookingError),
    #[error("city {0:?} is the departure city and cannot be a destination")]
    DestinationIsDeparture(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationEntry {
    pub rank: usize,
    pub city_id: String,
    pub name: String,
    pub country: String,
    pub location: GeoPoint,
    pub score: f64,
    pub components: ComponentScores,
    pub weights: WeightVector,
    pub interest_match: f64,
    pub min_co2e_kg: f64,
    pub traffic_light: TrafficLightClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub badge: Option<Badge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub badge_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationResponse {
    pub engine_version: String,
    pub catalog_fingerprint: String,
    pub query: UserQuery,
    /// Weights after adaptation to the query.
    pub weights: WeightVector,
    pub candidate_count: usize,
    pub results: Vec<RecommendationEntry>,
    pub banners: Vec<NudgeBanner>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedEstimate {
    #[serde(flatten)]
    pub estimate: TransportEstimate,
    pub traffic_light: TrafficLightClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportDetail {
    pub from_id: String,
    pub to_id: String,
    pub great_circle_km: f64,
    pub estimates: Vec<ClassifiedEstimate>,
    pub radar: RadarProfile,
    pub accommodation: Vec<AccommodationOption>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLine {
    pub component: String,
    pub value: f64,
    pub weight: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub city_id: String,
    pub departure_id: String,
    pub month: u32,
    pub rank: usize,
    pub candidate_count: usize,
    pub score: f64,
    pub lines: Vec<ComponentLine>,
    pub weighted_sum: f64,
    pub interest_match: f64,
    pub min_co2e_kg: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub engine_version: String,
    pub catalog_fingerprint: String,
    pub city_count: usize,
}

/// A catalog plus the configuration it is scored under. Immutable; share freely.
#[derive(Debug, Clone)]
pub struct Engine {
    catalog: Catalog,
    config: EngineConfig,
}

impl Engine {
    pub fn new(catalog: Catalog, config: EngineConfig) -> Self {
        Self { catalog, config }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn rank(&self, query: &UserQuery) -> Result<Vec<ScoredCity>, EngineError> {
        Ok(rank_destinations(&self.catalog, query, &self.config)?)
    }

    /// Full recommendation document. Banners are evaluated for `focus_city`
    /// when given, otherwise for the rank-1 city. `top` truncates the list
    /// after badges and classes have been computed over every candidate.
    pub fn recommend(
        &self,
        query: &UserQuery,
        focus_city: Option<&str>,
        top: Option<usize>,
    ) -> Result<RecommendationResponse, EngineError> {
        let ranked = self.rank(query)?;
        let badges = assign_badges(&ranked)?;
        let values = candidate_co2e(&ranked);
        let thresholds = &self.config.traffic_light;

        let focus = match focus_city {
            Some(id) => ranked
                .iter()
                .find(|c| c.city_id == id)
                .ok_or_else(|| self.not_a_candidate(query, id))?,
            None => &ranked[0],
        };
        let banners = evaluate_selection(
            NudgeContext::Explore,
            &focus.city_id,
            focus.min_co2e_kg,
            focus.interest_match,
            &ranked,
            thresholds,
            &self.config.nudge,
        )?
        .into_iter()
        .collect();

        let mut results = Vec::with_capacity(ranked.len());
        for scored in &ranked {
            let city = self.catalog.get_city(&scored.city_id)?;
            let badge = badges.get(&scored.city_id).copied();
            results.push(RecommendationEntry {
                rank: scored.rank,
                city_id: scored.city_id.clone(),
                name: city.name.clone(),
                country: city.country.clone(),
                location: city.location,
                score: scored.score,
                components: scored.components,
                weights: scored.weights,
                interest_match: scored.interest_match,
                min_co2e_kg: scored.min_co2e_kg,
                traffic_light: classify_traffic_light(scored.min_co2e_kg, &values, thresholds)?,
                badge,
                badge_label: badge.map(|b| b.label().to_string()),
            });
        }
        let candidate_count = results.len();
        if let Some(n) = top {
            results.truncate(n);
        }
        Ok(RecommendationResponse {
            engine_version: ENGINE_VERSION.to_string(),
            catalog_fingerprint: self.catalog.fingerprint().to_string(),
            query: query.clone(),
            weights: adapt_weights(query, &self.config.weights, &self.config.redistribution),
            candidate_count,
            results,
            banners,
        })
    }

    fn not_a_candidate(&self, query: &UserQuery, id: &str) -> EngineError {
        if id == query.departure_id {
            EngineError::DestinationIsDeparture(id.to_string())
        } else {
            EngineError::Lookup(LookupError::NotFound(id.to_string()))
        }
    }

    /// Per-mode estimates between two cities, classified against each other.
    pub fn transport_detail(&self, from_id: &str, to_id: &str) -> Result<TransportDetail, EngineError> {
        let from = self.catalog.get_city(from_id)?;
        let to = self.catalog.get_city(to_id)?;
        let estimates = estimate_transport(from, to, &self.config.transport)?;
        let radar = radar_profile(&estimates)?;
        let values: Vec<f64> = estimates.iter().map(|e| e.co2e_kg).collect();
        let estimates = estimates
            .into_iter()
            .map(|estimate| {
                Ok(ClassifiedEstimate {
                    traffic_light: classify_traffic_light(estimate.co2e_kg, &values, &self.config.traffic_light)?,
                    estimate,
                })
            })
            .collect::<Result<Vec<_>, TransportError>>()?;
        Ok(TransportDetail {
            from_id: from.id.clone(),
            to_id: to.id.clone(),
            great_circle_km: haversine_km(from.location, to.location),
            estimates,
            radar,
            accommodation: accommodation_options(&to.id, &self.config.accommodation),
        })
    }

    pub fn explain(&self, query: &UserQuery, city_id: &str) -> Result<Explanation, EngineError> {
        if city_id == query.departure_id {
            self.catalog.get_city(city_id)?;
            return Err(EngineError::DestinationIsDeparture(city_id.to_string()));
        }
        let ranked = self.rank(query)?;
        let scored = ranked
            .iter()
            .find(|c| c.city_id == city_id)
            .ok_or_else(|| self.not_a_candidate(query, city_id))?;
        let c = &scored.components;
        let w = &scored.weights;
        let lines: Vec<ComponentLine> = [
            ("transport", c.transport, w.transport),
            ("popularity", c.popularity, w.popularity),
            ("seasonality", c.seasonality, w.seasonality),
            ("interest_penalty", c.interest_penalty, w.interest),
            ("personalization_penalty", c.personalization_penalty, w.personalization),
        ]
        .into_iter()
        .map(|(name, value, weight)| ComponentLine {
            component: name.to_string(),
            value,
            weight,
            contribution: value * weight,
        })
        .collect();
        let weighted_sum = w.dot(c);

        let mut notes = Vec::new();
        if query.interests.is_empty() {
            notes.push("no interests selected: interest match is neutral (0.5)".to_string());
        }
        if !query.has_personalization() {
            notes.push(
                "no personalization priorities: personalization weight moved onto transport and interest".to_string(),
            );
        }
        Ok(Explanation {
            city_id: scored.city_id.clone(),
            departure_id: query.departure_id.clone(),
            month: query.month,
            rank: scored.rank,
            candidate_count: ranked.len(),
            score: scored.score,
            lines,
            weighted_sum,
            interest_match: scored.interest_match,
            min_co2e_kg: scored.min_co2e_kg,
            notes,
        })
    }

    /// Confirmation-stage banner for a draft booked under `query`.
    pub fn confirmation_banner(
        &self,
        query: &UserQuery,
        draft: &BookingDraft,
    ) -> Result<Option<NudgeBanner>, EngineError> {
        let ranked = self.rank(query)?;
        let selected = ranked
            .iter()
            .find(|c| c.city_id == draft.city_id)
            .ok_or_else(|| self.not_a_candidate(query, &draft.city_id))?;
        Ok(evaluate_selection(
            NudgeContext::Confirmation,
            &draft.city_id,
            draft.transport.co2e_kg,
            selected.interest_match,
            &ranked,
            &self.config.traffic_light,
            &self.config.nudge,
        )?)
    }

    pub fn health(&self) -> Health {
        Health {
            status: "ok".to_string(),
            engine_version: ENGINE_VERSION.to_string(),
            catalog_fingerprint: self.catalog.fingerprint().to_string(),
            city_count: self.catalog.len(),
        }
    }
}

//! Badges, high-impact detection, alternative-destination banners and
//! positive reinforcement.
//!
//! All CO2e figures here are per passenger, matching the explore stage.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{NudgeConfig, TrafficLightThresholds};
use crate::scoring::ScoredCity;
use crate::transport::{classify_traffic_light, TrafficLightClass, TransportError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NudgeError {
    #[error("ranked list is empty")]
    EmptyList,
    #[error("selected city {0:?} is not among the candidates")]
    SelectionNotInCandidates(String),
    #[error(transparent)]
    Classification(#[from] TransportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Badge {
    BestMatch,
    GreenRunnerUp,
    EcoBronze,
}

impl Badge {
    pub fn label(self) -> &'static str {
        match self {
            Badge::BestMatch => "Best Match",
            Badge::GreenRunnerUp => "Green Runner-up",
            Badge::EcoBronze => "Eco-Bronze Medallist",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Badge::BestMatch => "best_match",
            Badge::GreenRunnerUp => "green_runner_up",
            Badge::EcoBronze => "eco_bronze",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NudgeContext {
    Explore,
    Booking,
    Confirmation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSuggestion {
    pub city_id: String,
    pub co2e_saving_kg: f64,
    pub interest_match: f64,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReinforcementPayload {
    pub co2e_saved_kg: f64,
    pub trees_equivalent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BannerPayload {
    AlternativeSuggestion { alternatives: Vec<AlternativeSuggestion> },
    PositiveReinforcement { reinforcement: ReinforcementPayload },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NudgeBanner {
    pub context: NudgeContext,
    /// City whose selection triggered the banner.
    pub trigger_city_id: String,
    pub trigger_co2e_kg: f64,
    pub trigger_class: TrafficLightClass,
    #[serde(flatten)]
    pub payload: BannerPayload,
}

fn lowest_co2e<'a>(cities: impl Iterator<Item = &'a ScoredCity>) -> Option<&'a ScoredCity> {
    cities.min_by(|a, b| a.min_co2e_kg.total_cmp(&b.min_co2e_kg).then_with(|| a.city_id.cmp(&b.city_id)))
}

/// Best match goes to rank 1; the green runner-up and eco-bronze go to the
/// two lowest-CO2e cities among the rest, in that order.
pub fn assign_badges(ranked: &[ScoredCity]) -> Result<BTreeMap<String, Badge>, NudgeError> {
    let best = ranked.iter().min_by_key(|c| c.rank).ok_or(NudgeError::EmptyList)?;
    let mut badges = BTreeMap::new();
    badges.insert(best.city_id.clone(), Badge::BestMatch);
    for badge in [Badge::GreenRunnerUp, Badge::EcoBronze] {
        match lowest_co2e(ranked.iter().filter(|c| !badges.contains_key(&c.city_id))) {
            Some(city) => {
                badges.insert(city.city_id.clone(), badge);
            }
            None => break,
        }
    }
    Ok(badges)
}

pub fn candidate_co2e(candidates: &[ScoredCity]) -> Vec<f64> {
    candidates.iter().map(|c| c.min_co2e_kg).collect()
}

/// A selection is high-impact when its CO2e lands in the red class of the candidate set.
pub fn detect_high_impact(
    selected: &ScoredCity,
    candidates: &[ScoredCity],
    thresholds: &TrafficLightThresholds,
) -> Result<bool, NudgeError> {
    if !candidates.iter().any(|c| c.city_id == selected.city_id) {
        return Err(NudgeError::SelectionNotInCandidates(selected.city_id.clone()));
    }
    let class = classify_traffic_light(selected.min_co2e_kg, &candidate_co2e(candidates), thresholds)?;
    Ok(class == TrafficLightClass::Red)
}

/// Cities strictly cleaner than `co2e_kg` whose interest match trails
/// `interest_match` by at most the tolerance, best score first.
pub fn alternatives_below(
    co2e_kg: f64,
    interest_match: f64,
    ranked: &[ScoredCity],
    config: &NudgeConfig,
) -> Vec<AlternativeSuggestion> {
    let floor = interest_match - config.interest_tolerance;
    let mut pool: Vec<&ScoredCity> = ranked
        .iter()
        .filter(|c| c.min_co2e_kg < co2e_kg && c.interest_match >= floor)
        .collect();
    pool.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| a.city_id.cmp(&b.city_id)));
    pool.into_iter()
        .take(config.max_alternatives)
        .map(|c| AlternativeSuggestion {
            city_id: c.city_id.clone(),
            co2e_saving_kg: co2e_kg - c.min_co2e_kg,
            interest_match: c.interest_match,
            score: c.score,
        })
        .collect()
}

pub fn suggest_alternatives(selected: &ScoredCity, ranked: &[ScoredCity], config: &NudgeConfig) -> Vec<AlternativeSuggestion> {
    alternatives_below(selected.min_co2e_kg, selected.interest_match, ranked, config)
}

/// Round half away from zero to one decimal.
pub fn round1(value: f64) -> f64 {
    (value * 10.0).round() / 10.0
}

pub fn reinforcement(selected_co2e_kg: f64, baseline_co2e_kg: f64, tree_kg_per_year: f64) -> ReinforcementPayload {
    let saved = (baseline_co2e_kg - selected_co2e_kg).max(0.0);
    ReinforcementPayload { co2e_saved_kg: saved, trees_equivalent: round1(saved / tree_kg_per_year) }
}

/// Median of the values; mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len().is_multiple_of(2) { (sorted[mid - 1] + sorted[mid]) / 2.0 } else { sorted[mid] })
}

/// Banner for a selection with the given per-passenger CO2e: alternatives when
/// red, reinforcement against the candidate median when green, nothing when
/// yellow or when no alternative qualifies.
pub fn evaluate_selection(
    context: NudgeContext,
    trigger_city_id: &str,
    co2e_kg: f64,
    interest_match: f64,
    ranked: &[ScoredCity],
    thresholds: &TrafficLightThresholds,
    config: &NudgeConfig,
) -> Result<Option<NudgeBanner>, NudgeError> {
    let values = candidate_co2e(ranked);
    let class = classify_traffic_light(co2e_kg, &values, thresholds)?;
    let payload = match class {
        TrafficLightClass::Red => {
            let alternatives = alternatives_below(co2e_kg, interest_match, ranked, config);
            if alternatives.is_empty() {
                return Ok(None);
            }
            BannerPayload::AlternativeSuggestion { alternatives }
        }
        TrafficLightClass::Green => {
            let baseline = median(&values).ok_or(NudgeError::EmptyList)?;
            BannerPayload::PositiveReinforcement {
                reinforcement: reinforcement(co2e_kg, baseline, config.tree_kg_per_year),
            }
        }
        TrafficLightClass::Yellow => return Ok(None),
    };
    Ok(Some(NudgeBanner {
        context,
        trigger_city_id: trigger_city_id.to_string(),
        trigger_co2e_kg: co2e_kg,
        trigger_class: class,
        payload,
    }))
}

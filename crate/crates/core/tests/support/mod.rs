//! Test-only helpers: a brute-force ranking oracle that recomputes every
//! component from raw catalog data without touching the engine's scoring or
//! transport code, and a seeded random catalog generator.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use greentrip_core::config::TransportConstants;
use greentrip_core::scoring::SustainabilityAttribute;
use greentrip_core::{Catalog, CityRecord, GeoPoint, InterestCategory, UserQuery, WeightVector};
use rand::Rng;

pub const CATEGORIES: [&str; 5] = ["cultural", "culinary", "historical", "nature", "nightlife"];

/// Great-circle distance through the chord between unit vectors.
pub fn chord_distance_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let unit = |p: GeoPoint| {
        let (lat, lon) = (p.lat().to_radians(), p.lon().to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    };
    let (u, v) = (unit(a), unit(b));
    let chord = ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt();
    2.0 * 6371.0 * (chord / 2.0).min(1.0).asin()
}

/// Spherical law of cosines.
pub fn law_of_cosines_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (p1, p2) = (a.lat().to_radians(), b.lat().to_radians());
    let dl = (b.lon() - a.lon()).to_radians();
    let c = (p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos()).clamp(-1.0, 1.0);
    6371.0 * c.acos()
}

/// Cleanest per-passenger CO2e over the modes on offer for a great-circle distance.
pub fn oracle_min_co2e(gc_km: f64, t: &TransportConstants) -> f64 {
    let mut best = f64::INFINITY;
    for (c, is_flight) in [(&t.train, false), (&t.bus, false), (&t.flight, true)] {
        let route = gc_km * c.detour_factor;
        if is_flight && route < t.flight_min_route_km {
            continue;
        }
        best = best.min(route * c.emission_factor);
    }
    best
}

fn oracle_minmax(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values.iter().map(|v| if hi == lo { 0.5 } else { (v - lo) / (hi - lo) }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub city_id: String,
    pub score: f64,
    pub rank: usize,
    pub components: [f64; 5],
}

/// Weights after dropping personalization (half to transport, half to interest).
pub fn oracle_weights(query: &UserQuery, w: &WeightVector) -> [f64; 5] {
    let raw = [w.transport, w.popularity, w.seasonality, w.interest, w.personalization];
    if !query.personalization.is_empty() || raw[4] == 0.0 {
        return raw;
    }
    let moved = [raw[0] + raw[4] / 2.0, raw[1], raw[2], raw[3] + raw[4] / 2.0, 0.0];
    let total: f64 = moved.iter().sum();
    moved.map(|x| x / total)
}

pub fn oracle_rank(catalog: &Catalog, query: &UserQuery, weights: &WeightVector, t: &TransportConstants) -> Vec<OracleRow> {
    let departure = catalog.cities().iter().find(|c| c.id == query.departure_id).expect("departure present");
    let candidates: Vec<&CityRecord> = catalog.cities().iter().filter(|c| c.id != departure.id).collect();

    let co2: Vec<f64> = candidates
        .iter()
        .map(|c| oracle_min_co2e(chord_distance_km(departure.location, c.location), t))
        .collect();
    let pop: Vec<f64> = candidates.iter().map(|c| c.popularity_count as f64).collect();
    let co2n = oracle_minmax(&co2);
    let popn = oracle_minmax(&pop);
    let w = oracle_weights(query, weights);

    let mut rows: Vec<OracleRow> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let season = c.seasonality[query.month as usize - 1];
            let interest = if query.interests.is_empty() {
                0.5
            } else {
                query.interests.iter().map(|k| *c.interest_scores.get(k).unwrap_or(&0.0)).sum::<f64>()
                    / query.interests.len() as f64
            };
            let personal = if query.personalization.is_empty() {
                0.5
            } else {
                query
                    .personalization
                    .iter()
                    .map(|a| match a {
                        SustainabilityAttribute::AirQuality => c.air_quality,
                        SustainabilityAttribute::ClimateVulnerability => c.climate_vulnerability,
                        SustainabilityAttribute::Walkability => 1.0 - c.walkability,
                    })
                    .sum::<f64>()
                    / query.personalization.len() as f64
            };
            let components = [co2n[i], popn[i], season, 1.0 - interest, personal];
            let score = components.iter().zip(w).map(|(c, w)| c * w).sum();
            OracleRow { city_id: c.id.clone(), score, rank: 0, components }
        })
        .collect();

    // rank by counting strictly-better rows, no sorting involved
    let snapshot = rows.clone();
    for row in rows.iter_mut() {
        let ahead = snapshot
            .iter()
            .filter(|o| o.score < row.score || (o.score == row.score && o.city_id < row.city_id))
            .count();
        row.rank = ahead + 1;
    }
    let mut by_rank: Vec<Option<OracleRow>> = vec![None; rows.len()];
    for row in rows {
        let slot = row.rank - 1;
        assert!(by_rank[slot].is_none(), "oracle produced duplicate rank");
        by_rank[slot] = Some(row);
    }
    by_rank.into_iter().map(Option::unwrap).collect()
}

pub fn categories() -> BTreeSet<InterestCategory> {
    CATEGORIES.iter().map(|c| InterestCategory::new(c).unwrap()).collect()
}

/// A city in a European-sized bounding box with random attributes.
pub fn random_city<R: Rng>(rng: &mut R, id: String) -> CityRecord {
    let mut seasonality = [0.0; 12];
    for s in seasonality.iter_mut() {
        *s = rng.random_range(0.0..=1.0);
    }
    let mut interest_scores = BTreeMap::new();
    for c in CATEGORIES {
        if rng.random_bool(0.85) {
            interest_scores.insert(InterestCategory::new(c).unwrap(), rng.random_range(0.0..=1.0));
        }
    }
    CityRecord {
        name: id.to_uppercase(),
        id,
        country: "EU".into(),
        location: GeoPoint::new(rng.random_range(35.0..60.0), rng.random_range(-10.0..30.0)).unwrap(),
        popularity_count: rng.random_range(0..200_000),
        seasonality,
        interest_scores,
        air_quality: rng.random_range(0.0..=1.0),
        climate_vulnerability: rng.random_range(0.0..=1.0),
        walkability: rng.random_range(0.0..=1.0),
    }
}

pub fn random_catalog<R: Rng>(rng: &mut R, n: usize) -> Catalog {
    let cities = (0..n).map(|i| random_city(rng, format!("city-{i:02}"))).collect();
    Catalog::from_records(cities, categories()).unwrap()
}

pub fn random_query<R: Rng>(rng: &mut R, catalog: &Catalog) -> UserQuery {
    let departure = &catalog.cities()[rng.random_range(0..catalog.len())];
    let interests = CATEGORIES
        .iter()
        .filter(|_| rng.random_bool(0.4))
        .map(|c| InterestCategory::new(c).unwrap())
        .collect();
    let personalization = SustainabilityAttribute::ALL.into_iter().filter(|_| rng.random_bool(0.3)).collect();
    UserQuery { departure_id: departure.id.clone(), month: rng.random_range(1..=12), interests, personalization }
}

/// Random weight vector normalized to sum to one.
pub fn random_weights<R: Rng>(rng: &mut R) -> WeightVector {
    loop {
        let raw: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let total: f64 = raw.iter().sum();
        if total < 1e-6 {
            continue;
        }
        let w = WeightVector {
            transport: raw[0] / total,
            popularity: raw[1] / total,
            seasonality: raw[2] / total,
            interest: raw[3] / total,
            personalization: raw[4] / total,
        };
        if w.validate().is_ok() {
            return w;
        }
    }
}

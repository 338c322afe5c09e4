//! Booking simulation: synthetic accommodation, group-scaled impact, and an
//! append-only receipt store.
//!
//! The store is a UTF-8 file with one JSON object per line. Each line carries
//! `"record": "booking_receipt"` and `"version": 1` next to the receipt fields,
//! so the file can be read without this crate.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{AccommodationBands, PriceBand};
use crate::dataset::Catalog;
use crate::transport::TransportEstimate;

/// Eco-labelled stays must not exceed this per-night footprint.
pub const ECO_LABEL_MAX_CO2E_PER_NIGHT: f64 = 10.0;

const RECORD_KIND: &str = "booking_receipt";
const RECORD_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BookingError {
    #[error("unknown city {0:?}")]
    UnknownCity(String),
    #[error("nights must be at least 1")]
    NightsInvalid,
    #[error("group size must be at least 1")]
    GroupSizeInvalid,
    #[error("invalid transport: {0}")]
    TransportInvalid(String),
    #[error("invalid accommodation: {0}")]
    AccommodationInvalid(String),
    #[error("booking store failure at {path}: {message}")]
    PersistenceFailure { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccommodationTier {
    Budget,
    Standard,
    Eco,
}

impl AccommodationTier {
    pub fn as_str(self) -> &'static str {
        match self {
            AccommodationTier::Budget => "budget",
            AccommodationTier::Standard => "standard",
            AccommodationTier::Eco => "eco",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccommodationOption {
    pub id: String,
    pub name: String,
    pub tier: AccommodationTier,
    pub eur_per_night: f64,
    pub co2e_kg_per_night: f64,
    pub eco_label: bool,
}

impl AccommodationOption {
    pub fn validate(&self) -> Result<(), BookingError> {
        let bad = |m: &str| Err(BookingError::AccommodationInvalid(m.to_string()));
        if !(self.eur_per_night.is_finite() && self.eur_per_night > 0.0) {
            return bad("eur_per_night must be positive");
        }
        if !(self.co2e_kg_per_night.is_finite() && self.co2e_kg_per_night >= 0.0) {
            return bad("co2e_kg_per_night must be non-negative");
        }
        if self.eco_label && self.co2e_kg_per_night > ECO_LABEL_MAX_CO2E_PER_NIGHT {
            return bad("eco-labelled option exceeds 10 kg CO2e per night");
        }
        Ok(())
    }
}

/// Uniform fraction in `[0, 1)` from eight bytes of a digest.
fn fraction(bytes: &[u8]) -> f64 {
    let mut word = [0u8; 8];
    word.copy_from_slice(&bytes[..8]);
    (u64::from_be_bytes(word) >> 11) as f64 / (1u64 << 53) as f64
}

fn price_in(band: &PriceBand, frac: f64) -> f64 {
    let raw = band.min_eur_per_night + frac * (band.max_eur_per_night - band.min_eur_per_night);
    ((raw * 100.0).round() / 100.0).clamp(band.min_eur_per_night, band.max_eur_per_night)
}

/// Budget, standard and eco stays for a city; a pure function of the id and bands.
pub fn accommodation_options(city_id: &str, bands: &AccommodationBands) -> Vec<AccommodationOption> {
    let digest = Sha256::digest(format!("accommodation:{city_id}").as_bytes());
    let tiers = [
        (AccommodationTier::Budget, "Budget stay", &bands.budget, false),
        (AccommodationTier::Standard, "Standard hotel", &bands.standard, false),
        (AccommodationTier::Eco, "Eco-certified lodge", &bands.eco, true),
    ];
    tiers
        .into_iter()
        .enumerate()
        .map(|(i, (tier, name, band, eco_label))| AccommodationOption {
            id: format!("{city_id}-{}", tier.as_str()),
            name: name.to_string(),
            tier,
            eur_per_night: price_in(band, fraction(&digest[i * 8..])),
            co2e_kg_per_night: band.co2e_kg_per_night,
            eco_label,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookingDraft {
    pub city_id: String,
    pub transport: TransportEstimate,
    pub accommodation: AccommodationOption,
    pub nights: u32,
    pub group_size: u32,
}

impl BookingDraft {
    pub fn validate(&self) -> Result<(), BookingError> {
        if self.group_size == 0 {
            return Err(BookingError::GroupSizeInvalid);
        }
        if self.nights == 0 {
            return Err(BookingError::NightsInvalid);
        }
        let t = &self.transport;
        if ![t.distance_km, t.co2e_kg, t.cost_eur, t.duration_h].iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(BookingError::TransportInvalid("numeric fields must be finite and non-negative".into()));
        }
        if t.duration_h <= 0.0 {
            return Err(BookingError::TransportInvalid("duration_h must be positive".into()));
        }
        self.accommodation.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BookingImpact {
    pub total_cost_eur: f64,
    pub total_co2e_kg: f64,
    pub per_person_co2e_kg: f64,
}

/// Transport plus accommodation per person, scaled linearly by group size.
pub fn compute_impact(draft: &BookingDraft) -> BookingImpact {
    let nights = f64::from(draft.nights);
    let group = f64::from(draft.group_size);
    let per_person_co2e_kg = draft.transport.co2e_kg + draft.accommodation.co2e_kg_per_night * nights;
    let per_person_cost = draft.transport.cost_eur + draft.accommodation.eur_per_night * nights;
    BookingImpact {
        total_cost_eur: per_person_cost * group,
        total_co2e_kg: per_person_co2e_kg * group,
        per_person_co2e_kg,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookingReceipt {
    pub booking_id: String,
    pub draft: BookingDraft,
    pub impact: BookingImpact,
    pub created_at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
struct StoredReceipt {
    record: String,
    version: u32,
    #[serde(flatten)]
    receipt: BookingReceipt,
}

/// Single-writer append-only receipt store with an in-memory index.
#[derive(Debug)]
pub struct BookingStore {
    path: PathBuf,
    writer: Mutex<File>,
    index: RwLock<HashMap<String, BookingReceipt>>,
}

impl BookingStore {
    /// Open (or create) the store and index every receipt already on disk.
    pub fn open(path: &Path) -> Result<Self, BookingError> {
        let fail = |e: &dyn std::fmt::Display| BookingError::PersistenceFailure {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| fail(&e))?;
        }
        let mut index = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(|e| fail(&e))?);
            for (n, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| fail(&e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let stored: StoredReceipt =
                    serde_json::from_str(&line).map_err(|e| fail(&format!("line {}: {e}", n + 1)))?;
                if stored.record != RECORD_KIND {
                    return Err(fail(&format!("line {}: unexpected record kind {:?}", n + 1, stored.record)));
                }
                index.insert(stored.receipt.booking_id.clone(), stored.receipt);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| fail(&e))?;
        Ok(Self { path: path.to_path_buf(), writer: Mutex::new(file), index: RwLock::new(index) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, booking_id: &str) -> Option<BookingReceipt> {
        self.index.read().expect("index lock").get(booking_id).cloned()
    }

    pub fn len(&self) -> usize {
        self.index.read().expect("index lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn append(&self, receipt: &BookingReceipt) -> Result<(), BookingError> {
        let stored = StoredReceipt { record: RECORD_KIND.into(), version: RECORD_VERSION, receipt: receipt.clone() };
        let mut line = serde_json::to_string(&stored).map_err(|e| self.failure(&e))?;
        line.push('\n');
        let mut file = self.writer.lock().expect("writer lock");
        file.write_all(line.as_bytes()).map_err(|e| self.failure(&e))?;
        file.sync_data().map_err(|e| self.failure(&e))?;
        self.index.write().expect("index lock").insert(receipt.booking_id.clone(), receipt.clone());
        Ok(())
    }

    fn failure(&self, e: &dyn std::fmt::Display) -> BookingError {
        BookingError::PersistenceFailure { path: self.path.clone(), message: e.to_string() }
    }
}

/// Validate, price and persist a draft under a fresh booking id.
pub fn confirm_booking(
    store: &BookingStore,
    catalog: &Catalog,
    draft: &BookingDraft,
) -> Result<BookingReceipt, BookingError> {
    draft.validate()?;
    catalog.get_city(&draft.city_id).map_err(|_| BookingError::UnknownCity(draft.city_id.clone()))?;
    let receipt = BookingReceipt {
        booking_id: uuid::Uuid::new_v4().to_string(),
        draft: draft.clone(),
        impact: compute_impact(draft),
        created_at: Utc::now(),
    };
    store.append(&receipt)?;
    Ok(receipt)
}

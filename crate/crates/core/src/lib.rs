//! Sustainability-aware city-trip recommendation engine.
//!
//! - [`dataset`]: CSV ingestion through a configurable column mapping.
//! - [`transport`]: distances, per-mode CO2e / cost / duration, traffic-light classes.
//! - [`scoring`]: the composite lower-is-better score and ranking.
//! - [`nudge`]: badges, alternative-destination banners, positive reinforcement.
//! - [`booking`]: accommodation options, booking impact, receipt store.
//! - [`report`]: the response documents shared by the HTTP API and the CLI.

#![forbid(unsafe_code)]

pub mod booking;
pub mod config;
pub mod dataset;
pub mod nudge;
pub mod report;
pub mod scoring;
pub mod transport;

pub use config::EngineConfig;
pub use dataset::{load_catalog, Catalog, CityRecord, ColumnMapping, GeoPoint, InterestCategory};
pub use report::{Engine, EngineError};
pub use scoring::{rank_destinations, ScoredCity, UserQuery, WeightVector};

//! HTTP JSON API over the greentrip engine.
//!
//! | Method | Path | Body / query | Success |
//! |---|---|---|---|
//! | GET | `/api/health` | | 200 [`Health`], 503 while the catalog loads |
//! | GET | `/api/cities` | | 200 [`CityList`] |
//! | POST | `/api/recommendations` | [`RecommendationRequest`] | 200 [`RecommendationResponse`] |
//! | POST | `/api/explanations` | [`ExplanationRequest`] | 200 [`Explanation`] |
//! | GET | `/api/cities/{id}/transport` | `?from=<city id>` | 200 [`TransportDetail`] |
//! | POST | `/api/bookings` | [`BookingRequest`] | 201 [`BookingConfirmation`] |
//! | GET | `/api/bookings/{id}` | | 200 [`BookingReceipt`] |
//! | POST | `/api/events` | [`ClientEvent`] | 202 [`EventAck`] |
//!
//! Every other status carries an [`ApiError`] body.

#![forbid(unsafe_code)]

pub mod error;
pub mod events;

use std::collections::BTreeSet;
use std::future::Future;
use std::sync::{Arc, OnceLock};

use axum::extract::rejection::{BytesRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use bytes::Bytes;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use greentrip_core::booking::{confirm_booking, BookingDraft, BookingReceipt, BookingStore};
use greentrip_core::nudge::NudgeBanner;
use greentrip_core::report::{Explanation, Health, RecommendationResponse, TransportDetail};
use greentrip_core::scoring::SustainabilityAttribute;
use greentrip_core::{Engine, GeoPoint, InterestCategory, UserQuery};

pub use error::ApiError;
pub use events::{Acceptance, ClientEvent, EventError, EventKind, EventLogger, EventRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendationRequest {
    pub departure_id: String,
    pub month: u32,
    #[serde(default)]
    pub interests: BTreeSet<InterestCategory>,
    #[serde(default)]
    pub personalization: BTreeSet<SustainabilityAttribute>,
    /// City whose selection the explore banner reacts to; rank 1 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus_city_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<usize>,
}

impl RecommendationRequest {
    pub fn query(&self) -> UserQuery {
        UserQuery {
            departure_id: self.departure_id.clone(),
            month: self.month,
            interests: self.interests.clone(),
            personalization: self.personalization.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplanationRequest {
    pub query: UserQuery,
    pub city_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookingRequest {
    /// The search the booking came from; drives the confirmation banner.
    pub query: UserQuery,
    pub draft: BookingDraft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookingConfirmation {
    pub receipt: BookingReceipt,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub banner: Option<NudgeBanner>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitySummary {
    pub id: String,
    pub name: String,
    pub country: String,
    pub location: GeoPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityList {
    pub catalog_fingerprint: String,
    pub categories: Vec<InterestCategory>,
    pub cities: Vec<CitySummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventAck {
    pub status: Acceptance,
}

#[derive(Debug, Deserialize)]
struct TransportParams {
    from: String,
}

/// Shared handler state. The engine slot is empty until the catalog loads.
#[derive(Debug, Clone)]
pub struct AppState {
    engine: Arc<OnceLock<Engine>>,
    bookings: Arc<BookingStore>,
    events: EventLogger,
}

impl AppState {
    pub fn new(bookings: BookingStore, events: EventLogger) -> Self {
        Self { engine: Arc::new(OnceLock::new()), bookings: Arc::new(bookings), events }
    }

    /// Install the engine; returns false if one was already installed.
    pub fn install_engine(&self, engine: Engine) -> bool {
        self.engine.set(engine).is_ok()
    }

    pub fn events(&self) -> &EventLogger {
        &self.events
    }

    pub fn bookings(&self) -> &BookingStore {
        &self.bookings
    }

    fn engine(&self) -> Result<&Engine, ApiError> {
        self.engine.get().ok_or_else(ApiError::catalog_loading)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/cities", get(cities))
        .route("/api/recommendations", post(recommendations))
        .route("/api/explanations", post(explanations))
        .route("/api/cities/{id}/transport", get(transport))
        .route("/api/bookings", post(bookings))
        .route("/api/bookings/{id}", get(booking_receipt))
        .route("/api/events", post(events))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed on this endpoint")
        })
        .with_state(state)
}

fn body_bytes(body: Result<Bytes, BytesRejection>, code: &str) -> Result<Bytes, ApiError> {
    body.map_err(|e| ApiError::new(e.status(), code, e.body_text()))
}

async fn health(State(state): State<AppState>) -> Result<Json<Health>, ApiError> {
    Ok(Json(state.engine()?.health()))
}

async fn cities(State(state): State<AppState>) -> Result<Json<CityList>, ApiError> {
    let catalog = state.engine()?.catalog();
    Ok(Json(CityList {
        catalog_fingerprint: catalog.fingerprint().to_string(),
        categories: catalog.categories().iter().cloned().collect(),
        cities: catalog
            .cities()
            .iter()
            .map(|c| CitySummary { id: c.id.clone(), name: c.name.clone(), country: c.country.clone(), location: c.location })
            .collect(),
    }))
}

async fn recommendations(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<RecommendationResponse>, ApiError> {
    let body = body_bytes(body, "invalid_query")?;
    let engine = state.engine()?;
    let request: RecommendationRequest = error::parse_json(&body, "invalid_query")?;
    let response = engine.recommend(&request.query(), request.focus_city_id.as_deref(), request.top)?;
    Ok(Json(response))
}

async fn explanations(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<Explanation>, ApiError> {
    let body = body_bytes(body, "invalid_query")?;
    let engine = state.engine()?;
    let request: ExplanationRequest = error::parse_json(&body, "invalid_query")?;
    Ok(Json(engine.explain(&request.query, &request.city_id)?))
}

async fn transport(
    State(state): State<AppState>,
    Path(to_id): Path<String>,
    params: Result<Query<TransportParams>, QueryRejection>,
) -> Result<Json<TransportDetail>, ApiError> {
    let engine = state.engine()?;
    let Query(params) = params.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_query", e.body_text()))?;
    Ok(Json(engine.transport_detail(&params.from, &to_id)?))
}

async fn bookings(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let body = body_bytes(body, "invalid_booking")?;
    let engine = state.engine()?;
    let request: BookingRequest = error::parse_json(&body, "invalid_booking")?;
    request.draft.validate()?;
    let banner = engine.confirmation_banner(&request.query, &request.draft)?;
    let store = state.bookings.clone();
    let catalog = engine.catalog().clone();
    let draft = request.draft;
    let receipt = tokio::task::spawn_blocking(move || confirm_booking(&store, &catalog, &draft))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok((StatusCode::CREATED, Json(BookingConfirmation { receipt, banner })))
}

async fn booking_receipt(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<BookingReceipt>, ApiError> {
    state.bookings.get(&id).map(Json).ok_or_else(|| ApiError::not_found(format!("no booking {id:?}")))
}

async fn events(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let body = body_bytes(body, "invalid_event")?;
    let event: ClientEvent = error::parse_json(&body, "invalid_event")?;
    let status = state.events.submit(event).map_err(|e| match e {
        EventError::Invalid(m) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_event", m),
        e @ EventError::TooManyPending { .. } => ApiError::new(StatusCode::BAD_REQUEST, "too_many_pending", e.to_string()),
        EventError::Closed => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "shutting_down", "event log is closed"),
        e @ EventError::Io { .. } => {
            tracing::error!("{e}");
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "event log unavailable")
        }
    })?;
    Ok((StatusCode::ACCEPTED, Json(EventAck { status })))
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("server: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Events(#[from] EventError),
}

/// Serve until `shutdown` resolves, then drain in-flight requests and
/// flush the event log.
pub async fn serve<F>(listener: tokio::net::TcpListener, state: AppState, shutdown: F) -> Result<(), ServeError>
where
    F: Future<Output = ()> + Send + 'static,
{
    axum::serve(listener, router(state.clone())).with_graceful_shutdown(shutdown).await?;
    let events = state.events.clone();
    tokio::task::spawn_blocking(move || events.shutdown())
        .await
        .map_err(|e| ServeError::Io(std::io::Error::other(e)))??;
    Ok(())
}

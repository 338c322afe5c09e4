//! The single error body every non-2xx response carries.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

use greentrip_core::booking::BookingError;
use greentrip_core::dataset::LookupError;
use greentrip_core::nudge::NudgeError;
use greentrip_core::scoring::ScoringError;
use greentrip_core::transport::TransportError;
use greentrip_core::EngineError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiError {
    pub http_status: u16,
    pub machine_code: String,
    pub human_message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, machine_code: &str, human_message: impl Into<String>) -> Self {
        Self { http_status: status.as_u16(), machine_code: machine_code.to_string(), human_message: human_message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn catalog_loading() -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "catalog_loading", "the city catalog is still loading")
    }

    pub fn status(&self) -> StatusCode {
        StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

impl From<ScoringError> for ApiError {
    fn from(e: ScoringError) -> Self {
        let msg = e.to_string();
        match e {
            ScoringError::UnknownDeparture(_) => Self::new(StatusCode::NOT_FOUND, "unknown_city", msg),
            ScoringError::MonthOutOfRange(_) => Self::new(StatusCode::BAD_REQUEST, "month_out_of_range", msg),
            ScoringError::UnknownInterest(_) => Self::new(StatusCode::BAD_REQUEST, "unknown_interest", msg),
            ScoringError::EmptyCandidateSet => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "empty_candidate_set", msg)
            }
            ScoringError::InvalidWeights(_) | ScoringError::Normalize(_) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", msg)
            }
        }
    }
}

impl From<LookupError> for ApiError {
    fn from(e: LookupError) -> Self {
        let msg = e.to_string();
        match e {
            LookupError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "unknown_city", msg),
            LookupError::MonthOutOfRange(_) => Self::new(StatusCode::BAD_REQUEST, "month_out_of_range", msg),
        }
    }
}

impl From<TransportError> for ApiError {
    fn from(e: TransportError) -> Self {
        let msg = e.to_string();
        match e {
            TransportError::SameCity(_) => Self::new(StatusCode::BAD_REQUEST, "same_city", msg),
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", msg),
        }
    }
}

impl From<BookingError> for ApiError {
    fn from(e: BookingError) -> Self {
        let msg = e.to_string();
        match e {
            BookingError::UnknownCity(_) => Self::new(StatusCode::NOT_FOUND, "unknown_city", msg),
            BookingError::NightsInvalid => Self::new(StatusCode::BAD_REQUEST, "nights_invalid", msg),
            BookingError::GroupSizeInvalid => Self::new(StatusCode::BAD_REQUEST, "group_size_invalid", msg),
            BookingError::TransportInvalid(_) | BookingError::AccommodationInvalid(_) => {
                Self::new(StatusCode::BAD_REQUEST, "invalid_booking", msg)
            }
            BookingError::PersistenceFailure { .. } => {
                tracing::error!("{msg}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "persistence_failure", "the booking could not be saved")
            }
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Scoring(e) => e.into(),
            EngineError::Lookup(e) => e.into(),
            EngineError::Transport(e) => e.into(),
            EngineError::Booking(e) => e.into(),
            EngineError::Nudge(NudgeError::Classification(e)) => e.into(),
            EngineError::Nudge(e) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
            e @ EngineError::DestinationIsDeparture(_) => Self::new(StatusCode::BAD_REQUEST, "same_city", e.to_string()),
        }
    }
}

/// Parse a JSON body, naming the offending field in the 400 message.
pub fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8], machine_code: &str) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = if path == "." { inner.to_string() } else { format!("{path}: {inner}") };
        ApiError::new(StatusCode::BAD_REQUEST, machine_code, message)
    })?;
    de.end().map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, machine_code, e.to_string()))?;
    Ok(value)
}

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use breeder_core::metrics::MetricsError;
use breeder_core::neat::NeatError;
use breeder_core::probe::ProbeError;
use breeder_core::stats::StatsError;
use breeder_core::store::StoreError;
use breeder_core::CppnError;
use serde::Serialize;

/// Error returned by every endpoint, rendered as `{"error", "message"}`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::not_found("unknown_session", format!("no live session {id}"))
    }

    pub fn unknown_image(id: &str) -> Self {
        Self::not_found("unknown_image", format!("unknown image {id}"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            error: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::EmptyTitle => Self::bad_request("empty_title", msg),
            StoreError::UnknownImage(_) => Self::not_found("unknown_image", msg),
            StoreError::UnknownParent(_) => Self::new(StatusCode::CONFLICT, "unknown_parent", msg),
            StoreError::DuplicateId(_) => Self::new(StatusCode::CONFLICT, "duplicate_id", msg),
            StoreError::IdMismatch { .. } | StoreError::InvalidGenome => {
                Self::bad_request("invalid_genome", msg)
            }
            StoreError::Io(_) | StoreError::Corrupt { .. } => Self::internal(msg),
        }
    }
}

impl From<NeatError> for ApiError {
    fn from(e: NeatError) -> Self {
        let code = match e {
            NeatError::EmptySelection => "empty_selection",
            NeatError::IndexOutOfRange { .. } => "invalid_slot",
            NeatError::PopulationSize(_) => "invalid_size",
            NeatError::InvalidConfig(_) => "invalid_config",
            NeatError::PaletteMismatch => "palette_mismatch",
            NeatError::UnknownConnection(_) => "unknown_connection",
            NeatError::DisabledConnection(_) => "disabled_connection",
            NeatError::InvalidGenome(_) => "invalid_genome",
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<ProbeError> for ApiError {
    fn from(e: ProbeError) -> Self {
        let code = match e {
            ProbeError::UnknownConnection(_) => "unknown_connection",
            ProbeError::DisabledConnection(_) => "disabled_connection",
            ProbeError::UnknownNode(_) => "unknown_node",
            ProbeError::InvalidSpec(_) => "invalid_sweep",
            ProbeError::InvalidColor(_) => "invalid_color",
            ProbeError::EmptyLabel => "empty_label",
            ProbeError::GenomeMismatch { .. } => "genome_mismatch",
            ProbeError::Cppn(ref c) => return c.clone().into(),
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<CppnError> for ApiError {
    fn from(e: CppnError) -> Self {
        let code = match e {
            CppnError::InvalidGenome(_) => "invalid_genome",
            CppnError::UnknownNode(_) => "unknown_node",
            CppnError::UnknownConnection(_) => "unknown_connection",
            CppnError::DisabledConnection(_) => "disabled_connection",
            CppnError::InvalidSize(..) => "invalid_size",
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<MetricsError> for ApiError {
    fn from(e: MetricsError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "metrics", e.to_string())
    }
}

impl From<StatsError> for ApiError {
    fn from(e: StatsError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "stats", e.to_string())
    }
}

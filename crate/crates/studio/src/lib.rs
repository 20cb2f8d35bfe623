//! Service side of the breeder: live sessions, the HTTP API over the
//! published-image store, and the `breeder` command line.

pub mod analysis;
pub mod api;
pub mod cli;
pub mod error;
pub mod labels;
pub mod sessions;

pub use api::{open_store, router, serve, AppState, ServeError, ServiceConfig};
pub use error::ApiError;

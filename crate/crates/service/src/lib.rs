//! HTTP/JSON backend: prompt catalog, trace submission with validation and
//! durable storage, versioned per-category models, and suggestion queries.
//!
//! [`AppState::open`] replays the data directory and builds the first model
//! generation; [`router`] exposes it over axum; [`serve`] binds and runs.

mod api;
mod config;
pub mod registry;
pub mod store;

use std::sync::Arc;

use thiserror::Error;

pub use api::{
    router, AcknowledgeRequest, AcknowledgeResponse, AppState, CategoryListing, ErrorBody,
    SubmitResponse, SuggestResponse, Toolbox, ToolboxStep, SESSION_HEADER,
};
pub use config::ServiceConfig;
pub use registry::{CategoryVersion, ModelStatus, RebuildReport};
pub use store::{RecordStatus, Store, StoreError, StoreRecord};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("listener: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the state for `config`, binds its listen address, and serves
/// until interrupted.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let listen = config.listen;
    let state: Arc<AppState> = AppState::open(config)?;
    let listener = tokio::net::TcpListener::bind(listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "serving");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

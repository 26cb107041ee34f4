//! HTTP front end for the audit workbench.
//!
//! Each session owns one [`Workbench`](sudoku_audit_core::Workbench) behind
//! a mutex, so concurrent requests against a session are applied one at a
//! time. With a data directory configured, every recorded move rewrites the
//! session's ledger file and sessions are restored by replay at start-up.

mod api;
pub mod error;
pub mod inputs;
pub mod state;
pub mod views;

use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use tower_http::services::ServeDir;

pub use state::AppState;

/// The full application. Static files under `ui_dir`, if given, are served
/// for every path the API does not claim.
pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let app = api::routes().with_state(state);
    match ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub data_dir: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
}

/// Serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> io::Result<()> {
    let state = match &config.data_dir {
        Some(dir) => AppState::with_data_dir(dir)?,
        None => AppState::in_memory(),
    };
    tracing::info!(sessions = state.session_count(), "restored sessions");
    let app = router(Arc::new(state), config.ui_dir);
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

//! HTTP API for editors and the web studio.
//!
//! - `POST /api/visualize` with `{"sql": ..., "dialect": "queryvis"|"rd",
//!   "forall": bool, "schema": {relation: [attr, ...]}}` (all but `sql`
//!   optional) returns `{"svg", "interchange", "dialect", "diagnostics"}`.
//!   Invalid SQL still answers 200, with `svg` and `interchange` null and
//!   the problems listed in `diagnostics`; malformed request bodies get 400.
//! - `GET /api/health` returns `{"status": "ok", "version": ...}`.
//!
//! Requests share no state.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagram::Dialect;
use crate::pipeline::{visualize, Diagnostic, Options, Severity};
use crate::render::{to_svg, InterchangeDocument, StyleConfig};
use crate::sql::Schema;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualizeRequest {
    pub sql: String,
    #[serde(default)]
    pub dialect: Option<String>,
    #[serde(default)]
    pub forall: Option<bool>,
    #[serde(default)]
    pub schema: Option<serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VisualizeResponse {
    pub svg: Option<String>,
    pub interchange: Option<InterchangeDocument>,
    pub dialect: Option<Dialect>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn router(style: StyleConfig) -> Router {
    Router::new()
        .route("/api/visualize", post(visualize_handler))
        .route("/api/health", get(health))
        .with_state(Arc::new(style))
}

/// Serves on an already bound listener until the process ends.
pub async fn serve_std(listener: std::net::TcpListener, style: StyleConfig) -> std::io::Result<()> {
    listener.set_nonblocking(true)?;
    let listener = tokio::net::TcpListener::from_std(listener)?;
    axum::serve(listener, router(style)).await
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}))
}

fn bad_request(message: String) -> Response {
    (StatusCode::BAD_REQUEST, Json(json!({ "error": message }))).into_response()
}

async fn visualize_handler(State(style): State<Arc<StyleConfig>>, body: Bytes) -> Response {
    let req: VisualizeRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(format!("invalid request body: {e}")),
    };
    let dialect = match req.dialect.as_deref() {
        None | Some("queryvis") => Dialect::QueryVis,
        Some("rd") | Some("relational-diagrams") => Dialect::RelationalDiagrams,
        Some(other) => return bad_request(format!("unknown dialect `{other}`")),
    };
    let schema = match req.schema {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => match Schema::from_json(&v.to_string()) {
            Ok(s) => Some(s),
            Err(e) => return bad_request(e.to_string()),
        },
    };
    let opts = Options {
        dialect,
        forall: req.forall.unwrap_or(true),
        fallback: true,
    };
    let response = respond(&req.sql, schema.as_ref(), opts, &style);
    (StatusCode::OK, Json(response)).into_response()
}

/// The response body for one request, independent of any other request.
pub fn respond(
    sql: &str,
    schema: Option<&Schema>,
    opts: Options,
    style: &StyleConfig,
) -> VisualizeResponse {
    match visualize(sql, schema, opts) {
        Ok(v) => {
            let mut diagnostics = Diagnostic::warnings(&v.compiled.resolved, sql);
            if let Some(reason) = &v.fallback {
                diagnostics.push(Diagnostic::new(
                    Severity::Info,
                    format!("{reason}; rendered as relational-diagrams instead"),
                    None,
                    sql,
                ));
            }
            VisualizeResponse {
                svg: Some(to_svg(&v.positioned, style)),
                interchange: Some(InterchangeDocument::from(&v.positioned)),
                dialect: Some(v.positioned.diagram.dialect),
                diagnostics,
            }
        }
        Err(e) => VisualizeResponse {
            svg: None,
            interchange: None,
            dialect: None,
            diagnostics: vec![Diagnostic::from_error(&e, sql)],
        },
    }
}

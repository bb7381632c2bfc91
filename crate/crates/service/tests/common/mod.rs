#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use tasktrace_service::{router, AppState, ServiceConfig, SESSION_HEADER};

pub struct Client {
    pub state: Arc<AppState>,
    pub app: Router,
    pub session: Option<String>,
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| {
            panic!("{e}: {}", String::from_utf8_lossy(&self.body))
        })
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

impl Client {
    pub fn open(config: ServiceConfig) -> Self {
        let state = AppState::open(config).unwrap();
        Client {
            app: router(state.clone()),
            state,
            session: None,
        }
    }

    pub async fn send(&self, method: &str, uri: &str, body: impl Into<String>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(token) = &self.session {
            req = req.header(SESSION_HEADER, token);
        }
        let req = req
            .header("content-type", "application/json")
            .body(Body::from(body.into()))
            .unwrap();
        let res = self.app.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, body }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send("GET", uri, "").await
    }

    pub async fn post(&self, uri: &str, body: impl Into<String>) -> Reply {
        self.send("POST", uri, body).await
    }

    /// Acknowledges a fresh session and uses it for later requests.
    pub async fn acknowledge(&mut self) -> String {
        let reply = self.post("/sessions/acknowledge", "").await;
        assert_eq!(reply.status, StatusCode::OK);
        let token = reply.json()["session"].as_str().unwrap().to_owned();
        self.session = Some(token.clone());
        token
    }
}
pub mod scenarios;

//! Blocking client for the server's admin HTTP API.

use serde::Deserialize;
use serde_json::Value;

use crate::error::{ClientError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct DeviceSummary {
    pub id: i64,
    pub status: String,
    pub sign_count: u64,
    pub verify_count: u64,
    pub fail_count: u64,
}

pub struct AdminClient {
    base: String,
    agent: ureq::Agent,
}

impl AdminClient {
    /// `base` is e.g. `http://127.0.0.1:5001`.
    pub fn new(base: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder().http_status_as_error(false).build().new_agent();
        Self { base: base.into().trim_end_matches('/').to_owned(), agent }
    }

    pub fn health(&self) -> Result<Value> {
        self.get("/health")
    }

    pub fn devices(&self) -> Result<Vec<DeviceSummary>> {
        serde_json::from_value(self.get("/devices")?).map_err(|e| ClientError::Http(e.to_string()))
    }

    pub fn device(&self, id: i64) -> Result<DeviceSummary> {
        serde_json::from_value(self.get(&format!("/devices/{id}"))?).map_err(|e| ClientError::Http(e.to_string()))
    }

    pub fn approve(&self, id: i64) -> Result<Value> {
        self.post(&format!("/devices/{id}/approve"))
    }

    pub fn ban(&self, id: i64) -> Result<Value> {
        self.post(&format!("/devices/{id}/ban"))
    }

    pub fn rehabilitate(&self, id: i64) -> Result<Value> {
        self.post(&format!("/devices/{id}/rehabilitate"))
    }

    fn get(&self, path: &str) -> Result<Value> {
        let resp = self.agent.get(format!("{}{path}", self.base)).call().map_err(http)?;
        read(resp)
    }

    fn post(&self, path: &str) -> Result<Value> {
        let resp = self.agent.post(format!("{}{path}", self.base)).send_empty().map_err(http)?;
        read(resp)
    }
}

fn read(mut resp: ureq::http::Response<ureq::Body>) -> Result<Value> {
    let status = resp.status();
    let body: Value = resp.body_mut().read_json().unwrap_or(Value::Null);
    if status.is_success() {
        Ok(body)
    } else {
        let msg = body.get("error").and_then(Value::as_str).unwrap_or("");
        Err(ClientError::Http(format!("{status} {msg}").trim_end().to_owned()))
    }
}

fn http(e: ureq::Error) -> ClientError {
    ClientError::Http(e.to_string())
}

//! Per-device state file: assigned ID, server address and the server's DH
//! public key (the trust anchor).

use std::fs;
use std::path::{Path, PathBuf};

use mova_channel::{DhServerPublic, UNREGISTERED_ID};
use serde::{Deserialize, Serialize};

use crate::error::{ClientError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceState {
    pub id: i64,
    pub server_address: String,
    /// `dhKpPub.key` contents.
    pub dh_server_public: String,
}

impl DeviceState {
    pub fn new(server_address: impl Into<String>, dh: &DhServerPublic) -> Self {
        Self { id: UNREGISTERED_ID, server_address: server_address.into(), dh_server_public: dh.to_key_file() }
    }

    pub fn is_registered(&self) -> bool {
        self.id != UNREGISTERED_ID
    }

    pub fn dh_public(&self) -> Result<DhServerPublic> {
        Ok(DhServerPublic::from_key_file(&self.dh_server_public)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| state_err(path, e.to_string()))?;
        let state: Self = serde_json::from_str(&text).map_err(|e| state_err(path, e.to_string()))?;
        state.dh_public().map_err(|e| state_err(path, e.to_string()))?;
        Ok(state)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("state serializes");
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, json).and_then(|_| fs::rename(&tmp, path)).map_err(|e| state_err(path, e.to_string()))
    }

    /// Loads `path` if it exists, applying the overrides; otherwise creates a
    /// fresh unregistered state, which needs both a server address and the
    /// server's DH public key file.
    pub fn open(path: &Path, server: Option<&str>, dh_pub: Option<&Path>) -> Result<Self> {
        let dh = dh_pub.map(DhServerPublic::load).transpose()?;
        if path.exists() {
            let mut state = Self::load(path)?;
            if let Some(server) = server {
                state.server_address = server.to_owned();
            }
            if let Some(dh) = dh {
                state.dh_server_public = dh.to_key_file();
            }
            return Ok(state);
        }
        match (server, dh) {
            (Some(server), Some(dh)) => Ok(Self::new(server, &dh)),
            _ => Err(state_err(
                path,
                "no state file yet: pass --server and --dh-pub (the server's dhKpPub.key) to register".into(),
            )),
        }
    }
}

fn state_err(path: &Path, reason: String) -> ClientError {
    ClientError::State { path: path.display().to_string(), reason }
}

/// Default state file location.
pub fn default_state_path() -> PathBuf {
    PathBuf::from("mova-device.json")
}

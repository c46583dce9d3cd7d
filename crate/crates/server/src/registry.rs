//! Device registry persisted as one JSON document per device plus an index.
//!
//! `deviceList.list` holds one device ID per line; `<id>.dl.json` holds the
//! record. Every change rewrites the affected files through a temporary file
//! and a rename so a crash never leaves a half-written document. Pending
//! registrations live only in memory: they belong to a connection that is
//! still waiting and would be meaningless after a restart.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::RegistryError;

pub const INDEX_FILE: &str = "deviceList.list";
pub const HISTORY_LIMIT: usize = 32;

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn device_file_name(id: i64) -> String {
    format!("{id}.dl.json")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceStatus {
    Pending,
    Active,
    Banned,
}

impl fmt::Display for DeviceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceStatus::Pending => "pending",
            DeviceStatus::Active => "active",
            DeviceStatus::Banned => "banned",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub at: u64,
    pub event: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceRecord {
    pub id: i64,
    pub status: DeviceStatus,
    pub sign_count: u64,
    pub verify_count: u64,
    pub fail_count: u64,
    pub registered_at: u64,
    pub last_seen: u64,
    pub history: VecDeque<HistoryEntry>,
}

impl DeviceRecord {
    fn new(id: i64, status: DeviceStatus) -> Self {
        let now = unix_now();
        Self {
            id,
            status,
            sign_count: 0,
            verify_count: 0,
            fail_count: 0,
            registered_at: now,
            last_seen: now,
            history: VecDeque::new(),
        }
    }

    fn note(&mut self, event: impl Into<String>) {
        let at = unix_now();
        self.last_seen = at;
        if self.history.len() == HISTORY_LIMIT {
            self.history.pop_front();
        }
        self.history.push_back(HistoryEntry { at, event: event.into() });
    }
}

/// Result of counting a failure against a device.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailOutcome {
    pub fail_count: u64,
    pub banned_now: bool,
}

#[derive(Debug)]
pub struct Registry {
    dir: Option<PathBuf>,
    devices: BTreeMap<i64, DeviceRecord>,
}

impl Registry {
    pub fn in_memory() -> Self {
        Self { dir: None, devices: BTreeMap::new() }
    }

    /// Loads the registry in `dir`, creating an empty one if no index exists.
    pub fn open(dir: &Path) -> Result<Self, RegistryError> {
        fs::create_dir_all(dir)?;
        let mut reg = Self { dir: Some(dir.to_path_buf()), devices: BTreeMap::new() };
        let index = dir.join(INDEX_FILE);
        if !index.exists() {
            reg.write_index()?;
            return Ok(reg);
        }
        for line in fs::read_to_string(&index)?.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let id: i64 =
                line.parse().map_err(|_| RegistryError::Corrupt(format!("bad ID line {line:?} in {INDEX_FILE}")))?;
            let path = dir.join(device_file_name(id));
            let text =
                fs::read_to_string(&path).map_err(|e| RegistryError::Corrupt(format!("{}: {e}", path.display())))?;
            let record: DeviceRecord =
                serde_json::from_str(&text).map_err(|e| RegistryError::Corrupt(format!("{}: {e}", path.display())))?;
            if record.id != id || record.status == DeviceStatus::Pending {
                return Err(RegistryError::Corrupt(format!("{} does not describe device {id}", path.display())));
            }
            reg.devices.insert(id, record);
        }
        Ok(reg)
    }

    pub fn get(&self, id: i64) -> Option<&DeviceRecord> {
        self.devices.get(&id)
    }

    pub fn status(&self, id: i64) -> Option<DeviceStatus> {
        self.devices.get(&id).map(|r| r.status)
    }

    pub fn snapshot(&self) -> Vec<DeviceRecord> {
        self.devices.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }

    /// Allocates the next ID (starting at 1) for a new device.
    pub fn register(&mut self, status: DeviceStatus) -> Result<i64, RegistryError> {
        let id = self.devices.keys().next_back().map_or(1, |last| last + 1);
        let mut record = DeviceRecord::new(id, status);
        record.note(format!("registered as {status}"));
        self.devices.insert(id, record);
        if status != DeviceStatus::Pending {
            self.persist(id, true)?;
        }
        Ok(id)
    }

    /// Drops a pending registration that was never approved.
    pub fn withdraw(&mut self, id: i64) -> Result<(), RegistryError> {
        match self.status(id) {
            Some(DeviceStatus::Pending) => {
                self.devices.remove(&id);
                Ok(())
            }
            Some(from) => Err(RegistryError::IllegalTransition { id, from, action: "withdraw" }),
            None => Err(RegistryError::NotFound(id)),
        }
    }

    pub fn approve(&mut self, id: i64) -> Result<&DeviceRecord, RegistryError> {
        self.transition(id, "approve", &[DeviceStatus::Pending], |r| r.status = DeviceStatus::Active)
    }

    pub fn ban(&mut self, id: i64) -> Result<&DeviceRecord, RegistryError> {
        self.transition(id, "ban", &[DeviceStatus::Pending, DeviceStatus::Active], |r| r.status = DeviceStatus::Banned)
    }

    /// Banned to active, clearing the failure counter.
    pub fn rehabilitate(&mut self, id: i64) -> Result<&DeviceRecord, RegistryError> {
        self.transition(id, "rehabilitate", &[DeviceStatus::Banned], |r| {
            r.status = DeviceStatus::Active;
            r.fail_count = 0;
        })
    }

    pub fn record_sign(&mut self, id: i64) -> Result<u64, RegistryError> {
        let r = self.active_mut(id)?;
        r.sign_count += 1;
        r.note("sign");
        let count = r.sign_count;
        self.persist(id, false)?;
        Ok(count)
    }

    pub fn record_get_key(&mut self, id: i64) -> Result<(), RegistryError> {
        self.active_mut(id)?.note("get-key");
        self.persist(id, false)
    }

    /// Counts a presented ticket; an invalid one is a failure.
    pub fn record_verify(&mut self, id: i64, valid: bool, threshold: u32) -> Result<FailOutcome, RegistryError> {
        let r = self.active_mut(id)?;
        r.verify_count += 1;
        let outcome = if valid {
            r.note("verify: valid");
            FailOutcome { fail_count: r.fail_count, banned_now: false }
        } else {
            r.note("verify: invalid");
            Self::fail(r, threshold)
        };
        self.persist(id, false)?;
        Ok(outcome)
    }

    /// Counts a protocol abort (cheating verifier, broken frame, desynchronized proof).
    pub fn record_abort(&mut self, id: i64, reason: &str, threshold: u32) -> Result<FailOutcome, RegistryError> {
        let r = self.active_mut(id)?;
        r.note(format!("abort: {reason}"));
        let outcome = Self::fail(r, threshold);
        self.persist(id, false)?;
        Ok(outcome)
    }

    fn fail(r: &mut DeviceRecord, threshold: u32) -> FailOutcome {
        r.fail_count += 1;
        let banned_now = r.fail_count >= u64::from(threshold);
        if banned_now {
            r.status = DeviceStatus::Banned;
            r.note("banned: failure threshold reached");
        }
        FailOutcome { fail_count: r.fail_count, banned_now }
    }

    fn active_mut(&mut self, id: i64) -> Result<&mut DeviceRecord, RegistryError> {
        let r = self.devices.get_mut(&id).ok_or(RegistryError::NotFound(id))?;
        if r.status != DeviceStatus::Active {
            return Err(RegistryError::IllegalTransition { id, from: r.status, action: "serve" });
        }
        Ok(r)
    }

    fn transition(
        &mut self,
        id: i64,
        action: &'static str,
        allowed_from: &[DeviceStatus],
        apply: impl FnOnce(&mut DeviceRecord),
    ) -> Result<&DeviceRecord, RegistryError> {
        let r = self.devices.get_mut(&id).ok_or(RegistryError::NotFound(id))?;
        if !allowed_from.contains(&r.status) {
            return Err(RegistryError::IllegalTransition { id, from: r.status, action });
        }
        let was_pending = r.status == DeviceStatus::Pending;
        apply(r);
        r.note(action);
        self.persist(id, was_pending)?;
        Ok(&self.devices[&id])
    }

    fn persist(&self, id: i64, index_changed: bool) -> Result<(), RegistryError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let record = &self.devices[&id];
        let json = serde_json::to_vec_pretty(record).map_err(|e| RegistryError::Corrupt(e.to_string()))?;
        write_atomic(&dir.join(device_file_name(id)), &json)?;
        if index_changed {
            self.write_index()?;
        }
        Ok(())
    }

    fn write_index(&self) -> Result<(), RegistryError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut text = String::new();
        for r in self.devices.values().filter(|r| r.status != DeviceStatus::Pending) {
            text.push_str(&r.id.to_string());
            text.push('\n');
        }
        write_atomic(&dir.join(INDEX_FILE), text.as_bytes())?;
        Ok(())
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

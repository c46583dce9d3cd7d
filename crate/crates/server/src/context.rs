use std::sync::{Condvar, Mutex, MutexGuard};
use std::time::Instant;

use mova_channel::DhStaticKeyPair;

use crate::config::ServerConfig;
use crate::error::RegistryError;
use crate::events::{EventKind, EventLog};
use crate::keystore::ServerKeys;
use crate::registry::{DeviceRecord, DeviceStatus, Registry};

pub const EVENT_BACKLOG: usize = 1024;

/// State shared by the device listener, every session and the admin API.
pub struct Context {
    pub config: ServerConfig,
    pub keys: ServerKeys,
    pub dh: DhStaticKeyPair,
    pub events: EventLog,
    /// Port announced in handshake acks.
    pub serving_port: u16,
    registry: Mutex<Registry>,
    registry_changed: Condvar,
}

/// How an approval wait ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approval {
    Approved,
    Denied,
    TimedOut,
}

impl Context {
    pub fn new(
        config: ServerConfig,
        keys: ServerKeys,
        dh: DhStaticKeyPair,
        registry: Registry,
        serving_port: u16,
    ) -> Self {
        Self {
            config,
            keys,
            dh,
            events: EventLog::new(EVENT_BACKLOG),
            serving_port,
            registry: Mutex::new(registry),
            registry_changed: Condvar::new(),
        }
    }

    pub fn registry(&self) -> MutexGuard<'_, Registry> {
        self.registry.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn devices(&self) -> Vec<DeviceRecord> {
        self.registry().snapshot()
    }

    pub fn status(&self, id: i64) -> Option<DeviceStatus> {
        self.registry().status(id)
    }

    /// Applies an admin transition, emits its event and wakes approval waiters.
    pub fn admin_action(&self, id: i64, kind: EventKind) -> Result<DeviceRecord, RegistryError> {
        let mut reg = self.registry();
        let record = match kind {
            EventKind::Approve => reg.approve(id)?,
            EventKind::Ban => reg.ban(id)?,
            EventKind::Rehabilitate => reg.rehabilitate(id)?,
            other => unreachable!("{} is not an admin action", other.as_str()),
        }
        .clone();
        self.events.emit(kind, Some(id), "admin");
        drop(reg);
        self.registry_changed.notify_all();
        Ok(record)
    }

    /// Registers a new device, either directly active or pending approval.
    pub fn register(&self) -> Result<i64, RegistryError> {
        let status = if self.config.auto_approve { DeviceStatus::Active } else { DeviceStatus::Pending };
        let id = self.registry().register(status)?;
        self.events.emit(EventKind::Register, Some(id), status.to_string());
        if self.config.auto_approve {
            self.events.emit(EventKind::Approve, Some(id), "auto");
        }
        Ok(id)
    }

    /// Blocks until an admin approves or bans `id`, or the approval timeout
    /// passes; a timed-out registration is withdrawn.
    pub fn await_approval(&self, id: i64) -> Approval {
        let deadline = Instant::now() + self.config.approval_timeout;
        let mut reg = self.registry();
        loop {
            match reg.status(id) {
                Some(DeviceStatus::Active) => return Approval::Approved,
                Some(DeviceStatus::Banned) | None => return Approval::Denied,
                Some(DeviceStatus::Pending) => {}
            }
            let now = Instant::now();
            if now >= deadline {
                let _ = reg.withdraw(id);
                drop(reg);
                self.events.emit(EventKind::Timeout, Some(id), "approval timed out");
                return Approval::TimedOut;
            }
            reg = self.registry_changed.wait_timeout(reg, deadline - now).unwrap_or_else(|e| e.into_inner()).0;
        }
    }
}

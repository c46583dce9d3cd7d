//! Session event log: a bounded backlog plus a live broadcast feed.

use std::collections::VecDeque;
use std::sync::Mutex;

use serde::Serialize;
use tokio::sync::broadcast;

use crate::registry::unix_now;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Register,
    Approve,
    Connect,
    Sign,
    GetKey,
    VerifyValid,
    VerifyInvalid,
    Ban,
    Rehabilitate,
    Abort,
    Refused,
    Timeout,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Register => "register",
            EventKind::Approve => "approve",
            EventKind::Connect => "connect",
            EventKind::Sign => "sign",
            EventKind::GetKey => "get-key",
            EventKind::VerifyValid => "verify-valid",
            EventKind::VerifyInvalid => "verify-invalid",
            EventKind::Ban => "ban",
            EventKind::Rehabilitate => "rehabilitate",
            EventKind::Abort => "abort",
            EventKind::Refused => "refused",
            EventKind::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub seq: u64,
    pub at: u64,
    pub kind: EventKind,
    pub device_id: Option<i64>,
    pub detail: String,
}

struct Backlog {
    next_seq: u64,
    events: VecDeque<Event>,
}

pub struct EventLog {
    backlog: Mutex<Backlog>,
    capacity: usize,
    tx: broadcast::Sender<Event>,
}

impl EventLog {
    pub fn new(capacity: usize) -> Self {
        let (tx, _) = broadcast::channel(capacity.max(16));
        Self { backlog: Mutex::new(Backlog { next_seq: 1, events: VecDeque::new() }), capacity, tx }
    }

    pub fn emit(&self, kind: EventKind, device_id: Option<i64>, detail: impl Into<String>) -> Event {
        let mut b = self.backlog.lock().unwrap_or_else(|e| e.into_inner());
        let event = Event { seq: b.next_seq, at: unix_now(), kind, device_id, detail: detail.into() };
        b.next_seq += 1;
        log::info!("[{}] {} device={:?} {}", event.seq, kind.as_str(), device_id, event.detail);
        if b.events.len() == self.capacity {
            b.events.pop_front();
        }
        b.events.push_back(event.clone());
        // Sent under the lock so subscribers see events in sequence order.
        let _ = self.tx.send(event.clone());
        event
    }

    pub fn recent(&self) -> Vec<Event> {
        self.backlog.lock().unwrap_or_else(|e| e.into_inner()).events.iter().cloned().collect()
    }

    /// Backlog snapshot and a receiver that continues exactly after it.
    pub fn subscribe(&self) -> (Vec<Event>, broadcast::Receiver<Event>) {
        let b = self.backlog.lock().unwrap_or_else(|e| e.into_inner());
        (b.events.iter().cloned().collect(), self.tx.subscribe())
    }
}

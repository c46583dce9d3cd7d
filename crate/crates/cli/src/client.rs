//! A device's view of the server: one connection per operation.

use std::net::{TcpStream, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::time::Duration;

use mova_channel::{client_handshake, Message, SecureChannel};
use mova_core::proofs::{CoGhiVerifier, GhiVerifier, ProofPoints};
use mova_core::{PublicKey, Signature};
use rand::rngs::OsRng;

use crate::error::{ClientError, Result};
use crate::state::DeviceState;

const CONNECT_TIMEOUT: Duration = Duration::from_secs(10);
/// Covers a registration waiting for an administrator.
const READ_TIMEOUT: Duration = Duration::from_secs(90);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Valid => 0,
            Verdict::Invalid => 1,
        }
    }
}

/// An established, sealed connection.
pub struct Session {
    pub channel: SecureChannel<TcpStream>,
    pub device_id: i64,
}

impl Session {
    pub fn request(&mut self, message: &Message) -> Result<Message> {
        self.channel.send(message)?;
        match self.channel.recv()? {
            Message::Error { reason } => Err(ClientError::Server(reason)),
            reply => Ok(reply),
        }
    }

    /// The server's `keyPub.key` text.
    pub fn get_key_file(&mut self) -> Result<String> {
        match self.request(&Message::GetKey)? {
            Message::PublicKey { key_file } => Ok(key_file),
            other => Err(unexpected("public-key", &other)),
        }
    }

    pub fn get_key(&mut self) -> Result<PublicKey> {
        Ok(PublicKey::from_key_file(&self.get_key_file()?)?)
    }

    pub fn sign(&mut self, message: &str) -> Result<Signature> {
        match self.request(&Message::Sign { message: message.to_owned() })? {
            Message::Signature { bits } => Ok(Signature::new(bits)),
            other => Err(unexpected("signature", &other)),
        }
    }

    /// Presents `(message, sig)` and plays the verifier: confirmation first,
    /// denial when the server aborts the confirmation.
    pub fn verify(&mut self, pk: &PublicKey, message: &str, sig: &Signature) -> Result<Verdict> {
        let params = pk.params();
        if sig.len() != params.l_sig {
            return Err(ClientError::InvalidRequest(format!("signature must have {} bits", params.l_sig)));
        }
        let key_points = ProofPoints::new(pk.key_points()?, pk.y_gen().to_vec()).map_err(protocol)?;
        let sig_points = ProofPoints::new(pk.message_points(message)?, sig.bits().to_vec()).map_err(protocol)?;
        let all = key_points.concat(&sig_points);

        self.channel.send(&Message::Verify { message: message.to_owned(), bits: sig.bits().to_vec() })?;
        let (verifier, challenge) = GhiVerifier::start(pk, &all, params.i_con, &mut OsRng);
        match self.request(&Message::GhiChallenge(challenge))? {
            Message::GhiCommit { c } => {
                let (verifier, reveal) = verifier.receive_commitment(c);
                return match self.request(&Message::GhiReveal(reveal))? {
                    Message::GhiOpen(opening) if verifier.finish(&opening) => Ok(Verdict::Valid),
                    Message::GhiOpen(_) => Err(ClientError::Protocol("confirmation opening did not verify".into())),
                    other => Err(unexpected("confirm-open", &other)),
                };
            }
            Message::Abort { .. } => {}
            other => return Err(unexpected("confirm-commit", &other)),
        }

        let (verifier, challenge) = CoGhiVerifier::start(pk, &key_points, &sig_points, params.i_den, &mut OsRng);
        match self.request(&Message::CoGhiChallenge(challenge))? {
            Message::CoGhiCommit { c } => {
                let (verifier, reveal) = verifier.receive_commitment(c);
                match self.request(&Message::CoGhiReveal(reveal))? {
                    Message::CoGhiOpen(opening) if verifier.finish(&opening) => Ok(Verdict::Invalid),
                    Message::CoGhiOpen(_) => Err(ClientError::Protocol("denial opening did not verify".into())),
                    other => Err(unexpected("deny-open", &other)),
                }
            }
            Message::Abort { reason } => Err(ClientError::Protocol(format!("server aborted the denial: {reason}"))),
            other => Err(unexpected("deny-commit", &other)),
        }
    }
}

fn unexpected(expected: &str, got: &Message) -> ClientError {
    match got {
        Message::Abort { reason } => ClientError::Protocol(format!("server aborted: {reason}")),
        _ => ClientError::Protocol(format!("expected {expected}, got {}", got.name())),
    }
}

fn protocol(e: impl std::fmt::Display) -> ClientError {
    ClientError::Protocol(e.to_string())
}

/// Device state plus where to persist it.
pub struct DeviceClient {
    state: DeviceState,
    state_path: Option<PathBuf>,
}

impl DeviceClient {
    pub fn new(state: DeviceState, state_path: Option<PathBuf>) -> Self {
        Self { state, state_path }
    }

    pub fn open(state_path: &Path, server: Option<&str>, dh_pub: Option<&Path>) -> Result<Self> {
        let state = DeviceState::open(state_path, server, dh_pub)?;
        Ok(Self::new(state, Some(state_path.to_path_buf())))
    }

    pub fn state(&self) -> &DeviceState {
        &self.state
    }

    /// Connects and runs the handshake; a newly assigned ID is persisted.
    pub fn connect(&mut self) -> Result<Session> {
        let addr = self
            .state
            .server_address
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| ClientError::InvalidRequest(format!("cannot resolve {}", self.state.server_address)))?;
        let stream = TcpStream::connect_timeout(&addr, CONNECT_TIMEOUT)?;
        stream.set_nodelay(true).ok();
        stream.set_read_timeout(Some(READ_TIMEOUT))?;
        let dh = self.state.dh_public()?;
        let (channel, device_id) = client_handshake(stream, self.state.id, &dh, &mut OsRng)?;
        if device_id != self.state.id {
            self.state.id = device_id;
            if let Some(path) = &self.state_path {
                self.state.save(path)?;
            }
        }
        Ok(Session { channel, device_id })
    }

    pub fn get_key(&mut self) -> Result<PublicKey> {
        self.connect()?.get_key()
    }

    pub fn sign(&mut self, message: &str) -> Result<Signature> {
        self.connect()?.sign(message)
    }

    /// Fetches the key and verifies in one session.
    pub fn verify(&mut self, message: &str, sig: &Signature) -> Result<Verdict> {
        let mut session = self.connect()?;
        let pk = session.get_key()?;
        session.verify(&pk, message, sig)
    }

    pub fn verify_with_key(&mut self, pk: &PublicKey, message: &str, sig: &Signature) -> Result<Verdict> {
        self.connect()?.verify(pk, message, sig)
    }
}

//! Argument structs and entry points shared by the binaries.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use mova_core::bits::pack_bits;
use mova_core::{decode_signature, Alphabet, PublicKey, Ticket};
use sha2::{Digest, Sha256};

use crate::client::{DeviceClient, Verdict};
use crate::error::{ClientError, Result};
use crate::stations::Stations;
use crate::ticket::{TicketRequest, TravelClass};

/// Exit status for any transport, protocol or usage failure.
pub const EXIT_FAILURE: u8 = 2;

#[derive(Debug, Clone, Args)]
pub struct DeviceArgs {
    /// Server address as host:port; remembered in the state file.
    #[arg(long)]
    pub server: Option<String>,
    /// Device state file (ID, server address, trust anchor).
    #[arg(long, default_value = "mova-device.json")]
    pub state: PathBuf,
    /// The server's dhKpPub.key; required the first time.
    #[arg(long)]
    pub dh_pub: Option<PathBuf>,
}

impl DeviceArgs {
    pub fn client(&self) -> Result<DeviceClient> {
        DeviceClient::open(&self.state, self.server.as_deref(), self.dh_pub.as_deref())
    }
}

#[derive(Debug, Clone, Args)]
pub struct IssueArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    /// Departure station.
    #[arg(long)]
    pub from: String,
    /// Arrival station.
    #[arg(long)]
    pub to: String,
    /// Travel date, YYYY-MM-DD.
    #[arg(long)]
    pub date: String,
    /// Travel class, 1 or 2.
    #[arg(long, default_value_t = 2)]
    pub class: u8,
    /// Passenger name.
    #[arg(long)]
    pub name: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    /// Ticket message (everything before the signature).
    #[arg(long, requires = "sig", conflicts_with = "ticket")]
    pub message: Option<String>,
    /// The four signature characters.
    #[arg(long, requires = "message")]
    pub sig: Option<String>,
    /// Whole ticket text, `<message> <signature>`.
    #[arg(long, required_unless_present = "message")]
    pub ticket: Option<String>,
}

/// Validates the request against the station list and asks the server to sign it.
pub fn issue(args: &IssueArgs) -> Result<Ticket> {
    let stations = Stations::bundled();
    let station = |name: &str| {
        stations
            .lookup(name)
            .map(str::to_owned)
            .ok_or_else(|| ClientError::InvalidRequest(format!("unknown station {name:?}")))
    };
    let request = TicketRequest::new(
        station(&args.from)?,
        station(&args.to)?,
        TicketRequest::parse_date(&args.date)?,
        TravelClass::from_number(args.class)?,
        args.name.trim(),
    )?;
    issue_request(&mut args.device.client()?, &request)
}

pub fn issue_request(client: &mut DeviceClient, request: &TicketRequest) -> Result<Ticket> {
    let message = request.render();
    let sig = client.sign(&message)?;
    Ok(Ticket::from_signature(message, &sig, &Alphabet::default())?)
}

/// Decodes the signature locally, then runs the proofs with the server.
pub fn verify(args: &VerifyArgs) -> Result<Verdict> {
    let alphabet = Alphabet::default();
    let ticket = match (&args.ticket, &args.message, &args.sig) {
        (Some(text), _, _) => Ticket::parse(text, &alphabet)?,
        (None, Some(message), Some(sig)) => Ticket::new(message.as_str(), sig.as_str(), &alphabet)?,
        _ => return Err(ClientError::InvalidRequest("pass --ticket, or --message with --sig".into())),
    };
    let sig = decode_signature(ticket.signature_text(), &alphabet)?;
    args.device.client()?.verify(ticket.message(), &sig)
}

/// Fields printed by `mova-key` for comparison with the server's key file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySummary {
    pub modulus_bits: u64,
    pub seed_hex: String,
    pub ygen_sha256: String,
    pub key_file_sha256: String,
}

impl KeySummary {
    pub fn from_key_file(text: &str) -> Result<Self> {
        let pk = PublicKey::from_key_file(text)?;
        Ok(Self {
            modulus_bits: pk.n().bits(),
            seed_hex: hex::encode(pk.seed()),
            ygen_sha256: hex::encode(Sha256::digest(pack_bits(pk.y_gen()))),
            key_file_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        })
    }

    pub fn render(&self) -> String {
        format!(
            "modulus_bits: {}\nseed: {}\nygen_sha256: {}\nkey_file_sha256: {}\n",
            self.modulus_bits, self.seed_hex, self.ygen_sha256, self.key_file_sha256
        )
    }
}

pub fn key(args: &DeviceArgs) -> Result<KeySummary> {
    let text = args.client()?.connect()?.get_key_file()?;
    KeySummary::from_key_file(&text)
}

/// Prints the error to stderr and returns the failure status.
pub fn fail(program: &str, e: &ClientError) -> ExitCode {
    eprintln!("{program}: {e}");
    ExitCode::from(EXIT_FAILURE)
}

pub fn verdict_exit(v: Verdict) -> ExitCode {
    ExitCode::from(v.exit_code())
}

//! One device connection: handshake gate, then a command loop.

use std::io::ErrorKind;
use std::net::TcpStream;
use std::time::Duration;

use mova_channel::{
    read_hello, server_session, write_ack, write_refusal, ChannelError, Message, SecureChannel, UNREGISTERED_ID,
};
use mova_core::proofs::{
    coghi_prover_answer, coghi_prover_open, ghi_prover_answer, ghi_prover_open, ProofAbort, ProofPoints,
};
use rand::rngs::OsRng;

use crate::context::{Approval, Context};
use crate::error::SessionError;
use crate::events::EventKind;
use crate::registry::DeviceStatus;

const HELLO_TIMEOUT: Duration = Duration::from_secs(10);

type Channel = SecureChannel<TcpStream>;

pub(crate) fn handle_connection(ctx: &Context, stream: TcpStream) {
    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_else(|_| "?".into());
    if let Err(e) = run(ctx, stream) {
        log::debug!("session with {peer} ended: {e}");
    }
}

fn run(ctx: &Context, mut stream: TcpStream) -> Result<(), SessionError> {
    stream.set_nodelay(true).ok();
    stream.set_read_timeout(Some(HELLO_TIMEOUT))?;
    let hello = read_hello(&mut stream)?;
    let Some(id) = admit(ctx, hello) else {
        write_refusal(&mut stream)?;
        return Ok(());
    };
    write_ack(&mut stream, ctx.serving_port)?;
    stream.set_read_timeout(Some(ctx.config.idle_timeout))?;
    let mut channel = server_session(stream, &ctx.dh, id)?;
    ctx.events.emit(EventKind::Connect, Some(id), "");

    loop {
        let message = match channel.recv() {
            Ok(m) => m,
            Err(ChannelError::Io(e)) if e.kind() == ErrorKind::UnexpectedEof => return Ok(()),
            Err(e @ ChannelError::Io(_)) => return Err(e.into()),
            Err(e) => {
                count_abort(ctx, id, &e.to_string());
                return Err(e.into());
            }
        };
        if ctx.status(id) != Some(DeviceStatus::Active) {
            channel.send(&Message::Error { reason: "device is not active".into() })?;
            return Ok(());
        }
        match message {
            Message::GetKey => {
                channel.send(&Message::PublicKey { key_file: ctx.keys.public_file.clone() })?;
                if ctx.registry().record_get_key(id).is_ok() {
                    ctx.events.emit(EventKind::GetKey, Some(id), "");
                }
            }
            Message::Sign { message } => handle_sign(ctx, &mut channel, id, &message)?,
            Message::Verify { message, bits } => {
                if let Err(e) = handle_verify(ctx, &mut channel, id, &message, &bits) {
                    count_abort(ctx, id, &e.to_string());
                    return Err(e);
                }
            }
            other => {
                let reason = format!("unexpected {} command", other.name());
                channel.send(&Message::Error { reason: reason.clone() })?;
                return Err(SessionError::Violation(reason));
            }
        }
    }
}

/// Decides whether the hello may proceed; `None` means refuse.
fn admit(ctx: &Context, hello: i64) -> Option<i64> {
    if hello == UNREGISTERED_ID {
        let id = match ctx.register() {
            Ok(id) => id,
            Err(e) => {
                log::error!("registration failed: {e}");
                return None;
            }
        };
        return match ctx.await_approval(id) {
            Approval::Approved => Some(id),
            Approval::Denied => {
                ctx.events.emit(EventKind::Refused, Some(id), "registration denied");
                None
            }
            Approval::TimedOut => None,
        };
    }
    match ctx.status(hello) {
        Some(DeviceStatus::Active) => Some(hello),
        status => {
            let why = match status {
                Some(s) => s.to_string(),
                None => "unknown".to_string(),
            };
            ctx.events.emit(EventKind::Refused, (hello >= 0).then_some(hello), why);
            None
        }
    }
}

fn count_abort(ctx: &Context, id: i64, reason: &str) {
    let outcome = ctx.registry().record_abort(id, reason, ctx.config.ban_threshold);
    ctx.events.emit(EventKind::Abort, Some(id), reason);
    if let Ok(o) = outcome {
        if o.banned_now {
            ctx.events.emit(EventKind::Ban, Some(id), format!("{} failures", o.fail_count));
        }
    }
}

fn handle_sign(ctx: &Context, channel: &mut Channel, id: i64, message: &str) -> Result<(), SessionError> {
    match mova_core::sign(message, &ctx.keys.private, &ctx.keys.public) {
        Ok(sig) => {
            channel.send(&Message::Signature { bits: sig.bits().to_vec() })?;
            if let Ok(count) = ctx.registry().record_sign(id) {
                ctx.events.emit(EventKind::Sign, Some(id), format!("#{count}"));
            }
        }
        Err(e) => channel.send(&Message::Error { reason: e.to_string() })?,
    }
    Ok(())
}

/// Checks the claimed signature against the private key, counts the result,
/// then proves it: confirmation first, denial after a confirmation abort.
fn handle_verify(
    ctx: &Context,
    channel: &mut Channel,
    id: i64,
    message: &str,
    bits: &[bool],
) -> Result<(), SessionError> {
    let (public, private) = (&ctx.keys.public, &ctx.keys.private);
    let expected_len = public.params().l_sig;
    if bits.len() != expected_len {
        channel.send(&Message::Error { reason: format!("signature must have {expected_len} bits") })?;
        return Ok(());
    }
    let x = match public.message_points(message) {
        Ok(x) => x,
        Err(e) => {
            channel.send(&Message::Error { reason: e.to_string() })?;
            return Ok(());
        }
    };
    let valid = private.image_bits(&x).map_err(|e| SessionError::Violation(e.to_string()))? == bits;
    let sig_points = ProofPoints::new(x, bits.to_vec()).expect("lengths checked");

    let outcome = ctx.registry().record_verify(id, valid, ctx.config.ban_threshold)?;
    let kind = if valid { EventKind::VerifyValid } else { EventKind::VerifyInvalid };
    ctx.events.emit(kind, Some(id), format!("fail_count={}", outcome.fail_count));
    if outcome.banned_now {
        ctx.events.emit(EventKind::Ban, Some(id), format!("{} failures", outcome.fail_count));
    }

    let key_points = &ctx.keys.key_points;
    let all = key_points.concat(&sig_points);
    let challenge = expect(channel, "confirm-challenge", |m| match m {
        Message::GhiChallenge(c) => Ok(c),
        m => Err(m),
    })?;
    match ghi_prover_answer(private, public, &all, &challenge, &mut OsRng) {
        Ok((state, c)) => {
            channel.send(&Message::GhiCommit { c })?;
            let reveal = expect(channel, "confirm-reveal", |m| match m {
                Message::GhiReveal(r) => Ok(r),
                m => Err(m),
            })?;
            let opening = ghi_prover_open(state, &reveal).map_err(|e| abort(channel, e))?;
            channel.send(&Message::GhiOpen(opening))?;
            return Ok(());
        }
        Err(ProofAbort::PointsDoNotInterpolate) => {
            channel.send(&Message::Abort { reason: ProofAbort::PointsDoNotInterpolate.to_string() })?;
        }
        Err(e) => return Err(abort(channel, e)),
    }

    let challenge = expect(channel, "deny-challenge", |m| match m {
        Message::CoGhiChallenge(c) => Ok(c),
        m => Err(m),
    })?;
    let (state, c) = coghi_prover_answer(private, public, key_points, &sig_points, &challenge, &mut OsRng)
        .map_err(|e| abort(channel, e))?;
    channel.send(&Message::CoGhiCommit { c })?;
    let reveal = expect(channel, "deny-reveal", |m| match m {
        Message::CoGhiReveal(r) => Ok(r),
        m => Err(m),
    })?;
    let opening = coghi_prover_open(state, &reveal).map_err(|e| abort(channel, e))?;
    channel.send(&Message::CoGhiOpen(opening))?;
    Ok(())
}

/// Tells the verifier the proof stops here and turns the reason into a session error.
fn abort(channel: &mut Channel, reason: ProofAbort) -> SessionError {
    let _ = channel.send(&Message::Abort { reason: reason.to_string() });
    SessionError::Violation(reason.to_string())
}

fn expect<T>(
    channel: &mut Channel,
    what: &'static str,
    pick: impl FnOnce(Message) -> Result<T, Message>,
) -> Result<T, SessionError> {
    match pick(channel.recv()?) {
        Ok(v) => Ok(v),
        Err(other) => {
            let reason = format!("expected {what}, got {}", other.name());
            let _ = channel.send(&Message::Abort { reason: reason.clone() });
            Err(SessionError::Violation(reason))
        }
    }
}

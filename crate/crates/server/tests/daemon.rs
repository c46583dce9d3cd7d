use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::sync::{Arc, Barrier};
use std::thread;
use std::time::{Duration, Instant};

use mova_channel::{read_ack, write_hello, ChannelError, Message, UNREGISTERED_ID};
use mova_cli::{AdminClient, ClientError, DeviceClient, DeviceState, Verdict};
use mova_core::proofs::{GhiVerifier, ProofPoints};
use mova_core::{sign, DomainParams};
use mova_server::{DeviceStatus, EventKind, ServerConfig, ServerHandle};
use rand::rngs::OsRng;

fn config(dir: &Path) -> ServerConfig {
    ServerConfig {
        params: DomainParams { modulus_bits: 256, ..DomainParams::default() },
        ..ServerConfig::for_tests(dir)
    }
}

fn device(server: &ServerHandle) -> DeviceClient {
    DeviceClient::new(DeviceState::new(server.device_addr().to_string(), &server.dh_public()), None)
}

fn registered(server: &ServerHandle) -> DeviceClient {
    let mut d = device(server);
    d.connect().unwrap();
    d
}

const MSG: &str = "MOVA|Lausanne|Geneve|2010-06-01|2|Alice Martin";

#[test]
fn keys_persist_across_restarts() {
    let dir = tempfile::tempdir().unwrap();
    let first = mova_server::start(config(dir.path())).unwrap();
    let pk = first.public_key().clone();
    let dh = first.dh_public();
    first.shutdown();
    for f in ["keyPub.key", "keyPriv.key", "dhKpPub.key", "dhKpPriv.key", "deviceList.list"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let second = mova_server::start(config(dir.path())).unwrap();
    assert_eq!(second.public_key(), &pk);
    assert_eq!(second.dh_public(), dh);
}

#[test]
fn corrupt_key_file_refuses_to_start() {
    let dir = tempfile::tempdir().unwrap();
    mova_server::start(config(dir.path())).unwrap().shutdown();
    std::fs::write(dir.path().join("dhKpPriv.key"), "p=zz\n").unwrap();
    assert!(mova_server::start(config(dir.path())).is_err());
}

#[test]
fn sign_and_get_key_update_counters() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let mut d = registered(&server);
    let id = d.state().id;
    assert_eq!(id, 1);

    let sig = d.sign(MSG).unwrap();
    assert_eq!(sig.len(), 20);
    let ctx = server.context();
    let oracle = ctx.keys.private.image_bits(&server.public_key().message_points(MSG).unwrap()).unwrap();
    assert_eq!(sig.bits(), oracle.as_slice());
    assert_eq!(sign(MSG, &ctx.keys.private, server.public_key()).unwrap(), sig);

    let key = d.get_key().unwrap();
    assert_eq!(&key, server.public_key());
    let admin = AdminClient::new(server.admin_url());
    let rec = admin.device(id).unwrap();
    assert_eq!((rec.sign_count, rec.verify_count, rec.fail_count), (1, 0, 0));
    d.sign(MSG).unwrap();
    assert_eq!(admin.device(id).unwrap().sign_count, 2);
}

#[test]
fn oversized_message_gets_an_error_reply() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let mut d = registered(&server);
    let err = d.sign(&"x".repeat(157)).unwrap_err();
    assert!(matches!(err, ClientError::Server(_)), "{err}");
    let mut s = d.connect().unwrap();
    assert!(matches!(s.sign(""), Err(ClientError::Server(_))));
    // The session is still usable after an error reply.
    assert!(s.sign(MSG).is_ok());
}

#[test]
fn simultaneous_registrations_get_distinct_ids() {
    let dir = tempfile::tempdir().unwrap();
    let server = Arc::new(mova_server::start(config(dir.path())).unwrap());
    let barrier = Arc::new(Barrier::new(12));
    let handles: Vec<_> = (0..12)
        .map(|_| {
            let server = Arc::clone(&server);
            let barrier = Arc::clone(&barrier);
            thread::spawn(move || {
                let mut d = device(&server);
                barrier.wait();
                d.connect().unwrap().device_id
            })
        })
        .collect();
    let mut ids: Vec<i64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    ids.sort_unstable();
    assert_eq!(ids, (1..=12).collect::<Vec<_>>());
}

#[test]
fn concurrent_verify_sessions_do_not_interfere() {
    let dir = tempfile::tempdir().unwrap();
    let server = Arc::new(mova_server::start(config(dir.path())).unwrap());
    let pk = server.public_key().clone();
    let handles: Vec<_> = (0..20)
        .map(|i| {
            let server = Arc::clone(&server);
            let pk = pk.clone();
            thread::spawn(move || {
                let mut d = registered(&server);
                let msg = format!("MOVA|Bern|Zug|2010-06-{:02}|1|P{i}", i % 28 + 1);
                let sig = d.sign(&msg).unwrap();
                let claimed = if i % 2 == 0 { sig } else { sig.with_flipped(i % 20) };
                let verdict = d.verify_with_key(&pk, &msg, &claimed).unwrap();
                (i, verdict)
            })
        })
        .collect();
    for h in handles {
        let (i, verdict) = h.join().unwrap();
        assert_eq!(verdict, if i % 2 == 0 { Verdict::Valid } else { Verdict::Invalid }, "session {i}");
    }
}

#[test]
fn broken_sessions_do_not_take_down_the_daemon() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let addr = server.device_addr();

    // Truncated hello.
    TcpStream::connect(addr).unwrap().write_all(&[1, 2, 3]).unwrap();
    // Hello, then hang up before the DH value.
    let mut s = TcpStream::connect(addr).unwrap();
    write_hello(&mut s, UNREGISTERED_ID).unwrap();
    read_ack(&mut s).unwrap();
    drop(s);
    // Degenerate DH value.
    let mut s = TcpStream::connect(addr).unwrap();
    write_hello(&mut s, UNREGISTERED_ID).unwrap();
    read_ack(&mut s).unwrap();
    s.write_all(&[0u8; 128]).unwrap();
    let mut rest = Vec::new();
    let _ = s.read_to_end(&mut rest);
    assert!(rest.is_empty());
    // Garbage frame after a good handshake.
    let mut d = registered(&server);
    let mut session = d.connect().unwrap();
    let mut raw = session.channel.get_ref().try_clone().unwrap();
    raw.write_all(&[0, 0, 0, 48]).unwrap();
    raw.write_all(&[7u8; 48]).unwrap();
    assert!(session.channel.recv().is_err());

    let mut fresh = registered(&server);
    assert!(fresh.sign(MSG).is_ok());
    // The corrupted frame counted against the device that sent it only.
    assert_eq!(server.device(d.state().id).unwrap().fail_count, 1);
    assert_eq!(server.device(fresh.state().id).unwrap().fail_count, 0);
}

#[test]
fn cheating_verifier_is_aborted_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let pk = server.public_key().clone();
    let mut d = registered(&server);
    let sig = d.sign(MSG).unwrap();
    let mut s = d.connect().unwrap();

    let key = ProofPoints::new(pk.key_points().unwrap(), pk.y_gen().to_vec()).unwrap();
    let mess = ProofPoints::new(pk.message_points(MSG).unwrap(), sig.bits().to_vec()).unwrap();
    s.channel.send(&Message::Verify { message: MSG.into(), bits: sig.bits().to_vec() }).unwrap();
    let (verifier, challenge) = GhiVerifier::start(&pk, &key.concat(&mess), 20, &mut OsRng);
    s.channel.send(&Message::GhiChallenge(challenge)).unwrap();
    let Message::GhiCommit { c } = s.channel.recv().unwrap() else { panic!("expected commit") };
    let (_, mut reveal) = verifier.receive_commitment(c);
    reveal.a[0][0] = !reveal.a[0][0];
    s.channel.send(&Message::GhiReveal(reveal)).unwrap();
    assert!(matches!(s.channel.recv().unwrap(), Message::Abort { .. }));
    // Session terminated.
    assert!(matches!(s.channel.recv(), Err(ChannelError::Io(_))));

    let rec = server.device(d.state().id).unwrap();
    assert_eq!((rec.verify_count, rec.fail_count), (1, 1));
    assert!(server.events().iter().any(|e| e.kind == EventKind::Abort));
    // The device can still verify honestly afterwards.
    assert_eq!(d.verify(MSG, &sig).unwrap(), Verdict::Valid);
}

#[test]
fn ban_threshold_and_rehabilitation() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(ServerConfig { ban_threshold: 3, ..config(dir.path()) }).unwrap();
    let admin = AdminClient::new(server.admin_url());
    let mut d = registered(&server);
    let id = d.state().id;
    let sig = d.sign(MSG).unwrap();
    let bad = sig.with_flipped(0);
    for _ in 0..3 {
        assert_eq!(d.verify(MSG, &bad).unwrap(), Verdict::Invalid);
    }
    assert_eq!(server.device(id).unwrap().status, DeviceStatus::Banned);
    assert!(matches!(d.connect(), Err(ClientError::Channel(ChannelError::Refused))));

    admin.rehabilitate(id).unwrap();
    let rec = admin.device(id).unwrap();
    assert_eq!((rec.status.as_str(), rec.fail_count), ("active", 0));
    assert_eq!(d.verify(MSG, &sig).unwrap(), Verdict::Valid);

    admin.ban(id).unwrap();
    assert!(matches!(d.connect(), Err(ClientError::Channel(ChannelError::Refused))));
    let kinds: Vec<EventKind> = server.events().iter().map(|e| e.kind).collect();
    let pos = |k| kinds.iter().position(|&x| x == k).unwrap();
    assert!(pos(EventKind::Ban) < pos(EventKind::Rehabilitate));
    assert!(kinds.contains(&EventKind::Refused));
}

#[test]
fn admin_api_errors() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let admin = AdminClient::new(server.admin_url());
    assert_eq!(admin.health().unwrap()["status"], "ok");
    let err = admin.approve(42).unwrap_err().to_string();
    assert!(err.contains("404"), "{err}");
    let d = registered(&server);
    let err = admin.approve(d.state().id).unwrap_err().to_string();
    assert!(err.contains("409"), "{err}");
    let err = admin.rehabilitate(d.state().id).unwrap_err().to_string();
    assert!(err.contains("409"), "{err}");
    assert_eq!(admin.devices().unwrap().len(), 1);
}

#[test]
fn pending_registration_waits_for_the_administrator() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(ServerConfig { auto_approve: false, ..config(dir.path()) }).unwrap();
    let admin = AdminClient::new(server.admin_url());
    let mut d = device(&server);
    let start = Instant::now();
    let waiter = thread::spawn(move || d.connect().map(|s| s.device_id));

    let id = loop {
        if let Some(r) = admin.devices().unwrap().into_iter().find(|r| r.status == "pending") {
            break r.id;
        }
        assert!(start.elapsed() < Duration::from_secs(1), "pending device not visible within 1 s");
        thread::sleep(Duration::from_millis(20));
    };
    admin.approve(id).unwrap();
    assert_eq!(waiter.join().unwrap().unwrap(), id);
    assert_eq!(server.device(id).unwrap().status, DeviceStatus::Active);

    // A registration the administrator bans is refused.
    let mut other = device(&server);
    let waiter = thread::spawn(move || other.connect().map(|s| s.device_id));
    let id = loop {
        if let Some(r) = admin.devices().unwrap().into_iter().find(|r| r.status == "pending") {
            break r.id;
        }
        thread::sleep(Duration::from_millis(20));
    };
    admin.ban(id).unwrap();
    assert!(matches!(waiter.join().unwrap(), Err(ClientError::Channel(ChannelError::Refused))));
}

#[test]
fn approval_timeout_refuses_and_withdraws() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(ServerConfig {
        auto_approve: false,
        approval_timeout: Duration::from_millis(300),
        ..config(dir.path())
    })
    .unwrap();
    let mut d = device(&server);
    assert!(matches!(d.connect(), Err(ClientError::Channel(ChannelError::Refused))));
    assert!(server.devices().is_empty());
    assert!(server.events().iter().any(|e| e.kind == EventKind::Timeout));
}

#[test]
fn unknown_and_negative_ids_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    for id in [7, -5] {
        let mut s = TcpStream::connect(server.device_addr()).unwrap();
        write_hello(&mut s, id).unwrap();
        assert!(matches!(read_ack(&mut s), Err(ChannelError::Refused)));
    }
}

#[test]
fn registry_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let mut a = registered(&server);
    let mut b = registered(&server);
    let sig = a.sign(MSG).unwrap();
    a.verify(MSG, &sig.with_flipped(3)).unwrap();
    b.sign(MSG).unwrap();
    AdminClient::new(server.admin_url()).ban(b.state().id).unwrap();
    let before = server.devices();
    let dh = server.dh_public();
    drop(server);

    let server = mova_server::start(config(dir.path())).unwrap();
    assert_eq!(server.devices(), before);
    assert_eq!(server.dh_public(), dh);
    let state = DeviceState { server_address: server.device_addr().to_string(), ..a.state().clone() };
    let mut a = DeviceClient::new(state, None);
    assert_eq!(a.verify(MSG, &sig).unwrap(), Verdict::Valid);
    let c = registered(&server);
    assert_eq!(c.state().id, 3);
}

#[test]
fn event_stream_replays_and_follows() {
    let dir = tempfile::tempdir().unwrap();
    let server = mova_server::start(config(dir.path())).unwrap();
    let mut d = registered(&server);

    let mut http = TcpStream::connect(server.admin_addr()).unwrap();
    http.set_read_timeout(Some(Duration::from_secs(5))).unwrap();
    write!(http, "GET /events HTTP/1.1\r\nHost: localhost\r\nAccept: text/event-stream\r\n\r\n").unwrap();
    let mut seen = Vec::new();
    let mut signed = false;
    for line in BufReader::new(http).lines() {
        let line = line.unwrap();
        if let Some(kind) = line.strip_prefix("event: ") {
            seen.push(kind.to_string());
            if kind == "connect" && !signed {
                signed = true;
                d.sign(MSG).unwrap();
            }
            if kind == "sign" {
                break;
            }
        }
    }
    assert_eq!(&seen[..2], ["register", "approve"]);
    assert_eq!(seen.last().map(String::as_str), Some("sign"));
}

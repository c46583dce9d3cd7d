use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use mova_channel::{DhServerPublic, DhStaticKeyPair};
use mova_core::PublicKey;
use rand::rngs::OsRng;
use tokio::sync::oneshot;

use crate::admin;
use crate::config::ServerConfig;
use crate::context::Context;
use crate::error::ServerError;
use crate::events::Event;
use crate::keystore::ServerKeys;
use crate::registry::{DeviceRecord, Registry};
use crate::session::handle_connection;

/// A running server: device listener plus admin API.
pub struct ServerHandle {
    ctx: Arc<Context>,
    device_addr: SocketAddr,
    admin_addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
    admin_stop: Option<oneshot::Sender<()>>,
    admin_thread: Option<JoinHandle<()>>,
}

/// Loads or creates keys and registry in `config.data_dir`, binds both
/// listeners and starts serving in background threads.
pub fn start(config: ServerConfig) -> Result<ServerHandle, ServerError> {
    config.validate()?;
    let dir: &Path = &config.data_dir;
    std::fs::create_dir_all(dir)?;
    let keys = ServerKeys::load_or_create(dir, &config.params, &mut OsRng)?;
    let dh = DhStaticKeyPair::load_or_create(dir, &mut OsRng)?;
    let registry = Registry::open(dir)?;

    let device_listener = bind(SocketAddr::new(config.host, config.port))?;
    let device_addr = device_listener.local_addr()?;
    let admin_listener = bind(SocketAddr::from(([127, 0, 0, 1], config.admin_port)))?;
    let admin_addr = admin_listener.local_addr()?;

    let ctx = Arc::new(Context::new(config, keys, dh, registry, device_addr.port()));
    let stop = Arc::new(AtomicBool::new(false));

    let accept_thread = {
        let ctx = Arc::clone(&ctx);
        let stop = Arc::clone(&stop);
        thread::Builder::new().name("mova-accept".into()).spawn(move || accept_loop(ctx, device_listener, stop))?
    };

    admin_listener.set_nonblocking(true)?;
    let runtime = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build()?;
    let (admin_stop, stopped) = oneshot::channel::<()>();
    let router = admin::router(Arc::clone(&ctx));
    let admin_thread = thread::Builder::new().name("mova-admin".into()).spawn(move || {
        runtime.block_on(async move {
            let listener = match tokio::net::TcpListener::from_std(admin_listener) {
                Ok(l) => l,
                Err(e) => {
                    log::error!("admin listener: {e}");
                    return;
                }
            };
            tokio::select! {
                r = axum::serve(listener, router) => if let Err(e) = r { log::error!("admin API: {e}") },
                _ = stopped => {}
            }
        });
        runtime.shutdown_background();
    })?;

    log::info!("devices on {device_addr}, admin API on http://{admin_addr}");
    Ok(ServerHandle {
        ctx,
        device_addr,
        admin_addr,
        stop,
        accept_thread: Some(accept_thread),
        admin_stop: Some(admin_stop),
        admin_thread: Some(admin_thread),
    })
}

fn bind(addr: SocketAddr) -> Result<TcpListener, ServerError> {
    TcpListener::bind(addr).map_err(|source| ServerError::Bind { addr: addr.to_string(), source })
}

fn accept_loop(ctx: Arc<Context>, listener: TcpListener, stop: Arc<AtomicBool>) {
    for stream in listener.incoming() {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        match stream {
            Ok(stream) => {
                let ctx = Arc::clone(&ctx);
                let spawned =
                    thread::Builder::new().name("mova-session".into()).spawn(move || handle_connection(&ctx, stream));
                if let Err(e) = spawned {
                    log::error!("cannot spawn session thread: {e}");
                }
            }
            Err(e) => log::warn!("accept failed: {e}"),
        }
    }
}

impl ServerHandle {
    pub fn device_addr(&self) -> SocketAddr {
        self.device_addr
    }

    pub fn admin_addr(&self) -> SocketAddr {
        self.admin_addr
    }

    /// Base URL of the admin API, e.g. `http://127.0.0.1:5001`.
    pub fn admin_url(&self) -> String {
        format!("http://{}", self.admin_addr)
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.ctx.keys.public
    }

    pub fn public_key_file(&self) -> &str {
        &self.ctx.keys.public_file
    }

    pub fn dh_public(&self) -> DhServerPublic {
        self.ctx.dh.public_key()
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn devices(&self) -> Vec<DeviceRecord> {
        self.ctx.devices()
    }

    pub fn device(&self, id: i64) -> Option<DeviceRecord> {
        self.ctx.registry().get(id).cloned()
    }

    pub fn events(&self) -> Vec<Event> {
        self.ctx.events.recent()
    }

    /// Blocks for as long as the device listener runs.
    pub fn wait(mut self) {
        if let Some(t) = self.accept_thread.take() {
            let _ = t.join();
        }
    }

    /// Stops accepting connections and stops the admin API. Sessions already
    /// running finish on their own.
    pub fn shutdown(mut self) {
        self.stop_threads();
    }

    fn stop_threads(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(t) = self.accept_thread.take() {
            // Wake the blocking accept so it sees the flag.
            let mut wake = self.device_addr;
            if wake.ip().is_unspecified() {
                wake.set_ip([127, 0, 0, 1].into());
            }
            let _ = TcpStream::connect(wake);
            let _ = t.join();
        }
        if let Some(tx) = self.admin_stop.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.admin_thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_threads();
    }
}

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use tracing_subscriber::EnvFilter;

use dialogue_core::brain::SystemClock;
use dialogue_core::{Brain, EngineConfig};

#[derive(Parser, Debug)]
#[command(name = "dialogue-server", version, about = "Serve the dialogue engine over HTTP")]
struct Args {
    /// TOML config; without one the defaults apply relative to the working directory.
    #[arg(long)]
    config: Option<PathBuf>,
    /// 0 picks a free port.
    #[arg(long, env = "DLG_PORT", default_value_t = 8080)]
    port: u16,
    /// Overrides the config's storage_path.
    #[arg(long, env = "DLG_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match run(Args::parse()).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dialogue-server: {e}");
            ExitCode::FAILURE
        }
    }
}

async fn run(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let mut config = match &args.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    if let Some(dir) = args.data_dir {
        config.storage_path = dir;
    }
    let brain = Brain::open_with(&config, &config.storage_path, Arc::new(SystemClock))?;
    tracing::info!(
        categories = brain.graph().len(),
        corpus = %config.corpus_dir.display(),
        data = %config.storage_path.display(),
        "engine loaded"
    );

    let listener = tokio::net::TcpListener::bind(SocketAddr::new(args.host, args.port)).await?;
    let addr = listener.local_addr()?;
    // Test harnesses read this line to find the port.
    println!("listening on {addr}");
    std::io::stdout().flush()?;

    axum::serve(listener, dialogue_server::router(Arc::new(brain)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

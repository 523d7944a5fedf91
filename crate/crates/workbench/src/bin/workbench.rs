use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use postedit_workbench::config::Config;
use postedit_workbench::providers::{provider_router, Registry};
use postedit_workbench::{build_service, http};
use tracing_subscriber::EnvFilter;

/// Post-editing workbench server.
#[derive(Debug, Parser)]
#[command(name = "workbench")]
struct Args {
    /// TOML config; `POSTEDIT_*` variables override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Serve the built-in stub providers (/translate, /qe, /score, /align,
    /// /segment) instead of the editing API.
    #[arg(long)]
    stub_providers: bool,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info"))).init();
    let args = Args::parse();
    let cfg = match Config::resolve(args.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("workbench: {e}");
            return ExitCode::from(2);
        }
    };
    let app = if args.stub_providers {
        match Registry::from_config(&Config { providers: Default::default(), ..cfg.clone() }) {
            Ok(reg) => provider_router(reg),
            Err(e) => {
                eprintln!("workbench: {e}");
                return ExitCode::FAILURE;
            }
        }
    } else {
        match build_service(&cfg) {
            Ok(svc) => {
                tracing::info!(providers = ?svc.registry().names, "service ready");
                http::router(svc)
            }
            Err(e) => {
                eprintln!("workbench: {e}");
                return ExitCode::FAILURE;
            }
        }
    };
    let listener = match tokio::net::TcpListener::bind(&cfg.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("workbench: cannot bind {}: {e}", cfg.bind);
            return ExitCode::FAILURE;
        }
    };
    tracing::info!("listening on {}", cfg.bind);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
        eprintln!("workbench: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

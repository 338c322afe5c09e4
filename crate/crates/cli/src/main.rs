//! `greentrip`: validate catalogs, rank destinations, explain scores and run the API server.
//!
//! Exit codes: 0 success, 1 operational failure, 2 usage error.

mod render;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use greentrip_core::booking::BookingStore;
use greentrip_core::dataset::ColumnMapping;
use greentrip_core::report::Engine;
use greentrip_core::scoring::SustainabilityAttribute;
use greentrip_core::{load_catalog, EngineConfig, InterestCategory, UserQuery};
use greentrip_service::{AppState, EventLogger};

#[derive(Debug, Parser)]
#[command(name = "greentrip", version, about = "Sustainability-aware city trip recommendations")]
struct Cli {
    /// Engine configuration (TOML). Built-in defaults when absent.
    #[arg(long, global = true, env = "GREENTRIP_CONFIG")]
    config: Option<PathBuf>,
    /// City catalog CSV; overrides the configured path.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Column mapping TOML; overrides the configured path.
    #[arg(long, global = true)]
    mapping: Option<PathBuf>,
    /// Print the transport constants in effect and exit.
    #[arg(long)]
    show_constants: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, clap::Args)]
struct QueryArgs {
    /// Departure city id.
    #[arg(long = "from")]
    from: String,
    /// Travel month, 1-12.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    month: u32,
    /// Comma-separated interest categories.
    #[arg(long, value_delimiter = ',')]
    interests: Vec<String>,
    /// Comma-separated priorities: air_quality, climate_vulnerability, walkability.
    #[arg(long, value_delimiter = ',')]
    personalize: Vec<String>,
}

impl QueryArgs {
    fn query(&self) -> Result<UserQuery> {
        let interests = self
            .interests
            .iter()
            .map(|s| InterestCategory::new(s.trim()).map_err(anyhow::Error::msg))
            .collect::<Result<BTreeSet<_>>>()?;
        let personalization = self
            .personalize
            .iter()
            .map(|s| s.trim().parse::<SustainabilityAttribute>().map_err(anyhow::Error::msg))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(UserQuery { departure_id: self.from.clone(), month: self.month, interests, personalization })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a catalog with a mapping and report accepted, rejected and defaulted rows.
    Validate { csv: PathBuf, mapping: PathBuf },
    /// Rank every destination for a departure city and month.
    Rank {
        #[command(flatten)]
        query: QueryArgs,
        /// Show only the first N results.
        #[arg(long)]
        top: Option<usize>,
        /// City the nudge banner reacts to; rank 1 by default.
        #[arg(long)]
        focus: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Break one destination's score into weighted components.
    Explain {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        city: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the HTTP API until SIGTERM or Ctrl-C.
    Serve {
        #[arg(long, env = "GREENTRIP_PORT")]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("GREENTRIP_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<EngineConfig> {
    let mut config = match &cli.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    config.apply_env_overrides()?;
    if let Some(path) = &cli.catalog {
        config.server.catalog_path = path.clone();
    }
    if let Some(path) = &cli.mapping {
        config.server.mapping_path = path.clone();
    }
    config.validate()?;
    Ok(config)
}

fn load_engine(config: EngineConfig) -> Result<Engine> {
    let mapping = ColumnMapping::load(&config.server.mapping_path)?;
    let catalog = load_catalog(&config.server.catalog_path, &mapping)
        .with_context(|| format!("loading {}", config.server.catalog_path.display()))?;
    for w in catalog.warnings() {
        tracing::warn!("row {}: {}", w.row, w.reason);
    }
    for r in catalog.rejected() {
        tracing::warn!("row {} rejected: {}", r.row, r.reason);
    }
    Ok(Engine::new(catalog, config))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = load_config(&cli)?;
    if cli.show_constants {
        let mut out = std::io::stdout().lock();
        for (key, value) in config.transport.to_key_values() {
            writeln!(out, "{key} = {value}")?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return Ok(ExitCode::from(2));
    };
    let mut out = std::io::stdout().lock();
    match command {
        Command::Validate { csv, mapping } => {
            let mapping = ColumnMapping::load(&mapping)?;
            let catalog = load_catalog(&csv, &mapping)?;
            out.write_all(render::validation(&catalog).as_bytes())?;
        }
        Command::Rank { query, top, focus, format } => {
            let query = query.query()?;
            let engine = load_engine(config)?;
            let response = engine.recommend(&query, focus.as_deref(), top)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&response)?)?,
                Format::Table => out.write_all(render::ranking(&response).as_bytes())?,
            }
        }
        Command::Explain { query, city, format } => {
            let query = query.query()?;
            let engine = load_engine(config)?;
            let explanation = engine.explain(&query, &city)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&explanation)?)?,
                Format::Table => out.write_all(render::explanation(&explanation).as_bytes())?,
            }
        }
        Command::Serve { port, host } => {
            drop(out);
            let mut config = config;
            if let Some(port) = port {
                config.server.port = port;
            }
            serve(config, &host)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn serve(config: EngineConfig, host: &str) -> Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let bookings = BookingStore::open(&config.server.booking_store)?;
        let events = EventLogger::open(&config.server.event_log, config.server.max_pending_events_per_session)?;
        let state = AppState::new(bookings, events);
        let listener = tokio::net::TcpListener::bind((host, config.server.port))
            .await
            .with_context(|| format!("binding {host}:{}", config.server.port))?;
        println!("listening on http://{}", listener.local_addr()?);
        std::io::stdout().flush()?;

        let (fail_tx, mut fail_rx) = tokio::sync::mpsc::channel::<anyhow::Error>(1);
        let loader_state = state.clone();
        tokio::task::spawn_blocking(move || match load_engine(config) {
            Ok(engine) => {
                tracing::info!(cities = engine.catalog().len(), "catalog loaded");
                loader_state.install_engine(engine);
            }
            Err(e) => {
                let _ = fail_tx.blocking_send(e);
            }
        });

        let (load_err_tx, load_err_rx) = tokio::sync::oneshot::channel();
        let shutdown = async move {
            let mut term = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate())
                .expect("install SIGTERM handler");
            tokio::select! {
                _ = tokio::signal::ctrl_c() => tracing::info!("interrupt received, shutting down"),
                _ = term.recv() => tracing::info!("SIGTERM received, shutting down"),
                Some(e) = fail_rx.recv() => {
                    let _ = load_err_tx.send(e);
                }
            }
        };
        greentrip_service::serve(listener, state, shutdown).await?;
        if let Ok(e) = load_err_rx.await {
            bail!(e.context("catalog failed to load"));
        }
        tracing::info!("event log flushed, bye");
        Ok(())
    })
}

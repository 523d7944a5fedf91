//! Std side of the post-editing workbench: the REST service with its
//! provider clients and stubs, the document interchange and provider wire
//! formats, the event-log store, configuration, and the evaluation harness
//! front end. Algorithms live in `postedit-core`.

pub mod config;
pub mod evalharness;
pub mod fixtures;
pub mod http;
pub mod providers;
pub mod service;
pub mod store;
pub mod wire;

use std::sync::Arc;

use postedit_core::suggest::SuggestConfig;

/// Builds the service described by `cfg`.
pub fn build_service(cfg: &config::Config) -> Result<Arc<service::Service>, String> {
    let registry = providers::Registry::from_config(cfg)?;
    let store = match &cfg.data_dir {
        Some(dir) => Some(store::Store::open(dir).map_err(|e| format!("{}: {e}", dir.display()))?),
        None => None,
    };
    let mut suggest = SuggestConfig::new(cfg.suggest.m, cfg.suggest.beam).map_err(|e| e.to_string())?;
    suggest.length_normalize = cfg.suggest.normalize;
    let svc = service::Service::new(registry, store, suggest, cfg.seed).map_err(|e| e.to_string())?;
    Ok(Arc::new(svc))
}

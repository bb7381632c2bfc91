use std::net::SocketAddr;
use std::path::PathBuf;

use tasktrace::dataset::ScreeningRule;
use tasktrace::Catalog;

use crate::ServiceError;
use tasktrace::model::{Abstraction, SuggestConfig};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Must exist and be writable; holds the trace and session logs.
    pub data_dir: PathBuf,
    pub abstraction: Abstraction,
    pub alpha: f64,
    pub screening: ScreeningRule,
    pub suggest: SuggestConfig,
    /// Rebuild models after this many approved submissions; 0 disables.
    pub rebuild_every: usize,
    /// Refuse submissions whose session has not acknowledged the tutorial.
    pub require_acknowledgment: bool,
    pub catalog: Catalog,
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), ServiceError> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(ServiceError::Config(format!(
                "alpha must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        self.suggest
            .costs
            .validate()
            .map_err(|e| ServiceError::Config(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.suggest.branch_threshold) {
            return Err(ServiceError::Config(
                "branch threshold must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: data_dir.into(),
            abstraction: Abstraction::Kind,
            alpha: 0.0,
            screening: ScreeningRule::default(),
            suggest: SuggestConfig::default(),
            rebuild_every: 10,
            require_acknowledgment: true,
            catalog: Catalog::default(),
        }
    }
}

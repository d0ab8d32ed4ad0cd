//! One error type for the whole binary, carrying the exit code: 2 for
//! configuration problems, 3 for exhausted search budgets, 1 when a
//! reproduction run deviates from its pinned verdicts.

use hiring_games::blatant::BlatantError;
use hiring_games::construct::ConstructError;
use hiring_games::dist::DistributionError;
use hiring_games::equilibrium::EquilibriumError;
use hiring_games::fairness::scm::ScmError;
use hiring_games::fairness::FairnessError;
use hiring_games::game::GameError;
use hiring_games::market::MarketError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("verdict deviation: {0}")]
    Deviation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Deviation(_) => 1,
        }
    }
}

impl From<MarketError> for CliError {
    fn from(e: MarketError) -> Self {
        match e {
            MarketError::TreeTooLarge { .. } => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::BudgetExceeded { .. }
            | EquilibriumError::EnumerationBudgetExceeded { .. } => {
                CliError::Budget(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Market(MarketError::TreeTooLarge { .. }) => {
                CliError::Budget(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

macro_rules! config_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Config(e.to_string())
            }
        }
    )*};
}

config_error!(FairnessError, ScmError, BlatantError, DistributionError, GameError);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

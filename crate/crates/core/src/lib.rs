//! Valuation and hedging toolkit for constant-product market-maker
//! positions: pool state and swap mechanics, closed-form impermanent
//! loss, static replication of the pool payoff with bonds, futures, and
//! options, Long-Strangle coverage certification, and options-chain
//! ingestion.

pub mod chain;
pub mod il;
pub mod oracle;
pub mod pool;
pub mod replication;
pub mod strangle;

mod error;

pub use chain::{ChainFormat, OptionChain, OptionKind, OptionQuote, PremiumCcy};
pub use error::{Error, Result};
pub use il::PositionParams;
pub use oracle::{Certification, GridMinimum, GridSpec, Spacing};
pub use pool::PoolState;
pub use replication::{OptionLeg, ReplicationPortfolio, StrikeGrid};
pub use strangle::{CertificationReport, HedgeContext, HedgePlan};

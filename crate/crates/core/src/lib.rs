//! Token dissemination (k-gossip) in adversarial dynamic networks.
//!
//! The crate provides a deterministic round engine ([`net`]), adversary
//! schedule generators ([`adversaries`]), distributed token-forwarding
//! protocols ([`protocols`]), a centralized scheduler ([`central`]) and an
//! experiment harness ([`harness`]).

pub mod adversaries;
pub mod central;
pub mod error;
pub mod harness;
pub mod net;
pub mod protocols;
pub mod token_set;

pub use error::SimError;
pub use net::{NodeId, Round, TokenId};
pub use token_set::TokenSet;

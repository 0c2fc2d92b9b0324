//! Secrecy outage simulation for physical-layer security in vehicular
//! networks.
//!
//! Random topologies come from stochastic geometry ([`geometry`]): planar
//! Poisson point processes for pedestrians and infrastructure, a Poisson
//! line process for streets and Cox processes for vehicles. On each topology
//! Alice transmits with artificial noise in the null space of Bob's channel
//! and, optionally, Charlies add cooperative jamming. [`channel`] samples the
//! fading gains, [`secrecy`] evaluates the SIR and outage formulas and
//! [`engine`] estimates the secrecy outage probability by Monte Carlo.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod secrecy;

pub use config::{ScenarioConfig, Technique};
pub use error::{Error, Result};

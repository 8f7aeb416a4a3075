//! Scenario runner and acceptance suite for the Möbius kinetic-energy geometry.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod scenarios;

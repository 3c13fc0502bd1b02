//! Predicate invention, rule search and weight learning for interpretable
//! logic policies in small object-centric games.

pub mod buffer;
pub mod cli;
pub mod config;
pub mod env;
pub mod fol;
pub mod invent;
pub mod policy;
pub mod search;
pub mod state;

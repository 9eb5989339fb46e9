//! Configuration loading and the command implementations behind the
//! `telescope` binary.

pub mod app;
pub mod config;
pub mod pipeline;

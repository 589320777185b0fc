//! Command-line tool and HTTP service for requirement projects.

pub mod api;
pub mod cli;
pub mod service;

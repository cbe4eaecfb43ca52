//! Compile DMN decision tables into decision-support chatbot agents and run
//! them with a deterministic dialogue runtime.

pub mod engine;
pub mod io;
pub mod model;
pub mod fixtures;
pub mod phrase;
pub mod agent;
pub mod compile;
pub mod export;
pub mod runtime;

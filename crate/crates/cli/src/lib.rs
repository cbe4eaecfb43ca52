//! Loading agents from disk and serving them over HTTP.

pub mod load;
pub mod server;

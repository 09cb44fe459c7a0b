//! Language server for COOL: diagnostics on open and save, snippet
//! completion, JSON-RPC over stdio.

pub mod completion;
pub mod server;
pub mod store;
pub mod transport;

pub use server::{serve, Server};
pub use store::DocumentStore;

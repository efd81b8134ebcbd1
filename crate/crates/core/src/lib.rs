//! A laboratory for memoryless two-party quantum communication protocols:
//! dense simulation of round-based protocols on small registers, exact
//! information-cost accounting, numerical certification of the round-count
//! lower bound for AND, and two protocol compilers (a one-time-pad privacy
//! compiler and a one-shot-coin removal compiler).

pub mod and_protocol;
pub mod audit;
pub mod compilers;
pub mod corpus;
pub mod cost;
pub mod entropy;
pub mod error;
pub mod lemmas;
pub mod linalg;
pub mod measures;
pub mod protocol;
pub mod random;
pub mod state;

pub use error::{Error, Result};

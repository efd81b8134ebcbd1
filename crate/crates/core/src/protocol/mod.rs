//! Two-party round-based quantum protocols: description, validation,
//! exhaustive simulation and the JSON file format.

mod json;
mod model;
mod simulate;

pub use json::{from_json_str, to_json_string};
pub use model::{
    u0, Coin, CoinMode, CoinModel, InputDistribution, OutputStage, Party, ProtocolSpec, Register, Round,
    Violation, MAX_COIN_BITS, UNITARY_TOL,
};
pub use simulate::{
    and, error_probability, output_distribution, simulate, simulate_with_cap, ErrorReport, Transcript,
    DEFAULT_CAP,
};

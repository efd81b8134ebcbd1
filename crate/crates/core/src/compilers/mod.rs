//! Protocol transformations with machine-checked guarantees: the one-time
//! pad privacy compiler and the one-shot coin removal compiler.

use std::fmt::Write as _;

pub mod oneshot;
pub mod private;
pub mod qotp;

pub use oneshot::{compile_oneshot, verify_oneshot, CompensationPlan, CompensationStep, OneShotCompiled, OneShotReport};
pub use private::{compile_private, send_input_protocol, verify_private, PrivateCompiled, PrivateReport};
pub use qotp::{qotp_apply, qotp_average, QotpKey};

/// One verified inequality: `value ≤ bound` unless stated otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Certificate {
    /// Passes when `value ≤ bound + tol`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            pass: value <= bound + tol,
        }
    }
}

/// `certificate,value,bound,pass` rows.
pub fn certificates_csv(certs: &[Certificate]) -> String {
    let mut s = String::from("certificate,value,bound,pass\n");
    for c in certs {
        let _ = writeln!(s, "{},{:.16e},{:.16e},{}", c.name, c.value, c.bound, c.pass);
    }
    s
}

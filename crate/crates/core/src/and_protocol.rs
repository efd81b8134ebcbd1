//! The `k = 4r − 1` round single-qubit reflection protocol for AND.
//!
//! Alice reflects the qubit `C` about `|v⟩ = cos θ|0⟩ + sin θ|1⟩` when
//! `x = 1`, Bob applies `Z` when `y = 1`, and Bob finally measures `C`. On
//! `(1, 1)` the pair `Z·U_v` is a rotation by `2θ`, so after `2r` such
//! pairs the qubit has been rotated by `π/2` onto `|1⟩`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{pauli_z, ComplexMatrix};
use crate::protocol::{and, simulate, CoinModel, OutputStage, Party, ProtocolSpec, Register, Round};

/// Name of the single message qubit.
pub const MESSAGE: &str = "C";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AndParams {
    pub r: usize,
}

impl AndParams {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::OutOfRange {
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self { r })
    }

    /// `θ = π / (8r)`.
    pub fn theta(&self) -> f64 {
        PI / (8.0 * self.r as f64)
    }

    /// Number of rounds, `4r − 1`.
    pub fn k(&self) -> usize {
        4 * self.r - 1
    }

    /// Reflection `U_v = 2|v⟩⟨v| − I`, i.e. `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`.
    pub fn u_v(&self) -> ComplexMatrix {
        let (s, c) = (2.0 * self.theta()).sin_cos();
        ComplexMatrix::from_real(2, 2, &[c, s, s, -c]).expect("finite entries")
    }

    pub fn z(&self) -> ComplexMatrix {
        pauli_z()
    }
}

/// Builds the memoryless, coin-free protocol for the given `r ≥ 1`.
pub fn build_and_protocol(r: usize) -> Result<ProtocolSpec> {
    let params = AndParams::new(r)?;
    let id = ComplexMatrix::identity(2);
    let rounds = (1..=params.k())
        .map(|i| {
            let sender = Party::sender_of_round(i);
            let active = match sender {
                Party::Alice => params.u_v(),
                Party::Bob => params.z(),
            };
            Round::new(sender, &[MESSAGE], vec![id.clone(), active])
        })
        .collect();
    Ok(ProtocolSpec {
        registers: vec![Register::new(MESSAGE, 2, Party::Alice)],
        input_sizes: [2, 2],
        rounds,
        coins: CoinModel::none(),
        output: OutputStage::measure(MESSAGE),
        memoryless: true,
    })
}

/// Simulated `Pr[output ≠ x ∧ y]`, indexed `[x][y]`.
pub fn expected_error(r: usize) -> Result<[[f64; 2]; 2]> {
    let t = simulate(&build_and_protocol(r)?)?;
    let mut table = [[0.0; 2]; 2];
    for (x, row) in table.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            *cell = 1.0 - t.output_distribution(x, y)[and(x, y)];
        }
    }
    Ok(table)
}

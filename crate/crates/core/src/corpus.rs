//! Seeded random protocol families used by the acceptance checks and the CLI.

use crate::linalg::ComplexMatrix;
use crate::protocol::{Coin, CoinMode, CoinModel, OutputStage, Party, ProtocolSpec, Register, Round};
use crate::random;

/// Name of the single message qubit of the random families.
pub const MESSAGE: &str = "C";

/// Memoryless one-qubit protocol with `k` rounds and an independent Haar
/// unitary for each (round, input) pair. `k` must be odd so that Bob holds
/// the qubit at the end.
pub fn random_memoryless(seed: u64, index: u64, k: usize) -> ProtocolSpec {
    let mut rng = random::rng(seed, index);
    let rounds = (1..=k)
        .map(|i| {
            let us: Vec<ComplexMatrix> = (0..2).map(|_| random::unitary(&mut rng, 2)).collect();
            Round::new(Party::sender_of_round(i), &[MESSAGE], us)
        })
        .collect();
    ProtocolSpec {
        registers: vec![Register::new(MESSAGE, 2, Party::Alice)],
        input_sizes: [2, 2],
        rounds,
        coins: CoinModel::none(),
        output: OutputStage::measure(MESSAGE),
        memoryless: true,
    }
}

/// `n` random memoryless protocols with `k` cycling through 3, 5, 7.
pub fn audit_corpus(seed: u64, n: usize) -> Vec<ProtocolSpec> {
    (0..n).map(|j| random_memoryless(seed, j as u64, [3, 5, 7][j % 3])).collect()
}

/// Memoryless one-qubit protocol where round `i` reads a fresh uniform coin
/// bit `r{i}` of its sender, with a Haar unitary per (input, coin) pair.
pub fn random_coined(seed: u64, index: u64, k: usize) -> ProtocolSpec {
    let mut rng = random::rng(seed, index);
    let mut coins = Vec::with_capacity(k);
    let rounds = (1..=k)
        .map(|i| {
            let sender = Party::sender_of_round(i);
            let name = format!("r{i}");
            coins.push(Coin::uniform_bits(&name, sender, 1));
            let us: Vec<ComplexMatrix> = (0..4).map(|_| random::unitary(&mut rng, 2)).collect();
            Round::new(sender, &[MESSAGE], us).with_coins(&[name.as_str()])
        })
        .collect();
    ProtocolSpec {
        registers: vec![Register::new(MESSAGE, 2, Party::Alice)],
        input_sizes: [2, 2],
        rounds,
        coins: CoinModel {
            mode: CoinMode::OneShot,
            coins,
        },
        output: OutputStage::measure(MESSAGE),
        memoryless: true,
    }
}

/// `n` coined protocols with `k` cycling through 1, 3, 5.
pub fn coined_corpus(seed: u64, n: usize) -> Vec<ProtocolSpec> {
    (0..n).map(|j| random_coined(seed, j as u64, [1, 3, 5][j % 3])).collect()
}

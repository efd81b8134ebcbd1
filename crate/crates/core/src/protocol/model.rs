use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::RegisterLayout;

/// Unitarity tolerance for round matrices.
pub const UNITARY_TOL: f64 = 1e-9;
/// Upper bound on the total number of coin bits a protocol may use.
pub const MAX_COIN_BITS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    /// Which coordinate of the input pair `(x, y)` this party holds.
    pub fn input_slot(self) -> usize {
        match self {
            Party::Alice => 0,
            Party::Bob => 1,
        }
    }

    /// Sender of round `i` (1-based) in an alternating protocol.
    pub fn sender_of_round(i: usize) -> Party {
        if i % 2 == 1 {
            Party::Alice
        } else {
            Party::Bob
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Alice => write!(f, "alice"),
            Party::Bob => write!(f, "bob"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub dim: usize,
    /// Who holds the register before round 1.
    pub holder: Party,
}

impl Register {
    pub fn new(name: &str, dim: usize, holder: Party) -> Self {
        Self {
            name: name.to_string(),
            dim,
            holder,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinMode {
    None,
    Private,
    OneShot,
}

/// A private random variable owned by one party.
#[derive(Debug, Clone, PartialEq)]
pub struct Coin {
    pub name: String,
    pub owner: Party,
    /// Distribution over the coin's values `0..probs.len()`.
    pub probs: Vec<f64>,
}

impl Coin {
    pub fn uniform_bits(name: &str, owner: Party, bits: u32) -> Self {
        let n = 1usize << bits;
        Self {
            name: name.to_string(),
            owner,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn values(&self) -> usize {
        self.probs.len()
    }

    pub fn bits(&self) -> f64 {
        (self.probs.len() as f64).log2()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinModel {
    pub mode: CoinMode,
    pub coins: Vec<Coin>,
}

impl CoinModel {
    pub fn none() -> Self {
        Self {
            mode: CoinMode::None,
            coins: Vec::new(),
        }
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.coins.iter().position(|c| c.name == name)
    }

    pub fn total_bits(&self) -> f64 {
        self.coins.iter().map(Coin::bits).sum()
    }
}

/// One communication round: the sender applies a unitary chosen by its
/// input (and the coins it reads) to `acts_on`, then ships `sends`.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub sender: Party,
    pub acts_on: Vec<String>,
    pub sends: Vec<String>,
    /// Names of the sender's coins read by this round, most significant first.
    pub coins: Vec<String>,
    /// Indexed by `input * coin_space + coin_value`.
    pub unitaries: Vec<ComplexMatrix>,
}

impl Round {
    /// A coin-free round that acts on and sends the same registers.
    pub fn new(sender: Party, registers: &[&str], unitaries: Vec<ComplexMatrix>) -> Self {
        let regs: Vec<String> = registers.iter().map(|s| s.to_string()).collect();
        Self {
            sender,
            acts_on: regs.clone(),
            sends: regs,
            coins: Vec::new(),
            unitaries,
        }
    }

    pub fn with_coins(mut self, coins: &[&str]) -> Self {
        self.coins = coins.iter().map(|s| s.to_string()).collect();
        self
    }
}

/// Bob's post-processing: an optional unitary per value of `y` on
/// `acts_on`, followed by a computational-basis measurement of `register`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputStage {
    pub register: String,
    pub acts_on: Vec<String>,
    /// Empty when Bob measures directly; otherwise one unitary per `y`.
    pub unitaries: Vec<ComplexMatrix>,
}

impl OutputStage {
    pub fn measure(register: &str) -> Self {
        Self {
            register: register.to_string(),
            acts_on: Vec::new(),
            unitaries: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub registers: Vec<Register>,
    /// Alphabet sizes of `x` and `y`.
    pub input_sizes: [usize; 2],
    pub rounds: Vec<Round>,
    pub coins: CoinModel,
    pub output: OutputStage,
    pub memoryless: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonUnitary { round: usize, index: usize },
    WrongShape { round: usize, index: usize, expected: usize },
    UnitaryCount { round: usize, expected: usize, got: usize },
    AlternationBroken(usize),
    UnknownRegister { round: Option<usize>, name: String },
    NotHeld { round: usize, name: String },
    NotMemoryless(usize),
    UnknownCoin { round: usize, name: String },
    CoinNotOwned { round: usize, name: String },
    CoinsWithoutModel(usize),
    NotOneShot { coin: String, reads: usize },
    CoinSpaceTooLarge { bits: f64 },
    BadCoinDistribution(String),
    BadInputAlphabet,
    InvalidLayout(String),
    OutputNotHeldByBob(String),
    BadOutputStage(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonUnitary { round, index } => {
                write!(f, "round {round}: unitary #{index} is not unitary")
            }
            Violation::WrongShape { round, index, expected } => {
                write!(f, "round {round}: unitary #{index} is not {expected}x{expected}")
            }
            Violation::UnitaryCount { round, expected, got } => {
                write!(f, "round {round}: expected {expected} unitaries, got {got}")
            }
            Violation::AlternationBroken(r) => write!(f, "round {r}: senders must alternate starting with alice"),
            Violation::UnknownRegister { round: Some(r), name } => write!(f, "round {r}: unknown register `{name}`"),
            Violation::UnknownRegister { round: None, name } => write!(f, "unknown register `{name}`"),
            Violation::NotHeld { round, name } => write!(f, "round {round}: sender does not hold `{name}`"),
            Violation::NotMemoryless(r) => {
                write!(f, "round {r}: a memoryless round must act on and send every register")
            }
            Violation::UnknownCoin { round, name } => write!(f, "round {round}: unknown coin `{name}`"),
            Violation::CoinNotOwned { round, name } => write!(f, "round {round}: coin `{name}` belongs to the receiver"),
            Violation::CoinsWithoutModel(r) => write!(f, "round {r}: reads coins but the coin mode is none"),
            Violation::NotOneShot { coin, reads } => write!(f, "coin `{coin}` is read {reads} times"),
            Violation::CoinSpaceTooLarge { bits } => write!(f, "{bits} coin bits exceed the limit of {MAX_COIN_BITS}"),
            Violation::BadCoinDistribution(c) => write!(f, "coin `{c}` has an invalid distribution"),
            Violation::BadInputAlphabet => write!(f, "input alphabets must be nonempty"),
            Violation::InvalidLayout(m) => write!(f, "invalid registers: {m}"),
            Violation::OutputNotHeldByBob(r) => write!(f, "output register `{r}` is not held by bob at the end"),
            Violation::BadOutputStage(m) => write!(f, "output stage: {m}"),
        }
    }
}

impl ProtocolSpec {
    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::new(self.registers.iter().map(|r| (r.name.clone(), r.dim)))
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn register_dim_product(&self, names: &[String]) -> Option<usize> {
        names
            .iter()
            .map(|n| self.register(n).map(|r| r.dim))
            .product()
    }

    pub fn is_binary(&self) -> bool {
        self.input_sizes == [2, 2]
    }

    pub fn input_size(&self, party: Party) -> usize {
        self.input_sizes[party.input_slot()]
    }

    /// Number of joint coin values read by round `r` (0-based index).
    pub fn round_coin_space(&self, r: usize) -> usize {
        self.rounds[r]
            .coins
            .iter()
            .map(|c| self.coins.position(c).map_or(1, |i| self.coins.coins[i].values()))
            .product()
    }

    /// Holder of every register after `rounds_done` rounds.
    pub fn holders_after(&self, rounds_done: usize) -> BTreeMap<String, Party> {
        let mut holders: BTreeMap<String, Party> = self
            .registers
            .iter()
            .map(|r| (r.name.clone(), r.holder))
            .collect();
        for round in self.rounds.iter().take(rounds_done) {
            for name in &round.sends {
                holders.insert(name.clone(), round.sender.other());
            }
        }
        holders
    }

    /// Registers held by `party` after `rounds_done` rounds, in declaration order.
    pub fn held_by(&self, party: Party, rounds_done: usize) -> Vec<String> {
        let holders = self.holders_after(rounds_done);
        self.registers
            .iter()
            .filter(|r| holders.get(&r.name) == Some(&party))
            .map(|r| r.name.clone())
            .collect()
    }

    /// Sum over rounds of `log2 dim(sent registers)`.
    pub fn qcc(&self) -> f64 {
        self.rounds
            .iter()
            .map(|r| {
                r.sends
                    .iter()
                    .filter_map(|n| self.register(n))
                    .map(|reg| (reg.dim as f64).log2())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Every structural violation; empty iff the protocol is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.input_sizes.contains(&0) {
            out.push(Violation::BadInputAlphabet);
        }
        if let Err(e) = self.layout() {
            out.push(Violation::InvalidLayout(e.to_string()));
            return out;
        }
        for coin in &self.coins.coins {
            let sum: f64 = coin.probs.iter().sum();
            if coin.probs.is_empty() || coin.probs.iter().any(|p| *p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-12 {
                out.push(Violation::BadCoinDistribution(coin.name.clone()));
            }
        }
        let bits = self.coins.total_bits();
        if bits > MAX_COIN_BITS + 1e-9 {
            out.push(Violation::CoinSpaceTooLarge { bits });
        }
        if self.memoryless && self.registers.iter().any(|r| r.holder != Party::Alice) {
            out.push(Violation::NotMemoryless(0));
        }

        let mut holders = self.holders_after(0);
        let mut reads: BTreeMap<&str, usize> = BTreeMap::new();
        for (idx, round) in self.rounds.iter().enumerate() {
            let i = idx + 1;
            if round.sender != Party::sender_of_round(i) {
                out.push(Violation::AlternationBroken(i));
            }
            let mut known = true;
            for name in round.acts_on.iter().chain(&round.sends) {
                match holders.get(name) {
                    None => {
                        known = false;
                        out.push(Violation::UnknownRegister { round: Some(i), name: name.clone() });
                    }
                    Some(p) if *p != round.sender => {
                        out.push(Violation::NotHeld { round: i, name: name.clone() })
                    }
                    _ => {}
                }
            }
            if self.memoryless {
                let all = |v: &[String]| {
                    self.registers.iter().all(|r| v.contains(&r.name)) && v.len() == self.registers.len()
                };
                if !all(&round.acts_on) || !all(&round.sends) {
                    out.push(Violation::NotMemoryless(i));
                }
            }
            if !round.coins.is_empty() && self.coins.mode == CoinMode::None {
                out.push(Violation::CoinsWithoutModel(i));
            }
            let mut coin_space = 1usize;
            for c in &round.coins {
                match self.coins.position(c) {
                    None => out.push(Violation::UnknownCoin { round: i, name: c.clone() }),
                    Some(ci) => {
                        let coin = &self.coins.coins[ci];
                        if coin.owner != round.sender {
                            out.push(Violation::CoinNotOwned { round: i, name: c.clone() });
                        }
                        coin_space *= coin.values();
                        *reads.entry(coin.name.as_str()).or_default() += 1;
                    }
                }
            }
            let expected = self.input_size(round.sender) * coin_space;
            if round.unitaries.len() != expected {
                out.push(Violation::UnitaryCount { round: i, expected, got: round.unitaries.len() });
            }
            if known {
                let dim = self.register_dim_product(&round.acts_on).unwrap_or(0);
                for (index, u) in round.unitaries.iter().enumerate() {
                    if !u.is_square() || u.rows() != dim {
                        out.push(Violation::WrongShape { round: i, index, expected: dim });
                    } else if !u.is_unitary(UNITARY_TOL) {
                        out.push(Violation::NonUnitary { round: i, index });
                    }
                }
            }
            for name in &round.sends {
                if holders.contains_key(name) {
                    holders.insert(name.clone(), round.sender.other());
                }
            }
        }
        if self.coins.mode == CoinMode::OneShot {
            for (coin, n) in reads {
                if n > 1 {
                    out.push(Violation::NotOneShot { coin: coin.to_string(), reads: n });
                }
            }
        }

        let stage = &self.output;
        match holders.get(&stage.register) {
            None => out.push(Violation::UnknownRegister { round: None, name: stage.register.clone() }),
            Some(Party::Alice) => out.push(Violation::OutputNotHeldByBob(stage.register.clone())),
            Some(Party::Bob) => {}
        }
        if !stage.unitaries.is_empty() {
            if stage.unitaries.len() != self.input_sizes[1] {
                out.push(Violation::BadOutputStage(format!(
                    "expected one unitary per y ({}), got {}",
                    self.input_sizes[1],
                    stage.unitaries.len()
                )));
            }
            for name in &stage.acts_on {
                match holders.get(name) {
                    None => out.push(Violation::UnknownRegister { round: None, name: name.clone() }),
                    Some(Party::Alice) => out.push(Violation::BadOutputStage(format!("bob does not hold `{name}`"))),
                    Some(Party::Bob) => {}
                }
            }
            if let Some(dim) = self.register_dim_product(&stage.acts_on) {
                for u in &stage.unitaries {
                    if !u.is_square() || u.rows() != dim || !u.is_unitary(UNITARY_TOL) {
                        out.push(Violation::BadOutputStage("final unitary has the wrong size or is not unitary".into()));
                    }
                }
            }
        }
        out
    }

    /// `validate` as a `Result`.
    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidProtocol(
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}

/// Joint distribution `μ(x, y)` over finite input alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    sizes: [usize; 2],
    probs: Vec<f64>,
}

impl InputDistribution {
    /// `probs[x * sizes[1] + y]`
    pub fn new(sizes: [usize; 2], probs: Vec<f64>) -> Result<Self> {
        if sizes.contains(&0) || probs.len() != sizes[0] * sizes[1] {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for alphabets {sizes:?}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidDistribution("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { sizes, probs })
    }

    pub fn uniform(sizes: [usize; 2]) -> Self {
        let n = sizes[0] * sizes[1];
        Self {
            sizes,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn sizes(&self) -> [usize; 2] {
        self.sizes
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.sizes[1] + y]
    }

    /// Marginal of the given party's input.
    pub fn marginal(&self, party: Party) -> Vec<f64> {
        let slot = party.input_slot();
        let mut m = vec![0.0; self.sizes[slot]];
        for x in 0..self.sizes[0] {
            for y in 0..self.sizes[1] {
                m[if slot == 0 { x } else { y }] += self.prob(x, y);
            }
        }
        m
    }

    /// Distribution of `party`'s input given the other party's input
    /// equals `value`; `None` when that value has probability zero.
    pub fn conditional(&self, party: Party, value: usize) -> Option<Vec<f64>> {
        let n = self.sizes[party.input_slot()];
        let row: Vec<f64> = (0..n)
            .map(|v| match party {
                Party::Alice => self.prob(v, value),
                Party::Bob => self.prob(value, v),
            })
            .collect();
        let total: f64 = row.iter().sum();
        (total > 0.0).then(|| row.iter().map(|p| p / total).collect())
    }
}

/// Uniform distribution on `{(0,0), (0,1), (1,0)}`.
pub fn u0() -> InputDistribution {
    InputDistribution::new([2, 2], vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]).expect("static distribution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, ComplexMatrix};

    fn one_qubit(rounds: Vec<Round>) -> ProtocolSpec {
        ProtocolSpec {
            registers: vec![Register::new("C", 2, Party::Alice)],
            input_sizes: [2, 2],
            rounds,
            coins: CoinModel::none(),
            output: OutputStage::measure("C"),
            memoryless: true,
        }
    }

    fn id2() -> Vec<ComplexMatrix> {
        vec![ComplexMatrix::identity(2); 2]
    }

    #[test]
    fn u0_values() {
        let mu = u0();
        assert!((mu.prob(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(mu.prob(1, 1), 0.0);
        assert!((mu.marginal(Party::Bob)[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(mu.conditional(Party::Alice, 0), Some(vec![0.5, 0.5]));
        assert_eq!(mu.conditional(Party::Alice, 1), Some(vec![1.0, 0.0]));
    }

    #[test]
    fn distribution_validation() {
        assert!(InputDistribution::new([2, 2], vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(InputDistribution::new([2, 2], vec![0.5, 0.5]).is_err());
        assert!(InputDistribution::new([2, 2], vec![0.2; 4]).is_err());
    }

    #[test]
    fn well_formed_protocol_has_no_violations() {
        let p = one_qubit(vec![
            Round::new(Party::Alice, &["C"], id2()),
            Round::new(Party::Bob, &["C"], id2()),
            Round::new(Party::Alice, &["C"], id2()),
        ]);
        assert_eq!(p.validate(), vec![]);
        assert_eq!(p.qcc(), 3.0);
    }

    #[test]
    fn non_unitary_and_alternation() {
        let bad = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let p = one_qubit(vec![
            Round::new(Party::Alice, &["C"], vec![ComplexMatrix::identity(2), bad]),
            Round::new(Party::Alice, &["C"], id2()),
        ]);
        let v = p.validate();
        assert!(v.contains(&Violation::NonUnitary { round: 1, index: 1 }));
        assert!(v.contains(&Violation::AlternationBroken(2)));
    }

    #[test]
    fn empty_protocol_has_zero_qcc() {
        let p = one_qubit(vec![]);
        assert_eq!(p.qcc(), 0.0);
    }

    #[test]
    fn memoryless_requires_full_sends() {
        let mut p = one_qubit(vec![Round::new(Party::Alice, &["C"], vec![pauli_x(); 2])]);
        p.registers.push(Register::new("D", 2, Party::Alice));
        p.rounds[0].acts_on.push("D".into());
        let u = crate::linalg::tensor(&pauli_x(), &pauli_x());
        p.rounds[0].unitaries = vec![u.clone(), u];
        assert!(p.validate().contains(&Violation::NotMemoryless(1)));
    }

    #[test]
    fn one_shot_coins_read_once() {
        let mut p = one_qubit(vec![
            Round::new(Party::Alice, &["C"], vec![ComplexMatrix::identity(2); 4]).with_coins(&["r"]),
            Round::new(Party::Bob, &["C"], id2()),
            Round::new(Party::Alice, &["C"], vec![ComplexMatrix::identity(2); 4]).with_coins(&["r"]),
        ]);
        p.coins = CoinModel {
            mode: CoinMode::OneShot,
            coins: vec![Coin::uniform_bits("r", Party::Alice, 1)],
        };
        assert_eq!(
            p.validate(),
            vec![Violation::NotOneShot { coin: "r".into(), reads: 2 }]
        );
        p.coins.mode = CoinMode::Private;
        assert_eq!(p.validate(), vec![]);
    }

    #[test]
    fn receiver_coins_are_rejected() {
        let mut p = one_qubit(vec![
            Round::new(Party::Alice, &["C"], vec![ComplexMatrix::identity(2); 4]).with_coins(&["r"]),
        ]);
        p.coins = CoinModel {
            mode: CoinMode::Private,
            coins: vec![Coin::uniform_bits("r", Party::Bob, 1)],
        };
        assert!(p.validate().contains(&Violation::CoinNotOwned { round: 1, name: "r".into() }));
    }

    #[test]
    fn even_round_memoryless_output_is_not_with_bob() {
        let p = one_qubit(vec![
            Round::new(Party::Alice, &["C"], id2()),
            Round::new(Party::Bob, &["C"], id2()),
        ]);
        assert_eq!(p.validate(), vec![Violation::OutputNotHeldByBob("C".into())]);
    }
}

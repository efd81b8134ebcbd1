use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::state::{apply_on_registers, RegisterLayout};

use super::model::{InputDistribution, Party, ProtocolSpec};

/// Default cap on the total register dimension of a simulated protocol.
pub const DEFAULT_CAP: usize = 256;

/// Every intermediate pure state of a protocol, for every classical label
/// `(x, y, coins)`. Coins are enumerated exhaustively.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    layout: RegisterLayout,
    input_sizes: [usize; 2],
    coin_probs: Vec<Vec<f64>>,
    coin_space: usize,
    /// `states[label][i]`: state after `i` rounds (index 0 is `|0…0⟩`).
    states: Vec<Vec<Vec<C64>>>,
    /// State after the output stage.
    finals: Vec<Vec<C64>>,
    output_register: usize,
}

/// Simulates every label of `p` with the default dimension cap.
pub fn simulate(p: &ProtocolSpec) -> Result<Transcript> {
    simulate_with_cap(p, DEFAULT_CAP)
}

pub fn simulate_with_cap(p: &ProtocolSpec, cap: usize) -> Result<Transcript> {
    p.check()?;
    let layout = p.layout()?;
    if layout.dim() > cap {
        return Err(Error::StateBlowup { dim: layout.dim(), cap });
    }
    let coin_probs: Vec<Vec<f64>> = p.coins.coins.iter().map(|c| c.probs.clone()).collect();
    let coin_space: usize = coin_probs.iter().map(Vec::len).product();
    // For each round: positions of the coins it reads, in the round's order.
    let round_coins: Vec<Vec<usize>> = p
        .rounds
        .iter()
        .map(|r| r.coins.iter().map(|c| p.coins.position(c).expect("validated")).collect())
        .collect();
    let acts: Vec<Vec<&str>> = p
        .rounds
        .iter()
        .map(|r| r.acts_on.iter().map(String::as_str).collect())
        .collect();
    let out_acts: Vec<&str> = p.output.acts_on.iter().map(String::as_str).collect();

    let [nx, ny] = p.input_sizes;
    let mut states = Vec::with_capacity(nx * ny * coin_space);
    let mut finals = Vec::with_capacity(nx * ny * coin_space);
    let mut zero = vec![C64::new(0.0, 0.0); layout.dim()];
    zero[0] = C64::new(1.0, 0.0);
    for x in 0..nx {
        for y in 0..ny {
            for c in 0..coin_space {
                let digits = coin_digits(&coin_probs, c);
                let mut history = Vec::with_capacity(p.rounds.len() + 1);
                history.push(zero.clone());
                for (i, round) in p.rounds.iter().enumerate() {
                    let input = if round.sender == Party::Alice { x } else { y };
                    let mut coin = 0;
                    for &ci in &round_coins[i] {
                        coin = coin * coin_probs[ci].len() + digits[ci];
                    }
                    let u = &round.unitaries[input * p.round_coin_space(i) + coin];
                    let next = apply_on_registers(&layout, history.last().expect("nonempty"), u, &acts[i])?;
                    history.push(next);
                }
                let last = history.last().expect("nonempty").clone();
                let fin = if p.output.unitaries.is_empty() {
                    last
                } else {
                    apply_on_registers(&layout, &last, &p.output.unitaries[y], &out_acts)?
                };
                states.push(history);
                finals.push(fin);
            }
        }
    }
    let output_register = layout.position(&p.output.register).expect("validated");
    Ok(Transcript {
        layout,
        input_sizes: p.input_sizes,
        coin_probs,
        coin_space,
        states,
        finals,
        output_register,
    })
}

/// Mixed-radix digits of a joint coin value, first coin most significant.
fn coin_digits(coin_probs: &[Vec<f64>], mut c: usize) -> Vec<usize> {
    let mut digits = vec![0; coin_probs.len()];
    for (d, probs) in digits.iter_mut().zip(coin_probs).rev() {
        *d = c % probs.len();
        c /= probs.len();
    }
    digits
}

impl Transcript {
    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn input_sizes(&self) -> [usize; 2] {
        self.input_sizes
    }

    pub fn num_rounds(&self) -> usize {
        self.states[0].len() - 1
    }

    /// Number of joint coin assignments (1 for coin-free protocols).
    pub fn coin_space(&self) -> usize {
        self.coin_space
    }

    /// Per-coin values of a joint coin assignment.
    pub fn coin_digits(&self, c: usize) -> Vec<usize> {
        coin_digits(&self.coin_probs, c)
    }

    pub fn coin_prob(&self, c: usize) -> f64 {
        self.coin_digits(c)
            .iter()
            .zip(&self.coin_probs)
            .map(|(&d, probs)| probs[d])
            .product()
    }

    fn label(&self, x: usize, y: usize, c: usize) -> usize {
        (x * self.input_sizes[1] + y) * self.coin_space + c
    }

    /// State after `round` rounds for inputs `(x, y)` and joint coin value `c`.
    pub fn state(&self, x: usize, y: usize, c: usize, round: usize) -> &[C64] {
        &self.states[self.label(x, y, c)][round]
    }

    /// State after the output stage.
    pub fn final_state(&self, x: usize, y: usize, c: usize) -> &[C64] {
        &self.finals[self.label(x, y, c)]
    }

    /// Born-rule distribution of the output register on a fixed coin value.
    pub fn output_given_coins(&self, x: usize, y: usize, c: usize) -> Vec<f64> {
        let dim = self.layout.factors()[self.output_register].1;
        let mut probs = vec![0.0; dim];
        for (idx, amp) in self.final_state(x, y, c).iter().enumerate() {
            probs[self.layout.digits(idx)[self.output_register]] += amp.norm_sqr();
        }
        probs
    }

    /// Output distribution for `(x, y)`, averaged over the coins.
    pub fn output_distribution(&self, x: usize, y: usize) -> Vec<f64> {
        let mut probs = vec![0.0; self.layout.factors()[self.output_register].1];
        for c in 0..self.coin_space {
            let w = self.coin_prob(c);
            for (acc, q) in probs.iter_mut().zip(self.output_given_coins(x, y, c)) {
                *acc += w * q;
            }
        }
        probs
    }

    /// Error of the protocol against the function `f`.
    pub fn error_probability(&self, f: impl Fn(usize, usize) -> usize, mu: &InputDistribution) -> ErrorReport {
        let [nx, ny] = self.input_sizes;
        let mut per_input = vec![vec![0.0; ny]; nx];
        let mut distributional = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                let dist = self.output_distribution(x, y);
                let right = dist.get(f(x, y)).copied().unwrap_or(0.0);
                let err = (1.0 - right).clamp(0.0, 1.0);
                per_input[x][y] = err;
                distributional += mu.prob(x, y) * err;
            }
        }
        let worst_case = per_input.iter().flatten().copied().fold(0.0, f64::max);
        ErrorReport {
            distributional,
            worst_case,
            per_input,
        }
    }
}

/// Errors against a target function; `per_input[x][y] = Pr[out ≠ f(x,y)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub distributional: f64,
    pub worst_case: f64,
    pub per_input: Vec<Vec<f64>>,
}

/// Output distribution of `p` on `(x, y)`.
pub fn output_distribution(p: &ProtocolSpec, x: usize, y: usize) -> Result<Vec<f64>> {
    Ok(simulate(p)?.output_distribution(x, y))
}

/// Distributional and worst-case error of `p` computing `f`.
pub fn error_probability(
    p: &ProtocolSpec,
    f: impl Fn(usize, usize) -> usize,
    mu: &InputDistribution,
) -> Result<ErrorReport> {
    Ok(simulate(p)?.error_probability(f, mu))
}

pub fn and(x: usize, y: usize) -> usize {
    x & y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, ComplexMatrix};
    use crate::protocol::model::{u0, CoinModel, OutputStage, Register, Round};

    fn constant_zero(k: usize) -> ProtocolSpec {
        ProtocolSpec {
            registers: vec![Register::new("C", 2, Party::Alice)],
            input_sizes: [2, 2],
            rounds: (1..=k)
                .map(|i| Round::new(Party::sender_of_round(i), &["C"], vec![ComplexMatrix::identity(2); 2]))
                .collect(),
            coins: CoinModel::none(),
            output: OutputStage::measure("C"),
            memoryless: true,
        }
    }

    #[test]
    fn identity_round_keeps_zero_state() {
        let t = simulate(&constant_zero(1)).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(t.state(x, y, 0, 1)[0], C64::new(1.0, 0.0));
                assert_eq!(t.output_distribution(x, y), vec![1.0, 0.0]);
            }
        }
    }

    #[test]
    fn always_zero_protocol_errors() {
        let t = simulate(&constant_zero(3)).unwrap();
        let e = t.error_probability(and, &u0());
        assert_eq!(e.distributional, 0.0);
        assert_eq!(e.worst_case, 1.0);
        assert_eq!(e.per_input[1][1], 1.0);
    }

    #[test]
    fn coin_averaging() {
        use crate::protocol::model::{Coin, CoinMode};
        // Alice flips C iff her coin is 1, regardless of x.
        let mut p = constant_zero(1);
        p.rounds[0] = Round::new(
            Party::Alice,
            &["C"],
            vec![ComplexMatrix::identity(2), pauli_x(), ComplexMatrix::identity(2), pauli_x()],
        )
        .with_coins(&["r"]);
        p.coins = CoinModel {
            mode: CoinMode::OneShot,
            coins: vec![Coin {
                name: "r".into(),
                owner: Party::Alice,
                probs: vec![0.25, 0.75],
            }],
        };
        let t = simulate(&p).unwrap();
        assert_eq!(t.coin_space(), 2);
        let d = t.output_distribution(1, 0);
        assert!((d[0] - 0.25).abs() < 1e-15 && (d[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn blowup_is_reported() {
        let mut p = constant_zero(1);
        p.registers[0].dim = 2;
        assert_eq!(simulate_with_cap(&p, 1), Err(Error::StateBlowup { dim: 2, cap: 1 }));
    }

    #[test]
    fn invalid_protocols_are_not_simulated() {
        let mut p = constant_zero(2);
        p.rounds[1].sender = Party::Alice;
        assert!(matches!(simulate(&p), Err(Error::InvalidProtocol(_))));
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = constant_zero(3);
        assert_eq!(simulate(&p).unwrap(), simulate(&p).unwrap());
    }
}

//! One-shot coin removal: every private coin of a memoryless protocol whose
//! coins are each read once is replaced by a quantum register prepared in the
//! coin's superposition, and after every round the sender with input 1
//! rotates the coin registers used so far (an Uhlmann unitary) to make its
//! state as close as possible to the input-0 state. The result is a coin-free
//! memoryless protocol with the same outputs.

use crate::audit::check_entropy_lemma;
use crate::cost::{cic0_terms, cic0_terms_coins_averaged, cic_with_cap};
use crate::entropy::h2;
use crate::error::{Error, Result};
use crate::linalg::{unitary_with_first_column, ComplexMatrix, C64};
use crate::measures::{fidelity, uhlmann_unitary};
use crate::protocol::{simulate_with_cap, u0, CoinMode, CoinModel, Party, ProtocolSpec, Register, Round};
use crate::state::{apply_on_registers, PureState, RegisterLayout};

use super::Certificate;

/// The compensation applied by the input-1 sender after one round.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationStep {
    /// 1-based round index.
    pub round: usize,
    /// Coin registers the unitary acts on (empty: no coin read yet, identity).
    pub act_on: Vec<String>,
    pub unitary: ComplexMatrix,
    /// `⟨φ₀|(V ⊗ I)|φ₁⟩` on the reference branch (other input 0).
    pub overlap: f64,
    /// Fidelity of the two reduced states on the other registers.
    pub complement_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompensationPlan {
    pub steps: Vec<CompensationStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneShotCompiled {
    pub compiled: ProtocolSpec,
    /// Name of the register holding each coin, in coin-model order.
    pub coin_registers: Vec<String>,
    pub plan: CompensationPlan,
}

/// Columns of `f` applied to each basis vector of `layout`.
fn matrix_of(layout: &RegisterLayout, mut f: impl FnMut(usize, &[C64]) -> Result<Vec<C64>>) -> Result<ComplexMatrix> {
    let d = layout.dim();
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![C64::new(0.0, 0.0); d];
        e[j] = C64::new(1.0, 0.0);
        cols.push(f(j, &e)?);
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Compiles a memoryless binary-input protocol whose coins are each read at
/// most once into a coin-free one. `cap` bounds the compiled dimension.
pub fn compile_oneshot(p: &ProtocolSpec, cap: usize) -> Result<OneShotCompiled> {
    if p.coins.mode == CoinMode::Private {
        return Err(Error::NotOneShot("the coin model is private, not one-shot".into()));
    }
    p.check()?;
    if !p.is_binary() {
        return Err(Error::RequiresBinaryInputs);
    }
    if !p.memoryless {
        return Err(Error::RequiresMemoryless);
    }

    let mut registers = p.registers.clone();
    let mut coin_registers = Vec::with_capacity(p.coins.coins.len());
    for coin in &p.coins.coins {
        let mut name = format!("R~{}", coin.name);
        while registers.iter().any(|r| r.name == name) {
            name.push('~');
        }
        registers.push(Register::new(&name, coin.values(), Party::Alice));
        coin_registers.push(name);
    }
    let layout = RegisterLayout::new(registers.iter().map(|r| (r.name.clone(), r.dim)))?;
    if layout.dim() > cap {
        return Err(Error::StateBlowup { dim: layout.dim(), cap });
    }
    let base_names: Vec<&str> = p.registers.iter().map(|r| r.name.as_str()).collect();
    let all_names: Vec<&str> = registers.iter().map(|r| r.name.as_str()).collect();
    let coin_pos: Vec<usize> = coin_registers.iter().map(|n| layout.position(n).expect("coin register")).collect();

    // Coin preparation |0⟩ ↦ Σ_c √p(c) |c⟩ on every coin register.
    let mut prep = ComplexMatrix::identity(layout.dim());
    for (coin, name) in p.coins.coins.iter().zip(&coin_registers) {
        let amps: Vec<C64> = coin.probs.iter().map(|q| C64::new(q.sqrt(), 0.0)).collect();
        let u = unitary_with_first_column(&amps);
        prep = &matrix_of(&layout, |_, e| apply_on_registers(&layout, e, &u, &[name.as_str()]))? * &prep;
    }

    // current[x][y]: compiled state after the rounds built so far
    let mut zero = vec![C64::new(0.0, 0.0); layout.dim()];
    zero[0] = C64::new(1.0, 0.0);
    let zero = prep.mul_vec(&zero);
    let mut current = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]];

    let mut read: Vec<String> = Vec::new();
    let mut rounds = Vec::with_capacity(p.num_rounds());
    let mut steps = Vec::with_capacity(p.num_rounds());
    for (idx, round) in p.rounds.iter().enumerate() {
        let i = idx + 1;
        let coin_space = p.round_coin_space(idx);
        let coin_idx: Vec<usize> = round
            .coins
            .iter()
            .map(|c| p.coins.position(c).expect("validated coin"))
            .collect();
        // Controlled round unitary Σ_c P_c ⊗ U^{s,c}.
        let controlled = |s: usize| -> Result<ComplexMatrix> {
            matrix_of(&layout, |j, e| {
                let digits = layout.digits(j);
                let c = coin_idx
                    .iter()
                    .fold(0, |acc, &ci| acc * p.coins.coins[ci].values() + digits[coin_pos[ci]]);
                apply_on_registers(&layout, e, &round.unitaries[s * coin_space + c], &base_names)
            })
        };
        let cu = [controlled(0)?, controlled(1)?];
        for &ci in &coin_idx {
            read.push(coin_registers[ci].clone());
        }
        // registers must be listed in layout order
        read.sort_by_key(|n| layout.position(n));

        let state = |s: usize, other: usize| -> (usize, usize) {
            match round.sender {
                Party::Alice => (s, other),
                Party::Bob => (other, s),
            }
        };
        let (x0, y0) = state(0, 0);
        let (x1, y1) = state(1, 0);
        let phi0 = PureState::new(layout.clone(), cu[0].mul_vec(&current[x0][y0]))?;
        let phi1 = PureState::new(layout.clone(), cu[1].mul_vec(&current[x1][y1]))?;
        let act_on: Vec<&str> = read.iter().map(String::as_str).collect();
        let (v_full, step) = if act_on.is_empty() {
            let f = phi0.inner(&phi1).norm();
            (
                ComplexMatrix::identity(layout.dim()),
                CompensationStep {
                    round: i,
                    act_on: Vec::new(),
                    unitary: ComplexMatrix::identity(1),
                    overlap: f,
                    complement_fidelity: f,
                },
            )
        } else {
            let v = uhlmann_unitary(&phi0, &phi1, &act_on)?;
            let moved = phi1.apply(&v, &act_on)?;
            let overlap = phi0.inner(&moved).re;
            let rest: Vec<&str> = all_names.iter().copied().filter(|n| !act_on.contains(n)).collect();
            let complement_fidelity = if rest.is_empty() {
                1.0
            } else {
                fidelity(&phi0.density().partial_trace(&rest)?, &phi1.density().partial_trace(&rest)?)?
            };
            (
                matrix_of(&layout, |_, e| apply_on_registers(&layout, e, &v, &act_on))?,
                CompensationStep {
                    round: i,
                    act_on: read.clone(),
                    unitary: v,
                    overlap,
                    complement_fidelity,
                },
            )
        };
        let mut w = [cu[0].clone(), &v_full * &cu[1]];
        if i == 1 {
            w = [&w[0] * &prep, &w[1] * &prep];
        }
        for x in 0..2 {
            for y in 0..2 {
                let s = match round.sender {
                    Party::Alice => x,
                    Party::Bob => y,
                };
                let mut v = cu[s].mul_vec(&current[x][y]);
                if s == 1 {
                    v = v_full.mul_vec(&v);
                }
                current[x][y] = v;
            }
        }
        let [w0, w1] = w;
        rounds.push(Round::new(round.sender, &all_names, vec![w0, w1]));
        steps.push(step);
    }
    if p.rounds.is_empty() && !coin_registers.is_empty() {
        return Err(Error::NotOneShot("coins declared on a protocol without rounds".into()));
    }

    let compiled = ProtocolSpec {
        registers,
        input_sizes: [2, 2],
        rounds,
        coins: CoinModel::none(),
        output: p.output.clone(),
        memoryless: true,
    };
    compiled.check()?;
    Ok(OneShotCompiled {
        compiled,
        coin_registers,
        plan: CompensationPlan { steps },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneShotReport {
    /// Largest total variation distance between base and compiled outputs.
    pub output_distance: f64,
    /// `I(X : M_i | Y=0)`-style terms of the base protocol, coins averaged.
    pub base_terms: Vec<f64>,
    /// The same terms of the compiled protocol.
    pub compiled_terms: Vec<f64>,
    /// CIC of the compiled protocol under the distribution with `(1,1)` excluded.
    pub compiled_cic_u0: f64,
    pub certificates: Vec<Certificate>,
}

impl OneShotReport {
    pub fn passes(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }
}

/// Checks output preservation, the per-round information bound
/// `I_compiled ≤ h₂(x_i/2)` and the entropy-lemma total bound.
pub fn verify_oneshot(base: &ProtocolSpec, c: &OneShotCompiled, tol: f64, cap: usize) -> Result<OneShotReport> {
    let tb = simulate_with_cap(base, cap)?;
    let tc = simulate_with_cap(&c.compiled, cap)?;
    let mut output_distance: f64 = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let (pb, pc) = (tb.output_distribution(x, y), tc.output_distribution(x, y));
            let tv: f64 = pb.iter().zip(&pc).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
            output_distance = output_distance.max(tv);
        }
    }
    let base_terms = cic0_terms_coins_averaged(base, &tb)?;
    let compiled_terms = cic0_terms(&c.compiled, &tc)?;
    let compiled_cic_u0 = cic_with_cap(&c.compiled, &u0(), cap)?.cic;

    let mut certificates = vec![Certificate::at_most("output_distance", output_distance, 0.0, tol)];
    let mut bound_sum = 0.0;
    for (i, (&x, &got)) in base_terms.iter().zip(&compiled_terms).enumerate() {
        let bound = h2((x / 2.0).clamp(0.0, 1.0));
        bound_sum += bound;
        certificates.push(Certificate::at_most(format!("round_{}_term", i + 1), got, bound, tol));
    }
    let compiled_cic0: f64 = compiled_terms.iter().sum();
    certificates.push(Certificate::at_most("compiled_cic0", compiled_cic0, bound_sum, tol));
    certificates.push(Certificate::at_most("compiled_cic_u0", compiled_cic_u0, bound_sum, tol));
    let halves: Vec<f64> = base_terms.iter().map(|x| (x / 2.0).clamp(0.0, 1.0)).collect();
    if !halves.is_empty() {
        let lemma = check_entropy_lemma(&halves, tol)?;
        certificates.push(Certificate::at_most("entropy_lemma", lemma.lhs, lemma.rhs, tol));
        certificates.push(Certificate::at_most("compiled_cic0_vs_entropy_lemma", compiled_cic0, lemma.rhs, tol));
    }
    Ok(OneShotReport {
        output_distance,
        base_terms,
        compiled_terms,
        compiled_cic_u0,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli_x;
    use crate::protocol::{Coin, OutputStage, DEFAULT_CAP};

    /// Alice sends `x ⊕ r` for a uniform coin `r`; Bob idles; Alice undoes
    /// nothing. The message is independent of `x`.
    fn masked() -> ProtocolSpec {
        let id = ComplexMatrix::identity(2);
        let x = pauli_x();
        ProtocolSpec {
            registers: vec![crate::protocol::Register::new("C", 2, Party::Alice)],
            input_sizes: [2, 2],
            rounds: vec![Round::new(Party::Alice, &["C"], vec![id.clone(), x.clone(), x, id]).with_coins(&["r"])],
            coins: CoinModel {
                mode: CoinMode::OneShot,
                coins: vec![Coin::uniform_bits("r", Party::Alice, 1)],
            },
            output: OutputStage::measure("C"),
            memoryless: true,
        }
    }

    #[test]
    fn masked_bit_becomes_coin_free() {
        let p = masked();
        let c = compile_oneshot(&p, DEFAULT_CAP).unwrap();
        assert_eq!(c.coin_registers, vec!["R~r".to_string()]);
        assert!(c.compiled.coins.coins.is_empty());
        let r = verify_oneshot(&p, &c, 1e-9, DEFAULT_CAP).unwrap();
        assert!(r.passes(), "{r:?}");
        // the base leaks nothing and the compensation is perfect
        assert!(r.base_terms[0].abs() < 1e-12);
        assert!(r.compiled_terms[0].abs() < 1e-9);
        assert!((c.plan.steps[0].overlap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn private_coins_are_rejected() {
        let mut p = masked();
        p.coins.mode = CoinMode::Private;
        assert!(matches!(compile_oneshot(&p, DEFAULT_CAP), Err(Error::NotOneShot(_))));
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(compile_oneshot(&masked(), 2), Err(Error::StateBlowup { dim: 4, cap: 2 })));
    }
}

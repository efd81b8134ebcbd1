//! Information-cost functionals of simulated protocols.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::entropy::VectorMixture;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::measures::{classical_conditional_mi, Part};
use crate::protocol::{simulate_with_cap, InputDistribution, Party, ProtocolSpec, Transcript, DEFAULT_CAP};
use crate::state::{CqEnsemble, PureState};

/// One per-round information term.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerTerm {
    /// 1-based round index.
    pub round: usize,
    pub sender: Party,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CicLedger {
    pub terms: Vec<LedgerTerm>,
    pub cic: f64,
    /// Only defined for memoryless binary-input protocols.
    pub cic0: Option<f64>,
    pub qil: f64,
    pub qcc: f64,
}

impl CicLedger {
    /// `round,sender,term_bits` rows followed by `cic`, `cic0`, `qil`, `qcc`
    /// footer rows (`cic0` left empty when undefined).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("round,sender,term_bits\n");
        for t in &self.terms {
            let _ = writeln!(s, "{},{},{:.16e}", t.round, t.sender, t.bits);
        }
        let _ = writeln!(s, "cic,,{:.16e}", self.cic);
        match self.cic0 {
            Some(v) => {
                let _ = writeln!(s, "cic0,,{v:.16e}");
            }
            None => s.push_str("cic0,,\n"),
        }
        let _ = writeln!(s, "qil,,{:.16e}", self.qil);
        let _ = writeln!(s, "qcc,,{:.16e}", self.qcc);
        s
    }
}

/// Holevo quantity `S(Σ_x p_x ρ_x) − Σ_x p_x S(ρ_x)` of the reduced states on
/// `keep`, where each `ρ_x` is a weighted mixture of vectors.
fn holevo(
    layout: &crate::state::RegisterLayout,
    groups: &[(f64, Vec<(f64, &[C64])>)],
    keep: &[usize],
) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    let mut avg = VectorMixture::new(layout);
    let mut conditional = 0.0;
    for (px, members) in groups {
        if *px <= 0.0 {
            continue;
        }
        let mut mix = VectorMixture::new(layout);
        for &(w, v) in members {
            mix.push(w, v);
            avg.push(px * w, v);
        }
        conditional += px * mix.reduced_entropy(keep)?;
    }
    Ok(avg.reduced_entropy(keep)? - conditional)
}

/// Information term of round `i` (1-based): for an Alice round
/// `I(M_i : X | Y, B_i, R_B)` (the receiver's memory `B_i` and coins `R_B`),
/// and symmetrically for Bob rounds. `mu` weights the inputs.
pub fn round_term(p: &ProtocolSpec, t: &Transcript, i: usize, mu: &InputDistribution) -> Result<f64> {
    round_term_impl(p, t, i, mu, true)
}

/// Like [`round_term`] but with every coin averaged into the states, so the
/// receiver's coins are not conditioned on.
pub fn round_term_coins_averaged(p: &ProtocolSpec, t: &Transcript, i: usize, mu: &InputDistribution) -> Result<f64> {
    round_term_impl(p, t, i, mu, false)
}

fn round_term_impl(
    p: &ProtocolSpec,
    t: &Transcript,
    i: usize,
    mu: &InputDistribution,
    condition_receiver_coins: bool,
) -> Result<f64> {
    let round = &p.rounds[i - 1];
    let sender = round.sender;
    let receiver = sender.other();
    let layout = t.layout();
    let held_after = p.held_by(receiver, i);
    let memory: Vec<&String> = held_after.iter().filter(|n| !round.sends.contains(n)).collect();
    let with_message = layout.positions(&held_after)?;
    let memory_only = layout.positions(&memory)?;

    // Receiver coins are conditioned on, sender coins averaged.
    let receiver_coins: Vec<usize> = p
        .coins
        .coins
        .iter()
        .enumerate()
        .filter(|(_, c)| condition_receiver_coins && c.owner == receiver)
        .map(|(j, _)| j)
        .collect();
    let mut by_receiver_coins: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for c in 0..t.coin_space() {
        let digits = t.coin_digits(c);
        let key = receiver_coins.iter().map(|&j| digits[j]).collect();
        by_receiver_coins.entry(key).or_default().push(c);
    }

    let sizes = t.input_sizes();
    let (ns, nr) = (sizes[sender.input_slot()], sizes[receiver.input_slot()]);
    let state = |s: usize, r: usize, c: usize| -> &[C64] {
        match sender {
            Party::Alice => t.state(s, r, c, i),
            Party::Bob => t.state(r, s, c, i),
        }
    };
    let mut total = 0.0;
    for r in 0..nr {
        let Some(cond) = mu.conditional(sender, r) else {
            continue;
        };
        let pr = mu.marginal(receiver)[r];
        for coins in by_receiver_coins.values() {
            let p_rc: f64 = coins.iter().map(|&c| t.coin_prob(c)).sum();
            if p_rc <= 0.0 {
                continue;
            }
            let groups: Vec<(f64, Vec<(f64, &[C64])>)> = (0..ns)
                .map(|s| {
                    let members = coins.iter().map(|&c| (t.coin_prob(c) / p_rc, state(s, r, c))).collect();
                    (cond[s], members)
                })
                .collect();
            let term = holevo(layout, &groups, &with_message)? - holevo(layout, &groups, &memory_only)?;
            total += pr * p_rc * term;
        }
    }
    Ok(total)
}

/// Per-round CIC terms under `mu`.
pub fn cic_terms(p: &ProtocolSpec, t: &Transcript, mu: &InputDistribution) -> Result<Vec<LedgerTerm>> {
    (1..=p.num_rounds())
        .map(|i| {
            Ok(LedgerTerm {
                round: i,
                sender: p.rounds[i - 1].sender,
                bits: round_term(p, t, i, mu)?,
            })
        })
        .collect()
}

fn check_binary_memoryless(p: &ProtocolSpec) -> Result<()> {
    if !p.is_binary() {
        return Err(Error::RequiresBinaryInputs);
    }
    if !p.memoryless {
        return Err(Error::RequiresMemoryless);
    }
    Ok(())
}

/// Terms `I(M_i : X | Y=0)` (Alice rounds) and `I(M_i : Y | X=0)` (Bob
/// rounds) with the sender's bit uniform.
pub fn cic0_terms(p: &ProtocolSpec, t: &Transcript) -> Result<Vec<f64>> {
    cic0_terms_impl(p, t, round_term)
}

/// [`cic0_terms`] with all coins averaged (not conditioned on).
pub fn cic0_terms_coins_averaged(p: &ProtocolSpec, t: &Transcript) -> Result<Vec<f64>> {
    cic0_terms_impl(p, t, round_term_coins_averaged)
}

fn cic0_terms_impl(
    p: &ProtocolSpec,
    t: &Transcript,
    term: fn(&ProtocolSpec, &Transcript, usize, &InputDistribution) -> Result<f64>,
) -> Result<Vec<f64>> {
    check_binary_memoryless(p)?;
    let receiver_zero_alice = InputDistribution::new([2, 2], vec![0.5, 0.0, 0.5, 0.0])?;
    let receiver_zero_bob = InputDistribution::new([2, 2], vec![0.5, 0.5, 0.0, 0.0])?;
    (1..=p.num_rounds())
        .map(|i| {
            let mu = match p.rounds[i - 1].sender {
                Party::Alice => &receiver_zero_alice,
                Party::Bob => &receiver_zero_bob,
            };
            term(p, t, i, mu)
        })
        .collect()
}

/// `Σ_odd I(X : M_i B_i | Y) + Σ_even I(Y : M_i A_i | X)`, evaluated on
/// explicit classical-quantum density operators (coins averaged into the
/// states). Independent of [`round_term`]'s vector-mixture route.
pub fn qil_from_transcript(p: &ProtocolSpec, t: &Transcript, mu: &InputDistribution) -> Result<f64> {
    let layout = t.layout();
    let [nx, ny] = t.input_sizes();
    let mut total = 0.0;
    for i in 1..=p.num_rounds() {
        let sender = p.rounds[i - 1].sender;
        let held = p.held_by(sender.other(), i);
        let mut branches = Vec::new();
        for x in 0..nx {
            for y in 0..ny {
                for c in 0..t.coin_space() {
                    let w = mu.prob(x, y) * t.coin_prob(c);
                    if w == 0.0 {
                        continue;
                    }
                    let psi = PureState::new(layout.clone(), t.state(x, y, c, i).to_vec())?;
                    branches.push((vec![x, y, c], w, psi.density().partial_trace(&held)?));
                }
            }
        }
        let ens = CqEnsemble::new(branches)?;
        let (input, cond) = match sender {
            Party::Alice => (0, 1),
            Party::Bob => (1, 0),
        };
        let regs: Vec<Part> = held.iter().map(|n| Part::reg(n)).collect();
        total += classical_conditional_mi(&ens, &[Part::Label(input)], &regs, &[cond])?;
    }
    Ok(total)
}

/// Full ledger of `p` under `mu`.
pub fn cic(p: &ProtocolSpec, mu: &InputDistribution) -> Result<CicLedger> {
    cic_with_cap(p, mu, DEFAULT_CAP)
}

pub fn cic_with_cap(p: &ProtocolSpec, mu: &InputDistribution, cap: usize) -> Result<CicLedger> {
    let t = simulate_with_cap(p, cap)?;
    ledger_from_transcript(p, &t, mu)
}

pub fn ledger_from_transcript(p: &ProtocolSpec, t: &Transcript, mu: &InputDistribution) -> Result<CicLedger> {
    if mu.sizes() != p.input_sizes {
        return Err(Error::InvalidDistribution(format!(
            "distribution over {:?} for a protocol with alphabets {:?}",
            mu.sizes(),
            p.input_sizes
        )));
    }
    let terms = cic_terms(p, t, mu)?;
    let cic = terms.iter().map(|t| t.bits).sum();
    let cic0 = match cic0_terms(p, t) {
        Ok(v) => Some(v.iter().sum()),
        Err(Error::RequiresBinaryInputs | Error::RequiresMemoryless) => None,
        Err(e) => return Err(e),
    };
    Ok(CicLedger {
        terms,
        cic,
        cic0,
        qil: qil_from_transcript(p, t, mu)?,
        qcc: p.qcc(),
    })
}

/// `Σ_i I(M_i : X | Y=0) + …` for a memoryless binary-input protocol.
pub fn cic0(p: &ProtocolSpec) -> Result<f64> {
    check_binary_memoryless(p)?;
    let t = simulate_with_cap(p, DEFAULT_CAP)?;
    Ok(cic0_terms(p, &t)?.iter().sum())
}

/// Quantum information loss of `p` under `mu`.
pub fn qil(p: &ProtocolSpec, mu: &InputDistribution) -> Result<f64> {
    let t = simulate_with_cap(p, DEFAULT_CAP)?;
    qil_from_transcript(p, &t, mu)
}

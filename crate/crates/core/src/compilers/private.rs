//! Privacy compiler: run the base protocol under a quantum one-time pad,
//! hand every register back and forth encrypted, and reveal only the output
//! once the two players confirm they used the same pad keys.
//!
//! The compiled protocol is not a plain round protocol (it ends with a
//! classical key check and a restart on mismatch), so it is kept as the
//! preprocessed base plus its key schedule and verified by enumerating key
//! branches directly. The restart is analyzed rather than executed: every
//! repetition before the successful one contributes terms that are certified
//! to be zero.

use crate::entropy::{shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::protocol::{
    simulate_with_cap, CoinMode, InputDistribution, OutputStage, Party, ProtocolSpec, Register, Round,
};
use crate::state::{apply_on_registers, DensityOperator, RegisterLayout};

use super::qotp::{block_qubits, decrypt_vec, encrypt_vec, QotpKey};
use super::Certificate;

/// Default cap on the number of qubits of the compiled protocol.
pub const DEFAULT_WIDTH_CAP: usize = 5;
/// Cap on the number of key bits enumerated for one verification step.
pub const MAX_BRANCH_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateCompiled {
    /// The protocol as given.
    pub original: ProtocolSpec,
    /// The protocol after the output-copy preprocessing; this is what runs
    /// under encryption.
    pub base: ProtocolSpec,
    pub copy_register: String,
    /// Registers encrypted and sent in round `i` (index `i − 1`).
    pub blocks: Vec<Vec<String>>,
    /// Lengths of `t_A^i = t_B^i`.
    pub round_key_bits: Vec<usize>,
    /// Length of Bob's final pad (every qubit).
    pub s_b_bits: usize,
    /// Length of Alice's final pad (every qubit except the output).
    pub s_a_bits: usize,
}

/// Alice sends her input in a qubit `M`; Bob writes `f(m, y)` into his
/// output qubit `O`.
pub fn send_input_protocol(f: impl Fn(usize, usize) -> usize) -> ProtocolSpec {
    let id = ComplexMatrix::identity(2);
    let x = crate::linalg::pauli_x();
    let finals = (0..2)
        .map(|y| {
            // basis |m, o⟩ ↦ |m, o ⊕ f(m, y)⟩
            ComplexMatrix::from_fn(4, 4, |row, col| {
                let (m, o) = (col >> 1, col & 1);
                let target = (m << 1) | (o ^ (f(m, y) & 1));
                if row == target {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    ProtocolSpec {
        registers: vec![Register::new("M", 2, Party::Alice), Register::new("O", 2, Party::Bob)],
        input_sizes: [2, 2],
        rounds: vec![Round::new(Party::Alice, &["M"], vec![id, x])],
        coins: crate::protocol::CoinModel::none(),
        output: OutputStage {
            register: "O".into(),
            acts_on: vec!["M".into(), "O".into()],
            unitaries: finals,
        },
        memoryless: false,
    }
}

fn unsupported(msg: impl Into<String>) -> Error {
    Error::UnsupportedOutput(msg.into())
}

/// Matrix of an operation on the sub-layout `sub`, given as a map on vectors.
fn operator_on(sub: &RegisterLayout, f: impl Fn(&[C64]) -> Result<Vec<C64>>) -> Result<ComplexMatrix> {
    let d = sub.dim();
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![C64::new(0.0, 0.0); d];
        e[j] = C64::new(1.0, 0.0);
        cols.push(f(&e)?);
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.])
        .expect("static matrix")
}

/// Builds the private version of a coin-free base protocol whose output is
/// a single qubit and whose registers are all made of qubits.
pub fn compile_private(base: &ProtocolSpec) -> Result<PrivateCompiled> {
    base.check()?;
    if base.coins.mode != CoinMode::None || !base.coins.coins.is_empty() {
        return Err(Error::InvalidProtocol("the privacy compiler needs a coin-free base".into()));
    }
    let out = base.output.register.clone();
    let out_dim = base.register(&out).map(|r| r.dim).unwrap_or(0);
    if out_dim != 2 {
        return Err(unsupported(format!("output register `{out}` has dimension {out_dim}, not a single qubit")));
    }
    if let Some(r) = base.registers.iter().find(|r| !r.dim.is_power_of_two()) {
        return Err(unsupported(format!("register `{}` of dimension {} is not made of qubits", r.name, r.dim)));
    }

    let mut copy = format!("{out}_copy");
    while base.register(&copy).is_some() {
        copy.push('\'');
    }
    let mut pre = base.clone();
    pre.registers.push(Register::new(&copy, 2, Party::Bob));
    pre.memoryless = false;
    let layout = pre.layout()?;
    let mut union: Vec<String> = base.output.acts_on.clone();
    for name in [&out, &copy] {
        if !union.contains(name) {
            union.push(name.clone());
        }
    }
    let mut positions = layout.positions(&union)?;
    positions.sort_unstable();
    let sub = layout.select(&positions);
    let union: Vec<String> = sub.names().map(str::to_string).collect();
    let base_acts: Vec<&str> = base.output.acts_on.iter().map(String::as_str).collect();
    let mut finals = Vec::with_capacity(base.input_sizes[1]);
    for y in 0..base.input_sizes[1] {
        finals.push(operator_on(&sub, |v| {
            let v = if base.output.unitaries.is_empty() {
                v.to_vec()
            } else {
                apply_on_registers(&sub, v, &base.output.unitaries[y], &base_acts)?
            };
            // the output register precedes its copy in layout order
            apply_on_registers(&sub, &v, &cnot(), &[out.as_str(), copy.as_str()])
        })?);
    }
    pre.output = OutputStage {
        register: out.clone(),
        acts_on: union,
        unitaries: finals,
    };
    pre.check()?;

    let all: Vec<String> = pre.registers.iter().map(|r| r.name.clone()).collect();
    let first: Vec<String> = pre.held_by(Party::Alice, 0);
    let blocks: Vec<Vec<String>> = (1..=pre.num_rounds())
        .map(|i| if i == 1 { first.clone() } else { all.clone() })
        .collect();
    let round_key_bits = blocks
        .iter()
        .map(|b| block_qubits(&layout, b).map(|q| 2 * q))
        .collect::<Result<Vec<_>>>()?;
    let total = block_qubits(&layout, &all)?;
    Ok(PrivateCompiled {
        original: base.clone(),
        base: pre,
        copy_register: copy,
        blocks,
        round_key_bits,
        s_b_bits: 2 * total,
        s_a_bits: 2 * (total - 1),
    })
}

/// Key material of one branch. Unused entries are zero.
#[derive(Debug, Clone, Default)]
struct Keys {
    t_a: Vec<u64>,
    t_b: Vec<u64>,
    s_b: u64,
    s_a: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    /// After the encryption of round `i` (1-based).
    Round(usize),
    /// After Bob's `s_B` encryption of every register.
    SentBack,
    /// After Alice's `s_A` encryption (keys matched).
    Final,
}

struct Runner<'a> {
    c: &'a PrivateCompiled,
    layout: RegisterLayout,
    all: Vec<&'a str>,
    all_but_output: Vec<&'a str>,
    acts: Vec<Vec<&'a str>>,
    blocks: Vec<Vec<&'a str>>,
    out_acts: Vec<&'a str>,
}

impl<'a> Runner<'a> {
    fn new(c: &'a PrivateCompiled) -> Result<Self> {
        let layout = c.base.layout()?;
        let all: Vec<&str> = c.base.registers.iter().map(|r| r.name.as_str()).collect();
        let all_but_output = all.iter().copied().filter(|n| *n != c.base.output.register).collect();
        Ok(Self {
            layout,
            all,
            all_but_output,
            acts: c
                .base
                .rounds
                .iter()
                .map(|r| r.acts_on.iter().map(String::as_str).collect())
                .collect(),
            blocks: c.blocks.iter().map(|b| b.iter().map(String::as_str).collect()).collect(),
            out_acts: c.base.output.acts_on.iter().map(String::as_str).collect(),
            c,
        })
    }

    fn key(&self, value: u64, bits: usize) -> QotpKey {
        QotpKey::from_index(value, bits)
    }

    fn run(&self, x: usize, y: usize, keys: &Keys, stage: Stage) -> Result<Vec<C64>> {
        let c = self.c;
        let l = &self.layout;
        let mut v = vec![C64::new(0.0, 0.0); l.dim()];
        v[0] = C64::new(1.0, 0.0);
        for (idx, round) in c.base.rounds.iter().enumerate() {
            let i = idx + 1;
            let (own, input) = match round.sender {
                Party::Alice => (&keys.t_a, x),
                Party::Bob => (&keys.t_b, y),
            };
            if i >= 2 {
                let prev = self.key(own[idx - 1], c.round_key_bits[idx - 1]);
                v = decrypt_vec(l, &v, &prev, &self.blocks[idx - 1])?;
            }
            v = apply_on_registers(l, &v, &round.unitaries[input], &self.acts[idx])?;
            v = encrypt_vec(l, &v, &self.key(own[idx], c.round_key_bits[idx]), &self.blocks[idx])?;
            if stage == Stage::Round(i) {
                return Ok(v);
            }
        }
        let k = c.base.num_rounds();
        if k > 0 {
            let last = self.key(keys.t_b[k - 1], c.round_key_bits[k - 1]);
            v = decrypt_vec(l, &v, &last, &self.blocks[k - 1])?;
        }
        v = apply_on_registers(l, &v, &c.base.output.unitaries[y], &self.out_acts)?;
        v = encrypt_vec(l, &v, &self.key(keys.s_b, c.s_b_bits), &self.all)?;
        if stage == Stage::SentBack {
            return Ok(v);
        }
        encrypt_vec(l, &v, &self.key(keys.s_a, c.s_a_bits), &self.all_but_output)
    }

    /// Bob's view of the output qubit after undoing his own pad on it.
    fn output_distribution(&self, final_state: &[C64], keys: &Keys) -> Result<Vec<f64>> {
        let l = &self.layout;
        let out = self.c.base.output.register.as_str();
        let v = decrypt_vec(l, final_state, &self.key(keys.s_b, self.c.s_b_bits), &self.all)?;
        // Bob removed his pad from every register; Alice's pad on the rest
        // does not touch the output qubit.
        let pos = l.position(out).expect("output register");
        let mut probs = vec![0.0; 2];
        for (idx, a) in v.iter().enumerate() {
            probs[l.digits(idx)[pos]] += a.norm_sqr();
        }
        Ok(probs)
    }
}

/// Everything the privacy verifier measured.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateReport {
    /// CIC term of each round of the encrypted run.
    pub round_terms: Vec<f64>,
    /// Bob's `s_B`-encrypted hand-back of every register.
    pub send_back_term: f64,
    /// Bob revealing `t_B`.
    pub key_reveal_term: f64,
    /// Alice's one-bit match answer.
    pub match_term: f64,
    /// Alice's final message on the matched branch.
    pub final_term: f64,
    pub total_cic: f64,
    /// `I(Π_out(X,Y) : X | Y)` of the base protocol.
    pub output_information: f64,
    /// Largest distance (max entry) of a sent block from maximally mixed,
    /// after averaging over the sender's keys.
    pub max_mixing_defect: f64,
    /// Largest difference between receiver states for different sender inputs.
    pub max_input_dependence: f64,
    /// Largest deviation of a matched-branch output probability from the base.
    pub output_deviation: f64,
}

impl PrivateReport {
    pub fn certificates(&self, tol: f64) -> Vec<Certificate> {
        let mut certs: Vec<Certificate> = self
            .round_terms
            .iter()
            .enumerate()
            .map(|(i, &t)| Certificate::at_most(format!("round_{}_term", i + 1), t, 0.0, tol))
            .collect();
        certs.push(Certificate::at_most("send_back_term", self.send_back_term, 0.0, tol));
        certs.push(Certificate::at_most("key_reveal_term", self.key_reveal_term, 0.0, tol));
        certs.push(Certificate::at_most("match_term", self.match_term, 0.0, tol));
        certs.push(Certificate::at_most("max_mixing_defect", self.max_mixing_defect, 0.0, tol));
        certs.push(Certificate::at_most("max_input_dependence", self.max_input_dependence, 0.0, tol));
        certs.push(Certificate::at_most("matched_output_deviation", self.output_deviation, 0.0, 1e-12));
        certs.push(Certificate::at_most(
            "total_cic_minus_output_information",
            (self.total_cic - self.output_information).abs(),
            0.0,
            tol,
        ));
        certs
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.certificates(tol).iter().all(|c| c.pass)
    }
}

/// A receiver-side conditioning class: the sender's inputs with their
/// conditional probabilities, each with the vectors (uniformly weighted)
/// over the sender's unknown keys.
struct Group {
    weight: f64,
    per_input: Vec<(f64, Vec<Vec<C64>>)>,
}

fn mixture(layout: &RegisterLayout, vs: &[Vec<C64>]) -> Result<DensityOperator> {
    let d = layout.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    let w = 1.0 / vs.len() as f64;
    for v in vs {
        for i in 0..d {
            if v[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..d {
                m[(i, j)] += v[i] * v[j].conj() * w;
            }
        }
    }
    DensityOperator::new_unchecked(layout.clone(), m)
}

#[derive(Default)]
struct GroupStats {
    term: f64,
    mixing_defect: f64,
    input_dependence: f64,
}

/// `Σ_groups weight · χ(sender input : receiver's quantum state)`, plus the
/// privacy diagnostics when `block` is given.
fn evaluate(layout: &RegisterLayout, groups: &[Group], block: Option<&[&str]>) -> Result<GroupStats> {
    let mut stats = GroupStats::default();
    for g in groups {
        let mut states = Vec::with_capacity(g.per_input.len());
        for (p, vs) in &g.per_input {
            if *p > 0.0 {
                states.push((*p, mixture(layout, vs)?));
            }
        }
        let parts: Vec<(f64, &DensityOperator)> = states.iter().map(|(p, r)| (*p, r)).collect();
        let avg = DensityOperator::mixture(&parts)?;
        let mut chi = von_neumann_entropy(&avg)?;
        for (p, rho) in &states {
            chi -= p * von_neumann_entropy(rho)?;
            stats.input_dependence = stats.input_dependence.max(rho.matrix().max_abs_diff(avg.matrix()));
            if let Some(block) = block {
                let reduced = rho.partial_trace(block)?;
                let d = reduced.layout().dim();
                let mixed = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
                stats.mixing_defect = stats.mixing_defect.max(reduced.matrix().max_abs_diff(&mixed));
            }
        }
        stats.term += g.weight * chi;
    }
    Ok(stats)
}

fn split_bits(mut value: u64, sizes: &[usize]) -> Vec<u64> {
    let mut out = vec![0; sizes.len()];
    for (slot, &bits) in out.iter_mut().zip(sizes).rev() {
        *slot = value & ((1u64 << bits) - 1);
        value >>= bits;
    }
    out
}

fn check_bits(bits: usize) -> Result<()> {
    if bits > MAX_BRANCH_BITS {
        return Err(Error::StateBlowup {
            dim: 1usize << bits.min(62),
            cap: 1usize << MAX_BRANCH_BITS,
        });
    }
    Ok(())
}

/// Classical `I(out : X | Y)` of a protocol's output under `mu`.
pub fn output_information(base: &ProtocolSpec, mu: &InputDistribution) -> Result<f64> {
    let t = simulate_with_cap(base, usize::MAX)?;
    let [nx, ny] = base.input_sizes;
    let mut total = 0.0;
    for y in 0..ny {
        let Some(px) = mu.conditional(Party::Alice, y) else { continue };
        let py = mu.marginal(Party::Bob)[y];
        let dists: Vec<Vec<f64>> = (0..nx).map(|x| t.output_distribution(x, y)).collect();
        let mut mixed = vec![0.0; dists[0].len()];
        let mut conditional = 0.0;
        for x in 0..nx {
            for (m, q) in mixed.iter_mut().zip(&dists[x]) {
                *m += px[x] * q;
            }
            conditional += px[x] * shannon_entropy(&dists[x]);
        }
        total += py * (shannon_entropy(&mixed) - conditional);
    }
    Ok(total)
}

/// Verifies the privacy compiler on `c` under `mu` by exhaustive key
/// enumeration; fails with `StateBlowup` when the compiled protocol is
/// wider than `width_cap` qubits or a step needs too many key branches.
pub fn verify_private(c: &PrivateCompiled, mu: &InputDistribution, width_cap: usize) -> Result<PrivateReport> {
    let runner = Runner::new(c)?;
    let width = c.s_b_bits / 2;
    if width > width_cap {
        return Err(Error::StateBlowup {
            dim: 1usize << width.min(62),
            cap: 1usize << width_cap.min(62),
        });
    }
    if mu.sizes() != c.base.input_sizes {
        return Err(Error::InvalidDistribution("distribution does not match the protocol's alphabets".into()));
    }
    let layout = runner.layout.clone();
    let k = c.base.num_rounds();
    let [nx, ny] = c.base.input_sizes;
    let all_keys_bits: usize = c.round_key_bits.iter().sum();

    // Encrypted rounds.
    let mut round_terms = Vec::with_capacity(k);
    let mut mixing_defect: f64 = 0.0;
    let mut input_dependence: f64 = 0.0;
    for i in 1..=k {
        let sender = c.base.rounds[i - 1].sender;
        let receiver = sender.other();
        let sender_sizes = &c.round_key_bits[..i];
        let receiver_sizes = &c.round_key_bits[..i - 1];
        let (sb, rb): (usize, usize) = (sender_sizes.iter().sum(), receiver_sizes.iter().sum());
        check_bits(sb + rb)?;
        let (ns, nr) = (c.base.input_size(sender), c.base.input_size(receiver));
        let mut groups = Vec::new();
        for r in 0..nr {
            let Some(cond) = mu.conditional(sender, r) else { continue };
            let pr = mu.marginal(receiver)[r];
            for rk in 0..(1u64 << rb) {
                let mut per_input = Vec::with_capacity(ns);
                for (s, &ps) in cond.iter().enumerate() {
                    let mut vs = Vec::new();
                    if ps > 0.0 {
                        for sk in 0..(1u64 << sb) {
                            let mut own = split_bits(sk, sender_sizes);
                            own.resize(k, 0);
                            let mut other = split_bits(rk, receiver_sizes);
                            other.resize(k, 0);
                            let keys = match sender {
                                Party::Alice => Keys { t_a: own, t_b: other, ..Keys::default() },
                                Party::Bob => Keys { t_a: other, t_b: own, ..Keys::default() },
                            };
                            let (x, y) = if sender == Party::Alice { (s, r) } else { (r, s) };
                            vs.push(runner.run(x, y, &keys, Stage::Round(i))?);
                        }
                    }
                    per_input.push((ps, vs));
                }
                groups.push(Group {
                    weight: pr / (1u64 << rb) as f64,
                    per_input,
                });
            }
        }
        let block: Vec<&str> = runner.blocks[i - 1].clone();
        let stats = evaluate(&layout, &groups, Some(&block))?;
        round_terms.push(stats.term);
        mixing_defect = mixing_defect.max(stats.mixing_defect);
        input_dependence = input_dependence.max(stats.input_dependence);
    }

    // Bob hands every register back under s_B; Alice knows x and t_A. The
    // key reveal term refines the conditioning by t_B.
    check_bits(2 * all_keys_bits + c.s_b_bits)?;
    let sent_back = |t_b_fixed: Option<u64>| -> Result<Vec<Group>> {
        let mut groups = Vec::new();
        let t_b_range: Vec<u64> = match t_b_fixed {
            Some(v) => vec![v],
            None => (0..(1u64 << all_keys_bits)).collect(),
        };
        for x in 0..nx {
            let Some(cond) = mu.conditional(Party::Bob, x) else { continue };
            let px = mu.marginal(Party::Alice)[x];
            for ta in 0..(1u64 << all_keys_bits) {
                let mut per_input = Vec::with_capacity(ny);
                for (y, &py) in cond.iter().enumerate() {
                    let mut vs = Vec::new();
                    if py > 0.0 {
                        for &tb in &t_b_range {
                            for sbk in 0..(1u64 << c.s_b_bits) {
                                let keys = Keys {
                                    t_a: split_bits(ta, &c.round_key_bits),
                                    t_b: split_bits(tb, &c.round_key_bits),
                                    s_b: sbk,
                                    s_a: 0,
                                };
                                vs.push(runner.run(x, y, &keys, Stage::SentBack)?);
                            }
                        }
                    }
                    per_input.push((py, vs));
                }
                groups.push(Group {
                    weight: px / (1u64 << all_keys_bits) as f64,
                    per_input,
                });
            }
        }
        Ok(groups)
    };
    let all_refs: Vec<&str> = runner.all.clone();
    let back = evaluate(&layout, &sent_back(None)?, Some(&all_refs))?;
    mixing_defect = mixing_defect.max(back.mixing_defect);
    input_dependence = input_dependence.max(back.input_dependence);
    let mut refined = 0.0;
    let n_tb = 1u64 << all_keys_bits;
    for tb in 0..n_tb {
        refined += evaluate(&layout, &sent_back(Some(tb))?, None)?.term / n_tb as f64;
    }
    let key_reveal_term = refined - back.term;

    // Alice's match bit: Bob knows (y, t_B, s_B) and no quantum register.
    // Its distribution given x is that of [t_A = t_B] with t_A uniform.
    let mut match_term = 0.0;
    for y in 0..ny {
        let Some(cond) = mu.conditional(Party::Alice, y) else { continue };
        let py = mu.marginal(Party::Bob)[y];
        for tb in 0..n_tb {
            let per_x: Vec<f64> = (0..nx)
                .map(|_| (0..n_tb).filter(|&ta| ta == tb).count() as f64 / n_tb as f64)
                .collect();
            let avg: f64 = per_x.iter().zip(&cond).map(|(q, p)| p * q).sum();
            let cond_h: f64 = per_x.iter().zip(&cond).map(|(q, p)| p * shannon_entropy(&[*q, 1.0 - q])).sum();
            match_term += py / n_tb as f64 * (shannon_entropy(&[avg, 1.0 - avg]) - cond_h);
        }
    }

    // Matched branch: Alice pads everything but the output and hands it all
    // to Bob, who knows (y, t, s_B).
    check_bits(all_keys_bits + c.s_b_bits + c.s_a_bits)?;
    let mut final_groups = Vec::new();
    let mut output_deviation: f64 = 0.0;
    let base_t = simulate_with_cap(&c.original, usize::MAX)?;
    for y in 0..ny {
        let Some(cond) = mu.conditional(Party::Alice, y) else { continue };
        let py = mu.marginal(Party::Bob)[y];
        for t in 0..n_tb {
            for sbk in 0..(1u64 << c.s_b_bits) {
                let mut per_input = Vec::with_capacity(nx);
                for (x, &px) in cond.iter().enumerate() {
                    let mut vs = Vec::new();
                    if px > 0.0 {
                        for sak in 0..(1u64 << c.s_a_bits) {
                            let keys = Keys {
                                t_a: split_bits(t, &c.round_key_bits),
                                t_b: split_bits(t, &c.round_key_bits),
                                s_b: sbk,
                                s_a: sak,
                            };
                            let v = runner.run(x, y, &keys, Stage::Final)?;
                            let got = runner.output_distribution(&v, &keys)?;
                            let want = base_t.output_distribution(x, y);
                            for (g, w) in got.iter().zip(&want) {
                                output_deviation = output_deviation.max((g - w).abs());
                            }
                            vs.push(v);
                        }
                    }
                    per_input.push((px, vs));
                }
                final_groups.push(Group {
                    weight: py / (n_tb << c.s_b_bits) as f64,
                    per_input,
                });
            }
        }
    }
    let final_term = evaluate(&layout, &final_groups, None)?.term;

    let total_cic = round_terms.iter().sum::<f64>() + back.term + key_reveal_term + match_term + final_term;
    Ok(PrivateReport {
        round_terms,
        send_back_term: back.term,
        key_reveal_term,
        match_term,
        final_term,
        total_cic,
        output_information: output_information(&c.original, mu)?,
        max_mixing_defect: mixing_defect,
        max_input_dependence: input_dependence,
        output_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{and, u0};

    #[test]
    fn key_lengths_follow_the_construction() {
        let c = compile_private(&send_input_protocol(and)).unwrap();
        // one message qubit in round 1; M, O and the copy at the end
        assert_eq!(c.round_key_bits, vec![2]);
        assert_eq!(c.s_b_bits, 6);
        assert_eq!(c.s_a_bits, 4);
        assert_eq!(c.copy_register, "O_copy");
    }

    #[test]
    fn wide_output_is_rejected() {
        let mut p = send_input_protocol(and);
        p.registers[1].dim = 4;
        p.output.unitaries = vec![ComplexMatrix::identity(8); 2];
        assert!(matches!(compile_private(&p), Err(Error::UnsupportedOutput(_))));
    }

    #[test]
    fn width_cap_is_enforced() {
        let c = compile_private(&send_input_protocol(and)).unwrap();
        assert!(matches!(verify_private(&c, &u0(), 2), Err(Error::StateBlowup { .. })));
    }

    #[test]
    fn constant_output_leaks_nothing() {
        let c = compile_private(&send_input_protocol(|_, _| 0)).unwrap();
        let r = verify_private(&c, &InputDistribution::uniform([2, 2]), DEFAULT_WIDTH_CAP).unwrap();
        assert!(r.total_cic.abs() < 1e-9, "{r:?}");
        assert!(r.passes(1e-9));
    }

    #[test]
    fn and_through_the_compiler() {
        let c = compile_private(&send_input_protocol(and)).unwrap();
        let r = verify_private(&c, &u0(), DEFAULT_WIDTH_CAP).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        assert!(r.total_cic.abs() < 1e-9);
        let r = verify_private(&c, &InputDistribution::uniform([2, 2]), DEFAULT_WIDTH_CAP).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        assert!((r.total_cic - 0.5).abs() < 1e-9);
        assert!((r.final_term - 0.5).abs() < 1e-9);
    }
}

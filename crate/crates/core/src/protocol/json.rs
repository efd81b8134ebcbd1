//! The protocol file format.
//!
//! ```json
//! {
//!   "registers": [{"name": "C", "dim": 2}],
//!   "rounds": [{"sender": "alice", "unitaries": {"0": [[1,0],[0,0],[0,0],[1,0]], "1": ...}}],
//!   "coin_model": {"mode": "none"},
//!   "output_register": "C",
//!   "memoryless": true
//! }
//! ```
//!
//! Matrices are row-major lists of `[re, im]` pairs. Unitary keys are the
//! sender's input `"x"`, or `"x,c"` when the round reads coins (`c` is the
//! joint value of the round's coins, first coin most significant).
//!
//! Optional fields: `inputs` (alphabet sizes, default `[2, 2]`), a register's
//! `holder` (default `"alice"`), a round's `acts_on` (default: everything
//! the sender holds), `sends` (default: `acts_on`) and `coins`, and Bob's
//! `output_unitaries` (keyed by `y`) acting on `output_acts_on`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

use super::model::{Coin, CoinMode, CoinModel, OutputStage, Party, ProtocolSpec, Register, Round};

type MatrixFile = Vec<[f64; 2]>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolFile {
    registers: Vec<RegisterFile>,
    #[serde(default = "default_inputs")]
    inputs: [usize; 2],
    rounds: Vec<RoundFile>,
    #[serde(default)]
    coin_model: Option<CoinModelFile>,
    output_register: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    output_acts_on: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    output_unitaries: BTreeMap<String, MatrixFile>,
    memoryless: bool,
}

fn default_inputs() -> [usize; 2] {
    [2, 2]
}

fn default_holder() -> Party {
    Party::Alice
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterFile {
    name: String,
    dim: usize,
    #[serde(default = "default_holder")]
    holder: Party,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoundFile {
    sender: Party,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    acts_on: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sends: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    coins: Vec<String>,
    unitaries: BTreeMap<String, MatrixFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoinModelFile {
    mode: CoinMode,
    #[serde(default)]
    coins: Vec<CoinFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoinFile {
    name: String,
    owner: Party,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<Vec<f64>>,
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn matrix_from_file(path: &str, entries: &MatrixFile) -> Result<ComplexMatrix> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != entries.len() {
        return Err(parse_err(path, format!("{} entries do not form a square matrix", entries.len())));
    }
    let data = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    ComplexMatrix::new(n, n, data).map_err(|e| parse_err(path, e.to_string()))
}

fn matrix_to_file(m: &ComplexMatrix) -> MatrixFile {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

/// Parses a protocol; errors name the offending JSON path.
pub fn from_json_str(text: &str) -> Result<ProtocolSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ProtocolFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_err(path, e.into_inner().to_string())
    })?;
    from_file(file)
}

fn from_file(file: ProtocolFile) -> Result<ProtocolSpec> {
    let registers: Vec<Register> = file
        .registers
        .iter()
        .map(|r| Register::new(&r.name, r.dim, r.holder))
        .collect();

    let coins = match file.coin_model {
        None => CoinModel::none(),
        Some(m) => {
            let mut coins = Vec::with_capacity(m.coins.len());
            for (j, c) in m.coins.into_iter().enumerate() {
                let path = format!("coin_model.coins[{j}]");
                let coin = match (c.bits, c.probs) {
                    (Some(_), Some(_)) => return Err(parse_err(path, "give either `bits` or `probs`, not both")),
                    (None, None) => return Err(parse_err(path, "missing `bits` or `probs`")),
                    (Some(b), None) if b > 12 => return Err(parse_err(path + ".bits", "at most 12 bits per coin")),
                    (Some(b), None) => Coin::uniform_bits(&c.name, c.owner, b),
                    (None, Some(probs)) => Coin {
                        name: c.name,
                        owner: c.owner,
                        probs,
                    },
                };
                coins.push(coin);
            }
            CoinModel { mode: m.mode, coins }
        }
    };

    // Track holders to fill in default `acts_on`.
    let mut holders: BTreeMap<String, Party> = registers.iter().map(|r| (r.name.clone(), r.holder)).collect();
    let mut rounds = Vec::with_capacity(file.rounds.len());
    for (i, rf) in file.rounds.into_iter().enumerate() {
        let acts_on = rf.acts_on.unwrap_or_else(|| {
            registers
                .iter()
                .filter(|r| holders.get(&r.name) == Some(&rf.sender))
                .map(|r| r.name.clone())
                .collect()
        });
        let sends = rf.sends.unwrap_or_else(|| acts_on.clone());
        for name in &sends {
            if holders.contains_key(name) {
                holders.insert(name.clone(), rf.sender.other());
            }
        }
        let coin_space: usize = rf
            .coins
            .iter()
            .map(|c| coins.position(c).map_or(1, |j| coins.coins[j].values()))
            .product();
        let inputs = file.inputs[rf.sender.input_slot()];
        let mut unitaries = Vec::with_capacity(inputs * coin_space);
        for x in 0..inputs {
            for c in 0..coin_space {
                let key = if rf.coins.is_empty() { format!("{x}") } else { format!("{x},{c}") };
                let path = format!("rounds[{i}].unitaries.{key}");
                let entries = rf
                    .unitaries
                    .get(&key)
                    .ok_or_else(|| parse_err(&path, "missing unitary"))?;
                unitaries.push(matrix_from_file(&path, entries)?);
            }
        }
        if rf.unitaries.len() != unitaries.len() {
            return Err(parse_err(
                format!("rounds[{i}].unitaries"),
                format!("expected {} unitaries, found {}", unitaries.len(), rf.unitaries.len()),
            ));
        }
        rounds.push(Round {
            sender: rf.sender,
            acts_on,
            sends,
            coins: rf.coins,
            unitaries,
        });
    }

    let mut output = OutputStage::measure(&file.output_register);
    output.acts_on = file.output_acts_on;
    for y in 0..file.output_unitaries.len() {
        let key = y.to_string();
        let path = format!("output_unitaries.{key}");
        let entries = file
            .output_unitaries
            .get(&key)
            .ok_or_else(|| parse_err(&path, "missing unitary"))?;
        output.unitaries.push(matrix_from_file(&path, entries)?);
    }

    Ok(ProtocolSpec {
        registers,
        input_sizes: file.inputs,
        rounds,
        coins,
        output,
        memoryless: file.memoryless,
    })
}

/// Serializes a protocol (pretty-printed, trailing newline).
pub fn to_json_string(p: &ProtocolSpec) -> String {
    let rounds = p
        .rounds
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let coin_space = p.round_coin_space(i);
            let unitaries = r
                .unitaries
                .iter()
                .enumerate()
                .map(|(j, u)| {
                    let key = if r.coins.is_empty() {
                        j.to_string()
                    } else {
                        format!("{},{}", j / coin_space, j % coin_space)
                    };
                    (key, matrix_to_file(u))
                })
                .collect();
            RoundFile {
                sender: r.sender,
                acts_on: Some(r.acts_on.clone()),
                sends: Some(r.sends.clone()),
                coins: r.coins.clone(),
                unitaries,
            }
        })
        .collect();
    let coin_model = (p.coins.mode != CoinMode::None || !p.coins.coins.is_empty()).then(|| CoinModelFile {
        mode: p.coins.mode,
        coins: p
            .coins
            .coins
            .iter()
            .map(|c| CoinFile {
                name: c.name.clone(),
                owner: c.owner,
                bits: None,
                probs: Some(c.probs.clone()),
            })
            .collect(),
    });
    let file = ProtocolFile {
        registers: p
            .registers
            .iter()
            .map(|r| RegisterFile {
                name: r.name.clone(),
                dim: r.dim,
                holder: r.holder,
            })
            .collect(),
        inputs: p.input_sizes,
        rounds,
        coin_model,
        output_register: p.output.register.clone(),
        output_acts_on: p.output.acts_on.clone(),
        output_unitaries: p
            .output
            .unitaries
            .iter()
            .enumerate()
            .map(|(y, u)| (y.to_string(), matrix_to_file(u)))
            .collect(),
        memoryless: p.memoryless,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("protocol files always serialize");
    s.push('\n');
    s
}

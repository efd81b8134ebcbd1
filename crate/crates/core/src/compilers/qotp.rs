//! Quantum one-time pad on blocks of qubit registers.

use crate::error::{Error, Result};
use crate::linalg::{self, pauli_x, pauli_z, ComplexMatrix, C64};
use crate::state::{apply_on_registers, DensityOperator, PureState, RegisterLayout};

/// A key `s` of `2q` bits for a `q`-qubit block; qubit `i` gets
/// `X^{s_{2i−1}} Z^{s_{2i}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QotpKey {
    bits: Vec<bool>,
}

impl QotpKey {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() % 2 != 0 {
            return Err(Error::KeyLengthMismatch {
                got: bits.len(),
                qubits: bits.len() / 2,
            });
        }
        Ok(Self { bits })
    }

    /// The key whose bits are the binary expansion of `index`, first bit
    /// most significant.
    pub fn from_index(index: u64, len: usize) -> Self {
        Self {
            bits: (0..len).map(|j| (index >> (len - 1 - j)) & 1 == 1).collect(),
        }
    }

    pub fn zero(qubits: usize) -> Self {
        Self {
            bits: vec![false; 2 * qubits],
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn qubits(&self) -> usize {
        self.bits.len() / 2
    }

    /// `E_s` as a `2^q × 2^q` matrix (first qubit most significant).
    pub fn operator(&self) -> ComplexMatrix {
        let (x, z, id) = (pauli_x(), pauli_z(), ComplexMatrix::identity(2));
        self.bits.chunks(2).fold(ComplexMatrix::identity(1), |acc, pair| {
            let xs = if pair[0] { &x } else { &id };
            let zs = if pair[1] { &z } else { &id };
            linalg::tensor(&acc, &(xs * zs))
        })
    }
}

/// Number of qubits in `block`; every register must have power-of-two dimension.
pub fn block_qubits<S: AsRef<str>>(layout: &RegisterLayout, block: &[S]) -> Result<usize> {
    let mut q = 0;
    for name in block {
        let d = layout.register_dim(name.as_ref())?;
        if !d.is_power_of_two() {
            return Err(Error::InvalidLayout(format!(
                "register `{}` has dimension {d}, not a power of two",
                name.as_ref()
            )));
        }
        q += d.trailing_zeros() as usize;
    }
    Ok(q)
}

fn sorted_block<'a>(layout: &RegisterLayout, block: &[&'a str]) -> Result<Vec<&'a str>> {
    let mut b = block.to_vec();
    let mut keyed = Vec::with_capacity(b.len());
    for name in b.drain(..) {
        let pos = layout
            .position(name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))?;
        keyed.push((pos, name));
    }
    keyed.sort();
    Ok(keyed.into_iter().map(|(_, n)| n).collect())
}

fn checked_operator(layout: &RegisterLayout, key: &QotpKey, block: &[&str]) -> Result<ComplexMatrix> {
    let q = block_qubits(layout, block)?;
    if key.qubits() != q {
        return Err(Error::KeyLengthMismatch {
            got: key.bits.len(),
            qubits: q,
        });
    }
    Ok(key.operator())
}

/// `E_s` on the raw amplitude vector; `block` may be in any order (the key
/// is laid out over the block's registers in layout order).
pub fn encrypt_vec(layout: &RegisterLayout, v: &[C64], key: &QotpKey, block: &[&str]) -> Result<Vec<C64>> {
    if block.is_empty() && key.bits.is_empty() {
        return Ok(v.to_vec());
    }
    let block = sorted_block(layout, block)?;
    let e = checked_operator(layout, key, &block)?;
    apply_on_registers(layout, v, &e, &block)
}

/// `E_s^{-1} = E_s^†`.
pub fn decrypt_vec(layout: &RegisterLayout, v: &[C64], key: &QotpKey, block: &[&str]) -> Result<Vec<C64>> {
    if block.is_empty() && key.bits.is_empty() {
        return Ok(v.to_vec());
    }
    let block = sorted_block(layout, block)?;
    let e = checked_operator(layout, key, &block)?.adjoint();
    apply_on_registers(layout, v, &e, &block)
}

/// Applies `E_s` to the registers of `block`.
pub fn qotp_apply(state: &PureState, key: &QotpKey, block: &[&str]) -> Result<PureState> {
    let v = encrypt_vec(state.layout(), state.amplitudes(), key, block)?;
    PureState::new(state.layout().clone(), v)
}

/// `4^{-q} Σ_s E_s ρ E_s^†` over all keys for the block.
pub fn qotp_average(rho: &DensityOperator, block: &[&str]) -> Result<DensityOperator> {
    let block = sorted_block(rho.layout(), block)?;
    let q = block_qubits(rho.layout(), &block)?;
    let n = 1u64 << (2 * q);
    let d = rho.layout().dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for s in 0..n {
        let e = QotpKey::from_index(s, 2 * q).operator();
        let conj = rho.conjugate_on(&e, &block)?;
        acc = &acc + conj.matrix();
    }
    DensityOperator::new_unchecked(rho.layout().clone(), acc.scale_real(1.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn qubits(n: usize) -> RegisterLayout {
        RegisterLayout::new((0..n).map(|i| (format!("q{i}"), 2))).unwrap()
    }

    #[test]
    fn zero_key_is_identity() {
        let l = qubits(2);
        let psi = random::pure_state(&mut random::rng(3, 0), &l);
        let out = qotp_apply(&psi, &QotpKey::zero(2), &["q0", "q1"]).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn key_layout() {
        // s = (1,0,0,1): X on the first qubit, Z on the second
        let e = QotpKey::new(vec![true, false, false, true]).unwrap().operator();
        assert!(e.max_abs_diff(&linalg::tensor(&pauli_x(), &pauli_z())) < 1e-15);
        assert_eq!(QotpKey::from_index(0b1001, 4), QotpKey::new(vec![true, false, false, true]).unwrap());
    }

    #[test]
    fn wrong_key_length() {
        let l = qubits(2);
        let psi = PureState::zero(l);
        assert_eq!(
            qotp_apply(&psi, &QotpKey::zero(1), &["q0", "q1"]),
            Err(Error::KeyLengthMismatch { got: 2, qubits: 2 })
        );
        assert!(QotpKey::new(vec![true]).is_err());
    }

    #[test]
    fn double_encryption_is_identity_up_to_phase() {
        let l = qubits(3);
        let psi = random::pure_state(&mut random::rng(4, 0), &l);
        for s in 0..64 {
            let key = QotpKey::from_index(s, 6);
            let twice = qotp_apply(&qotp_apply(&psi, &key, &["q0", "q1", "q2"]).unwrap(), &key, &["q0", "q1", "q2"]).unwrap();
            assert!(twice.approx_eq_up_to_phase(&psi, 1e-12));
            let back = decrypt_vec(&l, &encrypt_vec(&l, psi.amplitudes(), &key, &["q2", "q0", "q1"]).unwrap(), &key, &["q0", "q1", "q2"]).unwrap();
            assert!(back.iter().zip(psi.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn average_is_maximally_mixed_on_block() {
        let l = qubits(2);
        let rho = random::density(&mut random::rng(5, 0), &l, 3);
        let avg = qotp_average(&rho, &["q1"]).unwrap();
        // block twirled, rest untouched: ρ_{q0} ⊗ I/2
        let expected = rho.partial_trace(&["q0"]).unwrap().tensor(&DensityOperator::maximally_mixed(RegisterLayout::new([("q1", 2)]).unwrap())).unwrap();
        assert!(avg.matrix().max_abs_diff(expected.matrix()) < 1e-12);
    }
}

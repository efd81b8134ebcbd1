//! Information measures and distances between states.

use std::collections::{BTreeMap, BTreeSet};

use crate::entropy::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ZERO};
use crate::state::{CqEnsemble, DensityOperator, Label, PureState, RegisterLayout};

fn check_disjoint(parts: &[&[&str]]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for part in parts {
        for name in *part {
            if !seen.insert(*name) {
                return Err(Error::OverlappingParts((*name).to_string()));
            }
        }
    }
    Ok(())
}

fn entropy_of(rho: &DensityOperator, part: &[&str]) -> Result<f64> {
    if part.is_empty() {
        return Ok(0.0);
    }
    von_neumann_entropy(&rho.partial_trace(part)?)
}

/// `I(A:B) = S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    Ok(entropy_of(rho, a)? + entropy_of(rho, b)? - entropy_of(rho, &ab)?)
}

/// `I(A:B|C) = I(A:BC) - I(A:C)`.
pub fn conditional_mi(rho: &DensityOperator, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    check_disjoint(&[a, b, c])?;
    let bc: Vec<&str> = b.iter().chain(c).copied().collect();
    Ok(mutual_information(rho, a, &bc)? - mutual_information(rho, a, c)?)
}

/// One side of a mutual-information query on a cq-ensemble.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    /// A quantum register of the ensemble's layout.
    Register(String),
    /// A coordinate of the classical label.
    Label(usize),
}

impl Part {
    pub fn reg(name: &str) -> Self {
        Part::Register(name.to_string())
    }
}

fn label_register(coord: usize) -> String {
    format!("#label{coord}")
}

/// `I(A:B|C) = Σ_c p_c I(A:B)_{branch c}` where `C` ranges over the values
/// of the classical label coordinates `cond`. Classical coordinates that
/// appear in `A` or `B` are embedded as diagonal registers. Branches with
/// zero weight are skipped.
pub fn classical_conditional_mi(
    ens: &CqEnsemble,
    a: &[Part],
    b: &[Part],
    cond: &[usize],
) -> Result<f64> {
    let mut seen = BTreeSet::new();
    for p in a.iter().chain(b) {
        if !seen.insert(p.clone()) {
            return Err(Error::OverlappingParts(format!("{p:?}")));
        }
        if let Part::Label(i) = p {
            if cond.contains(i) {
                return Err(Error::OverlappingParts(format!("label coordinate {i}")));
            }
        }
    }
    let layout = ens.layout().clone();
    for p in a.iter().chain(b) {
        if let Part::Register(name) = p {
            if !layout.contains(name) {
                return Err(Error::UnknownRegister(name.clone()));
            }
        }
    }
    let label_coords: Vec<usize> = a
        .iter()
        .chain(b)
        .filter_map(|p| match p {
            Part::Label(i) => Some(*i),
            Part::Register(_) => None,
        })
        .collect();
    let label_dims: Vec<usize> = label_coords
        .iter()
        .map(|&i| {
            ens.branches()
                .iter()
                .map(|(l, _, _)| l.get(i).copied().unwrap_or(0) + 1)
                .max()
                .unwrap_or(1)
        })
        .collect();
    for &i in label_coords.iter().chain(cond) {
        if ens.branches().iter().any(|(l, _, _)| i >= l.len()) {
            return Err(Error::InvalidState(format!("label has no coordinate {i}")));
        }
    }
    let classical_layout = RegisterLayout::new(
        label_coords
            .iter()
            .zip(&label_dims)
            .map(|(&i, &d)| (label_register(i), d)),
    )?;
    let joint_layout = classical_layout.join(&layout)?;

    let mut groups: BTreeMap<Label, Vec<(Label, f64, &DensityOperator)>> = BTreeMap::new();
    for (label, p, rho) in ens.branches() {
        if *p == 0.0 {
            continue;
        }
        let key: Label = cond.iter().map(|&i| label[i]).collect();
        groups.entry(key).or_default().push((label.clone(), *p, rho));
    }

    let names = |parts: &[Part]| -> Vec<String> {
        parts
            .iter()
            .map(|p| match p {
                Part::Register(n) => n.clone(),
                Part::Label(i) => label_register(*i),
            })
            .collect()
    };
    let a_names = names(a);
    let b_names = names(b);
    let a_ref: Vec<&str> = a_names.iter().map(String::as_str).collect();
    let b_ref: Vec<&str> = b_names.iter().map(String::as_str).collect();

    let mut total = 0.0;
    for members in groups.values() {
        let pc: f64 = members.iter().map(|(_, p, _)| p).sum();
        let d = joint_layout.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (label, p, rho) in members {
            let digits: Vec<usize> = label_coords.iter().map(|&i| label[i]).collect();
            let mut diag = ComplexMatrix::zeros(classical_layout.dim(), classical_layout.dim());
            let idx = classical_layout.index_of(&digits);
            diag[(idx, idx)] = C64::new(p / pc, 0.0);
            m = &m + &linalg::tensor(&diag, rho.matrix());
        }
        let joint = DensityOperator::new_unchecked(joint_layout.clone(), m)?;
        total += pc * mutual_information(&joint, &a_ref, &b_ref)?;
    }
    Ok(total)
}

fn same_layout(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.layout() != sigma.layout() {
        return Err(Error::DimensionMismatch(
            "states live on different register layouts".into(),
        ));
    }
    Ok(())
}

/// `Δ(ρ,σ) = ½ Tr|ρ - σ|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_layout(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let eig = linalg::hermitian_eig(&diff)?;
    Ok((0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Trace distance between pure states, `√(1 - |⟨ψ|φ⟩|²)`.
pub fn pure_trace_distance(psi: &[C64], phi: &[C64]) -> f64 {
    let ov = linalg::inner(psi, phi).norm_sqr().min(1.0);
    (1.0 - ov).max(0.0).sqrt()
}

/// `F(ρ,σ) = Tr √(√ρ σ √ρ)`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_layout(rho, sigma)?;
    let sr = linalg::psd_sqrt(rho.matrix())?;
    let inner = &(&sr * sigma.matrix()) * &sr;
    let eig = linalg::hermitian_eig(&inner)?;
    let f: f64 = eig
        .values
        .iter()
        .map(|&l| if l > linalg::PSD_ZERO { l.sqrt() } else { 0.0 })
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `K = Tr_{complement}(|φ₁⟩⟨φ₀|)` as an operator on `act_on`.
fn cross_reduced(phi0: &PureState, phi1: &PureState, act_on: &[&str]) -> Result<ComplexMatrix> {
    if phi0.layout() != phi1.layout() {
        return Err(Error::DimensionMismatch("purifications on different layouts".into()));
    }
    let layout = phi0.layout();
    let pos = layout.positions(act_on)?;
    let da: usize = pos.iter().map(|&p| layout.factors()[p].1).product();
    let split = layout.split_indices(&pos);
    let rest = layout.dim() / da;
    let mut slots = vec![vec![0usize; da]; rest];
    for (full, &(a, b)) in split.iter().enumerate() {
        slots[b][a] = full;
    }
    let (v0, v1) = (phi0.amplitudes(), phi1.amplitudes());
    let mut k = ComplexMatrix::zeros(da, da);
    for row in &slots {
        for (a, &fa) in row.iter().enumerate() {
            let x = v1[fa];
            if x == ZERO {
                continue;
            }
            for (a2, &fa2) in row.iter().enumerate() {
                k[(a, a2)] += x * v0[fa2].conj();
            }
        }
    }
    Ok(k)
}

/// A unitary `V` on `act_on` (registers in layout order) maximizing
/// `|⟨φ₀|(V ⊗ I)|φ₁⟩|`. The attained overlap is real, nonnegative and equal
/// to the fidelity of the two reduced states on the complement.
pub fn uhlmann_unitary(phi0: &PureState, phi1: &PureState, act_on: &[&str]) -> Result<ComplexMatrix> {
    if act_on.is_empty() {
        return Err(Error::InvalidLayout("uhlmann_unitary needs a nonempty register set".into()));
    }
    let k = cross_reduced(phi0, phi1, act_on)?;
    linalg::polar_maximizer(&k)
}

/// `⟨φ₀|(V ⊗ I)|φ₁⟩`.
pub fn overlap_with(phi0: &PureState, v: &ComplexMatrix, phi1: &PureState, act_on: &[&str]) -> Result<C64> {
    let moved = phi1.apply(v, act_on)?;
    Ok(phi0.inner(&moved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::h2;

    fn qubits(names: &[&str]) -> RegisterLayout {
        RegisterLayout::new(names.iter().map(|n| (*n, 2))).unwrap()
    }

    fn bell() -> DensityOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            qubits(&["A", "B"]),
            vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)],
        )
        .unwrap()
        .density()
    }

    fn ket(l: &RegisterLayout, v: &[(f64, f64)]) -> PureState {
        PureState::normalized(l.clone(), v.iter().map(|&(r, i)| C64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn mi_product_and_bell() {
        let a = ket(&qubits(&["A"]), &[(0.6, 0.0), (0.0, 0.8)]).density();
        let b = DensityOperator::maximally_mixed(qubits(&["B"]));
        let prod = a.tensor(&b).unwrap();
        assert!(mutual_information(&prod, &["A"], &["B"]).unwrap().abs() < 1e-12);
        assert!((mutual_information(&bell(), &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(
            mutual_information(&bell(), &["A"], &["A"]).unwrap_err(),
            Error::OverlappingParts("A".into())
        );
    }

    #[test]
    fn cq_state_with_orthogonal_branches_has_one_bit() {
        // ½ Σ_x |x⟩⟨x| ⊗ |x⟩⟨x|
        let m = ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
        let rho = DensityOperator::new(qubits(&["X", "M"]), m).unwrap();
        assert!((mutual_information(&rho, &["X"], &["M"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_mi_examples() {
        // pure ancilla C leaves I(A:B) unchanged
        let c = PureState::zero(qubits(&["C"])).density();
        let rho = bell().tensor(&c).unwrap();
        let cmi = conditional_mi(&rho, &["A"], &["B"], &["C"]).unwrap();
        assert!((cmi - 2.0).abs() < 1e-12);
        // classically correlated A=B, C empty → S(A)
        let m = ComplexMatrix::diag_real(&[0.25, 0.0, 0.0, 0.75]);
        let cc = DensityOperator::new(qubits(&["A", "B"]), m).unwrap();
        let v = conditional_mi(&cc, &["A"], &["B"], &[]).unwrap();
        assert!((v - h2(0.25)).abs() < 1e-12);
        assert!(conditional_mi(&cc, &["A"], &["B"], &["A"]).is_err());
    }

    #[test]
    fn classical_cmi_single_value_and_product_branches() {
        let l = qubits(&["M"]);
        let s0 = PureState::zero(l.clone());
        let s1 = ket(&l, &[(0.0, 0.0), (1.0, 0.0)]);
        // labels (x); I(M : X) with no conditioning is one bit
        let ens = CqEnsemble::from_pure(vec![(vec![0], 0.5, s0.clone()), (vec![1], 0.5, s1.clone())]).unwrap();
        let v = classical_conditional_mi(&ens, &[Part::reg("M")], &[Part::Label(0)], &[]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // conditioning on x itself leaves nothing
        let v = classical_conditional_mi(&ens, &[Part::reg("M")], &[], &[0]).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(classical_conditional_mi(&ens, &[Part::Label(0)], &[Part::reg("M")], &[0]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let l = qubits(&["A"]);
        let z0 = PureState::zero(l.clone()).density();
        let z1 = ket(&l, &[(0.0, 0.0), (1.0, 0.0)]).density();
        assert!(trace_distance(&z0, &z0).unwrap().abs() < 1e-15);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        // |⟨ψ|φ⟩| = cos α → sin α
        let alpha: f64 = 0.3;
        let psi = ket(&l, &[(alpha.cos(), 0.0), (0.0, alpha.sin())]);
        let d = trace_distance(&z0, &psi.density()).unwrap();
        assert!((d - alpha.sin()).abs() < 1e-12);
        let other = DensityOperator::maximally_mixed(qubits(&["B"]));
        assert!(matches!(trace_distance(&z0, &other), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn fidelity_examples() {
        let l = qubits(&["A"]);
        let z0 = PureState::zero(l.clone());
        let z1 = ket(&l, &[(0.0, 0.0), (1.0, 0.0)]);
        assert!((fidelity(&z0.density(), &z0.density()).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&z0.density(), &z1.density()).unwrap().abs() < 1e-12);
        let psi = ket(&l, &[(0.3, 0.1), (-0.2, 0.9)]);
        let f = fidelity(&z0.density(), &psi.density()).unwrap();
        assert!((f - z0.inner(&psi).norm()).abs() < 1e-12);
    }

    #[test]
    fn uhlmann_trivial_cases() {
        let l = qubits(&["A", "B"]);
        let phi = ket(&l, &[(0.5, 0.1), (0.2, -0.3), (0.0, 0.4), (0.6, 0.0)]);
        let v = uhlmann_unitary(&phi, &phi, &["A"]).unwrap();
        assert!(v.is_unitary(1e-12));
        let ov = overlap_with(&phi, &v, &phi, &["A"]).unwrap();
        assert!((ov.re - 1.0).abs() < 1e-12 && ov.im.abs() < 1e-12);

        // product states differing only on A
        let a0 = ket(&qubits(&["A"]), &[(1.0, 0.0), (0.0, 0.0)]);
        let a1 = ket(&qubits(&["A"]), &[(0.3, 0.4), (0.0, -0.5)]);
        let b = ket(&qubits(&["B"]), &[(0.8, 0.0), (0.0, 0.6)]);
        let p0 = a0.tensor(&b).unwrap();
        let p1 = a1.tensor(&b).unwrap();
        let v = uhlmann_unitary(&p0, &p1, &["A"]).unwrap();
        assert!((overlap_with(&p0, &v, &p1, &["A"]).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(uhlmann_unitary(&p0, &p1, &[]).is_err());
        assert!(matches!(uhlmann_unitary(&p0, &p1, &["Q"]), Err(Error::UnknownRegister(_))));
    }
}

//! Register layouts, pure states and density operators.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ONE, ZERO};

/// Tolerance used when validating states on construction.
pub const STATE_TOL: f64 = 1e-10;

/// Ordered named tensor factors. The first factor is the most significant
/// digit of a basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    factors: Vec<(String, usize)>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(n, d)| (n.into(), d)).collect();
        let mut seen = BTreeSet::new();
        for (name, dim) in &factors {
            if *dim == 0 {
                return Err(Error::InvalidLayout(format!("register `{name}` has dimension 0")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidLayout(format!("duplicate register `{name}`")));
            }
        }
        Ok(Self { factors })
    }

    pub fn empty() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|(n, _)| n.as_str())
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|(n, _)| n == name)
    }

    pub fn register_dim(&self, name: &str) -> Result<usize> {
        self.position(name)
            .map(|i| self.factors[i].1)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    /// Factor positions for the given names, in layout order.
    pub fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(names.len());
        for n in names {
            let p = self
                .position(n.as_ref())
                .ok_or_else(|| Error::UnknownRegister(n.as_ref().to_string()))?;
            if !pos.contains(&p) {
                pos.push(p);
            }
        }
        pos.sort_unstable();
        Ok(pos)
    }

    /// Sub-layout on the given positions (kept in layout order).
    pub fn select(&self, positions: &[usize]) -> RegisterLayout {
        let mut p = positions.to_vec();
        p.sort_unstable();
        p.dedup();
        RegisterLayout {
            factors: p.iter().map(|&i| self.factors[i].clone()).collect(),
        }
    }

    /// Concatenation `self ⊗ other`.
    pub fn join(&self, other: &RegisterLayout) -> Result<RegisterLayout> {
        RegisterLayout::new(self.factors.iter().chain(&other.factors).cloned())
    }

    /// Digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, (_, d)) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (x, (_, d))| acc * d + x)
    }

    /// Split every basis index into (index within `positions`, index within
    /// the complement).
    pub fn split_indices(&self, positions: &[usize]) -> Vec<(usize, usize)> {
        let dims: Vec<usize> = self.factors.iter().map(|(_, d)| *d).collect();
        (0..self.dim())
            .map(|idx| {
                let digits = self.digits(idx);
                let mut a = 0;
                let mut b = 0;
                for (k, (&x, &d)) in digits.iter().zip(&dims).enumerate() {
                    if positions.contains(&k) {
                        a = a * d + x;
                    } else {
                        b = b * d + x;
                    }
                }
                (a, b)
            })
            .collect()
    }
}

fn check_normalized(v: &[C64]) -> Result<()> {
    let n = linalg::norm(v);
    if (n - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("state norm {n} is not 1")));
    }
    Ok(())
}

/// A unit vector on a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a layout of dimension {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        check_normalized(&amplitudes)?;
        Ok(Self { layout, amplitudes })
    }

    /// `|0…0⟩`
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[0] = ONE;
        Self { layout, amplitudes }
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let mut amplitudes = vec![ZERO; layout.dim()];
        *amplitudes
            .get_mut(index)
            .ok_or_else(|| Error::DimensionMismatch(format!("basis index {index} out of range")))? =
            ONE;
        Ok(Self { layout, amplitudes })
    }

    /// Build from a vector, renormalizing it.
    pub fn normalized(layout: RegisterLayout, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Self::new(layout, amplitudes)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        Ok(PureState {
            layout: self.layout.join(&other.layout)?,
            amplitudes: linalg::tensor_vec(&self.amplitudes, &other.amplitudes),
        })
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            layout: self.layout.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Applies `op` to the named registers (in layout order).
    pub fn apply(&self, op: &ComplexMatrix, registers: &[&str]) -> Result<PureState> {
        let amplitudes = apply_on_registers(&self.layout, &self.amplitudes, op, registers)?;
        Ok(PureState {
            layout: self.layout.clone(),
            amplitudes,
        })
    }

    /// Equality up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &PureState, tol: f64) -> bool {
        self.layout == other.layout && (1.0 - self.inner(other).norm()).abs() <= tol
    }
}

/// Applies `op` (dimension = product of the named registers' dims) to a
/// vector on `layout`.
pub fn apply_on_registers(
    layout: &RegisterLayout,
    state: &[C64],
    op: &ComplexMatrix,
    registers: &[&str],
) -> Result<Vec<C64>> {
    let positions = layout.positions(registers)?;
    let sub_dim: usize = positions.iter().map(|&p| layout.factors()[p].1).product();
    if !op.is_square() || op.rows() != sub_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator of size {}x{} on registers of dimension {sub_dim}",
            op.rows(),
            op.cols()
        )));
    }
    if state.len() != layout.dim() {
        return Err(Error::DimensionMismatch("state does not match layout".into()));
    }
    if positions.len() == layout.len() {
        return Ok(op.mul_vec(state));
    }
    let split = layout.split_indices(&positions);
    let rest_dim = layout.dim() / sub_dim;
    // full index for each (sub, rest) pair
    let mut full = vec![0usize; layout.dim()];
    for (idx, &(a, b)) in split.iter().enumerate() {
        full[b * sub_dim + a] = idx;
    }
    let mut out = vec![ZERO; state.len()];
    let mut buf = vec![ZERO; sub_dim];
    for b in 0..rest_dim {
        for a in 0..sub_dim {
            buf[a] = state[full[b * sub_dim + a]];
        }
        let res = op.mul_vec(&buf);
        for a in 0..sub_dim {
            out[full[b * sub_dim + a]] = res[a];
        }
    }
    Ok(out)
}

/// Hermitian, PSD, unit-trace operator on a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: RegisterLayout,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, trace and positivity (eigenvalues ≥ −1e-10).
    pub fn new(layout: RegisterLayout, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(layout, matrix)?;
        let defect = rho.matrix.hermitian_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = rho.matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let eig = linalg::hermitian_eig(&rho.matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < -STATE_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(rho)
    }

    /// Only checks dimensions. For operators produced by trusted internal
    /// arithmetic (mixtures, partial traces, conjugations).
    pub fn new_unchecked(layout: RegisterLayout, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a layout of dimension {}",
                matrix.rows(),
                matrix.cols(),
                layout.dim()
            )));
        }
        Ok(Self { layout, matrix })
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            layout,
        }
    }

    /// `Σ_i p_i ρ_i` over a common layout.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let layout = first.1.layout.clone();
        let d = layout.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, rho) in parts {
            if rho.layout != layout {
                return Err(Error::DimensionMismatch("mixture of different layouts".into()));
            }
            m = &m + &rho.matrix.scale_real(*p);
        }
        Ok(Self { layout, matrix: m })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(Self {
            layout: self.layout.join(&other.layout)?,
            matrix: linalg::tensor(&self.matrix, &other.matrix),
        })
    }

    /// `U ρ U†` with `U` acting on the whole layout.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        if u.rows() != self.layout.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch("unitary does not match layout".into()));
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &(u * &self.matrix) * &u.adjoint(),
        })
    }

    /// `O ρ O†` with `O` acting on the named registers.
    pub fn conjugate_on(&self, op: &ComplexMatrix, registers: &[&str]) -> Result<DensityOperator> {
        let d = self.layout.dim();
        // apply to columns, then to rows via adjoint
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
        for j in 0..d {
            cols.push(apply_on_registers(&self.layout, &self.matrix.column(j), op, registers)?);
        }
        let half = ComplexMatrix::from_columns(&cols);
        let half_adj = half.adjoint();
        let mut rows: Vec<Vec<C64>> = Vec::with_capacity(d);
        for j in 0..d {
            rows.push(apply_on_registers(&self.layout, &half_adj.column(j), op, registers)?);
        }
        let full_adj = ComplexMatrix::from_columns(&rows);
        Ok(Self {
            layout: self.layout.clone(),
            matrix: full_adj.adjoint(),
        })
    }

    /// Probability of each basis value of one register.
    pub fn register_distribution(&self, register: &str) -> Result<Vec<f64>> {
        let reduced = self.partial_trace(&[register])?;
        Ok((0..reduced.layout.dim())
            .map(|i| reduced.matrix[(i, i)].re.max(0.0))
            .collect())
    }

    /// Reduced state on the named registers, in layout order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let positions = self.layout.positions(keep)?;
        let kept = self.layout.select(&positions);
        if positions.len() == self.layout.len() {
            return Ok(self.clone());
        }
        let kd = kept.dim();
        let split = self.layout.split_indices(&positions);
        let rest = self.layout.dim() / kd;
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rest];
        for (full, &(a, b)) in split.iter().enumerate() {
            groups[b].push((full, a));
        }
        let mut m = ComplexMatrix::zeros(kd, kd);
        for g in &groups {
            for &(fi, ai) in g {
                for &(fj, aj) in g {
                    m[(ai, aj)] += self.matrix[(fi, fj)];
                }
            }
        }
        Ok(Self { layout: kept, matrix: m })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eig(&self.matrix)?.values)
    }
}

/// A classical label attached to a quantum branch.
pub type Label = Vec<usize>;

/// Probability-weighted family of states indexed by classical labels.
#[derive(Debug, Clone)]
pub struct CqEnsemble {
    branches: Vec<(Label, f64, DensityOperator)>,
}

impl CqEnsemble {
    pub fn new(branches: Vec<(Label, f64, DensityOperator)>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::InvalidState("empty ensemble".into()))?;
        let layout = first.2.layout().clone();
        let label_len = first.0.len();
        let mut total = 0.0;
        for (label, p, rho) in &branches {
            if *p < 0.0 || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("probability {p} for {label:?}")));
            }
            if rho.layout() != &layout {
                return Err(Error::DimensionMismatch("ensemble layouts differ".into()));
            }
            if label.len() != label_len {
                return Err(Error::InvalidState("ensemble labels differ in length".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn from_pure(branches: Vec<(Label, f64, PureState)>) -> Result<Self> {
        Self::new(
            branches
                .into_iter()
                .map(|(l, p, s)| (l, p, s.density()))
                .collect(),
        )
    }

    pub fn branches(&self) -> &[(Label, f64, DensityOperator)] {
        &self.branches
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.branches[0].2.layout()
    }
}

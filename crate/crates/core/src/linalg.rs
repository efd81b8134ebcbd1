//! Dense complex matrices and the Hermitian eigensolver.
//!
//! Everything here is sized for small registers (total dimension in the
//! low hundreds). Storage is row-major.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Off-diagonal Frobenius norm (relative to the full norm) at which Jacobi stops.
const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of a PSD operator at or below this are treated as exact zeros
/// when taking square roots.
pub const PSD_ZERO: f64 = 1e-14;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = &self.adjoint() * self;
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// Kronecker product of vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V f(Λ) V†`
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi sweeps.
///
/// Fails with `NotHermitian` when the input deviates from Hermiticity by more
/// than 1e-8 entrywise.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let defect = h.hermitian_defect();
    if defect > 1e-8 {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows;
    // symmetrize so roundoff asymmetry does not leak into the rotations
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= f64::MIN_POSITIVE * 1e8 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase removal makes the pivot real, then a real rotation zeroes it
    let phase_conj = apq.conj() / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = phase_conj * (-s);
    let j_qq = phase_conj * c;
    let n = a.rows;

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Square root of a PSD matrix; eigenvalues at or below `PSD_ZERO` map to 0.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    Ok(eig.apply_fn(|l| if l > PSD_ZERO { l.sqrt() } else { 0.0 }))
}

/// Sum of singular values.
pub fn nuclear_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = &m.adjoint() * m;
    let eig = hermitian_eig(&gram)?;
    Ok(eig
        .values
        .iter()
        .map(|&l| if l > PSD_ZERO * PSD_ZERO { l.sqrt() } else { 0.0 })
        .sum())
}

/// Unitary `V` maximizing `|Tr(V K)|` for square `K`, i.e. `V = W U†` where
/// `K = U Σ W†`. The right singular vectors come from the eigenvectors of
/// `K†K`; the matching left vectors are `K w / ‖K w‖`, which fixes their
/// phases. Columns for vanishing singular values are completed to an
/// orthonormal basis.
pub fn polar_maximizer(k: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !k.is_square() {
        return Err(Error::DimensionMismatch("polar_maximizer needs a square matrix".into()));
    }
    let n = k.rows;
    let eig = hermitian_eig(&(&k.adjoint() * k))?;
    let w = &eig.vectors;
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut right: Vec<Vec<C64>> = Vec::with_capacity(n);
    let scale = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    for j in 0..n {
        let wj = w.column(j);
        let kw = k.mul_vec(&wj);
        let len = norm(&kw);
        right.push(wj);
        if len > 1e-13 * scale.max(1e-300) && len > 1e-300 {
            left.push(kw.iter().map(|z| z / len).collect());
        } else {
            left.push(Vec::new());
        }
    }
    let left = complete_basis(left, n);
    // V = Σ_j |w_j⟩⟨u_j|
    let mut v = ComplexMatrix::zeros(n, n);
    for (wj, uj) in right.iter().zip(&left) {
        for r in 0..n {
            for c in 0..n {
                v[(r, c)] += wj[r] * uj[c].conj();
            }
        }
    }
    Ok(v)
}

/// A unitary whose first column is the unit vector `v`.
pub fn unitary_with_first_column(v: &[C64]) -> ComplexMatrix {
    let n = v.len();
    let mut vectors = vec![Vec::new(); n];
    vectors[0] = v.to_vec();
    ComplexMatrix::from_columns(&complete_basis(vectors, n))
}

/// Orthonormalizes the given vectors in order (modified Gram-Schmidt); empty
/// or dependent slots are filled from the standard basis.
fn complete_basis(vectors: Vec<Vec<C64>>, n: usize) -> Vec<Vec<C64>> {
    let mut done: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (slot, mut v) in vectors.into_iter().enumerate() {
        if v.is_empty() {
            pending.push(slot);
            done.push(Vec::new());
            continue;
        }
        for u in done.iter().filter(|u| !u.is_empty()) {
            let c = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        let len = norm(&v);
        if len < 0.5 {
            pending.push(slot);
            done.push(Vec::new());
        } else {
            done.push(v.iter().map(|z| z / len).collect());
        }
    }
    let mut basis_idx = 0;
    for slot in pending {
        loop {
            assert!(basis_idx < n, "basis completion ran out of candidates");
            let mut v = vec![ZERO; n];
            v[basis_idx] = ONE;
            basis_idx += 1;
            for u in done.iter().filter(|u| !u.is_empty()) {
                let c = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
            let len = norm(&v);
            if len > 1e-6 {
                done[slot] = v.iter().map(|z| z / len).collect();
                break;
            }
        }
    }
    done
}

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static")
}

/// Pauli Z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &HermitianEig) -> ComplexMatrix {
        e.apply_fn(|l| l)
    }

    #[test]
    fn tensor_identity_and_basis() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert_eq!(tensor(&p0, &p1), ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_x_z_on_00() {
        // (X ⊗ Z)|00⟩ = X|0⟩ ⊗ Z|0⟩ = |1⟩|0⟩ = |10⟩, index 2.
        let xz = tensor(&pauli_x(), &pauli_z());
        let out = xz.mul_vec(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(out, vec![ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn eig_diag_and_pauli_x() {
        let e = hermitian_eig(&ComplexMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert!(e.vectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
        let plus = e.vectors.column(0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ov = inner(&plus, &[C64::new(h, 0.0), C64::new(h, 0.0)]).norm();
        assert!((ov - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_complex_hermitian_reconstructs() {
        let h = ComplexMatrix::new(
            3,
            3,
            vec![
                C64::new(2.0, 0.0),
                C64::new(0.5, -1.0),
                C64::new(0.0, 0.3),
                C64::new(0.5, 1.0),
                C64::new(-1.0, 0.0),
                C64::new(0.2, 0.2),
                C64::new(0.0, -0.3),
                C64::new(0.2, -0.2),
                C64::new(0.7, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert!(reconstruct(&e).max_abs_diff(&h) < 1e-12);
        assert!(e.vectors.is_unitary(1e-12));
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        let bad = vec![ONE, C64::new(f64::NAN, 0.0), ONE, ONE];
        assert_eq!(
            ComplexMatrix::new(2, 2, bad).unwrap_err(),
            Error::NonFinite { row: 0, col: 1 }
        );
    }

    #[test]
    fn polar_maximizer_attains_nuclear_norm() {
        // rank-one K: the maximizer must still be unitary
        let k = ComplexMatrix::outer(
            &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            &[C64::new(0.0, 1.0), ZERO],
        );
        let v = polar_maximizer(&k).unwrap();
        assert!(v.is_unitary(1e-12));
        let tr = (&v * &k).trace();
        assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
        assert!((nuclear_norm(&k).unwrap() - 1.0).abs() < 1e-12);

        let zero = ComplexMatrix::zeros(3, 3);
        assert!(polar_maximizer(&zero).unwrap().is_unitary(1e-12));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(0.7, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.3, 0.0)],
        )
        .unwrap();
        let r = psd_sqrt(&m).unwrap();
        assert!((&r * &r).max_abs_diff(&m) < 1e-13);
    }
}

//! Entropies in bits.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::state::{DensityOperator, RegisterLayout};

/// Eigenvalues in `[-CLIP, 0)` are roundoff and count as zero.
pub const CLIP: f64 = 1e-10;
/// Eigenvalues below `-INVALID` mean the operator was not a state.
pub const INVALID: f64 = 1e-8;

const INVERSE_ITERATIONS: usize = 60;

/// `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { value: p, lo: 0.0, hi: 1.0 });
    }
    Ok(plogp(p) + plogp(1.0 - p))
}

/// `binary_entropy` for arguments already known to lie in `[0, 1]`; clamps
/// roundoff excursions.
pub fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    plogp(p) + plogp(1.0 - p)
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Inverse of the binary entropy on the branch `[0, 1/2]`, by bisection.
pub fn binary_entropy_inv(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutOfRange { value: y, lo: 0.0, hi: 1.0 });
    }
    Ok(h2_inv(y))
}

/// `binary_entropy_inv` with clamping instead of range errors.
pub fn h2_inv(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    if y == 0.0 {
        return 0.0;
    }
    if y == 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..INVERSE_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shannon entropy of a spectrum after clipping roundoff negatives.
pub fn spectrum_entropy(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -INVALID {
            return Err(Error::InvalidState(format!("eigenvalue {l:e} below -{INVALID:e}")));
        }
        s += plogp(l.min(1.0));
    }
    Ok(s.max(0.0))
}

/// Shannon entropy of a classical distribution.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| plogp(p)).sum()
}

/// `S(ρ) = -Tr ρ log2 ρ`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let values = rho.eigenvalues()?;
    if let Some(&min) = values.last() {
        if min < -INVALID {
            return Err(Error::InvalidState(format!("eigenvalue {min:e} below -{INVALID:e}")));
        }
    }
    let clipped: Vec<f64> = values
        .iter()
        .map(|&l| if l < 0.0 && l >= -CLIP { 0.0 } else { l })
        .collect();
    spectrum_entropy(&clipped)
}

/// A mixture `Σ_j w_j |v_j⟩⟨v_j|` of (not necessarily normalized) vectors on
/// a common layout, kept in vector form so that reduced spectra can be
/// computed from whichever of the Gram matrix or the reduced density matrix
/// is smaller.
#[derive(Debug, Clone)]
pub struct VectorMixture<'a> {
    pub layout: &'a RegisterLayout,
    pub terms: Vec<(f64, &'a [C64])>,
}

impl<'a> VectorMixture<'a> {
    pub fn new(layout: &'a RegisterLayout) -> Self {
        Self { layout, terms: Vec::new() }
    }

    pub fn push(&mut self, weight: f64, v: &'a [C64]) {
        if weight > 0.0 {
            self.terms.push((weight, v));
        }
    }

    /// Nonzero spectrum of the reduced state on `keep` (layout positions).
    pub fn reduced_spectrum(&self, keep: &[usize]) -> Result<Vec<f64>> {
        if self.terms.is_empty() || keep.is_empty() {
            let total: f64 = self
                .terms
                .iter()
                .map(|(w, v)| w * linalg::norm(v).powi(2))
                .sum();
            return Ok(vec![total]);
        }
        let kept_dim: usize = keep.iter().map(|&p| self.layout.factors()[p].1).product();
        let rest_dim = self.layout.dim() / kept_dim;
        let split = self.layout.split_indices(keep);
        // slice every vector by the traced-out index
        let mut pieces: Vec<Vec<C64>> = Vec::with_capacity(self.terms.len() * rest_dim);
        for (w, v) in &self.terms {
            let sw = w.sqrt();
            let mut chunk = vec![vec![C64::new(0.0, 0.0); kept_dim]; rest_dim];
            for (idx, &(a, b)) in split.iter().enumerate() {
                chunk[b][a] = v[idx] * sw;
            }
            pieces.extend(chunk.into_iter().filter(|c| c.iter().any(|z| z.norm_sqr() > 0.0)));
        }
        if pieces.is_empty() {
            return Ok(vec![0.0]);
        }
        let m = if pieces.len() <= kept_dim {
            ComplexMatrix::from_fn(pieces.len(), pieces.len(), |i, j| {
                linalg::inner(&pieces[i], &pieces[j])
            })
        } else {
            let mut rho = ComplexMatrix::zeros(kept_dim, kept_dim);
            for p in &pieces {
                for i in 0..kept_dim {
                    if p[i].norm_sqr() == 0.0 {
                        continue;
                    }
                    for j in 0..kept_dim {
                        rho[(i, j)] += p[i] * p[j].conj();
                    }
                }
            }
            rho
        };
        Ok(linalg::hermitian_eig(&m)?.values)
    }

    /// Entropy of the (normalized) reduced state on `keep`.
    pub fn reduced_entropy(&self, keep: &[usize]) -> Result<f64> {
        let values = self.reduced_spectrum(keep)?;
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Ok(0.0);
        }
        let normalized: Vec<f64> = values
            .iter()
            .map(|&l| {
                let l = l / total;
                if l < 0.0 && l >= -CLIP {
                    0.0
                } else {
                    l
                }
            })
            .collect();
        spectrum_entropy(&normalized)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::state::PureState;

    #[test]
    fn h2_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -1/4 log 1/4 - 3/4 log 3/4 = 1/2 + 3/4 log2(4/3)
        let direct = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((binary_entropy(0.25).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 0.811_278_124_459_132_8).abs() < 1e-15);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn h2_inverse_endpoints_and_roundtrip() {
        assert_eq!(binary_entropy_inv(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy_inv(1.0).unwrap(), 0.5);
        assert!(binary_entropy_inv(1.01).is_err());
        for i in 0..=1000 {
            let y = i as f64 / 1000.0;
            let x = binary_entropy_inv(y).unwrap();
            assert!((0.0..=0.5).contains(&x));
            assert!((h2(x) - y).abs() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn h2_inverse_is_monotone() {
        let mut prev = 0.0;
        for i in 0..=2000 {
            let x = h2_inv(i as f64 / 2000.0);
            assert!(x >= prev);
            prev = x;
        }
    }

    #[test]
    fn von_neumann_examples() {
        let l = RegisterLayout::new([("A", 2), ("B", 2)]).unwrap();
        assert!(von_neumann_entropy(&PureState::zero(l.clone()).density()).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(l);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);
        let q = RegisterLayout::new([("A", 2)]).unwrap();
        let rho = DensityOperator::new(q, ComplexMatrix::diag_real(&[0.75, 0.25])).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_rejects_negative_spectrum() {
        let q = RegisterLayout::new([("A", 2)]).unwrap();
        let bad = DensityOperator::new_unchecked(q, ComplexMatrix::diag_real(&[1.1, -0.1])).unwrap();
        assert!(matches!(von_neumann_entropy(&bad), Err(Error::InvalidState(_))));
    }

    #[test]
    fn mixture_spectrum_matches_density_route() {
        let l = RegisterLayout::new([("A", 2), ("B", 3)]).unwrap();
        let v1: Vec<C64> = (0..6).map(|i| C64::new(i as f64, 1.0)).collect();
        let v2: Vec<C64> = (0..6).map(|i| C64::new(1.0, -(i as f64) * 0.5)).collect();
        let s1 = PureState::normalized(l.clone(), v1).unwrap();
        let s2 = PureState::normalized(l.clone(), v2).unwrap();
        let mut mix = VectorMixture::new(&l);
        mix.push(0.3, s1.amplitudes());
        mix.push(0.7, s2.amplitudes());
        let rho = DensityOperator::mixture(&[(0.3, &s1.density()), (0.7, &s2.density())]).unwrap();
        for keep in [vec![0], vec![1], vec![0, 1]] {
            let names: Vec<&str> = keep.iter().map(|&p| l.factors()[p].0.as_str()).collect();
            let direct = von_neumann_entropy(&rho.partial_trace(&names).unwrap()).unwrap();
            let fast = mix.reduced_entropy(&keep).unwrap();
            assert!((direct - fast).abs() < 1e-12, "keep {keep:?}: {direct} vs {fast}");
        }
    }
}

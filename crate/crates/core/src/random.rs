//! Seeded random states and unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix, C64};
use crate::state::{DensityOperator, PureState, RegisterLayout};

/// Deterministic generator for a (seed, stream) pair. Streams give every
/// consumer of a run its own independent sequence from one 64-bit seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random unit vector.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> PureState {
    loop {
        let v = gaussian_vector(rng, layout.dim());
        if let Ok(s) = PureState::normalized(layout.clone(), v) {
            return s;
        }
    }
}

/// Random mixed state: marginal of a Haar-random purification with an
/// environment of dimension `env_dim`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout, env_dim: usize) -> DensityOperator {
    let env = RegisterLayout::new([("__env", env_dim)]).expect("fresh name");
    let joint = layout.join(&env).expect("fresh name");
    let psi = pure_state(rng, &joint);
    let names: Vec<&str> = layout.names().collect();
    psi.density().partial_trace(&names).expect("registers exist")
}

/// Haar-random unitary (Gram-Schmidt on a Ginibre matrix).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(rng, n);
        for u in &cols {
            let c = linalg::inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        let len = linalg::norm(&v);
        if len > 1e-6 {
            cols.push(v.into_iter().map(|z| z / len).collect());
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_columns(&(0..n).map(|_| gaussian_vector(rng, n)).collect::<Vec<_>>());
    (&g + &g.adjoint()).scale_real(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let u = unitary(&mut rng(7, 0), 5);
        assert!(u.is_unitary(1e-12));
        assert_eq!(u, unitary(&mut rng(7, 0), 5));
        assert_ne!(u, unitary(&mut rng(7, 1), 5));
    }

    #[test]
    fn random_density_is_valid() {
        let l = RegisterLayout::new([("A", 3)]).unwrap();
        let rho = density(&mut rng(1, 0), &l, 2);
        assert!(DensityOperator::new(rho.layout().clone(), rho.matrix().clone()).is_ok());
    }
}

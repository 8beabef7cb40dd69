//! Random states, Hermitian matrices and unitaries for property checks.

use std::f64::consts::TAU;

use rand::Rng;

use crate::error::Result;
use crate::linalg::{hermitian_eig, Complex, ComplexMatrix, ComplexVector};
use crate::quantum::{DensityOperator, Ensemble, Ket};

/// Standard normal variate (Box-Muller).
fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::new(normal(rng), normal(rng))
}

/// Haar-distributed unit vector in `C^dim`.
pub fn ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Ket> {
    loop {
        let v = ComplexVector::new((0..dim).map(|_| complex_normal(rng)).collect())?;
        if v.norm() > 1e-6 {
            return Ket::normalized(v);
        }
    }
}

/// Hermitian matrix with entries drawn from a unit-variance Gaussian.
#[allow(clippy::needless_range_loop)]
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let mut rows = vec![vec![Complex::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        rows[i][i] = Complex::new(normal(rng), 0.0);
        for j in (i + 1)..dim {
            let z = complex_normal(rng);
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    ComplexMatrix::from_rows(rows)
}

/// Unitary taken as the eigenvector matrix of a random Hermitian matrix.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let h = hermitian(dim, rng)?;
    Ok(hermitian_eig(&h, 0.0)?.eigenvector_matrix())
}

/// Mixture of `dim + 1` Haar kets with uniformly drawn, normalized weights.
pub fn density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityOperator> {
    let raw: Vec<f64> = (0..=dim).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let members = raw
        .into_iter()
        .map(|w| Ok((w / total, ket(dim, rng)?)))
        .collect::<Result<Vec<_>>>()?;
    DensityOperator::from_ensemble(&Ensemble::new(members)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in 1..6 {
            assert!((ket(dim, &mut rng).unwrap().amplitudes().norm() - 1.0).abs() < 1e-12);
            assert_eq!(hermitian(dim, &mut rng).unwrap().hermitian_deviation(), 0.0);
            let u = unitary(dim, &mut rng).unwrap();
            let id = ComplexMatrix::identity(dim).unwrap();
            assert!(u.adjoint().matmul(&u).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
            let rho = density(dim, &mut rng).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}

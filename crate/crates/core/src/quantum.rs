//! Pure states, observables, ensembles and density operators.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inner_product, outer_product, Complex, ComplexMatrix, ComplexVector,
    SpectralDecomposition,
};

/// Allowed deviation of `||psi||` from 1.
pub const NORM_TOL: f64 = 1e-10;
/// Allowed `max |m - m^dagger|` for observables and density operators.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Minimum gap between eigenvalues of a non-degenerate observable.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// Allowed deviation of ensemble weights (and density traces) from 1.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Negative eigenvalues above `-NEGATIVE_WINDOW` are clamped to zero.
pub const NEGATIVE_WINDOW: f64 = 1e-10;
/// Allowed deviation of the clamped spectrum's sum from 1.
pub const SPECTRUM_SUM_TOL: f64 = 1e-9;

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: ComplexVector,
}

impl Ket {
    /// Wraps `amplitudes`, which must already have unit norm.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.scale(Complex::new(1.0 / norm, 0.0)),
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex>) -> Result<Self> {
        Self::new(ComplexVector::new(amplitudes)?)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Ok(Self {
            amplitudes: ComplexVector::basis(dim, index)?,
        })
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `e^{i alpha} |psi>`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        Self {
            amplitudes: self.amplitudes.scale(Complex::from_polar(1.0, alpha)),
        }
    }

    /// The rank-one projector `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        outer_product(&self.amplitudes, &self.amplitudes).expect("same vector")
    }
}

/// A Hermitian operator together with its spectral decomposition.
///
/// Outcome index `i` always refers to the `i`-th largest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
    eigenkets: Vec<Ket>,
    labels: Option<Vec<String>>,
}

impl Observable {
    /// Builds a non-degenerate observable.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let obs = Self::with_degeneracy(matrix)?;
        let values = obs.spectrum.eigenvalues();
        for w in values.windows(2) {
            if w[0] - w[1] <= DEGENERACY_GAP {
                return Err(Error::DegenerateSpectrum { a: w[0], b: w[1] });
            }
        }
        Ok(obs)
    }

    /// Builds an observable without the non-degeneracy check. Any orthonormal
    /// basis of a degenerate eigenspace may come back.
    pub fn with_degeneracy(matrix: ComplexMatrix) -> Result<Self> {
        let spectrum = hermitian_eig(&matrix, HERMITIAN_TOL)?;
        let eigenkets = spectrum
            .eigenvectors()
            .iter()
            .map(|v| Ket::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            matrix,
            spectrum,
            eigenkets,
            labels: None,
        })
    }

    /// `sum_i values[i] |v_i><v_i|` for an orthonormal set `v_i`.
    pub fn from_spectrum(values: &[f64], vectors: &[Ket]) -> Result<Self> {
        let vecs: Vec<ComplexVector> = vectors.iter().map(|k| k.amplitudes.clone()).collect();
        Self::new(ComplexMatrix::from_spectrum(values, &vecs)?)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels
            .as_ref()
            .and_then(|l| l.get(index))
            .map(String::as_str)
    }

    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.spectrum.eigenvalues()[index])
    }

    pub fn eigenket(&self, index: usize) -> Result<&Ket> {
        self.check_index(index)?;
        Ok(&self.eigenkets[index])
    }

    pub fn eigenkets(&self) -> &[Ket] {
        &self.eigenkets
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.dim() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            })
        }
    }
}

/// A preparation procedure: pure states emitted with classical weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, Ket)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, Ket)>) -> Result<Self> {
        let dim = members.first().ok_or(Error::Empty("ensemble"))?.1.dim();
        let mut sum = 0.0;
        for (w, ket) in &members {
            if !w.is_finite() || *w < 0.0 || *w > 1.0 {
                return Err(Error::InvalidProbability(*w));
            }
            if ket.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: ket.dim(),
                });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum(sum));
        }
        Ok(Self { members })
    }

    /// A single state with weight one.
    pub fn pure(state: Ket) -> Self {
        Self {
            members: vec![(1.0, state)],
        }
    }

    pub fn members(&self) -> &[(f64, Ket)] {
        &self.members
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(|(w, _)| *w)
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Draws the index of a prepared member; zero-weight members never come up.
    pub fn sample_member<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let weights: Vec<f64> = self.weights().collect();
        sample_index(&weights, rng)
    }
}

/// A positive semidefinite operator of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityOperator {
    /// Validates `matrix` and caches its (clamped) spectrum.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > WEIGHT_SUM_TOL || trace.im.abs() > WEIGHT_SUM_TOL {
            return Err(Error::TraceNotOne(trace.re));
        }
        let raw = hermitian_eig(&matrix, HERMITIAN_TOL)?;
        if let Some(&min) = raw.eigenvalues().last() {
            if min < -NEGATIVE_WINDOW {
                return Err(Error::NegativeEigenvalue(min));
            }
        }
        let spectrum = raw.map_eigenvalues(|x| x.clamp(0.0, 1.0));
        let sum: f64 = spectrum.eigenvalues().iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::TraceNotOne(sum));
        }
        Ok(Self { matrix, spectrum })
    }

    /// `rho = sum_j p_j |psi_j><psi_j|`.
    pub fn from_ensemble(ensemble: &Ensemble) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(ensemble.dim())?;
        for (w, ket) in ensemble.members() {
            if *w > 0.0 {
                m = m.add(&ket.projector().scale(Complex::new(*w, 0.0)))?;
            }
        }
        Self::from_matrix(m)
    }

    pub fn pure(state: &Ket) -> Result<Self> {
        Self::from_matrix(state.projector())
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = ComplexMatrix::identity(dim)?.scale(Complex::new(1.0 / dim as f64, 0.0));
        Self::from_matrix(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Eigenvalues in descending order, clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The Bloch vector `r` with `rho = (I + r . sigma) / 2`; `None` unless `d = 2`.
    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let m = &self.matrix;
        let off = m[(0, 1)];
        Some([2.0 * off.re, -2.0 * off.im, m[(0, 0)].re - m[(1, 1)].re])
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Result<Self> {
        Self::from_matrix(self.matrix.conjugate_by(unitary)?)
    }
}

/// `|<o_i|z>|^2`.
pub fn born_probability(state: &Ket, obs: &Observable, outcome_index: usize) -> Result<f64> {
    let o = obs.eigenket(outcome_index)?;
    let amp = inner_product(&o.amplitudes, &state.amplitudes)?;
    Ok(amp.norm_sqr().min(1.0))
}

/// Born probabilities of every outcome, in outcome-index order.
pub fn born_distribution(state: &Ket, obs: &Observable) -> Result<Vec<f64>> {
    (0..obs.dim())
        .map(|i| born_probability(state, obs, i))
        .collect()
}

/// `<v|rho|v>`.
pub fn outcome_probability(rho: &DensityOperator, eigvec: &Ket) -> Result<f64> {
    let p = rho
        .matrix
        .sandwich(&eigvec.amplitudes, &eigvec.amplitudes)?;
    Ok(p.re.clamp(0.0, 1.0))
}

/// Coefficients `c_i = <o_i|z>` of `state` in the eigenbasis of `obs`.
pub fn expand_in_basis(state: &Ket, obs: &Observable) -> Result<Vec<Complex>> {
    obs.eigenkets()
        .iter()
        .map(|o| inner_product(&o.amplitudes, &state.amplitudes))
        .collect()
}

/// Draws one measurement outcome of `obs` on `state`.
pub fn sample_outcome<R: Rng + ?Sized>(
    state: &Ket,
    obs: &Observable,
    rng: &mut R,
) -> Result<usize> {
    let probs = born_distribution(state, obs)?;
    Ok(sample_index(&probs, rng))
}

/// Inverse-CDF draw from non-negative `weights` using one uniform variate.
///
/// Zero entries are never returned. Panics if every weight is zero.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    assert!(total > 0.0, "sample_index needs a positive weight");
    let u = rng.random::<f64>() * total;
    let mut cum = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        cum += w;
        last = i;
        if u < cum {
            return i;
        }
    }
    last
}

/// Spin-1/2 states and observables along arbitrary directions.
pub mod spin {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn z_plus() -> Ket {
        Ket::basis(2, 0).expect("valid basis")
    }

    pub fn z_minus() -> Ket {
        Ket::basis(2, 1).expect("valid basis")
    }

    /// `(|z+> + |z->) / sqrt 2`.
    pub fn x_plus() -> Ket {
        Ket::from_amplitudes(vec![
            Complex::new(FRAC_1_SQRT_2, 0.0),
            Complex::new(FRAC_1_SQRT_2, 0.0),
        ])
        .expect("unit norm")
    }

    /// `(|z+> - |z->) / sqrt 2`.
    pub fn x_minus() -> Ket {
        Ket::from_amplitudes(vec![
            Complex::new(FRAC_1_SQRT_2, 0.0),
            Complex::new(-FRAC_1_SQRT_2, 0.0),
        ])
        .expect("unit norm")
    }

    /// `cos(theta/2)|z+> + e^{i phi} sin(theta/2)|z->`, the +1 eigenstate of
    /// `n . sigma` for the unit vector `n(theta, phi)`.
    pub fn direction_ket(theta: f64, phi: f64) -> Result<Ket> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite("angle"));
        }
        Ket::from_amplitudes(vec![
            Complex::new((theta / 2.0).cos(), 0.0),
            Complex::from_polar((theta / 2.0).sin(), phi),
        ])
    }

    /// Polar and azimuthal angles of a qubit state on the Bloch sphere.
    pub fn bloch_angles(state: &Ket) -> Result<(f64, f64)> {
        if state.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: state.dim(),
            });
        }
        let a = state.amplitudes()[0];
        let b = state.amplitudes()[1];
        let theta = 2.0 * b.norm().atan2(a.norm());
        // azimuth is arbitrary at the poles
        let phi = if a.norm() == 0.0 || b.norm() == 0.0 {
            0.0
        } else {
            (b * a.conj()).arg()
        };
        Ok((theta, phi))
    }

    /// Spin-1/2 operators scaled by a reduced Planck constant.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct SpinHalf {
        hbar: f64,
    }

    impl Default for SpinHalf {
        fn default() -> Self {
            Self { hbar: 1.0 }
        }
    }

    impl SpinHalf {
        pub fn new(hbar: f64) -> Result<Self> {
            if !(hbar.is_finite() && hbar > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "hbar must be positive, got {hbar}"
                )));
            }
            Ok(Self { hbar })
        }

        pub fn hbar(&self) -> f64 {
            self.hbar
        }

        fn two_level(&self, plus: Ket, minus: Ket, labels: [&str; 2]) -> Observable {
            let h = self.hbar / 2.0;
            Observable::from_spectrum(&[h, -h], &[plus, minus])
                .and_then(|o| o.with_labels(labels.iter().map(|s| s.to_string()).collect()))
                .expect("spin-1/2 observable is valid")
        }

        /// `(+hbar/2)|z+><z+| + (-hbar/2)|z-><z-|`.
        pub fn sz(&self) -> Observable {
            self.two_level(z_plus(), z_minus(), ["z+", "z-"])
        }

        /// `(+hbar/2)|x+><x+| + (-hbar/2)|x-><x-|`.
        pub fn sx(&self) -> Observable {
            self.two_level(x_plus(), x_minus(), ["x+", "x-"])
        }

        /// `(hbar/2) n . sigma` for `n = (sin t cos p, sin t sin p, cos t)`.
        ///
        /// Outcome 0 is `+hbar/2` with eigenvector [`direction_ket`].
        pub fn direction(&self, theta: f64, phi: f64) -> Result<Observable> {
            if !(theta.is_finite() && phi.is_finite()) {
                return Err(Error::NonFinite("angle"));
            }
            let h = self.hbar / 2.0;
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let m = ComplexMatrix::from_rows(vec![
                vec![
                    Complex::new(h * ct, 0.0),
                    Complex::new(h * st * cp, -h * st * sp),
                ],
                vec![
                    Complex::new(h * st * cp, h * st * sp),
                    Complex::new(-h * ct, 0.0),
                ],
            ])?;
            Observable::new(m)
        }
    }
}

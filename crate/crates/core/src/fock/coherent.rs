//! Coherent states and finite coherent-state mixtures.
//!
//! A mixture `Σ_k w_k |γ_k⟩⟨γ_k|` is the discrete stand-in for a
//! Glauber–Sudarshan P-function. Weights must sum to one but may be
//! negative, as long as the realized density matrix stays positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{SingleModeKet, TwoModeKet, TwoModeState};
use super::{FockCutoff, Ket};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, CMatrix, CVector};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Weight-sum tolerance for mixtures.
const WEIGHT_TOL: f64 = 1e-12;
/// Signed mixtures whose realized state dips below this are rejected.
const SIGNED_PSD_TOL: f64 = 1e-8;

/// A value produced by cutting an infinite expansion, with the discarded
/// probability mass measured before renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub tail: f64,
}

fn coherent_series(gamma: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(Complex64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0));
    for n in 1..=n_max {
        let prev = c[n - 1];
        c.push(prev * gamma / (n as f64).sqrt());
    }
    c
}

fn check_tail(mass: f64, tolerance: f64, n_max: usize) -> Result<f64> {
    let tail = (1.0 - mass).max(0.0);
    if tail > tolerance {
        return Err(Error::TailTooLarge { tail, tolerance, n_max });
    }
    Ok(tail)
}

/// Coherent state `|γ⟩` truncated at `n_max` and renormalized.
pub fn coherent_ket(gamma: Complex64, n_max: usize, tail_tolerance: f64) -> Result<Truncated<SingleModeKet>> {
    let series = coherent_series(gamma, n_max);
    let mass: f64 = series.iter().map(|c| c.norm_sqr()).sum();
    let tail = check_tail(mass, tail_tolerance, n_max)?;
    let value = SingleModeKet::new(CVector::from_vec(series))?;
    Ok(Truncated { value, tail })
}

/// Product coherent state `|γ₁⟩⊗|γ₂⟩` restricted to `n1 + n2 ≤ n_max`.
pub fn coherent_product_ket(
    gamma1: Complex64,
    gamma2: Complex64,
    cutoff: FockCutoff,
    tail_tolerance: f64,
) -> Result<Truncated<TwoModeKet>> {
    let n_max = cutoff.n_max();
    let (s1, s2) = (coherent_series(gamma1, n_max), coherent_series(gamma2, n_max));
    let amplitudes = CVector::from_iterator(
        cutoff.dim(),
        (0..cutoff.dim()).map(|i| {
            let (n1, n2) = cutoff.occupation(i);
            s1[n1] * s2[n2]
        }),
    );
    let tail = check_tail(amplitudes.norm_squared(), tail_tolerance, n_max)?;
    Ok(Truncated { value: TwoModeKet::new(cutoff, amplitudes)?, tail })
}

/// Tensor product of two single-mode kets restricted to `n1 + n2 ≤ n_max`.
pub fn product_ket(
    mode1: &SingleModeKet,
    mode2: &SingleModeKet,
    cutoff: FockCutoff,
    tail_tolerance: f64,
) -> Result<Truncated<TwoModeKet>> {
    let (a, b) = (mode1.amplitudes(), mode2.amplitudes());
    let zero = Complex64::new(0.0, 0.0);
    let amplitudes = CVector::from_iterator(
        cutoff.dim(),
        (0..cutoff.dim()).map(|i| {
            let (n1, n2) = cutoff.occupation(i);
            match (a.get(n1), b.get(n2)) {
                (Some(x), Some(y)) => x * y,
                _ => zero,
            }
        }),
    );
    let tail = check_tail(amplitudes.norm_squared(), tail_tolerance, cutoff.n_max())?;
    Ok(Truncated { value: TwoModeKet::new(cutoff, amplitudes)?, tail })
}

/// Pure-state density operator of `mode1 ⊗ mode2`.
pub fn product_state(
    mode1: &SingleModeKet,
    mode2: &SingleModeKet,
    cutoff: FockCutoff,
    tail_tolerance: f64,
) -> Result<Truncated<TwoModeState>> {
    let ket = product_ket(mode1, mode2, cutoff, tail_tolerance)?;
    Ok(Truncated { value: ket.value.to_density(), tail: ket.tail })
}

/// One atom `w δ²(γ − γ_k)` of a discrete P-function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureTerm {
    pub weight: f64,
    pub amplitude: Complex64,
}

/// Finite coherent-state mixture `Σ_k w_k |γ_k⟩⟨γ_k|` with `Σ_k w_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MixtureTerm>", into = "Vec<MixtureTerm>")]
pub struct CoherentMixture {
    terms: Vec<MixtureTerm>,
}

impl TryFrom<Vec<MixtureTerm>> for CoherentMixture {
    type Error = Error;

    fn try_from(terms: Vec<MixtureTerm>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<CoherentMixture> for Vec<MixtureTerm> {
    fn from(mix: CoherentMixture) -> Self {
        mix.terms
    }
}

impl CoherentMixture {
    pub fn new(terms: Vec<MixtureTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyMixture);
        }
        if terms.iter().any(|t| !t.weight.is_finite() || !t.amplitude.re.is_finite() || !t.amplitude.im.is_finite()) {
            return Err(Error::InvalidParameter("mixture contains non-finite values".into()));
        }
        let sum: f64 = terms.iter().map(|t| t.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::BadWeights { sum });
        }
        Ok(Self { terms })
    }

    /// Builds a mixture from `(weight, amplitude)` pairs.
    pub fn from_pairs(pairs: &[(f64, Complex64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(weight, amplitude)| MixtureTerm { weight, amplitude }).collect())
    }

    /// The pure coherent state `|γ⟩`.
    pub fn single(gamma: Complex64) -> Self {
        Self { terms: vec![MixtureTerm { weight: 1.0, amplitude: gamma }] }
    }

    pub fn vacuum() -> Self {
        Self::single(Complex64::new(0.0, 0.0))
    }

    /// `points` equally weighted amplitudes `radius·e^{i(phase + 2πk/points)}`.
    pub fn phase_ring(radius: f64, points: usize, phase: f64) -> Result<Self> {
        if points == 0 {
            return Err(Error::EmptyMixture);
        }
        let w = 1.0 / points as f64;
        Self::new(
            (0..points)
                .map(|k| MixtureTerm {
                    weight: w,
                    amplitude: Complex64::from_polar(radius, phase + std::f64::consts::TAU * k as f64 / points as f64),
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some weight is negative.
    pub fn is_signed(&self) -> bool {
        self.terms.iter().any(|t| t.weight < 0.0)
    }

    /// Drops zero-weight terms and merges terms with identical amplitudes.
    pub fn pruned(&self) -> Self {
        let mut merged: Vec<MixtureTerm> = Vec::new();
        for t in &self.terms {
            match merged.iter_mut().find(|m| m.amplitude == t.amplitude) {
                Some(m) => m.weight += t.weight,
                None => merged.push(*t),
            }
        }
        merged.retain(|t| t.weight.abs() > 1e-15);
        if merged.is_empty() {
            return self.clone();
        }
        Self { terms: merged }
    }

    /// Every amplitude multiplied by `factor`; weights unchanged.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| MixtureTerm { weight: t.weight, amplitude: t.amplitude * factor })
                .collect(),
        }
    }

    /// `Σ_k w_k |γ_k⟩⟨γ_k|` on a single mode truncated at `n_max`.
    pub fn single_mode_state(&self, n_max: usize, tail_tolerance: f64) -> Result<super::SingleModeState> {
        let mut matrix = CMatrix::zeros(n_max + 1, n_max + 1);
        let mut vectors = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let ket = coherent_ket(t.amplitude, n_max, tail_tolerance)?;
            matrix += linalg::outer(ket.value.amplitudes()).scale(t.weight);
            vectors.push(ket.value.amplitudes().clone());
        }
        if self.is_signed() {
            check_signed_positivity(&self.weights(), &vectors)?;
        }
        let state = super::SingleModeState::from_matrix_unchecked(matrix);
        state.validate_structure()?;
        Ok(state)
    }

    fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }
}

/// `Σ_k w_k |v_k⟩⟨v_k|` assembled block by block in term order.
pub(crate) fn pure_mixture(cutoff: FockCutoff, weights: &[f64], kets: &[TwoModeKet], exec: Exec) -> TwoModeState {
    let nb = cutoff.num_blocks();
    let split: Vec<Vec<CVector>> =
        kets.iter().map(|k| (0..nb).map(|n| CVector::from_column_slice(k.block(n))).collect()).collect();
    let blocks = exec.map_range(nb * nb, |i| {
        let (row, col) = (i / nb, i % nb);
        let mut b = CMatrix::zeros(row + 1, col + 1);
        for (w, parts) in weights.iter().zip(&split) {
            b += (&parts[row] * parts[col].adjoint()).scale(*w);
        }
        let zero = row != col && b.iter().all(|z| *z == Complex64::new(0.0, 0.0));
        (!zero).then_some(b)
    });
    TwoModeState::from_blocks_unchecked(cutoff, blocks)
}

/// Smallest eigenvalue of `Σ_k w_k |v_k⟩⟨v_k|`, through the `K×K` matrix
/// `G^{1/2} W G^{1/2}` with Gram matrix `G_jk = ⟨v_j|v_k⟩`, which shares the
/// nonzero spectrum.
pub(crate) fn signed_mixture_min_eigenvalue(weights: &[f64], vectors: &[CVector]) -> f64 {
    let k = vectors.len();
    let dim = vectors.first().map_or(0, |v| v.len());
    let gram = CMatrix::from_fn(k, k, |i, j| vectors[i].dotc(&vectors[j]));
    let (values, basis) = linalg::hermitian_eigen(&gram);
    let mut root = basis.clone();
    for (c, &v) in values.iter().enumerate() {
        let mut col = root.column_mut(c);
        col *= Complex64::new(v.max(0.0).sqrt(), 0.0);
    }
    let sqrt_gram = root * basis.adjoint();
    let w = CMatrix::from_diagonal(&CVector::from_iterator(k, weights.iter().map(|&x| Complex64::new(x, 0.0))));
    let reduced = &sqrt_gram * w * &sqrt_gram;
    let min_reduced = linalg::min_eigenvalue(&reduced);
    if k < dim {
        min_reduced.min(0.0)
    } else {
        min_reduced
    }
}

fn check_signed_positivity(weights: &[f64], vectors: &[CVector]) -> Result<()> {
    let min_eigenvalue = signed_mixture_min_eigenvalue(weights, vectors);
    if min_eigenvalue < -SIGNED_PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(())
}

/// [`mixture_state_with`] using the default execution policy.
pub fn mixture_state(mix: &CoherentMixture, cutoff: FockCutoff, tail_tolerance: f64) -> Result<TwoModeState> {
    mixture_state_with(mix, cutoff, tail_tolerance, Exec::default())
}

/// `Σ_k w_k |γ_k⟩₁⟨γ_k| ⊗ |0⟩₂⟨0|` on the truncated two-mode space.
///
/// Mixtures with negative weights are checked for positivity and rejected
/// with [`Error::NotPositive`] when the realized matrix is unphysical.
pub fn mixture_state_with(
    mix: &CoherentMixture,
    cutoff: FockCutoff,
    tail_tolerance: f64,
    exec: Exec,
) -> Result<TwoModeState> {
    let zero = Complex64::new(0.0, 0.0);
    let kets = exec
        .map_slice(mix.terms(), |t| coherent_product_ket(t.amplitude, zero, cutoff, tail_tolerance))
        .into_iter()
        .map(|k| k.map(|t| t.value))
        .collect::<Result<Vec<_>>>()?;
    let weights = mix.weights();
    if mix.is_signed() {
        let vectors: Vec<CVector> = kets.iter().map(|k| k.amplitudes().clone()).collect();
        check_signed_positivity(&weights, &vectors)?;
    }
    let state = pure_mixture(cutoff, &weights, &kets, exec);
    state.validate_structure()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{trace_distance, Mode};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_exact() {
        let k = coherent_ket(c(0.0, 0.0), 10, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_eq!(k.tail, 0.0);
        assert_eq!(k.value.amplitudes()[0], c(1.0, 0.0));
        assert!(k.value.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn large_amplitude_needs_larger_cutoff() {
        assert!(matches!(coherent_ket(c(3.0, 0.0), 4, DEFAULT_TAIL_TOLERANCE), Err(Error::TailTooLarge { .. })));
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        assert!(matches!(
            CoherentMixture::from_pairs(&[(0.5, c(1.0, 0.0)), (0.4, c(0.0, 1.0))]),
            Err(Error::BadWeights { .. })
        ));
        assert!(matches!(CoherentMixture::new(vec![]), Err(Error::EmptyMixture)));
    }

    #[test]
    fn cat_mixture_has_no_odd_coherence() {
        let mix = CoherentMixture::from_pairs(&[(0.5, c(1.0, 0.0)), (0.5, c(-1.0, 0.0))]).unwrap();
        let rho = mixture_state(&mix, FockCutoff::new(16), DEFAULT_TAIL_TOLERANCE).unwrap();
        let m = rho.partial_trace(Mode::One);
        assert!(m.matrix()[(0, 1)].norm() < 1e-15);
        assert!(m.matrix()[(0, 2)].norm() > 0.1);
    }

    #[test]
    fn unphysical_signed_mixture_rejected() {
        // 2|0⟩⟨0| - |1⟩⟨1|-like weights on far-apart amplitudes is not positive.
        let mix = CoherentMixture::from_pairs(&[(2.0, c(0.0, 0.0)), (-1.0, c(2.0, 0.0))]).unwrap();
        assert!(matches!(
            mixture_state(&mix, FockCutoff::new(30), DEFAULT_TAIL_TOLERANCE),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn signed_min_eigenvalue_matches_dense() {
        let cutoff = FockCutoff::new(12);
        let weights = [1.3, -0.3];
        let kets: Vec<TwoModeKet> = [c(0.2, 0.0), c(0.25, 0.05)]
            .iter()
            .map(|&g| coherent_product_ket(g, c(0.0, 0.0), cutoff, 1e-10).unwrap().value)
            .collect();
        let rho = pure_mixture(cutoff, &weights, &kets, Exec::Sequential);
        let dense = linalg::min_eigenvalue(&rho.to_dense());
        let vectors: Vec<CVector> = kets.iter().map(|k| k.amplitudes().clone()).collect();
        let reduced = signed_mixture_min_eigenvalue(&weights, &vectors);
        assert!((dense - reduced).abs() < 1e-12, "{dense} vs {reduced}");
    }

    #[test]
    fn product_matches_coherent_product() {
        let cutoff = FockCutoff::new(20);
        let a = coherent_ket(c(0.7, 0.1), 20, 1e-10).unwrap().value;
        let b = coherent_ket(c(-0.3, 0.4), 20, 1e-10).unwrap().value;
        let p = product_state(&a, &b, cutoff, 1e-10).unwrap().value;
        let q = coherent_product_ket(c(0.7, 0.1), c(-0.3, 0.4), cutoff, 1e-10).unwrap().value.to_density();
        assert!(trace_distance(&p, &q).unwrap() < 1e-12);
    }

    #[test]
    fn pruning() {
        let mix = CoherentMixture::from_pairs(&[(1.0, c(1.0, 0.0)), (0.0, c(0.0, 1.0))]).unwrap();
        assert_eq!(mix.pruned().len(), 1);
    }
}

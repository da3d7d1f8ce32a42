use std::borrow::Cow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::metrics::{Ket, Operator};
use super::{FockCutoff, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, CMatrix, CVector};

/// One of the two cavity modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    One,
    Two,
}

fn normalize(mut amplitudes: CVector) -> Result<CVector> {
    let norm = amplitudes.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidParameter(format!("cannot normalize vector of norm {norm}")));
    }
    amplitudes.unscale_mut(norm);
    Ok(amplitudes)
}

/// Normalized single-mode state vector on `{|0⟩, …, |n_max⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeKet {
    amplitudes: CVector,
}

impl SingleModeKet {
    /// Normalizes `amplitudes`; fails on a zero or non-finite vector.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("empty state vector".into()));
        }
        Ok(Self { amplitudes: normalize(amplitudes)? })
    }

    /// Number state `|n⟩`.
    pub fn number(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidParameter(format!("|{n}⟩ lies above n_max = {n_max}")));
        }
        let mut v = CVector::zeros(n_max + 1);
        v[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn to_density(&self) -> SingleModeState {
        SingleModeState { matrix: linalg::outer(&self.amplitudes) }
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }
}

impl Ket for SingleModeKet {
    fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

/// Normalized two-mode state vector in the block-ordered triangular basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeKet {
    cutoff: FockCutoff,
    amplitudes: CVector,
}

impl TwoModeKet {
    pub fn new(cutoff: FockCutoff, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != cutoff.dim() {
            return Err(Error::DimensionMismatch { expected: cutoff.dim(), found: amplitudes.len() });
        }
        Ok(Self { cutoff, amplitudes: normalize(amplitudes)? })
    }

    /// Builds the vector from coefficients `f(n1, n2)`, then normalizes.
    pub fn from_fn(cutoff: FockCutoff, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let amplitudes = CVector::from_iterator(
            cutoff.dim(),
            (0..cutoff.dim()).map(|i| {
                let (n1, n2) = cutoff.occupation(i);
                f(n1, n2)
            }),
        );
        Self::new(cutoff, amplitudes)
    }

    /// Number state `|n1, n2⟩`.
    pub fn number(cutoff: FockCutoff, n1: usize, n2: usize) -> Result<Self> {
        let index = cutoff
            .index(n1, n2)
            .ok_or_else(|| Error::InvalidParameter(format!("|{n1},{n2}⟩ lies above n_max = {}", cutoff.n_max())))?;
        let mut v = CVector::zeros(cutoff.dim());
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self { cutoff, amplitudes: v })
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    /// Amplitudes of block `total`, indexed by `n2`.
    pub fn block(&self, total: usize) -> &[Complex64] {
        let start = FockCutoff::block_offset(total);
        &self.amplitudes.as_slice()[start..start + FockCutoff::block_dim(total)]
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> Complex64 {
        self.cutoff.index(n1, n2).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn to_density(&self) -> TwoModeState {
        let nb = self.cutoff.num_blocks();
        let columns: Vec<CVector> = (0..nb).map(|n| CVector::from_column_slice(self.block(n))).collect();
        let mut blocks = Vec::with_capacity(nb * nb);
        for row in &columns {
            for col in &columns {
                let zero = row.iter().all(|z| *z == Complex64::new(0.0, 0.0))
                    || col.iter().all(|z| *z == Complex64::new(0.0, 0.0));
                blocks.push((!zero).then(|| row * col.adjoint()));
            }
        }
        for n in 0..nb {
            let diag = &mut blocks[n * nb + n];
            if diag.is_none() {
                *diag = Some(CMatrix::zeros(n + 1, n + 1));
            }
        }
        TwoModeState { cutoff: self.cutoff, blocks }
    }
}

impl Ket for TwoModeKet {
    fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

/// Density operator of a single mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    matrix: CMatrix,
}

impl SingleModeState {
    /// Wraps and validates a density matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.is_empty() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let state = Self { matrix };
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn n_max(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix).into_iter().filter(|&p| p > 1e-300).map(|p| -p * p.ln()).sum()
    }

    /// Hermiticity and unit trace, without the eigenvalue check.
    pub fn validate_structure(&self) -> Result<()> {
        let asymmetry = linalg::hermitian_asymmetry(&self.matrix);
        if asymmetry > HERMITIAN_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    /// `⟨n|ρ|n⟩` for `n = 0..=n_max`.
    pub fn photon_distribution(&self) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|n| self.matrix[(n, n)].re).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.photon_distribution().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `tr(ρ a)`.
    pub fn mean_annihilation(&self) -> Complex64 {
        // a|n⟩ = √n|n-1⟩, so tr(ρa) = Σ_n √n ρ[n, n-1].
        (1..self.matrix.nrows()).map(|n| self.matrix[(n, n - 1)] * (n as f64).sqrt()).sum()
    }

    /// Top-left `(k+1)×(k+1)` block: the restriction to `{|0⟩, …, |k⟩}`.
    pub fn project(&self, k: usize) -> CMatrix {
        let d = (k + 1).min(self.matrix.nrows());
        self.matrix.view((0, 0), (d, d)).into_owned()
    }

    /// Frobenius norm of `[ρ, σ]`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::DimensionMismatch { expected: self.matrix.nrows(), found: other.matrix.nrows() });
        }
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(c.norm())
    }
}

impl Operator for SingleModeState {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn matrix(&self) -> Cow<'_, CMatrix> {
        Cow::Borrowed(&self.matrix)
    }
}

/// Density operator on the truncated two-mode space, stored as a grid of
/// blocks `ρ_NM` between total-photon sectors `N` and `M`. Diagonal blocks
/// are always present; an absent off-diagonal block is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    cutoff: FockCutoff,
    blocks: Vec<Option<CMatrix>>,
}

impl TwoModeState {
    /// Builds a state from its block grid (row-major, `(n_max+1)²` entries)
    /// and validates every invariant.
    pub fn from_blocks(cutoff: FockCutoff, blocks: Vec<Option<CMatrix>>) -> Result<Self> {
        let nb = cutoff.num_blocks();
        if blocks.len() != nb * nb {
            return Err(Error::DimensionMismatch { expected: nb * nb, found: blocks.len() });
        }
        for (i, block) in blocks.iter().enumerate() {
            let (row, col) = (i / nb, i % nb);
            if let Some(b) = block {
                if b.shape() != (row + 1, col + 1) {
                    return Err(Error::DimensionMismatch { expected: (row + 1) * (col + 1), found: b.len() });
                }
            }
        }
        let mut state = Self { cutoff, blocks };
        state.fill_diagonal();
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_blocks_unchecked(cutoff: FockCutoff, blocks: Vec<Option<CMatrix>>) -> Self {
        let mut state = Self { cutoff, blocks };
        state.fill_diagonal();
        state
    }

    fn fill_diagonal(&mut self) {
        let nb = self.cutoff.num_blocks();
        for n in 0..nb {
            let diag = &mut self.blocks[n * nb + n];
            if diag.is_none() {
                *diag = Some(CMatrix::zeros(n + 1, n + 1));
            }
        }
    }

    /// Splits a dense matrix in the block-ordered basis into blocks and
    /// validates the result. All-zero off-diagonal blocks are dropped.
    pub fn from_dense(cutoff: FockCutoff, dense: &CMatrix) -> Result<Self> {
        if dense.shape() != (cutoff.dim(), cutoff.dim()) {
            return Err(Error::DimensionMismatch { expected: cutoff.dim(), found: dense.nrows() });
        }
        let nb = cutoff.num_blocks();
        let mut blocks = Vec::with_capacity(nb * nb);
        for row in 0..nb {
            for col in 0..nb {
                let b = dense
                    .view((FockCutoff::block_offset(row), FockCutoff::block_offset(col)), (row + 1, col + 1))
                    .into_owned();
                let zero = row != col && b.iter().all(|z| *z == Complex64::new(0.0, 0.0));
                blocks.push((!zero).then_some(b));
            }
        }
        Self::from_blocks(cutoff, blocks)
    }

    pub fn to_dense(&self) -> CMatrix {
        let nb = self.cutoff.num_blocks();
        let mut dense = CMatrix::zeros(self.cutoff.dim(), self.cutoff.dim());
        for row in 0..nb {
            for col in 0..nb {
                if let Some(b) = self.block(row, col) {
                    dense
                        .view_mut((FockCutoff::block_offset(row), FockCutoff::block_offset(col)), (row + 1, col + 1))
                        .copy_from(b);
                }
            }
        }
        dense
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn block(&self, row: usize, col: usize) -> Option<&CMatrix> {
        let nb = self.cutoff.num_blocks();
        self.blocks.get(row * nb + col).and_then(Option::as_ref)
    }

    pub(crate) fn blocks(&self) -> &[Option<CMatrix>] {
        &self.blocks
    }

    /// True when no coherence between different photon-number sectors is stored.
    pub fn is_block_diagonal(&self) -> bool {
        let nb = self.cutoff.num_blocks();
        self.blocks.iter().enumerate().all(|(i, b)| i / nb == i % nb || b.is_none())
    }

    pub fn trace(&self) -> f64 {
        self.block_populations().iter().sum()
    }

    /// `tr(ρ Π_N)` for every total photon number `N`.
    pub fn block_populations(&self) -> Vec<f64> {
        (0..self.cutoff.num_blocks()).map(|n| self.block(n, n).map_or(0.0, |b| b.trace().re)).collect()
    }

    /// `tr(ρ (N₁ + N₂))`.
    pub fn mean_total_photons(&self) -> f64 {
        self.block_populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `tr(ρ a†a)` for one mode.
    pub fn mean_photons(&self, mode: Mode) -> f64 {
        let mut total = 0.0;
        for n in 0..self.cutoff.num_blocks() {
            if let Some(b) = self.block(n, n) {
                for n2 in 0..=n {
                    let count = match mode {
                        Mode::One => n - n2,
                        Mode::Two => n2,
                    };
                    total += count as f64 * b[(n2, n2)].re;
                }
            }
        }
        total
    }

    /// `tr(ρ²)`, the squared Frobenius norm of a Hermitian state.
    pub fn purity(&self) -> f64 {
        self.blocks.iter().flatten().map(|b| b.norm_squared()).sum()
    }

    /// Largest elementwise `|ρ - ρ†|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let nb = self.cutoff.num_blocks();
        let mut worst = 0.0_f64;
        for row in 0..nb {
            for col in row..nb {
                let d = match (self.block(row, col), self.block(col, row)) {
                    (Some(a), Some(b)) => linalg::max_abs(&(a - b.adjoint())),
                    (Some(a), None) | (None, Some(a)) => linalg::max_abs(a),
                    (None, None) => 0.0,
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.is_block_diagonal() {
            let nb = self.cutoff.num_blocks();
            (0..nb).filter_map(|n| self.block(n, n)).map(linalg::min_eigenvalue).fold(f64::INFINITY, f64::min)
        } else {
            linalg::min_eigenvalue(&self.to_dense())
        }
    }

    /// Hermiticity and unit trace, without the eigenvalue check.
    pub fn validate_structure(&self) -> Result<()> {
        let asymmetry = self.hermitian_asymmetry();
        if asymmetry > HERMITIAN_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        Ok(())
    }

    /// Full check: Hermitian, unit trace and positive semidefinite.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    /// Reduced state of mode `keep`.
    pub fn partial_trace(&self, keep: Mode) -> SingleModeState {
        let n_max = self.cutoff.n_max();
        let nb = self.cutoff.num_blocks();
        let mut reduced = CMatrix::zeros(n_max + 1, n_max + 1);
        for row in 0..nb {
            for col in 0..nb {
                let Some(b) = self.block(row, col) else { continue };
                // Block entries are indexed by n2 (rows) and m2 (columns).
                match keep {
                    Mode::One => {
                        for n2 in 0..=row.min(col) {
                            reduced[(row - n2, col - n2)] += b[(n2, n2)];
                        }
                    }
                    Mode::Two => {
                        for n2 in 0..=row {
                            let n1 = row - n2;
                            if n1 <= col {
                                reduced[(n2, col - n1)] += b[(n2, col - n1)];
                            }
                        }
                    }
                }
            }
        }
        SingleModeState::from_matrix_unchecked(reduced)
    }

    /// `ρ_NM ↦ f(N, M, ρ_NM)` over every stored block. Absent blocks stay absent.
    pub(crate) fn map_blocks<F>(&self, exec: Exec, f: F) -> Self
    where
        F: Fn(usize, usize, &CMatrix) -> CMatrix + Sync + Send,
    {
        let nb = self.cutoff.num_blocks();
        let blocks = exec.map_range(nb * nb, |i| self.blocks[i].as_ref().map(|b| f(i / nb, i % nb, b)));
        Self { cutoff: self.cutoff, blocks }
    }

    /// `ρ_NM ↦ L_N ρ_NM R_M†`, the action of a block-diagonal `L ρ R†`.
    pub(crate) fn sandwich(&self, left: &[CMatrix], right: &[CMatrix], exec: Exec) -> Self {
        self.map_blocks(exec, |row, col, b| &left[row] * b * right[col].adjoint())
    }

    /// `Σ_k c_k ρ_k` over states sharing a cutoff. The result is not validated.
    pub fn linear_combination(terms: &[(f64, &TwoModeState)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::EmptyMixture)?.1;
        let cutoff = first.cutoff;
        let nb = cutoff.num_blocks();
        let mut blocks: Vec<Option<CMatrix>> = vec![None; nb * nb];
        for (c, state) in terms {
            if state.cutoff != cutoff {
                return Err(Error::DimensionMismatch { expected: cutoff.dim(), found: state.cutoff.dim() });
            }
            for (acc, b) in blocks.iter_mut().zip(&state.blocks) {
                if let Some(b) = b {
                    match acc {
                        Some(a) => *a += b.scale(*c),
                        None => *acc = Some(b.scale(*c)),
                    }
                }
            }
        }
        Ok(Self::from_blocks_unchecked(cutoff, blocks))
    }
}

impl Operator for TwoModeState {
    fn dim(&self) -> usize {
        self.cutoff.dim()
    }

    fn matrix(&self) -> Cow<'_, CMatrix> {
        Cow::Owned(self.to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::trace_distance;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn number_state_lives_in_one_block() {
        let cutoff = FockCutoff::new(4);
        let rho = TwoModeKet::number(cutoff, 1, 1).unwrap().to_density();
        let pops = rho.block_populations();
        assert_eq!(pops, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(rho.is_block_diagonal());
        assert!((rho.mean_total_photons() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bell_like_marginal_is_maximally_mixed() {
        let cutoff = FockCutoff::new(3);
        let ket = TwoModeKet::from_fn(cutoff, |n1, n2| match (n1, n2) {
            (0, 1) | (1, 0) => c(1.0),
            _ => c(0.0),
        })
        .unwrap();
        let rho = ket.to_density();
        for mode in [Mode::One, Mode::Two] {
            let m = rho.partial_trace(mode);
            let mut expected = CMatrix::zeros(4, 4);
            expected[(0, 0)] = c(0.5);
            expected[(1, 1)] = c(0.5);
            assert!(linalg::max_abs(&(m.matrix() - expected)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_number_product() {
        let cutoff = FockCutoff::new(5);
        let rho = TwoModeKet::number(cutoff, 2, 1).unwrap().to_density();
        let one = rho.partial_trace(Mode::One);
        let two = rho.partial_trace(Mode::Two);
        assert_eq!(one.photon_distribution()[2], 1.0);
        assert_eq!(two.photon_distribution()[1], 1.0);
        assert!((rho.mean_photons(Mode::One) - 2.0).abs() < 1e-15);
        assert!((rho.mean_photons(Mode::Two) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dense_round_trip() {
        let cutoff = FockCutoff::new(3);
        let ket = TwoModeKet::from_fn(cutoff, |n1, n2| Complex64::new(1.0 / (1 + n1) as f64, n2 as f64 * 0.3)).unwrap();
        let rho = ket.to_density();
        let back = TwoModeState::from_dense(cutoff, &rho.to_dense()).unwrap();
        assert!(trace_distance(&rho, &back).unwrap() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let cutoff = FockCutoff::new(1);
        let mut dense = CMatrix::zeros(3, 3);
        dense[(0, 0)] = c(1.0);
        dense[(0, 1)] = c(0.1);
        assert!(matches!(TwoModeState::from_dense(cutoff, &dense), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let cutoff = FockCutoff::new(1);
        let mut dense = CMatrix::zeros(3, 3);
        dense[(0, 0)] = c(1.2);
        dense[(1, 1)] = c(-0.2);
        assert!(matches!(TwoModeState::from_dense(cutoff, &dense), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn single_mode_mean_annihilation() {
        // (|0⟩ + |1⟩)/√2 has ⟨a⟩ = 1/2.
        let ket = SingleModeKet::new(CVector::from_vec(vec![c(1.0), c(1.0), c(0.0)])).unwrap();
        let a = ket.to_density().mean_annihilation();
        assert!((a - c(0.5)).norm() < 1e-15);
    }
}

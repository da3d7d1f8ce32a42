//! Truncated two-mode Fock space organized by total photon number.
//!
//! The basis is `{|n1, n2⟩ : n1 + n2 ≤ n_max}`, ordered block by block in
//! the total photon number `N = n1 + n2` and, inside block `N`, by `n2`.
//! Photon-number-conserving operators are block diagonal in this basis.

pub(crate) mod coherent;
mod io;
mod metrics;
mod state;

pub use coherent::{
    coherent_ket, coherent_product_ket, mixture_state, mixture_state_with, product_ket, product_state, CoherentMixture,
    MixtureTerm, Truncated, DEFAULT_TAIL_TOLERANCE,
};
pub use io::{SingleModeStateFile, TwoModeStateFile, SCHEMA_VERSION};
pub use metrics::{fidelity_pure, overlap, trace_distance, Ket, Operator};
pub use state::{Mode, SingleModeKet, SingleModeState, TwoModeKet, TwoModeState};

use serde::{Deserialize, Serialize};

/// Elementwise Hermiticity tolerance for validated states.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for validated states.
pub const TRACE_TOL: f64 = 1e-10;
/// Lowest admissible eigenvalue for validated states.
pub const PSD_TOL: f64 = 1e-10;

/// Maximum total photon number of the truncated two-mode space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockCutoff {
    n_max: usize,
}

impl FockCutoff {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(self) -> usize {
        self.n_max
    }

    /// Dimension of the two-mode space, `(n_max+1)(n_max+2)/2`.
    pub fn dim(self) -> usize {
        (self.n_max + 1) * (self.n_max + 2) / 2
    }

    pub fn num_blocks(self) -> usize {
        self.n_max + 1
    }

    /// Dimension of the block with `total` photons.
    pub fn block_dim(total: usize) -> usize {
        total + 1
    }

    /// Position of the first basis vector of block `total`.
    pub fn block_offset(total: usize) -> usize {
        total * (total + 1) / 2
    }

    pub fn index(self, n1: usize, n2: usize) -> Option<usize> {
        let total = n1 + n2;
        (total <= self.n_max).then(|| Self::block_offset(total) + n2)
    }

    /// Inverse of [`FockCutoff::index`].
    pub fn occupation(self, index: usize) -> (usize, usize) {
        let mut total = 0;
        while Self::block_offset(total + 1) <= index {
            total += 1;
        }
        let n2 = index - Self::block_offset(total);
        (total - n2, n2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let c = FockCutoff::new(4);
        assert_eq!(c.dim(), 15);
        assert_eq!(FockCutoff::block_dim(3), 4);
        assert_eq!(FockCutoff::new(0).dim(), 1);
        let total: usize = (0..c.num_blocks()).map(FockCutoff::block_dim).sum();
        assert_eq!(total, c.dim());
    }

    #[test]
    fn index_round_trip() {
        let c = FockCutoff::new(6);
        for i in 0..c.dim() {
            let (n1, n2) = c.occupation(i);
            assert_eq!(c.index(n1, n2), Some(i));
        }
        assert_eq!(c.index(4, 3), None);
        assert_eq!(c.index(0, 0), Some(0));
        assert_eq!(c.index(1, 0), Some(1));
        assert_eq!(c.index(0, 1), Some(2));
    }
}

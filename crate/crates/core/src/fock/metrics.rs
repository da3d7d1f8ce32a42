use std::borrow::Cow;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// A density operator that can be viewed as a dense matrix.
pub trait Operator {
    fn dim(&self) -> usize;
    fn matrix(&self) -> Cow<'_, CMatrix>;
}

/// A normalized state vector.
pub trait Ket {
    fn amplitudes(&self) -> &CVector;
}

/// `½‖a − b‖₁`, clamped to `[0, 1]`.
pub fn trace_distance<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let diff = a.matrix().into_owned() - b.matrix().as_ref();
    Ok((0.5 * linalg::trace_norm_hermitian(&diff)).clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
pub fn fidelity_pure<K: Ket + ?Sized, S: Operator + ?Sized>(psi: &K, rho: &S) -> Result<f64> {
    let v = psi.amplitudes();
    if v.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: v.len() });
    }
    let value = (v.adjoint() * rho.matrix().as_ref() * v)[(0, 0)].re;
    Ok(value.clamp(0.0, 1.0))
}

/// `⟨ψ|φ⟩`.
pub fn overlap<A: Ket + ?Sized, B: Ket + ?Sized>(psi: &A, phi: &B) -> Result<Complex64> {
    let (a, b) = (psi.amplitudes(), phi.amplitudes());
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.dotc(b))
}

impl Ket for CVector {
    fn amplitudes(&self) -> &CVector {
        self
    }
}

impl Operator for CMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn matrix(&self) -> Cow<'_, CMatrix> {
        Cow::Borrowed(self)
    }
}

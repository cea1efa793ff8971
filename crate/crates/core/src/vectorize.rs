//! Representation bases and vectorization of operators.

use std::fmt;

use crate::error::{QslError, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{Real, C};
use crate::spectral::hermitian_eig;

/// Tolerance on `U^dagger U = I` for a representation basis.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A representation basis: the columns of a unitary matrix plus a label.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T> {
    unitary: ComplexMatrix<T>,
    tag: String,
}

impl<T: Real> Basis<T> {
    pub fn new(unitary: ComplexMatrix<T>, tag: impl Into<String>) -> Result<Self> {
        unitary.check_unitary(T::tol(UNITARITY_TOLERANCE))?;
        Ok(Self {
            unitary,
            tag: tag.into(),
        })
    }

    /// The computational basis.
    pub fn canonical(n: usize) -> Self {
        Self {
            unitary: ComplexMatrix::identity(n),
            tag: "canonical".into(),
        }
    }

    /// Eigenbasis of a Hermitian matrix, eigenvalues descending.
    pub fn eigenbasis(h: &ComplexMatrix<T>, tag: impl Into<String>) -> Result<Self> {
        let eig = hermitian_eig(h)?;
        Self::new(eig.vectors, tag)
    }

    pub fn unitary(&self) -> &ComplexMatrix<T> {
        &self.unitary
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }
}

impl<T> fmt::Display for Basis<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)
    }
}

/// The entries of `U^dagger M U` listed as `(m_11, m_12, ..., m_nn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedOperator<T> {
    entries: Vec<C<T>>,
    basis_tag: String,
}

impl<T: Real> VectorizedOperator<T> {
    pub fn from_entries(entries: Vec<C<T>>, basis_tag: impl Into<String>) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != entries.len() {
            return Err(QslError::InvalidTrajectory(format!(
                "vector length {} is not a positive perfect square",
                entries.len()
            )));
        }
        Ok(Self {
            entries,
            basis_tag: basis_tag.into(),
        })
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn basis_tag(&self) -> &str {
        &self.basis_tag
    }

    pub fn moduli(&self) -> Vec<T> {
        self.entries.iter().map(|z| z.norm()).collect()
    }
}

/// `vec(U^dagger M U)` in the given basis.
pub fn vectorize<T: Real>(m: &ComplexMatrix<T>, basis: &Basis<T>) -> Result<VectorizedOperator<T>> {
    m.check_same_dim(basis.unitary())?;
    let rotated = m.in_basis(basis.unitary());
    Ok(VectorizedOperator {
        entries: rotated.into_vec(),
        basis_tag: basis.tag.clone(),
    })
}

/// Checks `u` for unitarity and vectorizes `M` in its column basis.
pub fn vectorize_with<T: Real>(m: &ComplexMatrix<T>, u: &ComplexMatrix<T>) -> Result<VectorizedOperator<T>> {
    vectorize(m, &Basis::new(u.clone(), "custom")?)
}

/// Inverse of `vectorize` in the representation basis (no basis change back).
pub fn devectorize<T: Real>(v: &VectorizedOperator<T>) -> ComplexMatrix<T> {
    let n = (v.len() as f64).sqrt().round() as usize;
    ComplexMatrix::new(n, v.entries.clone()).expect("length is a perfect square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_unitary;
    use crate::matrix::pauli;
    use crate::scalar::{cplx, creal};

    #[test]
    fn identity_vectorizes_to_diagonal_pattern() {
        let v = vectorize(&ComplexMatrix::<f64>::identity(2), &Basis::canonical(2)).unwrap();
        let expect: Vec<C<f64>> = [1.0, 0.0, 0.0, 1.0].iter().map(|&x| creal(x)).collect();
        assert_eq!(v.entries(), &expect[..]);
    }

    #[test]
    fn sigma_x_in_hadamard_basis() {
        let b = Basis::new(pauli::hadamard::<f64>(), "hadamard").unwrap();
        let v = vectorize(&pauli::x(), &b).unwrap();
        let expect = [1.0, 0.0, 0.0, -1.0];
        for (z, e) in v.entries().iter().zip(expect) {
            assert!((z - creal(e)).norm() < 1e-15);
        }
        assert_eq!(v.basis_tag(), "hadamard");
    }

    #[test]
    fn entry_order_is_row_by_row() {
        let m = ComplexMatrix::<f64>::from_rows(vec![
            vec![creal(1.0), cplx(2.0, 1.0)],
            vec![cplx(3.0, -1.0), creal(4.0)],
        ])
        .unwrap();
        let v = vectorize(&m, &Basis::canonical(2)).unwrap();
        assert_eq!(v.entries()[1], cplx(2.0, 1.0));
        assert_eq!(v.entries()[2], cplx(3.0, -1.0));
    }

    #[test]
    fn round_trip() {
        let u = haar_unitary::<f64>(3, 1);
        let m = &haar_unitary::<f64>(3, 2) + &ComplexMatrix::identity(3);
        let b = Basis::new(u.clone(), "haar:1").unwrap();
        let back = devectorize(&vectorize(&m, &b).unwrap());
        assert_eq!(back, m.in_basis(&u));
        let canon = devectorize(&vectorize(&m, &Basis::canonical(3)).unwrap());
        assert_eq!(canon, m);
    }

    #[test]
    fn rejects_non_unitary_and_mismatched_dims() {
        let not_u = ComplexMatrix::<f64>::diag_real(&[1.0, 1.0 + 1e-6]);
        assert!(matches!(
            vectorize_with(&pauli::x(), &not_u),
            Err(QslError::NotUnitary { .. })
        ));
        assert!(matches!(
            vectorize(&ComplexMatrix::<f64>::identity(3), &Basis::canonical(2)),
            Err(QslError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_square_lengths() {
        assert!(VectorizedOperator::<f64>::from_entries(vec![creal(1.0); 3], "x").is_err());
        assert!(VectorizedOperator::<f64>::from_entries(vec![], "x").is_err());
    }
}

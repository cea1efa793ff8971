//! Dense square complex matrices.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{QslError, Result};
use crate::scalar::{creal, Real, C};

/// Dense `n x n` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(QslError::NotSquare { rows: 0, cols: 0 });
        }
        if data.len() != dim * dim {
            return Err(QslError::LengthMismatch {
                left: data.len(),
                right: dim * dim,
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(QslError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Self::new(n, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| creal(T::lit(x))).collect())
                .collect(),
        )
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| C::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { C::one() } else { C::zero() })
    }

    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, |r, c| if r == c { creal(values[r]) } else { C::zero() })
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &[C<T>]) -> Self {
        Self::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn column(&self, c: usize) -> Vec<C<T>> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C<T>, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm_sq(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `A B + B A`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `U^dagger M U`: the matrix of `self` in the basis given by the columns of `u`.
    pub fn in_basis(&self, u: &Self) -> Self {
        &u.adjoint() * &(self * u)
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |r, c| (self[(r, c)] + self[(c, r)].conj()) * half)
    }

    /// `max |M_jk - conj(M_kj)|`.
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian to `rel_tol * max|M|` (absolute `rel_tol` for the zero matrix).
    pub fn check_hermitian(&self, rel_tol: T) -> Result<()> {
        let dev = self.hermitian_deviation();
        let scale = self.max_abs().max(T::one());
        if dev > rel_tol * scale {
            return Err(QslError::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// `max |(U^dagger U - I)_jk|`.
    pub fn unitarity_deviation(&self) -> T {
        let g = &self.adjoint() * self;
        let mut dev = T::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                let target = if r == c { C::one() } else { C::zero() };
                dev = dev.max((g[(r, c)] - target).norm());
            }
        }
        dev
    }

    pub fn check_unitary(&self, tol: T) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev.is_nan() || dev > tol {
            return Err(QslError::NotUnitary {
                deviation: dev.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(QslError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Re-orthonormalizes the columns (modified Gram-Schmidt, two passes).
    /// Used to strip accumulated round-off from long products of unitaries.
    pub fn reorthonormalized(&self) -> Self {
        let n = self.dim;
        let mut cols: Vec<Vec<C<T>>> = (0..n).map(|c| self.column(c)).collect();
        for j in 0..n {
            for _ in 0..2 {
                for i in 0..j {
                    let proj: C<T> = (0..n).map(|r| cols[i][r].conj() * cols[j][r]).sum();
                    for r in 0..n {
                        let v = cols[i][r];
                        cols[j][r] = cols[j][r] - proj * v;
                    }
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            for z in cols[j].iter_mut() {
                *z = *z / norm;
            }
        }
        Self::from_fn(n, |r, c| cols[c][r])
    }

    /// `<psi| M |psi>`.
    pub fn expectation(&self, psi: &[C<T>]) -> C<T> {
        let n = self.dim;
        let mut acc = C::zero();
        for r in 0..n {
            let row: C<T> = (0..n).map(|c| self[(r, c)] * psi[c]).sum();
            acc = acc + psi[r].conj() * row;
        }
        acc
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.dim + c]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = vec![C::zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out[r * n..(r + 1) * n].iter_mut().zip(row) {
                    *o = *o + a * b;
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

/// Pauli matrices and other small constants used throughout.
pub mod pauli {
    use super::ComplexMatrix;
    use crate::scalar::{cplx, Real};

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        let (o, i) = (T::zero(), T::one());
        ComplexMatrix::from_rows(vec![
            vec![cplx(o, o), cplx(o, -i)],
            vec![cplx(o, i), cplx(o, o)],
        ])
        .unwrap()
    }

    pub fn z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn rejects_bad_shapes() {
        assert!(ComplexMatrix::<f64>::new(2, vec![C::zero(); 3]).is_err());
        assert!(ComplexMatrix::<f64>::from_rows(vec![vec![C::zero(); 2], vec![C::zero(); 1]]).is_err());
        assert!(ComplexMatrix::<f64>::new(0, vec![]).is_err());
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::x::<f64>(), pauli::y::<f64>(), pauli::z::<f64>());
        let xy = x.commutator(&y);
        let expect = z.scale(cplx(0.0, 2.0));
        assert!((&xy - &expect).max_abs() < 1e-15);
        assert!(x.anticommutator(&y).max_abs() < 1e-15);
        assert!(pauli::hadamard::<f64>().unitarity_deviation() < 1e-15);
    }

    #[test]
    fn hadamard_diagonalizes_sigma_x() {
        let d = pauli::x::<f64>().in_basis(&pauli::hadamard());
        assert!((&d - &pauli::z()).max_abs() < 1e-15);
    }

    #[test]
    fn hermitian_check_is_relative() {
        let mut m = pauli::y::<f64>().scale_real(1e6);
        m[(0, 1)] += cplx(1e-9, 0.0);
        assert!(m.check_hermitian(1e-12).is_ok());
        m[(0, 1)] += cplx(1e-3, 0.0);
        assert!(m.check_hermitian(1e-12).is_err());
    }
}

//! Spectral utilities for small dense Hermitian matrices.
//!
//! The eigensolver is a cyclic complex Jacobi method. Each rotation first
//! removes the phase of the pivot `a_pq`, then applies the real symmetric
//! Jacobi rotation that annihilates it. For the dimensions used here
//! (n <= 16) it converges in a handful of sweeps and is accurate to a few
//! ulps of the largest eigenvalue.

use num_traits::Zero;

use crate::error::{QslError, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{cplx, creal, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V diag(values) V^dagger` with values descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_spectrum(|x| x)
    }

    /// `V f(diag) V^dagger` for a real spectral function.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        self.map_spectrum_complex(|x| creal(f(x)))
    }

    pub fn map_spectrum_complex(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |r, c| {
            (0..n).fold(C::zero(), |acc, k| acc + v[(r, k)] * fv[k] * v[(c, k)].conj())
        })
    }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    m.check_hermitian(T::tol(1e-10))?;
    if !m.is_finite() {
        return Err(QslError::NonFinite("eigen-decomposition input".into()));
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale.is_zero() {
        return Ok(HermitianEigen {
            values: vec![T::zero(); n],
            vectors: v,
        });
    }
    let threshold = scale * T::epsilon() * T::lit(0.5);

    for _ in 0..MAX_SWEEPS {
        let off: T = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s = s + a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing `a[p][q]`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    let phase = apq / mag; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    // Real symmetric rotation for [[app, mag], [mag, aqq]].
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] embedded on (p, q).
    let e_minus = phase.conj();
    let jpp = creal(c);
    let jpq = creal(s);
    let jqp = e_minus * (-s);
    let jqq = e_minus * c;

    let n = a.dim();
    // A <- A J (columns p, q).
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * jpp + arq * jqp;
        a[(r, q)] = arp * jpq + arq * jqq;
    }
    // A <- J^dagger A (rows p, q).
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = jpp.conj() * apc + jqp.conj() * aqc;
        a[(q, col)] = jpq.conj() * apc + jqq.conj() * aqc;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = creal(a[(p, p)].re);
    a[(q, q)] = creal(a[(q, q)].re);
    // V <- V J.
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * jpp + vrq * jqp;
        v[(r, q)] = vrp * jpq + vrq * jqq;
    }
}

/// Singular values (descending) as square roots of the eigenvalues of `M^dagger M`.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let gram = &m.adjoint() * m;
    let eig = hermitian_eig(&gram.hermitian_part()).expect("Gram matrix is Hermitian");
    eig.values.into_iter().map(|x| x.max(T::zero()).sqrt()).collect()
}

/// Schatten norms used by the comparison bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchattenNorms<T> {
    /// Largest singular value.
    pub op: T,
    /// Sum of singular values.
    pub tr: T,
    /// Hilbert-Schmidt (Frobenius) norm.
    pub hs: T,
}

pub fn schatten_norms<T: Real>(m: &ComplexMatrix<T>) -> SchattenNorms<T> {
    let s = singular_values(m);
    SchattenNorms {
        op: s.first().copied().unwrap_or_else(T::zero),
        tr: s.iter().copied().sum(),
        hs: m.frobenius_norm(),
    }
}

/// Eigenvalues at or above `-1e-8` are accepted and clamped at zero.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Checks that `rho` is a density operator: Hermitian, PSD, unit trace.
pub fn check_density<T: Real>(rho: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > T::tol(PSD_TOLERANCE) || tr.im.abs() > T::tol(PSD_TOLERANCE) {
        return Err(QslError::NotUnitTrace {
            trace: tr.re.to_f64_lossy(),
        });
    }
    psd_eig(rho)
}

/// Eigen-decomposition of a PSD matrix with small negative eigenvalues clamped.
pub fn psd_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let mut eig = hermitian_eig(m)?;
    let min = eig.values.last().copied().unwrap_or_else(T::zero);
    if min < -T::tol(PSD_TOLERANCE) {
        return Err(QslError::NotPositive {
            min_eigenvalue: min.to_f64_lossy(),
        });
    }
    for x in eig.values.iter_mut() {
        *x = x.max(T::zero());
    }
    Ok(eig)
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(psd_eig(m)?.map_spectrum(|x| x.sqrt()))
}

/// `exp(eps K)` for anti-Hermitian `K`, computed from the eigenbasis of `iK`.
pub fn unitary_exp<T: Real>(k: &ComplexMatrix<T>, eps: T) -> Result<ComplexMatrix<T>> {
    let h = k.scale(cplx(T::zero(), T::one()));
    let eig = hermitian_eig(&h)?;
    // K = -i H  =>  exp(eps K) = V exp(-i eps lambda) V^dagger
    Ok(eig.map_spectrum_complex(|lam| {
        let phi = -eps * lam;
        cplx(phi.cos(), phi.sin())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_unitary;
    use crate::matrix::pauli;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix<f64> {
        let u = haar_unitary::<f64>(n, seed);
        let v = haar_unitary::<f64>(n, seed + 1000);
        let m = &u + &v.scale(cplx(0.3, -0.7));
        m.hermitian_part()
    }

    #[test]
    fn sigma_z_spectrum() {
        let e = hermitian_eig(&pauli::z::<f64>()).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!((&e.vectors - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for n in 1..=8 {
            let m = random_hermitian(n, n as u64);
            let e = hermitian_eig(&m).unwrap();
            let err = (&e.reconstruct() - &m).max_abs();
            assert!(err < 1e-12 * m.max_abs().max(1.0), "n={n} err={err:e}");
            assert!(e.vectors.unitarity_deviation() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn spectral_shift() {
        let m = random_hermitian(4, 7);
        let shifted = &m + &ComplexMatrix::identity(4).scale_real(2.5);
        let (a, b) = (hermitian_eig(&m).unwrap(), hermitian_eig(&shifted).unwrap());
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((y - x - 2.5).abs() < 1e-12);
        }
        // eigenvectors agree up to a column phase
        for c in 0..4 {
            let overlap: C<f64> = (0..4).map(|r| a.vectors[(r, c)].conj() * b.vectors[(r, c)]).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(QslError::NotHermitian { .. })));
    }

    #[test]
    fn singular_values_of_unitary_are_one() {
        let u = haar_unitary::<f64>(4, 3);
        for s in singular_values(&u) {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let m = &haar_unitary::<f64>(3, 11) + &haar_unitary::<f64>(3, 12).scale(cplx(0.0, 2.0));
        let s = singular_values(&m);
        let gram = &m.adjoint() * &m;
        let e = hermitian_eig(&gram).unwrap();
        for (sv, ev) in s.iter().zip(&e.values) {
            assert!((sv * sv - ev).abs() < 1e-12 * ev.abs().max(1.0));
        }
        let ssq: f64 = s.iter().map(|x| x * x).sum();
        assert!((ssq - m.frobenius_norm_sq()).abs() < 1e-10 * ssq);
    }

    #[test]
    fn hermitian_singular_values_are_abs_eigenvalues() {
        let mut m = random_hermitian(3, 5);
        let shift = m.trace().re / 3.0;
        m = &m - &ComplexMatrix::identity(3).scale_real(shift);
        let mut abs_eigs: Vec<f64> = hermitian_eig(&m).unwrap().values.iter().map(|x| x.abs()).collect();
        abs_eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (s, e) in singular_values(&m).iter().zip(&abs_eigs) {
            assert!((s - e).abs() < 1e-7);
        }
    }

    #[test]
    fn psd_clamp_and_rejection() {
        let slightly_neg = ComplexMatrix::<f64>::diag_real(&[1.0 + 1e-9, -1e-9]);
        let e = psd_eig(&slightly_neg).unwrap();
        assert_eq!(e.values[1], 0.0);
        let neg = ComplexMatrix::<f64>::diag_real(&[1.1, -0.1]);
        assert!(matches!(psd_eig(&neg), Err(QslError::NotPositive { .. })));
    }

    #[test]
    fn sqrt_squares_back() {
        let u = haar_unitary::<f64>(3, 9);
        let rho = ComplexMatrix::diag_real(&[0.6, 0.3, 0.1]).in_basis(&u.adjoint());
        let s = sqrt_psd(&rho).unwrap();
        assert!((&(&s * &s) - &rho).max_abs() < 1e-13);
    }

    #[test]
    fn unitary_exp_is_unitary() {
        let h = random_hermitian(3, 21);
        let k = h.scale(cplx(0.0, 1.0));
        let u = unitary_exp(&k, 0.37).unwrap();
        assert!(u.unitarity_deviation() < 1e-13);
        let small = unitary_exp(&k, 1e-7).unwrap();
        let linear = &ComplexMatrix::identity(3) + &k.scale_real(1e-7);
        assert!((&small - &linear).max_abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let m = ComplexMatrix::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-5);
        assert!((e.values[1] - 1.0).abs() < 1e-5);
    }
}

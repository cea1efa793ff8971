//! Distances and moments of density operators.

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::scalar::{Real, C};
use crate::spectral::{check_density, psd_eig, PSD_TOLERANCE};

/// Returns the state vector when `rho` is pure (rank one within tolerance).
pub fn pure_state_vector<T: Real>(rho: &ComplexMatrix<T>) -> Result<Option<Vec<C<T>>>> {
    let eig = check_density(rho)?;
    let rest: T = eig.values.iter().skip(1).copied().sum();
    if rest > T::tol(PSD_TOLERANCE) {
        return Ok(None);
    }
    Ok(Some(eig.vectors.column(0)))
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho0) rho1 sqrt(rho0))`.
pub fn root_fidelity<T: Real>(rho0: &ComplexMatrix<T>, rho1: &ComplexMatrix<T>) -> Result<T> {
    rho0.check_same_dim(rho1)?;
    let e0 = check_density(rho0)?;
    check_density(rho1)?;
    let s0 = e0.map_spectrum(|x| x.sqrt());
    let inner = (&s0 * &(rho1 * &s0)).hermitian_part();
    let eig = psd_eig(&inner)?;
    Ok(eig.values.iter().map(|x| x.sqrt()).sum())
}

/// Bures angle `arccos F` via the general matrix-square-root formula.
pub fn bures_angle_general<T: Real>(rho0: &ComplexMatrix<T>, rho1: &ComplexMatrix<T>) -> Result<T> {
    let f = root_fidelity(rho0, rho1)?;
    Ok(f.min(T::one()).max(T::zero()).acos())
}

/// Bures angle for pure `rho0 = |psi><psi|`: `arccos sqrt(<psi|rho1|psi>)`.
pub fn bures_angle_pure<T: Real>(psi: &[C<T>], rho1: &ComplexMatrix<T>) -> Result<T> {
    check_density(rho1)?;
    let overlap = rho1.expectation(psi).re.max(T::zero()).min(T::one());
    Ok(overlap.sqrt().acos())
}

/// Bures angle in `[0, pi/2]`, taking the pure-state path when `rho0` is pure.
pub fn bures_angle<T: Real>(rho0: &ComplexMatrix<T>, rho1: &ComplexMatrix<T>) -> Result<T> {
    rho0.check_same_dim(rho1)?;
    match pure_state_vector(rho0)? {
        Some(psi) => bures_angle_pure(&psi, rho1),
        None => bures_angle_general(rho0, rho1),
    }
}

/// `sqrt(Tr(rho H^2) - Tr(rho H)^2)`, clamped at zero.
pub fn energy_stddev<T: Real>(rho: &ComplexMatrix<T>, h: &ComplexMatrix<T>) -> Result<T> {
    rho.check_same_dim(h)?;
    h.check_hermitian(T::tol(1e-10))?;
    let rh = rho * h;
    let mean = rh.trace().re;
    let second = (&rh * h).trace().re;
    Ok((second - mean * mean).max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::QslError;
    use crate::haar::haar_unitary;
    use crate::matrix::pauli;
    use crate::scalar::creal;

    fn ket(v: &[f64]) -> Vec<C<f64>> {
        v.iter().map(|&x| creal(x)).collect()
    }

    #[test]
    fn identical_states_have_zero_angle() {
        let rho = ComplexMatrix::<f64>::diag_real(&[0.7, 0.3]);
        assert!(bures_angle(&rho, &rho).unwrap().abs() < 1e-7);
        let pure = ComplexMatrix::projector(&ket(&[0.6, 0.8]));
        assert!(bures_angle(&pure, &pure).unwrap().abs() < 1e-7);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = ComplexMatrix::projector(&ket(&[1.0, 0.0]));
        let b = ComplexMatrix::projector(&ket(&[0.0, 1.0]));
        assert!((bures_angle(&a, &b).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pure_shortcut_agrees_with_general_formula() {
        let u = haar_unitary::<f64>(3, 5);
        let psi = u.column(0);
        let rho0 = ComplexMatrix::projector(&psi);
        let rho1 = ComplexMatrix::diag_real(&[0.5, 0.3, 0.2]).in_basis(&haar_unitary(3, 6));
        let a = bures_angle_pure(&psi, &rho1).unwrap();
        let b = bures_angle_general(&rho0, &rho1).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn rejects_invalid_states() {
        let bad_trace = ComplexMatrix::<f64>::diag_real(&[0.7, 0.7]);
        let ok = ComplexMatrix::<f64>::diag_real(&[0.5, 0.5]);
        assert!(matches!(bures_angle(&bad_trace, &ok), Err(QslError::NotUnitTrace { .. })));
        let negative = ComplexMatrix::<f64>::diag_real(&[1.2, -0.2]);
        assert!(matches!(bures_angle(&ok, &negative), Err(QslError::NotPositive { .. })));
    }

    #[test]
    fn energy_spread_cases() {
        let h = pauli::z::<f64>();
        let eigen = ComplexMatrix::projector(&ket(&[1.0, 0.0]));
        assert!(energy_stddev(&eigen, &h).unwrap().abs() < 1e-15);
        let mixed = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!((energy_stddev(&mixed, &h).unwrap() - 1.0).abs() < 1e-15);
        let h01 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let plus = ComplexMatrix::projector(&ket(&[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]));
        assert!((energy_stddev(&plus, &h01).unwrap() - 0.5).abs() < 1e-15);
        assert!(energy_stddev(&plus, &ComplexMatrix::identity(3)).is_err());
    }
}

//! Haar-distributed random unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::ComplexMatrix;
use crate::scalar::{cplx, Real, C};

/// RNG for stream `stream` of the seed `seed`. Streams are independent, so
/// parallel workers can each own one and still reproduce a serial run.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex Gaussian with independent `N(0, 1/2)` real and imaginary parts.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    cplx(T::lit(re * h), T::lit(im * h))
}

/// Haar unitary drawn from `rng`.
///
/// Orthonormalizing the columns of a Ginibre matrix with Gram-Schmidt is a QR
/// factorization whose `R` has a positive real diagonal, which is exactly the
/// phase-corrected QR that yields the Haar measure.
pub fn haar_unitary_from_rng<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(n, |_, _| complex_gaussian(rng));
    g.reorthonormalized()
}

/// Haar unitary, deterministic in `seed`.
pub fn haar_unitary<T: Real>(n: usize, seed: u64) -> ComplexMatrix<T> {
    haar_unitary_from_rng(n, &mut seeded_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_case_has_unit_modulus() {
        let u = haar_unitary::<f64>(1, 4);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = haar_unitary::<f64>(4, 42);
        let b = haar_unitary::<f64>(4, 42);
        assert_eq!(a, b);
        assert_ne!(a, haar_unitary::<f64>(4, 43));
    }

    #[test]
    fn unitary_to_tolerance() {
        for n in 1..=6 {
            for seed in 0..10 {
                assert!(haar_unitary::<f64>(n, seed).unitarity_deviation() < 1e-10);
            }
        }
    }

    #[test]
    fn first_entry_marginal_is_uniform() {
        let samples = 10_000;
        let mut rng = seeded_rng(7, 0);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let x = haar_unitary_from_rng::<f64, _>(2, &mut rng)[(0, 0)].norm_sqr();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / samples as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
        // uniform on [0, 1] has second moment 1/3
        assert!((sum_sq / samples as f64 - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn streams_differ() {
        let a: ComplexMatrix<f64> = haar_unitary_from_rng(3, &mut seeded_rng(1, 0));
        let b: ComplexMatrix<f64> = haar_unitary_from_rng(3, &mut seeded_rng(1, 1));
        assert_ne!(a, b);
    }
}

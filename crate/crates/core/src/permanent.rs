//! Matrix permanents and permanent-based transition amplitudes.
//!
//! This is the second, independent amplitude engine. It never touches the
//! creation-operator expansion in [`crate::fock`]; agreement between the two
//! is asserted by tests, catching sign and normalization mistakes that a
//! single implementation could hide.


use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{FockState, UNITARY_TOL};
use crate::matrix::CMatrix;

/// Permanent of a square matrix by Ryser's inclusion-exclusion formula.
///
/// O(2^n n) time; fine for the photon numbers this crate deals with.
pub fn permanent(a: &CMatrix) -> Complex64 {
    assert!(a.is_square(), "permanent requires a square matrix");
    let n = a.rows();
    if n == 0 {
        return Complex64::ONE;
    }
    assert!(n <= 20, "permanent size out of supported range");
    let mut total = Complex64::ZERO;
    for subset in 1u32..(1 << n) {
        let mut product = Complex64::ONE;
        for i in 0..n {
            let mut row_sum = Complex64::ZERO;
            for j in 0..n {
                if subset & (1 << j) != 0 {
                    row_sum += a[(i, j)];
                }
            }
            product *= row_sum;
        }
        let sign = if (n as u32 - subset.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += product * sign;
    }
    total
}

fn repeat_indices(occ: &[u8]) -> Vec<usize> {
    let mut out = Vec::new();
    for (mode, &n) in occ.iter().enumerate() {
        for _ in 0..n {
            out.push(mode);
        }
    }
    out
}

/// Transition amplitude `<output| U |input>` through an `m`-mode unitary,
/// computed as a permanent of the mode-repeated submatrix:
/// `per(U_sub) / sqrt(prod n_i! prod m_j!)`.
///
/// A photon-number mismatch returns exactly zero rather than an error.
pub fn transition_amplitude(
    input: &FockState,
    output: &FockState,
    u: &CMatrix,
) -> Result<Complex64> {
    if !u.is_square() || u.rows() != input.len() || input.len() != output.len() {
        return Err(Error::InvalidArgument(
            "matrix dimension must match the mode count of both states".into(),
        ));
    }
    u.require_unitary(UNITARY_TOL)?;
    if input.total() != output.total() {
        return Ok(Complex64::ZERO);
    }
    let cols = repeat_indices(input.occupations());
    let rows = repeat_indices(output.occupations());
    let n = cols.len();
    let mut sub = CMatrix::zeros(n, n);
    for (i, &ri) in rows.iter().enumerate() {
        for (j, &cj) in cols.iter().enumerate() {
            sub[(i, j)] = u[(ri, cj)];
        }
    }
    let mut norm = 1.0f64;
    for &occ in input.occupations().iter().chain(output.occupations()) {
        for k in 2..=occ as u64 {
            norm *= k as f64;
        }
    }
    Ok(permanent(&sub) / norm.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn permanent_of_single_entry() {
        let mut m = CMatrix::zeros(1, 1);
        m[(0, 0)] = Complex64::new(0.3, -0.1);
        assert_eq!(permanent(&m), Complex64::new(0.3, -0.1));
    }

    #[test]
    fn permanent_of_2x2 () {
        // per([[a, b], [c, d]]) = ad + bc
        let m = CMatrix::from_real_2x2(1.0, 2.0, 3.0, 4.0);
        assert_abs_diff_eq!(permanent(&m).re, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn balanced_beamsplitter_coincidence_is_zero() {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_real_2x2(r, r, r, -r);
        let one_one = FockState::new(vec![1, 1]);
        let amp = transition_amplitude(&one_one, &one_one, &u).unwrap();
        assert_abs_diff_eq!(amp.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_mode_reflectivity_passthrough() {
        let mut u = CMatrix::zeros(1, 1);
        u[(0, 0)] = Complex64::ONE;
        let s = FockState::new(vec![1]);
        assert_eq!(transition_amplitude(&s, &s, &u).unwrap(), Complex64::ONE);
    }

    #[test]
    fn photon_number_mismatch_is_exactly_zero() {
        let u = CMatrix::identity(2);
        let a = FockState::new(vec![1, 0]);
        let b = FockState::new(vec![1, 1]);
        assert_eq!(transition_amplitude(&a, &b, &u).unwrap(), Complex64::ZERO);
    }
}

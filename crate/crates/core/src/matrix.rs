//! Small dense complex matrices.
//!
//! Circuit elements act on one or two modes, and whole circuits on at most a
//! couple of dozen, so a simple row-major buffer is all that is needed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix from rows of complex entries.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        let mut m = CMatrix::zeros(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    /// 2x2 matrix of real entries, a common case for optical elements.
    pub fn from_real_2x2(a: f64, b: f64, c: f64, d: f64) -> Self {
        CMatrix::from_rows(&[
            &[Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            &[Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
        ])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Max-magnitude deviation of `U† U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut dev: f64 = 0.0;
        for i in 0..p.rows {
            for j in 0..p.cols {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                let d = (p[(i, j)] - target).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// Errors unless `U† U = I` within `tol`.
    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::InvalidArgument("unitary must be square".into()));
        }
        let dev = self.unitarity_deviation();
        if dev > tol {
            return Err(Error::NonUnitary(dev));
        }
        Ok(())
    }

    /// Embeds this `k x k` matrix into an `n x n` identity, acting on the
    /// listed mode indices. Used to compose a whole circuit into one unitary.
    pub fn embed(&self, n: usize, modes: &[usize]) -> Result<CMatrix> {
        if !self.is_square() || modes.len() != self.rows {
            return Err(Error::InvalidArgument("embed: dimension mismatch".into()));
        }
        let mut out = CMatrix::identity(n);
        for &ma in modes {
            if ma >= n {
                return Err(Error::UnknownRail(alloc::format!("mode index {ma}")));
            }
            out[(ma, ma)] = Complex64::ZERO;
        }
        for (a, &ma) in modes.iter().enumerate() {
            for (b, &mb) in modes.iter().enumerate() {
                out[(ma, mb)] = self[(a, b)];
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

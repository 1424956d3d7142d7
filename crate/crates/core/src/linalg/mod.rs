//! Dense real matrix core: exponentials, eigenvalues, numerical rank and
//! exact trajectory-derivative stacks.

mod expm;
pub(crate) mod qr;
pub(crate) mod schur;
mod trajectory;

use std::fmt;
use std::ops::Mul;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use trajectory::{derivative_stack, DerivativeStack, SchurFrame, Trajectory};

/// Imaginary parts below `REALNESS_SNAP * (1 + |λ|)` are treated as zero.
pub const REALNESS_SNAP: f64 = 1e-9;

/// Eigenvalues (and real parts) below `ZERO_SNAP * ‖A‖` are treated as zero.
pub const ZERO_SNAP: f64 = 1e-9;

/// Dense `n × n` real system matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix(DMatrix<f64>);

impl RealMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some(pos) = m.iter().position(|x| !x.is_finite()) {
            let n = m.nrows();
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos % n,
                pos / n
            )));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    /// Block-diagonal assembly, top-left to bottom-right.
    pub fn block_diagonal(blocks: &[RealMatrix]) -> Result<Self> {
        let n: usize = blocks.iter().map(RealMatrix::dim).sum();
        let mut m = DMatrix::zeros(n, n);
        let mut offset = 0;
        for b in blocks {
            let d = b.dim();
            m.view_mut((offset, offset), (d, d)).copy_from(&b.0);
            offset += d;
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.clone().lu().determinant()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.0.clone().try_inverse().map(Self)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    pub(crate) fn to_complex(&self) -> DMatrix<Complex<f64>> {
        self.0.map(|x| Complex::new(x, 0.0))
    }
}

impl Mul for &RealMatrix {
    type Output = RealMatrix;

    fn mul(self, rhs: &RealMatrix) -> RealMatrix {
        RealMatrix(&self.0 * &rhs.0)
    }
}

/// `λ = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

impl ComplexScalar {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub fn distance(&self, other: &ComplexScalar) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) if self.im == 0.0 => write!(f, "{:.*}", p, self.re),
            Some(p) => write!(f, "{:.*}{:+.*}i", p, self.re, p, self.im),
            None if self.im == 0.0 => write!(f, "{}", self.re),
            None => write!(f, "{}{:+}i", self.re, self.im),
        }
    }
}

/// `e^{tA}`. Exactly the identity at `t = 0`.
pub fn mat_exp(a: &RealMatrix, t: f64) -> Result<RealMatrix> {
    if !t.is_finite() {
        return Err(Error::Precondition(format!("time must be finite, got {t}")));
    }
    if t == 0.0 {
        return Ok(RealMatrix::identity(a.dim()));
    }
    expm::expm(&(&a.0 * t))
        .map(RealMatrix)
        .ok_or(Error::Overflow { t })
}

pub(crate) fn rank_of(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * largest).count()
}

/// Number of singular values above `tol` times the largest one.
pub fn numerical_rank(a: &RealMatrix, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    rank_of(&a.0, tol)
}

/// All `n` eigenvalues with multiplicity, sorted by real part descending then
/// `|im|` ascending (positive imaginary part first within a pair).
pub fn eigenvalues(a: &RealMatrix) -> Result<Vec<ComplexScalar>> {
    let schur = schur::complex_schur(&a.to_complex())?;
    let scale = a.frobenius_norm();
    let raw: Vec<Complex<f64>> = (0..a.dim()).map(|i| schur.t[(i, i)]).collect();
    let mut eigs = pair_conjugates(&raw);
    for z in &mut eigs {
        if z.re.abs() < ZERO_SNAP * scale {
            z.re = 0.0;
        }
    }
    sort_eigenvalues(&mut eigs);
    Ok(eigs)
}

fn pair_conjugates(raw: &[Complex<f64>]) -> Vec<ComplexScalar> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in raw {
        if z.im.abs() < REALNESS_SNAP * (1.0 + z.norm()) {
            real.push(ComplexScalar::real(z.re));
        } else if z.im > 0.0 {
            upper.push(*z);
        } else {
            lower.push(*z);
        }
    }
    let mut out = real;
    let mut used = vec![false; lower.len()];
    for p in upper {
        let best = lower
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|(_, x), (_, y)| {
                (p - x.conj())
                    .norm()
                    .total_cmp(&(p - y.conj()).norm())
            })
            .map(|(j, _)| j);
        match best {
            Some(j) => {
                used[j] = true;
                let q = lower[j];
                let re = 0.5 * (p.re + q.re);
                let im = 0.5 * (p.im - q.im);
                out.push(ComplexScalar::new(re, im));
                out.push(ComplexScalar::new(re, -im));
            }
            None => out.push(ComplexScalar::real(p.re)),
        }
    }
    for (j, q) in lower.iter().enumerate() {
        if !used[j] {
            out.push(ComplexScalar::real(q.re));
        }
    }
    out
}

pub(crate) fn sort_eigenvalues(eigs: &mut [ComplexScalar]) {
    eigs.sort_by(|x, y| {
        y.re.total_cmp(&x.re)
            .then(x.im.abs().total_cmp(&y.im.abs()))
            .then(y.im.total_cmp(&x.im))
    });
}

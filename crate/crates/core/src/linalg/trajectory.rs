//! Trajectory derivatives `r^{(j)}(t) = A^j e^{tA} r0`.
//!
//! Derivatives are formed in the ordered Schur frame of `A`: with
//! `A = Q T Q^H` and the diagonal of `T` ordered by decreasing real part, the
//! frame coordinates `T^j e^{tT} Q^H r0` have rows graded by growth rate, so
//! directions that decay much faster than the dominant one keep their
//! relative accuracy. The real-basis vectors are reconstructed from the frame
//! coordinates and share one logarithmic scale factor.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};

use super::schur::{ordered_schur, C64};
use super::{expm, RealMatrix};
use crate::error::{Error, Result};

/// Arnoldi breakdown threshold relative to `‖A‖_F`.
const KRYLOV_BREAKDOWN: f64 = 1e-12;

/// Ordered complex Schur frame of a system matrix. Build once per matrix and
/// share between trajectories.
#[derive(Debug, Clone)]
pub struct SchurFrame {
    a: RealMatrix,
    q: DMatrix<C64>,
    t: DMatrix<C64>,
    shift: f64,
}

impl SchurFrame {
    pub fn new(a: &RealMatrix) -> Result<Self> {
        let s = ordered_schur(&a.to_complex())?;
        let shift = (0..a.dim())
            .map(|i| s.t[(i, i)].re)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            a: a.clone(),
            q: s.q,
            t: s.t,
            shift,
        })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Largest real part on the Schur diagonal; used as the exponential shift.
    pub fn spectral_abscissa(&self) -> f64 {
        self.shift
    }
}

/// A trajectory `r(t) = e^{tA} r0` bound to a Schur frame.
#[derive(Debug, Clone)]
pub struct Trajectory {
    frame: Arc<SchurFrame>,
    r0: Vec<f64>,
    y0: DVector<C64>,
    krylov_dim: usize,
}

impl Trajectory {
    pub fn new(a: &RealMatrix, r0: &[f64]) -> Result<Self> {
        Self::with_frame(Arc::new(SchurFrame::new(a)?), r0)
    }

    pub fn with_frame(frame: Arc<SchurFrame>, r0: &[f64]) -> Result<Self> {
        let n = frame.dim();
        if r0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r0.len(),
            });
        }
        if r0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("initial condition must be finite".into()));
        }
        if r0.iter().all(|&x| x == 0.0) {
            return Err(Error::DegenerateInitialCondition);
        }
        let r = DVector::from_iterator(n, r0.iter().map(|&x| Complex::new(x, 0.0)));
        let y0 = frame.q.adjoint() * r;
        let krylov_dim = derivative_span_dimension(&frame.a, r0);
        Ok(Self {
            frame,
            r0: r0.to_vec(),
            y0,
            krylov_dim,
        })
    }

    pub fn frame(&self) -> &Arc<SchurFrame> {
        &self.frame
    }

    pub fn initial_condition(&self) -> &[f64] {
        &self.r0
    }

    /// Dimension of `span{A r0, A² r0, ...}`. Because `e^{tA}` is invertible
    /// this is the number of independent derivatives at every `t`.
    pub fn derivative_span_dimension(&self) -> usize {
        self.krylov_dim
    }

    /// Derivatives `r^{(1)}(t) ..= r^{(k)}(t)`.
    pub fn stack(&self, t: f64, k: usize) -> Result<DerivativeStack> {
        let n = self.frame.dim();
        if k == 0 || k > n + 1 {
            return Err(Error::Precondition(format!(
                "derivative order must lie in 1..={}, got {k}",
                n + 1
            )));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Precondition(format!(
                "time must be finite and nonnegative, got {t}"
            )));
        }
        let shift = self.frame.shift;
        let mut y = self.y0.clone();
        if t > 0.0 {
            let mut shifted = &self.frame.t * Complex::new(t, 0.0);
            for i in 0..n {
                shifted[(i, i)] -= Complex::new(shift * t, 0.0);
            }
            let e = expm::expm(&shifted).ok_or(Error::Overflow { t })?;
            y = e * y;
        }
        let mut coords = DMatrix::<C64>::zeros(n, k);
        let mut col = y;
        for j in 0..k {
            col = &self.frame.t * col;
            coords.set_column(j, &col);
        }
        let real = &self.frame.q * &coords;
        let vectors: Vec<DVector<f64>> = (0..k)
            .map(|j| DVector::from_iterator(n, real.column(j).iter().map(|z| z.re)))
            .collect();
        let mut stack = DerivativeStack {
            t,
            log_scale: shift * t,
            vectors,
            frame_coords: Some(coords),
            derivative_span: Some(self.krylov_dim),
        };
        stack.normalize()?;
        Ok(stack)
    }
}

/// Convenience wrapper: builds the Schur frame and evaluates one stack.
pub fn derivative_stack(a: &RealMatrix, r0: &[f64], t: f64, k: usize) -> Result<DerivativeStack> {
    Trajectory::new(a, r0)?.stack(t, k)
}

/// Arnoldi with repeated orthogonalization on `A` started at `A r0`.
fn derivative_span_dimension(a: &RealMatrix, r0: &[f64]) -> usize {
    let n = a.dim();
    let m = a.as_matrix();
    let tol = KRYLOV_BREAKDOWN * a.frobenius_norm();
    let start = m * DVector::from_column_slice(r0);
    let norm = start.norm();
    if norm == 0.0 || norm <= tol * DVector::from_column_slice(r0).norm() {
        return 0;
    }
    let mut basis = vec![start / norm];
    while basis.len() < n {
        let mut w = m * basis.last().unwrap();
        for _ in 0..2 {
            for q in &basis {
                let h = q.dot(&w);
                w.axpy(-h, q, 1.0);
            }
        }
        let h = w.norm();
        if h <= tol {
            break;
        }
        basis.push(w / h);
    }
    basis.len()
}

/// Vectors `w_1 ..= w_k` with `r^{(j)}(t) = e^{log_scale} w_j`.
///
/// After normalization the largest entry over all `w_j` has magnitude 1,
/// unless every vector is exactly zero.
#[derive(Debug, Clone)]
pub struct DerivativeStack {
    t: f64,
    log_scale: f64,
    vectors: Vec<DVector<f64>>,
    frame_coords: Option<DMatrix<C64>>,
    derivative_span: Option<usize>,
}

impl DerivativeStack {
    /// Stack from explicit real vectors (all of the same length).
    pub fn from_vectors(t: f64, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Precondition("stack needs at least one vector".into()));
        };
        let n = first.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let mut stack = Self {
            t,
            log_scale: 0.0,
            vectors: vectors.into_iter().map(DVector::from_vec).collect(),
            frame_coords: None,
            derivative_span: None,
        };
        stack.normalize()?;
        Ok(stack)
    }

    fn normalize(&mut self) -> Result<()> {
        let peak = self
            .vectors
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if !peak.is_finite() {
            return Err(Error::Overflow { t: self.t });
        }
        if peak == 0.0 {
            return Ok(());
        }
        let inv = 1.0 / peak;
        if !inv.is_finite() {
            // Subnormal peak: rescale in two steps.
            let half = peak.sqrt();
            for v in &mut self.vectors {
                *v /= half;
                *v /= half;
            }
            if let Some(c) = &mut self.frame_coords {
                *c /= Complex::new(half, 0.0);
                *c /= Complex::new(half, 0.0);
            }
        } else {
            for v in &mut self.vectors {
                *v *= inv;
            }
            if let Some(c) = &mut self.frame_coords {
                *c *= Complex::new(inv, 0.0);
            }
        }
        self.log_scale += peak.ln();
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Normalized `w_j`, zero-based (`vectors()[0]` is the first derivative).
    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// `r^{(j)}(t)` for `j` in `1..=order`, de-scaled. May overflow to infinity.
    pub fn derivative(&self, j: usize) -> DVector<f64> {
        &self.vectors[j - 1] * self.log_scale.exp()
    }

    /// Orthonormal-frame coordinates of the stack, when available.
    pub(crate) fn frame_coords(&self) -> Option<&DMatrix<C64>> {
        self.frame_coords.as_ref()
    }

    /// Number of independent derivatives known from the trajectory's
    /// structure, if the stack came from a [`Trajectory`].
    pub fn derivative_span(&self) -> Option<usize> {
        self.derivative_span
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.iter().all(|v| v.iter().all(|&x| x == 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_abs(stack: &DerivativeStack) -> f64 {
        stack
            .vectors()
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |a, x| a.max(x.abs()))
    }

    #[test]
    fn diagonal_stack_at_zero() {
        let a = RealMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        let s = derivative_stack(&a, &[1.0, 1.0], 0.0, 2).unwrap();
        let w1 = s.derivative(1);
        let w2 = s.derivative(2);
        assert!((w1[0] + 1.0).abs() < 1e-15 && (w1[1] + 2.0).abs() < 1e-15);
        assert!((w2[0] - 1.0).abs() < 1e-15 && (w2[1] - 4.0).abs() < 1e-14);
        assert!((max_abs(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_stack_at_pi() {
        let a = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let s = derivative_stack(&a, &[1.0, 0.0], PI, 1).unwrap();
        let d = s.derivative(1);
        assert!(d[0].abs() < 1e-12);
        assert!((d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_derivatives_follow_closed_form() {
        let lambdas = [0.5, -1.0, -3.0];
        let r0 = [0.3, -0.7, 1.1];
        let a = RealMatrix::diagonal(&lambdas).unwrap();
        let t = 2.5;
        let s = derivative_stack(&a, &r0, t, 3).unwrap();
        for j in 1..=3 {
            let d = s.derivative(j);
            for i in 0..3 {
                let want = lambdas[i].powi(j as i32) * (lambdas[i] * t).exp() * r0[i];
                assert!((d[i] - want).abs() < 1e-12 * (1.0 + want.abs()), "j={j} i={i}");
            }
        }
    }

    #[test]
    fn zero_initial_condition_is_rejected() {
        let a = RealMatrix::identity(2);
        assert_eq!(
            derivative_stack(&a, &[0.0, 0.0], 1.0, 1).unwrap_err(),
            Error::DegenerateInitialCondition
        );
    }

    #[test]
    fn order_bounds() {
        let a = RealMatrix::identity(2);
        assert!(derivative_stack(&a, &[1.0, 0.0], 0.0, 0).is_err());
        assert!(derivative_stack(&a, &[1.0, 0.0], 0.0, 3).is_ok());
        assert!(derivative_stack(&a, &[1.0, 0.0], 0.0, 4).is_err());
        assert!(derivative_stack(&a, &[1.0, 0.0], -1.0, 1).is_err());
    }

    #[test]
    fn large_growth_stays_representable() {
        let a = RealMatrix::diagonal(&[40.0, -40.0]).unwrap();
        let s = derivative_stack(&a, &[1.0, 1.0], 100.0, 2).unwrap();
        assert!((s.log_scale() - (4000.0 + 1600f64.ln())).abs() < 1e-9);
        assert!((max_abs(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn span_dimension_detects_structure() {
        let scalar = RealMatrix::diagonal(&[3.0, 3.0, 3.0]).unwrap();
        assert_eq!(derivative_span_dimension(&scalar, &[1.0, -2.0, 0.5]), 1);
        let nilpotent = RealMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(derivative_span_dimension(&nilpotent, &[1.0, 1.0, 1.0, 1.0]), 1);
        let generic = RealMatrix::diagonal(&[-1.0, -2.0, -2.5]).unwrap();
        assert_eq!(derivative_span_dimension(&generic, &[1.0, 1.0, 1.0]), 3);
        let with_kernel = RealMatrix::diagonal(&[-1.0, -2.0, 0.0]).unwrap();
        assert_eq!(derivative_span_dimension(&with_kernel, &[1.0, 1.0, 1.0]), 2);
    }
}

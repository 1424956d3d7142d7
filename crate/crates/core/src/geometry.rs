//! Parallelotope volumes `V_k`, higher curvatures `κ_i` and torsion `τ`,
//! all carried in the log domain.
//!
//! `V_k(t)` is the `k`-volume spanned by `r'(t), …, r^{(k)}(t)` and is taken
//! from the diagonal of an orthogonal factorization of the stacked
//! derivatives. The curvatures follow from the volumes:
//!
//! ```text
//! κ_i = V_{i-1} V_{i+1} / (V_1 V_i²),     τ = κ_2 = V_3 / V_2²
//! ```

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{qr, DerivativeStack};

/// Relative size of the smallest orthogonalization diagonal, against the
/// largest, below which a set of derivative vectors counts as dependent.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-12;

/// Natural log of a `k`-volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogVolume {
    pub k: usize,
    pub log_value: f64,
    pub is_zero: bool,
}

impl LogVolume {
    /// `V_0 = 1`.
    pub const fn unit() -> Self {
        Self {
            k: 0,
            log_value: 0.0,
            is_zero: false,
        }
    }

    pub const fn zero(k: usize) -> Self {
        Self {
            k,
            log_value: f64::NEG_INFINITY,
            is_zero: true,
        }
    }

    /// Linear-domain volume (may overflow to infinity).
    pub fn value(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log_value.exp()
        }
    }
}

/// A nonnegative scalar expressed in the log domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LogValue {
    /// Positive value with the given natural log.
    Log(f64),
    /// Exactly zero.
    Zero,
    /// Not defined at this point (division by a degenerate volume).
    Undefined,
}

impl LogValue {
    pub fn linear(&self) -> Option<f64> {
        match self {
            LogValue::Log(x) => Some(x.exp()),
            LogValue::Zero => Some(0.0),
            LogValue::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, LogValue::Undefined)
    }
}

/// Volumes and curvatures of a trajectory at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub t: f64,
    /// Ambient dimension `n`.
    pub dim: usize,
    /// `log_v[k]` for `k = 0 ..= k_max`.
    pub log_v: Vec<LogVolume>,
    /// `log_kappa[i - 1]` holds `κ_i`.
    pub log_kappa: Vec<LogValue>,
    pub log_tau: LogValue,
    /// Largest `k` with `V_k > 0`.
    pub m_detected: usize,
    /// Independent-derivative count known from the trajectory, if any.
    pub derivative_span: Option<usize>,
}

impl CurvatureSample {
    pub fn k_max(&self) -> usize {
        self.log_v.len() - 1
    }

    /// `κ_i`, `i ≥ 1`; `Undefined` outside the computed range.
    pub fn kappa(&self, i: usize) -> LogValue {
        i.checked_sub(1)
            .and_then(|j| self.log_kappa.get(j).copied())
            .unwrap_or(LogValue::Undefined)
    }
}

fn stack_matrix(stack: &DerivativeStack, k: usize) -> DMatrix<f64> {
    let n = stack.dim();
    DMatrix::from_fn(n, k, |i, j| stack.vectors()[j][i])
}

/// `V_k` of the stack through an orthogonal factorization.
pub fn log_volume(stack: &DerivativeStack, k: usize) -> LogVolume {
    assert!(k <= stack.order(), "volume order {k} exceeds stack order {}", stack.order());
    if k == 0 {
        return LogVolume::unit();
    }
    if stack.is_zero() {
        return LogVolume::zero(k);
    }
    let diag = match stack.frame_coords() {
        Some(coords) => qr::r_diagonal(coords, k),
        None => qr::r_diagonal(&stack_matrix(stack, k), k),
    };
    let degenerate = diag.iter().any(|d| *d == 0.0 || !d.is_finite());
    let dependent = match stack.derivative_span() {
        Some(span) => k > span,
        None => {
            let hi = diag.iter().copied().fold(0.0, f64::max);
            let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
            lo <= DEPENDENCE_THRESHOLD * hi
        }
    };
    if degenerate || dependent {
        return LogVolume::zero(k);
    }
    let log_value = diag.iter().fold(0.0, |acc, d| acc + d.ln()) + k as f64 * stack.log_scale();
    LogVolume {
        k,
        log_value,
        is_zero: false,
    }
}

fn det(m: &[[f64; 3]; 3], k: usize) -> f64 {
    match k {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!(),
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// `V_k` as the square root of the sum of squared `k × k` minors of the real
/// derivative vectors. Reference implementation for `k ≤ 3`, `n ≤ 8`.
pub fn volume_minor_sum(stack: &DerivativeStack, k: usize) -> Result<LogVolume> {
    let n = stack.dim();
    if k > 3 || n > 8 || k > stack.order() {
        return Err(Error::UnsupportedSize { k, n });
    }
    if k == 0 {
        return Ok(LogVolume::unit());
    }
    let w = stack.vectors();
    let mut sum = 0.0;
    for_each_subset(n, k, &mut |rows| {
        let mut m = [[0.0; 3]; 3];
        for (a, &i) in rows.iter().enumerate() {
            for (b, row) in m[a].iter_mut().enumerate().take(k) {
                *row = w[b][i];
            }
        }
        let d = det(&m, k);
        sum += d * d;
    });
    let volume = sum.sqrt();
    let hadamard: f64 = w.iter().take(k).map(|v| v.norm()).product();
    if volume == 0.0 || volume <= DEPENDENCE_THRESHOLD * hadamard {
        return Ok(LogVolume::zero(k));
    }
    Ok(LogVolume {
        k,
        log_value: volume.ln() + k as f64 * stack.log_scale(),
        is_zero: false,
    })
}

/// Volumes and curvatures `κ_1 ..= κ_{min(order, n) - 1}` of one stack.
pub fn curvature_profile(stack: &DerivativeStack) -> Result<CurvatureSample> {
    let k_max = stack.order();
    let log_v: Vec<LogVolume> = (0..=k_max).map(|k| log_volume(stack, k)).collect();
    if log_v[1].is_zero {
        return Err(Error::Equilibrium { t: stack.t() });
    }
    if let Some(span) = stack.derivative_span() {
        // Independent derivatives whose volume still vanished lost range.
        if (1..=k_max.min(span)).any(|k| log_v[k].is_zero) {
            return Err(Error::Overflow { t: stack.t() });
        }
    }
    let m_detected = (1..=k_max).take_while(|&k| !log_v[k].is_zero).last().unwrap_or(0);
    let kappa_count = k_max.min(stack.dim()).saturating_sub(1);
    let log_kappa = (1..=kappa_count)
        .map(|i| {
            let (prev, cur, next) = (&log_v[i - 1], &log_v[i], &log_v[i + 1]);
            if cur.is_zero {
                LogValue::Undefined
            } else if next.is_zero {
                LogValue::Zero
            } else {
                LogValue::Log(
                    prev.log_value + next.log_value - log_v[1].log_value - 2.0 * cur.log_value,
                )
            }
        })
        .collect();
    let mut sample = CurvatureSample {
        t: stack.t(),
        dim: stack.dim(),
        log_v,
        log_kappa,
        log_tau: LogValue::Undefined,
        m_detected,
        derivative_span: stack.derivative_span(),
    };
    sample.log_tau = torsion(&sample, false);
    Ok(sample)
}

/// `τ = V_3 / V_2²`, with `τ = 0` for planar ambient space (`n < 3`), for a
/// structurally vanishing `V_2`, or when `V_3 = 0`.
///
/// `structural_zero` is the matrix-level degeneracy test; a stack that
/// carries its trajectory's derivative span also knows whether a zero `V_2`
/// is structural for that trajectory. Any other zero `V_2` leaves `τ`
/// undefined.
pub fn torsion(sample: &CurvatureSample, structural_zero: bool) -> LogValue {
    if sample.dim < 3 || structural_zero {
        return LogValue::Zero;
    }
    if sample.k_max() < 3 {
        return LogValue::Undefined;
    }
    let (v2, v3) = (&sample.log_v[2], &sample.log_v[3]);
    if v2.is_zero {
        return match sample.derivative_span {
            Some(span) if span < 2 => LogValue::Zero,
            _ => LogValue::Undefined,
        };
    }
    if v3.is_zero {
        return LogValue::Zero;
    }
    LogValue::Log(v3.log_value - 2.0 * v2.log_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{derivative_stack, RealMatrix};

    fn raw(vectors: &[&[f64]]) -> DerivativeStack {
        DerivativeStack::from_vectors(0.0, vectors.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    fn oscillator() -> RealMatrix {
        RealMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![-3.0, 2.0, 0.0, 0.0],
            vec![2.0, -3.0, 0.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn single_vector_volume() {
        let v = log_volume(&raw(&[&[3.0, 4.0, 0.0]]), 1);
        assert!(!v.is_zero);
        assert!((v.log_value - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unit_cube() {
        let s = raw(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let v = log_volume(&s, 3);
        assert!(!v.is_zero);
        assert!(v.log_value.abs() < 1e-15);
    }

    #[test]
    fn parallel_edges_are_flagged() {
        let s = raw(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert!(log_volume(&s, 2).is_zero);
        assert!(volume_minor_sum(&s, 2).unwrap().is_zero);
    }

    #[test]
    fn minor_sum_single_column_is_exact() {
        let s = raw(&[&[0.3, -1.7, 2.2, 0.01], &[1.0, 2.0, 3.0, 4.0]]);
        assert_eq!(log_volume(&s, 1), volume_minor_sum(&s, 1).unwrap());
    }

    #[test]
    fn minor_sum_rejects_large_sizes() {
        let s = raw(&[&[1.0; 9]]);
        assert_eq!(
            volume_minor_sum(&s, 1),
            Err(Error::UnsupportedSize { k: 1, n: 9 })
        );
        let s = raw(&[&[1.0, 0.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0, 0.0]]);
        assert!(matches!(volume_minor_sum(&s, 4), Err(Error::UnsupportedSize { k: 4, .. })));
    }

    #[test]
    fn circle_has_unit_curvature() {
        let a = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        for t in [0.0, 0.7, 13.0] {
            let s = curvature_profile(&derivative_stack(&a, &[1.0, 0.0], t, 2).unwrap()).unwrap();
            let LogValue::Log(k) = s.kappa(1) else { panic!("{s:?}") };
            assert!(k.abs() < 1e-12);
            assert_eq!(s.log_tau, LogValue::Zero);
        }
    }

    #[test]
    fn diagonal_first_curvature_matches_hand_value() {
        // V1 = |(-1,-2,-3)| = sqrt(14); minors of [(-1,-2,-3),(1,4,9)] are -2, -6, -6.
        let want = 76f64.sqrt() / 14f64.powf(1.5);
        let a = RealMatrix::diagonal(&[-1.0, -2.0, -3.0]).unwrap();
        let s = curvature_profile(&derivative_stack(&a, &[1.0, 1.0, 1.0], 0.0, 2).unwrap()).unwrap();
        let got = s.kappa(1).linear().unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.166424).abs() < 1e-6);
    }

    #[test]
    fn planar_profile_has_one_curvature() {
        let a = RealMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        let s = curvature_profile(&derivative_stack(&a, &[1.0, 1.0], 0.3, 3).unwrap()).unwrap();
        assert_eq!(s.log_kappa.len(), 1);
        assert_eq!(s.m_detected, 2);
        assert_eq!(s.log_tau, LogValue::Zero);
    }

    #[test]
    fn scalar_matrix_has_zero_torsion() {
        let a = RealMatrix::diagonal(&[3.0, 3.0, 3.0, 3.0]).unwrap();
        let s = curvature_profile(&derivative_stack(&a, &[0.2, -1.0, 0.7, 0.4], 2.0, 3).unwrap())
            .unwrap();
        assert!(s.log_v[2].is_zero);
        assert_eq!(s.log_tau, LogValue::Zero);
        assert_eq!(torsion(&s, true), LogValue::Zero);
    }

    #[test]
    fn transient_zero_without_structure_is_undefined() {
        let s = raw(&[&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let p = curvature_profile(&s).unwrap();
        assert_eq!(p.log_tau, LogValue::Undefined);
        assert_eq!(torsion(&p, true), LogValue::Zero);
    }

    #[test]
    fn oscillator_torsion_at_origin() {
        let s = curvature_profile(&derivative_stack(&oscillator(), &[1.0, 2.0, 1.0, 2.0], 0.0, 3).unwrap())
            .unwrap();
        let tau = s.log_tau.linear().unwrap();
        assert!((tau * tau - 19.0 / 162.0).abs() < 1e-13);
    }

    #[test]
    fn lost_range_is_an_error_not_a_zero() {
        let a = RealMatrix::diagonal(&[-1.0, -20.0]).unwrap();
        let err = curvature_profile(&derivative_stack(&a, &[1.0, 1.0], 60.0, 2).unwrap()).unwrap_err();
        assert_eq!(err, Error::Overflow { t: 60.0 });
    }

    #[test]
    fn equilibrium_is_reported() {
        let a = RealMatrix::diagonal(&[0.0, -1.0]).unwrap();
        let err = curvature_profile(&derivative_stack(&a, &[1.0, 0.0], 0.0, 2).unwrap()).unwrap_err();
        assert_eq!(err, Error::Equilibrium { t: 0.0 });
    }
}

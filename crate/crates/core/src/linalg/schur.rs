//! Complex Schur decomposition `A = Q T Q^H` with the diagonal of `T`
//! ordered by decreasing real part.
//!
//! Householder reduction to Hessenberg form followed by single-shift QR
//! sweeps (Wilkinson shift, Givens bulge chasing). Adjacent diagonal entries
//! are then exchanged with one rotation each until the real parts decrease
//! down the diagonal.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub(crate) type C64 = Complex<f64>;

const ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone)]
pub(crate) struct ComplexSchur {
    /// Unitary factor.
    pub q: DMatrix<C64>,
    /// Upper triangular factor.
    pub t: DMatrix<C64>,
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G (x, y)^T = (r, 0)^T`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let rho = ax.hypot(ay);
    (ax / rho, (x / ax) * y.conj() / rho)
}

fn rotate_rows(m: &mut DMatrix<C64>, k: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols(m: &mut DMatrix<C64>, k: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + s.conj() * b;
        m[(i, k + 1)] = -s * a + b * c;
    }
}

fn hessenberg(h: &mut DMatrix<C64>, q: &mut DMatrix<C64>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] = x0 + phase * norm;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / vv;

        // H <- (I - beta v v^H) H
        for j in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi * s * beta;
            }
        }
        // H <- H (I - beta v v^H), Q <- Q (I - beta v v^H)
        for m in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(j, vj)| m[(i, k + 1 + j)] * vj)
                    .sum();
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= s * vj.conj() * beta;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn qr_iterate(h: &mut DMatrix<C64>, q: &mut DMatrix<C64>) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let scale = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let budget = ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= f64::EPSILON * diag {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::Convergence { iterations: total });
        }

        let mu = if since_deflation % 11 == 10 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let start = if k > l { k - 1 } else { l };
            rotate_rows(h, k, c, s, start..n);
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(q, k, c, s, 0..n);
            if k > l {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(())
}

fn swap_adjacent(t: &mut DMatrix<C64>, q: &mut DMatrix<C64>, k: usize) {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let (c, s) = givens(t[(k, k + 1)], b - a);
    rotate_rows(t, k, c, s, k..n);
    rotate_cols(t, k, c, s, 0..k + 2);
    rotate_cols(q, k, c, s, 0..n);
    t[(k + 1, k)] = C64::new(0.0, 0.0);
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Moves the diagonal entries flagged in `selected` to the leading
/// positions, keeping their relative order.
pub(crate) fn move_to_front(s: &mut ComplexSchur, selected: &[bool]) -> usize {
    let mut flags = selected.to_vec();
    let mut front = 0;
    for k in 0..flags.len() {
        if !flags[k] {
            continue;
        }
        for j in (front..k).rev() {
            swap_adjacent(&mut s.t, &mut s.q, j);
            flags.swap(j, j + 1);
        }
        front += 1;
    }
    front
}

/// Complex Schur form of `a` without reordering.
pub(crate) fn complex_schur(a: &DMatrix<C64>) -> Result<ComplexSchur> {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = DMatrix::<C64>::identity(n, n);
    hessenberg(&mut h, &mut q);
    qr_iterate(&mut h, &mut q)?;
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(ComplexSchur { q, t: h })
}

/// Complex Schur form with real parts of the diagonal non-increasing.
pub(crate) fn ordered_schur(a: &DMatrix<C64>) -> Result<ComplexSchur> {
    let mut s = complex_schur(a)?;
    let n = a.nrows();
    loop {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if s.t[(k + 1, k + 1)].re > s.t[(k, k)].re {
                swap_adjacent(&mut s.t, &mut s.q, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_complex(rows: &[&[f64]]) -> DMatrix<C64> {
        let n = rows.len();
        DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0))
    }

    fn reconstruction_error(a: &DMatrix<C64>, s: &ComplexSchur) -> f64 {
        let back = &s.q * &s.t * s.q.adjoint();
        (back - a).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn reconstructs_and_orders_example_matrix() {
        let a = to_complex(&[
            &[-25.0, -8.0, -39.0, 19.0],
            &[-14.0, -10.0, -26.0, 14.0],
            &[9.0, 0.0, 7.0, -9.0],
            &[-5.0, -8.0, -21.0, -1.0],
        ]);
        let s = ordered_schur(&a).unwrap();
        assert!(reconstruction_error(&a, &s) < 1e-11);
        let diag: Vec<f64> = (0..4).map(|i| s.t[(i, i)].re).collect();
        for (got, want) in diag.iter().zip([-2.0, -6.0, -10.0, -11.0]) {
            assert!((got - want).abs() < 1e-9, "{diag:?}");
        }
        let unitary = &s.q.adjoint() * &s.q - DMatrix::<C64>::identity(4, 4);
        assert!(unitary.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn triangularizes_rotation_blocks() {
        let a = to_complex(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, -1.0, 2.0],
            &[0.0, 0.0, -2.0, -1.0],
        ]);
        let s = ordered_schur(&a).unwrap();
        assert!(reconstruction_error(&a, &s) < 1e-12);
        for j in 0..4 {
            for i in j + 1..4 {
                assert_eq!(s.t[(i, j)].norm(), 0.0);
            }
        }
        assert!(s.t[(0, 0)].re.abs() < 1e-14 && s.t[(1, 1)].re.abs() < 1e-14);
        assert!((s.t[(3, 3)].re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn moves_selected_entries_forward() {
        let a = to_complex(&[
            &[1.0, 2.0, 0.5, 0.0],
            &[0.0, 3.0, 1.0, -1.0],
            &[0.0, 0.0, 1.0, 4.0],
            &[0.0, 0.0, 0.0, -2.0],
        ]);
        let mut s = complex_schur(&a).unwrap();
        let selected: Vec<bool> = (0..4).map(|i| (s.t[(i, i)].re - 1.0).abs() < 1e-12).collect();
        assert_eq!(move_to_front(&mut s, &selected), 2);
        assert!((s.t[(0, 0)].re - 1.0).abs() < 1e-12 && (s.t[(1, 1)].re - 1.0).abs() < 1e-12);
        assert!(reconstruction_error(&a, &s) < 1e-12);
    }

    #[test]
    fn leaves_triangular_input_alone() {
        let a = to_complex(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = ordered_schur(&a).unwrap();
        assert_eq!(s.t, a);
    }
}

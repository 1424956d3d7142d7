use nalgebra::{ComplexField, DMatrix};

/// Euclidean norm that survives entries whose squares under- or overflow.
/// Plain in-order sum of squares whenever that is safe.
fn stable_norm<T>(xs: &[T]) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    let peak = xs.iter().map(|x| x.modulus()).fold(0.0, f64::max);
    if peak == 0.0 || (1e-140..=1e140).contains(&peak) {
        return xs.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt();
    }
    let inv = 1.0 / peak;
    let scaled: f64 = xs.iter().map(|x| (x.modulus() * inv).powi(2)).sum();
    peak * scaled.sqrt()
}

/// Magnitudes `|R_jj|` of the Householder QR factor of the first `k` columns.
///
/// Rows are processed in their stored order without pivoting, so a matrix
/// whose rows decrease in magnitude keeps its grading through the sweep.
pub(crate) fn r_diagonal<T>(m: &DMatrix<T>, k: usize) -> Vec<f64>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = m.nrows();
    assert!(k <= m.ncols());
    let mut a = m.columns(0, k).into_owned();
    let mut diag = Vec::with_capacity(k);
    for j in 0..k {
        if j >= n {
            diag.push(0.0);
            continue;
        }
        let tail: Vec<T> = (j..n).map(|i| a[(i, j)]).collect();
        let norm = stable_norm(&tail);
        diag.push(norm);
        if norm == 0.0 || j + 1 == k {
            continue;
        }
        // Unit reflector direction built from the normalized tail.
        let inv = T::from_real(1.0 / norm);
        let mut v: Vec<T> = tail.iter().map(|x| *x * inv).collect();
        let abs0 = v[0].modulus();
        let phase = if abs0 == 0.0 {
            T::one()
        } else {
            v[0] * T::from_real(1.0 / abs0)
        };
        v[0] += phase;
        let beta = T::from_real(1.0 / (1.0 + abs0));
        for c in j + 1..k {
            let s: T = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conjugate() * a[(j + i, c)])
                .fold(T::zero(), |acc, x| acc + x);
            for (i, vi) in v.iter().enumerate() {
                a[(j + i, c)] -= *vi * s * beta;
            }
        }
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_axes() {
        let m = DMatrix::<f64>::identity(3, 3);
        assert_eq!(r_diagonal(&m, 3), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn parallel_columns_give_zero() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 0.0]);
        let d = r_diagonal(&m, 2);
        assert_eq!(d[0], 1.0);
        assert!(d[1] < 1e-15);
    }

    #[test]
    fn product_matches_determinant() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, 1.0, 3.0, -2.0, 0.0, 1.0, 4.0]);
        let prod: f64 = r_diagonal(&m, 3).iter().product();
        let det: f64 = m.clone().lu().determinant().abs();
        assert!((prod - det).abs() < 1e-12 * det);
    }

    #[test]
    fn tiny_columns_keep_their_norm() {
        let m = DMatrix::from_row_slice(3, 2, &[1e-200, 0.0, 1e-200, 1e-210, 0.0, 1e-210]);
        let d = r_diagonal(&m, 2);
        assert!((d[0] / (2f64.sqrt() * 1e-200) - 1.0).abs() < 1e-14);
        assert!(d[1] > 0.0 && (d[1] / (1.5f64.sqrt() * 1e-210) - 1.0).abs() < 1e-12);
    }
}

//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
//!
//! The routine is generic over real and complex entries so the same code path
//! serves `e^{tA}` on the system matrix and `e^{tT}` on its triangular Schur
//! factor.

use nalgebra::{ComplexField, DMatrix};

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub(crate) fn one_norm<T>(m: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    m.column_iter()
        .map(|c| c.iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled<T>(m: &DMatrix<T>, c: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    m.map(|x| x * T::from_real(c))
}

fn add_identity<T>(m: &mut DMatrix<T>, c: f64)
where
    T: ComplexField<RealField = f64> + Copy,
{
    for i in 0..m.nrows() {
        m[(i, i)] += T::from_real(c);
    }
}

/// `e^{M}`. Returns `None` when the Padé denominator is singular or the
/// result is not finite.
pub(crate) fn expm<T>(m: &DMatrix<T>) -> Option<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = m.nrows();
    let norm = one_norm(m);
    if !norm.is_finite() {
        return None;
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = scaled(m, 2f64.powi(-squarings));
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE_13;

    let mut inner_u = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    inner_u = &a6 * inner_u;
    inner_u += scaled(&a6, b[7]) + scaled(&a4, b[5]) + scaled(&a2, b[3]);
    add_identity(&mut inner_u, b[1]);
    let u = &a * inner_u;

    let mut v = &a6 * (scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]));
    v += scaled(&a6, b[6]) + scaled(&a4, b[4]) + scaled(&a2, b[2]);
    add_identity(&mut v, b[0]);

    let denominator = &v - &u;
    let numerator = &v + &u;
    let mut result = denominator.lu().solve(&numerator)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    debug_assert_eq!(result.nrows(), n);
    if result.iter().all(|x| x.modulus().is_finite()) {
        Some(result)
    } else {
        None
    }
}

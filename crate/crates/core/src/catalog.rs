//! Canonical blocks, the reference systems, and seeded matrix suites.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::RealMatrix;

/// `J_p(λ)`: `λ` on the diagonal, ones above it.
pub fn jordan_block(lambda: f64, p: usize) -> RealMatrix {
    let mut data = vec![0.0; p * p];
    for k in 0..p {
        data[k * p + k] = lambda;
        if k + 1 < p {
            data[k * p + k + 1] = 1.0;
        }
    }
    RealMatrix::from_row_slice(p, &data).expect("finite block")
}

/// `C_m(a, b)`: `[[a, b], [−b, a]]` on the diagonal, `I_2` above it.
pub fn rotation_block(a: f64, b: f64, m: usize) -> RealMatrix {
    let n = 2 * m;
    let mut data = vec![0.0; n * n];
    for k in 0..m {
        let o = 2 * k;
        data[o * n + o] = a;
        data[o * n + o + 1] = b;
        data[(o + 1) * n + o] = -b;
        data[(o + 1) * n + o + 1] = a;
        if k + 1 < m {
            data[o * n + o + 2] = 1.0;
            data[(o + 1) * n + o + 3] = 1.0;
        }
    }
    RealMatrix::from_row_slice(n, &data).expect("finite block")
}

/// Dense fourth-order system with eigenvalues `−2, −6, −10, −11`
/// (determinant 1320).
pub fn four_mode_decay() -> RealMatrix {
    RealMatrix::from_row_slice(
        4,
        &[
            -25.0, -8.0, -39.0, 19.0, //
            -14.0, -10.0, -26.0, 14.0, //
            9.0, 0.0, 7.0, -9.0, //
            -5.0, -8.0, -21.0, -1.0,
        ],
    )
    .expect("finite")
}

/// Two unit masses coupled by springs with `k/m = 1`, `k'/m = 2`, in
/// position-velocity coordinates.
pub fn coupled_oscillator() -> RealMatrix {
    RealMatrix::from_row_slice(
        4,
        &[
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -3.0, 2.0, 0.0, 0.0, //
            2.0, -3.0, 0.0, 0.0,
        ],
    )
    .expect("finite")
}

/// `J_2(0) ⊕ C_1(−1, 1)`: singular and unstable, yet `τ → 1/|r_2(0)|`.
pub fn nilpotent_with_decay() -> RealMatrix {
    RealMatrix::block_diagonal(&[jordan_block(0.0, 2), rotation_block(-1.0, 1.0, 1)])
        .expect("square blocks")
}

/// `J_3(−1) ⊕ J_1(0)`: singular and stable but not asymptotically, yet `τ → ∞`.
pub fn triple_decay_with_zero() -> RealMatrix {
    RealMatrix::block_diagonal(&[jordan_block(-1.0, 3), jordan_block(0.0, 1)])
        .expect("square blocks")
}

/// `C_1(0, 1) ⊕ C_1(0, 2)`: constant torsion `√(36/425)` from `r0 = (1, 0, 1, 0)`.
pub fn two_frequency_rotation() -> RealMatrix {
    RealMatrix::block_diagonal(&[rotation_block(0.0, 1.0, 1), rotation_block(0.0, 2.0, 1)])
        .expect("square blocks")
}

fn rng(seed: u64, suite: u64) -> ChaCha8Rng {
    // Streams below 2^32 belong to sampled initial conditions.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((1 << 32) + suite);
    rng
}

fn signed(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let x = rng.random_range(lo..=hi);
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Eigenvalue lists for random diagonal systems: `n ∈ 3..=6`, entries in
/// `±[0.2, 3]`, pairwise gaps at least 0.05.
pub fn diagonal_suite(seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = rng(seed, 1);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=6);
            let mut v: Vec<f64> = Vec::with_capacity(n);
            while v.len() < n {
                let x = signed(&mut rng, 0.2, 3.0);
                if v.iter().all(|y| (x - y).abs() >= 0.05) {
                    v.push(x);
                }
            }
            v
        })
        .collect()
}

/// Block shape drawn for a random canonical form.
#[derive(Clone, Copy)]
enum Shape {
    Real(usize),
    Rotation(usize),
}

fn random_shape(rng: &mut impl Rng, room: usize) -> Shape {
    let mut options = vec![Shape::Real(1)];
    if room >= 2 {
        options.extend([Shape::Real(2), Shape::Rotation(1)]);
    }
    if room >= 3 {
        options.push(Shape::Real(3));
    }
    if room >= 4 {
        options.push(Shape::Rotation(2));
    }
    *options.choose(rng).expect("non-empty")
}

fn build(rng: &mut impl Rng, shape: Shape, re: f64) -> RealMatrix {
    match shape {
        Shape::Real(p) => jordan_block(re, p),
        Shape::Rotation(m) => rotation_block(re, rng.random_range(0.5..=2.5), m),
    }
}

fn shape_size(shape: Shape) -> usize {
    match shape {
        Shape::Real(p) => p,
        Shape::Rotation(m) => 2 * m,
    }
}

/// Random canonical forms of size `3..=6` whose first block has positive
/// real part; other blocks take either sign. Real parts lie in `±[0.2, 2]`.
pub fn unstable_canonical_suite(seed: u64, count: usize) -> Vec<RealMatrix> {
    let mut rng = rng(seed, 2);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=6);
            let mut blocks = Vec::new();
            let mut used = 0;
            while used < n {
                let shape = random_shape(&mut rng, n - used);
                let re = if blocks.is_empty() {
                    rng.random_range(0.2..=2.0)
                } else {
                    signed(&mut rng, 0.2, 2.0)
                };
                used += shape_size(shape);
                blocks.push(build(&mut rng, shape, re));
            }
            RealMatrix::block_diagonal(&blocks).expect("square blocks")
        })
        .collect()
}

/// `C_m(0, b) ⊕ stable blocks` with `m ∈ {2, 3}` and one or two stable rows.
pub fn critical_chain_suite(seed: u64, count: usize) -> Vec<RealMatrix> {
    let mut rng = rng(seed, 3);
    (0..count)
        .map(|_| {
            let m = rng.random_range(2..=3);
            let mut blocks = vec![rotation_block(0.0, rng.random_range(0.5..=2.5), m)];
            let mut room = rng.random_range(1..=2);
            while room > 0 {
                let shape = random_shape(&mut rng, room);
                room -= shape_size(shape);
                let re = -rng.random_range(0.2..=2.0);
                blocks.push(build(&mut rng, shape, re));
            }
            RealMatrix::block_diagonal(&blocks).expect("square blocks")
        })
        .collect()
}

/// Two or three `C_1(0, b)` blocks with frequencies in `[0.5, 2.5]` at least
/// 0.1 apart.
pub fn simple_rotation_suite(seed: u64, count: usize) -> Vec<RealMatrix> {
    let mut rng = rng(seed, 4);
    (0..count)
        .map(|_| {
            let s = rng.random_range(2..=3);
            let mut b: Vec<f64> = Vec::new();
            while b.len() < s {
                let x = rng.random_range(0.5..=2.5);
                if b.iter().all(|y| (x - y).abs() >= 0.1) {
                    b.push(x);
                }
            }
            let blocks: Vec<RealMatrix> = b.iter().map(|&b| rotation_block(0.0, b, 1)).collect();
            RealMatrix::block_diagonal(&blocks).expect("square blocks")
        })
        .collect()
}

/// Random canonical forms of size `3..=6` with real parts in `±[0.2, 1.5]`
/// and nonzero spectrum; none has `V_2` identically zero.
pub fn nondegenerate_canonical_suite(seed: u64, count: usize) -> Vec<RealMatrix> {
    let mut rng = rng(seed, 5);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=6);
            let mut blocks = Vec::new();
            let mut used = 0;
            while used < n {
                let shape = random_shape(&mut rng, n - used);
                used += shape_size(shape);
                let re = signed(&mut rng, 0.2, 1.5);
                blocks.push(build(&mut rng, shape, re));
            }
            RealMatrix::block_diagonal(&blocks).expect("square blocks")
        })
        .collect()
}

/// Random `P = I + E` with entries of `E` in `[−0.4, 0.4]` and condition
/// number below 10.
pub fn well_conditioned(seed: u64, index: u64, n: usize) -> RealMatrix {
    let mut rng = rng(seed, 1000 + index);
    loop {
        let data: Vec<f64> = (0..n * n)
            .map(|k| f64::from(u8::from(k % (n + 1) == 0)) + rng.random_range(-0.4..=0.4))
            .collect();
        let p = RealMatrix::from_row_slice(n, &data).expect("finite");
        let sv = p.as_matrix().clone().singular_values();
        if sv.max() < 10.0 * sv.min() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::canonical_blocks;

    #[test]
    fn block_shapes() {
        let c = rotation_block(0.5, 2.0, 2);
        assert_eq!(c.dim(), 4);
        assert_eq!(c.get(0, 1), 2.0);
        assert_eq!(c.get(1, 0), -2.0);
        assert_eq!(c.get(0, 2), 1.0);
        assert_eq!(c.get(1, 3), 1.0);
        assert_eq!(c.get(0, 3), 0.0);
        assert_eq!(jordan_block(-1.0, 3).get(1, 2), 1.0);
    }

    #[test]
    fn example_determinant() {
        assert!((four_mode_decay().determinant() - 1320.0).abs() < 1e-9);
    }

    #[test]
    fn suites_are_reproducible_and_canonical() {
        assert_eq!(diagonal_suite(7, 5), diagonal_suite(7, 5));
        for a in unstable_canonical_suite(7, 10)
            .iter()
            .chain(&critical_chain_suite(7, 10))
            .chain(&simple_rotation_suite(7, 10))
            .chain(&nondegenerate_canonical_suite(7, 10))
        {
            assert!(canonical_blocks(a).is_some());
        }
        for v in diagonal_suite(7, 20) {
            assert!((3..=6).contains(&v.len()));
            for (i, x) in v.iter().enumerate() {
                assert!((0.2..=3.0).contains(&x.abs()));
                assert!(v[..i].iter().all(|y| (x - y).abs() >= 0.05));
            }
        }
    }
}

//! Block structure recovered after hiding a canonical form behind a similarity.

use torsionstab::catalog::{jordan_block, rotation_block, well_conditioned};
use torsionstab::linalg::RealMatrix;
use torsionstab::spectral::{jordan_structure, summarize, v2_degenerate};

fn main() -> torsionstab::Result<()> {
    let j = RealMatrix::block_diagonal(&[
        jordan_block(-1.0, 3),
        jordan_block(0.5, 1),
        rotation_block(0.0, 2.0, 2),
    ])?;
    let p = well_conditioned(7, 0, j.dim());
    let a = &(&p * &j) * &p.try_inverse().expect("invertible");
    let s = summarize(&a)?;
    let js = jordan_structure(&a, &s)?;
    for b in &js.real_blocks {
        println!("lambda {:+.6}: blocks {:?}", b.lambda, b.sizes);
    }
    for b in &js.complex_blocks {
        println!("{:+.6} ± {:.6}i: blocks {:?}", b.a, b.b, b.sizes);
    }
    println!("stable on the imaginary axis: {}", s.semisimple_critical);
    println!("V2 identically zero: {}", v2_degenerate(&js));
    Ok(())
}

//! Rebuild DFT matrices from their butterfly factors.
//!
//! The size-N DFT equals F_L * ... * F_1 * R_N where each F_ell is a sparse
//! butterfly layer and R_N is the bit-reversal permutation. This example
//! checks the identity for N = 4 up to 1024 and also the two-block recursion
//! that the factorization unrolls.

use sparsefact::matrix::{chain_product, rel_frobenius_error};
use sparsefact::transforms::{
    bit_reversal_perm, butterfly_factors, gen_transform, layers_for, odd_even_perm, TransformKind,
};
use sparsefact::{ComplexMatrix, TolerancePolicy};

fn main() -> Result<(), sparsefact::Error> {
    let tol = TolerancePolicy::default();

    let mut n = 4;
    while n <= 1024 {
        let layers = layers_for(n)?;
        let dft = gen_transform(TransformKind::Dft, n)?;

        // factors() returns [F_L, ..., F_1]; append R_N and multiply out.
        let mut chain = butterfly_factors(layers)?;
        chain.push(ComplexMatrix::identity(n).permute_cols(&bit_reversal_perm(n)?)?);
        let product = chain_product(&chain)?;
        let err = rel_frobenius_error(&product, &dft, &tol)?;
        println!("N = {n:4}: ||F_L..F_1 R_N - DFT||/||DFT|| = {err:.3e}");
        assert!(err <= 1e-10);

        n *= 2;
    }

    // One level of the divide-and-conquer recursion: DFT_N equals
    // B_N * blockdiag(DFT_{N/2}, DFT_{N/2}) * P_N where B_N is the outermost
    // butterfly layer and P_N the odd/even sorting permutation.
    let n = 16;
    let layers = layers_for(n)?;
    let dft = gen_transform(TransformKind::Dft, n)?;
    let half = gen_transform(TransformKind::Dft, n / 2)?;
    let outer = butterfly_factors(layers)?.remove(0);
    let block = block_diag(&half, &half)?;
    let perm = ComplexMatrix::identity(n).permute_cols(&odd_even_perm(n)?)?;
    let recursed = chain_product(&[outer, block, perm])?;
    let err = rel_frobenius_error(&recursed, &dft, &tol)?;
    println!("N = {n:4}: one recursion step error = {err:.3e}");
    assert!(err <= 1e-10);
    Ok(())
}

fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, sparsefact::Error> {
    ComplexMatrix::from_fn(a.rows() + b.rows(), a.cols() + b.cols(), |k, l| {
        if k <= a.rows() && l <= a.cols() {
            a.get(k, l)
        } else if k > a.rows() && l > a.cols() {
            b.get(k - a.rows(), l - a.cols())
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    })
}

//! Recover rank-one terms from a matrix when only their supports are known.
//!
//! The 4x4 instance below decomposes into three overlapping rank-one blocks.
//! Entries covered by a single block are read straight off Z; the rest are
//! propagated through rank-one cross ratios and overlap subtractions until
//! every cell of every term is pinned down.

use sparsefact::emd::{contributions_to_factors, emd_complete, sum_contributions, EmdOutcome};
use sparsefact::matrix::rel_frobenius_error;
use sparsefact::supports::RankOneSupportTuple;
use sparsefact::{ComplexMatrix, TolerancePolicy};

fn main() -> Result<(), sparsefact::Error> {
    let tol = TolerancePolicy::default();
    let z = ComplexMatrix::from_real_rows(&[
        vec![0.0, 1.0, 2.0, 0.0],
        vec![1.0, 2.0, 2.0, 0.0],
        vec![2.0, 6.0, 5.0, 6.0],
        vec![3.0, 5.0, 2.0, 4.0],
    ])?;
    let supports = RankOneSupportTuple::from_rectangles(
        4,
        4,
        &[
            (&[2, 3, 4], &[1, 2]),
            (&[1, 2, 3], &[2, 3]),
            (&[3, 4], &[2, 3, 4]),
        ],
    )?;

    let outcome = emd_complete(&z, &supports, &tol)?;
    let EmdOutcome::Complete(tuple) = outcome else {
        panic!("this instance is closable, completion cannot stall: {outcome:?}");
    };

    let terms = tuple.matrices()?;
    for (i, term) in terms.iter().enumerate() {
        println!("contribution {}:", i + 1);
        for k in 1..=term.rows() {
            let row: Vec<String> = (1..=term.cols())
                .map(|l| format!("{:5.1}", term.get(k, l).re))
                .collect();
            println!("  [{}]", row.join(", "));
        }
    }

    let sum = sum_contributions(&tuple)?;
    let err = rel_frobenius_error(&sum, &z, &tol)?;
    println!("reconstruction error: {err:.3e}");
    assert!(err < 1e-12);

    // The same tuple in factored form: Z = X * Y^T with column supports
    // matching the rank-one blocks.
    let (x, y) = contributions_to_factors(&tuple, &tol)?;
    println!(
        "factored as ({}x{}) * ({}x{})^T",
        x.rows(),
        x.cols(),
        y.rows(),
        y.cols()
    );
    let product = x.mul(&y.transpose())?;
    assert!(rel_frobenius_error(&product, &z, &tol)? < 1e-12);
    Ok(())
}

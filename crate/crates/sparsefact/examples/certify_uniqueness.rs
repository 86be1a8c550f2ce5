//! Enumerate every rank-one partition of a transform's support and certify
//! whether the sparsity pattern of its two-factor decomposition is forced.
//!
//! Under a column-sparsity budget of two rows and two columns per block, the
//! 4-point DFT admits exactly one partition, so any exact two-factor
//! decomposition at that sparsity level has the butterfly pattern. The 4x4
//! Hadamard matrix admits several, so its pattern is not forced.

use sparsefact::oracle::{cross_check_uniqueness, enumerate_partitions, CertificateStatus};
use sparsefact::supports::SupportFamilySpec;
use sparsefact::transforms::{gen_transform, TransformKind};
use sparsefact::TolerancePolicy;

fn main() -> Result<(), sparsefact::Error> {
    let tol = TolerancePolicy::default();
    let fam = SupportFamilySpec {
        m: 4,
        n: 4,
        r: 4,
        a: 2,
        b: 2,
    };

    for kind in [
        TransformKind::Dft,
        TransformKind::Dct2,
        TransformKind::Dst2,
        TransformKind::Hadamard,
    ] {
        let z = gen_transform(kind, 4)?;
        let cert = enumerate_partitions(&z, &fam, &tol)?;
        println!(
            "{:8}: {:?}, {} partition(s)",
            kind.name(),
            cert.status,
            cert.partitions.len()
        );
        match kind {
            TransformKind::Hadamard => {
                assert_eq!(cert.status, CertificateStatus::Multiple);
                // One partition per way of pairing the four rows.
                assert_eq!(cert.partitions.len(), 3);
            }
            _ => assert_eq!(cert.status, CertificateStatus::Unique),
        }

        // The strong certificate additionally checks that the blocks are
        // pairwise disjoint and that fixed-support completion over them
        // succeeds, so the decomposition is unique as a whole, not merely
        // its pattern.
        let strong = cross_check_uniqueness(&z, &fam, &tol)?;
        println!("          full uniqueness cross-check: {strong}");
        assert_eq!(strong, kind != TransformKind::Hadamard);
    }

    // Show the DFT's unique partition explicitly.
    let dft = gen_transform(TransformKind::Dft, 4)?;
    let cert = enumerate_partitions(&dft, &fam, &tol)?;
    let partition = &cert.partitions[0];
    println!("DFT_4 partition blocks:");
    for (rows, cols) in partition.supports() {
        println!("  rows {rows:?} x cols {cols:?}");
    }
    Ok(())
}

//! Generate the four built-in transform matrices and write them as JSON.
//!
//! Run with `cargo run --example generate_transforms`.

use sparsefact::transforms::{gen_transform, TransformKind};
use sparsefact::{json, TolerancePolicy};

fn main() -> Result<(), sparsefact::Error> {
    let out = std::env::temp_dir().join("sparsefact_transforms");
    std::fs::create_dir_all(&out)
        .map_err(|e| sparsefact::Error::InvalidInput(format!("{}: {e}", out.display())))?;

    for kind in [
        TransformKind::Dft,
        TransformKind::Dct2,
        TransformKind::Dst2,
        TransformKind::Hadamard,
    ] {
        let n = 8;
        let z = gen_transform(kind, n)?;
        let path = out.join(format!("{}{n}.json", kind.name()));
        json::write_matrix(&path, &z)?;
        println!("{}: {n}x{n}, wrote {}", kind.name(), path.display());
    }

    // The generators are honest matrices, not just tables: DFT columns are
    // orthogonal, so F * conj(F)^T = N * I.
    let tol = TolerancePolicy::default();
    let f = gen_transform(TransformKind::Dft, 8)?;
    let mut gram_err: f64 = 0.0;
    for k in 1..=8 {
        for l in 1..=8 {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for j in 1..=8 {
                acc += f.get(k, j) * f.get(l, j).conj();
            }
            let expect = if k == l { 8.0 } else { 0.0 };
            gram_err = gram_err.max((acc - expect).norm());
        }
    }
    println!("DFT_8 gram deviation from 8*I: {gram_err:.3e}");
    assert!(tol.is_zero(gram_err / 8.0));

    // Round-trip check: the JSON written above parses back bit-for-bit.
    let reread = json::read_matrix(&out.join("dft8.json"))?;
    assert_eq!(reread.rows(), 8);
    for k in 1..=8 {
        for l in 1..=8 {
            assert_eq!(reread.get(k, l), f.get(k, l));
        }
    }
    println!("dft8.json round-trips exactly");
    Ok(())
}

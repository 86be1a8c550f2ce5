//! Fast-transform generators and their butterfly building blocks.
//!
//! Sizes are powers of two wherever the butterfly structure is involved:
//! `N = 2^L` with `L` layers. The radix-2 decimation identity
//!
//! ```text
//! DFT_N = B_N * blockdiag(DFT_{N/2}, DFT_{N/2}) * P_N
//! ```
//!
//! unrolls into the full factorization `DFT_N = F_L * ... * F_1 * R_N`, where
//! `F_ell` stacks `N / 2^ell` butterfly blocks `B_{2^ell}` on the diagonal,
//! `P_N` sorts odd indices before even ones, and the bit-reversal `R_N`
//! composes the per-level shuffles `Q_ell = I ⊗ P_{2^ell}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::matrix::ComplexMatrix;
use crate::perm::Permutation;
use crate::{Error, Result};

/// The transform families with certified butterfly structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Dft,
    Dct2,
    Dst2,
    Hadamard,
}

impl TransformKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dft" => Ok(TransformKind::Dft),
            "dct2" => Ok(TransformKind::Dct2),
            "dst2" => Ok(TransformKind::Dst2),
            "hadamard" => Ok(TransformKind::Hadamard),
            other => Err(Error::InvalidInput(format!(
                "unknown transform kind '{other}' (expected dft, dct2, dst2, or hadamard)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TransformKind::Dft => "dft",
            TransformKind::Dct2 => "dct2",
            TransformKind::Dst2 => "dst2",
            TransformKind::Hadamard => "hadamard",
        }
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Number of layers `L` with `N = 2^L`.
pub fn layers_for(n: usize) -> Result<usize> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Dense `N x N` transform matrix.
///
/// Entries follow the 1-based conventions:
/// DFT `w^{(k-1)(l-1)}` with `w = exp(-2*pi*i/N)`; DCT-II
/// `cos(pi/N * (l-1/2) * (k-1))`; DST-II `sin(pi/N * (l-1/2) * k)`;
/// Hadamard by the doubling recursion from `H_1 = (1)`.
///
/// Each root-of-unity power is evaluated straight from its angle rather than
/// by repeated multiplication, so entries stay accurate to ~1e-15 even at
/// `N = 1024`. The three trigonometric transforms come out with exactly zero
/// imaginary parts.
pub fn gen_transform(kind: TransformKind, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("transform size must be positive".into()));
    }
    match kind {
        TransformKind::Dft => ComplexMatrix::from_fn(n, n, |k, l| {
            let t = ((k - 1) * (l - 1)) % n;
            Complex64::from_polar(1.0, -2.0 * PI * t as f64 / n as f64)
        }),
        TransformKind::Dct2 => ComplexMatrix::from_fn(n, n, |k, l| {
            let angle = PI / n as f64 * (l as f64 - 0.5) * (k as f64 - 1.0);
            Complex64::new(angle.cos(), 0.0)
        }),
        TransformKind::Dst2 => ComplexMatrix::from_fn(n, n, |k, l| {
            let angle = PI / n as f64 * (l as f64 - 0.5) * k as f64;
            Complex64::new(angle.sin(), 0.0)
        }),
        TransformKind::Hadamard => {
            if !is_power_of_two(n) {
                return Err(Error::NotPowerOfTwo(n));
            }
            let mut h = ComplexMatrix::from_real_rows(&[vec![1.0]])?;
            while h.rows() < n {
                let m = h.rows();
                let mut next = ComplexMatrix::zeros(2 * m, 2 * m);
                for k in 1..=m {
                    for l in 1..=m {
                        let v = h.get(k, l);
                        next.set(k, l, v)?;
                        next.set(k, l + m, v)?;
                        next.set(k + m, l, v)?;
                        next.set(k + m, l + m, -v)?;
                    }
                }
                h = next;
            }
            Ok(h)
        }
    }
}

/// Single butterfly block `B_M = [[I, A], [I, -A]]` with
/// `A = diag(1, w_M, ..., w_M^{M/2-1})` and `w_M = exp(-2*pi*i/M)`.
fn butterfly_block(m: usize) -> Result<ComplexMatrix> {
    if !is_power_of_two(m) || m < 2 {
        return Err(Error::NotPowerOfTwo(m));
    }
    let half = m / 2;
    let mut b = ComplexMatrix::zeros(m, m);
    for t in 0..half {
        let w = Complex64::from_polar(1.0, -2.0 * PI * t as f64 / m as f64);
        b.set(t + 1, t + 1, Complex64::new(1.0, 0.0))?;
        b.set(t + 1, half + t + 1, w)?;
        b.set(half + t + 1, t + 1, Complex64::new(1.0, 0.0))?;
        b.set(half + t + 1, half + t + 1, -w)?;
    }
    Ok(b)
}

/// Butterfly factor `F_ell = I_{N/2^ell} ⊗ B_{2^ell}` of the `L`-layer
/// factorization, `1 <= ell <= L`, as a dense `N x N` matrix with `2N`
/// nonzeros.
pub fn butterfly_factor(ell: usize, layers: usize) -> Result<ComplexMatrix> {
    if ell == 0 || ell > layers {
        return Err(Error::LayerOutOfRange { ell, layers });
    }
    let n = 1usize << layers;
    let block = butterfly_block(1 << ell)?;
    let count = n >> ell;
    let mut f = ComplexMatrix::zeros(n, n);
    let m = block.rows();
    for b in 0..count {
        for k in 1..=m {
            for l in 1..=m {
                let v = block.get(k, l);
                if v.re != 0.0 || v.im != 0.0 {
                    f.set(b * m + k, b * m + l, v)?;
                }
            }
        }
    }
    Ok(f)
}

/// All butterfly factors `[F_L, ..., F_1]`, leftmost factor first.
pub fn butterfly_factors(layers: usize) -> Result<Vec<ComplexMatrix>> {
    (1..=layers).rev().map(|ell| butterfly_factor(ell, layers)).collect()
}

/// Permutation sorting odd indices before even ones: `[1,2,3,4] -> [1,3,2,4]`.
pub fn odd_even_perm(n: usize) -> Result<Permutation> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "odd/even sort needs a positive even size, got {n}"
        )));
    }
    let mut image = vec![0usize; n];
    for j in 1..=n {
        image[j - 1] = if j % 2 == 1 { (j + 1) / 2 } else { n / 2 + j / 2 };
    }
    Permutation::from_image(image)
}

/// Bit-reversal permutation `R_N = Q_1 * Q_2 * ... * Q_L` with
/// `Q_ell = I_{N/2^ell} ⊗ P_{2^ell}`; equivalently, index `k-1` maps to its
/// `L`-bit reversal. An involution.
pub fn bit_reversal_perm(n: usize) -> Result<Permutation> {
    let layers = layers_for(n)?;
    let mut r = Permutation::identity(n);
    for ell in 1..=layers {
        let q = odd_even_perm(1 << ell)?.repeat_blocks(n >> ell);
        r = r.compose(&q)?;
    }
    Ok(r)
}

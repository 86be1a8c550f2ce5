//! Seeded random fixtures for tests and the CLI generator.
//!
//! Every generator takes an explicit ChaCha RNG so identical seeds reproduce
//! identical fixtures byte for byte. Entry magnitudes stay in `[0.5, 1.5]`,
//! which keeps supports exact and pivots well conditioned.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mask::SupportMask;
use crate::matrix::ComplexMatrix;
use crate::supports::{butterfly_support, is_closable, RankOneSupportTuple};
use crate::transforms::bit_reversal_perm;
use crate::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex scalar with magnitude in `[0.5, 1.5]` and uniform phase.
pub fn nonzero_entry(rng: &mut ChaCha8Rng) -> Complex64 {
    let magnitude = rng.gen_range(0.5..1.5);
    let phase = rng.gen_range(0.0..2.0 * PI);
    Complex64::from_polar(magnitude, phase)
}

/// Dense matrix of nonzero entries.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| nonzero_entry(rng)).expect("finite entries")
}

/// Matrix whose support is exactly `mask`.
pub fn random_on_mask(rng: &mut ChaCha8Rng, mask: &SupportMask) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(mask.rows(), mask.cols());
    for (k, l) in mask.iter() {
        m.set(k, l, nonzero_entry(rng)).expect("in bounds");
    }
    m
}

/// Rank-one matrix `u v^T` whose support is exactly the rectangle `i` of the
/// tuple (empty rectangle gives the zero matrix).
pub fn random_rank_one_term(
    rng: &mut ChaCha8Rng,
    tuple: &RankOneSupportTuple,
    i: usize,
) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(tuple.m(), tuple.n());
    let u: Vec<(usize, Complex64)> = tuple
        .row_set(i)
        .iter()
        .map(|&k| (k, nonzero_entry(rng)))
        .collect();
    let v: Vec<(usize, Complex64)> = tuple
        .col_set(i)
        .iter()
        .map(|&l| (l, nonzero_entry(rng)))
        .collect();
    for &(k, uk) in &u {
        for &(l, vl) in &v {
            m.set(k, l, uk * vl).expect("in bounds");
        }
    }
    m
}

/// One rank-one term per rectangle, exact supports.
pub fn random_contributions(
    rng: &mut ChaCha8Rng,
    tuple: &RankOneSupportTuple,
) -> Vec<ComplexMatrix> {
    (0..tuple.len())
        .map(|i| random_rank_one_term(rng, tuple, i))
        .collect()
}

fn random_subset(rng: &mut ChaCha8Rng, limit: usize, size: usize) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    while set.len() < size {
        set.insert(rng.gen_range(1..=limit));
    }
    set
}

/// Tuple of `r` random rectangles, possibly overlapping, each at most
/// `max_rows x max_cols`.
pub fn random_support_tuple(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    r: usize,
    max_rows: usize,
    max_cols: usize,
) -> RankOneSupportTuple {
    let supports = (0..r)
        .map(|_| {
            let height = rng.gen_range(1..=max_rows.min(m));
            let width = rng.gen_range(1..=max_cols.min(n));
            (random_subset(rng, m, height), random_subset(rng, n, width))
        })
        .collect();
    RankOneSupportTuple::new(m, n, supports).expect("subsets stay in bounds")
}

/// Pairwise-disjoint tuple of `r` nonempty rectangles. Falls back to single
/// cells on still-uncovered positions if rejection sampling runs long.
pub fn random_disjoint_tuple(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    r: usize,
) -> RankOneSupportTuple {
    assert!(r <= m * n, "cannot place {r} disjoint rectangles on {m}x{n}");
    let mut covered = SupportMask::empty(m, n);
    let mut supports = Vec::with_capacity(r);
    for placed_count in 0..r {
        // Cells that must stay free for the rectangles not yet placed.
        let reserve = r - placed_count - 1;
        let mut placed = false;
        for _ in 0..200 {
            let height = rng.gen_range(1..=2.min(m));
            let width = rng.gen_range(1..=2.min(n));
            let rows = random_subset(rng, m, height);
            let cols = random_subset(rng, n, width);
            let rect = SupportMask::rectangle(m, n, rows.iter().copied(), cols.iter().copied())
                .expect("in bounds");
            if covered.is_disjoint(&rect)
                && m * n - covered.len() - rect.len() >= reserve
            {
                covered = covered.union(&rect).expect("same shape");
                supports.push((rows, cols));
                placed = true;
                break;
            }
        }
        if !placed {
            let (k, l) = (1..=m)
                .flat_map(|k| (1..=n).map(move |l| (k, l)))
                .find(|&(k, l)| !covered.contains(k, l))
                .expect("fewer rectangles than cells");
            covered.insert(k, l).expect("in bounds");
            supports.push((BTreeSet::from([k]), BTreeSet::from([l])));
        }
    }
    RankOneSupportTuple::new(m, n, supports).expect("validated")
}

/// Closable tuple of `r` rectangles, biased toward genuine overlaps:
/// rejection-samples overlapping tuples first and falls back to a disjoint
/// (hence closable) tuple if none shows up.
pub fn random_closable_tuple(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    r: usize,
) -> RankOneSupportTuple {
    for _ in 0..300 {
        let tuple = random_support_tuple(rng, m, n, r, 3, 3);
        if is_closable(&tuple) {
            return tuple;
        }
    }
    random_disjoint_tuple(rng, m, n, r)
}

/// Random chain `[X_L, ..., X_1]` with exact butterfly supports; with
/// `fold_bit_reversal` the innermost factor is column-permuted by `R_N`,
/// matching the support chain of the scaled fast Fourier transform.
pub fn random_butterfly_chain(
    rng: &mut ChaCha8Rng,
    layers: usize,
    fold_bit_reversal: bool,
) -> Result<Vec<ComplexMatrix>> {
    let n = 1usize << layers;
    let mut chain = Vec::with_capacity(layers);
    for ell in (1..=layers).rev() {
        let mask = butterfly_support(ell, layers)?;
        let mut factor = random_on_mask(rng, &mask);
        if ell == 1 && fold_bit_reversal {
            factor = factor.permute_cols(&bit_reversal_perm(n)?)?;
        }
        chain.push(factor);
    }
    Ok(chain)
}

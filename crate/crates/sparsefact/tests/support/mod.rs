//! Helpers shared by the integration suites: a numerical feasibility oracle
//! for fixed-support decomposition and a naive partition brute force.

// Each test target compiles this module independently and uses a subset.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use sparsefact::supports::{RankOneSupportTuple, SupportFamilySpec};
use sparsefact::{fixtures, ComplexMatrix, SupportMask, TolerancePolicy};

/// Best alternating-least-squares fit of `sum_i x_i y_i^T` to `z` under the
/// support tuple, over `restarts` random initializations. Returns the best
/// relative residual and the rank-one terms achieving it.
///
/// A residual near zero exhibits a feasible tuple; a residual staying large
/// across many restarts on a tiny instance is strong evidence none exists.
pub fn als_feasibility(
    z: &ComplexMatrix,
    supports: &RankOneSupportTuple,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> (f64, Vec<ComplexMatrix>) {
    let m = supports.m();
    let n = supports.n();
    let z_norm = z_scale(z);
    let mut best = f64::INFINITY;
    let mut best_terms = vec![ComplexMatrix::zeros(m, n); supports.len()];
    for restart in 0..restarts {
        let mut rng = fixtures::rng(seed ^ (restart as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let mut xs: Vec<Vec<Complex64>> = Vec::new();
        let mut ys: Vec<Vec<Complex64>> = Vec::new();
        for (rows, cols) in supports.supports() {
            xs.push((0..rows.len()).map(|_| unit_random(&mut rng)).collect());
            ys.push((0..cols.len()).map(|_| unit_random(&mut rng)).collect());
        }
        for _ in 0..iters {
            solve_half(z, supports, &ys, &mut xs, true);
            solve_half(z, supports, &xs, &mut ys, false);
            let res = residual(z, supports, &xs, &ys) / z_norm;
            if res < 1e-13 {
                break;
            }
        }
        let res = residual(z, supports, &xs, &ys) / z_norm;
        if res < best {
            best = res;
            best_terms = terms_of(supports, &xs, &ys);
        }
    }
    (best, best_terms)
}

fn z_scale(z: &ComplexMatrix) -> f64 {
    z.frobenius_norm().max(1e-30)
}

fn unit_random(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0 + rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU)
}

/// One half step: with `others` fixed, the objective is linear in `active`,
/// so solve its least-squares problem exactly through the normal equations.
/// `active_is_x` says whether the unknowns are the row vectors.
fn solve_half(
    z: &ComplexMatrix,
    supports: &RankOneSupportTuple,
    others: &[Vec<Complex64>],
    active: &mut [Vec<Complex64>],
    active_is_x: bool,
) {
    // Column t of the design matrix is the vectorized contribution of one
    // unknown coordinate; cells are enumerated row-major.
    let mut offsets = Vec::with_capacity(active.len());
    let mut dim = 0usize;
    for a in active.iter() {
        offsets.push(dim);
        dim += a.len();
    }
    if dim == 0 {
        return;
    }
    let m = supports.m();
    let n = supports.n();
    let mut design: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); dim]; m * n];
    for (i, (rows, cols)) in supports.supports().iter().enumerate() {
        let (own, opposite): (Vec<usize>, Vec<usize>) = if active_is_x {
            (
                rows.iter().map(|&k| k - 1).collect(),
                cols.iter().map(|&l| l - 1).collect(),
            )
        } else {
            (
                cols.iter().map(|&l| l - 1).collect(),
                rows.iter().map(|&k| k - 1).collect(),
            )
        };
        for (t, &p) in own.iter().enumerate() {
            for (s, &q) in opposite.iter().enumerate() {
                let (row, col) = if active_is_x { (p, q) } else { (q, p) };
                design[row * n + col][offsets[i] + t] = others[i][s];
            }
        }
    }
    let mut rhs_vec = vec![Complex64::default(); m * n];
    for k in 0..m {
        for l in 0..n {
            rhs_vec[k * n + l] = z.get(k + 1, l + 1);
        }
    }
    // Normal equations with a whisper of ridge to tolerate rank deficiency.
    let mut gram = vec![vec![Complex64::default(); dim]; dim];
    let mut rhs = vec![Complex64::default(); dim];
    for (cell, row) in design.iter().enumerate() {
        for a in 0..dim {
            let ca = row[a].conj();
            if ca.norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..dim {
                gram[a][b] += ca * row[b];
            }
            rhs[a] += ca * rhs_vec[cell];
        }
    }
    for (a, row) in gram.iter_mut().enumerate() {
        row[a] += Complex64::new(1e-12, 0.0);
    }
    let solution = solve_dense(gram, rhs);
    for (i, a) in active.iter_mut().enumerate() {
        for (t, slot) in a.iter_mut().enumerate() {
            *slot = solution[offsets[i] + t];
        }
    }
}

/// Gaussian elimination with partial pivoting on a small complex system.
fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let lead = a[col][col];
        if lead.norm() == 0.0 {
            continue;
        }
        for row in col + 1..n {
            let factor = a[row][col] / lead;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col..n {
                let upper = a[col][k];
                a[row][k] -= factor * upper;
            }
            let upper = b[col];
            b[row] -= factor * upper;
        }
    }
    let mut x = vec![Complex64::default(); n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = if a[col][col].norm() == 0.0 {
            Complex64::default()
        } else {
            acc / a[col][col]
        };
    }
    x
}

fn residual(
    z: &ComplexMatrix,
    supports: &RankOneSupportTuple,
    xs: &[Vec<Complex64>],
    ys: &[Vec<Complex64>],
) -> f64 {
    let mut acc = 0.0;
    for k in 1..=supports.m() {
        for l in 1..=supports.n() {
            let mut fit = Complex64::default();
            for (i, (rows, cols)) in supports.supports().iter().enumerate() {
                let Some(t) = rows.iter().position(|&r| r == k) else {
                    continue;
                };
                let Some(s) = cols.iter().position(|&c| c == l) else {
                    continue;
                };
                fit += xs[i][t] * ys[i][s];
            }
            acc += (z.get(k, l) - fit).norm_sqr();
        }
    }
    acc.sqrt()
}

fn terms_of(
    supports: &RankOneSupportTuple,
    xs: &[Vec<Complex64>],
    ys: &[Vec<Complex64>],
) -> Vec<ComplexMatrix> {
    supports
        .supports()
        .iter()
        .enumerate()
        .map(|(i, (rows, cols))| {
            let mut term = ComplexMatrix::zeros(supports.m(), supports.n());
            for (t, &k) in rows.iter().enumerate() {
                for (s, &l) in cols.iter().enumerate() {
                    term.set(k, l, xs[i][t] * ys[i][s]).unwrap();
                }
            }
            term
        })
        .collect()
}

/// Every assignment of support cells to `r` labeled blocks, kept when each
/// block is a rank-one rectangle within the family budgets. Exponential;
/// 3x3 instances only.
pub fn naive_partitions(
    z: &ComplexMatrix,
    spec: &SupportFamilySpec,
    tol: &TolerancePolicy,
) -> BTreeSet<Vec<(Vec<usize>, Vec<usize>)>> {
    let cells: Vec<(usize, usize)> = z.support(tol.zero_threshold).iter().collect();
    let mut labels = vec![0usize; cells.len()];
    let mut found = BTreeSet::new();
    loop {
        let mut blocks: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); spec.r];
        for (cell, &label) in cells.iter().zip(&labels) {
            blocks[label].insert(*cell);
        }
        if blocks.iter().all(|b| block_feasible(z, b, spec, tol)) {
            let mut canon: Vec<(Vec<usize>, Vec<usize>)> = blocks
                .iter()
                .map(|b| {
                    let rows: BTreeSet<usize> = b.iter().map(|&(k, _)| k).collect();
                    let cols: BTreeSet<usize> = b.iter().map(|&(_, l)| l).collect();
                    (rows.into_iter().collect(), cols.into_iter().collect())
                })
                .collect();
            canon.sort();
            found.insert(canon);
        }
        let mut pos = 0;
        loop {
            if pos == labels.len() {
                return found;
            }
            labels[pos] += 1;
            if labels[pos] < spec.r {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

fn block_feasible(
    z: &ComplexMatrix,
    cells: &BTreeSet<(usize, usize)>,
    spec: &SupportFamilySpec,
    tol: &TolerancePolicy,
) -> bool {
    if cells.is_empty() {
        return true;
    }
    let rows: BTreeSet<usize> = cells.iter().map(|&(k, _)| k).collect();
    let cols: BTreeSet<usize> = cells.iter().map(|&(_, l)| l).collect();
    if rows.len() > spec.a || cols.len() > spec.b {
        return false;
    }
    if cells.len() != rows.len() * cols.len() {
        return false;
    }
    let mask = SupportMask::rectangle(spec.m, spec.n, rows.iter().copied(), cols.iter().copied())
        .expect("cells are in bounds");
    sparsefact::matrix::rank_le_one(z, &mask, tol).unwrap_or(false)
}

/// Sorted (rows, cols) pairs of a tuple, for set comparison against the
/// naive enumeration.
pub fn tuple_rects(tuple: &RankOneSupportTuple) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut rects: Vec<(Vec<usize>, Vec<usize>)> = tuple
        .supports()
        .iter()
        .map(|(rows, cols)| {
            (
                rows.iter().copied().collect(),
                cols.iter().copied().collect(),
            )
        })
        .collect();
    rects.sort();
    rects
}

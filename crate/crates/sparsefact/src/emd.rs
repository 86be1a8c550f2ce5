//! Iterative rank-one completion: recovering the terms of an exact matrix
//! decomposition with fixed rank-one supports.
//!
//! Each term starts from its observable cells (cells no other support
//! covers, which must equal the corresponding entry of `Z`), everything
//! outside its rectangle pinned to zero, and the contested cells missing.
//! Three moves repeat until nothing changes:
//!
//! 1. inside completion: a 2x2 pattern of one term with three cells known
//!    and the corner opposite the missing one nonzero forces the missing
//!    corner through the vanishing-minor rule `a1*a3 = a2*a4`;
//! 2. compatibility: wherever every term is known, the terms must sum to the
//!    entry of `Z`;
//! 3. across completion: a cell missing in exactly one term is that term's
//!    by subtraction.
//!
//! Every filled value is forced, so when the loop completes the tuple it is
//! the only candidate decomposition; when it hits a contradiction no
//! decomposition exists; otherwise it stalls and reports the partial state.

use num_complex::Complex64;

use crate::matrix::{rank_le_one, ComplexMatrix};
use crate::supports::RankOneSupportTuple;
use crate::tol::TolerancePolicy;
use crate::{Error, Result};

/// State of one cell of one contribution during completion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Known(Complex64),
    Missing,
    /// Outside the term's rectangle; fixed at zero.
    StructuralZero,
}

impl Cell {
    /// Value when determined: known cells carry their value, structural
    /// zeros are zero, missing cells are undetermined.
    pub fn value(&self) -> Option<Complex64> {
        match self {
            Cell::Known(v) => Some(*v),
            Cell::StructuralZero => Some(Complex64::new(0.0, 0.0)),
            Cell::Missing => None,
        }
    }
}

/// Partial rank-one terms of a decomposition in progress.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionTuple {
    supports: RankOneSupportTuple,
    cells: Vec<Vec<Cell>>,
}

impl ContributionTuple {
    /// Initial state of the completion: observable cells of each rectangle
    /// copy `z`, contested cells are missing, the rest is structurally zero.
    pub fn init(z: &ComplexMatrix, supports: &RankOneSupportTuple) -> Result<Self> {
        if z.rows() != supports.m() || z.cols() != supports.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with supports over a {}x{} grid",
                z.rows(),
                z.cols(),
                supports.m(),
                supports.n()
            )));
        }
        let (m, n) = (supports.m(), supports.n());
        let mut cells = Vec::with_capacity(supports.len());
        for i in 0..supports.len() {
            let mask = supports.mask(i);
            let observable = supports.observable_mask(i);
            let mut grid = vec![Cell::StructuralZero; m * n];
            for (k, l) in mask.iter() {
                grid[(k - 1) * n + (l - 1)] = if observable.contains(k, l) {
                    Cell::Known(z.get(k, l))
                } else {
                    Cell::Missing
                };
            }
            cells.push(grid);
        }
        Ok(ContributionTuple {
            supports: supports.clone(),
            cells,
        })
    }

    /// Fully known tuple holding the given terms, restricted to their
    /// supports: only on-support cells of each matrix are read.
    pub fn from_matrices(
        supports: &RankOneSupportTuple,
        terms: &[ComplexMatrix],
    ) -> Result<Self> {
        if terms.len() != supports.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms for {} supports",
                terms.len(),
                supports.len()
            )));
        }
        let (m, n) = (supports.m(), supports.n());
        let mut cells = Vec::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if term.rows() != m || term.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "term {} is {}x{}, supports are over a {}x{} grid",
                    i + 1,
                    term.rows(),
                    term.cols(),
                    m,
                    n
                )));
            }
            let mut grid = vec![Cell::StructuralZero; m * n];
            for (k, l) in supports.mask(i).iter() {
                grid[(k - 1) * n + (l - 1)] = Cell::Known(term.get(k, l));
            }
            cells.push(grid);
        }
        Ok(ContributionTuple {
            supports: supports.clone(),
            cells,
        })
    }

    pub fn supports(&self) -> &RankOneSupportTuple {
        &self.supports
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, i: usize, row: usize, col: usize) -> Cell {
        self.cells[i][(row - 1) * self.supports.n() + (col - 1)]
    }

    fn set_known(&mut self, i: usize, row: usize, col: usize, value: Complex64) {
        let n = self.supports.n();
        self.cells[i][(row - 1) * n + (col - 1)] = Cell::Known(value);
    }

    pub fn missing_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|c| matches!(c, Cell::Missing))
            .count()
    }

    pub fn is_fully_known(&self) -> bool {
        self.missing_count() == 0
    }

    /// Materialize the terms; errors on the first missing cell.
    pub fn matrices(&self) -> Result<Vec<ComplexMatrix>> {
        let (m, n) = (self.supports.m(), self.supports.n());
        let mut out = Vec::with_capacity(self.len());
        for (i, grid) in self.cells.iter().enumerate() {
            let mut mat = ComplexMatrix::zeros(m, n);
            for (idx, cell) in grid.iter().enumerate() {
                match cell.value() {
                    Some(v) => mat.set(idx / n + 1, idx % n + 1, v)?,
                    None => {
                        return Err(Error::MissingCell {
                            index: i + 1,
                            row: idx / n + 1,
                            col: idx % n + 1,
                        })
                    }
                }
            }
            out.push(mat);
        }
        Ok(out)
    }
}

/// Result of the completion loop.
#[derive(Debug, Clone, PartialEq)]
pub enum EmdOutcome {
    /// Every cell of every term determined.
    Complete(ContributionTuple),
    /// Determined cells contradict `Z`; carries the first offending cell in
    /// row-major order.
    Incompatible { row: usize, col: usize },
    /// No contradiction, but missing cells remain.
    Stalled(ContributionTuple),
}

/// Run the completion loop on `z` under the given rank-one supports.
pub fn emd_complete(
    z: &ComplexMatrix,
    supports: &RankOneSupportTuple,
    tol: &TolerancePolicy,
) -> Result<EmdOutcome> {
    let mut state = ContributionTuple::init(z, supports)?;
    let r = supports.len();
    loop {
        let mut filled = 0usize;

        // Inside completion: newly known cells are usable immediately;
        // patterns are scanned in lexicographic (row pair, column pair)
        // order within each term.
        for i in 0..r {
            let rows: Vec<usize> = supports.row_set(i).iter().copied().collect();
            let cols: Vec<usize> = supports.col_set(i).iter().copied().collect();
            for (ai, &k1) in rows.iter().enumerate() {
                for &k2 in &rows[ai + 1..] {
                    for (bi, &l1) in cols.iter().enumerate() {
                        for &l2 in &cols[bi + 1..] {
                            filled += try_fill_pattern(&mut state, i, k1, k2, l1, l2, tol);
                        }
                    }
                }
            }
        }

        // Compatibility: wherever all terms are determined they must sum to z.
        for k in 1..=supports.m() {
            for l in 1..=supports.n() {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut all_known = true;
                for i in 0..r {
                    match state.get(i, k, l).value() {
                        Some(v) => sum += v,
                        None => {
                            all_known = false;
                            break;
                        }
                    }
                }
                if all_known && !tol.close(sum, z.get(k, l)) {
                    return Ok(EmdOutcome::Incompatible { row: k, col: l });
                }
            }
        }

        // Across completion: a cell missing in exactly one term is forced by
        // subtraction. Only the other terms at the same cell are read, so
        // within-pass order is immaterial.
        for k in 1..=supports.m() {
            for l in 1..=supports.n() {
                let mut missing = None;
                let mut sum = Complex64::new(0.0, 0.0);
                let mut missing_count = 0;
                for i in 0..r {
                    match state.get(i, k, l).value() {
                        Some(v) => sum += v,
                        None => {
                            missing = Some(i);
                            missing_count += 1;
                        }
                    }
                }
                if missing_count == 1 {
                    state.set_known(missing.expect("counted"), k, l, z.get(k, l) - sum);
                    filled += 1;
                }
            }
        }

        if filled == 0 {
            break;
        }
    }
    if state.is_fully_known() {
        Ok(EmdOutcome::Complete(state))
    } else {
        Ok(EmdOutcome::Stalled(state))
    }
}

/// Apply the vanishing-minor rule to the 2x2 pattern (k1,k2)x(l1,l2) of term
/// `i`. Fills at most one cell; returns the number filled.
fn try_fill_pattern(
    state: &mut ContributionTuple,
    i: usize,
    k1: usize,
    k2: usize,
    l1: usize,
    l2: usize,
    tol: &TolerancePolicy,
) -> usize {
    // Corners in cyclic order: a1 = (k1,l1), a2 = (k1,l2), a3 = (k2,l2),
    // a4 = (k2,l1); a1-a3 and a2-a4 are the diagonals.
    let coords = [(k1, l1), (k1, l2), (k2, l2), (k2, l1)];
    let values: Vec<Option<Complex64>> = coords
        .iter()
        .map(|&(k, l)| state.get(i, k, l).value())
        .collect();
    let missing: Vec<usize> = (0..4).filter(|&t| values[t].is_none()).collect();
    if missing.len() != 1 {
        return 0;
    }
    let t = missing[0];
    let opposite = (t + 2) % 4;
    let opp = values[opposite].expect("only one corner missing");
    if tol.is_zero(opp.norm()) {
        return 0;
    }
    let adj1 = values[(t + 1) % 4].expect("known");
    let adj2 = values[(t + 3) % 4].expect("known");
    let (k, l) = coords[t];
    state.set_known(i, k, l, adj1 * adj2 / opp);
    1
}

/// Sum of the (fully known) terms.
pub fn sum_contributions(contributions: &ContributionTuple) -> Result<ComplexMatrix> {
    let mats = contributions.matrices()?;
    let mut acc = ComplexMatrix::zeros(contributions.supports().m(), contributions.supports().n());
    for m in &mats {
        acc = acc.add(m)?;
    }
    Ok(acc)
}

/// Split fully known rank-one terms into a factor pair `(X, Y)` with
/// `X Y^T = sum` and column `i` of `X`, `Y` spanning term `i`.
///
/// Deterministic pivoting: `u` is the first nonzero column of the term,
/// scaled into `X`; `Y`'s column is the first row of the term with a pivot
/// entry in `u`, divided by that pivot (plain division, no conjugation).
pub fn contributions_to_factors(
    contributions: &ContributionTuple,
    tol: &TolerancePolicy,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let mats = contributions.matrices()?;
    let supports = contributions.supports();
    let (m, n, r) = (supports.m(), supports.n(), supports.len());
    let mut x = ComplexMatrix::zeros(m, r);
    let mut y = ComplexMatrix::zeros(n, r);
    for (i, term) in mats.iter().enumerate() {
        if !rank_le_one(term, &supports.mask(i), tol)? {
            return Err(Error::RankTooHigh { index: i + 1 });
        }
        let Some(l0) = (1..=n).find(|&l| term.column(l).iter().any(|v| !tol.is_zero(v.norm())))
        else {
            continue; // zero term: both columns stay zero
        };
        let u = term.column(l0);
        let k0 = (1..=m)
            .find(|&k| !tol.is_zero(u[k - 1].norm()))
            .expect("column chosen nonzero");
        let pivot = u[k0 - 1];
        for k in 1..=m {
            x.set(k, i + 1, u[k - 1])?;
        }
        for l in 1..=n {
            y.set(l, i + 1, term.get(k0, l) / pivot)?;
        }
    }
    Ok((x, y))
}

/// Columnwise scale equivalence: true iff for every `i` there is a nonzero
/// `d_i` with `x2 = x1 * d_i` and `y2 = y1 / d_i` on column `i`.
pub fn pair_scale_equivalent(
    x1: &ComplexMatrix,
    y1: &ComplexMatrix,
    x2: &ComplexMatrix,
    y2: &ComplexMatrix,
    tol: &TolerancePolicy,
) -> bool {
    if x1.rows() != x2.rows()
        || y1.rows() != y2.rows()
        || x1.cols() != y1.cols()
        || x1.cols() != x2.cols()
        || x2.cols() != y2.cols()
    {
        return false;
    }
    (1..=x1.cols()).all(|i| {
        column_scale(
            &x1.column(i),
            &y1.column(i),
            &x2.column(i),
            &y2.column(i),
            tol,
        )
        .is_some()
    })
}

/// Scale matching one column pair; `Some(d)` when `x2 = d * x1` and
/// `y2 = y1 / d`. Zero x-columns force the scale through y instead; fully
/// zero pairs match with `d = 1`.
fn column_scale(
    x1: &[Complex64],
    y1: &[Complex64],
    x2: &[Complex64],
    y2: &[Complex64],
    tol: &TolerancePolicy,
) -> Option<Complex64> {
    let pivot_x = x1.iter().position(|v| !tol.is_zero(v.norm()));
    let pivot_y = y1.iter().position(|v| !tol.is_zero(v.norm()));
    let d = match (pivot_x, pivot_y) {
        (Some(k), _) => {
            let d = x2[k] / x1[k];
            if tol.is_zero(d.norm()) {
                return None;
            }
            d
        }
        (None, Some(l)) => {
            let inv = y2[l] / y1[l];
            if tol.is_zero(inv.norm()) {
                return None;
            }
            1.0 / inv
        }
        (None, None) => Complex64::new(1.0, 0.0),
    };
    let x_ok = x1
        .iter()
        .zip(x2)
        .all(|(&a, &b)| tol.close(b, a * d));
    let y_ok = y1
        .iter()
        .zip(y2)
        .all(|(&a, &b)| tol.close(b, a / d));
    (x_ok && y_ok).then_some(d)
}

/// Permutation-and-scale equivalence of factor pairs: true iff the columns of
/// `(x2, y2)` are a permutation of the columns of `(x1, y1)` up to per-column
/// scales. Columns are grouped by support pattern, then matched within each
/// group by backtracking on the scale test.
pub fn pair_perm_scale_equivalent(
    x1: &ComplexMatrix,
    y1: &ComplexMatrix,
    x2: &ComplexMatrix,
    y2: &ComplexMatrix,
    tol: &TolerancePolicy,
) -> bool {
    if x1.rows() != x2.rows()
        || y1.rows() != y2.rows()
        || x1.cols() != y1.cols()
        || x1.cols() != x2.cols()
        || x2.cols() != y2.cols()
    {
        return false;
    }
    let r = x1.cols();
    let key = |x: &ComplexMatrix, y: &ComplexMatrix, i: usize| -> (Vec<usize>, Vec<usize>) {
        (
            x.column(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| !tol.is_zero(v.norm()))
                .map(|(k, _)| k)
                .collect(),
            y.column(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| !tol.is_zero(v.norm()))
                .map(|(k, _)| k)
                .collect(),
        )
    };
    // Candidate matches per left column, restricted to equal support keys.
    let candidates: Vec<Vec<usize>> = (1..=r)
        .map(|i| {
            (1..=r)
                .filter(|&j| key(x1, y1, i) == key(x2, y2, j))
                .collect()
        })
        .collect();
    let mut taken = vec![false; r];
    fn assign(
        i: usize,
        r: usize,
        candidates: &[Vec<usize>],
        taken: &mut [bool],
        x1: &ComplexMatrix,
        y1: &ComplexMatrix,
        x2: &ComplexMatrix,
        y2: &ComplexMatrix,
        tol: &TolerancePolicy,
    ) -> bool {
        if i > r {
            return true;
        }
        for &j in &candidates[i - 1] {
            if taken[j - 1] {
                continue;
            }
            if column_scale(
                &x1.column(i),
                &y1.column(i),
                &x2.column(j),
                &y2.column(j),
                tol,
            )
            .is_some()
            {
                taken[j - 1] = true;
                if assign(i + 1, r, candidates, taken, x1, y1, x2, y2, tol) {
                    return true;
                }
                taken[j - 1] = false;
            }
        }
        false
    }
    assign(1, r, &candidates, &mut taken, x1, y1, x2, y2, tol)
}

/// Diagonal rescaling witness between two factor chains: diagonals
/// `D_1, ..., D_{L-1}` (as entry vectors) with `X2_ell = D_ell^{-1} X1_ell
/// D_{ell-1}` and identity diagonals at both ends. Entries are nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingChain {
    diagonals: Vec<Vec<Complex64>>,
}

impl ScalingChain {
    pub fn new(diagonals: Vec<Vec<Complex64>>, tol: &TolerancePolicy) -> Result<Self> {
        for (idx, d) in diagonals.iter().enumerate() {
            if d.iter().any(|v| tol.is_zero(v.norm())) {
                return Err(Error::InvalidInput(format!(
                    "scaling diagonal {} has a zero entry",
                    idx + 1
                )));
            }
        }
        Ok(ScalingChain { diagonals })
    }

    /// Inner diagonals `D_1, ..., D_{L-1}`, innermost first.
    pub fn diagonals(&self) -> &[Vec<Complex64>] {
        &self.diagonals
    }
}

/// Find the diagonal rescaling taking `chain1` to `chain2` (both leftmost
/// factor first), if one exists within tolerance.
///
/// With the outermost diagonals pinned to identity, each scale of `D_{ell-1}`
/// is forced by any nonzero entry of factor `ell`, working outermost-in;
/// the remaining entries and the innermost factor are then pure checks.
pub fn chain_scale_equivalent(
    chain1: &[ComplexMatrix],
    chain2: &[ComplexMatrix],
    tol: &TolerancePolicy,
) -> Option<ScalingChain> {
    if chain1.len() != chain2.len() || chain1.is_empty() {
        return None;
    }
    if chain1
        .iter()
        .zip(chain2)
        .any(|(a, b)| a.rows() != b.rows() || a.cols() != b.cols())
    {
        return None;
    }
    let l = chain1.len();
    // left_diag holds D_ell for the factor about to be processed (D_L = I).
    let mut left_diag: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); chain1[0].rows()];
    let mut inner: Vec<Vec<Complex64>> = Vec::with_capacity(l.saturating_sub(1));
    for (j, (f1, f2)) in chain1.iter().zip(chain2).enumerate() {
        // Relation: D_ell * f2 = f1 * D_{ell-1}, entrywise
        // left_diag[k] * f2[k,c] = f1[k,c] * d_c.
        if j + 1 < l {
            let mut d = Vec::with_capacity(f1.cols());
            for c in 1..=f1.cols() {
                let pivot = (1..=f1.rows()).find(|&k| !tol.is_zero(f1.get(k, c).norm()));
                let scale = match pivot {
                    Some(k) => {
                        let s = left_diag[k - 1] * f2.get(k, c) / f1.get(k, c);
                        if tol.is_zero(s.norm()) {
                            return None;
                        }
                        s
                    }
                    None => Complex64::new(1.0, 0.0),
                };
                for k in 1..=f1.rows() {
                    let lhs = left_diag[k - 1] * f2.get(k, c);
                    if !tol.close(lhs, f1.get(k, c) * scale) {
                        return None;
                    }
                }
                d.push(scale);
            }
            inner.push(d.clone());
            left_diag = d;
        } else {
            // Innermost factor: D_0 = I, so D_1 * f2 = f1 exactly.
            for c in 1..=f1.cols() {
                for k in 1..=f1.rows() {
                    let lhs = left_diag[k - 1] * f2.get(k, c);
                    if !tol.close(lhs, f1.get(k, c)) {
                        return None;
                    }
                }
            }
        }
    }
    // Collected outermost-in as D_{L-1}, ..., D_1; expose innermost first.
    inner.reverse();
    ScalingChain::new(inner, tol).ok()
}

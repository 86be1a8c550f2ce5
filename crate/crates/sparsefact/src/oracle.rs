//! Exhaustive certification of support uniqueness.
//!
//! For a matrix `Z` and a column-sparsity family (r rank-one blocks of at
//! most a rows and b columns), the engine enumerates every way of
//! partitioning `supp(Z)` into rank-one rectangles from the family. One
//! canonical partition means the supports of any exact decomposition are
//! forced; several mean a genuine ambiguity; none means the family cannot
//! express the matrix.
//!
//! The search is exact cover over the support cells: branch on the smallest
//! uncovered cell in row-major order and try every rectangle of the family
//! that contains it, using only uncovered cells. Candidate rectangles group
//! rows into proportionality classes over the chosen column set (equal
//! normalized ratios within tolerance) and each surviving block is confirmed
//! rank one by its singular values, so a partition is generated exactly once
//! and every block is certified.

use std::collections::BTreeSet;

use crate::emd::{emd_complete, EmdOutcome};
use crate::mask::SupportMask;
use crate::matrix::{rank_le_one, ComplexMatrix};
use crate::supports::{RankOneSupportTuple, SupportFamilySpec};
use crate::tol::TolerancePolicy;
use crate::{Error, Result};

/// Fail the search after this many branch nodes unless overridden.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// How many canonical partitions the family admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Unique,
    Multiple,
    None,
}

/// Outcome of an exhaustive partition search.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCertificate {
    pub status: CertificateStatus,
    /// All partitions found, canonicalized (supports sorted, empty blocks
    /// padding the tuple to length r) and deduplicated.
    pub partitions: Vec<RankOneSupportTuple>,
}

/// Canonical form of a tuple: supports sorted lexicographically, so tuples
/// differing only by the order of their blocks collapse together.
pub fn canonical_form(tuple: &RankOneSupportTuple) -> RankOneSupportTuple {
    let mut supports: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = (0..tuple.len())
        .map(|i| (tuple.row_set(i).clone(), tuple.col_set(i).clone()))
        .collect();
    supports.sort();
    RankOneSupportTuple::new(tuple.m(), tuple.n(), supports)
        .expect("reordering preserves validity")
}

/// Enumerate all partitions of `supp(z)` into rank-one blocks of the family
/// under the default node budget.
pub fn enumerate_partitions(
    z: &ComplexMatrix,
    fam: &SupportFamilySpec,
    tol: &TolerancePolicy,
) -> Result<PartitionCertificate> {
    enumerate_partitions_with_budget(z, fam, DEFAULT_NODE_BUDGET, tol)
}

/// As [`enumerate_partitions`], with an explicit branch-node budget.
pub fn enumerate_partitions_with_budget(
    z: &ComplexMatrix,
    fam: &SupportFamilySpec,
    budget: u64,
    tol: &TolerancePolicy,
) -> Result<PartitionCertificate> {
    if fam.m != z.rows() || fam.n != z.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix against a {}x{} family",
            z.rows(),
            z.cols(),
            fam.m,
            fam.n
        )));
    }
    if fam.a == 0 || fam.b == 0 {
        return Err(Error::InvalidInput(
            "family block bounds must be at least 1x1".into(),
        ));
    }
    let support = z.support(tol.zero_threshold);
    let mut search = Search {
        z,
        fam,
        tol,
        budget,
        nodes: 0,
        current: Vec::new(),
        found: BTreeSet::new(),
    };
    let mut uncovered: BTreeSet<(usize, usize)> = support.iter().collect();
    search.explore(&mut uncovered, 0)?;
    let partitions: Vec<RankOneSupportTuple> = search
        .found
        .into_iter()
        .map(|blocks| {
            let mut padded = blocks;
            while padded.len() < fam.r {
                padded.push((BTreeSet::new(), BTreeSet::new()));
            }
            padded.sort();
            RankOneSupportTuple::new(fam.m, fam.n, padded).expect("blocks lie in bounds")
        })
        .collect();
    let status = match partitions.len() {
        0 => CertificateStatus::None,
        1 => CertificateStatus::Unique,
        _ => CertificateStatus::Multiple,
    };
    Ok(PartitionCertificate { status, partitions })
}

struct Search<'a> {
    z: &'a ComplexMatrix,
    fam: &'a SupportFamilySpec,
    tol: &'a TolerancePolicy,
    budget: u64,
    nodes: u64,
    current: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
    found: BTreeSet<Vec<(BTreeSet<usize>, BTreeSet<usize>)>>,
}

impl Search<'_> {
    fn explore(&mut self, uncovered: &mut BTreeSet<(usize, usize)>, used: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        if uncovered.is_empty() {
            let mut blocks = self.current.clone();
            blocks.sort();
            self.found.insert(blocks);
            return Ok(());
        }
        let capacity = (self.fam.r - used) * self.fam.a * self.fam.b;
        if used == self.fam.r || uncovered.len() > capacity {
            return Ok(());
        }
        let &(k0, l0) = uncovered.iter().next().expect("nonempty");
        for (rows, cols) in self.candidates(k0, l0, uncovered) {
            let cells: Vec<(usize, usize)> = rows
                .iter()
                .flat_map(|&k| cols.iter().map(move |&l| (k, l)))
                .collect();
            for cell in &cells {
                uncovered.remove(cell);
            }
            self.current.push((rows, cols));
            let result = self.explore(uncovered, used + 1);
            self.current.pop();
            for cell in cells {
                uncovered.insert(cell);
            }
            result?;
        }
        Ok(())
    }

    /// Rank-one rectangles of the family containing `(k0, l0)` whose cells
    /// are all uncovered. Column sets extend `{l0}`, row sets extend `{k0}`
    /// within the proportionality class of row `k0` over the columns.
    fn candidates(
        &self,
        k0: usize,
        l0: usize,
        uncovered: &BTreeSet<(usize, usize)>,
    ) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
        let extra_cols: Vec<usize> = (1..=self.fam.n)
            .filter(|&l| l != l0 && uncovered.contains(&(k0, l)))
            .collect();
        let mut out = Vec::new();
        for cset in subsets_up_to(&extra_cols, self.fam.b - 1) {
            let mut cols: BTreeSet<usize> = cset.into_iter().collect();
            cols.insert(l0);
            let compatible: Vec<usize> = (1..=self.fam.m)
                .filter(|&k| {
                    k != k0
                        && cols.iter().all(|&l| uncovered.contains(&(k, l)))
                        && self.proportional(k0, k, &cols)
                })
                .collect();
            for rset in subsets_up_to(&compatible, self.fam.a - 1) {
                let mut rows: BTreeSet<usize> = rset.into_iter().collect();
                rows.insert(k0);
                let mask = SupportMask::rectangle(
                    self.fam.m,
                    self.fam.n,
                    rows.iter().copied(),
                    cols.iter().copied(),
                )
                .expect("in bounds");
                if rank_le_one(self.z, &mask, self.tol).unwrap_or(false) {
                    out.push((rows, cols.clone()));
                }
            }
        }
        out
    }

    /// Rows `k0` and `k` proportional over `cols`: all 2x2 minors against
    /// the reference column vanish within tolerance.
    fn proportional(&self, k0: usize, k: usize, cols: &BTreeSet<usize>) -> bool {
        let lr = *cols.iter().next().expect("nonempty column set");
        cols.iter().all(|&l| {
            self.tol.close(
                self.z.get(k, l) * self.z.get(k0, lr),
                self.z.get(k, lr) * self.z.get(k0, l),
            )
        })
    }
}

/// All subsets of `items` with at most `max_len` elements, smallest first,
/// lexicographic within each size.
fn subsets_up_to(items: &[usize], max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for subset in &frontier {
            let start = subset
                .last()
                .map(|&v| items.iter().position(|&x| x == v).expect("member") + 1)
                .unwrap_or(0);
            for &item in &items[start..] {
                let mut grown = subset.clone();
                grown.push(item);
                next.push(grown);
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// True iff all pairwise intersections of the tuple's supports are empty.
pub fn supports_pairwise_disjoint(supports: &RankOneSupportTuple) -> bool {
    supports.pairwise_disjoint()
}

/// Structural predicate satisfied by the cosine and sine transform
/// partitions: every nonempty block has rows of a single parity and exactly
/// two columns `l1 < l2` with `l1 + l2 - 1 = n`.
pub fn verify_parity_column_structure(cert: &PartitionCertificate, n: usize) -> Result<bool> {
    if cert.partitions.is_empty() {
        return Err(Error::InvalidInput(
            "certificate carries no partitions".into(),
        ));
    }
    for partition in &cert.partitions {
        if partition.m() != n || partition.n() != n {
            return Err(Error::InvalidInput(format!(
                "certificate over a {}x{} grid checked against size {n}",
                partition.m(),
                partition.n()
            )));
        }
        for i in 0..partition.len() {
            let rows = partition.row_set(i);
            let cols = partition.col_set(i);
            if rows.is_empty() {
                continue;
            }
            let parity = rows.iter().next().expect("nonempty") % 2;
            if rows.iter().any(|k| k % 2 != parity) {
                return Ok(false);
            }
            if cols.len() != 2 {
                return Ok(false);
            }
            let sum: usize = cols.iter().sum();
            if sum != n + 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// End-to-end uniqueness check for a dense-as-possible matrix: the support
/// count must saturate the family (so any feasible decomposition uses
/// disjoint full blocks), the partition of the support must be unique, and
/// completion on that partition must determine every entry.
pub fn cross_check_uniqueness(
    z: &ComplexMatrix,
    fam: &SupportFamilySpec,
    tol: &TolerancePolicy,
) -> Result<bool> {
    if z.support(tol.zero_threshold).len() != fam.r * fam.a * fam.b {
        return Ok(false);
    }
    let cert = enumerate_partitions(z, fam, tol)?;
    if cert.status != CertificateStatus::Unique {
        return Ok(false);
    }
    let tuple = &cert.partitions[0];
    if !tuple.pairwise_disjoint() {
        return Ok(false);
    }
    Ok(matches!(
        emd_complete(z, tuple, tol)?,
        EmdOutcome::Complete(_)
    ))
}

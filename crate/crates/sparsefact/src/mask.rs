use std::collections::BTreeSet;

use crate::perm::Permutation;
use crate::{Error, Result};

/// Binary sparsity pattern over an `rows x cols` grid.
///
/// Stored as a sorted set of 1-based `(row, col)` index pairs; the binary
/// matrix view and the index-set view are interchangeable via
/// [`SupportMask::from_binary`] and [`SupportMask::to_binary`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportMask {
    rows: usize,
    cols: usize,
    ones: BTreeSet<(usize, usize)>,
}

impl SupportMask {
    /// Empty mask of the given shape.
    pub fn empty(rows: usize, cols: usize) -> Self {
        SupportMask {
            rows,
            cols,
            ones: BTreeSet::new(),
        }
    }

    /// Mask with every cell set.
    pub fn full(rows: usize, cols: usize) -> Self {
        let ones = (1..=rows)
            .flat_map(|k| (1..=cols).map(move |l| (k, l)))
            .collect();
        SupportMask { rows, cols, ones }
    }

    /// Identity pattern on an `n x n` grid.
    pub fn identity(n: usize) -> Self {
        SupportMask {
            rows: n,
            cols: n,
            ones: (1..=n).map(|k| (k, k)).collect(),
        }
    }

    /// Mask from 1-based `(row, col)` pairs, validating bounds.
    pub fn from_indices<I>(rows: usize, cols: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut ones = BTreeSet::new();
        for (k, l) in indices {
            if k == 0 || l == 0 || k > rows || l > cols {
                return Err(Error::IndexOutOfBounds {
                    row: k,
                    col: l,
                    rows,
                    cols,
                });
            }
            ones.insert((k, l));
        }
        Ok(SupportMask { rows, cols, ones })
    }

    /// Mask from a row-major boolean view.
    pub fn from_binary(rows: usize, cols: usize, cells: &[bool]) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "binary view has {} cells, expected {}",
                cells.len(),
                rows * cols
            )));
        }
        let ones = cells
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(idx, _)| (idx / cols + 1, idx % cols + 1))
            .collect();
        Ok(SupportMask { rows, cols, ones })
    }

    /// Row-major boolean view.
    pub fn to_binary(&self) -> Vec<bool> {
        let mut cells = vec![false; self.rows * self.cols];
        for &(k, l) in &self.ones {
            cells[(k - 1) * self.cols + (l - 1)] = true;
        }
        cells
    }

    /// Product-set mask `row_set x col_set`.
    pub fn rectangle<R, C>(rows: usize, cols: usize, row_set: R, col_set: C) -> Result<Self>
    where
        R: IntoIterator<Item = usize>,
        C: IntoIterator<Item = usize>,
    {
        let rs: Vec<usize> = row_set.into_iter().collect();
        let cs: Vec<usize> = col_set.into_iter().collect();
        Self::from_indices(
            rows,
            cols,
            rs.iter().flat_map(|&k| cs.iter().map(move |&l| (k, l))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of set cells.
    pub fn len(&self) -> usize {
        self.ones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ones.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.ones.contains(&(row, col))
    }

    pub fn insert(&mut self, row: usize, col: usize) -> Result<()> {
        if row == 0 || col == 0 || row > self.rows || col > self.cols {
            return Err(Error::IndexOutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.ones.insert((row, col));
        Ok(())
    }

    /// Sorted iteration over set cells.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ones.iter().copied()
    }

    /// Row indices that carry at least one set cell.
    pub fn row_support(&self) -> BTreeSet<usize> {
        self.ones.iter().map(|&(k, _)| k).collect()
    }

    /// Column indices that carry at least one set cell.
    pub fn col_support(&self) -> BTreeSet<usize> {
        self.ones.iter().map(|&(_, l)| l).collect()
    }

    /// Rows set in column `col`.
    pub fn column(&self, col: usize) -> BTreeSet<usize> {
        self.ones
            .iter()
            .filter(|&&(_, l)| l == col)
            .map(|&(k, _)| k)
            .collect()
    }

    /// Count of set cells in column `col`.
    pub fn column_count(&self, col: usize) -> usize {
        self.ones.iter().filter(|&&(_, l)| l == col).count()
    }

    /// True when the pattern is a product set `row_support x col_support`.
    pub fn is_rank_one(&self) -> bool {
        self.ones.len() == self.row_support().len() * self.col_support().len()
    }

    pub fn union(&self, other: &SupportMask) -> Result<SupportMask> {
        self.check_shape(other)?;
        Ok(SupportMask {
            rows: self.rows,
            cols: self.cols,
            ones: self.ones.union(&other.ones).copied().collect(),
        })
    }

    pub fn intersection(&self, other: &SupportMask) -> Result<SupportMask> {
        self.check_shape(other)?;
        Ok(SupportMask {
            rows: self.rows,
            cols: self.cols,
            ones: self.ones.intersection(&other.ones).copied().collect(),
        })
    }

    pub fn difference(&self, other: &SupportMask) -> Result<SupportMask> {
        self.check_shape(other)?;
        Ok(SupportMask {
            rows: self.rows,
            cols: self.cols,
            ones: self.ones.difference(&other.ones).copied().collect(),
        })
    }

    pub fn is_disjoint(&self, other: &SupportMask) -> bool {
        self.ones.is_disjoint(&other.ones)
    }

    pub fn is_subset(&self, other: &SupportMask) -> bool {
        self.ones.is_subset(&other.ones)
    }

    /// Kronecker product of patterns: cell `(i,j)` of `self` expands into a
    /// copy of `other` at block `(i,j)`.
    pub fn kronecker(&self, other: &SupportMask) -> SupportMask {
        let mut ones = BTreeSet::new();
        for &(i, j) in &self.ones {
            for &(k, l) in &other.ones {
                ones.insert(((i - 1) * other.rows + k, (j - 1) * other.cols + l));
            }
        }
        SupportMask {
            rows: self.rows * other.rows,
            cols: self.cols * other.cols,
            ones,
        }
    }

    pub fn transpose(&self) -> SupportMask {
        SupportMask {
            rows: self.cols,
            cols: self.rows,
            ones: self.ones.iter().map(|&(k, l)| (l, k)).collect(),
        }
    }

    /// Right-multiplication by the permutation matrix of `perm`: column `j`
    /// of the result is column `perm(j)` of `self`.
    pub fn permute_cols(&self, perm: &Permutation) -> Result<SupportMask> {
        if perm.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "permutation of size {} applied to {} columns",
                perm.len(),
                self.cols
            )));
        }
        let inv = perm.inverse();
        Ok(SupportMask {
            rows: self.rows,
            cols: self.cols,
            ones: self.ones.iter().map(|&(k, l)| (k, inv.image_of(l))).collect(),
        })
    }

    /// Left-multiplication by the permutation matrix of `perm`: row `perm(i)`
    /// of the result is row `i` of `self`.
    pub fn permute_rows(&self, perm: &Permutation) -> Result<SupportMask> {
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "permutation of size {} applied to {} rows",
                perm.len(),
                self.rows
            )));
        }
        Ok(SupportMask {
            rows: self.rows,
            cols: self.cols,
            ones: self.ones.iter().map(|&(k, l)| (perm.image_of(k), l)).collect(),
        })
    }

    fn check_shape(&self, other: &SupportMask) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mask combined with {}x{} mask",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

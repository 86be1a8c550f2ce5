use num_complex::Complex64;

use crate::mask::SupportMask;
use crate::perm::Permutation;
use crate::tol::TolerancePolicy;
use crate::{Error, Result};

/// Dense complex matrix, row-major storage, 1-based public indices.
///
/// All entries are finite; constructors reject NaN and infinity so that
/// downstream zero-skipping products and tolerance checks stay meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            m.set(k, k, Complex64::new(1.0, 0.0)).expect("in bounds");
        }
        m
    }

    /// Build from a row-major entry vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        let m = ComplexMatrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Build from nested complex rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    /// Build from nested real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Build entrywise from a function of 1-based `(row, col)`.
    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut data = Vec::with_capacity(rows * cols);
        for k in 1..=rows {
            for l in 1..=cols {
                data.push(f(k, l));
            }
        }
        Self::from_vec(rows, cols, data)
    }

    fn check_finite(&self) -> Result<()> {
        for (idx, z) in self.data.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFiniteEntry {
                    row: idx / self.cols + 1,
                    col: idx % self.cols + 1,
                });
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn bounds(&self, row: usize, col: usize) -> Result<usize> {
        if row == 0 || col == 0 || row > self.rows || col > self.cols {
            return Err(Error::IndexOutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((row - 1) * self.cols + (col - 1))
    }

    /// 1-based entry access.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row - 1) * self.cols + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) -> Result<()> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFiniteEntry { row, col });
        }
        let idx = self.bounds(row, col)?;
        self.data[idx] = value;
        Ok(())
    }

    pub fn row_slice(&self, row: usize) -> &[Complex64] {
        &self.data[(row - 1) * self.cols..row * self.cols]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Column `col` as a vector.
    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (1..=self.rows).map(|k| self.get(k, col)).collect()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sparsity pattern of entries with magnitude above `zero_threshold`.
    pub fn support(&self, zero_threshold: f64) -> SupportMask {
        SupportMask::from_indices(
            self.rows,
            self.cols,
            self.data.iter().enumerate().filter_map(|(idx, z)| {
                (z.norm() > zero_threshold).then_some((idx / self.cols + 1, idx % self.cols + 1))
            }),
        )
        .expect("enumerated indices stay in bounds")
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for k in 1..=self.rows {
            for l in 1..=self.cols {
                out.data[(l - 1) * self.rows + (k - 1)] = self.get(k, l);
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} combined with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Matrix product. Skips exactly-zero left entries, so products against
    /// butterfly-sparse factors cost `nnz * cols` instead of `rows * inner * cols`.
    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product.
    pub fn kronecker(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                let a = self.get(i, j);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 1..=other.rows {
                    for l in 1..=other.cols {
                        let idx = ((i - 1) * other.rows + k - 1) * out.cols
                            + (j - 1) * other.cols
                            + (l - 1);
                        out.data[idx] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// Right-multiplication by the permutation matrix of `perm`: column `j`
    /// of the result is column `perm(j)` of `self`.
    pub fn permute_cols(&self, perm: &Permutation) -> Result<ComplexMatrix> {
        if perm.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "permutation of size {} applied to {} columns",
                perm.len(),
                self.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for j in 1..=self.cols {
            let src = perm.image_of(j);
            for k in 1..=self.rows {
                out.data[(k - 1) * self.cols + (j - 1)] = self.get(k, src);
            }
        }
        Ok(out)
    }

    /// Left-multiplication by the permutation matrix of `perm`: row `i` of
    /// `self` lands on row `perm(i)` of the result.
    pub fn permute_rows(&self, perm: &Permutation) -> Result<ComplexMatrix> {
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "permutation of size {} applied to {} rows",
                perm.len(),
                self.rows
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 1..=self.rows {
            let dest = perm.image_of(i);
            out.data[(dest - 1) * self.cols..dest * self.cols]
                .copy_from_slice(self.row_slice(i));
        }
        Ok(out)
    }

    /// Keep entries inside the mask, zero the rest.
    pub fn restrict(&self, mask: &SupportMask) -> Result<ComplexMatrix> {
        if mask.rows() != self.rows || mask.cols() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mask applied to {}x{} matrix",
                mask.rows(),
                mask.cols(),
                self.rows,
                self.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (k, l) in mask.iter() {
            out.data[(k - 1) * self.cols + (l - 1)] = self.get(k, l);
        }
        Ok(out)
    }

    /// Dense submatrix over the mask's row and column supports, with entries
    /// outside the mask (but inside the bounding rectangle) set to zero.
    pub fn restricted_block(&self, mask: &SupportMask) -> Result<ComplexMatrix> {
        if mask.rows() != self.rows || mask.cols() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mask applied to {}x{} matrix",
                mask.rows(),
                mask.cols(),
                self.rows,
                self.cols
            )));
        }
        let row_set: Vec<usize> = mask.row_support().into_iter().collect();
        let col_set: Vec<usize> = mask.col_support().into_iter().collect();
        let mut out = ComplexMatrix::zeros(row_set.len(), col_set.len());
        for (bi, &k) in row_set.iter().enumerate() {
            for (bj, &l) in col_set.iter().enumerate() {
                if mask.contains(k, l) {
                    out.data[bi * col_set.len() + bj] = self.get(k, l);
                }
            }
        }
        Ok(out)
    }

    /// 0/1 matrix realizing a sparsity pattern.
    pub fn from_mask_pattern(mask: &SupportMask) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(mask.rows(), mask.cols());
        for (k, l) in mask.iter() {
            out.data[(k - 1) * out.cols + (l - 1)] = Complex64::new(1.0, 0.0);
        }
        out
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let na = nalgebra::DMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().copied(),
        );
        let mut sv: Vec<f64> = na.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
        sv
    }

    /// Closest rank-one matrix in Frobenius norm (leading singular triple).
    pub fn best_rank_one(&self) -> ComplexMatrix {
        if self.rows == 0 || self.cols == 0 {
            return self.clone();
        }
        let na = nalgebra::DMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().copied(),
        );
        let svd = na.svd(true, true);
        let u = svd.u.expect("u requested");
        let vt = svd.v_t.expect("v_t requested");
        let (lead, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &s)| {
                if s > best.1 {
                    (i, s)
                } else {
                    best
                }
            });
        let sigma = svd.singular_values[lead];
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for k in 0..self.rows {
            for l in 0..self.cols {
                out.data[k * self.cols + l] = u[(k, lead)] * vt[(lead, l)] * sigma;
            }
        }
        out
    }
}

/// Product of a chain of factors, leftmost first, multiplied right to left so
/// that each step keeps a sparse factor on the left of the pairwise product.
pub fn chain_product(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let last = factors
        .last()
        .ok_or_else(|| Error::InvalidInput("empty factor chain".into()))?;
    let mut acc = last.clone();
    for f in factors[..factors.len() - 1].iter().rev() {
        acc = f.mul(&acc)?;
    }
    Ok(acc)
}

/// Rank-at-most-one test on the restriction of `m` to `mask`: true iff the
/// second singular value of the restricted dense block is at most
/// `relative_tolerance` times the first (a zero block counts as rank 0).
pub fn rank_le_one(m: &ComplexMatrix, mask: &SupportMask, tol: &TolerancePolicy) -> Result<bool> {
    let block = m.restricted_block(mask)?;
    let sv = block.singular_values();
    if sv.is_empty() || sv[0] == 0.0 {
        return Ok(true);
    }
    Ok(sv.len() < 2 || sv[1] <= tol.relative_tolerance * sv[0])
}

/// Relative Frobenius distance `|A - B|_F / max(|B|_F, zero_threshold)`.
pub fn rel_frobenius_error(a: &ComplexMatrix, b: &ComplexMatrix, tol: &TolerancePolicy) -> Result<f64> {
    let diff = a.sub(b)?;
    Ok(diff.frobenius_norm() / b.frobenius_norm().max(tol.zero_threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ComplexMatrix::from_real_rows(&[vec![1.0, f64::NAN]]).is_err());
        assert!(ComplexMatrix::from_real_rows(&[vec![1.0, f64::INFINITY]]).is_err());
        let mut m = ComplexMatrix::zeros(1, 1);
        assert!(m.set(1, 1, c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn complex_svd_is_trustworthy() {
        // 2x2 with known singular values sqrt(2) (twice): columns (1, i) and (1, -i).
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let sv = m.singular_values();
        assert!((sv[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!((sv[1] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rank_checks_on_restricted_blocks() {
        let tol = TolerancePolicy::default();
        let m = ComplexMatrix::from_real_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![2.0, 4.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ])
        .unwrap();
        let rect = SupportMask::rectangle(3, 3, [1, 2], [1, 2]).unwrap();
        assert!(rank_le_one(&m, &rect, &tol).unwrap());
        let all = SupportMask::full(3, 3);
        assert!(!rank_le_one(&m, &all, &tol).unwrap());
        let empty = SupportMask::empty(3, 3);
        assert!(rank_le_one(&m, &empty, &tol).unwrap());
    }

    #[test]
    fn best_rank_one_reproduces_rank_one_input() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 2.0)],
            vec![c(3.0, 3.0), c(6.0, 6.0)],
        ])
        .unwrap();
        let approx = m.best_rank_one();
        let tol = TolerancePolicy::default();
        assert!(rel_frobenius_error(&approx, &m, &tol).unwrap() < 1e-12);
    }

    #[test]
    fn zero_skipping_product_matches_reference() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let b = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, 4.0)],
            vec![c(5.0, 6.0), c(7.0, 8.0)],
        ])
        .unwrap();
        let got = a.mul(&b).unwrap();
        assert_eq!(got.get(1, 1), c(1.0, 2.0));
        assert_eq!(got.get(2, 2), c(14.0, 16.0));
    }

    #[test]
    fn permute_cols_gathers_sources() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let p = Permutation::from_image(vec![2, 3, 1]).unwrap();
        // Column j of m*P is column p(j) of m.
        let got = m.permute_cols(&p).unwrap();
        assert_eq!(got.get(1, 1).re, 2.0);
        assert_eq!(got.get(1, 2).re, 3.0);
        assert_eq!(got.get(1, 3).re, 1.0);
        // Consistency with the permutation matrix itself.
        let via_matrix = m
            .mul(&ComplexMatrix::from_mask_pattern(&p.to_mask()))
            .unwrap();
        assert_eq!(got, via_matrix);
    }

    #[test]
    fn kronecker_is_associative() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(-0.5, 0.0)]]).unwrap();
        let b = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)], vec![c(3.0, -1.0)]]).unwrap();
        let d = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, -2.0)],
            vec![c(1.0, 1.0), c(-1.0, 1.0)],
        ])
        .unwrap();
        let left = a.kronecker(&b).kronecker(&d);
        let right = a.kronecker(&b.kronecker(&d));
        let tol = TolerancePolicy::default();
        assert!(rel_frobenius_error(&left, &right, &tol).unwrap() < 1e-14);
    }

    proptest! {
        #[test]
        fn kronecker_mixed_product(ar in 1usize..3, ac in 1usize..3, br in 1usize..3, bc in 1usize..3, seed in any::<u64>()) {
            // (A kron B)(C kron D) = (AC) kron (BD) with conforming shapes.
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            };
            let mut gen = |r: usize, cdim: usize| {
                ComplexMatrix::from_fn(r, cdim, |_, _| Complex64::new(next(), next())).unwrap()
            };
            let a = gen(ar, ac);
            let b = gen(br, bc);
            let cm = gen(ac, 2);
            let d = gen(bc, 2);
            let lhs = a.kronecker(&b).mul(&cm.kronecker(&d)).unwrap();
            let rhs = a.mul(&cm).unwrap().kronecker(&b.mul(&d).unwrap());
            let tol = TolerancePolicy::default();
            prop_assert!(rel_frobenius_error(&lhs, &rhs, &tol).unwrap() < 1e-12);
        }
    }
}

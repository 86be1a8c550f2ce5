//! Hierarchical butterfly factorization.
//!
//! A product of butterfly-supported factors is peeled apart two at a time: a
//! partitioning tree picks a split index, the two-factor supports at that
//! split lift to pairwise disjoint rank-one rectangles, each rectangle of the
//! product is a rank-one block that splits into one column of each half, and
//! the halves recurse. Any tree shape recovers the same chain up to diagonal
//! rescaling.

use crate::emd::{contributions_to_factors, emd_complete, ContributionTuple, EmdOutcome};
use crate::emd::{chain_scale_equivalent, ScalingChain};
use crate::mask::SupportMask;
use crate::matrix::{rel_frobenius_error, ComplexMatrix};
use crate::supports::{butterfly_support, lift_supports, partial_product_support};
use crate::tol::TolerancePolicy;
use crate::transforms::bit_reversal_perm;
use crate::{Error, Result};

/// Node of a partitioning tree: a leaf holds one layer index, an internal
/// node splits its range with the larger indices on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(usize),
    Internal(Box<TreeNode>, Box<TreeNode>),
}

impl TreeNode {
    /// Validate the partitioning axioms below this node and return its
    /// range: every node covers a consecutive range, children partition the
    /// parent, and the left child's indices all exceed the right child's.
    fn validated_range(&self) -> Result<(usize, usize)> {
        match self {
            TreeNode::Leaf(i) => {
                if *i == 0 {
                    return Err(Error::InvalidTree("layer indices start at 1".into()));
                }
                Ok((*i, *i))
            }
            TreeNode::Internal(left, right) => {
                let (lmin, lmax) = left.validated_range()?;
                let (rmin, rmax) = right.validated_range()?;
                if lmin != rmax + 1 {
                    return Err(Error::InvalidTree(format!(
                        "children {{{rmin}..{rmax}}} and {{{lmin}..{lmax}}} do not split \
                         a consecutive range with the larger indices on the left"
                    )));
                }
                Ok((rmin, lmax))
            }
        }
    }
}

/// Binary tree over a consecutive range of layer indices steering the order
/// in which a factor chain is split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitioningTree {
    root: TreeNode,
    min: usize,
    max: usize,
}

/// Ready-made tree shapes plus fully explicit descriptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSpec {
    /// Splits off the innermost layer at every step; the right child of each
    /// internal node is a singleton.
    LeftComb,
    /// Splits off the outermost layer at every step.
    RightComb,
    /// Splits each range at its midpoint.
    Balanced,
    /// Caller-supplied shape, checked against all axioms.
    Explicit(TreeNode),
}

/// Build a validated partitioning tree over `{p..q}`.
pub fn make_tree(spec: TreeSpec, p: usize, q: usize) -> Result<PartitioningTree> {
    if p == 0 || p > q {
        return Err(Error::InvalidTree(format!(
            "range {{{p}..{q}}} is not a nonempty 1-based range"
        )));
    }
    let root = match spec {
        TreeSpec::LeftComb => comb_or_balanced(p, q, |lo, _| lo),
        TreeSpec::RightComb => comb_or_balanced(p, q, |_, hi| hi - 1),
        TreeSpec::Balanced => comb_or_balanced(p, q, |lo, hi| (lo + hi) / 2),
        TreeSpec::Explicit(node) => node,
    };
    let range = root.validated_range()?;
    if range != (p, q) {
        return Err(Error::InvalidTree(format!(
            "tree covers {{{}..{}}}, expected {{{p}..{q}}}",
            range.0, range.1
        )));
    }
    Ok(PartitioningTree {
        root,
        min: p,
        max: q,
    })
}

fn comb_or_balanced(p: usize, q: usize, split: fn(usize, usize) -> usize) -> TreeNode {
    if p == q {
        return TreeNode::Leaf(p);
    }
    let ell = split(p, q);
    TreeNode::Internal(
        Box::new(comb_or_balanced(ell + 1, q, split)),
        Box::new(comb_or_balanced(p, ell, split)),
    )
}

impl PartitioningTree {
    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Covered range `(p, q)`.
    pub fn range(&self) -> (usize, usize) {
        (self.min, self.max)
    }

    pub fn layer_count(&self) -> usize {
        self.max - self.min + 1
    }
}

/// Block extraction mode at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorizeMode {
    /// Copy each rank-one block verbatim; blocks failing the rank test are
    /// an error (the input is not a product of the support model).
    Exact,
    /// Replace each block by its best rank-one approximation; tolerates
    /// inputs near, but not in, the model.
    SvdProject,
}

/// A chain of factors, leftmost first, with the support each factor is
/// declared to live on and the relative product error recorded at each
/// split level.
#[derive(Debug, Clone)]
pub struct FactorChain {
    factors: Vec<ComplexMatrix>,
    supports: Vec<SupportMask>,
    residuals: Vec<(usize, f64)>,
}

impl FactorChain {
    pub fn new(factors: Vec<ComplexMatrix>, supports: Vec<SupportMask>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("empty factor chain".into()));
        }
        if factors.len() != supports.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors with {} declared supports",
                factors.len(),
                supports.len()
            )));
        }
        for (f, s) in factors.iter().zip(&supports) {
            if f.rows() != s.rows() || f.cols() != s.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} factor declared on a {}x{} support",
                    f.rows(),
                    f.cols(),
                    s.rows(),
                    s.cols()
                )));
            }
        }
        for pair in factors.windows(2) {
            if pair[0].cols() != pair[1].rows() {
                return Err(Error::DimensionMismatch(format!(
                    "adjacent factors {}x{} and {}x{} do not conform",
                    pair[0].rows(),
                    pair[0].cols(),
                    pair[1].rows(),
                    pair[1].cols()
                )));
            }
        }
        Ok(FactorChain {
            factors,
            supports,
            residuals: Vec::new(),
        })
    }

    /// Factors, leftmost (outermost) first.
    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    /// Declared supports, aligned with `factors`.
    pub fn supports(&self) -> &[SupportMask] {
        &self.supports
    }

    /// Relative product error per split index, innermost split first.
    pub fn residuals(&self) -> &[(usize, f64)] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn product(&self) -> Result<ComplexMatrix> {
        crate::matrix::chain_product(&self.factors)
    }

    /// True iff every factor vanishes outside its declared support.
    pub fn supports_respected(&self, tol: &TolerancePolicy) -> bool {
        self.factors
            .iter()
            .zip(&self.supports)
            .all(|(f, s)| f.support(tol.zero_threshold).is_subset(s))
    }
}

/// Declared support of layer `ell` in a chain of `layers` layers; with
/// `fold_bit_reversal`, layer 1 is column-permuted by the bit reversal.
fn declared_support(ell: usize, layers: usize, fold_bit_reversal: bool) -> Result<SupportMask> {
    let base = butterfly_support(ell, layers)?;
    if fold_bit_reversal && ell == 1 {
        base.permute_cols(&bit_reversal_perm(1 << layers)?)
    } else {
        Ok(base)
    }
}

/// Support of the product of layers `p..=q`, bit-reversal folded in when it
/// reaches layer 1.
fn product_support(
    q: usize,
    p: usize,
    layers: usize,
    fold_bit_reversal: bool,
) -> Result<SupportMask> {
    let base = partial_product_support(q, p, layers)?;
    if fold_bit_reversal && p == 1 {
        base.permute_cols(&bit_reversal_perm(1 << layers)?)
    } else {
        Ok(base)
    }
}

/// Recover the butterfly factors of `z` following `tree`.
///
/// `z` must be `N x N` with `N = 2^layers` and `tree` must cover a subrange
/// of `{1..layers}`; `z` is then expected to be the product of the covered
/// layers (exactly in `Exact` mode, approximately in `SvdProject` mode).
/// With `fold_bit_reversal`, the innermost support is taken column-permuted
/// by the bit reversal, so `z` may be a scaled fast transform itself rather
/// than its de-permuted form.
pub fn hierarchical_factorize(
    z: &ComplexMatrix,
    tree: &PartitioningTree,
    layers: usize,
    mode: FactorizeMode,
    fold_bit_reversal: bool,
    tol: &TolerancePolicy,
) -> Result<FactorChain> {
    let n = 1usize
        .checked_shl(layers as u32)
        .ok_or(Error::NotPowerOfTwo(0))?;
    if layers == 0 {
        return Err(Error::LayerOutOfRange { ell: 0, layers });
    }
    if z.rows() != n || z.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} input for {layers} layers; expected {n}x{n}",
            z.rows(),
            z.cols()
        )));
    }
    let (p, q) = tree.range();
    if q > layers {
        return Err(Error::LayerOutOfRange { ell: q, layers });
    }
    let mut leaves: Vec<(usize, ComplexMatrix)> = Vec::with_capacity(q - p + 1);
    let mut residuals: Vec<(usize, f64)> = Vec::new();
    split_node(
        z,
        tree.root(),
        layers,
        mode,
        fold_bit_reversal,
        tol,
        &mut leaves,
        &mut residuals,
    )?;
    leaves.sort_by(|a, b| b.0.cmp(&a.0));
    residuals.sort_by_key(|&(ell, _)| ell);
    let supports = leaves
        .iter()
        .map(|&(ell, _)| declared_support(ell, layers, fold_bit_reversal))
        .collect::<Result<Vec<_>>>()?;
    let factors = leaves.into_iter().map(|(_, f)| f).collect();
    let mut chain = FactorChain::new(factors, supports)?;
    chain.residuals = residuals;
    Ok(chain)
}

#[allow(clippy::too_many_arguments)]
fn split_node(
    z: &ComplexMatrix,
    node: &TreeNode,
    layers: usize,
    mode: FactorizeMode,
    fold_bit_reversal: bool,
    tol: &TolerancePolicy,
    leaves: &mut Vec<(usize, ComplexMatrix)>,
    residuals: &mut Vec<(usize, f64)>,
) -> Result<()> {
    let (left, right) = match node {
        TreeNode::Leaf(ell) => {
            leaves.push((*ell, z.clone()));
            return Ok(());
        }
        TreeNode::Internal(left, right) => (left, right),
    };
    let (p, _) = right.validated_range()?;
    let (_, q) = left.validated_range()?;
    let ell = right.validated_range()?.1;

    let s_left = product_support(q, ell + 1, layers, false)?;
    let s_right = product_support(ell, p, layers, fold_bit_reversal)?;
    // The lift takes column supports of the transposed right half.
    let lifted = lift_supports(&s_left, &s_right.transpose())?;

    let contributions = match mode {
        FactorizeMode::Exact => match emd_complete(z, &lifted, tol)? {
            EmdOutcome::Complete(tuple) => tuple,
            EmdOutcome::Incompatible { row, col } => {
                return Err(Error::InvalidSupport(format!(
                    "entry ({row},{col}) of the block product lies outside the \
                     support of layers {p}..{q}"
                )));
            }
            // Disjoint lifts leave nothing contested, so the loop cannot
            // stall; guard anyway.
            EmdOutcome::Stalled(_) => {
                return Err(Error::InvalidSupport(format!(
                    "completion stalled splitting layers {p}..{q} at {ell}"
                )));
            }
        },
        FactorizeMode::SvdProject => {
            let mut terms = Vec::with_capacity(lifted.len());
            for i in 0..lifted.len() {
                terms.push(projected_block(z, &lifted.mask(i))?);
            }
            ContributionTuple::from_matrices(&lifted, &terms)?
        }
    };

    let (x, y) = contributions_to_factors(&contributions, tol)?;
    let h2 = x;
    let h1 = y.transpose();
    let product = h2.mul(&h1)?;
    residuals.push((ell, rel_frobenius_error(&product, z, tol)?));

    split_node(&h2, left, layers, mode, fold_bit_reversal, tol, leaves, residuals)?;
    split_node(&h1, right, layers, mode, fold_bit_reversal, tol, leaves, residuals)
}

/// Best rank-one approximation of `z` on the cells of `mask`, embedded back
/// at those cells of a zero matrix.
fn projected_block(z: &ComplexMatrix, mask: &SupportMask) -> Result<ComplexMatrix> {
    let block = z.restricted_block(mask)?;
    let approx = block.best_rank_one();
    let row_set: Vec<usize> = mask.row_support().into_iter().collect();
    let col_set: Vec<usize> = mask.col_support().into_iter().collect();
    let mut out = ComplexMatrix::zeros(z.rows(), z.cols());
    for (bi, &k) in row_set.iter().enumerate() {
        for (bj, &l) in col_set.iter().enumerate() {
            if mask.contains(k, l) {
                out.set(k, l, approx.get(bi + 1, bj + 1))?;
            }
        }
    }
    Ok(out)
}

/// Diagonal rescaling witness between an original chain and a recovered one,
/// or `None` when they are not scale-equivalent.
pub fn verify_s_unique_recovery(
    original: &FactorChain,
    recovered: &FactorChain,
    tol: &TolerancePolicy,
) -> Option<ScalingChain> {
    chain_scale_equivalent(original.factors(), recovered.factors(), tol)
}

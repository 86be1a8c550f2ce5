//! Rank-one support tuples and the closability test.
//!
//! A tuple of rank-one supports assigns each term of a rank-`r` decomposition
//! a rectangle `row_set x col_set` it must live in. Whether a matrix `Z`
//! determines the terms uniquely is a purely combinatorial question about the
//! tuple, answered by iterating two completion operations on the tuple's
//! observable bipartite graphs:
//!
//! * inside: within one graph, every connected component completes to a full
//!   bipartite graph (transitive closure of the one-missing-corner rule on
//!   2x2 patterns);
//! * across: an edge still missing in exactly the graphs where every other
//!   support that could explain the cell already has it, propagates.
//!
//! If the iteration ends with every graph complete, the tuple is closable and
//! the completion algorithm in [`crate::emd`] recovers the decomposition.

use std::collections::BTreeSet;

use crate::mask::SupportMask;
use crate::{Error, Result};

/// Tuple of rectangles `(row_set, col_set)` over an `m x n` grid, one per
/// rank-one term. An empty rectangle has both sets empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneSupportTuple {
    m: usize,
    n: usize,
    supports: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
}

impl RankOneSupportTuple {
    pub fn new(
        m: usize,
        n: usize,
        supports: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
    ) -> Result<Self> {
        for (i, (rows, cols)) in supports.iter().enumerate() {
            if rows.is_empty() != cols.is_empty() {
                return Err(Error::InvalidSupport(format!(
                    "support {} has an empty side paired with a nonempty one",
                    i + 1
                )));
            }
            if rows.iter().any(|&k| k == 0 || k > m) || cols.iter().any(|&l| l == 0 || l > n) {
                return Err(Error::InvalidSupport(format!(
                    "support {} leaves the {}x{} grid",
                    i + 1,
                    m,
                    n
                )));
            }
        }
        Ok(RankOneSupportTuple { m, n, supports })
    }

    /// Convenience constructor from slices.
    pub fn from_rectangles(m: usize, n: usize, rects: &[(&[usize], &[usize])]) -> Result<Self> {
        Self::new(
            m,
            n,
            rects
                .iter()
                .map(|(r, c)| {
                    (
                        r.iter().copied().collect::<BTreeSet<_>>(),
                        c.iter().copied().collect::<BTreeSet<_>>(),
                    )
                })
                .collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rank-one terms.
    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn row_set(&self, i: usize) -> &BTreeSet<usize> {
        &self.supports[i].0
    }

    pub fn col_set(&self, i: usize) -> &BTreeSet<usize> {
        &self.supports[i].1
    }

    pub fn supports(&self) -> &[(BTreeSet<usize>, BTreeSet<usize>)] {
        &self.supports
    }

    /// Rectangle `i` as a mask over the full grid.
    pub fn mask(&self, i: usize) -> SupportMask {
        let (rows, cols) = &self.supports[i];
        SupportMask::rectangle(self.m, self.n, rows.iter().copied(), cols.iter().copied())
            .expect("validated at construction")
    }

    /// Union of all rectangles.
    pub fn union_mask(&self) -> SupportMask {
        let mut acc = SupportMask::empty(self.m, self.n);
        for i in 0..self.len() {
            acc = acc.union(&self.mask(i)).expect("same shape");
        }
        acc
    }

    /// True when no cell belongs to two rectangles.
    pub fn pairwise_disjoint(&self) -> bool {
        let mut seen = SupportMask::empty(self.m, self.n);
        for i in 0..self.len() {
            let mask = self.mask(i);
            if !seen.is_disjoint(&mask) {
                return false;
            }
            seen = seen.union(&mask).expect("same shape");
        }
        true
    }

    /// Cells of rectangle `i` not covered by any other rectangle.
    pub fn observable_mask(&self, i: usize) -> SupportMask {
        let mut obs = self.mask(i);
        for j in 0..self.len() {
            if j != i {
                obs = obs.difference(&self.mask(j)).expect("same shape");
            }
        }
        obs
    }
}

/// Column-sparsity family for two-factor decompositions: left factors are
/// `m x r` with at most `a` nonzeros per column, right factors `n x r` with
/// at most `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportFamilySpec {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub a: usize,
    pub b: usize,
}

/// Lift a pair of factor supports to the tuple of rank-one supports of their
/// outer-product terms: rectangle `i` is (rows of column `i` of `s_left`) x
/// (rows of column `i` of `s_right`). A zero column on either side produces
/// an empty rectangle.
pub fn lift_supports(s_left: &SupportMask, s_right: &SupportMask) -> Result<RankOneSupportTuple> {
    if s_left.cols() != s_right.cols() {
        return Err(Error::DimensionMismatch(format!(
            "left support has {} columns, right has {}",
            s_left.cols(),
            s_right.cols()
        )));
    }
    let r = s_left.cols();
    let mut supports = Vec::with_capacity(r);
    for i in 1..=r {
        let rows = s_left.column(i);
        let cols = s_right.column(i);
        if rows.is_empty() || cols.is_empty() {
            supports.push((BTreeSet::new(), BTreeSet::new()));
        } else {
            supports.push((rows, cols));
        }
    }
    RankOneSupportTuple::new(s_left.rows(), s_right.rows(), supports)
}

/// True when the pair of factor supports fits the family's shape and
/// per-column sparsity budgets.
pub fn in_family(s_left: &SupportMask, s_right: &SupportMask, fam: &SupportFamilySpec) -> bool {
    s_left.rows() == fam.m
        && s_right.rows() == fam.n
        && s_left.cols() == fam.r
        && s_right.cols() == fam.r
        && (1..=fam.r).all(|i| s_left.column_count(i) <= fam.a)
        && (1..=fam.r).all(|i| s_right.column_count(i) <= fam.b)
}

/// Bipartite graph between a set of row vertices and a set of column
/// vertices. Edges always join a left vertex to a right vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(
        left: BTreeSet<usize>,
        right: BTreeSet<usize>,
        edges: BTreeSet<(usize, usize)>,
    ) -> Result<Self> {
        for &(k, l) in &edges {
            if !left.contains(&k) || !right.contains(&l) {
                return Err(Error::InvalidSupport(format!(
                    "edge ({k}, {l}) touches a vertex outside the graph"
                )));
            }
        }
        Ok(BipartiteGraph { left, right, edges })
    }

    /// True when every left-right pair is an edge.
    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.left.len() * self.right.len()
    }

    /// Whether the complete graph on this vertex pair contains the edge.
    fn spans(&self, edge: (usize, usize)) -> bool {
        self.left.contains(&edge.0) && self.right.contains(&edge.1)
    }

    /// Complete every connected component into a full bipartite graph.
    ///
    /// Equivalent to the fixed point of repeatedly filling the missing corner
    /// of any 2x2 pattern with three edges, reached in one pass.
    fn complete_components(&self) -> BipartiteGraph {
        // Union-find over left vertices (offset 0) and right vertices
        // (offset by max row index + 1 is unnecessary: use tagged keys).
        let lefts: Vec<usize> = self.left.iter().copied().collect();
        let rights: Vec<usize> = self.right.iter().copied().collect();
        let index_of_left = |k: usize| lefts.binary_search(&k).expect("vertex present");
        let index_of_right = |l: usize| {
            lefts.len() + rights.binary_search(&l).expect("vertex present")
        };
        let mut parent: Vec<usize> = (0..lefts.len() + rights.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(k, l) in &self.edges {
            let a = find(&mut parent, index_of_left(k));
            let b = find(&mut parent, index_of_right(l));
            parent[a] = b;
        }
        let mut edges = BTreeSet::new();
        for &k in &lefts {
            let rk = find(&mut parent, index_of_left(k));
            for &l in &rights {
                let rl = find(&mut parent, index_of_right(l));
                if rk == rl {
                    edges.insert((k, l));
                }
            }
        }
        // Isolated vertices joined nothing; only edges within components got
        // added, and a component with a single vertex contributes none.
        // Components without any edge are exactly the isolated vertices.
        let mut out = self.clone();
        // Keep existing edges of components (already included: any edge joins
        // its endpoints into one component).
        out.edges = edges.union(&self.edges).copied().collect();
        out
    }
}

/// Tuple of bipartite graphs, one per rank-one support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraphTuple {
    pub graphs: Vec<BipartiteGraph>,
}

impl BipartiteGraphTuple {
    pub fn all_complete(&self) -> bool {
        self.graphs.iter().all(BipartiteGraph::is_complete)
    }
}

/// Observable graphs of a support tuple: graph `i` keeps the full vertex sets
/// of rectangle `i` but only the edges no other rectangle covers.
pub fn observable_graphs(tuple: &RankOneSupportTuple) -> BipartiteGraphTuple {
    let graphs = (0..tuple.len())
        .map(|i| {
            let obs = tuple.observable_mask(i);
            BipartiteGraph {
                left: tuple.row_set(i).clone(),
                right: tuple.col_set(i).clone(),
                edges: obs.iter().collect(),
            }
        })
        .collect();
    BipartiteGraphTuple { graphs }
}

/// One combined completion step: inside completion on every graph, then one
/// simultaneous across-completion pass over the resulting tuple.
pub fn closure_step(tuple: &BipartiteGraphTuple) -> BipartiteGraphTuple {
    // Inside: complete each graph's connected components.
    let inside: Vec<BipartiteGraph> = tuple
        .graphs
        .iter()
        .map(BipartiteGraph::complete_components)
        .collect();
    // Across: edge e joins graph i when every other graph spanning e already
    // has it. All additions read the post-inside tuple, not each other.
    let mut out = inside.clone();
    for (i, g) in inside.iter().enumerate() {
        for &k in &g.left {
            for &l in &g.right {
                let e = (k, l);
                if g.edges.contains(&e) {
                    continue;
                }
                let propagates = inside
                    .iter()
                    .enumerate()
                    .filter(|&(j, h)| j != i && h.spans(e))
                    .all(|(_, h)| h.edges.contains(&e));
                if propagates {
                    out[i].edges.insert(e);
                }
            }
        }
    }
    BipartiteGraphTuple { graphs: out }
}

/// Iterate [`closure_step`] to its fixed point; returns the closure and the
/// number of steps that changed something.
pub fn closure(tuple: &BipartiteGraphTuple) -> (BipartiteGraphTuple, usize) {
    let mut current = tuple.clone();
    let mut steps = 0;
    loop {
        let next = closure_step(&current);
        if next == current {
            return (current, steps);
        }
        current = next;
        steps += 1;
    }
}

/// A tuple is closable when the closure of its observable graphs is complete
/// on every rectangle's vertex sets.
pub fn is_closable(tuple: &RankOneSupportTuple) -> bool {
    let (closed, _) = closure(&observable_graphs(tuple));
    closed.all_complete()
}

/// Sparsity pattern of butterfly factor `F_ell` in an `L`-layer chain:
/// `I_{N/2^ell} ⊗ (U_2 ⊗ I_{2^{ell-1}})`, 2-regular in rows and columns.
pub fn butterfly_support(ell: usize, layers: usize) -> Result<SupportMask> {
    if ell == 0 || ell > layers {
        return Err(Error::LayerOutOfRange { ell, layers });
    }
    let n = 1usize << layers;
    let inner = SupportMask::full(2, 2).kronecker(&SupportMask::identity(1 << (ell - 1)));
    Ok(SupportMask::identity(n >> ell).kronecker(&inner))
}

/// Sparsity pattern containing any product `X_q * ... * X_p` of factors with
/// butterfly supports: `I_{N/2^q} ⊗ (U_{2^{q-p+1}} ⊗ I_{2^{p-1}})`.
pub fn partial_product_support(q: usize, p: usize, layers: usize) -> Result<SupportMask> {
    if p == 0 || p > q {
        return Err(Error::InvalidInput(format!(
            "partial product needs 1 <= p <= q, got p={p}, q={q}"
        )));
    }
    if q > layers {
        return Err(Error::LayerOutOfRange { ell: q, layers });
    }
    let n = 1usize << layers;
    let inner =
        SupportMask::full(1 << (q - p + 1), 1 << (q - p + 1)).kronecker(&SupportMask::identity(1 << (p - 1)));
    Ok(SupportMask::identity(n >> q).kronecker(&inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{butterfly_factor, butterfly_factors};

    /// Worked 4x4 example: three overlapping rectangles whose observable
    /// graphs close in two steps.
    pub(crate) fn figure_tuple() -> RankOneSupportTuple {
        RankOneSupportTuple::from_rectangles(
            4,
            4,
            &[
                (&[2, 3, 4], &[1, 2]),
                (&[1, 2, 3], &[2, 3]),
                (&[3, 4], &[2, 3, 4]),
            ],
        )
        .unwrap()
    }

    fn edges(g: &BipartiteGraph) -> Vec<(usize, usize)> {
        g.edges.iter().copied().collect()
    }

    #[test]
    fn observable_graphs_of_figure_tuple() {
        let graphs = observable_graphs(&figure_tuple()).graphs;
        assert_eq!(edges(&graphs[0]), vec![(2, 1), (3, 1), (4, 1)]);
        assert_eq!(edges(&graphs[1]), vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(edges(&graphs[2]), vec![(3, 4), (4, 3), (4, 4)]);
        assert_eq!(
            graphs[0].left.iter().copied().collect::<Vec<_>>(),
            vec![2, 3, 4]
        );
        assert_eq!(
            graphs[2].right.iter().copied().collect::<Vec<_>>(),
            vec![2, 3, 4]
        );
    }

    #[test]
    fn one_closure_step_on_figure_tuple() {
        let start = observable_graphs(&figure_tuple());
        let after = closure_step(&start);
        // Inside completion closes the connected component {1,2}x{2,3} of
        // graph 2 and {3,4}x{3,4} of graph 3; across completion then hands
        // (2,2) to graph 1 and (3,3) to graph 2.
        assert_eq!(
            edges(&after.graphs[0]),
            vec![(2, 1), (2, 2), (3, 1), (4, 1)]
        );
        assert_eq!(
            edges(&after.graphs[1]),
            vec![(1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
        );
        assert_eq!(
            edges(&after.graphs[2]),
            vec![(3, 3), (3, 4), (4, 3), (4, 4)]
        );
    }

    #[test]
    fn figure_tuple_closes_in_two_steps() {
        let (closed, steps) = closure(&observable_graphs(&figure_tuple()));
        assert!(closed.graphs.iter().all(BipartiteGraph::is_complete));
        assert_eq!(steps, 2);
        assert!(is_closable(&figure_tuple()));
    }

    #[test]
    fn closure_of_complete_tuple_is_a_fixed_point() {
        let tuple = figure_tuple();
        let complete = BipartiteGraphTuple {
            graphs: (0..tuple.len())
                .map(|i| BipartiteGraph {
                    left: tuple.row_set(i).clone(),
                    right: tuple.col_set(i).clone(),
                    edges: tuple.mask(i).iter().collect(),
                })
                .collect(),
        };
        let (closed, steps) = closure(&complete);
        assert_eq!(steps, 0);
        assert_eq!(closed, complete);
    }

    #[test]
    fn duplicated_supports_never_close() {
        let tuple = RankOneSupportTuple::from_rectangles(
            3,
            3,
            &[(&[1, 2], &[1, 2]), (&[1, 2], &[1, 2])],
        )
        .unwrap();
        let start = observable_graphs(&tuple);
        assert!(start.graphs.iter().all(|g| g.edges.is_empty()));
        let after = closure_step(&start);
        assert_eq!(after, start);
        assert!(!is_closable(&tuple));
    }

    #[test]
    fn disjoint_tuples_are_closable() {
        let tuple = RankOneSupportTuple::from_rectangles(
            4,
            4,
            &[(&[1, 2], &[1, 2]), (&[3], &[3, 4]), (&[4], &[1, 3])],
        )
        .unwrap();
        assert!(tuple.pairwise_disjoint());
        assert!(is_closable(&tuple));
        let (_, steps) = closure(&observable_graphs(&tuple));
        assert_eq!(steps, 0);
    }

    #[test]
    fn closure_grows_monotonically_and_is_idempotent() {
        let start = observable_graphs(&figure_tuple());
        let (closed, _) = closure(&start);
        for (before, after) in start.graphs.iter().zip(&closed.graphs) {
            assert!(before.edges.is_subset(&after.edges));
            assert_eq!(before.left, after.left);
            assert_eq!(before.right, after.right);
        }
        let (again, steps) = closure(&closed);
        assert_eq!(steps, 0);
        assert_eq!(again, closed);
    }

    #[test]
    fn lift_of_butterfly_pair_is_disjoint_cover() {
        let s_left = butterfly_support(2, 2).unwrap();
        let s_right = butterfly_support(1, 2).unwrap();
        let tuple = lift_supports(&s_left, &s_right).unwrap();
        assert_eq!(tuple.len(), 4);
        assert_eq!(tuple.row_set(0).iter().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(tuple.col_set(0).iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(tuple.row_set(3).iter().copied().collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(tuple.col_set(3).iter().copied().collect::<Vec<_>>(), vec![3, 4]);
        assert!(tuple.pairwise_disjoint());
        assert_eq!(tuple.union_mask().len(), 16);
    }

    #[test]
    fn lift_normalizes_zero_columns() {
        let mut s_left = SupportMask::empty(3, 2);
        s_left.insert(1, 1).unwrap();
        let s_right = SupportMask::full(3, 2);
        let tuple = lift_supports(&s_left, &s_right).unwrap();
        assert!(tuple.row_set(1).is_empty());
        assert!(tuple.col_set(1).is_empty());
        assert_eq!(tuple.row_set(0).len(), 1);
    }

    #[test]
    fn butterfly_supports_match_factor_patterns() {
        for layers in 1..=4usize {
            for ell in 1..=layers {
                let mask = butterfly_support(ell, layers).unwrap();
                let factor = butterfly_factor(ell, layers).unwrap();
                assert_eq!(mask, factor.support(1e-12));
                let n = 1usize << layers;
                for k in 1..=n {
                    assert_eq!(mask.column_count(k), 2, "column {k} of S^{ell}");
                }
            }
        }
    }

    #[test]
    fn partial_product_supports_match_actual_products() {
        for layers in [3usize, 4] {
            let factors = butterfly_factors(layers).unwrap();
            // factors[0] = F_L, so F_ell sits at index L - ell.
            for p in 1..=layers {
                for q in p..=layers {
                    let mut acc = factors[layers - p].clone();
                    for ell in p + 1..=q {
                        acc = factors[layers - ell].mul(&acc).unwrap();
                    }
                    let expected = partial_product_support(q, p, layers).unwrap();
                    assert_eq!(acc.support(1e-12), expected, "q={q} p={p} L={layers}");
                }
            }
        }
    }

    #[test]
    fn family_membership_checks_column_budgets() {
        let layers = 3;
        let n = 8;
        let fam = SupportFamilySpec {
            m: n,
            n,
            r: n,
            a: 2,
            b: n / 2,
        };
        let s_left = butterfly_support(layers, layers).unwrap();
        // Right factor is the transpose of the inner partial product times
        // the bit reversal; column sparsity survives both.
        let w = partial_product_support(layers - 1, 1, layers).unwrap();
        let r = crate::transforms::bit_reversal_perm(n).unwrap();
        let s_right = w.permute_cols(&r).unwrap().transpose();
        assert!(in_family(&s_left, &s_right, &fam));
        let tight = SupportFamilySpec { a: 1, ..fam };
        assert!(!in_family(&s_left, &s_right, &tight));
    }
}

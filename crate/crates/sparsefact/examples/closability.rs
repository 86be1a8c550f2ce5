//! Decide, from the supports alone, whether fixed-support decomposition can
//! succeed.
//!
//! Each support contributes a bipartite graph of its entries observable in Z
//! (covered by no other support). Completion succeeds for every matrix
//! admitting the decomposition exactly when alternating connected-component
//! and cross-support closure steps grow all graphs to complete bipartite
//! graphs.

use sparsefact::fixtures;
use sparsefact::supports::{closure, is_closable, observable_graphs, RankOneSupportTuple};

fn main() -> Result<(), sparsefact::Error> {
    // The overlapping 4x4 tuple from the completion example: closable, and
    // the closure needs actual propagation work.
    let overlapping = RankOneSupportTuple::from_rectangles(
        4,
        4,
        &[
            (&[2, 3, 4], &[1, 2]),
            (&[1, 2, 3], &[2, 3]),
            (&[3, 4], &[2, 3, 4]),
        ],
    )?;
    report("overlapping 4x4 tuple", &overlapping);

    // Two identical supports hide each other completely: nothing is
    // observable, nothing can close.
    let duplicated = RankOneSupportTuple::from_rectangles(
        2,
        2,
        &[(&[1, 2], &[1, 2]), (&[1, 2], &[1, 2])],
    )?;
    report("duplicated supports", &duplicated);

    // Disjoint supports are trivially closable: every entry is observable,
    // so the observable graphs are already complete.
    let mut rng = fixtures::rng(7);
    let disjoint = fixtures::random_disjoint_tuple(&mut rng, 6, 6, 4);
    report("random disjoint tuple", &disjoint);

    assert!(is_closable(&overlapping));
    assert!(!is_closable(&duplicated));
    assert!(is_closable(&disjoint));
    Ok(())
}

fn report(label: &str, tuple: &RankOneSupportTuple) {
    let graphs = observable_graphs(tuple);
    let (closed, steps) = closure(&graphs);
    println!(
        "{label}: closable = {}, closure steps = {steps}",
        closed.all_complete()
    );
}

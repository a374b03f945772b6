//! Integration tests for cross-module structure: the comb/incoming-comb
//! equivalence, the merge trace format, and the probe reports on the named
//! families.

use std::collections::BTreeSet;

use gammoid::dimaze::Linkage;
use gammoid::matroid::{finitarisation_probe, MatroidView, ProbeBudget, VertexRule};
use gammoid::merge::merge;
use gammoid::FamilyGenerator;
use gammoid_testkit as tk;

/// The two comb truncations carry the same independence structure under
/// some relabeling, found by exhaustive search over bijections.
#[test]
fn alt_comb_and_incoming_comb_define_isomorphic_systems() {
    for k in 1..=3 {
        let a = MatroidView::from_dimaze(FamilyGenerator::AltComb { depth: k }.generate().unwrap());
        let b = MatroidView::from_dimaze(
            FamilyGenerator::IncomingComb { depth: k }.generate().unwrap(),
        );
        let ta = a.independence_table(None).unwrap();
        let tb = b.independence_table(None).unwrap();
        let n = 2 * k + 1;
        assert_eq!(ta.len(), tb.len());
        let iso = tk::find_matroid_isomorphism(&ta, &tb, n);
        assert!(iso.is_some(), "no isomorphism at depth {k}");
    }
}

/// The identity relabeling does not work at depth 2: the isomorphism has
/// to mix spine and teeth roles, so the search is not vacuous.
#[test]
fn comb_isomorphism_is_not_the_identity() {
    let a = MatroidView::from_dimaze(FamilyGenerator::AltComb { depth: 2 }.generate().unwrap());
    let b =
        MatroidView::from_dimaze(FamilyGenerator::IncomingComb { depth: 2 }.generate().unwrap());
    let ta = a.independence_table(None).unwrap();
    let tb = b.independence_table(None).unwrap();
    assert_ne!(ta, tb);
}

#[test]
fn merge_trace_dump_is_stable() {
    let d = FamilyGenerator::AltComb { depth: 2 }.generate().unwrap();
    // the canonical trace inputs at depth 2
    let red = Linkage::from_named(
        &d,
        &[
            vec!["y0".into()],
            vec!["x1".into(), "y1".into()],
            vec!["x2".into(), "y2".into()],
        ],
    )
    .unwrap();
    let blue = Linkage::from_named(
        &d,
        &[vec!["x1".into(), "y0".into()], vec!["x2".into(), "y1".into()]],
    )
    .unwrap();
    let (out, state) = merge(&d, &red, &blue, true).unwrap();
    assert_eq!(out.to_literal(&d), "x1,y1;x2,y2;y0");
    let dump = state.trace_dump(&d);
    // step 1: every frontier already sits on the blue system, so only the
    // junction of y0's path moves; steps 2 and 3 walk x1 and x2 forward;
    // step 4 is the fixed point.
    let expected = "\
1 | - | - | y0<-y0\n\
2 | x1 | y1 | y1<-y1\n\
3 | x2 | y2 | -\n\
4 | - | - | -\n";
    assert_eq!(dump, expected);
}

#[test]
fn probe_reports_cover_the_named_families() {
    // exits on a star: independent outright
    let star = finitarisation_probe(
        |k| Ok(FamilyGenerator::Star { leaves: k }),
        VertexRule::Exits,
        3..=5,
        ProbeBudget::default(),
    )
    .unwrap();
    assert!(star.iter().all(|r| r.deletion_distance == 0 && r.within_budget_finitary));

    // half grid: the diagonal-plus-exits distance equals the depth
    let grid = finitarisation_probe(
        |k| Ok(FamilyGenerator::HalfGrid { depth: k }),
        VertexRule::DiagonalPlusExits,
        2..=5,
        ProbeBudget {
            subset_size: 2,
            ..ProbeBudget::default()
        },
    )
    .unwrap();
    for r in &grid {
        assert_eq!(r.deletion_distance, r.k);
        assert!(!r.within_budget_finitary, "the depth-k corner pair is dependent");
    }

    // one turbine spine: all subsets independent via its own teeth
    let spine = finitarisation_probe(
        |k| Ok(FamilyGenerator::Turbine { copies: 2, depth: k }),
        VertexRule::Spine,
        3..=4,
        ProbeBudget::default(),
    )
    .unwrap();
    assert!(spine.iter().all(|r| r.deletion_distance == 0));
}

/// The comb truncation's spine set is linkable onto two different exit
/// sets: shifted onto the low teeth or straight onto the high ones. Both
/// systems are confirmed against the path oracle.
#[test]
fn comb_spine_links_two_ways() {
    let d = FamilyGenerator::AltComb { depth: 2 }.generate().unwrap();
    let shifted = Linkage::from_named(
        &d,
        &[vec!["x1".into(), "y0".into()], vec!["x2".into(), "y1".into()]],
    )
    .unwrap();
    let straight = Linkage::from_named(
        &d,
        &[vec!["x1".into(), "y1".into()], vec!["x2".into(), "y2".into()]],
    )
    .unwrap();
    assert!(tk::bf_linkage_valid(&d, &shifted));
    assert!(tk::bf_linkage_valid(&d, &straight));
    assert_eq!(shifted.ini(), straight.ini());
    assert_ne!(shifted.ter(), straight.ter());
}

/// Every bipartite graph with both sides of size at most 4 satisfies the
/// independence axioms, and the matching oracle agrees with backtracking
/// on every subset.
#[test]
fn exhaustive_small_bipartite_graphs() {
    use gammoid::matroid::check_axioms;
    use gammoid::transversal::{mt_is_independent, BipartiteGraph};
    let mut instances = 0usize;
    for a in 1..=4usize {
        for b in 1..=4usize {
            let left: Vec<String> = (0..a).map(|i| format!("v{i}")).collect();
            let right: Vec<String> = (0..b).map(|i| format!("w{i}")).collect();
            for mask in 0u32..(1 << (a * b)) {
                let mut edges = Vec::new();
                for i in 0..a {
                    for j in 0..b {
                        if mask & (1 << (i * b + j)) != 0 {
                            edges.push((left[i].clone(), right[j].clone()));
                        }
                    }
                }
                let g = BipartiteGraph::new(&left, &right, &edges, None).unwrap();
                for smask in 0u32..(1 << a) {
                    let set: BTreeSet<String> = (0..a)
                        .filter(|i| smask & (1 << i) != 0)
                        .map(|i| left[i].clone())
                        .collect();
                    let idx: BTreeSet<usize> =
                        set.iter().map(|v| g.left_idx(v).unwrap()).collect();
                    assert_eq!(
                        mt_is_independent(&g, &set).unwrap().is_some(),
                        tk::bf_matchable(&g, &idx)
                    );
                }
                let report = check_axioms(&MatroidView::from_bipartite(g), None).unwrap();
                assert!(report.i1.passed() && report.i2.passed());
                assert!(report.i3.passed(), "I3 failed on mask {mask} ({a}x{b})");
                assert!(report.im.passed());
                instances += 1;
            }
        }
    }
    assert!(instances > 70_000);
}

/// Deterministic outputs: the same query always returns the same witness.
#[test]
fn witnesses_are_deterministic() {
    let d = FamilyGenerator::HalfGrid { depth: 3 }.generate().unwrap();
    let x: BTreeSet<String> = ["(1,1)", "(2,2)", "(3,3)"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let lit: Vec<String> = (0..5)
        .map(|_| {
            let (link, _) = gammoid::linkage::max_linkage(&d, &x).unwrap();
            link.to_literal(&d)
        })
        .collect();
    assert!(lit.windows(2).all(|w| w[0] == w[1]));
}

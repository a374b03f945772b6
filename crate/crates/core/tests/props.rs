//! Property tests: random instances against brute-force oracles and the
//! standalone validators.

use std::collections::BTreeSet;

use proptest::prelude::*;

use gammoid::dimaze::{Dimaze, Linkage, VertexId};
use gammoid::linkage::{augment, max_linkage, validate_walk, AugmentOutcome};
use gammoid::matroid::{check_axioms, circuits, cocircuits, MatroidView};
use gammoid::transversal::{mt_is_independent, BipartiteGraph};
use gammoid_testkit as tk;

fn arb_dimaze(max_n: usize) -> impl Strategy<Value = Dimaze> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                Just(n),
                0u32..(1u32 << n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(n, exits, bools)| {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                if exits & (1 << i) != 0 {
                    continue;
                }
                for j in 0..n {
                    if i != j && bools[i * n + j] {
                        edges.push((names[i].clone(), names[j].clone()));
                    }
                }
            }
            let exit_names: Vec<String> = (0..n)
                .filter(|i| exits & (1 << i) != 0)
                .map(|i| names[i].clone())
                .collect();
            Dimaze::new(&names, &edges, &exit_names).unwrap()
        })
}

fn arb_subset(d: &Dimaze, mask: u64) -> BTreeSet<VertexId> {
    d.vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, v)| v.clone())
        .collect()
}

fn arb_bigraph() -> impl Strategy<Value = BipartiteGraph> {
    (1..=5usize, 1..=5usize)
        .prop_flat_map(|(a, b)| {
            (
                Just(a),
                Just(b),
                proptest::collection::vec(any::<bool>(), a * b),
            )
        })
        .prop_map(|(a, b, bools)| {
            let left: Vec<String> = (0..a).map(|i| format!("v{i}")).collect();
            let right: Vec<String> = (0..b).map(|i| format!("w{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..a {
                for j in 0..b {
                    if bools[i * b + j] {
                        edges.push((left[i].clone(), right[j].clone()));
                    }
                }
            }
            BipartiteGraph::new(&left, &right, &edges, None).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialize_parse_roundtrip(d in arb_dimaze(7)) {
        let text = d.serialize();
        prop_assert_eq!(Dimaze::parse(&text).unwrap(), d);
    }

    #[test]
    fn json_roundtrip(d in arb_dimaze(7)) {
        prop_assert_eq!(Dimaze::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn independence_matches_the_path_oracle(d in arb_dimaze(6), mask in any::<u64>()) {
        let set = arb_subset(&d, mask);
        let idx: BTreeSet<usize> = set.iter().map(|v| d.idx(v).unwrap()).collect();
        let got = gammoid::linkage::is_independent(&d, &set).unwrap();
        prop_assert_eq!(got.is_some(), tk::bf_is_linkable(&d, &idx));
        if let Some(w) = got {
            prop_assert_eq!(w.ini_names(&d), set);
            prop_assert!(tk::bf_linkage_valid(&d, &w));
        }
    }

    #[test]
    fn menger_equality_small(d in arb_dimaze(6), mask in any::<u64>()) {
        let x = arb_subset(&d, mask);
        let xi: BTreeSet<usize> = x.iter().map(|v| d.idx(v).unwrap()).collect();
        let (link, sep) = max_linkage(&d, &x).unwrap();
        prop_assert_eq!(link.len(), tk::bf_max_disjoint(&d, &xi));
        prop_assert_eq!(sep.verts.len(), link.len());
        prop_assert!(tk::bf_is_separator(&d, &xi, &sep.verts));
    }

    #[test]
    fn augmentation_walks_validate(d in arb_dimaze(6), mask in any::<u64>()) {
        let x = arb_subset(&d, mask);
        let xi: BTreeSet<usize> = x.iter().map(|v| d.idx(v).unwrap()).collect();
        let mut link = Linkage::empty();
        loop {
            match augment(&d, &x, &link).unwrap() {
                AugmentOutcome::Extended { linkage, walk } => {
                    let violations = validate_walk(&d, &link, &xi, &walk);
                    prop_assert!(violations.is_empty(), "walk violations: {violations:?}");
                    prop_assert_eq!(linkage.len(), link.len() + 1);
                    prop_assert!(link.ini().is_subset(&linkage.ini()));
                    link = linkage;
                }
                AugmentOutcome::Separated(_) => break,
            }
        }
    }

    #[test]
    fn matchability_matches_backtracking(g in arb_bigraph(), mask in any::<u64>()) {
        let set: BTreeSet<VertexId> = g
            .left()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.clone())
            .collect();
        let idx: BTreeSet<usize> = set.iter().map(|v| g.left_idx(v).unwrap()).collect();
        let got = mt_is_independent(&g, &set).unwrap();
        prop_assert_eq!(got.is_some(), tk::bf_matchable(&g, &idx));
        if let Some(m) = got {
            prop_assert_eq!(m.left_vertices(), idx);
        }
    }

    #[test]
    fn bipartite_systems_satisfy_the_independence_axioms(g in arb_bigraph()) {
        let m = MatroidView::from_bipartite(g);
        let report = check_axioms(&m, None).unwrap();
        prop_assert!(report.i1.passed());
        prop_assert!(report.i2.passed());
        prop_assert!(report.i3.passed(), "{:?}", report.i3);
        prop_assert!(report.im.passed());
    }

    #[test]
    fn mt_augment_lands_in_b_minus_i(g in arb_bigraph(), imask in any::<u64>()) {
        use gammoid::transversal::mt_augment;
        let nl = g.left().len();
        let table = tk::bf_match_table(&g);
        let imask = imask & ((1 << nl) - 1);
        prop_assume!(table.feasible[imask as usize]);
        // grow a maximal independent set greedily from the oracle table
        let mut bmask = 0u64;
        for v in 0..nl {
            if table.feasible[(bmask | (1 << v)) as usize] {
                bmask |= 1 << v;
            }
        }
        let i: BTreeSet<VertexId> = (0..nl)
            .filter(|v| imask & (1 << v) != 0)
            .map(|v| g.left()[v].clone())
            .collect();
        let b: BTreeSet<VertexId> = (0..nl)
            .filter(|v| bmask & (1 << v) != 0)
            .map(|v| g.left()[v].clone())
            .collect();
        // only applicable when I is not maximal
        let i_maximal = (0..nl).all(|v| {
            imask & (1 << v) != 0 || !table.feasible[(imask | (1 << v)) as usize]
        });
        prop_assume!(!i_maximal);
        let (y, m) = mt_augment(&g, &i, &b).unwrap();
        prop_assert!(b.contains(&y) && !i.contains(&y));
        let mut extended = i.clone();
        extended.insert(y.clone());
        prop_assert_eq!(
            m.left_vertices(),
            extended.iter().map(|v| g.left_idx(v).unwrap()).collect::<BTreeSet<_>>()
        );
        let ymask = imask | (1 << g.left_idx(&y).unwrap());
        prop_assert!(table.feasible[ymask as usize], "oracle rejects I + y");
    }

    #[test]
    fn circuits_and_cocircuits_never_meet_in_one_element(d in arb_dimaze(5)) {
        let n = d.vertex_count();
        let m = MatroidView::from_dimaze(d);
        let cs = circuits(&m, n, None).unwrap();
        let ccs = cocircuits(&m, n, None).unwrap();
        for c in &cs {
            for cc in &ccs {
                prop_assert_ne!(c.intersection(cc).count(), 1, "C={:?} C*={:?}", c, cc);
            }
        }
    }
}

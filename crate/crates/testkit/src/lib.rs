//! Brute-force oracles and instance enumerators for the test suites.
//!
//! Everything here is deliberately independent of the library's algorithms:
//! paths are enumerated exhaustively, matchings by backtracking, and
//! instance families by direct construction, so the suites cross-check two
//! unrelated routes to each answer.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use gammoid::dimaze::{Dimaze, Linkage, VertexId};
use gammoid::transversal::BipartiteGraph;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vset(items: &[&str]) -> BTreeSet<VertexId> {
    items.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// brute-force path oracles on dimazes
// ---------------------------------------------------------------------------

/// All simple paths from `v` ending at an exit, as (vertex-mask, vertices).
fn paths_from(d: &Dimaze, v: usize) -> Vec<(u64, Vec<usize>)> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    fn rec(d: &Dimaze, stack: &mut Vec<usize>, mask: u64, out: &mut Vec<(u64, Vec<usize>)>) {
        let cur = *stack.last().unwrap();
        if d.is_exit(cur) {
            out.push((mask, stack.clone()));
        }
        for &w in d.out_neighbors(cur) {
            if mask & (1 << w) != 0 {
                continue;
            }
            stack.push(w);
            rec(d, stack, mask | (1 << w), out);
            stack.pop();
        }
    }
    rec(d, &mut stack, 1 << v, &mut out);
    out
}

/// True iff `set` is linkable: every vertex gets its own disjoint path.
pub fn bf_is_linkable(d: &Dimaze, set: &BTreeSet<usize>) -> bool {
    let sources: Vec<usize> = set.iter().copied().collect();
    let menus: Vec<Vec<(u64, Vec<usize>)>> =
        sources.iter().map(|&v| paths_from(d, v)).collect();
    fn rec(menus: &[Vec<(u64, Vec<usize>)>], i: usize, used: u64) -> bool {
        if i == menus.len() {
            return true;
        }
        for &(mask, _) in &menus[i] {
            if mask & used == 0 && rec(menus, i + 1, used | mask) {
                return true;
            }
        }
        false
    }
    rec(&menus, 0, 0)
}

pub fn bf_is_linkable_names(d: &Dimaze, set: &BTreeSet<VertexId>) -> bool {
    let idx: BTreeSet<usize> = set.iter().map(|n| d.idx(n).unwrap()).collect();
    bf_is_linkable(d, &idx)
}

/// Maximum number of disjoint paths from distinct vertices of `x` to exits.
pub fn bf_max_disjoint(d: &Dimaze, x: &BTreeSet<usize>) -> usize {
    let sources: Vec<usize> = x.iter().copied().collect();
    let menus: Vec<Vec<(u64, Vec<usize>)>> =
        sources.iter().map(|&v| paths_from(d, v)).collect();
    let mut memo: BTreeMap<(usize, u64), usize> = BTreeMap::new();
    fn rec(
        menus: &[Vec<(u64, Vec<usize>)>],
        i: usize,
        used: u64,
        memo: &mut BTreeMap<(usize, u64), usize>,
    ) -> usize {
        if i == menus.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, used)) {
            return v;
        }
        let mut best = rec(menus, i + 1, used, memo); // skip this source
        for &(mask, _) in &menus[i] {
            if mask & used == 0 {
                best = best.max(1 + rec(menus, i + 1, used | mask, memo));
            }
        }
        memo.insert((i, used), best);
        best
    }
    rec(&menus, 0, 0, &mut memo)
}

/// True iff `s` meets every path from `x` to an exit.
pub fn bf_is_separator(d: &Dimaze, x: &BTreeSet<usize>, s: &BTreeSet<usize>) -> bool {
    // reachability from x \ s inside the graph with s removed
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = x.iter().filter(|v| !s.contains(v)).copied().collect();
    for &v in &stack {
        seen.insert(v);
    }
    while let Some(v) = stack.pop() {
        if d.is_exit(v) {
            return false; // an exit is reachable without touching s
        }
        for &w in d.out_neighbors(v) {
            if !s.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    true
}

/// Structural validity of a linkage against its dimaze, checked from
/// scratch: real edges, disjointness, terminals at exits.
pub fn bf_linkage_valid(d: &Dimaze, l: &Linkage) -> bool {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for p in l.paths() {
        for w in p.verts().windows(2) {
            if !d.has_edge(w[0], w[1]) {
                return false;
            }
        }
        for &v in p.verts() {
            if !seen.insert(v) {
                return false;
            }
        }
        if !d.is_exit(p.terminal()) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// brute-force matching oracles on bipartite graphs
// ---------------------------------------------------------------------------

/// Backtracking matchability of the left-side set `i`.
pub fn bf_matchable(g: &BipartiteGraph, i: &BTreeSet<usize>) -> bool {
    let lefts: Vec<usize> = i.iter().copied().collect();
    fn rec(g: &BipartiteGraph, lefts: &[usize], k: usize, used: u64) -> bool {
        if k == lefts.len() {
            return true;
        }
        for &r in g.neighbors_of_left(lefts[k]) {
            if used & (1 << r) == 0 && rec(g, lefts, k + 1, used | (1 << r)) {
                return true;
            }
        }
        false
    }
    rec(g, &lefts, 0, 0)
}

pub fn bf_matchable_names(g: &BipartiteGraph, i: &BTreeSet<VertexId>) -> bool {
    let idx: BTreeSet<usize> = i.iter().map(|n| g.left_idx(n).unwrap()).collect();
    bf_matchable(g, &idx)
}

/// Per-subset matchability of the left side, plus the best cardinality of
/// a feasible superset of each mask. Left side capped below 20 vertices.
pub struct MatchTable {
    pub feasible: Vec<bool>,
    pub best_above: Vec<u32>,
}

pub fn bf_match_table(g: &BipartiteGraph) -> MatchTable {
    let n = g.left().len();
    assert!(n < 20, "match table limited to small graphs");
    let total = 1usize << n;
    let mut feasible = vec![false; total];
    for mask in 0..total {
        let set: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        feasible[mask] = bf_matchable(g, &set);
    }
    let mut best_above = vec![0u32; total];
    for mask in (0..total).rev() {
        let mut best = if feasible[mask] {
            (mask as u64).count_ones()
        } else {
            0
        };
        for i in 0..n {
            if mask & (1 << i) == 0 {
                best = best.max(best_above[mask | (1 << i)]);
            }
        }
        best_above[mask] = best;
    }
    MatchTable {
        feasible,
        best_above,
    }
}

// ---------------------------------------------------------------------------
// exhaustive dimaze enumeration, reduced by isomorphism
// ---------------------------------------------------------------------------

/// A compact dimaze instance: edge and exit bit-masks over `n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RawDimaze {
    pub n: usize,
    pub edges: u32,
    pub exits: u8,
}

impl RawDimaze {
    pub fn to_dimaze(self) -> Dimaze {
        let names: Vec<String> = (0..self.n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for (pos, (i, j)) in edge_positions(self.n).into_iter().enumerate() {
            if self.edges & (1 << pos) != 0 {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
        let exits: Vec<String> = (0..self.n)
            .filter(|v| self.exits & (1 << v) != 0)
            .map(|v| names[v].clone())
            .collect();
        Dimaze::new(&names, &edges, &exits).unwrap()
    }
}

fn edge_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push((i, j));
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    fn heap(k: usize, idx: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(idx.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, idx, out);
            if k % 2 == 0 {
                idx.swap(i, k - 1);
            } else {
                idx.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut idx, &mut out);
    out
}

/// Every dimaze on exactly `n` vertices (edges only out of non-exits), one
/// representative per isomorphism class.
pub fn dimaze_classes(n: usize) -> Vec<RawDimaze> {
    if n == 0 {
        return vec![RawDimaze {
            n: 0,
            edges: 0,
            exits: 0,
        }];
    }
    let positions = edge_positions(n);
    let m = positions.len();
    let perms = permutations(n);
    let pos_index: BTreeMap<(usize, usize), usize> = positions
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, k))
        .collect();
    // per permutation, where each edge position goes
    let edge_perm: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            positions
                .iter()
                .map(|&(i, j)| pos_index[&(p[i], p[j])])
                .collect()
        })
        .collect();
    // per vertex, the mask of edge positions with that tail
    let tail_mask: Vec<u32> = (0..n)
        .map(|v| {
            positions
                .iter()
                .enumerate()
                .filter(|(_, &(i, _))| i == v)
                .fold(0u32, |acc, (k, _)| acc | (1 << k))
        })
        .collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut out = Vec::new();
    for edges in 0u32..(1u32 << m) {
        let mut sinks = 0u8;
        for v in 0..n {
            if edges & tail_mask[v] == 0 {
                sinks |= 1 << v;
            }
        }
        // exits range over the subsets of the sink set
        let mut b = sinks;
        loop {
            let canon = canonical_key(n, edges, b, &perms, &edge_perm);
            if seen.insert(canon) {
                out.push(RawDimaze { n, edges, exits: b });
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & sinks;
        }
    }
    out
}

fn canonical_key(
    n: usize,
    edges: u32,
    exits: u8,
    perms: &[Vec<usize>],
    edge_perm: &[Vec<usize>],
) -> u64 {
    let mut best = u64::MAX;
    for (pi, perm) in perms.iter().enumerate() {
        let mut e2 = 0u32;
        let mut rest = edges;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            e2 |= 1 << edge_perm[pi][k];
        }
        let mut b2 = 0u8;
        for v in 0..n {
            if exits & (1 << v) != 0 {
                b2 |= 1 << perm[v];
            }
        }
        let key = ((e2 as u64) << n) | b2 as u64;
        best = best.min(key);
    }
    best
}

// ---------------------------------------------------------------------------
// random instances
// ---------------------------------------------------------------------------

/// A random valid dimaze on `n` vertices: a random exit count, edges drawn
/// from non-exits only.
pub fn random_dimaze(rng: &mut ChaCha8Rng, n: usize) -> Dimaze {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let exit_count = rng.gen_range(0..=n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let exits: BTreeSet<usize> = order[..exit_count].iter().copied().collect();
    let p: f64 = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for i in 0..n {
        if exits.contains(&i) {
            continue;
        }
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    let exit_names: Vec<String> = exits.iter().map(|&v| names[v].clone()).collect();
    Dimaze::new(&names, &edges, &exit_names).unwrap()
}

/// A random subset of the vertex names.
pub fn random_vertex_subset(rng: &mut ChaCha8Rng, d: &Dimaze, p: f64) -> BTreeSet<VertexId> {
    d.vertices()
        .iter()
        .filter(|_| rng.gen_bool(p))
        .cloned()
        .collect()
}

/// A random linkage: maximum linkage from a random source set, with each
/// path then kept with probability `keep`.
pub fn random_linkage(rng: &mut ChaCha8Rng, d: &Dimaze, keep: f64) -> Linkage {
    let x = random_vertex_subset(rng, d, 0.6);
    let (link, _) = gammoid::linkage::max_linkage(d, &x).unwrap();
    let kept: Vec<Vec<VertexId>> = link
        .named(d)
        .into_iter()
        .filter(|_| rng.gen_bool(keep))
        .collect();
    Linkage::from_named(d, &kept).unwrap()
}

// ---------------------------------------------------------------------------
// bipartite trees
// ---------------------------------------------------------------------------

/// Decodes a Pruefer sequence over `0..n` into tree edges.
fn pruefer_to_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    debug_assert!(n >= 2 && seq.len() == n - 2);
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::new();
    let mut used = vec![false; n];
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1 && !used[v]).unwrap();
        edges.push((leaf, s));
        used[leaf] = true;
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1 && !used[v]).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Builds a rooted bipartite graph from tree edges over `0..n`, rooted at
/// vertex 0; the bipartition classes are the distance parities.
pub fn tree_to_bipartite(edges: &[(usize, usize)], n: usize) -> BipartiteGraph {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![None; n];
    color[0] = Some(false); // false = right (root) side
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if color[w].is_none() {
                color[w] = Some(!color[v].unwrap());
                queue.push_back(w);
            }
        }
    }
    let name = |v: usize| format!("n{v}");
    let left: Vec<String> = (0..n).filter(|&v| color[v] == Some(true)).map(name).collect();
    let right: Vec<String> = (0..n).filter(|&v| color[v] == Some(false)).map(name).collect();
    let named_edges: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| {
            if color[a] == Some(true) {
                (name(a), name(b))
            } else {
                (name(b), name(a))
            }
        })
        .collect();
    BipartiteGraph::new(&left, &right, &named_edges, Some("n0")).unwrap()
}

/// Every labeled tree on `n` vertices as a rooted bipartite graph; there
/// are `n^(n-2)` of them, so keep `n` small.
pub fn all_bipartite_trees(n: usize) -> Vec<BipartiteGraph> {
    match n {
        0 => vec![],
        1 => vec![BipartiteGraph::new::<&str>(&[], &["n0"], &[], Some("n0")).unwrap()],
        2 => vec![tree_to_bipartite(&[(0, 1)], 2)],
        _ => {
            let mut out = Vec::new();
            let total = (n as u64).pow((n - 2) as u32);
            for code in 0..total {
                let mut seq = Vec::with_capacity(n - 2);
                let mut c = code;
                for _ in 0..n - 2 {
                    seq.push((c % n as u64) as usize);
                    c /= n as u64;
                }
                out.push(tree_to_bipartite(&pruefer_to_edges(&seq, n), n));
            }
            out
        }
    }
}

/// A random labeled tree on `n` vertices as a rooted bipartite graph.
pub fn random_bipartite_tree(rng: &mut ChaCha8Rng, n: usize) -> BipartiteGraph {
    if n == 1 {
        return BipartiteGraph::new::<&str>(&[], &["n0"], &[], Some("n0")).unwrap();
    }
    if n == 2 {
        return tree_to_bipartite(&[(0, 1)], 2);
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    tree_to_bipartite(&pruefer_to_edges(&seq, n), n)
}

// ---------------------------------------------------------------------------
// matroid isomorphism search
// ---------------------------------------------------------------------------

/// Searches for a ground-set bijection carrying one independence table to
/// the other; tables are indexed by subset masks in each view's own order.
pub fn find_matroid_isomorphism(
    table_a: &[bool],
    table_b: &[bool],
    n: usize,
) -> Option<Vec<usize>> {
    if table_a.len() != table_b.len() {
        return None;
    }
    for perm in permutations(n) {
        let mut ok = true;
        for mask in 0..(1u64 << n) {
            let mut image = 0u64;
            for (i, &pi) in perm.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    image |= 1 << pi;
                }
            }
            if table_a[mask as usize] != table_b[image as usize] {
                ok = false;
                break;
            }
        }
        if ok {
            return Some(perm);
        }
    }
    None
}

/// Prints the per-criterion verdict line the acceptance suite reports.
pub fn criterion_line(number: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use gammoid::FamilyGenerator;

    #[test]
    fn path_oracle_counts_star() {
        let d = FamilyGenerator::Star { leaves: 2 }.generate().unwrap();
        let all: BTreeSet<usize> = (0..3).collect();
        assert_eq!(bf_max_disjoint(&d, &all), 2);
        assert!(!bf_is_linkable(&d, &all));
        let two: BTreeSet<usize> = [d.idx("c").unwrap(), d.idx("e1").unwrap()].into();
        assert!(bf_is_linkable(&d, &two));
    }

    #[test]
    fn separator_oracle_on_path() {
        let d = Dimaze::parse("dimaze v1\nvertex a\nvertex b\nexit b\nedge a b").unwrap();
        let x: BTreeSet<usize> = [d.idx("a").unwrap(), d.idx("b").unwrap()].into();
        let s: BTreeSet<usize> = [d.idx("b").unwrap()].into();
        assert!(bf_is_separator(&d, &x, &s));
        assert!(!bf_is_separator(&d, &x, &BTreeSet::new()));
    }

    #[test]
    fn class_enumeration_produces_valid_dimazes() {
        assert_eq!(dimaze_classes(0).len(), 1);
        // n = 1: no edges; the vertex is a sink, exits empty or full
        assert_eq!(dimaze_classes(1).len(), 2);
        for c in dimaze_classes(3) {
            assert!(c.to_dimaze().is_valid());
        }
    }

    #[test]
    fn pruefer_enumeration_counts_labeled_trees() {
        assert_eq!(all_bipartite_trees(4).len(), 16);
        for t in all_bipartite_trees(4) {
            assert!(t.is_rooted_tree());
        }
    }

    #[test]
    fn random_dimazes_are_valid() {
        let mut r = rng(7);
        for _ in 0..50 {
            let d = random_dimaze(&mut r, 6);
            assert!(d.is_valid());
        }
    }
}

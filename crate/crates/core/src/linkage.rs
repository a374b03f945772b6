//! Independence oracle for linkability systems.
//!
//! The central routine is a breadth-first search for *alternating walks*
//! with respect to a linkage `P`: walks that traverse edges of `P` backwards
//! and all other edges forwards, repeat vertices only on `V(P)`, and touch a
//! `P`-edge whenever they meet `V(P)`. A walk from `X \ V(P)` into
//! `B0 \ V(P)` rewires `P` into a strictly larger linkage; when no such walk
//! exists the explored region yields an `X`–`B0` separator with exactly one
//! vertex on each path of `P`.

use std::collections::{BTreeSet, VecDeque};

use crate::dimaze::{Dimaze, DirectedPath, Linkage, VertexId};
use crate::Error;

/// A walk `v0 e0 v1 e1 ... e(n-1) vn` alternating with respect to a
/// reference linkage. Edges are stored with their digraph orientation;
/// `edges[i]` joins `verts[i]` and `verts[i+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingWalk {
    pub verts: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl AlternatingWalk {
    pub fn start(&self) -> usize {
        self.verts[0]
    }

    pub fn end(&self) -> usize {
        *self.verts.last().unwrap()
    }

    pub fn named(&self, d: &Dimaze) -> Vec<VertexId> {
        self.verts.iter().map(|&v| d.name(v).to_string()).collect()
    }
}

/// Checks the three alternation conditions plus edge distinctness and the
/// start rule, returning every violation. Independent of the walk search:
/// anything the search produces must pass this.
pub fn validate_walk(
    d: &Dimaze,
    link: &Linkage,
    sources: &BTreeSet<usize>,
    walk: &AlternatingWalk,
) -> Vec<String> {
    let mut bad = Vec::new();
    let n = walk.edges.len();
    if walk.verts.is_empty() {
        return vec!["walk has no vertices".into()];
    }
    if walk.verts.len() != n + 1 {
        return vec!["walk vertex/edge counts are inconsistent".into()];
    }
    let pverts = link.vertex_set();
    let pedges = link.edge_set();
    let v0 = walk.verts[0];
    if !sources.contains(&v0) || pverts.contains(&v0) {
        bad.push(format!("walk starts at {} outside X \\ V(P)", d.name(v0)));
    }
    for i in 0..n {
        let e = walk.edges[i];
        let (vi, vj) = (walk.verts[i], walk.verts[i + 1]);
        if !d.edges().contains(&e) {
            bad.push(format!("edge {:?} not in the dimaze", e));
            continue;
        }
        let in_p = pedges.contains(&e);
        // (1) reversed exactly on linkage edges
        if in_p && e != (vj, vi) {
            bad.push(format!("linkage edge at step {i} not traversed backwards"));
        }
        if !in_p && e != (vi, vj) {
            bad.push(format!("non-linkage edge at step {i} not traversed forwards"));
        }
    }
    // pairwise distinct edges
    for i in 0..n {
        for j in i + 1..n {
            if walk.edges[i] == walk.edges[j] {
                bad.push(format!("edge repeated at steps {i} and {j}"));
            }
        }
    }
    // (2) repeats only on V(P); the final vertex is exempt
    for i in 0..n {
        for j in i + 1..n {
            if walk.verts[i] == walk.verts[j] && !pverts.contains(&walk.verts[i]) {
                bad.push(format!(
                    "vertex {} repeats off the linkage",
                    d.name(walk.verts[i])
                ));
            }
        }
    }
    // (3) meeting V(P) uses an adjacent linkage edge, with e(-1) := e0
    for i in 0..n {
        if pverts.contains(&walk.verts[i]) {
            let prev = if i == 0 { walk.edges[0] } else { walk.edges[i - 1] };
            let here = walk.edges[i];
            if !pedges.contains(&prev) && !pedges.contains(&here) {
                bad.push(format!(
                    "vertex {} on the linkage without an incident linkage edge",
                    d.name(walk.verts[i])
                ));
            }
        }
    }
    bad
}

/// An `X`–`B0` separator consisting of exactly one vertex per path of the
/// linkage it lies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorOnLinkage {
    pub verts: BTreeSet<usize>,
    pub linkage: Linkage,
}

impl SeparatorOnLinkage {
    pub fn names(&self, d: &Dimaze) -> BTreeSet<VertexId> {
        d.names(&self.verts)
    }
}

/// Result of one augmentation attempt.
#[derive(Debug, Clone)]
pub enum AugmentOutcome {
    /// A strictly larger linkage, together with the walk that produced it.
    Extended {
        linkage: Linkage,
        walk: AlternatingWalk,
    },
    /// No walk reaches `B0 \ V(P)`; a separator on the linkage instead.
    Separated(SeparatorOnLinkage),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Fwd = 0,
    Back = 1,
}

struct WalkSearch {
    visited: Vec<[bool; 2]>,
    parent: Vec<[Option<(usize, Mode)>; 2]>,
}

/// BFS over (vertex, arrival-mode) states. Seeds are `X \ V(P)` in
/// lexicographic order and neighbor expansion is in lexicographic order, so
/// the first walk found is deterministic. States never repeat on a valid
/// walk (each revisit would reuse an edge), so memoization is exact.
fn search_walk(
    d: &Dimaze,
    link: &Linkage,
    sources: &BTreeSet<usize>,
) -> (Option<AlternatingWalk>, WalkSearch) {
    let n = d.vertex_count();
    let mut st = WalkSearch {
        visited: vec![[false; 2]; n],
        parent: vec![[None; 2]; n],
    };
    let pverts = link.vertex_set();
    let pedges = link.edge_set();
    let is_goal = |v: usize| d.is_exit(v) && !pverts.contains(&v);
    let mut queue: VecDeque<(usize, Mode)> = VecDeque::new();
    for &s in sources {
        if pverts.contains(&s) {
            continue;
        }
        st.visited[s][Mode::Fwd as usize] = true;
        if is_goal(s) {
            return (
                Some(AlternatingWalk {
                    verts: vec![s],
                    edges: Vec::new(),
                }),
                st,
            );
        }
        queue.push_back((s, Mode::Fwd));
    }
    while let Some((v, mode)) = queue.pop_front() {
        let on_linkage = pverts.contains(&v);
        // Forward moves are legal unless we just arrived at a linkage
        // vertex over a non-linkage edge (condition 3 forces a switch).
        let may_go_forward = !(on_linkage && mode == Mode::Fwd);
        if may_go_forward {
            for &w in d.out_neighbors(v) {
                if pedges.contains(&(v, w)) {
                    continue;
                }
                if st.visited[w][Mode::Fwd as usize] {
                    continue;
                }
                st.visited[w][Mode::Fwd as usize] = true;
                st.parent[w][Mode::Fwd as usize] = Some((v, mode));
                if is_goal(w) {
                    return (Some(reconstruct(&st, w, Mode::Fwd)), st);
                }
                queue.push_back((w, Mode::Fwd));
            }
        }
        // Backward move along the linkage edge into v, if any.
        if on_linkage {
            if let Some(u) = link.pred(v) {
                if !st.visited[u][Mode::Back as usize] {
                    st.visited[u][Mode::Back as usize] = true;
                    st.parent[u][Mode::Back as usize] = Some((v, mode));
                    queue.push_back((u, Mode::Back));
                }
            }
        }
    }
    (None, st)
}

fn reconstruct(st: &WalkSearch, end: usize, end_mode: Mode) -> AlternatingWalk {
    let mut rev_verts = vec![end];
    let mut rev_edges = Vec::new();
    let (mut v, mut mode) = (end, end_mode);
    while let Some((prev, prev_mode)) = st.parent[v][mode as usize] {
        // Fwd arrival used digraph edge prev -> v; Back arrival walked the
        // linkage edge v -> prev backwards.
        match mode {
            Mode::Fwd => rev_edges.push((prev, v)),
            Mode::Back => rev_edges.push((v, prev)),
        }
        rev_verts.push(prev);
        v = prev;
        mode = prev_mode;
    }
    rev_verts.reverse();
    rev_edges.reverse();
    AlternatingWalk {
        verts: rev_verts,
        edges: rev_edges,
    }
}

/// Rewires the linkage along a successful walk: walked linkage edges are
/// dropped, walked non-linkage edges are added, trivial paths persist.
fn apply_walk(d: &Dimaze, link: &Linkage, walk: &AlternatingWalk) -> Result<Linkage, Error> {
    let pedges = link.edge_set();
    let mut edges: BTreeSet<(usize, usize)> = pedges.clone();
    for (i, &e) in walk.edges.iter().enumerate() {
        let fwd = e == (walk.verts[i], walk.verts[i + 1]);
        if fwd {
            edges.insert(e);
        } else {
            edges.remove(&e);
        }
    }
    let mut trivial: BTreeSet<usize> = link
        .paths()
        .iter()
        .filter(|p| p.is_trivial())
        .map(|p| p.initial())
        .collect();
    if walk.edges.is_empty() {
        trivial.insert(walk.start());
    }
    let n = d.vertex_count();
    let mut succ: Vec<Option<usize>> = vec![None; n];
    let mut indeg = vec![0usize; n];
    for &(t, h) in &edges {
        if succ[t].is_some() {
            return Err(Error::Internal(format!(
                "augmentation left two edges out of {}",
                d.name(t)
            )));
        }
        succ[t] = Some(h);
        indeg[h] += 1;
        if indeg[h] > 1 {
            return Err(Error::Internal(format!(
                "augmentation left two edges into {}",
                d.name(h)
            )));
        }
    }
    let mut paths: Vec<DirectedPath> = Vec::new();
    for v in 0..n {
        let starts_path = succ[v].is_some() && indeg[v] == 0;
        if starts_path {
            let mut seq = vec![v];
            let mut cur = v;
            while let Some(nx) = succ[cur] {
                seq.push(nx);
                cur = nx;
                if seq.len() > n {
                    return Err(Error::Internal("augmentation created a cycle".into()));
                }
            }
            paths.push(DirectedPath::new(d, seq)?);
        }
    }
    for &v in &trivial {
        if indeg[v] == 0 && succ[v].is_none() {
            paths.push(DirectedPath::trivial(v));
        } else {
            return Err(Error::Internal(format!(
                "trivial path at {} was disturbed",
                d.name(v)
            )));
        }
    }
    Linkage::new(d, paths)
}

/// Extracts the separator: on each path the last vertex reached by an
/// alternating walk, or the initial vertex when the walk search reached
/// none of the path.
fn extract_separator(link: &Linkage, st: &WalkSearch) -> SeparatorOnLinkage {
    let mut verts = BTreeSet::new();
    for p in link.paths() {
        let chosen = p
            .verts()
            .iter()
            .rev()
            .find(|&&v| st.visited[v][0] || st.visited[v][1])
            .copied()
            .unwrap_or_else(|| p.initial());
        verts.insert(chosen);
    }
    SeparatorOnLinkage {
        verts,
        linkage: link.clone(),
    }
}

fn check_linkage_in(d: &Dimaze, link: &Linkage, what: &str) -> Result<(), Error> {
    for p in link.paths() {
        for w in p.verts().windows(2) {
            if !d.has_edge(w[0], w[1]) {
                return Err(Error::Contract(format!(
                    "{what} uses a missing edge {} -> {}",
                    d.name(w[0]),
                    d.name(w[1])
                )));
            }
        }
        if !d.is_exit(p.terminal()) {
            return Err(Error::Contract(format!(
                "{what} has a path ending at non-exit {}",
                d.name(p.terminal())
            )));
        }
    }
    Ok(())
}

/// One augmentation round: either a linkage whose initial set grows by the
/// walk's start vertex, or a separator on `link`.
pub fn augment(
    d: &Dimaze,
    x: &BTreeSet<VertexId>,
    link: &Linkage,
) -> Result<AugmentOutcome, Error> {
    let xi = d.resolve_set(x, "augment source set")?;
    augment_idx(d, &xi, link)
}

pub(crate) fn augment_idx(
    d: &Dimaze,
    x: &BTreeSet<usize>,
    link: &Linkage,
) -> Result<AugmentOutcome, Error> {
    check_linkage_in(d, link, "reference linkage")?;
    if !link.ini().is_subset(x) {
        return Err(Error::Contract(
            "reference linkage is not from a subset of X".into(),
        ));
    }
    let (walk, st) = search_walk(d, link, x);
    match walk {
        Some(w) => {
            debug_assert!(validate_walk(d, link, x, &w).is_empty());
            let bigger = apply_walk(d, link, &w)?;
            debug_assert!(link.ini().is_subset(&bigger.ini()));
            debug_assert_eq!(bigger.len(), link.len() + 1);
            Ok(AugmentOutcome::Extended {
                linkage: bigger,
                walk: w,
            })
        }
        None => Ok(AugmentOutcome::Separated(extract_separator(link, &st))),
    }
}

/// Repeated augmentation from the empty linkage: a maximum disjoint-path
/// system from a subset of `X` to the exits, plus an `X`–`B0` separator on
/// it of the same size.
pub fn max_linkage(
    d: &Dimaze,
    x: &BTreeSet<VertexId>,
) -> Result<(Linkage, SeparatorOnLinkage), Error> {
    let xi = d.resolve_set(x, "max_linkage source set")?;
    max_linkage_idx(d, &xi)
}

pub(crate) fn max_linkage_idx(
    d: &Dimaze,
    x: &BTreeSet<usize>,
) -> Result<(Linkage, SeparatorOnLinkage), Error> {
    let mut link = Linkage::empty();
    let cap = d.exits().len() + 1;
    for _ in 0..=cap {
        match augment_idx(d, x, &link)? {
            AugmentOutcome::Extended { linkage, .. } => link = linkage,
            AugmentOutcome::Separated(sep) => {
                debug_assert_eq!(sep.verts.len(), link.len());
                return Ok((link, sep));
            }
        }
    }
    Err(Error::Internal(
        "augmentation failed to terminate within |B0| rounds".into(),
    ))
}

/// True iff some linkage starts exactly at `I`; the witness is returned.
pub fn is_independent(d: &Dimaze, i: &BTreeSet<VertexId>) -> Result<Option<Linkage>, Error> {
    let ii = d.resolve_set(i, "independence query")?;
    is_independent_idx(d, &ii)
}

pub(crate) fn is_independent_idx(
    d: &Dimaze,
    i: &BTreeSet<usize>,
) -> Result<Option<Linkage>, Error> {
    let (link, _) = max_linkage_idx(d, i)?;
    if link.ini() == *i {
        Ok(Some(link))
    } else {
        Ok(None)
    }
}

/// Result of extending a linkage onto the full exit set.
#[derive(Debug, Clone)]
pub enum ExtendOutcome {
    Extended(Linkage),
    /// Exits that cannot be covered; empty on valid finite dimazes.
    Unreachable(BTreeSet<VertexId>),
}

/// Extends a linkage so its terminal set is all of `B0`, keeping the
/// existing initial vertices. In a valid finite dimaze the exits missed by
/// the linkage are free, so trivial paths always complete it.
pub fn extend_onto(d: &Dimaze, link: &Linkage) -> Result<ExtendOutcome, Error> {
    check_linkage_in(d, link, "linkage")?;
    let covered = link.vertex_set();
    let ter = link.ter();
    let blocked: BTreeSet<usize> = d
        .exits()
        .iter()
        .filter(|e| covered.contains(e) && !ter.contains(e))
        .copied()
        .collect();
    if !blocked.is_empty() {
        return Ok(ExtendOutcome::Unreachable(d.names(&blocked)));
    }
    let mut paths: Vec<DirectedPath> = link.paths().to_vec();
    for &e in d.exits() {
        if !ter.contains(&e) {
            paths.push(DirectedPath::trivial(e));
        }
    }
    Ok(ExtendOutcome::Extended(Linkage::new(d, paths)?))
}

/// Outcome of the independence-augmentation step against a maximal set.
#[derive(Debug, Clone)]
pub enum I3Outcome {
    /// `x` in `B \ I` with `I + x` independent, witnessed.
    Extended { x: VertexId, witness: Linkage },
    /// `I` is itself maximal: its witness covers every exit.
    AlreadyMaximal { onto: Linkage },
}

/// Finds `x` in `B \ I` with `I + x` independent, for independent `I` and
/// maximal independent `B`. When `I` is already maximal a maximality report
/// is returned instead.
pub fn augment_toward_base(
    d: &Dimaze,
    i: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
) -> Result<I3Outcome, Error> {
    let ii = d.resolve_set(i, "I")?;
    let bi = d.resolve_set(b, "B")?;
    let wi = is_independent_idx(d, &ii)?
        .ok_or_else(|| Error::Contract("I is not independent".into()))?;
    let wb = is_independent_idx(d, &bi)?
        .ok_or_else(|| Error::Contract("B is not independent".into()))?;
    if wb.ter() != *d.exits() {
        // In a finite dimaze a maximal set is linkable onto the exits and
        // every witness from it covers them all.
        return Err(Error::Contract("B is not maximal".into()));
    }
    if wi.ter() == *d.exits() {
        return Ok(I3Outcome::AlreadyMaximal { onto: wi });
    }
    let mut x_union: BTreeSet<usize> = ii.clone();
    x_union.extend(bi.iter().copied());
    match augment_idx(d, &x_union, &wi)? {
        AugmentOutcome::Extended { linkage, walk } => {
            let x = walk.start();
            debug_assert!(bi.contains(&x) && !ii.contains(&x));
            debug_assert!(linkage.ini().contains(&x));
            Ok(I3Outcome::Extended {
                x: d.name(x).to_string(),
                witness: linkage,
            })
        }
        AugmentOutcome::Separated(sep) => {
            // Unreachable on valid finite inputs: the separator relink
            // would certify a linkage from B missing an exit, contradicting
            // the maximality established above.
            let relink = relink_through_separator(d, &wb, &sep, &wi)?;
            Err(Error::Internal(format!(
                "separator found although B is maximal; relink from B covers only {:?}",
                relink.ter_names(d)
            )))
        }
    }
}

/// The relink step of the augmentation argument: route each path of
/// `from_b` to its first separator vertex, then follow the separated
/// linkage's path from there. The result is a linkage from `Ini(from_b)`
/// that avoids every exit the separated linkage misses.
pub fn relink_through_separator(
    d: &Dimaze,
    from_b: &Linkage,
    sep: &SeparatorOnLinkage,
    through: &Linkage,
) -> Result<Linkage, Error> {
    let mut paths = Vec::new();
    for q in from_b.paths() {
        let s = q
            .verts()
            .iter()
            .find(|v| sep.verts.contains(v))
            .copied()
            .ok_or_else(|| {
                Error::Internal(format!(
                    "path from {} avoids the separator",
                    d.name(q.initial())
                ))
            })?;
        let p = through.path_through(s).ok_or_else(|| {
            Error::Internal("separator vertex off the separated linkage".into())
        })?;
        let mut verts: Vec<usize> = q.up_to(s).to_vec();
        verts.extend(p.strictly_after(s).iter().copied());
        paths.push(DirectedPath::new(d, verts)?);
    }
    Linkage::new(d, paths)
}

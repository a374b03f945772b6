//! Transversal systems on bipartite graphs: matching-based independence,
//! alternating-path augmentation against a maximal set, the stage-indexed
//! maximal-extension algorithm for rooted trees, and the conversion from
//! tree-shaped dimazes.
//!
//! The tree algorithm grows a matching in stages. Stage 0 fixes the upward
//! edges forced by every matching of `I`. A vertex enters the worklist at
//! the first stage at which all of its children are matched; free parents
//! then capture one waiting child each (upward), and waiting `I`-vertices
//! are matched by flipping an alternating path that releases a matched
//! vertex outside `I` (downward). Vertices whose children never all get
//! matched keep a free child and are matched downwards at the end.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::dimaze::{Dimaze, VertexId};
use crate::Error;

/// A bipartite graph with an ordered bipartition (left, right) and an
/// optional root on the right side for tree mode. Both sides are stored
/// sorted; indices are lexicographic ranks within their side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: Vec<VertexId>,
    right: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
    radj: Vec<Vec<usize>>,
    root: Option<usize>,
}

impl BipartiteGraph {
    pub fn new<S: AsRef<str>>(
        left: &[S],
        right: &[S],
        edges: &[(S, S)],
        root: Option<&str>,
    ) -> Result<BipartiteGraph, Error> {
        let mut l: Vec<VertexId> = left.iter().map(|s| s.as_ref().to_string()).collect();
        let mut r: Vec<VertexId> = right.iter().map(|s| s.as_ref().to_string()).collect();
        l.sort();
        l.dedup();
        r.sort();
        r.dedup();
        if let Some(shared) = l.iter().find(|v| r.binary_search(v).is_ok()) {
            return Err(Error::Mode(format!(
                "vertex {shared} appears on both sides of the bipartition"
            )));
        }
        let lidx: BTreeMap<&str, usize> = l.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let ridx: BTreeMap<&str, usize> = r.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut adj = vec![BTreeSet::new(); l.len()];
        let mut radj = vec![BTreeSet::new(); r.len()];
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let li = lidx.get(a).copied().ok_or_else(|| Error::UnknownVertex {
                id: a.to_string(),
                context: "edge (left endpoint)".into(),
            })?;
            let ri = ridx.get(b).copied().ok_or_else(|| Error::UnknownVertex {
                id: b.to_string(),
                context: "edge (right endpoint)".into(),
            })?;
            adj[li].insert(ri);
            radj[ri].insert(li);
        }
        let root = match root {
            None => None,
            Some(id) => Some(ridx.get(id).copied().ok_or_else(|| Error::Mode(format!(
                "root {id} is not a right-side vertex"
            )))?),
        };
        Ok(BipartiteGraph {
            left: l,
            right: r,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
            radj: radj.into_iter().map(|s| s.into_iter().collect()).collect(),
            root,
        })
    }

    pub fn left(&self) -> &[VertexId] {
        &self.left
    }

    pub fn right(&self) -> &[VertexId] {
        &self.right
    }

    pub fn left_idx(&self, id: &str) -> Option<usize> {
        self.left.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    pub fn right_idx(&self, id: &str) -> Option<usize> {
        self.right.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    pub fn neighbors_of_left(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn neighbors_of_right(&self, r: usize) -> &[usize] {
        &self.radj[r]
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum()
    }

    pub fn left_names(&self, set: &BTreeSet<usize>) -> BTreeSet<VertexId> {
        set.iter().map(|&l| self.left[l].clone()).collect()
    }

    pub fn resolve_left_set(&self, ids: &BTreeSet<VertexId>) -> Result<BTreeSet<usize>, Error> {
        ids.iter()
            .map(|id| {
                self.left_idx(id).ok_or_else(|| Error::UnknownVertex {
                    id: id.clone(),
                    context: "left-side set".into(),
                })
            })
            .collect()
    }

    /// Connected and acyclic over both sides, with a root on the right.
    pub fn is_rooted_tree(&self) -> bool {
        if self.root.is_none() {
            return false;
        }
        let n = self.left.len() + self.right.len();
        if n == 0 {
            return false;
        }
        if self.edge_count() + 1 != n {
            return false;
        }
        // connectivity by BFS over the bipartite adjacency
        let mut seen_l = vec![false; self.left.len()];
        let mut seen_r = vec![false; self.right.len()];
        let mut queue = VecDeque::new();
        seen_r[self.root.unwrap()] = true;
        queue.push_back((false, self.root.unwrap()));
        let mut count = 1;
        while let Some((is_left, v)) = queue.pop_front() {
            let nexts: &[usize] = if is_left { &self.adj[v] } else { &self.radj[v] };
            for &w in nexts {
                let seen = if is_left { &mut seen_r[w] } else { &mut seen_l[w] };
                if !*seen {
                    *seen = true;
                    count += 1;
                    queue.push_back((!is_left, w));
                }
            }
        }
        count == n
    }

    /// Parent (upward neighbor) of a left vertex in tree mode: the unique
    /// right neighbor on the path toward the root.
    fn tree_parents(&self) -> Result<(Vec<usize>, Vec<Option<usize>>), Error> {
        if !self.is_rooted_tree() {
            return Err(Error::Mode("input is not a rooted bipartite tree".into()));
        }
        let root = self.root.unwrap();
        let mut lp = vec![usize::MAX; self.left.len()];
        let mut rp: Vec<Option<usize>> = vec![None; self.right.len()];
        let mut queue = VecDeque::new();
        queue.push_back((false, root));
        let mut seen_l = vec![false; self.left.len()];
        let mut seen_r = vec![false; self.right.len()];
        seen_r[root] = true;
        while let Some((is_left, v)) = queue.pop_front() {
            if is_left {
                for &w in &self.adj[v] {
                    if !seen_r[w] {
                        seen_r[w] = true;
                        rp[w] = Some(v);
                        queue.push_back((false, w));
                    }
                }
            } else {
                for &w in &self.radj[v] {
                    if !seen_l[w] {
                        seen_l[w] = true;
                        lp[w] = v;
                        queue.push_back((true, w));
                    }
                }
            }
        }
        Ok((lp, rp))
    }

    /// `bigraph v1` text format.
    pub fn serialize(&self) -> String {
        let mut s = String::from("bigraph v1\n");
        for v in &self.left {
            s.push_str(&format!("left {v}\n"));
        }
        for v in &self.right {
            s.push_str(&format!("right {v}\n"));
        }
        if let Some(r) = self.root {
            s.push_str(&format!("root {}\n", self.right[r]));
        }
        for (l, outs) in self.adj.iter().enumerate() {
            for &r in outs {
                s.push_str(&format!("edge {} {}\n", self.left[l], self.right[r]));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<BipartiteGraph, Error> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut edges = Vec::new();
        let mut root: Option<String> = None;
        let mut seen_header = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = ln + 1;
            if !seen_header {
                if line == "bigraph v1" {
                    seen_header = true;
                    continue;
                }
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header `bigraph v1`, found `{line}`"),
                });
            }
            let mut tok = line.split_whitespace();
            let kw = tok.next().unwrap();
            let args: Vec<&str> = tok.collect();
            match (kw, args.as_slice()) {
                ("left", [id]) => left.push(id.to_string()),
                ("right", [id]) => right.push(id.to_string()),
                ("root", [id]) => root = Some(id.to_string()),
                ("edge", [a, b]) => edges.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("malformed line `{line}`"),
                    })
                }
            }
        }
        if !seen_header {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header `bigraph v1`".to_string(),
            });
        }
        BipartiteGraph::new(&left, &right, &edges, root.as_deref())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "left": self.left,
            "right": self.right,
            "root": self.root.map(|r| self.right[r].clone()),
            "edges": self
                .adj
                .iter()
                .enumerate()
                .flat_map(|(l, outs)| {
                    outs.iter()
                        .map(move |&r| (l, r))
                })
                .map(|(l, r)| vec![self.left[l].clone(), self.right[r].clone()])
                .collect::<Vec<_>>(),
        })
    }
}

/// A matching stored as a left-to-right map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: BTreeMap<usize, usize>,
}

impl Matching {
    pub fn pairs(&self) -> &BTreeMap<usize, usize> {
        &self.pairs
    }

    pub fn left_vertices(&self) -> BTreeSet<usize> {
        self.pairs.keys().copied().collect()
    }

    pub fn right_vertices(&self) -> BTreeSet<usize> {
        self.pairs.values().copied().collect()
    }

    pub fn partner_of_left(&self, l: usize) -> Option<usize> {
        self.pairs.get(&l).copied()
    }

    pub fn partner_of_right(&self, r: usize) -> Option<usize> {
        self.pairs.iter().find(|&(_, &pr)| pr == r).map(|(&l, _)| l)
    }

    pub fn insert(&mut self, l: usize, r: usize) {
        self.pairs.insert(l, r);
    }

    pub fn named(&self, g: &BipartiteGraph) -> Vec<(VertexId, VertexId)> {
        self.pairs
            .iter()
            .map(|(&l, &r)| (g.left[l].clone(), g.right[r].clone()))
            .collect()
    }

    fn is_consistent(&self) -> bool {
        let rs: BTreeSet<usize> = self.pairs.values().copied().collect();
        rs.len() == self.pairs.len()
    }
}

/// Kuhn-style augmenting search for one left vertex, deterministic through
/// sorted adjacency. `allowed` filters usable (left, right) edges and is
/// honored when matched vertices get displaced too.
fn try_assign(
    g: &BipartiteGraph,
    l: usize,
    right_owner: &mut Vec<Option<usize>>,
    visited: &mut Vec<bool>,
    allowed: &dyn Fn(usize, usize) -> bool,
) -> bool {
    for &r in &g.adj[l] {
        if !allowed(l, r) || visited[r] {
            continue;
        }
        visited[r] = true;
        let free = match right_owner[r] {
            None => true,
            Some(owner) => try_assign(g, owner, right_owner, visited, allowed),
        };
        if free {
            right_owner[r] = Some(l);
            return true;
        }
    }
    false
}

/// True iff a matching saturates `I`, with the matching as witness.
pub fn mt_is_independent(
    g: &BipartiteGraph,
    i: &BTreeSet<VertexId>,
) -> Result<Option<Matching>, Error> {
    let ii = g.resolve_left_set(i)?;
    Ok(mt_is_independent_idx(g, &ii))
}

pub(crate) fn mt_is_independent_idx(g: &BipartiteGraph, i: &BTreeSet<usize>) -> Option<Matching> {
    let mut right_owner: Vec<Option<usize>> = vec![None; g.right.len()];
    for &l in i {
        let mut visited = vec![false; g.right.len()];
        if !try_assign(g, l, &mut right_owner, &mut visited, &|_, _| true) {
            return None;
        }
    }
    let mut m = Matching::default();
    for (r, owner) in right_owner.iter().enumerate() {
        if let Some(l) = *owner {
            m.insert(l, r);
        }
    }
    debug_assert!(m.is_consistent());
    Some(m)
}

/// Augments independent non-maximal `I` against maximal `B`: picks an
/// extension vertex, prefers one inside `B`, and otherwise walks the
/// alternating path between the two witness matchings until it leaves the
/// extended one at some `y` in `B \ I`. Returns `y` and a matching of
/// `I + y`.
pub fn mt_augment(
    g: &BipartiteGraph,
    i: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
) -> Result<(VertexId, Matching), Error> {
    let ii = g.resolve_left_set(i)?;
    let bi = g.resolve_left_set(b)?;
    if mt_is_independent_idx(g, &ii).is_none() {
        return Err(Error::Contract("I is not independent".into()));
    }
    let mb = mt_is_independent_idx(g, &bi)
        .ok_or_else(|| Error::Contract("B is not independent".into()))?;
    // maximality of B: no single vertex extends it
    for l in 0..g.left.len() {
        if bi.contains(&l) {
            continue;
        }
        let mut probe = bi.clone();
        probe.insert(l);
        if mt_is_independent_idx(g, &probe).is_some() {
            return Err(Error::Contract("B is not maximal".into()));
        }
    }
    // extension vertex for I: prefer one inside B
    let mut candidates: Vec<usize> = bi.difference(&ii).copied().collect();
    candidates.extend((0..g.left.len()).filter(|l| !ii.contains(l) && !bi.contains(l)));
    let mut chosen = None;
    for x in candidates {
        let mut probe = ii.clone();
        probe.insert(x);
        if let Some(m) = mt_is_independent_idx(g, &probe) {
            chosen = Some((x, m));
            break;
        }
    }
    let Some((x, m)) = chosen else {
        return Err(Error::Contract("I is already maximal".into()));
    };
    if bi.contains(&x) {
        return Ok((g.left[x].clone(), m));
    }
    // The alternating walk between m (matching I + x) and mb (matching B)
    // starting at x is forced: each vertex carries at most one edge of each
    // matching. It cannot end at a right vertex free in mb (that would
    // extend B), so it ends at a left vertex y free in m, and flipping the
    // walk's m-edges to its mb-edges matches I + y.
    let mut walk_lefts = vec![x];
    let mut walk_rights = Vec::new();
    let mut cur = x;
    let y = loop {
        if walk_lefts.len() > g.left.len() + 1 {
            return Err(Error::Internal("alternating walk failed to terminate".into()));
        }
        let r = m
            .partner_of_left(cur)
            .ok_or_else(|| Error::Internal("walk vertex lost its matching edge".into()))?;
        walk_rights.push(r);
        let v = mb.partner_of_right(r).ok_or_else(|| {
            Error::Internal("alternating walk ended at a right vertex free in mb".into())
        })?;
        walk_lefts.push(v);
        if m.partner_of_left(v).is_none() {
            break v;
        }
        cur = v;
    };
    debug_assert!(bi.contains(&y) && !ii.contains(&y));
    let mut pairs = m.pairs().clone();
    pairs.remove(&x);
    for j in 1..walk_lefts.len() {
        pairs.insert(walk_lefts[j], walk_rights[j - 1]);
    }
    let flipped = Matching { pairs };
    if !flipped.is_consistent() {
        return Err(Error::Internal("flipped walk is not a matching".into()));
    }
    let mut expect = ii.clone();
    expect.insert(y);
    if flipped.left_vertices() != expect {
        return Err(Error::Internal("flipped walk does not match I + y".into()));
    }
    Ok((g.left[y].clone(), flipped))
}

/// One stage of the tree extension.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub stage: usize,
    /// m^alpha as (left, right) name pairs.
    pub matching: Vec<(VertexId, VertexId)>,
    /// Left vertices matched at this stage.
    pub matched_left: BTreeSet<VertexId>,
    /// Right vertices matched at this stage.
    pub matched_right: BTreeSet<VertexId>,
    /// Vertices whose children all became matched at this stage (C^alpha).
    pub newly_saturated: BTreeSet<VertexId>,
    /// Chosen representative child per free parent (S^alpha).
    pub representatives: BTreeSet<VertexId>,
    /// Alternating exchange paths, alternating left/right names.
    pub exchange_paths: Vec<Vec<VertexId>>,
}

/// Result of the stage algorithm: a maximal independent superset of `I`
/// with its witness matching and the full stage history.
#[derive(Debug, Clone)]
pub struct TreeExtension {
    pub base: BTreeSet<VertexId>,
    pub matching: Matching,
    pub stages: Vec<StageRecord>,
    /// Forced upward edges (m^0) as name pairs.
    pub forced: Vec<(VertexId, VertexId)>,
}

/// Extends independent `I` to a maximal independent set in a rooted
/// bipartite tree, by the stage construction. The returned base is
/// re-verified maximal by augmentation attempts from every outside vertex.
pub fn tree_maximal_extension(
    g: &BipartiteGraph,
    i: &BTreeSet<VertexId>,
) -> Result<TreeExtension, Error> {
    let (lparent, _rparent) = g.tree_parents()?;
    let ii = g.resolve_left_set(i)?;
    if mt_is_independent_idx(g, &ii).is_none() {
        return Err(Error::Contract("I is not independent".into()));
    }
    let nl = g.left.len();
    let children = |l: usize| -> Vec<usize> {
        g.adj[l].iter().copied().filter(|&r| r != lparent[l]).collect()
    };

    // m^0: upward edges used by every matching of I. The upward edge of v
    // is forced exactly when no matching of I matches v downwards; the
    // restriction applies whenever v gets (re)assigned, displacements
    // included.
    let mut matching = Matching::default();
    for &v in &ii {
        let downs: BTreeSet<usize> = children(v).into_iter().collect();
        let mut down_possible = false;
        if !downs.is_empty() {
            let allowed = |l: usize, r: usize| l != v || downs.contains(&r);
            let mut right_owner: Vec<Option<usize>> = vec![None; g.right.len()];
            let mut ok = true;
            for &u in std::iter::once(&v).chain(ii.iter().filter(|&&u| u != v)) {
                let mut visited = vec![false; g.right.len()];
                if !try_assign(g, u, &mut right_owner, &mut visited, &allowed) {
                    ok = false;
                    break;
                }
            }
            down_possible = ok;
        }
        if !down_possible {
            matching.insert(v, lparent[v]);
        }
    }
    let forced: Vec<(VertexId, VertexId)> = matching.named(g);

    let mut stages: Vec<StageRecord> = Vec::new();
    let mut triggered: Vec<Option<usize>> = vec![None; nl]; // first-saturation stage

    let record_stage = |stage: usize,
                        matching: &Matching,
                        newly: &BTreeSet<usize>,
                        reps: &BTreeSet<usize>,
                        paths: &[Vec<(bool, usize)>],
                        g: &BipartiteGraph|
     -> StageRecord {
        StageRecord {
            stage,
            matching: matching.named(g),
            matched_left: g.left_names(&matching.left_vertices()),
            matched_right: matching
                .right_vertices()
                .iter()
                .map(|&r| g.right[r].clone())
                .collect(),
            newly_saturated: g.left_names(newly),
            representatives: g.left_names(reps),
            exchange_paths: paths
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|&(is_left, v)| {
                            if is_left {
                                g.left[v].clone()
                            } else {
                                g.right[v].clone()
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    };

    let max_stages = nl + 2;
    let mut stage = 0usize;
    loop {
        if stage > max_stages {
            return Err(Error::Internal("stage loop failed to terminate".into()));
        }
        let matched_right = matching.right_vertices();
        let matched_left = matching.left_vertices();
        // newly saturated: all children matched, first time, not matched
        let mut newly: BTreeSet<usize> = BTreeSet::new();
        for v in 0..nl {
            if triggered[v].is_some() {
                continue;
            }
            if children(v).iter().all(|r| matched_right.contains(r)) {
                triggered[v] = Some(stage);
                if !matched_left.contains(&v) {
                    newly.insert(v);
                }
            }
        }
        if stage == 0 && newly.iter().any(|v| ii.contains(v)) {
            return Err(Error::Internal(
                "an I-vertex waits at stage 0 although its upward edge is not forced".into(),
            ));
        }
        // representatives: each free parent captures its least waiting child
        let mut reps: BTreeSet<usize> = BTreeSet::new();
        let mut rep_edges: Vec<(usize, usize)> = Vec::new();
        for r in 0..g.right.len() {
            if matched_right.contains(&r) {
                continue;
            }
            let cand = g.radj[r]
                .iter()
                .copied()
                .filter(|v| newly.contains(v) && lparent[*v] == r)
                .min();
            if let Some(v) = cand {
                reps.insert(v);
                rep_edges.push((v, r));
            }
        }
        // exchange paths for waiting I-vertices not captured upward
        let waiting: Vec<usize> = newly
            .iter()
            .copied()
            .filter(|v| ii.contains(v) && !reps.contains(v))
            .collect();
        let mut paths: Vec<Vec<(bool, usize)>> = Vec::new();
        let w0: BTreeSet<usize> = forced
            .iter()
            .map(|(_, rn)| g.right_idx(rn).unwrap())
            .collect();
        for &v in &waiting {
            let mut path: Vec<(bool, usize)> = vec![(true, v)];
            let mut cur = v;
            let mut guard = 0;
            loop {
                guard += 1;
                if guard > nl + 2 {
                    return Err(Error::Internal("exchange path failed to terminate".into()));
                }
                // descend over a child not matched at stage 0
                let w = children(cur)
                    .into_iter()
                    .filter(|r| !w0.contains(r))
                    .min()
                    .ok_or_else(|| {
                        Error::Internal("waiting vertex has no unforced child".into())
                    })?;
                if !matching.right_vertices().contains(&w) {
                    return Err(Error::Internal("exchange path met an unmatched child".into()));
                }
                let next = matching.partner_of_right(w).unwrap();
                path.push((false, w));
                path.push((true, next));
                if !ii.contains(&next) {
                    break;
                }
                cur = next;
            }
            paths.push(path);
        }
        // pairwise disjointness of the exchange paths
        {
            let mut seen: BTreeSet<(bool, usize)> = BTreeSet::new();
            for p in &paths {
                for &node in p {
                    if !seen.insert(node) {
                        return Err(Error::Internal("exchange paths intersect".into()));
                    }
                }
            }
        }
        stages.push(record_stage(stage, &matching, &newly, &reps, &paths, g));
        if newly.is_empty() {
            break;
        }
        // next matching: representative upward edges plus the flips
        let mut next = matching.clone();
        for p in &paths {
            // path v w0 v1 w1 ... r: match each left vertex to the right
            // vertex that follows it on the path; r loses its edge.
            let mut lefts = Vec::new();
            let mut rights = Vec::new();
            for &(is_left, v) in p {
                if is_left {
                    lefts.push(v);
                } else {
                    rights.push(v);
                }
            }
            // lefts = v, v1, ..., r ; rights = w0, w1, ...
            let released = *lefts.last().unwrap();
            next.pairs.remove(&released);
            for (k, &w) in rights.iter().enumerate() {
                next.pairs.insert(lefts[k], w);
            }
        }
        for &(v, r) in &rep_edges {
            next.pairs.insert(v, r);
        }
        if !next.is_consistent() {
            return Err(Error::Internal("stage update broke the matching".into()));
        }
        // monotonicity: matched right vertices never shrink, matched
        // I-vertices never shrink
        let prev_right = matching.right_vertices();
        let next_right = next.right_vertices();
        if !prev_right.is_subset(&next_right) {
            return Err(Error::Internal("matched right set shrank".into()));
        }
        let prev_i: BTreeSet<usize> = matching
            .left_vertices()
            .intersection(&ii)
            .copied()
            .collect();
        let next_i: BTreeSet<usize> = next.left_vertices().intersection(&ii).copied().collect();
        if !prev_i.is_subset(&next_i) {
            return Err(Error::Internal("matched I-vertices shrank".into()));
        }
        matching = next;
        stage += 1;
    }

    // unconsidered vertices keep a free child: match them downwards
    let matched_right = matching.right_vertices();
    let mut base_idx: BTreeSet<usize> = matching.left_vertices();
    for v in 0..nl {
        if triggered[v].is_some() || matching.partner_of_left(v).is_some() {
            continue;
        }
        let w = children(v)
            .into_iter()
            .filter(|r| !matched_right.contains(r))
            .min()
            .ok_or_else(|| Error::Internal("unsaturated vertex has no free child".into()))?;
        matching.insert(v, w);
        base_idx.insert(v);
    }
    if !matching.is_consistent() {
        return Err(Error::Internal("final downward edges collide".into()));
    }
    if !ii.is_subset(&base_idx) {
        return Err(Error::Internal("extension lost a vertex of I".into()));
    }
    // independent per the matching; re-verify maximality by augmentation
    for v in 0..nl {
        if base_idx.contains(&v) {
            continue;
        }
        let mut probe = base_idx.clone();
        probe.insert(v);
        if mt_is_independent_idx(g, &probe).is_some() {
            return Err(Error::Internal(format!(
                "extension is not maximal: {} still fits",
                g.left[v]
            )));
        }
    }
    let ext = TreeExtension {
        base: g.left_names(&base_idx),
        matching,
        stages,
        forced,
    };
    validate_extension_history(g, i, &ext).map_err(Error::Internal)?;
    Ok(ext)
}

/// Standalone checker for the stage history's invariants: the matched
/// right side and the matched part of `I` grow monotonically, any vertex
/// of `I` or of the right side changes partner at most once and only from
/// its upward edge to a downward one, and every exchange path starts at a
/// waiting `I`-vertex with a downward non-matching edge, alternates with
/// the stage's matching, and stops at the first matched vertex outside
/// `I`, the family being pairwise disjoint.
pub fn validate_extension_history(
    g: &BipartiteGraph,
    i: &BTreeSet<VertexId>,
    ext: &TreeExtension,
) -> Result<(), String> {
    let (lparent, _) = g.tree_parents().map_err(|e| e.to_string())?;
    let ii = g.resolve_left_set(i).map_err(|e| e.to_string())?;
    let stage_matchings: Vec<BTreeMap<usize, usize>> = ext
        .stages
        .iter()
        .map(|s| {
            s.matching
                .iter()
                .map(|(l, r)| (g.left_idx(l).unwrap(), g.right_idx(r).unwrap()))
                .collect()
        })
        .collect();
    for w in stage_matchings.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let prev_r: BTreeSet<usize> = prev.values().copied().collect();
        let cur_r: BTreeSet<usize> = cur.values().copied().collect();
        if !prev_r.is_subset(&cur_r) {
            return Err("matched right side shrank between stages".into());
        }
        let prev_i: BTreeSet<usize> = prev.keys().filter(|l| ii.contains(l)).copied().collect();
        let cur_i: BTreeSet<usize> = cur.keys().filter(|l| ii.contains(l)).copied().collect();
        if !prev_i.is_subset(&cur_i) {
            return Err("matched part of I shrank between stages".into());
        }
    }
    // single flip, upward then downward, for I-vertices and right vertices
    for v in 0..g.left.len() {
        if !ii.contains(&v) {
            continue;
        }
        let mut partners: Vec<usize> = Vec::new();
        for m in &stage_matchings {
            if let Some(&r) = m.get(&v) {
                if partners.last() != Some(&r) {
                    partners.push(r);
                }
            }
        }
        if partners.len() > 2 {
            return Err(format!("I-vertex {} changed partner twice", g.left[v]));
        }
        if partners.len() == 2 && (partners[0] != lparent[v] || partners[1] == lparent[v]) {
            return Err(format!(
                "I-vertex {} changed partner other than upward-to-downward",
                g.left[v]
            ));
        }
    }
    for r in 0..g.right.len() {
        let mut partners: Vec<usize> = Vec::new();
        for m in &stage_matchings {
            if let Some(l) = m.iter().find(|&(_, &pr)| pr == r).map(|(&l, _)| l) {
                if partners.last() != Some(&l) {
                    partners.push(l);
                }
            }
        }
        if partners.len() > 2 {
            return Err(format!("right vertex {} changed partner twice", g.right[r]));
        }
        if partners.len() == 2 && (lparent[partners[0]] != r || lparent[partners[1]] == r) {
            return Err(format!(
                "right vertex {} changed partner other than upward-to-downward",
                g.right[r]
            ));
        }
    }
    // exchange path shape per stage
    for (s, m) in ext.stages.iter().zip(&stage_matchings) {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for p in &s.exchange_paths {
            if p.len() < 3 || p.len() % 2 == 0 {
                return Err("exchange path has the wrong shape".into());
            }
            for name in p {
                if !seen.insert(name.clone()) {
                    return Err("exchange paths intersect".into());
                }
            }
            let start = g.left_idx(&p[0]).ok_or("exchange path starts off the left side")?;
            if !ii.contains(&start) || !s.newly_saturated.contains(&p[0]) {
                return Err("exchange path starts outside the waiting I-vertices".into());
            }
            if m.contains_key(&start) {
                return Err("exchange path starts at a matched vertex".into());
            }
            for (j, pair) in p.windows(2).enumerate() {
                if j % 2 == 0 {
                    // left -> right over a downward non-matching edge
                    let l = g.left_idx(&pair[0]).ok_or("bad path vertex")?;
                    let r = g.right_idx(&pair[1]).ok_or("bad path vertex")?;
                    if lparent[l] == r {
                        return Err("exchange path uses an upward edge downwards".into());
                    }
                    if m.get(&l) == Some(&r) {
                        return Err("exchange path step should avoid the matching".into());
                    }
                } else {
                    // right -> left over a matching edge
                    let r = g.right_idx(&pair[0]).ok_or("bad path vertex")?;
                    let l = g.left_idx(&pair[1]).ok_or("bad path vertex")?;
                    if m.get(&l) != Some(&r) {
                        return Err("exchange path step should follow the matching".into());
                    }
                }
            }
            // interior left vertices lie in I, the endpoint does not
            for (j, name) in p.iter().enumerate().step_by(2) {
                let l = g.left_idx(name).ok_or("bad path vertex")?;
                let last = j + 1 == p.len();
                if last {
                    if ii.contains(&l) {
                        return Err("exchange path ends inside I".into());
                    }
                    if !m.contains_key(&l) {
                        return Err("exchange path ends at an unmatched vertex".into());
                    }
                } else if j > 0 && !ii.contains(&l) {
                    return Err("exchange path passes a non-I vertex before its end".into());
                }
            }
        }
    }
    Ok(())
}

/// Converts a dimaze whose underlying graph is a tree, with the exits one
/// bipartition class and every edge pointing at an exit, into a bipartite
/// graph: left side is the non-exits plus one primed copy per exit, right
/// side is the exits, and each exit gains an edge to its copy. The
/// linkability system of the dimaze and the transversal system of the
/// result coincide under `b <-> b'`.
pub fn dimaze_tree_to_bipartite(d: &Dimaze) -> Result<BipartiteGraph, Error> {
    let n = d.vertex_count();
    // underlying graph must be a tree: connected, |E| = n - 1
    if n == 0 {
        return Err(Error::Mode("empty dimaze".into()));
    }
    if d.edges().len() + 1 != n {
        return Err(Error::Mode("underlying graph is not a tree".into()));
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in d.out_neighbors(v).iter().chain(d.in_neighbors(v)) {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    if count != n {
        return Err(Error::Mode("underlying graph is not connected".into()));
    }
    // every edge points at an exit, no edge joins two exits
    for &(t, h) in d.edges() {
        if !d.is_exit(h) || d.is_exit(t) {
            return Err(Error::Mode(
                "edges must run from non-exits to exits".into(),
            ));
        }
    }
    // exits form one bipartition class: every neighbor of a non-exit is an
    // exit (covered above) and the graph is connected, so the classes are
    // exactly exits / non-exits unless some non-exit is isolated with
    // exits absent; tree connectivity already rules that out.
    let left: Vec<String> = (0..n)
        .filter(|&v| !d.is_exit(v))
        .map(|v| d.name(v).to_string())
        .chain(d.exits().iter().map(|&e| format!("{}'", d.name(e))))
        .collect();
    let right: Vec<String> = d.exits().iter().map(|&e| d.name(e).to_string()).collect();
    let mut edges: Vec<(String, String)> = d
        .edges()
        .iter()
        .map(|&(t, h)| (d.name(t).to_string(), d.name(h).to_string()))
        .collect();
    for &e in d.exits() {
        edges.push((format!("{}'", d.name(e)), d.name(e).to_string()));
    }
    let root = right.iter().min().cloned();
    BipartiteGraph::new(&left, &right, &edges, root.as_deref())
}

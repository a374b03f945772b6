//! The dimaze data model: digraphs with sink exits, directed paths and
//! disjoint-path linkages, plus the `dimaze v1` text format, JSON and DOT.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Vertex identifiers are arbitrary non-whitespace strings; their
/// lexicographic order drives every deterministic tie-break in the crate.
pub type VertexId = String;

/// A finite digraph with a distinguished set of out-degree-0 *exits*.
///
/// Vertices are stored sorted, so a vertex's index is its lexicographic
/// rank. The structural rules (no self-loops, exits without out-edges) are
/// not enforced on construction; [`Dimaze::violations`] reports them so a
/// broken input can be diagnosed rather than rejected wholesale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimaze {
    verts: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    edges: BTreeSet<(usize, usize)>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    exits: BTreeSet<usize>,
}

impl Dimaze {
    /// Builds a dimaze from vertex names, (tail, head) edge pairs and exit
    /// names. Fails only on references to undeclared vertices; structural
    /// violations are left for [`Dimaze::violations`].
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S)],
        exits: &[S],
    ) -> Result<Dimaze, Error> {
        let mut verts: Vec<VertexId> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        verts.sort();
        verts.dedup();
        let index: BTreeMap<VertexId, usize> = verts
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let look = |id: &str, context: &str| -> Result<usize, Error> {
            index.get(id).copied().ok_or_else(|| Error::UnknownVertex {
                id: id.to_string(),
                context: context.to_string(),
            })
        };
        let mut eset = BTreeSet::new();
        for (t, h) in edges {
            let t = look(t.as_ref(), "edge")?;
            let h = look(h.as_ref(), "edge")?;
            eset.insert((t, h));
        }
        let mut exs = BTreeSet::new();
        for e in exits {
            exs.insert(look(e.as_ref(), "exit")?);
        }
        let mut out = vec![Vec::new(); verts.len()];
        let mut inn = vec![Vec::new(); verts.len()];
        for &(t, h) in &eset {
            out[t].push(h);
            inn[h].push(t);
        }
        // BTreeSet iteration already yields sorted adjacency.
        Ok(Dimaze {
            verts,
            index,
            edges: eset,
            out,
            inn,
            exits: exs,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    /// Vertex names in lexicographic order; index `i` names vertex `i`.
    pub fn vertices(&self) -> &[VertexId] {
        &self.verts
    }

    pub fn name(&self, v: usize) -> &str {
        &self.verts[v]
    }

    pub fn idx(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Resolves a name, reporting a reference error with the given context.
    pub fn resolve(&self, id: &str, context: &str) -> Result<usize, Error> {
        self.idx(id).ok_or_else(|| Error::UnknownVertex {
            id: id.to_string(),
            context: context.to_string(),
        })
    }

    /// Resolves a whole set of names.
    pub fn resolve_set(&self, ids: &BTreeSet<VertexId>, context: &str) -> Result<BTreeSet<usize>, Error> {
        ids.iter().map(|id| self.resolve(id, context)).collect()
    }

    pub fn names(&self, set: &BTreeSet<usize>) -> BTreeSet<VertexId> {
        set.iter().map(|&v| self.verts[v].clone()).collect()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, tail: usize, head: usize) -> bool {
        self.edges.contains(&(tail, head))
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    /// Exit indices (the set `B0`).
    pub fn exits(&self) -> &BTreeSet<usize> {
        &self.exits
    }

    pub fn exit_names(&self) -> BTreeSet<VertexId> {
        self.names(&self.exits)
    }

    pub fn is_exit(&self, v: usize) -> bool {
        self.exits.contains(&v)
    }

    /// Every violation of the structural rules, in a stable order. An empty
    /// list means the dimaze is valid. Duplicate edges and dangling
    /// references cannot be represented, so the checks are: no self-loops,
    /// and every exit has out-degree 0.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &(t, h) in &self.edges {
            if t == h {
                out.push(format!("self-loop at {}", self.verts[t]));
            }
        }
        for &e in &self.exits {
            let deg = self.out[e].len();
            if deg > 0 {
                out.push(format!("exit {} has out-degree {}", self.verts[e], deg));
            }
        }
        out.sort();
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }

    /// Canonical `dimaze v1` text: header, sorted vertices, sorted exits,
    /// sorted edges. `parse` of this text reproduces the dimaze exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::from("dimaze v1\n");
        for v in &self.verts {
            s.push_str(&format!("vertex {v}\n"));
        }
        for &e in &self.exits {
            s.push_str(&format!("exit {}\n", self.verts[e]));
        }
        for &(t, h) in &self.edges {
            s.push_str(&format!("edge {} {}\n", self.verts[t], self.verts[h]));
        }
        s
    }

    /// Parses the `dimaze v1` text format. `#` starts a comment; blank
    /// lines are ignored; vertices must be declared before use.
    pub fn parse(text: &str) -> Result<Dimaze, Error> {
        let mut verts: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String)> = Vec::new();
        let mut exits: Vec<String> = Vec::new();
        let mut seen_header = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = ln + 1;
            if !seen_header {
                if line == "dimaze v1" {
                    seen_header = true;
                    continue;
                }
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header `dimaze v1`, found `{line}`"),
                });
            }
            let mut tok = line.split_whitespace();
            let kw = tok.next().unwrap();
            let args: Vec<&str> = tok.collect();
            match (kw, args.as_slice()) {
                ("vertex", [id]) => verts.push(id.to_string()),
                ("exit", [id]) => exits.push(id.to_string()),
                ("edge", [t, h]) => edges.push((t.to_string(), h.to_string())),
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
                msg: "missing header `dimaze v1`".to_string(),
            });
        }
        // Reference errors: edge/exit names must be declared vertices.
        let declared: BTreeSet<&str> = verts.iter().map(|s| s.as_str()).collect();
        for (t, h) in &edges {
            for id in [t, h] {
                if !declared.contains(id.as_str()) {
                    return Err(Error::UnknownVertex {
                        id: id.clone(),
                        context: "edge".to_string(),
                    });
                }
            }
        }
        for id in &exits {
            if !declared.contains(id.as_str()) {
                return Err(Error::UnknownVertex {
                    id: id.clone(),
                    context: "exit".to_string(),
                });
            }
        }
        Dimaze::new(&verts, &edges, &exits)
    }

    /// JSON mirror of the field structure: vertices, edges, exits.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.verts,
            "edges": self
                .edges
                .iter()
                .map(|&(t, h)| vec![self.verts[t].clone(), self.verts[h].clone()])
                .collect::<Vec<_>>(),
            "exits": self.exits.iter().map(|&e| self.verts[e].clone()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Dimaze, Error> {
        #[derive(Deserialize, Serialize)]
        struct Raw {
            vertices: Vec<String>,
            edges: Vec<(String, String)>,
            exits: Vec<String>,
        }
        let raw: Raw = serde_json::from_value(value.clone()).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("bad dimaze json: {e}"),
        })?;
        Dimaze::new(&raw.vertices, &raw.edges, &raw.exits)
    }

    /// GraphViz DOT; exits are drawn as doubled nodes.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph dimaze {\n");
        for (i, v) in self.verts.iter().enumerate() {
            let shape = if self.exits.contains(&i) { "doublecircle" } else { "circle" };
            s.push_str(&format!("  \"{v}\" [shape={shape}];\n"));
        }
        for &(t, h) in &self.edges {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n", self.verts[t], self.verts[h]));
        }
        s.push_str("}\n");
        s
    }
}

/// Free-function form of [`Dimaze::violations`].
pub fn validate(d: &Dimaze) -> Vec<String> {
    d.violations()
}

/// A directed path in a host dimaze, stored as vertex indices. A single
/// vertex is a valid (trivial) path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DirectedPath {
    verts: Vec<usize>,
}

impl DirectedPath {
    /// A path must be nonempty with distinct vertices; consecutive pairs
    /// must be edges of `d`.
    pub fn new(d: &Dimaze, verts: Vec<usize>) -> Result<DirectedPath, Error> {
        if verts.is_empty() {
            return Err(Error::Contract("a path has at least one vertex".into()));
        }
        let distinct: BTreeSet<usize> = verts.iter().copied().collect();
        if distinct.len() != verts.len() {
            return Err(Error::Contract(format!(
                "path {:?} repeats a vertex",
                verts.iter().map(|&v| d.name(v)).collect::<Vec<_>>()
            )));
        }
        for w in verts.windows(2) {
            if !d.has_edge(w[0], w[1]) {
                return Err(Error::Contract(format!(
                    "missing edge {} -> {}",
                    d.name(w[0]),
                    d.name(w[1])
                )));
            }
        }
        Ok(DirectedPath { verts })
    }

    pub fn trivial(v: usize) -> DirectedPath {
        DirectedPath { verts: vec![v] }
    }

    pub fn verts(&self) -> &[usize] {
        &self.verts
    }

    pub fn initial(&self) -> usize {
        self.verts[0]
    }

    pub fn terminal(&self) -> usize {
        *self.verts.last().unwrap()
    }

    pub fn is_trivial(&self) -> bool {
        self.verts.len() == 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.verts.contains(&v)
    }

    pub fn position_of(&self, v: usize) -> Option<usize> {
        self.verts.iter().position(|&u| u == v)
    }

    /// The segment from the initial vertex up to and including `w`.
    pub fn up_to(&self, w: usize) -> &[usize] {
        let p = self.position_of(w).expect("vertex on path");
        &self.verts[..=p]
    }

    /// The segment from the initial vertex up to but excluding `w`.
    pub fn strictly_before(&self, w: usize) -> &[usize] {
        let p = self.position_of(w).expect("vertex on path");
        &self.verts[..p]
    }

    /// The segment from `w` (inclusive) to the terminal vertex.
    pub fn from(&self, w: usize) -> &[usize] {
        let p = self.position_of(w).expect("vertex on path");
        &self.verts[p..]
    }

    /// The segment strictly after `w`.
    pub fn strictly_after(&self, w: usize) -> &[usize] {
        let p = self.position_of(w).expect("vertex on path");
        &self.verts[p + 1..]
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.verts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn named(&self, d: &Dimaze) -> Vec<VertexId> {
        self.verts.iter().map(|&v| d.name(v).to_string()).collect()
    }
}

/// A set of pairwise vertex-disjoint directed paths, each ending in an
/// exit. Paths are kept sorted by initial vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linkage {
    paths: Vec<DirectedPath>,
}

impl Linkage {
    pub fn empty() -> Linkage {
        Linkage { paths: Vec::new() }
    }

    /// Validates disjointness and that every terminal vertex is an exit.
    pub fn new(d: &Dimaze, mut paths: Vec<DirectedPath>) -> Result<Linkage, Error> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for p in &paths {
            for &v in p.verts() {
                if !seen.insert(v) {
                    return Err(Error::Contract(format!(
                        "paths are not disjoint: {} repeats",
                        d.name(v)
                    )));
                }
            }
            if !d.is_exit(p.terminal()) {
                return Err(Error::Contract(format!(
                    "path ends at non-exit {}",
                    d.name(p.terminal())
                )));
            }
        }
        paths.sort_by_key(|p| p.initial());
        Ok(Linkage { paths })
    }

    /// Builds a linkage from vertex-name sequences.
    pub fn from_named(d: &Dimaze, paths: &[Vec<VertexId>]) -> Result<Linkage, Error> {
        let mut ps = Vec::new();
        for names in paths {
            let verts = names
                .iter()
                .map(|n| d.resolve(n, "linkage path"))
                .collect::<Result<Vec<_>, _>>()?;
            ps.push(DirectedPath::new(d, verts)?);
        }
        Linkage::new(d, ps)
    }

    pub fn paths(&self) -> &[DirectedPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Initial vertices of the paths.
    pub fn ini(&self) -> BTreeSet<usize> {
        self.paths.iter().map(|p| p.initial()).collect()
    }

    /// Terminal vertices of the paths.
    pub fn ter(&self) -> BTreeSet<usize> {
        self.paths.iter().map(|p| p.terminal()).collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.paths.iter().flat_map(|p| p.verts().iter().copied()).collect()
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.paths.iter().flat_map(|p| p.edge_list()).collect()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.paths.iter().any(|p| p.contains(v))
    }

    pub fn path_through(&self, v: usize) -> Option<&DirectedPath> {
        self.paths.iter().find(|p| p.contains(v))
    }

    /// The predecessor of `v` on its path, if `v` is on a path and not its
    /// initial vertex.
    pub fn pred(&self, v: usize) -> Option<usize> {
        let p = self.path_through(v)?;
        let pos = p.position_of(v).unwrap();
        if pos == 0 {
            None
        } else {
            Some(p.verts()[pos - 1])
        }
    }

    pub fn ini_names(&self, d: &Dimaze) -> BTreeSet<VertexId> {
        d.names(&self.ini())
    }

    pub fn ter_names(&self, d: &Dimaze) -> BTreeSet<VertexId> {
        d.names(&self.ter())
    }

    pub fn named(&self, d: &Dimaze) -> Vec<Vec<VertexId>> {
        self.paths.iter().map(|p| p.named(d)).collect()
    }

    /// Textual literal: paths joined by `;`, vertices by `,`; `-` if empty.
    pub fn to_literal(&self, d: &Dimaze) -> String {
        if self.paths.is_empty() {
            return "-".to_string();
        }
        self.paths
            .iter()
            .map(|p| p.named(d).join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses the literal produced by [`Linkage::to_literal`].
    pub fn parse_literal(d: &Dimaze, text: &str) -> Result<Linkage, Error> {
        let text = text.trim();
        if text == "-" || text.is_empty() {
            return Ok(Linkage::empty());
        }
        let paths: Vec<Vec<VertexId>> = split_outside_parens(text, ';')
            .into_iter()
            .map(|p| split_outside_parens(&p, ','))
            .collect();
        Linkage::from_named(d, &paths)
    }
}

impl fmt::Display for DirectedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.verts)
    }
}

/// Splits on a separator, ignoring separators nested inside parentheses,
/// so grid names like `(1,1)` survive comma-separated lists.
pub fn split_outside_parens(text: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            c if c == sep && depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// Parses a comma-separated vertex-name set; `-` denotes the empty set.
pub fn parse_vertex_set(text: &str) -> BTreeSet<VertexId> {
    let text = text.trim();
    if text == "-" || text.is_empty() {
        return BTreeSet::new();
    }
    split_outside_parens(text, ',').into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_ab() -> Dimaze {
        Dimaze::new(&["a", "b"], &[("a", "b")], &["b"]).unwrap()
    }

    #[test]
    fn minimal_valid_dimaze() {
        assert!(path_ab().violations().is_empty());
    }

    #[test]
    fn exit_with_out_degree_is_reported() {
        let d = Dimaze::new(&["a", "b"], &[("a", "b")], &["a"]).unwrap();
        assert_eq!(d.violations(), vec!["exit a has out-degree 1".to_string()]);
    }

    #[test]
    fn self_loop_is_reported() {
        let d = Dimaze::new(&["a"], &[("a", "a")], &[]).unwrap();
        assert_eq!(d.violations(), vec!["self-loop at a".to_string()]);
    }

    #[test]
    fn parse_basic() {
        let d = Dimaze::parse("dimaze v1\nvertex a\nvertex b\nexit b\nedge a b").unwrap();
        assert_eq!(d, path_ab());
    }

    #[test]
    fn serialize_is_canonical() {
        let d = Dimaze::new(&["e2", "c", "e1"], &[("c", "e1"), ("c", "e2")], &["e1", "e2"]).unwrap();
        let text = d.serialize();
        assert_eq!(
            text,
            "dimaze v1\nvertex c\nvertex e1\nvertex e2\nexit e1\nexit e2\nedge c e1\nedge c e2\n"
        );
        assert_eq!(Dimaze::parse(&text).unwrap(), d);
    }

    #[test]
    fn undeclared_vertex_in_edge_is_a_reference_error() {
        let err = Dimaze::parse("dimaze v1\nvertex a\nedge a c").unwrap_err();
        match err {
            Error::UnknownVertex { id, .. } => assert_eq!(id, "c"),
            other => panic!("expected reference error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let d = Dimaze::parse("dimaze v1\n# a path\nvertex a\n\nvertex b # trailing\nexit b\nedge a b").unwrap();
        assert_eq!(d, path_ab());
    }

    #[test]
    fn json_roundtrip() {
        let d = path_ab();
        assert_eq!(Dimaze::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn trivial_path_is_first_class() {
        let d = path_ab();
        let b = d.idx("b").unwrap();
        let l = Linkage::new(&d, vec![DirectedPath::trivial(b)]).unwrap();
        assert_eq!(l.ini(), l.ter());
    }

    #[test]
    fn linkage_rejects_overlap() {
        let d = Dimaze::new(
            &["a", "b", "c"],
            &[("a", "c"), ("b", "c")],
            &["c"],
        )
        .unwrap();
        let p1 = DirectedPath::new(&d, vec![d.idx("a").unwrap(), d.idx("c").unwrap()]).unwrap();
        let p2 = DirectedPath::new(&d, vec![d.idx("b").unwrap(), d.idx("c").unwrap()]).unwrap();
        assert!(Linkage::new(&d, vec![p1, p2]).is_err());
    }

    #[test]
    fn linkage_literal_roundtrip() {
        let d = Dimaze::new(
            &["x1", "y0", "y1"],
            &[("x1", "y0"), ("x1", "y1")],
            &["y0", "y1"],
        )
        .unwrap();
        let l = Linkage::parse_literal(&d, "x1,y0;y1").unwrap();
        assert_eq!(l.to_literal(&d), "x1,y0;y1");
        assert_eq!(Linkage::parse_literal(&d, "-").unwrap(), Linkage::empty());
    }
}

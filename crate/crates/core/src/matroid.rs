//! Desk-scale matroid checking over an independence oracle.
//!
//! A [`MatroidView`] wraps a ground set and an oracle (from a dimaze, a
//! bipartite graph, or an explicit list of independent sets) and supports
//! literal verification of the independence and base axioms, enumeration of
//! circuits and cocircuits, separation values, and finitarisation probes on
//! family truncations. Everything enumerates subsets, so ground sets are
//! capped by a configurable guard.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::dimaze::{Dimaze, VertexId};
use crate::families::FamilyGenerator;
use crate::linkage::is_independent_idx;
use crate::transversal::{mt_is_independent, BipartiteGraph};
use crate::{size_guard, Error};

#[derive(Debug, Clone)]
enum IndepSource {
    Dimaze(Dimaze),
    Bipartite(BipartiteGraph),
    Explicit(BTreeSet<u64>),
}

/// An independence oracle over an ordered finite ground set.
#[derive(Debug, Clone)]
pub struct MatroidView {
    ground: Vec<VertexId>,
    source: IndepSource,
}

impl MatroidView {
    pub fn from_dimaze(d: Dimaze) -> MatroidView {
        MatroidView {
            ground: d.vertices().to_vec(),
            source: IndepSource::Dimaze(d),
        }
    }

    /// Ground set: the left side of the bipartition.
    pub fn from_bipartite(g: BipartiteGraph) -> MatroidView {
        MatroidView {
            ground: g.left().to_vec(),
            source: IndepSource::Bipartite(g),
        }
    }

    /// An explicit list of independent sets; no closure properties are
    /// assumed, which is the point: broken lists must be diagnosable.
    pub fn from_explicit(
        ground: Vec<VertexId>,
        independent: &[BTreeSet<VertexId>],
    ) -> Result<MatroidView, Error> {
        let mut g = ground;
        g.sort();
        g.dedup();
        let index: BTreeMap<&str, usize> = g.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut masks = BTreeSet::new();
        for set in independent {
            let mut m = 0u64;
            for id in set {
                let i = index.get(id.as_str()).ok_or_else(|| Error::UnknownVertex {
                    id: id.clone(),
                    context: "independence list".into(),
                })?;
                m |= 1 << i;
            }
            masks.insert(m);
        }
        Ok(MatroidView {
            ground: g,
            source: IndepSource::Explicit(masks),
        })
    }

    /// Reads either a serialized dimaze, a serialized bipartite graph, or
    /// an explicit-list JSON object `{"ground": [...], "independent":
    /// [[...], ...]}`, deciding by the leading bytes.
    pub fn parse(text: &str) -> Result<MatroidView, Error> {
        let head = text.trim_start();
        if head.starts_with("dimaze v1") {
            return Ok(MatroidView::from_dimaze(Dimaze::parse(text)?));
        }
        if head.starts_with("bigraph v1") {
            return Ok(MatroidView::from_bipartite(BipartiteGraph::parse(text)?));
        }
        if head.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
                line: 0,
                msg: format!("bad json: {e}"),
            })?;
            let ground: Vec<VertexId> = serde_json::from_value(
                v.get("ground").cloned().unwrap_or(serde_json::Value::Null),
            )
            .map_err(|e| Error::Parse {
                line: 0,
                msg: format!("bad ground set: {e}"),
            })?;
            let independent: Vec<BTreeSet<VertexId>> = serde_json::from_value(
                v.get("independent").cloned().unwrap_or(serde_json::Value::Null),
            )
            .map_err(|e| Error::Parse {
                line: 0,
                msg: format!("bad independence list: {e}"),
            })?;
            return MatroidView::from_explicit(ground, &independent);
        }
        Err(Error::Parse {
            line: 1,
            msg: "unrecognized input: expected `dimaze v1`, `bigraph v1`, or a JSON object".into(),
        })
    }

    pub fn ground(&self) -> &[VertexId] {
        &self.ground
    }

    pub fn source_kind(&self) -> &'static str {
        match self.source {
            IndepSource::Dimaze(_) => "dimaze",
            IndepSource::Bipartite(_) => "bipartite",
            IndepSource::Explicit(_) => "explicit",
        }
    }

    pub fn as_dimaze(&self) -> Option<&Dimaze> {
        match &self.source {
            IndepSource::Dimaze(d) => Some(d),
            _ => None,
        }
    }

    fn mask_names(&self, mask: u64) -> BTreeSet<VertexId> {
        (0..self.ground.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.ground[i].clone())
            .collect()
    }

    fn indep_mask(&self, mask: u64) -> Result<bool, Error> {
        match &self.source {
            IndepSource::Explicit(masks) => Ok(masks.contains(&mask)),
            IndepSource::Dimaze(d) => {
                let set: BTreeSet<usize> = (0..self.ground.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| d.idx(&self.ground[i]).expect("ground built from dimaze"))
                    .collect();
                Ok(is_independent_idx(d, &set)?.is_some())
            }
            IndepSource::Bipartite(g) => {
                let set: BTreeSet<VertexId> = self.mask_names(mask);
                Ok(mt_is_independent(g, &set)?.is_some())
            }
        }
    }

    /// Oracle by name set.
    pub fn is_independent(&self, set: &BTreeSet<VertexId>) -> Result<bool, Error> {
        let mut mask = 0u64;
        for id in set {
            let i = self
                .ground
                .binary_search(id)
                .map_err(|_| Error::UnknownVertex {
                    id: id.clone(),
                    context: "ground set".into(),
                })?;
            mask |= 1 << i;
        }
        self.indep_mask(mask)
    }

    /// Full truth table over `2^E`, guarded.
    pub fn independence_table(&self, guard: Option<usize>) -> Result<Vec<bool>, Error> {
        let n = self.ground.len();
        let guard = guard.unwrap_or_else(size_guard);
        if n > guard {
            return Err(Error::SizeGuard { size: n, guard });
        }
        (0..(1u64 << n)).map(|m| self.indep_mask(m)).collect()
    }
}

/// Outcome of one axiom's literal check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomCheck {
    Pass,
    Fail {
        /// Labelled sets of the minimal counterexample found.
        sets: Vec<(String, BTreeSet<VertexId>)>,
        note: String,
    },
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomCheck::Pass)
    }
}

/// Per-axiom report over I1, I2, I3, IM, B1, B2.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub i1: AxiomCheck,
    pub i2: AxiomCheck,
    pub i3: AxiomCheck,
    pub im: AxiomCheck,
    pub b1: AxiomCheck,
    pub b2: AxiomCheck,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        [&self.i1, &self.i2, &self.i3, &self.im, &self.b1, &self.b2]
            .iter()
            .all(|c| c.passed())
    }

    pub fn entries(&self) -> Vec<(&'static str, &AxiomCheck)> {
        vec![
            ("I1", &self.i1),
            ("I2", &self.i2),
            ("I3", &self.i3),
            ("IM", &self.im),
            ("B1", &self.b1),
            ("B2", &self.b2),
        ]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut axioms = serde_json::Map::new();
        for (name, check) in self.entries() {
            let v = match check {
                AxiomCheck::Pass => json!({"pass": true}),
                AxiomCheck::Fail { sets, note } => json!({
                    "pass": false,
                    "note": note,
                    "counterexample": sets
                        .iter()
                        .map(|(label, s)| json!({
                            "label": label,
                            "set": s.iter().cloned().collect::<Vec<_>>(),
                        }))
                        .collect::<Vec<_>>(),
                }),
            };
            axioms.insert(name.to_string(), v);
        }
        json!({ "axioms": axioms, "all_pass": self.all_pass() })
    }
}

/// Masks ordered by cardinality then numeric value: counterexample search
/// order, so reported failures are minimal and reproducible.
fn masks_by_size(n: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..(1u64 << n)).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks
}

fn maximal_members(table: &[bool], n: usize, downward_closed: bool) -> Vec<u64> {
    let members: Vec<u64> = (0..(1u64 << n)).filter(|&m| table[m as usize]).collect();
    if downward_closed {
        members
            .iter()
            .copied()
            .filter(|&m| (0..n).all(|i| m & (1 << i) != 0 || !table[(m | (1 << i)) as usize]))
            .collect()
    } else {
        members
            .iter()
            .copied()
            .filter(|&m| !members.iter().any(|&o| o != m && o & m == m))
            .collect()
    }
}

/// Literal check of I1, I2, I3, IM, B1 and B2 by exhaustive enumeration.
pub fn check_axioms(m: &MatroidView, guard: Option<usize>) -> Result<AxiomReport, Error> {
    let n = m.ground.len();
    let table = m.independence_table(guard)?;
    let ordered = masks_by_size(n);

    let i1 = if table[0] {
        AxiomCheck::Pass
    } else {
        AxiomCheck::Fail {
            sets: vec![("empty set".into(), BTreeSet::new())],
            note: "the empty set is not independent".into(),
        }
    };

    // I2: closure under single deletions implies full downward closure.
    let mut i2 = AxiomCheck::Pass;
    'i2: for &s in &ordered {
        if !table[s as usize] {
            continue;
        }
        for i in 0..n {
            if s & (1 << i) != 0 && !table[(s & !(1 << i)) as usize] {
                i2 = AxiomCheck::Fail {
                    sets: vec![
                        ("I".into(), m.mask_names(s & !(1 << i))),
                        ("I'".into(), m.mask_names(s)),
                    ],
                    note: "subset of an independent set is dependent".into(),
                };
                break 'i2;
            }
        }
    }

    let maximal = maximal_members(&table, n, i2.passed());
    let maximal_set: BTreeSet<u64> = maximal.iter().copied().collect();

    // I3: every non-maximal independent set extends into every maximal one.
    let mut i3 = AxiomCheck::Pass;
    'i3: for &s in &ordered {
        if !table[s as usize] || maximal_set.contains(&s) {
            continue;
        }
        for &b in &maximal {
            let candidates = b & !s;
            let mut found = false;
            for i in 0..n {
                if candidates & (1 << i) != 0 && table[(s | (1 << i)) as usize] {
                    found = true;
                    break;
                }
            }
            if !found {
                i3 = AxiomCheck::Fail {
                    sets: vec![
                        ("I".into(), m.mask_names(s)),
                        ("I'".into(), m.mask_names(b)),
                    ],
                    note: "no element of I' \\ I extends I".into(),
                };
                break 'i3;
            }
        }
    }

    // IM, literally: for every independent I and every I <= X <= E, the
    // family of independent sets between them has a maximal element. The
    // witness is constructed by climbing; with I2 in hand a single-element
    // climb suffices, otherwise arbitrary supersets are scanned.
    let mut im = AxiomCheck::Pass;
    'im: for x in 0..(1u64 << n) {
        // independent submasks of x
        let mut subs: Vec<u64> = Vec::new();
        let mut s = x;
        loop {
            if table[s as usize] {
                subs.push(s);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & x;
        }
        // maximal members within X
        let max_in_x: Vec<u64> = if i2.passed() {
            subs.iter()
                .copied()
                .filter(|&mm| {
                    (0..n).all(|i| {
                        let bit = 1u64 << i;
                        x & bit == 0 || mm & bit != 0 || !table[(mm | bit) as usize]
                    })
                })
                .collect()
        } else {
            subs.iter()
                .copied()
                .filter(|&mm| !subs.iter().any(|&o| o != mm && o & mm == mm))
                .collect()
        };
        for &i in &subs {
            if !max_in_x.iter().any(|&mm| mm & i == i) {
                im = AxiomCheck::Fail {
                    sets: vec![
                        ("I".into(), m.mask_names(i)),
                        ("X".into(), m.mask_names(x)),
                    ],
                    note: "no maximal independent set between I and X".into(),
                };
                break 'im;
            }
        }
    }

    let b1 = if maximal.is_empty() {
        AxiomCheck::Fail {
            sets: vec![],
            note: "there are no maximal independent sets".into(),
        }
    } else {
        AxiomCheck::Pass
    };

    // B2 over the maximal sets.
    let mut b2 = AxiomCheck::Pass;
    'b2: for &b1m in &maximal {
        for &b2m in &maximal {
            let moved = b1m & !b2m;
            for i in 0..n {
                if moved & (1 << i) == 0 {
                    continue;
                }
                let without = b1m & !(1 << i);
                let incoming = b2m & !b1m;
                let mut found = false;
                for j in 0..n {
                    if incoming & (1 << j) != 0 && maximal_set.contains(&(without | (1 << j))) {
                        found = true;
                        break;
                    }
                }
                if !found {
                    b2 = AxiomCheck::Fail {
                        sets: vec![
                            ("B1".into(), m.mask_names(b1m)),
                            ("B2".into(), m.mask_names(b2m)),
                            ("x".into(), m.mask_names(1 << i)),
                        ],
                        note: "no y in B2 \\ B1 with B1 - x + y a base".into(),
                    };
                    break 'b2;
                }
            }
        }
    }

    Ok(AxiomReport {
        i1,
        i2,
        i3,
        im,
        b1,
        b2,
    })
}

/// Minimal dependent sets up to `max_size`, in (size, lex) order.
pub fn circuits(
    m: &MatroidView,
    max_size: usize,
    guard: Option<usize>,
) -> Result<Vec<BTreeSet<VertexId>>, Error> {
    let n = m.ground.len();
    let table = m.independence_table(guard)?;
    let mut found: Vec<u64> = Vec::new();
    for &s in &masks_by_size(n) {
        if s.count_ones() as usize > max_size {
            break;
        }
        if table[s as usize] {
            continue;
        }
        if found.iter().any(|&c| c & !s == 0) {
            continue;
        }
        found.push(s);
    }
    Ok(found.into_iter().map(|s| m.mask_names(s)).collect())
}

/// Minimal sets meeting every base (complement contains no base), up to
/// `max_size`.
pub fn cocircuits(
    m: &MatroidView,
    max_size: usize,
    guard: Option<usize>,
) -> Result<Vec<BTreeSet<VertexId>>, Error> {
    let n = m.ground.len();
    let table = m.independence_table(guard)?;
    let downward = {
        // cocircuits are meaningful against the maximal sets regardless of
        // closure, but the shortcut needs I2
        let mut ok = true;
        'chk: for s in 0..(1u64 << n) {
            if !table[s as usize] {
                continue;
            }
            for i in 0..n {
                if s & (1 << i) != 0 && !table[(s & !(1 << i)) as usize] {
                    ok = false;
                    break 'chk;
                }
            }
        }
        ok
    };
    let bases = maximal_members(&table, n, downward);
    if bases.is_empty() {
        return Ok(Vec::new());
    }
    let mut found: Vec<u64> = Vec::new();
    for &s in &masks_by_size(n) {
        if s.count_ones() as usize > max_size {
            break;
        }
        if !bases.iter().all(|&b| b & s != 0) {
            continue;
        }
        if found.iter().any(|&c| c & !s == 0) {
            continue;
        }
        found.push(s);
    }
    Ok(found.into_iter().map(|s| m.mask_names(s)).collect())
}

/// Separation data for a partition `(X, Y)`.
#[derive(Debug, Clone)]
pub struct SeparationReport {
    pub x_side: BTreeSet<VertexId>,
    pub y_side: BTreeSet<VertexId>,
    /// Elements deleted from `B_X ∪ B_Y` to reach a base of `M`.
    pub deleted: usize,
    /// Distinct `(B_X, B_Y)` choices the value was confirmed on.
    pub choices_checked: usize,
    /// For each `k <= min(|X|, |Y|)`, whether `(X, Y)` is a k-separation.
    pub k_separations: Vec<(usize, bool)>,
    /// One sample pair of side bases.
    pub sample_bx: BTreeSet<VertexId>,
    pub sample_by: BTreeSet<VertexId>,
}

impl SeparationReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "x": self.x_side.iter().cloned().collect::<Vec<_>>(),
            "y": self.y_side.iter().cloned().collect::<Vec<_>>(),
            "deleted": self.deleted,
            "choices_checked": self.choices_checked,
            "k_separations": self
                .k_separations
                .iter()
                .map(|(k, is)| json!({"k": k, "separation": is}))
                .collect::<Vec<_>>(),
        })
    }
}

fn max_indep_submask(table: &[bool], u: u64) -> u64 {
    let mut best = 0u64;
    let mut s = u;
    loop {
        if table[s as usize] && s.count_ones() > best.count_ones() {
            best = s;
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & u;
    }
    best
}

fn maximal_within(table: &[bool], n: usize, x: u64) -> Vec<u64> {
    let mut subs: Vec<u64> = Vec::new();
    let mut s = x;
    loop {
        if table[s as usize] {
            subs.push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & x;
    }
    let mut out: Vec<u64> = subs
        .iter()
        .copied()
        .filter(|&mm| {
            (0..n).all(|i| {
                let bit = 1u64 << i;
                x & bit == 0 || mm & bit != 0 || !table[(mm | bit) as usize]
            })
        })
        .collect();
    out.sort();
    out
}

/// Computes the separation value `d` of the partition `(X, E \ X)` over
/// several independent choices of side bases and deleted sets, asserting
/// they agree, and answers the k-separation question for each feasible `k`.
pub fn separation_value(
    m: &MatroidView,
    x: &BTreeSet<VertexId>,
    guard: Option<usize>,
) -> Result<SeparationReport, Error> {
    let n = m.ground.len();
    if x.is_empty() {
        return Err(Error::Param {
            name: "X",
            value: 0,
            msg: "the partition side X must be nonempty",
        });
    }
    let mut xmask = 0u64;
    for id in x {
        let i = m.ground.binary_search(id).map_err(|_| Error::UnknownVertex {
            id: id.clone(),
            context: "separation side X".into(),
        })?;
        xmask |= 1 << i;
    }
    let full = (1u64 << n) - 1;
    if xmask == full {
        return Err(Error::Param {
            name: "X",
            value: n,
            msg: "the partition side X must be a proper subset",
        });
    }
    let ymask = full & !xmask;
    let table = m.independence_table(guard)?;
    let bxs = maximal_within(&table, n, xmask);
    let bys = maximal_within(&table, n, ymask);
    let take = |v: &Vec<u64>| -> Vec<u64> { v.iter().copied().take(3).collect() };
    let mut d_value: Option<usize> = None;
    let mut choices = 0usize;
    for &bx in &take(&bxs) {
        for &by in &take(&bys) {
            let u = bx | by;
            // deleted-set choices: every maximal independent submask of U
            let maxes = maximal_within(&table, n, u);
            for &b in maxes.iter().take(3) {
                let d = (u.count_ones() - b.count_ones()) as usize;
                choices += 1;
                match d_value {
                    None => d_value = Some(d),
                    Some(prev) if prev != d => {
                        return Err(Error::Internal(format!(
                            "separation value disagreement: {prev} vs {d}"
                        )));
                    }
                    _ => {}
                }
            }
            // also confirm via the largest independent subset
            let best = max_indep_submask(&table, u);
            let d = (u.count_ones() - best.count_ones()) as usize;
            choices += 1;
            if let Some(prev) = d_value {
                if prev != d {
                    return Err(Error::Internal(format!(
                        "separation value disagreement: {prev} vs {d}"
                    )));
                }
            } else {
                d_value = Some(d);
            }
        }
    }
    let deleted = d_value.ok_or_else(|| Error::Internal("no side bases found".into()))?;
    let xs = xmask.count_ones() as usize;
    let ys = ymask.count_ones() as usize;
    let k_separations = (0..=xs.min(ys))
        .map(|k| (k, xs >= k && ys >= k && deleted < k))
        .collect();
    Ok(SeparationReport {
        x_side: m.mask_names(xmask),
        y_side: m.mask_names(ymask),
        deleted,
        choices_checked: choices,
        k_separations,
        sample_bx: m.mask_names(*bxs.first().unwrap_or(&0)),
        sample_by: m.mask_names(*bys.first().unwrap_or(&0)),
    })
}

/// Comparison of the onto-linkable sets with the maximal independent sets
/// of a dimaze-backed view.
#[derive(Debug, Clone)]
pub struct BaseCriterionReport {
    pub matched: bool,
    pub onto_not_maximal: Vec<BTreeSet<VertexId>>,
    pub maximal_not_onto: Vec<BTreeSet<VertexId>>,
}

/// At finite scale the two families coincide; any mismatch is returned
/// with witnesses (none should occur).
pub fn base_criterion(m: &MatroidView, guard: Option<usize>) -> Result<BaseCriterionReport, Error> {
    let d = m
        .as_dimaze()
        .ok_or_else(|| Error::Mode("base criterion needs a dimaze-backed view".into()))?;
    let n = m.ground.len();
    let table = m.independence_table(guard)?;
    let exits = d.exits().len();
    let maximal = maximal_members(&table, n, true);
    let maximal_set: BTreeSet<u64> = maximal.iter().copied().collect();
    let mut onto: BTreeSet<u64> = BTreeSet::new();
    for s in 0..(1u64 << n) {
        // a linkage from S covers all exits iff S is independent with
        // exactly |B0| elements
        if s.count_ones() as usize == exits && table[s as usize] {
            onto.insert(s);
        }
    }
    let onto_not_maximal: Vec<BTreeSet<VertexId>> = onto
        .iter()
        .filter(|s| !maximal_set.contains(s))
        .map(|&s| m.mask_names(s))
        .collect();
    let maximal_not_onto: Vec<BTreeSet<VertexId>> = maximal
        .iter()
        .filter(|s| !onto.contains(s))
        .map(|&s| m.mask_names(s))
        .collect();
    Ok(BaseCriterionReport {
        matched: onto_not_maximal.is_empty() && maximal_not_onto.is_empty(),
        onto_not_maximal,
        maximal_not_onto,
    })
}

/// Named vertex-selection rules for the finitarisation probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRule {
    /// All exits.
    Exits,
    /// Spine vertices of the first turbine copy (`c0r*`).
    Spine,
    /// Spine vertices of every turbine copy (`c*r*`).
    Spines,
    /// Half-grid diagonal `(x,x)` plus all exits.
    DiagonalPlusExits,
}

impl VertexRule {
    pub fn parse(name: &str) -> Result<VertexRule, Error> {
        Ok(match name {
            "exits" => VertexRule::Exits,
            "spine" => VertexRule::Spine,
            "spines" => VertexRule::Spines,
            "diagonal-exits" => VertexRule::DiagonalPlusExits,
            _ => return Err(Error::Mode(format!("unknown vertex rule `{name}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            VertexRule::Exits => "exits",
            VertexRule::Spine => "spine",
            VertexRule::Spines => "spines",
            VertexRule::DiagonalPlusExits => "diagonal-exits",
        }
    }

    pub fn select(&self, d: &Dimaze) -> BTreeSet<VertexId> {
        let is_spine = |s: &str| {
            s.starts_with('c')
                && s.contains('r')
                && s[1..].split('r').count() == 2
                && s[1..].split('r').all(|part| part.chars().all(|c| c.is_ascii_digit()))
        };
        match self {
            VertexRule::Exits => d.exit_names(),
            VertexRule::Spine => d
                .vertices()
                .iter()
                .filter(|v| v.starts_with("c0r") && is_spine(v))
                .cloned()
                .collect(),
            VertexRule::Spines => d
                .vertices()
                .iter()
                .filter(|v| is_spine(v))
                .cloned()
                .collect(),
            VertexRule::DiagonalPlusExits => {
                let mut out = d.exit_names();
                for v in d.vertices() {
                    if let Some(body) = v.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                        let parts: Vec<&str> = body.split(',').collect();
                        if parts.len() == 2 && parts[0] == parts[1] {
                            out.insert(v.clone());
                        }
                    }
                }
                out
            }
        }
    }
}

/// Enumeration budgets for the probe.
#[derive(Debug, Clone, Copy)]
pub struct ProbeBudget {
    /// Largest subset size checked for the within-budget finitarisation.
    pub subset_size: usize,
    /// Cap on the number of subsets enumerated before giving up.
    pub max_subsets: usize,
    /// Cap on the number of maximal elements enumerated.
    pub max_maximal: usize,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget {
            subset_size: 6,
            max_subsets: 2_000_000,
            max_maximal: 64,
        }
    }
}

/// One maximal within-budget-finitary element and its deletion distance.
#[derive(Debug, Clone)]
pub struct MaximalElementReport {
    pub set: BTreeSet<VertexId>,
    pub deletion_distance: usize,
}

/// Per-truncation probe output.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub k: usize,
    pub set: BTreeSet<VertexId>,
    /// Every subset of the rule set up to the budgeted size is independent.
    pub within_budget_finitary: bool,
    /// A smallest dependent subset found within budget, if any.
    pub dependent_witness: Option<BTreeSet<VertexId>>,
    /// `|I \ J|` for the largest independent `J` inside the rule set;
    /// exact unless `distance_exhausted`.
    pub deletion_distance: usize,
    pub distance_exhausted: bool,
    pub subsets_checked: usize,
    pub budget_exhausted: bool,
    /// Greedily enumerated maximal within-budget-finitary subsets.
    pub maximal_elements: Vec<MaximalElementReport>,
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k.min(n - k) {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Probes the finitarisation behaviour of a family truncation sequence:
/// for each depth `k`, evaluates the rule set, checks all of its subsets
/// up to the budgeted size for independence, computes its deletion
/// distance to an independent subset, and greedily enumerates maximal
/// subsets all of whose budgeted subsets are independent, with their own
/// deletion distances.
pub fn finitarisation_probe(
    gen_at: impl Fn(usize) -> Result<FamilyGenerator, Error>,
    rule: VertexRule,
    k_range: std::ops::RangeInclusive<usize>,
    budget: ProbeBudget,
) -> Result<Vec<ProbeReport>, Error> {
    let mut out = Vec::new();
    for k in k_range {
        let d = gen_at(k)?.generate()?;
        let set = rule.select(&d);
        if set.is_empty() {
            return Err(Error::Mode(format!(
                "rule {} selects no vertices at k={k}",
                rule.name()
            )));
        }
        let items: Vec<VertexId> = set.iter().cloned().collect();
        let nn = items.len();
        let idx_set: BTreeSet<usize> = items.iter().map(|v| d.idx(v).unwrap()).collect();
        let indep = |names: &BTreeSet<usize>| -> Result<bool, Error> {
            Ok(is_independent_idx(&d, names)?.is_some())
        };

        // within-budget finitarisation: all subsets of size <= budget
        let cap = budget.subset_size.min(nn);
        let mut budget_exhausted = false;
        let mut subsets_checked = 0usize;
        let mut dependent_witness: Option<BTreeSet<VertexId>> = None;
        let planned: usize = (0..=cap).map(|s| binom(nn, s)).sum();
        if planned > budget.max_subsets {
            budget_exhausted = true;
        }
        // memo over subset masks of the rule set (nn <= 63 assumed; the
        // budget cap keeps enumeration tractable)
        let mut memo: BTreeMap<u64, bool> = BTreeMap::new();
        let check_mask = |mask: u64, memo: &mut BTreeMap<u64, bool>| -> Result<bool, Error> {
            if let Some(&v) = memo.get(&mask) {
                return Ok(v);
            }
            let names: BTreeSet<usize> = (0..nn)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| d.idx(&items[i]).unwrap())
                .collect();
            let v = indep(&names)?;
            memo.insert(mask, v);
            Ok(v)
        };
        if !budget_exhausted {
            'outer: for size in 1..=cap {
                // enumerate size-subsets of 0..nn
                let mut comb: Vec<usize> = (0..size).collect();
                loop {
                    subsets_checked += 1;
                    if subsets_checked > budget.max_subsets {
                        budget_exhausted = true;
                        break 'outer;
                    }
                    let mask: u64 = comb.iter().fold(0, |m, &i| m | (1 << i));
                    if !check_mask(mask, &mut memo)? && dependent_witness.is_none() {
                        dependent_witness =
                            Some(comb.iter().map(|&i| items[i].clone()).collect());
                        break 'outer; // smallest-first order: first hit is minimal
                    }
                    // next combination
                    let mut i = size;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        if comb[i] != i + nn - size {
                            comb[i] += 1;
                            for j in i + 1..size {
                                comb[j] = comb[j - 1] + 1;
                            }
                            break;
                        }
                        if i == 0 {
                            comb.clear();
                            break;
                        }
                    }
                    if comb.is_empty() {
                        break;
                    }
                }
            }
        }
        let within_budget_finitary = dependent_witness.is_none() && !budget_exhausted;

        // deletion distance of the rule set itself
        let mut deletion_distance = 0usize;
        let mut distance_exhausted = false;
        if indep(&idx_set)? {
            // distance 0
        } else if (1u64 << nn) as usize <= budget.max_subsets {
            let mut best = 0usize;
            for mask in 0..(1u64 << nn) {
                if (mask.count_ones() as usize) <= best {
                    continue;
                }
                let names: BTreeSet<usize> = (0..nn)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| d.idx(&items[i]).unwrap())
                    .collect();
                if indep(&names)? {
                    best = mask.count_ones() as usize;
                }
            }
            deletion_distance = nn - best;
        } else {
            // greedy upper bound only
            let mut kept: BTreeSet<usize> = BTreeSet::new();
            for v in &idx_set {
                kept.insert(*v);
                if !indep(&kept)? {
                    kept.remove(v);
                }
            }
            deletion_distance = nn - kept.len();
            distance_exhausted = true;
        }

        // greedy maximal within-budget-finitary elements, several orders
        let mut maximal_elements: Vec<MaximalElementReport> = Vec::new();
        let mut seen_sets: BTreeSet<u64> = BTreeSet::new();
        let orders: Vec<Vec<usize>> = {
            let base: Vec<usize> = (0..nn).collect();
            let mut os = vec![base.clone()];
            os.push(base.iter().rev().copied().collect());
            for rot in 1..nn.min(6) {
                let mut o = base.clone();
                o.rotate_left(rot);
                os.push(o);
            }
            os
        };
        for order in orders {
            if maximal_elements.len() >= budget.max_maximal {
                break;
            }
            let mut mask: u64 = 0;
            for &i in &order {
                let cand = mask | (1 << i);
                // adding i keeps the set within-budget-finitary iff every
                // budgeted-size subset containing i stays independent
                let mut ok = true;
                let members: Vec<usize> =
                    (0..nn).filter(|j| cand & (1 << j) != 0).collect();
                let others: Vec<usize> =
                    members.iter().copied().filter(|&j| j != i).collect();
                let max_extra = cap.saturating_sub(1).min(others.len());
                'sizes: for extra in 0..=max_extra {
                    let mut comb: Vec<usize> = (0..extra).collect();
                    loop {
                        let mut sub: u64 = 1 << i;
                        for &c in &comb {
                            sub |= 1 << others[c];
                        }
                        if !check_mask(sub, &mut memo)? {
                            ok = false;
                            break 'sizes;
                        }
                        if extra == 0 {
                            break;
                        }
                        // next combination over others
                        let mut ii = extra;
                        let mut done = false;
                        loop {
                            if ii == 0 {
                                done = true;
                                break;
                            }
                            ii -= 1;
                            if comb[ii] != ii + others.len() - extra {
                                comb[ii] += 1;
                                for j in ii + 1..extra {
                                    comb[j] = comb[j - 1] + 1;
                                }
                                break;
                            }
                            if ii == 0 {
                                done = true;
                                break;
                            }
                        }
                        if done {
                            break;
                        }
                    }
                }
                if ok {
                    mask = cand;
                }
            }
            if !seen_sets.insert(mask) {
                continue;
            }
            // deletion distance of the maximal element (exact; these sets
            // are small at desk scale)
            let members: Vec<usize> = (0..nn).filter(|j| mask & (1 << j) != 0).collect();
            let mut best = 0usize;
            if members.len() <= 20 {
                for sub in 0..(1u64 << members.len()) {
                    if (sub.count_ones() as usize) <= best {
                        continue;
                    }
                    let names: BTreeSet<usize> = members
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| sub & (1 << j) != 0)
                        .map(|(_, &i)| d.idx(&items[i]).unwrap())
                        .collect();
                    if indep(&names)? {
                        best = sub.count_ones() as usize;
                    }
                }
            }
            maximal_elements.push(MaximalElementReport {
                set: members.iter().map(|&i| items[i].clone()).collect(),
                deletion_distance: members.len() - best,
            });
        }

        out.push(ProbeReport {
            k,
            set,
            within_budget_finitary,
            dependent_witness,
            deletion_distance,
            distance_exhausted,
            subsets_checked,
            budget_exhausted,
            maximal_elements,
        });
    }
    Ok(out)
}

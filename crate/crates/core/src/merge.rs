//! The two-linkage merge and its applications.
//!
//! Given a "red" linkage and a "blue" linkage, the merge iterates two maps:
//! for each red path a frontier vertex `f` that advances to the next vertex
//! still covered by the current combined system, and for each blue path the
//! last red frontier lying on it, `t`. At the fixed point each blue path is
//! served through the deepest red frontier that reached it, and the
//! resulting path system starts at every red initial vertex and covers every
//! blue terminal. On top of the merge sit the exchange step (swap one
//! element into an independent set at the cost of at most one other) and a
//! spine trace that follows merge junctions backwards, reconstructing an
//! alternating-comb prefix when one is present.

use std::collections::{BTreeMap, BTreeSet};

use crate::dimaze::{Dimaze, DirectedPath, Linkage, VertexId};
use crate::linkage::{is_independent, is_independent_idx};
use crate::{size_guard, Error};

/// Per-step snapshot of the frontier maps, for trace output and the spine
/// trace's step-index bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeStep {
    pub step: usize,
    /// red initial vertex -> frontier vertex on its path
    pub f: BTreeMap<usize, usize>,
    /// blue terminal vertex -> junction candidate on its path
    pub t: BTreeMap<usize, usize>,
}

/// A merged path: red prefix up to the junction, then the blue suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinedPath {
    pub red_initial: usize,
    pub junction: usize,
    pub blue_terminal: usize,
}

/// Final state of the merge iteration.
#[derive(Debug, Clone)]
pub struct MergeState {
    /// Index of the first repeated step (the fixed point).
    pub steps: usize,
    /// Final frontier of each red path, keyed by its initial vertex.
    pub f: BTreeMap<usize, usize>,
    /// Final junction candidate of each blue path, keyed by its terminal.
    pub t: BTreeMap<usize, usize>,
    /// Blue paths that no red frontier reached (kept whole).
    pub blue_only: Vec<usize>,
    /// Red/blue pairs joined at a junction.
    pub joined: Vec<JoinedPath>,
    /// Red paths whose frontier reached their own terminal unmatched.
    pub red_only: Vec<usize>,
    /// Per-step history when requested.
    pub history: Option<Vec<MergeStep>>,
}

impl MergeState {
    /// `i_x`: the first step at which the frontier of the red path starting
    /// at `x` had already reached its final vertex. Requires history.
    pub fn settle_step(&self, x: usize) -> Option<usize> {
        let hist = self.history.as_ref()?;
        let target = self.f.get(&x)?;
        hist.iter()
            .find(|s| s.f.get(&x) == Some(target))
            .map(|s| s.step)
    }

    /// Stable one-line-per-move dump: `i | x | f^i_x | t-updates`.
    pub fn trace_dump(&self, d: &Dimaze) -> String {
        let mut out = String::new();
        let Some(hist) = &self.history else {
            return out;
        };
        for w in hist.windows(2) {
            let (prev, cur) = (&w[0], &w[1]);
            let moved: Vec<&usize> = cur
                .f
                .keys()
                .filter(|x| prev.f.get(x) != cur.f.get(x))
                .collect();
            let t_updates: Vec<String> = cur
                .t
                .iter()
                .filter(|(y, v)| prev.t.get(y) != Some(v))
                .map(|(y, v)| format!("{}<-{}", d.name(*y), d.name(*v)))
                .collect();
            let t_part = if t_updates.is_empty() {
                "-".to_string()
            } else {
                t_updates.join(",")
            };
            if moved.is_empty() {
                out.push_str(&format!("{} | - | - | {}\n", cur.step, t_part));
            }
            for x in moved {
                out.push_str(&format!(
                    "{} | {} | {} | {}\n",
                    cur.step,
                    d.name(*x),
                    d.name(cur.f[x]),
                    t_part
                ));
            }
        }
        out
    }
}

struct MergeRun<'a> {
    d: &'a Dimaze,
    red: Vec<DirectedPath>,
    blue: Vec<DirectedPath>,
    /// vertex -> index of the red path through it
    red_at: BTreeMap<usize, usize>,
}

impl<'a> MergeRun<'a> {
    /// Advances one frontier: the next vertex of `covered` at or after
    /// `from` on the path, or the path's terminal when none remains.
    fn advance(&self, path: &DirectedPath, from: usize, covered: &BTreeSet<usize>) -> usize {
        for &v in path.from(from) {
            if covered.contains(&v) {
                return v;
            }
        }
        path.terminal()
    }

    /// `t` for each blue path: the last `f`-frontier lying on it, or its
    /// initial vertex when no frontier does.
    fn junctions(&self, f: &BTreeMap<usize, usize>) -> BTreeMap<usize, usize> {
        let marks: BTreeSet<usize> = f.values().copied().collect();
        let mut t = BTreeMap::new();
        for q in &self.blue {
            let last = q
                .verts()
                .iter()
                .rev()
                .find(|v| marks.contains(v))
                .copied()
                .unwrap_or_else(|| q.initial());
            t.insert(q.terminal(), last);
        }
        t
    }

    /// Assembles the combined system for the given frontiers. Junction
    /// pairing: a blue path whose `t` equals some red frontier is joined to
    /// that red path; reds whose frontier sits at their own terminal
    /// unmatched stand alone; untouched blues stay whole.
    fn assemble(
        &self,
        f: &BTreeMap<usize, usize>,
        t: &BTreeMap<usize, usize>,
    ) -> Result<(Vec<usize>, Vec<JoinedPath>, Vec<usize>, Linkage), Error> {
        let mut joined = Vec::new();
        let mut blue_only = Vec::new();
        let mut red_only = Vec::new();
        let mut paths: Vec<DirectedPath> = Vec::new();
        let mut matched_reds: BTreeSet<usize> = BTreeSet::new();
        for q in &self.blue {
            let y = q.terminal();
            let junction = t[&y];
            // The junction is a red frontier iff some red path's f sits
            // there; frontiers of distinct reds are distinct vertices.
            let red_idx = self.red_at.get(&junction).copied().filter(|&ri| {
                let x = self.red[ri].initial();
                f.get(&x) == Some(&junction)
            });
            match red_idx {
                Some(ri) => {
                    let x = self.red[ri].initial();
                    matched_reds.insert(ri);
                    joined.push(JoinedPath {
                        red_initial: x,
                        junction,
                        blue_terminal: y,
                    });
                    let mut verts: Vec<usize> = self.red[ri].up_to(junction).to_vec();
                    verts.extend(q.strictly_after(junction).iter().copied());
                    paths.push(DirectedPath::new(self.d, verts)?);
                }
                None => {
                    blue_only.push(y);
                    paths.push(q.clone());
                }
            }
        }
        // Unmatched reds whose frontier reached their own terminal stand
        // alone; other unmatched reds drop out of this step's system.
        for (ri, p) in self.red.iter().enumerate() {
            if matched_reds.contains(&ri) {
                continue;
            }
            let x = p.initial();
            if f[&x] == p.terminal() {
                red_only.push(x);
                paths.push(p.clone());
            }
        }
        let linkage = Linkage::new(self.d, paths)?;
        Ok((blue_only, joined, red_only, linkage))
    }
}

/// Merges a red and a blue linkage into one whose initial set contains
/// every red initial vertex and whose terminal set contains every blue
/// terminal, both within the respective unions. Returns the final linkage
/// and the fixed-point state.
pub fn merge(
    d: &Dimaze,
    red: &Linkage,
    blue: &Linkage,
    with_history: bool,
) -> Result<(Linkage, MergeState), Error> {
    for (name, l) in [("red", red), ("blue", blue)] {
        for p in l.paths() {
            for w in p.verts().windows(2) {
                if !d.has_edge(w[0], w[1]) {
                    return Err(Error::Contract(format!("{name} input is not a linkage")));
                }
            }
            if !d.is_exit(p.terminal()) {
                return Err(Error::Contract(format!("{name} input is not a linkage")));
            }
        }
    }
    let run = MergeRun {
        d,
        red: red.paths().to_vec(),
        blue: blue.paths().to_vec(),
        red_at: red
            .paths()
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.verts().iter().map(move |&v| (v, i)))
            .collect(),
    };

    // Step 0: frontiers at the red initial vertices, junction candidates at
    // the blue initial vertices, combined system = blue.
    let mut f: BTreeMap<usize, usize> =
        run.red.iter().map(|p| (p.initial(), p.initial())).collect();
    let t0: BTreeMap<usize, usize> =
        run.blue.iter().map(|q| (q.terminal(), q.initial())).collect();
    let mut history = vec![MergeStep {
        step: 0,
        f: f.clone(),
        t: t0,
    }];
    let mut covered: BTreeSet<usize> = blue.vertex_set();

    let total_len: usize = red.paths().iter().map(|p| p.verts().len()).sum();
    let max_steps = total_len + 2;
    let mut final_parts = None;
    for step in 1..=max_steps {
        let mut f_next = BTreeMap::new();
        for p in &run.red {
            let x = p.initial();
            let fx = run.advance(p, f[&x], &covered);
            // frontiers only move forward
            debug_assert!(
                p.position_of(fx).unwrap() >= p.position_of(f[&x]).unwrap(),
                "red frontier moved backwards"
            );
            f_next.insert(x, fx);
        }
        let t_next = run.junctions(&f_next);
        let prev = history.last().unwrap();
        for (y, &tv) in &t_next {
            let q = run.blue.iter().find(|q| q.terminal() == *y).unwrap();
            let old = prev.t[y];
            if q.position_of(tv).unwrap() < q.position_of(old).unwrap() {
                return Err(Error::Internal("blue junction moved backwards".into()));
            }
        }
        let stable = step >= 2 && f_next == f;
        f = f_next;
        let (blue_only, joined, red_only, linkage) = run.assemble(&f, &t_next)?;
        // the combined system is a linkage covering the blue terminals at
        // every step
        for q in &run.blue {
            if !linkage.ter().contains(&q.terminal()) {
                return Err(Error::Internal(
                    "merge step dropped a blue terminal".into(),
                ));
            }
        }
        history.push(MergeStep {
            step,
            f: f.clone(),
            t: t_next.clone(),
        });
        covered = linkage.vertex_set();
        if stable {
            final_parts = Some((blue_only, joined, red_only, linkage, t_next, step));
            break;
        }
    }
    let Some((blue_only, joined, red_only, linkage, t, steps)) = final_parts else {
        return Err(Error::Internal("merge failed to reach a fixed point".into()));
    };

    // Fixed-point soundness: every red initial vertex starts a final path,
    // either joined at a junction or standing alone with its frontier at
    // its own terminal.
    for p in red.paths() {
        let x = p.initial();
        if !linkage.ini().contains(&x) {
            return Err(Error::Internal(format!(
                "red initial {} missing from the merge output",
                d.name(x)
            )));
        }
    }
    let state = MergeState {
        steps,
        f,
        t,
        blue_only,
        joined,
        red_only,
        history: if with_history { Some(history) } else { None },
    };
    // Postcondition inclusions.
    let ini = linkage.ini();
    let ter = linkage.ter();
    let red_ini = red.ini();
    let blue_ini = blue.ini();
    let blue_ter = blue.ter();
    let red_ter = red.ter();
    if !red_ini.is_subset(&ini)
        || !ini.is_subset(&red_ini.union(&blue_ini).copied().collect())
        || !blue_ter.is_subset(&ter)
        || !ter.is_subset(&blue_ter.union(&red_ter).copied().collect())
    {
        return Err(Error::Internal("merge postcondition inclusions failed".into()));
    }
    Ok((linkage, state))
}

/// Outcome of the exchange step.
#[derive(Debug, Clone)]
pub enum ExchangeOutcome {
    /// Removing `removed` admits `v`: `J + v - removed` is independent.
    Swap { removed: VertexId, witness: Linkage },
    /// `J + v` is independent as it stands.
    NoneNeeded { witness: Linkage },
}

/// Exchange step: for independent `I`, `J` and `v` in `I \ J`, produce
/// `u` in `J \ I` such that `J + v - u` is independent, or certify that
/// `J + v` is independent outright. Internally `I` is restricted to
/// `(I ∩ J) + v` before merging its witness (red) with `J`'s (blue).
pub fn exchange(
    d: &Dimaze,
    i: &BTreeSet<VertexId>,
    j: &BTreeSet<VertexId>,
    v: &str,
) -> Result<ExchangeOutcome, Error> {
    let ii = d.resolve_set(i, "I")?;
    let ji = d.resolve_set(j, "J")?;
    let vi = d.resolve(v, "v")?;
    if !ii.contains(&vi) || ji.contains(&vi) {
        return Err(Error::Contract("v must lie in I \\ J".into()));
    }
    if is_independent_idx(d, &ii)?.is_none() {
        return Err(Error::Contract("I is not independent".into()));
    }
    let blue = is_independent_idx(d, &ji)?
        .ok_or_else(|| Error::Contract("J is not independent".into()))?;
    // Normalize: restrict I to J + v and recompute the red witness.
    let mut restricted: BTreeSet<usize> = ii.intersection(&ji).copied().collect();
    restricted.insert(vi);
    let red = is_independent_idx(d, &restricted)?.ok_or_else(|| {
        Error::Internal("restriction of an independent set is dependent".into())
    })?;
    let (linkage, _) = merge(d, &red, &blue, false)?;
    let ini = linkage.ini();
    let mut j_plus_v = ji.clone();
    j_plus_v.insert(vi);
    let missing: Vec<usize> = j_plus_v.difference(&ini).copied().collect();
    match missing.as_slice() {
        [] => Ok(ExchangeOutcome::NoneNeeded { witness: linkage }),
        [u] => Ok(ExchangeOutcome::Swap {
            removed: d.name(*u).to_string(),
            witness: linkage,
        }),
        more => Err(Error::Internal(format!(
            "merge left {} vertices of J + v uncovered",
            more.len()
        ))),
    }
}

/// One completed alternation of the spine trace.
#[derive(Debug, Clone)]
pub struct CombStep {
    /// Red path (by initial vertex) the spine vertex `q` lies on.
    pub x: usize,
    /// Spine vertex on the blue path, strictly before the junction.
    pub q: usize,
    /// Junction of the red path: its final frontier.
    pub p: usize,
    /// `q..=p_{k-1}` along the blue path.
    pub blue_segment: Vec<usize>,
    /// `q..=p` along the red path.
    pub red_segment: Vec<usize>,
    /// Blue suffix from the previous junction to its exit.
    pub tooth: Vec<usize>,
    /// Step at which this red path's frontier settled.
    pub settle_step: usize,
}

/// Why the trace stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEnd {
    /// The requested number of alternations was completed.
    ReachedMaxDepth,
    /// The junction reached at this step lies on no blue path (its red
    /// path stands alone in the merge), so the spine cannot continue.
    JunctionOffBlue { step: usize, junction: usize },
    /// The blue prefix before the junction carries no merged-system vertex.
    NoSpineVertex { step: usize },
    /// The trace revisited a red path; only possible off contract.
    RepeatedSpine { step: usize },
}

/// A bounded alternating-comb prefix: alternating blue and red spine
/// segments with blue teeth to the exits.
#[derive(Debug, Clone)]
pub struct CombPrefix {
    pub seed: usize,
    pub start_junction: usize,
    pub steps: Vec<CombStep>,
    pub end: TraceEnd,
}

impl CombPrefix {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Traces the comb structure backwards from `x0`: merge the witness of
/// `I + x0` (red) with the witness of `I` (blue), then repeatedly step from
/// the current junction to the deepest merged-system vertex on the blue
/// prefix before it, hopping onto that vertex's red path. On a finite
/// dimaze the trace always terminates; the report says where and why.
pub fn comb_trace(
    d: &Dimaze,
    i: &BTreeSet<VertexId>,
    x0: &str,
    max_depth: usize,
) -> Result<CombPrefix, Error> {
    let ii = d.resolve_set(i, "I")?;
    let x0i = d.resolve(x0, "x0")?;
    if ii.contains(&x0i) {
        return Err(Error::Contract("x0 already lies in I".into()));
    }
    let blue = is_independent(d, i)?
        .ok_or_else(|| Error::Contract("I is not independent".into()))?;
    let mut i_plus = ii.clone();
    i_plus.insert(x0i);
    let red = is_independent_idx(d, &i_plus)?
        .ok_or_else(|| Error::Contract("I + x0 is not independent".into()))?;
    let (linkage, state) = merge(d, &red, &blue, true)?;
    debug_assert!(blue.ini().is_subset(&red.ini()));

    let covered = linkage.vertex_set();
    let junction_of = |x: usize| state.f[&x];
    let blue_path_through = |v: usize| blue.paths().iter().find(|q| q.contains(v));
    let red_path_through = |v: usize| red.paths().iter().find(|p| p.contains(v));

    let mut steps: Vec<CombStep> = Vec::new();
    let mut seen_reds: BTreeSet<usize> = BTreeSet::new();
    seen_reds.insert(x0i);
    let mut prev_p = junction_of(x0i);
    let mut prev_settle = state.settle_step(x0i).unwrap_or(0);
    let end = loop {
        let k = steps.len() + 1;
        if steps.len() >= max_depth {
            break TraceEnd::ReachedMaxDepth;
        }
        let Some(qk_path) = blue_path_through(prev_p) else {
            break TraceEnd::JunctionOffBlue {
                step: k,
                junction: prev_p,
            };
        };
        // Deepest merged-system vertex strictly before the junction.
        let Some(q) = qk_path
            .strictly_before(prev_p)
            .iter()
            .rev()
            .find(|v| covered.contains(v))
            .copied()
        else {
            break TraceEnd::NoSpineVertex { step: k };
        };
        let red_path = red_path_through(q).ok_or_else(|| {
            Error::Internal("spine vertex on the merged system but off every red path".into())
        })?;
        let x = red_path.initial();
        if !seen_reds.insert(x) {
            break TraceEnd::RepeatedSpine { step: k };
        }
        let p = junction_of(x);
        let settle = state.settle_step(x).unwrap_or(0);
        // strict progress of the settle steps along the spine
        if settle <= prev_settle {
            return Err(Error::Internal(format!(
                "spine settle steps not increasing at alternation {k}"
            )));
        }
        let q_pos = qk_path.position_of(q).unwrap();
        let p_prev_pos = qk_path.position_of(prev_p).unwrap();
        let blue_segment = qk_path.verts()[q_pos..=p_prev_pos].to_vec();
        let rq = red_path.position_of(q).ok_or_else(|| {
            Error::Internal("spine vertex not on its red path".into())
        })?;
        let rp = red_path.position_of(p).ok_or_else(|| {
            Error::Internal("junction not on its red path".into())
        })?;
        if rq > rp {
            return Err(Error::Internal(
                "spine vertex lies beyond its red junction".into(),
            ));
        }
        let red_segment = red_path.verts()[rq..=rp].to_vec();
        let tooth = qk_path.from(prev_p).to_vec();
        steps.push(CombStep {
            x,
            q,
            p,
            blue_segment,
            red_segment,
            tooth,
            settle_step: settle,
        });
        prev_p = p;
        prev_settle = settle;
    };
    let prefix = CombPrefix {
        seed: x0i,
        start_junction: junction_of(x0i),
        steps,
        end,
    };
    validate_comb_prefix(&prefix).map_err(Error::Internal)?;
    Ok(prefix)
}

/// Structural check of a comb prefix: nontrivial segments, pairwise
/// disjoint blue segments, pairwise disjoint red segments, red segments
/// avoiding all earlier blue terminal segments, teeth meeting the spine
/// only at their junction, and the spine forming a path.
pub fn validate_comb_prefix(c: &CombPrefix) -> Result<(), String> {
    let set = |v: &[usize]| -> BTreeSet<usize> { v.iter().copied().collect() };
    for (k, s) in c.steps.iter().enumerate() {
        if s.blue_segment.len() < 2 {
            return Err(format!("blue segment {k} is trivial"));
        }
        if s.red_segment.len() < 2 {
            return Err(format!("red segment {k} is trivial"));
        }
        if s.blue_segment.first() != Some(&s.q) || s.red_segment.first() != Some(&s.q) {
            return Err(format!("segments at {k} do not meet at their spine vertex"));
        }
        if s.red_segment.last() != Some(&s.p) {
            return Err(format!("red segment {k} does not end at its junction"));
        }
    }
    for a in 0..c.steps.len() {
        for b in a + 1..c.steps.len() {
            let (sa, sb) = (&c.steps[a], &c.steps[b]);
            if set(&sa.blue_segment).intersection(&set(&sb.blue_segment)).next().is_some() {
                return Err(format!("blue segments {a} and {b} intersect"));
            }
            if set(&sa.red_segment).intersection(&set(&sb.red_segment)).next().is_some() {
                return Err(format!("red segments {a} and {b} intersect"));
            }
            // later red segments avoid the earlier blue terminal segments
            // (blue segment plus its tooth)
            let mut blue_from_q = set(&sa.blue_segment);
            blue_from_q.extend(sa.tooth.iter().copied());
            let rb = set(&sb.red_segment);
            if blue_from_q.intersection(&rb).next().is_some() {
                return Err(format!("red segment {b} meets blue terminal segment {a}"));
            }
        }
    }
    // consecutive segments share exactly their junction endpoints; the
    // underlying spine is a path
    let mut spine: Vec<usize> = Vec::new();
    let mut expected_prev = c.start_junction;
    for (k, s) in c.steps.iter().enumerate() {
        if s.blue_segment.last() != Some(&expected_prev) {
            return Err(format!("blue segment {k} does not reach the previous junction"));
        }
        // walk the spine: previous junction .. q (blue, reversed) then q .. p (red)
        let mut part: Vec<usize> = s.blue_segment.iter().rev().copied().collect();
        part.extend(s.red_segment.iter().skip(1).copied());
        if spine.is_empty() {
            spine.extend(part);
        } else {
            if spine.last() != part.first() {
                return Err(format!("spine breaks before alternation {k}"));
            }
            spine.extend(part.into_iter().skip(1));
        }
        expected_prev = s.p;
        // the tooth leaves from the previous junction only
        let tooth_rest: BTreeSet<usize> = s.tooth.iter().skip(1).copied().collect();
        if tooth_rest.contains(&s.q) {
            return Err(format!("tooth {k} re-enters the spine"));
        }
    }
    let distinct: BTreeSet<usize> = spine.iter().copied().collect();
    if distinct.len() != spine.len() {
        return Err("spine repeats a vertex".into());
    }
    Ok(())
}

/// A violation of the maximal-iff-onto-linkable criterion: a set linkable
/// onto every exit that still extends to a larger independent set. Finite
/// dimazes never produce one; the report is the base-exchange witness pair.
#[derive(Debug, Clone)]
pub struct DaggerViolation {
    pub set: BTreeSet<VertexId>,
    pub onto_witness: Linkage,
    pub extension: VertexId,
    pub extended_witness: Linkage,
}

/// Enumerates every onto-linkable set and reports those that are not
/// maximal independent, with both linkages as the witness pair.
pub fn check_dagger(d: &Dimaze, guard: Option<usize>) -> Result<Vec<DaggerViolation>, Error> {
    let n = d.vertex_count();
    let guard = guard.unwrap_or_else(size_guard);
    if n > guard {
        return Err(Error::SizeGuard { size: n, guard });
    }
    let exits = d.exits().len();
    let mut violations = Vec::new();
    let verts: Vec<usize> = (0..n).collect();
    for mask in 0u64..(1u64 << n) {
        if (mask.count_ones() as usize) != exits {
            continue; // onto-linkable sets have exactly |B0| paths
        }
        let set: BTreeSet<usize> = verts.iter().filter(|&&v| mask & (1 << v) != 0).copied().collect();
        let Some(witness) = is_independent_idx(d, &set)? else {
            continue;
        };
        debug_assert_eq!(witness.ter(), *d.exits());
        // onto-linkable; is it maximal?
        for v in 0..n {
            if set.contains(&v) {
                continue;
            }
            let mut bigger = set.clone();
            bigger.insert(v);
            if let Some(w) = is_independent_idx(d, &bigger)? {
                violations.push(DaggerViolation {
                    set: d.names(&set),
                    onto_witness: witness.clone(),
                    extension: d.name(v).to_string(),
                    extended_witness: w,
                });
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyGenerator;

    fn vset(items: &[&str]) -> BTreeSet<VertexId> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn alt_comb(k: usize) -> Dimaze {
        FamilyGenerator::AltComb { depth: k }.generate().unwrap()
    }

    #[test]
    fn merge_single_pair() {
        let d = alt_comb(2);
        let red = Linkage::from_named(&d, &[vec!["x1".into(), "y1".into()]]).unwrap();
        let blue = Linkage::from_named(&d, &[vec!["y1".into()]]).unwrap();
        let (out, state) = merge(&d, &red, &blue, false).unwrap();
        assert_eq!(out.to_literal(&d), "x1,y1");
        let x1 = d.idx("x1").unwrap();
        let y1 = d.idx("y1").unwrap();
        assert_eq!(state.f[&x1], y1);
        assert_eq!(state.t[&y1], y1);
        assert_eq!(state.joined.len(), 1);
    }

    #[test]
    fn merge_with_empty_red_returns_blue() {
        let d = alt_comb(2);
        let blue = Linkage::from_named(&d, &[vec!["x1".into(), "y0".into()], vec!["y2".into()]]).unwrap();
        let (out, state) = merge(&d, &Linkage::empty(), &blue, false).unwrap();
        assert_eq!(out, blue);
        assert_eq!(state.blue_only.len(), 2);
        assert!(state.joined.is_empty());
    }

    #[test]
    fn merge_crossing_linkages() {
        let d = alt_comb(2);
        let red = Linkage::from_named(
            &d,
            &[vec!["x1".into(), "y0".into()], vec!["x2".into(), "y1".into()]],
        )
        .unwrap();
        let blue = Linkage::from_named(
            &d,
            &[vec!["y0".into()], vec!["y1".into()], vec!["y2".into()]],
        )
        .unwrap();
        let (out, _) = merge(&d, &red, &blue, false).unwrap();
        assert_eq!(out.ini_names(&d), vset(&["x1", "x2", "y2"]));
        assert_eq!(out.ter_names(&d), vset(&["y0", "y1", "y2"]));
    }

    #[test]
    fn merge_untangles_interleaved_crossing() {
        // Hand-checked fixed point: blue q0..q4, two reds crossing it.
        let d = Dimaze::new(
            &["q0", "q1", "q2", "q3", "q4", "xa", "m", "e1", "xb", "z", "e2"],
            &[
                ("q0", "q1"),
                ("q1", "q2"),
                ("q2", "q3"),
                ("q3", "q4"),
                ("xa", "m"),
                ("m", "q2"),
                ("q2", "e1"),
                ("xb", "q1"),
                ("q1", "z"),
                ("z", "q3"),
                ("q3", "e2"),
            ],
            &["q4", "e1", "e2"],
        )
        .unwrap();
        let red = Linkage::from_named(
            &d,
            &[
                vec!["xa".into(), "m".into(), "q2".into(), "e1".into()],
                vec!["xb".into(), "q1".into(), "z".into(), "q3".into(), "e2".into()],
            ],
        )
        .unwrap();
        let blue = Linkage::from_named(
            &d,
            &[vec!["q0".into(), "q1".into(), "q2".into(), "q3".into(), "q4".into()]],
        )
        .unwrap();
        let (out, state) = merge(&d, &red, &blue, true).unwrap();
        // xb steals the blue path at q3; xa completes its own path.
        assert_eq!(
            out.to_literal(&d),
            "xa,m,q2,e1;xb,q1,z,q3,q4"
        );
        assert_eq!(state.red_only, vec![d.idx("xa").unwrap()]);
        assert_eq!(state.joined.len(), 1);
        assert_eq!(state.joined[0].junction, d.idx("q3").unwrap());
    }

    #[test]
    fn exchange_on_star() {
        let d = FamilyGenerator::Star { leaves: 2 }.generate().unwrap();
        match exchange(&d, &vset(&["c"]), &vset(&["e1"]), "c").unwrap() {
            ExchangeOutcome::Swap { removed, witness } => {
                assert_eq!(removed, "e1");
                assert_eq!(witness.ini_names(&d), vset(&["c"]));
            }
            ExchangeOutcome::NoneNeeded { witness } => {
                assert_eq!(witness.ini_names(&d), vset(&["c", "e1"]));
            }
        }
    }

    #[test]
    fn exchange_on_alt_comb() {
        let d = alt_comb(2);
        match exchange(&d, &vset(&["x1"]), &vset(&["y0", "y1", "y2"]), "x1").unwrap() {
            ExchangeOutcome::Swap { removed, witness } => {
                assert!(removed == "y0" || removed == "y1", "removed {removed}");
                let mut expect = vset(&["x1", "y0", "y1", "y2"]);
                expect.remove(&removed);
                assert_eq!(witness.ini_names(&d), expect);
            }
            other => panic!("expected a swap, got {other:?}"),
        }
    }

    #[test]
    fn exchange_none_needed_when_j_plus_v_fits() {
        let d = alt_comb(2);
        // J + v = {x1, y2} is independent.
        match exchange(&d, &vset(&["x1"]), &vset(&["y2"]), "x1").unwrap() {
            ExchangeOutcome::NoneNeeded { witness } => {
                assert_eq!(witness.ini_names(&d), vset(&["x1", "y2"]));
            }
            other => panic!("expected none-needed, got {other:?}"),
        }
    }

    #[test]
    fn comb_trace_walks_the_comb() {
        let d = alt_comb(3);
        let trace = comb_trace(&d, &vset(&["x1", "x2", "x3"]), "y0", 10).unwrap();
        assert_eq!(trace.depth(), 3);
        assert!(matches!(trace.end, TraceEnd::JunctionOffBlue { step: 4, .. }));
        let xs: Vec<&str> = trace.steps.iter().map(|s| d.name(s.x)).collect();
        assert_eq!(xs, ["x1", "x2", "x3"]);
        let settles: Vec<usize> = trace.steps.iter().map(|s| s.settle_step).collect();
        assert!(settles.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn comb_trace_rejects_dependent_extension() {
        let d = Dimaze::parse("dimaze v1\nvertex a\nvertex b\nexit b\nedge a b").unwrap();
        let err = comb_trace(&d, &vset(&["b"]), "a", 5);
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn comb_trace_rejects_maximal_i() {
        let d = FamilyGenerator::Star { leaves: 2 }.generate().unwrap();
        let err = comb_trace(&d, &vset(&["e1", "e2"]), "c", 5);
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn dagger_holds_on_finite_dimazes() {
        for d in [
            FamilyGenerator::Star { leaves: 2 }.generate().unwrap(),
            alt_comb(3),
        ] {
            assert!(check_dagger(&d, None).unwrap().is_empty());
        }
    }
}

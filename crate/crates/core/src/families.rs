//! Finite truncations of the standard parameterized dimaze families.
//!
//! Each generator produces the canonical depth-`k` truncation of an infinite
//! family; the truncations are monotone in the depth parameter, so golden
//! files stay diffable as the depth grows.

use crate::dimaze::Dimaze;
use crate::Error;

/// A named, parameterized producer of finite dimazes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyGenerator {
    /// A center `c` with edges to exits `e1..=en`.
    Star { leaves: usize },
    /// A path `p{k} -> ... -> p1` directed toward the single exit `p1`.
    Path { length: usize },
    /// The grid on `{(x, y): 0 <= x <= y <= k, y > 0}` with edges directed
    /// upwards and leftwards, exits on the column `x = 0` (whose outgoing
    /// edges are dropped so exits keep out-degree 0).
    HalfGrid { depth: usize },
    /// Underlying ray `y0 x1 y1 x2 ... xk yk` with edges `xi -> y(i-1)` and
    /// `xi -> yi`; every `y` is an exit.
    AltComb { depth: usize },
    /// Spine `r{k} -> ... -> r1` directed toward `r1`, a tooth `ri -> ei`
    /// per spine vertex and an extra exit `e0` fed by `r1`.
    IncomingComb { depth: usize },
    /// `copies` disjoint spines `c{j}r0 -> ... -> c{j}rk`, all sharing the
    /// teeth exits `e0..=ek` via `c{j}ri -> ei`.
    Turbine { copies: usize, depth: usize },
    /// Rooted `branching`-ary tree of the given depth; the root and every
    /// other level are exits, and each edge points at its exit endpoint.
    BranchingTree { branching: usize, depth: usize },
}

impl FamilyGenerator {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilyGenerator::Star { .. } => "star",
            FamilyGenerator::Path { .. } => "path",
            FamilyGenerator::HalfGrid { .. } => "half_grid",
            FamilyGenerator::AltComb { .. } => "alt_comb",
            FamilyGenerator::IncomingComb { .. } => "incoming_comb",
            FamilyGenerator::Turbine { .. } => "turbine",
            FamilyGenerator::BranchingTree { .. } => "branching_tree",
        }
    }

    /// Builds a generator from a family name and positional integers, the
    /// way the CLI receives them.
    pub fn from_spec(family: &str, params: &[usize]) -> Result<FamilyGenerator, Error> {
        let want = |n: usize| -> Result<(), Error> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::Param {
                    name: "params",
                    value: params.len(),
                    msg: "wrong number of family parameters",
                })
            }
        };
        Ok(match family {
            "star" => {
                want(1)?;
                FamilyGenerator::Star { leaves: params[0] }
            }
            "path" => {
                want(1)?;
                FamilyGenerator::Path { length: params[0] }
            }
            "half_grid" => {
                want(1)?;
                FamilyGenerator::HalfGrid { depth: params[0] }
            }
            "alt_comb" => {
                want(1)?;
                FamilyGenerator::AltComb { depth: params[0] }
            }
            "incoming_comb" => {
                want(1)?;
                FamilyGenerator::IncomingComb { depth: params[0] }
            }
            "turbine" => {
                want(2)?;
                FamilyGenerator::Turbine {
                    copies: params[0],
                    depth: params[1],
                }
            }
            "branching_tree" => {
                want(2)?;
                FamilyGenerator::BranchingTree {
                    branching: params[0],
                    depth: params[1],
                }
            }
            _ => {
                return Err(Error::Mode(format!("unknown family `{family}`")));
            }
        })
    }

    /// Produces the truncation. Inadmissible parameters are rejected with
    /// an error naming the offending value.
    pub fn generate(&self) -> Result<Dimaze, Error> {
        match *self {
            FamilyGenerator::Star { leaves } => {
                require("leaves", leaves, 1)?;
                let mut verts = vec!["c".to_string()];
                let mut edges = Vec::new();
                let mut exits = Vec::new();
                for i in 1..=leaves {
                    let e = format!("e{i}");
                    verts.push(e.clone());
                    edges.push(("c".to_string(), e.clone()));
                    exits.push(e);
                }
                Dimaze::new(&verts, &pairs(&edges), &exits)
            }
            FamilyGenerator::Path { length } => {
                require("length", length, 1)?;
                let verts: Vec<String> = (1..=length).map(|i| format!("p{i}")).collect();
                let edges: Vec<(String, String)> = (1..length)
                    .map(|i| (format!("p{}", i + 1), format!("p{i}")))
                    .collect();
                Dimaze::new(&verts, &pairs(&edges), &["p1".to_string()])
            }
            FamilyGenerator::HalfGrid { depth } => {
                require("depth", depth, 1)?;
                let name = |x: usize, y: usize| format!("({x},{y})");
                let inside = |x: usize, y: usize| y > 0 && x <= y && y <= depth;
                let mut verts = Vec::new();
                let mut edges = Vec::new();
                let mut exits = Vec::new();
                for y in 1..=depth {
                    for x in 0..=y {
                        verts.push(name(x, y));
                        if x == 0 {
                            exits.push(name(x, y));
                            continue; // outgoing edges of exits are dropped
                        }
                        if inside(x, y + 1) {
                            edges.push((name(x, y), name(x, y + 1)));
                        }
                        if inside(x - 1, y) {
                            edges.push((name(x, y), name(x - 1, y)));
                        }
                    }
                }
                Dimaze::new(&verts, &pairs(&edges), &exits)
            }
            FamilyGenerator::AltComb { depth } => {
                require("depth", depth, 1)?;
                let mut verts = vec!["y0".to_string()];
                let mut edges = Vec::new();
                let mut exits = vec!["y0".to_string()];
                for i in 1..=depth {
                    verts.push(format!("x{i}"));
                    verts.push(format!("y{i}"));
                    exits.push(format!("y{i}"));
                    edges.push((format!("x{i}"), format!("y{}", i - 1)));
                    edges.push((format!("x{i}"), format!("y{i}")));
                }
                Dimaze::new(&verts, &pairs(&edges), &exits)
            }
            FamilyGenerator::IncomingComb { depth } => {
                require("depth", depth, 1)?;
                let mut verts = vec!["e0".to_string()];
                let mut edges = Vec::new();
                let mut exits = vec!["e0".to_string()];
                for i in 1..=depth {
                    verts.push(format!("r{i}"));
                    verts.push(format!("e{i}"));
                    exits.push(format!("e{i}"));
                    edges.push((format!("r{i}"), format!("e{i}")));
                    if i > 1 {
                        edges.push((format!("r{i}"), format!("r{}", i - 1)));
                    }
                }
                edges.push(("r1".to_string(), "e0".to_string()));
                Dimaze::new(&verts, &pairs(&edges), &exits)
            }
            FamilyGenerator::Turbine { copies, depth } => {
                require("copies", copies, 2)?;
                require("depth", depth, 1)?;
                let mut verts = Vec::new();
                let mut edges = Vec::new();
                let mut exits = Vec::new();
                for i in 0..=depth {
                    verts.push(format!("e{i}"));
                    exits.push(format!("e{i}"));
                }
                for c in 0..copies {
                    for i in 0..=depth {
                        let r = format!("c{c}r{i}");
                        verts.push(r.clone());
                        edges.push((r.clone(), format!("e{i}")));
                        if i < depth {
                            edges.push((r, format!("c{c}r{}", i + 1)));
                        }
                    }
                }
                Dimaze::new(&verts, &pairs(&edges), &exits)
            }
            FamilyGenerator::BranchingTree { branching, depth } => {
                require("branching", branching, 1)?;
                require("depth", depth, 1)?;
                let mut verts = vec!["t".to_string()];
                let mut edges = Vec::new();
                let mut exits = vec!["t".to_string()];
                let mut level: Vec<String> = vec!["t".to_string()];
                for lvl in 1..=depth {
                    let mut next = Vec::new();
                    for parent in &level {
                        for c in 0..branching {
                            let child = format!("{parent}{c}");
                            verts.push(child.clone());
                            if lvl % 2 == 0 {
                                // even levels are exits; odd-level child points up
                                exits.push(child.clone());
                                edges.push((parent.clone(), child.clone()));
                            } else {
                                // odd-level child points at its exit parent
                                edges.push((child.clone(), parent.clone()));
                            }
                            next.push(child);
                        }
                    }
                    level = next;
                }
                Dimaze::new(&verts, &pairs(&edges), &exits)
            }
        }
    }
}

fn require(name: &'static str, value: usize, min: usize) -> Result<(), Error> {
    if value < min {
        return Err(Error::Param {
            name,
            value,
            msg: "below the family's minimum",
        });
    }
    Ok(())
}

fn pairs(edges: &[(String, String)]) -> Vec<(String, String)> {
    edges.to_vec()
}

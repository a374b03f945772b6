//! Command-line front end: every library operation behind a subcommand,
//! reading `dimaze v1` / `bigraph v1` / explicit-list JSON from stdin or a
//! file, writing text, JSON or DOT.
//!
//! Exit codes: 0 success or all properties hold, 1 data error or property
//! failure, 2 usage error.

use std::collections::BTreeSet;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gammoid::dimaze::{parse_vertex_set, Dimaze, Linkage};
use gammoid::linkage::{
    augment, augment_toward_base, extend_onto, is_independent, max_linkage, AugmentOutcome,
    ExtendOutcome, I3Outcome,
};
use gammoid::matroid::{
    base_criterion, check_axioms, circuits, cocircuits, finitarisation_probe, separation_value,
    MatroidView, ProbeBudget, VertexRule,
};
use gammoid::merge::{check_dagger, comb_trace, exchange, merge, ExchangeOutcome, TraceEnd};
use gammoid::transversal::{
    dimaze_tree_to_bipartite, mt_is_independent, tree_maximal_extension, BipartiteGraph,
};
use gammoid::FamilyGenerator;

#[derive(Parser)]
#[command(
    name = "gammoid",
    version,
    about = "dimaze linkages, transversal systems and desk-scale matroid checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArg {
    /// Read the input from a file instead of stdin.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family truncation and print it.
    Gen {
        /// star, path, half_grid, alt_comb, incoming_comb, turbine, branching_tree
        family: String,
        /// Family parameters (turbine: copies depth; branching_tree: branching depth).
        params: Vec<usize>,
        #[arg(long)]
        json: bool,
        /// Emit GraphViz DOT (exits as doubled nodes).
        #[arg(long)]
        dot: bool,
    },
    /// Check the structural rules; print violations, exit 1 if any.
    Validate {
        #[command(flatten)]
        input: InputArg,
    },
    /// Independence of a vertex set (dimaze or bigraph input); exit 1 if dependent.
    Indep {
        /// Comma-separated vertex names; `-` for the empty set.
        set: String,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        json: bool,
    },
    /// Maximum linkage from a source set, with its separator.
    Link {
        set: String,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        json: bool,
    },
    /// One augmentation round against an existing linkage.
    Augment {
        set: String,
        /// Linkage literal: paths joined by `;`, vertices by `,`; `-` empty.
        linkage: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Extend a linkage so it covers every exit.
    ExtendOnto {
        linkage: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Merge a red and a blue linkage.
    Merge {
        red: String,
        blue: String,
        /// Print the per-step frontier trace.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        input: InputArg,
    },
    /// Exchange step: find u with J + v - u independent.
    Exchange {
        i: String,
        j: String,
        v: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Independence-augmentation against a maximal set B.
    AugmentBase {
        i: String,
        b: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Trace an alternating-comb prefix from x0 against I.
    CombTrace {
        i: String,
        x0: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[command(flatten)]
        input: InputArg,
    },
    /// Check that onto-linkable sets are maximal; exit 1 on violations.
    Dagger {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        guard: Option<usize>,
    },
    /// Check I1, I2, I3, IM, B1, B2; exit 1 if any fails.
    Axioms {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        guard: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate circuits and cocircuits up to a size bound.
    Circuits {
        #[arg(long, default_value_t = 6)]
        max: usize,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        guard: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Separation value of the partition (X, rest).
    Separation {
        x: String,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        guard: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Compare onto-linkable sets with maximal independent sets.
    BaseCriterion {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        guard: Option<usize>,
    },
    /// Finitarisation probe over a family truncation range.
    Finprobe {
        family: String,
        /// exits, spine, spines, diagonal-exits
        rule: String,
        /// Inclusive range `lo..hi` of truncation depths.
        krange: String,
        #[arg(long, default_value_t = 2)]
        copies: usize,
        #[arg(long, default_value_t = 2)]
        branching: usize,
        /// Largest subset size checked for within-budget finitarisation.
        #[arg(long, default_value_t = 6)]
        budget: usize,
    },
    /// Maximal independent extension in a rooted bipartite tree.
    TreeBase {
        i: String,
        #[command(flatten)]
        input: InputArg,
        /// Print the full stage history.
        #[arg(long)]
        stages: bool,
    },
    /// Convert a tree-shaped dimaze to its bipartite presentation.
    ToBigraph {
        #[command(flatten)]
        input: InputArg,
    },
}

fn read_input(arg: &InputArg) -> Result<String, String> {
    match &arg.input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(buf)
        }
    }
}

fn read_dimaze(arg: &InputArg) -> Result<Dimaze, String> {
    let text = read_input(arg)?;
    let d = Dimaze::parse(&text).map_err(|e| e.to_string())?;
    let violations = d.violations();
    if !violations.is_empty() {
        return Err(format!("invalid dimaze: {}", violations.join("; ")));
    }
    Ok(d)
}

fn read_bigraph(arg: &InputArg) -> Result<BipartiteGraph, String> {
    let text = read_input(arg)?;
    BipartiteGraph::parse(&text).map_err(|e| e.to_string())
}

/// A dimaze or a bipartite graph, decided by the header.
enum GraphInput {
    Dimaze(Dimaze),
    Bigraph(BipartiteGraph),
}

fn read_graph(arg: &InputArg) -> Result<GraphInput, String> {
    let text = read_input(arg)?;
    let head = text.trim_start();
    if head.starts_with("bigraph v1") {
        Ok(GraphInput::Bigraph(
            BipartiteGraph::parse(&text).map_err(|e| e.to_string())?,
        ))
    } else {
        let d = Dimaze::parse(&text).map_err(|e| e.to_string())?;
        let violations = d.violations();
        if !violations.is_empty() {
            return Err(format!("invalid dimaze: {}", violations.join("; ")));
        }
        Ok(GraphInput::Dimaze(d))
    }
}

fn names(set: &BTreeSet<String>) -> String {
    if set.is_empty() {
        "-".to_string()
    } else {
        set.iter().cloned().collect::<Vec<_>>().join(",")
    }
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen {
            family,
            params,
            json,
            dot,
        } => {
            let gen = FamilyGenerator::from_spec(&family, &params).map_err(|e| e.to_string())?;
            let d = gen.generate().map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&d.to_json()).unwrap());
            } else if dot {
                print!("{}", d.to_dot());
            } else {
                print!("{}", d.serialize());
            }
            Ok(0)
        }
        Command::Validate { input } => {
            let text = read_input(&input)?;
            let d = Dimaze::parse(&text).map_err(|e| e.to_string())?;
            let violations = d.violations();
            for v in &violations {
                println!("{v}");
            }
            if violations.is_empty() {
                println!("valid");
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Indep { set, input, json } => {
            let set = parse_vertex_set(&set);
            match read_graph(&input)? {
                GraphInput::Dimaze(d) => {
                    let witness = is_independent(&d, &set).map_err(|e| e.to_string())?;
                    if json {
                        println!(
                            "{}",
                            serde_json::json!({
                                "independent": witness.is_some(),
                                "witness": witness.as_ref().map(|w| w.named(&d)),
                            })
                        );
                    } else {
                        match &witness {
                            Some(w) => println!("true  witness: {}", w.to_literal(&d)),
                            None => println!("false"),
                        }
                    }
                    Ok(if witness.is_some() { 0 } else { 1 })
                }
                GraphInput::Bigraph(g) => {
                    let witness = mt_is_independent(&g, &set).map_err(|e| e.to_string())?;
                    if json {
                        println!(
                            "{}",
                            serde_json::json!({
                                "independent": witness.is_some(),
                                "witness": witness.as_ref().map(|m| m.named(&g)),
                            })
                        );
                    } else {
                        match &witness {
                            Some(m) => println!(
                                "true  matching: {}",
                                m.named(&g)
                                    .iter()
                                    .map(|(a, b)| format!("{a}-{b}"))
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            ),
                            None => println!("false"),
                        }
                    }
                    Ok(if witness.is_some() { 0 } else { 1 })
                }
            }
        }
        Command::Link { set, input, json } => {
            let d = read_dimaze(&input)?;
            let set = parse_vertex_set(&set);
            let (link, sep) = max_linkage(&d, &set).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "linkage": link.named(&d),
                        "initials": link.ini_names(&d),
                        "separator": sep.names(&d),
                    })
                );
            } else {
                println!("linkage: {}", link.to_literal(&d));
                println!("separator: {}", names(&sep.names(&d)));
            }
            Ok(0)
        }
        Command::Augment {
            set,
            linkage,
            input,
        } => {
            let d = read_dimaze(&input)?;
            let set = parse_vertex_set(&set);
            let link = Linkage::parse_literal(&d, &linkage).map_err(|e| e.to_string())?;
            match augment(&d, &set, &link).map_err(|e| e.to_string())? {
                AugmentOutcome::Extended { linkage, walk } => {
                    println!("extended: {}", linkage.to_literal(&d));
                    println!("walk: {}", walk.named(&d).join(" "));
                }
                AugmentOutcome::Separated(sep) => {
                    println!("separator: {}", names(&sep.names(&d)));
                }
            }
            Ok(0)
        }
        Command::ExtendOnto { linkage, input } => {
            let d = read_dimaze(&input)?;
            let link = Linkage::parse_literal(&d, &linkage).map_err(|e| e.to_string())?;
            match extend_onto(&d, &link).map_err(|e| e.to_string())? {
                ExtendOutcome::Extended(q) => {
                    println!("{}", q.to_literal(&d));
                    Ok(0)
                }
                ExtendOutcome::Unreachable(missed) => {
                    println!("unreachable exits: {}", names(&missed));
                    Ok(1)
                }
            }
        }
        Command::Merge {
            red,
            blue,
            trace,
            input,
        } => {
            let d = read_dimaze(&input)?;
            let red = Linkage::parse_literal(&d, &red).map_err(|e| e.to_string())?;
            let blue = Linkage::parse_literal(&d, &blue).map_err(|e| e.to_string())?;
            let (out, state) = merge(&d, &red, &blue, trace).map_err(|e| e.to_string())?;
            println!("merged: {}", out.to_literal(&d));
            println!("initials: {}", names(&out.ini_names(&d)));
            println!("terminals: {}", names(&out.ter_names(&d)));
            println!("steps: {}", state.steps);
            if trace {
                print!("{}", state.trace_dump(&d));
            }
            Ok(0)
        }
        Command::Exchange { i, j, v, input } => {
            let d = read_dimaze(&input)?;
            let i = parse_vertex_set(&i);
            let j = parse_vertex_set(&j);
            match exchange(&d, &i, &j, &v).map_err(|e| e.to_string())? {
                ExchangeOutcome::Swap { removed, witness } => {
                    println!("u = {removed}");
                    println!("witness: {}", witness.to_literal(&d));
                }
                ExchangeOutcome::NoneNeeded { witness } => {
                    println!("none needed: J + v is independent");
                    println!("witness: {}", witness.to_literal(&d));
                }
            }
            Ok(0)
        }
        Command::AugmentBase { i, b, input } => {
            let d = read_dimaze(&input)?;
            let i = parse_vertex_set(&i);
            let b = parse_vertex_set(&b);
            match augment_toward_base(&d, &i, &b).map_err(|e| e.to_string())? {
                I3Outcome::Extended { x, witness } => {
                    println!("x = {x}");
                    println!("witness: {}", witness.to_literal(&d));
                }
                I3Outcome::AlreadyMaximal { onto } => {
                    println!("I is maximal; onto witness: {}", onto.to_literal(&d));
                }
            }
            Ok(0)
        }
        Command::CombTrace {
            i,
            x0,
            depth,
            input,
        } => {
            let d = read_dimaze(&input)?;
            let i = parse_vertex_set(&i);
            let prefix = comb_trace(&d, &i, &x0, depth).map_err(|e| e.to_string())?;
            println!(
                "seed {} junction {}",
                d.name(prefix.seed),
                d.name(prefix.start_junction)
            );
            for (k, s) in prefix.steps.iter().enumerate() {
                println!(
                    "alternation {}: x={} q={} p={} settle={} blue={} red={} tooth={}",
                    k + 1,
                    d.name(s.x),
                    d.name(s.q),
                    d.name(s.p),
                    s.settle_step,
                    s.blue_segment
                        .iter()
                        .map(|&v| d.name(v))
                        .collect::<Vec<_>>()
                        .join(","),
                    s.red_segment
                        .iter()
                        .map(|&v| d.name(v))
                        .collect::<Vec<_>>()
                        .join(","),
                    s.tooth
                        .iter()
                        .map(|&v| d.name(v))
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
            let end = match &prefix.end {
                TraceEnd::ReachedMaxDepth => "reached max depth".to_string(),
                TraceEnd::JunctionOffBlue { step, junction } => format!(
                    "step {step}: junction {} lies on no blue path",
                    d.name(*junction)
                ),
                TraceEnd::NoSpineVertex { step } => {
                    format!("step {step}: no merged-system vertex before the junction")
                }
                TraceEnd::RepeatedSpine { step } => format!("step {step}: red path repeated"),
            };
            println!("depth {} | end: {end}", prefix.depth());
            Ok(0)
        }
        Command::Dagger { input, guard } => {
            let d = read_dimaze(&input)?;
            let violations = check_dagger(&d, guard).map_err(|e| e.to_string())?;
            if violations.is_empty() {
                println!("ok: every onto-linkable set is maximal");
                Ok(0)
            } else {
                for v in &violations {
                    println!(
                        "violation: {} is onto-linkable but extends by {}",
                        names(&v.set),
                        v.extension
                    );
                }
                Ok(1)
            }
        }
        Command::Axioms { input, guard, json } => {
            let text = read_input(&input)?;
            let m = MatroidView::parse(&text).map_err(|e| e.to_string())?;
            let report = check_axioms(&m, guard).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).unwrap()
                );
            } else {
                for (name, check) in report.entries() {
                    match check {
                        gammoid::matroid::AxiomCheck::Pass => println!("{name}: pass"),
                        gammoid::matroid::AxiomCheck::Fail { sets, note } => {
                            let detail = sets
                                .iter()
                                .map(|(label, s)| format!("{label}={}", names(s)))
                                .collect::<Vec<_>>()
                                .join(" ");
                            println!("{name}: FAIL {note} {detail}");
                        }
                    }
                }
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Circuits {
            max,
            input,
            guard,
            json,
        } => {
            let text = read_input(&input)?;
            let m = MatroidView::parse(&text).map_err(|e| e.to_string())?;
            let cs = circuits(&m, max, guard).map_err(|e| e.to_string())?;
            let ccs = cocircuits(&m, max, guard).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "circuits": cs,
                        "cocircuits": ccs,
                    })
                );
            } else {
                println!("circuits ({}):", cs.len());
                for c in &cs {
                    println!("  {}", names(c));
                }
                println!("cocircuits ({}):", ccs.len());
                for c in &ccs {
                    println!("  {}", names(c));
                }
            }
            Ok(0)
        }
        Command::Separation {
            x,
            input,
            guard,
            json,
        } => {
            let text = read_input(&input)?;
            let m = MatroidView::parse(&text).map_err(|e| e.to_string())?;
            let x = parse_vertex_set(&x);
            let rep = separation_value(&m, &x, guard).map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
            } else {
                println!("X: {}", names(&rep.x_side));
                println!("Y: {}", names(&rep.y_side));
                println!(
                    "deleted: {} (checked {} choices)",
                    rep.deleted, rep.choices_checked
                );
                for (k, is) in &rep.k_separations {
                    println!("{k}-separation: {}", if *is { "yes" } else { "no" });
                }
            }
            Ok(0)
        }
        Command::BaseCriterion { input, guard } => {
            let d = read_dimaze(&input)?;
            let m = MatroidView::from_dimaze(d);
            let rep = base_criterion(&m, guard).map_err(|e| e.to_string())?;
            if rep.matched {
                println!("ok: onto-linkable sets = maximal independent sets");
                Ok(0)
            } else {
                for s in &rep.onto_not_maximal {
                    println!("onto-linkable but not maximal: {}", names(s));
                }
                for s in &rep.maximal_not_onto {
                    println!("maximal but not onto-linkable: {}", names(s));
                }
                Ok(1)
            }
        }
        Command::Finprobe {
            family,
            rule,
            krange,
            copies,
            branching,
            budget,
        } => {
            let rule = VertexRule::parse(&rule).map_err(|e| e.to_string())?;
            let (lo, hi) = krange
                .split_once("..")
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or_else(|| format!("bad k-range `{krange}`; expected lo..hi"))?;
            let fam = family.clone();
            let gen_at = move |k: usize| {
                FamilyGenerator::from_spec(
                    &fam,
                    &match fam.as_str() {
                        "turbine" => vec![copies, k],
                        "branching_tree" => vec![branching, k],
                        _ => vec![k],
                    },
                )
            };
            let reports = finitarisation_probe(
                gen_at,
                rule,
                lo..=hi,
                ProbeBudget {
                    subset_size: budget,
                    ..ProbeBudget::default()
                },
            )
            .map_err(|e| e.to_string())?;
            for r in &reports {
                println!(
                    "k={} |I|={} finitary<=({})={} distance={}{}{}",
                    r.k,
                    r.set.len(),
                    budget,
                    r.within_budget_finitary,
                    r.deletion_distance,
                    if r.distance_exhausted {
                        " (greedy bound)"
                    } else {
                        ""
                    },
                    if r.budget_exhausted {
                        " [budget exhausted]"
                    } else {
                        ""
                    },
                );
                if let Some(w) = &r.dependent_witness {
                    println!("  dependent witness: {}", names(w));
                }
                for m in &r.maximal_elements {
                    println!(
                        "  maximal finitary: {} distance={}",
                        names(&m.set),
                        m.deletion_distance
                    );
                }
            }
            Ok(0)
        }
        Command::TreeBase { i, input, stages } => {
            let g = read_bigraph(&input)?;
            let i = parse_vertex_set(&i);
            let ext = tree_maximal_extension(&g, &i).map_err(|e| e.to_string())?;
            println!("base: {}", names(&ext.base));
            println!(
                "matching: {}",
                ext.matching
                    .named(&g)
                    .iter()
                    .map(|(a, b)| format!("{a}-{b}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            if stages {
                for s in &ext.stages {
                    println!(
                        "stage {}: matched {} | new {} | reps {}",
                        s.stage,
                        names(&s.matched_left),
                        names(&s.newly_saturated),
                        names(&s.representatives),
                    );
                    for p in &s.exchange_paths {
                        println!("  path: {}", p.join(" "));
                    }
                }
            }
            Ok(0)
        }
        Command::ToBigraph { input } => {
            let d = read_dimaze(&input)?;
            let g = dimaze_tree_to_bipartite(&d).map_err(|e| e.to_string())?;
            print!("{}", g.serialize());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

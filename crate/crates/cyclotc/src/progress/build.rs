//! From proof graphs to the abstract condition graphs the checkers run on,
//! and from condition graphs to Büchi automata for the progress condition.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::buchi::Buchi;
use super::inclusion::BranchGraph;
use crate::calculi::{AncestryKind, Label, System};
use crate::proofgraph::{ancestry_graph, GraphError, ProofGraph};
use crate::syntax::PdlFormula;

/// Which global correctness condition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Some infinite cedent path all of whose formula traces hit progress
    /// edges infinitely often (the hypersequent systems).
    HyperTrace,
    /// Some infinite formula trace hits progress edges infinitely often
    /// (plain sequents; edges are pre-filtered to trace-continuations).
    SingleTrace,
    /// Some infinite formula thread whose maximal infinitely-recurring edge
    /// priority is even (the modal systems).
    Parity,
}

/// A formula-ancestry edge attached to a graph edge. `src` lives in the
/// target node (the premise), `dst` in the source node (the conclusion).
#[derive(Debug, Clone)]
pub struct FEdge {
    pub src: (usize, usize),
    pub dst: (usize, usize),
    pub progress: bool,
    pub priority: u32,
}

#[derive(Debug, Clone)]
pub struct PEdge {
    pub from: usize,
    pub to: usize,
    /// Cedent-ancestry pairs (premise cedent in `to`, conclusion cedent in
    /// `from`).
    pub ced: Vec<(usize, usize)>,
    pub fml: Vec<FEdge>,
}

/// The abstract input of the progress checkers: a finite rooted graph whose
/// edges carry ancestry data.
#[derive(Debug, Clone)]
pub struct PGraph {
    pub condition: Condition,
    pub root: usize,
    /// Formula counts per cedent, per node.
    pub shape: Vec<Vec<usize>>,
    pub edges: Vec<PEdge>,
    /// Human-readable node names for diagnostics.
    pub node_names: Vec<String>,
}

impl PGraph {
    pub fn num_nodes(&self) -> usize {
        self.shape.len()
    }

    pub fn branch_graph(&self) -> BranchGraph {
        BranchGraph {
            root: self.root,
            num_nodes: self.num_nodes(),
            edges: self.edges.iter().map(|e| (e.from, e.to)).collect(),
        }
    }
}

fn label_shape(label: &Label) -> Vec<usize> {
    match label {
        Label::Hyper(h) => h.cedents.iter().map(|c| c.fmls.len()).collect(),
        Label::Fol(s) => vec![s.fmls.len()],
        Label::Pdl(s) => vec![s.fmls.len()],
    }
}

/// Priorities for the modal progress condition: among the closure formulas,
/// iteration modalities get priorities favouring smaller formulas, boxes
/// even and diamonds odd; everything else is neutral (odd, lowest).
fn pdl_priorities(g: &ProofGraph) -> BTreeMap<PdlFormula, u32> {
    let mut plus_formulas = std::collections::BTreeSet::new();
    for node in g.nodes.values() {
        if let Label::Pdl(s) = &node.label {
            for f in &s.fmls {
                collect_plus(f, &mut plus_formulas);
            }
        }
    }
    let mut sorted: Vec<PdlFormula> = plus_formulas.into_iter().collect();
    // larger formulas first, so smaller formulas get larger priorities
    sorted.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.cmp(b)));
    let mut out = BTreeMap::new();
    for (i, f) in sorted.into_iter().enumerate() {
        let base = 2 * (i as u32 + 1);
        let prio = match &f {
            PdlFormula::Box_(crate::syntax::Program::Plus(_), _) => base,
            _ => base + 1,
        };
        out.insert(f, prio);
    }
    out
}

fn collect_plus(f: &PdlFormula, out: &mut std::collections::BTreeSet<PdlFormula>) {
    match f {
        PdlFormula::Prop { .. } => {}
        PdlFormula::And(l, r) | PdlFormula::Or(l, r) => {
            collect_plus(l, out);
            collect_plus(r, out);
        }
        PdlFormula::Dia(p, g) | PdlFormula::Box_(p, g) => {
            if matches!(p, crate::syntax::Program::Plus(_)) {
                out.insert(f.clone());
            }
            collect_plus_prog(p, out);
            collect_plus(g, out);
        }
    }
}

fn collect_plus_prog(p: &crate::syntax::Program, out: &mut std::collections::BTreeSet<PdlFormula>) {
    use crate::syntax::Program::*;
    match p {
        Atom(_) => {}
        Comp(a, b) | Union(a, b) => {
            collect_plus_prog(a, out);
            collect_plus_prog(b, out);
        }
        Plus(a) => collect_plus_prog(a, out),
        Test(f) => collect_plus(f, out),
    }
}

/// Converts a locally valid proof graph into the abstract condition graph.
pub fn pgraph_of_proof(g: &ProofGraph) -> Result<PGraph, GraphError> {
    let ag = ancestry_graph(g)?;
    let ids: Vec<String> = g.nodes.keys().cloned().collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let condition = match g.system {
        System::Htc | System::HtcEq => Condition::HyperTrace,
        System::Tclg => Condition::SingleTrace,
        System::Lpd | System::LpdTest => Condition::Parity,
    };
    let priorities = if condition == Condition::Parity {
        pdl_priorities(g)
    } else {
        BTreeMap::new()
    };
    let shape: Vec<Vec<usize>> = ids.iter().map(|id| label_shape(&g.nodes[id].label)).collect();
    let mut edges = Vec::new();
    for (id, node) in &g.nodes {
        for (i, child) in node.children.iter().enumerate() {
            let from = index[id.as_str()];
            let to = index[child.target()];
            let raw = &ag.edges[&(id.clone(), i)];
            let mut ced = Vec::new();
            let mut fml = Vec::new();
            for e in raw {
                match e.kind {
                    AncestryKind::Cedent => ced.push((e.src_ced, e.dst_ced)),
                    AncestryKind::Formula => {
                        let src = (e.src_ced, e.src_fml.unwrap());
                        let dst = (e.dst_ced, e.dst_fml.unwrap());
                        match condition {
                            Condition::HyperTrace => fml.push(FEdge {
                                src,
                                dst,
                                progress: e.progress,
                                priority: 0,
                            }),
                            Condition::SingleTrace => {
                                // only identity / substitution images of coTC
                                // formulas and the unfolding continuation are
                                // trace steps
                                let concl = &g.nodes[id].label;
                                let prem = &g.nodes[child.target()].label;
                                let cf = match concl {
                                    Label::Fol(s) => &s.fmls[dst.1],
                                    _ => unreachable!(),
                                };
                                let pf = match prem {
                                    Label::Fol(s) => &s.fmls[src.1],
                                    _ => unreachable!(),
                                };
                                let is_cotc = |f: &crate::syntax::Formula| {
                                    matches!(f, crate::syntax::Formula::CoTc(_))
                                };
                                let trace_step = if e.progress {
                                    true
                                } else if !is_cotc(cf) || !is_cotc(pf) {
                                    false
                                } else if node.rule.name == Some(crate::calculi::RuleName::Subst) {
                                    true
                                } else {
                                    cf == pf
                                };
                                if trace_step {
                                    fml.push(FEdge {
                                        src,
                                        dst,
                                        progress: e.progress,
                                        priority: 0,
                                    });
                                }
                            }
                            Condition::Parity => {
                                let concl = &g.nodes[id].label;
                                let cf = match concl {
                                    Label::Pdl(s) => &s.fmls[dst.1],
                                    _ => unreachable!(),
                                };
                                // neutral odd 1 unless the step unfolds an
                                // iteration modality at its principal
                                let priority = if e.progress {
                                    priorities.get(cf).copied().unwrap_or(1)
                                } else {
                                    1
                                };
                                fml.push(FEdge {
                                    src,
                                    dst,
                                    progress: e.progress,
                                    priority,
                                });
                            }
                        }
                    }
                }
            }
            edges.push(PEdge { from, to, ced, fml });
        }
    }
    Ok(PGraph {
        condition,
        root: index[g.root.as_str()],
        shape,
        edges,
        node_names: ids,
    })
}

/// Obligation set over the formulas of one cedent, as a bitmask.
type Obligation = u64;

fn full_obligation(n: usize) -> Obligation {
    if n >= 64 {
        panic!("cedent too large for obligation mask");
    }
    (1u64 << n) - 1
}

/// Büchi automaton accepting precisely the progressing branches.
pub fn progress_automaton(p: &PGraph) -> Buchi {
    match p.condition {
        Condition::HyperTrace => hyper_automaton(p),
        Condition::SingleTrace => trace_automaton(p),
        Condition::Parity => parity_thread_automaton(p),
    }
}

/// Guess a hypertrace; run the breakpoint construction over the universal
/// "all traces progress" obligation. State: (node, cedent, owing, flag).
fn hyper_automaton(p: &PGraph) -> Buchi {
    type S = (usize, usize, Obligation, bool);
    let mut ids: HashMap<S, usize> = HashMap::new();
    let mut states: Vec<S> = Vec::new();
    let mut delta: Vec<BTreeMap<usize, Vec<usize>>> = Vec::new();
    fn intern(
        s: (usize, usize, u64, bool),
        ids: &mut HashMap<(usize, usize, u64, bool), usize>,
        states: &mut Vec<(usize, usize, u64, bool)>,
        delta: &mut Vec<BTreeMap<usize, Vec<usize>>>,
        queue: &mut VecDeque<usize>,
    ) -> usize {
        if let Some(&id) = ids.get(&s) {
            return id;
        }
        let id = states.len();
        ids.insert(s, id);
        states.push(s);
        delta.push(BTreeMap::new());
        queue.push_back(id);
        id
    }
    let mut queue = VecDeque::new();
    let mut init = Vec::new();
    for ced in 0..p.shape[p.root].len() {
        let o = full_obligation(p.shape[p.root][ced]);
        init.push(intern(
            (p.root, ced, o, false),
            &mut ids,
            &mut states,
            &mut delta,
            &mut queue,
        ));
    }
    while let Some(sid) = queue.pop_front() {
        let (node, ced, owing, _) = states[sid];
        for (letter, e) in p.edges.iter().enumerate() {
            if e.from != node {
                continue;
            }
            for &(src_ced, dst_ced) in &e.ced {
                if dst_ced != ced {
                    continue;
                }
                // propagate obligations through non-progress formula edges
                let mut next: Obligation = 0;
                for fe in &e.fml {
                    if fe.dst.0 == ced
                        && fe.src.0 == src_ced
                        && !fe.progress
                        && owing & (1 << fe.dst.1) != 0
                    {
                        next |= 1 << fe.src.1;
                    }
                }
                let (next, flag) = if next == 0 {
                    (full_obligation(p.shape[e.to][src_ced]), true)
                } else {
                    (next, false)
                };
                let tid = intern(
                    (e.to, src_ced, next, flag),
                    &mut ids,
                    &mut states,
                    &mut delta,
                    &mut queue,
                );
                let entry = delta[sid].entry(letter).or_default();
                if !entry.contains(&tid) {
                    entry.push(tid);
                }
            }
        }
    }
    let accepting: Vec<bool> = states.iter().map(|s| s.3).collect();
    let labels = states
        .iter()
        .map(|(n, c, o, f)| format!("{}#{c} O={o:b}{}", p.node_names[*n], if *f { " !" } else { "" }))
        .collect();
    Buchi {
        num_letters: p.edges.len(),
        init,
        accepting,
        delta,
        labels,
    }
}

/// Guess a formula trace, possibly starting mid-branch; accept on progress
/// edges infinitely often. State: idle(node) or (node, formula, flag).
fn trace_automaton(p: &PGraph) -> Buchi {
    // state encoding: idle states first (one per node), then tracking states
    let n = p.num_nodes();
    let mut track_ids: HashMap<(usize, usize, usize, bool), usize> = HashMap::new();
    let mut states: Vec<String> = (0..n).map(|i| format!("idle {}", p.node_names[i])).collect();
    let mut accepting = vec![false; n];
    for node in 0..n {
        for (ced, &len) in p.shape[node].iter().enumerate() {
            for fml in 0..len {
                for flag in [false, true] {
                    let id = states.len();
                    track_ids.insert((node, ced, fml, flag), id);
                    states.push(format!(
                        "{}#{ced}.{fml}{}",
                        p.node_names[node],
                        if flag { " !" } else { "" }
                    ));
                    accepting.push(flag);
                }
            }
        }
    }
    let mut delta: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); states.len()];
    for (letter, e) in p.edges.iter().enumerate() {
        // idle moves along the branch, or picks up any formula in the premise
        let mut idle_succs = vec![e.to];
        for (ced, &len) in p.shape[e.to].iter().enumerate() {
            for fml in 0..len {
                idle_succs.push(track_ids[&(e.to, ced, fml, false)]);
            }
        }
        delta[e.from].insert(letter, idle_succs);
        for fe in &e.fml {
            let src_id = track_ids[&(e.to, fe.src.0, fe.src.1, fe.progress)];
            for flag in [false, true] {
                if let Some(&dst_id) = track_ids.get(&(e.from, fe.dst.0, fe.dst.1, flag)) {
                    let entry = delta[dst_id].entry(letter).or_default();
                    if !entry.contains(&src_id) {
                        entry.push(src_id);
                    }
                }
            }
        }
    }
    let mut init = vec![p.root];
    for (ced, &len) in p.shape[p.root].iter().enumerate() {
        for fml in 0..len {
            init.push(track_ids[&(p.root, ced, fml, false)]);
        }
    }
    Buchi {
        num_letters: p.edges.len(),
        init,
        accepting,
        delta,
        labels: states,
    }
}

/// Guess a thread and an even priority d; check that priorities above d stop
/// occurring while d recurs. State: (node, formula, phase) with
/// phase = 0 (uncommitted) or (d, seen-d-flag).
fn parity_thread_automaton(p: &PGraph) -> Buchi {
    let mut evens: Vec<u32> = p
        .edges
        .iter()
        .flat_map(|e| e.fml.iter().map(|f| f.priority))
        .filter(|pr| pr % 2 == 0)
        .collect();
    evens.sort();
    evens.dedup();
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Phase {
        Free,
        Committed(u32, bool),
    }
    type S = (usize, usize, usize, Phase);
    let mut ids: HashMap<S, usize> = HashMap::new();
    let mut accepting = Vec::new();
    let mut labels = Vec::new();
    // materialize all states
    for node in 0..p.num_nodes() {
        for (ced, &len) in p.shape[node].iter().enumerate() {
            for fml in 0..len {
                let mut phases = vec![Phase::Free];
                for &d in &evens {
                    phases.push(Phase::Committed(d, false));
                    phases.push(Phase::Committed(d, true));
                }
                for phase in phases {
                    let id = labels.len();
                    ids.insert((node, ced, fml, phase), id);
                    accepting.push(matches!(phase, Phase::Committed(_, true)));
                    labels.push(format!(
                        "{}#{ced}.{fml}{}",
                        p.node_names[node],
                        match phase {
                            Phase::Free => String::new(),
                            Phase::Committed(d, seen) =>
                                format!(" d={d}{}", if seen { "!" } else { "" }),
                        }
                    ));
                }
            }
        }
    }
    let mut delta: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); labels.len()];
    for (letter, e) in p.edges.iter().enumerate() {
        for fe in &e.fml {
            for phase in std::iter::once(Phase::Free).chain(
                evens
                    .iter()
                    .flat_map(|&d| [Phase::Committed(d, false), Phase::Committed(d, true)]),
            ) {
                let dst_id = match ids.get(&(e.from, fe.dst.0, fe.dst.1, phase)) {
                    Some(&id) => id,
                    None => continue,
                };
                let mut succs = Vec::new();
                match phase {
                    Phase::Free => {
                        succs.push((e.to, fe.src.0, fe.src.1, Phase::Free));
                        for &d in &evens {
                            if fe.priority <= d {
                                succs.push((
                                    e.to,
                                    fe.src.0,
                                    fe.src.1,
                                    Phase::Committed(d, fe.priority == d),
                                ));
                            }
                        }
                    }
                    Phase::Committed(d, _) => {
                        if fe.priority <= d {
                            succs.push((
                                e.to,
                                fe.src.0,
                                fe.src.1,
                                Phase::Committed(d, fe.priority == d),
                            ));
                        }
                    }
                }
                for s in succs {
                    let tid = ids[&s];
                    let entry = delta[dst_id].entry(letter).or_default();
                    if !entry.contains(&tid) {
                        entry.push(tid);
                    }
                }
            }
        }
    }
    let mut init = Vec::new();
    for (ced, &len) in p.shape[p.root].iter().enumerate() {
        for fml in 0..len {
            init.push(ids[&(p.root, ced, fml, Phase::Free)]);
        }
    }
    Buchi {
        num_letters: p.edges.len(),
        init,
        accepting,
        delta,
        labels,
    }
}

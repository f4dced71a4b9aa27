//! The global correctness (progress) check for cyclic preproofs, decided via
//! ω-automata, with a bounded lasso oracle for cross-validation.

pub mod buchi;
pub mod build;
pub mod inclusion;
pub mod oracle;

use thiserror::Error;

pub use buchi::Buchi;
pub use build::{pgraph_of_proof, progress_automaton, Condition, FEdge, PEdge, PGraph};
pub use oracle::{lasso_oracle, lasso_progressing, OracleBounds, OracleVerdict, PLasso};

use crate::proofgraph::{GraphError, Lasso, ProofGraph};
use inclusion::{branch_inclusion, Inclusion};

#[derive(Debug, Error)]
pub enum ProgressError {
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Outcome of the progress check; a rejected proof carries a replayable
/// non-progressing branch.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub accepted: bool,
    pub counterexample: Option<Lasso>,
}

/// Default complementation / search budget, overridable through the
/// `CYCLOTC_STATE_BUDGET` environment variable.
pub fn state_budget() -> usize {
    std::env::var("CYCLOTC_STATE_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1_000_000)
}

/// The safety automaton of all infinite branches of the proof graph.
pub fn branch_automaton(g: &ProofGraph) -> Result<Buchi, ProgressError> {
    let p = pgraph_of_proof(g)?;
    Ok(p.branch_graph().to_buchi())
}

/// Rank-based complementation (re-exported on the automaton type).
pub fn complement(b: &Buchi, budget: usize) -> Result<Buchi, ProgressError> {
    b.complement(budget)
}

/// Decides the progress condition: accepted iff every infinite branch is in
/// the language of the progress automaton.
pub fn check_proof(g: &ProofGraph) -> Result<Verdict, ProgressError> {
    let p = pgraph_of_proof(g)?;
    let verdict = check_pgraph(&p)?;
    Ok(Verdict {
        accepted: verdict.accepted,
        counterexample: verdict
            .counterexample
            .map(|l| plasso_to_lasso(g, &p, &l)),
    })
}

/// Abstract-level verdict, shared by the proof-level checker and the
/// synthetic cross-validation tests.
#[derive(Debug, Clone)]
pub struct PVerdict {
    pub accepted: bool,
    pub counterexample: Option<PLasso>,
}

pub fn check_pgraph(p: &PGraph) -> Result<PVerdict, ProgressError> {
    let nba = progress_automaton(p);
    let graph = p.branch_graph();
    match branch_inclusion(&graph, &nba, state_budget())? {
        Inclusion::Holds => Ok(PVerdict {
            accepted: true,
            counterexample: None,
        }),
        Inclusion::Fails { stem, cycle } => Ok(PVerdict {
            accepted: false,
            counterexample: Some(PLasso { stem, cycle }),
        }),
    }
}

/// The same decision through the explicit complementation route:
/// emptiness of branch ∩ complement(progress). Exponential; used to
/// cross-validate [`check_pgraph`] at small scale.
pub fn check_pgraph_via_complement(p: &PGraph, budget: usize) -> Result<PVerdict, ProgressError> {
    let nba = progress_automaton(p);
    let comp = nba.complement(budget)?;
    let branch = p.branch_graph().to_buchi();
    let product = product_intersection(&branch, &comp);
    match product.find_accepting_lasso() {
        None => Ok(PVerdict {
            accepted: true,
            counterexample: None,
        }),
        Some((stem, cycle)) => Ok(PVerdict {
            accepted: false,
            counterexample: Some(PLasso { stem, cycle }),
        }),
    }
}

/// Büchi intersection with the standard alternating-phase flag.
pub fn product_intersection(a: &Buchi, b: &Buchi) -> Buchi {
    use std::collections::BTreeMap;
    let (na, nb) = (a.states(), b.states());
    let id = |qa: usize, qb: usize, phase: usize| (qa * nb + qb) * 2 + phase;
    let mut delta = vec![BTreeMap::new(); na * nb * 2];
    for qa in 0..na {
        for qb in 0..nb {
            for phase in 0..2 {
                let next_phase = match phase {
                    0 if a.accepting[qa] => 1,
                    1 if b.accepting[qb] => 0,
                    p => p,
                };
                let dd: &mut BTreeMap<usize, Vec<usize>> = &mut delta[id(qa, qb, phase)];
                for l in 0..a.num_letters.max(b.num_letters) {
                    let mut succs = Vec::new();
                    for &x in a.successors(qa, l) {
                        for &y in b.successors(qb, l) {
                            succs.push(id(x, y, next_phase));
                        }
                    }
                    if !succs.is_empty() {
                        dd.insert(l, succs);
                    }
                }
            }
        }
    }
    let mut accepting = vec![false; na * nb * 2];
    for qa in 0..na {
        for qb in 0..nb {
            if b.accepting[qb] {
                accepting[id(qa, qb, 1)] = true;
            }
        }
    }
    let mut init = Vec::new();
    for &qa in &a.init {
        for &qb in &b.init {
            init.push(id(qa, qb, 0));
        }
    }
    Buchi {
        num_letters: a.num_letters.max(b.num_letters),
        init,
        accepting,
        delta,
        labels: (0..na * nb * 2).map(|q| format!("x{q}")).collect(),
    }
}

/// Bounded oracle at the proof level.
pub fn lasso_oracle_proof(
    g: &ProofGraph,
    bounds: &OracleBounds,
) -> Result<(OracleVerdict, Option<Lasso>), ProgressError> {
    let p = pgraph_of_proof(g)?;
    let v = lasso_oracle(&p, bounds);
    let lasso = match &v {
        OracleVerdict::Reject(l) => Some(plasso_to_lasso(g, &p, l)),
        OracleVerdict::BoundedAccept => None,
    };
    Ok((v, lasso))
}

/// Translates abstract edge indices back into (node id, child index) pairs.
fn plasso_to_lasso(g: &ProofGraph, p: &PGraph, l: &PLasso) -> Lasso {
    let mut flat = Vec::new();
    for (id, node) in &g.nodes {
        for i in 0..node.children.len() {
            flat.push((id.clone(), i));
        }
    }
    // edges in PGraph were produced in the same iteration order
    debug_assert_eq!(flat.len(), p.edges.len());
    Lasso {
        stem: l.stem.iter().map(|&e| flat[e].clone()).collect(),
        cycle: l.cycle.iter().map(|&e| flat[e].clone()).collect(),
    }
}

/// DOT rendering of a counterexample lasso over the proof graph.
pub fn lasso_to_dot(g: &ProofGraph, lasso: &Lasso) -> String {
    let mut out = String::from("digraph lasso {\n  rankdir=LR;\n");
    for (id, node) in &g.nodes {
        out.push_str(&format!(
            "  \"{id}\" [label=\"{id}: {}\"];\n",
            node.label.to_string().replace('"', "'")
        ));
    }
    for (part, style) in [(&lasso.stem, "solid"), (&lasso.cycle, "bold")] {
        for (id, child) in part.iter() {
            let target = g.nodes[id].children[*child].target();
            out.push_str(&format!("  \"{id}\" -> \"{target}\" [style={style}];\n"));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofgraph::proof_from_json;

    fn looping_preproof() -> ProofGraph {
        proof_from_json(
            r#"{
          "system": "htc",
          "root": "n0",
          "nodes": {
            "n0": {
              "sequent": [{"fmls": ["TC(x,y. a(x,y))(c,d)"]}],
              "rule": {"name": "tc", "principalCedent": 0,
                       "principalFormula": "TC(x,y. a(x,y))(c,d)", "fresh": "z"},
              "children": [{"node": "n1"}]
            },
            "n1": {
              "sequent": [{"fmls": ["a(c,d)"]}, {"ann": ["z"], "fmls": ["a(c,z)", "TC(x,y. a(x,y))(z,d)"]}],
              "rule": {"name": "wk", "weakened": [{"fmls": ["a(c,d)"]}]},
              "children": [{"node": "n2"}]
            },
            "n2": {
              "sequent": [{"ann": ["z"], "fmls": ["a(c,z)", "TC(x,y. a(x,y))(z,d)"]}],
              "rule": {"name": "subst", "subst": {}},
              "children": [{"backlink": "n2"}]
            }
          }
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn non_progressing_loop_is_rejected_with_replayable_lasso() {
        let g = looping_preproof();
        let verdict = check_proof(&g).unwrap();
        assert!(!verdict.accepted);
        let lasso = verdict.counterexample.unwrap();
        lasso.replay(&g).unwrap();
        // the oracle agrees and produces a lasso too
        let (ov, ol) = lasso_oracle_proof(&g, &OracleBounds::default()).unwrap();
        assert!(matches!(ov, OracleVerdict::Reject(_)));
        ol.unwrap().replay(&g).unwrap();
    }

    #[test]
    fn acyclic_graph_accepted_vacuously() {
        let g = proof_from_json(
            r#"{
          "system": "htc",
          "root": "n0",
          "nodes": {
            "n0": {
              "sequent": [{"fmls": ["p(c)"]}, {"fmls": ["~p(c)"]}],
              "rule": {"name": "id", "principalCedent": 0, "principalFormula": "p(c)"},
              "children": [{"node": "n1"}]
            },
            "n1": {
              "sequent": [{"fmls": []}],
              "rule": {"name": "init"},
              "children": []
            }
          }
        }"#,
        )
        .unwrap();
        assert!(crate::proofgraph::validate_local(&g).ok());
        let verdict = check_proof(&g).unwrap();
        assert!(verdict.accepted);
        assert!(verdict.counterexample.is_none());
    }

    #[test]
    fn single_self_loop_branch_language() {
        let g = looping_preproof();
        let b = branch_automaton(&g).unwrap();
        // exactly one lasso class: the loop at n2 after the stem n0 n1
        // letters are (node, child) pairs in node-id order
        assert!(b.lasso_member(&[0, 1], &[2]));
        assert!(!b.lasso_member(&[], &[0]));
    }
}

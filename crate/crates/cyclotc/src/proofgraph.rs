//! Finite rooted proof graphs with backlinks: representation, JSON
//! serialization, local validation, and the per-edge ancestry graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculi::{
    self, AncestryEdge, Cedent, FolSequent, Hypersequent, Label, PdlSequent, RuleInstance,
    RuleName, System,
};
use crate::syntax::{parse_pdl, parse_tcl, parse_term, Dialect, Substitution, SyntaxError};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("dangling node id `{0}`")]
    DanglingId(String),
    #[error("unknown rule name `{0}`")]
    UnknownRule(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("node `{node}`: {msg}")]
    Schema { node: String, msg: String },
    #[error("node `{0}` unreachable from root")]
    Unreachable(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Either a tree child or a backlink to an interior node with an identical
/// label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChildRef {
    Node(String),
    Backlink(String),
}

impl ChildRef {
    pub fn target(&self) -> &str {
        match self {
            ChildRef::Node(id) | ChildRef::Backlink(id) => id,
        }
    }

    pub fn is_backlink(&self) -> bool {
        matches!(self, ChildRef::Backlink(_))
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub label: Label,
    pub rule: RuleInstance,
    pub children: Vec<ChildRef>,
}

#[derive(Debug, Clone)]
pub struct ProofGraph {
    pub system: System,
    pub root: String,
    pub nodes: BTreeMap<String, Node>,
    /// Free-form metadata preserved through load/save (e.g. a
    /// `reconstructed` marker on rebuilt subproofs).
    pub meta: Option<serde_json::Value>,
}

impl ProofGraph {
    pub fn node(&self, id: &str) -> Result<&Node, GraphError> {
        self.nodes
            .get(id)
            .ok_or_else(|| GraphError::DanglingId(id.to_string()))
    }

    /// Edges in a canonical order: per node id, per child position.
    pub fn edges(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for (id, node) in &self.nodes {
            for i in 0..node.children.len() {
                out.push((id.clone(), i));
            }
        }
        out
    }

    pub fn edge_target(&self, edge: &(String, usize)) -> Result<&str, GraphError> {
        let node = self.node(&edge.0)?;
        node.children
            .get(edge.1)
            .map(|c| c.target())
            .ok_or_else(|| GraphError::Schema {
                node: edge.0.clone(),
                msg: format!("no child {}", edge.1),
            })
    }

    pub fn backlink_count(&self) -> usize {
        self.nodes
            .values()
            .flat_map(|n| &n.children)
            .filter(|c| c.is_backlink())
            .count()
    }

    /// Checks the basic graph shape: root present, ids resolve, everything
    /// reachable.
    pub fn check_shape(&self) -> Result<(), GraphError> {
        if self.nodes.is_empty() {
            return Err(GraphError::NoRoot("empty node map".into()));
        }
        if !self.nodes.contains_key(&self.root) {
            return Err(GraphError::NoRoot(format!("root `{}` missing", self.root)));
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.root.clone()]);
        while let Some(id) = queue.pop_front() {
            if !seen.insert(id.clone()) {
                continue;
            }
            let node = self.node(&id)?;
            for c in &node.children {
                if !self.nodes.contains_key(c.target()) {
                    return Err(GraphError::DanglingId(c.target().to_string()));
                }
                if !c.is_backlink() {
                    queue.push_back(c.target().to_string());
                } else if !seen.contains(c.target()) {
                    queue.push_back(c.target().to_string());
                }
            }
        }
        for id in self.nodes.keys() {
            if !seen.contains(id) {
                return Err(GraphError::Unreachable(id.clone()));
            }
        }
        Ok(())
    }
}

/// Per-node outcome of local validation.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub entries: Vec<(String, Option<String>)>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.entries.iter().all(|(_, d)| d.is_none())
    }

    pub fn first_failure(&self) -> Option<&(String, Option<String>)> {
        self.entries.iter().find(|(_, d)| d.is_some())
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (id, diag) in &self.entries {
            match diag {
                None => writeln!(f, "{id}: ok")?,
                Some(d) => writeln!(f, "{id}: {d}")?,
            }
        }
        Ok(())
    }
}

/// Validates every node against its rule schema. Backlink premises are the
/// target node's label, so label equality across backlinks is enforced here.
pub fn validate_local(g: &ProofGraph) -> ValidationReport {
    let mut entries = Vec::new();
    if let Err(e) = g.check_shape() {
        entries.push(("<graph>".to_string(), Some(e.to_string())));
        return ValidationReport { entries };
    }
    for (id, node) in &g.nodes {
        let claimed: Vec<Label> = node
            .children
            .iter()
            .map(|c| g.nodes[c.target()].label.clone())
            .collect();
        let diag = match calculi::validate_step(g.system, &node.label, &node.rule, &claimed) {
            Ok(_) => None,
            Err(e) => Some(e.to_string()),
        };
        entries.push((id.clone(), diag));
    }
    ValidationReport { entries }
}

/// Immediate-ancestor edges for every graph edge, keyed by (node, child
/// position). Backlink edges identify occurrences with the target node's
/// label positionally.
#[derive(Debug, Clone)]
pub struct AncestryGraph {
    pub edges: BTreeMap<(String, usize), Vec<AncestryEdge>>,
}

pub fn ancestry_graph(g: &ProofGraph) -> Result<AncestryGraph, GraphError> {
    let mut out = BTreeMap::new();
    for (id, node) in &g.nodes {
        let claimed: Vec<Label> = node
            .children
            .iter()
            .map(|c| g.nodes[c.target()].label.clone())
            .collect();
        let applied = calculi::validate_step(g.system, &node.label, &node.rule, &claimed)
            .map_err(|e| GraphError::Schema {
                node: id.clone(),
                msg: e.to_string(),
            })?;
        for (i, _) in node.children.iter().enumerate() {
            let edges: Vec<AncestryEdge> = applied
                .edges
                .iter()
                .filter(|e| e.premise == i)
                .cloned()
                .collect();
            out.insert((id.clone(), i), edges);
        }
    }
    Ok(AncestryGraph { edges: out })
}

/// An ultimately periodic branch of the graph: a stem of edges from the root
/// followed by a nonempty cycle of edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<(String, usize)>,
    pub cycle: Vec<(String, usize)>,
}

impl Lasso {
    /// Verifies that the lasso denotes a real branch of the graph.
    pub fn replay(&self, g: &ProofGraph) -> Result<(), GraphError> {
        if self.cycle.is_empty() {
            return Err(GraphError::Schema {
                node: "<lasso>".into(),
                msg: "empty cycle".into(),
            });
        }
        let mut at = g.root.clone();
        for e in &self.stem {
            if e.0 != at {
                return Err(GraphError::Schema {
                    node: e.0.clone(),
                    msg: format!("stem edge does not continue from `{at}`"),
                });
            }
            at = g.edge_target(e)?.to_string();
        }
        let cycle_start = at.clone();
        for e in &self.cycle {
            if e.0 != at {
                return Err(GraphError::Schema {
                    node: e.0.clone(),
                    msg: format!("cycle edge does not continue from `{at}`"),
                });
            }
            at = g.edge_target(e)?.to_string();
        }
        if at != cycle_start {
            return Err(GraphError::Schema {
                node: at,
                msg: "cycle does not return to its start".into(),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON format

#[derive(Serialize, Deserialize)]
struct ProofFile {
    system: String,
    root: String,
    nodes: BTreeMap<String, NodeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    sequent: serde_json::Value,
    rule: RuleFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<ChildFile>,
}

#[derive(Serialize, Deserialize)]
struct ChildFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    backlink: Option<String>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RuleFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal_cedent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal_formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fresh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left_fmls: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left_ann: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    other_cedent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    swap: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    retain: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    retain_cedent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subst: Option<SubstFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weakened: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct SubstFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    const_map: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    fun_map: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    var_map: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct CedentFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ann: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    fmls: Vec<String>,
}

fn parse_label(system: System, v: &serde_json::Value, node: &str) -> Result<Label, GraphError> {
    let schema = |msg: &str| GraphError::Schema {
        node: node.to_string(),
        msg: msg.to_string(),
    };
    match system {
        System::Htc | System::HtcEq => {
            let cedents: Vec<CedentFile> =
                serde_json::from_value(v.clone()).map_err(|e| schema(&e.to_string()))?;
            let mut out = Vec::new();
            for c in cedents {
                let fmls = c
                    .fmls
                    .iter()
                    .map(|s| parse_tcl(s))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(Cedent::new(fmls, c.ann));
            }
            Ok(Label::Hyper(Hypersequent::new(out)))
        }
        System::Tclg => {
            let fmls: Vec<String> =
                serde_json::from_value(v.clone()).map_err(|e| schema(&e.to_string()))?;
            let fmls = fmls
                .iter()
                .map(|s| parse_tcl(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Label::Fol(FolSequent::new(fmls)))
        }
        System::Lpd | System::LpdTest => {
            let dialect = if system == System::LpdTest {
                Dialect::Pdl
            } else {
                Dialect::PdlPlus
            };
            let fmls: Vec<String> =
                serde_json::from_value(v.clone()).map_err(|e| schema(&e.to_string()))?;
            let fmls = fmls
                .iter()
                .map(|s| parse_pdl(s, dialect))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Label::Pdl(PdlSequent::new(fmls)))
        }
    }
}

fn label_to_json(label: &Label) -> serde_json::Value {
    match label {
        Label::Hyper(h) => serde_json::to_value(
            h.cedents
                .iter()
                .map(|c| CedentFile {
                    ann: c.ann.clone(),
                    fmls: c.fmls.iter().map(|f| f.to_string()).collect(),
                })
                .collect::<Vec<_>>(),
        )
        .expect("serializable"),
        Label::Fol(s) => serde_json::to_value(
            s.fmls.iter().map(|f| f.to_string()).collect::<Vec<String>>(),
        )
        .expect("serializable"),
        Label::Pdl(s) => serde_json::to_value(
            s.fmls.iter().map(|f| f.to_string()).collect::<Vec<String>>(),
        )
        .expect("serializable"),
    }
}

fn parse_rule(system: System, rf: &RuleFile, node: &str) -> Result<RuleInstance, GraphError> {
    let name = RuleName::parse(&rf.name).ok_or_else(|| GraphError::UnknownRule(rf.name.clone()))?;
    let schema = |msg: String| GraphError::Schema {
        node: node.to_string(),
        msg,
    };
    let dialect = if system == System::LpdTest {
        Dialect::Pdl
    } else {
        Dialect::PdlPlus
    };
    let mut r = RuleInstance::named(name);
    r.principal_cedent = rf.principal_cedent;
    if let Some(p) = &rf.principal_formula {
        match system {
            System::Lpd | System::LpdTest => r.pdl_principal = Some(parse_pdl(p, dialect)?),
            _ => r.principal = Some(parse_tcl(p)?),
        }
    }
    r.fresh = rf.fresh.clone();
    r.var = rf.var.clone();
    r.witness = match &rf.witness {
        Some(w) => Some(parse_term(w)?),
        None => None,
    };
    r.atom = rf.atom.clone();
    r.left_fmls = match &rf.left_fmls {
        Some(fs) => Some(fs.iter().map(|s| parse_tcl(s)).collect::<Result<_, _>>()?),
        None => None,
    };
    r.left_ann = rf.left_ann.clone();
    r.other_cedent = rf.other_cedent;
    r.target = match &rf.target {
        Some(t) => Some(parse_tcl(t)?),
        None => None,
    };
    r.swap = rf.swap;
    r.retain = rf.retain;
    r.retain_cedent = rf.retain_cedent;
    if let Some(s) = &rf.subst {
        let mut sigma = Substitution::identity();
        for (c, t) in &s.const_map {
            sigma.const_map.insert(c.clone(), parse_term(t)?);
        }
        sigma.fun_map = s.fun_map.clone();
        sigma.var_map = s.var_map.clone();
        r.subst = Some(sigma);
    }
    if let Some(w) = &rf.weakened {
        match system {
            System::Htc | System::HtcEq => {
                let cedents: Vec<CedentFile> =
                    serde_json::from_value(w.clone()).map_err(|e| schema(e.to_string()))?;
                let mut out = Vec::new();
                for c in cedents {
                    let fmls = c
                        .fmls
                        .iter()
                        .map(|s| parse_tcl(s))
                        .collect::<Result<Vec<_>, _>>()?;
                    out.push(Cedent::new(fmls, c.ann));
                }
                r.weakened_cedents = Some(out);
            }
            System::Tclg => {
                let fmls: Vec<String> =
                    serde_json::from_value(w.clone()).map_err(|e| schema(e.to_string()))?;
                r.weakened_fmls =
                    Some(fmls.iter().map(|s| parse_tcl(s)).collect::<Result<_, _>>()?);
            }
            System::Lpd | System::LpdTest => {
                let fmls: Vec<String> =
                    serde_json::from_value(w.clone()).map_err(|e| schema(e.to_string()))?;
                r.weakened_pdl = Some(
                    fmls.iter()
                        .map(|s| parse_pdl(s, dialect))
                        .collect::<Result<_, _>>()?,
                );
            }
        }
    }
    Ok(r)
}

fn rule_to_json(r: &RuleInstance) -> RuleFile {
    RuleFile {
        name: r.name.map(|n| n.as_str().to_string()).unwrap_or_default(),
        principal_cedent: r.principal_cedent,
        principal_formula: r
            .principal
            .as_ref()
            .map(|f| f.to_string())
            .or_else(|| r.pdl_principal.as_ref().map(|f| f.to_string())),
        fresh: r.fresh.clone(),
        var: r.var.clone(),
        witness: r.witness.as_ref().map(|t| t.to_string()),
        atom: r.atom.clone(),
        left_fmls: r
            .left_fmls
            .as_ref()
            .map(|fs| fs.iter().map(|f| f.to_string()).collect()),
        left_ann: r.left_ann.clone(),
        other_cedent: r.other_cedent,
        target: r.target.as_ref().map(|f| f.to_string()),
        swap: r.swap,
        retain: r.retain,
        retain_cedent: r.retain_cedent,
        subst: r.subst.as_ref().map(|s| SubstFile {
            const_map: s
                .const_map
                .iter()
                .map(|(c, t)| (c.clone(), t.to_string()))
                .collect(),
            fun_map: s.fun_map.clone(),
            var_map: s.var_map.clone(),
        }),
        weakened: match (&r.weakened_cedents, &r.weakened_fmls, &r.weakened_pdl) {
            (Some(cs), _, _) => Some(
                serde_json::to_value(
                    cs.iter()
                        .map(|c| CedentFile {
                            ann: c.ann.clone(),
                            fmls: c.fmls.iter().map(|f| f.to_string()).collect(),
                        })
                        .collect::<Vec<_>>(),
                )
                .expect("serializable"),
            ),
            (_, Some(fs), _) => Some(
                serde_json::to_value(fs.iter().map(|f| f.to_string()).collect::<Vec<String>>())
                    .expect("serializable"),
            ),
            (_, _, Some(fs)) => Some(
                serde_json::to_value(fs.iter().map(|f| f.to_string()).collect::<Vec<String>>())
                    .expect("serializable"),
            ),
            _ => None,
        },
    }
}

/// Parses the JSON proof format.
pub fn proof_from_json(text: &str) -> Result<ProofGraph, GraphError> {
    let file: ProofFile = serde_json::from_str(text)?;
    let system =
        System::from_str(&file.system).ok_or_else(|| GraphError::UnknownSystem(file.system))?;
    let mut nodes = BTreeMap::new();
    for (id, nf) in &file.nodes {
        let label = parse_label(system, &nf.sequent, id)?;
        let rule = parse_rule(system, &nf.rule, id)?;
        let mut children = Vec::new();
        for c in &nf.children {
            match (&c.node, &c.backlink) {
                (Some(n), None) => children.push(ChildRef::Node(n.clone())),
                (None, Some(b)) => children.push(ChildRef::Backlink(b.clone())),
                _ => {
                    return Err(GraphError::Schema {
                        node: id.clone(),
                        msg: "child must have exactly one of `node`, `backlink`".into(),
                    })
                }
            }
        }
        nodes.insert(
            id.clone(),
            Node {
                label,
                rule,
                children,
            },
        );
    }
    let g = ProofGraph {
        system,
        root: file.root,
        nodes,
        meta: file.meta,
    };
    g.check_shape()?;
    Ok(g)
}

/// Serializes a proof canonically (sorted keys, canonical formula printing).
pub fn proof_to_json(g: &ProofGraph) -> String {
    let file = ProofFile {
        system: g.system.as_str().to_string(),
        root: g.root.clone(),
        nodes: g
            .nodes
            .iter()
            .map(|(id, n)| {
                (
                    id.clone(),
                    NodeFile {
                        sequent: label_to_json(&n.label),
                        rule: rule_to_json(&n.rule),
                        children: n
                            .children
                            .iter()
                            .map(|c| match c {
                                ChildRef::Node(id) => ChildFile {
                                    node: Some(id.clone()),
                                    backlink: None,
                                },
                                ChildRef::Backlink(id) => ChildFile {
                                    node: None,
                                    backlink: Some(id.clone()),
                                },
                            })
                            .collect(),
                    },
                )
            })
            .collect(),
        meta: g.meta.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("serializable");
    out.push('\n');
    out
}

pub fn load_proof(path: &std::path::Path) -> Result<ProofGraph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    proof_from_json(&text)
}

pub fn save_proof(g: &ProofGraph, path: &std::path::Path) -> Result<(), GraphError> {
    std::fs::write(path, proof_to_json(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // A merely locally-valid preproof: TC unfolding that loops via an
    // identity substitution; see also the corpus fixture of the same shape.
    fn looping_preproof_json() -> &'static str {
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
        }"#
    }

    #[test]
    fn load_validate_save_roundtrip() {
        let g = proof_from_json(looping_preproof_json()).unwrap();
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.backlink_count(), 1);
        let report = validate_local(&g);
        assert!(report.ok(), "{report}");
        let text = proof_to_json(&g);
        let g2 = proof_from_json(&text).unwrap();
        let text2 = proof_to_json(&g2);
        assert_eq!(text, text2, "canonical serialization is byte-stable");
    }

    #[test]
    fn backlink_label_mismatch_is_rejected() {
        let bad = looping_preproof_json().replace(
            r#""children": [{"backlink": "n2"}]"#,
            r#""children": [{"backlink": "n0"}]"#,
        );
        let g = proof_from_json(&bad).unwrap();
        let report = validate_local(&g);
        assert!(!report.ok());
        let (_, diag) = report.first_failure().unwrap();
        assert!(diag.as_ref().unwrap().contains("mismatch"));
    }

    #[test]
    fn empty_nodes_map_is_an_error() {
        let r = proof_from_json(r#"{"system":"htc","root":"n0","nodes":{}}"#);
        assert!(matches!(r, Err(GraphError::NoRoot(_))));
    }

    #[test]
    fn unknown_rule_name_is_an_error() {
        let bad = looping_preproof_json().replace(r#""name": "wk""#, r#""name": "mystery""#);
        assert!(matches!(
            proof_from_json(&bad),
            Err(GraphError::UnknownRule(_))
        ));
    }

    #[test]
    fn foreign_rule_is_diagnosed() {
        // `cotc` is not an lpd rule
        let text = r#"{
          "system": "lpd",
          "root": "n0",
          "nodes": {
            "n0": {
              "sequent": ["p", "~p"],
              "rule": {"name": "cotc"},
              "children": []
            }
          }
        }"#;
        let g = proof_from_json(text).unwrap();
        let report = validate_local(&g);
        assert!(!report.ok());
        let (_, diag) = report.first_failure().unwrap();
        assert!(diag.as_ref().unwrap().contains("not in system"));
    }

    #[test]
    fn mutated_premise_is_diagnosed() {
        let bad = looping_preproof_json().replace(
            r#"{"fmls": ["a(c,d)"]}, {"ann": ["z"], "fmls": ["a(c,z)", "TC(x,y. a(x,y))(z,d)"]}"#,
            r#"{"ann": ["z"], "fmls": ["a(c,z)", "TC(x,y. a(x,y))(z,d)"]}"#,
        );
        let g = proof_from_json(&bad).unwrap();
        let report = validate_local(&g);
        assert!(!report.ok());
    }

    #[test]
    fn lasso_replay() {
        let g = proof_from_json(looping_preproof_json()).unwrap();
        let lasso = Lasso {
            stem: vec![("n0".into(), 0), ("n1".into(), 0)],
            cycle: vec![("n2".into(), 0)],
        };
        lasso.replay(&g).unwrap();
        let bad = Lasso {
            stem: vec![("n0".into(), 0)],
            cycle: vec![("n1".into(), 0)],
        };
        assert!(bad.replay(&g).is_err());
    }
}

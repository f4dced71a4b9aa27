//! Rule schemas and single-step validation for the five systems, together
//! with the immediate-ancestor relation each step induces.
//!
//! Hypersequents and sequents are kept canonical (sorted, deduplicated), so
//! occurrences are plain indices and set equality is syntactic equality.

mod htc;
mod lpd;
mod tclg;

pub(crate) use htc::rewrite_formula as htc_rewrite;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    all_names, falsum, verum, Formula, PdlFormula, Substitution, SyntaxError, Term,
};

/// Which proof system a step or graph belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    Htc,
    HtcEq,
    Tclg,
    Lpd,
    LpdTest,
}

impl System {
    pub fn as_str(self) -> &'static str {
        match self {
            System::Htc => "htc",
            System::HtcEq => "htceq",
            System::Tclg => "tclg",
            System::Lpd => "lpd",
            System::LpdTest => "lpdtest",
        }
    }

    pub fn from_str(s: &str) -> Option<System> {
        Some(match s {
            "htc" => System::Htc,
            "htceq" => System::HtcEq,
            "tclg" => System::Tclg,
            "lpd" => System::Lpd,
            "lpdtest" => System::LpdTest,
            _ => return None,
        })
    }

    pub fn is_hyper(self) -> bool {
        matches!(self, System::Htc | System::HtcEq)
    }
}

/// An annotated cedent `Γ^x⃗`: a set of formulas plus a set of variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cedent {
    pub fmls: Vec<Formula>,
    pub ann: Vec<String>,
}

impl Cedent {
    pub fn new(mut fmls: Vec<Formula>, mut ann: Vec<String>) -> Cedent {
        fmls.sort();
        fmls.dedup();
        ann.sort();
        ann.dedup();
        Cedent { fmls, ann }
    }

    pub fn empty() -> Cedent {
        Cedent {
            fmls: Vec::new(),
            ann: Vec::new(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.fmls {
            out.extend(f.free_vars());
        }
        out
    }
}

impl fmt::Display for Cedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.fmls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">^{{{}}}", self.ann.join(","))
    }
}

/// A hypersequent: a set of annotated cedents, read disjunctively.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hypersequent {
    pub cedents: Vec<Cedent>,
}

impl Hypersequent {
    pub fn new(mut cedents: Vec<Cedent>) -> Hypersequent {
        cedents.sort();
        cedents.dedup();
        Hypersequent { cedents }
    }

    pub fn singleton(c: Cedent) -> Hypersequent {
        Hypersequent { cedents: vec![c] }
    }
}

impl fmt::Display for Hypersequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cedents.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A plain one-sided first-order sequent (a set of formulas).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FolSequent {
    pub fmls: Vec<Formula>,
}

impl FolSequent {
    pub fn new(mut fmls: Vec<Formula>) -> FolSequent {
        fmls.sort();
        fmls.dedup();
        FolSequent { fmls }
    }
}

impl fmt::Display for FolSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.fmls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// A modal sequent (a set of dynamic logic formulas).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdlSequent {
    pub fmls: Vec<PdlFormula>,
}

impl PdlSequent {
    pub fn new(mut fmls: Vec<PdlFormula>) -> PdlSequent {
        fmls.sort();
        fmls.dedup();
        PdlSequent { fmls }
    }
}

impl fmt::Display for PdlSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.fmls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// A node label in any of the systems.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Hyper(Hypersequent),
    Fol(FolSequent),
    Pdl(PdlSequent),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Hyper(h) => write!(f, "{h}"),
            Label::Fol(s) => write!(f, "{s}"),
            Label::Pdl(s) => write!(f, "{s}"),
        }
    }
}

impl Label {
    pub fn as_hyper(&self) -> Result<&Hypersequent, StepError> {
        match self {
            Label::Hyper(h) => Ok(h),
            _ => Err(StepError::WrongLabelKind),
        }
    }

    pub fn as_fol(&self) -> Result<&FolSequent, StepError> {
        match self {
            Label::Fol(s) => Ok(s),
            _ => Err(StepError::WrongLabelKind),
        }
    }

    pub fn as_pdl(&self) -> Result<&PdlSequent, StepError> {
        match self {
            Label::Pdl(s) => Ok(s),
            _ => Err(StepError::WrongLabelKind),
        }
    }

    /// Every symbol name occurring in the label, for freshness checks.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Label::Hyper(h) => {
                for c in &h.cedents {
                    for f in &c.fmls {
                        all_names(f, &mut out);
                    }
                    out.extend(c.ann.iter().cloned());
                }
            }
            Label::Fol(s) => {
                for f in &s.fmls {
                    all_names(f, &mut out);
                }
            }
            Label::Pdl(_) => {}
        }
        out
    }
}

/// Rule identifiers across all systems. The external name of a rule is fixed
/// by [`RuleName::as_str`]; some names are shared between systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleName {
    // hypersequent rules
    Init,
    Wk,
    Subst,
    Cup,
    Id,
    And,
    Or0,
    Or1,
    Inst,
    Exists,
    Forall,
    Tc,
    Cotc,
    Eq,
    Neq,
    // plain sequent extras
    EqRefl,
    EqSubstL,
    EqSubstR,
    Tc0,
    Tc1,
    // modal rules
    K,
    DiaComp,
    DiaCup0,
    DiaCup1,
    BoxCup,
    BoxComp,
    DiaPlus0,
    DiaPlus1,
    BoxPlus,
    DiaTest,
    BoxTest,
}

impl RuleName {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Init => "init",
            RuleName::Wk => "wk",
            RuleName::Subst => "subst",
            RuleName::Cup => "cup",
            RuleName::Id => "id",
            RuleName::And => "and",
            RuleName::Or0 => "or0",
            RuleName::Or1 => "or1",
            RuleName::Inst => "inst",
            RuleName::Exists => "exists",
            RuleName::Forall => "forall",
            RuleName::Tc => "tc",
            RuleName::Cotc => "cotc",
            RuleName::Eq => "eq",
            RuleName::Neq => "neq",
            RuleName::EqRefl => "eqrefl",
            RuleName::EqSubstL => "eqsubstL",
            RuleName::EqSubstR => "eqsubstR",
            RuleName::Tc0 => "tc0",
            RuleName::Tc1 => "tc1",
            RuleName::K => "k",
            RuleName::DiaComp => "diacomp",
            RuleName::DiaCup0 => "diacup0",
            RuleName::DiaCup1 => "diacup1",
            RuleName::BoxCup => "boxcup",
            RuleName::BoxComp => "boxcomp",
            RuleName::DiaPlus0 => "diaplus0",
            RuleName::DiaPlus1 => "diaplus1",
            RuleName::BoxPlus => "boxplus",
            RuleName::DiaTest => "diatest",
            RuleName::BoxTest => "boxtest",
        }
    }

    pub fn parse(s: &str) -> Option<RuleName> {
        Some(match s {
            "init" => RuleName::Init,
            "wk" => RuleName::Wk,
            "subst" => RuleName::Subst,
            "cup" => RuleName::Cup,
            "id" => RuleName::Id,
            "and" => RuleName::And,
            "or0" => RuleName::Or0,
            "or1" => RuleName::Or1,
            "inst" => RuleName::Inst,
            "exists" => RuleName::Exists,
            "forall" => RuleName::Forall,
            "tc" => RuleName::Tc,
            "cotc" => RuleName::Cotc,
            "eq" => RuleName::Eq,
            "neq" => RuleName::Neq,
            "eqrefl" => RuleName::EqRefl,
            "eqsubstL" => RuleName::EqSubstL,
            "eqsubstR" => RuleName::EqSubstR,
            "tc0" => RuleName::Tc0,
            "tc1" => RuleName::Tc1,
            "k" => RuleName::K,
            "diacomp" => RuleName::DiaComp,
            "diacup0" => RuleName::DiaCup0,
            "diacup1" => RuleName::DiaCup1,
            "boxcup" => RuleName::BoxCup,
            "boxcomp" => RuleName::BoxComp,
            "diaplus0" => RuleName::DiaPlus0,
            "diaplus1" => RuleName::DiaPlus1,
            "boxplus" => RuleName::BoxPlus,
            "diatest" => RuleName::DiaTest,
            "boxtest" => RuleName::BoxTest,
            _ => return None,
        })
    }

    /// Rules admitted by each system.
    pub fn in_system(self, system: System) -> bool {
        use RuleName::*;
        match system {
            System::Htc | System::HtcEq => {
                let base = matches!(
                    self,
                    Init | Wk | Subst | Cup | Id | And | Or0 | Or1 | Inst | Exists | Forall | Tc
                        | Cotc
                );
                base || (system == System::HtcEq && matches!(self, Eq | Neq))
            }
            System::Tclg => matches!(
                self,
                Id | Or0 | Or1 | And | Exists | Forall | Wk | EqRefl | EqSubstL | EqSubstR
                    | Subst | Tc0 | Tc1 | Cotc
            ),
            System::Lpd | System::LpdTest => {
                let base = matches!(
                    self,
                    Id | Wk | K | And | Or0 | Or1 | DiaComp | DiaCup0 | DiaCup1 | BoxCup | BoxComp
                        | DiaPlus0 | DiaPlus1 | BoxPlus
                );
                base || (system == System::LpdTest && matches!(self, DiaTest | BoxTest))
            }
        }
    }

    pub fn premise_count(self) -> usize {
        use RuleName::*;
        match self {
            Init | Id | EqRefl => 0, // Id is zero-premise only in Tclg/Lpd
            Cup | And | Tc1 | Cotc | BoxCup | BoxPlus | DiaTest => 2,
            _ => 1,
        }
    }
}

/// All the data a rule application may need; exactly the parameters the rule
/// uses must be present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleInstance {
    pub name: Option<RuleName>,
    pub principal_cedent: Option<usize>,
    pub principal: Option<Formula>,
    pub pdl_principal: Option<PdlFormula>,
    /// Fresh variable, constant, or function symbol, depending on the rule.
    pub fresh: Option<String>,
    /// Annotation variable consumed by `inst`.
    pub var: Option<String>,
    /// Witness term for `inst`, `exists` (plain sequents) and `tc1`.
    pub witness: Option<Term>,
    /// Program atom of a modal `k` step.
    pub atom: Option<String>,
    /// Formula part `Γ` of a `cup` split.
    pub left_fmls: Option<Vec<Formula>>,
    /// Annotation part `x⃗` of a `cup` split.
    pub left_ann: Option<Vec<String>>,
    /// Index of the `Δ` cedent in a `neq` step.
    pub other_cedent: Option<usize>,
    /// Target formula `A` of the plain-sequent equality rules.
    pub target: Option<Formula>,
    /// Reverse the rewrite direction of `neq`.
    pub swap: bool,
    /// Keep the principal formula in the premise (implicit contraction).
    pub retain: bool,
    /// Keep the principal cedent in the premise (implicit contraction).
    pub retain_cedent: bool,
    pub subst: Option<Substitution>,
    pub weakened_cedents: Option<Vec<Cedent>>,
    pub weakened_fmls: Option<Vec<Formula>>,
    pub weakened_pdl: Option<Vec<PdlFormula>>,
}

impl RuleInstance {
    pub fn named(name: RuleName) -> RuleInstance {
        RuleInstance {
            name: Some(name),
            ..RuleInstance::default()
        }
    }

    pub fn rule(&self) -> Result<RuleName, StepError> {
        self.name.ok_or(StepError::MissingParam("name"))
    }
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("rule `{rule}` not in system `{system}`")]
    RuleNotInSystem { rule: String, system: String },
    #[error("principal not found: {0}")]
    PrincipalNotFound(String),
    #[error("symbol `{0}` is not fresh in the conclusion")]
    Freshness(String),
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("missing rule parameter `{0}`")]
    MissingParam(&'static str),
    #[error("label has the wrong kind for this system")]
    WrongLabelKind,
    #[error("premise {index} mismatch: expected `{expected}`, got `{got}`")]
    PremiseMismatch {
        index: usize,
        expected: String,
        got: String,
    },
    #[error("wrong number of premises: expected {expected}, got {got}")]
    PremiseCount { expected: usize, got: usize },
    #[error("substitution steps need the claimed premise to validate against")]
    UnderDetermined,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Occurrence-level immediate-ancestor edge for one rule application. The
/// source lives in the indicated premise, the destination in the conclusion;
/// for plain sequents the cedent index is always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncestryEdge {
    pub premise: usize,
    pub kind: AncestryKind,
    pub src_ced: usize,
    pub src_fml: Option<usize>,
    pub dst_ced: usize,
    pub dst_fml: Option<usize>,
    /// For the closure systems: the source is the unfolding continuation of a
    /// coTC principal. For the modal system: the destination is the step's
    /// principal formula.
    pub progress: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncestryKind {
    Cedent,
    Formula,
}

/// Result of applying a rule: the premises in order, plus the ancestry edges
/// of the step.
#[derive(Debug, Clone)]
pub struct Applied {
    pub premises: Vec<Label>,
    pub edges: Vec<AncestryEdge>,
}

/// Computes the premises dictated by the rule schema, reading bottom-up.
/// Substitution steps are validated against a claimed premise instead; see
/// [`validate_step`].
pub fn apply_rule(
    system: System,
    conclusion: &Label,
    r: &RuleInstance,
) -> Result<Applied, StepError> {
    let rule = r.rule()?;
    if !rule.in_system(system) {
        return Err(StepError::RuleNotInSystem {
            rule: rule.as_str().to_string(),
            system: system.as_str().to_string(),
        });
    }
    match system {
        System::Htc | System::HtcEq => htc::apply(conclusion.as_hyper()?, r),
        System::Tclg => tclg::apply(conclusion.as_fol()?, r),
        System::Lpd | System::LpdTest => lpd::apply(conclusion.as_pdl()?, r),
    }
}

/// Checks that the claimed premises are exactly the schema's premises (up to
/// canonical set equality), returning the step's ancestry on success.
pub fn validate_step(
    system: System,
    conclusion: &Label,
    r: &RuleInstance,
    claimed: &[Label],
) -> Result<Applied, StepError> {
    let rule = r.rule()?;
    if !rule.in_system(system) {
        return Err(StepError::RuleNotInSystem {
            rule: rule.as_str().to_string(),
            system: system.as_str().to_string(),
        });
    }
    if rule == RuleName::Subst {
        if claimed.len() != 1 {
            return Err(StepError::PremiseCount {
                expected: 1,
                got: claimed.len(),
            });
        }
        let sigma = r.subst.as_ref().ok_or(StepError::MissingParam("subst"))?;
        let (image, edges) = apply_subst_label(system, &claimed[0], sigma)?;
        if &image != conclusion {
            return Err(StepError::PremiseMismatch {
                index: 0,
                expected: conclusion.to_string(),
                got: image.to_string(),
            });
        }
        return Ok(Applied {
            premises: vec![claimed[0].clone()],
            edges,
        });
    }
    let applied = apply_rule(system, conclusion, r)?;
    if applied.premises.len() != claimed.len() {
        return Err(StepError::PremiseCount {
            expected: applied.premises.len(),
            got: claimed.len(),
        });
    }
    for (i, (expected, got)) in applied.premises.iter().zip(claimed).enumerate() {
        if expected != got {
            return Err(StepError::PremiseMismatch {
                index: i,
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
    }
    Ok(applied)
}

/// Ancestry of a validated step.
pub fn ancestry(
    system: System,
    conclusion: &Label,
    r: &RuleInstance,
    premises: &[Label],
) -> Result<Vec<AncestryEdge>, StepError> {
    Ok(validate_step(system, conclusion, r, premises)?.edges)
}

/// The substitution image of a label together with premise→conclusion edges.
pub fn apply_subst_label(
    system: System,
    premise: &Label,
    sigma: &Substitution,
) -> Result<(Label, Vec<AncestryEdge>), StepError> {
    match system {
        System::Htc | System::HtcEq => {
            let h = premise.as_hyper()?;
            let mut protos = Vec::new();
            for (j, c) in h.cedents.iter().enumerate() {
                let fmls = c
                    .fmls
                    .iter()
                    .enumerate()
                    .map(|(k, f)| ProtoFml {
                        f: sigma.apply_formula(f),
                        sources: vec![FmlSource {
                            src_ced: j,
                            src_fml: k,
                            progress: false,
                        }],
                    })
                    .collect();
                let ann = c
                    .ann
                    .iter()
                    .map(|x| sigma.var_map.get(x).cloned().unwrap_or_else(|| x.clone()))
                    .collect();
                protos.push(ProtoCedent {
                    fmls,
                    ann,
                    sources: vec![j],
                });
            }
            let (image, edges) = build_hyper(0, protos);
            Ok((Label::Hyper(image), flip_subst_edges(edges)))
        }
        System::Tclg => {
            let s = premise.as_fol()?;
            let mut protos = Vec::new();
            for (k, f) in s.fmls.iter().enumerate() {
                protos.push(ProtoFml {
                    f: sigma.apply_formula(f),
                    sources: vec![FmlSource {
                        src_ced: 0,
                        src_fml: k,
                        progress: false,
                    }],
                });
            }
            let (fmls, edges) = build_flat(0, protos);
            Ok((Label::Fol(FolSequent { fmls }), flip_subst_edges(edges)))
        }
        System::Lpd | System::LpdTest => Err(StepError::RuleNotInSystem {
            rule: "subst".into(),
            system: system.as_str().into(),
        }),
    }
}

/// In substitution steps the provenance tracking runs premise→image, so the
/// recorded src coordinates are premise-side already; only dst needs fixing
/// to the image coordinates, which `build_*` put in src position. Swap them.
fn flip_subst_edges(edges: Vec<AncestryEdge>) -> Vec<AncestryEdge> {
    edges
        .into_iter()
        .map(|e| AncestryEdge {
            premise: 0,
            kind: e.kind,
            src_ced: e.dst_ced,
            src_fml: e.dst_fml,
            dst_ced: e.src_ced,
            dst_fml: e.src_fml,
            progress: false,
        })
        .collect()
}

/// Formula interpretation of a hypersequent.
pub fn fm(h: &Hypersequent) -> Formula {
    let mut cedents = Vec::new();
    for c in &h.cedents {
        let mut body = match c.fmls.split_first() {
            None => verum(),
            Some((first, rest)) => {
                let mut acc = first.clone();
                for f in rest {
                    acc = crate::syntax::and(acc, f.clone());
                }
                acc
            }
        };
        for x in c.ann.iter().rev() {
            body = Formula::Exists(x.clone(), Box::new(body));
        }
        cedents.push(body);
    }
    match cedents.split_first() {
        None => falsum(),
        Some((first, rest)) => {
            let mut acc = first.clone();
            for f in rest {
                acc = crate::syntax::or(acc, f.clone());
            }
            acc
        }
    }
}

/// Formula interpretation of a plain sequent: the disjunction of its members.
pub fn fol_fm(s: &FolSequent) -> Formula {
    match s.fmls.split_first() {
        None => falsum(),
        Some((first, rest)) => {
            let mut acc = first.clone();
            for f in rest {
                acc = crate::syntax::or(acc, f.clone());
            }
            acc
        }
    }
}

// ---------------------------------------------------------------------------
// Provenance-tracking premise construction, shared by the rule modules.
//
// The builders run conclusion→premise, so sources name conclusion
// occurrences and the built coordinates are premise occurrences.

#[derive(Debug, Clone)]
pub(crate) struct FmlSource {
    pub src_ced: usize,
    pub src_fml: usize,
    pub progress: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct ProtoFml {
    pub f: Formula,
    pub sources: Vec<FmlSource>,
}

#[derive(Debug, Clone)]
pub(crate) struct ProtoCedent {
    pub fmls: Vec<ProtoFml>,
    pub ann: Vec<String>,
    /// Conclusion cedents this premise cedent descends from.
    pub sources: Vec<usize>,
}

/// Canonicalizes proto-cedents into a hypersequent, merging duplicates and
/// emitting ancestry edges (premise coordinates = built positions, conclusion
/// coordinates = recorded sources).
pub(crate) fn build_hyper(
    premise_idx: usize,
    protos: Vec<ProtoCedent>,
) -> (Hypersequent, Vec<AncestryEdge>) {
    // canonicalize each cedent internally
    let mut canon: Vec<(Cedent, Vec<Vec<FmlSource>>, Vec<usize>)> = Vec::new();
    for p in protos {
        let mut fmls: Vec<(Formula, Vec<FmlSource>)> = Vec::new();
        for pf in p.fmls {
            match fmls.iter_mut().find(|(g, _)| *g == pf.f) {
                Some((_, srcs)) => srcs.extend(pf.sources),
                None => fmls.push((pf.f, pf.sources)),
            }
        }
        fmls.sort_by(|(a, _), (b, _)| a.cmp(b));
        let mut ann = p.ann.clone();
        ann.sort();
        ann.dedup();
        let ced = Cedent {
            fmls: fmls.iter().map(|(f, _)| f.clone()).collect(),
            ann,
        };
        let srcs: Vec<Vec<FmlSource>> = fmls.into_iter().map(|(_, s)| s).collect();
        // merge duplicate cedents
        match canon.iter_mut().find(|(c, _, _)| *c == ced) {
            Some((_, fsrcs, csrcs)) => {
                for (k, s) in fsrcs.iter_mut().enumerate() {
                    s.extend(srcs[k].iter().cloned());
                }
                csrcs.extend(p.sources);
            }
            None => canon.push((ced, srcs, p.sources)),
        }
    }
    canon.sort_by(|(a, _, _), (b, _, _)| a.cmp(b));
    let mut edges = Vec::new();
    for (j, (_, fsrcs, csrcs)) in canon.iter().enumerate() {
        let mut ced_dsts: BTreeSet<usize> = csrcs.iter().copied().collect();
        for (k, srcs) in fsrcs.iter().enumerate() {
            for s in srcs {
                ced_dsts.insert(s.src_ced);
                edges.push(AncestryEdge {
                    premise: premise_idx,
                    kind: AncestryKind::Formula,
                    src_ced: j,
                    src_fml: Some(k),
                    dst_ced: s.src_ced,
                    dst_fml: Some(s.src_fml),
                    progress: s.progress,
                });
            }
        }
        for dst in ced_dsts {
            edges.push(AncestryEdge {
                premise: premise_idx,
                kind: AncestryKind::Cedent,
                src_ced: j,
                src_fml: None,
                dst_ced: dst,
                dst_fml: None,
                progress: false,
            });
        }
    }
    (
        Hypersequent {
            cedents: canon.into_iter().map(|(c, _, _)| c).collect(),
        },
        edges,
    )
}

/// Flat-sequent analogue of [`build_hyper`] for formula lists.
pub(crate) fn build_flat(
    premise_idx: usize,
    protos: Vec<ProtoFml>,
) -> (Vec<Formula>, Vec<AncestryEdge>) {
    let mut fmls: Vec<(Formula, Vec<FmlSource>)> = Vec::new();
    for pf in protos {
        match fmls.iter_mut().find(|(g, _)| *g == pf.f) {
            Some((_, srcs)) => srcs.extend(pf.sources),
            None => fmls.push((pf.f, pf.sources)),
        }
    }
    fmls.sort_by(|(a, _), (b, _)| a.cmp(b));
    let mut edges = Vec::new();
    for (k, (_, srcs)) in fmls.iter().enumerate() {
        for s in srcs {
            edges.push(AncestryEdge {
                premise: premise_idx,
                kind: AncestryKind::Formula,
                src_ced: 0,
                src_fml: Some(k),
                dst_ced: 0,
                dst_fml: Some(s.src_fml),
                progress: s.progress,
            });
        }
    }
    (fmls.into_iter().map(|(f, _)| f).collect(), edges)
}

pub(crate) fn build_pdl(
    premise_idx: usize,
    protos: Vec<(PdlFormula, Vec<FmlSource>)>,
) -> (Vec<PdlFormula>, Vec<AncestryEdge>) {
    let mut fmls: Vec<(PdlFormula, Vec<FmlSource>)> = Vec::new();
    for (f, sources) in protos {
        match fmls.iter_mut().find(|(g, _)| *g == f) {
            Some((_, srcs)) => srcs.extend(sources),
            None => fmls.push((f, sources)),
        }
    }
    fmls.sort_by(|(a, _), (b, _)| a.cmp(b));
    let mut edges = Vec::new();
    for (k, (_, srcs)) in fmls.iter().enumerate() {
        for s in srcs {
            edges.push(AncestryEdge {
                premise: premise_idx,
                kind: AncestryKind::Formula,
                src_ced: 0,
                src_fml: Some(k),
                dst_ced: 0,
                dst_fml: Some(s.src_fml),
                progress: s.progress,
            });
        }
    }
    (fmls.into_iter().map(|(f, _)| f).collect(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_pdl, parse_tcl, Dialect, Term};

    fn hl(cedents: Vec<(&[&str], &[&str])>) -> Label {
        Label::Hyper(Hypersequent::new(
            cedents
                .into_iter()
                .map(|(fmls, ann)| {
                    Cedent::new(
                        fmls.iter().map(|f| parse_tcl(f).unwrap()).collect(),
                        ann.iter().map(|s| s.to_string()).collect(),
                    )
                })
                .collect(),
        ))
    }

    fn pl(fmls: &[&str]) -> Label {
        Label::Pdl(PdlSequent::new(
            fmls.iter()
                .map(|f| parse_pdl(f, Dialect::Pdl).unwrap())
                .collect(),
        ))
    }

    #[test]
    fn htc_tc_unfolds_into_two_cedents() {
        let concl = hl(vec![(&["p(c)", "TC(x,y. a(x,y))(c,d)"], &["x"])]);
        let mut r = RuleInstance::named(RuleName::Tc);
        r.principal_cedent = Some(0);
        r.principal = Some(parse_tcl("TC(x,y. a(x,y))(c,d)").unwrap());
        r.fresh = Some("z".into());
        let applied = apply_rule(System::Htc, &concl, &r).unwrap();
        let expect = hl(vec![
            (&["p(c)", "a(c,d)"], &["x"]),
            (&["p(c)", "a(c,z)", "TC(x,y. a(x,y))(z,d)"], &["x", "z"]),
        ]);
        assert_eq!(applied.premises, vec![expect]);
    }

    #[test]
    fn htc_cotc_premise_and_progress_edge() {
        let concl = hl(vec![
            (&["coTC(x,y. a(x,y))(c,d)"], &[]),
            (&["TC(x,y. ~a(x,y))(c,d)"], &[]),
        ]);
        let mut r = RuleInstance::named(RuleName::Cotc);
        let hyper = concl.as_hyper().unwrap();
        let ci = hyper
            .cedents
            .iter()
            .position(|c| c.fmls[0] == parse_tcl("coTC(x,y. a(x,y))(c,d)").unwrap())
            .unwrap();
        r.principal_cedent = Some(ci);
        r.principal = Some(parse_tcl("coTC(x,y. a(x,y))(c,d)").unwrap());
        r.fresh = Some("e".into());
        let applied = apply_rule(System::Htc, &concl, &r).unwrap();
        let expect = hl(vec![
            (&["a(c,d)", "a(c,e)"], &[]),
            (&["a(c,d)", "coTC(x,y. a(x,y))(e,d)"], &[]),
            (&["TC(x,y. ~a(x,y))(c,d)"], &[]),
        ]);
        assert_eq!(applied.premises, vec![expect]);
        let progress: Vec<_> = applied.edges.iter().filter(|e| e.progress).collect();
        assert_eq!(progress.len(), 1);
        let e = progress[0];
        assert_eq!(e.kind, AncestryKind::Formula);
        assert_eq!(e.dst_ced, ci);
    }

    #[test]
    fn lpd_k_step() {
        let concl = pl(&["<a>p", "<a>q", "[a](p & q)"]);
        let mut r = RuleInstance::named(RuleName::K);
        r.atom = Some("a".into());
        r.pdl_principal = Some(parse_pdl("[a](p & q)", Dialect::Pdl).unwrap());
        let applied = apply_rule(System::Lpd, &concl, &r).unwrap();
        assert_eq!(applied.premises, vec![pl(&["p", "q", "p & q"])]);
    }

    #[test]
    fn lpd_k_rejects_foreign_formulas() {
        let concl = pl(&["<b>p", "[a]q"]);
        let mut r = RuleInstance::named(RuleName::K);
        r.atom = Some("a".into());
        r.pdl_principal = Some(parse_pdl("[a]q", Dialect::Pdl).unwrap());
        assert!(matches!(
            apply_rule(System::Lpd, &concl, &r),
            Err(StepError::SideCondition(_))
        ));
    }

    #[test]
    fn htceq_neq_rewrites_other_cedent() {
        // Q, ⟨Γ(s), s≠t⟩^x, ⟨Δ(t)⟩^x  →  Q, ⟨Γ(s), Δ(s)⟩^x
        let concl = hl(vec![
            (&["p(c)", "c != d"], &[]),
            (&["a(d,d)"], &[]),
            (&["q(c)"], &[]),
        ]);
        let hyper = concl.as_hyper().unwrap();
        let ci = hyper
            .cedents
            .iter()
            .position(|c| c.fmls.contains(&parse_tcl("c != d").unwrap()))
            .unwrap();
        let di = hyper
            .cedents
            .iter()
            .position(|c| c.fmls.contains(&parse_tcl("a(d,d)").unwrap()))
            .unwrap();
        let mut r = RuleInstance::named(RuleName::Neq);
        r.principal_cedent = Some(ci);
        r.principal = Some(parse_tcl("c != d").unwrap());
        r.other_cedent = Some(di);
        let applied = apply_rule(System::HtcEq, &concl, &r).unwrap();
        let expect = hl(vec![(&["p(c)", "a(c,c)"], &[]), (&["q(c)"], &[])]);
        assert_eq!(applied.premises, vec![expect]);
        // Δ(s)-formulas trace back to the disequality, nothing to Δ(t)
        assert!(applied
            .edges
            .iter()
            .all(|e| e.kind != AncestryKind::Formula || e.dst_ced != di));
    }

    #[test]
    fn init_requires_exactly_empty_cedent() {
        let ok = hl(vec![(&[], &[])]);
        let r = RuleInstance::named(RuleName::Init);
        assert!(validate_step(System::Htc, &ok, &r, &[]).is_ok());
        let bad = hl(vec![(&[], &[]), (&["p(c)"], &[])]);
        assert!(validate_step(System::Htc, &bad, &r, &[]).is_err());
    }

    #[test]
    fn id_requires_closed_principal() {
        let concl = hl(vec![(&["a(c,x)"], &["x"]), (&["~a(c,x)"], &[])]);
        let hyper = concl.as_hyper().unwrap();
        let ci = hyper
            .cedents
            .iter()
            .position(|c| c.fmls[0] == parse_tcl("a(c,x)").unwrap())
            .unwrap();
        let mut r = RuleInstance::named(RuleName::Id);
        r.principal_cedent = Some(ci);
        r.principal = Some(parse_tcl("a(c,x)").unwrap());
        match apply_rule(System::Htc, &concl, &r) {
            Err(StepError::SideCondition(msg)) => assert!(msg.contains("closed")),
            other => panic!("expected closedness violation, got {other:?}"),
        }
    }

    #[test]
    fn or_step_keeping_both_disjuncts_is_rejected() {
        let concl = hl(vec![(&["p(c) | q(c)"], &[])]);
        let mut r = RuleInstance::named(RuleName::Or0);
        r.principal_cedent = Some(0);
        r.principal = Some(parse_tcl("p(c) | q(c)").unwrap());
        let claimed = hl(vec![(&["p(c)", "q(c)"], &[])]);
        assert!(matches!(
            validate_step(System::Htc, &concl, &r, &[claimed]),
            Err(StepError::PremiseMismatch { .. })
        ));
    }

    #[test]
    fn or_split_via_retained_cedent() {
        // derived two-cedent ∨ split: or0 keeping the principal cedent,
        // then or1 on the kept copy
        let concl = hl(vec![(&["p(c) | q(c)"], &[])]);
        let mut r0 = RuleInstance::named(RuleName::Or0);
        r0.principal_cedent = Some(0);
        r0.principal = Some(parse_tcl("p(c) | q(c)").unwrap());
        r0.retain_cedent = true;
        let mid = apply_rule(System::Htc, &concl, &r0).unwrap().premises[0].clone();
        let mid_h = mid.as_hyper().unwrap();
        let ci = mid_h
            .cedents
            .iter()
            .position(|c| c.fmls.contains(&parse_tcl("p(c) | q(c)").unwrap()))
            .unwrap();
        let mut r1 = RuleInstance::named(RuleName::Or1);
        r1.principal_cedent = Some(ci);
        r1.principal = Some(parse_tcl("p(c) | q(c)").unwrap());
        let end = apply_rule(System::Htc, &mid, &r1).unwrap().premises[0].clone();
        assert_eq!(end, hl(vec![(&["p(c)"], &[]), (&["q(c)"], &[])]));
    }

    #[test]
    fn fm_examples() {
        let h = hl(vec![(&["a(c,d)"], &[]), (&["b(c,x)"], &["x"])]);
        let f = fm(h.as_hyper().unwrap());
        assert_eq!(f, parse_tcl("a(c,d) | exists x. b(c,x)").unwrap());

        let top = fm(hl(vec![(&[], &[])]).as_hyper().unwrap());
        assert_eq!(top, crate::syntax::verum());

        let bot = fm(&Hypersequent::new(vec![]));
        assert_eq!(bot, crate::syntax::falsum());
    }

    #[test]
    fn subst_step_validates_against_claimed_premise() {
        // conclusion σ(S⃗) with σ = {c ↦ e}
        let premise = hl(vec![
            (&["coTC(x,y. a(x,y))(c,d)"], &[]),
            (&["TC(x,y. ~a(x,y))(c,d)"], &[]),
        ]);
        let concl = hl(vec![
            (&["coTC(x,y. a(x,y))(e,d)"], &[]),
            (&["TC(x,y. ~a(x,y))(e,d)"], &[]),
        ]);
        let mut r = RuleInstance::named(RuleName::Subst);
        r.subst = Some(crate::syntax::Substitution::identity().map_const("c", Term::cst("e")));
        let applied = validate_step(System::Htc, &concl, &r, &[premise]).unwrap();
        assert_eq!(applied.premises.len(), 1);
        // mismatch is caught
        let wrong = hl(vec![(&["coTC(x,y. a(x,y))(c,c)"], &[])]);
        assert!(validate_step(System::Htc, &concl, &r, &[wrong]).is_err());
    }

    #[test]
    fn tclg_cotc_branches_with_progress() {
        let concl = Label::Fol(FolSequent::new(vec![
            parse_tcl("coTC(x,y. a(x,y))(c,d)").unwrap(),
            parse_tcl("TC(x,y. ~a(x,y))(c,d)").unwrap(),
        ]));
        let mut r = RuleInstance::named(RuleName::Cotc);
        r.principal = Some(parse_tcl("coTC(x,y. a(x,y))(c,d)").unwrap());
        r.fresh = Some("e".into());
        let applied = apply_rule(System::Tclg, &concl, &r).unwrap();
        assert_eq!(applied.premises.len(), 2);
        let expect_right = Label::Fol(FolSequent::new(vec![
            parse_tcl("a(c,e)").unwrap(),
            parse_tcl("coTC(x,y. a(x,y))(e,d)").unwrap(),
            parse_tcl("TC(x,y. ~a(x,y))(c,d)").unwrap(),
        ]));
        assert_eq!(applied.premises[1], expect_right);
        assert!(applied
            .edges
            .iter()
            .any(|e| e.progress && e.premise == 1));
    }

    #[test]
    fn rule_not_in_system() {
        let concl = pl(&["p", "~p"]);
        let r = RuleInstance::named(RuleName::Cotc);
        assert!(matches!(
            apply_rule(System::Lpd, &concl, &r),
            Err(StepError::RuleNotInSystem { .. })
        ));
    }

    #[test]
    fn ancestry_cedent_edges_match_formula_edges() {
        // every cedent edge between nonempty cedents is witnessed by a
        // formula edge and vice versa
        let concl = hl(vec![(&["p(c)", "q(c) & p(d)"], &["x"]), (&["a(c,d)"], &[])]);
        let mut r = RuleInstance::named(RuleName::And);
        let hyper = concl.as_hyper().unwrap();
        let ci = hyper
            .cedents
            .iter()
            .position(|c| c.fmls.contains(&parse_tcl("q(c) & p(d)").unwrap()))
            .unwrap();
        r.principal_cedent = Some(ci);
        r.principal = Some(parse_tcl("q(c) & p(d)").unwrap());
        let applied = apply_rule(System::Htc, &concl, &r).unwrap();
        for e in applied.edges.iter().filter(|e| e.kind == AncestryKind::Cedent) {
            assert!(
                applied.edges.iter().any(|f| f.kind == AncestryKind::Formula
                    && f.premise == e.premise
                    && f.src_ced == e.src_ced
                    && f.dst_ced == e.dst_ced),
                "cedent edge without formula witness: {e:?}"
            );
        }
        for f in applied.edges.iter().filter(|e| e.kind == AncestryKind::Formula) {
            assert!(
                applied.edges.iter().any(|e| e.kind == AncestryKind::Cedent
                    && e.premise == f.premise
                    && e.src_ced == f.src_ced
                    && e.dst_ced == f.dst_ced),
                "formula edge without cedent edge: {f:?}"
            );
        }
    }
}

//! Abstract syntax for transitive closure logic and dynamic logic formulas,
//! together with parsing, printing, duality and substitution.

mod parse;
mod print;
mod subst;

pub use parse::{is_var_name, parse_pdl, parse_tcl, parse_term, Dialect};
pub use subst::Substitution;

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("symbol `{name}` used with arities {first} and {second}")]
    ArityClash {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("symbol `{name}` used both as {first} and as {second}")]
    KindClash {
        name: String,
        first: &'static str,
        second: &'static str,
    },
    #[error("test programs are not allowed in dialect pdl_plus")]
    TestNotAllowed { pos: usize },
    #[error("substitution would capture variable `{var}`")]
    Capture { var: String },
}

/// First-order terms. A constant is a nullary function symbol kept separate
/// for convenience; parameter constants (model elements used as constants)
/// live in the `@name` namespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    Fun(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn cst(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn fun(name: &str, args: Vec<Term>) -> Term {
        Term::Fun(name.to_string(), args)
    }

    /// Parameter constant for a model element.
    pub fn param(elem: &str) -> Term {
        Term::Const(format!("@{elem}"))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Fun(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Fun(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    /// Replaces every occurrence of `from` (as a whole subterm) by `to`.
    pub fn replace_term(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::Fun(f, args) => Term::Fun(
                f.clone(),
                args.iter().map(|a| a.replace_term(from, to)).collect(),
            ),
            other => other.clone(),
        }
    }
}

/// Formulas of transitive closure logic, in negation normal form: negation
/// occurs only as a polarity flag on atoms. Equality atoms are only used by
/// the equality-extended systems.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// Unary predicate atom `p(t)` or its complement `~p(t)`.
    Pred {
        name: String,
        arg: Term,
        positive: bool,
    },
    /// Binary relation atom `a(s,t)` or its complement `~a(s,t)`.
    Rel {
        name: String,
        left: Term,
        right: Term,
        positive: bool,
    },
    Eq(Term, Term),
    Neq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    /// `TC(x,y. body)(from,to)`
    Tc(TcBody),
    /// `coTC(x,y. body)(from,to)`
    CoTc(TcBody),
}

/// The shared shape of `TC` and `coTC` formulas: a binary relation abstraction
/// applied to two endpoint terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TcBody {
    pub x: String,
    pub y: String,
    pub body: Box<Formula>,
    pub from: Term,
    pub to: Term,
}

impl TcBody {
    pub fn new(x: &str, y: &str, body: Formula, from: Term, to: Term) -> Self {
        TcBody {
            x: x.to_string(),
            y: y.to_string(),
            body: Box::new(body),
            from,
            to,
        }
    }

    /// Instantiates the abstraction at the given endpoint terms.
    pub fn instantiate(&self, s: &Term, t: &Term) -> Result<Formula, SyntaxError> {
        let f = subst::subst_var(&self.body, &self.x, s)?;
        subst::subst_var(&f, &self.y, t)
    }

    /// Same abstraction, different endpoints.
    pub fn with_endpoints(&self, from: Term, to: Term) -> TcBody {
        TcBody {
            x: self.x.clone(),
            y: self.y.clone(),
            body: self.body.clone(),
            from,
            to,
        }
    }
}

pub fn pred(name: &str, arg: Term) -> Formula {
    Formula::Pred {
        name: name.to_string(),
        arg,
        positive: true,
    }
}

pub fn npred(name: &str, arg: Term) -> Formula {
    Formula::Pred {
        name: name.to_string(),
        arg,
        positive: false,
    }
}

pub fn rel(name: &str, left: Term, right: Term) -> Formula {
    Formula::Rel {
        name: name.to_string(),
        left,
        right,
        positive: true,
    }
}

pub fn nrel(name: &str, left: Term, right: Term) -> Formula {
    Formula::Rel {
        name: name.to_string(),
        left,
        right,
        positive: false,
    }
}

pub fn and(l: Formula, r: Formula) -> Formula {
    Formula::And(Box::new(l), Box::new(r))
}

pub fn or(l: Formula, r: Formula) -> Formula {
    Formula::Or(Box::new(l), Box::new(r))
}

/// Reserved predicate / constant backing the `⊤` and `⊥` abbreviations.
pub const TOP_PRED: &str = "ptop";
pub const TOP_CONST: &str = "ctop";

/// A closed valid formula, used where the grammar has no primitive `⊤`.
pub fn verum() -> Formula {
    or(
        pred(TOP_PRED, Term::cst(TOP_CONST)),
        npred(TOP_PRED, Term::cst(TOP_CONST)),
    )
}

/// A closed unsatisfiable formula.
pub fn falsum() -> Formula {
    and(
        pred(TOP_PRED, Term::cst(TOP_CONST)),
        npred(TOP_PRED, Term::cst(TOP_CONST)),
    )
}

impl Formula {
    /// De Morgan complement. Negation stays at the atoms.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Pred {
                name,
                arg,
                positive,
            } => Formula::Pred {
                name: name.clone(),
                arg: arg.clone(),
                positive: !positive,
            },
            Formula::Rel {
                name,
                left,
                right,
                positive,
            } => Formula::Rel {
                name: name.clone(),
                left: left.clone(),
                right: right.clone(),
                positive: !positive,
            },
            Formula::Eq(s, t) => Formula::Neq(s.clone(), t.clone()),
            Formula::Neq(s, t) => Formula::Eq(s.clone(), t.clone()),
            Formula::And(l, r) => or(l.dual(), r.dual()),
            Formula::Or(l, r) => and(l.dual(), r.dual()),
            Formula::Forall(x, f) => Formula::Exists(x.clone(), Box::new(f.dual())),
            Formula::Exists(x, f) => Formula::Forall(x.clone(), Box::new(f.dual())),
            Formula::Tc(b) => Formula::CoTc(TcBody {
                x: b.x.clone(),
                y: b.y.clone(),
                body: Box::new(b.body.dual()),
                from: b.from.clone(),
                to: b.to.clone(),
            }),
            Formula::CoTc(b) => Formula::Tc(TcBody {
                x: b.x.clone(),
                y: b.y.clone(),
                body: Box::new(b.body.dual()),
                from: b.from.clone(),
                to: b.to.clone(),
            }),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Pred { arg, .. } => arg.vars_into(out),
            Formula::Rel { left, right, .. } => {
                left.vars_into(out);
                right.vars_into(out);
            }
            Formula::Eq(s, t) | Formula::Neq(s, t) => {
                s.vars_into(out);
                t.vars_into(out);
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.free_vars_into(out);
                r.free_vars_into(out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                let mut inner = BTreeSet::new();
                f.free_vars_into(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
            Formula::Tc(b) | Formula::CoTc(b) => {
                let mut inner = BTreeSet::new();
                b.body.free_vars_into(&mut inner);
                inner.remove(&b.x);
                inner.remove(&b.y);
                out.extend(inner);
                b.from.vars_into(out);
                b.to.vars_into(out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Variables bound by a quantifier or TC binder somewhere inside.
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.bound_vars_into(&mut out);
        out
    }

    fn bound_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Pred { .. } | Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..) => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.bound_vars_into(out);
                r.bound_vars_into(out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                out.insert(x.clone());
                f.bound_vars_into(out);
            }
            Formula::Tc(b) | Formula::CoTc(b) => {
                out.insert(b.x.clone());
                out.insert(b.y.clone());
                b.body.bound_vars_into(out);
            }
        }
    }

    /// Whether this formula is an atom (predicate or relation literal).
    pub fn is_literal(&self) -> bool {
        matches!(
            self,
            Formula::Pred { .. } | Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..)
        )
    }

    /// Renames binders so that each quantifier and TC binder binds a distinct
    /// variable, also distinct from every free variable.
    pub fn distinct_binders(&self) -> Formula {
        let mut used = self.free_vars();
        self.distinct_binders_rec(&mut used)
    }

    fn distinct_binders_rec(&self, used: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Pred { .. } | Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..) => {
                self.clone()
            }
            Formula::And(l, r) => and(l.distinct_binders_rec(used), r.distinct_binders_rec(used)),
            Formula::Or(l, r) => or(l.distinct_binders_rec(used), r.distinct_binders_rec(used)),
            Formula::Forall(x, f) => {
                let (x2, f2) = rename_binder(x, f, used);
                Formula::Forall(x2, Box::new(f2.distinct_binders_rec(used)))
            }
            Formula::Exists(x, f) => {
                let (x2, f2) = rename_binder(x, f, used);
                Formula::Exists(x2, Box::new(f2.distinct_binders_rec(used)))
            }
            Formula::Tc(b) | Formula::CoTc(b) => {
                let (x2, f1) = rename_binder(&b.x, &b.body, used);
                let (y2, f2) = rename_binder(&b.y, &f1, used);
                let nb = TcBody {
                    x: x2,
                    y: y2,
                    body: Box::new(f2.distinct_binders_rec(used)),
                    from: b.from.clone(),
                    to: b.to.clone(),
                };
                match self {
                    Formula::Tc(_) => Formula::Tc(nb),
                    _ => Formula::CoTc(nb),
                }
            }
        }
    }
}

fn rename_binder(x: &str, body: &Formula, used: &mut BTreeSet<String>) -> (String, Formula) {
    if used.insert(x.to_string()) {
        return (x.to_string(), body.clone());
    }
    let fresh = fresh_symbol(SymKind::Var, used);
    used.insert(fresh.clone());
    let renamed =
        subst::subst_var(body, x, &Term::Var(fresh.clone())).expect("fresh variable cannot capture");
    (fresh, renamed)
}

/// Formulas of (identity-free) propositional dynamic logic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PdlFormula {
    Prop { name: String, positive: bool },
    And(Box<PdlFormula>, Box<PdlFormula>),
    Or(Box<PdlFormula>, Box<PdlFormula>),
    Dia(Program, Box<PdlFormula>),
    Box_(Program, Box<PdlFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Program {
    Atom(String),
    Comp(Box<Program>, Box<Program>),
    Union(Box<Program>, Box<Program>),
    Plus(Box<Program>),
    /// `A?`; only available in the full dialect.
    Test(Box<PdlFormula>),
}

pub fn prop(name: &str) -> PdlFormula {
    PdlFormula::Prop {
        name: name.to_string(),
        positive: true,
    }
}

pub fn nprop(name: &str) -> PdlFormula {
    PdlFormula::Prop {
        name: name.to_string(),
        positive: false,
    }
}

pub fn pand(l: PdlFormula, r: PdlFormula) -> PdlFormula {
    PdlFormula::And(Box::new(l), Box::new(r))
}

pub fn por(l: PdlFormula, r: PdlFormula) -> PdlFormula {
    PdlFormula::Or(Box::new(l), Box::new(r))
}

pub fn dia(p: Program, f: PdlFormula) -> PdlFormula {
    PdlFormula::Dia(p, Box::new(f))
}

pub fn boxm(p: Program, f: PdlFormula) -> PdlFormula {
    PdlFormula::Box_(p, Box::new(f))
}

pub fn atom(name: &str) -> Program {
    Program::Atom(name.to_string())
}

pub fn comp(a: Program, b: Program) -> Program {
    Program::Comp(Box::new(a), Box::new(b))
}

pub fn union(a: Program, b: Program) -> Program {
    Program::Union(Box::new(a), Box::new(b))
}

pub fn plus(a: Program) -> Program {
    Program::Plus(Box::new(a))
}

pub fn test(f: PdlFormula) -> Program {
    Program::Test(Box::new(f))
}

impl PdlFormula {
    pub fn dual(&self) -> PdlFormula {
        match self {
            PdlFormula::Prop { name, positive } => PdlFormula::Prop {
                name: name.clone(),
                positive: !positive,
            },
            PdlFormula::And(l, r) => por(l.dual(), r.dual()),
            PdlFormula::Or(l, r) => pand(l.dual(), r.dual()),
            PdlFormula::Dia(p, f) => boxm(p.clone(), f.dual()),
            PdlFormula::Box_(p, f) => dia(p.clone(), f.dual()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PdlFormula::Prop { .. } => 1,
            PdlFormula::And(l, r) | PdlFormula::Or(l, r) => 1 + l.size() + r.size(),
            PdlFormula::Dia(p, f) | PdlFormula::Box_(p, f) => 1 + p.size() + f.size(),
        }
    }

    pub fn uses_test(&self) -> bool {
        match self {
            PdlFormula::Prop { .. } => false,
            PdlFormula::And(l, r) | PdlFormula::Or(l, r) => l.uses_test() || r.uses_test(),
            PdlFormula::Dia(p, f) | PdlFormula::Box_(p, f) => p.uses_test() || f.uses_test(),
        }
    }
}

impl Program {
    pub fn size(&self) -> usize {
        match self {
            Program::Atom(_) => 1,
            Program::Comp(a, b) | Program::Union(a, b) => 1 + a.size() + b.size(),
            Program::Plus(a) => 1 + a.size(),
            Program::Test(f) => 1 + f.size(),
        }
    }

    pub fn uses_test(&self) -> bool {
        match self {
            Program::Atom(_) => false,
            Program::Comp(a, b) | Program::Union(a, b) => a.uses_test() || b.uses_test(),
            Program::Plus(a) => a.uses_test(),
            Program::Test(_) => true,
        }
    }
}

/// Kinds of symbols tracked by signature checks and `fresh_symbol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymKind {
    Var,
    Const,
    Fun,
    Pred,
    Rel,
}

/// Returns a name of the requested kind not present in `used`. Variables come
/// from the `z…` pool so that the lexical variable convention is respected;
/// other symbols use the `#`-prefixed per-proof namespace.
pub fn fresh_symbol(kind: SymKind, used: &BTreeSet<String>) -> String {
    let (prefix, base) = match kind {
        SymKind::Var => ("", "z"),
        SymKind::Const => ("#", "c"),
        SymKind::Fun => ("#", "f"),
        SymKind::Pred => ("#", "p"),
        SymKind::Rel => ("#", "a"),
    };
    for i in 0.. {
        let cand = format!("{prefix}{base}{i}");
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Signature accumulated over an artifact object, used to detect arity and
/// kind clashes.
#[derive(Debug, Default, Clone)]
pub struct Signature {
    pub preds: BTreeSet<String>,
    pub rels: BTreeSet<String>,
    pub funs: std::collections::BTreeMap<String, usize>,
    pub consts: BTreeSet<String>,
}

impl Signature {
    pub fn add_term(&mut self, t: &Term) -> Result<(), SyntaxError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => {
                self.check_kind(c, "constant")?;
                self.consts.insert(c.clone());
                Ok(())
            }
            Term::Fun(f, args) => {
                self.check_kind(f, "function")?;
                if let Some(prev) = self.funs.insert(f.clone(), args.len()) {
                    if prev != args.len() {
                        return Err(SyntaxError::ArityClash {
                            name: f.clone(),
                            first: prev,
                            second: args.len(),
                        });
                    }
                }
                for a in args {
                    self.add_term(a)?;
                }
                Ok(())
            }
        }
    }

    fn check_kind(&self, name: &str, kind: &'static str) -> Result<(), SyntaxError> {
        let conflict = if self.preds.contains(name) {
            Some("predicate")
        } else if self.rels.contains(name) {
            Some("relation")
        } else if kind != "function" && self.funs.contains_key(name) {
            Some("function")
        } else if kind != "constant" && self.consts.contains(name) {
            Some("constant")
        } else {
            None
        };
        match conflict {
            Some(first) if first != kind => Err(SyntaxError::KindClash {
                name: name.to_string(),
                first,
                second: kind,
            }),
            _ => Ok(()),
        }
    }

    pub fn add_formula(&mut self, f: &Formula) -> Result<(), SyntaxError> {
        match f {
            Formula::Pred { name, arg, .. } => {
                self.check_kind(name, "predicate")?;
                self.preds.insert(name.clone());
                self.add_term(arg)
            }
            Formula::Rel {
                name, left, right, ..
            } => {
                self.check_kind(name, "relation")?;
                self.rels.insert(name.clone());
                self.add_term(left)?;
                self.add_term(right)
            }
            Formula::Eq(s, t) | Formula::Neq(s, t) => {
                self.add_term(s)?;
                self.add_term(t)
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                self.add_formula(l)?;
                self.add_formula(r)
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => self.add_formula(f),
            Formula::Tc(b) | Formula::CoTc(b) => {
                self.add_formula(&b.body)?;
                self.add_term(&b.from)?;
                self.add_term(&b.to)
            }
        }
    }

    /// All symbol names in the signature.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.extend(self.preds.iter().cloned());
        out.extend(self.rels.iter().cloned());
        out.extend(self.funs.keys().cloned());
        out.extend(self.consts.iter().cloned());
        out
    }
}

/// Collects every symbol name (including variables) occurring in a formula,
/// for freshness checks.
pub fn all_names(f: &Formula, out: &mut BTreeSet<String>) {
    fn term(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::Fun(g, args) => {
                out.insert(g.clone());
                for a in args {
                    term(a, out);
                }
            }
        }
    }
    match f {
        Formula::Pred { name, arg, .. } => {
            out.insert(name.clone());
            term(arg, out);
        }
        Formula::Rel {
            name, left, right, ..
        } => {
            out.insert(name.clone());
            term(left, out);
            term(right, out);
        }
        Formula::Eq(s, t) | Formula::Neq(s, t) => {
            term(s, out);
            term(t, out);
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            all_names(l, out);
            all_names(r, out);
        }
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            out.insert(x.clone());
            all_names(g, out);
        }
        Formula::Tc(b) | Formula::CoTc(b) => {
            out.insert(b.x.clone());
            out.insert(b.y.clone());
            all_names(&b.body, out);
            term(&b.from, out);
            term(&b.to, out);
        }
    }
}

pub use subst::subst_var;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_involution() {
        let f = parse_tcl("TC(x,y. a(x,y) | b(x,y))(c,d) & forall u. p(u)").unwrap();
        assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn dual_of_tc_is_cotc_of_dual() {
        let f = parse_tcl("TC(x,y. a(x,y))(c,d)").unwrap();
        let g = parse_tcl("coTC(x,y. ~a(x,y))(c,d)").unwrap();
        assert_eq!(f.dual(), g);
    }

    #[test]
    fn pdl_dual_swaps_modalities() {
        let f = parse_pdl("<a>p", Dialect::PdlPlus).unwrap();
        let g = parse_pdl("[a]~p", Dialect::PdlPlus).unwrap();
        assert_eq!(f.dual(), g);
    }

    #[test]
    fn free_vars_of_quantified() {
        let f = parse_tcl("exists z. (a(x,z) & b(z,y))").unwrap();
        let fv = f.free_vars();
        assert_eq!(
            fv.into_iter().collect::<Vec<_>>(),
            vec!["x".to_string(), "y".to_string()]
        );
    }

    #[test]
    fn free_vars_of_tc_endpoints() {
        let f = parse_tcl("TC(x,y. a(x,y))(u,v)").unwrap();
        let fv = f.free_vars();
        assert_eq!(
            fv.into_iter().collect::<Vec<_>>(),
            vec!["u".to_string(), "v".to_string()]
        );
    }

    #[test]
    fn fresh_symbol_avoids_used() {
        let used: BTreeSet<String> = ["#c0", "#c1"].iter().map(|s| s.to_string()).collect();
        let f = fresh_symbol(SymKind::Const, &used);
        assert!(!used.contains(&f));
    }

    #[test]
    fn arity_clash_detected() {
        let f = parse_tcl("p(f(c)) & p(f(c,d))");
        match f {
            Err(SyntaxError::ArityClash { name, .. }) => assert_eq!(name, "f"),
            other => panic!("expected arity clash, got {other:?}"),
        }
    }

    #[test]
    fn distinct_binders_renames_shadowing() {
        let f = parse_tcl("exists x. (p(x) & exists x. q(x))").unwrap();
        let g = f.distinct_binders();
        let mut binders = BTreeSet::new();
        fn collect(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Exists(x, g) | Formula::Forall(x, g) => {
                    out.push(x.clone());
                    collect(g, out);
                }
                Formula::And(l, r) | Formula::Or(l, r) => {
                    collect(l, out);
                    collect(r, out);
                }
                _ => {}
            }
        }
        let mut v = Vec::new();
        collect(&g, &mut v);
        assert_eq!(v.len(), 2);
        assert!(binders.insert(v[0].clone()));
        assert!(binders.insert(v[1].clone()), "binders must be distinct");
    }
}

//! Substitutions in the sense of the substitution rule: constants map to
//! terms, function symbols and free variables are renamed.

use std::collections::BTreeMap;

use super::{Formula, SyntaxError, TcBody, Term};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub const_map: BTreeMap<String, Term>,
    pub fun_map: BTreeMap<String, String>,
    pub var_map: BTreeMap<String, String>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution::default()
    }

    pub fn map_const(mut self, c: &str, t: Term) -> Self {
        self.const_map.insert(c.to_string(), t);
        self
    }

    pub fn map_fun(mut self, f: &str, g: &str) -> Self {
        self.fun_map.insert(f.to_string(), g.to_string());
        self
    }

    pub fn map_var(mut self, x: &str, y: &str) -> Self {
        self.var_map.insert(x.to_string(), y.to_string());
        self
    }

    pub fn is_identity(&self) -> bool {
        self.const_map.is_empty() && self.fun_map.is_empty() && self.var_map.is_empty()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.var_map.get(v) {
                Some(w) => Term::Var(w.clone()),
                None => t.clone(),
            },
            Term::Const(c) => match self.const_map.get(c) {
                Some(s) => s.clone(),
                None => t.clone(),
            },
            Term::Fun(f, args) => {
                let name = self.fun_map.get(f).cloned().unwrap_or_else(|| f.clone());
                Term::Fun(name, args.iter().map(|a| self.apply_term(a)).collect())
            }
        }
    }

    /// Homomorphic application. Bound variables are untouched; the variable
    /// renaming applies to free occurrences only.
    pub fn apply_formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::Pred {
                name,
                arg,
                positive,
            } => Formula::Pred {
                name: name.clone(),
                arg: self.apply_term(arg),
                positive: *positive,
            },
            Formula::Rel {
                name,
                left,
                right,
                positive,
            } => Formula::Rel {
                name: name.clone(),
                left: self.apply_term(left),
                right: self.apply_term(right),
                positive: *positive,
            },
            Formula::Eq(s, t) => Formula::Eq(self.apply_term(s), self.apply_term(t)),
            Formula::Neq(s, t) => Formula::Neq(self.apply_term(s), self.apply_term(t)),
            Formula::And(l, r) => Formula::And(
                Box::new(self.apply_formula(l)),
                Box::new(self.apply_formula(r)),
            ),
            Formula::Or(l, r) => Formula::Or(
                Box::new(self.apply_formula(l)),
                Box::new(self.apply_formula(r)),
            ),
            Formula::Forall(x, g) => Formula::Forall(x.clone(), Box::new(self.shadow(x).apply_formula(g))),
            Formula::Exists(x, g) => Formula::Exists(x.clone(), Box::new(self.shadow(x).apply_formula(g))),
            Formula::Tc(b) => Formula::Tc(self.apply_tcbody(b)),
            Formula::CoTc(b) => Formula::CoTc(self.apply_tcbody(b)),
        }
    }

    fn apply_tcbody(&self, b: &TcBody) -> TcBody {
        let inner = self.shadow(&b.x).shadow(&b.y);
        TcBody {
            x: b.x.clone(),
            y: b.y.clone(),
            body: Box::new(inner.apply_formula(&b.body)),
            from: self.apply_term(&b.from),
            to: self.apply_term(&b.to),
        }
    }

    fn shadow(&self, x: &str) -> Substitution {
        if self.var_map.contains_key(x) {
            let mut s = self.clone();
            s.var_map.remove(x);
            s
        } else {
            self.clone()
        }
    }
}

/// Capture-checked substitution of a term for a free variable, used for
/// binder instantiation. Errors if a free variable of `t` would be captured.
pub fn subst_var(f: &Formula, x: &str, t: &Term) -> Result<Formula, SyntaxError> {
    let tvars = t.vars();
    fn go(f: &Formula, x: &str, t: &Term, tvars: &std::collections::BTreeSet<String>) -> Result<Formula, SyntaxError> {
        Ok(match f {
            Formula::Pred {
                name,
                arg,
                positive,
            } => Formula::Pred {
                name: name.clone(),
                arg: subst_term(arg, x, t),
                positive: *positive,
            },
            Formula::Rel {
                name,
                left,
                right,
                positive,
            } => Formula::Rel {
                name: name.clone(),
                left: subst_term(left, x, t),
                right: subst_term(right, x, t),
                positive: *positive,
            },
            Formula::Eq(s, u) => Formula::Eq(subst_term(s, x, t), subst_term(u, x, t)),
            Formula::Neq(s, u) => Formula::Neq(subst_term(s, x, t), subst_term(u, x, t)),
            Formula::And(l, r) => {
                Formula::And(Box::new(go(l, x, t, tvars)?), Box::new(go(r, x, t, tvars)?))
            }
            Formula::Or(l, r) => {
                Formula::Or(Box::new(go(l, x, t, tvars)?), Box::new(go(r, x, t, tvars)?))
            }
            Formula::Forall(y, g) | Formula::Exists(y, g) => {
                let rebuilt = if y == x {
                    g.as_ref().clone()
                } else {
                    if tvars.contains(y) && g.free_vars().contains(x) {
                        return Err(SyntaxError::Capture { var: y.clone() });
                    }
                    go(g, x, t, tvars)?
                };
                match f {
                    Formula::Forall(..) => Formula::Forall(y.clone(), Box::new(rebuilt)),
                    _ => Formula::Exists(y.clone(), Box::new(rebuilt)),
                }
            }
            Formula::Tc(b) | Formula::CoTc(b) => {
                let body = if b.x == x || b.y == x {
                    b.body.as_ref().clone()
                } else {
                    if (tvars.contains(&b.x) || tvars.contains(&b.y))
                        && b.body.free_vars().contains(x)
                    {
                        return Err(SyntaxError::Capture { var: b.x.clone() });
                    }
                    go(&b.body, x, t, tvars)?
                };
                let nb = TcBody {
                    x: b.x.clone(),
                    y: b.y.clone(),
                    body: Box::new(body),
                    from: subst_term(&b.from, x, t),
                    to: subst_term(&b.to, x, t),
                };
                match f {
                    Formula::Tc(_) => Formula::Tc(nb),
                    _ => Formula::CoTc(nb),
                }
            }
        })
    }
    go(f, x, t, &tvars)
}

fn subst_term(u: &Term, x: &str, t: &Term) -> Term {
    match u {
        Term::Var(v) if v == x => t.clone(),
        Term::Var(_) | Term::Const(_) => u.clone(),
        Term::Fun(f, args) => Term::Fun(f.clone(), args.iter().map(|a| subst_term(a, x, t)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_tcl, Term};

    #[test]
    fn const_substitution_on_atom() {
        let f = parse_tcl("a(c,d)").unwrap();
        let s = Substitution::identity().map_const("c", Term::cst("e"));
        assert_eq!(s.apply_formula(&f), parse_tcl("a(e,d)").unwrap());
    }

    #[test]
    fn const_substitution_on_tc_endpoint() {
        let f = parse_tcl("TC(x,y. a(x,y))(c,d)").unwrap();
        let s = Substitution::identity().map_const("c", Term::fun("f", vec![Term::cst("d")]));
        assert_eq!(s.apply_formula(&f), parse_tcl("TC(x,y. a(x,y))(f(d),d)").unwrap());
    }

    #[test]
    fn identity_is_fixpoint() {
        let f = parse_tcl("coTC(x,y. a(x,y) | b(x,y))(c,d)").unwrap();
        assert_eq!(Substitution::identity().apply_formula(&f), f);
    }

    #[test]
    fn dual_commutes_with_substitution() {
        let f = parse_tcl("TC(x,y. a(x,y) & ~p(x))(c,d) | exists u. b(u,c)").unwrap();
        let s = Substitution::identity()
            .map_const("c", Term::cst("e"))
            .map_fun("f", "g");
        assert_eq!(s.apply_formula(&f.dual()), s.apply_formula(&f).dual());
    }

    #[test]
    fn subst_var_instantiates() {
        let f = parse_tcl("a(x,d)").unwrap();
        let g = subst_var(&f, "x", &Term::cst("c")).unwrap();
        assert_eq!(g, parse_tcl("a(c,d)").unwrap());
    }
}

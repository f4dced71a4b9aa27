//! Canonical printing. `parse ∘ print` is the identity on every AST.

use std::fmt;

use super::{Formula, PdlFormula, Program, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Fun(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Formula {
    fn fmt_unit(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(..) | Formula::Or(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }

    fn fmt_conj(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Or(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Pred {
                name,
                arg,
                positive,
            } => {
                if !positive {
                    write!(f, "~")?;
                }
                write!(f, "{name}({arg})")
            }
            Formula::Rel {
                name,
                left,
                right,
                positive,
            } => {
                if !positive {
                    write!(f, "~")?;
                }
                write!(f, "{name}({left},{right})")
            }
            Formula::Eq(s, t) => write!(f, "{s} = {t}"),
            Formula::Neq(s, t) => write!(f, "{s} != {t}"),
            Formula::And(l, r) => {
                l.fmt_conj(f)?;
                write!(f, " & ")?;
                r.fmt_conj(f)
            }
            Formula::Or(l, r) => {
                write!(f, "{l} | {r}")
            }
            Formula::Forall(x, g) => {
                write!(f, "forall {x}. ")?;
                g.fmt_unit(f)
            }
            Formula::Exists(x, g) => {
                write!(f, "exists {x}. ")?;
                g.fmt_unit(f)
            }
            Formula::Tc(b) => write!(f, "TC({},{}. {})({},{})", b.x, b.y, b.body, b.from, b.to),
            Formula::CoTc(b) => {
                write!(f, "coTC({},{}. {})({},{})", b.x, b.y, b.body, b.from, b.to)
            }
        }
    }
}

impl PdlFormula {
    fn fmt_unit(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdlFormula::And(..) | PdlFormula::Or(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }

    fn fmt_conj(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdlFormula::Or(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for PdlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdlFormula::Prop { name, positive } => {
                if !positive {
                    write!(f, "~")?;
                }
                write!(f, "{name}")
            }
            PdlFormula::And(l, r) => {
                l.fmt_conj(f)?;
                write!(f, " & ")?;
                r.fmt_conj(f)
            }
            PdlFormula::Or(l, r) => write!(f, "{l} | {r}"),
            PdlFormula::Dia(p, g) => {
                write!(f, "<{p}>")?;
                g.fmt_unit(f)
            }
            PdlFormula::Box_(p, g) => {
                write!(f, "[{p}]")?;
                g.fmt_unit(f)
            }
        }
    }
}

impl Program {
    fn fmt_seq(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Union(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }

    fn fmt_post(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Union(..) | Program::Comp(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Atom(a) => write!(f, "{a}"),
            Program::Comp(a, b) => {
                a.fmt_seq(f)?;
                write!(f, ";")?;
                b.fmt_seq(f)
            }
            Program::Union(a, b) => write!(f, "{a} + {b}"),
            Program::Plus(a) => {
                a.fmt_post(f)?;
                write!(f, "^+")
            }
            Program::Test(g) => match g.as_ref() {
                PdlFormula::Prop { .. } => write!(f, "{g}?"),
                _ => write!(f, "({g})?"),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_pdl, parse_tcl, Dialect};

    fn tcl_roundtrip(text: &str) {
        let f = parse_tcl(text).unwrap();
        let printed = f.to_string();
        let g = parse_tcl(&printed).unwrap();
        assert_eq!(f, g, "round trip through `{printed}`");
    }

    fn pdl_roundtrip(text: &str) {
        let f = parse_pdl(text, Dialect::Pdl).unwrap();
        let printed = f.to_string();
        let g = parse_pdl(&printed, Dialect::Pdl).unwrap();
        assert_eq!(f, g, "round trip through `{printed}`");
    }

    #[test]
    fn roundtrips() {
        tcl_roundtrip("TC(x,y. a(x,y) | b(x,y))(c,f(d))");
        tcl_roundtrip("forall x. (p(x) & exists y. a(x,y)) | c = d");
        tcl_roundtrip("coTC(x,y. ~a(x,y) & x != y)(c,d)");
        pdl_roundtrip("<(a a + a b a)^+>p & [b](p | ~q)");
        pdl_roundtrip("[(p & q)?;a]r");
        pdl_roundtrip("<a^+ (b a^+)^+>p");
    }
}

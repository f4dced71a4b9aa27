//! Hand-rolled lexer and recursive-descent parsers for the surface grammar.
//!
//! Lexical conventions: identifiers start with a letter (or `@`/`#` for
//! parameter constants and generated symbols) and may contain letters,
//! digits, `_` and `'`. An identifier in term position is a variable exactly
//! when its first letter is one of `u…z`; all other unapplied identifiers are
//! constants. Predicate vs relation atoms are told apart by argument count.

use super::{Formula, PdlFormula, Program, Signature, SyntaxError, TcBody, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// Identity- and test-free.
    PdlPlus,
    /// With test programs.
    Pdl,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Langle,
    Rangle,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Eq,
    Neq,
    Semi,
    Plus,
    CaretPlus,
    Question,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, i));
                i += 1;
            }
            '<' => {
                out.push((Tok::Langle, i));
                i += 1;
            }
            '>' => {
                out.push((Tok::Rangle, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, i));
                i += 1;
            }
            '~' => {
                out.push((Tok::Tilde, i));
                i += 1;
            }
            '&' => {
                out.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                out.push((Tok::Bar, i));
                i += 1;
            }
            ';' => {
                out.push((Tok::Semi, i));
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '?' => {
                out.push((Tok::Question, i));
                i += 1;
            }
            '^' => {
                if i + 1 < bytes.len() && bytes[i + 1] as char == '+' {
                    out.push((Tok::CaretPlus, i));
                    i += 2;
                } else {
                    return Err(SyntaxError::Parse {
                        pos: i,
                        msg: "expected `^+`".into(),
                    });
                }
            }
            '=' => {
                out.push((Tok::Eq, i));
                i += 1;
            }
            '!' => {
                if i + 1 < bytes.len() && bytes[i + 1] as char == '=' {
                    out.push((Tok::Neq, i));
                    i += 2;
                } else {
                    return Err(SyntaxError::Parse {
                        pos: i,
                        msg: "expected `!=`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '@' || c == '#' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(SyntaxError::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, bytes.len()));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_pos(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.err(&format!("expected {what}")))
        }
    }

    fn err(&self, msg: &str) -> SyntaxError {
        SyntaxError::Parse {
            pos: self.peek_pos(),
            msg: msg.to_string(),
        }
    }
}

/// Whether an identifier denotes a variable under the lexical convention.
pub fn is_var_name(name: &str) -> bool {
    name.chars()
        .next()
        .map(|c| ('u'..='z').contains(&c))
        .unwrap_or(false)
}

fn ident_term(name: String) -> Term {
    if is_var_name(&name) {
        Term::Var(name)
    } else {
        Term::Const(name)
    }
}

fn parse_term_at(lx: &mut Lexer) -> Result<Term, SyntaxError> {
    match lx.peek().clone() {
        Tok::Ident(name) => {
            lx.next();
            if *lx.peek() == Tok::LParen {
                lx.next();
                let mut args = vec![parse_term_at(lx)?];
                while *lx.peek() == Tok::Comma {
                    lx.next();
                    args.push(parse_term_at(lx)?);
                }
                lx.expect(Tok::RParen, "`)` after function arguments")?;
                Ok(Term::Fun(name, args))
            } else {
                Ok(ident_term(name))
            }
        }
        _ => Err(lx.err("expected a term")),
    }
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut lx = Lexer {
        toks: lex(text)?,
        pos: 0,
    };
    let t = parse_term_at(&mut lx)?;
    lx.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

fn parse_fml(lx: &mut Lexer) -> Result<Formula, SyntaxError> {
    let mut f = parse_conj(lx)?;
    while *lx.peek() == Tok::Bar {
        lx.next();
        let r = parse_conj(lx)?;
        f = Formula::Or(Box::new(f), Box::new(r));
    }
    Ok(f)
}

fn parse_conj(lx: &mut Lexer) -> Result<Formula, SyntaxError> {
    let mut f = parse_unit(lx)?;
    while *lx.peek() == Tok::Amp {
        lx.next();
        let r = parse_unit(lx)?;
        f = Formula::And(Box::new(f), Box::new(r));
    }
    Ok(f)
}

fn parse_unit(lx: &mut Lexer) -> Result<Formula, SyntaxError> {
    match lx.peek().clone() {
        Tok::LParen => {
            lx.next();
            let f = parse_fml(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(f)
        }
        Tok::Tilde => {
            lx.next();
            let t = parse_term_at(lx)?;
            atom_from_application(lx, t, false)
        }
        Tok::Ident(name) if name == "forall" || name == "exists" => {
            lx.next();
            let v = match lx.next() {
                Tok::Ident(v) if is_var_name(&v) => v,
                _ => return Err(lx.err("expected a variable after quantifier")),
            };
            lx.expect(Tok::Dot, "`.` after quantified variable")?;
            let body = parse_unit(lx)?;
            Ok(if name == "forall" {
                Formula::Forall(v, Box::new(body))
            } else {
                Formula::Exists(v, Box::new(body))
            })
        }
        Tok::Ident(name) if name == "TC" || name == "coTC" => {
            lx.next();
            lx.expect(Tok::LParen, "`(` after TC")?;
            let x = match lx.next() {
                Tok::Ident(v) if is_var_name(&v) => v,
                _ => return Err(lx.err("expected a variable in TC binder")),
            };
            lx.expect(Tok::Comma, "`,` between TC binder variables")?;
            let y = match lx.next() {
                Tok::Ident(v) if is_var_name(&v) => v,
                _ => return Err(lx.err("expected a variable in TC binder")),
            };
            if x == y {
                return Err(lx.err("TC binder variables must be distinct"));
            }
            lx.expect(Tok::Dot, "`.` after TC binder")?;
            let body = parse_fml(lx)?;
            lx.expect(Tok::RParen, "`)` closing TC body")?;
            lx.expect(Tok::LParen, "`(` before TC endpoints")?;
            let s = parse_term_at(lx)?;
            lx.expect(Tok::Comma, "`,` between TC endpoints")?;
            let t = parse_term_at(lx)?;
            lx.expect(Tok::RParen, "`)` closing TC endpoints")?;
            let b = TcBody {
                x,
                y,
                body: Box::new(body),
                from: s,
                to: t,
            };
            Ok(if name == "TC" {
                Formula::Tc(b)
            } else {
                Formula::CoTc(b)
            })
        }
        Tok::Ident(_) => {
            let t = parse_term_at(lx)?;
            match lx.peek() {
                Tok::Eq => {
                    lx.next();
                    let u = parse_term_at(lx)?;
                    Ok(Formula::Eq(t, u))
                }
                Tok::Neq => {
                    lx.next();
                    let u = parse_term_at(lx)?;
                    Ok(Formula::Neq(t, u))
                }
                _ => atom_from_application(lx, t, true),
            }
        }
        _ => Err(lx.err("expected a formula")),
    }
}

fn atom_from_application(lx: &Lexer, t: Term, positive: bool) -> Result<Formula, SyntaxError> {
    match t {
        Term::Fun(name, mut args) => match args.len() {
            1 => Ok(Formula::Pred {
                name,
                arg: args.pop().unwrap(),
                positive,
            }),
            2 => {
                let right = args.pop().unwrap();
                let left = args.pop().unwrap();
                Ok(Formula::Rel {
                    name,
                    left,
                    right,
                    positive,
                })
            }
            n => Err(SyntaxError::Parse {
                pos: lx.peek_pos(),
                msg: format!("atom must be unary or binary, got {n} arguments"),
            }),
        },
        _ => Err(SyntaxError::Parse {
            pos: lx.peek_pos(),
            msg: "expected a predicate or relation atom".into(),
        }),
    }
}

/// Parses a transitive closure logic formula and checks its signature.
pub fn parse_tcl(text: &str) -> Result<Formula, SyntaxError> {
    let mut lx = Lexer {
        toks: lex(text)?,
        pos: 0,
    };
    let f = parse_fml(&mut lx)?;
    lx.expect(Tok::Eof, "end of input")?;
    let mut sig = Signature::default();
    sig.add_formula(&f)?;
    Ok(f)
}

fn parse_pdl_fml(lx: &mut Lexer, dialect: Dialect) -> Result<PdlFormula, SyntaxError> {
    let mut f = parse_pdl_conj(lx, dialect)?;
    while *lx.peek() == Tok::Bar {
        lx.next();
        let r = parse_pdl_conj(lx, dialect)?;
        f = PdlFormula::Or(Box::new(f), Box::new(r));
    }
    Ok(f)
}

fn parse_pdl_conj(lx: &mut Lexer, dialect: Dialect) -> Result<PdlFormula, SyntaxError> {
    let mut f = parse_pdl_unit(lx, dialect)?;
    while *lx.peek() == Tok::Amp {
        lx.next();
        let r = parse_pdl_unit(lx, dialect)?;
        f = PdlFormula::And(Box::new(f), Box::new(r));
    }
    Ok(f)
}

fn parse_pdl_unit(lx: &mut Lexer, dialect: Dialect) -> Result<PdlFormula, SyntaxError> {
    match lx.peek().clone() {
        Tok::LParen => {
            lx.next();
            let f = parse_pdl_fml(lx, dialect)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(f)
        }
        Tok::Tilde => {
            lx.next();
            match lx.next() {
                Tok::Ident(name) => Ok(PdlFormula::Prop {
                    name,
                    positive: false,
                }),
                _ => Err(lx.err("expected an atom after `~`")),
            }
        }
        Tok::Langle => {
            lx.next();
            let p = parse_prog(lx, dialect)?;
            lx.expect(Tok::Rangle, "`>` closing diamond program")?;
            let f = parse_pdl_unit(lx, dialect)?;
            Ok(PdlFormula::Dia(p, Box::new(f)))
        }
        Tok::LBracket => {
            lx.next();
            let p = parse_prog(lx, dialect)?;
            lx.expect(Tok::RBracket, "`]` closing box program")?;
            let f = parse_pdl_unit(lx, dialect)?;
            Ok(PdlFormula::Box_(p, Box::new(f)))
        }
        Tok::Ident(name) => {
            lx.next();
            Ok(PdlFormula::Prop {
                name,
                positive: true,
            })
        }
        _ => Err(lx.err("expected a formula")),
    }
}

fn parse_prog(lx: &mut Lexer, dialect: Dialect) -> Result<Program, SyntaxError> {
    let mut p = parse_prog_seq(lx, dialect)?;
    while *lx.peek() == Tok::Plus {
        lx.next();
        let q = parse_prog_seq(lx, dialect)?;
        p = Program::Union(Box::new(p), Box::new(q));
    }
    Ok(p)
}

fn parse_prog_seq(lx: &mut Lexer, dialect: Dialect) -> Result<Program, SyntaxError> {
    let mut parts = vec![parse_prog_post(lx, dialect)?];
    loop {
        match lx.peek() {
            Tok::Semi => {
                lx.next();
                parts.push(parse_prog_post(lx, dialect)?);
            }
            // Juxtaposition also means composition: `a b a` is `a;b;a`.
            Tok::Ident(_) | Tok::LParen | Tok::Tilde => {
                parts.push(parse_prog_post(lx, dialect)?);
            }
            _ => break,
        }
    }
    // Composition associates to the right: `a;b;a` is `a;(b;a)`.
    let mut p = parts.pop().expect("nonempty");
    while let Some(q) = parts.pop() {
        p = Program::Comp(Box::new(q), Box::new(p));
    }
    Ok(p)
}

fn parse_prog_post(lx: &mut Lexer, dialect: Dialect) -> Result<Program, SyntaxError> {
    let mut p = parse_prog_base(lx, dialect)?;
    while *lx.peek() == Tok::CaretPlus {
        lx.next();
        p = Program::Plus(Box::new(p));
    }
    Ok(p)
}

fn parse_prog_base(lx: &mut Lexer, dialect: Dialect) -> Result<Program, SyntaxError> {
    match lx.peek().clone() {
        Tok::Ident(name) => {
            lx.next();
            if *lx.peek() == Tok::Question {
                let pos = lx.peek_pos();
                lx.next();
                if dialect == Dialect::PdlPlus {
                    return Err(SyntaxError::TestNotAllowed { pos });
                }
                Ok(Program::Test(Box::new(PdlFormula::Prop {
                    name,
                    positive: true,
                })))
            } else {
                Ok(Program::Atom(name))
            }
        }
        Tok::Tilde => {
            // `~p?` — a test on a negated atom.
            lx.next();
            let name = match lx.next() {
                Tok::Ident(name) => name,
                _ => return Err(lx.err("expected an atom after `~`")),
            };
            let pos = lx.peek_pos();
            lx.expect(Tok::Question, "`?` after test formula")?;
            if dialect == Dialect::PdlPlus {
                return Err(SyntaxError::TestNotAllowed { pos });
            }
            Ok(Program::Test(Box::new(PdlFormula::Prop {
                name,
                positive: false,
            })))
        }
        Tok::LParen => {
            // Could be a parenthesized program, or `(fml)?` — a test.
            let snapshot = lx.pos;
            lx.next();
            if let Ok(f) = parse_pdl_fml(lx, dialect) {
                if *lx.peek() == Tok::RParen {
                    let after = lx.pos;
                    lx.next();
                    if *lx.peek() == Tok::Question {
                        let pos = lx.peek_pos();
                        lx.next();
                        if dialect == Dialect::PdlPlus {
                            return Err(SyntaxError::TestNotAllowed { pos });
                        }
                        return Ok(Program::Test(Box::new(f)));
                    }
                    lx.pos = after;
                    // fall through and reparse as a program
                }
            }
            lx.pos = snapshot;
            lx.next();
            let p = parse_prog(lx, dialect)?;
            lx.expect(Tok::RParen, "`)` closing program")?;
            Ok(p)
        }
        _ => Err(lx.err("expected a program")),
    }
}

/// Parses a dynamic logic formula in the given dialect.
pub fn parse_pdl(text: &str, dialect: Dialect) -> Result<PdlFormula, SyntaxError> {
    let mut lx = Lexer {
        toks: lex(text)?,
        pos: 0,
    };
    let f = parse_pdl_fml(&mut lx, dialect)?;
    lx.expect(Tok::Eof, "end of input")?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::*;

    #[test]
    fn parses_tc_application() {
        let f = parse_tcl("TC(x,y. a(x,y))(c,d)").unwrap();
        assert_eq!(
            f,
            Formula::Tc(TcBody::new(
                "x",
                "y",
                rel("a", Term::var("x"), Term::var("y")),
                Term::cst("c"),
                Term::cst("d")
            ))
        );
    }

    #[test]
    fn parses_negated_pred_on_fun() {
        let f = parse_tcl("~p(f(c))").unwrap();
        assert_eq!(f, npred("p", Term::fun("f", vec![Term::cst("c")])));
    }

    #[test]
    fn parses_cotc_with_or_body() {
        let f = parse_tcl("coTC(x,y. a(x,y) | b(x,y))(c,d)").unwrap();
        match f {
            Formula::CoTc(b) => assert!(matches!(*b.body, Formula::Or(..))),
            other => panic!("expected coTC, got {other:?}"),
        }
    }

    #[test]
    fn parses_paper_pdl_example() {
        let f = parse_pdl("<(a a + a b a)^+> p", Dialect::PdlPlus).unwrap();
        let expect = dia(
            plus(union(comp(atom("a"), atom("a")), comp(atom("a"), comp(atom("b"), atom("a"))))),
            prop("p"),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn semicolon_and_juxtaposition_agree() {
        let f = parse_pdl("<a;b;a>p", Dialect::PdlPlus).unwrap();
        let g = parse_pdl("<a b a>p", Dialect::PdlPlus).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn test_rejected_in_pdl_plus() {
        let r = parse_pdl("<a?>q", Dialect::PdlPlus);
        assert!(matches!(r, Err(SyntaxError::TestNotAllowed { .. })));
    }

    #[test]
    fn test_accepted_in_pdl() {
        let f = parse_pdl("[a?]q", Dialect::Pdl).unwrap();
        assert_eq!(f, boxm(test(prop("a")), prop("q")));
    }

    #[test]
    fn compound_test_parses() {
        let f = parse_pdl("<(p & q)?>r", Dialect::Pdl).unwrap();
        assert_eq!(f, dia(test(pand(prop("p"), prop("q"))), prop("r")));
    }

    #[test]
    fn syntax_error_carries_position() {
        let r = parse_tcl("a(c,,d)");
        match r {
            Err(SyntaxError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}

//! The modal sequent rules for identity-free dynamic logic, with the test
//! extension.

use super::{build_pdl, Applied, FmlSource, Label, PdlSequent, RuleInstance, RuleName, StepError};
use crate::syntax::{PdlFormula, Program};

fn find_principal<'a>(
    s: &'a PdlSequent,
    r: &'a RuleInstance,
) -> Result<(usize, &'a PdlFormula), StepError> {
    let f = r
        .pdl_principal
        .as_ref()
        .ok_or(StepError::MissingParam("principalFormula"))?;
    let fi = s
        .fmls
        .iter()
        .position(|g| g == f)
        .ok_or_else(|| StepError::PrincipalNotFound(format!("`{f}` not in sequent")))?;
    Ok((fi, f))
}

fn gamma(s: &PdlSequent, skip: &[usize], retain: bool) -> Vec<(PdlFormula, Vec<FmlSource>)> {
    s.fmls
        .iter()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k) || retain)
        .map(|(k, f)| {
            (
                f.clone(),
                vec![FmlSource {
                    src_ced: 0,
                    src_fml: k,
                    progress: false,
                }],
            )
        })
        .collect()
}

fn aux(f: PdlFormula, fi: usize) -> (PdlFormula, Vec<FmlSource>) {
    (
        f,
        vec![FmlSource {
            src_ced: 0,
            src_fml: fi,
            progress: true,
        }],
    )
}

fn one_premise(protos: Vec<(PdlFormula, Vec<FmlSource>)>) -> Applied {
    let (fmls, edges) = build_pdl(0, protos);
    Applied {
        premises: vec![Label::Pdl(PdlSequent { fmls })],
        edges,
    }
}

fn two_premises(
    left: Vec<(PdlFormula, Vec<FmlSource>)>,
    right: Vec<(PdlFormula, Vec<FmlSource>)>,
) -> Applied {
    let (lf, mut edges) = build_pdl(0, left);
    let (rf, e2) = build_pdl(1, right);
    edges.extend(e2);
    Applied {
        premises: vec![
            Label::Pdl(PdlSequent { fmls: lf }),
            Label::Pdl(PdlSequent { fmls: rf }),
        ],
        edges,
    }
}

pub(super) fn apply(s: &PdlSequent, r: &RuleInstance) -> Result<Applied, StepError> {
    let rule = r.rule()?;
    match rule {
        RuleName::Id => {
            // the axiom concludes exactly a complementary pair of atoms
            if s.fmls.len() != 2 {
                return Err(StepError::SideCondition(
                    "id concludes exactly p, ~p".into(),
                ));
            }
            match (&s.fmls[0], &s.fmls[1]) {
                (
                    PdlFormula::Prop { name: n1, positive: p1 },
                    PdlFormula::Prop { name: n2, positive: p2 },
                ) if n1 == n2 && p1 != p2 => Ok(Applied {
                    premises: Vec::new(),
                    edges: Vec::new(),
                }),
                _ => Err(StepError::SideCondition(
                    "id concludes exactly p, ~p".into(),
                )),
            }
        }
        RuleName::Wk => {
            let weak = r
                .weakened_pdl
                .as_ref()
                .ok_or(StepError::MissingParam("weakened"))?;
            let mut skip = Vec::new();
            for w in weak {
                let k = s
                    .fmls
                    .iter()
                    .position(|f| f == w)
                    .ok_or_else(|| StepError::PrincipalNotFound(format!("weakened `{w}`")))?;
                skip.push(k);
            }
            Ok(one_premise(gamma(s, &skip, false)))
        }
        RuleName::K => {
            let a = r.atom.as_ref().ok_or(StepError::MissingParam("atom"))?;
            let (fi, f) = find_principal(s, r)?;
            let body = match f {
                PdlFormula::Box_(Program::Atom(b), body) if b == a => body.as_ref().clone(),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a box over atom `{a}`"
                    )))
                }
            };
            let mut protos = Vec::new();
            for (k, g) in s.fmls.iter().enumerate() {
                if k == fi {
                    continue;
                }
                match g {
                    PdlFormula::Dia(Program::Atom(b), inner) if b == a => {
                        protos.push((
                            inner.as_ref().clone(),
                            vec![FmlSource {
                                src_ced: 0,
                                src_fml: k,
                                progress: false,
                            }],
                        ));
                    }
                    other => {
                        return Err(StepError::SideCondition(format!(
                            "k conclusion may only contain <{a}>-formulas besides the box, found `{other}`"
                        )))
                    }
                }
            }
            protos.push(aux(body, fi));
            Ok(one_premise(protos))
        }
        RuleName::And => {
            let (fi, f) = find_principal(s, r)?;
            let (a, b) = match f {
                PdlFormula::And(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a conjunction"
                    )))
                }
            };
            let mut left = gamma(s, &[fi], r.retain);
            left.push(aux(a, fi));
            let mut right = gamma(s, &[fi], r.retain);
            right.push(aux(b, fi));
            Ok(two_premises(left, right))
        }
        RuleName::Or0 | RuleName::Or1 => {
            let (fi, f) = find_principal(s, r)?;
            let (a, b) = match f {
                PdlFormula::Or(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a disjunction"
                    )))
                }
            };
            let keep = if rule == RuleName::Or0 { a } else { b };
            let mut protos = gamma(s, &[fi], r.retain);
            protos.push(aux(keep, fi));
            Ok(one_premise(protos))
        }
        RuleName::DiaComp => {
            let (fi, f) = find_principal(s, r)?;
            let (alpha, beta, body) = match f {
                PdlFormula::Dia(Program::Comp(a, b), body) => {
                    (a.as_ref().clone(), b.as_ref().clone(), body.as_ref().clone())
                }
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a diamond over a composition"
                    )))
                }
            };
            let mut protos = gamma(s, &[fi], r.retain);
            protos.push(aux(
                crate::syntax::dia(alpha, crate::syntax::dia(beta, body)),
                fi,
            ));
            Ok(one_premise(protos))
        }
        RuleName::DiaCup0 | RuleName::DiaCup1 => {
            let (fi, f) = find_principal(s, r)?;
            let (a0, a1, body) = match f {
                PdlFormula::Dia(Program::Union(a, b), body) => {
                    (a.as_ref().clone(), b.as_ref().clone(), body.as_ref().clone())
                }
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a diamond over a union"
                    )))
                }
            };
            let keep = if rule == RuleName::DiaCup0 { a0 } else { a1 };
            let mut protos = gamma(s, &[fi], r.retain);
            protos.push(aux(crate::syntax::dia(keep, body), fi));
            Ok(one_premise(protos))
        }
        RuleName::BoxCup => {
            let (fi, f) = find_principal(s, r)?;
            let (alpha, beta, body) = match f {
                PdlFormula::Box_(Program::Union(a, b), body) => {
                    (a.as_ref().clone(), b.as_ref().clone(), body.as_ref().clone())
                }
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a box over a union"
                    )))
                }
            };
            let mut left = gamma(s, &[fi], r.retain);
            left.push(aux(crate::syntax::boxm(alpha, body.clone()), fi));
            let mut right = gamma(s, &[fi], r.retain);
            right.push(aux(crate::syntax::boxm(beta, body), fi));
            Ok(two_premises(left, right))
        }
        RuleName::BoxComp => {
            let (fi, f) = find_principal(s, r)?;
            let (alpha, beta, body) = match f {
                PdlFormula::Box_(Program::Comp(a, b), body) => {
                    (a.as_ref().clone(), b.as_ref().clone(), body.as_ref().clone())
                }
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a box over a composition"
                    )))
                }
            };
            let mut protos = gamma(s, &[fi], r.retain);
            protos.push(aux(
                crate::syntax::boxm(alpha, crate::syntax::boxm(beta, body)),
                fi,
            ));
            Ok(one_premise(protos))
        }
        RuleName::DiaPlus0 | RuleName::DiaPlus1 => {
            let (fi, f) = find_principal(s, r)?;
            let (alpha, body) = match f {
                PdlFormula::Dia(Program::Plus(a), body) => (a.as_ref().clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a diamond over an iteration"
                    )))
                }
            };
            let unfold = if rule == RuleName::DiaPlus0 {
                crate::syntax::dia(alpha, body)
            } else {
                crate::syntax::dia(alpha.clone(), PdlFormula::Dia(Program::Plus(Box::new(alpha)), Box::new(body)))
            };
            let mut protos = gamma(s, &[fi], r.retain);
            protos.push(aux(unfold, fi));
            Ok(one_premise(protos))
        }
        RuleName::BoxPlus => {
            let (fi, f) = find_principal(s, r)?;
            let (alpha, body) = match f {
                PdlFormula::Box_(Program::Plus(a), body) => (a.as_ref().clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a box over an iteration"
                    )))
                }
            };
            let mut left = gamma(s, &[fi], r.retain);
            left.push(aux(crate::syntax::boxm(alpha.clone(), body.clone()), fi));
            let mut right = gamma(s, &[fi], r.retain);
            right.push(aux(
                crate::syntax::boxm(
                    alpha.clone(),
                    PdlFormula::Box_(Program::Plus(Box::new(alpha)), Box::new(body)),
                ),
                fi,
            ));
            Ok(two_premises(left, right))
        }
        RuleName::DiaTest => {
            let (fi, f) = find_principal(s, r)?;
            let (test, body) = match f {
                PdlFormula::Dia(Program::Test(t), body) => (t.as_ref().clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a diamond over a test"
                    )))
                }
            };
            let mut left = gamma(s, &[fi], r.retain);
            left.push(aux(test, fi));
            let mut right = gamma(s, &[fi], r.retain);
            right.push(aux(body, fi));
            Ok(two_premises(left, right))
        }
        RuleName::BoxTest => {
            let (fi, f) = find_principal(s, r)?;
            let (test, body) = match f {
                PdlFormula::Box_(Program::Test(t), body) => (t.as_ref().clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a box over a test"
                    )))
                }
            };
            let mut protos = gamma(s, &[fi], r.retain);
            protos.push(aux(test.dual(), fi));
            protos.push(aux(body, fi));
            Ok(one_premise(protos))
        }
        _ => Err(StepError::RuleNotInSystem {
            rule: rule.as_str().into(),
            system: "lpd".into(),
        }),
    }
}

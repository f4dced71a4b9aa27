//! The plain one-sided sequent rules for transitive closure logic with
//! equality and substitution.

use super::{
    build_flat, Applied, FmlSource, FolSequent, Label, ProtoFml, RuleInstance, RuleName, StepError,
};
use crate::syntax::{all_names, subst_var, Formula, Term};

fn find_principal<'a>(s: &'a FolSequent, r: &'a RuleInstance) -> Result<(usize, &'a Formula), StepError> {
    let f = r
        .principal
        .as_ref()
        .ok_or(StepError::MissingParam("principalFormula"))?;
    let fi = s
        .fmls
        .iter()
        .position(|g| g == f)
        .ok_or_else(|| StepError::PrincipalNotFound(format!("`{f}` not in sequent")))?;
    Ok((fi, f))
}

fn gamma_protos(s: &FolSequent, skip: &[usize], retain: bool) -> Vec<ProtoFml> {
    s.fmls
        .iter()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k) || retain)
        .map(|(k, f)| ProtoFml {
            f: f.clone(),
            sources: vec![FmlSource {
                src_ced: 0,
                src_fml: k,
                progress: false,
            }],
        })
        .collect()
}

fn aux(f: Formula, fi: usize, progress: bool) -> ProtoFml {
    ProtoFml {
        f,
        sources: vec![FmlSource {
            src_ced: 0,
            src_fml: fi,
            progress,
        }],
    }
}

fn check_fresh(s: &FolSequent, sym: &str) -> Result<(), StepError> {
    let mut names = std::collections::BTreeSet::new();
    for f in &s.fmls {
        all_names(f, &mut names);
    }
    if names.contains(sym) {
        return Err(StepError::Freshness(sym.to_string()));
    }
    Ok(())
}

fn one_premise(protos: Vec<ProtoFml>) -> Applied {
    let (fmls, edges) = build_flat(0, protos);
    Applied {
        premises: vec![Label::Fol(FolSequent { fmls })],
        edges,
    }
}

pub(super) fn apply(s: &FolSequent, r: &RuleInstance) -> Result<Applied, StepError> {
    let rule = r.rule()?;
    match rule {
        RuleName::Id => {
            let (_, f) = find_principal(s, r)?;
            match f {
                Formula::Pred { .. } | Formula::Rel { .. } => {}
                other => {
                    return Err(StepError::SideCondition(format!(
                        "id principal `{other}` must be a literal"
                    )))
                }
            }
            if !s.fmls.contains(&f.dual()) {
                return Err(StepError::PrincipalNotFound(format!(
                    "complement of `{f}` not in sequent"
                )));
            }
            Ok(Applied {
                premises: Vec::new(),
                edges: Vec::new(),
            })
        }
        RuleName::EqRefl => {
            let (_, f) = find_principal(s, r)?;
            match f {
                Formula::Eq(a, b) if a == b => Ok(Applied {
                    premises: Vec::new(),
                    edges: Vec::new(),
                }),
                other => Err(StepError::SideCondition(format!(
                    "`{other}` is not a reflexivity atom"
                ))),
            }
        }
        RuleName::Wk => {
            let weak = r
                .weakened_fmls
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
            Ok(one_premise(gamma_protos(s, &skip, false)))
        }
        RuleName::Or0 | RuleName::Or1 => {
            let (fi, f) = find_principal(s, r)?;
            let (a, b) = match f {
                Formula::Or(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a disjunction"
                    )))
                }
            };
            let keep = if rule == RuleName::Or0 { a } else { b };
            let mut protos = gamma_protos(s, &[fi], r.retain);
            protos.push(aux(keep, fi, false));
            Ok(one_premise(protos))
        }
        RuleName::And => {
            let (fi, f) = find_principal(s, r)?;
            let (a, b) = match f {
                Formula::And(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a conjunction"
                    )))
                }
            };
            let mut left = gamma_protos(s, &[fi], r.retain);
            left.push(aux(a, fi, false));
            let (lf, mut edges) = build_flat(0, left);
            let mut right = gamma_protos(s, &[fi], r.retain);
            right.push(aux(b, fi, false));
            let (rf, e2) = build_flat(1, right);
            edges.extend(e2);
            Ok(Applied {
                premises: vec![
                    Label::Fol(FolSequent { fmls: lf }),
                    Label::Fol(FolSequent { fmls: rf }),
                ],
                edges,
            })
        }
        RuleName::Exists => {
            let (fi, f) = find_principal(s, r)?;
            let (x, body) = match f {
                Formula::Exists(x, body) => (x.clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not existential"
                    )))
                }
            };
            let t = r.witness.as_ref().ok_or(StepError::MissingParam("witness"))?;
            let mut protos = gamma_protos(s, &[fi], r.retain);
            protos.push(aux(subst_var(&body, &x, t)?, fi, false));
            Ok(one_premise(protos))
        }
        RuleName::Forall => {
            let (fi, f) = find_principal(s, r)?;
            let (x, body) = match f {
                Formula::Forall(x, body) => (x.clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not universal"
                    )))
                }
            };
            let c = r.fresh.clone().ok_or(StepError::MissingParam("fresh"))?;
            check_fresh(s, &c)?;
            let mut protos = gamma_protos(s, &[fi], r.retain);
            protos.push(aux(subst_var(&body, &x, &Term::Const(c))?, fi, false));
            Ok(one_premise(protos))
        }
        RuleName::EqSubstL | RuleName::EqSubstR => {
            let (fi, f) = find_principal(s, r)?;
            let (a, b) = match f {
                Formula::Neq(a, b) => (a.clone(), b.clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a disequality"
                    )))
                }
            };
            let target = r.target.as_ref().ok_or(StepError::MissingParam("target"))?;
            let ti = s
                .fmls
                .iter()
                .position(|g| g == target)
                .ok_or_else(|| StepError::PrincipalNotFound(format!("target `{target}`")))?;
            // eqsubstL: Γ, s≠t, A(s) / Γ, A(t); eqsubstR: Γ, s≠t, A(t) / Γ, A(s).
            let (from, to) = if rule == RuleName::EqSubstL {
                (a, b)
            } else {
                (b, a)
            };
            let rewritten = super::htc_rewrite(target, &from, &to);
            let mut protos = gamma_protos(s, &[fi, ti], r.retain);
            protos.push(aux(rewritten, ti, false));
            Ok(one_premise(protos))
        }
        RuleName::Tc0 => {
            let (fi, f) = find_principal(s, r)?;
            let b = match f {
                Formula::Tc(b) => b.clone(),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a TC formula"
                    )))
                }
            };
            let mut protos = gamma_protos(s, &[fi], r.retain);
            protos.push(aux(b.instantiate(&b.from, &b.to)?, fi, false));
            Ok(one_premise(protos))
        }
        RuleName::Tc1 => {
            let (fi, f) = find_principal(s, r)?;
            let b = match f {
                Formula::Tc(b) => b.clone(),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a TC formula"
                    )))
                }
            };
            let t = r.witness.clone().ok_or(StepError::MissingParam("witness"))?;
            let mut left = gamma_protos(s, &[fi], r.retain);
            left.push(aux(b.instantiate(&b.from, &t)?, fi, false));
            let (lf, mut edges) = build_flat(0, left);
            let mut right = gamma_protos(s, &[fi], r.retain);
            right.push(aux(Formula::Tc(b.with_endpoints(t, b.to.clone())), fi, false));
            let (rf, e2) = build_flat(1, right);
            edges.extend(e2);
            Ok(Applied {
                premises: vec![
                    Label::Fol(FolSequent { fmls: lf }),
                    Label::Fol(FolSequent { fmls: rf }),
                ],
                edges,
            })
        }
        RuleName::Cotc => {
            let (fi, f) = find_principal(s, r)?;
            let b = match f {
                Formula::CoTc(b) => b.clone(),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a coTC formula"
                    )))
                }
            };
            let c = r.fresh.clone().ok_or(StepError::MissingParam("fresh"))?;
            check_fresh(s, &c)?;
            let ct = Term::Const(c);
            let mut left = gamma_protos(s, &[fi], r.retain);
            left.push(aux(b.instantiate(&b.from, &b.to)?, fi, false));
            let (lf, mut edges) = build_flat(0, left);
            let mut right = gamma_protos(s, &[fi], r.retain);
            right.push(aux(b.instantiate(&b.from, &ct)?, fi, false));
            // the unfolding continuation: the trace's progress point
            right.push(aux(
                Formula::CoTc(b.with_endpoints(ct, b.to.clone())),
                fi,
                true,
            ));
            let (rf, e2) = build_flat(1, right);
            edges.extend(e2);
            Ok(Applied {
                premises: vec![
                    Label::Fol(FolSequent { fmls: lf }),
                    Label::Fol(FolSequent { fmls: rf }),
                ],
                edges,
            })
        }
        RuleName::Subst => Err(StepError::UnderDetermined),
        _ => Err(StepError::RuleNotInSystem {
            rule: rule.as_str().into(),
            system: "tclg".into(),
        }),
    }
}

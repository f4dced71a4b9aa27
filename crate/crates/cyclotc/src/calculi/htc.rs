//! The annotated-hypersequent rules, with the equality extension.

use std::collections::BTreeSet;

use super::{
    build_hyper, Applied, Cedent, FmlSource, Hypersequent, Label, ProtoCedent, ProtoFml,
    RuleInstance, RuleName, StepError,
};
use crate::syntax::{subst_var, Formula, Term};

/// Context cedents as protos: everything except the listed indices, mapped
/// identically. With `retain` the excluded cedents are also kept.
fn context(h: &Hypersequent, exclude: &[usize], retain: &[usize]) -> Vec<ProtoCedent> {
    let mut out = Vec::new();
    for (j, c) in h.cedents.iter().enumerate() {
        if exclude.contains(&j) && !retain.contains(&j) {
            continue;
        }
        out.push(identity_proto(c, j));
    }
    out
}

fn identity_proto(c: &Cedent, j: usize) -> ProtoCedent {
    ProtoCedent {
        fmls: c
            .fmls
            .iter()
            .enumerate()
            .map(|(k, f)| ProtoFml {
                f: f.clone(),
                sources: vec![FmlSource {
                    src_ced: j,
                    src_fml: k,
                    progress: false,
                }],
            })
            .collect(),
        ann: c.ann.clone(),
        sources: vec![j],
    }
}

/// The Γ-part of a principal cedent (everything except the principal
/// formula), with identity provenance.
fn gamma_protos(c: &Cedent, j: usize, principal_idx: usize, retain: bool) -> Vec<ProtoFml> {
    c.fmls
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != principal_idx || retain)
        .map(|(k, f)| ProtoFml {
            f: f.clone(),
            sources: vec![FmlSource {
                src_ced: j,
                src_fml: k,
                progress: false,
            }],
        })
        .collect()
}

fn aux(f: Formula, j: usize, principal_idx: usize, progress: bool) -> ProtoFml {
    ProtoFml {
        f,
        sources: vec![FmlSource {
            src_ced: j,
            src_fml: principal_idx,
            progress,
        }],
    }
}

struct Principal<'a> {
    ci: usize,
    cedent: &'a Cedent,
    fi: usize,
    formula: &'a Formula,
}

fn find_principal<'a>(h: &'a Hypersequent, r: &'a RuleInstance) -> Result<Principal<'a>, StepError> {
    let ci = r
        .principal_cedent
        .ok_or(StepError::MissingParam("principalCedent"))?;
    let cedent = h
        .cedents
        .get(ci)
        .ok_or_else(|| StepError::PrincipalNotFound(format!("no cedent at index {ci}")))?;
    let f = r
        .principal
        .as_ref()
        .ok_or(StepError::MissingParam("principalFormula"))?;
    let fi = cedent
        .fmls
        .iter()
        .position(|g| g == f)
        .ok_or_else(|| StepError::PrincipalNotFound(format!("`{f}` not in cedent {ci}")))?;
    Ok(Principal {
        ci,
        cedent,
        fi,
        formula: f,
    })
}

fn check_fresh(h: &Hypersequent, sym: &str) -> Result<(), StepError> {
    let names = Label::Hyper(h.clone()).names();
    if names.contains(sym) {
        return Err(StepError::Freshness(sym.to_string()));
    }
    Ok(())
}

/// Herbrand term `f(x⃗)` over the annotation in canonical order; a constant
/// when the annotation is empty.
fn herbrand_term(f: &str, ann: &[String]) -> Term {
    if ann.is_empty() {
        Term::Const(f.to_string())
    } else {
        Term::Fun(
            f.to_string(),
            ann.iter().map(|x| Term::Var(x.clone())).collect(),
        )
    }
}

pub(super) fn apply(h: &Hypersequent, r: &RuleInstance) -> Result<Applied, StepError> {
    let rule = r.rule()?;
    match rule {
        RuleName::Init => {
            if h.cedents != vec![Cedent::empty()] {
                return Err(StepError::SideCondition(
                    "init concludes exactly the empty cedent".into(),
                ));
            }
            Ok(Applied {
                premises: Vec::new(),
                edges: Vec::new(),
            })
        }
        RuleName::Wk => {
            let weak = r
                .weakened_cedents
                .as_ref()
                .ok_or(StepError::MissingParam("weakened"))?;
            if weak.is_empty() {
                return Err(StepError::SideCondition("nothing to weaken".into()));
            }
            let mut drop = Vec::new();
            for w in weak {
                let j = h
                    .cedents
                    .iter()
                    .position(|c| c == w)
                    .ok_or_else(|| StepError::PrincipalNotFound(format!("weakened cedent {w}")))?;
                drop.push(j);
            }
            if drop.len() == h.cedents.len() {
                return Err(StepError::SideCondition(
                    "weakening may not empty the hypersequent".into(),
                ));
            }
            let protos = context(h, &drop, &[]);
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        RuleName::Subst => Err(StepError::UnderDetermined),
        RuleName::Cup => {
            let ci = r
                .principal_cedent
                .ok_or(StepError::MissingParam("principalCedent"))?;
            let cedent = h
                .cedents
                .get(ci)
                .ok_or_else(|| StepError::PrincipalNotFound(format!("no cedent at index {ci}")))?;
            let left_fmls = r.left_fmls.clone().unwrap_or_default();
            let left_ann = r.left_ann.clone().unwrap_or_default();
            for f in &left_fmls {
                if !cedent.fmls.contains(f) {
                    return Err(StepError::PrincipalNotFound(format!(
                        "cup left formula `{f}` not in cedent"
                    )));
                }
            }
            for x in &left_ann {
                if !cedent.ann.contains(x) {
                    return Err(StepError::PrincipalNotFound(format!(
                        "cup left annotation variable `{x}` not in cedent"
                    )));
                }
            }
            let gamma: Vec<(usize, &Formula)> = cedent
                .fmls
                .iter()
                .enumerate()
                .filter(|(_, f)| left_fmls.contains(f))
                .collect();
            let delta: Vec<(usize, &Formula)> = cedent
                .fmls
                .iter()
                .enumerate()
                .filter(|(_, f)| !left_fmls.contains(f))
                .collect();
            let xs: Vec<String> = left_ann.clone();
            let ys: Vec<String> = cedent
                .ann
                .iter()
                .filter(|x| !left_ann.contains(x))
                .cloned()
                .collect();
            let freev = |part: &[(usize, &Formula)]| -> BTreeSet<String> {
                let mut out = BTreeSet::new();
                for (_, f) in part {
                    out.extend(f.free_vars());
                }
                out
            };
            if freev(&delta).iter().any(|v| xs.contains(v)) {
                return Err(StepError::SideCondition(
                    "freev(Δ) must be disjoint from x⃗".into(),
                ));
            }
            if freev(&gamma).iter().any(|v| ys.contains(v)) {
                return Err(StepError::SideCondition(
                    "freev(Γ) must be disjoint from y⃗".into(),
                ));
            }
            let side = |part: Vec<(usize, &Formula)>, ann: Vec<String>| ProtoCedent {
                fmls: part
                    .into_iter()
                    .map(|(k, f)| ProtoFml {
                        f: f.clone(),
                        sources: vec![FmlSource {
                            src_ced: ci,
                            src_fml: k,
                            progress: false,
                        }],
                    })
                    .collect(),
                ann,
                sources: vec![ci],
            };
            let retain = if r.retain_cedent { vec![ci] } else { vec![] };
            let mut protos1 = context(h, &[ci], &retain);
            protos1.push(side(gamma, xs));
            let (p1, mut e1) = build_hyper(0, protos1);
            let mut protos2 = context(h, &[ci], &retain);
            protos2.push(side(delta, ys));
            let (p2, e2) = build_hyper(1, protos2);
            e1.extend(e2);
            Ok(Applied {
                premises: vec![Label::Hyper(p1), Label::Hyper(p2)],
                edges: e1,
            })
        }
        RuleName::Id => {
            let p = find_principal(h, r)?;
            if !p.formula.is_closed() {
                return Err(StepError::SideCondition(format!(
                    "id principal `{}` must be closed",
                    p.formula
                )));
            }
            let co = Cedent::new(vec![p.formula.dual()], Vec::new());
            let di = h
                .cedents
                .iter()
                .position(|c| *c == co)
                .ok_or_else(|| StepError::PrincipalNotFound(format!("co-cedent `{co}`")))?;
            if di == p.ci {
                return Err(StepError::SideCondition(
                    "id principal and co-cedent must be distinct cedents".into(),
                ));
            }
            let retain = if r.retain_cedent { vec![p.ci] } else { vec![] };
            let mut protos = context(h, &[p.ci, di], &retain);
            protos.push(ProtoCedent {
                fmls: gamma_protos(p.cedent, p.ci, p.fi, r.retain),
                ann: p.cedent.ann.clone(),
                sources: vec![p.ci],
            });
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        RuleName::And => {
            let p = find_principal(h, r)?;
            let (a, b) = match p.formula {
                Formula::And(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a conjunction"
                    )))
                }
            };
            one_cedent_premise(
                h,
                r,
                p,
                vec![aux(a, r.principal_cedent.unwrap(), 0, false), aux(b, 0, 0, false)],
                None,
            )
        }
        RuleName::Or0 | RuleName::Or1 => {
            let p = find_principal(h, r)?;
            let (a, b) = match p.formula {
                Formula::Or(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a disjunction"
                    )))
                }
            };
            let keep = if rule == RuleName::Or0 { a } else { b };
            one_cedent_premise(h, r, p, vec![aux(keep, 0, 0, false)], None)
        }
        RuleName::Inst => {
            let ci = r
                .principal_cedent
                .ok_or(StepError::MissingParam("principalCedent"))?;
            let cedent = h
                .cedents
                .get(ci)
                .ok_or_else(|| StepError::PrincipalNotFound(format!("no cedent at index {ci}")))?;
            let y = r.var.as_ref().ok_or(StepError::MissingParam("var"))?;
            if !cedent.ann.contains(y) {
                return Err(StepError::PrincipalNotFound(format!(
                    "`{y}` not in annotation"
                )));
            }
            let t = r.witness.as_ref().ok_or(StepError::MissingParam("witness"))?;
            let mut fmls = Vec::new();
            for (k, f) in cedent.fmls.iter().enumerate() {
                fmls.push(ProtoFml {
                    f: subst_var(f, y, t)?,
                    sources: vec![FmlSource {
                        src_ced: ci,
                        src_fml: k,
                        progress: false,
                    }],
                });
            }
            let ann: Vec<String> = cedent.ann.iter().filter(|x| *x != y).cloned().collect();
            let retain = if r.retain_cedent { vec![ci] } else { vec![] };
            let mut protos = context(h, &[ci], &retain);
            protos.push(ProtoCedent {
                fmls,
                ann,
                sources: vec![ci],
            });
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        RuleName::Exists => {
            let p = find_principal(h, r)?;
            let (x, body) = match p.formula {
                Formula::Exists(x, body) => (x.clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not existential"
                    )))
                }
            };
            let y = r.fresh.clone().ok_or(StepError::MissingParam("fresh"))?;
            check_fresh(h, &y)?;
            let inst = subst_var(&body, &x, &Term::Var(y.clone()))?;
            let mut ann = p.cedent.ann.clone();
            ann.push(y);
            one_cedent_premise(h, r, p, vec![aux(inst, 0, 0, false)], Some(ann))
        }
        RuleName::Forall => {
            let p = find_principal(h, r)?;
            let (x, body) = match p.formula {
                Formula::Forall(x, body) => (x.clone(), body.as_ref().clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not universal"
                    )))
                }
            };
            let f = r.fresh.clone().ok_or(StepError::MissingParam("fresh"))?;
            check_fresh(h, &f)?;
            let w = herbrand_term(&f, &p.cedent.ann);
            let inst = subst_var(&body, &x, &w)?;
            one_cedent_premise(h, r, p, vec![aux(inst, 0, 0, false)], None)
        }
        RuleName::Tc => {
            let p = find_principal(h, r)?;
            let b = match p.formula {
                Formula::Tc(b) => b.clone(),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a TC formula"
                    )))
                }
            };
            let z = r.fresh.clone().ok_or(StepError::MissingParam("fresh"))?;
            check_fresh(h, &z)?;
            if !crate::syntax::is_var_name(&z) {
                return Err(StepError::SideCondition(format!(
                    "tc fresh symbol `{z}` must be a variable"
                )));
            }
            let zt = Term::Var(z.clone());
            let step = b.instantiate(&b.from, &b.to)?;
            let hop = b.instantiate(&b.from, &zt)?;
            let rest = Formula::Tc(b.with_endpoints(zt, b.to.clone()));
            let (ci, fi) = (p.ci, p.fi);
            let cedent = p.cedent;
            let retain = if r.retain_cedent { vec![ci] } else { vec![] };
            let mut protos = context(h, &[ci], &retain);
            let mut ced1 = gamma_protos(cedent, ci, fi, r.retain);
            ced1.push(aux(step, ci, fi, false));
            protos.push(ProtoCedent {
                fmls: ced1,
                ann: cedent.ann.clone(),
                sources: vec![ci],
            });
            let mut ced2 = gamma_protos(cedent, ci, fi, r.retain);
            ced2.push(aux(hop, ci, fi, false));
            ced2.push(aux(rest, ci, fi, false));
            let mut ann2 = cedent.ann.clone();
            ann2.push(z);
            protos.push(ProtoCedent {
                fmls: ced2,
                ann: ann2,
                sources: vec![ci],
            });
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        RuleName::Cotc => {
            let p = find_principal(h, r)?;
            let b = match p.formula {
                Formula::CoTc(b) => b.clone(),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a coTC formula"
                    )))
                }
            };
            let f = r.fresh.clone().ok_or(StepError::MissingParam("fresh"))?;
            check_fresh(h, &f)?;
            let w = herbrand_term(&f, &p.cedent.ann);
            let step = b.instantiate(&b.from, &b.to)?;
            let hop = b.instantiate(&b.from, &w)?;
            let rest = Formula::CoTc(b.with_endpoints(w, b.to.clone()));
            let (ci, fi) = (p.ci, p.fi);
            let cedent = p.cedent;
            let retain = if r.retain_cedent { vec![ci] } else { vec![] };
            let mut protos = context(h, &[ci], &retain);
            let mut ced1 = gamma_protos(cedent, ci, fi, r.retain);
            ced1.push(aux(step.clone(), ci, fi, false));
            ced1.push(aux(hop, ci, fi, false));
            protos.push(ProtoCedent {
                fmls: ced1,
                ann: cedent.ann.clone(),
                sources: vec![ci],
            });
            let mut ced2 = gamma_protos(cedent, ci, fi, r.retain);
            ced2.push(aux(step, ci, fi, false));
            // the unfolding continuation carries the progress flag
            ced2.push(aux(rest, ci, fi, true));
            protos.push(ProtoCedent {
                fmls: ced2,
                ann: cedent.ann.clone(),
                sources: vec![ci],
            });
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        RuleName::Eq => {
            let p = find_principal(h, r)?;
            match p.formula {
                Formula::Eq(s, t) if s == t => {}
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a reflexivity atom"
                    )))
                }
            }
            // t=t has no ancestors; the rest of the cedent maps identically.
            let retain = if r.retain_cedent { vec![p.ci] } else { vec![] };
            let mut protos = context(h, &[p.ci], &retain);
            protos.push(ProtoCedent {
                fmls: gamma_protos(p.cedent, p.ci, p.fi, r.retain),
                ann: p.cedent.ann.clone(),
                sources: vec![p.ci],
            });
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        RuleName::Neq => {
            let p = find_principal(h, r)?;
            let (s, t) = match p.formula {
                Formula::Neq(s, t) => (s.clone(), t.clone()),
                other => {
                    return Err(StepError::SideCondition(format!(
                        "`{other}` is not a disequality"
                    )))
                }
            };
            if !s.is_closed() || !t.is_closed() {
                return Err(StepError::SideCondition(
                    "neq endpoints must be closed terms".into(),
                ));
            }
            let di = r
                .other_cedent
                .ok_or(StepError::MissingParam("otherCedent"))?;
            if di == p.ci {
                return Err(StepError::SideCondition(
                    "neq needs two distinct cedents".into(),
                ));
            }
            let delta = h
                .cedents
                .get(di)
                .ok_or_else(|| StepError::PrincipalNotFound(format!("no cedent at index {di}")))?;
            let (from, to) = if r.swap { (s.clone(), t.clone()) } else { (t.clone(), s.clone()) };
            // side conditions keeping the annotation merge sound
            let gamma_free = {
                let mut out = BTreeSet::new();
                for (k, f) in p.cedent.fmls.iter().enumerate() {
                    if k != p.fi {
                        out.extend(f.free_vars());
                    }
                }
                out
            };
            if delta.free_vars().iter().any(|v| p.cedent.ann.contains(v) && !delta.ann.contains(v))
                || gamma_free.iter().any(|v| delta.ann.contains(v) && !p.cedent.ann.contains(v))
            {
                return Err(StepError::SideCondition(
                    "neq annotation parts must not cross-bind".into(),
                ));
            }
            let mut fmls = gamma_protos(p.cedent, p.ci, p.fi, r.retain);
            for (k, f) in delta.fmls.iter().enumerate() {
                let rewritten = rewrite_formula(f, &from, &to);
                let _ = k;
                // Δ(s) formulas are ancestors of the disequality itself.
                fmls.push(ProtoFml {
                    f: rewritten,
                    sources: vec![FmlSource {
                        src_ced: p.ci,
                        src_fml: p.fi,
                        progress: false,
                    }],
                });
            }
            let mut ann = p.cedent.ann.clone();
            ann.extend(delta.ann.iter().cloned());
            let retain = if r.retain_cedent { vec![p.ci] } else { vec![] };
            let mut protos = context(h, &[p.ci, di], &retain);
            protos.push(ProtoCedent {
                fmls,
                ann,
                sources: vec![p.ci],
            });
            let (prem, edges) = build_hyper(0, protos);
            Ok(Applied {
                premises: vec![Label::Hyper(prem)],
                edges,
            })
        }
        _ => Err(StepError::RuleNotInSystem {
            rule: rule.as_str().into(),
            system: "htc".into(),
        }),
    }
}

/// Replaces every occurrence of the closed term `from` by `to` in a formula.
pub(crate) fn rewrite_formula(f: &Formula, from: &Term, to: &Term) -> Formula {
    match f {
        Formula::Pred {
            name,
            arg,
            positive,
        } => Formula::Pred {
            name: name.clone(),
            arg: arg.replace_term(from, to),
            positive: *positive,
        },
        Formula::Rel {
            name,
            left,
            right,
            positive,
        } => Formula::Rel {
            name: name.clone(),
            left: left.replace_term(from, to),
            right: right.replace_term(from, to),
            positive: *positive,
        },
        Formula::Eq(s, t) => Formula::Eq(s.replace_term(from, to), t.replace_term(from, to)),
        Formula::Neq(s, t) => Formula::Neq(s.replace_term(from, to), t.replace_term(from, to)),
        Formula::And(l, r) => Formula::And(
            Box::new(rewrite_formula(l, from, to)),
            Box::new(rewrite_formula(r, from, to)),
        ),
        Formula::Or(l, r) => Formula::Or(
            Box::new(rewrite_formula(l, from, to)),
            Box::new(rewrite_formula(r, from, to)),
        ),
        Formula::Forall(x, g) => Formula::Forall(x.clone(), Box::new(rewrite_formula(g, from, to))),
        Formula::Exists(x, g) => Formula::Exists(x.clone(), Box::new(rewrite_formula(g, from, to))),
        Formula::Tc(b) => Formula::Tc(rewrite_body(b, from, to)),
        Formula::CoTc(b) => Formula::CoTc(rewrite_body(b, from, to)),
    }
}

fn rewrite_body(b: &crate::syntax::TcBody, from: &Term, to: &Term) -> crate::syntax::TcBody {
    crate::syntax::TcBody {
        x: b.x.clone(),
        y: b.y.clone(),
        body: Box::new(rewrite_formula(&b.body, from, to)),
        from: b.from.replace_term(from, to),
        to: b.to.replace_term(from, to),
    }
}

/// Single-premise rules that rewrite the principal cedent: context +
/// Γ-part + supplied auxiliary formulas, optionally extending the annotation.
fn one_cedent_premise(
    h: &Hypersequent,
    r: &RuleInstance,
    p: Principal<'_>,
    mut aux_fmls: Vec<ProtoFml>,
    new_ann: Option<Vec<String>>,
) -> Result<Applied, StepError> {
    for a in &mut aux_fmls {
        for s in &mut a.sources {
            s.src_ced = p.ci;
            s.src_fml = p.fi;
        }
    }
    let retain = if r.retain_cedent { vec![p.ci] } else { vec![] };
    let mut protos = context(h, &[p.ci], &retain);
    let mut fmls = gamma_protos(p.cedent, p.ci, p.fi, r.retain);
    fmls.extend(aux_fmls);
    protos.push(ProtoCedent {
        fmls,
        ann: new_ann.unwrap_or_else(|| p.cedent.ann.clone()),
        sources: vec![p.ci],
    });
    let (prem, edges) = build_hyper(0, protos);
    Ok(Applied {
        premises: vec![Label::Hyper(prem)],
        edges,
    })
}

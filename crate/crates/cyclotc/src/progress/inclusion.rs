//! Inclusion of a finite graph's branch language in a Büchi automaton's
//! language, by composing transition profiles along stems and cycles and
//! testing each stem/cycle pair for an accepting run on the induced lasso.
//! Rejecting pairs are exact counterexamples; antichain pruning keeps only
//! subset-minimal stems and pointwise-minimal cycle profiles, which preserves
//! every rejection.

use std::collections::BTreeMap;

use super::buchi::{Bits, Buchi, Profile};
use super::ProgressError;

/// The left-hand side: all infinite edge-paths of a finite rooted graph.
/// Letters are edge indices; `edges[i] = (from, to)`.
pub struct BranchGraph {
    pub root: usize,
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BranchGraph {
    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_nodes];
        for (i, (from, _)) in self.edges.iter().enumerate() {
            out[*from].push(i);
        }
        out
    }

    /// The safety automaton of all infinite branches (every state accepting).
    pub fn to_buchi(&self) -> Buchi {
        let mut delta = vec![BTreeMap::new(); self.num_nodes];
        for (i, (from, to)) in self.edges.iter().enumerate() {
            delta[*from].insert(i, vec![*to]);
        }
        Buchi {
            num_letters: self.edges.len(),
            init: vec![self.root],
            accepting: vec![true; self.num_nodes],
            delta,
            labels: (0..self.num_nodes).map(|q| format!("n{q}")).collect(),
        }
    }
}

/// Outcome of the inclusion check: either every branch is accepted by the
/// automaton, or a rejected lasso (as edge sequences).
pub enum Inclusion {
    Holds,
    Fails { stem: Vec<usize>, cycle: Vec<usize> },
}

/// Does every infinite branch of `g` lie in `L(b)`?
pub fn branch_inclusion(
    g: &BranchGraph,
    b: &Buchi,
    budget: usize,
) -> Result<Inclusion, ProgressError> {
    let nb = b.states();
    let out = g.out_edges();
    let letter_profiles: Vec<Profile> = (0..g.edges.len()).map(|l| b.letter_profile(l)).collect();

    // Stems: per graph node, antichain of subset-minimal reachable state
    // sets, with witness edge paths.
    let mut stems: Vec<Vec<(Bits, Vec<usize>)>> = vec![Vec::new(); g.num_nodes];
    let mut init_set = Bits::new(nb);
    for &q in &b.init {
        init_set.set(q);
    }
    let mut queue: Vec<(usize, Bits, Vec<usize>)> = vec![(g.root, init_set, Vec::new())];
    let mut work = 0usize;
    while let Some((node, set, path)) = queue.pop() {
        work += 1;
        if work > budget {
            return Err(ProgressError::ResourceCap(format!(
                "inclusion stem search exceeded budget {budget}"
            )));
        }
        if stems[node].iter().any(|(s, _)| s.subset_of(&set)) {
            continue;
        }
        stems[node].retain(|(s, _)| !set.subset_of(s));
        stems[node].push((set.clone(), path.clone()));
        for &e in &out[node] {
            let mut next = Bits::new(nb);
            for q in set.iter() {
                for &q2 in b.successors(q, e) {
                    next.set(q2);
                }
            }
            let mut p2 = path.clone();
            p2.push(e);
            queue.push((g.edges[e].1, next, p2));
        }
    }

    // Cycle profiles: antichain of pointwise-minimal profiles per (start,
    // current) node pair, extended edge by edge. Each completed cycle is
    // tested against every stem at its start node.
    let mut cycles: BTreeMap<(usize, usize), Vec<(Profile, Vec<usize>)>> = BTreeMap::new();
    let mut queue: Vec<(usize, usize, Profile, Vec<usize>)> = Vec::new();
    for (e, (from, to)) in g.edges.iter().enumerate() {
        if stems[*from].is_empty() {
            continue; // unreachable
        }
        queue.push((*from, *to, letter_profiles[e].clone(), vec![e]));
    }
    while let Some((start, cur, prof, path)) = queue.pop() {
        work += 1;
        if work > budget {
            return Err(ProgressError::ResourceCap(format!(
                "inclusion cycle search exceeded budget {budget}"
            )));
        }
        let entry = cycles.entry((start, cur)).or_default();
        if entry.iter().any(|(p, _)| p.le(&prof)) {
            continue;
        }
        entry.retain(|(p, _)| !prof.le(p));
        entry.push((prof.clone(), path.clone()));
        if cur == start {
            for (set, stem_path) in &stems[start] {
                if !lasso_accepted(set, &prof) {
                    return Ok(Inclusion::Fails {
                        stem: stem_path.clone(),
                        cycle: path.clone(),
                    });
                }
            }
        }
        for &e in &out[cur] {
            let next = prof.compose(&letter_profiles[e]);
            let mut p2 = path.clone();
            p2.push(e);
            queue.push((start, g.edges[e].1, next, p2));
        }
    }
    Ok(Inclusion::Holds)
}

/// Is there an accepting run on `u v^ω` where the automaton reaches `set`
/// after `u` and `m` is the profile of `v`?
fn lasso_accepted(set: &Bits, m: &Profile) -> bool {
    let n = m.reach.len();
    let t = m.plus_closure();
    for q in 0..n {
        if !t.reach[q].get(q) || !t.acc[q].get(q) {
            continue;
        }
        if set.get(q) {
            return true;
        }
        for p in set.iter() {
            if t.reach[p].get(q) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    fn random_graph(rng: &mut impl Rng, nodes: usize) -> BranchGraph {
        let mut edges = Vec::new();
        for from in 0..nodes {
            let degree = rng.gen_range(1..=2);
            for _ in 0..degree {
                edges.push((from, rng.gen_range(0..nodes)));
            }
        }
        BranchGraph {
            root: 0,
            num_nodes: nodes,
            edges,
        }
    }

    fn random_nba_over(rng: &mut impl Rng, states: usize, letters: usize) -> Buchi {
        let mut delta = vec![BTreeMap::new(); states];
        for d in delta.iter_mut() {
            let dd: &mut BTreeMap<usize, Vec<usize>> = d;
            for l in 0..letters {
                let mut succs = Vec::new();
                for t in 0..states {
                    if rng.gen_bool(0.5) {
                        succs.push(t);
                    }
                }
                if !succs.is_empty() {
                    dd.insert(l, succs);
                }
            }
        }
        Buchi {
            num_letters: letters,
            init: vec![0],
            accepting: (0..states).map(|_| rng.gen_bool(0.5)).collect(),
            delta,
            labels: (0..states).map(|q| format!("q{q}")).collect(),
        }
    }

    /// Cross-validated against the complementation pipeline: inclusion holds
    /// iff branch ∩ complement(B) is empty.
    #[test]
    fn inclusion_agrees_with_complement_pipeline() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for round in 0..40 {
            let g = random_graph(&mut rng, 3);
            let b = random_nba_over(&mut rng, 3, g.edges.len());
            let incl = branch_inclusion(&g, &b, 1_000_000).unwrap();
            let comp = b.complement(1_000_000).unwrap();
            let branch = g.to_buchi();
            let product = intersect(&branch, &comp);
            let pipeline_fails = product.find_accepting_lasso().is_some();
            match incl {
                Inclusion::Holds => assert!(!pipeline_fails, "round {round}: pipeline disagrees"),
                Inclusion::Fails { stem, cycle } => {
                    assert!(pipeline_fails, "round {round}: pipeline disagrees");
                    // the counterexample really is a rejected branch
                    assert!(!b.lasso_member(&stem, &cycle), "round {round}");
                    assert!(branch.lasso_member(&stem, &cycle), "round {round}");
                }
            }
        }
    }

    /// Büchi product automaton. The phase advances on the *current* state's
    /// acceptance: phase 0 waits for an accepting A-state, phase 1 for an
    /// accepting B-state; phase-1 states at accepting B-states are marked.
    pub(crate) fn intersect(a: &Buchi, b: &Buchi) -> Buchi {
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
                        let sa = a.successors(qa, l);
                        let sb = b.successors(qb, l);
                        let mut succs = Vec::new();
                        for &x in sa {
                            for &y in sb {
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
}

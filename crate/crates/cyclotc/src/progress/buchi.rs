//! Nondeterministic Büchi automata over small alphabets: membership of
//! ultimately periodic words, emptiness with witness extraction, and
//! rank-based complementation under a state budget.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::ProgressError;

/// Dense bitset sized at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new(n: usize) -> Bits {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn or_with(&mut self, other: &Bits) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn subset_of(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            (0..64).filter_map(move |b| {
                if w & (1 << b) != 0 {
                    Some(wi * 64 + b)
                } else {
                    None
                }
            })
        })
    }
}

/// A Büchi automaton over letters `0..num_letters`.
#[derive(Debug, Clone)]
pub struct Buchi {
    pub num_letters: usize,
    pub init: Vec<usize>,
    pub accepting: Vec<bool>,
    /// delta[state][letter] = successors
    pub delta: Vec<BTreeMap<usize, Vec<usize>>>,
    /// Human-readable state labels for dumps.
    pub labels: Vec<String>,
}

impl Buchi {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn successors(&self, q: usize, letter: usize) -> &[usize] {
        self.delta[q].get(&letter).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Transition profile of a single letter: reachability plus an
    /// "accepting state visited" bit (counting the *target* state).
    pub fn letter_profile(&self, letter: usize) -> Profile {
        let n = self.states();
        let mut p = Profile::empty(n);
        for q in 0..n {
            for &q2 in self.successors(q, letter) {
                p.reach[q].set(q2);
                if self.accepting[q2] || self.accepting[q] {
                    p.acc[q].set(q2);
                }
            }
        }
        p
    }

    pub fn word_profile(&self, word: &[usize]) -> Profile {
        let n = self.states();
        let mut p = Profile::identity(n, &self.accepting);
        for &l in word {
            p = p.compose(&self.letter_profile(l));
        }
        p
    }

    /// Does the automaton accept `stem · cycle^ω`?
    pub fn lasso_member(&self, stem: &[usize], cycle: &[usize]) -> bool {
        assert!(!cycle.is_empty());
        let n = self.states();
        let mut reached = Bits::new(n);
        for &q in &self.init {
            reached.set(q);
        }
        for &l in stem {
            let mut next = Bits::new(n);
            for q in reached.iter() {
                for &q2 in self.successors(q, l) {
                    next.set(q2);
                }
            }
            reached = next;
        }
        let m = self.word_profile(cycle);
        let t = m.plus_closure();
        // accept iff some state reachable from `reached` under t (or in it)
        // lies on a t-cycle through an accepting visit
        for q in 0..n {
            if !t.reach[q].get(q) || !t.acc[q].get(q) {
                continue;
            }
            if reached.get(q) {
                return true;
            }
            for p in reached.iter() {
                if t.reach[p].get(q) {
                    return true;
                }
            }
        }
        false
    }

    /// Is the language empty? Returns an accepting lasso as counter-evidence
    /// when nonempty.
    pub fn find_accepting_lasso(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        // BFS parents for stems, then per accepting state a cycle search.
        let n = self.states();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &q in &self.init {
            if !seen[q] {
                seen[q] = true;
                queue.push_back(q);
            }
        }
        let mut order = Vec::new();
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for (&l, succs) in &self.delta[q] {
                for &q2 in succs {
                    if !seen[q2] {
                        seen[q2] = true;
                        parent[q2] = Some((q, l));
                        queue.push_back(q2);
                    }
                }
            }
        }
        for &acc in &order {
            if !self.accepting[acc] {
                continue;
            }
            // cycle: path from acc back to acc
            let mut cparent: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut cseen = vec![false; n];
            let mut cqueue = VecDeque::from([acc]);
            cseen[acc] = true;
            let mut found = false;
            'bfs: while let Some(q) = cqueue.pop_front() {
                for (&l, succs) in &self.delta[q] {
                    for &q2 in succs {
                        if q2 == acc {
                            cparent[acc] = Some((q, l));
                            found = true;
                            break 'bfs;
                        }
                        if !cseen[q2] {
                            cseen[q2] = true;
                            cparent[q2] = Some((q, l));
                            cqueue.push_back(q2);
                        }
                    }
                }
            }
            if !found {
                continue;
            }
            let mut cycle = Vec::new();
            let (mut at, l) = cparent[acc].unwrap();
            cycle.push(l);
            while at != acc {
                let (prev, l) = cparent[at].unwrap();
                cycle.push(l);
                at = prev;
            }
            cycle.reverse();
            let mut stem = Vec::new();
            let mut at = acc;
            while let Some((prev, l)) = parent[at] {
                stem.push(l);
                at = prev;
            }
            stem.reverse();
            return Some((stem, cycle));
        }
        None
    }

    /// Rank-based complementation: a subset phase followed by a
    /// nondeterministic jump into tight level rankings with the breakpoint
    /// set. Exploration is lazy and fails with a resource error beyond
    /// `budget` states.
    pub fn complement(&self, budget: usize) -> Result<Buchi, ProgressError> {
        let n = self.states();
        let max_rank = (2 * n).saturating_sub(1) as u32;
        #[derive(Clone, PartialEq, Eq, Hash)]
        enum CState {
            Waiting(Vec<bool>),
            Ranked(Vec<Option<u32>>, Vec<bool>),
        }
        let mut ids: HashMap<CState, usize> = HashMap::new();
        let mut states: Vec<CState> = Vec::new();
        let mut delta: Vec<BTreeMap<usize, Vec<usize>>> = Vec::new();
        fn intern(
            s: CState,
            states: &mut Vec<CState>,
            delta: &mut Vec<BTreeMap<usize, Vec<usize>>>,
            ids: &mut HashMap<CState, usize>,
        ) -> (usize, bool) {
            if let Some(&id) = ids.get(&s) {
                return (id, false);
            }
            let id = states.len();
            ids.insert(s.clone(), id);
            states.push(s);
            delta.push(BTreeMap::new());
            (id, true)
        }
        // A ranking is tight when its maximum is odd and every odd rank up
        // to the maximum occurs; the empty ranking is tight.
        let is_tight = |f: &[Option<u32>]| -> bool {
            let max = f.iter().flatten().copied().max();
            match max {
                None => true,
                Some(m) => {
                    if m % 2 == 0 {
                        return false;
                    }
                    (0..=m)
                        .filter(|r| r % 2 == 1)
                        .all(|r| f.iter().flatten().any(|&v| v == r))
                }
            }
        };
        // All tight rankings over `dom` with per-state upper bounds.
        let enumerate_rankings = |dom: &[usize],
                                  bound: &dyn Fn(usize) -> u32|
         -> Vec<Vec<Option<u32>>> {
            let mut rankings: Vec<Vec<Option<u32>>> = vec![vec![None; n]];
            for &q in dom {
                let b = bound(q);
                let mut next = Vec::new();
                for r in &rankings {
                    for v in 0..=b {
                        if self.accepting[q] && v % 2 == 1 {
                            continue;
                        }
                        let mut r2 = r.clone();
                        r2[q] = Some(v);
                        next.push(r2);
                    }
                }
                rankings = next;
            }
            rankings.retain(|f| is_tight(f));
            rankings
        };
        let mut init_set = vec![false; n];
        for &q in &self.init {
            init_set[q] = true;
        }
        let (init_state, _) = intern(
            CState::Waiting(init_set),
            &mut states,
            &mut delta,
            &mut ids,
        );
        let mut queue = VecDeque::from([init_state]);
        while let Some(sid) = queue.pop_front() {
            if states.len() > budget {
                return Err(ProgressError::ResourceCap(format!(
                    "complementation exceeded state budget {budget}"
                )));
            }
            let state = states[sid].clone();
            for letter in 0..self.num_letters {
                let mut targets: Vec<CState> = Vec::new();
                match &state {
                    CState::Waiting(s) => {
                        let mut s2 = vec![false; n];
                        for (q, &on) in s.iter().enumerate() {
                            if on {
                                for &q2 in self.successors(q, letter) {
                                    s2[q2] = true;
                                }
                            }
                        }
                        let dom: Vec<usize> =
                            (0..n).filter(|&q| s2[q]).collect();
                        // stay in the subset phase, or jump into rankings
                        for f2 in enumerate_rankings(&dom, &|_| max_rank) {
                            targets.push(CState::Ranked(f2, vec![false; n]));
                        }
                        targets.push(CState::Waiting(s2));
                    }
                    CState::Ranked(f, o) => {
                        let mut bound: Vec<Option<u32>> = vec![None; n];
                        for q in 0..n {
                            if let Some(rq) = f[q] {
                                for &q2 in self.successors(q, letter) {
                                    bound[q2] = Some(match bound[q2] {
                                        Some(b) => b.min(rq),
                                        None => rq,
                                    });
                                }
                            }
                        }
                        let dom: Vec<usize> = (0..n).filter(|&q| bound[q].is_some()).collect();
                        let o_empty = o.iter().all(|b| !b);
                        let mut osucc = vec![false; n];
                        if !o_empty {
                            for q in 0..n {
                                if o[q] {
                                    for &q2 in self.successors(q, letter) {
                                        osucc[q2] = true;
                                    }
                                }
                            }
                        }
                        for f2 in enumerate_rankings(&dom, &|q| bound[q].unwrap()) {
                            let mut o2 = vec![false; n];
                            for &q in &dom {
                                let even = f2[q].unwrap() % 2 == 0;
                                if even && (o_empty || osucc[q]) {
                                    o2[q] = true;
                                }
                            }
                            targets.push(CState::Ranked(f2, o2));
                        }
                    }
                }
                for t in targets {
                    let (tid, is_new) = intern(t, &mut states, &mut delta, &mut ids);
                    if is_new {
                        queue.push_back(tid);
                    }
                    let entry = delta[sid].entry(letter).or_default();
                    if !entry.contains(&tid) {
                        entry.push(tid);
                    }
                    if states.len() > budget {
                        return Err(ProgressError::ResourceCap(format!(
                            "complementation exceeded state budget {budget}"
                        )));
                    }
                }
            }
        }
        let accepting: Vec<bool> = states
            .iter()
            .map(|s| match s {
                CState::Waiting(_) => false,
                CState::Ranked(_, o) => o.iter().all(|b| !b),
            })
            .collect();
        let labels = states
            .iter()
            .map(|s| match s {
                CState::Waiting(set) => {
                    let members: Vec<String> = set
                        .iter()
                        .enumerate()
                        .filter_map(|(q, &b)| if b { Some(q.to_string()) } else { None })
                        .collect();
                    format!("S={{{}}}", members.join(","))
                }
                CState::Ranked(f, o) => {
                    let ranks: Vec<String> = f
                        .iter()
                        .enumerate()
                        .filter_map(|(q, r)| r.map(|r| format!("{q}:{r}")))
                        .collect();
                    let owing: Vec<String> = o
                        .iter()
                        .enumerate()
                        .filter_map(|(q, &b)| if b { Some(q.to_string()) } else { None })
                        .collect();
                    format!("[{}] O={{{}}}", ranks.join(","), owing.join(","))
                }
            })
            .collect();
        Ok(Buchi {
            num_letters: self.num_letters,
            init: vec![init_state],
            accepting,
            delta,
            labels,
        }
        .trimmed())
    }

    /// Restriction to states both reachable from the initial set and able to
    /// reach an accepting cycle; language-preserving.
    pub fn trimmed(&self) -> Buchi {
        let n = self.states();
        let mut reach = vec![false; n];
        let mut stack = self.init.clone();
        while let Some(q) = stack.pop() {
            if reach[q] {
                continue;
            }
            reach[q] = true;
            for succs in self.delta[q].values() {
                for &q2 in succs {
                    if !reach[q2] {
                        stack.push(q2);
                    }
                }
            }
        }
        // states that can reach an accepting state lying on a cycle
        let mut live_acc = vec![false; n];
        for q in 0..n {
            if !reach[q] || !self.accepting[q] {
                continue;
            }
            // cycle through q?
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = self.delta[q].values().flatten().copied().collect();
            let mut on_cycle = false;
            while let Some(v) = stack.pop() {
                if v == q {
                    on_cycle = true;
                    break;
                }
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                for succs in self.delta[v].values() {
                    for &w in succs {
                        stack.push(w);
                    }
                }
            }
            if on_cycle {
                live_acc[q] = true;
            }
        }
        // co-reachability to a live accepting state
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for succs in self.delta[q].values() {
                for &q2 in succs {
                    rev[q2].push(q);
                }
            }
        }
        let mut live = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| live_acc[q]).collect();
        while let Some(q) = stack.pop() {
            if live[q] {
                continue;
            }
            live[q] = true;
            for &p in &rev[q] {
                if !live[p] {
                    stack.push(p);
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&q| reach[q] && live[q]).collect();
        if keep.is_empty() {
            // empty language: a single dead state keeps the type well-formed
            return Buchi {
                num_letters: self.num_letters,
                init: vec![0],
                accepting: vec![false],
                delta: vec![BTreeMap::new()],
                labels: vec!["dead".into()],
            };
        }
        let mut remap = vec![usize::MAX; n];
        for (i, &q) in keep.iter().enumerate() {
            remap[q] = i;
        }
        let delta = keep
            .iter()
            .map(|&q| {
                self.delta[q]
                    .iter()
                    .filter_map(|(&l, succs)| {
                        let v: Vec<usize> = succs
                            .iter()
                            .filter(|&&q2| remap[q2] != usize::MAX)
                            .map(|&q2| remap[q2])
                            .collect();
                        if v.is_empty() {
                            None
                        } else {
                            Some((l, v))
                        }
                    })
                    .collect()
            })
            .collect();
        Buchi {
            num_letters: self.num_letters,
            init: self
                .init
                .iter()
                .filter(|&&q| remap[q] != usize::MAX)
                .map(|&q| remap[q])
                .collect(),
            accepting: keep.iter().map(|&q| self.accepting[q]).collect(),
            delta,
            labels: keep.iter().map(|&q| self.labels[q].clone()).collect(),
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=LR;\n");
        for (q, label) in self.labels.iter().enumerate() {
            let shape = if self.accepting[q] {
                "doublecircle"
            } else {
                "circle"
            };
            let init = if self.init.contains(&q) { ", color=blue" } else { "" };
            out.push_str(&format!(
                "  q{q} [shape={shape}{init}, label=\"{}\"];\n",
                label.replace('"', "'")
            ));
        }
        for (q, edges) in self.delta.iter().enumerate() {
            for (l, succs) in edges {
                for s in succs {
                    out.push_str(&format!("  q{q} -> q{s} [label=\"{l}\"];\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Word profile: reachability matrix with an accepting-visit bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub reach: Vec<Bits>,
    pub acc: Vec<Bits>,
}

impl Profile {
    pub fn empty(n: usize) -> Profile {
        Profile {
            reach: vec![Bits::new(n); n],
            acc: vec![Bits::new(n); n],
        }
    }

    pub fn identity(n: usize, accepting: &[bool]) -> Profile {
        let mut p = Profile::empty(n);
        for q in 0..n {
            p.reach[q].set(q);
            if accepting[q] {
                p.acc[q].set(q);
            }
        }
        p
    }

    pub fn compose(&self, other: &Profile) -> Profile {
        let n = self.reach.len();
        let mut out = Profile::empty(n);
        for q in 0..n {
            for s in self.reach[q].iter() {
                out.reach[q].or_with(&other.reach[s]);
                out.acc[q].or_with(&other.acc[s]);
            }
            for s in self.acc[q].iter() {
                out.acc[q].or_with(&other.reach[s]);
            }
        }
        out
    }

    /// Transitive closure (one or more steps).
    pub fn plus_closure(&self) -> Profile {
        let mut acc = self.clone();
        loop {
            let next = compose_union(&acc, self);
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }

    /// Pointwise ≤ in the 3-valued order none < reach < reach-with-acc.
    pub fn le(&self, other: &Profile) -> bool {
        self.reach
            .iter()
            .zip(&other.reach)
            .all(|(a, b)| a.subset_of(b))
            && self.acc.iter().zip(&other.acc).all(|(a, b)| a.subset_of(b))
    }
}

fn compose_union(acc: &Profile, step: &Profile) -> Profile {
    let ext = acc.compose(step);
    let n = acc.reach.len();
    let mut out = acc.clone();
    for q in 0..n {
        out.reach[q].or_with(&ext.reach[q]);
        out.acc[q].or_with(&ext.acc[q]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    pub(crate) fn random_nba(rng: &mut impl Rng, states: usize, letters: usize) -> Buchi {
        let mut delta = vec![BTreeMap::new(); states];
        for (_, d) in (0..states).zip(delta.iter_mut()) {
            let dd: &mut BTreeMap<usize, Vec<usize>> = d;
            for l in 0..letters {
                let mut succs = Vec::new();
                for t in 0..states {
                    if rng.gen_bool(0.35) {
                        succs.push(t);
                    }
                }
                if !succs.is_empty() {
                    dd.insert(l, succs);
                }
            }
        }
        let accepting: Vec<bool> = (0..states).map(|_| rng.gen_bool(0.4)).collect();
        Buchi {
            num_letters: letters,
            init: vec![0],
            accepting,
            delta,
            labels: (0..states).map(|q| format!("q{q}")).collect(),
        }
    }

    fn random_lasso(rng: &mut impl Rng, letters: usize, max: usize) -> (Vec<usize>, Vec<usize>) {
        let sl = rng.gen_range(0..=max);
        let cl = rng.gen_range(1..=max);
        (
            (0..sl).map(|_| rng.gen_range(0..letters)).collect(),
            (0..cl).map(|_| rng.gen_range(0..letters)).collect(),
        )
    }

    /// Oracle for lasso membership: an accepting run on `uv^ω` exists iff in
    /// the graph over (cycle position, state) some accepting node lies on a
    /// cycle reachable from the states reached after the stem.
    fn member_oracle(b: &Buchi, stem: &[usize], cycle: &[usize]) -> bool {
        let n = b.states();
        let c = cycle.len();
        let mut cur: Vec<bool> = vec![false; n];
        for &q in &b.init {
            cur[q] = true;
        }
        for &l in stem {
            let mut next = vec![false; n];
            for (q, &on) in cur.iter().enumerate() {
                if on {
                    for &q2 in b.successors(q, l) {
                        next[q2] = true;
                    }
                }
            }
            cur = next;
        }
        let node = |pos: usize, q: usize| pos * n + q;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); c * n];
        for pos in 0..c {
            for q in 0..n {
                for &q2 in b.successors(q, cycle[pos]) {
                    adj[node(pos, q)].push(node((pos + 1) % c, q2));
                }
            }
        }
        // reachability from the start set
        let mut reach = vec![false; c * n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| cur[q]).map(|q| node(0, q)).collect();
        while let Some(v) = stack.pop() {
            if reach[v] {
                continue;
            }
            reach[v] = true;
            for &w in &adj[v] {
                if !reach[w] {
                    stack.push(w);
                }
            }
        }
        // accepting node on a cycle?
        for v in 0..c * n {
            if !reach[v] || !b.accepting[v % n] {
                continue;
            }
            let mut seen = vec![false; c * n];
            let mut stack = adj[v].clone();
            while let Some(w) = stack.pop() {
                if w == v {
                    return true;
                }
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                for &x in &adj[w] {
                    stack.push(x);
                }
            }
        }
        false
    }

    #[test]
    fn lasso_membership_matches_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..150 {
            let b = random_nba(&mut rng, 4, 2);
            for _ in 0..5 {
                let (stem, cycle) = random_lasso(&mut rng, 2, 4);
                assert_eq!(
                    b.lasso_member(&stem, &cycle),
                    member_oracle(&b, &stem, &cycle),
                    "stem={stem:?} cycle={cycle:?}"
                );
            }
        }
    }

    #[test]
    fn complement_of_empty_is_universal() {
        // automaton with no accepting state
        let b = Buchi {
            num_letters: 1,
            init: vec![0],
            accepting: vec![false],
            delta: vec![[(0usize, vec![0usize])].into_iter().collect()],
            labels: vec!["q0".into()],
        };
        let c = b.complement(100_000).unwrap();
        assert!(c.lasso_member(&[], &[0]));
    }

    #[test]
    fn complement_of_universal_is_empty() {
        let b = Buchi {
            num_letters: 1,
            init: vec![0],
            accepting: vec![true],
            delta: vec![[(0usize, vec![0usize])].into_iter().collect()],
            labels: vec!["q0".into()],
        };
        let c = b.complement(100_000).unwrap();
        assert!(!c.lasso_member(&[], &[0]));
        assert!(c.find_accepting_lasso().is_none());
    }

    #[test]
    fn complement_correct_on_random_lassos() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let b = random_nba(&mut rng, 3, 2);
            let c = b.complement(1_000_000).unwrap();
            for _ in 0..6 {
                let (stem, cycle) = random_lasso(&mut rng, 2, 4);
                assert_ne!(
                    b.lasso_member(&stem, &cycle),
                    c.lasso_member(&stem, &cycle),
                    "stem={stem:?} cycle={cycle:?}"
                );
            }
        }
    }

    #[test]
    fn double_complement_preserves_membership() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let b = random_nba(&mut rng, 3, 2);
            let c = b.complement(1_000_000).unwrap();
            let cc = c.complement(4_000_000).unwrap();
            for _ in 0..6 {
                let (stem, cycle) = random_lasso(&mut rng, 2, 3);
                assert_eq!(
                    b.lasso_member(&stem, &cycle),
                    cc.lasso_member(&stem, &cycle),
                    "stem={stem:?} cycle={cycle:?}"
                );
            }
        }
    }
}

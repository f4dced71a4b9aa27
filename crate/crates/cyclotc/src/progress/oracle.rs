//! Bounded cross-validation oracle: enumerate lassos of the proof graph and
//! decide progress on each by definition-chasing over the unrolled lasso,
//! independently of the automata pipeline.

use super::build::{Condition, PGraph};

/// A lasso at the abstract level: edge indices into `PGraph::edges`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

/// Bounded oracle verdict. `Accept` means no non-progressing lasso exists
/// within the bounds, which is not a proof of global progress.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    BoundedAccept,
    Reject(PLasso),
}

pub struct OracleBounds {
    pub max_stem: usize,
    pub max_cycle: usize,
    /// Cycle-power bound for the hypertrace search on each lasso.
    pub max_period: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            max_stem: 6,
            max_cycle: 6,
            max_period: 4,
        }
    }
}

/// Enumerates all lassos within the bounds and checks each for progress.
pub fn lasso_oracle(p: &PGraph, bounds: &OracleBounds) -> OracleVerdict {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); p.num_nodes()];
    for (i, e) in p.edges.iter().enumerate() {
        out[e.from].push(i);
    }
    // DFS over edge paths from the root
    let mut path: Vec<usize> = Vec::new(); // edges
    let mut nodes: Vec<usize> = vec![p.root];
    let mut bad: Option<PLasso> = None;
    dfs(p, bounds, &out, &mut path, &mut nodes, &mut bad);
    match bad {
        Some(l) => OracleVerdict::Reject(l),
        None => OracleVerdict::BoundedAccept,
    }
}

fn dfs(
    p: &PGraph,
    bounds: &OracleBounds,
    out: &[Vec<usize>],
    path: &mut Vec<usize>,
    nodes: &mut Vec<usize>,
    bad: &mut Option<PLasso>,
) {
    if bad.is_some() {
        return;
    }
    let here = *nodes.last().unwrap();
    // close a lasso at every earlier visit of this node
    for (i, &n) in nodes.iter().enumerate().take(nodes.len() - 1) {
        if n == here {
            let stem = path[..i].to_vec();
            let cycle = path[i..].to_vec();
            if stem.len() <= bounds.max_stem
                && !cycle.is_empty()
                && cycle.len() <= bounds.max_cycle
                && !lasso_progressing(p, &stem, &cycle, bounds.max_period)
            {
                *bad = Some(PLasso { stem, cycle });
                return;
            }
        }
    }
    if path.len() >= bounds.max_stem + bounds.max_cycle {
        return;
    }
    for &e in &out[here] {
        path.push(e);
        nodes.push(p.edges[e].to);
        dfs(p, bounds, out, path, nodes, bad);
        path.pop();
        nodes.pop();
    }
}

/// Decides whether the ultimately periodic branch `stem · cycle^ω` is
/// progressing, by direct inspection of the (hyper)trace structure over the
/// unrolled lasso.
pub fn lasso_progressing(p: &PGraph, stem: &[usize], cycle: &[usize], max_period: usize) -> bool {
    match p.condition {
        Condition::SingleTrace => single_trace_progressing(p, cycle),
        Condition::Parity => parity_progressing(p, cycle),
        Condition::HyperTrace => hyper_progressing(p, stem, cycle, max_period),
    }
}

/// A progressing trace exists iff the wrapped trace graph over the cycle has
/// a cycle containing a progress edge (a trace may begin anywhere).
fn single_trace_progressing(p: &PGraph, cycle: &[usize]) -> bool {
    let c = cycle.len();
    // nodes: (pos, ced, fml) flattened; edges run conclusion → premise,
    // i.e. pos → pos+1 (wrapped)
    let mut index = std::collections::BTreeMap::new();
    let mut count = 0usize;
    for (pos, &e) in cycle.iter().enumerate() {
        let node = p.edges[e].from;
        for (ced, &len) in p.shape[node].iter().enumerate() {
            for f in 0..len {
                index.insert((pos, ced, f), count);
                count += 1;
            }
        }
    }
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); count];
    for (pos, &e) in cycle.iter().enumerate() {
        let next = (pos + 1) % c;
        for fe in &p.edges[e].fml {
            if let (Some(&a), Some(&b)) = (
                index.get(&(pos, fe.dst.0, fe.dst.1)),
                index.get(&(next, fe.src.0, fe.src.1)),
            ) {
                adj[a].push((b, fe.progress));
            }
        }
    }
    cycle_with_marked_edge(&adj)
}

/// A progressing thread exists iff for some even priority d, the subgraph of
/// edges with priority ≤ d has a cycle through a priority-d edge.
fn parity_progressing(p: &PGraph, cycle: &[usize]) -> bool {
    let mut evens: Vec<u32> = cycle
        .iter()
        .flat_map(|&e| p.edges[e].fml.iter().map(|f| f.priority))
        .filter(|pr| pr % 2 == 0)
        .collect();
    evens.sort();
    evens.dedup();
    let c = cycle.len();
    let mut index = std::collections::BTreeMap::new();
    let mut count = 0usize;
    for (pos, &e) in cycle.iter().enumerate() {
        let node = p.edges[e].from;
        for (ced, &len) in p.shape[node].iter().enumerate() {
            for f in 0..len {
                index.insert((pos, ced, f), count);
                count += 1;
            }
        }
    }
    for &d in &evens {
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); count];
        for (pos, &e) in cycle.iter().enumerate() {
            let next = (pos + 1) % c;
            for fe in &p.edges[e].fml {
                if fe.priority > d {
                    continue;
                }
                if let (Some(&a), Some(&b)) = (
                    index.get(&(pos, fe.dst.0, fe.dst.1)),
                    index.get(&(next, fe.src.0, fe.src.1)),
                ) {
                    adj[a].push((b, fe.priority == d));
                }
            }
        }
        if cycle_with_marked_edge(&adj) {
            return true;
        }
    }
    false
}

/// Is there a directed cycle containing at least one marked edge?
fn cycle_with_marked_edge(adj: &[Vec<(usize, bool)>]) -> bool {
    let n = adj.len();
    for start in 0..n {
        if !adj[start].iter().any(|&(_, m)| m) {
            continue;
        }
        // search: start --marked--> x --*--> start
        for &(x, m) in &adj[start] {
            if !m {
                continue;
            }
            if x == start {
                return true;
            }
            let mut seen = vec![false; n];
            let mut stack = vec![x];
            while let Some(v) = stack.pop() {
                if v == start {
                    return true;
                }
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                for &(w, _) in &adj[v] {
                    stack.push(w);
                }
            }
        }
    }
    false
}

/// Hypertrace search: enumerate ultimately periodic cedent paths along the
/// lasso (cycle powers up to `max_period`), and check each candidate by the
/// acyclicity criterion: all traces along it progress iff the trace graph
/// over its cycle, minus progress edges, has no directed cycle.
fn hyper_progressing(p: &PGraph, stem: &[usize], cycle: &[usize], max_period: usize) -> bool {
    let s = stem.len();
    let c = cycle.len();
    let edge_at = |i: usize| -> usize {
        if i < s {
            stem[i]
        } else {
            cycle[(i - s) % c]
        }
    };
    // DFS over cedent choices; configs are (wrapped position, cedent) where
    // wrapped position is min(i, s + (i-s) mod c). A repeat of a config at a
    // cycle position closes a candidate hypertrace cycle.
    struct Search<'a> {
        p: &'a PGraph,
        s: usize,
        c: usize,
        max_len: usize,
    }
    impl Search<'_> {
        fn wrapped(&self, i: usize) -> usize {
            if i < self.s {
                i
            } else {
                self.s + (i - self.s) % self.c
            }
        }

        fn go(&self, edge_at: &dyn Fn(usize) -> usize, trail: &mut Vec<(usize, usize)>) -> bool {
            let (i, ced) = *trail.last().unwrap();
            // candidate cycle when the same (wrapped pos, cedent) recurs at a
            // position ≥ stem
            if i >= self.s {
                let w = self.wrapped(i);
                for (j, &(pj, cj)) in trail.iter().enumerate().take(trail.len() - 1) {
                    if pj >= self.s && self.wrapped(pj) == w && cj == ced {
                        if self.check_candidate(edge_at, &trail[j..trail.len() - 1]) {
                            return true;
                        }
                    }
                }
            }
            if trail.len() > self.max_len {
                return false;
            }
            let e = edge_at(i);
            let pe = &self.p.edges[e];
            for &(src_ced, dst_ced) in &pe.ced {
                if dst_ced == ced {
                    trail.push((i + 1, src_ced));
                    if self.go(edge_at, trail) {
                        return true;
                    }
                    trail.pop();
                }
            }
            false
        }

        /// `segment` is one full hypertrace cycle of (position, cedent)
        /// pairs. All traces along its infinite repetition progress iff the
        /// non-progress trace graph over the segment is acyclic.
        fn check_candidate(&self, edge_at: &dyn Fn(usize) -> usize, segment: &[(usize, usize)]) -> bool {
            let len = segment.len();
            let mut count = 0usize;
            let mut index = std::collections::BTreeMap::new();
            for (k, &(pos, ced)) in segment.iter().enumerate() {
                let node = self.p.edges[edge_at(pos)].from;
                for f in 0..self.p.shape[node][ced] {
                    index.insert((k, f), count);
                    count += 1;
                }
            }
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); count];
            for (k, &(pos, ced)) in segment.iter().enumerate() {
                let next_k = (k + 1) % len;
                let next_ced = segment[next_k].1;
                let e = edge_at(pos);
                for fe in &self.p.edges[e].fml {
                    if fe.progress {
                        continue;
                    }
                    if fe.dst.0 == ced && fe.src.0 == next_ced {
                        if let (Some(&a), Some(&b)) =
                            (index.get(&(k, fe.dst.1)), index.get(&(next_k, fe.src.1)))
                        {
                            adj[a].push(b);
                        }
                    }
                }
            }
            acyclic(&adj)
        }
    }
    let search = Search {
        p,
        s,
        c,
        max_len: s + c * max_period + 1,
    };
    for root_ced in 0..p.shape[p.edges[edge_at(0)].from].len() {
        let mut trail = vec![(0usize, root_ced)];
        if search.go(&edge_at, &mut trail) {
            return true;
        }
    }
    false
}

fn acyclic(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
    fn visit(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &adj[v] {
            match state[w] {
                0 => {
                    if !visit(w, adj, state) {
                        return false;
                    }
                }
                1 => return false,
                _ => {}
            }
        }
        state[v] = 2;
        true
    }
    for v in 0..n {
        if state[v] == 0 && !visit(v, adj, &mut state) {
            return false;
        }
    }
    true
}

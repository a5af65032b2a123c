//! Exact integer max-flow / min-cut, lower-bounded circulations and cycle decomposition.
//!
//! Every capacity is an `i64`. An infinite upper bound is stored as [`Cap::Inf`] and resolved to
//! `1 + Σ(all finite uppers and lowers)` when a flow is computed, so arithmetic stays bounded and
//! integral. A cut whose capacity reaches that value therefore crosses an infinite arc.

use std::collections::VecDeque;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("node {node} out of range (network has {nodes} nodes)")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("arc {arc}: lower bound {lower} exceeds upper bound {upper}")]
    BadBounds { arc: usize, lower: i64, upper: i64 },
    #[error("negative bound on arc {0}")]
    NegativeBound(usize),
    #[error("max-flow requires zero lower bounds (arc {0} has a positive lower bound)")]
    LowerBoundPresent(usize),
    #[error("source equals sink")]
    SourceIsSink,
    #[error("no feasible circulation exists")]
    Infeasible,
    #[error("not a circulation: conservation fails at node {0}")]
    NotCirculation(usize),
    #[error("flow vector has {got} entries, network has {expected} arcs")]
    LengthMismatch { expected: usize, got: usize },
}

/// Upper capacity of an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cap {
    Finite(i64),
    Inf,
}

impl Cap {
    pub fn is_inf(self) -> bool {
        matches!(self, Cap::Inf)
    }
}

impl From<i64> for Cap {
    fn from(v: i64) -> Self {
        Cap::Finite(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub lower: i64,
    pub upper: Cap,
}

/// Directed multigraph with integer lower/upper bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DirectedNetwork {
    nodes: usize,
    arcs: Vec<Arc>,
    pub source: Option<usize>,
    pub sink: Option<usize>,
}

/// Result of a maximum-flow computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: i64,
    /// Flow on every arc, in insertion order.
    pub flow: Vec<i64>,
    /// Residual-reachable set from the source: the unique inclusion-minimal minimum cut.
    pub source_side: Vec<bool>,
}

impl FlowResult {
    pub fn cut_nodes(&self) -> Vec<usize> {
        (0..self.source_side.len())
            .filter(|&v| self.source_side[v])
            .collect()
    }
}

/// A directed cycle of a circulation decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// Closed node sequence; the first node is repeated at the end.
    pub nodes: Vec<usize>,
    /// Arcs traversed, `arcs[i]` goes from `nodes[i]` to `nodes[i + 1]`.
    pub arcs: Vec<usize>,
    pub coefficient: i64,
}

impl DirectedNetwork {
    pub fn new(nodes: usize) -> Self {
        DirectedNetwork {
            nodes,
            ..Default::default()
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, e: usize) -> &Arc {
        &self.arcs[e]
    }

    pub fn add_node(&mut self) -> usize {
        self.nodes += 1;
        self.nodes - 1
    }

    pub fn add_arc(
        &mut self,
        tail: usize,
        head: usize,
        lower: i64,
        upper: impl Into<Cap>,
    ) -> Result<usize, FlowError> {
        let upper = upper.into();
        for v in [tail, head] {
            if v >= self.nodes {
                return Err(FlowError::NodeOutOfRange {
                    node: v,
                    nodes: self.nodes,
                });
            }
        }
        if tail == head {
            return Err(FlowError::SelfLoop(tail));
        }
        let id = self.arcs.len();
        if lower < 0 {
            return Err(FlowError::NegativeBound(id));
        }
        if let Cap::Finite(u) = upper {
            if u < 0 {
                return Err(FlowError::NegativeBound(id));
            }
            if lower > u {
                return Err(FlowError::BadBounds {
                    arc: id,
                    lower,
                    upper: u,
                });
            }
        }
        self.arcs.push(Arc {
            tail,
            head,
            lower,
            upper,
        });
        Ok(id)
    }

    /// Sets both bounds of an existing arc.
    pub fn set_bounds(&mut self, e: usize, lower: i64, upper: impl Into<Cap>) -> Result<(), FlowError> {
        let upper = upper.into();
        if lower < 0 {
            return Err(FlowError::NegativeBound(e));
        }
        if let Cap::Finite(u) = upper {
            if lower > u {
                return Err(FlowError::BadBounds { arc: e, lower, upper: u });
            }
        }
        self.arcs[e].lower = lower;
        self.arcs[e].upper = upper;
        Ok(())
    }

    /// Integer standing in for an infinite capacity.
    pub fn inf_value(&self) -> i64 {
        1 + self
            .arcs
            .iter()
            .map(|a| {
                a.lower
                    + match a.upper {
                        Cap::Finite(u) => u,
                        Cap::Inf => 0,
                    }
            })
            .sum::<i64>()
    }

    pub fn resolved_upper(&self, e: usize) -> i64 {
        match self.arcs[e].upper {
            Cap::Finite(u) => u,
            Cap::Inf => self.inf_value(),
        }
    }

    /// Capacity `Σ upper(e)` over arcs leaving `side` (infinite arcs count as [`Self::inf_value`]).
    pub fn cut_capacity(&self, side: &[bool]) -> i64 {
        let inf = self.inf_value();
        self.arcs
            .iter()
            .filter(|a| side[a.tail] && !side[a.head])
            .map(|a| match a.upper {
                Cap::Finite(u) => u,
                Cap::Inf => inf,
            })
            .sum()
    }

    /// Maximum `(s, t)`-flow by Dinic's algorithm. Requires all lower bounds to be zero.
    pub fn max_flow(&self, s: usize, t: usize) -> Result<FlowResult, FlowError> {
        for v in [s, t] {
            if v >= self.nodes {
                return Err(FlowError::NodeOutOfRange {
                    node: v,
                    nodes: self.nodes,
                });
            }
        }
        if s == t {
            return Err(FlowError::SourceIsSink);
        }
        if let Some(e) = self.arcs.iter().position(|a| a.lower != 0) {
            return Err(FlowError::LowerBoundPresent(e));
        }
        let inf = self.inf_value();
        let mut dinic = Dinic::new(self.nodes);
        let handles: Vec<usize> = self
            .arcs
            .iter()
            .map(|a| {
                let cap = match a.upper {
                    Cap::Finite(u) => u,
                    Cap::Inf => inf,
                };
                dinic.add_edge(a.tail, a.head, cap)
            })
            .collect();
        let value = dinic.run(s, t);
        let flow = handles.iter().map(|&h| dinic.flow_on(h)).collect();
        let source_side = dinic.reachable(s);
        Ok(FlowResult {
            value,
            flow,
            source_side,
        })
    }

    /// The unique inclusion-minimal minimum `(s, t)`-cut, as a node set.
    pub fn minimal_min_cut(&self, s: usize, t: usize) -> Result<Vec<usize>, FlowError> {
        Ok(self.max_flow(s, t)?.cut_nodes())
    }

    /// Finds an integral circulation within the bounds, or reports [`FlowError::Infeasible`].
    ///
    /// Lower bounds are moved into node excesses that a super source/sink pair must saturate.
    pub fn feasible_circulation(&self) -> Result<Vec<i64>, FlowError> {
        let n = self.nodes;
        let mut excess = vec![0i64; n];
        let mut reduced = DirectedNetwork::new(n + 2);
        let (ss, tt) = (n, n + 1);
        let mut handles = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            excess[a.head] += a.lower;
            excess[a.tail] -= a.lower;
            let rest = match a.upper {
                Cap::Finite(u) => Cap::Finite(u - a.lower),
                Cap::Inf => Cap::Inf,
            };
            handles.push(reduced.add_arc(a.tail, a.head, 0, rest)?);
        }
        let mut demand = 0;
        for (v, &ex) in excess.iter().enumerate() {
            if ex > 0 {
                reduced.add_arc(ss, v, 0, ex)?;
                demand += ex;
            } else if ex < 0 {
                reduced.add_arc(v, tt, 0, -ex)?;
            }
        }
        let res = reduced.max_flow(ss, tt)?;
        if res.value != demand {
            return Err(FlowError::Infeasible);
        }
        Ok(self
            .arcs
            .iter()
            .zip(&handles)
            .map(|(a, &h)| a.lower + res.flow[h])
            .collect())
    }

    /// Checks conservation at every node and bounds on every arc.
    pub fn check_circulation(&self, phi: &[i64]) -> Result<(), FlowError> {
        if phi.len() != self.arcs.len() {
            return Err(FlowError::LengthMismatch {
                expected: self.arcs.len(),
                got: phi.len(),
            });
        }
        let mut balance = vec![0i64; self.nodes];
        for (a, &f) in self.arcs.iter().zip(phi) {
            balance[a.head] += f;
            balance[a.tail] -= f;
        }
        if let Some(v) = balance.iter().position(|&b| b != 0) {
            return Err(FlowError::NotCirculation(v));
        }
        Ok(())
    }

    pub fn within_bounds(&self, phi: &[i64]) -> bool {
        phi.len() == self.arcs.len()
            && self.arcs.iter().zip(phi).all(|(a, &f)| {
                f >= a.lower
                    && match a.upper {
                        Cap::Finite(u) => f <= u,
                        Cap::Inf => true,
                    }
            })
    }

    /// Decomposes a nonnegative circulation into directed cycles with positive integer
    /// coefficients. Greedy walk along positive arcs in insertion order; each extracted cycle
    /// zeroes at least one arc, so at most `#{e : φ(e) > 0}` cycles are produced.
    pub fn decompose_circulation(&self, phi: &[i64]) -> Result<Vec<Cycle>, FlowError> {
        self.check_circulation(phi)?;
        if let Some(e) = phi.iter().position(|&f| f < 0) {
            return Err(FlowError::NegativeBound(e));
        }
        let mut rest = phi.to_vec();
        let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); self.nodes];
        for (e, a) in self.arcs.iter().enumerate() {
            out_arcs[a.tail].push(e);
        }
        let mut cursor = vec![0usize; self.nodes];
        let mut cycles = Vec::new();
        for start in 0..self.arcs.len() {
            while rest[start] > 0 {
                // walk from the tail of `start` until a node repeats
                let mut pos_of = vec![usize::MAX; self.nodes];
                let mut nodes = vec![self.arcs[start].tail];
                let mut arcs: Vec<usize> = Vec::new();
                pos_of[self.arcs[start].tail] = 0;
                let mut next = Some(start);
                loop {
                    let e = match next.take() {
                        Some(e) => e,
                        None => {
                            let v = *nodes.last().unwrap();
                            let list = &out_arcs[v];
                            while cursor[v] < list.len() && rest[list[cursor[v]]] == 0 {
                                cursor[v] += 1;
                            }
                            // conservation guarantees a positive outgoing arc
                            list[cursor[v]]
                        }
                    };
                    arcs.push(e);
                    let h = self.arcs[e].head;
                    if pos_of[h] != usize::MAX {
                        let p = pos_of[h];
                        let cyc_arcs: Vec<usize> = arcs[p..].to_vec();
                        let mut cyc_nodes: Vec<usize> = nodes[p..].to_vec();
                        cyc_nodes.push(h);
                        let coefficient = cyc_arcs.iter().map(|&a| rest[a]).min().unwrap();
                        for &a in &cyc_arcs {
                            rest[a] -= coefficient;
                        }
                        cycles.push(Cycle {
                            nodes: cyc_nodes,
                            arcs: cyc_arcs,
                            coefficient,
                        });
                        break;
                    }
                    pos_of[h] = nodes.len();
                    nodes.push(h);
                }
            }
        }
        Ok(cycles)
    }

    /// DIMACS max-flow dump (`p max N M`, `n id s|t`, `a u v cap`), 1-based node ids.
    pub fn to_dimacs(&self, s: usize, t: usize) -> String {
        let inf = self.inf_value();
        let mut out = String::new();
        let _ = writeln!(out, "p max {} {}", self.nodes, self.arcs.len());
        let _ = writeln!(out, "n {} s", s + 1);
        let _ = writeln!(out, "n {} t", t + 1);
        for a in &self.arcs {
            let cap = match a.upper {
                Cap::Finite(u) => u,
                Cap::Inf => inf,
            };
            let _ = writeln!(out, "a {} {} {}", a.tail + 1, a.head + 1, cap);
        }
        out
    }
}

#[derive(Clone, Debug)]
struct ResEdge {
    to: usize,
    cap: i64,
    rev: usize,
}

/// Dinic's blocking-flow algorithm on a residual graph.
struct Dinic {
    graph: Vec<Vec<ResEdge>>,
    handles: Vec<(usize, usize, i64)>,
    level: Vec<i64>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            graph: vec![Vec::new(); n],
            handles: Vec::new(),
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let fwd = self.graph[from].len();
        let bwd = self.graph[to].len();
        self.graph[from].push(ResEdge { to, cap, rev: bwd });
        self.graph[to].push(ResEdge {
            to: from,
            cap: 0,
            rev: fwd,
        });
        self.handles.push((from, fwd, cap));
        self.handles.len() - 1
    }

    fn flow_on(&self, h: usize) -> i64 {
        let (from, idx, cap) = self.handles[h];
        cap - self.graph[from][idx].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for e in &self.graph[v] {
                if e.cap > 0 && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: i64) -> i64 {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let i = self.iter[v];
            let (to, cap) = (self.graph[v][i].to, self.graph[v][i].cap);
            if cap > 0 && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, limit.min(cap));
                if d > 0 {
                    self.graph[v][i].cap -= d;
                    let rev = self.graph[v][i].rev;
                    self.graph[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for e in &self.graph[v] {
                if e.cap > 0 && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(n: usize, arcs: &[(usize, usize, i64)]) -> DirectedNetwork {
        let mut g = DirectedNetwork::new(n);
        for &(u, v, c) in arcs {
            g.add_arc(u, v, 0, c).unwrap();
        }
        g
    }

    #[test]
    fn single_edge() {
        let g = net(2, &[(0, 1, 5)]);
        let r = g.max_flow(0, 1).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.cut_nodes(), vec![0]);
    }

    #[test]
    fn parallel_edges_sum() {
        let g = net(2, &[(0, 1, 2), (0, 1, 3)]);
        assert_eq!(g.max_flow(0, 1).unwrap().value, 5);
    }

    #[test]
    fn diamond_with_cross_edge() {
        // s=0 a=1 b=2 t=3; every (s,t)-cut has capacity >= 2
        let g = net(4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, 1)]);
        assert_eq!(g.max_flow(0, 3).unwrap().value, 2);
    }

    #[test]
    fn minimal_cut_on_paths() {
        assert_eq!(net(2, &[(0, 1, 1)]).minimal_min_cut(0, 1).unwrap(), vec![0]);
        assert_eq!(
            net(3, &[(0, 1, 1), (1, 2, 2)]).minimal_min_cut(0, 2).unwrap(),
            vec![0]
        );
        assert_eq!(
            net(3, &[(0, 1, 2), (1, 2, 1)]).minimal_min_cut(0, 2).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn rejects_self_loops_and_lower_bounds_in_max_flow() {
        let mut g = DirectedNetwork::new(2);
        assert_eq!(g.add_arc(1, 1, 0, 3), Err(FlowError::SelfLoop(1)));
        g.add_arc(0, 1, 1, 3).unwrap();
        assert_eq!(g.max_flow(0, 1), Err(FlowError::LowerBoundPresent(0)));
        assert!(g.add_arc(0, 1, 4, 3).is_err());
    }

    #[test]
    fn forced_two_cycle() {
        let mut g = DirectedNetwork::new(2);
        g.add_arc(0, 1, 3, 3).unwrap();
        g.add_arc(1, 0, 3, 3).unwrap();
        assert_eq!(g.feasible_circulation().unwrap(), vec![3, 3]);
    }

    #[test]
    fn infeasible_two_cycle() {
        let mut g = DirectedNetwork::new(2);
        g.add_arc(0, 1, 2, 2).unwrap();
        g.add_arc(1, 0, 0, 1).unwrap();
        assert_eq!(g.feasible_circulation(), Err(FlowError::Infeasible));
    }

    #[test]
    fn triangle_circulation() {
        let mut g = DirectedNetwork::new(3);
        g.add_arc(0, 1, 1, 2).unwrap();
        g.add_arc(1, 2, 0, 2).unwrap();
        g.add_arc(2, 0, 0, 2).unwrap();
        let phi = g.feasible_circulation().unwrap();
        assert!(phi[0] == phi[1] && phi[1] == phi[2]);
        assert!((1..=2).contains(&phi[0]));
    }

    #[test]
    fn decompose_examples() {
        let mut g = DirectedNetwork::new(2);
        g.add_arc(0, 1, 0, 5).unwrap();
        g.add_arc(1, 0, 0, 5).unwrap();
        let cycles = g.decompose_circulation(&[3, 3]).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].nodes, vec![0, 1, 0]);
        assert_eq!(cycles[0].coefficient, 3);
        assert!(g.decompose_circulation(&[0, 0]).unwrap().is_empty());
        assert_eq!(
            g.decompose_circulation(&[1, 0]),
            Err(FlowError::NotCirculation(0))
        );

        let mut h = DirectedNetwork::new(4);
        h.add_arc(0, 1, 0, 1).unwrap();
        h.add_arc(1, 0, 0, 1).unwrap();
        h.add_arc(2, 3, 0, 1).unwrap();
        h.add_arc(3, 2, 0, 1).unwrap();
        let cycles = h.decompose_circulation(&[1, 1, 1, 1]).unwrap();
        assert_eq!(cycles.len(), 2);
        let mut sum = vec![0; 4];
        for c in &cycles {
            assert_eq!(c.coefficient, 1);
            for &a in &c.arcs {
                sum[a] += c.coefficient;
            }
        }
        assert_eq!(sum, vec![1, 1, 1, 1]);
    }

    #[test]
    fn infinite_arcs_are_integral() {
        let mut g = DirectedNetwork::new(3);
        g.add_arc(0, 1, 0, Cap::Inf).unwrap();
        g.add_arc(1, 2, 0, 4).unwrap();
        assert_eq!(g.inf_value(), 5);
        let r = g.max_flow(0, 2).unwrap();
        assert_eq!(r.value, 4);
        assert_eq!(r.cut_nodes(), vec![0, 1]);
    }

    #[test]
    fn dimacs_dump() {
        let g = net(2, &[(0, 1, 7)]);
        assert_eq!(g.to_dimacs(0, 1), "p max 2 1\nn 1 s\nn 2 t\na 1 2 7\n");
    }
}

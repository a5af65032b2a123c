//! Minimum-cost node-demand multiflows with half-integral certificates.
//!
//! Potentials live on the star `𝒯 = ⋃_s ℝ₊e_s` and are stored in half-units: a point is a leg
//! (terminal index) and an integer height `h` meaning distance `h/2` from the origin. Flow values
//! and supports are likewise integers counting halves.

mod double_cover;
mod mcmf;
mod multiway;
mod scaling;

use std::collections::BTreeMap;

use crate::flow::{Cap, DirectedNetwork, FlowError};
use crate::lconvex::LconvexError;

pub use double_cover::{
    build_double_cover, circulation_via_tilde, extract_multiflow, fix_half_integral, ArcRole,
    DoubleCover, EdgeClass, FixReport, NodeRole, TildeNetwork,
};
pub use mcmf::{lovasz_cherkassky_value, reduce_mcmf, solve_mcmf, McmfSolution, Reduction};
pub use multiway::{multiway_cut, multiway_objective, MultiwayResult};
pub use scaling::{
    phase_budget, scaling_potential, solve_descent, solve_scaling, DescentStats, LegalStep,
    PhaseStat, ScalingStats, Solution,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MultiflowError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("infeasible: terminal {terminal} has demand {demand} but a cut of capacity {kappa}")]
    Infeasible {
        terminal: usize,
        demand: i64,
        kappa: i64,
        cut: Vec<usize>,
    },
    #[error("edge {0} has zero cost")]
    CostNotPositive(usize),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("capacity of edge {edge} exceeded: {used_halves} halves used of {cap}")]
    CapacityViolated { edge: usize, used_halves: i64, cap: i64 },
    #[error("invalid multiflow: {0}")]
    InvalidMultiflow(String),
    #[error("support and potential are not jointly optimal: {0}")]
    NotOptimalPair(String),
    #[error("cut is not legal: {0}")]
    IllegalCut(String),
    #[error("potential is not optimal: no feasible circulation in the double cover")]
    NotOptimal,
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Lconvex(#[from] LconvexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    N,
    Mcmf,
    Multiway,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cap: i64,
    pub cost: i64,
}

/// Undirected network with terminals and demands; `demands[k]` belongs to `terminals[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub terminals: Vec<usize>,
    pub edges: Vec<Edge>,
    pub demands: Vec<i64>,
    pub problem: Problem,
}

/// Point of the star in half-units. `leg` is a terminal index; the origin has `leg = None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub leg: Option<usize>,
    pub height: i64,
}

impl Point {
    pub const ORIGIN: Point = Point {
        leg: None,
        height: 0,
    };

    pub fn on(leg: usize, height: i64) -> Point {
        if height == 0 {
            Point::ORIGIN
        } else {
            Point {
                leg: Some(leg),
                height,
            }
        }
    }

    pub fn is_origin(self) -> bool {
        self.height == 0
    }
}

/// Star distance in half-units.
pub fn dist(p: Point, q: Point) -> i64 {
    if p.leg == q.leg || p.is_origin() || q.is_origin() {
        (p.height - q.height).abs()
    } else {
        p.height + q.height
    }
}

pub type Potential = Vec<Point>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPath {
    pub nodes: Vec<usize>,
    /// Edge indices; `edges[k]` joins `nodes[k]` and `nodes[k + 1]`.
    pub edges: Vec<usize>,
    pub lambda_halves: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multiflow {
    pub paths: Vec<FlowPath>,
}

impl Multiflow {
    /// Total value `v_f` in halves.
    pub fn value_halves(&self) -> i64 {
        self.paths.iter().map(|p| p.lambda_halves).sum()
    }

    /// Reports each path with its smaller endpoint first and merges identical paths.
    pub fn canonicalize(&mut self) {
        let mut merged: BTreeMap<(Vec<usize>, Vec<usize>), i64> = BTreeMap::new();
        for p in self.paths.drain(..) {
            let (mut nodes, mut edges) = (p.nodes, p.edges);
            if nodes.first() > nodes.last() {
                nodes.reverse();
                edges.reverse();
            }
            *merged.entry((nodes, edges)).or_default() += p.lambda_halves;
        }
        self.paths = merged
            .into_iter()
            .filter(|(_, l)| *l > 0)
            .map(|((nodes, edges), lambda_halves)| FlowPath {
                nodes,
                edges,
                lambda_halves,
            })
            .collect();
    }
}

impl Instance {
    pub fn terminal_index(&self, node: usize) -> Option<usize> {
        self.terminals.iter().position(|&t| t == node)
    }

    pub fn is_terminal(&self, node: usize) -> bool {
        self.terminal_index(node).is_some()
    }

    pub fn max_cost(&self) -> i64 {
        self.edges.iter().map(|e| e.cost).max().unwrap_or(0)
    }

    pub fn total_cap(&self) -> i64 {
        self.edges.iter().map(|e| e.cap).sum()
    }

    pub fn validate(&self) -> Result<(), MultiflowError> {
        let bad = |m: String| Err(MultiflowError::InvalidInstance(m));
        if self.demands.len() != self.terminals.len() {
            return bad("one demand per terminal is required".into());
        }
        for (k, &t) in self.terminals.iter().enumerate() {
            if t >= self.n {
                return bad(format!("terminal {t} out of range"));
            }
            if self.terminals[..k].contains(&t) {
                return bad(format!("terminal {t} listed twice"));
            }
        }
        if let Some(r) = self.demands.iter().find(|&&r| r < 0) {
            return bad(format!("negative demand {r}"));
        }
        for (idx, e) in self.edges.iter().enumerate() {
            if e.u >= self.n || e.v >= self.n {
                return bad(format!("edge {idx} has an endpoint out of range"));
            }
            if e.u == e.v {
                return bad(format!("edge {idx} is a self-loop"));
            }
            if e.cap < 0 || e.cost < 0 {
                return bad(format!("edge {idx} has a negative capacity or cost"));
            }
        }
        Ok(())
    }

    /// Both orientations of every edge, capacity `cap · factor`.
    fn directed(&self, extra: usize, caps: impl Fn(usize) -> i64) -> DirectedNetwork {
        let mut net = DirectedNetwork::new(self.n + extra);
        for (idx, e) in self.edges.iter().enumerate() {
            let c = caps(idx);
            net.add_arc(e.u, e.v, 0, c).expect("validated edge");
            net.add_arc(e.v, e.u, 0, c).expect("validated edge");
        }
        net
    }

    /// Minimal minimum `(s, S ∖ {s})`-cut for terminal index `k` under capacities `caps`.
    pub fn isolating_cut(
        &self,
        k: usize,
        caps: impl Fn(usize) -> i64,
    ) -> Result<(i64, Vec<usize>), MultiflowError> {
        let mut net = self.directed(1, caps);
        let sink = self.n;
        for (other, &t) in self.terminals.iter().enumerate() {
            if other != k {
                net.add_arc(t, sink, 0, Cap::Inf)?;
            }
        }
        let res = net.max_flow(self.terminals[k], sink)?;
        let cut = (0..self.n).filter(|&v| res.source_side[v]).collect();
        Ok((res.value, cut))
    }

    /// `κ_s` for every terminal.
    pub fn kappas(&self) -> Result<Vec<i64>, MultiflowError> {
        (0..self.terminals.len())
            .map(|k| self.isolating_cut(k, |e| self.edges[e].cap).map(|(v, _)| v))
            .collect()
    }
}

/// Minimum isolating cut values and, when some demand exceeds its cut, a violating cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub kappa: Vec<i64>,
    pub violation: Option<(usize, Vec<usize>)>,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn check_feasibility(inst: &Instance) -> Result<Feasibility, MultiflowError> {
    inst.validate()?;
    let mut kappa = Vec::with_capacity(inst.terminals.len());
    let mut violation = None;
    for k in 0..inst.terminals.len() {
        let (value, cut) = inst.isolating_cut(k, |e| inst.edges[e].cap)?;
        if value < inst.demands[k] && violation.is_none() {
            violation = Some((inst.terminals[k], cut));
        }
        kappa.push(value);
    }
    Ok(Feasibility { kappa, violation })
}

pub(crate) fn require_feasible(inst: &Instance) -> Result<Vec<i64>, MultiflowError> {
    let feas = check_feasibility(inst)?;
    if let Some((terminal, cut)) = feas.violation {
        let k = inst.terminal_index(terminal).unwrap();
        return Err(MultiflowError::Infeasible {
            terminal,
            demand: inst.demands[k],
            kappa: feas.kappa[k],
            cut,
        });
    }
    Ok(feas.kappa)
}

/// Makes every cost positive: zero-cost edges get cost 1, the others are multiplied by
/// `2C(Z) + 1` where `C(Z)` is the capacity of the zero-cost edges. Returns the factor (1 when
/// nothing changed).
pub fn perturb_costs(inst: &Instance) -> (Instance, i64) {
    let zero_cap: i64 = inst.edges.iter().filter(|e| e.cost == 0).map(|e| e.cap).sum();
    if inst.edges.iter().all(|e| e.cost > 0) {
        return (inst.clone(), 1);
    }
    let scale = 2 * zero_cap + 1;
    let mut out = inst.clone();
    for e in &mut out.edges {
        e.cost = if e.cost == 0 { 1 } else { scale * e.cost };
    }
    (out, scale)
}

/// Checks that every terminal sits on its own leg (or the origin) and legs are in range.
pub fn check_potential(inst: &Instance, p: &[Point]) -> Result<(), MultiflowError> {
    if p.len() != inst.n {
        return Err(MultiflowError::InvalidPotential(format!(
            "{} points for {} nodes",
            p.len(),
            inst.n
        )));
    }
    for (i, q) in p.iter().enumerate() {
        if q.height < 0 || (q.height == 0) != q.leg.is_none() {
            return Err(MultiflowError::InvalidPotential(format!("malformed point at node {i}")));
        }
        if let Some(l) = q.leg {
            if l >= inst.terminals.len() {
                return Err(MultiflowError::InvalidPotential(format!("leg {l} out of range")));
            }
        }
    }
    for (k, &s) in inst.terminals.iter().enumerate() {
        if p[s].leg.is_some_and(|l| l != k) {
            return Err(MultiflowError::InvalidPotential(format!(
                "terminal {s} is off its own leg"
            )));
        }
    }
    Ok(())
}

pub fn is_proper(inst: &Instance, p: &[Point]) -> bool {
    p.iter().all(|q| match q.leg {
        None => true,
        Some(l) => q.height <= p[inst.terminals[l]].height,
    })
}

/// Pulls every node that overshoots its leg's terminal back to the terminal's point. Returns
/// the number of nodes moved; the objective does not increase.
pub fn make_proper(inst: &Instance, p: &mut [Point]) -> usize {
    let mut moved = 0;
    for i in 0..p.len() {
        if let Some(l) = p[i].leg {
            let top = p[inst.terminals[l]];
            if p[i].height > top.height {
                p[i] = top;
                moved += 1;
            }
        }
    }
    moved
}

/// Dual objective `Σ r(s) D(0, p_s) − Σ c(ij) (D(p_i, p_j) − a(ij))⁺` in halves.
pub fn dual_objective_halves(inst: &Instance, p: &[Point]) -> Result<i64, MultiflowError> {
    check_potential(inst, p)?;
    let gain: i64 = inst
        .terminals
        .iter()
        .zip(&inst.demands)
        .map(|(&s, &r)| r * p[s].height)
        .sum();
    let loss: i64 = inst
        .edges
        .iter()
        .map(|e| e.cap * (dist(p[e.u], p[e.v]) - 2 * e.cost).max(0))
        .sum();
    Ok(gain - loss)
}

/// `ω(p)` (the negated dual objective) in halves.
pub fn omega_halves(inst: &Instance, p: &[Point]) -> Result<i64, MultiflowError> {
    Ok(-dual_objective_halves(inst, p)?)
}

/// Per-edge flow in halves, after checking every path.
pub fn flow_support(inst: &Instance, f: &Multiflow) -> Result<Vec<i64>, MultiflowError> {
    let bad = |m: String| Err(MultiflowError::InvalidMultiflow(m));
    let mut support = vec![0i64; inst.edges.len()];
    for (k, path) in f.paths.iter().enumerate() {
        if path.lambda_halves <= 0 {
            return bad(format!("path {k} has nonpositive value"));
        }
        if path.nodes.len() < 2 || path.edges.len() + 1 != path.nodes.len() {
            return bad(format!("path {k} is malformed"));
        }
        let (s, t) = (path.nodes[0], *path.nodes.last().unwrap());
        if s == t || !inst.is_terminal(s) || !inst.is_terminal(t) {
            return bad(format!("path {k} does not join distinct terminals"));
        }
        for (x, &e) in path.edges.iter().enumerate() {
            let Some(edge) = inst.edges.get(e) else {
                return bad(format!("path {k} uses unknown edge {e}"));
            };
            let (a, b) = (path.nodes[x], path.nodes[x + 1]);
            if !((edge.u == a && edge.v == b) || (edge.u == b && edge.v == a)) {
                return bad(format!("path {k}: edge {e} does not join {a} and {b}"));
            }
            support[e] += path.lambda_halves;
        }
    }
    Ok(support)
}

/// `a_f` in halves; fails when a capacity is exceeded.
pub fn primal_cost_halves(inst: &Instance, f: &Multiflow) -> Result<i64, MultiflowError> {
    let support = flow_support(inst, f)?;
    for (e, (&x, edge)) in support.iter().zip(&inst.edges).enumerate() {
        if x > 2 * edge.cap {
            return Err(MultiflowError::CapacityViolated {
                edge: e,
                used_halves: x,
                cap: edge.cap,
            });
        }
    }
    Ok(support.iter().zip(&inst.edges).map(|(&x, e)| x * e.cost).sum())
}

/// `f(s)` in halves for every terminal index.
pub fn terminal_flow_halves(inst: &Instance, f: &Multiflow) -> Vec<i64> {
    let mut out = vec![0; inst.terminals.len()];
    for p in &f.paths {
        for end in [p.nodes[0], *p.nodes.last().unwrap()] {
            if let Some(k) = inst.terminal_index(end) {
                out[k] += p.lambda_halves;
            }
        }
    }
    out
}

/// Outcome of checking a primal/dual pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OptimalityReport {
    pub capacity: bool,
    pub feasible: bool,
    /// `D(p_i, p_j) > a(ij)` implies saturation.
    pub saturated_above: bool,
    /// `D(p_i, p_j) < a(ij)` implies zero flow.
    pub empty_below: bool,
    /// Every path is `p`-geodesic.
    pub geodesic: bool,
    /// `D(0, p_s) > 0` implies `f(s) = r(s)`.
    pub tight_demands: bool,
    pub primal_halves: i64,
    pub dual_halves: i64,
    pub violations: Vec<String>,
}

impl OptimalityReport {
    pub fn certified(&self) -> bool {
        self.capacity
            && self.feasible
            && self.saturated_above
            && self.empty_below
            && self.geodesic
            && self.tight_demands
            && self.primal_halves == self.dual_halves
    }
}

/// Checks feasibility, the four complementary slackness conditions and strong duality.
pub fn verify_optimality(
    inst: &Instance,
    f: &Multiflow,
    p: &[Point],
) -> Result<OptimalityReport, MultiflowError> {
    inst.validate()?;
    check_potential(inst, p)?;
    let support = flow_support(inst, f)?;
    let mut rep = OptimalityReport {
        capacity: true,
        feasible: true,
        saturated_above: true,
        empty_below: true,
        geodesic: true,
        tight_demands: true,
        ..Default::default()
    };
    for (idx, (e, &x)) in inst.edges.iter().zip(&support).enumerate() {
        if x > 2 * e.cap {
            rep.capacity = false;
            rep.violations.push(format!("edge {idx}: flow exceeds capacity"));
        }
        let d = dist(p[e.u], p[e.v]);
        if d > 2 * e.cost && x != 2 * e.cap {
            rep.saturated_above = false;
            rep.violations.push(format!("edge {idx}: potential gap above cost but not saturated"));
        }
        if d < 2 * e.cost && x != 0 {
            rep.empty_below = false;
            rep.violations.push(format!("edge {idx}: potential gap below cost but carries flow"));
        }
    }
    for (k, path) in f.paths.iter().enumerate() {
        let along: i64 = path
            .nodes
            .windows(2)
            .map(|w| dist(p[w[0]], p[w[1]]))
            .sum();
        let ends = dist(p[path.nodes[0]], p[*path.nodes.last().unwrap()]);
        if along != ends {
            rep.geodesic = false;
            rep.violations.push(format!("path {k} is not geodesic"));
        }
    }
    let fs = terminal_flow_halves(inst, f);
    for (k, &s) in inst.terminals.iter().enumerate() {
        if fs[k] < 2 * inst.demands[k] {
            rep.feasible = false;
            rep.violations.push(format!("terminal {s}: demand not met"));
        }
        if p[s].height > 0 && fs[k] != 2 * inst.demands[k] {
            rep.tight_demands = false;
            rep.violations.push(format!("terminal {s}: raised potential but demand not tight"));
        }
    }
    rep.primal_halves = support.iter().zip(&inst.edges).map(|(&x, e)| x * e.cost).sum();
    rep.dual_halves = dual_objective_halves(inst, p)?;
    if rep.primal_halves != rep.dual_halves {
        rep.violations.push(format!(
            "duality gap: primal {} halves, dual {} halves",
            rep.primal_halves, rep.dual_halves
        ));
    }
    Ok(rep)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    fn edge(u: usize, v: usize, cap: i64, cost: i64) -> Edge {
        Edge { u, v, cap, cost }
    }

    /// Center 0 joined to terminals 1, 2, 3 by unit edges; every demand 1.
    pub fn claw() -> Instance {
        Instance {
            n: 4,
            terminals: vec![1, 2, 3],
            edges: vec![edge(0, 1, 1, 1), edge(0, 2, 1, 1), edge(0, 3, 1, 1)],
            demands: vec![1, 1, 1],
            problem: Problem::N,
        }
    }

    /// Three terminals joined pairwise by unit edges; every demand 2.
    pub fn triangle() -> Instance {
        Instance {
            n: 3,
            terminals: vec![0, 1, 2],
            edges: vec![edge(0, 1, 1, 1), edge(1, 2, 1, 1), edge(0, 2, 1, 1)],
            demands: vec![2, 2, 2],
            problem: Problem::N,
        }
    }

    /// Four terminals on a unit cycle; every demand 1.
    pub fn square() -> Instance {
        Instance {
            n: 4,
            terminals: vec![0, 1, 2, 3],
            edges: vec![edge(0, 1, 1, 1), edge(1, 2, 1, 1), edge(2, 3, 1, 1), edge(3, 0, 1, 1)],
            demands: vec![1, 1, 1, 1],
            problem: Problem::N,
        }
    }
}

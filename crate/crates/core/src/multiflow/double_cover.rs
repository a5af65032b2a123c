//! The double covering network `D_p` of a potential, its lower-bound-free form `D̃_p`, and the
//! passage between circulations and multiflows.

use crate::flow::{Cap, DirectedNetwork};

use super::{
    check_potential, dist, FlowPath, Instance, Multiflow, MultiflowError, Point, Potential,
};

/// Position of an edge's potential gap relative to its cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    Below,
    Tight,
    Above,
}

/// Which copy of an original node a network node is. Legs are terminal indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Plus(usize),
    Minus(usize),
    PlusAt(usize, usize),
    MinusAt(usize, usize),
}

impl NodeRole {
    pub fn node(self) -> usize {
        match self {
            NodeRole::Plus(i) | NodeRole::Minus(i) | NodeRole::PlusAt(i, _) | NodeRole::MinusAt(i, _) => i,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcRole {
    /// One of the two arcs standing for an edge.
    Edge { edge: usize, copy: usize },
    /// `i^{s+} → i^{t−}` inside the origin gadget of node `i`.
    Branch { node: usize, from: usize, to: usize },
    /// `s⁻ → s⁺` for terminal index `s`.
    Terminal(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Zone {
    Origin,
    Leg(usize),
}

#[derive(Clone, Debug)]
pub struct DoubleCover {
    pub net: DirectedNetwork,
    pub roles: Vec<NodeRole>,
    pub arc_roles: Vec<ArcRole>,
    pub classes: Vec<EdgeClass>,
    /// The two arcs of every edge in `E_= ∪ E_>`.
    pub edge_arcs: Vec<Option<[usize; 2]>>,
    pub terminal_arcs: Vec<usize>,
    pub potential: Potential,
    plus: Vec<usize>,
    minus: Vec<usize>,
    plus_at: Vec<Vec<usize>>,
    minus_at: Vec<Vec<usize>>,
}

fn zone(inst: &Instance, p: &[Point], i: usize) -> Zone {
    match inst.terminal_index(i) {
        Some(k) => Zone::Leg(k),
        None => p[i].leg.map_or(Zone::Origin, Zone::Leg),
    }
}

/// Builds `D_p`. Every cost must be positive.
pub fn build_double_cover(inst: &Instance, p: &[Point]) -> Result<DoubleCover, MultiflowError> {
    inst.validate()?;
    check_potential(inst, p)?;
    if let Some(e) = inst.edges.iter().position(|e| e.cost <= 0) {
        return Err(MultiflowError::CostNotPositive(e));
    }
    let k = inst.terminals.len();
    let mut net = DirectedNetwork::new(0);
    let mut roles = Vec::new();
    let mut fresh = |role: NodeRole, net: &mut DirectedNetwork| {
        roles.push(role);
        net.add_node()
    };
    let none = usize::MAX;
    let (mut plus, mut minus) = (vec![none; inst.n], vec![none; inst.n]);
    let (mut plus_at, mut minus_at) = (vec![vec![]; inst.n], vec![vec![]; inst.n]);
    for i in 0..inst.n {
        match zone(inst, p, i) {
            Zone::Leg(_) => {
                plus[i] = fresh(NodeRole::Plus(i), &mut net);
                minus[i] = fresh(NodeRole::Minus(i), &mut net);
            }
            Zone::Origin => {
                for s in 0..k {
                    plus_at[i].push(fresh(NodeRole::PlusAt(i, s), &mut net));
                    minus_at[i].push(fresh(NodeRole::MinusAt(i, s), &mut net));
                }
            }
        }
    }

    let mut arc_roles = Vec::new();
    let mut classes = Vec::with_capacity(inst.edges.len());
    let mut edge_arcs = Vec::with_capacity(inst.edges.len());
    for (idx, e) in inst.edges.iter().enumerate() {
        let d = dist(p[e.u], p[e.v]);
        let class = match d.cmp(&(2 * e.cost)) {
            std::cmp::Ordering::Less => EdgeClass::Below,
            std::cmp::Ordering::Equal => EdgeClass::Tight,
            std::cmp::Ordering::Greater => EdgeClass::Above,
        };
        classes.push(class);
        if class == EdgeClass::Below {
            edge_arcs.push(None);
            continue;
        }
        let pairs = match (zone(inst, p, e.u), zone(inst, p, e.v)) {
            (Zone::Leg(s), Zone::Leg(t)) if s == t => {
                let (i, j) = if p[e.u].height < p[e.v].height { (e.u, e.v) } else { (e.v, e.u) };
                [(plus[j], plus[i]), (minus[i], minus[j])]
            }
            (Zone::Leg(_), Zone::Leg(_)) => [(plus[e.u], minus[e.v]), (plus[e.v], minus[e.u])],
            (Zone::Origin, Zone::Leg(s)) => [(plus[e.v], plus_at[e.u][s]), (minus_at[e.u][s], minus[e.v])],
            (Zone::Leg(s), Zone::Origin) => [(plus[e.u], plus_at[e.v][s]), (minus_at[e.v][s], minus[e.u])],
            (Zone::Origin, Zone::Origin) => unreachable!("positive cost keeps origin pairs below"),
        };
        let lower = if class == EdgeClass::Above { e.cap } else { 0 };
        let mut ids = [0; 2];
        for (copy, (tail, head)) in pairs.into_iter().enumerate() {
            ids[copy] = net.add_arc(tail, head, lower, e.cap)?;
            arc_roles.push(ArcRole::Edge { edge: idx, copy });
        }
        edge_arcs.push(Some(ids));
    }
    for i in 0..inst.n {
        for s in 0..plus_at[i].len() {
            for t in 0..k {
                if s != t {
                    net.add_arc(plus_at[i][s], minus_at[i][t], 0, Cap::Inf)?;
                    arc_roles.push(ArcRole::Branch { node: i, from: s, to: t });
                }
            }
        }
    }
    let mut terminal_arcs = Vec::with_capacity(k);
    for (s, (&node, &r)) in inst.terminals.iter().zip(&inst.demands).enumerate() {
        let upper = if p[node].is_origin() { Cap::Inf } else { Cap::Finite(r) };
        terminal_arcs.push(net.add_arc(minus[node], plus[node], r, upper)?);
        arc_roles.push(ArcRole::Terminal(s));
    }
    Ok(DoubleCover {
        net,
        roles,
        arc_roles,
        classes,
        edge_arcs,
        terminal_arcs,
        potential: p.to_vec(),
        plus,
        minus,
        plus_at,
        minus_at,
    })
}

/// `D̃_p`: every lower bound `l` on an arc `uv` becomes arcs `a⁺v` and `ua⁻` of capacity `l`,
/// leaving `uv` with capacity `upper − l`.
#[derive(Clone, Debug)]
pub struct TildeNetwork {
    pub net: DirectedNetwork,
    pub source: usize,
    pub sink: usize,
    /// Arc of `D̃_p` carrying the part of each `D_p` arc above its lower bound.
    pub residual_of: Vec<Option<usize>>,
    /// `c(δ{a⁺})`, the total of all lower bounds.
    pub base: i64,
}

impl TildeNetwork {
    pub fn new(dc: &DoubleCover) -> Result<TildeNetwork, MultiflowError> {
        let nodes = dc.net.node_count();
        let mut net = DirectedNetwork::new(nodes + 2);
        let (source, sink) = (nodes, nodes + 1);
        let mut residual_of = Vec::with_capacity(dc.net.arc_count());
        let mut base = 0;
        for a in dc.net.arcs() {
            if a.lower > 0 {
                net.add_arc(source, a.head, 0, a.lower)?;
                net.add_arc(a.tail, sink, 0, a.lower)?;
                base += a.lower;
            }
            let rest = match a.upper {
                Cap::Inf => Some(Cap::Inf),
                Cap::Finite(u) if u > a.lower => Some(Cap::Finite(u - a.lower)),
                Cap::Finite(_) => None,
            };
            residual_of.push(match rest {
                Some(c) => Some(net.add_arc(a.tail, a.head, 0, c)?),
                None => None,
            });
        }
        Ok(TildeNetwork {
            net,
            source,
            sink,
            residual_of,
            base,
        })
    }
}

/// A circulation of `D_p` obtained from a maximum `(a⁺, a⁻)`-flow; fails when the flow does not
/// saturate `δ{a⁺}`, i.e. when `p` is not optimal.
pub fn circulation_via_tilde(dc: &DoubleCover) -> Result<Vec<i64>, MultiflowError> {
    let tilde = TildeNetwork::new(dc)?;
    let res = tilde.net.max_flow(tilde.source, tilde.sink)?;
    if res.value < tilde.base {
        return Err(MultiflowError::NotOptimal);
    }
    let phi: Vec<i64> = dc
        .net
        .arcs()
        .iter()
        .zip(&tilde.residual_of)
        .map(|(a, r)| a.lower + r.map_or(0, |e| res.flow[e]))
        .collect();
    dc.net.check_circulation(&phi)?;
    Ok(phi)
}

impl DoubleCover {
    /// Checks the three legality conditions on the `D_p` part of a cut of `D̃_p`.
    fn check_legal(&self, side: &[bool]) -> Result<(), MultiflowError> {
        let illegal = |m: String| Err(MultiflowError::IllegalCut(m));
        let p = &self.potential;
        let (mut integral, mut half) = (false, false);
        for (v, role) in self.roles.iter().enumerate() {
            if side[v] {
                if p[role.node()].height % 2 == 0 {
                    integral = true;
                } else {
                    half = true;
                }
            }
        }
        if integral && half {
            return illegal("mixes integral and half-integral potentials".into());
        }
        for i in 0..p.len() {
            if self.plus_at[i].is_empty() {
                if side[self.plus[i]] && side[self.minus[i]] {
                    return illegal(format!("both copies of node {i}"));
                }
                continue;
            }
            let k = self.plus_at[i].len();
            let ups: Vec<usize> = (0..k).filter(|&s| side[self.plus_at[i][s]]).collect();
            let downs: Vec<usize> = (0..k).filter(|&s| side[self.minus_at[i][s]]).collect();
            let ok = match ups.as_slice() {
                [] => downs.is_empty(),
                [s] => downs.len() == k - 1 && !downs.contains(s),
                _ => false,
            };
            if !ok {
                return illegal(format!("origin gadget of node {i}"));
            }
        }
        Ok(())
    }

    /// `p^X` for a legal cut `X` of `D̃_p` (only the first `node_count` entries of `side` matter).
    pub fn shifted_potential(&self, inst: &Instance, side: &[bool]) -> Result<Potential, MultiflowError> {
        self.check_legal(side)?;
        let mut q = self.potential.clone();
        for i in 0..q.len() {
            if self.plus_at[i].is_empty() {
                let leg = match inst.terminal_index(i) {
                    Some(k) => k,
                    None => q[i].leg.expect("off-origin node has a leg"),
                };
                if side[self.plus[i]] {
                    q[i] = Point::on(leg, q[i].height + 1);
                } else if side[self.minus[i]] {
                    if q[i].height == 0 {
                        return Err(MultiflowError::IllegalCut(format!("node {i} below the origin")));
                    }
                    q[i] = Point::on(leg, q[i].height - 1);
                }
            } else if let Some(s) = self.plus_at[i].iter().position(|&v| side[v]) {
                q[i] = Point::on(s, 1);
            }
        }
        Ok(q)
    }

    /// `X ∖ Ṽ₂` (keep integral) or `X ∖ Ṽ₁` (keep half-integral); `a⁺` stays in both.
    pub fn restrict_cut(&self, side: &[bool], keep_integral: bool) -> Vec<bool> {
        let mut out = side.to_vec();
        for (v, role) in self.roles.iter().enumerate() {
            let integral = self.potential[role.node()].height % 2 == 0;
            if integral != keep_integral {
                out[v] = false;
            }
        }
        out
    }
}

/// Decomposes a circulation of `D_p` into cycles, cuts them at terminal arcs and projects the
/// pieces to `S`-paths of the original network. Values are in halves.
pub fn extract_multiflow(dc: &DoubleCover, phi: &[i64]) -> Result<Multiflow, MultiflowError> {
    let cycles = dc.net.decompose_circulation(phi)?;
    let mut paths = Vec::new();
    for cyc in cycles {
        let len = cyc.arcs.len();
        let Some(start) = cyc
            .arcs
            .iter()
            .position(|&a| matches!(dc.arc_roles[a], ArcRole::Terminal(_)))
        else {
            return Err(MultiflowError::InvalidMultiflow("cycle avoids every terminal".into()));
        };
        let mut nodes: Vec<usize> = Vec::new();
        let mut edges: Vec<usize> = Vec::new();
        for off in 1..=len {
            let pos = (start + off) % len;
            let arc = cyc.arcs[pos];
            let tail = dc.roles[cyc.nodes[pos]].node();
            match dc.arc_roles[arc] {
                ArcRole::Terminal(_) => {
                    nodes.push(tail);
                    paths.push(FlowPath {
                        nodes: std::mem::take(&mut nodes),
                        edges: std::mem::take(&mut edges),
                        lambda_halves: cyc.coefficient,
                    });
                }
                ArcRole::Edge { edge, .. } => {
                    nodes.push(tail);
                    edges.push(edge);
                }
                ArcRole::Branch { .. } => {}
            }
        }
    }
    let mut f = Multiflow { paths };
    f.canonicalize();
    Ok(f)
}

/// Result of rounding a half-integral optimal support toward an integral one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixReport {
    /// Support of the final witness circulation, in halves.
    pub x_tilde_halves: Vec<i64>,
    /// Half-integral edges pinned to an integer, with the chosen value.
    pub fixed: Vec<(usize, i64)>,
    pub unfixed: Vec<usize>,
    pub circulation_checks: usize,
}

/// Pins the half-integral edges of an optimal support one at a time (input order, floor first)
/// while a circulation of `D_p` consistent with all pins exists.
pub fn fix_half_integral(
    inst: &Instance,
    x_halves: &[i64],
    p: &[Point],
) -> Result<FixReport, MultiflowError> {
    let mut dc = build_double_cover(inst, p)?;
    let not_opt = |m: String| Err(MultiflowError::NotOptimalPair(m));
    if x_halves.len() != inst.edges.len() {
        return not_opt("one support value per edge is required".into());
    }
    let mut halves = Vec::new();
    for (e, (&x, edge)) in x_halves.iter().zip(&inst.edges).enumerate() {
        if x < 0 || x > 2 * edge.cap {
            return not_opt(format!("edge {e} support out of range"));
        }
        match dc.classes[e] {
            EdgeClass::Below if x != 0 => return not_opt(format!("edge {e} carries flow below cost")),
            EdgeClass::Above if x != 2 * edge.cap => {
                return not_opt(format!("edge {e} is not saturated above cost"))
            }
            _ => {}
        }
        if let Some(arcs) = dc.edge_arcs[e] {
            let (lo, hi) = (x.div_euclid(2), (x + 1).div_euclid(2));
            for a in arcs {
                dc.net.set_bounds(a, lo, hi)?;
            }
            if x % 2 != 0 {
                halves.push((e, lo, hi, arcs));
            }
        }
    }
    let mut checks = 1;
    let Ok(mut witness) = dc.net.feasible_circulation() else {
        return not_opt("no circulation matches the support".into());
    };
    let mut fixed = Vec::new();
    let mut unfixed = Vec::new();
    for (e, lo, hi, arcs) in halves {
        let mut pinned = false;
        for value in [lo, hi] {
            for a in arcs {
                dc.net.set_bounds(a, value, value)?;
            }
            checks += 1;
            if let Ok(phi) = dc.net.feasible_circulation() {
                witness = phi;
                fixed.push((e, value));
                pinned = true;
                break;
            }
        }
        if !pinned {
            for a in arcs {
                dc.net.set_bounds(a, lo, hi)?;
            }
            unfixed.push(e);
        }
    }
    let x_tilde_halves = dc
        .edge_arcs
        .iter()
        .map(|arcs| arcs.map_or(0, |[a, b]| witness[a] + witness[b]))
        .collect();
    Ok(FixReport {
        x_tilde_halves,
        fixed,
        unfixed,
        circulation_checks: checks,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use super::*;

    fn raised_claw() -> Potential {
        vec![Point::ORIGIN, Point::on(0, 2), Point::on(1, 2), Point::on(2, 2)]
    }

    #[test]
    fn claw_cover_shape() {
        let inst = claw();
        let dc = build_double_cover(&inst, &raised_claw()).unwrap();
        // center has 2·3 copies, each terminal 2
        assert_eq!(dc.net.node_count(), 12);
        assert_eq!(dc.classes, vec![EdgeClass::Tight; 3]);
        // 6 edge arcs, 6 branch arcs, 3 terminal arcs
        assert_eq!(dc.net.arc_count(), 15);
        let phi = circulation_via_tilde(&dc).unwrap();
        let f = extract_multiflow(&dc, &phi).unwrap();
        assert_eq!(f.value_halves(), 3);
        assert_eq!(primal_cost_halves(&inst, &f).unwrap(), 6);
        assert!(verify_optimality(&inst, &f, &raised_claw()).unwrap().certified());
    }

    #[test]
    fn zero_potential_is_not_optimal() {
        let inst = claw();
        let dc = build_double_cover(&inst, &[Point::ORIGIN; 4]).unwrap();
        assert_eq!(circulation_via_tilde(&dc), Err(MultiflowError::NotOptimal));
    }

    #[test]
    fn zero_cost_rejected() {
        let mut inst = claw();
        inst.edges[1].cost = 0;
        let err = build_double_cover(&inst, &raised_claw()).unwrap_err();
        assert_eq!(err, MultiflowError::CostNotPositive(1));
    }

    #[test]
    fn legal_identity_on_claw() {
        let inst = claw();
        let p = vec![Point::ORIGIN; 4];
        let dc = build_double_cover(&inst, &p).unwrap();
        let tilde = TildeNetwork::new(&dc).unwrap();
        let res = tilde.net.max_flow(tilde.source, tilde.sink).unwrap();
        let x = &res.source_side;
        let cut = tilde.net.cut_capacity(x);
        assert!(cut < tilde.base);
        let q = dc.shifted_potential(&inst, x).unwrap();
        let gain = omega_halves(&inst, &q).unwrap() - omega_halves(&inst, &p).unwrap();
        assert_eq!(gain, cut - tilde.base);
    }

    #[test]
    fn fixing_on_square() {
        let inst = square();
        // every terminal at height 1/2 makes each edge tight
        let p: Potential = (0..4).map(|s| Point::on(s, 1)).collect();
        let report = fix_half_integral(&inst, &[1, 1, 1, 1], &p).unwrap();
        assert_eq!(report.unfixed, Vec::<usize>::new());
        assert_eq!(report.x_tilde_halves, vec![0, 2, 0, 2]);
        let cost: i64 = report.x_tilde_halves.iter().sum();
        assert_eq!(cost, 4);
        assert!(fix_half_integral(&inst, &[2, 0, 0, 0], &p).is_err());
    }
}

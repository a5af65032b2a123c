//! Two exact solvers: proximity scaling over successively finer star grids, and the direct
//! descent on half-integral potentials via minimum cuts of `D̃_p`.

use num_traits::Zero;

use crate::lconvex::{OneDimConvex, PairTerm, TwoSeparable, UnaryTerm};
use crate::rational::{q, qf, Ext, Q};
use crate::trees::{star_tree, StarPoint, StarTree};

use super::double_cover::TildeNetwork;
use super::{
    build_double_cover, circulation_via_tilde, extract_multiflow, flow_support, make_proper,
    omega_halves, perturb_costs, require_feasible, verify_optimality, Instance, Multiflow,
    MultiflowError, OptimalityReport, Point, Potential,
};

/// Steps allowed per scaling phase for `n` nodes.
pub fn phase_budget(n: usize) -> usize {
    6 * n + 6
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseStat {
    pub sigma: i32,
    pub rungs: usize,
    pub steps: usize,
    /// Nodes pulled back to their terminal after the phase.
    pub repaired: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScalingStats {
    pub phases: Vec<PhaseStat>,
    pub flow_computations: usize,
    pub budget: usize,
}

impl ScalingStats {
    pub fn max_steps(&self) -> usize {
        self.phases.iter().map(|p| p.steps).max().unwrap_or(0)
    }

    pub fn within_budget(&self) -> bool {
        self.max_steps() <= self.budget
    }
}

/// One iteration of the cut-based descent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegalStep {
    /// True when the integral-potential half of the cut was applied.
    pub integral_half: bool,
    pub cut: i64,
    pub base: i64,
    pub omega_before: i64,
    pub omega_after: i64,
}

impl LegalStep {
    /// `ω(p^X) − ω(p) = (c(δX) − c(δ{a⁺}))/2`, both sides in halves.
    pub fn identity_holds(&self) -> bool {
        self.omega_after - self.omega_before == self.cut - self.base
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DescentStats {
    pub steps: Vec<LegalStep>,
    pub flow_computations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub multiflow: Multiflow,
    /// Optimal dual for the original costs.
    pub potential: Potential,
    /// Optimal dual for the positive costs actually used (equal to `potential` when every cost
    /// was already positive).
    pub working_potential: Potential,
    /// Factor applied to nonzero costs; 1 when no perturbation happened.
    pub cost_scale: i64,
    pub support_halves: Vec<i64>,
    pub value_halves: i64,
    pub report: OptimalityReport,
    pub scaling: Option<ScalingStats>,
    pub descent: Option<DescentStats>,
    /// Stats of the extra dual solve on the original costs after a perturbation.
    pub certificate: Option<ScalingStats>,
}

impl Solution {
    pub fn certified(&self) -> bool {
        self.report.certified()
    }
}

fn pow2(sigma: i32) -> Q {
    if sigma >= 0 {
        q(1 << sigma)
    } else {
        qf(1, 1 << -sigma)
    }
}

fn ceil_log2(h: i64) -> i32 {
    if h <= 1 {
        0
    } else {
        64 - (h - 1).leading_zeros() as i32
    }
}

/// The evenized dual objective on the grid of one phase.
fn phase_objective(inst: &Instance, st: &StarTree) -> TwoSeparable {
    let unit = pow2(st.sigma);
    let nv = st.tree.len();
    let mut omega = TwoSeparable::new(st.tree.clone(), inst.n);
    for (k, (&s, &r)) in inst.terminals.iter().zip(&inst.demands).enumerate() {
        let table = (0..nv)
            .map(|v| match st.point(v) {
                StarPoint { leg: None, .. } => Ext::zero(),
                StarPoint { leg: Some(l), rung } if l == k => {
                    Ext::Finite(-q(r) * unit * q(rung as i64))
                }
                _ => Ext::Inf,
            })
            .collect();
        omega.unary.push(UnaryTerm { var: s, table });
    }
    let len = 2 * st.rungs + 3;
    for e in &inst.edges {
        let values = (0..len)
            .map(|z| {
                let gap = unit * q(z as i64) - q(e.cost);
                q(e.cap) * if gap > Q::zero() { gap } else { Q::zero() }
            })
            .collect();
        omega.pairs.push(PairTerm {
            i: e.u,
            j: e.v,
            h: OneDimConvex::new(values).evenized(),
        });
    }
    omega
}

fn to_potential(st: &StarTree, x: &[usize]) -> Potential {
    x.iter()
        .map(|&v| {
            let p = st.point(v);
            match p.leg {
                None => Point::ORIGIN,
                Some(l) => Point::on(l, p.rung as i64),
            }
        })
        .collect()
}

fn from_potential(st: &StarTree, p: &[Point]) -> Vec<usize> {
    p.iter()
        .map(|pt| {
            st.id(StarPoint {
                leg: pt.leg,
                rung: pt.height as usize,
            })
        })
        .collect()
}

/// Optimal half-integral dual by proximity scaling. The grid starts with two rungs of length
/// `2^L` per leg, `L = ⌈log₂ max(nA, 1)⌉ − 1`, and is halved down to rung length `1/2`.
pub fn scaling_potential(inst: &Instance) -> Result<(Potential, ScalingStats), MultiflowError> {
    let h = (inst.n as i64 * inst.max_cost()).max(1);
    let top = ceil_log2(h) - 1;
    let legs = inst.terminals.len();
    let mut stats = ScalingStats {
        budget: phase_budget(inst.n),
        ..Default::default()
    };
    let mut p: Potential = vec![Point::ORIGIN; inst.n];
    for sigma in (-1..=top).rev() {
        // rung j of this phase is rung 2j of the next one, so heights double on refinement
        if sigma < top {
            for pt in &mut p {
                pt.height *= 2;
            }
        }
        let rungs = 1usize << (top + 1 - sigma);
        let st = star_tree(legs, sigma, rungs);
        let omega = phase_objective(inst, &st);
        let (x, trace) = omega.steepest_descent(&from_potential(&st, &p))?;
        stats.flow_computations += 2 * (trace.steps() + 1);
        p = to_potential(&st, &x);
        let repaired = make_proper(inst, &mut p);
        stats.phases.push(PhaseStat {
            sigma,
            rungs,
            steps: trace.steps(),
            repaired,
        });
    }
    Ok((p, stats))
}

/// Optimal dual by a single steepest descent on the finest grid covering the whole region.
fn single_phase_potential(inst: &Instance) -> Result<(Potential, ScalingStats), MultiflowError> {
    let h = (inst.n as i64 * inst.max_cost()).max(1);
    let rungs = 2 * h as usize;
    let st = star_tree(inst.terminals.len(), -1, rungs);
    let omega = phase_objective(inst, &st);
    let (x, trace) = omega.steepest_descent(&vec![0; inst.n])?;
    let mut p = to_potential(&st, &x);
    let repaired = make_proper(inst, &mut p);
    let stats = ScalingStats {
        phases: vec![PhaseStat {
            sigma: -1,
            rungs,
            steps: trace.steps(),
            repaired,
        }],
        flow_computations: 2 * (trace.steps() + 1),
        budget: usize::MAX,
    };
    Ok((p, stats))
}

fn finish(
    inst: &Instance,
    multiflow: Multiflow,
    potential: Potential,
    working_potential: Potential,
    cost_scale: i64,
) -> Result<Solution, MultiflowError> {
    let support_halves = flow_support(inst, &multiflow)?;
    let report = verify_optimality(inst, &multiflow, &potential)?;
    Ok(Solution {
        value_halves: report.primal_halves,
        multiflow,
        potential,
        working_potential,
        cost_scale,
        support_halves,
        report,
        scaling: None,
        descent: None,
        certificate: None,
    })
}

/// Minimum-cost multiflow by proximity scaling, with a certifying dual.
pub fn solve_scaling(inst: &Instance) -> Result<Solution, MultiflowError> {
    inst.validate()?;
    require_feasible(inst)?;
    let (work, scale) = perturb_costs(inst);
    let (wp, stats) = scaling_potential(&work)?;
    let dc = build_double_cover(&work, &wp)?;
    let phi = circulation_via_tilde(&dc)?;
    let f = extract_multiflow(&dc, &phi)?;
    let (p, certificate) = if scale == 1 {
        (wp.clone(), None)
    } else {
        let (p, s) = scaling_potential(inst)?;
        (p, Some(s))
    };
    let mut sol = finish(inst, f, p, wp, scale)?;
    sol.scaling = Some(stats);
    sol.certificate = certificate;
    Ok(sol)
}

/// Minimum-cost multiflow by descent from the zero potential: each step applies the cheaper
/// improving half of the minimal minimum `(a⁺, a⁻)`-cut of `D̃_p`.
pub fn solve_descent(inst: &Instance) -> Result<Solution, MultiflowError> {
    inst.validate()?;
    require_feasible(inst)?;
    let (work, scale) = perturb_costs(inst);
    let mut p: Potential = vec![Point::ORIGIN; inst.n];
    let mut stats = DescentStats::default();
    loop {
        let dc = build_double_cover(&work, &p)?;
        let tilde = TildeNetwork::new(&dc)?;
        let res = tilde.net.max_flow(tilde.source, tilde.sink)?;
        stats.flow_computations += 1;
        if res.value == tilde.base {
            let phi = circulation_via_tilde(&dc)?;
            stats.flow_computations += 1;
            let f = extract_multiflow(&dc, &phi)?;
            let (cert_p, certificate) = if scale == 1 {
                (p.clone(), None)
            } else {
                let (cp, s) = single_phase_potential(inst)?;
                (cp, Some(s))
            };
            let mut sol = finish(inst, f, cert_p, p, scale)?;
            sol.descent = Some(stats);
            sol.certificate = certificate;
            return Ok(sol);
        }
        let prefer_integral = stats.steps.len() % 2 == 0;
        let mut best: Option<(i64, bool, Vec<bool>)> = None;
        for integral in [prefer_integral, !prefer_integral] {
            let half = dc.restrict_cut(&res.source_side, integral);
            let cut = tilde.net.cut_capacity(&half);
            if cut < tilde.base && best.as_ref().is_none_or(|b| cut < b.0) {
                best = Some((cut, integral, half));
            }
        }
        let Some((cut, integral_half, half)) = best else {
            return Err(MultiflowError::IllegalCut("neither half of the cut improves".into()));
        };
        let omega_before = omega_halves(&work, &p)?;
        let mut next = dc.shifted_potential(&work, &half)?;
        let omega_after = omega_halves(&work, &next)?;
        make_proper(&work, &mut next);
        stats.steps.push(LegalStep {
            integral_half,
            cut,
            base: tilde.base,
            omega_before,
            omega_after,
        });
        p = next;
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use super::*;

    #[test]
    fn log_and_top_phase() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(8), 3);
    }

    #[test]
    fn phase_objective_matches_omega_on_finest_grid() {
        let inst = triangle();
        let st = star_tree(3, -1, 8);
        let omega = phase_objective(&inst, &st);
        let pts: Vec<Potential> = vec![
            vec![Point::ORIGIN; 3],
            vec![Point::on(0, 1), Point::on(1, 1), Point::on(2, 1)],
            vec![Point::on(0, 3), Point::on(1, 2), Point::ORIGIN],
        ];
        for p in pts {
            let x = from_potential(&st, &p);
            let v = omega.eval(&x).unwrap().finite().unwrap();
            assert_eq!(v * q(2), q(omega_halves(&inst, &p).unwrap()));
        }
    }

    #[test]
    fn claw_scaling() {
        let sol = solve_scaling(&claw()).unwrap();
        assert_eq!(sol.value_halves, 6);
        assert!(sol.certified());
        assert!(sol.scaling.unwrap().within_budget());
    }

    #[test]
    fn triangle_both_solvers() {
        for sol in [solve_scaling(&triangle()).unwrap(), solve_descent(&triangle()).unwrap()] {
            assert_eq!(sol.value_halves, 6);
            assert!(sol.certified(), "{:?}", sol.report.violations);
        }
    }

    #[test]
    fn descent_steps_obey_identity() {
        let sol = solve_descent(&square()).unwrap();
        assert_eq!(sol.value_halves, 4);
        let stats = sol.descent.unwrap();
        assert!(!stats.steps.is_empty());
        assert!(stats.steps.iter().all(|s| s.identity_holds()));
    }

    #[test]
    fn zero_costs_are_certified_on_original_costs() {
        let mut inst = claw();
        inst.edges[0].cost = 0;
        for sol in [solve_scaling(&inst).unwrap(), solve_descent(&inst).unwrap()] {
            assert_eq!(sol.cost_scale, 3);
            assert_eq!(sol.value_halves, 4);
            assert!(sol.certified(), "{:?}", sol.report.violations);
        }
    }

    #[test]
    fn infeasible_is_reported() {
        let mut inst = claw();
        inst.demands[2] = 5;
        assert!(matches!(solve_scaling(&inst), Err(MultiflowError::Infeasible { terminal: 3, .. })));
    }
}

//! Multiway cut: the half-integral relaxation from isolating cuts and its 2-approximate rounding.

use crate::lconvex::{AnchoredUnary, OneDimConvex, PairTerm, TwoSeparable};
use crate::rational::{q, qf, Q};
use crate::trees::{Color, Tree};

use super::{Instance, MultiflowError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiwayResult {
    pub kappa: Vec<i64>,
    /// Disjoint minimal minimum isolating cuts, one per terminal index.
    pub cuts: Vec<Vec<usize>>,
    /// `½ Σ κ_s`.
    pub relaxation: Q,
    /// Tree vertex of every non-terminal in the relaxation minimizer.
    pub relaxation_point: Vec<usize>,
    /// Terminal index owning each node after rounding.
    pub assignment: Vec<usize>,
    pub rounded_value: Q,
    /// Capacity of the edges cut by `assignment`, computed directly.
    pub cut_capacity: i64,
}

fn linear(half_cap: Q) -> OneDimConvex {
    OneDimConvex::linear(half_cap, Q::from(0), 5)
}

/// The multiway objective on the star whose leaves are the terminals (leaf `s + 1` for terminal
/// index `s`) and whose White center is shared. Variables are the non-terminals, in node order;
/// the second value lists them.
pub fn multiway_objective(inst: &Instance) -> Result<(TwoSeparable, Vec<usize>), MultiflowError> {
    inst.validate()?;
    let k = inst.terminals.len();
    if k < 2 {
        return Err(MultiflowError::InvalidInstance("multiway cut needs two terminals".into()));
    }
    let vars: Vec<usize> = (0..inst.n).filter(|&v| !inst.is_terminal(v)).collect();
    let var_of = |v: usize| vars.iter().position(|&w| w == v);
    let mut omega = TwoSeparable::new(Tree::star(k, Color::White), vars.len());
    for e in &inst.edges {
        let half = qf(e.cap, 2);
        match (inst.terminal_index(e.u), inst.terminal_index(e.v)) {
            (Some(_), Some(_)) => omega.constant += q(e.cap),
            (Some(s), None) | (None, Some(s)) => {
                let other = if inst.is_terminal(e.u) { e.v } else { e.u };
                omega.anchored_unary.push(AnchoredUnary {
                    var: var_of(other).unwrap(),
                    anchor: s + 1,
                    h: linear(half),
                });
            }
            (None, None) => omega.pairs.push(PairTerm {
                i: var_of(e.u).unwrap(),
                j: var_of(e.v).unwrap(),
                h: linear(half),
            }),
        }
    }
    Ok((omega, vars))
}

/// Solves the relaxation exactly from isolating cuts and rounds it toward the terminal with
/// the largest isolating cut.
pub fn multiway_cut(inst: &Instance) -> Result<MultiwayResult, MultiflowError> {
    let (omega, vars) = multiway_objective(inst)?;
    let k = inst.terminals.len();
    let mut kappa = Vec::with_capacity(k);
    let mut cuts = Vec::with_capacity(k);
    for s in 0..k {
        let (value, cut) = inst.isolating_cut(s, |e| inst.edges[e].cap)?;
        kappa.push(value);
        cuts.push(cut);
    }
    let mut owners = vec![0usize; inst.n];
    for cut in &cuts {
        for &v in cut {
            owners[v] += 1;
        }
    }
    for cut in &mut cuts {
        cut.retain(|&v| owners[v] == 1);
    }
    let mut relaxation_point = vec![0usize; vars.len()];
    for (s, cut) in cuts.iter().enumerate() {
        for &v in cut {
            if let Some(x) = vars.iter().position(|&w| w == v) {
                relaxation_point[x] = s + 1;
            }
        }
    }
    let relaxation = qf(kappa.iter().sum(), 2);
    let top = (0..k).max_by_key(|&s| (kappa[s], std::cmp::Reverse(s))).unwrap();
    let rounded = omega.two_approx_round(&relaxation_point, top + 1)?;
    let rounded_value = omega.eval(&rounded)?.finite().expect("finite objective");
    let mut assignment = vec![0usize; inst.n];
    for (s, &t) in inst.terminals.iter().enumerate() {
        assignment[t] = s;
    }
    for (x, &v) in vars.iter().enumerate() {
        assignment[v] = rounded[x] - 1;
    }
    let cut_capacity = inst
        .edges
        .iter()
        .filter(|e| assignment[e.u] != assignment[e.v])
        .map(|e| e.cap)
        .sum();
    Ok(MultiwayResult {
        kappa,
        cuts,
        relaxation,
        relaxation_point,
        assignment,
        rounded_value,
        cut_capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn claw_relaxation_and_rounding() {
        let res = multiway_cut(&claw()).unwrap();
        assert_eq!(res.relaxation, qf(3, 2));
        assert_eq!(res.relaxation_point, vec![0]);
        assert_eq!(res.rounded_value, q(2));
        assert_eq!(res.cut_capacity, 2);
        assert_eq!(res.assignment[0], 0);
    }

    #[test]
    fn relaxation_value_matches_objective() {
        for inst in [claw(), triangle(), square()] {
            let (omega, _) = multiway_objective(&inst).unwrap();
            let res = multiway_cut(&inst).unwrap();
            let at = omega.eval(&res.relaxation_point).unwrap().finite().unwrap();
            assert_eq!(at, res.relaxation);
            assert_eq!(q(res.cut_capacity), res.rounded_value);
            assert!(res.rounded_value <= q(2) * res.relaxation);
        }
    }
}

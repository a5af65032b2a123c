//! Minimum-cost maximum free multiflows through node demands.

use crate::rational::{qf, Q};

use super::{solve_scaling, Edge, FlowPath, Instance, Multiflow, MultiflowError, Problem, Solution};

/// The node-demand instance equivalent to a maximum free multiflow instance: every terminal
/// `s` hangs off a new node `s̄` by an edge of capacity `κ_s` and cost 0, and demands `κ_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub instance: Instance,
    pub kappa: Vec<i64>,
    /// `s̄` for every terminal index.
    pub bar: Vec<usize>,
    /// Edges below this index are the original ones, in the original order.
    pub original_edges: usize,
}

pub fn reduce_mcmf(inst: &Instance) -> Result<Reduction, MultiflowError> {
    let mut base = inst.clone();
    base.demands = vec![0; inst.terminals.len()];
    base.validate()?;
    let kappa = base.kappas()?;
    let bar: Vec<usize> = (0..inst.terminals.len()).map(|k| inst.n + k).collect();
    let remap = |v: usize| inst.terminal_index(v).map_or(v, |k| bar[k]);
    let mut edges: Vec<Edge> = inst
        .edges
        .iter()
        .map(|e| Edge {
            u: remap(e.u),
            v: remap(e.v),
            ..*e
        })
        .collect();
    for (k, &s) in inst.terminals.iter().enumerate() {
        edges.push(Edge {
            u: s,
            v: bar[k],
            cap: kappa[k],
            cost: 0,
        });
    }
    Ok(Reduction {
        instance: Instance {
            n: inst.n + inst.terminals.len(),
            terminals: inst.terminals.clone(),
            edges,
            demands: kappa.clone(),
            problem: Problem::N,
        },
        kappa,
        bar,
        original_edges: inst.edges.len(),
    })
}

/// `½ Σ_s κ_s`.
pub fn lovasz_cherkassky_value(inst: &Instance) -> Result<Q, MultiflowError> {
    let mut base = inst.clone();
    base.demands = vec![0; inst.terminals.len()];
    base.validate()?;
    Ok(qf(base.kappas()?.iter().sum(), 2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McmfSolution {
    pub reduction: Reduction,
    /// Solution of the reduced node-demand instance.
    pub reduced: Solution,
    /// The same flow on the original network after contracting every `s s̄`.
    pub multiflow: Multiflow,
    pub value_halves: i64,
    pub cost_halves: i64,
}

pub fn solve_mcmf(inst: &Instance) -> Result<McmfSolution, MultiflowError> {
    let reduction = reduce_mcmf(inst)?;
    let reduced = solve_scaling(&reduction.instance)?;
    let back = |v: usize| {
        if v >= inst.n {
            inst.terminals[v - inst.n]
        } else {
            v
        }
    };
    let paths = reduced
        .multiflow
        .paths
        .iter()
        .map(|p| {
            let mut nodes: Vec<usize> = Vec::with_capacity(p.nodes.len());
            let mut edges = Vec::with_capacity(p.edges.len());
            for (x, &v) in p.nodes.iter().enumerate() {
                let v = back(v);
                if nodes.last() != Some(&v) {
                    if x > 0 {
                        edges.push(p.edges[x - 1]);
                    }
                    nodes.push(v);
                }
            }
            FlowPath {
                nodes,
                edges,
                lambda_halves: p.lambda_halves,
            }
        })
        .collect();
    let mut multiflow = Multiflow { paths };
    multiflow.canonicalize();
    let value_halves = multiflow.value_halves();
    let cost_halves = reduced.value_halves;
    Ok(McmfSolution {
        reduction,
        reduced,
        multiflow,
        value_halves,
        cost_halves,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use super::*;
    use crate::rational::q;

    #[test]
    fn claw_reduction() {
        let mut inst = claw();
        inst.problem = Problem::Mcmf;
        let red = reduce_mcmf(&inst).unwrap();
        assert_eq!(red.instance.n, 7);
        assert_eq!(red.instance.demands, vec![1, 1, 1]);
        assert_eq!(red.instance.edges[0], Edge { u: 0, v: 4, cap: 1, cost: 1 });
        assert_eq!(red.instance.edges[3], Edge { u: 1, v: 4, cap: 1, cost: 0 });
    }

    #[test]
    fn isolated_terminal() {
        let mut inst = claw();
        inst.n = 5;
        inst.terminals.push(4);
        inst.demands.push(0);
        let red = reduce_mcmf(&inst).unwrap();
        assert_eq!(red.kappa, vec![1, 1, 1, 0]);
    }

    #[test]
    fn maximum_value_attained() {
        for inst in [claw(), triangle(), square()] {
            let sol = solve_mcmf(&inst).unwrap();
            assert_eq!(qf(sol.value_halves, 2), lovasz_cherkassky_value(&inst).unwrap());
            assert!(sol.reduced.certified());
            assert_eq!(
                flow_support(&inst, &sol.multiflow).unwrap().iter().zip(&inst.edges).map(|(x, e)| x * e.cost).sum::<i64>(),
                sol.cost_halves
            );
        }
        assert_eq!(lovasz_cherkassky_value(&triangle()).unwrap(), q(3));
    }
}

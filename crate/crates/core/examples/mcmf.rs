//! Maximum free multiflow of minimum cost. The flow value meets the isolating-cut bound.

use treeflow::multiflow::{lovasz_cherkassky_value, solve_mcmf, Edge, Instance, Problem};
use treeflow::rational::halves_to_decimal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |u, v, cap, cost| Edge { u, v, cap, cost };
    let inst = Instance {
        n: 6,
        terminals: vec![0, 1, 2],
        edges: vec![e(0, 3, 2, 1), e(1, 3, 1, 1), e(2, 4, 2, 2), e(3, 4, 2, 1), e(4, 5, 1, 1), e(5, 1, 1, 3), e(0, 5, 1, 4)],
        demands: vec![0, 0, 0],
        problem: Problem::Mcmf,
    };
    let m = solve_mcmf(&inst)?;
    println!("isolating cuts {:?}, bound {}", m.reduction.kappa, lovasz_cherkassky_value(&inst)?);
    println!("flow value {}, cost {}", halves_to_decimal(m.value_halves), halves_to_decimal(m.cost_halves));
    for p in &m.multiflow.paths {
        println!("  {} along {:?}", halves_to_decimal(p.lambda_halves), p.nodes);
    }
    Ok(())
}

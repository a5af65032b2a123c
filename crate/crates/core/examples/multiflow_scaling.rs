//! Solves a node-demand multiflow instance with the cost-scaling algorithm and prints the
//! phases, the flow paths and the certificate.

use treeflow::gen::{random_instance, rng, InstanceParams};
use treeflow::multiflow::{solve_scaling, Edge, Instance, Problem};
use treeflow::rational::halves_to_decimal;

fn show(name: &str, inst: &Instance) -> Result<(), Box<dyn std::error::Error>> {
    let sol = solve_scaling(inst)?;
    println!("== {name}: cost {} certified {}", halves_to_decimal(sol.value_halves), sol.certified());
    if let Some(stats) = &sol.scaling {
        for p in &stats.phases {
            println!("   phase {:>2}: {} rungs, {} steps", p.sigma, p.rungs, p.steps);
        }
        println!("   {} flow computations, per-phase budget {}", stats.flow_computations, stats.budget);
    }
    for path in &sol.multiflow.paths {
        println!("   {} x {:?}", halves_to_decimal(path.lambda_halves), path.nodes);
    }
    let heights: Vec<String> = sol
        .potential
        .iter()
        .map(|p| match p.leg {
            Some(leg) => format!("{}@{}", halves_to_decimal(p.height), inst.terminals[leg]),
            None => "0".into(),
        })
        .collect();
    println!("   potential {}", heights.join(" "));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |u, v, cap, cost| Edge { u, v, cap, cost };
    // K_{2,3}-like network with two hubs and three terminals
    let hubs = Instance {
        n: 5,
        terminals: vec![2, 3, 4],
        edges: vec![e(0, 2, 2, 1), e(0, 3, 1, 2), e(0, 4, 2, 1), e(1, 2, 1, 3), e(1, 3, 2, 1), e(1, 4, 1, 1)],
        demands: vec![2, 2, 1],
        problem: Problem::N,
    };
    show("two hubs", &hubs)?;

    let params = InstanceParams { nodes: 9, terminals: 4, max_cap: 4, max_cost: 6, max_grid: u128::MAX };
    show("random seed 11", &random_instance(&mut rng(11), &params))?;
    Ok(())
}

//! Multiway cut: the relaxation over a star is solved exactly by isolating cuts and rounded to a
//! partition costing at most twice the optimum.

use treeflow::multiflow::{multiway_cut, Edge, Instance, Problem};
use treeflow::oracles::{brute_force_multiway, OracleBudget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |u, v, cap| Edge { u, v, cap, cost: 0 };
    let inst = Instance {
        n: 7,
        terminals: vec![0, 1, 2],
        edges: vec![e(0, 3, 3), e(1, 4, 2), e(2, 5, 2), e(3, 4, 1), e(4, 5, 1), e(3, 5, 1), e(3, 6, 2), e(6, 4, 1)],
        demands: vec![0, 0, 0],
        problem: Problem::Multiway,
    };
    let res = multiway_cut(&inst)?;
    println!("kappa {:?}", res.kappa);
    println!("relaxation {}", res.relaxation);
    println!("assignment {:?}, rounded {} (cut capacity {})", res.assignment, res.rounded_value, res.cut_capacity);
    let (label, opt) = brute_force_multiway(&inst, &OracleBudget::default())?;
    println!("optimum {opt} with labels {label:?}");
    Ok(())
}

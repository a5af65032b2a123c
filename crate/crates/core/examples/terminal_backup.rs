//! Starting from an optimal half-integral support, pins fractional edges to integers while the
//! double cover still carries a consistent circulation.

use treeflow::multiflow::{fix_half_integral, solve_scaling, Edge, Instance, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |u, v, cap, cost| Edge { u, v, cap, cost };
    // two hubs serving three terminals
    let inst = Instance {
        n: 5,
        terminals: vec![2, 3, 4],
        edges: vec![e(0, 2, 2, 1), e(0, 3, 1, 2), e(0, 4, 2, 1), e(1, 2, 1, 3), e(1, 3, 2, 1), e(1, 4, 1, 1)],
        demands: vec![2, 2, 1],
        problem: Problem::N,
    };
    let sol = solve_scaling(&inst)?;
    println!("optimal support (halves) {:?}", sol.support_halves);
    let report = fix_half_integral(&inst, &sol.support_halves, &sol.potential)?;
    println!("pinned (edge, units) {:?}", report.fixed);
    println!("left fractional {:?}", report.unfixed);
    println!("final support (halves) {:?} after {} circulation checks", report.x_tilde_halves, report.circulation_checks);
    let cost: i64 = report.x_tilde_halves.iter().zip(&inst.edges).map(|(x, e)| x * e.cost).sum();
    assert_eq!(cost, sol.value_halves);
    println!("cost unchanged: {} halves", cost);
    Ok(())
}

//! Steepest descent on a 2-separable L-convex function over a tree, printing every local move.

use treeflow::lconvex::{AnchoredUnary, OneDimConvex, PairTerm, TwoSeparable};
use treeflow::oracles::{brute_force_lconvex, distance_to_optima, OracleBudget};
use treeflow::rational::q;
use treeflow::trees::Tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a spider with three legs of length 2 around vertex 0
    let tree = Tree::new(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)], 0)?;
    let mut omega = TwoSeparable::new(tree, 2);
    let pull = |slope: i64| OneDimConvex::linear(q(slope), q(0), 16);
    omega.anchored_unary.push(AnchoredUnary { var: 0, anchor: 2, h: pull(3) });
    omega.anchored_unary.push(AnchoredUnary { var: 1, anchor: 6, h: pull(1) });
    omega.pairs.push(PairTerm { i: 0, j: 1, h: pull(2).evenized() });
    omega.check_lconvex()?;

    let start = vec![4, 4];
    let (x, trace) = omega.steepest_descent(&start)?;
    for (k, (p, side)) in trace.iterates.iter().zip(&trace.sides).enumerate() {
        println!("step {k}: {p:?} value {} then {side:?}", trace.values[k]);
    }
    println!("minimizer {x:?}, value {}", omega.eval(&x)?.finite().unwrap());

    let budget = OracleBudget::default();
    let (_, best) = brute_force_lconvex(&omega, &budget)?;
    let d = distance_to_optima(&omega, &start, &budget)?;
    println!("global minimum {best}; {} steps from a start at distance {d}", trace.steps());
    Ok(())
}

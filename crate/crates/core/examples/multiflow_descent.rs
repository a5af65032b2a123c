//! The plain descent solver: every step is a minimum cut in the double cover, and the change in
//! the dual objective equals the cut capacity minus the lower-bound total.

use treeflow::multiflow::{solve_descent, solve_scaling, Edge, Instance, Problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |u, v| Edge { u, v, cap: 1, cost: 1 };
    let square = Instance {
        n: 4,
        terminals: vec![0, 1, 2, 3],
        edges: vec![e(0, 1), e(1, 2), e(2, 3), e(3, 0)],
        demands: vec![1, 1, 1, 1],
        problem: Problem::N,
    };
    let sol = solve_descent(&square)?;
    let stats = sol.descent.as_ref().expect("descent statistics");
    for (k, s) in stats.steps.iter().enumerate() {
        println!(
            "step {k}: {} half, cut {} base {}, omega {} -> {} (identity {})",
            if s.integral_half { "integral" } else { "fractional" },
            s.cut,
            s.base,
            s.omega_before,
            s.omega_after,
            s.identity_holds()
        );
    }
    let scaled = solve_scaling(&square)?;
    println!("descent {} halves, scaling {} halves", sol.value_halves, scaled.value_halves);
    assert_eq!(sol.value_halves, scaled.value_halves);
    Ok(())
}

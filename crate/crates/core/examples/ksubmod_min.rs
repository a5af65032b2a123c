//! Minimizes a small sum of basic k-submodular terms by one minimum cut and checks it against
//! exhaustive enumeration.

use treeflow::ksubmod::{brute_force_min, build_network, minimize, TermKind, TermSum};
use treeflow::rational::{parse_ext, q, qf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // three variables over S_2, S_3, S_2
    let mut f = TermSum::new(vec![2, 3, 2]);
    f.push(TermKind::Mu { i: 0, j: 1, a: 1, b: 2 }, q(2))
        .push(TermKind::Delta { i: 0, j: 2, perm: vec![0, 2, 1] }, qf(3, 2))
        .push(TermKind::Epsilon { var: 1, a: 3 }, q(1))
        .push(TermKind::Theta { var: 2, a: 1 }, q(1))
        .push(
            TermKind::Unary {
                var: 1,
                table: ["2", "0", "5", "inf"].iter().map(|s| parse_ext(s)).collect::<Result<_, _>>()?,
            },
            q(1),
        );
    f.validate()?;

    let rep = build_network(&f)?;
    println!("network: {} nodes, {} arcs, scale {}", rep.net.node_count(), rep.net.arc_count(), rep.scale);

    let (x, v) = minimize(&f)?;
    let (y, w) = brute_force_min(&f)?;
    println!("cut minimizer {x:?} with value {v}");
    println!("enumerated minimizer {y:?} with value {w}");
    assert_eq!(v, w);
    Ok(())
}

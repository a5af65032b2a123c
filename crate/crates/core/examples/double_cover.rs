//! Builds the double cover of an instance at a given potential, finds a circulation through the
//! lower-bound reduction and reads the multiflow off its cycles.

use treeflow::multiflow::{
    build_double_cover, circulation_via_tilde, extract_multiflow, scaling_potential, ArcRole, Edge, Instance,
    Problem, TildeNetwork,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |v| Edge { u: 0, v, cap: 1, cost: 1 };
    let claw = Instance { n: 4, terminals: vec![1, 2, 3], edges: vec![e(1), e(2), e(3)], demands: vec![1, 1, 1], problem: Problem::N };
    let (p, _) = scaling_potential(&claw)?;
    let dc = build_double_cover(&claw, &p)?;
    println!("double cover: {} nodes, {} arcs", dc.net.node_count(), dc.net.arc_count());
    for (a, role) in dc.arc_roles.iter().enumerate() {
        let arc = dc.net.arc(a);
        let kind = match role {
            ArcRole::Edge { edge, .. } => format!("edge {edge}"),
            ArcRole::Branch { node, .. } => format!("branch at {node}"),
            ArcRole::Terminal(s) => format!("terminal {s}"),
        };
        println!("  {:>2} -> {:>2}  [{}, {:?}]  {kind}", arc.tail, arc.head, arc.lower, arc.upper);
    }
    let tilde = TildeNetwork::new(&dc)?;
    println!("reduction: {} nodes, lower-bound total {}", tilde.net.node_count(), tilde.base);
    let phi = circulation_via_tilde(&dc)?;
    let f = extract_multiflow(&dc, &phi)?;
    for path in &f.paths {
        println!("path {:?} with {} halves", path.nodes, path.lambda_halves);
    }
    Ok(())
}

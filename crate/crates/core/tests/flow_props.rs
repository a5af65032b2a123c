use proptest::prelude::*;
use treeflow::flow::{Cap, DirectedNetwork};

fn network() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
    (3usize..8).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n, 0i64..6), 1..18)))
}

fn build(n: usize, arcs: &[(usize, usize, i64)]) -> DirectedNetwork {
    let mut g = DirectedNetwork::new(n);
    for &(u, v, c) in arcs {
        if u != v {
            g.add_arc(u, v, 0, c).unwrap();
        }
    }
    g
}

proptest! {
    #[test]
    fn max_flow_equals_min_cut_by_enumeration((n, arcs) in network()) {
        let g = build(n, &arcs);
        let (s, t) = (0, n - 1);
        let res = g.max_flow(s, t).unwrap();
        prop_assert!(g.within_bounds(&res.flow));
        let mut best = i64::MAX;
        for mask in 0u32..(1 << n) {
            if mask & 1 == 1 && mask >> t & 1 == 0 {
                let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                best = best.min(g.cut_capacity(&side));
            }
        }
        prop_assert_eq!(res.value, best);
        prop_assert_eq!(g.cut_capacity(&res.source_side), best);
    }

    #[test]
    fn minimal_cut_is_contained_in_every_min_cut((n, arcs) in network()) {
        let g = build(n, &arcs);
        let (s, t) = (0, n - 1);
        let value = g.max_flow(s, t).unwrap().value;
        let minimal = g.minimal_min_cut(s, t).unwrap();
        for mask in 0u32..(1 << n) {
            if mask & 1 == 1 && mask >> t & 1 == 0 {
                let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                if g.cut_capacity(&side) == value {
                    prop_assert!(minimal.iter().all(|&v| side[v]));
                }
            }
        }
    }

    #[test]
    fn circulations_respect_bounds_and_decompose(cycle_len in 2usize..6, lower in 0i64..4, slack in 0i64..3) {
        let mut g = DirectedNetwork::new(cycle_len);
        for v in 0..cycle_len {
            g.add_arc(v, (v + 1) % cycle_len, lower, lower + slack).unwrap();
        }
        g.add_arc(0, 1, 0, Cap::Inf).unwrap();
        let phi = g.feasible_circulation().unwrap();
        g.check_circulation(&phi).unwrap();
        let cycles = g.decompose_circulation(&phi).unwrap();
        let mut rebuilt = vec![0; g.arc_count()];
        for c in &cycles {
            prop_assert!(c.coefficient > 0);
            for &a in &c.arcs {
                rebuilt[a] += c.coefficient;
            }
        }
        prop_assert_eq!(rebuilt, phi);
    }
}

//! Seeded random instances for tests, examples and the `gen` subcommand.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ksubmod::{TermKind, TermSum};
use crate::lconvex::{AnchoredPair, AnchoredUnary, OneDimConvex, PairTerm, TwoSeparable, UnaryTerm};
use crate::multiflow::{Edge, Instance, Problem};
use crate::rational::{q, qf, Ext, Q};
use crate::trees::Tree;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceParams {
    pub nodes: usize,
    pub terminals: usize,
    pub max_cap: i64,
    pub max_cost: i64,
    /// Extra edges beyond a spanning tree are added only while `Π(2c + 1)` stays below this.
    pub max_grid: u128,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            nodes: 6,
            terminals: 3,
            max_cap: 3,
            max_cost: 3,
            max_grid: 2_000_000,
        }
    }
}

/// A connected random network with demands `r(s) ≤ κ_s`, hence feasible. Costs may be 0.
pub fn random_instance(rng: &mut impl Rng, params: &InstanceParams) -> Instance {
    let n = params.nodes.max(2);
    let k = params.terminals.clamp(1, n);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let mut terminals = nodes[..k].to_vec();
    terminals.sort_unstable();
    let edge = |rng: &mut dyn rand::RngCore, u: usize, v: usize| Edge {
        u,
        v,
        cap: rng.gen_range(1..=params.max_cap.max(1)),
        cost: rng.gen_range(0..=params.max_cost.max(0)),
    };
    let mut edges: Vec<Edge> = Vec::with_capacity(2 * n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(edge(rng, u, v));
    }
    let mut grid: u128 = edges.iter().map(|e| 2 * e.cap as u128 + 1).product();
    for _ in 0..rng.gen_range(0..=n) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let e = edge(rng, u, v);
        let next = grid * (2 * e.cap as u128 + 1);
        if next <= params.max_grid {
            grid = next;
            edges.push(e);
        }
    }
    let mut inst = Instance {
        n,
        terminals,
        edges,
        demands: vec![0; k],
        problem: Problem::N,
    };
    let kappa = inst.kappas().expect("generated instance is valid");
    inst.demands = kappa.iter().map(|&c| rng.gen_range(0..=c)).collect();
    inst
}

/// A unary table over `S_k` satisfying `f(a) + f(b) ≥ 2 f(0)` for `a ≠ b`, sometimes with
/// forbidden values.
fn random_unary(rng: &mut impl Rng, k: usize) -> Vec<Ext> {
    let base: i64 = rng.gen_range(0..=4);
    let mut deltas: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=6)).collect();
    if k >= 1 && rng.gen_bool(0.4) {
        let floor = if k >= 2 { *deltas.iter().min().unwrap() } else { 4 };
        let a = rng.gen_range(0..k);
        deltas[a] = -rng.gen_range(0..=floor.min(base + 2));
    }
    let mut table = vec![Ext::Finite(qf(base, 2))];
    for d in deltas {
        if d > 0 && rng.gen_bool(0.1) {
            table.push(Ext::Inf);
        } else {
            table.push(Ext::Finite(qf(base + d, 2)));
        }
    }
    table
}

/// Random sums of basic k-submodular terms: `n ≤ max_vars`, `k_i ≤ max_k`, at most `max_terms`
/// terms with weights in `{½, 1, …, 4}`.
pub fn random_term_sum(rng: &mut impl Rng, max_vars: usize, max_k: usize, max_terms: usize) -> TermSum {
    let n = rng.gen_range(1..=max_vars.max(1));
    let arities: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_k.max(1))).collect();
    let mut f = TermSum::new(arities.clone());
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let weight = qf(rng.gen_range(1..=8), 2);
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        let pairable = n >= 2;
        if pairable {
            while j == i {
                j = rng.gen_range(0..n);
            }
        }
        let kind = match rng.gen_range(0..if pairable { 5 } else { 3 }) {
            0 => TermKind::Unary { var: i, table: random_unary(rng, arities[i]) },
            1 => TermKind::Epsilon { var: i, a: rng.gen_range(1..=arities[i]) },
            2 => TermKind::Theta { var: i, a: rng.gen_range(0..=arities[i]) },
            3 if arities[i] == arities[j] => {
                let mut tail: Vec<usize> = (1..=arities[i]).collect();
                tail.shuffle(rng);
                let mut perm = vec![0];
                perm.extend(tail);
                TermKind::Delta { i, j, perm }
            }
            _ => TermKind::Mu {
                i,
                j,
                a: rng.gen_range(0..=arities[i]),
                b: rng.gen_range(0..=arities[j]),
            },
        };
        let w = if matches!(kind, TermKind::Unary { .. }) { Q::from(1) } else { weight };
        f.push(kind, w);
    }
    f.offset = qf(rng.gen_range(-4..=4), 2);
    f
}

/// A random tree on `n` vertices, vertex 0 Black.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Tree {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Tree::new(n.max(1), &edges, 0).expect("random parent links form a tree")
}

/// Nondecreasing convex `h` on `0..len` with small integer increments.
pub fn random_convex(rng: &mut impl Rng, len: usize) -> OneDimConvex {
    let mut steps: Vec<i64> = (1..len).map(|_| rng.gen_range(0..=4)).collect();
    steps.sort_unstable();
    let mut v = q(rng.gen_range(0..=3));
    let mut values = vec![v];
    for s in steps {
        v += q(s);
        values.push(v);
    }
    OneDimConvex::new(values)
}

/// A random 2-separable objective on a random tree. With `even` every pair term is even, so
/// the result is L-convex; otherwise it is only L-extendable and [`TwoSeparable::evenize`]
/// gives its relaxation.
pub fn random_two_separable(rng: &mut impl Rng, max_tree: usize, max_vars: usize, even: bool) -> TwoSeparable {
    let nv = rng.gen_range(2..=max_tree.max(2));
    let tree = random_tree(rng, nv);
    let n = rng.gen_range(1..=max_vars.max(1));
    let len = 2 * nv + 2;
    let shape = |h: OneDimConvex| if even { h.evenized() } else { h };
    let blacks: Vec<usize> = (0..nv).filter(|&v| tree.is_black(v)).collect();
    let whites: Vec<usize> = (0..nv).filter(|&v| tree.is_white(v)).collect();
    let mut omega = TwoSeparable::new(tree, n);
    for var in 0..n {
        if rng.gen_bool(0.7) {
            let center = rng.gen_range(0..nv);
            let h = random_convex(rng, len);
            let radius = if rng.gen_bool(0.3) { rng.gen_range(1..nv) } else { nv };
            let table = (0..nv)
                .map(|v| {
                    let d = omega.tree.distance(v, center);
                    if d <= radius { Ext::Finite(h.values[d]) } else { Ext::Inf }
                })
                .collect();
            omega.unary.push(UnaryTerm { var, table });
        }
        if rng.gen_bool(0.5) {
            let anchor = *blacks.choose(rng).unwrap();
            omega.anchored_unary.push(AnchoredUnary { var, anchor, h: shape(random_convex(rng, len)) });
        }
    }
    for _ in 0..rng.gen_range(0..=n + 1) {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        if rng.gen_bool(0.7) {
            omega.pairs.push(PairTerm { i, j, h: shape(random_convex(rng, len)) });
        } else {
            let pool = if whites.is_empty() || rng.gen_bool(0.5) { &blacks } else { &whites };
            let z = *pool.choose(rng).unwrap();
            let w = *pool.choose(rng).unwrap();
            omega.anchored_pairs.push(AnchoredPair { i, j, z, w, h: shape(random_convex(rng, len)) });
        }
    }
    omega.constant = q(rng.gen_range(0..=2));
    omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksubmod::check_ksubmodular;

    #[test]
    fn instances_are_feasible_and_seeded() {
        let p = InstanceParams::default();
        let a = random_instance(&mut rng(7), &p);
        let b = random_instance(&mut rng(7), &p);
        assert_eq!(a, b);
        for seed in 0..20 {
            let inst = random_instance(&mut rng(seed), &p);
            assert!(crate::multiflow::check_feasibility(&inst).unwrap().is_feasible());
        }
    }

    #[test]
    fn term_sums_are_k_submodular() {
        let mut r = rng(3);
        for _ in 0..50 {
            let f = random_term_sum(&mut r, 3, 3, 6);
            f.validate().unwrap();
            assert!(check_ksubmodular(&f.arities, |x| f.eval(x).unwrap()).unwrap());
        }
    }

    #[test]
    fn objectives_are_lconvex_when_even() {
        let mut r = rng(11);
        for _ in 0..50 {
            random_two_separable(&mut r, 7, 3, true).check_lconvex().unwrap();
            random_two_separable(&mut r, 7, 3, false).evenize().check_lconvex().unwrap();
        }
    }
}

//! Exhaustive reference solvers. They work from problem definitions alone and share nothing
//! with the fast solvers except the input types.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::lconvex::TwoSeparable;
use crate::multiflow::Instance;
use crate::rational::{Ext, Q};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration of {size} candidates exceeds the budget of {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("time budget exhausted")]
    TimedOut,
    #[error("no feasible candidate")]
    Infeasible,
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_enumeration: u128,
    pub timeout: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_enumeration: 10_000_000,
            timeout: Some(Duration::from_secs(600)),
        }
    }
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
    ticks: u64,
}

impl Clock {
    fn new(budget: &OracleBudget) -> Self {
        Clock {
            start: Instant::now(),
            limit: budget.timeout,
            ticks: 0,
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(4096) {
            if let Some(limit) = self.limit {
                if self.start.elapsed() > limit {
                    return Err(OracleError::TimedOut);
                }
            }
        }
        Ok(())
    }
}

fn check_size(size: Option<u128>, budget: &OracleBudget) -> Result<(), OracleError> {
    match size {
        Some(s) if s <= budget.max_enumeration => Ok(()),
        Some(s) => Err(OracleError::TooLarge {
            size: s,
            cap: budget.max_enumeration,
        }),
        None => Err(OracleError::TooLarge {
            size: u128::MAX,
            cap: budget.max_enumeration,
        }),
    }
}

/// How the cut constraints of (L) are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutCheck {
    /// Every node set containing one terminal and no other.
    Subsets,
    /// A maximum flow from each terminal to the others.
    MinCut,
    /// Subsets up to 12 nodes, min-cut beyond.
    Auto,
}

fn terminal_of(inst: &Instance) -> Vec<Option<usize>> {
    let mut out = vec![None; inst.n];
    for (k, &t) in inst.terminals.iter().enumerate() {
        out[t] = Some(k);
    }
    out
}

/// Edge lists of every isolating node set, tagged with the terminal index.
fn isolating_sets(inst: &Instance) -> Vec<(usize, Vec<usize>)> {
    let owner = terminal_of(inst);
    let free: Vec<usize> = (0..inst.n).filter(|&v| owner[v].is_none()).collect();
    let mut out = Vec::new();
    for (k, &s) in inst.terminals.iter().enumerate() {
        for mask in 0u64..(1u64 << free.len()) {
            let mut inside = vec![false; inst.n];
            inside[s] = true;
            for (b, &v) in free.iter().enumerate() {
                inside[v] = mask >> b & 1 == 1;
            }
            let crossing = (0..inst.edges.len())
                .filter(|&e| inside[inst.edges[e].u] != inside[inst.edges[e].v])
                .collect();
            out.push((k, crossing));
        }
    }
    out
}

/// Maximum flow value by shortest augmenting paths on a dense capacity matrix.
fn dense_max_flow(mut cap: Vec<Vec<i64>>, s: usize, t: usize) -> i64 {
    let n = cap.len();
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut push = i64::MAX;
        let mut v = t;
        while v != s {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            cap[prev[v]][v] -= push;
            cap[v][prev[v]] += push;
            v = prev[v];
        }
        total += push;
    }
}

/// Whether every terminal's isolating cuts carry its demand under edge values `x` (halves).
fn meets_demands_by_flow(inst: &Instance, x: &[i64]) -> bool {
    let n = inst.n + 1;
    let mut base = vec![vec![0i64; n]; n];
    for (e, edge) in inst.edges.iter().enumerate() {
        base[edge.u][edge.v] += x[e];
        base[edge.v][edge.u] += x[e];
    }
    let big = x.iter().sum::<i64>() + 1;
    inst.terminals.iter().enumerate().all(|(k, &s)| {
        let mut cap = base.clone();
        for (other, &t) in inst.terminals.iter().enumerate() {
            if other != k {
                cap[t][inst.n] = big;
            }
        }
        dense_max_flow(cap, s, inst.n) >= 2 * inst.demands[k]
    })
}

/// Exhaustive minimum of (L) over supports in `{0, ½, …, c(e)}`: returns the support in halves
/// (lexicographically first among minimizers) and its cost in halves.
pub fn brute_force_l(inst: &Instance, budget: &OracleBudget) -> Result<(Vec<i64>, i64), OracleError> {
    brute_force_l_with(inst, budget, CutCheck::Auto)
}

pub fn brute_force_l_with(
    inst: &Instance,
    budget: &OracleBudget,
    check: CutCheck,
) -> Result<(Vec<i64>, i64), OracleError> {
    inst.validate().map_err(|e| OracleError::Invalid(e.to_string()))?;
    let size = inst
        .edges
        .iter()
        .try_fold(1u128, |acc, e| acc.checked_mul(2 * e.cap as u128 + 1));
    check_size(size, budget)?;
    let subsets = match check {
        CutCheck::Subsets => true,
        CutCheck::MinCut => false,
        CutCheck::Auto => inst.n <= 12,
    };
    let sets = if subsets {
        let free = inst.n - inst.terminals.len();
        check_size(
            1u128.checked_shl(free as u32).map(|s| s * inst.terminals.len() as u128),
            budget,
        )?;
        isolating_sets(inst)
    } else {
        Vec::new()
    };
    let full: Vec<i64> = inst.edges.iter().map(|e| 2 * e.cap).collect();
    let feasible = |x: &[i64]| {
        if subsets {
            sets.iter()
                .all(|(k, cut)| cut.iter().map(|&e| x[e]).sum::<i64>() >= 2 * inst.demands[*k])
        } else {
            meets_demands_by_flow(inst, x)
        }
    };

    struct Search<'a, F: Fn(&[i64]) -> bool> {
        inst: &'a Instance,
        feasible: F,
        x: Vec<i64>,
        best: Option<(Vec<i64>, i64)>,
        clock: Clock,
    }
    impl<F: Fn(&[i64]) -> bool> Search<'_, F> {
        fn go(&mut self, depth: usize, cost: i64) -> Result<(), OracleError> {
            self.clock.tick()?;
            if self.best.as_ref().is_some_and(|b| cost >= b.1) {
                return Ok(());
            }
            // unassigned edges at full capacity give the most slack
            if !(self.feasible)(&self.x) {
                return Ok(());
            }
            if depth == self.inst.edges.len() {
                self.best = Some((self.x.clone(), cost));
                return Ok(());
            }
            let e = self.inst.edges[depth];
            for v in 0..=2 * e.cap {
                self.x[depth] = v;
                self.go(depth + 1, cost + v * e.cost)?;
            }
            self.x[depth] = 2 * e.cap;
            Ok(())
        }
    }
    let mut search = Search {
        inst,
        feasible,
        x: full,
        best: None,
        clock: Clock::new(budget),
    };
    search.go(0, 0)?;
    search.best.ok_or(OracleError::Infeasible)
}

/// Lexicographically first optimal assignment of nodes to terminal indices for multiway cut,
/// with the cut capacity.
pub fn brute_force_multiway(inst: &Instance, budget: &OracleBudget) -> Result<(Vec<usize>, i64), OracleError> {
    inst.validate().map_err(|e| OracleError::Invalid(e.to_string()))?;
    let k = inst.terminals.len();
    if k < 2 {
        return Err(OracleError::Invalid("multiway cut needs two terminals".into()));
    }
    let owner = terminal_of(inst);
    let free: Vec<usize> = (0..inst.n).filter(|&v| owner[v].is_none()).collect();
    check_size((k as u128).checked_pow(free.len() as u32), budget)?;
    let mut clock = Clock::new(budget);
    let mut label: Vec<usize> = owner.iter().map(|o| o.unwrap_or(0)).collect();
    let mut best: Option<(Vec<usize>, i64)> = None;
    let mut digits = vec![0usize; free.len()];
    loop {
        clock.tick()?;
        for (d, &v) in free.iter().enumerate() {
            label[v] = digits[d];
        }
        let value: i64 = inst
            .edges
            .iter()
            .filter(|e| label[e.u] != label[e.v])
            .map(|e| e.cap)
            .sum();
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((label.clone(), value));
        }
        // odometer with the last free node changing fastest
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return Ok(best.unwrap());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// All-pairs tree distances by breadth-first search.
fn tree_distances(omega: &TwoSeparable) -> Vec<Vec<usize>> {
    let n = omega.tree.len();
    (0..n)
        .map(|src| {
            let mut d = vec![usize::MAX; n];
            d[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &v in omega.tree.neighbors(u) {
                    if d[v] == usize::MAX {
                        d[v] = d[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

fn table_at(values: &[Q], t: usize) -> Result<Q, OracleError> {
    values
        .get(t)
        .copied()
        .ok_or_else(|| OracleError::Invalid(format!("distance {t} beyond a term's table")))
}

fn evaluate(omega: &TwoSeparable, d: &[Vec<usize>], x: &[usize]) -> Result<Ext, OracleError> {
    let mut total = omega.constant;
    for t in &omega.unary {
        match t.table[x[t.var]] {
            Ext::Finite(v) => total += v,
            Ext::Inf => return Ok(Ext::Inf),
        }
    }
    for t in &omega.anchored_unary {
        total += table_at(&t.h.values, d[x[t.var]][t.anchor])?;
    }
    for t in &omega.pairs {
        total += table_at(&t.h.values, d[x[t.i]][x[t.j]])?;
    }
    for t in &omega.anchored_pairs {
        total += table_at(&t.h.values, d[x[t.i]][t.z] + d[x[t.j]][t.w])?;
    }
    Ok(Ext::Finite(total))
}

/// Minimum value and every minimizer over `Tⁿ`, or over Black points only.
pub fn lconvex_minimizers(
    omega: &TwoSeparable,
    black_only: bool,
    budget: &OracleBudget,
) -> Result<(Q, Vec<Vec<usize>>), OracleError> {
    let verts: Vec<usize> = (0..omega.tree.len())
        .filter(|&v| !black_only || omega.tree.is_black(v))
        .collect();
    check_size((verts.len() as u128).checked_pow(omega.n as u32), budget)?;
    let d = tree_distances(omega);
    let mut clock = Clock::new(budget);
    let mut best: Option<(Q, Vec<Vec<usize>>)> = None;
    let mut digits = vec![0usize; omega.n];
    loop {
        clock.tick()?;
        let x: Vec<usize> = digits.iter().map(|&i| verts[i]).collect();
        if let Ext::Finite(v) = evaluate(omega, &d, &x)? {
            match &mut best {
                Some((b, list)) if v == *b => list.push(x),
                Some((b, _)) if v > *b => {}
                _ => best = Some((v, vec![x])),
            }
        }
        let mut pos = omega.n;
        loop {
            if pos == 0 {
                return best.ok_or(OracleError::Infeasible);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < verts.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Lexicographically first global minimizer over `Tⁿ`.
pub fn brute_force_lconvex(omega: &TwoSeparable, budget: &OracleBudget) -> Result<(Vec<usize>, Q), OracleError> {
    let (v, list) = lconvex_minimizers(omega, false, budget)?;
    Ok((list.into_iter().next().unwrap(), v))
}

fn linf(d: &[Vec<usize>], x: &[usize], y: &[usize]) -> usize {
    x.iter().zip(y).map(|(&a, &b)| d[a][b]).max().unwrap_or(0)
}

/// `min { max_i d(x_i, y_i) : y a global minimizer }`.
pub fn distance_to_optima(omega: &TwoSeparable, x: &[usize], budget: &OracleBudget) -> Result<usize, OracleError> {
    let (_, list) = lconvex_minimizers(omega, false, budget)?;
    let d = tree_distances(omega);
    Ok(list.iter().map(|y| linf(&d, x, y)).min().unwrap())
}

/// Some minimizer of `omega` over Black points lies in `F(x_1) × … × F(x_n)`.
pub fn check_persistency(omega: &TwoSeparable, x: &[usize], budget: &OracleBudget) -> Result<bool, OracleError> {
    let (_, list) = lconvex_minimizers(omega, true, budget)?;
    let tree = &omega.tree;
    let in_filter = |xi: usize, yi: usize| {
        yi == xi || (tree.is_white(xi) && tree.neighbors(xi).contains(&yi))
    };
    Ok(list
        .iter()
        .any(|y| x.iter().zip(y).all(|(&a, &b)| in_filter(a, b))))
}

/// Every minimizer of `relaxation` over Black points has a global minimizer within `2n`.
pub fn check_proximity(relaxation: &TwoSeparable, budget: &OracleBudget) -> Result<bool, OracleError> {
    let (_, black) = lconvex_minimizers(relaxation, true, budget)?;
    let (_, global) = lconvex_minimizers(relaxation, false, budget)?;
    let d = tree_distances(relaxation);
    let bound = 2 * relaxation.n;
    Ok(black
        .iter()
        .all(|x| global.iter().any(|y| linf(&d, x, y) <= bound)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lconvex::{AnchoredUnary, OneDimConvex};
    use crate::multiflow::{Edge, Problem};
    use crate::rational::q;
    use crate::trees::{Color, Tree};

    fn claw() -> Instance {
        let e = |v| Edge { u: 0, v, cap: 1, cost: 1 };
        Instance {
            n: 4,
            terminals: vec![1, 2, 3],
            edges: vec![e(1), e(2), e(3)],
            demands: vec![1, 1, 1],
            problem: Problem::N,
        }
    }

    #[test]
    fn golden_l_values() {
        let b = OracleBudget::default();
        assert_eq!(brute_force_l(&claw(), &b).unwrap(), (vec![2, 2, 2], 6));
        let e = |u, v| Edge { u, v, cap: 1, cost: 1 };
        let tri = Instance {
            n: 3,
            terminals: vec![0, 1, 2],
            edges: vec![e(0, 1), e(1, 2), e(0, 2)],
            demands: vec![2, 2, 2],
            problem: Problem::N,
        };
        assert_eq!(brute_force_l(&tri, &b).unwrap().1, 6);
        let mut zero = claw();
        zero.demands = vec![0; 3];
        assert_eq!(brute_force_l(&zero, &b).unwrap(), (vec![0, 0, 0], 0));
    }

    #[test]
    fn both_cut_checks_agree() {
        let b = OracleBudget::default();
        let mut inst = claw();
        inst.edges.push(Edge { u: 1, v: 2, cap: 2, cost: 3 });
        inst.demands = vec![2, 1, 1];
        let a = brute_force_l_with(&inst, &b, CutCheck::Subsets).unwrap();
        let c = brute_force_l_with(&inst, &b, CutCheck::MinCut).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn budget_refusal() {
        let tight = OracleBudget { max_enumeration: 10, timeout: None };
        assert!(matches!(brute_force_l(&claw(), &tight), Err(OracleError::TooLarge { size: 27, .. })));
    }

    #[test]
    fn multiway_on_claw() {
        let (label, v) = brute_force_multiway(&claw(), &OracleBudget::default()).unwrap();
        assert_eq!(v, 2);
        assert_eq!(label, vec![0, 0, 1, 2]);
    }

    #[test]
    fn lconvex_trivia() {
        let b = OracleBudget::default();
        let mut omega = TwoSeparable::new(Tree::path(5), 1);
        omega.anchored_unary.push(AnchoredUnary {
            var: 0,
            anchor: 3,
            h: OneDimConvex::linear(q(1), q(0), 5),
        });
        assert_eq!(brute_force_lconvex(&omega, &b).unwrap(), (vec![3], q(0)));
        let empty = TwoSeparable::new(Tree::star(3, Color::White), 0);
        assert_eq!(brute_force_lconvex(&empty, &b).unwrap(), (vec![], q(0)));
    }
}

//! Sums of basic k-submodular terms on `S_{k1} × … × S_{kn}` and their exact minimization by a
//! single minimum cut.
//!
//! Each coordinate takes values in `{0, 1, …, k_i}` where `0` is the unique minimum of the
//! poset and the nonzero values are pairwise incomparable.

use num_traits::{Signed, Zero};

use crate::flow::{Cap, DirectedNetwork, FlowError};
use crate::rational::{common_denominator, to_scaled_int, Ext, Q};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KsubError {
    #[error("every point of the domain has infinite value")]
    AllInfinite,
    #[error("unary table on variable {var} is not k-submodular")]
    NotKSubmodular { var: usize },
    #[error("term {term} has negative weight")]
    NegativeWeight { term: usize },
    #[error("term {term}: {reason}")]
    BadTerm { term: usize, reason: String },
    #[error("point does not match the domain")]
    BadPoint,
    #[error("domain has {size} points, above the enumeration cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("minimal minimum cut is not legal")]
    IllegalCut,
    #[error("capacity does not fit in 64-bit integers")]
    Overflow,
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Enumeration cap for the exhaustive routines.
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    /// Arbitrary one-variable table over `S_{k_var}` (may contain `inf`).
    Unary { var: usize, table: Vec<Ext> },
    Epsilon { var: usize, a: usize },
    Theta { var: usize, a: usize },
    /// `δ_σ(x_i, x_j)`, `perm[0] = 0`.
    Delta { i: usize, j: usize, perm: Vec<usize> },
    Mu { i: usize, j: usize, a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicTerm {
    pub kind: TermKind,
    pub weight: Q,
}

impl BasicTerm {
    pub fn new(kind: TermKind, weight: Q) -> Self {
        BasicTerm { kind, weight }
    }
}

/// Nonnegative combination of basic terms plus a constant.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TermSum {
    pub arities: Vec<usize>,
    pub terms: Vec<BasicTerm>,
    pub offset: Q,
}

pub fn epsilon(a: usize, u: usize) -> i64 {
    (a != 0 && u == a) as i64
}

pub fn theta(a: usize, u: usize) -> i64 {
    if a != 0 && u == a {
        -1
    } else if u == 0 {
        0
    } else {
        1
    }
}

pub fn mu(a: usize, b: usize, u: usize, v: usize) -> i64 {
    if (a != 0 && u == a) || (b != 0 && v == b) || (u == 0 && v == 0) {
        0
    } else if (v == 0 && u != a) || (u == 0 && v != b) {
        1
    } else {
        2
    }
}

pub fn delta(perm: &[usize], u: usize, v: usize) -> i64 {
    if v == perm[u] {
        0
    } else if u == 0 || v == 0 {
        1
    } else {
        2
    }
}

/// Componentwise meet.
pub fn meet(x: &[usize], y: &[usize]) -> Vec<usize> {
    x.iter()
        .zip(y)
        .map(|(&u, &v)| if u == v { u } else { 0 })
        .collect()
}

/// Componentwise `⊔`: the join where it exists, `0` on incomparable nonzero pairs.
pub fn square_join(x: &[usize], y: &[usize]) -> Vec<usize> {
    x.iter()
        .zip(y)
        .map(|(&u, &v)| match (u, v) {
            (0, w) | (w, 0) => w,
            (u, v) if u == v => u,
            _ => 0,
        })
        .collect()
}

impl TermKind {
    fn value(&self, x: &[usize]) -> Ext {
        match self {
            TermKind::Unary { var, table } => table[x[*var]],
            TermKind::Epsilon { var, a } => Ext::from(epsilon(*a, x[*var])),
            TermKind::Theta { var, a } => Ext::from(theta(*a, x[*var])),
            TermKind::Delta { i, j, perm } => Ext::from(delta(perm, x[*i], x[*j])),
            TermKind::Mu { i, j, a, b } => Ext::from(mu(*a, *b, x[*i], x[*j])),
        }
    }
}

impl TermSum {
    pub fn new(arities: Vec<usize>) -> Self {
        TermSum {
            arities,
            terms: Vec::new(),
            offset: Q::zero(),
        }
    }

    pub fn push(&mut self, kind: TermKind, weight: Q) -> &mut Self {
        self.terms.push(BasicTerm::new(kind, weight));
        self
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    pub fn in_domain(&self, x: &[usize]) -> bool {
        x.len() == self.arities.len() && x.iter().zip(&self.arities).all(|(&u, &k)| u <= k)
    }

    pub fn domain_size(&self) -> u128 {
        self.arities
            .iter()
            .fold(1u128, |acc, &k| acc.saturating_mul(k as u128 + 1))
    }

    pub fn eval(&self, x: &[usize]) -> Result<Ext, KsubError> {
        if !self.in_domain(x) {
            return Err(KsubError::BadPoint);
        }
        let mut total = Ext::Finite(self.offset);
        for t in &self.terms {
            total += t.kind.value(x).scale(t.weight);
        }
        Ok(total)
    }

    /// Structural checks: variable ranges, values, permutations, nonnegative weights.
    pub fn validate(&self) -> Result<(), KsubError> {
        let n = self.arities.len();
        for (idx, t) in self.terms.iter().enumerate() {
            let bad = |reason: &str| KsubError::BadTerm {
                term: idx,
                reason: reason.to_string(),
            };
            if t.weight.is_negative() {
                return Err(KsubError::NegativeWeight { term: idx });
            }
            let var_ok = |v: usize| v < n;
            match &t.kind {
                TermKind::Unary { var, table } => {
                    if !var_ok(*var) || table.len() != self.arities[*var] + 1 {
                        return Err(bad("table size does not match arity"));
                    }
                }
                TermKind::Epsilon { var, a } => {
                    if !var_ok(*var) || *a == 0 || *a > self.arities[*var] {
                        return Err(bad("epsilon needs 1 <= a <= k"));
                    }
                }
                TermKind::Theta { var, a } => {
                    if !var_ok(*var) || *a > self.arities[*var] {
                        return Err(bad("theta value out of range"));
                    }
                }
                TermKind::Delta { i, j, perm } => {
                    if !var_ok(*i) || !var_ok(*j) || i == j {
                        return Err(bad("delta needs two distinct variables"));
                    }
                    let k = self.arities[*i];
                    if self.arities[*j] != k || perm.len() != k + 1 || perm[0] != 0 {
                        return Err(bad("delta needs equal arities and a permutation fixing 0"));
                    }
                    let mut seen = vec![false; k + 1];
                    for &p in perm {
                        if p > k || seen[p] {
                            return Err(bad("delta map is not a permutation"));
                        }
                        seen[p] = true;
                    }
                }
                TermKind::Mu { i, j, a, b } => {
                    if !var_ok(*i) || !var_ok(*j) || i == j {
                        return Err(bad("mu needs two distinct variables"));
                    }
                    if *a > self.arities[*i] || *b > self.arities[*j] {
                        return Err(bad("mu value out of range"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Result of splitting a one-variable table into `θ`/`ε` form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryForm {
    pub constant: Q,
    /// `(a, weight)` of the single `θ_a` term; `None` when the weight would be zero.
    pub theta: Option<(usize, Q)>,
    pub epsilons: Vec<(usize, Q)>,
    /// Values excluded by an infinite entry.
    pub forbidden: Vec<usize>,
    /// Value the coordinate is pinned to when `f(0) = inf`.
    pub fixed: Option<usize>,
}

/// Writes a one-variable k-submodular table as
/// `f(0) + (f(0) − f(a))θ_a + Σ_{b ∉ {0, a}} (f(b) − 2f(0) + f(a))ε_b` with `a` a minimizer.
pub fn normalize_unary(table: &[Ext], var: usize) -> Result<UnaryForm, KsubError> {
    let finite: Vec<(usize, Q)> = table
        .iter()
        .enumerate()
        .filter_map(|(u, v)| v.finite().map(|f| (u, f)))
        .collect();
    let Some(&(_, min_val)) = finite.iter().min_by_key(|(_, v)| *v) else {
        return Err(KsubError::AllInfinite);
    };
    let Some(f0) = table[0].finite() else {
        if finite.len() > 1 {
            return Err(KsubError::NotKSubmodular { var });
        }
        let (u, v) = finite[0];
        return Ok(UnaryForm {
            constant: v,
            theta: None,
            epsilons: vec![],
            forbidden: vec![],
            fixed: Some(u),
        });
    };
    for (x, &(a, fa)) in finite.iter().enumerate() {
        for &(b, fb) in &finite[x + 1..] {
            if a != 0 && b != 0 && fa + fb < f0 + f0 {
                return Err(KsubError::NotKSubmodular { var });
            }
        }
    }
    let a = if f0 == min_val {
        0
    } else {
        finite.iter().find(|(_, v)| *v == min_val).unwrap().0
    };
    let fa = min_val;
    let theta = (a != 0).then(|| (a, f0 - fa));
    let epsilons = finite
        .iter()
        .filter(|&&(b, _)| b != 0 && b != a)
        .map(|&(b, fb)| (b, fb - f0 - f0 + fa))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    let forbidden = (1..table.len()).filter(|&u| !table[u].is_finite()).collect();
    Ok(UnaryForm {
        constant: f0,
        theta,
        epsilons,
        forbidden,
        fixed: None,
    })
}

/// A network representing a [`TermSum`]: for every `x`,
/// `f(x) = c(δφ(x)) / scale + constant`.
#[derive(Clone, Debug)]
pub struct Representation {
    pub net: DirectedNetwork,
    pub s: usize,
    pub t: usize,
    /// `node_of[i][u - 1]` is the node `v_i^u`.
    pub node_of: Vec<Vec<usize>>,
    pub scale: i64,
    pub constant: Q,
}

impl Representation {
    /// Source side `φ(x) = {s} ∪ {v_i^{x_i} : x_i ≠ 0}`.
    pub fn legal_cut(&self, x: &[usize]) -> Vec<bool> {
        let mut side = vec![false; self.net.node_count()];
        side[self.s] = true;
        for (i, &u) in x.iter().enumerate() {
            if u != 0 {
                side[self.node_of[i][u - 1]] = true;
            }
        }
        side
    }

    /// `X̌`: drops every block `U_i` meeting the cut in two or more nodes.
    pub fn legalize(&self, side: &[bool]) -> Vec<bool> {
        let mut out = side.to_vec();
        for block in &self.node_of {
            if block.iter().filter(|&&v| side[v]).count() >= 2 {
                for &v in block {
                    out[v] = false;
                }
            }
        }
        out
    }

    /// `φ⁻¹` on legal cuts.
    pub fn decode(&self, side: &[bool]) -> Option<Vec<usize>> {
        if !side[self.s] || side[self.t] {
            return None;
        }
        let mut x = Vec::with_capacity(self.node_of.len());
        for block in &self.node_of {
            let inside: Vec<usize> = (0..block.len()).filter(|&u| side[block[u]]).collect();
            match inside.as_slice() {
                [] => x.push(0),
                [u] => x.push(u + 1),
                _ => return None,
            }
        }
        Some(x)
    }

    pub fn cut_capacity(&self, side: &[bool]) -> i64 {
        self.net.cut_capacity(side)
    }

    /// Objective value of a finite cut capacity.
    pub fn value_of(&self, capacity: i64) -> Q {
        Q::new(capacity, self.scale) + self.constant
    }
}

enum Gadget {
    Eps(usize, usize),
    Theta(usize, usize),
    Delta(usize, usize, Vec<usize>),
    Mu(usize, usize, usize, usize),
}

/// Builds the representation network. Unary tables are normalized first; `θ_0`, `μ_{0,0}` and
/// one-sided `μ` are rewritten so every gadget satisfies both representation conditions.
pub fn build_network(f: &TermSum) -> Result<Representation, KsubError> {
    f.validate()?;
    let n = f.arities.len();
    let mut gadgets: Vec<(Gadget, Q)> = Vec::new();
    let mut constant = f.offset;
    let mut forbidden: Vec<(usize, usize)> = Vec::new();
    let mut fixed: Vec<(usize, usize)> = Vec::new();
    let eps_all = |g: &mut Vec<(Gadget, Q)>, var: usize, skip: usize, w: Q| {
        for b in 1..=f.arities[var] {
            if b != skip {
                g.push((Gadget::Eps(var, b), w));
            }
        }
    };
    for t in &f.terms {
        let w = t.weight;
        if w.is_zero() && !matches!(t.kind, TermKind::Unary { .. }) {
            continue;
        }
        match &t.kind {
            TermKind::Unary { var, table } => {
                if w.is_zero() {
                    // a zero-weighted table still carries its hard constraints
                    let hard: Vec<Ext> = table
                        .iter()
                        .map(|v| if v.is_finite() { Ext::zero() } else { Ext::Inf })
                        .collect();
                    let form = normalize_unary(&hard, *var)?;
                    forbidden.extend(form.forbidden.iter().map(|&u| (*var, u)));
                    fixed.extend(form.fixed.map(|u| (*var, u)));
                    continue;
                }
                let form = normalize_unary(table, *var)?;
                constant += form.constant * w;
                if let Some((a, tw)) = form.theta {
                    gadgets.push((Gadget::Theta(*var, a), tw * w));
                    constant -= tw * w;
                }
                for (b, ew) in form.epsilons {
                    gadgets.push((Gadget::Eps(*var, b), ew * w));
                }
                forbidden.extend(form.forbidden.iter().map(|&u| (*var, u)));
                fixed.extend(form.fixed.map(|u| (*var, u)));
            }
            TermKind::Epsilon { var, a } => gadgets.push((Gadget::Eps(*var, *a), w)),
            TermKind::Theta { var, a: 0 } => eps_all(&mut gadgets, *var, 0, w),
            TermKind::Theta { var, a } => {
                gadgets.push((Gadget::Theta(*var, *a), w));
                constant -= w;
            }
            TermKind::Delta { i, j, perm } => gadgets.push((Gadget::Delta(*i, *j, perm.clone()), w)),
            TermKind::Mu { i, j, a: 0, b: 0 } => {
                eps_all(&mut gadgets, *i, 0, w);
                eps_all(&mut gadgets, *j, 0, w);
            }
            TermKind::Mu { i, j, a: 0, b } => {
                gadgets.push((Gadget::Mu(*j, *i, *b, 0), w));
                eps_all(&mut gadgets, *j, *b, w);
            }
            TermKind::Mu { i, j, a, b: 0 } => {
                gadgets.push((Gadget::Mu(*i, *j, *a, 0), w));
                eps_all(&mut gadgets, *i, *a, w);
            }
            TermKind::Mu { i, j, a, b } => gadgets.push((Gadget::Mu(*i, *j, *a, *b), w)),
        }
    }

    let scale = common_denominator(gadgets.iter().map(|(_, w)| w));
    let mut net = DirectedNetwork::new(2);
    let (s, t) = (0, 1);
    let node_of: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..f.arities[i]).map(|_| net.add_node()).collect())
        .collect();
    let v = |i: usize, u: usize| node_of[i][u - 1];
    for (g, w) in &gadgets {
        let c = to_scaled_int(*w, scale).ok_or(KsubError::Overflow)?;
        if c == 0 {
            continue;
        }
        match g {
            Gadget::Eps(i, a) => {
                net.add_arc(v(*i, *a), t, 0, c)?;
            }
            Gadget::Theta(i, a) => {
                net.add_arc(s, v(*i, *a), 0, c)?;
                for j in (1..=f.arities[*i]).filter(|j| j != a) {
                    net.add_arc(v(*i, j), t, 0, c)?;
                }
            }
            Gadget::Delta(i, j, perm) => {
                for u in 1..=f.arities[*i] {
                    net.add_arc(v(*i, u), v(*j, perm[u]), 0, c)?;
                    net.add_arc(v(*j, perm[u]), v(*i, u), 0, c)?;
                }
            }
            Gadget::Mu(i, j, a, b) => {
                for u in (1..=f.arities[*j]).filter(|u| u != b) {
                    net.add_arc(v(*j, u), v(*i, *a), 0, c)?;
                }
                if *b != 0 {
                    for u in (1..=f.arities[*i]).filter(|u| u != a) {
                        net.add_arc(v(*i, u), v(*j, *b), 0, c)?;
                    }
                }
            }
        }
    }
    for &(i, u) in &forbidden {
        net.add_arc(v(i, u), t, 0, Cap::Inf)?;
    }
    for &(i, u) in &fixed {
        if u != 0 {
            net.add_arc(s, v(i, u), 0, Cap::Inf)?;
        }
        for j in (1..=f.arities[i]).filter(|&j| j != u) {
            net.add_arc(v(i, j), t, 0, Cap::Inf)?;
        }
    }
    net.source = Some(s);
    net.sink = Some(t);
    Ok(Representation {
        net,
        s,
        t,
        node_of,
        scale,
        constant,
    })
}

/// Exact minimizer via one maximum flow; the point is `φ⁻¹` of the minimal minimum cut.
pub fn minimize(f: &TermSum) -> Result<(Vec<usize>, Q), KsubError> {
    let rep = build_network(f)?;
    let res = rep.net.max_flow(rep.s, rep.t)?;
    if res.value >= rep.net.inf_value() {
        return Err(KsubError::AllInfinite);
    }
    let x = rep.decode(&res.source_side).ok_or(KsubError::IllegalCut)?;
    let value = rep.value_of(res.value);
    debug_assert_eq!(f.eval(&x).ok(), Some(Ext::Finite(value)));
    Ok((x, value))
}

/// Iterates the domain in lexicographic order.
pub fn for_each_point(arities: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut x = vec![0usize; arities.len()];
    loop {
        visit(&x);
        let mut i = arities.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < arities[i] {
                x[i] += 1;
                break;
            }
            x[i] = 0;
        }
    }
}

/// Exhaustive minimum; ties go to the lexicographically first point.
pub fn brute_force_min(f: &TermSum) -> Result<(Vec<usize>, Q), KsubError> {
    let size = f.domain_size();
    if size > BRUTE_FORCE_CAP {
        return Err(KsubError::TooLarge {
            size,
            cap: BRUTE_FORCE_CAP,
        });
    }
    f.validate()?;
    let mut best: Option<(Vec<usize>, Q)> = None;
    for_each_point(&f.arities, |x| {
        if let Ok(Ext::Finite(v)) = f.eval(x) {
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((x.to_vec(), v));
            }
        }
    });
    best.ok_or(KsubError::AllInfinite)
}

/// Exhaustive check of `f(x) + f(y) ≥ f(x ∧ y) + f(x ⊔ y)`.
pub fn check_ksubmodular(
    arities: &[usize],
    f: impl Fn(&[usize]) -> Ext,
) -> Result<bool, KsubError> {
    let size = arities
        .iter()
        .fold(1u128, |acc, &k| acc.saturating_mul(k as u128 + 1));
    if size.saturating_mul(size) > BRUTE_FORCE_CAP * 10 {
        return Err(KsubError::TooLarge {
            size,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut points = Vec::new();
    for_each_point(arities, |x| points.push(x.to_vec()));
    let values: Vec<Ext> = points.iter().map(|x| f(x)).collect();
    for (p, x) in points.iter().enumerate() {
        for (r, y) in points.iter().enumerate().skip(p + 1) {
            let lhs = values[p] + values[r];
            let rhs = f(&meet(x, y)) + f(&square_join(x, y));
            if lhs < rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Scaled objective `scale · (f(x) − constant)` as an integer, for comparing with cut capacities.
pub fn scaled_value(rep: &Representation, v: Q) -> Option<i64> {
    to_scaled_int(v - rep.constant, rep.scale)
}

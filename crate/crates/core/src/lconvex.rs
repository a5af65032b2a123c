//! 2-separable objectives over products of a tree: evaluation, evenization, local k-submodular
//! expansion on `I(x)` / `F(x)`, steepest descent and rounding.

use num_traits::{Signed, Zero};

use crate::ksubmod::{self, KsubError, TermKind, TermSum};
use crate::rational::{Ext, Q};
use crate::trees::{Color, Tree};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LconvexError {
    #[error("objective is not L-convex: {0}")]
    NotLConvex(String),
    #[error("not a convex multifacility location function: {0}")]
    NotMultifacility(String),
    #[error("one-dimensional table of length {len} evaluated at {arg}")]
    OutOfRange { arg: usize, len: usize },
    #[error("point has {got} coordinates, objective has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("vertex {0} is not in the tree")]
    BadVertex(usize),
    #[error("variable {0} out of range")]
    BadVariable(usize),
    #[error("starting point has infinite value")]
    EmptyDomain,
    #[error("search space of {size} points exceeds the cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error(transparent)]
    Ksub(#[from] KsubError),
}

/// A function on `{0, 1, …, len − 1}` given by its values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneDimConvex {
    pub values: Vec<Q>,
}

impl OneDimConvex {
    pub fn new(values: Vec<Q>) -> Self {
        OneDimConvex { values }
    }

    /// `z ↦ slope · z + intercept` on `0..len`.
    pub fn linear(slope: Q, intercept: Q, len: usize) -> Self {
        OneDimConvex::new((0..len).map(|z| intercept + slope * Q::from(z as i64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, t: usize) -> Result<Q, LconvexError> {
        self.values.get(t).copied().ok_or(LconvexError::OutOfRange {
            arg: t,
            len: self.values.len(),
        })
    }

    /// `Δh(t) = h(t) − h(t − 1)`, `t ≥ 1`.
    pub fn delta(&self, t: usize) -> Result<Q, LconvexError> {
        Ok(self.at(t)? - self.at(t - 1)?)
    }

    /// `Δ²h(t) = h(t + 1) − 2h(t) + h(t − 1)`, `t ≥ 1`.
    pub fn delta2(&self, t: usize) -> Result<Q, LconvexError> {
        Ok(self.at(t + 1)? - self.at(t)? - self.at(t)? + self.at(t - 1)?)
    }

    pub fn is_convex(&self) -> bool {
        (1..self.len().saturating_sub(1)).all(|t| !self.delta2(t).unwrap().is_negative())
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// `h(t) = (h(t − 1) + h(t + 1)) / 2` at every interior odd `t`.
    pub fn is_even(&self) -> bool {
        (1..self.len().saturating_sub(1))
            .step_by(2)
            .all(|t| self.values[t] + self.values[t] == self.values[t - 1] + self.values[t + 1])
    }

    /// Replaces odd arguments by the average of their neighbors. A trailing odd entry without a
    /// right neighbor is dropped.
    pub fn evenized(&self) -> OneDimConvex {
        let mut len = self.len();
        if len >= 2 && len.is_multiple_of(2) {
            len -= 1;
        }
        let values = (0..len)
            .map(|t| {
                if t % 2 == 1 {
                    (self.values[t - 1] + self.values[t + 1]) / Q::from(2)
                } else {
                    self.values[t]
                }
            })
            .collect();
        OneDimConvex { values }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryTerm {
    pub var: usize,
    /// One value per tree vertex.
    pub table: Vec<Ext>,
}

/// `h(d(x_var, anchor))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchoredUnary {
    pub var: usize,
    pub anchor: usize,
    pub h: OneDimConvex,
}

/// `h(d(x_i, x_j))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub h: OneDimConvex,
}

/// `h(d(x_i, z) + d(x_j, w))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchoredPair {
    pub i: usize,
    pub j: usize,
    pub z: usize,
    pub w: usize,
    pub h: OneDimConvex,
}

/// Sum of unary convex-on-tree terms and distance-dependent pair terms over `Tⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSeparable {
    pub tree: Tree,
    pub n: usize,
    pub unary: Vec<UnaryTerm>,
    pub anchored_unary: Vec<AnchoredUnary>,
    pub pairs: Vec<PairTerm>,
    pub anchored_pairs: Vec<AnchoredPair>,
    pub constant: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Ideal,
    Filter,
}

impl Side {
    /// Color whose vertices have their neighbors in the local box.
    pub fn open_color(self) -> Color {
        match self {
            Side::Ideal => Color::Black,
            Side::Filter => Color::White,
        }
    }
}

/// The local box `I(x)` or `F(x)` and the k-submodular expansion of the objective on it.
#[derive(Clone, Debug)]
pub struct LocalSum {
    /// `domains[i][u]` is the tree vertex encoded by value `u` of coordinate `i`.
    pub domains: Vec<Vec<usize>>,
    pub sum: TermSum,
}

impl LocalSum {
    pub fn decode(&self, y: &[usize]) -> Vec<usize> {
        y.iter().enumerate().map(|(i, &u)| self.domains[i][u]).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DescentTrace {
    pub iterates: Vec<Vec<usize>>,
    pub sides: Vec<Side>,
    pub values: Vec<Q>,
}

impl DescentTrace {
    pub fn steps(&self) -> usize {
        self.sides.len()
    }
}

impl TwoSeparable {
    pub fn new(tree: Tree, n: usize) -> Self {
        TwoSeparable {
            tree,
            n,
            unary: vec![],
            anchored_unary: vec![],
            pairs: vec![],
            anchored_pairs: vec![],
            constant: Q::zero(),
        }
    }

    fn check_point(&self, x: &[usize]) -> Result<(), LconvexError> {
        if x.len() != self.n {
            return Err(LconvexError::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        match x.iter().find(|&&v| v >= self.tree.len()) {
            Some(&v) => Err(LconvexError::BadVertex(v)),
            None => Ok(()),
        }
    }

    /// Variable indices, anchors and table sizes.
    pub fn validate(&self) -> Result<(), LconvexError> {
        let nv = self.tree.len();
        let var = |v: usize| if v < self.n { Ok(()) } else { Err(LconvexError::BadVariable(v)) };
        let vertex = |v: usize| if v < nv { Ok(()) } else { Err(LconvexError::BadVertex(v)) };
        for t in &self.unary {
            var(t.var)?;
            if t.table.len() != nv {
                return Err(LconvexError::NotLConvex(format!(
                    "unary table on variable {} has {} entries for {} vertices",
                    t.var,
                    t.table.len(),
                    nv
                )));
            }
        }
        for t in &self.anchored_unary {
            var(t.var)?;
            vertex(t.anchor)?;
        }
        for t in &self.pairs {
            var(t.i)?;
            var(t.j)?;
        }
        for t in &self.anchored_pairs {
            var(t.i)?;
            var(t.j)?;
            vertex(t.z)?;
            vertex(t.w)?;
        }
        Ok(())
    }

    pub fn eval(&self, x: &[usize]) -> Result<Ext, LconvexError> {
        self.check_point(x)?;
        let d = |u: usize, v: usize| self.tree.distance(u, v);
        let mut total = Ext::Finite(self.constant);
        for t in &self.unary {
            total += t.table[x[t.var]];
        }
        for t in &self.anchored_unary {
            total += Ext::Finite(t.h.at(d(x[t.var], t.anchor))?);
        }
        for t in &self.pairs {
            total += Ext::Finite(t.h.at(d(x[t.i], x[t.j]))?);
        }
        for t in &self.anchored_pairs {
            total += Ext::Finite(t.h.at(d(x[t.i], t.z) + d(x[t.j], t.w))?);
        }
        Ok(total)
    }

    /// Checks the hypotheses under which the objective is L-convex.
    pub fn check_lconvex(&self) -> Result<(), LconvexError> {
        self.validate()?;
        let fail = |m: String| Err(LconvexError::NotLConvex(m));
        for (k, t) in self.unary.iter().enumerate() {
            if !self.tree.is_convex_on_tree(&t.table).unwrap_or(false) {
                return fail(format!("unary term {k} is not convex on the tree"));
            }
        }
        for (k, t) in self.anchored_unary.iter().enumerate() {
            if !t.h.is_convex() || !t.h.is_nondecreasing() {
                return fail(format!("anchored unary term {k} is not nondecreasing convex"));
            }
        }
        for (k, t) in self.pairs.iter().enumerate() {
            if !t.h.is_convex() || !t.h.is_nondecreasing() || !t.h.is_even() {
                return fail(format!("pair term {k} is not nondecreasing even convex"));
            }
        }
        for (k, t) in self.anchored_pairs.iter().enumerate() {
            if !t.h.is_convex() || !t.h.is_nondecreasing() || !t.h.is_even() {
                return fail(format!("anchored pair term {k} is not nondecreasing even convex"));
            }
            if self.tree.color(t.z) != self.tree.color(t.w) {
                return fail(format!("anchored pair term {k} has anchors of different colors"));
            }
        }
        Ok(())
    }

    /// The relaxation obtained by evenizing every pair term; anchored unary terms are evenized
    /// only when their anchor is Black, so the value on Black points is unchanged.
    pub fn evenize(&self) -> TwoSeparable {
        let mut out = self.clone();
        for t in &mut out.pairs {
            t.h = t.h.evenized();
        }
        for t in &mut out.anchored_pairs {
            t.h = t.h.evenized();
        }
        for t in &mut out.anchored_unary {
            if self.tree.is_black(t.anchor) {
                t.h = t.h.evenized();
            }
        }
        out
    }

    /// Expansion of the objective on `I(x)` or `F(x)` as a sum of basic k-submodular terms.
    pub fn local_term_sum(&self, x: &[usize], side: Side) -> Result<LocalSum, LconvexError> {
        self.check_point(x)?;
        self.check_lconvex()?;
        let tree = &self.tree;
        let domains: Vec<Vec<usize>> = x
            .iter()
            .map(|&v| match side {
                Side::Ideal => tree.ideal(v),
                Side::Filter => tree.filter(v),
            })
            .collect();
        let open = |v: usize| tree.color(v) == side.open_color();
        let index = |i: usize, v: usize| domains[i].iter().position(|&w| w == v).unwrap();
        // neighbor of u toward target, as a local value of coordinate i (0 when u = target)
        let toward = |i: usize, u: usize, target: usize| index(i, tree.step_toward(u, target));
        let mut sum = TermSum::new(domains.iter().map(|d| d.len() - 1).collect());
        sum.offset = self.constant;
        let one = Q::from(1);

        for t in &self.unary {
            let table = domains[t.var].iter().map(|&v| t.table[v]).collect();
            sum.push(TermKind::Unary { var: t.var, table }, one);
        }
        for t in &self.anchored_unary {
            let table = domains[t.var]
                .iter()
                .map(|&v| t.h.at(tree.distance(v, t.anchor)).map(Ext::Finite))
                .collect::<Result<Vec<_>, _>>()?;
            sum.push(TermKind::Unary { var: t.var, table }, one);
        }
        for t in &self.pairs {
            let (u, v) = (x[t.i], x[t.j]);
            if t.i == t.j {
                sum.offset += t.h.at(0)?;
                continue;
            }
            let d = tree.distance(u, v);
            if u == v {
                sum.offset += t.h.at(0)?;
                if open(u) {
                    let perm: Vec<usize> = (0..domains[t.i].len()).collect();
                    sum.push(TermKind::Delta { i: t.i, j: t.j, perm }, t.h.delta(1)?);
                }
                continue;
            }
            sum.offset += t.h.at(d)?;
            match (open(u), open(v)) {
                (true, true) => {
                    let (a, b) = (toward(t.i, u, v), toward(t.j, v, u));
                    let dh = t.h.delta(d)?;
                    sum.push(TermKind::Theta { var: t.i, a }, dh);
                    sum.push(TermKind::Theta { var: t.j, a: b }, dh);
                    sum.push(TermKind::Mu { i: t.i, j: t.j, a, b }, t.h.delta2(d)?);
                }
                (true, false) => {
                    let a = toward(t.i, u, v);
                    sum.push(TermKind::Theta { var: t.i, a }, t.h.delta(d)?);
                }
                (false, true) => {
                    let b = toward(t.j, v, u);
                    sum.push(TermKind::Theta { var: t.j, a: b }, t.h.delta(d)?);
                }
                (false, false) => {}
            }
        }
        for t in &self.anchored_pairs {
            let (u, v) = (x[t.i], x[t.j]);
            if t.i == t.j {
                let table = domains[t.i]
                    .iter()
                    .map(|&s| t.h.at(tree.distance(s, t.z) + tree.distance(s, t.w)).map(Ext::Finite))
                    .collect::<Result<Vec<_>, _>>()?;
                sum.push(TermKind::Unary { var: t.i, table }, one);
                continue;
            }
            let d = tree.distance(u, t.z) + tree.distance(v, t.w);
            sum.offset += t.h.at(d)?;
            match (open(u), open(v)) {
                (true, true) if d == 0 => {
                    let dh = t.h.delta(1)?;
                    sum.push(TermKind::Theta { var: t.i, a: 0 }, dh);
                    sum.push(TermKind::Theta { var: t.j, a: 0 }, dh);
                }
                (true, true) => {
                    let (a, b) = (toward(t.i, u, t.z), toward(t.j, v, t.w));
                    let dh = t.h.delta(d)?;
                    sum.push(TermKind::Theta { var: t.i, a }, dh);
                    sum.push(TermKind::Theta { var: t.j, a: b }, dh);
                    sum.push(TermKind::Mu { i: t.i, j: t.j, a, b }, t.h.delta2(d)?);
                }
                (true, false) => {
                    let a = toward(t.i, u, t.z);
                    sum.push(TermKind::Theta { var: t.i, a }, t.h.delta(d)?);
                }
                (false, true) => {
                    let b = toward(t.j, v, t.w);
                    sum.push(TermKind::Theta { var: t.j, a: b }, t.h.delta(d)?);
                }
                (false, false) => {}
            }
        }
        Ok(LocalSum { domains, sum })
    }

    /// Minimum over the local box, as `(point, value)`.
    pub fn local_min(&self, x: &[usize], side: Side) -> Result<(Vec<usize>, Q), LconvexError> {
        let local = self.local_term_sum(x, side)?;
        let (y, value) = ksubmod::minimize(&local.sum)?;
        Ok((local.decode(&y), value))
    }

    /// Whether `x` already minimizes over `F(x)` or over `I(x)`.
    pub fn side_condition(&self, x: &[usize]) -> Result<bool, LconvexError> {
        let Ext::Finite(gx) = self.eval(x)? else {
            return Err(LconvexError::EmptyDomain);
        };
        Ok(self.local_min(x, Side::Filter)?.1 == gx || self.local_min(x, Side::Ideal)?.1 == gx)
    }

    /// Steepest descent from `x0`: move to the better of the local minima over `I(x)` and `F(x)`
    /// (Ideal on ties) until neither improves.
    pub fn steepest_descent(&self, x0: &[usize]) -> Result<(Vec<usize>, DescentTrace), LconvexError> {
        let Ext::Finite(mut value) = self.eval(x0)? else {
            return Err(LconvexError::EmptyDomain);
        };
        let mut x = x0.to_vec();
        let mut trace = DescentTrace {
            iterates: vec![x.clone()],
            sides: vec![],
            values: vec![value],
        };
        loop {
            let (yi, vi) = self.local_min(&x, Side::Ideal)?;
            let (yf, vf) = self.local_min(&x, Side::Filter)?;
            let (y, v, side) = if vi <= vf {
                (yi, vi, Side::Ideal)
            } else {
                (yf, vf, Side::Filter)
            };
            if v >= value {
                return Ok((x, trace));
            }
            x = y;
            value = v;
            trace.iterates.push(x.clone());
            trace.sides.push(side);
            trace.values.push(v);
        }
    }

    /// Terms allowed in a convex multifacility location function.
    pub fn check_multifacility(&self) -> Result<(), LconvexError> {
        let fail = |m: &str| Err(LconvexError::NotMultifacility(m.to_string()));
        if !self.unary.is_empty() || !self.anchored_pairs.is_empty() {
            return fail("only anchored unary and pair terms are allowed");
        }
        if self.constant.is_negative() {
            return fail("negative constant");
        }
        let good = |h: &OneDimConvex| {
            h.is_convex() && h.is_nondecreasing() && h.values.iter().all(|v| !v.is_negative())
        };
        for t in &self.anchored_unary {
            if !self.tree.is_black(t.anchor) {
                return fail("anchors must be Black");
            }
            if !good(&t.h) {
                return fail("anchored term is not nonnegative nondecreasing convex");
            }
        }
        if !self.pairs.iter().all(|t| good(&t.h)) {
            return fail("pair term is not nonnegative nondecreasing convex");
        }
        Ok(())
    }

    /// Rounds a relaxation minimizer toward the Black vertex `y`; for multifacility location
    /// functions the result is within a factor 2 of the optimum over Black points.
    pub fn two_approx_round(&self, x_star: &[usize], y: usize) -> Result<Vec<usize>, LconvexError> {
        self.check_multifacility()?;
        self.check_point(x_star)?;
        if y >= self.tree.len() || !self.tree.is_black(y) {
            return Err(LconvexError::BadVertex(y));
        }
        Ok(self.tree.round_toward(x_star, y))
    }
}

/// `max_i d(x_i, y_i)`.
pub fn linf_distance(tree: &Tree, x: &[usize], y: &[usize]) -> usize {
    x.iter()
        .zip(y)
        .map(|(&u, &v)| tree.distance(u, v))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn hq(v: &[i64]) -> OneDimConvex {
        OneDimConvex::new(v.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn eval_examples() {
        let mut w = TwoSeparable::new(Tree::path(4), 2);
        assert_eq!(w.eval(&[0, 3]).unwrap(), Ext::zero());
        w.pairs.push(PairTerm { i: 0, j: 1, h: hq(&[0, 1, 2, 3]) });
        assert_eq!(w.eval(&[0, 3]).unwrap(), Ext::from(3));

        let mut a = TwoSeparable::new(Tree::path(4), 2);
        a.anchored_pairs.push(AnchoredPair { i: 0, j: 1, z: 0, w: 2, h: hq(&[0, 0, 1, 2]) });
        assert_eq!(a.eval(&[1, 2]).unwrap(), Ext::zero());
    }

    #[test]
    fn evenization() {
        let h = hq(&[0, 0, 1, 2, 3]).evenized();
        assert_eq!(h.values[1], qf(1, 2));
        let lin = hq(&[0, 2, 4, 6, 8]);
        assert_eq!(lin.evenized(), lin);
        let sq = hq(&[0, 1, 4, 9, 16]).evenized();
        assert_eq!(sq.values[3], q(10));
        assert!(sq.is_even() && sq.is_convex());
    }

    #[test]
    fn local_expansion_on_white_center() {
        // star with White center 0; the pair term is the plain distance
        let tree = Tree::star(3, Color::White);
        let mut w = TwoSeparable::new(tree.clone(), 2);
        w.pairs.push(PairTerm { i: 0, j: 1, h: hq(&[0, 1, 2, 3, 4]) });
        let local = w.local_term_sum(&[0, 0], Side::Filter).unwrap();
        assert_eq!(local.sum.terms.len(), 1);
        assert!(matches!(local.sum.terms[0].kind, TermKind::Delta { .. }));
        ksubmod::for_each_point(&local.sum.arities, |y| {
            let p = local.decode(y);
            assert_eq!(local.sum.eval(y).unwrap(), w.eval(&p).unwrap());
        });
    }

    #[test]
    fn local_expansion_mixed_colors() {
        let tree = Tree::path(5);
        let mut w = TwoSeparable::new(tree, 2);
        w.pairs.push(PairTerm { i: 0, j: 1, h: hq(&[0, 1, 3, 5, 8, 11, 15]).evenized() });
        for side in [Side::Ideal, Side::Filter] {
            for x in [[1, 4], [1, 3], [2, 2], [0, 4]] {
                let local = w.local_term_sum(&x, side).unwrap();
                ksubmod::for_each_point(&local.sum.arities, |y| {
                    let p = local.decode(y);
                    assert_eq!(local.sum.eval(y).unwrap(), w.eval(&p).unwrap(), "{x:?} {side:?} {p:?}");
                });
            }
        }
    }

    #[test]
    fn descent_walks_a_path() {
        let mut w = TwoSeparable::new(Tree::path(5), 1);
        w.anchored_unary.push(AnchoredUnary { var: 0, anchor: 4, h: OneDimConvex::linear(q(1), q(0), 5) });
        let (x, trace) = w.steepest_descent(&[0]).unwrap();
        assert_eq!(x, vec![4]);
        assert_eq!(trace.steps(), 4);
        assert_eq!(trace.iterates, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
        let (_, none) = w.steepest_descent(&[4]).unwrap();
        assert_eq!(none.steps(), 0);
    }

    #[test]
    fn rejects_non_lconvex_input() {
        let mut w = TwoSeparable::new(Tree::path(4), 2);
        w.pairs.push(PairTerm { i: 0, j: 1, h: hq(&[0, 0, 1, 2]) });
        assert!(matches!(w.local_term_sum(&[0, 0], Side::Ideal), Err(LconvexError::NotLConvex(_))));
        let mut a = TwoSeparable::new(Tree::path(4), 2);
        a.anchored_pairs.push(AnchoredPair { i: 0, j: 1, z: 0, w: 1, h: hq(&[0, 1, 2, 3, 4]) });
        assert!(matches!(a.local_term_sum(&[0, 0], Side::Ideal), Err(LconvexError::NotLConvex(_))));
    }

    #[test]
    fn multiway_rounding_on_claw() {
        // K_{1,3}: one interior node joined to three terminals by unit edges
        let tree = Tree::star(3, Color::White);
        let mut w = TwoSeparable::new(tree, 1);
        for s in 1..=3 {
            w.anchored_unary.push(AnchoredUnary { var: 0, anchor: s, h: OneDimConvex::linear(qf(1, 2), q(0), 3) });
        }
        let (x, _) = w.steepest_descent(&[1]).unwrap();
        assert_eq!(x, vec![0]);
        assert_eq!(w.eval(&x).unwrap(), Ext::Finite(qf(3, 2)));
        let r = w.two_approx_round(&x, 1).unwrap();
        assert_eq!(w.eval(&r).unwrap(), Ext::from(2));
    }
}

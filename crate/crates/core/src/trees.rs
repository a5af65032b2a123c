//! Bipartitely colored trees, midpoints, subdivision, ideals/filters and scaled star trees.

use std::collections::VecDeque;

use crate::rational::Ext;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("expected {expected} edges for a tree on {n} vertices, got {got}")]
    EdgeCount { n: usize, expected: usize, got: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("value table has {got} entries, tree has {expected} vertices")]
    TableSize { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// Finite tree with a proper 2-coloring fixed by a Black root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
    color: Vec<Color>,
    parent: Vec<usize>,
    depth: Vec<usize>,
    root: usize,
    edges: Vec<(usize, usize)>,
}

impl Tree {
    pub fn new(n: usize, edges: &[(usize, usize)], black_root: usize) -> Result<Tree, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if edges.len() != n - 1 {
            return Err(TreeError::EdgeCount {
                n,
                expected: n - 1,
                got: edges.len(),
            });
        }
        if black_root >= n {
            return Err(TreeError::VertexOutOfRange(black_root));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(TreeError::VertexOutOfRange(u.max(v)));
            }
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        let mut color = vec![Color::Black; n];
        depth[black_root] = 0;
        parent[black_root] = black_root;
        let mut queue = VecDeque::from([black_root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = u;
                    color[v] = color[u].flip();
                    queue.push_back(v);
                }
            }
        }
        if depth.contains(&usize::MAX) {
            return Err(TreeError::Disconnected);
        }
        Ok(Tree {
            adj,
            color,
            parent,
            depth,
            root: black_root,
            edges: edges.to_vec(),
        })
    }

    /// Path 0–1–…–(n−1) with vertex 0 Black.
    pub fn path(n: usize) -> Tree {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Tree::new(n, &edges, 0).expect("path is a tree")
    }

    /// Star with center 0 and leaves 1..=k; the center gets `center` as its color.
    pub fn star(k: usize, center: Color) -> Tree {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        let root = if center == Color::Black || k == 0 { 0 } else { 1 };
        Tree::new(k + 1, &edges, root).expect("star is a tree")
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn color(&self, u: usize) -> Color {
        self.color[u]
    }

    pub fn is_black(&self, u: usize) -> bool {
        self.color[u] == Color::Black
    }

    pub fn is_white(&self, u: usize) -> bool {
        self.color[u] == Color::White
    }

    /// `u ≺ v`: adjacent with `u` White and `v` Black.
    pub fn precedes(&self, u: usize, v: usize) -> bool {
        self.is_white(u) && self.is_black(v) && self.adj[u].contains(&v)
    }

    pub fn distance(&self, mut u: usize, mut v: usize) -> usize {
        let mut d = 0;
        while self.depth[u] > self.depth[v] {
            u = self.parent[u];
            d += 1;
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v];
            d += 1;
        }
        while u != v {
            u = self.parent[u];
            v = self.parent[v];
            d += 2;
        }
        d
    }

    /// Vertices of the unique `u`–`v` path, endpoints included.
    pub fn path_between(&self, mut u: usize, mut v: usize) -> Vec<usize> {
        let mut front = vec![];
        let mut back = vec![];
        while self.depth[u] > self.depth[v] {
            front.push(u);
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            back.push(v);
            v = self.parent[v];
        }
        while u != v {
            front.push(u);
            back.push(v);
            u = self.parent[u];
            v = self.parent[v];
        }
        front.push(u);
        front.extend(back.into_iter().rev());
        front
    }

    /// Neighbor of `u` on the path to `target` (`u` itself when they coincide).
    pub fn step_toward(&self, u: usize, target: usize) -> usize {
        if u == target {
            return u;
        }
        // target below u iff walking up from target reaches u
        let mut w = target;
        while self.depth[w] > self.depth[u] + 1 {
            w = self.parent[w];
        }
        if self.depth[w] == self.depth[u] + 1 && self.parent[w] == u {
            w
        } else {
            self.parent[u]
        }
    }

    /// `(u • v, u ∘ v)`: the Black and White near-midpoints (equal at even distance).
    pub fn midpoint_pair(&self, u: usize, v: usize) -> (usize, usize) {
        let p = self.path_between(u, v);
        let d = p.len() - 1;
        if d.is_multiple_of(2) {
            (p[d / 2], p[d / 2])
        } else {
            let (a, b) = (p[(d - 1) / 2], p[d.div_ceil(2)]);
            if self.is_black(a) {
                (a, b)
            } else {
                (b, a)
            }
        }
    }

    /// Edge subdivision: vertices `0..n` keep their ids and turn Black, the midpoint of edge `e`
    /// becomes vertex `n + e` and is White.
    pub fn subdivide(&self) -> Tree {
        let n = self.len();
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            edges.push((u, n + e));
            edges.push((n + e, v));
        }
        Tree::new(n + self.edges.len(), &edges, self.root).expect("subdivision is a tree")
    }

    /// `I(x)`: `x` followed by its neighbors when `x` is Black, else `{x}`. The first entry is the
    /// minimum of the local poset.
    pub fn ideal(&self, x: usize) -> Vec<usize> {
        self.local(x, Color::Black)
    }

    /// `F(x)`: `x` followed by its neighbors when `x` is White, else `{x}`.
    pub fn filter(&self, x: usize) -> Vec<usize> {
        self.local(x, Color::White)
    }

    fn local(&self, x: usize, open: Color) -> Vec<usize> {
        let mut out = vec![x];
        if self.color[x] == open {
            out.extend_from_slice(&self.adj[x]);
        }
        out
    }

    /// `x→y`: every White coordinate moves one step toward the Black vertex `y`.
    pub fn round_toward(&self, x: &[usize], y: usize) -> Vec<usize> {
        debug_assert!(self.is_black(y));
        x.iter()
            .map(|&xi| if self.is_white(xi) { self.step_toward(xi, y) } else { xi })
            .collect()
    }

    pub fn diameter(&self) -> usize {
        let far = |s: usize| {
            let mut dist = vec![usize::MAX; self.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            let mut best = (0, s);
            while let Some(u) = queue.pop_front() {
                if dist[u] > best.0 {
                    best = (dist[u], u);
                }
                for &v in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            best
        };
        let (_, a) = far(self.root);
        far(a).0
    }

    /// Whether `table` restricted to every path is convex on the integers (with `inf` outside a
    /// contiguous domain). Checked locally: the finite part must induce a subtree and every
    /// vertex must satisfy `h(a) + h(b) ≥ 2h(u)` for distinct neighbors `a`, `b`.
    pub fn is_convex_on_tree(&self, table: &[Ext]) -> Result<bool, TreeError> {
        if table.len() != self.len() {
            return Err(TreeError::TableSize {
                expected: self.len(),
                got: table.len(),
            });
        }
        let finite: Vec<usize> = (0..self.len()).filter(|&u| table[u].is_finite()).collect();
        if let Some(&start) = finite.first() {
            let mut seen = vec![false; self.len()];
            seen[start] = true;
            let mut stack = vec![start];
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if !seen[v] && table[v].is_finite() {
                        seen[v] = true;
                        count += 1;
                        stack.push(v);
                    }
                }
            }
            if count != finite.len() {
                return Ok(false);
            }
        }
        for u in finite {
            let hu = table[u].finite().unwrap();
            let nb = &self.adj[u];
            for (x, &a) in nb.iter().enumerate() {
                for &b in &nb[x + 1..] {
                    if let (Some(ha), Some(hb)) = (table[a].finite(), table[b].finite()) {
                        if ha + hb < hu + hu {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Scaled star tree: the origin plus `legs` rays of `rungs` vertices each. Rung `j` on a leg sits
/// at distance `j · 2^σ` from the origin in the unscaled metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarTree {
    pub legs: usize,
    pub sigma: i32,
    pub rungs: usize,
    pub tree: Tree,
}

/// A vertex of a [`StarTree`]: `None` leg means the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StarPoint {
    pub leg: Option<usize>,
    pub rung: usize,
}

impl StarPoint {
    pub const ORIGIN: StarPoint = StarPoint { leg: None, rung: 0 };
}

pub fn star_tree(legs: usize, sigma: i32, rungs: usize) -> StarTree {
    let n = 1 + legs * rungs;
    let mut edges = Vec::with_capacity(n - 1);
    for s in 0..legs {
        for j in 1..=rungs {
            let id = 1 + s * rungs + (j - 1);
            let prev = if j == 1 { 0 } else { id - 1 };
            edges.push((prev, id));
        }
    }
    let tree = Tree::new(n, &edges, 0).expect("star tree is a tree");
    StarTree {
        legs,
        sigma,
        rungs,
        tree,
    }
}

impl StarTree {
    pub fn id(&self, p: StarPoint) -> usize {
        match p.leg {
            None => 0,
            Some(_) if p.rung == 0 => 0,
            Some(s) => {
                assert!(s < self.legs && p.rung <= self.rungs, "point outside star tree");
                1 + s * self.rungs + (p.rung - 1)
            }
        }
    }

    pub fn point(&self, id: usize) -> StarPoint {
        if id == 0 {
            StarPoint::ORIGIN
        } else {
            StarPoint {
                leg: Some((id - 1) / self.rungs),
                rung: (id - 1) % self.rungs + 1,
            }
        }
    }

    /// Distance counted in rungs of this phase.
    pub fn rung_distance(&self, u: usize, v: usize) -> usize {
        let (p, q) = (self.point(u), self.point(v));
        if p.leg == q.leg || p.leg.is_none() || q.leg.is_none() {
            p.rung.abs_diff(q.rung)
        } else {
            p.rung + q.rung
        }
    }

    /// The same point in the next finer phase (rung `j` becomes `2j`).
    pub fn refine(&self, p: StarPoint) -> StarPoint {
        StarPoint {
            leg: p.leg,
            rung: 2 * p.rung,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_distances() {
        let t = Tree::path(5);
        assert_eq!(t.distance(0, 4), 4);
        assert_eq!(t.distance(3, 3), 0);
        let s = Tree::star(2, Color::White);
        assert_eq!(s.distance(1, 2), 2);
    }

    #[test]
    fn midpoints_on_path() {
        let t = Tree::path(5);
        assert_eq!(t.midpoint_pair(0, 4), (2, 2));
        assert_eq!(t.midpoint_pair(0, 3), (2, 1));
        assert_eq!(t.midpoint_pair(3, 0), (2, 1));
        assert_eq!(t.midpoint_pair(2, 2), (2, 2));
    }

    #[test]
    fn subdivision_shapes() {
        let e = Tree::path(2).subdivide();
        assert_eq!(e.len(), 3);
        assert!(e.is_white(2));
        assert_eq!(e.distance(0, 1), 2);
        let s = Tree::star(3, Color::Black).subdivide();
        assert_eq!(s.len(), 7);
        assert_eq!(Tree::path(3).subdivide().diameter(), 4);
    }

    #[test]
    fn ideals_and_filters() {
        let s = Tree::star(3, Color::White);
        assert_eq!(s.ideal(1), vec![1, 0]);
        assert_eq!(s.filter(0), vec![0, 1, 2, 3]);
        assert_eq!(s.ideal(0), vec![0]);
        assert_eq!(s.filter(1), vec![1]);
    }

    #[test]
    fn rounding() {
        let s = Tree::star(3, Color::White);
        assert_eq!(s.round_toward(&[0, 2], 1), vec![1, 2]);
        let p = Tree::path(3);
        assert_eq!(p.round_toward(&[1], 0), vec![0]);
        assert_eq!(p.round_toward(&[0, 2], 0), vec![0, 2]);
    }

    #[test]
    fn star_tree_metric() {
        let st = star_tree(3, 0, 2);
        assert_eq!(st.tree.len(), 7);
        assert!(st.tree.is_black(0));
        let a = st.id(StarPoint { leg: Some(0), rung: 2 });
        let b = st.id(StarPoint { leg: Some(1), rung: 1 });
        assert_eq!(st.rung_distance(a, b), 3);
        assert_eq!(st.tree.distance(a, b), 3);
        for u in 0..st.tree.len() {
            assert_eq!(st.id(st.point(u)), u);
            for v in 0..st.tree.len() {
                assert_eq!(st.rung_distance(u, v), st.tree.distance(u, v));
            }
        }
        let coarse = star_tree(3, 1, 1);
        assert_eq!(coarse.tree.len(), 4);
        let fine = star_tree(3, 0, 2);
        for u in 0..coarse.tree.len() {
            for v in 0..coarse.tree.len() {
                let (fu, fv) = (
                    fine.id(coarse.refine(coarse.point(u))),
                    fine.id(coarse.refine(coarse.point(v))),
                );
                assert_eq!(fine.tree.distance(fu, fv), 2 * coarse.tree.distance(u, v));
            }
        }
    }

    #[test]
    fn tree_convexity() {
        let p = Tree::path(4);
        let lin: Vec<Ext> = (0..4).map(|i| Ext::from(i as i64)).collect();
        assert!(p.is_convex_on_tree(&lin).unwrap());
        let bump: Vec<Ext> = [0, 2, 1, 3].iter().map(|&v| Ext::from(v)).collect();
        assert!(!p.is_convex_on_tree(&bump).unwrap());
        let holes = vec![Ext::from(0), Ext::Inf, Ext::from(0), Ext::Inf];
        assert!(!p.is_convex_on_tree(&holes).unwrap());
    }

    #[test]
    fn rejects_non_trees() {
        assert_eq!(Tree::new(3, &[(0, 1)], 0), Err(TreeError::EdgeCount { n: 3, expected: 2, got: 1 }));
        assert_eq!(Tree::new(3, &[(0, 1), (1, 0)], 0), Err(TreeError::Disconnected));
    }
}

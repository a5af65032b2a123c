//! JSON files for instances, solutions, k-submodular term sums and 2-separable objectives.
//!
//! Rationals may be written as JSON integers or as strings (`"3/2"`, `"1.5"`, `"inf"`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ksubmod::{TermKind, TermSum};
use crate::lconvex::{AnchoredPair, AnchoredUnary, OneDimConvex, PairTerm, TwoSeparable, UnaryTerm};
use crate::multiflow::{Edge, FlowPath, Instance, Multiflow, Point, Potential, Problem, Solution};
use crate::rational::{halves_to_decimal, parse_ext, parse_q, Ext, Q};
use crate::trees::Tree;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read or write {path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
}

fn schema<T>(m: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Schema(m.into()))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn rational(&self) -> Result<Q, IoError> {
        match self {
            Number::Int(v) => Ok(Q::from(*v)),
            Number::Text(s) => parse_q(s).map_err(|e| IoError::Schema(e.to_string())),
        }
    }

    fn extended(&self) -> Result<Ext, IoError> {
        match self {
            Number::Int(v) => Ok(Ext::from(*v)),
            Number::Text(s) => parse_ext(s).map_err(|e| IoError::Schema(e.to_string())),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub u: usize,
    pub v: usize,
    pub cap: i64,
    pub cost: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub terminals: Vec<usize>,
    pub edges: Vec<EdgeFile>,
    #[serde(default)]
    pub demands: BTreeMap<String, i64>,
    #[serde(default = "default_problem")]
    pub problem: String,
}

fn default_problem() -> String {
    "N".into()
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            n: inst.n,
            terminals: inst.terminals.clone(),
            edges: inst
                .edges
                .iter()
                .map(|e| EdgeFile { u: e.u, v: e.v, cap: e.cap, cost: e.cost })
                .collect(),
            demands: inst
                .terminals
                .iter()
                .zip(&inst.demands)
                .map(|(t, &r)| (t.to_string(), r))
                .collect(),
            problem: match inst.problem {
                Problem::N => "N",
                Problem::Mcmf => "MCMF",
                Problem::Multiway => "MULTIWAY",
            }
            .into(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, IoError> {
        let problem = match self.problem.to_ascii_uppercase().as_str() {
            "N" | "L" => Problem::N,
            "MCMF" => Problem::Mcmf,
            "MULTIWAY" => Problem::Multiway,
            other => return schema(format!("unknown problem `{other}`")),
        };
        let mut demands = vec![0; self.terminals.len()];
        for (key, &r) in &self.demands {
            let Ok(node) = key.parse::<usize>() else {
                return schema(format!("demand key `{key}` is not a node id"));
            };
            let Some(k) = self.terminals.iter().position(|&t| t == node) else {
                return schema(format!("demand given for non-terminal {node}"));
            };
            demands[k] = r;
        }
        let inst = Instance {
            n: self.n,
            terminals: self.terminals.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { u: e.u, v: e.v, cap: e.cap, cost: e.cost })
                .collect(),
            demands,
            problem,
        };
        inst.validate().map_err(|e| IoError::Schema(e.to_string()))?;
        Ok(inst)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub nodes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<usize>>,
    pub lambda_halves: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    /// Terminal node id of the leg, `null` at the origin.
    pub leg: Option<usize>,
    pub height_halves: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub value_halves: i64,
    #[serde(default)]
    pub value: String,
    pub paths: Vec<PathFile>,
    #[serde(default)]
    pub support_halves: BTreeMap<String, i64>,
    pub potential: Vec<PointFile>,
    #[serde(default)]
    pub certified: bool,
}

impl SolutionFile {
    pub fn from_solution(inst: &Instance, sol: &Solution) -> Self {
        SolutionFile {
            value_halves: sol.value_halves,
            value: halves_to_decimal(sol.value_halves),
            paths: sol
                .multiflow
                .paths
                .iter()
                .map(|p| PathFile {
                    nodes: p.nodes.clone(),
                    edges: Some(p.edges.clone()),
                    lambda_halves: p.lambda_halves,
                })
                .collect(),
            support_halves: sol
                .support_halves
                .iter()
                .enumerate()
                .map(|(e, &x)| (e.to_string(), x))
                .collect(),
            potential: sol
                .potential
                .iter()
                .map(|p| PointFile {
                    leg: p.leg.map(|l| inst.terminals[l]),
                    height_halves: p.height,
                })
                .collect(),
            certified: sol.certified(),
        }
    }

    /// The multiflow and potential, resolving missing edge lists by the first joining edge.
    pub fn to_parts(&self, inst: &Instance) -> Result<(Multiflow, Potential), IoError> {
        let mut paths = Vec::with_capacity(self.paths.len());
        for (k, p) in self.paths.iter().enumerate() {
            let edges = match &p.edges {
                Some(e) => e.clone(),
                None => p
                    .nodes
                    .windows(2)
                    .map(|w| {
                        inst.edges
                            .iter()
                            .position(|e| (e.u, e.v) == (w[0], w[1]) || (e.v, e.u) == (w[0], w[1]))
                            .ok_or_else(|| IoError::Schema(format!("path {k}: no edge joins {} and {}", w[0], w[1])))
                    })
                    .collect::<Result<_, _>>()?,
            };
            paths.push(FlowPath {
                nodes: p.nodes.clone(),
                edges,
                lambda_halves: p.lambda_halves,
            });
        }
        let mut potential = Vec::with_capacity(self.potential.len());
        for p in &self.potential {
            let leg = match p.leg {
                None => None,
                Some(t) => match inst.terminal_index(t) {
                    Some(k) => Some(k),
                    None => return schema(format!("potential leg {t} is not a terminal")),
                },
            };
            if (p.height_halves == 0) != leg.is_none() || p.height_halves < 0 {
                return schema("origin points need leg null and height 0, others a positive height");
            }
            potential.push(Point { leg, height: p.height_halves });
        }
        Ok((Multiflow { paths }, potential))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TermFile {
    Unary {
        var: usize,
        table: Vec<Number>,
        #[serde(default = "one")]
        weight: Number,
    },
    Epsilon {
        var: usize,
        a: usize,
        #[serde(default = "one")]
        weight: Number,
    },
    Theta {
        var: usize,
        a: usize,
        #[serde(default = "one")]
        weight: Number,
    },
    Delta {
        i: usize,
        j: usize,
        perm: Vec<usize>,
        #[serde(default = "one")]
        weight: Number,
    },
    Mu {
        i: usize,
        j: usize,
        a: usize,
        b: usize,
        #[serde(default = "one")]
        weight: Number,
    },
}

fn one() -> Number {
    Number::Int(1)
}

fn zero() -> Number {
    Number::Int(0)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermSumFile {
    /// `k_i` per variable: coordinate `i` ranges over `0..=k_i`.
    pub arities: Vec<usize>,
    #[serde(default = "zero")]
    pub offset: Number,
    pub terms: Vec<TermFile>,
}

fn q_text(v: Q) -> Number {
    if v.is_integer() {
        Number::Int(v.to_integer())
    } else {
        Number::Text(v.to_string())
    }
}

fn ext_text(v: Ext) -> Number {
    match v {
        Ext::Finite(q) => q_text(q),
        Ext::Inf => Number::Text("inf".into()),
    }
}

impl TermSumFile {
    pub fn from_term_sum(f: &TermSum) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|t| {
                let weight = q_text(t.weight);
                match &t.kind {
                    TermKind::Unary { var, table } => TermFile::Unary {
                        var: *var,
                        table: table.iter().map(|&v| ext_text(v)).collect(),
                        weight,
                    },
                    TermKind::Epsilon { var, a } => TermFile::Epsilon { var: *var, a: *a, weight },
                    TermKind::Theta { var, a } => TermFile::Theta { var: *var, a: *a, weight },
                    TermKind::Delta { i, j, perm } => TermFile::Delta { i: *i, j: *j, perm: perm.clone(), weight },
                    TermKind::Mu { i, j, a, b } => TermFile::Mu { i: *i, j: *j, a: *a, b: *b, weight },
                }
            })
            .collect();
        TermSumFile {
            arities: f.arities.clone(),
            offset: q_text(f.offset),
            terms,
        }
    }

    pub fn to_term_sum(&self) -> Result<TermSum, IoError> {
        let mut f = TermSum::new(self.arities.clone());
        f.offset = self.offset.rational()?;
        for t in &self.terms {
            let (kind, w) = match t {
                TermFile::Unary { var, table, weight } => (
                    TermKind::Unary {
                        var: *var,
                        table: table.iter().map(Number::extended).collect::<Result<_, _>>()?,
                    },
                    weight,
                ),
                TermFile::Epsilon { var, a, weight } => (TermKind::Epsilon { var: *var, a: *a }, weight),
                TermFile::Theta { var, a, weight } => (TermKind::Theta { var: *var, a: *a }, weight),
                TermFile::Delta { i, j, perm, weight } => {
                    (TermKind::Delta { i: *i, j: *j, perm: perm.clone() }, weight)
                }
                TermFile::Mu { i, j, a, b, weight } => (TermKind::Mu { i: *i, j: *j, a: *a, b: *b }, weight),
            };
            f.push(kind, w.rational()?);
        }
        f.validate().map_err(|e| IoError::Schema(e.to_string()))?;
        Ok(f)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// A vertex colored Black; the coloring is the bipartition containing it.
    #[serde(default)]
    pub black: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UnaryFile {
    pub var: usize,
    pub table: Vec<Number>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnchoredUnaryFile {
    pub var: usize,
    pub anchor: usize,
    pub h: Vec<Number>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub i: usize,
    pub j: usize,
    pub h: Vec<Number>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnchoredPairFile {
    pub i: usize,
    pub j: usize,
    pub z: usize,
    pub w: usize,
    pub h: Vec<Number>,
}

/// A 2-separable objective over `Tⁿ`; `start` is the descent's initial point (all at the
/// tree's Black root when absent).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveFile {
    pub tree: TreeFile,
    pub n: usize,
    #[serde(default = "zero")]
    pub constant: Number,
    #[serde(default)]
    pub unary: Vec<UnaryFile>,
    #[serde(default)]
    pub anchored_unary: Vec<AnchoredUnaryFile>,
    #[serde(default)]
    pub pairs: Vec<PairFile>,
    #[serde(default)]
    pub anchored_pairs: Vec<AnchoredPairFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<usize>>,
}

fn one_dim(values: &[Number]) -> Result<OneDimConvex, IoError> {
    Ok(OneDimConvex::new(values.iter().map(Number::rational).collect::<Result<_, _>>()?))
}

fn values_text(h: &OneDimConvex) -> Vec<Number> {
    h.values.iter().map(|&v| q_text(v)).collect()
}

impl ObjectiveFile {
    pub fn from_objective(omega: &TwoSeparable, start: Option<Vec<usize>>) -> Self {
        ObjectiveFile {
            tree: TreeFile {
                n: omega.tree.len(),
                edges: omega.tree.edges().to_vec(),
                black: omega.tree.root(),
            },
            n: omega.n,
            constant: q_text(omega.constant),
            unary: omega
                .unary
                .iter()
                .map(|t| UnaryFile { var: t.var, table: t.table.iter().map(|&v| ext_text(v)).collect() })
                .collect(),
            anchored_unary: omega
                .anchored_unary
                .iter()
                .map(|t| AnchoredUnaryFile { var: t.var, anchor: t.anchor, h: values_text(&t.h) })
                .collect(),
            pairs: omega
                .pairs
                .iter()
                .map(|t| PairFile { i: t.i, j: t.j, h: values_text(&t.h) })
                .collect(),
            anchored_pairs: omega
                .anchored_pairs
                .iter()
                .map(|t| AnchoredPairFile { i: t.i, j: t.j, z: t.z, w: t.w, h: values_text(&t.h) })
                .collect(),
            start,
        }
    }

    pub fn to_objective(&self) -> Result<TwoSeparable, IoError> {
        let tree = Tree::new(self.tree.n, &self.tree.edges, self.tree.black)
            .map_err(|e| IoError::Schema(e.to_string()))?;
        let mut omega = TwoSeparable::new(tree, self.n);
        omega.constant = self.constant.rational()?;
        for t in &self.unary {
            let table = t.table.iter().map(Number::extended).collect::<Result<_, _>>()?;
            omega.unary.push(UnaryTerm { var: t.var, table });
        }
        for t in &self.anchored_unary {
            omega.anchored_unary.push(AnchoredUnary { var: t.var, anchor: t.anchor, h: one_dim(&t.h)? });
        }
        for t in &self.pairs {
            omega.pairs.push(PairTerm { i: t.i, j: t.j, h: one_dim(&t.h)? });
        }
        for t in &self.anchored_pairs {
            omega.anchored_pairs.push(AnchoredPair { i: t.i, j: t.j, z: t.z, w: t.w, h: one_dim(&t.h)? });
        }
        omega.validate().map_err(|e| IoError::Schema(e.to_string()))?;
        Ok(omega)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    read_json::<InstanceFile>(path)?.to_instance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    const CLAW: &str = r#"{"n": 4, "terminals": [1, 2, 3],
        "edges": [{"u": 0, "v": 1, "cap": 1, "cost": 1}, {"u": 0, "v": 2, "cap": 1, "cost": 1},
                  {"u": 0, "v": 3, "cap": 1, "cost": 1}],
        "demands": {"1": 1, "2": 1, "3": 1}, "problem": "N"}"#;

    #[test]
    fn instance_round_trip() {
        let file: InstanceFile = serde_json::from_str(CLAW).unwrap();
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.demands, vec![1, 1, 1]);
        assert_eq!(InstanceFile::from_instance(&inst), file);
    }

    #[test]
    fn schema_errors() {
        let unknown = CLAW.replace("\"problem\"", "\"extra\": 1, \"problem\"");
        assert!(serde_json::from_str::<InstanceFile>(&unknown).is_err());
        let bad_demand = CLAW.replace("\"1\": 1", "\"0\": 1");
        let file: InstanceFile = serde_json::from_str(&bad_demand).unwrap();
        assert!(matches!(file.to_instance(), Err(IoError::Schema(_))));
        let loop_edge = CLAW.replace("\"u\": 0, \"v\": 1", "\"u\": 1, \"v\": 1");
        let file: InstanceFile = serde_json::from_str(&loop_edge).unwrap();
        assert!(file.to_instance().is_err());
    }

    #[test]
    fn term_sum_round_trip() {
        let text = r#"{"arities": [2, 2], "offset": "1/2", "terms": [
            {"kind": "unary", "var": 0, "table": [0, "3/2", "inf"]},
            {"kind": "mu", "i": 0, "j": 1, "a": 1, "b": 2, "weight": 2}]}"#;
        let file: TermSumFile = serde_json::from_str(text).unwrap();
        let f = file.to_term_sum().unwrap();
        assert_eq!(f.offset, qf(1, 2));
        assert_eq!(f.terms[0].kind, TermKind::Unary { var: 0, table: vec![Ext::zero(), Ext::Finite(qf(3, 2)), Ext::Inf] });
        let again = TermSumFile::from_term_sum(&f).to_term_sum().unwrap();
        assert_eq!(again, f);
    }
}

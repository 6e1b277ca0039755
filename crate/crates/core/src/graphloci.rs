//! Spaces of symmetric matrices with zeros forced by graph adjacency, as
//! immersive module representations, and the q-adic limit of the average
//! kernel sizes of their powers.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactcore::FiniteField;
use crate::modrep::{ask_from_histogram, rank_histogram, ModuleRep};

/// Finite simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        Graph::new(r.n, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl Graph {
    /// Rejects loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Invalid(format!("loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge {{{a},{b}}} has an endpoint >= {n}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::Invalid(format!("duplicate edge {{{a},{b}}}")));
            }
        }
        Ok(Graph { n, edges: set })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph { n, edges }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Graph { n, edges }
    }

    /// Every labelled graph on `n` vertices.
    pub fn all_labelled(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        (0u64..1 << pairs.len())
            .map(|mask| Graph {
                n,
                edges: pairs
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| mask >> t & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Image under the vertex map `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        Graph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (perm[a], perm[b]);
                    (x.min(y), x.max(y))
                })
                .collect(),
        }
    }

    pub fn label(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("G{}[{}]", self.n, edges.join(","))
    }

    /// Basis positions of the matrix space: each diagonal `(i, i)`, then the
    /// non-adjacent pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn basis_positions(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.n).map(|i| (i, i)).collect();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Symmetric `n×n` matrices vanishing at adjacent positions, as a
/// representation of rank `n(n+1)/2 - |edges|` into `Mat_n`.
pub fn graph_rep(g: &Graph) -> ModuleRep {
    let basis = g.basis_positions();
    let n = g.n;
    ModuleRep::from_fn(basis.len(), n, n, |k, i, j| {
        let (a, b) = basis[k];
        if (i, j) == (a, b) || (i, j) == (b, a) {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
    .named(g.label())
}

/// Number of invertible matrices in the space over F_q.
pub fn graph_vmax(g: &Graph, field: &FiniteField, budget: &Budget) -> Result<u64> {
    let h = rank_histogram(&graph_rep(g), field, budget)?;
    Ok(h.counts[g.n])
}

/// Outcome of comparing `q^l ask(m-th power)` with the full-rank count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitCongruence {
    pub graph: String,
    pub q: u64,
    pub m: usize,
    /// `q^l ask(^m gamma)`, an integer.
    #[serde(with = "crate::num_json")]
    pub scaled_ask: BigInt,
    #[serde(with = "crate::num_json")]
    pub vmax: BigInt,
    /// Largest `k` with `q^k` dividing the difference; `None` if equal.
    pub congruence_exp: Option<u32>,
    pub holds: bool,
}

/// Largest `k` with `q^k | x`; `None` for zero.
pub fn int_q_valuation(x: &BigInt, q: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let q = BigInt::from(q);
    let mut k = 0;
    let mut rest = x.clone();
    while (&rest % &q).is_zero() {
        rest /= &q;
        k += 1;
    }
    Some(k)
}

pub fn limit_congruence_check(g: &Graph, field: &FiniteField, m: usize, budget: &Budget) -> Result<LimitCongruence> {
    let h = rank_histogram(&graph_rep(g), field, budget)?;
    let a = ask_from_histogram(&h, m);
    // denom_exp is l, so the numerator is q^l ask.
    let scaled_ask = a.numerator;
    let vmax = BigInt::from(h.counts[g.n]);
    let congruence_exp = int_q_valuation(&(&scaled_ask - &vmax), field.q());
    let holds = congruence_exp.map_or(true, |k| k as usize >= m);
    Ok(LimitCongruence {
        graph: g.label(),
        q: field.q(),
        m,
        scaled_ask,
        vmax,
        congruence_exp,
        holds,
    })
}

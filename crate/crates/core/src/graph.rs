//! Weighted digraphs with exact dyadic weights, undirected views, Eulerian
//! validation, and the bipartite lift.
//!
//! Adjacency convention: `A[head][tail]`, so column sums are out-degrees and
//! row sums are in-degrees, and the walk matrix is `A · D_out^{-1}`.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;

use crate::dyadic::{self, Dyadic};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub w: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
    pub name: Option<String>,
    pub seed: Option<u64>,
}

impl WeightedDigraph {
    /// Builds a graph, checking vertex ids and dropping zero-weight edges.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<WeightedDigraph> {
        for e in &edges {
            for v in [e.tail, e.head] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
        }
        let edges = edges.into_iter().filter(|e| !e.w.is_zero()).collect();
        Ok(WeightedDigraph {
            n,
            edges,
            name: None,
            seed: None,
        })
    }

    pub fn from_triples(n: usize, triples: &[(usize, usize, Dyadic)]) -> Result<WeightedDigraph> {
        WeightedDigraph::new(
            n,
            triples
                .iter()
                .map(|&(tail, head, w)| Edge { tail, head, w })
                .collect(),
        )
    }

    /// Unit-weight graph from `(tail, head)` pairs.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<WeightedDigraph> {
        WeightedDigraph::new(
            n,
            arcs.iter()
                .map(|&(tail, head)| Edge {
                    tail,
                    head,
                    w: Dyadic::ONE,
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    /// Largest exponent among the weights: every weight is an integer
    /// multiple of `2^(-scale)`.
    pub fn common_scale(&self) -> u32 {
        self.edges.iter().map(|e| e.w.exponent()).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> Result<Dyadic> {
        dyadic::sum(self.edges.iter().map(|e| &e.w))
    }

    pub fn max_weight(&self) -> Dyadic {
        self.edges.iter().map(|e| e.w).max().unwrap_or(Dyadic::ZERO)
    }

    pub fn min_weight(&self) -> Dyadic {
        self.edges.iter().map(|e| e.w).min().unwrap_or(Dyadic::ZERO)
    }

    /// Parallel edges summed; output sorted by `(tail, head)`.
    pub fn merged(&self) -> Result<WeightedDigraph> {
        let mut acc: BTreeMap<(usize, usize), Dyadic> = BTreeMap::new();
        for e in &self.edges {
            let slot = acc.entry((e.tail, e.head)).or_insert(Dyadic::ZERO);
            *slot = slot.checked_add(&e.w)?;
        }
        let mut g = WeightedDigraph::new(
            self.n,
            acc.into_iter()
                .map(|((tail, head), w)| Edge { tail, head, w })
                .collect(),
        )?;
        g.name = self.name.clone();
        g.seed = self.seed;
        Ok(g)
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().any(|e| !seen.insert((e.tail, e.head)))
    }

    /// Every weight multiplied by `2^k`.
    pub fn scaled_pow2(&self, k: i64) -> Result<WeightedDigraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let w = if k >= 0 {
                    e.w.mul_pow2(k as u32)?
                } else {
                    Dyadic::new(e.w.numerator(), e.w.exponent() + (-k) as u32)?
                };
                Ok(Edge { w, ..*e })
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedDigraph::new(self.n, edges)
    }

    /// Dense adjacency `A[head][tail]` (parallel edges summed).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.head, e.tail)] += e.w.to_f64();
        }
        a
    }

    /// Dense walk matrix `A · D_out^{-1}` (columns of zero out-degree stay zero).
    pub fn walk_matrix(&self) -> DMatrix<f64> {
        let mut a = self.to_dense();
        for j in 0..self.n {
            let s: f64 = a.column(j).sum();
            if s > 0.0 {
                a.column_mut(j).scale_mut(1.0 / s);
            }
        }
        a
    }

    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
        }
        adj
    }
}

/// Exact in- and out-degree vectors.
pub fn degrees(g: &WeightedDigraph) -> Result<(Vec<Dyadic>, Vec<Dyadic>)> {
    let mut d_in = vec![Dyadic::ZERO; g.n()];
    let mut d_out = vec![Dyadic::ZERO; g.n()];
    for e in g.edges() {
        d_in[e.head] = d_in[e.head].checked_add(&e.w)?;
        d_out[e.tail] = d_out[e.tail].checked_add(&e.w)?;
    }
    Ok((d_in, d_out))
}

pub fn to_f64_vec(v: &[Dyadic]) -> Vec<f64> {
    v.iter().map(Dyadic::to_f64).collect()
}

/// A graph together with its common in/out degree vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianView {
    graph: WeightedDigraph,
    d: Vec<Dyadic>,
}

impl EulerianView {
    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn into_graph(self) -> WeightedDigraph {
        self.graph
    }

    pub fn degrees(&self) -> &[Dyadic] {
        &self.d
    }

    pub fn degrees_f64(&self) -> Vec<f64> {
        to_f64_vec(&self.d)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Normalized adjacency `D^{+/2} A D^{+/2}`.
    pub fn normalized_dense(&self) -> DMatrix<f64> {
        normalize(&self.graph.to_dense(), &self.degrees_f64(), &self.degrees_f64())
    }

    /// Validates and wraps a graph, failing if it is not Eulerian.
    pub fn try_new(g: WeightedDigraph) -> Result<EulerianView> {
        match validate_eulerian(&g)? {
            EulerianCheck::Eulerian(v) => Ok(v),
            EulerianCheck::Violation { vertex, .. } => Err(Error::NotEulerian { vertex }),
        }
    }
}

/// `D_in^{+/2} A D_out^{+/2}` for diagonal degree vectors.
pub fn normalize(a: &DMatrix<f64>, d_in: &[f64], d_out: &[f64]) -> DMatrix<f64> {
    let inv_sqrt = |x: f64| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 };
    let mut n = a.clone();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            n[(i, j)] *= inv_sqrt(d_in[i]) * inv_sqrt(d_out[j]);
        }
    }
    n
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EulerianCheck {
    Eulerian(EulerianView),
    /// First vertex whose in- and out-degree differ.
    Violation {
        vertex: usize,
        d_in: Dyadic,
        d_out: Dyadic,
    },
}

impl EulerianCheck {
    pub fn is_eulerian(&self) -> bool {
        matches!(self, EulerianCheck::Eulerian(_))
    }
}

/// Checks exact in/out degree equality at every vertex. The only error is
/// degree overflow.
pub fn validate_eulerian(g: &WeightedDigraph) -> Result<EulerianCheck> {
    let (d_in, d_out) = degrees(g)?;
    for v in 0..g.n() {
        if d_in[v] != d_out[v] {
            return Ok(EulerianCheck::Violation {
                vertex: v,
                d_in: d_in[v],
                d_out: d_out[v],
            });
        }
    }
    Ok(EulerianCheck::Eulerian(EulerianView {
        graph: g.clone(),
        d: d_out,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UEdge {
    pub u: usize,
    pub v: usize,
    pub w: Dyadic,
}

/// Undirected multigraph; each edge stored once. `bipartition[v]` is `true`
/// for vertices on the right side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<UEdge>,
    bipartition: Option<Vec<bool>>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: Vec<UEdge>) -> Result<UndirectedGraph> {
        for e in &edges {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
        }
        Ok(UndirectedGraph {
            n,
            edges: edges.into_iter().filter(|e| !e.w.is_zero()).collect(),
            bipartition: None,
        })
    }

    /// Attaches bipartition metadata, rejecting edges inside either side.
    pub fn with_bipartition(mut self, side: Vec<bool>) -> Result<UndirectedGraph> {
        if side.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "bipartition has {} entries for n = {}",
                side.len(),
                self.n
            )));
        }
        if let Some(e) = self.edges.iter().find(|e| side[e.u] == side[e.v]) {
            return Err(Error::BipartitionViolation { u: e.u, v: e.v });
        }
        self.bipartition = Some(side);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[UEdge] {
        &self.edges
    }

    pub fn bipartition(&self) -> Option<&[bool]> {
        self.bipartition.as_deref()
    }

    pub fn degrees(&self) -> Result<Vec<Dyadic>> {
        let mut d = vec![Dyadic::ZERO; self.n];
        for e in &self.edges {
            d[e.u] = d[e.u].checked_add(&e.w)?;
            if e.u != e.v {
                d[e.v] = d[e.v].checked_add(&e.w)?;
            }
        }
        Ok(d)
    }

    pub fn total_weight(&self) -> Result<Dyadic> {
        dyadic::sum(self.edges.iter().map(|e| &e.w))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            let w = e.w.to_f64();
            a[(e.u, e.v)] += w;
            if e.u != e.v {
                a[(e.v, e.u)] += w;
            }
        }
        a
    }

    /// A two-coloring if one exists (`true` = second color).
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                let cx = color[x].unwrap();
                for &y in &adj[x] {
                    match color[y] {
                        None => {
                            color[y] = Some(!cx);
                            q.push_back(y);
                        }
                        Some(cy) if cy == cx => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap_or(false)).collect())
    }

    /// Same graph as a symmetric digraph (both arc directions per edge).
    pub fn as_symmetric_digraph(&self) -> Result<WeightedDigraph> {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            edges.push(Edge { tail: e.u, head: e.v, w: e.w });
            if e.u != e.v {
                edges.push(Edge { tail: e.v, head: e.u, w: e.w });
            }
        }
        WeightedDigraph::new(self.n, edges)
    }
}

/// Symmetric lift: left copy `i` (index `i`) carries out-arcs, right copy
/// `j` (index `n + j`) carries in-arcs; arc `i -> j` becomes edge `L_i - R_j`.
pub fn bipartite_lift(g: &WeightedDigraph) -> Result<UndirectedGraph> {
    let n = g.n();
    let edges = g
        .edges()
        .iter()
        .map(|e| UEdge {
            u: e.tail,
            v: n + e.head,
            w: e.w,
        })
        .collect();
    let side = (0..2 * n).map(|v| v >= n).collect();
    UndirectedGraph::new(2 * n, edges)?.with_bipartition(side)
}

/// Reads the right-by-left block of a bipartite graph back as a digraph.
pub fn extract_directed(h: &UndirectedGraph) -> Result<WeightedDigraph> {
    let side = h
        .bipartition()
        .ok_or_else(|| Error::InvalidParam("graph has no bipartition".into()))?;
    let mut index = vec![0usize; h.n()];
    let (mut nl, mut nr) = (0usize, 0usize);
    for v in 0..h.n() {
        if side[v] {
            index[v] = nr;
            nr += 1;
        } else {
            index[v] = nl;
            nl += 1;
        }
    }
    if nl != nr {
        return Err(Error::DimensionMismatch(format!(
            "sides have {nl} and {nr} vertices"
        )));
    }
    let mut edges = Vec::with_capacity(h.m());
    for e in h.edges() {
        if side[e.u] == side[e.v] {
            return Err(Error::BipartitionViolation { u: e.u, v: e.v });
        }
        let (l, r) = if side[e.u] { (e.v, e.u) } else { (e.u, e.v) };
        edges.push(Edge {
            tail: index[l],
            head: index[r],
            w: e.w,
        });
    }
    WeightedDigraph::new(nl, edges)
}

/// Strongly connected components (iterative Tarjan); returns a component id
/// per vertex and the number of components.
pub fn strongly_connected_components(g: &WeightedDigraph) -> (Vec<usize>, usize) {
    let n = g.n();
    let adj = g.out_adjacency();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut ncomp = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

pub fn is_strongly_connected(g: &WeightedDigraph) -> bool {
    g.n() > 0 && strongly_connected_components(g).1 == 1
}

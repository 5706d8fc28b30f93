//! Certified expander partition by recursive spectral bisection.
//!
//! A connected part is accepted once the second largest eigenvalue of its
//! normalized adjacency is at most `1 − φ`; otherwise it is split along the
//! best sweep cut of its Fiedler vector.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

const MAX_DEPTH: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct ExpanderPartition {
    pub parts: Vec<Vec<usize>>,
    /// Ids of edges whose endpoints lie in different parts.
    pub crossing: Vec<usize>,
    pub phi: f64,
    pub crossing_fraction: f64,
    /// Certified second eigenvalue per part (`None` for singletons).
    pub part_lambda: Vec<Option<f64>>,
}

impl ExpanderPartition {
    /// Part index of every vertex.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut lab = vec![usize::MAX; n];
        for (i, p) in self.parts.iter().enumerate() {
            for &v in p {
                lab[v] = i;
            }
        }
        lab
    }
}

pub fn expander_partition(g: &UndirectedGraph, phi: f64) -> Result<ExpanderPartition> {
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let w: Vec<f64> = g.edges().iter().map(|e| e.w.to_f64()).collect();
    partition_weighted(g.n(), &pairs, &w, phi)
}

/// Second largest eigenvalue of the normalized adjacency of the subgraph
/// induced on `part`, or `None` when the part has fewer than two vertices.
pub fn induced_lambda(g: &UndirectedGraph, part: &[usize]) -> Option<f64> {
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let w: Vec<f64> = g.edges().iter().map(|e| e.w.to_f64()).collect();
    let (adj, _) = induced_dense(g.n(), &pairs, &w, part);
    spectrum(&adj).map(|(vals, _, _)| vals[1])
}

fn induced_dense(n: usize, pairs: &[(usize, usize)], w: &[f64], part: &[usize]) -> (DMatrix<f64>, Vec<usize>) {
    let mut local = vec![usize::MAX; n];
    for (i, &v) in part.iter().enumerate() {
        local[v] = i;
    }
    let k = part.len();
    let mut adj = DMatrix::zeros(k, k);
    let mut ids = Vec::new();
    for (id, &(u, v)) in pairs.iter().enumerate() {
        let (a, b) = (local[u], local[v]);
        if a != usize::MAX && b != usize::MAX {
            adj[(a, b)] += w[id];
            if a != b {
                adj[(b, a)] += w[id];
            }
            ids.push(id);
        }
    }
    (adj, ids)
}

/// Eigenvalues (descending), matching eigenvectors (columns) and degrees of
/// the normalized adjacency; `None` below two vertices.
fn spectrum(adj: &DMatrix<f64>) -> Option<(Vec<f64>, DMatrix<f64>, Vec<f64>)> {
    let k = adj.nrows();
    if k < 2 {
        return None;
    }
    let deg: Vec<f64> = (0..k).map(|i| adj.row(i).sum()).collect();
    let inv: Vec<f64> = deg.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    let nrm = DMatrix::from_fn(k, k, |i, j| adj[(i, j)] * inv[i] * inv[j]);
    let eig = SymmetricEigen::new(nrm);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    Some((vals, vecs, deg))
}

fn components(adj: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let k = adj.nrows();
    let mut comp = vec![usize::MAX; k];
    let mut out = Vec::new();
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = out.len();
        let mut members = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for y in 0..k {
                if comp[y] == usize::MAX && adj[(x, y)] > 0.0 {
                    comp[y] = out.len();
                    members.push(y);
                    q.push_back(y);
                }
            }
        }
        out.push(members);
    }
    out
}

/// Lowest-conductance prefix of the vertices ordered by `x`.
fn sweep_cut(adj: &DMatrix<f64>, deg: &[f64], x: &[f64]) -> Vec<usize> {
    let k = adj.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap().then(a.cmp(&b)));
    let total: f64 = deg.iter().sum();
    let mut in_s = vec![false; k];
    let (mut vol, mut cut) = (0.0, 0.0);
    let (mut best, mut best_at) = (f64::INFINITY, 1);
    for (i, &u) in order.iter().enumerate().take(k - 1) {
        let to_s: f64 = (0..k).filter(|&s| in_s[s]).map(|s| adj[(u, s)]).sum();
        cut += deg[u] - adj[(u, u)] - 2.0 * to_s;
        vol += deg[u];
        in_s[u] = true;
        let denom = vol.min(total - vol);
        let cond = if denom > 0.0 { cut / denom } else { f64::INFINITY };
        if cond < best {
            best = cond;
            best_at = i + 1;
        }
    }
    order.truncate(best_at);
    order
}

pub(crate) fn partition_weighted(n: usize, pairs: &[(usize, usize)], w: &[f64], phi: f64) -> Result<ExpanderPartition> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::InvalidParam(format!("phi = {phi} must lie in (0, 1]")));
    }
    let mut parts = Vec::new();
    let mut lambdas = Vec::new();
    let mut work: Vec<(Vec<usize>, usize)> = vec![((0..n).collect(), 0)];
    while let Some((part, depth)) = work.pop() {
        if part.len() < 2 {
            if !part.is_empty() {
                parts.push(part);
                lambdas.push(None);
            }
            continue;
        }
        let (adj, _) = induced_dense(n, pairs, w, &part);
        let comps = components(&adj);
        if comps.len() > 1 {
            for c in comps {
                work.push((c.into_iter().map(|i| part[i]).collect(), depth));
            }
            continue;
        }
        let (vals, vecs, deg) = spectrum(&adj).expect("part has at least two vertices");
        if vals[1] <= 1.0 - phi + 1e-12 {
            parts.push(part);
            lambdas.push(Some(vals[1]));
            continue;
        }
        if depth >= MAX_DEPTH {
            return Err(Error::PartitionFailure(format!(
                "part of size {} not certified at depth {depth} (lambda = {})",
                part.len(),
                vals[1]
            )));
        }
        let x: Vec<f64> = (0..part.len()).map(|i| vecs[(i, 1)] / deg[i].sqrt()).collect();
        let side = sweep_cut(&adj, &deg, &x);
        let mut in_side = vec![false; part.len()];
        for &i in &side {
            in_side[i] = true;
        }
        let a: Vec<usize> = (0..part.len()).filter(|&i| in_side[i]).map(|i| part[i]).collect();
        let b: Vec<usize> = (0..part.len()).filter(|&i| !in_side[i]).map(|i| part[i]).collect();
        work.push((b, depth + 1));
        work.push((a, depth + 1));
    }
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    let mut idx: Vec<usize> = (0..parts.len()).collect();
    idx.sort_by_key(|&i| parts[i][0]);
    let parts: Vec<Vec<usize>> = idx.iter().map(|&i| parts[i].clone()).collect();
    let part_lambda = idx.iter().map(|&i| lambdas[i]).collect();
    let mut label = vec![0usize; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            label[v] = i;
        }
    }
    let crossing: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| label[u] != label[v])
        .map(|(id, _)| id)
        .collect();
    let crossing_fraction = if pairs.is_empty() { 0.0 } else { crossing.len() as f64 / pairs.len() as f64 };
    Ok(ExpanderPartition {
        parts,
        crossing,
        phi,
        crossing_fraction,
        part_lambda,
    })
}

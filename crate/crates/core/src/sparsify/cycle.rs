//! Greedy decomposition of an undirected multigraph into edge-disjoint simple
//! cycles plus at most `n` leftover edges.

use crate::graph::UndirectedGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// `vertices[i]` and `vertices[i + 1]` (cyclically) are joined by `edges[i]`.
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Cycle>,
    /// Edge ids not covered by any cycle.
    pub leftover: Vec<usize>,
}

/// Decomposes `g`, ignoring weights; parallel edges count separately.
pub fn cycle_decomp(g: &UndirectedGraph) -> CycleDecomposition {
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    decompose(g.n(), &pairs)
}

/// Decomposition of the multigraph with edge list `pairs`; edge ids are
/// indices into `pairs`.
pub fn decompose(n: usize, pairs: &[(usize, usize)]) -> CycleDecomposition {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(u, v)) in pairs.iter().enumerate() {
        adj[u].push((v, id));
        if u != v {
            adj[v].push((u, id));
        }
    }
    let mut used = vec![false; pairs.len()];
    let mut cursor = vec![0usize; n];
    let mut pos = vec![usize::MAX; n];
    let mut out = CycleDecomposition::default();
    let mut path: Vec<usize> = Vec::new();
    let mut path_edges: Vec<usize> = Vec::new();
    for start in 0..n {
        path.clear();
        path_edges.clear();
        path.push(start);
        pos[start] = 0;
        while let Some(&v) = path.last() {
            let mut next = None;
            while cursor[v] < adj[v].len() {
                let (u, id) = adj[v][cursor[v]];
                cursor[v] += 1;
                if !used[id] {
                    next = Some((u, id));
                    break;
                }
            }
            match next {
                None => {
                    path.pop();
                    pos[v] = usize::MAX;
                    if let Some(e) = path_edges.pop() {
                        out.leftover.push(e);
                    }
                }
                Some((u, id)) => {
                    used[id] = true;
                    if pos[u] != usize::MAX {
                        let p = pos[u];
                        let mut edges: Vec<usize> = path_edges.drain(p..).collect();
                        edges.push(id);
                        let vertices: Vec<usize> = path.drain(p + 1..).collect();
                        for &x in &vertices {
                            pos[x] = usize::MAX;
                        }
                        let mut vs = Vec::with_capacity(vertices.len() + 1);
                        vs.push(u);
                        vs.extend(vertices);
                        out.cycles.push(Cycle { vertices: vs, edges });
                    } else {
                        pos[u] = path.len();
                        path.push(u);
                        path_edges.push(id);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use proptest::prelude::*;
    use rand::Rng;

    /// Exhaustive audit: every edge exactly once, cycles closed and simple.
    fn audit(n: usize, pairs: &[(usize, usize)], d: &CycleDecomposition) {
        let mut seen = vec![0u32; pairs.len()];
        for c in &d.cycles {
            assert_eq!(c.vertices.len(), c.edges.len());
            let mut distinct = c.vertices.clone();
            distinct.sort();
            distinct.dedup();
            assert_eq!(distinct.len(), c.vertices.len(), "cycle not simple");
            for (i, &e) in c.edges.iter().enumerate() {
                seen[e] += 1;
                let a = c.vertices[i];
                let b = c.vertices[(i + 1) % c.vertices.len()];
                let (u, v) = pairs[e];
                assert!((u, v) == (a, b) || (u, v) == (b, a), "edge {e} does not join {a},{b}");
            }
        }
        for &e in &d.leftover {
            seen[e] += 1;
        }
        assert!(seen.iter().all(|&s| s == 1), "edge accounting failed");
        assert!(d.leftover.len() <= n);
    }

    #[test]
    fn four_cycle() {
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let d = decompose(4, &pairs);
        assert_eq!(d.cycles.len(), 1);
        assert_eq!(d.cycles[0].len(), 4);
        assert!(d.leftover.is_empty());
        audit(4, &pairs, &d);
    }

    #[test]
    fn path_on_three() {
        let pairs = [(0, 1), (1, 2)];
        let d = decompose(3, &pairs);
        assert!(d.cycles.is_empty());
        assert_eq!(d.leftover.len(), 2);
    }

    #[test]
    fn random_graph_50_200() {
        let mut rng = Seed(50).rng();
        let pairs: Vec<(usize, usize)> = (0..200)
            .map(|_| loop {
                let (u, v) = (rng.random_range(0..50), rng.random_range(0..50));
                if u != v {
                    break (u, v);
                }
            })
            .collect();
        let d = decompose(50, &pairs);
        audit(50, &pairs, &d);
    }

    #[test]
    fn bipartite_cycles_are_even() {
        let mut rng = Seed(9).rng();
        let pairs: Vec<(usize, usize)> = (0..120)
            .map(|_| (rng.random_range(0..20), 20 + rng.random_range(0..20)))
            .collect();
        let d = decompose(40, &pairs);
        audit(40, &pairs, &d);
        assert!(d.cycles.iter().all(|c| c.len() % 2 == 0));
    }

    proptest! {
        #[test]
        fn accounting_holds(n in 1usize..30, raw in proptest::collection::vec((0usize..30, 0usize..30), 0..120)) {
            let pairs: Vec<(usize, usize)> = raw.into_iter().map(|(u, v)| (u % n, v % n)).collect();
            let d = decompose(n, &pairs);
            audit(n, &pairs, &d);
        }
    }
}

//! Degree- and bipartition-preserving SV sparsification.
//!
//! Undirected bipartite graphs are split into power-of-two weight buckets;
//! each bucket is expander-partitioned and every part is thinned by keeping
//! alternate edges (doubled) of randomly chosen cycle halves. Directed graphs
//! go through the bipartite lift.

pub mod cycle;
pub mod partition;

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

pub use cycle::{cycle_decomp, Cycle, CycleDecomposition};
pub use partition::{expander_partition, induced_lambda, ExpanderPartition};

use crate::dense;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::graph::{self, UEdge, UndirectedGraph, WeightedDigraph};
use crate::rng::Seed;

#[derive(Clone, Debug, Serialize)]
pub struct SparsifyParams {
    /// Constant in the sparsity threshold `c · n · ln n / δ²`.
    pub c: f64,
    pub phi: f64,
    /// Rounds of [`sparsify_cycle`]; `None` means `⌈log₂ n⌉`.
    pub max_rounds: Option<usize>,
    /// Verify each changed round with the dense oracle when `n ≤ oracle_cap`.
    pub verify: bool,
    pub max_attempts: usize,
    pub oracle_cap: usize,
}

impl Default for SparsifyParams {
    fn default() -> Self {
        SparsifyParams {
            c: 16.0,
            phi: 0.05,
            max_rounds: None,
            verify: true,
            max_attempts: 16,
            oracle_cap: crate::oracle_cap(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub eps_budget: f64,
    pub edges_before: usize,
    pub edges_after: usize,
    pub changed: bool,
    pub attempts: usize,
    pub measured_eps: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparsifyReport {
    pub edges_in: usize,
    pub edges_out: usize,
    pub changed: bool,
    pub rounds: Vec<RoundReport>,
}

fn ln_threshold_met(delta: f64, n: usize, m: usize, c: f64) -> bool {
    let n = n as f64;
    delta * delta * m as f64 >= c * n * n.ln()
}

/// One thinning pass over a unit multigraph with local vertex ids. Returns
/// `None` when the input is below the sparsity threshold.
fn thin_unit(delta: f64, n: usize, pairs: &[(usize, usize)], c: f64, seed: Seed) -> Result<Option<Vec<(usize, usize, u8)>>> {
    let m = pairs.len();
    if m == 0 || !ln_threshold_met(delta, n, m, c) {
        return Ok(None);
    }
    let mut deg = vec![0usize; n];
    for &(u, v) in pairs {
        deg[u] += 1;
        deg[v] += 1;
    }
    let low: Vec<bool> = deg.iter().map(|&d| 2 * n * d <= m).collect();
    let mut out = Vec::with_capacity(m);
    let mut rest = Vec::new();
    for &(u, v) in pairs {
        if low[u] || low[v] {
            out.push((u, v, 1));
        } else {
            rest.push((u, v));
        }
    }
    let dec = cycle::decompose(n, &rest);
    for &e in &dec.leftover {
        out.push((rest[e].0, rest[e].1, 1));
    }
    let mut rng = seed.rng();
    for cyc in &dec.cycles {
        if cyc.len() % 2 != 0 {
            return Err(Error::NotBipartite);
        }
        let b = rng.random_range(0..2usize);
        for (i, &e) in cyc.edges.iter().enumerate() {
            if i % 2 == b {
                out.push((rest[e].0, rest[e].1, 2));
            }
        }
    }
    Ok(Some(out))
}

fn bipartition_of(g: &UndirectedGraph) -> Result<Vec<bool>> {
    match g.bipartition() {
        Some(s) => Ok(s.to_vec()),
        None => g.two_coloring().ok_or(Error::NotBipartite),
    }
}

fn rebuild(g: &UndirectedGraph, edges: Vec<UEdge>) -> Result<UndirectedGraph> {
    let h = UndirectedGraph::new(g.n(), edges)?;
    match g.bipartition() {
        Some(s) => h.with_bipartition(s.to_vec()),
        None => Ok(h),
    }
}

/// Thins a unit-weight bipartite graph; output weights lie in `{1, 2}` and
/// degrees are preserved exactly. Returns the input unchanged below the
/// threshold `δ < sqrt(c · n · ln n / m)`.
pub fn sparsify_cycle_unweighted(delta: f64, g: &UndirectedGraph, c: f64, seed: Seed) -> Result<UndirectedGraph> {
    if let Some(e) = g.edges().iter().find(|e| e.w != Dyadic::ONE) {
        return Err(Error::InvalidWeight(format!("expected unit weights, found {}", e.w)));
    }
    bipartition_of(g)?;
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    match thin_unit(delta, g.n(), &pairs, c, seed)? {
        None => Ok(g.clone()),
        Some(out) => rebuild(
            g,
            out.into_iter()
                .map(|(u, v, w)| UEdge { u, v, w: Dyadic::from_int(w as u128) })
                .collect(),
        ),
    }
}

fn pow2_bucket(w: &Dyadic) -> Result<u32> {
    let x = w.numerator();
    if !w.is_integer() || !x.is_power_of_two() {
        return Err(Error::InvalidWeight(format!("{w} is not an integer power of two")));
    }
    Ok(x.trailing_zeros())
}

/// One bucketed round; the flag reports whether any part was thinned.
fn sparsify_cycle_inner(eps: f64, g: &UndirectedGraph, params: &SparsifyParams, seed: Seed) -> Result<(UndirectedGraph, bool)> {
    bipartition_of(g)?;
    let delta = eps * params.phi * params.phi;
    let mut buckets: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        buckets.entry(pow2_bucket(&e.w)?).or_default().push(id);
    }
    let mut out: Vec<UEdge> = Vec::with_capacity(g.m());
    let mut changed = false;
    for (&b, ids) in &buckets {
        let w = Dyadic::from_int(1u128 << b);
        let keep_all = |out: &mut Vec<UEdge>| {
            out.extend(ids.iter().map(|&id| g.edges()[id]));
        };
        // no part of at least two vertices can pass the threshold
        if !ln_threshold_met(delta, 2, ids.len(), params.c) {
            keep_all(&mut out);
            continue;
        }
        let pairs: Vec<(usize, usize)> = ids.iter().map(|&id| (g.edges()[id].u, g.edges()[id].v)).collect();
        let ones = vec![1.0; pairs.len()];
        let part = partition::partition_weighted(g.n(), &pairs, &ones, params.phi)?;
        for &k in &part.crossing {
            out.push(g.edges()[ids[k]]);
        }
        let labels = part.labels(g.n());
        let mut local = vec![usize::MAX; g.n()];
        for (j, p) in part.parts.iter().enumerate() {
            for (i, &v) in p.iter().enumerate() {
                local[v] = i;
            }
            let inner: Vec<usize> = (0..pairs.len())
                .filter(|&k| labels[pairs[k].0] == j && labels[pairs[k].1] == j)
                .collect();
            let lp: Vec<(usize, usize)> = inner.iter().map(|&k| (local[pairs[k].0], local[pairs[k].1])).collect();
            match thin_unit(delta, p.len(), &lp, params.c, seed.child2(b as u64, j as u64))? {
                None => out.extend(inner.iter().map(|&k| g.edges()[ids[k]])),
                Some(th) => {
                    changed = true;
                    for (u, v, m) in th {
                        out.push(UEdge { u: p[u], v: p[v], w: w.mul_pow2(m as u32 - 1)? });
                    }
                }
            }
        }
    }
    if !changed {
        return Ok((g.clone(), false));
    }
    Ok((rebuild(g, out)?, true))
}

/// One round over power-of-two weight buckets with inner parameter
/// `δ = eps · φ²` per expander part.
pub fn sparsify_cycle(eps: f64, g: &UndirectedGraph, params: &SparsifyParams, seed: Seed) -> Result<UndirectedGraph> {
    Ok(sparsify_cycle_inner(eps, g, params, seed)?.0)
}

/// SV epsilon of one undirected graph against another with the degrees of `a`.
pub fn measure_undirected_sv(at: &UndirectedGraph, a: &UndirectedGraph) -> Result<f64> {
    let d = dense::diag(&graph::to_f64_vec(&a.degrees()?));
    Ok(dense::measure_sv_eps(&at.to_dense(), &a.to_dense(), &d, &d)?.epsilon)
}

fn coalesce(g: &UndirectedGraph) -> Result<UndirectedGraph> {
    let mut acc: BTreeMap<(usize, usize), Dyadic> = BTreeMap::new();
    for e in g.edges() {
        let key = (e.u.min(e.v), e.u.max(e.v));
        let slot = acc.entry(key).or_insert(Dyadic::ZERO);
        *slot = slot.checked_add(&e.w)?;
    }
    rebuild(g, acc.into_iter().map(|((u, v), w)| UEdge { u, v, w }).collect())
}

/// Multi-round sparsifier for bipartite graphs with positive integer weights.
/// Degrees are preserved exactly; the input is returned verbatim when no
/// round changes anything.
pub fn sparsify_graph(eps: f64, g: &UndirectedGraph, params: &SparsifyParams, seed: Seed) -> Result<(UndirectedGraph, SparsifyReport)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParam(format!("eps = {eps} must be positive")));
    }
    if let Some(e) = g.edges().iter().find(|e| !e.w.is_integer()) {
        return Err(Error::InvalidWeight(format!("{} is not an integer", e.w)));
    }
    let side = bipartition_of(g)?;
    let mut expanded = Vec::new();
    for e in g.edges() {
        let x = e.w.numerator();
        for i in 0..128 {
            if x >> i & 1 == 1 {
                expanded.push(UEdge { w: Dyadic::from_int(1u128 << i), ..*e });
            }
        }
    }
    let mut h = UndirectedGraph::new(g.n(), expanded)?.with_bipartition(side)?;
    let t = params
        .max_rounds
        .unwrap_or_else(|| (g.n().max(2) as f64).log2().ceil() as usize)
        .max(1);
    let eps_r = eps / (2.0 * t as f64);
    let verify = params.verify && g.n() <= params.oracle_cap;
    let mut rounds = Vec::new();
    let mut any = false;
    for round in 1..=t {
        let mut attempt = 0;
        let (next, changed, measured) = loop {
            attempt += 1;
            let (cand, changed) = sparsify_cycle_inner(eps_r, &h, params, seed.child2(round as u64, attempt as u64))?;
            if !changed || !verify {
                break (cand, changed, None);
            }
            let e = measure_undirected_sv(&cand, &h)?;
            if e <= eps_r {
                break (cand, true, Some(e));
            }
            if attempt >= params.max_attempts {
                return Err(Error::VerificationFailed { attempts: attempt, eps: e, target: eps_r });
            }
        };
        rounds.push(RoundReport {
            round,
            eps_budget: eps_r,
            edges_before: h.m(),
            edges_after: next.m(),
            changed,
            attempts: attempt,
            measured_eps: measured,
        });
        if !changed {
            break;
        }
        any = true;
        h = next;
    }
    let out = if any { coalesce(&h)? } else { g.clone() };
    let report = SparsifyReport {
        edges_in: g.m(),
        edges_out: out.m(),
        changed: any,
        rounds,
    };
    Ok((out, report))
}

/// Directed SV sparsifier: lift, sparsify, extract. Weights are scaled to
/// integers at the graph's common scale and scaled back afterwards.
pub fn sv_sparsify_digraph(eps: f64, a: &WeightedDigraph, params: &SparsifyParams, seed: Seed) -> Result<(WeightedDigraph, SparsifyReport)> {
    let s = a.common_scale();
    let ints = a.scaled_pow2(s as i64)?;
    let lift = graph::bipartite_lift(&ints)?;
    let (h, report) = sparsify_graph(eps, &lift, params, seed)?;
    if !report.changed {
        return Ok((a.clone(), report));
    }
    let mut out = graph::extract_directed(&h)?.scaled_pow2(-(s as i64))?;
    out.name = a.name.clone();
    out.seed = a.seed;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn forced() -> SparsifyParams {
        SparsifyParams { c: 1e-6, phi: 0.5, verify: false, ..SparsifyParams::default() }
    }

    #[test]
    fn four_cycle_unchanged() {
        let g = UndirectedGraph::new(
            4,
            (0..4).map(|i| UEdge { u: i, v: (i + 1) % 4, w: Dyadic::ONE }).collect(),
        )
        .unwrap();
        let h = sparsify_cycle_unweighted(0.9, &g, 16.0, Seed(1)).unwrap();
        assert_eq!(h, g);
    }

    #[test]
    fn unweighted_regular_degrees_exact() {
        let d = gen::regular_random(100, 8, Seed(3)).unwrap();
        let lift = graph::bipartite_lift(&d).unwrap();
        let h = sparsify_cycle_unweighted(0.5, &lift, 0.05, Seed(4)).unwrap();
        assert!(h.m() < lift.m());
        assert!(h.degrees().unwrap().iter().all(|&x| x == Dyadic::from_int(8)));
        assert!(h.edges().iter().all(|e| e.w == Dyadic::ONE || e.w == Dyadic::from_int(2)));
        assert!(h.bipartition().is_some());
    }

    #[test]
    fn non_bipartite_rejected() {
        let tri = UndirectedGraph::new(
            3,
            (0..3).map(|i| UEdge { u: i, v: (i + 1) % 3, w: Dyadic::ONE }).collect(),
        )
        .unwrap();
        assert_eq!(sparsify_cycle_unweighted(0.5, &tri, 1.0, Seed(0)), Err(Error::NotBipartite));
    }

    #[test]
    fn two_bucket_degrees() {
        let g = gen::eulerian_random(40, 30, Seed(8)).unwrap();
        let lift = graph::bipartite_lift(&g).unwrap();
        let (h, rep) = sparsify_graph(0.5, &lift, &forced(), Seed(2)).unwrap();
        assert!(rep.changed);
        assert_eq!(h.degrees().unwrap(), lift.degrees().unwrap());
        assert!(h.edges().iter().all(|e| (e.u < 40) != (e.v < 40)));
    }

    #[test]
    fn default_params_leave_small_graph_unchanged() {
        let g = gen::eulerian_random(16, 4, Seed(1)).unwrap();
        let (h, rep) = sv_sparsify_digraph(0.3, &g, &SparsifyParams::default(), Seed(1)).unwrap();
        assert_eq!(h, g);
        assert!(!rep.changed);
    }

    #[test]
    fn directed_forced_degrees_and_eps_match_lift() {
        let g = gen::eulerian_random(24, 20, Seed(5)).unwrap().scaled_pow2(-3).unwrap();
        let (h, _) = sv_sparsify_digraph(0.5, &g, &forced(), Seed(6)).unwrap();
        assert_eq!(graph::degrees(&h).unwrap(), graph::degrees(&g).unwrap());
        let direct = dense::measure_sv_eps_graphs(&h, &g).unwrap().epsilon;
        let lh = graph::bipartite_lift(&h).unwrap();
        let lg = graph::bipartite_lift(&g).unwrap();
        let lifted = measure_undirected_sv(&lh, &lg).unwrap();
        assert!((direct - lifted).abs() < 1e-8, "{direct} vs {lifted}");
    }
}

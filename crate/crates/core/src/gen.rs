//! Deterministic test-graph generators. Every randomized generator draws
//! from the given [`Seed`] only.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};
use crate::powers::ExpanderSpec;
use crate::rng::Seed;

fn named(mut g: WeightedDigraph, name: String, seed: Option<u64>) -> WeightedDigraph {
    g.name = Some(name);
    g.seed = seed;
    g
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParam(msg.into()))
    }
}

/// Directed `n`-cycle `i -> i + 1 (mod n)` with unit weights.
pub fn cycle(n: usize) -> Result<WeightedDigraph> {
    need(n >= 1, "cycle needs n >= 1")?;
    let arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(named(WeightedDigraph::from_arcs(n, &arcs)?, format!("cycle-{n}"), None))
}

/// Cayley digraph on `Z_n`: arcs `i -> i + o (mod n)` for every offset `o`
/// (repeated offsets add up). Its walk matrix is circulant, hence normal.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<WeightedDigraph> {
    need(n >= 1 && !offsets.is_empty(), "circulant needs n >= 1 and at least one offset")?;
    let arcs: Vec<(usize, usize)> = (0..n).flat_map(|i| offsets.iter().map(move |&o| (i, (i + o) % n))).collect();
    Ok(named(WeightedDigraph::from_arcs(n, &arcs)?.merged()?, format!("circulant-{n}"), None))
}

/// Lazy directed cycle: loop weight `1/2 + δ`, arc weight `1/2 − δ`.
pub fn lazy_cycle(n: usize, delta: Dyadic) -> Result<WeightedDigraph> {
    need(n >= 1, "lazy-cycle needs n >= 1")?;
    let half = Dyadic::new(1, 1)?;
    if delta >= half {
        return Err(Error::InvalidParam(format!("delta = {delta} must be below 1/2")));
    }
    let (lp, arc) = (half.checked_add(&delta)?, half.checked_sub(&delta)?);
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        edges.push(Edge { tail: i, head: i, w: lp });
        edges.push(Edge { tail: i, head: (i + 1) % n, w: arc });
    }
    Ok(named(WeightedDigraph::new(n, edges)?, format!("lazy-cycle-{n}-{delta}"), None))
}

/// All `n²` arcs including self-loops, unit weights.
pub fn complete_loops(n: usize) -> Result<WeightedDigraph> {
    need(n >= 1, "complete-loops needs n >= 1")?;
    let arcs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    Ok(named(WeightedDigraph::from_arcs(n, &arcs)?, format!("complete-loops-{n}"), None))
}

/// Union of `d` uniformly random permutations; every vertex has in- and
/// out-degree `d`.
pub fn regular_random(n: usize, d: usize, seed: Seed) -> Result<WeightedDigraph> {
    need(n >= 1 && d >= 1, "regular-random needs n, d >= 1")?;
    let mut rng = seed.rng();
    let mut arcs = Vec::with_capacity(n * d);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..d {
        perm.shuffle(&mut rng);
        arcs.extend((0..n).map(|i| (i, perm[i])));
    }
    Ok(named(WeightedDigraph::from_arcs(n, &arcs)?, format!("regular-random-{n}-{d}"), Some(seed.0)))
}

/// A random Hamiltonian cycle plus `k` random simple cycles, each cycle with
/// one integer weight drawn from `1..=4`.
pub fn eulerian_random(n: usize, k: usize, seed: Seed) -> Result<WeightedDigraph> {
    need(n >= 1, "eulerian-random needs n >= 1")?;
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    let push_cycle = |vs: &[usize], w: u128, edges: &mut Vec<Edge>| {
        for i in 0..vs.len() {
            edges.push(Edge { tail: vs[i], head: vs[(i + 1) % vs.len()], w: Dyadic::from_int(w) });
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let w = rng.random_range(1..=4u128);
    push_cycle(&perm, w, &mut edges);
    for _ in 0..k {
        let len = if n >= 2 { rng.random_range(2..=n) } else { 1 };
        let (chosen, _) = perm.partial_shuffle(&mut rng, len);
        let vs = chosen.to_vec();
        let w = rng.random_range(1..=4u128);
        push_cycle(&vs, w, &mut edges);
    }
    Ok(named(WeightedDigraph::new(n, edges)?, format!("eulerian-random-{n}-{k}"), Some(seed.0)))
}

/// Random Hamiltonian cycle plus `extra` random arcs between distinct
/// vertices, integer weights in `1..=max_w`. Strongly connected, generally
/// not Eulerian.
pub fn strongly_connected_random(n: usize, extra: usize, max_w: u128, seed: Seed) -> Result<WeightedDigraph> {
    need(n >= 2 && max_w >= 1, "strongly-connected-random needs n >= 2, max_w >= 1")?;
    let mut rng = seed.rng();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(n + extra);
    for i in 0..n {
        let w = Dyadic::from_int(rng.random_range(1..=max_w));
        edges.push(Edge { tail: perm[i], head: perm[(i + 1) % n], w });
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        let w = Dyadic::from_int(rng.random_range(1..=max_w));
        edges.push(Edge { tail: u, head: v, w });
    }
    Ok(named(WeightedDigraph::new(n, edges)?, format!("strongly-connected-random-{n}-{extra}"), Some(seed.0)))
}

/// Random `c`-regular symmetric expander on `d` vertices as a digraph.
pub fn expander(d: usize, c: usize, seed: Seed) -> Result<WeightedDigraph> {
    let h = ExpanderSpec::random_regular(d, c, seed)?;
    Ok(named(h.to_digraph()?, format!("expander-{d}-{c}"), Some(seed.0)))
}

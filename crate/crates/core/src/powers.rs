//! Graph products and powers: exact and grid-rounded products, the
//! derandomized square, weight fixing on a dyadic grid, and the power
//! sparsifier.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use bigint_util::{lcm, to_u128};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::dense;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::graph::{self, Edge, EulerianView, WeightedDigraph};
use crate::rng::Seed;
use crate::sparsify::{self, SparsifyParams};

mod bigint_util {
    use num_bigint::BigUint;

    pub fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
        while b != BigUint::ZERO {
            let r = &a % &b;
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
        if *a == BigUint::ZERO || *b == BigUint::ZERO {
            return BigUint::ZERO;
        }
        a / gcd(a.clone(), b.clone()) * b
    }

    pub fn to_u128(x: &BigUint) -> Option<u128> {
        let digits = x.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => Some(digits[0] as u128),
            2 => Some(digits[0] as u128 | (digits[1] as u128) << 64),
            _ => None,
        }
    }
}

/// A `c`-regular multigraph on `d` vertices given by its neighbor table,
/// with its certified second normalized singular value.
#[derive(Clone, Debug, Serialize)]
pub struct ExpanderSpec {
    d: usize,
    c: usize,
    neighbors: Vec<Vec<usize>>,
    lambda: f64,
}

impl ExpanderSpec {
    /// Validates the table and certifies `lambda` by a dense SVD.
    pub fn from_neighbors(neighbors: Vec<Vec<usize>>) -> Result<ExpanderSpec> {
        let d = neighbors.len();
        if d == 0 {
            return Err(Error::InvalidParam("expander needs at least one vertex".into()));
        }
        let c = neighbors[0].len();
        if c == 0 {
            return Err(Error::InvalidParam("expander degree must be positive".into()));
        }
        for (a, row) in neighbors.iter().enumerate() {
            if row.len() != c {
                return Err(Error::InvalidParam(format!("vertex {a} has {} neighbors, expected {c}", row.len())));
            }
            if let Some(&b) = row.iter().find(|&&b| b >= d) {
                return Err(Error::VertexOutOfRange { vertex: b, n: d });
            }
        }
        let mut w = DMatrix::zeros(d, d);
        for (a, row) in neighbors.iter().enumerate() {
            for &b in row {
                w[(b, a)] += 1.0 / c as f64;
            }
        }
        let s = dense::singular_values_desc(&w);
        if (s[0] - 1.0).abs() > 1e-9 || (0..d).any(|b| (w.row(b).sum() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidParam("neighbor table is not regular".into()));
        }
        let lambda = s.get(1).copied().unwrap_or(0.0);
        Ok(ExpanderSpec { d, c, neighbors, lambda })
    }

    /// Complete graph with a self-loop at every vertex (`c = d`).
    pub fn complete_with_loops(d: usize) -> Result<ExpanderSpec> {
        ExpanderSpec::from_neighbors((0..d).map(|_| (0..d).collect()).collect())
    }

    /// Symmetric `c`-regular multigraph built from `c/2` random permutations
    /// and their inverses (`c` even).
    pub fn random_regular(d: usize, c: usize, seed: Seed) -> Result<ExpanderSpec> {
        if c == 0 || c % 2 != 0 || d == 0 {
            return Err(Error::InvalidParam(format!("random expander needs d >= 1 and even c >= 2, got d = {d}, c = {c}")));
        }
        let mut rng = seed.rng();
        let mut neighbors = vec![Vec::with_capacity(c); d];
        let mut perm: Vec<usize> = (0..d).collect();
        for _ in 0..c / 2 {
            perm.shuffle(&mut rng);
            for a in 0..d {
                neighbors[a].push(perm[a]);
                neighbors[perm[a]].push(a);
            }
        }
        ExpanderSpec::from_neighbors(neighbors)
    }

    /// Retries [`ExpanderSpec::random_regular`] with child seeds until the
    /// certified `lambda` is at most `max_lambda`.
    pub fn random_regular_below(d: usize, c: usize, max_lambda: f64, seed: Seed, attempts: usize) -> Result<ExpanderSpec> {
        let mut best = f64::INFINITY;
        for k in 0..attempts.max(1) {
            let h = ExpanderSpec::random_regular(d, c, seed.child(k as u64))?;
            if h.lambda <= max_lambda {
                return Ok(h);
            }
            best = best.min(h.lambda);
        }
        Err(Error::InvalidParam(format!(
            "no {c}-regular expander on {d} vertices with lambda <= {max_lambda} (best {best})"
        )))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> usize {
        self.c
    }

    /// Second singular value of the walk matrix of the expander.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn neighbor(&self, a: usize, j: usize) -> usize {
        self.neighbors[a][j]
    }

    pub fn to_digraph(&self) -> Result<WeightedDigraph> {
        let arcs: Vec<(usize, usize)> = self
            .neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&b| (a, b)))
            .collect();
        WeightedDigraph::from_arcs(self.d, &arcs)
    }
}

/// Rotation map of a `d`-regular multigraph with labels taken from edge
/// order: `out[v][i]` is the head of the `i`th arc leaving `v`, which is the
/// `in_label[v][i]`th arc entering that head.
#[derive(Clone, Debug)]
pub struct RotationMap {
    pub d: usize,
    pub out: Vec<Vec<usize>>,
    pub in_label: Vec<Vec<usize>>,
}

/// Integer weights are read as arc multiplicities.
pub fn rotation_map(g: &WeightedDigraph) -> Result<RotationMap> {
    let n = g.n();
    let mut out = vec![Vec::new(); n];
    let mut in_label = vec![Vec::new(); n];
    let mut in_count = vec![0usize; n];
    for e in g.edges() {
        if !e.w.is_integer() {
            return Err(Error::InvalidWeight(format!("{} is not an integer multiplicity", e.w)));
        }
        let k = usize::try_from(e.w.numerator()).map_err(|_| Error::Overflow(format!("multiplicity {}", e.w)))?;
        for _ in 0..k {
            out[e.tail].push(e.head);
            in_label[e.tail].push(in_count[e.head]);
            in_count[e.head] += 1;
        }
    }
    let d = out.first().map_or(0, Vec::len);
    for v in 0..n {
        if out[v].len() != d {
            return Err(Error::DegreeMismatch(v));
        }
        if in_count[v] != d {
            return Err(Error::DegreeMismatch(v));
        }
    }
    Ok(RotationMap { d, out, in_label })
}

/// Derandomized square: from `v` take arc `i` to `u`, arriving on in-port
/// `a`, then take the arc of `u` labelled `Γ_H(a, j)`. Output is `dc`-regular
/// with unit weights (not merged).
pub fn derandomized_square(g: &WeightedDigraph, h: &ExpanderSpec) -> Result<WeightedDigraph> {
    let rot = rotation_map(g)?;
    if h.d() != rot.d {
        return Err(Error::DimensionMismatch(format!("expander has {} vertices, graph degree is {}", h.d(), rot.d)));
    }
    let mut arcs = Vec::with_capacity(g.n() * rot.d * h.c());
    for v in 0..g.n() {
        for i in 0..rot.d {
            let u = rot.out[v][i];
            let a = rot.in_label[v][i];
            for j in 0..h.c() {
                arcs.push((v, rot.out[u][h.neighbor(a, j)]));
            }
        }
    }
    WeightedDigraph::from_arcs(g.n(), &arcs)
}

/// Result of [`product_on_grid`].
#[derive(Clone, Debug)]
pub struct Product {
    pub graph: WeightedDigraph,
    /// True when every entry of `A₂ D⁺ A₁` was representable exactly.
    pub exact: bool,
}

fn shared_degrees(g1: &WeightedDigraph, g2: &WeightedDigraph) -> Result<Vec<Dyadic>> {
    if g1.n() != g2.n() {
        return Err(Error::DimensionMismatch("graphs differ in vertex count".into()));
    }
    let v1 = EulerianView::try_new(g1.clone())?;
    let v2 = EulerianView::try_new(g2.clone())?;
    if let Some(v) = (0..g1.n()).find(|&v| v1.degrees()[v] != v2.degrees()[v]) {
        return Err(Error::DegreeMismatch(v));
    }
    Ok(v1.degrees().to_vec())
}

/// Adds edges from out-shortfall vertices to in-shortfall vertices (greedy,
/// vertex order) until the degrees equal the targets exactly.
pub(crate) fn patch_to_degrees(g: WeightedDigraph, d_in: &[Dyadic], d_out: &[Dyadic]) -> Result<WeightedDigraph> {
    let (cur_in, cur_out) = graph::degrees(&g)?;
    let n = g.n();
    let mut s_in = Vec::with_capacity(n);
    let mut s_out = Vec::with_capacity(n);
    for v in 0..n {
        s_in.push(d_in[v].checked_sub(&cur_in[v]).map_err(|_| Error::DegreeMismatch(v))?);
        s_out.push(d_out[v].checked_sub(&cur_out[v]).map_err(|_| Error::DegreeMismatch(v))?);
    }
    if crate::dyadic::sum(&s_in)? != crate::dyadic::sum(&s_out)? {
        return Err(Error::DegreeMismatch(0));
    }
    let mut edges = g.into_edges();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        while i < n && s_out[i].is_zero() {
            i += 1;
        }
        while j < n && s_in[j].is_zero() {
            j += 1;
        }
        if i >= n || j >= n {
            break;
        }
        let amt = s_out[i].min(s_in[j]);
        edges.push(Edge { tail: i, head: j, w: amt });
        s_out[i] = s_out[i].checked_sub(&amt)?;
        s_in[j] = s_in[j].checked_sub(&amt)?;
    }
    WeightedDigraph::new(n, edges)
}

/// `A₂ D⁺ A₁` (a step in `G₁` followed by a step in `G₂`). Entries are kept
/// exact when dyadic; otherwise every entry is floored to the `2^(-t)` grid
/// and the degree shortfall is patched back so the degrees stay exactly `D`.
pub fn product_on_grid(g1: &WeightedDigraph, g2: &WeightedDigraph, t: u32) -> Result<Product> {
    let d = shared_degrees(g1, g2)?;
    let n = g1.n();
    let (s1, s2) = (g1.common_scale(), g2.common_scale());
    let s = s1 + s2;
    let mut l = BigUint::from(1u8);
    for dk in &d {
        if !dk.is_zero() {
            l = lcm(&l, &BigUint::from(dk.numerator()));
        }
    }
    let mut out2: Vec<Vec<(usize, u128)>> = vec![Vec::new(); n];
    for e in g2.edges() {
        out2[e.tail].push((e.head, e.w.numerator_at(s2)?));
    }
    let mut acc: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
    for e1 in g1.edges() {
        let k = e1.head;
        if out2[k].is_empty() {
            continue;
        }
        let dk = &d[k];
        let base = BigUint::from(e1.w.numerator_at(s1)?) * (&l / BigUint::from(dk.numerator())) << dk.exponent();
        for &(j, b) in &out2[k] {
            *acc.entry((e1.tail, j)).or_insert_with(|| BigUint::ZERO) += &base * BigUint::from(b);
        }
    }
    // exact attempt
    let mut exact_edges = Vec::with_capacity(acc.len());
    let mut exact = true;
    for (&(tail, head), num) in &acc {
        if !(num % &l).eq(&BigUint::ZERO) {
            exact = false;
            break;
        }
        let m = num / &l;
        let tz = m.trailing_zeros().unwrap_or(0).min(s as u64) as u32;
        let m = m >> tz;
        match to_u128(&m) {
            Some(x) if s - tz <= crate::dyadic::MAX_EXP => exact_edges.push(Edge { tail, head, w: Dyadic::new(x, s - tz)? }),
            _ => {
                exact = false;
                break;
            }
        }
    }
    if exact {
        return Ok(Product { graph: WeightedDigraph::new(n, exact_edges)?, exact: true });
    }
    let mut edges = Vec::with_capacity(acc.len());
    for (&(tail, head), num) in &acc {
        let q = if t >= s { (num << (t - s)) / &l } else { (num / &l) >> (s - t) };
        let x = to_u128(&q).ok_or_else(|| Error::Overflow(format!("product entry on grid 2^-{t}")))?;
        edges.push(Edge { tail, head, w: Dyadic::new(x, t)? });
    }
    let floored = WeightedDigraph::new(n, edges)?;
    Ok(Product { graph: patch_to_degrees(floored, &d, &d)?, exact: false })
}

/// Exact `A₂ D⁺ A₁`; fails with `InvalidParam` if an entry is not dyadic.
pub fn exact_product(g1: &WeightedDigraph, g2: &WeightedDigraph) -> Result<WeightedDigraph> {
    let p = product_on_grid(g1, g2, 0)?;
    if !p.exact {
        return Err(Error::InvalidParam("product has non-dyadic entries; use product_on_grid".into()));
    }
    Ok(p.graph)
}

/// Floors every weight to a multiple of `2^(-t)` and patches the degree
/// shortfall with at most `2n` new edges. Degrees are preserved exactly and
/// `‖A_H − A_G‖ ≤ 2n · 2^(-t)`.
pub fn fix_edge_weights(t: u32, g: &EulerianView) -> Result<EulerianView> {
    if g.graph().edges().iter().all(|e| e.w.exponent() <= t) {
        return Ok(g.clone());
    }
    let base = if g.graph().has_parallel_edges() { g.graph().merged()? } else { g.graph().clone() };
    let edges: Vec<Edge> = base.edges().iter().map(|e| Edge { w: e.w.floor_to(t), ..*e }).collect();
    let floored = WeightedDigraph::new(g.n(), edges)?;
    let mut h = patch_to_degrees(floored, g.degrees(), g.degrees())?;
    h.name = g.graph().name.clone();
    h.seed = g.graph().seed;
    EulerianView::try_new(h)
}

/// Product followed by the directed SV sparsifier.
pub fn sparsify_product(
    eps: f64,
    g1: &WeightedDigraph,
    g2: &WeightedDigraph,
    grid: u32,
    params: &SparsifyParams,
    seed: Seed,
) -> Result<(WeightedDigraph, Product)> {
    let p = product_on_grid(g1, g2, grid)?;
    let (h, _) = sparsify::sv_sparsify_digraph(eps, &p.graph, params, seed)?;
    Ok((h, p))
}

/// Stage schedule of [`sparsify_power`].
#[derive(Clone, Debug, Serialize)]
pub struct PowerPlan {
    pub ell: u64,
    /// Binary expansion, most significant bit first.
    pub bits: Vec<bool>,
    /// Number of bits of `ell`.
    pub t: usize,
    /// Effective epsilon (`min(eps, 0.25)`).
    pub eps: f64,
    /// Budget for each product, weight-fix and sparsify step.
    pub stage_eps: f64,
    /// Absolute grid exponent for weight fixing.
    pub l: u32,
}

pub const MAX_GRID_EXP: u32 = 100;
pub const MAX_POWER_EPS: f64 = 0.25;

pub fn plan_power(eps: f64, ell: u64, g: &EulerianView, tau: f64) -> Result<PowerPlan> {
    if ell == 0 {
        return Err(Error::InvalidParam("ell must be at least 1".into()));
    }
    if !(eps > 0.0) || !(tau >= 1.0) {
        return Err(Error::InvalidParam(format!("need eps > 0 and tau >= 1 (eps = {eps}, tau = {tau})")));
    }
    let bits: Vec<bool> = (0..64 - ell.leading_zeros()).rev().map(|i| ell >> i & 1 == 1).collect();
    let t = bits.len();
    let eps_eff = eps.min(MAX_POWER_EPS);
    let (wmax, wmin) = (g.graph().max_weight().to_f64(), g.graph().min_weight().to_f64());
    let u = if wmin > 0.0 { (wmax / wmin).ceil() } else { 1.0 };
    let base = if wmin > 0.0 { (-wmin.log2()).ceil().max(0.0) } else { 0.0 };
    let extra = (64.0 * g.n() as f64 * u * ell as f64 * tau / eps_eff).log2().ceil().max(0.0);
    let l = ((base + extra) as u32).max(g.graph().common_scale()).min(MAX_GRID_EXP);
    Ok(PowerPlan { ell, bits, t, eps: eps_eff, stage_eps: eps_eff / (3.0 * t as f64), l })
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub kind: &'static str,
    pub edges: usize,
    pub exact_product: bool,
    pub sigma2: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PowerOutcome {
    pub view: EulerianView,
    pub plan: PowerPlan,
    pub sigma_input: Option<f64>,
    pub stages: Vec<StageReport>,
}

fn record(kind: &'static str, g: &EulerianView, exact: bool, cap: usize) -> Result<StageReport> {
    let sigma2 = if g.n() <= cap { Some(dense::second_normalized_singular(g)?) } else { None };
    Ok(StageReport { kind, edges: g.graph().m(), exact_product: exact, sigma2 })
}

/// Power sparsifier by binary expansion of `ell`: sparsify `G`, then for each
/// further bit square (and multiply by the sparsified `G` when the bit is
/// set), fixing weights to the plan's grid and re-sparsifying after every
/// product. Output degrees equal the input degrees.
pub fn sparsify_power(
    eps: f64,
    g: &EulerianView,
    ell: u64,
    tau: f64,
    params: &SparsifyParams,
    seed: Seed,
) -> Result<PowerOutcome> {
    let plan = plan_power(eps, ell, g, tau)?;
    let cap = params.oracle_cap;
    let sigma_input = if g.n() <= cap {
        let s = dense::second_normalized_singular(g)?;
        let bound = 1.0 - 1.0 / tau;
        if s > bound + 1e-9 {
            return Err(Error::SingularityTooClose { sigma: s, bound });
        }
        Some(s)
    } else {
        None
    };
    let mut stages = Vec::new();
    let (g1, _) = sparsify::sv_sparsify_digraph(plan.eps / 2.0, g.graph(), params, seed.child(0))?;
    let g1 = EulerianView::try_new(g1)?;
    stages.push(record("sparsify", &g1, true, cap)?);
    let mut cur = g1.clone();
    let mut step = 0u64;
    let mut stage = |cur: &EulerianView, other: &EulerianView, kind: &'static str, stages: &mut Vec<StageReport>| -> Result<EulerianView> {
        step += 1;
        let (p, prod) = sparsify_product(plan.stage_eps, cur.graph(), other.graph(), plan.l, params, seed.child2(step, 1))?;
        let p = EulerianView::try_new(p)?;
        let h = fix_edge_weights(plan.l, &p)?;
        let (gs, _) = sparsify::sv_sparsify_digraph(plan.stage_eps, h.graph(), params, seed.child2(step, 2))?;
        let gs = EulerianView::try_new(gs)?;
        stages.push(record(kind, &gs, prod.exact, cap)?);
        Ok(gs)
    };
    for &bit in &plan.bits[1..] {
        cur = stage(&cur, &cur, "square", &mut stages)?;
        if bit {
            cur = stage(&cur, &g1, "multiply", &mut stages)?;
        }
    }
    if let Some(v) = (0..g.n()).find(|&v| cur.degrees()[v] != g.degrees()[v]) {
        return Err(Error::DegreeMismatch(v));
    }
    Ok(PowerOutcome { view: cur, plan, sigma_input, stages })
}

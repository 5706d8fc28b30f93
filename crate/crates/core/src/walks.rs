//! Random walks on strongly connected digraphs: stationary vectors, Eulerian
//! scaling, lazification, cut values and the cut-estimation pipeline.
//!
//! Cut values use the stationary distribution on edges: the mass of the edge
//! `i -> j` is `W[j][i] · π_i`, so all masses sum to 1.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dense;
use crate::dyadic::{self, Dyadic};
use crate::error::{Error, Result};
use crate::graph::{self, Edge, EulerianView, WeightedDigraph};
use crate::powers::{self, PowerOutcome};
use crate::rng::Seed;
use crate::sparsify::SparsifyParams;

#[derive(Clone, Debug, Serialize)]
pub struct StationaryInfo {
    pub pi: Vec<f64>,
    pub pi_min: f64,
    /// `‖W·π − π‖₂`.
    pub residual: f64,
}

/// Stationary distribution of the random walk on `g`.
pub fn stationary(g: &WeightedDigraph) -> Result<StationaryInfo> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParam("empty graph".into()));
    }
    if !graph::is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    if n == 1 {
        return Ok(StationaryInfo { pi: vec![1.0], pi_min: 1.0, residual: 0.0 });
    }
    let w = g.walk_matrix();
    let mut m = &w - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        m[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let lu = m.clone().lu();
    let mut x = lu.solve(&b).ok_or_else(|| Error::NotDefined("singular stationary system".into()))?;
    let r = &b - &m * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let total = x.sum();
    x /= total;
    let residual = (&w * &x - &x).norm();
    let pi: Vec<f64> = x.iter().copied().collect();
    let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
    if !(pi_min > 0.0) {
        return Err(Error::NotDefined(format!("stationary vector has entry {pi_min}")));
    }
    Ok(StationaryInfo { pi, pi_min, residual })
}

/// Edge distribution `W · diag(π)` (entry `[j][i]` is the mass of `i -> j`).
pub fn edge_distribution(g: &WeightedDigraph) -> Result<DMatrix<f64>> {
    let info = stationary(g)?;
    Ok(g.walk_matrix() * dense::diag(&info.pi))
}

/// Mass of `ℓ`-step walks started from stationarity: `W^ℓ · diag(π)`.
pub fn power_mass(g: &WeightedDigraph, ell: u64) -> Result<DMatrix<f64>> {
    let info = stationary(g)?;
    let w = g.walk_matrix();
    let mut p = DMatrix::<f64>::identity(g.n(), g.n());
    for _ in 0..ell {
        p = &w * p;
    }
    Ok(p * dense::diag(&info.pi))
}

#[derive(Clone, Debug, Serialize)]
pub struct CutQuery {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// `Cut(S, T)`.
    pub value: f64,
    pub cut_s: f64,
    pub uncut_s: f64,
    pub cut_t: f64,
    pub uncut_t: f64,
}

impl CutQuery {
    pub fn min_s(&self) -> f64 {
        self.cut_s.min(self.uncut_s)
    }

    pub fn min_t(&self) -> f64 {
        self.cut_t.min(self.uncut_t)
    }
}

fn mask(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut m = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        m[v] = true;
    }
    Ok(m)
}

fn members(m: &[bool]) -> Vec<usize> {
    (0..m.len()).filter(|&v| m[v]).collect()
}

fn complement(m: &[bool]) -> Vec<bool> {
    m.iter().map(|&b| !b).collect()
}

fn build_query<F>(n: usize, s: &[usize], t: &[usize], mass: F) -> Result<CutQuery>
where
    F: Fn(&[bool], &[bool]) -> Result<f64>,
{
    let sm = mask(n, s)?;
    let tm = mask(n, t)?;
    let cut_uncut = |m: &[bool]| -> Result<(f64, f64)> {
        let c = complement(m);
        let cut = (mass(m, &c)? + mass(&c, m)?) / 2.0;
        let uncut = (mass(m, m)? + mass(&c, &c)?) / 2.0;
        Ok((cut, uncut))
    };
    let (cut_s, uncut_s) = cut_uncut(&sm)?;
    let (cut_t, uncut_t) = cut_uncut(&tm)?;
    Ok(CutQuery { s: members(&sm), t: members(&tm), value: mass(&sm, &tm)?, cut_s, uncut_s, cut_t, uncut_t })
}

/// Cut query against a dense mass matrix (`mass[j][i]` for the pair `i -> j`).
pub fn cut_query(mass: &DMatrix<f64>, s: &[usize], t: &[usize]) -> Result<CutQuery> {
    let n = mass.nrows();
    build_query(n, s, t, |sm, tm| {
        let mut acc = 0.0;
        for i in (0..n).filter(|&i| sm[i]) {
            for j in (0..n).filter(|&j| tm[j]) {
                acc += mass[(j, i)];
            }
        }
        Ok(acc)
    })
}

/// Cut query under the stationary edge distribution of `g`.
pub fn cut_value(g: &WeightedDigraph, s: &[usize], t: &[usize]) -> Result<CutQuery> {
    cut_query(&edge_distribution(g)?, s, t)
}

/// Cut query reading edge weights of `h` directly as masses, summed exactly.
pub fn cut_exact(h: &WeightedDigraph, s: &[usize], t: &[usize]) -> Result<CutQuery> {
    build_query(h.n(), s, t, |sm, tm| {
        let sel: Vec<Dyadic> = h.edges().iter().filter(|e| sm[e.tail] && tm[e.head]).map(|e| e.w).collect();
        Ok(dyadic::sum(&sel)?.to_f64())
    })
}

/// Eulerian graph with adjacency `A · D_out^{-1} · diag(π)`, weights floored to
/// the `2^(-t0)` grid and each degree repaired to `max(in, out)`.
pub fn eulerian_scale(g: &WeightedDigraph, info: &StationaryInfo, t0: u32) -> Result<EulerianView> {
    let n = g.n();
    if info.pi.len() != n {
        return Err(Error::DimensionMismatch(format!("pi has {} entries for n = {n}", info.pi.len())));
    }
    let (_, d_out) = graph::degrees(g)?;
    let d_out = graph::to_f64_vec(&d_out);
    let edges = g
        .edges()
        .iter()
        .map(|e| Ok(Edge { w: Dyadic::from_f64_floor(e.w.to_f64() * info.pi[e.tail] / d_out[e.tail], t0)?, ..*e }))
        .collect::<Result<Vec<_>>>()?;
    let floored = WeightedDigraph::new(n, edges)?.merged()?;
    let (d_in, d_out) = graph::degrees(&floored)?;
    let target: Vec<Dyadic> = d_in.iter().zip(&d_out).map(|(a, b)| *a.max(b)).collect();
    let mut h = powers::patch_to_degrees(floored, &target, &target)?;
    h.name = g.name.clone();
    h.seed = g.seed;
    EulerianView::try_new(h)
}

/// `(1 − γ) N + γ I`.
pub fn lazify(n: &DMatrix<f64>, gamma: f64) -> DMatrix<f64> {
    n * (1.0 - gamma) + DMatrix::<f64>::identity(n.nrows(), n.ncols()) * gamma
}

/// Graph realization of [`lazify`]: `(1 − γ) A + γ D`, computed exactly.
pub fn lazify_graph(g: &EulerianView, gamma: Dyadic) -> Result<WeightedDigraph> {
    if gamma > Dyadic::ONE {
        return Err(Error::InvalidParam(format!("gamma = {gamma} exceeds 1")));
    }
    let keep = Dyadic::ONE.checked_sub(&gamma)?;
    let mut edges = g
        .graph()
        .edges()
        .iter()
        .map(|e| Ok(Edge { w: e.w.checked_mul(&keep)?, ..*e }))
        .collect::<Result<Vec<_>>>()?;
    for (v, d) in g.degrees().iter().enumerate() {
        edges.push(Edge { tail: v, head: v, w: d.checked_mul(&gamma)? });
    }
    let mut h = WeightedDigraph::new(g.n(), edges)?.merged()?;
    h.name = g.graph().name.clone();
    h.seed = g.graph().seed;
    Ok(h)
}

/// [`lazify_graph`] with every weight floored to `2^(-t)` and the degree
/// shortfall patched, so degrees stay exact. Entrywise error is at most
/// `2n · 2^(-t)`.
pub fn lazify_graph_on_grid(g: &EulerianView, gamma: Dyadic, t: u32) -> Result<WeightedDigraph> {
    if gamma > Dyadic::ONE {
        return Err(Error::InvalidParam(format!("gamma = {gamma} exceeds 1")));
    }
    let keep = Dyadic::ONE.checked_sub(&gamma)?;
    let mut edges = g
        .graph()
        .edges()
        .iter()
        .map(|e| Ok(Edge { w: e.w.mul_floor(&keep, t)?, ..*e }))
        .collect::<Result<Vec<_>>>()?;
    for (v, d) in g.degrees().iter().enumerate() {
        edges.push(Edge { tail: v, head: v, w: d.mul_floor(&gamma, t)? });
    }
    edges.retain(|e| !e.w.is_zero());
    let floored = WeightedDigraph::new(g.n(), edges)?.merged()?;
    let mut h = powers::patch_to_degrees(floored, g.degrees(), g.degrees())?.merged()?;
    h.name = g.graph().name.clone();
    h.seed = g.graph().seed;
    Ok(h)
}

/// Largest power of two not exceeding `x`, for `0 < x <= 1`.
fn pow2_floor(x: f64) -> Result<Dyadic> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::InvalidParam(format!("laziness {x} outside (0, 1]")));
    }
    let mut k = (-x.log2()).floor().max(0.0) as u32;
    while 2f64.powi(-(k as i32)) > x {
        k += 1;
    }
    if k > dyadic::MAX_EXP {
        return Err(Error::Overflow(format!("laziness 2^-{k}")));
    }
    Dyadic::pow2_neg(k)
}

fn second_eigenvalue_sym(n: &DMatrix<f64>) -> f64 {
    let s = (n + n.transpose()) * 0.5;
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.get(1).copied().unwrap_or(0.0)
}

#[derive(Clone, Debug)]
pub struct ScaledPower {
    pub stationary: StationaryInfo,
    pub t0: u32,
    pub scaled: EulerianView,
    pub gamma: Dyadic,
    pub lazy: EulerianView,
    pub tau: f64,
    pub power: PowerOutcome,
}

impl ScaledPower {
    pub fn h(&self) -> &EulerianView {
        &self.power.view
    }
}

/// Sparsifies `ℓ` steps of the walk on `g` started from stationarity: the
/// output's adjacency approximates `W^ℓ · diag(π)`.
pub fn sparsify_scaled_power(
    eps: f64,
    delta: f64,
    ell: u64,
    g: &WeightedDigraph,
    s_lower: f64,
    params: &SparsifyParams,
    seed: Seed,
) -> Result<ScaledPower> {
    if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0 && s_lower > 0.0) {
        return Err(Error::InvalidParam(format!("eps = {eps}, delta = {delta}, s_lower = {s_lower}")));
    }
    let info = stationary(g)?;
    if s_lower > info.pi_min {
        return Err(Error::StationaryBound { s_lower, pi_min: info.pi_min });
    }
    let n = g.n() as f64;
    let t0 = (8.0 * n / (delta * s_lower)).log2().ceil().max(1.0) as u32;
    if t0 > dyadic::MAX_EXP {
        return Err(Error::Overflow(format!("scaling grid 2^-{t0}")));
    }
    let scaled = eulerian_scale(g, &info, t0)?;
    let gamma = pow2_floor(delta * s_lower / 4.0)?;
    let lazy = if t0 + gamma.exponent() <= dyadic::MAX_EXP {
        lazify_graph(&scaled, gamma)?
    } else {
        lazify_graph_on_grid(&scaled, gamma, dyadic::MAX_EXP)?
    };
    let lazy = EulerianView::try_new(lazy)?;
    let lambda = second_eigenvalue_sym(&scaled.normalized_dense());
    let gap = (1.0 - lambda) * gamma.to_f64();
    let mut tau = if gap > 0.0 { 2.0 / gap } else { f64::INFINITY };
    let sigma = dense::second_normalized_singular(&lazy)?;
    if !tau.is_finite() || sigma > 1.0 - 1.0 / tau {
        if sigma >= 1.0 {
            return Err(Error::SingularityTooClose { sigma, bound: 1.0 });
        }
        tau = 1.0 / (1.0 - sigma);
    }
    let power = powers::sparsify_power(eps, &lazy, ell, tau, params, seed)?;
    Ok(ScaledPower { stationary: info, t0, scaled, gamma, lazy, tau, power })
}

#[derive(Clone, Debug)]
pub struct CutEstimate {
    /// Sparsified scaled power with edges below `delta` removed.
    pub h: WeightedDigraph,
    pub delta: f64,
    /// Ratio bound `ceil(max_w / min_w)` of the input weights.
    pub u: f64,
    pub deleted: usize,
    pub pipeline: ScaledPower,
}

impl CutEstimate {
    pub fn query(&self, s: &[usize], t: &[usize]) -> Result<CutQuery> {
        cut_exact(&self.h, s, t)
    }
}

/// Builds a graph whose edge masses estimate every `ℓ`-step cut of `g`.
pub fn estimate_cut(
    eps: f64,
    ell: u64,
    g: &WeightedDigraph,
    s_lower: f64,
    params: &SparsifyParams,
    seed: Seed,
) -> Result<CutEstimate> {
    let (wmax, wmin) = (g.max_weight().to_f64(), g.min_weight().to_f64());
    if !(wmin > 0.0) {
        return Err(Error::InvalidParam("graph has no edges".into()));
    }
    let u = (wmax / wmin).ceil();
    let delta = eps * (s_lower / (2.0 * u)).powi(3) / (2.0 * g.n() as f64);
    let pipeline = sparsify_scaled_power(eps, delta, ell, g, s_lower, params, seed)?;
    let all = pipeline.h().graph().edges();
    let kept: Vec<Edge> = all.iter().filter(|e| e.w.to_f64() >= delta).copied().collect();
    let deleted = all.len() - kept.len();
    let mut h = WeightedDigraph::new(g.n(), kept)?;
    h.name = g.name.clone();
    h.seed = g.seed;
    Ok(CutEstimate { h, delta, u, deleted, pipeline })
}

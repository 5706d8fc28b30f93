//! Squaring-recursion preconditioner for `I − W` with `W` normal.
//!
//! Given approximate squares `W₀ = W, W₁ ≈ W₀², …, W_{k−1}`, the recursion
//! `P_i = ½[I + (I + W_i) P_{i+1} (I + W_i)]` turns a rough `P_k` into a
//! preconditioner `P₀`. Errors are measured in the norm
//! `‖(I−W)^{1/2} [P − (I−W)⁺] (I−W)^{1/2}‖`.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::dense::{self, DenseMatrix};
use crate::error::{Error, Result};
use crate::graph::{EulerianView, WeightedDigraph};
use crate::powers::{self, ExpanderSpec};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const NORMAL_TOL: f64 = 1e-9;
/// Eigenvalues of `I − W` below this modulus are treated as zero.
pub const PINV_CUTOFF: f64 = 1e-10;

/// `‖WᵀW − WWᵀ‖ ≤ tol · ‖W‖²`.
pub fn is_normal(w: &DenseMatrix, tol: f64) -> bool {
    if !w.is_square() {
        return false;
    }
    let c = w.transpose() * w - w * w.transpose();
    let s = dense::spectral_norm(w);
    dense::spectral_norm(&c) <= tol * s * s
}

fn complexify(m: &DenseMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

fn complex_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Unitary eigendecomposition `W = U diag(λ) U*` of a normal matrix.
#[derive(Clone, Debug)]
pub struct NormalEig {
    pub u: CMatrix,
    pub lambda: Vec<C64>,
}

impl NormalEig {
    /// Diagonalizes the Hermitian matrix `a·(W+Wᵀ)/2 − i·b·(W−Wᵀ)/2`, which
    /// shares eigenvectors with `W`, retrying other `(a, b)` until
    /// `U diag(λ) U*` reproduces `W`.
    pub fn new(w: &DenseMatrix) -> Result<NormalEig> {
        if !is_normal(w, NORMAL_TOL) {
            return Err(Error::NotNormal);
        }
        let sym = (w + w.transpose()) * 0.5;
        let skew = (w - w.transpose()) * 0.5;
        let wc = complexify(w);
        let scale = dense::spectral_norm(w).max(1.0);
        for (a, b) in [(1.0, 0.754_877_666_2), (0.618_033_988_7, 1.0), (1.0, 0.316_227_766_0), (0.271_828_182_8, 1.0)] {
            let x = sym.zip_map(&skew, |s, k| C64::new(a * s, -b * k));
            let u = x.symmetric_eigen().eigenvectors;
            let lambda: Vec<C64> = (0..w.nrows()).map(|j| (u.column(j).adjoint() * &wc * u.column(j))[(0, 0)]).collect();
            let eig = NormalEig { u, lambda };
            if complex_norm(&(eig.apply(|l| l) - &wc)) <= 1e-8 * scale {
                return Ok(eig);
            }
        }
        Err(Error::NotNormal)
    }

    /// `U diag(f(λ)) U*`.
    pub fn apply<F: Fn(C64) -> C64>(&self, f: F) -> CMatrix {
        let mut scaled = self.u.clone();
        for (j, &l) in self.lambda.iter().enumerate() {
            let fl = f(l);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= fl;
            }
        }
        scaled * self.u.adjoint()
    }

    /// Principal square root of `I − W`.
    pub fn sqrt_i_minus(&self) -> CMatrix {
        self.apply(|l| (C64::new(1.0, 0.0) - l).sqrt())
    }

    /// `(I − W)⁺`.
    pub fn pinv_i_minus(&self) -> CMatrix {
        self.apply(|l| {
            let z = C64::new(1.0, 0.0) - l;
            if z.norm() <= PINV_CUTOFF {
                C64::new(0.0, 0.0)
            } else {
                z.inv()
            }
        })
    }
}

/// `‖(I−W)^{1/2} [P − (I−W)⁺] (I−W)^{1/2}‖`.
pub fn precond_error(p: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    if p.shape() != w.shape() {
        return Err(Error::DimensionMismatch(format!("P is {:?}, W is {:?}", p.shape(), w.shape())));
    }
    let eig = NormalEig::new(w)?;
    let r = eig.sqrt_i_minus();
    let x = complexify(p) - eig.pinv_i_minus();
    Ok(complex_norm(&(&r * x * &r)))
}

/// `‖P(I−W) − I‖_B` with `B = ((I−W)^{1/2})* (I−W)^{1/2}`, as
/// `‖B^{1/2} (P(I−W) − I) (B^{1/2})⁺‖`.
pub fn precond_error_bnorm(p: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    if p.shape() != w.shape() {
        return Err(Error::DimensionMismatch(format!("P is {:?}, W is {:?}", p.shape(), w.shape())));
    }
    let eig = NormalEig::new(w)?;
    let n = w.nrows();
    let one = C64::new(1.0, 0.0);
    let b_half = eig.apply(|l| C64::new((one - l).norm().sqrt(), 0.0));
    let b_half_pinv = eig.apply(|l| {
        let r = (one - l).norm().sqrt();
        if r * r <= PINV_CUTOFF {
            C64::new(0.0, 0.0)
        } else {
            C64::new(1.0 / r, 0.0)
        }
    });
    let i_minus_w = complexify(&(DMatrix::identity(n, n) - w));
    let m = complexify(p) * i_minus_w - CMatrix::identity(n, n);
    Ok(complex_norm(&(b_half * m * b_half_pinv)))
}

/// Approximate squares `W₀ … W_{k−1}` with the measured normalized-SV
/// epsilon of each `W_i` against `W_{i−1}²`.
#[derive(Clone, Debug)]
pub struct PsChain {
    pub w: Vec<DenseMatrix>,
    /// `eps[i − 1]` belongs to step `i`.
    pub eps: Vec<f64>,
    pub k: usize,
}

impl PsChain {
    pub fn budget(&self) -> f64 {
        1.0 / (4.0 * self.k as f64)
    }

    pub fn max_eps(&self) -> f64 {
        self.eps.iter().copied().fold(0.0, f64::max)
    }
}

/// Builds a chain of depth `k` using `square(i, W_{i−1})` for step `i`.
pub fn ps_chain<F>(w: &DenseMatrix, k: usize, mut square: F) -> Result<PsChain>
where
    F: FnMut(usize, &DenseMatrix) -> Result<DenseMatrix>,
{
    if k == 0 {
        return Err(Error::InvalidParam("chain depth k must be at least 1".into()));
    }
    if !is_normal(w, NORMAL_TOL) {
        return Err(Error::NotNormal);
    }
    let norm = dense::spectral_norm(w);
    if norm > 1.0 + 1e-9 {
        return Err(Error::InvalidParam(format!("‖W‖ = {norm} exceeds 1")));
    }
    let budget = 1.0 / (4.0 * k as f64);
    let mut ws = vec![w.clone()];
    let mut eps = Vec::with_capacity(k - 1);
    for i in 1..k {
        let prev = &ws[i - 1];
        let next = square(i, prev)?;
        if next.shape() != w.shape() {
            return Err(Error::DimensionMismatch(format!("square at step {i} has shape {:?}", next.shape())));
        }
        let e = dense::measure_sv_eps_normalized(&next, &(prev * prev))?.epsilon;
        if e > budget {
            return Err(Error::BudgetExceeded { step: i, eps: e, budget });
        }
        eps.push(e);
        ws.push(next);
    }
    Ok(PsChain { w: ws, eps, k })
}

#[derive(Clone, Debug)]
pub struct Preconditioner {
    pub p: DenseMatrix,
    /// `precond_error(P₀, W₀)`.
    pub error: f64,
    /// `P₀ … P_k`.
    pub levels: Vec<DenseMatrix>,
}

/// Unrolls the recursion from `P_k` down to `P₀`.
pub fn ps_precondition(chain: &PsChain, p_k: &DenseMatrix) -> Result<Preconditioner> {
    let w0 = &chain.w[0];
    if p_k.shape() != w0.shape() {
        return Err(Error::DimensionMismatch(format!("P_k is {:?}, W is {:?}", p_k.shape(), w0.shape())));
    }
    let n = w0.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut levels = vec![p_k.clone()];
    for wi in chain.w.iter().rev() {
        let a = &id + wi;
        let next = (&id + &a * levels.last().expect("nonempty") * &a) * 0.5;
        levels.push(next);
    }
    levels.reverse();
    let p = levels[0].clone();
    let error = precond_error(&p, w0)?;
    Ok(Preconditioner { p, error, levels })
}

/// `I − 11ᵀ/n`.
pub fn default_pk(n: usize) -> DenseMatrix {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

/// `W^(2^i)` for `i = 0..=k`.
pub fn exact_powers(w: &DenseMatrix, k: usize) -> Vec<DenseMatrix> {
    let mut out = vec![w.clone()];
    for i in 1..=k {
        let p = &out[i - 1];
        out.push(p * p);
    }
    out
}

/// Level errors `‖(I−W^{2^i})^{1/2} [P_i − (I−W^{2^i})⁺] (I−W^{2^i})^{1/2}‖`.
pub fn level_errors(w: &DenseMatrix, levels: &[DenseMatrix]) -> Result<Vec<f64>> {
    let k = levels.len().saturating_sub(1);
    exact_powers(w, k).iter().zip(levels).map(|(wp, p)| precond_error(p, wp)).collect()
}

/// Smallest `C` with `e_i ≤ (1 + C·i·eps)·e_{i+1} + C·i·eps` on every level,
/// or `None` when the `i = 0` level (which has no slack) fails by more than
/// `1e-9`.
pub fn recurrence_constant(errors: &[f64], eps: f64) -> Option<f64> {
    let mut c: f64 = 0.0;
    for i in 0..errors.len().saturating_sub(1) {
        let excess = errors[i] - errors[i + 1];
        if excess <= 1e-9 {
            continue;
        }
        let scale = i as f64 * eps * (errors[i + 1] + 1.0);
        if scale <= 0.0 {
            return None;
        }
        c = c.max(excess / scale);
    }
    Some(c)
}

/// Normalized-SV epsilon of `W_i` against `W^(2^i)` for each level.
pub fn cumulative_eps(chain: &PsChain) -> Result<Vec<f64>> {
    let pw = exact_powers(&chain.w[0], chain.k);
    chain.w.iter().zip(&pw).map(|(wi, p)| Ok(dense::measure_sv_eps_normalized(wi, p)?.epsilon)).collect()
}

/// Graph realizations of the squaring step.
#[derive(Clone, Debug, PartialEq)]
pub enum SquareMode {
    /// Dense `W²`.
    Exact,
    /// Derandomized square with `H` = complete graph with loops minus a
    /// perfect matching on the current degree (needs even degrees).
    Drsq,
    /// Graph product on the coarsest `2^(-t)` grid whose measured epsilon
    /// stays within `target`.
    Grid { target: f64 },
}

impl std::str::FromStr for SquareMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<SquareMode> {
        match s {
            "exact" => Ok(SquareMode::Exact),
            "drsq" => Ok(SquareMode::Drsq),
            "sparse" | "grid" => Ok(SquareMode::Grid { target: 0.02 }),
            other => Err(Error::InvalidParam(format!("unknown square mode `{other}`"))),
        }
    }
}

/// Complete graph with loops minus the matching `a ↔ a ^ 1` (`d` even);
/// second singular value `1/(d − 1)`.
pub fn complete_minus_matching(d: usize) -> Result<ExpanderSpec> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::InvalidParam(format!("complete-minus-matching needs even d >= 4, got {d}")));
    }
    ExpanderSpec::from_neighbors((0..d).map(|a| (0..d).filter(|&b| b != a ^ 1).collect()).collect())
}

/// Chain built on the normalized adjacency of an Eulerian graph, keeping the
/// graph realization of every level.
pub fn graph_chain(g: &EulerianView, k: usize, mode: &SquareMode) -> Result<PsChain> {
    let w = g.normalized_dense();
    let mut cur: WeightedDigraph = g.graph().clone();
    match mode {
        SquareMode::Exact => ps_chain(&w, k, |_, m| Ok(m * m)),
        SquareMode::Drsq => ps_chain(&w, k, |_, _| {
            let rot = powers::rotation_map(&cur)?;
            let h = complete_minus_matching(rot.d)?;
            cur = powers::derandomized_square(&cur, &h)?.merged()?;
            Ok(EulerianView::try_new(cur.clone())?.normalized_dense())
        }),
        SquareMode::Grid { target } => ps_chain(&w, k, |_, prev| {
            let want = prev * prev;
            for t in 0..=powers::MAX_GRID_EXP {
                let p = powers::product_on_grid(&cur, &cur, t)?;
                let view = EulerianView::try_new(p.graph)?;
                let m = view.normalized_dense();
                if dense::measure_sv_eps_normalized(&m, &want).map(|r| r.epsilon <= *target).unwrap_or(false) {
                    cur = view.into_graph();
                    return Ok(m);
                }
            }
            Err(Error::InvalidParam(format!("no grid reaches epsilon {target}")))
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub k: usize,
    pub eps_list: Vec<f64>,
    pub pk_error: f64,
    pub final_error: f64,
    pub bound: f64,
}

/// Builds the chain, unrolls the recursion from `I − 11ᵀ/n` and reports the
/// error against the bound `50·k²·eps` (`eps` = largest step epsilon).
pub fn solve_report(g: &EulerianView, k: usize, mode: &SquareMode) -> Result<SolveReport> {
    let chain = graph_chain(g, k, mode)?;
    let n = g.n();
    let pk = default_pk(n);
    let w = &chain.w[0];
    let wk = exact_powers(w, k).pop().expect("k + 1 powers");
    let pk_error = precond_error(&pk, &wk)?;
    let pre = ps_precondition(&chain, &pk)?;
    let eps = chain.max_eps();
    Ok(SolveReport { k, eps_list: chain.eps.clone(), pk_error, final_error: pre.error, bound: 50.0 * (k * k) as f64 * eps })
}

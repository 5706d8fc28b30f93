//! Dense measurement oracle for matrix, standard, unit-circle (UC) and SV
//! approximation.
//!
//! All routines are pure functions on small dense matrices. Eigenvalues below
//! `KERNEL_TOL · λ_max` count as kernel; kernel containment is accepted when
//! the residual is at most `KERNEL_RESIDUAL · ‖Ã − A‖`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, EulerianView, WeightedDigraph};

pub type DenseMatrix = DMatrix<f64>;

pub const KERNEL_TOL: f64 = 1e-9;
pub const KERNEL_RESIDUAL: f64 = 1e-8;
pub const DEFAULT_UC_GRID: usize = 256;
const UC_REFINE_GAP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notion {
    Matrix,
    Standard,
    Uc,
    Sv,
    SvNormalized,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxReport {
    pub notion: Notion,
    /// `f64::INFINITY` exactly when kernel containment fails.
    pub epsilon: f64,
    pub kernel_ok: bool,
    /// Test vectors `(x, y)` attaining the reported value.
    #[serde(skip)]
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub details: Vec<String>,
    pub grid_points: Option<usize>,
    pub refinement_gap: Option<f64>,
}

impl ApproxReport {
    fn from_matrix(notion: Notion, m: MatrixApprox, scale: f64) -> ApproxReport {
        ApproxReport {
            notion,
            epsilon: m.epsilon * scale,
            kernel_ok: m.kernel_ok,
            witness: m.witness,
            details: m.details,
            grid_points: None,
            refinement_gap: None,
        }
    }
}

/// Result of [`measure_matrix_approx`].
#[derive(Clone, Debug)]
pub struct MatrixApprox {
    pub epsilon: f64,
    pub kernel_ok: bool,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub details: Vec<String>,
}

pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Singular values in decreasing order.
pub fn singular_values_desc(m: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn check_square(m: &DenseMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Spectral data of a symmetric PSD matrix: `M^{+/2}`, `M^+` and a kernel basis.
pub struct PsdFactor {
    pub pinv_sqrt: DenseMatrix,
    pub pinv: DenseMatrix,
    pub sqrt: DenseMatrix,
    /// Orthonormal kernel basis, one vector per column.
    pub kernel: DenseMatrix,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

pub fn psd_factor(m: &DenseMatrix, cutoff: f64) -> Result<PsdFactor> {
    let n = check_square(m, "matrix")?;
    let norm = m.amax();
    let asym = (m - m.transpose()).amax();
    if asym > 1e-10 * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotDefined(format!("matrix not symmetric ({asym:e})")));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lambda_max = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let lambda_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    if n > 0 && lambda_min < -1e-9 * scale {
        return Err(Error::NotPsd(lambda_min));
    }
    let thresh = cutoff * lambda_max;
    let mut pinv_sqrt = DMatrix::zeros(n, n);
    let mut pinv = DMatrix::zeros(n, n);
    let mut sqrt = DMatrix::zeros(n, n);
    let mut kernel_cols = Vec::new();
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        if lam > thresh && lam > 0.0 {
            let vvt = v * v.transpose();
            pinv_sqrt += &vvt * (1.0 / lam.sqrt());
            pinv += &vvt * (1.0 / lam);
            sqrt += &vvt * lam.sqrt();
        } else {
            kernel_cols.push(v.into_owned());
        }
    }
    let kernel = if kernel_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&kernel_cols)
    };
    Ok(PsdFactor {
        pinv_sqrt,
        pinv,
        sqrt,
        kernel,
        lambda_max,
        lambda_min: if n == 0 { 0.0 } else { lambda_min },
    })
}

/// `M^{+/2}` for symmetric PSD `M`; eigenvalues below `cutoff · λ_max` are
/// treated as kernel.
pub fn psd_pinv_sqrt(m: &DenseMatrix, cutoff: f64) -> Result<DenseMatrix> {
    Ok(psd_factor(m, cutoff)?.pinv_sqrt)
}

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix.
pub fn psd_pinv(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(psd_factor(m, KERNEL_TOL)?.pinv)
}

/// `‖E^{+/2}(Ã − A)F^{+/2}‖`, or `+∞` when `lker(Ã − A) ⊉ ker E` or
/// `rker(Ã − A) ⊉ ker F`.
pub fn measure_matrix_approx(
    a_tilde: &DenseMatrix,
    a: &DenseMatrix,
    e: &DenseMatrix,
    f: &DenseMatrix,
) -> Result<MatrixApprox> {
    if a_tilde.shape() != a.shape() {
        return Err(Error::DimensionMismatch("Ã and A differ in shape".into()));
    }
    let (r, c) = a.shape();
    if e.shape() != (r, r) || f.shape() != (c, c) {
        return Err(Error::DimensionMismatch(format!(
            "E is {:?}, F is {:?} for A of shape {r}x{c}",
            e.shape(),
            f.shape()
        )));
    }
    let delta = a_tilde - a;
    let dn = spectral_norm(&delta);
    if dn == 0.0 {
        return Ok(MatrixApprox {
            epsilon: 0.0,
            kernel_ok: true,
            witness: None,
            details: vec!["Ã = A".into()],
        });
    }
    let ef = psd_factor(e, KERNEL_TOL)?;
    let ff = psd_factor(f, KERNEL_TOL)?;
    let mut details = Vec::new();
    // left kernel containment: u ∈ ker E ⇒ uᵀΔ = 0
    if ef.kernel.ncols() > 0 {
        let res = ef.kernel.transpose() * &delta;
        let (worst, val) = column_or_row_max(&res, true);
        if val > KERNEL_RESIDUAL * dn {
            let u: Vec<f64> = ef.kernel.column(worst).iter().copied().collect();
            details.push(format!("left kernel residual {val:e} exceeds tolerance"));
            let img: Vec<f64> = res.row(worst).iter().copied().collect();
            return Ok(MatrixApprox {
                epsilon: f64::INFINITY,
                kernel_ok: false,
                witness: Some((u, img)),
                details,
            });
        }
    }
    if ff.kernel.ncols() > 0 {
        let res = &delta * &ff.kernel;
        let (worst, val) = column_or_row_max(&res, false);
        if val > KERNEL_RESIDUAL * dn {
            let v: Vec<f64> = ff.kernel.column(worst).iter().copied().collect();
            details.push(format!("right kernel residual {val:e} exceeds tolerance"));
            let img: Vec<f64> = res.column(worst).iter().copied().collect();
            return Ok(MatrixApprox {
                epsilon: f64::INFINITY,
                kernel_ok: false,
                witness: Some((img, v)),
                details,
            });
        }
    }
    let m = &ef.pinv_sqrt * &delta * &ff.pinv_sqrt;
    let svd = m.clone().svd(true, true);
    let (idx, eps) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    let witness = match (&svd.u, &svd.v_t) {
        (Some(u), Some(vt)) if !m.is_empty() => {
            let x = &ef.pinv_sqrt * u.column(idx);
            let y = &ff.pinv_sqrt * vt.row(idx).transpose();
            Some((x.iter().copied().collect(), y.iter().copied().collect()))
        }
        _ => None,
    };
    details.push(format!(
        "kernel dims: E {}, F {}",
        ef.kernel.ncols(),
        ff.kernel.ncols()
    ));
    Ok(MatrixApprox {
        epsilon: eps,
        kernel_ok: true,
        witness,
        details,
    })
}

/// Index and norm of the largest row (`rows = true`) or column.
fn column_or_row_max(m: &DenseMatrix, rows: bool) -> (usize, f64) {
    let count = if rows { m.nrows() } else { m.ncols() };
    (0..count)
        .map(|i| {
            let n = if rows { m.row(i).norm() } else { m.column(i).norm() };
            (i, n)
        })
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
}

/// Per-condition report for whether SV approximation is defined.
#[derive(Clone, Debug, Serialize)]
pub struct SvDefinedReport {
    /// `ker D_in ⊆ lker A` and `ker D_out ⊆ rker A`.
    pub kernel_precondition: bool,
    pub sigma_max: f64,
    /// σ_max(D_in^{+/2} A D_out^{+/2}) ≤ 1.
    pub norm_bound: bool,
    pub left_psd: bool,
    pub right_psd: bool,
    /// Block matrix PSD at z = 1.
    pub block_psd_some_z: bool,
    /// Block matrix PSD on a grid of |z| ≤ 1.
    pub block_psd_all_z: bool,
    /// Nonnegative with D equal to the row/column sums (diagonal D only).
    pub graph_condition: Option<bool>,
    /// Diagonal dominance (diagonal D only).
    pub diag_dominance: Option<bool>,
}

impl SvDefinedReport {
    pub fn all_hold(&self) -> bool {
        self.kernel_precondition
            && self.norm_bound
            && self.left_psd
            && self.right_psd
            && self.block_psd_some_z
            && self.block_psd_all_z
    }
}

fn is_psd(m: &DenseMatrix, scale: f64) -> bool {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    eig.eigenvalues.iter().all(|&x| x >= -1e-9 * scale)
}

fn is_diagonal(m: &DenseMatrix) -> bool {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && m[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    true
}

/// Real embedding of the Hermitian block matrix `[[D_in, zA], [z̄Aᵀ, D_out]]`.
fn block_embed(a: &DenseMatrix, d_in: &DenseMatrix, d_out: &DenseMatrix, re: f64, im: f64) -> DenseMatrix {
    let (m, n) = a.shape();
    let mut h_re = DMatrix::zeros(m + n, m + n);
    let mut h_im = DMatrix::zeros(m + n, m + n);
    h_re.view_mut((0, 0), (m, m)).copy_from(d_in);
    h_re.view_mut((m, m), (n, n)).copy_from(d_out);
    h_re.view_mut((0, m), (m, n)).copy_from(&(a * re));
    h_re.view_mut((m, 0), (n, m)).copy_from(&(a.transpose() * re));
    h_im.view_mut((0, m), (m, n)).copy_from(&(a * im));
    h_im.view_mut((m, 0), (n, m)).copy_from(&(a.transpose() * (-im)));
    complex_embed(&h_re, &h_im)
}

/// `R + iI ↦ [[R, −I], [I, R]]`.
pub fn complex_embed(re: &DenseMatrix, im: &DenseMatrix) -> DenseMatrix {
    let (r, c) = re.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(re);
    out.view_mut((r, c), (r, c)).copy_from(re);
    out.view_mut((0, c), (r, c)).copy_from(&(-im));
    out.view_mut((r, 0), (r, c)).copy_from(im);
    out
}

pub fn check_sv_defined(a: &DenseMatrix, d_in: &DenseMatrix, d_out: &DenseMatrix) -> Result<SvDefinedReport> {
    let (m, n) = a.shape();
    if d_in.shape() != (m, m) || d_out.shape() != (n, n) {
        return Err(Error::DimensionMismatch("degree matrices do not match A".into()));
    }
    let pre = sv_preconditions(a, d_in, d_out)?;
    let (fin, fout, scale) = (&pre.fin, &pre.fout, pre.scale);
    let nrm = &fin.pinv_sqrt * a * &fout.pinv_sqrt;
    let sigma_max = spectral_norm(&nrm);
    let block1 = block_embed(a, d_in, d_out, 1.0, 0.0);
    let block_all = (0..8).all(|k| {
        let th = std::f64::consts::TAU * k as f64 / 8.0;
        is_psd(&block_embed(a, d_in, d_out, th.cos(), th.sin()), scale)
    }) && is_psd(&block_embed(a, d_in, d_out, 0.0, 0.0), scale);
    let (graph_condition, diag_dominance) = if is_diagonal(d_in) && is_diagonal(d_out) {
        let nonneg = a.iter().all(|&x| x >= 0.0);
        let tol = 1e-12 * scale;
        let rows_ok = (0..m).all(|i| (a.row(i).sum() - d_in[(i, i)]).abs() <= tol);
        let cols_ok = (0..n).all(|j| (a.column(j).sum() - d_out[(j, j)]).abs() <= tol);
        let dom_rows = (0..m).all(|i| d_in[(i, i)] + tol >= a.row(i).abs().sum());
        let dom_cols = (0..n).all(|j| d_out[(j, j)] + tol >= a.column(j).abs().sum());
        (Some(nonneg && rows_ok && cols_ok), Some(dom_rows && dom_cols))
    } else {
        (None, None)
    };
    Ok(SvDefinedReport {
        kernel_precondition: pre.kernel_ok,
        sigma_max,
        norm_bound: sigma_max <= 1.0 + 1e-9,
        left_psd: is_psd(&pre.e, scale),
        right_psd: is_psd(&pre.f, scale),
        block_psd_some_z: is_psd(&block1, scale),
        block_psd_all_z: block_all,
        graph_condition,
        diag_dominance,
    })
}

struct SvPreconditions {
    fin: PsdFactor,
    fout: PsdFactor,
    scale: f64,
    kernel_ok: bool,
    e: DenseMatrix,
    f: DenseMatrix,
}

fn sv_preconditions(a: &DenseMatrix, d_in: &DenseMatrix, d_out: &DenseMatrix) -> Result<SvPreconditions> {
    let fin = psd_factor(d_in, KERNEL_TOL)?;
    let fout = psd_factor(d_out, KERNEL_TOL)?;
    let an = spectral_norm(a).max(f64::MIN_POSITIVE);
    let left_res = if fin.kernel.ncols() > 0 { spectral_norm(&(fin.kernel.transpose() * a)) } else { 0.0 };
    let right_res = if fout.kernel.ncols() > 0 { spectral_norm(&(a * &fout.kernel)) } else { 0.0 };
    let kernel_ok = left_res <= KERNEL_RESIDUAL * an && right_res <= KERNEL_RESIDUAL * an;
    let scale = fin.lambda_max.max(fout.lambda_max).max(f64::MIN_POSITIVE);
    let e = d_in - a * &fout.pinv * a.transpose();
    let f = d_out - a.transpose() * &fin.pinv * a;
    Ok(SvPreconditions {
        e: (&e + e.transpose()) * 0.5,
        f: (&f + f.transpose()) * 0.5,
        fin,
        fout,
        scale,
        kernel_ok,
    })
}

/// SV error matrices `E = D_in − A D_out⁺ Aᵀ`, `F = D_out − Aᵀ D_in⁺ A`.
pub fn sv_error_matrices(a: &DenseMatrix, d_in: &DenseMatrix, d_out: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let pin = psd_pinv(d_in)?;
    let pout = psd_pinv(d_out)?;
    let e = d_in - a * pout * a.transpose();
    let f = d_out - a.transpose() * pin * a;
    Ok(((&e + e.transpose()) * 0.5, (&f + f.transpose()) * 0.5))
}

/// SV epsilon of `Ã` versus `A` with respect to `D_in`, `D_out`: twice the
/// matrix-approximation value with the SV error matrices.
pub fn measure_sv_eps(
    a_tilde: &DenseMatrix,
    a: &DenseMatrix,
    d_in: &DenseMatrix,
    d_out: &DenseMatrix,
) -> Result<ApproxReport> {
    if d_in.shape() != (a.nrows(), a.nrows()) || d_out.shape() != (a.ncols(), a.ncols()) {
        return Err(Error::DimensionMismatch("degree matrices do not match A".into()));
    }
    let pre = sv_preconditions(a, d_in, d_out)?;
    if !(pre.kernel_ok && is_psd(&pre.e, pre.scale) && is_psd(&pre.f, pre.scale)) {
        let def = check_sv_defined(a, d_in, d_out)?;
        return Err(Error::NotDefined(format!("SV approximation undefined: {def:?}")));
    }
    let m = measure_matrix_approx(a_tilde, a, &pre.e, &pre.f)?;
    Ok(ApproxReport::from_matrix(Notion::Sv, m, 2.0))
}

/// Normalized SV epsilon (`D_in = D_out = I`).
pub fn measure_sv_eps_normalized(n_tilde: &DenseMatrix, n: &DenseMatrix) -> Result<ApproxReport> {
    let i_l = DMatrix::identity(n.nrows(), n.nrows());
    let i_r = DMatrix::identity(n.ncols(), n.ncols());
    let mut r = measure_sv_eps(n_tilde, n, &i_l, &i_r)?;
    r.notion = Notion::SvNormalized;
    Ok(r)
}

pub fn diag(v: &[f64]) -> DenseMatrix {
    DMatrix::from_diagonal(&DVector::from_row_slice(v))
}

/// SV epsilon of two graphs with the degree matrices of `a`.
pub fn measure_sv_eps_graphs(a_tilde: &WeightedDigraph, a: &WeightedDigraph) -> Result<ApproxReport> {
    if a_tilde.n() != a.n() {
        return Err(Error::DimensionMismatch("graphs differ in vertex count".into()));
    }
    let (d_in, d_out) = graph::degrees(a)?;
    measure_sv_eps(
        &a_tilde.to_dense(),
        &a.to_dense(),
        &diag(&graph::to_f64_vec(&d_in)),
        &diag(&graph::to_f64_vec(&d_out)),
    )
}

fn standard_error_matrix(a: &DenseMatrix, d: &DenseMatrix) -> Result<DenseMatrix> {
    check_square(a, "A")?;
    if d.shape() != a.shape() {
        return Err(Error::DimensionMismatch("D does not match A".into()));
    }
    Ok(d - (a + a.transpose()) * 0.5)
}

/// Standard epsilon: matrix approximation with `E = F = D − (A + Aᵀ)/2`.
pub fn measure_std_eps(a_tilde: &DenseMatrix, a: &DenseMatrix, d: &DenseMatrix) -> Result<ApproxReport> {
    let e = standard_error_matrix(a, d)?;
    let f = psd_factor(&e, KERNEL_TOL);
    if let Err(Error::NotPsd(x)) = f {
        return Err(Error::NotDefined(format!("D − S_A not PSD (eigenvalue {x:e})")));
    }
    let m = measure_matrix_approx(a_tilde, a, &e, &e)?;
    Ok(ApproxReport::from_matrix(Notion::Standard, m, 1.0))
}

/// Standard epsilon of `zÃ` versus `zA` for `z = e^{iθ}`, via the real embedding.
pub fn std_eps_at_angle(a_tilde: &DenseMatrix, a: &DenseMatrix, d: &DenseMatrix, theta: f64) -> Result<MatrixApprox> {
    let (c, s) = (theta.cos(), theta.sin());
    let sym = (a + a.transpose()) * 0.5;
    let skew = (a - a.transpose()) * 0.5;
    let e_re = d - &sym * c;
    let e_im = -(&skew * s);
    let e = complex_embed(&e_re, &e_im);
    if let Err(Error::NotPsd(x)) = psd_factor(&e, KERNEL_TOL) {
        return Err(Error::NotDefined(format!("D − S_(zA) not PSD at θ = {theta} ({x:e})")));
    }
    let za = complex_embed(&(a * c), &(a * s));
    let zat = complex_embed(&(a_tilde * c), &(a_tilde * s));
    measure_matrix_approx(&zat, &za, &e, &e)
}

/// UC epsilon: maximum standard epsilon over a uniform grid of `grid` angles,
/// refined by golden-section search around the best grid points. A lower
/// bound on the supremum over the unit circle.
pub fn measure_uc_eps(a_tilde: &DenseMatrix, a: &DenseMatrix, d: &DenseMatrix, grid: usize) -> Result<ApproxReport> {
    let grid = grid.max(4);
    let h = std::f64::consts::TAU / grid as f64;
    let mut vals = Vec::with_capacity(grid);
    for k in 0..grid {
        let th = h * k as f64;
        let m = std_eps_at_angle(a_tilde, a, d, th)?;
        if !m.kernel_ok {
            let mut r = ApproxReport::from_matrix(Notion::Uc, m, 1.0);
            r.details.push(format!("kernel containment fails at θ = {th}"));
            r.grid_points = Some(grid);
            return Ok(r);
        }
        vals.push(m.epsilon);
    }
    let mut best = vals.iter().copied().fold(0.0f64, f64::max);
    let mut best_theta = 0.0;
    // local maxima of the grid, best first
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| vals[k] >= vals[(k + grid - 1) % grid] && vals[k] >= vals[(k + 1) % grid])
        .collect();
    peaks.sort_by(|&x, &y| vals[y].partial_cmp(&vals[x]).unwrap());
    peaks.truncate(4);
    let mut gap: f64 = 0.0;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for &k in &peaks {
        let (mut lo, mut hi) = (h * k as f64 - h, h * k as f64 + h);
        let eval = |t: f64| -> Result<f64> { Ok(std_eps_at_angle(a_tilde, a, d, t)?.epsilon) };
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        while hi - lo > UC_REFINE_GAP {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = eval(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = eval(x2)?;
            }
        }
        for (t, f) in [(x1, f1), (x2, f2)] {
            if f.is_finite() && f > best {
                best = f;
                best_theta = t;
            }
        }
        gap = gap.max(hi - lo);
    }
    if best_theta == 0.0 {
        let k = (0..grid).max_by(|&x, &y| vals[x].partial_cmp(&vals[y]).unwrap()).unwrap_or(0);
        best_theta = h * k as f64;
    }
    Ok(ApproxReport {
        notion: Notion::Uc,
        epsilon: best,
        kernel_ok: true,
        witness: None,
        details: vec![format!("maximizing angle {best_theta}")],
        grid_points: Some(grid),
        refinement_gap: Some(gap),
    })
}

/// Second largest singular value of `D^{-1/2} A D^{-1/2}`.
pub fn second_normalized_singular(g: &EulerianView) -> Result<f64> {
    if let Some(v) = g.degrees().iter().position(|d| d.is_zero()) {
        return Err(Error::IsolatedVertex(v));
    }
    let s = singular_values_desc(&g.normalized_dense());
    Ok(s.get(1).copied().unwrap_or(0.0))
}

/// Symmetric lift `[[0, A], [Aᵀ, 0]]`.
pub fn symmetric_lift(a: &DenseMatrix) -> DenseMatrix {
    let (m, n) = a.shape();
    let mut l = DMatrix::zeros(m + n, m + n);
    l.view_mut((0, m), (m, n)).copy_from(a);
    l.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
    l
}

pub fn block_diag(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

//! Critical velocities: roots of `det(d²h(0) − S_ξ) = 0`, their kernels and
//! the definiteness of `d²h(0)` restricted to them.
//!
//! In every symmetric example the determinant is a perfect square (the
//! eigenvalues of `d²h(0) − S_ξ` come in pairs), so it never changes sign.
//! Roots are therefore bracketed with the inertia of the matrix, i.e. the
//! number of negative eigenvalues, and polished by bisection on the sorted
//! eigenvalue that crosses zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::system::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    Degenerate,
}

impl Definiteness {
    pub fn is_definite(self) -> bool {
        matches!(self, Definiteness::Positive | Definiteness::Negative)
    }

    /// `+1` for positive, `-1` for negative.
    pub fn sign(self) -> f64 {
        if self == Definiteness::Negative {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Isolated,
    CurveSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityRoot {
    pub xi: Vec<f64>,
    pub det_residual: f64,
    /// Orthonormal columns spanning the kernel.
    pub kernel_basis: Mat,
    pub kernel_dim: usize,
    /// `Bᵀ d²h(0) B`.
    pub q: Mat,
    pub q_eigenvalues: Vec<f64>,
    pub definiteness: Definiteness,
    pub kind: RootKind,
    /// `‖(d²h(0) − S_ξ)B‖ / ‖d²h(0) − S_ξ‖`.
    pub kernel_residual: f64,
    /// `‖Bᵀ(S_ξ − d²h(0))B‖ / ‖Q‖`.
    pub identity_residual: f64,
    /// Found at a local minimum of the smallest eigenvalue without an inertia change.
    pub tangential: bool,
}

/// A traced piece of the root variety of a two-dimensional algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub samples: Vec<VelocityRoot>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSearch {
    pub roots: Vec<VelocityRoot>,
    pub chains: Vec<Chain>,
    pub warnings: Vec<String>,
}

pub fn det_at(model: &Model, xi: &[f64]) -> f64 {
    linalg::det(&model.augmented(xi))
}

/// Scale of the determinant near `xi`: `max(1, ρ)ⁿ` with `ρ` the spectral radius.
fn det_scale(m: &Mat) -> f64 {
    linalg::spectral_radius_sym(m)
        .max(1.0)
        .powi(m.nrows() as i32)
}

pub fn kernel_space(model: &Model, xi: &[f64], tol: f64) -> Result<(Mat, usize)> {
    let m = model.augmented(xi);
    let (vals, vecs) = linalg::sorted_symmetric_eigen(&m);
    let rho = vals.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let cutoff = tol * rho.max(f64::MIN_POSITIVE);
    let cols: Vec<Vector> = (0..vals.len())
        .filter(|&i| vals[i].abs() < cutoff)
        .map(|i| vecs.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        let ratio =
            vals.iter().fold(f64::INFINITY, |a, x| a.min(x.abs())) / rho.max(f64::MIN_POSITIVE);
        return Err(Error::NoKernel {
            xi: xi.to_vec(),
            ratio,
        });
    }
    let basis = linalg::orthonormalize(&linalg::from_columns(m.nrows(), &cols), 1e-12);
    let l = basis.ncols();
    Ok((basis, l))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinitenessReport {
    pub q: Mat,
    pub eigenvalues: Vec<f64>,
    pub verdict: Definiteness,
    pub identity_residual: f64,
}

/// Definiteness of `d²h(0)` on the span of `basis`, with the kernel identity
/// `Bᵀ S_ξ B = Bᵀ d²h(0) B` as a cross-check.
pub fn definiteness(model: &Model, xi: &[f64], basis: &Mat, margin: f64) -> DefinitenessReport {
    let q = linalg::symmetrize(&(basis.transpose() * &model.h0 * basis));
    let eig = linalg::sorted_symmetric_eigenvalues(&q);
    let norm = eig.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let cut = margin * norm;
    let verdict = if eig.iter().any(|x| x.abs() <= cut) || norm == 0.0 {
        Definiteness::Degenerate
    } else if eig.iter().all(|&x| x > cut) {
        Definiteness::Positive
    } else if eig.iter().all(|&x| x < -cut) {
        Definiteness::Negative
    } else {
        Definiteness::Indefinite
    };
    let sj = basis.transpose() * model.s_xi(xi) * basis;
    let identity_residual = linalg::max_abs(&(sj - &q)) / norm.max(f64::MIN_POSITIVE);
    DefinitenessReport {
        q,
        eigenvalues: eig.iter().copied().collect(),
        verdict,
        identity_residual,
    }
}

/// Build the full root record at `xi`.
pub fn make_root(model: &Model, xi: &[f64], kind: RootKind) -> Result<VelocityRoot> {
    let tol = model.tol();
    let (basis, l) = kernel_space(model, xi, tol.kernel)?;
    let m = model.augmented(xi);
    let rho = linalg::spectral_radius_sym(&m).max(f64::MIN_POSITIVE);
    let kernel_residual = linalg::max_abs(&(&m * &basis)) / rho;
    let d = definiteness(model, xi, &basis, tol.definiteness);
    Ok(VelocityRoot {
        xi: xi.to_vec(),
        det_residual: linalg::det(&m).abs(),
        kernel_basis: basis,
        kernel_dim: l,
        q: d.q,
        q_eigenvalues: d.eigenvalues,
        definiteness: d.verdict,
        kind,
        kernel_residual,
        identity_residual: d.identity_residual,
        tangential: false,
    })
}

/// Sorted eigenvalues and their relative smallest magnitude.
struct NodeInfo {
    eig: Vector,
    n_neg: usize,
    ratio: f64,
}

fn node_info(model: &Model, xi: &[f64]) -> NodeInfo {
    let eig = linalg::sorted_symmetric_eigenvalues(&model.augmented(xi));
    let rho = eig
        .iter()
        .fold(0.0_f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let ratio = eig.iter().fold(f64::INFINITY, |a, x| a.min(x.abs())) / rho;
    let n_neg = eig.iter().filter(|&&x| x < 0.0).count();
    NodeInfo { eig, n_neg, ratio }
}

/// Bisection on the `k`-th sorted eigenvalue along the segment `a → b`, where
/// it is nonnegative at the end with fewer negative eigenvalues.
fn bisect_segment(model: &Model, a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let lerp = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    let lam = |t: f64| linalg::sorted_symmetric_eigenvalues(&model.augmented(&lerp(t)))[k];
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let neg_lo = lam(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (lam(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // keep whichever end has the smaller |λ_k|
    let t = if lam(lo).abs() <= lam(hi).abs() {
        lo
    } else {
        hi
    };
    lerp(t)
}

/// Golden-section minimization of the relative smallest |eigenvalue| on `[a, b]`.
fn minimize_ratio_1d(model: &Model, a: f64, b: f64) -> (f64, f64) {
    let f = |x: f64| node_info(model, &[x]).ratio;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..120 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Roots inside the box `[lo, hi]` on a grid with `grid` intervals per axis.
pub fn find_roots(model: &Model, lo: &[f64], hi: &[f64], grid: usize) -> Result<RootSearch> {
    let dg = model.dim_g();
    if lo.len() != dg || hi.len() != dg {
        return Err(Error::DimensionMismatch(format!(
            "search box has {} axes, algebra has {dg}",
            lo.len()
        )));
    }
    if grid < 2 || lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
        return Err(Error::DomainError(
            "empty search box or grid below 2".into(),
        ));
    }
    match dg {
        1 => find_roots_1d(model, lo[0], hi[0], grid),
        2 => find_roots_2d(model, [lo[0], lo[1]], [hi[0], hi[1]], grid),
        _ => Err(Error::Unsupported(format!(
            "root search needs dim g in {{1, 2}}, got {dg}"
        ))),
    }
}

fn find_roots_1d(model: &Model, lo: f64, hi: f64, grid: usize) -> Result<RootSearch> {
    let tol = model.tol();
    let h = (hi - lo) / grid as f64;
    let xs: Vec<f64> = (0..=grid).map(|j| lo + j as f64 * h).collect();
    let info: Vec<NodeInfo> = xs.iter().map(|&x| node_info(model, &[x])).collect();
    let is_root = |j: usize| info[j].ratio < tol.kernel;
    let mut found: Vec<(f64, bool)> = Vec::new();
    let mut out = RootSearch::default();
    for j in 0..grid {
        if is_root(j) || is_root(j + 1) || info[j].n_neg == info[j + 1].n_neg {
            continue;
        }
        let k = info[j].n_neg.min(info[j + 1].n_neg);
        found.push((bisect_segment(model, &[xs[j]], &[xs[j + 1]], k)[0], false));
    }
    for j in 0..=grid {
        if !is_root(j) {
            continue;
        }
        let (a, b) = (j.saturating_sub(1), (j + 1).min(grid));
        if info[a].n_neg != info[b].n_neg && !is_root(a) && !is_root(b) {
            let k = info[a].n_neg.min(info[b].n_neg);
            found.push((bisect_segment(model, &[xs[a]], &[xs[b]], k)[0], false));
        } else {
            found.push((xs[j], false));
        }
    }
    // tangential dips: local minima of the smallest eigenvalue with no inertia change nearby
    for j in 1..grid {
        let r = info[j].ratio;
        let quiet = info[j - 1].n_neg == info[j].n_neg && info[j].n_neg == info[j + 1].n_neg;
        if !quiet || is_root(j) || r >= tol.dip || r > info[j - 1].ratio || r > info[j + 1].ratio {
            continue;
        }
        let (x, ratio) = minimize_ratio_1d(model, xs[j - 1], xs[j + 1]);
        let det = det_at(model, &[x]);
        if model.options().strict_grid {
            return Err(Error::GridTooCoarse { xi: vec![x], det });
        }
        if ratio < tol.kernel {
            out.warnings.push(format!(
                "tangential root at xi = {x} (no inertia change), reported unpolished"
            ));
            found.push((x, true));
        } else {
            out.warnings.push(format!(
                "smallest eigenvalue dips to {ratio:e} (relative) near xi = {x} without a sign change; refine the grid"
            ));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for (x, t) in found {
        match merged.last_mut() {
            Some(last) if (x - last.0).abs() < h => {
                if node_info(model, &[x]).ratio < node_info(model, &[last.0]).ratio {
                    *last = (x, t && last.1);
                }
            }
            _ => merged.push((x, t)),
        }
    }
    for (x, tangential) in merged {
        let mut root = make_root(model, &[x], RootKind::Isolated)?;
        root.tangential = tangential;
        let scale = det_scale(&model.augmented(&[x]));
        if !tangential && root.det_residual > tol.det_polish * scale {
            out.warnings.push(format!(
                "root at xi = {x}: |det| = {:e} above polish target",
                root.det_residual
            ));
        }
        out.roots.push(root);
    }
    Ok(out)
}

struct Crossing {
    xi: [f64; 2],
    kernel_dim: usize,
}

fn find_roots_2d(model: &Model, lo: [f64; 2], hi: [f64; 2], grid: usize) -> Result<RootSearch> {
    let tol = model.tol();
    let n = grid;
    let h = [(hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64];
    let at = |i: usize, j: usize| [lo[0] + i as f64 * h[0], lo[1] + j as f64 * h[1]];
    let node = |i: usize, j: usize| i * (n + 1) + j;
    let info: Vec<NodeInfo> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (i, j)))
        .map(|(i, j)| node_info(model, &at(i, j)))
        .collect();
    let is_root = |k: usize| info[k].ratio < tol.kernel;

    let mut crossings: Vec<Crossing> = Vec::new();
    // crossing index per edge; horizontal edges (i,j)-(i+1,j) then vertical (i,j)-(i,j+1)
    let mut h_edge = vec![None; n * (n + 1)];
    let mut v_edge = vec![None; (n + 1) * n];
    let mut node_cross = vec![None; (n + 1) * (n + 1)];
    let add = |xi: [f64; 2], crossings: &mut Vec<Crossing>| -> Option<usize> {
        let kd = kernel_space(model, &xi, tol.kernel).map(|k| k.1).ok()?;
        crossings.push(Crossing { xi, kernel_dim: kd });
        Some(crossings.len() - 1)
    };
    for i in 0..=n {
        for j in 0..=n {
            if is_root(node(i, j)) {
                node_cross[node(i, j)] = add(at(i, j), &mut crossings);
            }
        }
    }
    for i in 0..=n {
        for j in 0..=n {
            let a = node(i, j);
            if i < n {
                let b = node(i + 1, j);
                if !is_root(a) && !is_root(b) && info[a].n_neg != info[b].n_neg {
                    let k = info[a].n_neg.min(info[b].n_neg);
                    let p = bisect_segment(model, &at(i, j), &at(i + 1, j), k);
                    h_edge[i * (n + 1) + j] = add([p[0], p[1]], &mut crossings);
                }
            }
            if j < n {
                let b = node(i, j + 1);
                if !is_root(a) && !is_root(b) && info[a].n_neg != info[b].n_neg {
                    let k = info[a].n_neg.min(info[b].n_neg);
                    let p = bisect_segment(model, &at(i, j), &at(i, j + 1), k);
                    v_edge[i * n + j] = add([p[0], p[1]], &mut crossings);
                }
            }
        }
    }

    // link crossings through cells; cells with other than two crossings are junction candidates
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); crossings.len()];
    let mut candidates: Vec<(Vec<f64>, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut here: Vec<usize> = [
                h_edge[i * (n + 1) + j],
                h_edge[i * (n + 1) + j + 1],
                v_edge[i * n + j],
                v_edge[(i + 1) * n + j],
                node_cross[node(i, j)],
                node_cross[node(i + 1, j)],
                node_cross[node(i, j + 1)],
                node_cross[node(i + 1, j + 1)],
            ]
            .into_iter()
            .flatten()
            .collect();
            here.dedup();
            if here.len() == 2 {
                links[here[0]].push(here[1]);
                links[here[1]].push(here[0]);
            } else if !here.is_empty() {
                let kmax = here
                    .iter()
                    .map(|&c| crossings[c].kernel_dim)
                    .max()
                    .unwrap_or(1);
                let centre = vec![
                    lo[0] + (i as f64 + 0.5) * h[0],
                    lo[1] + (j as f64 + 0.5) * h[1],
                ];
                candidates.push((centre, kmax));
            }
        }
    }

    // walk the link graph into raw chains of crossing indices
    let mut seen = vec![false; crossings.len()];
    let mut order: Vec<usize> = (0..crossings.len())
        .filter(|&c| links[c].len() < 2)
        .collect();
    order.extend((0..crossings.len()).filter(|&c| links[c].len() >= 2));
    let mut raw: Vec<(Vec<usize>, bool)> = Vec::new();
    for start in order {
        if seen[start] {
            continue;
        }
        let mut path = vec![start];
        seen[start] = true;
        let mut cur = start;
        while let Some(x) = links[cur].iter().copied().find(|&x| !seen[x]) {
            seen[x] = true;
            path.push(x);
            cur = x;
        }
        let closed = path.len() > 2 && links[cur].contains(&start);
        raw.push((path, closed));
    }

    // Where two curves cross, their inertia changes cancel on shared edges and the
    // traced chain turns the corner instead. Such junctions show up as minima of
    // the next eigenvalue beyond the curve kernel along a chain.
    for (path, closed) in &raw {
        let score: Vec<f64> = path
            .iter()
            .map(|&c| {
                let eig = &node_info(model, &crossings[c].xi).eig;
                let mut mags: Vec<f64> = eig.iter().map(|x| x.abs()).collect();
                mags.sort_by(f64::total_cmp);
                let rho = mags.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
                mags.get(crossings[c].kernel_dim).copied().unwrap_or(rho) / rho
            })
            .collect();
        let len = path.len();
        for i in 0..len {
            let prev = if i > 0 {
                Some(i - 1)
            } else if *closed {
                Some(len - 1)
            } else {
                None
            };
            let next = if i + 1 < len {
                Some(i + 1)
            } else if *closed {
                Some(0)
            } else {
                None
            };
            let local_min = prev.is_none_or(|p| score[i] <= score[p])
                && next.is_none_or(|q| score[i] < score[q]);
            if local_min && score[i] < 0.5 {
                let c = &crossings[path[i]];
                candidates.push((c.xi.to_vec(), c.kernel_dim));
            }
        }
    }

    let mut out = RootSearch::default();
    let mut isolated: Vec<Vec<f64>> = Vec::new();
    let reach = 2.0 * h[0].hypot(h[1]);
    for (centre, kmax) in candidates {
        let d = (2 * kmax).min(model.dim());
        if let Some(p) = refine_junction(model, &centre, d) {
            let dist = (p[0] - centre[0]).hypot(p[1] - centre[1]);
            let inside = p
                .iter()
                .zip(lo.iter().zip(&hi))
                .all(|(x, (a, b))| *x >= *a && *x <= *b);
            let kd = kernel_space(model, &p, tol.kernel)
                .map(|k| k.1)
                .unwrap_or(0);
            let fresh = !isolated
                .iter()
                .any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < h[0].min(h[1]));
            if dist <= reach && inside && kd > kmax && fresh {
                isolated.push(p);
            }
        }
    }
    isolated.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));

    // split chains at junctions
    for (path, closed) in raw {
        let pts: Vec<[f64; 2]> = path.iter().map(|&c| crossings[c].xi).collect();
        let mut cuts: Vec<usize> = Vec::new(); // cut before index
        for q in &isolated {
            let dist: Vec<f64> = pts
                .iter()
                .map(|p| (p[0] - q[0]).hypot(p[1] - q[1]))
                .collect();
            let (i, &dmin) = match dist.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) {
                Some(x) => x,
                None => continue,
            };
            if dmin > reach {
                continue;
            }
            let len = pts.len();
            let ahead = if i + 1 < len || closed {
                Some((i + 1) % len)
            } else {
                None
            };
            let towards = |j: usize| {
                (q[0] - pts[i][0]) * (pts[j][0] - pts[i][0])
                    + (q[1] - pts[i][1]) * (pts[j][1] - pts[i][1])
                    > 0.0
            };
            let cut = match ahead {
                Some(j) if towards(j) => j,
                _ => i,
            };
            cuts.push(cut);
        }
        cuts.sort_unstable();
        cuts.dedup();
        let pieces: Vec<Vec<usize>> = if cuts.is_empty() {
            vec![path.clone()]
        } else if closed {
            let len = path.len();
            (0..cuts.len())
                .map(|k| {
                    let (a, b) = (cuts[k], cuts[(k + 1) % cuts.len()]);
                    let span = if b > a { b - a } else { b + len - a };
                    (0..span).map(|t| path[(a + t) % len]).collect()
                })
                .collect()
        } else {
            let mut bounds = vec![0];
            bounds.extend(cuts.iter().copied().filter(|&c| c > 0 && c < path.len()));
            bounds.push(path.len());
            bounds
                .windows(2)
                .map(|w| path[w[0]..w[1]].to_vec())
                .collect()
        };
        let whole = pieces.len() == 1 && closed;
        for piece in pieces.into_iter().filter(|p| !p.is_empty()) {
            let samples = piece
                .iter()
                .map(|&c| make_root(model, &crossings[c].xi, RootKind::CurveSample))
                .collect::<Result<Vec<_>>>()?;
            out.chains.push(Chain {
                samples,
                closed: whole,
            });
        }
    }
    for p in isolated {
        out.roots.push(make_root(model, &p, RootKind::Isolated)?);
    }
    Ok(out)
}

/// Alternating least squares for a point where `d` eigenvalues vanish at once:
/// fix the `d` eigenvectors of smallest |eigenvalue|, then solve the linear
/// least-squares problem `min_ξ ‖(d²h(0) − Σ ξ_i S_i)U‖`.
pub fn refine_junction(model: &Model, start: &[f64], d: usize) -> Option<Vec<f64>> {
    let dg = model.dim_g();
    let n = model.dim();
    let mut xi = start.to_vec();
    for _ in 0..500 {
        let (vals, vecs) = linalg::sorted_symmetric_eigen(&model.augmented(&xi));
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs()));
        let u = linalg::from_columns(
            n,
            &idx[..d]
                .iter()
                .map(|&i| vecs.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        let hu = &model.h0 * &u;
        let mut a = Mat::zeros(n * d, dg);
        for (i, s) in model.s_basis.iter().enumerate() {
            let su = s * &u;
            a.set_column(i, &Vector::from_iterator(n * d, su.iter().copied()));
        }
        let b = Vector::from_iterator(n * d, hu.iter().copied());
        let next = linalg::pinv_solve(&a, &b, 1e-12);
        let step = next
            .iter()
            .zip(&xi)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        xi = next.iter().copied().collect();
        if !xi.iter().all(|x| x.is_finite()) {
            return None;
        }
        if step < 1e-15 * (1.0 + xi.iter().fold(0.0_f64, |m, x| m.max(x.abs()))) {
            break;
        }
    }
    Some(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::load_builtin;

    #[test]
    fn motivating_det_values() {
        let m = load_builtin("motivating_s1").unwrap();
        assert!((det_at(&m, &[3.0]) - 1.0).abs() < 1e-12);
        assert!(det_at(&m, &[2.0]).abs() < 1e-12);
        assert!(det_at(&m, &[4.0]).abs() < 1e-12);
    }

    #[test]
    fn motivating_roots_and_kernels() {
        let m = load_builtin("motivating_s1").unwrap();
        let s = find_roots(&m, &[0.0], &[6.0], 600).unwrap();
        let xs: Vec<f64> = s.roots.iter().map(|r| r.xi[0]).collect();
        assert_eq!(xs.len(), 2, "{xs:?}");
        assert!((xs[0] - 2.0).abs() < 1e-12 && (xs[1] - 4.0).abs() < 1e-12);
        let r4 = &s.roots[1];
        assert_eq!(r4.kernel_dim, 2);
        assert_eq!(r4.definiteness, Definiteness::Negative);
        let expected = Mat::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(linalg::max_principal_angle_sine(&r4.kernel_basis, &expected) < 1e-12);
    }

    #[test]
    fn no_kernel_at_regular_velocity() {
        let m = load_builtin("motivating_s1").unwrap();
        assert!(matches!(
            kernel_space(&m, &[3.0], 1e-8),
            Err(Error::NoKernel { .. })
        ));
    }

    #[test]
    fn odd_grid_still_finds_roots() {
        let m = load_builtin("spherical_pendulum").unwrap();
        let s = find_roots(&m, &[-2.0], &[2.0], 37).unwrap();
        let xs: Vec<f64> = s.roots.iter().map(|r| r.xi[0]).collect();
        assert_eq!(xs.len(), 2);
        assert!((xs[0] + 1.0).abs() < 1e-12 && (xs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_dim_algebra_unsupported() {
        let m = load_builtin("motivating_s1").unwrap();
        assert!(matches!(
            find_roots(&m, &[0.0, 0.0], &[1.0, 1.0], 10),
            Err(Error::DimensionMismatch(_))
        ));
    }
}

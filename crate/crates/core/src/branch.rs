//! Branches of relative equilibria bifurcating from a critical velocity.
//!
//! A branch is parametrized by the blow-up radius `r`: the kernel component
//! `u = B₀ᵀ v` is pinned to the sphere `uᵀ|Q|u = r²`, the group direction is
//! removed by linear phase conditions `⟨A_i B₀ u₀, v⟩ = 0`, and the velocity
//! shift `α` is an unknown. The corrector solves
//!
//! ```text
//! ∇h(v) − S_{ξ+α} v = 0,   √(uᵀ|Q|u) = r,   ⟨A_i B₀ u₀, v⟩ = 0
//! ```
//!
//! by Gauss–Newton with minimum-norm steps, which copes with the rank
//! deficiency left by isotropy and by families of velocities.

use serde::{Deserialize, Serialize};

use crate::dynamics::{verify_relative_equilibrium, FlowCheck};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::system::Model;
use crate::topology::{morse_bott_check, q_abs, MorseBottVerdict};
use crate::velocity::VelocityRoot;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    /// Kernel coordinates, `|Q|`-unit.
    pub u0: Vec<f64>,
    pub beta: Vec<f64>,
    pub eigenvalue: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeedSet {
    /// Every generalized eigen-direction found.
    pub directions: Vec<Seed>,
    /// Indices into `directions`, one per distinct group orbit.
    pub representatives: Vec<usize>,
    pub flags: Vec<String>,
}

impl SeedSet {
    pub fn seeds(&self) -> impl Iterator<Item = &Seed> {
        self.representatives.iter().map(|&i| &self.directions[i])
    }
}

/// Critical directions of `u ↦ uᵀ Bᵀ S_β B u` on the `|Q|`-unit sphere.
pub fn seed_directions(model: &Model, root: &VelocityRoot, betas: &[Vec<f64>]) -> SeedSet {
    let mut out = SeedSet::default();
    let mut candidates: Vec<usize> = Vec::new();
    if !root.definiteness.is_definite() {
        out.flags.push("Q is not definite, no seeds".into());
        return out;
    }
    for beta in betas {
        let check = morse_bott_check(model, root, beta);
        if check.vectors.ncols() == 0 {
            out.flags
                .push(format!("beta {beta:?}: generalized eigenproblem failed"));
            continue;
        }
        let transitive = check.verdict == MorseBottVerdict::TransitiveAutoPass;
        if check.cluster_ranges.len() == 1 && !transitive {
            out.flags.push(format!(
                "beta {beta:?}: restricted form is a multiple of Q, no splitting"
            ));
            continue;
        }
        for (c, &(a, e)) in check.cluster_ranges.iter().enumerate() {
            for j in a..e {
                out.directions.push(Seed {
                    u0: check.vectors.column(j).iter().copied().collect(),
                    beta: beta.clone(),
                    eigenvalue: check.eigenvalues[j],
                    cluster: c,
                });
                if j == a && (!transitive || c == 0) {
                    candidates.push(out.directions.len() - 1);
                }
            }
        }
    }
    if candidates.is_empty() && root.kernel_dim > 0 {
        out.flags
            .push("no splitting direction, seeding along the first kernel vector".into());
        let qa = q_abs(root);
        let mut u = Vector::zeros(root.kernel_dim);
        u[0] = 1.0;
        let u = &u / u.dot(&(&qa * &u)).sqrt();
        out.directions.push(Seed {
            u0: u.iter().copied().collect(),
            beta: vec![0.0; model.dim_g()],
            eigenvalue: 0.0,
            cluster: 0,
        });
        candidates.push(out.directions.len() - 1);
    }
    let ambient: Vec<Vector> = candidates
        .iter()
        .map(|&i| &root.kernel_basis * Vector::from_vec(out.directions[i].u0.clone()))
        .collect();
    let torus: Vec<Mat> = model
        .action
        .torus_generators()
        .into_iter()
        .cloned()
        .collect();
    let reps = dedup_orbits(&ambient, &torus, DEDUP_TOL);
    out.representatives = reps
        .representatives
        .iter()
        .map(|&k| candidates[k])
        .collect();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub r: f64,
    pub energy: f64,
    pub v: Vec<f64>,
    pub velocity: Vec<f64>,
    pub multiplier: f64,
    pub grad_residual: f64,
    pub flow: Option<FlowCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub root_xi: Vec<f64>,
    pub seed: Seed,
    pub samples: Vec<BranchSample>,
    /// Set when the corrector failed before `r_max`.
    pub truncated: Option<Error>,
}

struct Corrector<'a> {
    model: &'a Model,
    xi: Vec<f64>,
    b0: Mat,
    qa: Mat,
    phase: Vec<Vector>,
}

impl Corrector<'_> {
    fn n(&self) -> usize {
        self.model.dim()
    }

    fn split(&self, x: &Vector) -> (Vector, Vec<f64>) {
        let n = self.n();
        (
            x.rows(0, n).into_owned(),
            x.rows(n, x.len() - n).iter().copied().collect(),
        )
    }

    fn velocity(&self, alpha: &[f64]) -> Vec<f64> {
        self.xi.iter().zip(alpha).map(|(a, b)| a + b).collect()
    }

    /// Residual and Jacobian of the extended system.
    fn system(&self, x: &Vector, r: f64) -> Result<(Vector, Mat)> {
        let n = self.n();
        let dg = self.model.dim_g();
        let (v, alpha) = self.split(x);
        let vel = self.velocity(&alpha);
        let s = self.model.s_xi(&vel);
        let (_, grad, hess) = self.model.hamiltonian.eval_h2(&v)?;
        let rows = n + 1 + self.phase.len();
        let mut f = Vector::zeros(rows);
        let mut jac = Mat::zeros(rows, n + dg);
        f.rows_mut(0, n).copy_from(&(grad - &s * &v));
        jac.view_mut((0, 0), (n, n)).copy_from(&(hess - &s));
        for i in 0..dg {
            jac.view_mut((0, n + i), (n, 1))
                .copy_from(&(-(&self.model.s_basis[i] * &v)));
        }
        let u = self.b0.transpose() * &v;
        let c = u.dot(&(&self.qa * &u)).max(f64::MIN_POSITIVE).sqrt();
        f[n] = c - r;
        let row = (&self.b0 * (&self.qa * &u)) / c;
        jac.view_mut((n, 0), (1, n)).copy_from(&row.transpose());
        for (k, p) in self.phase.iter().enumerate() {
            f[n + 1 + k] = p.dot(&v);
            jac.view_mut((n + 1 + k, 0), (1, n))
                .copy_from(&p.transpose());
        }
        Ok((f, jac))
    }

    fn grad_residual(&self, x: &Vector) -> Result<f64> {
        let (v, alpha) = self.split(x);
        Ok(self
            .model
            .augmented_gradient(&v, &self.velocity(&alpha))?
            .norm())
    }

    fn correct(&self, guess: Vector, r: f64, tol: f64) -> Result<Vector> {
        let mut x = guess;
        let mut last = f64::INFINITY;
        for _ in 0..30 {
            let (f, jac) = self.system(&x, r)?;
            let res = f.amax();
            if res == 0.0 || (res < 1e-3 * tol && res >= 0.5 * last) {
                break;
            }
            last = res;
            let step = linalg::pinv_solve(&jac, &(-f), 1e-10);
            x += &step;
            if !x.iter().all(|c| c.is_finite()) {
                return Err(Error::CorrectorDiverged { r });
            }
            if step.amax() <= 4.0 * f64::EPSILON * x.amax().max(1.0) {
                break;
            }
        }
        let (f, _) = self.system(&x, r)?;
        if self.grad_residual(&x)? < tol && f.amax() < tol {
            Ok(x)
        } else {
            Err(Error::CorrectorDiverged { r })
        }
    }
}

/// `Λ = vᵀ S_ξ v / (∇h(v)·v)`; the branch velocity is `ξ/Λ` along `ξ`.
pub fn multiplier(model: &Model, xi: &[f64], v: &Vector) -> Result<f64> {
    let num = v.dot(&(model.s_xi(xi) * v));
    let den = model.hamiltonian.gradient(v)?.dot(v);
    Ok(if den == 0.0 { 1.0 } else { num / den })
}

/// Predictor–corrector continuation in `r` from the origin along `u0`.
pub fn continue_branch(
    model: &Model,
    root: &VelocityRoot,
    seed: &Seed,
    r_max: f64,
    step: f64,
) -> Result<Branch> {
    if !root.definiteness.is_definite() {
        return Err(Error::ValidationError {
            check: "definiteness".into(),
            detail: format!("Q at xi = {:?} is {:?}", root.xi, root.definiteness),
        });
    }
    let opts = model.options();
    let tol = model.tol();
    let qa = q_abs(root);
    let u0 = Vector::from_vec(seed.u0.clone());
    let norm = u0.dot(&(&qa * &u0));
    if seed.u0.len() != root.kernel_dim || (norm - 1.0).abs() > 1e-8 {
        return Err(Error::DomainError(format!(
            "seed is not on the unit sphere of |Q| (uᵀ|Q|u = {norm})"
        )));
    }
    let dir = &root.kernel_basis * &u0;
    let phase: Vec<Vector> = model
        .action
        .generators
        .iter()
        .map(|a| a * &dir)
        .filter(|p| p.norm() > 1e-12 * dir.norm())
        .map(|p| p.normalize())
        .collect();
    let corr = Corrector {
        model,
        xi: root.xi.clone(),
        b0: root.kernel_basis.clone(),
        qa,
        phase,
    };
    let n = model.dim();
    let dg = model.dim_g();
    let mut branch = Branch {
        root_xi: root.xi.clone(),
        seed: seed.clone(),
        samples: Vec::new(),
        truncated: None,
    };
    let mut history: Vec<(f64, Vector)> = Vec::new();
    let mut h = step;
    let mut r = 0.0;
    while r + h <= r_max * (1.0 + 1e-12) {
        let r_new = r + h;
        let guess = match history.as_slice() {
            [] => {
                let mut x = Vector::zeros(n + dg);
                x.rows_mut(0, n).copy_from(&(&dir * r_new));
                x
            }
            [(r1, x1)] => {
                let mut x = x1.clone();
                let scale = r_new / r1;
                x.rows_mut(0, n).scale_mut(scale);
                x
            }
            [.., (r0, x0), (r1, x1)] => x1 + (x1 - x0) * ((r_new - r1) / (r1 - r0)),
        };
        match corr.correct(guess, r_new, tol.branch) {
            Ok(x) => {
                let (v, alpha) = corr.split(&x);
                let velocity = corr.velocity(&alpha);
                branch.samples.push(BranchSample {
                    r: r_new,
                    energy: model.hamiltonian.value(&v)?,
                    v: v.iter().copied().collect(),
                    velocity,
                    multiplier: multiplier(model, &root.xi, &v)?,
                    grad_residual: corr.grad_residual(&x)?,
                    flow: None,
                });
                history.push((r_new, x));
                r = r_new;
                h = step;
            }
            Err(_) => {
                h *= 0.5;
                if h < opts.min_step {
                    branch.truncated = Some(Error::CorrectorDiverged { r: r_new });
                    break;
                }
            }
        }
    }
    Ok(branch)
}

/// Flow-verify every sample of a branch; returns whether all passed.
pub fn verify_branch(model: &Model, branch: &mut Branch) -> Result<bool> {
    let opts = model.options();
    let mut ok = true;
    for s in &mut branch.samples {
        let check = verify_relative_equilibrium(
            model,
            &Vector::from_vec(s.v.clone()),
            &s.velocity,
            opts.flow_time,
            opts.flow_dt,
            opts.tolerances.flow,
        )?;
        ok &= check.pass;
        s.flow = Some(check);
    }
    Ok(ok)
}

/// Polynomial extrapolation of `Λ(r)` to `r = 0` from the three smallest samples with `r < 0.2`.
pub fn multiplier_limit(branch: &Branch) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = branch
        .samples
        .iter()
        .filter(|s| s.r < 0.2)
        .map(|s| (s.r, s.multiplier))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            have: pts.len(),
        });
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(3);
    Ok(neville(&pts, 0.0))
}

fn neville(pts: &[(f64, f64)], x: f64) -> f64 {
    let mut p: Vec<f64> = pts.iter().map(|q| q.1).collect();
    let n = pts.len();
    for k in 1..n {
        for i in 0..n - k {
            let (xi, xk) = (pts[i].0, pts[i + k].0);
            p[i] = ((x - xk) * p[i] + (xi - x) * p[i + 1]) / (xi - xk);
        }
    }
    p[0]
}

pub const DEDUP_TOL: f64 = 1e-6;
const THETA_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dedup {
    /// Index of each cluster's representative.
    pub representatives: Vec<usize>,
    /// Cluster index per input point.
    pub assignment: Vec<usize>,
}

/// `min_θ ‖exp(Σ θ_i A_i) v − w‖` over the torus; generators must have period `2π`.
pub fn orbit_distance(v: &Vector, w: &Vector, torus: &[Mat]) -> f64 {
    match torus.len() {
        0 => (v - w).norm(),
        _ => {
            let grid = if torus.len() <= 2 { THETA_GRID } else { 32 };
            let thetas: Vec<f64> = (0..grid)
                .map(|k| std::f64::consts::TAU * k as f64 / grid as f64)
                .collect();
            // coarse search over the last angle and a product of grids for the rest
            let rot: Vec<Vec<Mat>> = torus
                .iter()
                .map(|a| thetas.iter().map(|&t| linalg::expm(&(a * t))).collect())
                .collect();
            let mut best = (f64::INFINITY, vec![0.0; torus.len()]);
            let mut idx = vec![0usize; torus.len()];
            let last = torus.len() - 1;
            loop {
                // w·(R_0 … R_last v) = (R_{0..last-1}ᵀ w)·(R_last v)
                let mut lhs = w.clone();
                for (i, &k) in idx.iter().enumerate().take(last) {
                    lhs = rot[i][k].transpose() * lhs;
                }
                for (k, r) in rot[last].iter().enumerate() {
                    let d2 = v.norm_squared() + w.norm_squared() - 2.0 * lhs.dot(&(r * v));
                    if d2 < best.0 {
                        let mut th: Vec<f64> = idx.iter().map(|&j| thetas[j]).collect();
                        th[last] = thetas[k];
                        best = (d2, th);
                    }
                }
                let mut carry = 0;
                loop {
                    if carry == last {
                        break;
                    }
                    idx[carry] += 1;
                    if idx[carry] < grid {
                        break;
                    }
                    idx[carry] = 0;
                    carry += 1;
                }
                if carry == last {
                    break;
                }
            }
            refine_angles(v, w, torus, best.1)
        }
    }
}

/// Newton iterations on `f(θ) = −wᵀ exp(Σθ_i A_i) v` with minimum-norm steps.
fn refine_angles(v: &Vector, w: &Vector, torus: &[Mat], mut theta: Vec<f64>) -> f64 {
    let rotate = |th: &[f64]| -> Vector {
        let a = torus
            .iter()
            .zip(th)
            .fold(Mat::zeros(v.len(), v.len()), |acc, (g, t)| acc + g * *t);
        linalg::expm(&a) * v
    };
    let dist = |th: &[f64]| (rotate(th) - w).norm();
    let mut best = dist(&theta);
    for _ in 0..20 {
        let x = rotate(&theta);
        let k = torus.len();
        let grad = Vector::from_fn(k, |i, _| -w.dot(&(&torus[i] * &x)));
        let hess = Mat::from_fn(k, k, |i, j| -w.dot(&(&torus[i] * (&torus[j] * &x))));
        let step = linalg::pinv_solve(&hess, &(-&grad), 1e-10);
        let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
        let d = dist(&trial);
        if d < best {
            best = d;
            theta = trial;
        } else {
            break;
        }
    }
    best
}

/// Greedy clustering by orbit distance, scanning points in lexicographic order
/// so that each representative is the lexicographically smallest member.
pub fn dedup_orbits(points: &[Vector], torus: &[Mat], rel_tol: f64) -> Dedup {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(points[b].iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut reps: Vec<usize> = Vec::new();
    let mut assignment = vec![0; points.len()];
    for &i in &order {
        let hit = reps.iter().position(|&r| {
            let scale = points[r]
                .norm()
                .max(points[i].norm())
                .max(f64::MIN_POSITIVE);
            orbit_distance(&points[r], &points[i], torus) <= rel_tol * scale
        });
        match hit {
            Some(c) => assignment[i] = c,
            None => {
                assignment[i] = reps.len();
                reps.push(i);
            }
        }
    }
    Dedup {
        representatives: reps,
        assignment,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::load_builtin;
    use crate::velocity::{make_root, RootKind};

    #[test]
    fn neville_recovers_quadratic() {
        let pts = [(0.1, 1.0 + 0.01), (0.2, 1.0 + 0.04), (0.3, 1.0 + 0.09)];
        assert!((neville(&pts, 0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_samples_are_insufficient() {
        let s = BranchSample {
            r: 0.01,
            energy: 0.0,
            v: vec![],
            velocity: vec![1.0],
            multiplier: 1.0,
            grad_residual: 0.0,
            flow: None,
        };
        let b = Branch {
            root_xi: vec![1.0],
            seed: Seed {
                u0: vec![],
                beta: vec![],
                eigenvalue: 0.0,
                cluster: 0,
            },
            samples: vec![s.clone(), BranchSample { r: 0.02, ..s }],
            truncated: None,
        };
        assert!(matches!(
            multiplier_limit(&b),
            Err(Error::InsufficientSamples { needed: 3, have: 2 })
        ));
    }

    #[test]
    fn same_circle_dedups_to_one() {
        let m = load_builtin("motivating_s1").unwrap();
        let a = m.action.generators[0].clone();
        let v = Vector::from_vec(vec![0.0, 0.3, 0.0, 0.1]);
        let w = linalg::expm(&(&a * 1.234)) * &v;
        let d = dedup_orbits(&[v.clone(), w], std::slice::from_ref(&a), 1e-6);
        assert_eq!(d.representatives.len(), 1);
        let other = Vector::from_vec(vec![0.3, 0.0, 0.1, 0.0]);
        assert_eq!(
            dedup_orbits(&[v, other], &[a], 1e-6).representatives.len(),
            2
        );
    }

    #[test]
    fn motivating_branch_is_exact() {
        let m = load_builtin("motivating_s1").unwrap();
        let root = make_root(&m, &[4.0], RootKind::Isolated).unwrap();
        let seeds = seed_directions(&m, &root, &[vec![1.0]]);
        assert_eq!(seeds.representatives.len(), 1);
        let seed = seeds.seeds().next().unwrap();
        let b = continue_branch(&m, &root, seed, 0.1, 0.01).unwrap();
        assert_eq!(b.samples.len(), 10);
        for s in &b.samples {
            assert!((s.velocity[0] - 4.0).abs() < 1e-12);
            assert!(s.energy < 0.0);
            assert!(s.v[0].abs() < 1e-14 && s.v[2].abs() < 1e-14);
        }
        assert!((multiplier_limit(&b).unwrap() - 1.0).abs() < 1e-12);
    }
}

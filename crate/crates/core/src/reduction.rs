//! Lyapunov–Schmidt reduction of `∇(h − J^{ξ+α})(v) = 0` onto the kernel `V₀`.
//!
//! Points are split as `v = B₀ v₀ + B₁ w` with `B₀` an orthonormal kernel
//! basis and `B₁` its orthogonal complement. The slave equation
//! `B₁ᵀ ∇(h − J^{ξ+α})(v) = 0` is solved for `w` by Newton's method, and the
//! reduced gradient is the remaining `V₀` component.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::model::sample_ball;
use crate::system::Model;
use crate::velocity::VelocityRoot;

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionFrame {
    pub xi: Vec<f64>,
    pub b0: Mat,
    pub b1: Mat,
    /// Orthogonal projector onto `V₀`.
    pub projector: Mat,
    pub trust_region: f64,
}

const MAX_NEWTON: usize = 50;
const SLAVE_TOL: f64 = 1e-11;

impl ReductionFrame {
    pub fn new(model: &Model, root: &VelocityRoot) -> Self {
        let b0 = root.kernel_basis.clone();
        let n = model.dim();
        // complement: orthonormalize [B₀ | I] and keep what is new
        let mut cols: Vec<Vector> = (0..b0.ncols()).map(|j| b0.column(j).into_owned()).collect();
        let (_, vecs) = linalg::sorted_symmetric_eigen(&model.augmented(&root.xi));
        cols.extend((0..n).map(|j| vecs.column(j).into_owned()));
        let all = linalg::orthonormalize(&linalg::from_columns(n, &cols), 1e-8);
        let b1 = all.columns(b0.ncols(), n - b0.ncols()).into_owned();
        let projector = &b0 * b0.transpose();
        Self {
            xi: root.xi.clone(),
            b0,
            b1,
            projector,
            trust_region: model.tol().trust_region,
        }
    }

    fn shifted(&self, alpha: &[f64]) -> Vec<f64> {
        self.xi.iter().zip(alpha).map(|(x, a)| x + a).collect()
    }

    fn check_trust(&self, v0: &Vector, alpha: &[f64]) -> Result<()> {
        let na = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
        if v0.norm() > self.trust_region || na > self.trust_region {
            return Err(Error::OutsideTrustRegion(format!(
                "|v0| = {:.3e}, |alpha| = {na:.3e}, radius {}",
                v0.norm(),
                self.trust_region
            )));
        }
        Ok(())
    }

    /// `v₁(v₀, α) = B₁ w` solving the slave equation.
    pub fn solve_slave(&self, model: &Model, v0: &Vector, alpha: &[f64]) -> Result<Vector> {
        self.check_trust(v0, alpha)?;
        let xi = self.shifted(alpha);
        let s = model.s_xi(&xi);
        let base = &self.b0 * v0;
        let mut w = Vector::zeros(self.b1.ncols());
        let mut last = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let x = &base + &self.b1 * &w;
            let (_, grad, hess) = model.hamiltonian.eval_h2(&x)?;
            let g = self.b1.transpose() * (grad - &s * &x);
            let res = g.amax();
            // keep iterating past the target while Newton still improves, so that
            // finite differences of v₁ see roundoff rather than the stopping rule
            if res == 0.0 || (res < SLAVE_TOL && res >= 0.5 * last) {
                return Ok(&self.b1 * w);
            }
            last = res;
            let jac = self.b1.transpose() * (hess - &s) * &self.b1;
            let step = jac.lu().solve(&(-g)).ok_or(Error::NoConvergence {
                iterations: 0,
                residual: res,
            })?;
            w += step;
            if !w.iter().all(|x| x.is_finite()) {
                break;
            }
        }
        let x = &base + &self.b1 * &w;
        let res = (self.b1.transpose() * model.augmented_gradient(&x, &xi)?).amax();
        if res < SLAVE_TOL {
            Ok(&self.b1 * w)
        } else {
            Err(Error::NoConvergence {
                iterations: MAX_NEWTON,
                residual: res,
            })
        }
    }

    /// The full point `B₀ v₀ + v₁(v₀, α)`.
    pub fn lift(&self, model: &Model, v0: &Vector, alpha: &[f64]) -> Result<Vector> {
        Ok(&self.b0 * v0 + self.solve_slave(model, v0, alpha)?)
    }

    /// `B(v₀, α) = B₀ᵀ ∇(h − J^{ξ+α})(B₀ v₀ + v₁)`.
    pub fn reduced_gradient(&self, model: &Model, v0: &Vector, alpha: &[f64]) -> Result<Vector> {
        let x = self.lift(model, v0, alpha)?;
        let g = model.augmented_gradient(&x, &self.shifted(alpha))?;
        let off = (self.b1.transpose() * &g).amax();
        if off >= 1e-10 {
            return Err(Error::NoConvergence {
                iterations: MAX_NEWTON,
                residual: off,
            });
        }
        Ok(self.b0.transpose() * g)
    }

    /// `g(v₀, α) = (h − J^{ξ+α})(B₀ v₀ + v₁)`, whose gradient is the reduced gradient.
    pub fn reduced_potential(&self, model: &Model, v0: &Vector, alpha: &[f64]) -> Result<f64> {
        let x = self.lift(model, v0, alpha)?;
        let s = model.s_xi(&self.shifted(alpha));
        Ok(model.hamiltonian.value(&x)? - 0.5 * x.dot(&(s * &x)))
    }

    /// `H_α(v₀) = h(B₀ v₀ + v₁(v₀, α))`.
    pub fn reduced_energy(&self, model: &Model, v0: &Vector, alpha: &[f64]) -> Result<f64> {
        model.hamiltonian.value(&self.lift(model, v0, alpha)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaResiduals {
    /// max ‖v₁(0, α)‖ over probe α.
    pub slave_at_origin: f64,
    /// ‖D_{V₀} v₁(0, 0)‖.
    pub slave_derivative: f64,
    /// ‖D_{V₀} B(0, 0)‖.
    pub reduced_derivative: f64,
    /// max |⟨D²_{V₀,α} B(0,0)(v₀, α), w₀⟩ + v₀ᵀ S_α w₀| over probes.
    pub mixed_identity: f64,
    pub probes: usize,
}

impl LemmaResiduals {
    pub fn max(&self) -> f64 {
        self.slave_at_origin
            .max(self.slave_derivative)
            .max(self.reduced_derivative)
            .max(self.mixed_identity)
    }
}

const FD_STEP: f64 = 1e-4;

/// Finite-difference checks of the structure of the slave map and the reduced gradient at the origin.
pub fn lemma_residuals(
    model: &Model,
    frame: &ReductionFrame,
    probes: usize,
    seed: u64,
) -> Result<LemmaResiduals> {
    let l = frame.b0.ncols();
    let dg = model.dim_g();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_v = Vector::zeros(l);
    let zero_a = vec![0.0; dg];
    let probe_radius = 0.1 * frame.trust_region;

    let mut slave_at_origin = 0.0_f64;
    for _ in 0..probes {
        let a: Vec<f64> = sample_ball(&mut rng, dg, probe_radius)
            .iter()
            .copied()
            .collect();
        slave_at_origin = slave_at_origin.max(frame.solve_slave(model, &zero_v, &a)?.norm());
    }

    let mut slave_derivative = 0.0_f64;
    let mut reduced_derivative = 0.0_f64;
    for j in 0..l {
        let mut e = Vector::zeros(l);
        e[j] = FD_STEP;
        let dv = (frame.solve_slave(model, &e, &zero_a)?
            - frame.solve_slave(model, &(-&e), &zero_a)?)
            / (2.0 * FD_STEP);
        let db = (frame.reduced_gradient(model, &e, &zero_a)?
            - frame.reduced_gradient(model, &(-&e), &zero_a)?)
            / (2.0 * FD_STEP);
        slave_derivative = slave_derivative.max(dv.norm());
        reduced_derivative = reduced_derivative.max(db.norm());
    }

    let mut mixed_identity = 0.0_f64;
    for _ in 0..probes {
        let v0 = sample_ball(&mut rng, l, 1.0);
        let w0 = sample_ball(&mut rng, l, 1.0);
        let a = sample_ball(&mut rng, dg, 1.0);
        let b = |sv: f64, sa: f64| -> Result<Vector> {
            let alpha: Vec<f64> = a.iter().map(|x| x * sa * FD_STEP).collect();
            frame.reduced_gradient(model, &(&v0 * (sv * FD_STEP)), &alpha)
        };
        let mixed = (b(1.0, 1.0)? - b(1.0, -1.0)? - b(-1.0, 1.0)? + b(-1.0, -1.0)?)
            / (4.0 * FD_STEP * FD_STEP);
        let s_alpha = model.s_xi(a.as_slice());
        let rhs = -(&frame.b0 * &v0).dot(&(s_alpha * (&frame.b0 * &w0)));
        mixed_identity = mixed_identity.max((mixed.dot(&w0) - rhs).abs());
    }
    Ok(LemmaResiduals {
        slave_at_origin,
        slave_derivative,
        reduced_derivative,
        mixed_identity,
        probes,
    })
}

//! Phase space, linear symmetry action, momentum map and Hamiltonian.
//!
//! Conventions: `ω(u, w) = uᵀ Ω w`. The Hamiltonian vector field solves
//! `ω(X_h, ·) = dh`, i.e. `X_h(v) = Ω⁻ᵀ ∇h(v)`, and the momentum map of a
//! generator `A` is `J^A(v) = ½ ω(Av, v) = ½ vᵀ (AᵀΩ) v`. With these signs
//! the Hamiltonian vector field of `J^A` is exactly `v ↦ A v`.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::Dual;
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::linalg::{self, Mat, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    omega: Mat,
    /// `Ω⁻ᵀ`, mapping gradients to Hamiltonian vector fields.
    field_map: Mat,
}

impl SymplecticSpace {
    pub fn new(omega: Mat, structural_tol: f64) -> Result<Self> {
        let n = omega.nrows();
        if n == 0 || n != omega.ncols() || !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "omega must be square with even positive size, got {}x{}",
                omega.nrows(),
                omega.ncols()
            )));
        }
        let asym = linalg::max_abs(&(omega.transpose() + &omega));
        if asym != 0.0 {
            return Err(Error::ValidationError {
                check: "omega_antisymmetry".into(),
                detail: format!("max |Ωᵀ + Ω| = {asym:e}"),
            });
        }
        let det = linalg::det(&omega);
        if det.abs() <= structural_tol {
            return Err(Error::ValidationError {
                check: "omega_invertible".into(),
                detail: format!("|det Ω| = {:e}", det.abs()),
            });
        }
        let field_map = omega
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::ValidationError {
                check: "omega_invertible".into(),
                detail: "inverse failed".into(),
            })?;
        Ok(Self { omega, field_map })
    }

    /// `Σ dq_i ∧ dp_i` in `(q_1..q_n, p_1..p_n)` ordering.
    pub fn canonical(n_dof: usize) -> Self {
        let n = 2 * n_dof;
        let mut omega = Mat::zeros(n, n);
        for i in 0..n_dof {
            omega[(i, n_dof + i)] = 1.0;
            omega[(n_dof + i, i)] = -1.0;
        }
        Self::new(omega, 0.0).expect("canonical form is symplectic")
    }

    /// `Σ dq_i ∧ dp_i` in interleaved `(q_1, p_1, q_2, p_2, ..)` ordering.
    pub fn pairwise(n_dof: usize) -> Self {
        let n = 2 * n_dof;
        let mut omega = Mat::zeros(n, n);
        for i in 0..n_dof {
            omega[(2 * i, 2 * i + 1)] = 1.0;
            omega[(2 * i + 1, 2 * i)] = -1.0;
        }
        Self::new(omega, 0.0).expect("pairwise form is symplectic")
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &Mat {
        &self.omega
    }

    pub fn field_map(&self) -> &Mat {
        &self.field_map
    }

    pub fn form(&self, u: &Vector, w: &Vector) -> f64 {
        u.dot(&(&self.omega * w))
    }
}

/// Linear action of a compact group through its Lie algebra generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAction {
    pub dim_g: usize,
    pub rank_g: usize,
    pub abelian: bool,
    pub generators: Vec<Mat>,
    /// Indices of generators spanning a maximal torus.
    pub torus: Vec<usize>,
}

impl GroupAction {
    pub fn new(rank_g: usize, abelian: bool, generators: Vec<Mat>, torus: Vec<usize>) -> Self {
        Self {
            dim_g: generators.len(),
            rank_g,
            abelian,
            generators,
            torus,
        }
    }

    /// `A_ξ = Σ ξ_i A_i`.
    pub fn generator(&self, xi: &[f64]) -> Mat {
        let n = self.generators.first().map_or(0, |g| g.nrows());
        self.generators
            .iter()
            .zip(xi)
            .fold(Mat::zeros(n, n), |acc, (a, &c)| acc + a * c)
    }

    pub fn torus_generators(&self) -> Vec<&Mat> {
        self.torus.iter().map(|&i| &self.generators[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub fn validate_action(
    space: &SymplecticSpace,
    action: &GroupAction,
    structural_tol: f64,
) -> Result<ValidationReport> {
    let n = space.dim();
    for (i, a) in action.generators.iter().enumerate() {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator {i} is {}x{}, expected {n}x{n}",
                a.nrows(),
                a.ncols()
            )));
        }
    }
    let omega = space.omega();
    let mut checks = Vec::new();
    for (i, a) in action.generators.iter().enumerate() {
        let canon = linalg::max_abs(&(a.transpose() * omega + omega * a));
        checks.push(Check::new(format!("canonical[{i}]"), canon, structural_tol));
        let asym = linalg::max_abs(&(a.transpose() + a));
        checks.push(Check::new(
            format!("antisymmetric[{i}]"),
            asym,
            structural_tol,
        ));
    }
    if action.abelian {
        for i in 0..action.dim_g {
            for j in (i + 1)..action.dim_g {
                let c = linalg::max_abs(&linalg::commutator(
                    &action.generators[i],
                    &action.generators[j],
                ));
                checks.push(Check::new(format!("commute[{i},{j}]"), c, structural_tol));
            }
        }
    }
    let rank_ok = action.rank_g <= action.dim_g && action.torus.len() == action.rank_g;
    let torus_in_range = action.torus.iter().all(|&t| t < action.dim_g);
    checks.push(Check::new(
        "rank_and_torus",
        if rank_ok && torus_in_range { 0.0 } else { 1.0 },
        0.0,
    ));
    if torus_in_range {
        let torus = action.torus_generators();
        for (a, &ia) in action.torus.iter().enumerate() {
            for (b, &ib) in action.torus.iter().enumerate().skip(a + 1) {
                let c = linalg::max_abs(&linalg::commutator(torus[a], torus[b]));
                checks.push(Check::new(
                    format!("torus_commute[{ia},{ib}]"),
                    c,
                    structural_tol,
                ));
            }
            let period = linalg::expm(&(torus[a] * std::f64::consts::TAU)) - Mat::identity(n, n);
            checks.push(Check::new(
                format!("torus_period[{ia}]"),
                linalg::max_abs(&period),
                1e-9,
            ));
        }
    }
    Ok(ValidationReport { checks })
}

/// Quadratic form of the momentum component `J^ξ(v) = ½ vᵀ S_ξ v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumForm {
    pub xi: Vec<f64>,
    pub s: Mat,
}

impl MomentumForm {
    pub fn value(&self, v: &Vector) -> f64 {
        0.5 * v.dot(&(&self.s * v))
    }

    pub fn gradient(&self, v: &Vector) -> Vector {
        &self.s * v
    }
}

pub fn momentum_quadratic(
    space: &SymplecticSpace,
    action: &GroupAction,
    xi: &[f64],
) -> MomentumForm {
    let a = action.generator(xi);
    MomentumForm {
        xi: xi.to_vec(),
        s: linalg::symmetrize(&(a.transpose() * space.omega())),
    }
}

/// A Hamiltonian normalized so that `h(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub expr: Expr,
    pub variables: Vec<String>,
    pub parameters: BTreeMap<String, f64>,
    tape: Tape,
    /// Constant removed from the user expression.
    pub offset: f64,
    constant_hessian: Option<Mat>,
}

impl Hamiltonian {
    /// Compile without normalizing or checking the origin.
    pub fn compile(
        expr: Expr,
        variables: Vec<String>,
        parameters: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let tape = Tape::compile(&expr, &variables, &parameters)?;
        Ok(Self {
            expr,
            variables,
            parameters,
            tape,
            offset: 0.0,
            constant_hessian: None,
        })
    }

    /// Compile, subtract `h(0)` and require `∇h(0) = 0`.
    pub fn new(
        expr: Expr,
        variables: Vec<String>,
        parameters: BTreeMap<String, f64>,
        origin_tol: f64,
    ) -> Result<Self> {
        let mut h = Self::compile(expr, variables, parameters)?;
        let zero = Vector::zeros(h.dim());
        h.offset = h.tape.eval(zero.as_slice())?;
        let g = h.gradient(&zero)?;
        if g.amax() > origin_tol {
            return Err(Error::ValidationError {
                check: "gradient_at_origin".into(),
                detail: format!("|∇h(0)|_max = {:e}", g.amax()),
            });
        }
        if matches!(h.tape.degree(), Some(d) if d <= 2) {
            h.constant_hessian = Some(h.hessian_uncached(&zero)?);
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn is_quadratic(&self) -> bool {
        self.constant_hessian.is_some()
    }

    pub fn value(&self, v: &Vector) -> Result<f64> {
        Ok(self.tape.eval(v.as_slice())? - self.offset)
    }

    pub fn gradient(&self, v: &Vector) -> Result<Vector> {
        let n = self.dim();
        if let Some(h) = &self.constant_hessian {
            return Ok(h * v);
        }
        let mut x: Vec<Dual<f64>> = v.iter().map(|&c| Dual::new(c, 0.0)).collect();
        let mut g = Vector::zeros(n);
        for i in 0..n {
            x[i].eps = 1.0;
            g[i] = self.tape.eval(&x)?.eps;
            x[i].eps = 0.0;
        }
        Ok(g)
    }

    pub fn hessian(&self, v: &Vector) -> Result<Mat> {
        match &self.constant_hessian {
            Some(h) => Ok(h.clone()),
            None => self.hessian_uncached(v),
        }
    }

    fn hessian_uncached(&self, v: &Vector) -> Result<Mat> {
        Ok(self.eval_h2_uncached(v)?.2)
    }

    /// Value, gradient and Hessian by nested forward-mode duals.
    pub fn eval_h2(&self, v: &Vector) -> Result<(f64, Vector, Mat)> {
        if let Some(h) = &self.constant_hessian {
            let g = h * v;
            return Ok((self.value(v)?, g, h.clone()));
        }
        self.eval_h2_uncached(v)
    }

    fn eval_h2_uncached(&self, v: &Vector) -> Result<(f64, Vector, Mat)> {
        let n = self.dim();
        let zero = Dual::new(0.0, 0.0);
        let mut x: Vec<Dual<Dual<f64>>> = v
            .iter()
            .map(|&c| Dual::new(Dual::new(c, 0.0), zero))
            .collect();
        let mut grad = Vector::zeros(n);
        let mut hess = Mat::zeros(n, n);
        let mut value = 0.0;
        if n == 0 {
            return Ok((self.value(v)?, grad, hess));
        }
        for i in 0..n {
            x[i].eps.re = 1.0;
            for j in i..n {
                x[j].re.eps = 1.0;
                let y = self.tape.eval(&x)?;
                x[j].re.eps = 0.0;
                hess[(i, j)] = y.eps.eps;
                hess[(j, i)] = y.eps.eps;
                if j == i {
                    grad[i] = y.eps.re;
                    value = y.re.re;
                }
            }
            x[i].eps.re = 0.0;
        }
        Ok((value - self.offset, grad, linalg::symmetrize(&hess)))
    }
}

/// Invariance of `h` under each generator, plus the Noether bracket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// max |∇h(v)·A_i v|
    pub max_residual: f64,
    /// max |∇h(v)·A_i v| / (‖∇h(v)‖ ‖A_i v‖)
    pub max_scaled_residual: f64,
    /// max |{J^{ξ_i}, h}(v)|
    pub noether_residual: f64,
    pub samples: usize,
    pub pass: bool,
}

pub fn check_invariance(
    space: &SymplecticSpace,
    h: &Hamiltonian,
    action: &GroupAction,
    sample_count: usize,
    radius: f64,
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let n = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0_f64;
    let mut max_scaled = 0.0_f64;
    let mut noether = 0.0_f64;
    let mut pass = true;
    let forms: Vec<Mat> = (0..action.dim_g)
        .map(|i| {
            let mut e = vec![0.0; action.dim_g];
            e[i] = 1.0;
            momentum_quadratic(space, action, &e).s
        })
        .collect();
    for _ in 0..sample_count {
        let v = sample_ball(&mut rng, n, radius);
        let g = h.gradient(&v)?;
        let field = space.field_map() * &g;
        for (a, s) in action.generators.iter().zip(&forms) {
            let av = a * &v;
            let r = g.dot(&av).abs();
            let scale = g.norm() * av.norm();
            max_residual = max_residual.max(r);
            if scale > 0.0 {
                max_scaled = max_scaled.max(r / scale);
            }
            if r > tol * scale + 1e-14 {
                pass = false;
            }
            noether = noether.max((s * &v).dot(&field).abs());
        }
    }
    Ok(InvarianceReport {
        max_residual,
        max_scaled_residual: max_scaled,
        noether_residual: noether,
        samples: sample_count,
        pass,
    })
}

/// Uniform sample from the Euclidean ball of the given radius.
pub fn sample_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let norm = v.norm();
        if norm <= 1.0 && norm > 0.0 {
            return v * radius;
        }
    }
}

//! A fully validated system: phase space, action, Hamiltonian and options.

use crate::config::{rows_to_mat, AnalysisOptions, SystemConfig, Tolerances};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{Mat, Vector};
use crate::model::{
    check_invariance, momentum_quadratic, validate_action, GroupAction, Hamiltonian,
    InvarianceReport, SymplecticSpace, ValidationReport,
};

/// Dimension and rank of the isotropy group `G^ξ` of a velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GroupXi {
    pub dim: usize,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub config: SystemConfig,
    pub space: SymplecticSpace,
    pub action: GroupAction,
    pub hamiltonian: Hamiltonian,
    /// `d²h(0)`.
    pub h0: Mat,
    /// `S_{e_i}` for the generator basis.
    pub s_basis: Vec<Mat>,
    pub validation: ValidationReport,
    pub invariance: InvarianceReport,
    pub group_xi: GroupXi,
}

impl Model {
    pub fn from_config(config: SystemConfig) -> Result<Self> {
        let opts = &config.analysis;
        let tol = &opts.tolerances;
        let omega = rows_to_mat(&config.space.omega, "omega")?;
        if omega.nrows() != config.space.dim {
            return Err(Error::DimensionMismatch(format!(
                "space.dim = {} but omega has {} rows",
                config.space.dim,
                omega.nrows()
            )));
        }
        let space = SymplecticSpace::new(omega, tol.structural)?;
        let generators = config
            .group
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| rows_to_mat(g, &format!("generator {i}")))
            .collect::<Result<Vec<_>>>()?;
        if generators.len() != config.group.dim {
            return Err(Error::DimensionMismatch(format!(
                "group.dim = {} but {} generators given",
                config.group.dim,
                generators.len()
            )));
        }
        let action = GroupAction::new(
            config.group.rank,
            config.group.abelian,
            generators,
            config.group.torus.clone(),
        );
        let validation = validate_action(&space, &action, tol.structural)?;
        if !validation.pass() {
            let failed: Vec<String> = validation
                .failures()
                .iter()
                .map(|c| format!("{} (residual {:e})", c.name, c.residual))
                .collect();
            return Err(Error::ValidationError {
                check: validation.failures()[0].name.clone(),
                detail: failed.join(", "),
            });
        }
        let variables = config.variables();
        if variables.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} variables for a {}-dimensional space",
                variables.len(),
                space.dim()
            )));
        }
        let expr = Expr::parse(&config.hamiltonian.expression)?;
        let hamiltonian = Hamiltonian::new(
            expr,
            variables,
            config.hamiltonian.parameters.clone(),
            tol.origin,
        )?;
        let n = space.dim();
        let h0 = hamiltonian.hessian(&Vector::zeros(n))?;
        let invariance = check_invariance(
            &space,
            &hamiltonian,
            &action,
            opts.invariance_samples,
            opts.sample_radius,
            tol.invariance,
            opts.seed,
        )?;
        if !invariance.pass {
            return Err(Error::ValidationError {
                check: "invariance".into(),
                detail: format!("max scaled residual {:e}", invariance.max_scaled_residual),
            });
        }
        let s_basis = (0..action.dim_g)
            .map(|i| {
                let mut e = vec![0.0; action.dim_g];
                e[i] = 1.0;
                momentum_quadratic(&space, &action, &e).s
            })
            .collect();
        let group_xi = if action.abelian {
            GroupXi {
                dim: action.dim_g,
                rank: action.rank_g,
            }
        } else {
            match (config.group.xi_dim, config.group.xi_rank) {
                (Some(dim), Some(rank)) => GroupXi { dim, rank },
                _ => {
                    return Err(Error::Unsupported(
                        "non-Abelian groups need group.xi_dim and group.xi_rank".into(),
                    ))
                }
            }
        };
        Ok(Self {
            config,
            space,
            action,
            hamiltonian,
            h0,
            s_basis,
            validation,
            invariance,
            group_xi,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_config(SystemConfig::parse(text)?)
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn dim_g(&self) -> usize {
        self.action.dim_g
    }

    pub fn options(&self) -> &AnalysisOptions {
        &self.config.analysis
    }

    pub fn tol(&self) -> &Tolerances {
        &self.config.analysis.tolerances
    }

    /// `S_ξ = Σ ξ_i S_{e_i}`.
    pub fn s_xi(&self, xi: &[f64]) -> Mat {
        let n = self.dim();
        self.s_basis
            .iter()
            .zip(xi)
            .fold(Mat::zeros(n, n), |acc, (s, &c)| acc + s * c)
    }

    /// `d²(h − J^ξ)(0) = d²h(0) − S_ξ`.
    pub fn augmented(&self, xi: &[f64]) -> Mat {
        &self.h0 - self.s_xi(xi)
    }

    /// `∇(h − J^ξ)(v)`.
    pub fn augmented_gradient(&self, v: &Vector, xi: &[f64]) -> Result<Vector> {
        Ok(self.hamiltonian.gradient(v)? - self.s_xi(xi) * v)
    }

    /// `J^{e_i}(v)` for every basis direction.
    pub fn momentum(&self, v: &Vector) -> Vec<f64> {
        self.s_basis.iter().map(|s| 0.5 * v.dot(&(s * v))).collect()
    }
}

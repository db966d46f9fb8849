//! System definition files.
//!
//! A system is a TOML document with four tables:
//!
//! ```toml
//! name = "harmonic"
//!
//! [space]
//! dim = 2
//! variables = ["q", "p"]          # optional, defaults to v1..v{dim}
//! omega = [[0.0, 1.0], [-1.0, 0.0]]
//!
//! [group]
//! dim = 1
//! rank = 1
//! abelian = true
//! generators = [[[0.0, 1.0], [-1.0, 0.0]]]
//! torus = [0]
//! # xi_dim / xi_rank: isotropy metadata, only needed for non-Abelian groups
//!
//! [hamiltonian]
//! expression = "(* 0.5 (+ (^ q 2) (^ p 2)))"
//! parameters = { }
//!
//! [analysis]
//! box_lo = [0.0]
//! box_hi = [3.0]
//! grid = 600
//! [analysis.tolerances]
//! kernel = 1e-8
//! ```
//!
//! Every `[analysis]` key is optional; see [`AnalysisOptions`] for the
//! defaults. Matrices are lists of rows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default)]
    pub name: String,
    pub space: SpaceConfig,
    pub group: GroupConfig,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub analysis: AnalysisOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<String>,
    pub omega: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub dim: usize,
    pub rank: usize,
    pub abelian: bool,
    pub generators: Vec<Vec<Vec<f64>>>,
    pub torus: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub expression: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Canonicity, antisymmetry, commutators, |det Ω|.
    pub structural: f64,
    /// |∇h(0)| at load time.
    pub origin: f64,
    /// Scaled invariance residual.
    pub invariance: f64,
    /// Kernel threshold relative to the spectral radius.
    pub kernel: f64,
    /// Definiteness margin relative to ‖Q‖.
    pub definiteness: f64,
    /// Polished |det| relative to the determinant scale.
    pub det_polish: f64,
    /// Relative smallest-eigenvalue dip that triggers a tangential-root warning.
    pub dip: f64,
    /// Gradient residual of accepted branch samples.
    pub branch: f64,
    /// Flow test pass threshold.
    pub flow: f64,
    /// Radius of the neighborhood where the slave equation is solved.
    pub trust_region: f64,
    /// Relative gap below which generalized eigenvalues are merged.
    pub cluster: f64,
    /// Relative singular value cutoff for orbit tangent ranks.
    pub orbit_rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: 1e-12,
            origin: 1e-10,
            invariance: 1e-9,
            kernel: 1e-8,
            definiteness: 1e-8,
            det_polish: 1e-10,
            dip: 1e-3,
            branch: 1e-9,
            flow: 1e-7,
            trust_region: 0.5,
            cluster: 1e-7,
            orbit_rank: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    /// Lower corner of the velocity search box; empty means `-3` in every direction.
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    /// Grid intervals per axis.
    pub grid: usize,
    /// Turn tangential-root warnings into errors.
    pub strict_grid: bool,
    pub seed: u64,
    pub invariance_samples: usize,
    /// Radius of the ball used for sampled checks.
    pub sample_radius: f64,
    pub r_max: f64,
    pub step: f64,
    pub min_step: f64,
    pub flow_time: f64,
    pub flow_dt: f64,
    /// Curve samples continued per traced chain of roots.
    pub nu_per_chain: usize,
    pub tolerances: Tolerances,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            box_lo: Vec::new(),
            box_hi: Vec::new(),
            grid: 600,
            strict_grid: false,
            seed: 0,
            invariance_samples: 100,
            sample_radius: 0.5,
            r_max: 0.3,
            step: 1e-2,
            min_step: 1e-5,
            flow_time: 1.0,
            flow_dt: 1e-3,
            nu_per_chain: 2,
            tolerances: Tolerances::default(),
        }
    }
}

impl AnalysisOptions {
    /// The search box, filling in the `[-3, 3]` default per axis.
    pub fn search_box(&self, dim_g: usize) -> (Vec<f64>, Vec<f64>) {
        let lo = if self.box_lo.len() == dim_g {
            self.box_lo.clone()
        } else {
            vec![-3.0; dim_g]
        };
        let hi = if self.box_hi.len() == dim_g {
            self.box_hi.clone()
        } else {
            vec![3.0; dim_g]
        };
        (lo, hi)
    }

    /// Apply a `key=value` override. Keys are field names of this struct or
    /// `tol.<name>` / `tolerances.<name>` for a tolerance.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            value.parse::<f64>().map_err(|_| Error::ValidationError {
                check: format!("option {key}"),
                detail: format!("`{value}` is not a number"),
            })
        };
        let list = || -> Result<Vec<f64>> {
            value
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::ValidationError {
                    check: format!("option {key}"),
                    detail: format!("`{value}` is not a comma separated list"),
                })
        };
        let int = || -> Result<usize> { Ok(num()? as usize) };
        if let Some(t) = key
            .strip_prefix("tol.")
            .or_else(|| key.strip_prefix("tolerances."))
        {
            let tol = &mut self.tolerances;
            let slot = match t {
                "structural" => &mut tol.structural,
                "origin" => &mut tol.origin,
                "invariance" => &mut tol.invariance,
                "kernel" => &mut tol.kernel,
                "definiteness" => &mut tol.definiteness,
                "det_polish" => &mut tol.det_polish,
                "dip" => &mut tol.dip,
                "branch" => &mut tol.branch,
                "flow" => &mut tol.flow,
                "trust_region" => &mut tol.trust_region,
                "cluster" => &mut tol.cluster,
                "orbit_rank" => &mut tol.orbit_rank,
                _ => return Err(unknown_key(key)),
            };
            *slot = num()?;
            return Ok(());
        }
        match key {
            "box_lo" => self.box_lo = list()?,
            "box_hi" => self.box_hi = list()?,
            "grid" => self.grid = int()?,
            "strict_grid" => self.strict_grid = value == "true" || value == "1",
            "seed" => self.seed = num()? as u64,
            "invariance_samples" => self.invariance_samples = int()?,
            "sample_radius" => self.sample_radius = num()?,
            "r_max" => self.r_max = num()?,
            "step" => self.step = num()?,
            "min_step" => self.min_step = num()?,
            "flow_time" => self.flow_time = num()?,
            "flow_dt" => self.flow_dt = num()?,
            "nu_per_chain" => self.nu_per_chain = int()?,
            _ => return Err(unknown_key(key)),
        }
        Ok(())
    }
}

fn unknown_key(key: &str) -> Error {
    Error::ValidationError {
        check: "option".into(),
        detail: format!("unknown key `{key}`"),
    }
}

impl SystemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            Error::ParseError {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("system config is always serializable")
    }

    /// Apply a `key=value` override: a Hamiltonian parameter name, or an
    /// analysis option (optionally prefixed with `analysis.`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(p) = self.hamiltonian.parameters.get_mut(key) {
            *p = value.parse().map_err(|_| Error::ValidationError {
                check: format!("parameter {key}"),
                detail: format!("`{value}` is not a number"),
            })?;
            return Ok(());
        }
        self.analysis
            .set(key.strip_prefix("analysis.").unwrap_or(key), value)
    }

    pub fn variables(&self) -> Vec<String> {
        if self.space.variables.is_empty() {
            (1..=self.space.dim).map(|i| format!("v{i}")).collect()
        } else {
            self.space.variables.clone()
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn rows_to_mat(rows: &[Vec<f64>], what: &str) -> Result<Mat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch(format!("{what}: ragged rows")));
    }
    Ok(Mat::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn mat_to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HARMONIC: &str = r#"
name = "harmonic"

[space]
dim = 2
variables = ["q", "p"]
omega = [[0.0, 1.0], [-1.0, 0.0]]

[group]
dim = 1
rank = 1
abelian = true
generators = [[[0.0, 1.0], [-1.0, 0.0]]]
torus = [0]

[hamiltonian]
expression = "(* c (+ (^ q 2) (^ p 2)))"
parameters = { c = 0.5 }

[analysis]
grid = 50
[analysis.tolerances]
kernel = 1e-7
"#;

    #[test]
    fn parse_and_defaults() {
        let c = SystemConfig::parse(HARMONIC).unwrap();
        assert_eq!(c.space.dim, 2);
        assert_eq!(c.hamiltonian.parameters["c"], 0.5);
        assert_eq!(c.analysis.grid, 50);
        assert_eq!(c.analysis.tolerances.kernel, 1e-7);
        assert_eq!(c.analysis.tolerances.branch, 1e-9);
    }

    #[test]
    fn round_trip_is_identity() {
        let c = SystemConfig::parse(HARMONIC).unwrap();
        let again = SystemConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn parse_error_has_position() {
        let bad = "name = \"x\"\n[space]\ndim = = 2\n";
        match SystemConfig::parse(bad) {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn overrides() {
        let mut c = SystemConfig::parse(HARMONIC).unwrap();
        c.set("c", "2").unwrap();
        c.set("tol.kernel", "1e-9").unwrap();
        c.set("analysis.box_lo", "-1").unwrap();
        assert_eq!(c.hamiltonian.parameters["c"], 2.0);
        assert_eq!(c.analysis.tolerances.kernel, 1e-9);
        assert_eq!(c.analysis.box_lo, vec![-1.0]);
        assert!(c.set("nope", "1").is_err());
    }
}

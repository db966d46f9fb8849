//! The analysis report and its text / JSON renderings.
//!
//! The JSON schema is versioned by [`SCHEMA_VERSION`]; field names below are
//! the serialized names. Matrices are row lists, kernel bases column lists.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::branch::{BranchSample, Seed};
use crate::error::{Error, Result};
use crate::model::{Check, InvarianceReport};
use crate::reduction::LemmaResiduals;
use crate::system::GroupXi;
use crate::topology::{BartschBound, CategoryBound, EigenCluster, MorseBottVerdict};
use crate::velocity::{Definiteness, RootKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Passed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub name: String,
    pub dim: usize,
    pub dim_g: usize,
    pub rank_g: usize,
    pub abelian: bool,
    pub variables: Vec<String>,
    pub parameters: BTreeMap<String, f64>,
    pub group_xi: GroupXi,
    pub h0_eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSection {
    pub checks: Vec<Check>,
    pub invariance: InvarianceReport,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub closed: bool,
    /// Velocity of each sample along the curve.
    pub samples: Vec<Vec<f64>>,
    pub kernel_dims: Vec<usize>,
    /// `|det|` at each sample.
    pub det_residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSection {
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub grid: usize,
    pub chains: Vec<ChainReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseBottSummary {
    pub beta: Vec<f64>,
    pub verdict: MorseBottVerdict,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<EigenCluster>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSection {
    pub fixed_dim: usize,
    pub bartsch: BartschBound,
    pub category: CategoryBound,
    pub lower_bound: usize,
    pub morse_bott: Vec<MorseBottSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub seed: Seed,
    pub samples: Vec<BranchSample>,
    pub truncated: Option<String>,
    pub multiplier_limit: Option<f64>,
    /// Every sample passed the flow test.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub xi: Vec<f64>,
    pub kind: RootKind,
    /// Chain index for curve samples.
    pub chain: Option<usize>,
    pub det_residual: f64,
    pub kernel_dim: usize,
    /// Orthonormal kernel basis, one entry per column.
    pub kernel_basis: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub q_eigenvalues: Vec<f64>,
    pub definiteness: Definiteness,
    pub kernel_residual: f64,
    pub identity_residual: f64,
    pub tangential: bool,
    pub counts: Option<CountSection>,
    pub lemma: Option<LemmaResiduals>,
    pub seeds: Vec<Seed>,
    pub seed_flags: Vec<String>,
    pub branches: Vec<BranchReport>,
    /// Distinct group orbits among the branch points at the first common radius.
    pub found_distinct: Option<usize>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WholeSpaceSection {
    pub fixed_dim: usize,
    pub bartsch: BartschBound,
    pub category: CategoryBound,
    pub lower_bound: usize,
    /// Per basis direction `β`: velocities `β/μ` for `S_β u = μ d²h(0) u`, `μ ≠ 0`.
    pub velocities: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub xi: Vec<f64>,
    pub kind: RootKind,
    pub kernel_dim: usize,
    pub lower_bound: Option<usize>,
    pub found_distinct: Option<usize>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub status: Status,
    pub failures: Vec<String>,
    pub system: SystemSummary,
    pub validation: ValidationSection,
    pub search: Option<SearchSection>,
    pub roots: Vec<RootReport>,
    pub whole_space: Option<WholeSpaceSection>,
    pub comparison: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" | "structured" => Ok(Format::Json),
            other => Err(Error::DomainError(format!(
                "unknown format `{other}` (text, json)"
            ))),
        }
    }
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let sys = &self.system;
        let _ = writeln!(
            s,
            "system {}: dim V = {}, dim g = {}, rank g = {}",
            sys.name, sys.dim, sys.dim_g, sys.rank_g
        );
        if !sys.parameters.is_empty() {
            let params: Vec<String> = sys
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let _ = writeln!(s, "parameters: {}", params.join(" "));
        }
        let _ = writeln!(s, "\nvalidation: {}", pass_word(self.validation.pass));
        for c in &self.validation.checks {
            let _ = writeln!(
                s,
                "  {:<28} {:>10.3e}  (tol {:.0e}) {}",
                c.name,
                c.residual,
                c.tolerance,
                pass_word(c.pass)
            );
        }
        let inv = &self.validation.invariance;
        let _ = writeln!(
            s,
            "  {:<28} {:>10.3e}  scaled {:.3e}, noether {:.3e}, {} samples {}",
            "invariance",
            inv.max_residual,
            inv.max_scaled_residual,
            inv.noether_residual,
            inv.samples,
            pass_word(inv.pass)
        );
        if let Some(search) = &self.search {
            let _ = writeln!(
                s,
                "\nvelocity search on {:?} x {:?}, grid {}: {} isolated roots, {} root curves",
                search.box_lo,
                search.box_hi,
                search.grid,
                self.roots
                    .iter()
                    .filter(|r| r.kind == RootKind::Isolated)
                    .count(),
                search.chains.len()
            );
            for (i, c) in search.chains.iter().enumerate() {
                let (a, b) = (&c.samples[0], c.samples.last().expect("nonempty chain"));
                let _ = writeln!(
                    s,
                    "  curve {i}: {} samples from {} to {}{}",
                    c.samples.len(),
                    fmt_vec(a),
                    fmt_vec(b),
                    if c.closed { " (closed)" } else { "" }
                );
            }
            for w in &search.warnings {
                let _ = writeln!(s, "  warning: {w}");
            }
        }
        if self.search.is_some() && self.roots.is_empty() {
            let _ = writeln!(s, "\nno roots in the search box");
        }
        for r in &self.roots {
            let _ =
                writeln!(
                s,
                "\nroot xi = {} ({:?}{}): |det| = {:.2e}, dim V0 = {}, Q {:?} with eigenvalues {}",
                fmt_vec(&r.xi),
                r.kind,
                r.chain.map(|c| format!(" on curve {c}")).unwrap_or_default(),
                r.det_residual,
                r.kernel_dim,
                r.definiteness,
                fmt_vec(&r.q_eigenvalues)
            );
            if let Some(c) = &r.counts {
                let bartsch = match &c.bartsch {
                    BartschBound::Applicable { bound, .. } => bound.to_string(),
                    BartschBound::Inapplicable { fixed_dim } => {
                        format!("inapplicable (fixed dim {fixed_dim})")
                    }
                };
                let category = match &c.category {
                    CategoryBound::Known { bound, .. } => bound.to_string(),
                    CategoryBound::Unknown => "unknown".into(),
                };
                let _ = writeln!(
                    s,
                    "  counts: fixed dim {}, bartsch {bartsch}, category {category}, lower bound {}",
                    c.fixed_dim, c.lower_bound
                );
                for m in &c.morse_bott {
                    let _ = writeln!(
                        s,
                        "  beta {}: {:?}, eigenvalues {}",
                        fmt_vec(&m.beta),
                        m.verdict,
                        fmt_vec(&m.eigenvalues)
                    );
                }
            }
            if let Some(l) = &r.lemma {
                let _ = writeln!(
                    s,
                    "  reduction: v1(0,a) {:.1e}, Dv1 {:.1e}, DB {:.1e}, mixed {:.1e}",
                    l.slave_at_origin, l.slave_derivative, l.reduced_derivative, l.mixed_identity
                );
            }
            for f in &r.seed_flags {
                let _ = writeln!(s, "  seeds: {f}");
            }
            for (k, b) in r.branches.iter().enumerate() {
                let last = b.samples.last();
                let worst = b
                    .samples
                    .iter()
                    .filter_map(|x| x.flow.as_ref().map(|f| f.extrapolated_residual))
                    .fold(0.0, f64::max);
                let _ = writeln!(
                    s,
                    "  branch {k}: {} samples to r = {}, velocity {}, Lambda(0) = {}, flow {:.1e} {}{}",
                    b.samples.len(),
                    last.map_or("-".into(), |x| format!("{:.3}", x.r)),
                    last.map_or("-".into(), |x| fmt_vec(&x.velocity)),
                    b.multiplier_limit.map_or("-".into(), |v| format!("{v:.8}")),
                    worst,
                    pass_word(b.verified),
                    b.truncated.as_ref().map(|t| format!(", truncated: {t}")).unwrap_or_default()
                );
            }
            for e in &r.errors {
                let _ = writeln!(s, "  error: {e}");
            }
        }
        if let Some(w) = &self.whole_space {
            let _ = writeln!(
                s,
                "\nwhole space: fixed dim {}, lower bound {}, {} candidate velocities",
                w.fixed_dim,
                w.lower_bound,
                w.velocities.len()
            );
        }
        if !self.comparison.is_empty() {
            let _ = writeln!(
                s,
                "\n{:<28} {:>6} {:>6} {:>6}  result",
                "xi", "dim V0", "bound", "found"
            );
            for row in &self.comparison {
                let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
                let _ = writeln!(
                    s,
                    "{:<28} {:>6} {:>6} {:>6}  {}",
                    fmt_vec(&row.xi),
                    row.kernel_dim,
                    opt(row.lower_bound),
                    opt(row.found_distinct),
                    row.pass.map_or("skipped", pass_word)
                );
            }
        }
        let _ = writeln!(s, "\nstatus: {:?}", self.status);
        for f in &self.failures {
            let _ = writeln!(s, "  {f}");
        }
        s
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{:.6}", x + 0.0)).collect();
    format!("({})", parts.join(", "))
}

//! End-to-end analysis: validate, find critical velocities, then per root
//! count, check the reduction, continue branches, verify and deduplicate.

use crate::branch::{
    continue_branch, dedup_orbits, multiplier_limit, seed_directions, verify_branch, DEDUP_TOL,
};
use crate::config::mat_to_rows;
use crate::error::Result;
use crate::linalg::{self, Mat, Vector};
use crate::reduction::{lemma_residuals, ReductionFrame};
use crate::report::*;
use crate::system::Model;
use crate::topology::{counts, span_bounds};
use crate::velocity::{find_roots, RootKind, VelocityRoot};

/// How far the pipeline runs; later stages include the earlier ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Validate,
    Velocities,
    Counts,
    Reduce,
    Branches,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub stage: Stage,
    /// Only process this root, by index in the sorted root list.
    pub root: Option<usize>,
    pub lemma_probes: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            stage: Stage::Branches,
            root: None,
            lemma_probes: 5,
        }
    }
}

/// Residual budgets asserted by the pipeline.
pub const LEMMA_BUDGET: f64 = 1e-6;
pub const MULTIPLIER_BUDGET: f64 = 1e-4;

pub fn summarize(model: &Model) -> (SystemSummary, ValidationSection) {
    let cfg = &model.config;
    let system = SystemSummary {
        name: model.name().to_string(),
        dim: model.dim(),
        dim_g: model.dim_g(),
        rank_g: model.action.rank_g,
        abelian: model.action.abelian,
        variables: cfg.variables(),
        parameters: cfg.hamiltonian.parameters.clone(),
        group_xi: model.group_xi,
        h0_eigenvalues: linalg::sorted_symmetric_eigenvalues(&model.h0)
            .iter()
            .copied()
            .collect(),
    };
    let validation = ValidationSection {
        checks: model.validation.checks.clone(),
        invariance: model.invariance.clone(),
        pass: model.validation.pass() && model.invariance.pass,
    };
    (system, validation)
}

/// A root and, for curve samples, the index of its chain.
pub type Candidate = (VelocityRoot, Option<usize>);

/// Isolated roots plus `nu_per_chain` interior samples of every root curve, sorted by `ξ`.
pub fn candidate_roots(model: &Model) -> Result<(SearchSection, Vec<Candidate>)> {
    let opts = model.options();
    let (lo, hi) = opts.search_box(model.dim_g());
    let search = find_roots(model, &lo, &hi, opts.grid)?;
    let mut roots: Vec<Candidate> = search.roots.iter().cloned().map(|r| (r, None)).collect();
    for (c, chain) in search.chains.iter().enumerate() {
        let len = chain.samples.len();
        let k = opts.nu_per_chain.min(len);
        for j in 0..k {
            let idx = (j + 1) * len / (k + 1);
            roots.push((chain.samples[idx.min(len - 1)].clone(), Some(c)));
        }
    }
    roots.sort_by(|a, b| {
        a.0.xi
            .iter()
            .zip(&b.0.xi)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let section = SearchSection {
        box_lo: lo,
        box_hi: hi,
        grid: opts.grid,
        chains: search
            .chains
            .iter()
            .map(|c| ChainReport {
                closed: c.closed,
                samples: c.samples.iter().map(|s| s.xi.clone()).collect(),
                kernel_dims: c.samples.iter().map(|s| s.kernel_dim).collect(),
                det_residuals: c.samples.iter().map(|s| s.det_residual).collect(),
            })
            .collect(),
        warnings: search.warnings,
    };
    Ok((section, roots))
}

fn base_report(root: &VelocityRoot, chain: Option<usize>) -> RootReport {
    RootReport {
        xi: root.xi.clone(),
        kind: root.kind,
        chain,
        det_residual: root.det_residual,
        kernel_dim: root.kernel_dim,
        kernel_basis: mat_to_rows(&root.kernel_basis.transpose()),
        q: mat_to_rows(&root.q),
        q_eigenvalues: root.q_eigenvalues.clone(),
        definiteness: root.definiteness,
        kernel_residual: root.kernel_residual,
        identity_residual: root.identity_residual,
        tangential: root.tangential,
        counts: None,
        lemma: None,
        seeds: Vec::new(),
        seed_flags: Vec::new(),
        branches: Vec::new(),
        found_distinct: None,
        errors: Vec::new(),
    }
}

fn unit_betas(dim_g: usize) -> Vec<Vec<f64>> {
    (0..dim_g)
        .map(|i| {
            let mut b = vec![0.0; dim_g];
            b[i] = 1.0;
            b
        })
        .collect()
}

/// Everything downstream of the root search for one root. Errors are recorded, never raised.
pub fn process_root(
    model: &Model,
    root: &VelocityRoot,
    chain: Option<usize>,
    opts: &PipelineOptions,
) -> RootReport {
    let mut rep = base_report(root, chain);
    if opts.stage >= Stage::Counts {
        let c = counts(model, root);
        rep.counts = Some(CountSection {
            fixed_dim: c.fixed_dim,
            bartsch: c.bartsch.clone(),
            category: c.category.clone(),
            lower_bound: c.lower_bound,
            morse_bott: c
                .morse_bott
                .iter()
                .map(|m| MorseBottSummary {
                    beta: m.beta.clone(),
                    verdict: m.verdict,
                    eigenvalues: m.eigenvalues.clone(),
                    clusters: m.clusters.clone(),
                    note: m.note.clone(),
                })
                .collect(),
        });
    }
    if opts.stage >= Stage::Reduce {
        let frame = ReductionFrame::new(model, root);
        match lemma_residuals(model, &frame, opts.lemma_probes, model.options().seed) {
            Ok(l) => rep.lemma = Some(l),
            Err(e) => rep.errors.push(format!("reduction: {e}")),
        }
    }
    if opts.stage >= Stage::Branches {
        if !root.definiteness.is_definite() {
            rep.errors.push(format!(
                "Q is {:?} on V0, branch construction skipped",
                root.definiteness
            ));
            return rep;
        }
        let seeds = seed_directions(model, root, &unit_betas(model.dim_g()));
        rep.seed_flags = seeds.flags.clone();
        rep.seeds = seeds.seeds().cloned().collect();
        let aopts = model.options();
        for seed in seeds.seeds() {
            let mut branch = match continue_branch(model, root, seed, aopts.r_max, aopts.step) {
                Ok(b) => b,
                Err(e) => {
                    rep.errors.push(format!("continuation: {e}"));
                    continue;
                }
            };
            let verified = match verify_branch(model, &mut branch) {
                Ok(ok) => ok,
                Err(e) => {
                    rep.errors.push(format!("flow verification: {e}"));
                    false
                }
            };
            let limit = match multiplier_limit(&branch) {
                Ok(x) => Some(x),
                Err(e) => {
                    rep.errors.push(format!("multiplier limit: {e}"));
                    None
                }
            };
            rep.branches.push(BranchReport {
                seed: seed.clone(),
                truncated: branch.truncated.as_ref().map(|e| e.to_string()),
                samples: branch.samples,
                multiplier_limit: limit,
                verified: verified && !rep.errors.iter().any(|e| e.starts_with("flow")),
            });
        }
        rep.found_distinct = found_distinct(model, &rep.branches);
    }
    rep
}

/// Orbit count of the branch points at the largest first radius shared by all branches.
fn found_distinct(model: &Model, branches: &[BranchReport]) -> Option<usize> {
    let firsts: Vec<f64> = branches
        .iter()
        .filter_map(|b| b.samples.first().map(|s| s.r))
        .collect();
    if firsts.is_empty() {
        return None;
    }
    let level = firsts.iter().copied().fold(0.0, f64::max);
    let points: Vec<Vector> = branches
        .iter()
        .filter_map(|b| b.samples.iter().find(|s| s.r >= level * (1.0 - 1e-9)))
        .map(|s| Vector::from_vec(s.v.clone()))
        .collect();
    let torus: Vec<Mat> = model
        .action
        .torus_generators()
        .into_iter()
        .cloned()
        .collect();
    Some(
        dedup_orbits(&points, &torus, DEDUP_TOL)
            .representatives
            .len(),
    )
}

fn whole_space(model: &Model) -> WholeSpaceSection {
    let n = model.dim();
    let (fixed_dim, bartsch, category) = span_bounds(model, &Mat::identity(n, n));
    let sign = if model.h0.trace() < 0.0 { -1.0 } else { 1.0 };
    let mut velocities: Vec<Vec<f64>> = Vec::new();
    for beta in unit_betas(model.dim_g()) {
        if let Some((mu, _)) =
            linalg::generalized_symmetric_eigen(&model.s_xi(&beta), &(&model.h0 * sign))
        {
            for m in mu.iter().filter(|m| m.abs() > 1e-12) {
                let v: Vec<f64> = beta.iter().map(|b| b / (m * sign)).collect();
                if !velocities.iter().any(|w| {
                    w.iter()
                        .zip(&v)
                        .all(|(a, b)| (a - b).abs() < 1e-9 * (1.0 + b.abs()))
                }) {
                    velocities.push(v);
                }
            }
        }
    }
    velocities.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let lower_bound = bartsch.bound().unwrap_or(0).max(category.bound()).max(1);
    WholeSpaceSection {
        fixed_dim,
        bartsch,
        category,
        lower_bound,
        velocities,
    }
}

fn h0_definite(model: &Model) -> bool {
    let ev = linalg::sorted_symmetric_eigenvalues(&model.h0);
    let scale = ev.amax().max(f64::MIN_POSITIVE);
    let margin = model.tol().definiteness * scale;
    ev.iter().all(|&x| x > margin) || ev.iter().all(|&x| x < -margin)
}

pub fn run_pipeline(model: &Model, opts: &PipelineOptions) -> AnalysisReport {
    let (system, validation) = summarize(model);
    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        status: Status::Passed,
        failures: Vec::new(),
        system,
        validation,
        search: None,
        roots: Vec::new(),
        whole_space: None,
        comparison: Vec::new(),
    };
    if opts.stage >= Stage::Velocities {
        match candidate_roots(model) {
            Ok((section, mut roots)) => {
                report.search = Some(section);
                if let Some(i) = opts.root {
                    roots = roots.into_iter().skip(i).take(1).collect();
                    if roots.is_empty() {
                        report.failures.push(format!("root index {i} out of range"));
                    }
                }
                report.roots = roots
                    .iter()
                    .map(|(r, c)| process_root(model, r, *c, opts))
                    .collect();
            }
            Err(e) => report.failures.push(format!("velocity search: {e}")),
        }
        let any_indefinite = report.roots.iter().any(|r| !r.definiteness.is_definite());
        if opts.stage >= Stage::Counts
            && h0_definite(model)
            && (any_indefinite || report.roots.is_empty())
        {
            report.whole_space = Some(whole_space(model));
        }
    }
    finalize(&mut report);
    report
}

/// Fill the comparison table and the failure list, and set the status.
pub fn finalize(report: &mut AnalysisReport) {
    let mut failures = std::mem::take(&mut report.failures);
    if !report.validation.pass {
        failures.push("validation failed".into());
    }
    report.comparison.clear();
    for r in &report.roots {
        let tag = format!("root {:?}", r.xi);
        let bound = r.counts.as_ref().map(|c| c.lower_bound);
        let pass = match (bound, r.found_distinct) {
            (Some(b), Some(f)) => Some(f >= b),
            _ => None,
        };
        if pass == Some(false) {
            failures.push(format!(
                "{tag}: found {} distinct orbits, bound {}",
                r.found_distinct.unwrap_or(0),
                bound.unwrap_or(0)
            ));
        }
        if let Some(l) = &r.lemma {
            if !(l.max() < LEMMA_BUDGET) {
                failures.push(format!("{tag}: reduction residual {:e}", l.max()));
            }
        }
        for (k, b) in r.branches.iter().enumerate() {
            if !b.verified {
                failures.push(format!("{tag}: branch {k} has unverified samples"));
            }
            if let Some(x) = b.multiplier_limit {
                if !((x - 1.0).abs() < MULTIPLIER_BUDGET) {
                    failures.push(format!("{tag}: branch {k} multiplier limit {x}"));
                }
            }
        }
        report.comparison.push(ComparisonRow {
            xi: r.xi.clone(),
            kind: r.kind,
            kernel_dim: r.kernel_dim,
            lower_bound: bound,
            found_distinct: r.found_distinct,
            pass,
        });
    }
    report.status = if failures.is_empty() {
        Status::Passed
    } else {
        Status::Failed
    };
    report.failures = failures;
}

/// Whether a root came from a curve of velocities.
pub fn is_curve(r: &RootReport) -> bool {
    r.kind == RootKind::CurveSample
}

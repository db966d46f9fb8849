//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Closed forms below are written out independently of
//! the library and compared against what the pipeline finds.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use releq_core::builtins::{builtin_config, load_builtin, BUILTIN_NAMES};
use releq_core::config::SystemConfig;
use releq_core::dynamics::{
    integrate, noether_residual, relative_equilibrium_residual, reversibility_error,
};
use releq_core::linalg::{self, Mat, Vector};
use releq_core::model::{check_invariance, sample_ball};
use releq_core::pipeline::{run_pipeline, PipelineOptions};
use releq_core::report::{AnalysisReport, RootReport};
use releq_core::system::Model;
use releq_core::topology::{span_bounds, BartschBound};
use releq_core::velocity::RootKind;
use releq_core::Error;

#[derive(Default)]
struct Checker {
    failures: Vec<String>,
    checks: usize,
}

impl Checker {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn kernel(r: &RootReport) -> Mat {
    let cols: Vec<Vector> = r
        .kernel_basis
        .iter()
        .map(|c| Vector::from_vec(c.clone()))
        .collect();
    linalg::from_columns(cols[0].len(), &cols)
}

fn cols(n: usize, vs: &[Vec<f64>]) -> Mat {
    let v: Vec<Vector> = vs.iter().map(|c| Vector::from_vec(c.clone())).collect();
    linalg::from_columns(n, &v)
}

/// Q in a (possibly non-orthonormal) basis `bp` of the same kernel.
fn q_in_basis(r: &RootReport, bp: &Mat) -> Mat {
    let b0 = kernel(r);
    let q = linalg::from_columns(
        r.q.len(),
        &r.q.iter()
            .map(|row| Vector::from_vec(row.clone()))
            .collect::<Vec<_>>(),
    )
    .transpose();
    let c = b0.transpose() * bp;
    c.transpose() * q * c
}

fn neville0(pts: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = pts.iter().map(|x| x.1).collect();
    for k in 1..pts.len() {
        for i in 0..pts.len() - k {
            p[i] = (-pts[i + k].0 * p[i] + pts[i].0 * p[i + 1]) / (pts[i].0 - pts[i + k].0);
        }
    }
    p[0]
}

fn all_samples_verified(c: &mut Checker, report: &AnalysisReport) {
    for r in &report.roots {
        for b in &r.branches {
            for s in &b.samples {
                let res = s.flow.as_ref().map(|f| f.extrapolated_residual);
                c.check(res.is_some_and(|x| x < 1e-7), || {
                    format!("xi {:?} r {}: flow residual {res:?}", r.xi, s.r)
                });
            }
        }
    }
}

struct Reports {
    motivating: Option<AnalysisReport>,
    pendulum: Option<AnalysisReport>,
    coupled: Option<AnalysisReport>,
}

fn criterion_1(c: &mut Checker, out: &mut Reports) {
    let model = load_builtin("motivating_s1").unwrap();
    let report = run_pipeline(&model, &PipelineOptions::default());
    c.check(report.passed(), || {
        format!("report status {:?}: {:?}", report.status, report.failures)
    });
    let xs: Vec<f64> = report.roots.iter().map(|r| r.xi[0]).collect();
    c.check(xs.len() == 2, || format!("roots {xs:?}"));
    // planes (q1,0,p1,0) for ξ = 2 and (0,q2,0,p2) for ξ = 4, variables (q1,q2,p1,p2)
    let planes = [(2.0, [0usize, 2]), (4.0, [1, 3])];
    for (xi, idx) in planes {
        let Some(r) = report.roots.iter().find(|r| (r.xi[0] - xi).abs() < 1e-9) else {
            c.check(false, || format!("root {xi} not found in {xs:?}"));
            continue;
        };
        c.check(r.det_residual <= 1e-10, || {
            format!("root {xi}: |det| {}", r.det_residual)
        });
        let mut e = Mat::zeros(4, 2);
        e[(idx[0], 0)] = 1.0;
        e[(idx[1], 1)] = 1.0;
        let angle = linalg::max_principal_angle_sine(&kernel(r), &e);
        c.check(angle < 1e-8, || {
            format!("root {xi}: kernel angle {angle:e}")
        });
        c.check(!r.branches.is_empty(), || format!("root {xi}: no branch"));
        for b in &r.branches {
            for s in &b.samples {
                c.check((s.velocity[0] - xi).abs() < 1e-9, || {
                    format!("root {xi}: velocity {:?}", s.velocity)
                });
                let v = &s.v;
                let energy = if xi == 2.0 {
                    v[0] * v[0] + v[2] * v[2]
                } else {
                    -2.0 * (v[1] * v[1] + v[3] * v[3])
                };
                c.check((s.energy - energy).abs() < 1e-12, || {
                    format!("root {xi}: energy {} vs {energy}", s.energy)
                });
            }
        }
    }
    all_samples_verified(c, &report);
    let raw = relative_equilibrium_residual(
        &model,
        &Vector::from_vec(vec![0.1, 0.0, 0.1, 0.0]),
        &[2.0],
        1.0,
        1e-3,
    )
    .unwrap();
    c.check(raw < 1e-7, || {
        format!("raw flow residual at (0.1,0,0.1,0): {raw:e}")
    });
    out.motivating = Some(report);
}

fn criterion_2(c: &mut Checker, out: &mut Reports) {
    let (m, l, g) = (1.0, 1.0, 1.0);
    let model = load_builtin("spherical_pendulum m=1 l=1 g=1 phi=0.1").unwrap();
    let report = run_pipeline(&model, &PipelineOptions::default());
    c.check(report.passed(), || {
        format!("report status {:?}: {:?}", report.status, report.failures)
    });
    let omega = f64::sqrt(g / l);
    c.check(report.roots.len() == 2, || {
        format!("{} roots", report.roots.len())
    });
    for sign in [-1.0, 1.0] {
        let w = sign * omega;
        let Some(r) = report.roots.iter().find(|r| (r.xi[0] - w).abs() < 1e-9) else {
            c.check(false, || format!("root {w} missing"));
            continue;
        };
        // V0 = span{(1,0,0,mω), (0,1,−mω,0)}, Q = (gm/l + mω²) I in that basis
        let bp = cols(
            4,
            &[vec![1.0, 0.0, 0.0, m * w], vec![0.0, 1.0, -m * w, 0.0]],
        );
        let angle =
            linalg::max_principal_angle_sine(&kernel(r), &linalg::orthonormalize(&bp, 1e-12));
        c.check(angle < 1e-8, || format!("root {w}: kernel angle {angle:e}"));
        let q = q_in_basis(r, &bp);
        let expect = Mat::identity(2, 2) * (g * m / l + m * w * w);
        let err = linalg::max_abs(&(&q - &expect));
        c.check(err < 1e-9, || format!("root {w}: Q error {err:e}"));
        c.check(r.branches.len() == 1, || {
            format!("root {w}: {} branches", r.branches.len())
        });
        for b in &r.branches {
            let mut prev = 0.0;
            for s in &b.samples {
                let dv = (s.velocity[0] - w).abs();
                if s.r <= 0.2 + 1e-12 {
                    c.check(dv < 0.05, || {
                        format!("root {w}: |xi'(r) - xi| = {dv} at r = {}", s.r)
                    });
                }
                c.check(dv >= prev, || {
                    format!("root {w}: velocity not monotone at r = {}", s.r)
                });
                prev = dv;
            }
            let pts: Vec<(f64, f64)> = b
                .samples
                .iter()
                .take(3)
                .map(|s| (s.r, s.velocity[0]))
                .collect();
            let limit = neville0(&pts);
            c.check((limit - w).abs() < 1e-3, || {
                format!("root {w}: velocity extrapolates to {limit}")
            });
        }
    }
    all_samples_verified(c, &report);
    out.pendulum = Some(report);
}

/// Closed forms for the coupled oscillators with parameters `m, k, γ`.
struct Coupled {
    m: f64,
    k: f64,
    gamma: f64,
}

impl Coupled {
    fn s(&self) -> f64 {
        (self.k * self.m + self.gamma * self.gamma).sqrt()
    }

    /// The four equalities `ξ₂ = ±|ξ₁m + γ|/m ± s/m`: residual and family label.
    fn family(&self, xi: &[f64]) -> (f64, bool, f64) {
        let a = (xi[0] * self.m + self.gamma).abs() / self.m;
        let b = self.s() / self.m;
        let mut best = (f64::INFINITY, true, 1.0);
        for (three, val) in [(true, a + b), (false, a - b)] {
            for sigma in [1.0, -1.0] {
                let res = (xi[1] - sigma * val).abs();
                if res < best.0 {
                    best = (res, three, sigma);
                }
            }
        }
        best
    }

    fn isolated(&self) -> Vec<(String, [f64; 2])> {
        let (m, g, s) = (self.m, self.gamma, self.s());
        vec![
            ("r1+".into(), [(-g + s) / m, 0.0]),
            ("r1-".into(), [(-g - s) / m, 0.0]),
            ("r2+".into(), [-g / m, s / m]),
            ("r2-".into(), [-g / m, -s / m]),
        ]
    }

    fn v0_isolated(&self, label: &str) -> Mat {
        let a = 1.0 / self.s();
        let pm = if label.ends_with('+') { 1.0 } else { -1.0 };
        let v = if label.starts_with("r1") {
            vec![
                vec![0.0, 0.0, pm * a, 0.0, 0.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 0.0, -pm * a, 0.0, 0.0, 1.0, 0.0],
                vec![pm * a, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                vec![0.0, -pm * a, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            ]
        } else {
            vec![
                vec![0.0, pm * a, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
                vec![pm * a, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, -pm * a, 0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, -pm * a, 0.0, 1.0, 0.0, 0.0, 0.0],
            ]
        };
        cols(8, &v)
    }

    /// `V0^{3±}` or `V0^{4±}`.
    fn v0_curve(&self, three: bool, pm: f64) -> Mat {
        let a = 1.0 / self.s();
        let t = if three { 1.0 } else { -1.0 };
        cols(
            8,
            &[
                vec![0.0, t * pm * a, -t * a, 0.0, pm, 0.0, 0.0, 1.0],
                vec![t * pm * a, 0.0, 0.0, t * a, 0.0, -pm, 1.0, 0.0],
            ],
        )
    }

    fn q_scalar(&self, which: &str) -> f64 {
        let (k, m, g, s) = (self.k, self.m, self.gamma, self.s());
        let d = m * (k * m + g * g);
        match which {
            "r1+" => 2.0 * (k * m + g * (g - s)) / d,
            "r1-" => 2.0 * (k * m + g * (g + s)) / d,
            "3" => 4.0 * (k * m + g * (g + s)) / d,
            "4" => 4.0 * (k * m + g * (g - s)) / d,
            _ => unreachable!(),
        }
    }

    fn q2_eigenvalues(&self) -> [f64; 2] {
        let (k, m, g, s) = (self.k, self.m, self.gamma, self.s());
        let d = m * (k * m + g * g);
        [
            2.0 * (k * m + g * (g - s)) / d,
            2.0 * (k * m + g * (g + s)) / d,
        ]
    }
}

fn criterion_3(c: &mut Checker, out: &mut Reports) {
    let sys = Coupled {
        m: 1.0,
        k: 1.0,
        gamma: 0.5,
    };
    let model = load_builtin("coupled_oscillators m=1 k=1 gamma=0.5 f=0").unwrap();
    let report = run_pipeline(&model, &PipelineOptions::default());
    c.check(report.passed(), || {
        format!("report status {:?}: {:?}", report.status, report.failures)
    });

    // (a) isolated roots and their kernels and forms
    let isolated: Vec<&RootReport> = report
        .roots
        .iter()
        .filter(|r| r.kind == RootKind::Isolated)
        .collect();
    c.check(isolated.len() == 4, || {
        format!("{} isolated roots", isolated.len())
    });
    let mut total_found = 0;
    for (label, xi) in sys.isolated() {
        let Some(r) = isolated
            .iter()
            .find(|r| (r.xi[0] - xi[0]).abs() < 1e-8 && (r.xi[1] - xi[1]).abs() < 1e-8)
        else {
            c.check(false, || format!("{label} = {xi:?} not found within 1e-8"));
            continue;
        };
        c.check(r.kernel_dim == 4, || {
            format!("{label}: dim V0 {}", r.kernel_dim)
        });
        let bp = sys.v0_isolated(&label);
        let angle =
            linalg::max_principal_angle_sine(&kernel(r), &linalg::orthonormalize(&bp, 1e-12));
        c.check(angle < 1e-8, || format!("{label}: kernel angle {angle:e}"));
        let q = q_in_basis(r, &bp);
        if label.starts_with("r1") {
            let err = linalg::max_abs(&(&q - Mat::identity(4, 4) * sys.q_scalar(&label)));
            c.check(err < 1e-8, || format!("{label}: Q error {err:e}"));
        } else {
            let ev = linalg::sorted_symmetric_eigenvalues(&q);
            let [lo, hi] = sys.q2_eigenvalues();
            let err = (ev[0] - lo)
                .abs()
                .max((ev[1] - lo).abs())
                .max((ev[2] - hi).abs())
                .max((ev[3] - hi).abs());
            c.check(err < 1e-8, || {
                format!("{label}: Q eigenvalues {ev:?} vs {lo}, {hi}")
            });
        }
        let bound = r.counts.as_ref().and_then(|k| k.bartsch.bound());
        c.check(bound == Some(2), || format!("{label}: bartsch {bound:?}"));
        let found = r.found_distinct.unwrap_or(0);
        c.check(found >= 2, || format!("{label}: found {found}"));
        total_found += found.min(2);
    }
    c.check(total_found == 8, || {
        format!("{total_found} relative equilibria over the isolated roots")
    });

    // (b) every sampled curve point lies on one of the four root lines
    let search = report.search.as_ref().unwrap();
    for chain in &search.chains {
        for xi in &chain.samples {
            let res = sys.family(xi).0;
            c.check(res < 1e-7, || {
                format!("curve sample {xi:?}: residual {res:e}")
            });
        }
    }

    // (c) curve roots: label by family; for ξ₁ < −γ/m the kernel of family 3±
    // is the displayed V0^{4∓} and vice versa.
    let mut nu_counts = std::collections::BTreeMap::new();
    for r in report
        .roots
        .iter()
        .filter(|r| r.kind == RootKind::CurveSample)
    {
        let (_, three, sigma) = sys.family(&r.xi);
        let left = r.xi[0] * sys.m + sys.gamma < 0.0;
        let (k3, kpm) = if left {
            (!three, -sigma)
        } else {
            (three, sigma)
        };
        let bp = sys.v0_curve(k3, kpm);
        let angle =
            linalg::max_principal_angle_sine(&kernel(r), &linalg::orthonormalize(&bp, 1e-12));
        c.check(angle < 1e-6, || {
            format!("curve root {:?}: kernel angle {angle:e}", r.xi)
        });
        let q = q_in_basis(r, &bp);
        let expect = sys.q_scalar(if k3 { "3" } else { "4" });
        let err = linalg::max_abs(&(&q - Mat::identity(2, 2) * expect));
        c.check(err < 1e-8, || {
            format!("curve root {:?}: Q error {err:e}", r.xi)
        });
        let bound = r.counts.as_ref().and_then(|k| k.bartsch.bound());
        c.check(bound == Some(1), || {
            format!("curve root {:?}: bartsch {bound:?}", r.xi)
        });
        let verified = r
            .branches
            .iter()
            .any(|b| b.verified && !b.samples.is_empty());
        c.check(r.found_distinct.unwrap_or(0) >= 1 && verified, || {
            format!("curve root {:?}: no verified branch", r.xi)
        });
        if verified {
            *nu_counts.entry((three, sigma > 0.0)).or_insert(0) += 1;
        }
    }
    c.check(
        nu_counts.len() == 4 && nu_counts.values().all(|&n| n >= 3),
        || format!("nu samples per family {nu_counts:?}"),
    );

    // (d) trivial torus-fixed subspaces
    for r in &report.roots {
        let fixed = r.counts.as_ref().map(|k| k.fixed_dim);
        c.check(fixed == Some(0), || {
            format!("root {:?}: fixed dim {fixed:?}", r.xi)
        });
    }
    all_samples_verified(c, &report);
    out.coupled = Some(report);
}

fn criterion_4(c: &mut Checker, out: &Reports) {
    for report in [&out.motivating, &out.pendulum].into_iter().flatten() {
        for r in &report.roots {
            match &r.lemma {
                Some(l) => {
                    for (name, x) in [
                        ("v1(0,a)", l.slave_at_origin),
                        ("Dv1", l.slave_derivative),
                        ("DB", l.reduced_derivative),
                        ("mixed", l.mixed_identity),
                    ] {
                        c.check(x < 1e-6, || {
                            format!("{} {:?}: {name} = {x:e}", report.system.name, r.xi)
                        });
                    }
                }
                None => c.check(false, || {
                    format!("{} {:?}: no reduction residuals", report.system.name, r.xi)
                }),
            }
        }
    }
    let reports = [&out.motivating, &out.pendulum, &out.coupled];
    c.check(reports.iter().all(|r| r.is_some()), || {
        "a builtin report is missing".into()
    });
    for report in reports.into_iter().flatten() {
        for r in &report.roots {
            for b in &r.branches {
                let x = b.multiplier_limit;
                c.check(x.is_some_and(|x| (x - 1.0).abs() < 1e-4), || {
                    format!("{} {:?}: multiplier limit {x:?}", report.system.name, r.xi)
                });
            }
        }
    }
}

fn criterion_5(c: &mut Checker, out: &Reports) {
    for name in BUILTIN_NAMES {
        let model = load_builtin(name).unwrap();
        let n = model.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for _ in 0..10 {
            let v = sample_ball(&mut rng, n, 0.3);
            let hess = model.hamiltonian.hessian(&v).unwrap();
            let mut fd = Mat::zeros(n, n);
            for j in 0..n {
                let mut e = Vector::zeros(n);
                e[j] = h;
                let d = (model.hamiltonian.gradient(&(&v + &e)).unwrap()
                    - model.hamiltonian.gradient(&(&v - &e)).unwrap())
                    / (2.0 * h);
                fd.set_column(j, &d);
            }
            let rel = linalg::max_abs(&(&hess - &fd)) / linalg::max_abs(&hess).max(1.0);
            c.check(rel < 1e-6, || {
                format!("{name}: hessian vs finite differences {rel:e}")
            });

            let traj = integrate(&model, &sample_ball(&mut rng, n, 0.2), 1.0, 1e-3).unwrap();
            let noether = noether_residual(&model, &traj);
            c.check(noether < 1e-8, || {
                format!("{name}: noether drift {noether:e}")
            });
            let back = reversibility_error(&model, &traj).unwrap();
            c.check(back < 1e-10, || format!("{name}: reversibility {back:e}"));
        }
        for chk in &model.validation.checks {
            if chk.name.starts_with("canonical") || chk.name.starts_with("antisymmetric") {
                c.check(chk.residual < 1e-12, || {
                    format!("{name}: {} = {:e}", chk.name, chk.residual)
                });
            }
        }
    }
    for report in [&out.motivating, &out.pendulum, &out.coupled]
        .into_iter()
        .flatten()
    {
        for r in &report.roots {
            c.check(r.identity_residual < 1e-10, || {
                format!(
                    "{} {:?}: d²J identity {:e}",
                    report.system.name, r.xi, r.identity_residual
                )
            });
        }
        let back = AnalysisReport::from_json(&report.to_json()).unwrap();
        c.check(&back == report, || {
            format!("{}: report does not round-trip", report.system.name)
        });
    }
    let model = load_builtin("motivating_s1").unwrap();
    let a = run_pipeline(&model, &PipelineOptions::default()).to_json();
    let b = run_pipeline(&model, &PipelineOptions::default()).to_json();
    c.check(a == b, || "structured output not deterministic".into());
}

const SPLIT_CIRCLE: &str = r#"
name = "split_circle"
[space]
dim = 4
variables = ["q1", "q2", "p1", "p2"]
omega = [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]]
[group]
dim = 1
rank = 1
abelian = true
generators = [[[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]]]
torus = [0]
[hamiltonian]
expression = "(+ (^ q1 2) (^ p1 2) (^ q2 2) (^ p2 2))"
"#;

fn criterion_6(c: &mut Checker) {
    let mut cfg = builtin_config("motivating_s1").unwrap();
    cfg.hamiltonian.expression = format!("(+ {} (* 0.1 (^ q1 3)))", cfg.hamiltonian.expression);
    match Model::from_config(cfg.clone()) {
        Err(Error::ValidationError { check, .. }) => {
            c.check(check == "invariance", || format!("failed check {check}"))
        }
        other => c.check(false, || {
            format!(
                "non-invariant h accepted: {:?}",
                other.map(|m| m.invariance)
            )
        }),
    }
    let good = load_builtin("motivating_s1").unwrap();
    let expr = releq_core::expr::Expr::parse(&cfg.hamiltonian.expression).unwrap();
    let bad = releq_core::model::Hamiltonian::compile(
        expr,
        cfg.variables(),
        cfg.hamiltonian.parameters.clone(),
    )
    .unwrap();
    let inv = check_invariance(&good.space, &bad, &good.action, 50, 0.5, 1e-9, 0).unwrap();
    c.check(!inv.pass, || {
        format!("check_invariance passed a non-invariant h: {inv:?}")
    });

    let wrong = relative_equilibrium_residual(
        &good,
        &Vector::from_vec(vec![0.1, 0.0, 0.1, 0.0]),
        &[3.0],
        1.0,
        1e-3,
    )
    .unwrap();
    c.check(wrong > 1e-2, || {
        format!("wrong-velocity residual {wrong:e}")
    });

    let model = Model::from_config(SystemConfig::parse(SPLIT_CIRCLE).unwrap()).unwrap();
    let (fixed, bartsch, _) = span_bounds(&model, &Mat::identity(4, 4));
    c.check(
        fixed == 2 && matches!(bartsch, BartschBound::Inapplicable { fixed_dim: 2 }),
        || format!("fixed dim {fixed}, bartsch {bartsch:?}"),
    );
}

fn main() {
    let mut reports = Reports {
        motivating: None,
        pendulum: None,
        coupled: None,
    };
    let mut all_ok = true;
    let mut run =
        |n: usize, title: &str, limit: Option<Duration>, f: &mut dyn FnMut(&mut Checker)| {
            let start = Instant::now();
            let mut c = Checker::default();
            let panicked = catch_unwind(AssertUnwindSafe(|| f(&mut c))).err();
            let took = start.elapsed();
            if let Some(p) = panicked {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                c.failures.push(format!("panicked: {msg}"));
            }
            if let Some(l) = limit {
                c.check(took <= l, || format!("took {took:.2?}, limit {l:?}"));
            }
            let ok = c.failures.is_empty();
            all_ok &= ok;
            println!(
                "criterion {n} ({title}): {} [{} checks, {:.2?}]",
                if ok { "PASS" } else { "FAIL" },
                c.checks,
                took
            );
            for f in c.failures.iter().take(20) {
                println!("    {f}");
            }
        };
    run(
        1,
        "motivating example",
        Some(Duration::from_secs(5)),
        &mut |c| criterion_1(c, &mut reports),
    );
    run(
        2,
        "spherical pendulum",
        Some(Duration::from_secs(10)),
        &mut |c| criterion_2(c, &mut reports),
    );
    run(
        3,
        "coupled oscillators",
        Some(Duration::from_secs(60)),
        &mut |c| criterion_3(c, &mut reports),
    );
    run(4, "reduction and multiplier", None, &mut |c| {
        criterion_4(c, &reports)
    });
    run(5, "property suites", None, &mut |c| {
        criterion_5(c, &reports)
    });
    run(6, "negative controls", None, &mut |c| criterion_6(c));
    if !all_ok {
        std::process::exit(1);
    }
}

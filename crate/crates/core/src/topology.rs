//! Lower bounds on the number of distinct relative equilibria per energy
//! level, fixed subspaces of the torus, and the Morse–Bott check on the
//! momentum components restricted to the unit sphere of `Q`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Mat, Vector};
use crate::model::{sample_ball, GroupAction};
use crate::system::{GroupXi, Model};
use crate::velocity::VelocityRoot;

/// Joint kernel of the torus generators inside `span(basis)`, as orthonormal
/// ambient columns.
pub fn fixed_subspace(action: &GroupAction, torus: &[usize], basis: &Mat) -> Mat {
    let n = basis.nrows();
    let l = basis.ncols();
    if l == 0 {
        return Mat::zeros(n, 0);
    }
    let mut stacked = Mat::zeros(n * torus.len(), l);
    for (k, &i) in torus.iter().enumerate() {
        stacked
            .view_mut((k * n, 0), (n, l))
            .copy_from(&(&action.generators[i] * basis));
    }
    let scale = linalg::max_abs(&stacked);
    if scale == 0.0 {
        return linalg::orthonormalize(basis, 1e-12);
    }
    let null = linalg::null_space(&stacked, 1e-10);
    if null.ncols() == 0 {
        return Mat::zeros(n, 0);
    }
    linalg::orthonormalize(&(basis * null), 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BartschBound {
    Applicable {
        numerator: usize,
        denominator: usize,
        /// `numerator / denominator` before rounding down.
        value: f64,
        bound: usize,
    },
    /// The torus fixes a nonzero subspace.
    Inapplicable { fixed_dim: usize },
}

impl BartschBound {
    pub fn bound(&self) -> Option<usize> {
        match self {
            BartschBound::Applicable { bound, .. } => Some(*bound),
            BartschBound::Inapplicable { .. } => None,
        }
    }
}

/// `⌊dim V₀ / 2(1 + dim G^ξ − rank G^ξ)⌋` when the torus has no fixed vectors.
pub fn bartsch_bound(
    v0_dim: usize,
    dim_g_xi: usize,
    rank_g_xi: usize,
    fixed_dim: usize,
) -> BartschBound {
    if fixed_dim > 0 {
        return BartschBound::Inapplicable { fixed_dim };
    }
    let denominator = 2 * (1 + dim_g_xi.saturating_sub(rank_g_xi));
    BartschBound::Applicable {
        numerator: v0_dim,
        denominator,
        value: v0_dim as f64 / denominator as f64,
        bound: v0_dim / denominator,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CategoryBound {
    /// Quotient recognized; `reason` names the case.
    Known { bound: usize, reason: String },
    /// Not recognized; at least one critical orbit always exists.
    Unknown,
}

impl CategoryBound {
    pub fn bound(&self) -> usize {
        match self {
            CategoryBound::Known { bound, .. } => *bound,
            CategoryBound::Unknown => 1,
        }
    }
}

/// Largest rank of `{C_i u}` over a few sphere samples: the principal orbit dimension.
pub fn orbit_dimension(restricted: &[Mat], l: usize, rel_tol: f64, seed: u64) -> usize {
    if l == 0 || restricted.is_empty() {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..8)
        .map(|_| {
            let u = sample_ball(&mut rng, l, 1.0).normalize();
            orbit_tangent_rank(restricted, &u, rel_tol)
        })
        .max()
        .unwrap_or(0)
}

fn orbit_tangent_rank(restricted: &[Mat], u: &Vector, rel_tol: f64) -> usize {
    let cols: Vec<Vector> = restricted.iter().map(|c| c * u).collect();
    let m = linalg::from_columns(u.len(), &cols);
    let scale = restricted
        .iter()
        .map(|c| linalg::spectral_radius_sym(&(c.transpose() * c)).sqrt())
        .fold(0.0, f64::max)
        * u.norm();
    if scale == 0.0 {
        return 0;
    }
    let s = m.singular_values();
    s.iter().filter(|&&x| x > rel_tol * scale).count()
}

/// Generators restricted to `span(basis)`: `Bᵀ A_i B`.
pub fn restricted_generators(action: &GroupAction, indices: &[usize], basis: &Mat) -> Vec<Mat> {
    indices
        .iter()
        .map(|&i| basis.transpose() * &action.generators[i] * basis)
        .collect()
}

/// Recognized cases: transitive action on the sphere (bound 1) and a circle
/// acting with nonzero weights on `ℝ^{2k}` (weighted projective space, bound `k`).
pub fn category_bound(
    v0_dim: usize,
    group_xi: GroupXi,
    restricted: &[Mat],
    rel_tol: f64,
    seed: u64,
) -> CategoryBound {
    if v0_dim == 0 {
        return CategoryBound::Unknown;
    }
    let orbit = orbit_dimension(restricted, v0_dim, rel_tol, seed);
    if orbit + 1 == v0_dim {
        return CategoryBound::Known {
            bound: 1,
            reason: "transitive on the sphere".into(),
        };
    }
    if group_xi.dim == 1 && group_xi.rank == 1 && restricted.len() == 1 && v0_dim.is_multiple_of(2)
    {
        let c = &restricted[0];
        // eigenvalues of an antisymmetric C are ±i·w; w² are the eigenvalues of −C²
        let w2 = linalg::sorted_symmetric_eigenvalues(&(-(c * c)));
        let scale = w2.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if scale > 0.0 && w2.iter().all(|&x| x > rel_tol * scale) {
            return CategoryBound::Known {
                bound: v0_dim / 2,
                reason: "circle with nonzero weights, weighted projective space".into(),
            };
        }
    }
    CategoryBound::Unknown
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseBottVerdict {
    MorseBott,
    Degenerate,
    TransitiveAutoPass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
    /// Rank of the group-orbit tangent at the representative.
    pub orbit_rank: usize,
    /// Distance of the orbit tangent from the eigenspace.
    pub leak: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseBottCheck {
    pub beta: Vec<f64>,
    pub verdict: MorseBottVerdict,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<EigenCluster>,
    /// `Q_abs`-normalized generalized eigenvectors in kernel coordinates, columns.
    pub vectors: Mat,
    /// Column ranges of `vectors` per cluster.
    pub cluster_ranges: Vec<(usize, usize)>,
    pub note: Option<String>,
}

/// Sign-corrected `Q`, positive definite whenever `Q` is definite.
pub fn q_abs(root: &VelocityRoot) -> Mat {
    &root.q * root.definiteness.sign()
}

/// Generalized spectrum of `(Bᵀ S_β B, |Q|)` and its comparison with the orbit structure.
pub fn morse_bott_check(model: &Model, root: &VelocityRoot, beta: &[f64]) -> MorseBottCheck {
    let tol = model.tol();
    let b = &root.kernel_basis;
    let l = root.kernel_dim;
    let sb = linalg::symmetrize(&(b.transpose() * model.s_xi(beta) * b));
    let qa = q_abs(root);
    let restricted =
        restricted_generators(&model.action, &(0..model.dim_g()).collect::<Vec<_>>(), b);
    let orbit = orbit_dimension(&restricted, l, tol.orbit_rank, model.options().seed);
    let (vals, vecs) = match linalg::generalized_symmetric_eigen(&sb, &qa) {
        Some(x) => x,
        None => {
            return MorseBottCheck {
                beta: beta.to_vec(),
                verdict: MorseBottVerdict::Degenerate,
                eigenvalues: Vec::new(),
                clusters: Vec::new(),
                vectors: Mat::zeros(l, 0),
                cluster_ranges: Vec::new(),
                note: Some("Q is not definite".into()),
            }
        }
    };
    let spread = vals.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=l {
        if i == l || vals[i] - vals[i - 1] > tol.cluster * spread.max(f64::MIN_POSITIVE) {
            ranges.push((start, i));
            start = i;
        }
    }
    let clusters: Vec<EigenCluster> = ranges
        .iter()
        .map(|&(a, e)| {
            let u0: Vector = vecs.column(a).into_owned();
            let space = vecs.columns(a, e - a).into_owned();
            // |Q|-orthogonal projector onto the eigenspace
            let proj = &space * space.transpose() * &qa;
            let tangent: Vec<Vector> = restricted.iter().map(|c| c * &u0).collect();
            let leak = tangent
                .iter()
                .map(|t| (t - &proj * t).norm())
                .fold(0.0, f64::max);
            EigenCluster {
                value: vals[a],
                multiplicity: e - a,
                orbit_rank: orbit_tangent_rank(&restricted, &u0, tol.orbit_rank),
                leak,
            }
        })
        .collect();
    let (verdict, note) = if l > 0 && orbit + 1 == l {
        (MorseBottVerdict::TransitiveAutoPass, None)
    } else if ranges.len() == 1 {
        (
            MorseBottVerdict::Degenerate,
            Some("restricted form is a multiple of Q, so j is constant on the sphere".into()),
        )
    } else {
        let ok = clusters
            .iter()
            .all(|c| c.orbit_rank + 1 == c.multiplicity && c.leak <= 1e-8 * (1.0 + spread));
        if ok {
            (MorseBottVerdict::MorseBott, None)
        } else {
            (
                MorseBottVerdict::Degenerate,
                Some("critical set larger than the group orbits".into()),
            )
        }
    };
    MorseBottCheck {
        beta: beta.to_vec(),
        verdict,
        eigenvalues: vals.iter().copied().collect(),
        clusters,
        vectors: vecs,
        cluster_ranges: ranges,
        note,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub bartsch: BartschBound,
    pub category: CategoryBound,
    pub fixed_dim: usize,
    pub morse_bott: Vec<MorseBottCheck>,
    pub group_xi: GroupXi,
    /// Best applicable bound, at least 1.
    pub lower_bound: usize,
}

impl CountReport {
    pub fn morse_bott_ok(&self) -> bool {
        self.morse_bott.iter().any(|m| {
            matches!(
                m.verdict,
                MorseBottVerdict::MorseBott | MorseBottVerdict::TransitiveAutoPass
            )
        })
    }
}

/// Counts for `span(basis)`: fixed subspace, Bartsch and category bounds.
pub fn span_bounds(model: &Model, basis: &Mat) -> (usize, BartschBound, CategoryBound) {
    let tol = model.tol();
    let l = basis.ncols();
    let torus = model.action.torus.clone();
    let fixed = fixed_subspace(&model.action, &torus, basis).ncols();
    let g = model.group_xi;
    let bartsch = bartsch_bound(l, g.dim, g.rank, fixed);
    let restricted = restricted_generators(
        &model.action,
        &(0..model.dim_g()).collect::<Vec<_>>(),
        basis,
    );
    let category = category_bound(l, g, &restricted, tol.orbit_rank, model.options().seed);
    (fixed, bartsch, category)
}

pub fn counts(model: &Model, root: &VelocityRoot) -> CountReport {
    let (fixed_dim, bartsch, category) = span_bounds(model, &root.kernel_basis);
    let morse_bott = (0..model.dim_g())
        .map(|i| {
            let mut beta = vec![0.0; model.dim_g()];
            beta[i] = 1.0;
            morse_bott_check(model, root, &beta)
        })
        .collect();
    let lower_bound = bartsch.bound().unwrap_or(0).max(category.bound()).max(1);
    CountReport {
        bartsch,
        category,
        fixed_dim,
        morse_bott,
        group_xi: model.group_xi,
        lower_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::load_builtin;
    use crate::velocity::{make_root, RootKind};

    #[test]
    fn bartsch_cases() {
        assert_eq!(bartsch_bound(4, 2, 2, 0).bound(), Some(2));
        assert_eq!(bartsch_bound(2, 1, 1, 0).bound(), Some(1));
        assert_eq!(
            bartsch_bound(4, 2, 2, 1),
            BartschBound::Inapplicable { fixed_dim: 1 }
        );
    }

    #[test]
    fn trivial_action_fixes_everything() {
        let action = GroupAction::new(1, true, vec![Mat::zeros(4, 4)], vec![0]);
        let b = Mat::identity(4, 4).columns(0, 3).into_owned();
        assert_eq!(fixed_subspace(&action, &[0], &b).ncols(), 3);
    }

    #[test]
    fn circle_with_equal_weights_on_r4() {
        // rotation of two planes with weight 1: quotient of S³ is ℂP¹
        let mut c = Mat::zeros(4, 4);
        c[(0, 1)] = -1.0;
        c[(1, 0)] = 1.0;
        c[(2, 3)] = -1.0;
        c[(3, 2)] = 1.0;
        let cat = category_bound(4, GroupXi { dim: 1, rank: 1 }, &[c], 1e-8, 0);
        assert_eq!(cat.bound(), 2);
        assert!(matches!(cat, CategoryBound::Known { .. }));
    }

    #[test]
    fn motivating_counts() {
        let m = load_builtin("motivating_s1").unwrap();
        for xi in [2.0, 4.0] {
            let root = make_root(&m, &[xi], RootKind::Isolated).unwrap();
            let c = counts(&m, &root);
            assert_eq!(c.fixed_dim, 0);
            assert_eq!(c.bartsch.bound(), Some(1));
            assert_eq!(c.category.bound(), 1);
            assert_eq!(c.lower_bound, 1);
            assert_eq!(
                c.morse_bott[0].verdict,
                MorseBottVerdict::TransitiveAutoPass
            );
        }
    }
}

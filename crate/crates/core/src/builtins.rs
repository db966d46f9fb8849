//! Built-in example systems.
//!
//! * `motivating_s1`: two oscillators of opposite signature on ℝ⁴ with a
//!   quartic coupling, circle acting by opposite rotations.
//! * `spherical_pendulum`: the pendulum near its lowest point in projected
//!   Cartesian coordinates, with the invariant perturbation `phi·(x²+y²)²`.
//! * `coupled_oscillators`: two charged oscillators in a magnetic field on ℝ⁸
//!   with a two-torus symmetry; `f` multiplies the invariant quartic `π₁²`.

use std::collections::BTreeMap;

use crate::config::{
    mat_to_rows, AnalysisOptions, GroupConfig, HamiltonianConfig, SpaceConfig, SystemConfig,
};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::SymplecticSpace;
use crate::system::Model;

pub const BUILTIN_NAMES: [&str; 3] = ["motivating_s1", "spherical_pendulum", "coupled_oscillators"];

/// Config of a built-in system with default parameters.
pub fn builtin_config(name: &str) -> Result<SystemConfig> {
    match name {
        "motivating_s1" => Ok(motivating_s1()),
        "spherical_pendulum" => Ok(spherical_pendulum()),
        "coupled_oscillators" => Ok(coupled_oscillators()),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// Load a built-in from a spec string such as `"spherical_pendulum m=1 l=1 g=1"`.
pub fn load_builtin(spec: &str) -> Result<Model> {
    let mut words = spec.split_whitespace();
    let name = words
        .next()
        .ok_or_else(|| Error::UnknownBuiltin(String::new()))?;
    let mut config = builtin_config(name)?;
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| Error::ValidationError {
            check: "override".into(),
            detail: format!("`{w}` is not key=value"),
        })?;
        config.set(k, v)?;
    }
    Model::from_config(config)
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn params(list: &[(&str, f64)]) -> BTreeMap<String, f64> {
    list.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Generator `Ω·S` whose momentum form is the symmetric matrix `S`.
fn generator_from_form(omega: &Mat, s: &Mat) -> Vec<Vec<f64>> {
    mat_to_rows(&(omega * s))
}

/// Symmetric form from bilinear terms `c·v_i·v_j`, `i ≠ j`, or `½c·v_i²`.
fn form(n: usize, terms: &[(usize, usize, f64)]) -> Mat {
    let mut s = Mat::zeros(n, n);
    for &(i, j, c) in terms {
        s[(i, j)] += c;
        if i != j {
            s[(j, i)] += c;
        }
    }
    s
}

fn motivating_s1() -> SystemConfig {
    let space = SymplecticSpace::canonical(2);
    let s = form(4, &[(0, 0, 1.0), (1, 1, -1.0), (2, 2, 1.0), (3, 3, -1.0)]);
    SystemConfig {
        name: "motivating_s1".into(),
        space: SpaceConfig {
            dim: 4,
            variables: names(&["q1", "q2", "p1", "p2"]),
            omega: mat_to_rows(space.omega()),
        },
        group: GroupConfig {
            dim: 1,
            rank: 1,
            abelian: true,
            generators: vec![generator_from_form(space.omega(), &s)],
            torus: vec![0],
            xi_dim: None,
            xi_rank: None,
        },
        hamiltonian: HamiltonianConfig {
            expression: "(+ (^ q1 2) (^ p1 2) (* -2 (+ (^ q2 2) (^ p2 2))) \
                         (* (+ (^ q1 2) (^ p1 2)) (+ (^ q2 2) (^ p2 2))))"
                .into(),
            parameters: BTreeMap::new(),
        },
        analysis: AnalysisOptions {
            box_lo: vec![0.0],
            box_hi: vec![6.0],
            grid: 600,
            ..AnalysisOptions::default()
        },
    }
}

fn spherical_pendulum() -> SystemConfig {
    let space = SymplecticSpace::canonical(2);
    // J = x p_y − y p_x in (x, y, p_x, p_y)
    let s = form(4, &[(0, 3, 1.0), (1, 2, -1.0)]);
    SystemConfig {
        name: "spherical_pendulum".into(),
        space: SpaceConfig {
            dim: 4,
            variables: names(&["x", "y", "px", "py"]),
            omega: mat_to_rows(space.omega()),
        },
        group: GroupConfig {
            dim: 1,
            rank: 1,
            abelian: true,
            generators: vec![generator_from_form(space.omega(), &s)],
            torus: vec![0],
            xi_dim: None,
            xi_rank: None,
        },
        hamiltonian: HamiltonianConfig {
            expression: "(+ (/ (+ (^ px 2) (^ py 2)) (* 2 m)) \
                         (- (/ (^ (+ (* x px) (* y py)) 2) (* 2 m (^ l 2)))) \
                         (- (* m g (sqrt (+ (^ l 2) (- (^ x 2)) (- (^ y 2)))))) \
                         (* phi (^ (+ (^ x 2) (^ y 2)) 2)))"
                .into(),
            parameters: params(&[("m", 1.0), ("l", 1.0), ("g", 1.0), ("phi", 0.1)]),
        },
        analysis: AnalysisOptions {
            box_lo: vec![-2.0],
            box_hi: vec![2.0],
            grid: 400,
            ..AnalysisOptions::default()
        },
    }
}

fn coupled_oscillators() -> SystemConfig {
    let space = SymplecticSpace::canonical(4);
    let (q1, q2, q3, q4, p1, p2, p3, p4) = (0, 1, 2, 3, 4, 5, 6, 7);
    // J₁ = p₂q₁ − q₂p₁ − p₃q₄ + p₄q₃,  J₂ = p₃q₁ − q₃p₁ − p₂q₄ + p₄q₂
    let s1 = form(
        8,
        &[(q1, p2, 1.0), (q2, p1, -1.0), (q4, p3, -1.0), (q3, p4, 1.0)],
    );
    let s2 = form(
        8,
        &[(q1, p3, 1.0), (q3, p1, -1.0), (q4, p2, -1.0), (q2, p4, 1.0)],
    );
    SystemConfig {
        name: "coupled_oscillators".into(),
        space: SpaceConfig {
            dim: 8,
            variables: names(&["q1", "q2", "q3", "q4", "p1", "p2", "p3", "p4"]),
            omega: mat_to_rows(space.omega()),
        },
        group: GroupConfig {
            dim: 2,
            rank: 2,
            abelian: true,
            generators: vec![generator_from_form(space.omega(), &s1), generator_from_form(space.omega(), &s2)],
            torus: vec![0, 1],
            xi_dim: None,
            xi_rank: None,
        },
        hamiltonian: HamiltonianConfig {
            expression: "(+ (/ (+ (^ p1 2) (^ p2 2) (^ p3 2) (^ p4 2)) (* 2 m)) \
                         (* (+ (/ (^ gamma 2) (* 2 m)) (/ k 2)) (+ (^ q1 2) (^ q2 2) (^ q3 2) (^ q4 2))) \
                         (* (/ gamma m) (+ (* p1 q2) (- (* p2 q1)) (* p3 q4) (- (* p4 q3)))) \
                         (* f (^ (+ (^ q1 2) (^ q2 2) (^ q3 2) (^ q4 2)) 2)))"
                .into(),
            parameters: params(&[("m", 1.0), ("k", 1.0), ("gamma", 0.5), ("f", 0.0)]),
        },
        analysis: AnalysisOptions {
            box_lo: vec![-3.0, -3.0],
            box_hi: vec![3.0, 3.0],
            grid: 61,
            r_max: 0.05,
            ..AnalysisOptions::default()
        },
    }
}

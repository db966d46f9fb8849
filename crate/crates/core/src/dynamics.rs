//! Implicit-midpoint integration of Hamilton's equations and the flow test
//! `φ_t(v) = exp(t A_ξ) v` for relative equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::system::Model;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    pub energy_drift: f64,
}

const INNER_TOL: f64 = 1e-13;
const INNER_MAX: usize = 100;

fn field(model: &Model, v: &Vector) -> Result<Vector> {
    Ok(model.space.field_map() * model.hamiltonian.gradient(v)?)
}

/// Integrate `steps` implicit midpoint steps of size `dt` (which may be negative).
fn midpoint_steps(model: &Model, v0: &Vector, dt: f64, steps: usize) -> Result<Trajectory> {
    let n = model.dim();
    let fmap = model.space.field_map();
    let e0 = model.hamiltonian.value(v0)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    states.push(v0.clone());
    times.push(0.0);
    let mut drift = 0.0_f64;
    // a quadratic Hamiltonian has a constant Jacobian, factor it once
    let constant_lu = if model.hamiltonian.is_quadratic() {
        Some((Mat::identity(n, n) - fmap * &model.h0 * (0.5 * dt)).lu())
    } else {
        None
    };
    let mut v = v0.clone();
    for k in 0..steps {
        let t = (k + 1) as f64 * dt;
        let fresh;
        let lu = match &constant_lu {
            Some(lu) => lu,
            None => {
                let hess = model.hamiltonian.hessian(&v)?;
                fresh = (Mat::identity(n, n) - fmap * hess * (0.5 * dt)).lu();
                &fresh
            }
        };
        let mut y = &v + field(model, &v)? * dt;
        let mut converged = false;
        let mut last = f64::INFINITY;
        for _ in 0..INNER_MAX {
            let mid = (&v + &y) * 0.5;
            let r = &y - &v - field(model, &mid)? * dt;
            let res = r.amax();
            if res == 0.0 || (res < INNER_TOL && res >= 0.5 * last) {
                converged = true;
                break;
            }
            last = res;
            let delta = lu.solve(&(-r)).ok_or(Error::InnerSolveDiverged { t })?;
            y += &delta;
            if !y.iter().all(|x| x.is_finite()) {
                break;
            }
            if delta.amax() <= 4.0 * f64::EPSILON * y.amax().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::InnerSolveDiverged { t });
        }
        v = y;
        drift = drift.max((model.hamiltonian.value(&v)? - e0).abs());
        states.push(v.clone());
        times.push(t);
    }
    Ok(Trajectory {
        dt,
        times,
        states,
        energy_drift: drift,
    })
}

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::DomainError(format!(
            "need dt > 0 and T >= 0, got dt = {dt}, T = {t_end}"
        )));
    }
    Ok((t_end / dt).round() as usize)
}

pub fn integrate(model: &Model, v0: &Vector, t_end: f64, dt: f64) -> Result<Trajectory> {
    midpoint_steps(model, v0, dt, step_count(t_end, dt)?)
}

/// Integrate back from the final state of `traj` and return the distance to its start.
pub fn reversibility_error(model: &Model, traj: &Trajectory) -> Result<f64> {
    let back = midpoint_steps(
        model,
        traj.states.last().expect("nonempty"),
        -traj.dt,
        traj.states.len() - 1,
    )?;
    Ok((back.states.last().expect("nonempty") - &traj.states[0]).amax())
}

/// States `exp(k·dt·A_ξ) v` for `k = 0..=steps`.
fn group_orbit(model: &Model, v: &Vector, xi: &[f64], dt: f64, steps: usize) -> Vec<Vector> {
    let e = linalg::expm(&(model.action.generator(xi) * dt));
    let mut out = Vec::with_capacity(steps + 1);
    let mut w = v.clone();
    out.push(w.clone());
    for _ in 0..steps {
        w = &e * w;
        out.push(w.clone());
    }
    out
}

/// `max_t ‖φ_t(v) − exp(t A_ξ) v‖` with the raw integrator.
pub fn relative_equilibrium_residual(
    model: &Model,
    v: &Vector,
    xi: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let traj = integrate(model, v, t_end, dt)?;
    let orbit = group_orbit(model, v, xi, dt, traj.states.len() - 1);
    Ok(traj
        .states
        .iter()
        .zip(&orbit)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowCheck {
    /// Residual of the integrator at `dt`.
    pub raw_residual: f64,
    /// Residual of the Richardson combination of runs at `dt` and `dt/2`.
    pub extrapolated_residual: f64,
    pub energy_drift: f64,
    pub noether_residual: f64,
    pub pass: bool,
}

/// Flow test with Richardson extrapolation: implicit midpoint has an error
/// expansion in even powers of `dt`, so `(4 φ_{dt/2} − φ_dt)/3` is fourth order.
pub fn verify_relative_equilibrium(
    model: &Model,
    v: &Vector,
    xi: &[f64],
    t_end: f64,
    dt: f64,
    threshold: f64,
) -> Result<FlowCheck> {
    let steps = step_count(t_end, dt)?;
    let coarse = midpoint_steps(model, v, dt, steps)?;
    let fine = midpoint_steps(model, v, 0.5 * dt, 2 * steps)?;
    let orbit = group_orbit(model, v, xi, dt, steps);
    let mut raw = 0.0_f64;
    let mut extrapolated = 0.0_f64;
    for k in 0..=steps {
        raw = raw.max((&coarse.states[k] - &orbit[k]).norm());
        let x = (&fine.states[2 * k] * 4.0 - &coarse.states[k]) / 3.0;
        extrapolated = extrapolated.max((x - &orbit[k]).norm());
    }
    Ok(FlowCheck {
        raw_residual: raw,
        extrapolated_residual: extrapolated,
        energy_drift: coarse.energy_drift.max(fine.energy_drift),
        noether_residual: noether_residual(model, &fine),
        pass: extrapolated < threshold,
    })
}

/// `max_{t,i} |J^{e_i}(v(t)) − J^{e_i}(v(0))|`.
pub fn noether_residual(model: &Model, traj: &Trajectory) -> f64 {
    let j0 = model.momentum(&traj.states[0]);
    traj.states
        .iter()
        .map(|v| {
            model
                .momentum(v)
                .iter()
                .zip(&j0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

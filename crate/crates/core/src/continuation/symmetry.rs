//! A posteriori symmetry check of a computed orbit against its orbit type:
//! ρ(γ)u(τ + θ) = u(τ), and ρ(γ)u(-τ - θ) = u(τ) for elements with κ.

use serde::{Deserialize, Serialize};

use super::seed::{orbit_type_group, SpaceTimeElement};
use super::shooting::{PeriodicOrbit, ShootingOptions};
use super::system::{sample, Field, PHASE_DIM};
use crate::error::{Error, Result};
use crate::forcefield::ForceFieldParams;
use crate::molecule::{act_flat, rho, DIM};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub orbit_type_id: String,
    pub samples: usize,
    /// max over elements and samples of ‖ρ(γ)u(τ ± θ) - u(τ)‖∞.
    pub max_violation: f64,
    /// max(‖p(0)‖∞, ‖p(T/2)‖∞) when the type contains a reflection in time.
    pub brake_residual: Option<f64>,
}

/// Positions sampled on one period, u(k T / n) for k = 0..n.
pub fn sample_positions(orbit: &PeriodicOrbit, n: usize, params: &ForceFieldParams, opts: &ShootingOptions) -> Result<Vec<Vec<f64>>> {
    let field = Field { params, period: orbit.period, lambda: orbit.multipliers };
    let s: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let states = sample(&field, &orbit.x0.to_flat(), &s, &opts.ode())?;
    Ok(states.into_iter().map(|x| x[..DIM].to_vec()).collect())
}

/// Phase states sampled at k / n of the period.
pub fn sample_states(orbit: &PeriodicOrbit, n: usize, params: &ForceFieldParams, opts: &ShootingOptions) -> Result<Vec<Vec<f64>>> {
    let field = Field { params, period: orbit.period, lambda: orbit.multipliers };
    let s: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    sample(&field, &orbit.x0.to_flat(), &s, &opts.ode())
}

fn element_violation(samples: &[Vec<f64>], e: &SpaceTimeElement, offset: i64, img: &mut [f64]) -> f64 {
    let n = samples.len() as i64;
    let shift = e.shift() * n as f64;
    let k = shift.round() as i64;
    debug_assert!((shift - k as f64).abs() < 1e-9, "sample grid does not contain the shift");
    let r = rho(e.gamma);
    let mut worst: f64 = 0.0;
    for (t, u) in samples.iter().enumerate() {
        let src = if e.reflects() { -(t as i64) - k - offset } else { t as i64 + k };
        act_flat(e.gamma, &r, &samples[src.rem_euclid(n) as usize], img);
        worst = img.iter().zip(u).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    worst
}

/// Largest violation of the relations of `group` on positions sampled at
/// n equally spaced times (shifts must be multiples of 1/n). Conjugating
/// by a time shift δ moves every reflection's shift by 2δ, so reflections
/// are tested with the best common offset. Returns (violation, offset).
pub fn max_violation(samples: &[Vec<f64>], group: &[SpaceTimeElement]) -> (f64, i64) {
    let n = samples.len() as i64;
    let mut img = vec![0.0; DIM];
    let plain = group.iter().filter(|e| !e.reflects()).map(|e| element_violation(samples, e, 0, &mut img)).fold(0.0, f64::max);
    let refl: Vec<&SpaceTimeElement> = group.iter().filter(|e| e.reflects()).collect();
    if refl.is_empty() {
        return (plain, 0);
    }
    let (best, off) = (0..n)
        .map(|c| {
            let v = refl.iter().map(|e| element_violation(samples, e, c, &mut img)).fold(0.0, f64::max);
            (v, c)
        })
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    (plain.max(best), off)
}

/// Checks the orbit against `id` (default: its own orbit type) with
/// `samples` points per period. `SymmetryViolation` above `tol`.
pub fn verify_symmetry(
    orbit: &PeriodicOrbit,
    id: Option<&str>,
    samples: usize,
    tol: f64,
    params: &ForceFieldParams,
    opts: &ShootingOptions,
) -> Result<SymmetryReport> {
    let id = id.unwrap_or(&orbit.orbit_type_id);
    let group = orbit_type_group(id)?;
    let states = sample_states(orbit, samples, params, opts)?;
    let pos: Vec<Vec<f64>> = states.iter().map(|x| x[..DIM].to_vec()).collect();
    let (worst, offset) = max_violation(&pos, &group);
    // a pure time reflection u(τ) = u(-τ - θ) makes p vanish at τ = -θ/2 and
    // half a period later
    let brake = group.iter().find(|e| e.reflects() && e.gamma.index() == 0).and_then(|e| {
        let m = (e.shift() * samples as f64).round() as i64 + offset;
        if m % 2 != 0 || !samples.is_multiple_of(2) {
            return None;
        }
        let t0 = (-m / 2).rem_euclid(samples as i64) as usize;
        let t1 = (t0 + samples / 2) % samples;
        let pmax = |x: &Vec<f64>| x[DIM..PHASE_DIM].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Some(pmax(&states[t0]).max(pmax(&states[t1])))
    });
    if worst > tol {
        return Err(Error::SymmetryViolation(format!("{id}: max deviation {worst:e} over {samples} samples")));
    }
    Ok(SymmetryReport { orbit_type_id: id.to_string(), samples, max_violation: worst, brake_residual: brake })
}

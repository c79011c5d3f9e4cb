//! The augmented map F(x, λ, T) = (x - φ_1(x), A_j(x̃)·(x - x̃)), chord Newton
//! with an anchoring hyperplane, and pseudo-arclength continuation.

use nalgebra::{DMatrix, DVector, LU};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ode::OdeOptions;
use super::seed::Seed;
use super::system::{conserved_quantities, flow_time_one, generators, hamiltonian, PhaseState, N_MULT, PHASE_DIM};
use crate::error::{Error, Result};
use crate::forcefield::ForceFieldParams;
use crate::molecule::DIM;

/// Unknowns (x, λ_1..λ_7, T).
pub const N_UNKNOWNS: usize = PHASE_DIM + N_MULT + 1;
/// Shooting residuals and section constraints.
pub const N_EQUATIONS: usize = PHASE_DIM + N_MULT;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ShootingOptions {
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Forward-difference step for Jacobian columns.
    pub fd_step: f64,
    /// Converged once ‖F‖₂ falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Recompute the Jacobian when one chord step shrinks the residual by
    /// less than this factor.
    pub refresh_ratio: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions { ode_rtol: 1e-12, ode_atol: 1e-12, fd_step: 1e-7, tol: 1e-11, max_iter: 50, refresh_ratio: 0.25 }
    }
}

impl ShootingOptions {
    pub fn ode(&self) -> OdeOptions {
        OdeOptions { rtol: self.ode_rtol, atol: self.ode_atol, ..OdeOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub x0: PhaseState,
    pub period: f64,
    pub multipliers: [f64; N_MULT],
    pub residual: f64,
    pub orbit_type_id: String,
    /// ‖q(0) - q_eq‖₂ (Å).
    pub amplitude: f64,
    pub energy: f64,
    pub iterations: usize,
}

impl PeriodicOrbit {
    pub fn unknowns(&self) -> DVector<f64> {
        pack(&self.x0.to_flat(), &self.multipliers, self.period)
    }
}

pub fn pack(x: &[f64], lambda: &[f64; N_MULT], period: f64) -> DVector<f64> {
    let mut y = DVector::zeros(N_UNKNOWNS);
    y.rows_mut(0, PHASE_DIM).copy_from_slice(x);
    y.rows_mut(PHASE_DIM, N_MULT).copy_from_slice(lambda);
    y[N_UNKNOWNS - 1] = period;
    y
}

fn unpack(y: &DVector<f64>) -> (&[f64], [f64; N_MULT], f64) {
    let s = y.as_slice();
    let mut l = [0.0; N_MULT];
    l.copy_from_slice(&s[PHASE_DIM..PHASE_DIM + N_MULT]);
    (&s[..PHASE_DIM], l, s[N_UNKNOWNS - 1])
}

/// The section normals A_j(x̃) as rows.
pub fn section_rows(x_ref: &[f64], params: &ForceFieldParams) -> Result<[Vec<f64>; N_MULT]> {
    generators(x_ref, params)
}

/// F(x, λ, T) with reference point x̃ = `x_ref`.
pub fn augmented_residual(
    x: &[f64],
    lambda: &[f64; N_MULT],
    period: f64,
    x_ref: &[f64],
    params: &ForceFieldParams,
    opts: &ShootingOptions,
) -> Result<DVector<f64>> {
    let rows = section_rows(x_ref, params)?;
    residual_with(x, lambda, period, x_ref, &rows, params, opts)
}

fn residual_with(
    x: &[f64],
    lambda: &[f64; N_MULT],
    period: f64,
    x_ref: &[f64],
    rows: &[Vec<f64>; N_MULT],
    params: &ForceFieldParams,
    opts: &ShootingOptions,
) -> Result<DVector<f64>> {
    let phi = flow_time_one(x, period, lambda, params, &opts.ode())?;
    let mut f = DVector::zeros(N_EQUATIONS);
    for i in 0..PHASE_DIM {
        f[i] = x[i] - phi[i];
    }
    for (j, a) in rows.iter().enumerate() {
        f[PHASE_DIM + j] = a.iter().zip(x.iter().zip(x_ref)).map(|(ai, (xi, ri))| ai * (xi - ri)).sum();
    }
    Ok(f)
}

/// DF by forward differences of the flow; the section rows are exact.
/// Columns are integrated in parallel on the current rayon pool.
pub fn jacobian(y: &DVector<f64>, x_ref: &[f64], params: &ForceFieldParams, opts: &ShootingOptions) -> Result<DMatrix<f64>> {
    let (x, lambda, period) = unpack(y);
    let ode = opts.ode();
    let phi0 = flow_time_one(x, period, &lambda, params, &ode)?;
    let rows = section_rows(x_ref, params)?;
    let cols: Vec<Vec<f64>> = (0..N_UNKNOWNS)
        .into_par_iter()
        .map(|c| {
            let h = opts.fd_step * (1.0 + y[c].abs());
            let phi = if c < PHASE_DIM {
                let mut xp = x.to_vec();
                xp[c] += h;
                flow_time_one(&xp, period, &lambda, params, &ode)?
            } else if c < PHASE_DIM + N_MULT {
                let mut l = lambda;
                l[c - PHASE_DIM] += h;
                flow_time_one(x, period, &l, params, &ode)?
            } else {
                flow_time_one(x, period + h, &lambda, params, &ode)?
            };
            Ok(phi.iter().zip(&phi0).map(|(a, b)| -(a - b) / h).collect())
        })
        .collect::<Result<_>>()?;
    let mut jac = DMatrix::zeros(N_EQUATIONS, N_UNKNOWNS);
    for (c, col) in cols.iter().enumerate() {
        jac.view_mut((0, c), (PHASE_DIM, 1)).copy_from_slice(col);
        if c < PHASE_DIM {
            jac[(c, c)] += 1.0;
        }
    }
    for (j, a) in rows.iter().enumerate() {
        for (i, v) in a.iter().enumerate() {
            jac[(PHASE_DIM + j, i)] = *v;
        }
    }
    Ok(jac)
}

/// Unit vector spanning the kernel of a full-rank 367 x 368 Jacobian.
pub fn kernel_direction(jac: &DMatrix<f64>) -> Result<DVector<f64>> {
    // the orthogonal complement of range(Jᵀ), from the thin QR of Jᵀ
    let qr = jac.transpose().qr();
    let (q, r) = (qr.q(), qr.r());
    let scale = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() < 1e-12 * scale) {
        return Err(Error::SingularJacobian);
    }
    // (I - QQᵀ)e_k is the kernel vector scaled by v_k, largest where row k of Q is shortest
    let k = (0..N_UNKNOWNS)
        .map(|k| (k, q.row(k).norm_squared()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
        .0;
    let mut e = DVector::zeros(N_UNKNOWNS);
    e[k] = 1.0;
    let v = &e - &q * (q.transpose() * &e);
    if v.norm() < 1e-8 {
        return Err(Error::SingularJacobian);
    }
    // one more pass for orthogonality
    let v = &v - &q * (q.transpose() * &v);
    Ok(v.normalize())
}

/// Newton state shared between corrections along a branch.
#[derive(Clone, Debug, Default)]
pub struct ChordState {
    /// DF at `at`, reused until convergence degrades.
    pub jac: Option<DMatrix<f64>>,
    pub evaluations: usize,
    pub jacobians: usize,
}

/// Solve F(y) = 0, ⟨v, y - y_a⟩ = 0 from `y` with section reference `x_ref`.
pub fn correct(
    mut y: DVector<f64>,
    x_ref: &[f64],
    anchor: (&DVector<f64>, &DVector<f64>),
    params: &ForceFieldParams,
    opts: &ShootingOptions,
    chord: &mut ChordState,
) -> Result<(DVector<f64>, f64, usize)> {
    let rows = section_rows(x_ref, params)?;
    let (v, ya) = anchor;
    let g = |y: &DVector<f64>, chord: &mut ChordState| -> Result<DVector<f64>> {
        let (x, l, t) = unpack(y);
        chord.evaluations += 1;
        let f = residual_with(x, &l, t, x_ref, &rows, params, opts)?;
        let mut out = DVector::zeros(N_UNKNOWNS);
        out.rows_mut(0, N_EQUATIONS).copy_from(&f);
        out[N_EQUATIONS] = v.dot(&(y - ya));
        Ok(out)
    };
    let mut r = g(&y, chord)?;
    let mut norm = r.norm();
    let mut lu: Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>> = None;
    let mut fresh = false;
    let mut iters = 0;
    while norm >= opts.tol {
        if iters >= opts.max_iter {
            return Err(Error::NoConvergence { what: "shooting Newton", iters, residual: norm });
        }
        if chord.jac.is_none() {
            chord.jac = Some(jacobian(&y, x_ref, params, opts)?);
            chord.jacobians += 1;
            lu = None;
            fresh = true;
        }
        if lu.is_none() {
            let jac = chord.jac.as_ref().expect("jacobian");
            let mut m = DMatrix::zeros(N_UNKNOWNS, N_UNKNOWNS);
            m.rows_mut(0, N_EQUATIONS).copy_from(jac);
            m.row_mut(N_EQUATIONS).copy_from(&v.transpose());
            lu = Some(m.lu());
        }
        let step = lu.as_ref().expect("lu").solve(&r).ok_or(Error::SingularJacobian)?;
        let trial = &y - &step;
        let rt = match g(&trial, chord) {
            Ok(rt) => rt,
            Err(e) if fresh => return Err(e),
            Err(_) => {
                chord.jac = None;
                continue;
            }
        };
        let nt = rt.norm();
        iters += 1;
        if nt > opts.refresh_ratio * norm {
            if fresh && nt >= norm {
                return Err(Error::NoConvergence { what: "shooting Newton", iters, residual: nt });
            }
            if !fresh {
                // stale Jacobian: retry from the same point with a new one
                chord.jac = None;
                if nt >= norm {
                    continue;
                }
            }
        }
        if nt < norm || fresh {
            y = trial;
            r = rt;
            norm = nt;
        }
        fresh = false;
    }
    Ok((y, norm, iters))
}

fn orbit_from(y: &DVector<f64>, residual: f64, iterations: usize, id: &str, q_eq: &[f64], params: &ForceFieldParams) -> Result<PeriodicOrbit> {
    let (x, lambda, period) = unpack(y);
    let amplitude = x[..DIM].iter().zip(q_eq).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(PeriodicOrbit {
        x0: PhaseState::from_flat(x),
        period,
        multipliers: lambda,
        residual,
        orbit_type_id: id.to_string(),
        amplitude,
        energy: hamiltonian(x, params)?,
        iterations,
    })
}

/// Newton from a seed, the amplitude held by the hyperplane through the
/// seed normal to its displacement direction.
pub fn newton_correct(seed: &Seed, q_eq: &[f64], params: &ForceFieldParams, opts: &ShootingOptions) -> Result<PeriodicOrbit> {
    let x = seed.x.to_flat();
    let y0 = pack(&x, &seed.multipliers, seed.period);
    let mut v = DVector::zeros(N_UNKNOWNS);
    v.rows_mut(0, PHASE_DIM).copy_from_slice(&seed.direction);
    let mut chord = ChordState::default();
    let (y, res, iters) = correct(y0.clone(), &x, (&v, &y0), params, opts, &mut chord)?;
    orbit_from(&y, res, iters, &seed.orbit_type_id, q_eq, params)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitBranch {
    pub mode_index: usize,
    pub orbit_type_id: String,
    pub equilibrium: Vec<f64>,
    pub points: Vec<PeriodicOrbit>,
    /// Arclength step actually taken before each point after the first.
    pub steps: Vec<f64>,
    /// Indices where the period passes through an extremum.
    pub turning_points: Vec<usize>,
    pub jacobians: usize,
}

impl OrbitBranch {
    pub fn new(mode_index: usize, equilibrium: Vec<f64>, first: PeriodicOrbit) -> OrbitBranch {
        OrbitBranch {
            mode_index,
            orbit_type_id: first.orbit_type_id.clone(),
            equilibrium,
            points: vec![first],
            steps: Vec::new(),
            turning_points: Vec::new(),
            jacobians: 0,
        }
    }
}

/// Pseudo-arclength continuation: secant predictor (the scaled phase-space
/// displacement for the first step), corrector on the hyperplane through
/// the prediction, ds halved on failure. Negative ds runs towards the
/// equilibrium.
pub fn arclength_continue(
    branch: &mut OrbitBranch,
    n_steps: usize,
    ds: f64,
    params: &ForceFieldParams,
    opts: &ShootingOptions,
) -> Result<()> {
    const MAX_HALVINGS: usize = 8;
    let mut chord = ChordState::default();
    for _ in 0..n_steps {
        let last = branch.points.last().expect("nonempty branch");
        let y_last = last.unknowns();
        let x_ref = last.x0.to_flat();
        let tangent = if branch.points.len() >= 2 {
            let prev = branch.points[branch.points.len() - 2].unknowns();
            (&y_last - &prev).normalize()
        } else {
            // the FD kernel of DF is unreliable here: near the equilibrium the
            // other resonant orbits of the eigenspace give singular values of
            // the size of the difference noise. Scaling the displacement is
            // the linear predictor instead.
            let mut t = DVector::zeros(N_UNKNOWNS);
            for i in 0..PHASE_DIM {
                t[i] = x_ref[i] - if i < DIM { branch.equilibrium[i] } else { 0.0 };
            }
            t.normalize()
        };
        let mut h = ds;
        let mut halvings = 0;
        let (y, res, iters) = loop {
            let pred = &y_last + &tangent * h;
            match correct(pred.clone(), &x_ref, (&tangent, &pred), params, opts, &mut chord) {
                Ok(out) => break out,
                Err(Error::NoConvergence { .. } | Error::SingularJacobian | Error::StepSizeUnderflow { .. } | Error::DegenerateGeometry { .. }) => {
                    halvings += 1;
                    chord.jac = None;
                    if halvings > MAX_HALVINGS {
                        return Err(Error::StepFailure { halvings: MAX_HALVINGS });
                    }
                    h /= 2.0;
                }
                Err(e) => return Err(e),
            }
        };
        let orbit = orbit_from(&y, res, iters, &branch.orbit_type_id, &branch.equilibrium, params)?;
        branch.points.push(orbit);
        branch.steps.push(h);
        let n = branch.points.len();
        if n >= 3 {
            let t = |k: usize| branch.points[k].period;
            if (t(n - 1) - t(n - 2)) * (t(n - 2) - t(n - 3)) < 0.0 {
                branch.turning_points.push(n - 2);
            }
        }
    }
    branch.jacobians += chord.jacobians;
    Ok(())
}

/// Largest deviation of energy (relative) and of the momenta G_1..G_6
/// (absolute) along sampled states.
pub fn conservation_drift(states: &[Vec<f64>], params: &ForceFieldParams) -> Result<(f64, f64)> {
    let g0 = conserved_quantities(&states[0], params)?;
    let mut de: f64 = 0.0;
    let mut dg: f64 = 0.0;
    for s in states {
        let g = conserved_quantities(s, params)?;
        de = de.max((g[6] - g0[6]).abs() / g0[6].abs().max(1e-300));
        for j in 0..6 {
            dg = dg.max((g[j] - g0[j]).abs());
        }
    }
    Ok((de, dg))
}

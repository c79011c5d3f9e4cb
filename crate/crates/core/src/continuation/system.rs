//! Hamiltonian H = |p|²/2 + V(q), the seven symmetry generators, the
//! rescaled augmented field T J∇H + Σ λ_j J A_j and its time-one map.
//! J(a, b) = (b, -a), so q̇ = p and ṗ = -∇V.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::ode::{integrate, OdeOptions, OdeStats};
use crate::error::Result;
use crate::forcefield::{energy_flat, gradient_flat_into, ForceFieldParams};
use crate::molecule::{rotation_generator, DIM, N_ATOMS};

pub const PHASE_DIM: usize = 2 * DIM;
pub const N_MULT: usize = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn from_flat(x: &[f64]) -> PhaseState {
        assert_eq!(x.len(), PHASE_DIM);
        PhaseState { q: x[..DIM].to_vec(), p: x[DIM..].to_vec() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut x = self.q.clone();
        x.extend_from_slice(&self.p);
        x
    }

    pub fn at_rest(q: &[f64]) -> PhaseState {
        PhaseState { q: q.to_vec(), p: vec![0.0; DIM] }
    }
}

pub fn hamiltonian(x: &[f64], params: &ForceFieldParams) -> Result<f64> {
    let kinetic: f64 = x[DIM..].iter().map(|v| v * v).sum::<f64>() / 2.0;
    Ok(kinetic + energy_flat(&x[..DIM], params)?)
}

/// ∇H = (∇V(q), p).
pub fn hamiltonian_gradient(x: &[f64], params: &ForceFieldParams) -> Result<Vec<f64>> {
    let mut g = vec![0.0; PHASE_DIM];
    gradient_flat_into(&x[..DIM], params, &mut g[..DIM])?;
    g[DIM..].copy_from_slice(&x[DIM..]);
    Ok(g)
}

fn block_apply(m: &Matrix3<f64>, v: &[f64], out: &mut [f64], scale: f64) {
    for a in 0..N_ATOMS {
        let s = &v[3 * a..3 * a + 3];
        for r in 0..3 {
            out[3 * a + r] += scale * (m[(r, 0)] * s[0] + m[(r, 1)] * s[1] + m[(r, 2)] * s[2]);
        }
    }
}

/// A_1..A_3 = (ℰ_j, 0), A_4..A_6 = (𝒥_j q, 𝒥_j p), A_7 = J∇H.
pub fn generators(x: &[f64], params: &ForceFieldParams) -> Result<[Vec<f64>; N_MULT]> {
    let mut out: [Vec<f64>; N_MULT] = std::array::from_fn(|_| vec![0.0; PHASE_DIM]);
    for j in 0..3 {
        for a in 0..N_ATOMS {
            out[j][3 * a + j] = 1.0;
        }
        let jm = rotation_generator(j);
        let (q, p) = out[j + 3].split_at_mut(DIM);
        block_apply(&jm, &x[..DIM], q, 1.0);
        block_apply(&jm, &x[DIM..], p, 1.0);
    }
    let g = hamiltonian_gradient(x, params)?;
    out[6][..DIM].copy_from_slice(&g[DIM..]);
    for i in 0..DIM {
        out[6][DIM + i] = -g[i];
    }
    Ok(out)
}

/// G_j = -p·ℰ_j, G_{j+3} = pᵀ𝒥_j q, G_7 = H.
pub fn conserved_quantities(x: &[f64], params: &ForceFieldParams) -> Result<[f64; N_MULT]> {
    let (q, p) = x.split_at(DIM);
    let mut g = [0.0; N_MULT];
    for j in 0..3 {
        g[j] = -(0..N_ATOMS).map(|a| p[3 * a + j]).sum::<f64>();
        let mut jq = vec![0.0; DIM];
        block_apply(&rotation_generator(j), q, &mut jq, 1.0);
        g[j + 3] = p.iter().zip(&jq).map(|(a, b)| a * b).sum();
    }
    g[6] = hamiltonian(x, params)?;
    Ok(g)
}

/// The augmented vector field with time scale `period`.
#[derive(Clone, Copy, Debug)]
pub struct Field<'a> {
    pub params: &'a ForceFieldParams,
    pub period: f64,
    pub lambda: [f64; N_MULT],
}

impl Field<'_> {
    pub fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let (q, p) = x.split_at(DIM);
        let (dq, dp) = out.split_at_mut(DIM);
        gradient_flat_into(q, self.params, dp)?;
        let t = self.period;
        let l = &self.lambda;
        // J A_7 = -∇H
        for i in 0..DIM {
            let gv = dp[i];
            dq[i] = t * p[i] - l[6] * gv;
            dp[i] = -t * gv - l[6] * p[i];
        }
        for j in 0..3 {
            // J (ℰ_j, 0) = (0, -ℰ_j)
            if l[j] != 0.0 {
                for a in 0..N_ATOMS {
                    dp[3 * a + j] -= l[j];
                }
            }
            // J (𝒥 q, 𝒥 p) = (𝒥 p, -𝒥 q)
            if l[j + 3] != 0.0 {
                let jm = rotation_generator(j);
                block_apply(&jm, p, dq, l[j + 3]);
                block_apply(&jm, q, dp, -l[j + 3]);
            }
        }
        Ok(())
    }
}

/// Flow of the rescaled field from s = 0 to s = `s_end`.
pub fn flow(field: &Field, x: &[f64], s_end: f64, opts: &OdeOptions) -> Result<(Vec<f64>, OdeStats)> {
    let mut y = x.to_vec();
    let mut h = 0.0;
    let stats = integrate(|_, y, dy| field.eval(y, dy), 0.0, s_end, &mut y, &mut h, opts)?;
    Ok((y, stats))
}

/// φ_1(x; λ, T).
pub fn flow_time_one(x: &[f64], period: f64, lambda: &[f64; N_MULT], params: &ForceFieldParams, opts: &OdeOptions) -> Result<Vec<f64>> {
    Ok(flow(&Field { params, period, lambda: *lambda }, x, 1.0, opts)?.0)
}

/// States at the rescaled times `s` (ascending, starting at or after 0).
pub fn sample(field: &Field, x: &[f64], s: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<f64>>> {
    let mut y = x.to_vec();
    let mut h = 0.0;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(s.len());
    for &si in s {
        integrate(|_, y, dy| field.eval(y, dy), t, si, &mut y, &mut h, opts)?;
        t = si;
        out.push(y.clone());
    }
    Ok(out)
}

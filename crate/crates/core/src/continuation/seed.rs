//! Small-amplitude seeds: a linear mode u(τ) = Re(e^{iτ} z), z = a - ib in
//! C ⊗ E(μ_j), projected onto the fixed space of an orbit type. Time shift θ
//! sends z to e^{iθ}z (u(τ) ↦ u(τ+θ)), κ sends z to z̄ (u(τ) ↦ u(-τ)).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::shooting::PeriodicOrbit;
use super::system::{PhaseState, N_MULT, PHASE_DIM};
use crate::degrees::lattice::{o2_lattice, GROUP, N};
use crate::degrees::product::PSub;
use crate::error::{Error, Result};
use crate::molecule::{act_flat, rho, GroupElement, DIM};
use crate::representation::Spectrum;

/// One element (γ, rot(2πr/N) κ^s) of Γ x O(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceTimeElement {
    pub gamma: GroupElement,
    pub r: u32,
    pub s: u32,
}

impl SpaceTimeElement {
    pub fn reflects(&self) -> bool {
        self.s == 1
    }

    /// Time shift as a fraction of the period.
    pub fn shift(&self) -> f64 {
        self.r as f64 / N as f64
    }
}

pub fn group_elements(h: &PSub) -> Vec<SpaceTimeElement> {
    h.elems
        .iter()
        .map(|&x| {
            let (g, d) = GROUP.split(x);
            let p = GROUP.dparts(d);
            SpaceTimeElement { gamma: GroupElement::from_index(g as usize), r: p.r, s: p.s }
        })
        .collect()
}

/// Representative subgroup of an orbit type id.
pub fn orbit_type_group(id: &str) -> Result<Vec<SpaceTimeElement>> {
    let lat = o2_lattice();
    let i = lat.find(id).ok_or_else(|| Error::UnknownOrbitType(id.to_string()))?;
    match &lat.classes[i].group {
        Some(h) => Ok(group_elements(h)),
        None => Err(Error::UnknownOrbitType(format!("{id} has no finite representative"))),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Seed {
    pub j: usize,
    pub orbit_type_id: String,
    pub amplitude: f64,
    pub x: PhaseState,
    pub period: f64,
    pub multipliers: [f64; N_MULT],
    /// Unit displacement direction in phase space; fixes the amplitude
    /// during the first correction.
    pub direction: Vec<f64>,
    /// Complex amplitude (a, b) in eigenvector coordinates.
    pub coefficients: (Vec<f64>, Vec<f64>),
}

/// Averaging projector onto Fix(ℋ) in C ⊗ E, E spanned by the columns of
/// `basis`, in coordinates (a, b).
pub fn fixed_space_projector(basis: &DMatrix<f64>, group: &[SpaceTimeElement]) -> DMatrix<f64> {
    let k = basis.ncols();
    let mut p = DMatrix::zeros(2 * k, 2 * k);
    let mut img = vec![0.0; DIM];
    for e in group {
        let r = rho(e.gamma);
        // spatial block restricted to E
        let mut m = DMatrix::zeros(k, k);
        for c in 0..k {
            act_flat(e.gamma, &r, basis.column(c).as_slice(), &mut img);
            let v = DVector::from_column_slice(&img);
            for rr in 0..k {
                m[(rr, c)] = basis.column(rr).dot(&v);
            }
        }
        let th = 2.0 * std::f64::consts::PI * e.shift();
        let (c, s) = (th.cos(), th.sin());
        // κ^s first: b ↦ -b, then the shift: a' = a c + b s, b' = b c - a s
        let sb = if e.reflects() { -1.0 } else { 1.0 };
        let t = DMatrix::from_row_slice(2, 2, &[c, s * sb, -s, c * sb]);
        for bi in 0..2 {
            for bj in 0..2 {
                let mut blk = p.view_mut((bi * k, bj * k), (k, k));
                blk += &m * t[(bi, bj)];
            }
        }
    }
    p / group.len() as f64
}

/// Seed on mode j with `basis` the orthonormal eigenvectors of μ_j.
pub fn seed_from_basis(
    j: usize,
    mu: f64,
    basis: &DMatrix<f64>,
    equilibrium: &[f64],
    amplitude: f64,
    orbit_type_id: &str,
) -> Result<Seed> {
    let group = orbit_type_group(orbit_type_id)?;
    let p = fixed_space_projector(basis, &group);
    let k = basis.ncols();
    // deterministic pick: the longest column of P
    let (best, norm) = (0..2 * k).map(|c| (c, p.column(c).norm())).fold((0, 0.0), |a, b| if b.1 > a.1 + 1e-12 { b } else { a });
    if norm < 1e-8 {
        return Err(Error::EmptyFixedSpace(orbit_type_id.to_string()));
    }
    let z = p.column(best) / norm;
    let a = z.rows(0, k).into_owned();
    let b = z.rows(k, k).into_owned();
    let omega = mu.sqrt();
    let dq = basis * &a;
    let dp = basis * &b * omega;
    let mut x = PhaseState::at_rest(equilibrium);
    for i in 0..DIM {
        x.q[i] += amplitude * dq[i];
        x.p[i] += amplitude * dp[i];
    }
    let mut direction = vec![0.0; PHASE_DIM];
    direction[..DIM].copy_from_slice(dq.as_slice());
    direction[DIM..].copy_from_slice(dp.as_slice());
    let dn = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    direction.iter_mut().for_each(|v| *v /= dn);
    Ok(Seed {
        j,
        orbit_type_id: orbit_type_id.to_string(),
        amplitude,
        x,
        period: 2.0 * std::f64::consts::PI / omega,
        multipliers: [0.0; N_MULT],
        direction,
        coefficients: (a.as_slice().to_vec(), b.as_slice().to_vec()),
    })
}

/// Seed on mode j (1-based) of a computed spectrum.
pub fn seed_from_mode(spectrum: &Spectrum, j: usize, equilibrium: &[f64], amplitude: f64, orbit_type_id: &str) -> Result<Seed> {
    let m = spectrum.modes.get(j.wrapping_sub(1)).ok_or_else(|| Error::Data(format!("no mode {j}")))?;
    seed_from_basis(j, m.mu, &spectrum.bases[j - 1], equilibrium, amplitude, orbit_type_id)
}

impl Seed {
    /// A converged orbit re-entered as a seed; the direction is its
    /// displacement from the equilibrium.
    pub fn from_orbit(orbit: &PeriodicOrbit, j: usize, equilibrium: &[f64]) -> Seed {
        let mut direction = orbit.x0.to_flat();
        for (d, e) in direction.iter_mut().zip(equilibrium) {
            *d -= e;
        }
        let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        direction.iter_mut().for_each(|v| *v /= n);
        Seed {
            j,
            orbit_type_id: orbit.orbit_type_id.clone(),
            amplitude: orbit.amplitude,
            x: orbit.x0.clone(),
            period: orbit.period,
            multipliers: orbit.multipliers,
            direction,
            coefficients: (Vec::new(), Vec::new()),
        }
    }
}

//! Icosahedrally symmetric configurations from the two parameters (x, z) of
//! the base atom, and minimization of the reduced potential v(x, z).

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcefield::{energy, energy_gradient, ForceFieldParams};
use crate::molecule::{
    double_bond, enumerate_atoms, rho, single_bond, AtomIndex, Configuration, FiveCycle, GroupElement, Perm,
    N_ATOMS,
};

/// Position (x, 0, z) of the base atom ((12345), 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint {
    pub x: f64,
    pub z: f64,
}

/// Closest allowed approach between two atoms of a symmetric orbit (Å).
const MIN_SEPARATION: f64 = 1e-6;

fn base_index() -> AtomIndex {
    AtomIndex::new(FiveCycle::new(GroupElement::b().perm).expect("b is a face"), 1).expect("vertex 1")
}

/// Columns ∂u/∂x and ∂u/∂z of the linear map (x, z) ↦ u(x, z).
fn orbit_basis() -> (Configuration, Configuration) {
    let b = GroupElement::b().perm;
    let mut ux = Configuration::zeros();
    let mut uz = Configuration::zeros();
    for sigma in Perm::alternating_group() {
        let g = GroupElement { perm: sigma, sign: 1 };
        let face = FiveCycle::new(b.conj_by_inverse(sigma)).expect("conjugate of b stays in C4");
        let idx = AtomIndex::new(face, sigma.inverse().apply(0) + 1).expect("vertex");
        let rt = rho(g).transpose();
        ux.pos[idx.flat()] = rt * Vector3::x();
        uz.pos[idx.flat()] = rt * Vector3::z();
    }
    (ux, uz)
}

/// u_{σ⁻¹bσ, σ⁻¹(1)} = ρ(σ)⁻¹ (x, 0, z).
pub fn build_symmetric(xz: ReducedPoint) -> Result<Configuration> {
    if !(xz.z > 0.0) || !xz.x.is_finite() {
        return Err(Error::DomainViolation { x: xz.x, z: xz.z });
    }
    let (ux, uz) = orbit_basis();
    let mut u = Configuration::zeros();
    for k in 0..N_ATOMS {
        u.pos[k] = ux.pos[k] * xz.x + uz.pos[k] * xz.z;
    }
    if !u.is_collision_free(MIN_SEPARATION) {
        return Err(Error::DuplicateOrbitPoint);
    }
    debug_assert!(u.barycenter().norm() < 1e-10);
    debug_assert_eq!(base_index().flat(), 0);
    Ok(u)
}

/// v(x, z) = V(u(x, z)).
pub fn reduced_potential(xz: ReducedPoint, p: &ForceFieldParams) -> Result<f64> {
    energy(&build_symmetric(xz)?, p)
}

/// (∂v/∂x, ∂v/∂z) by the chain rule through the analytic ∇V.
pub fn reduced_gradient(xz: ReducedPoint, p: &ForceFieldParams) -> Result<(f64, [f64; 2])> {
    let u = build_symmetric(xz)?;
    let (e, g) = energy_gradient(&u, p)?;
    let (ux, uz) = orbit_basis();
    let dot = |w: &Configuration| -> f64 {
        w.pos.iter().enumerate().map(|(k, v)| v.x * g[3 * k] + v.y * g[3 * k + 1] + v.z * g[3 * k + 2]).sum()
    };
    Ok((e, [dot(&ux), dot(&uz)]))
}

/// Base atom of the regular truncated icosahedron with all edges `edge`.
pub fn geometric_seed(edge: f64) -> ReducedPoint {
    let x = edge / (2.0 * (std::f64::consts::PI / 5.0).sin());
    // circumradius of the unit-edge truncated icosahedron
    let r = (58.0 + 18.0 * 5f64.sqrt()).sqrt() / 4.0 * edge;
    ReducedPoint { x, z: (r * r - x * x).sqrt() }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondLengths {
    pub d_s: f64,
    pub d_d: f64,
    pub spread_s: f64,
    pub spread_d: f64,
}

fn mean_spread(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let s = v.iter().map(|x| (x - m).abs()).fold(0.0, f64::max);
    (m, s)
}

/// Mean and largest deviation from the mean, over single and double bonds.
pub fn bond_lengths(u: &Configuration) -> BondLengths {
    let mut ls = Vec::with_capacity(60);
    let mut ld = Vec::with_capacity(30);
    for i in enumerate_atoms() {
        ls.push((u.pos[i.flat()] - u.pos[single_bond(i).flat()]).norm());
        let d = double_bond(i);
        if i < d {
            ld.push((u.pos[i.flat()] - u.pos[d.flat()]).norm());
        }
    }
    let (d_s, spread_s) = mean_spread(&ls);
    let (d_d, spread_d) = mean_spread(&ld);
    BondLengths { d_s, d_d, spread_s, spread_d }
}

#[derive(Clone, Copy, Debug)]
pub struct MinimizerOptions {
    /// Stop once ‖∇V‖∞ on the full space is below this (eV/Å).
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        MinimizerOptions { grad_tol: 1e-10, max_iter: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub xz: ReducedPoint,
    pub u: Configuration,
    pub energy: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub bonds: BondLengths,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton on v with a difference Hessian of the chain-rule gradient and
/// backtracking; falls back to steepest descent when that Hessian is not
/// positive definite.
pub fn find_minimizer(p: &ForceFieldParams, seed: ReducedPoint, opts: MinimizerOptions) -> Result<Equilibrium> {
    let mut xz = seed;
    let mut last_res = f64::INFINITY;
    for it in 0..opts.max_iter {
        let u = build_symmetric(xz)?;
        let (e, full_g) = energy_gradient(&u, p)?;
        let gi = inf_norm(&full_g);
        last_res = gi;
        if gi < opts.grad_tol {
            return Ok(polish(xz, u, e, gi, it, p));
        }
        let (_, g) = reduced_gradient(xz, p)?;
        let g = Vector2::new(g[0], g[1]);
        let h = 1e-6;
        let mut hm = Matrix2::zeros();
        for k in 0..2 {
            let mut a = xz;
            let mut b = xz;
            if k == 0 {
                a.x += h;
                b.x -= h;
            } else {
                a.z += h;
                b.z -= h;
            }
            let (_, ga) = reduced_gradient(a, p)?;
            let (_, gb) = reduced_gradient(b, p)?;
            hm[(0, k)] = (ga[0] - gb[0]) / (2.0 * h);
            hm[(1, k)] = (ga[1] - gb[1]) / (2.0 * h);
        }
        let hm = (hm + hm.transpose()) * 0.5;
        let dir = match hm.cholesky() {
            Some(ch) => -ch.solve(&g),
            None => -g,
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = ReducedPoint { x: xz.x + t * dir[0], z: xz.z + t * dir[1] };
            if let Ok(et) = reduced_potential(trial, p) {
                // near the minimum energy differences drown in rounding, so
                // also accept steps that shrink the gradient
                let better_g = reduced_gradient(trial, p).map(|(_, gt)| Vector2::new(gt[0], gt[1]).norm() < g.norm());
                if et < e - 1e-4 * t * g.dot(&dir).abs() || (et <= e + 1e-12 * e.abs() && better_g.unwrap_or(false)) {
                    xz = trial;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence { what: "equilibrium minimizer", iters: opts.max_iter, residual: last_res })
}

fn reduced_newton_step(xz: ReducedPoint, p: &ForceFieldParams) -> Result<ReducedPoint> {
    let (_, g) = reduced_gradient(xz, p)?;
    let h = 1e-6;
    let mut hm = Matrix2::zeros();
    for k in 0..2 {
        let (mut a, mut b) = (xz, xz);
        if k == 0 {
            a.x += h;
            b.x -= h;
        } else {
            a.z += h;
            b.z -= h;
        }
        let (_, ga) = reduced_gradient(a, p)?;
        let (_, gb) = reduced_gradient(b, p)?;
        hm[(0, k)] = (ga[0] - gb[0]) / (2.0 * h);
        hm[(1, k)] = (ga[1] - gb[1]) / (2.0 * h);
    }
    let d = hm.lu().solve(&Vector2::new(g[0], g[1])).ok_or(Error::NoConvergence { what: "equilibrium polish", iters: 0, residual: 0.0 })?;
    Ok(ReducedPoint { x: xz.x - d[0], z: xz.z - d[1] })
}

/// Extra Newton steps past the tolerance while the full gradient keeps
/// shrinking, down to the rounding floor.
fn polish(mut xz: ReducedPoint, mut u: Configuration, mut e: f64, mut gi: f64, mut it: usize, p: &ForceFieldParams) -> Equilibrium {
    for _ in 0..4 {
        let Ok(trial) = reduced_newton_step(xz, p) else { break };
        let Ok(ut) = build_symmetric(trial) else { break };
        let Ok((et, gt)) = energy_gradient(&ut, p) else { break };
        let gt = inf_norm(&gt);
        if gt >= 0.5 * gi {
            break;
        }
        (xz, u, e, gi) = (trial, ut, et, gt);
        it += 1;
    }
    Equilibrium { xz, bonds: bond_lengths(&u), u, energy: e, grad_inf_norm: gi, iterations: it }
}

/// Minimizer from the geometric seed with default options.
pub fn equilibrate(p: &ForceFieldParams) -> Result<Equilibrium> {
    find_minimizer(p, geometric_seed(p.r0), MinimizerOptions::default())
}

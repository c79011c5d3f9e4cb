//! Potential energy of the cage: Morse bond stretching, angle bending and
//! torsion terms attributed to each site, plus an optional Lennard-Jones type
//! pair term. Gradient is assembled by hand (reverse mode per site), the
//! Hessian by central differences of the gradient.

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molecule::{double_bond, single_bond, single_bond_inv, AtomIndex, Configuration, DIM, N_ATOMS};

/// Force field constants. Energies in eV, lengths in Å.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForceFieldParams {
    #[serde(rename = "E0")]
    pub e0: f64,
    pub beta: f64,
    pub r0: f64,
    pub k_theta: f64,
    pub k_phi: f64,
    pub vdw_enabled: bool,
    pub vdw_epsilon: f64,
    pub vdw_sigma: f64,
    /// Normalize the torsion plane normals before taking dot products. Off by
    /// default: plain cross products of unit bond vectors are what reproduce
    /// the reference spectrum.
    pub unit_torsion_normals: bool,
}

impl Default for ForceFieldParams {
    fn default() -> Self {
        ForceFieldParams {
            e0: 6.1322,
            beta: 1.8502,
            r0: 1.4322,
            k_theta: 10.0,
            k_phi: 0.346,
            vdw_enabled: false,
            vdw_epsilon: 0.0115,
            vdw_sigma: 3.4681,
            unit_torsion_normals: false,
        }
    }
}

impl ForceFieldParams {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.e0, self.beta, self.r0, self.k_theta, self.k_phi, self.vdw_epsilon, self.vdw_sigma];
        if vals.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Parse("force field constants must be positive".into()))
        }
    }
}

/// U(x) = E0((1 - e^{-β(x-r0)})² - 1).
pub fn morse(x: f64, p: &ForceFieldParams) -> f64 {
    let e = (-p.beta * (x - p.r0)).exp();
    p.e0 * ((1.0 - e).powi(2) - 1.0)
}

pub fn morse_deriv(x: f64, p: &ForceFieldParams) -> f64 {
    let e = (-p.beta * (x - p.r0)).exp();
    2.0 * p.e0 * p.beta * (1.0 - e) * e
}

/// ½ kθ (cosθ + ½)².
pub fn bend_energy(cos_theta: f64, p: &ForceFieldParams) -> f64 {
    0.5 * p.k_theta * (cos_theta + 0.5).powi(2)
}

/// kφ (1 - cos²φ).
pub fn torsion_energy(cos_phi: f64, p: &ForceFieldParams) -> f64 {
    p.k_phi * (1.0 - cos_phi * cos_phi)
}

/// W(x) = ε((σ/x)¹² - 2(σ/x)⁶).
pub fn vdw_pair(x: f64, p: &ForceFieldParams) -> f64 {
    let s6 = (p.vdw_sigma / x).powi(6);
    p.vdw_epsilon * (s6 * s6 - 2.0 * s6)
}

pub fn vdw_pair_deriv(x: f64, p: &ForceFieldParams) -> f64 {
    let s6 = (p.vdw_sigma / x).powi(6);
    12.0 * p.vdw_epsilon * (s6 - s6 * s6) / x
}

/// Angle data at one site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteAngles {
    /// Bond-angle cosines for the neighbour pairs (S,S⁻¹), (D,S), (D,S⁻¹).
    pub cos_theta: [f64; 3],
    /// The dot products that enter the torsion energy.
    pub cos_phi: [f64; 3],
    /// Geometric cosines between the two plane normals (always unit normals).
    pub cos_phi_geometric: [f64; 3],
}

const MIN_NORM: f64 = 1e-12;

fn unit(v: Vector3<f64>, site: usize, what: &'static str) -> Result<(Vector3<f64>, f64)> {
    let n = v.norm();
    if n < MIN_NORM {
        return Err(Error::DegenerateGeometry { site, what });
    }
    Ok((v / n, n))
}

/// Backpropagate through e = v/|v|.
#[inline]
fn unit_back(e: &Vector3<f64>, len: f64, g: &Vector3<f64>) -> Vector3<f64> {
    (g - e * e.dot(g)) / len
}

pub fn site_angles(u: &Configuration, i: AtomIndex) -> Result<SiteAngles> {
    let f = i.flat();
    let (s, si, d) = (single_bond(i).flat(), single_bond_inv(i).flat(), double_bond(i).flat());
    let x = &u.pos;
    let (es, _) = unit(x[f] - x[s], f, "single bond")?;
    let (esi, _) = unit(x[f] - x[si], f, "single bond")?;
    let (ed, _) = unit(x[f] - x[d], f, "double bond")?;
    let (a, _) = unit(x[d] - x[s], f, "torsion edge")?;
    let (b, _) = unit(x[d] - x[si], f, "torsion edge")?;
    let n = a.cross(&b);
    let ns = [es.cross(&esi), ed.cross(&esi), ed.cross(&es)];
    let mut cos_phi = [0.0; 3];
    let mut geo = [0.0; 3];
    let (nu, _) = unit(n, f, "torsion normal")?;
    for k in 0..3 {
        cos_phi[k] = n.dot(&ns[k]);
        geo[k] = nu.dot(&unit(ns[k], f, "torsion normal")?.0);
    }
    Ok(SiteAngles { cos_theta: [es.dot(&esi), ed.dot(&es), ed.dot(&esi)], cos_phi, cos_phi_geometric: geo })
}

/// Energy of site `f`; accumulates its gradient into `grad` when given.
fn site_term(x: &[Vector3<f64>], f: usize, p: &ForceFieldParams, grad: Option<&mut [Vector3<f64>]>) -> Result<f64> {
    let i = AtomIndex::from_flat(f);
    let (s, si, d) = (single_bond(i).flat(), single_bond_inv(i).flat(), double_bond(i).flat());
    let (es, ls) = unit(x[f] - x[s], f, "single bond")?;
    let (esi, lsi) = unit(x[f] - x[si], f, "single bond")?;
    let (ed, ld) = unit(x[f] - x[d], f, "double bond")?;
    let (a, la) = unit(x[d] - x[s], f, "torsion edge")?;
    let (b, lb) = unit(x[d] - x[si], f, "torsion edge")?;

    let mut e = morse(ls, p) + 0.5 * morse(ld, p);
    let c = [es.dot(&esi), ed.dot(&es), ed.dot(&esi)];
    for ck in c {
        e += bend_energy(ck, p);
    }

    let n_raw = a.cross(&b);
    let ns_raw = [es.cross(&esi), ed.cross(&esi), ed.cross(&es)];
    let (n, n_len) = if p.unit_torsion_normals { unit(n_raw, f, "torsion normal")? } else { (n_raw, 1.0) };
    let mut ns = ns_raw;
    let mut ns_len = [1.0; 3];
    if p.unit_torsion_normals {
        for k in 0..3 {
            (ns[k], ns_len[k]) = unit(ns_raw[k], f, "torsion normal")?;
        }
    }
    let cp = [n.dot(&ns[0]), n.dot(&ns[1]), n.dot(&ns[2])];
    for cpk in cp {
        e += torsion_energy(cpk, p);
    }

    let Some(g) = grad else { return Ok(e) };

    let gc: Vec<f64> = c.iter().map(|ck| p.k_theta * (ck + 0.5)).collect();
    let gcp: Vec<f64> = cp.iter().map(|v| -2.0 * p.k_phi * v).collect();

    // torsion: n·n_k
    let mut g_n = Vector3::zeros();
    let mut g_nk = [Vector3::zeros(); 3];
    for k in 0..3 {
        g_n += ns[k] * gcp[k];
        g_nk[k] = n * gcp[k];
    }
    if p.unit_torsion_normals {
        g_n = unit_back(&n, n_len, &g_n);
        for k in 0..3 {
            g_nk[k] = unit_back(&ns[k], ns_len[k], &g_nk[k]);
        }
    }
    // n = a × b
    let g_a = b.cross(&g_n);
    let g_b = g_n.cross(&a);

    let mut g_es = esi * gc[0] + ed * gc[1];
    let mut g_esi = es * gc[0] + ed * gc[2];
    let mut g_ed = es * gc[1] + esi * gc[2];
    // n1 = eS × eSi, n2 = eD × eSi, n3 = eD × eS
    g_es += esi.cross(&g_nk[0]);
    g_esi += g_nk[0].cross(&es);
    g_ed += esi.cross(&g_nk[1]);
    g_esi += g_nk[1].cross(&ed);
    g_ed += es.cross(&g_nk[2]);
    g_es += g_nk[2].cross(&ed);

    let mut v_s = unit_back(&es, ls, &g_es);
    let v_si = unit_back(&esi, lsi, &g_esi);
    let mut v_d = unit_back(&ed, ld, &g_ed);
    v_s += es * morse_deriv(ls, p);
    v_d += ed * (0.5 * morse_deriv(ld, p));
    let w_a = unit_back(&a, la, &g_a);
    let w_b = unit_back(&b, lb, &g_b);

    g[f] += v_s + v_si + v_d;
    g[s] -= v_s + w_a;
    g[si] -= v_si + w_b;
    g[d] += w_a + w_b - v_d;
    Ok(e)
}

fn vdw_terms(x: &[Vector3<f64>], p: &ForceFieldParams, mut grad: Option<&mut [Vector3<f64>]>) -> Result<f64> {
    let mut e = 0.0;
    for i in 0..N_ATOMS {
        for j in i + 1..N_ATOMS {
            let (dir, r) = unit(x[i] - x[j], i, "collision")?;
            e += vdw_pair(r, p);
            if let Some(g) = grad.as_deref_mut() {
                let w = dir * vdw_pair_deriv(r, p);
                g[i] += w;
                g[j] -= w;
            }
        }
    }
    Ok(e)
}

/// V(u).
pub fn energy(u: &Configuration, p: &ForceFieldParams) -> Result<f64> {
    let mut e = 0.0;
    for f in 0..N_ATOMS {
        e += site_term(&u.pos, f, p, None)?;
    }
    if p.vdw_enabled {
        e += vdw_terms(&u.pos, p, None)?;
    }
    Ok(e)
}

pub fn energy_flat(x: &[f64], p: &ForceFieldParams) -> Result<f64> {
    energy(&Configuration::from_flat(x), p)
}

/// Energy and ∇V in the shared 180-vector layout.
pub fn energy_gradient(u: &Configuration, p: &ForceFieldParams) -> Result<(f64, Vec<f64>)> {
    let mut g = vec![Vector3::zeros(); N_ATOMS];
    let mut e = 0.0;
    for f in 0..N_ATOMS {
        e += site_term(&u.pos, f, p, Some(&mut g))?;
    }
    if p.vdw_enabled {
        e += vdw_terms(&u.pos, p, Some(&mut g))?;
    }
    Ok((e, g.iter().flat_map(|v| [v.x, v.y, v.z]).collect()))
}

pub fn gradient(u: &Configuration, p: &ForceFieldParams) -> Result<Vec<f64>> {
    Ok(energy_gradient(u, p)?.1)
}

/// Gradient from a flat state vector, written into `out`.
pub fn gradient_flat_into(x: &[f64], p: &ForceFieldParams, out: &mut [f64]) -> Result<()> {
    let pos: Vec<Vector3<f64>> = x.chunks_exact(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect();
    let mut g = vec![Vector3::zeros(); N_ATOMS];
    for f in 0..N_ATOMS {
        site_term(&pos, f, p, Some(&mut g))?;
    }
    if p.vdw_enabled {
        vdw_terms(&pos, p, Some(&mut g))?;
    }
    for (k, v) in g.iter().enumerate() {
        out[3 * k..3 * k + 3].copy_from_slice(v.as_slice());
    }
    Ok(())
}

/// Step used for the finite-difference Hessian (Å).
pub const HESSIAN_STEP: f64 = 1e-5;

/// Central differences of the analytic gradient, symmetrized.
pub fn hessian(u: &Configuration, p: &ForceFieldParams) -> Result<DMatrix<f64>> {
    let x0 = u.to_flat();
    let mut h = DMatrix::zeros(DIM, DIM);
    let mut x = x0.clone();
    let mut gp = vec![0.0; DIM];
    let mut gm = vec![0.0; DIM];
    for k in 0..DIM {
        x[k] = x0[k] + HESSIAN_STEP;
        gradient_flat_into(&x, p, &mut gp)?;
        x[k] = x0[k] - HESSIAN_STEP;
        gradient_flat_into(&x, p, &mut gm)?;
        x[k] = x0[k];
        for r in 0..DIM {
            h[(r, k)] = (gp[r] - gm[r]) / (2.0 * HESSIAN_STEP);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_terms() {
        let p = ForceFieldParams::default();
        assert!((morse(p.r0, &p) + 6.1322).abs() < 1e-14);
        assert!(morse_deriv(p.r0, &p).abs() < 1e-14);
        assert!(morse(1e3, &p).abs() < 1e-12);
        assert_eq!(bend_energy(-0.5, &p), 0.0);
        assert!((bend_energy(1.0, &p) - 11.25).abs() < 1e-12);
        assert!((bend_energy(-1.0, &p) - 1.25).abs() < 1e-12);
        assert_eq!(torsion_energy(1.0, &p), 0.0);
        assert!((torsion_energy(0.0, &p) - 0.346).abs() < 1e-15);
        assert_eq!(torsion_energy(-1.0, &p), 0.0);
        assert!((vdw_pair(p.vdw_sigma, &p) + 0.0115).abs() < 1e-15);
        assert!(vdw_pair_deriv(p.vdw_sigma, &p).abs() < 1e-15);
        assert!(vdw_pair(1e4, &p).abs() < 1e-15);
    }

    #[test]
    fn scalar_derivatives_match_differences() {
        let p = ForceFieldParams::default();
        for x in [1.2, 1.4, 2.0, 3.1, 4.5] {
            let h = 1e-6;
            let fd = (morse(x + h, &p) - morse(x - h, &p)) / (2.0 * h);
            assert!((fd - morse_deriv(x, &p)).abs() < 1e-7);
            let fd = (vdw_pair(x + h, &p) - vdw_pair(x - h, &p)) / (2.0 * h);
            assert!((fd - vdw_pair_deriv(x, &p)).abs() < 1e-7 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn coincident_atoms_are_rejected() {
        let u = Configuration::zeros();
        assert!(matches!(energy(&u, &ForceFieldParams::default()), Err(Error::DegenerateGeometry { .. })));
    }
}

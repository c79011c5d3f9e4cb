//! The local invariant ω at a critical number λ_{j0,1}:
//! ω = Π_{λ_{j,l} < λ_{j0,1}} deg_{V_{n_j,l}} * ((G) - deg_{V_{n_{j0},1}}).
//!
//! For a maximal orbit type H of V_{n_{j0},1} with finite Weyl group, every
//! mark of ω above H vanishes, so its coefficient is the mark at H divided
//! by |W(H)|; marks multiply, and the mark of a basic degree at H is
//! (-1)^{dim V^H}. Types with one-dimensional Weyl group use the identity
//! (H)*(H) = 0 instead.

use serde::{Deserialize, Serialize};

use super::basic::basic_gradient_degree_computed;
use super::element::OrbitTypeElement;
use super::lattice::{fixed_dim_o2, isotropy_types, maximal, o2_lattice, TOP_O2};
use crate::error::{Error, Result};
use crate::representation::{IsotypicalLabel, SpectralMode};

/// One factor deg_{V_{n,l}} of the product below the critical number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub j: usize,
    pub l: u32,
    pub n: IsotypicalLabel,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalTerm {
    pub id: String,
    pub coefficient: i64,
    /// Weyl group finite (Burnside part) or one-dimensional.
    pub finite_weyl: bool,
    /// Real dimension of the fixed subspace of V_{n_{j0},1}.
    pub fixed_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaInvariant {
    pub j0: usize,
    pub lambda: f64,
    pub n: IsotypicalLabel,
    pub factors: Vec<Factor>,
    /// Maximal orbit types of V_{n,1} with nonzero coefficient in ω.
    pub maximal: Vec<MaximalTerm>,
    /// The whole element, available when no factor precedes λ_{j0,1}.
    pub element: Option<OrbitTypeElement>,
}

impl OmegaInvariant {
    pub fn maximal_ids(&self) -> Vec<&str> {
        self.maximal.iter().map(|m| m.id.as_str()).collect()
    }
}

/// Critical numbers λ_{j,l} = l/√μ_j strictly below λ_{j0,1}.
pub fn factors_below(modes: &[SpectralMode], j0: usize) -> Result<Vec<Factor>> {
    let m0 = modes.iter().find(|m| m.j == j0).ok_or_else(|| Error::Data(format!("no mode {j0}")))?;
    let lambda0 = 1.0 / m0.mu.sqrt();
    let mut out = Vec::new();
    for m in modes {
        for l in 1.. {
            let lambda = l as f64 / m.mu.sqrt();
            if lambda >= lambda0 {
                if m.j != j0 && (lambda - lambda0).abs() <= 1e-12 * lambda0 {
                    return Err(Error::ResonanceDetected(format!("λ_{{{},{l}}} = λ_{{{j0},1}}", m.j)));
                }
                break;
            }
            out.push(Factor { j: m.j, l, n: m.label, lambda });
        }
    }
    out.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite"));
    Ok(out)
}

pub fn omega_invariant(modes: &[SpectralMode], j0: usize) -> Result<OmegaInvariant> {
    let m0 = modes.iter().find(|m| m.j == j0).ok_or_else(|| Error::Data(format!("no mode {j0}")))?;
    let n0 = m0.label;
    let factors = factors_below(modes, j0)?;
    let lat = o2_lattice();
    let iso = isotropy_types(lat, |c| fixed_dim_o2(c, n0, 1));
    let top = maximal(lat, &iso);
    let basic = basic_gradient_degree_computed(n0)?;
    let mut terms = Vec::new();
    for h in top {
        let c = &lat.classes[h];
        let d0 = fixed_dim_o2(c, n0, 1);
        let coefficient = if c.phi0() {
            let below: usize = factors.iter().map(|f| fixed_dim_o2(c, f.n, f.l)).sum();
            let mark = (1 - sign(d0)) * sign(below);
            let w = lat.weyl_order(h) as i64;
            if mark % w != 0 {
                return Err(Error::Data(format!("mark {mark} of {} not divisible by |W| = {w}", c.id)));
            }
            mark / w
        } else {
            // P = G + b(H) + ... with b = k a from the k factors equal to
            // deg_{V_{n0,1}}; (G - deg)·P then carries -a - a b (H)*(H) = -a.
            let a = basic.coefficient(&c.id);
            let k = factors.iter().filter(|f| f.l == 1 && f.n == n0).count() as i64;
            let b = k * a;
            let h_squared = 0;
            -a - a * b * h_squared
        };
        if coefficient != 0 {
            terms.push(MaximalTerm { id: c.id.clone(), coefficient, finite_weyl: c.phi0(), fixed_dim: d0 });
        }
    }
    terms.sort_by(|a, b| a.id.cmp(&b.id));
    let element = factors.is_empty().then(|| {
        let mut e = OrbitTypeElement::single(TOP_O2, 1);
        e.add(&basic, -1);
        e
    });
    Ok(OmegaInvariant { j0, lambda: 1.0 / m0.mu.sqrt(), n: n0, factors, maximal: terms, element })
}

fn sign(d: usize) -> i64 {
    if d.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

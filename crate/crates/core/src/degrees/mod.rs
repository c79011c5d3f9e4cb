//! Equivariant degree bookkeeping for Γ x O(2), Γ = A5 x Z2: the subgroup
//! lattice of Γ, orbit types of C ⊗ V_n, basic degrees, the map Ψ into the
//! Γ x S¹ setting and the local invariants ω at the critical numbers.

pub mod basic;
pub mod data;
pub mod element;
pub mod finite;
pub mod gamma;
pub mod lattice;
pub mod omega;
pub mod product;

pub use basic::{
    basic_gradient_degree_computed, brouwer_degree_neg_id, burnside_multiply, fold, fold_id, psi_homomorphism,
    s1_basic_degree,
};
pub use data::{stored_degree, stored_degrees, stored_maximal_types};
pub use element::OrbitTypeElement;
pub use gamma::{lattice as conjugacy_lattice_a5z2, SubgroupFinite};
pub use lattice::{o2_lattice, s1_lattice, TOP_O2, TOP_S1};
pub use omega::{omega_invariant, OmegaInvariant};

use crate::error::Result;
use crate::representation::IsotypicalLabel;

/// Stored gradient basic degree of C ⊗ V_n with O(2) acting through
/// l-folding.
pub fn basic_gradient_degree(n: IsotypicalLabel, l: u32) -> Result<OrbitTypeElement> {
    Ok(fold(&stored_degree(n)?.element, l))
}

/// Number of conjugates of (K) containing a fixed representative of (L).
pub fn n_coefficient(l_id: &str, k_id: &str) -> Result<u64> {
    let lat = o2_lattice();
    Ok(lat.n_coefficient(lat.get(l_id)?, lat.get(k_id)?))
}

/// Real dimension of the fixed subspace of C ⊗ V_n (l-folded) under an
/// O(2)-side orbit type.
pub fn fixed_space_dim(id: &str, n: IsotypicalLabel, l: u32) -> Result<usize> {
    let lat = o2_lattice();
    Ok(lattice::fixed_dim_o2(&lat.classes[lat.get(id)?], n, l))
}

/// Burnside part of an element: terms whose Weyl group is finite.
pub fn pi0(x: &OrbitTypeElement) -> OrbitTypeElement {
    let lat = o2_lattice();
    x.filtered(|id| lat.find(id).is_some_and(|i| lat.classes[i].phi0()))
}

//! Periodic orbits of the Hamiltonian system by shooting: seeds from linear
//! modes in a symmetry fixed space, Newton correction of the augmented map
//! with Poincaré sections, pseudo-arclength continuation and a posteriori
//! symmetry checks.

pub mod ode;
pub mod seed;
pub mod shooting;
pub mod symmetry;
pub mod system;

pub use ode::{OdeOptions, OdeStats};
pub use seed::{fixed_space_projector, orbit_type_group, seed_from_basis, seed_from_mode, Seed, SpaceTimeElement};
pub use shooting::{arclength_continue, augmented_residual, conservation_drift, jacobian, kernel_direction, newton_correct, OrbitBranch, PeriodicOrbit, ShootingOptions};
pub use symmetry::{max_violation, sample_states, verify_symmetry, SymmetryReport};
pub use system::{conserved_quantities, flow_time_one, generators, hamiltonian, Field, PhaseState, N_MULT, PHASE_DIM};

use std::sync::OnceLock;

use c60::continuation::ode::OdeOptions;
use c60::continuation::system::{flow, hamiltonian_gradient};
use c60::continuation::*;
use c60::degrees::{fixed_space_dim, o2_lattice, TOP_O2};
use c60::equilibrium::equilibrate;
use c60::forcefield::{energy_flat, ForceFieldParams};
use c60::molecule::{act_flat, rho, GroupElement, DIM, N_ATOMS};
use c60::representation::{spectrum, Spectrum};
use c60::Error;
use rand::{Rng, SeedableRng};

struct Fixture {
    params: ForceFieldParams,
    u0: Vec<f64>,
    spectrum: Spectrum,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let params = ForceFieldParams::default();
        let eq = equilibrate(&params).unwrap();
        let spectrum = spectrum(&eq.u, &params).unwrap();
        Fixture { params, u0: eq.u.to_flat(), spectrum }
    })
}

const STANDING: &str = "D5^p x D1";

/// The j = 2 orbit at amplitude 0.01, shared by several tests.
fn j2_orbit() -> &'static PeriodicOrbit {
    static O: OnceLock<PeriodicOrbit> = OnceLock::new();
    O.get_or_init(|| {
        let f = fixture();
        let seed = seed_from_mode(&f.spectrum, 2, &f.u0, 0.01, STANDING).unwrap();
        newton_correct(&seed, &f.u0, &f.params, &ShootingOptions::default()).unwrap()
    })
}

fn near_equilibrium_state(seed: u64, scale: f64) -> Vec<f64> {
    let f = fixture();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut x = PhaseState::at_rest(&f.u0).to_flat();
    for v in x.iter_mut() {
        *v += scale * rng.gen_range(-1.0..1.0);
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn hamiltonian_at_rest_is_potential() {
    let f = fixture();
    let x = PhaseState::at_rest(&f.u0).to_flat();
    let v = energy_flat(&f.u0, &f.params).unwrap();
    assert_eq!(hamiltonian(&x, &f.params).unwrap(), v);
}

#[test]
fn hamiltonian_is_invariant() {
    let f = fixture();
    let x = near_equilibrium_state(1, 0.05);
    let h = hamiltonian(&x, &f.params).unwrap();
    let mut gx = vec![0.0; PHASE_DIM];
    for i in [1usize, 17, 64, 119] {
        let g = GroupElement::from_index(i);
        let r = rho(g);
        act_flat(g, &r, &x[..DIM], &mut gx[..DIM]);
        act_flat(g, &r, &x[DIM..], &mut gx[DIM..]);
        let hg = hamiltonian(&gx, &f.params).unwrap();
        assert!((hg - h).abs() < 1e-12 * h.abs().max(1.0), "g {i}: {hg} vs {h}");
    }
}

#[test]
fn translation_generator_is_constant() {
    let f = fixture();
    let a = generators(&near_equilibrium_state(2, 0.1), &f.params).unwrap();
    for (j, aj) in a.iter().take(3).enumerate() {
        for i in 0..PHASE_DIM {
            let expect = if i < DIM && i % 3 == j { 1.0 } else { 0.0 };
            assert_eq!(aj[i], expect);
        }
    }
}

#[test]
fn gradient_is_orthogonal_to_generators() {
    let f = fixture();
    for s in 0..5 {
        let x = near_equilibrium_state(10 + s, 0.05);
        let g = hamiltonian_gradient(&x, &f.params).unwrap();
        let a = generators(&x, &f.params).unwrap();
        let gn = dot(&g, &g).sqrt();
        for (j, aj) in a.iter().enumerate() {
            let an = dot(aj, aj).sqrt();
            let c = dot(&g, aj) / (gn * an);
            assert!(c.abs() < 1e-9, "sample {s}, generator {}: {c:e}", j + 1);
        }
    }
}

#[test]
fn equilibrium_is_a_fixed_point_of_the_flow() {
    let f = fixture();
    let x = PhaseState::at_rest(&f.u0).to_flat();
    let y = flow_time_one(&x, 0.47, &[0.0; N_MULT], &f.params, &OdeOptions::default()).unwrap();
    let d = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d < 1e-12, "{d:e}");
}

#[test]
fn flow_then_reverse_returns() {
    let f = fixture();
    let x = near_equilibrium_state(3, 0.005);
    let opts = OdeOptions::default();
    let field = Field { params: &f.params, period: 0.47, lambda: [0.0; N_MULT] };
    let (y, _) = flow(&field, &x, 1.0, &opts).unwrap();
    let back = Field { period: -0.47, ..field };
    let (z, _) = flow(&back, &y, 1.0, &opts).unwrap();
    let d = x.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d < 1e-9, "{d:e}");
}

#[test]
fn momenta_and_energy_are_conserved() {
    let f = fixture();
    let x = near_equilibrium_state(4, 0.01);
    let field = Field { params: &f.params, period: 0.47, lambda: [0.0; N_MULT] };
    let s: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();
    let states = system::sample(&field, &x, &s, &OdeOptions::default()).unwrap();
    let (de, dg) = conservation_drift(&states, &f.params).unwrap();
    assert!(de < 1e-9, "energy {de:e}");
    assert!(dg < 1e-9, "momenta {dg:e}");
}

#[test]
fn projector_rank_matches_lattice_fixed_dimension() {
    // trace of the averaging projector on computed eigenvectors against the
    // character-based count of the degree module
    let f = fixture();
    let lat = o2_lattice();
    let mut checked = 0;
    for j in [1usize, 2, 3, 4, 5, 8, 9] {
        let label = f.spectrum.modes[j - 1].label;
        for class in lat.classes.iter().filter(|c| c.id != TOP_O2).step_by(7) {
            let group = orbit_type_group(&class.id).unwrap();
            let tr = fixed_space_projector(&f.spectrum.bases[j - 1], &group).trace();
            let dim = fixed_space_dim(&class.id, label, 1).unwrap();
            assert!((tr - dim as f64).abs() < 1e-8, "j {j}, {}: trace {tr} vs {dim}", class.id);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn wrong_orbit_type_has_empty_fixed_space() {
    let f = fixture();
    // mode 1 carries n = -3; the pentagonal standing wave lives in n = 1, 3 only
    assert_eq!(f.spectrum.modes[0].label.n(), -3);
    match seed_from_mode(&f.spectrum, 1, &f.u0, 0.01, STANDING) {
        Err(Error::EmptyFixedSpace(id)) => assert_eq!(id, STANDING),
        other => panic!("expected EmptyFixedSpace, got {other:?}"),
    }
    assert!(matches!(seed_from_mode(&f.spectrum, 2, &f.u0, 0.01, "no such type"), Err(Error::UnknownOrbitType(_))));
}

#[test]
fn seed_period_and_fixed_space() {
    let f = fixture();
    let seed = seed_from_mode(&f.spectrum, 2, &f.u0, 0.01, STANDING).unwrap();
    let expect = 2.0 * std::f64::consts::PI * 0.075300;
    assert!((seed.period - expect).abs() < 1e-3 * expect, "{}", seed.period);
    // κ in the group: the seed starts at rest
    assert!(seed.x.p.iter().all(|v| v.abs() < 1e-14));
    let disp: f64 = seed.x.q.iter().zip(&f.u0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    assert!((disp - 0.01).abs() < 1e-12);
    let group = orbit_type_group(STANDING).unwrap();
    let states = vec![seed.x.q.clone()];
    let spatial: Vec<SpaceTimeElement> = group.into_iter().filter(|e| !e.reflects()).collect();
    // the eigenvectors come from a difference Hessian, so the spatial
    // relations hold to its accuracy rather than to rounding
    let v = max_violation(&states, &spatial).0;
    assert!(v < 1e-8 * 0.01, "{v:e}");
}

#[test]
fn seed_residual_is_quadratic_in_amplitude() {
    let f = fixture();
    let opts = ShootingOptions::default();
    let res: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&a| {
            let s = seed_from_mode(&f.spectrum, 2, &f.u0, a, STANDING).unwrap();
            let x = s.x.to_flat();
            augmented_residual(&x, &s.multipliers, s.period, &x, &f.params, &opts).unwrap().norm()
        })
        .collect();
    for w in res.windows(2) {
        let r = w[0] / w[1];
        assert!((r - 4.0).abs() < 0.2, "{res:?}");
    }
}

#[test]
fn newton_converges_on_the_pentagonal_standing_wave() {
    let f = fixture();
    let o = j2_orbit();
    assert!(o.residual < 1e-10, "{:e}", o.residual);
    assert!(o.multipliers.iter().all(|l| l.abs() < 1e-8), "{:?}", o.multipliers);
    let rep = verify_symmetry(o, None, 120, 1e-6, &f.params, &ShootingOptions::default()).unwrap();
    let brake = rep.brake_residual.expect("κ in the group");
    assert!(brake < 1e-8, "{brake:e}");
}

#[test]
fn converged_orbit_needs_no_iterations() {
    let f = fixture();
    let o = j2_orbit();
    let again = newton_correct(&Seed::from_orbit(o, 2, &f.u0), &f.u0, &f.params, &ShootingOptions::default()).unwrap();
    assert_eq!(again.iterations, 0);
    let x = o.x0.to_flat();
    let r = augmented_residual(&x, &o.multipliers, o.period, &x, &f.params, &ShootingOptions::default()).unwrap();
    assert!(r.norm() < 1e-10);
    assert!(r.rows(PHASE_DIM, N_MULT).iter().all(|v| *v == 0.0));
}

#[test]
fn huge_amplitude_fails() {
    let f = fixture();
    let seed = seed_from_mode(&f.spectrum, 2, &f.u0, 10.0, STANDING).unwrap();
    let opts = ShootingOptions { max_iter: 5, ..ShootingOptions::default() };
    let r = newton_correct(&seed, &f.u0, &f.params, &opts);
    assert!(
        matches!(r, Err(Error::NoConvergence { .. } | Error::StepSizeUnderflow { .. } | Error::DegenerateGeometry { .. } | Error::SingularJacobian)),
        "{r:?}"
    );
}

#[test]
fn period_error_shrinks_fourfold_per_halving() {
    let f = fixture();
    let opts = ShootingOptions::default();
    let t_lin = 2.0 * std::f64::consts::PI / f.spectrum.modes[1].mu.sqrt();
    let errs: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&a| {
            let s = seed_from_mode(&f.spectrum, 2, &f.u0, a, STANDING).unwrap();
            newton_correct(&s, &f.u0, &f.params, &opts).unwrap().period - t_lin
        })
        .collect();
    for w in errs.windows(2) {
        let r = w[0] / w[1];
        assert!((r - 4.0).abs() < 0.1, "{errs:?}");
    }
}

#[test]
fn jacobian_has_full_rank() {
    let f = fixture();
    let o = j2_orbit();
    let jac = jacobian(&o.unknowns(), &o.x0.to_flat(), &f.params, &ShootingOptions::default()).unwrap();
    assert_eq!(jac.shape(), (PHASE_DIM + N_MULT, PHASE_DIM + N_MULT + 1));
    let sv = jac.clone().svd(false, false).singular_values;
    let (lo, hi) = (sv.min(), sv.max());
    assert!(lo > 1e-8 * hi, "{lo:e} / {hi:e}");
    let v = kernel_direction(&jac).unwrap();
    assert!((&jac * &v).norm() < 1e-6);
}

#[test]
fn continuation_grows_amplitude_and_retraces() {
    let f = fixture();
    let opts = ShootingOptions { tol: 1e-12, ode_rtol: 1e-13, ode_atol: 1e-13, ..ShootingOptions::default() };
    let mut branch = OrbitBranch::new(2, f.u0.clone(), j2_orbit().clone());
    arclength_continue(&mut branch, 4, 1e-3, &f.params, &opts).unwrap();
    assert_eq!(branch.points.len(), 5);
    for w in branch.points.windows(2) {
        assert!(w[1].amplitude > w[0].amplitude);
        // hardening: the period grows with the amplitude on this family
        assert!(w[1].period > w[0].period);
        assert_eq!(w[1].orbit_type_id, STANDING);
    }
    let t_lin = 2.0 * std::f64::consts::PI / f.spectrum.modes[1].mu.sqrt();
    let last = branch.points.last().unwrap();
    assert!(last.period - t_lin > 1e-6);
    for o in &branch.points {
        verify_symmetry(o, None, 64, 1e-6, &f.params, &opts).unwrap();
    }

    // back along the secant from the last two points: the new point lies
    // on the branch between the earlier ones
    let n = branch.points.len();
    let (a, b, c) = (branch.points[n - 3].unknowns(), branch.points[n - 2].unknowns(), branch.points[n - 1].unknowns());
    let mut back = OrbitBranch::new(2, f.u0.clone(), branch.points[n - 1].clone());
    back.points.insert(0, branch.points[n - 1].clone());
    back.points[1] = branch.points[n - 2].clone();
    let ds = (&b - &a).norm();
    arclength_continue(&mut back, 1, ds, &f.params, &opts).unwrap();
    let got = back.points.last().unwrap().unknowns();
    let t = (&b - &a).normalize();
    let off = &got - &a;
    let along = off.dot(&t);
    let across = (&off - &t * along).norm();
    eprintln!("retrace: along {along:e}, across {across:e}, step {ds:e}, forward secant gap {:e}", (&c - &b).norm());
    assert!(along.abs() < 1e-2 * ds, "{along:e}");
    assert!(across < 1e-8, "{across:e}");
}

#[test]
fn broken_symmetry_is_reported() {
    let f = fixture();
    let o = j2_orbit();
    let mut bad = o.clone();
    // push one atom off the pentagonal axis arrangement
    bad.x0.q[3 * (N_ATOMS - 1)] += 1e-4;
    match verify_symmetry(&bad, None, 60, 1e-6, &f.params, &ShootingOptions::default()) {
        Err(Error::SymmetryViolation(msg)) => assert!(msg.contains(STANDING)),
        other => panic!("expected SymmetryViolation, got {other:?}"),
    }
    // and a type the orbit does not have
    assert!(matches!(
        verify_symmetry(o, Some("A5^p x D1"), 60, 1e-6, &f.params, &ShootingOptions::default()),
        Err(Error::SymmetryViolation(_))
    ));
}

#[test]
fn triangular_rotating_wave_has_third_period_shifts() {
    let f = fixture();
    let opts = ShootingOptions::default();
    let id = "D3^p ^Z1^p x_D3 D3";
    let seed = seed_from_mode(&f.spectrum, 8, &f.u0, 0.01, id).unwrap();
    let o = newton_correct(&seed, &f.u0, &f.params, &opts).unwrap();
    assert!(o.residual < 1e-10 && o.multipliers.iter().all(|l| l.abs() < 1e-8));
    verify_symmetry(&o, None, 120, 1e-6, &f.params, &opts).unwrap();
    let group = orbit_type_group(id).unwrap();
    let shifts: Vec<f64> = group.iter().filter(|e| !e.reflects()).map(|e| e.shift()).collect();
    assert!(shifts.iter().all(|s| (3.0 * s - (3.0 * s).round()).abs() < 1e-12), "{shifts:?}");
    assert!(shifts.iter().any(|s| (s - 1.0 / 3.0).abs() < 1e-12), "rotations by 2π/3 carry T/3 shifts");
    // not a standing wave: p(0) does not vanish
    assert!(o.x0.p.iter().any(|v| v.abs() > 1e-4));
}

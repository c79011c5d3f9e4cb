use c60::equilibrium::{build_symmetric, equilibrate, geometric_seed};
use c60::forcefield::*;
use c60::molecule::*;
use nalgebra::{Matrix3, Rotation3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn jittered(seed: u64, amp: f64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = build_symmetric(geometric_seed(1.4322)).unwrap();
    for v in u.pos.iter_mut() {
        *v += Vector3::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp), rng.gen_range(-amp..amp));
    }
    u
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn fd_gradient(u: &Configuration, p: &ForceFieldParams, h: f64) -> Vec<f64> {
    let x0 = u.to_flat();
    let mut x = x0.clone();
    (0..DIM)
        .map(|k| {
            x[k] = x0[k] + h;
            let ep = energy_flat(&x, p).unwrap();
            x[k] = x0[k] - h;
            let em = energy_flat(&x, p).unwrap();
            x[k] = x0[k];
            (ep - em) / (2.0 * h)
        })
        .collect()
}

#[test]
fn gradient_matches_central_differences() {
    for (seed, vdw, unit) in (0..20).map(|s| (s, s % 5 == 0, s % 7 == 3)) {
        let p = ForceFieldParams { vdw_enabled: vdw, unit_torsion_normals: unit, ..Default::default() };
        let u = jittered(seed, 0.08);
        let g = gradient(&u, &p).unwrap();
        let fd = fd_gradient(&u, &p, 1e-6);
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let err = max_abs_diff(&g, &fd) / scale;
        assert!(err < 1e-5, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn gradient_orthogonal_to_rotations_and_translations() {
    let p = ForceFieldParams::default();
    for seed in 0..5 {
        let u = jittered(100 + seed, 0.1);
        let g = gradient(&u, &p).unwrap();
        let scale = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        for j in 0..3 {
            let m = rotation_generator(j);
            let dot: f64 = (0..N_ATOMS).map(|a| (m * u.pos[a]).dot(&Vector3::from_column_slice(&g[3 * a..3 * a + 3]))).sum();
            let norm: f64 = u.pos.iter().map(|v| (m * v).norm_squared()).sum::<f64>().sqrt();
            assert!(dot.abs() < 1e-9 * scale * norm, "{dot}");
            let t: f64 = (0..N_ATOMS).map(|a| g[3 * a + j]).sum();
            assert!(t.abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn gradient_is_equivariant() {
    let p = ForceFieldParams::default();
    let u = jittered(5, 0.1);
    let g = gradient(&u, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut elems = vec![GroupElement::a(), GroupElement::b(), GroupElement::minus_one()];
    elems.extend((0..10).map(|_| GroupElement::from_index(rng.gen_range(0..120))));
    for h in elems {
        let r = rho(h);
        let gu = act(h, &r, &u);
        let lhs = gradient(&gu, &p).unwrap();
        let mut rhs = vec![0.0; DIM];
        act_flat(h, &r, &g, &mut rhs);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-9, "{h}");
    }
}

#[test]
fn hessian_matches_gradient_differences_and_commutes() {
    let p = ForceFieldParams::default();
    let eq = equilibrate(&p).unwrap();
    let h = hessian(&eq.u, &p).unwrap();
    assert!((&h - h.transpose()).amax() < 1e-8);

    // independent oracle: second differences of the energy on a few entries
    let x0 = eq.u.to_flat();
    let e = |x: &[f64]| energy_flat(x, &p).unwrap();
    let step = 1e-4;
    for (r, c) in [(0usize, 0usize), (0, 1), (5, 17), (40, 41), (90, 3), (179, 179)] {
        let mut x = x0.clone();
        let mut val = |dr: f64, dc: f64| {
            x.copy_from_slice(&x0);
            x[r] += dr;
            x[c] += dc;
            e(&x)
        };
        let fd = (val(step, step) - val(step, -step) - val(-step, step) + val(-step, -step)) / (4.0 * step * step);
        assert!((fd - h[(r, c)]).abs() < 1e-3 * (1.0 + h[(r, c)].abs()), "({r},{c}) {fd} {}", h[(r, c)]);
    }

    for g in [GroupElement::a(), GroupElement::b(), GroupElement::minus_one()] {
        let m = action_matrix(g);
        let comm = &m * &h - &h * &m;
        assert!(comm.amax() < 1e-7, "{g}: {}", comm.amax());
    }

    let ev = h.symmetric_eigenvalues();
    let zeros = ev.iter().filter(|v| v.abs() < 1e-6).count();
    assert_eq!(zeros, 6);
}

fn action_matrix(g: GroupElement) -> nalgebra::DMatrix<f64> {
    let r = rho(g);
    let mut m = nalgebra::DMatrix::zeros(DIM, DIM);
    for i in enumerate_atoms() {
        let j = g.act_index(i).flat();
        m.view_mut((3 * j, 3 * i.flat()), (3, 3)).copy_from(&r);
    }
    m
}

#[test]
fn vdw_energy_differs_but_stays_invariant() {
    let u = jittered(9, 0.05);
    let p0 = ForceFieldParams::default();
    let p1 = ForceFieldParams { vdw_enabled: true, ..Default::default() };
    let (e0, e1) = (energy(&u, &p0).unwrap(), energy(&u, &p1).unwrap());
    assert!((e0 - e1).abs() > 1e-3);
    let g = GroupElement::from_index(77);
    let e1g = energy(&act_diag(g, &u), &p1).unwrap();
    assert!((e1 - e1g).abs() < 1e-10 * e1.abs());
}

#[test]
fn site_angles_near_equilibrium_and_planar() {
    let p = ForceFieldParams::default();
    let eq = equilibrate(&p).unwrap();
    for i in enumerate_atoms() {
        let a = site_angles(&eq.u, i).unwrap();
        // regular pentagons, equiangular hexagons
        let pent = (0.6 * std::f64::consts::PI).cos();
        assert!((a.cos_theta[0] - pent).abs() < 1e-12, "{:?}", a.cos_theta);
        for c in &a.cos_theta[1..] {
            assert!((c + 0.5).abs() < 1e-12, "{c}");
        }
    }
    // a flattened cage: every atom and its neighbours lie in z = 0
    let mut flat = jittered(2, 0.05);
    for v in flat.pos.iter_mut() {
        v.z = 0.0;
    }
    let a = site_angles(&flat, AtomIndex::from_flat(7)).unwrap();
    for c in a.cos_phi_geometric {
        assert!((c.abs() - 1.0).abs() < 1e-12);
    }
    let unit = ForceFieldParams { unit_torsion_normals: true, ..Default::default() };
    let all_planar_torsion: f64 = a.cos_phi_geometric.iter().map(|c| torsion_energy(*c, &unit)).sum();
    assert!(all_planar_torsion.abs() < 1e-12);
}

#[test]
fn site_angles_equivariant() {
    let u = jittered(21, 0.1);
    for gi in [3, 50, 101] {
        let g = GroupElement::from_index(gi);
        let gu = act_diag(g, &u);
        for i in enumerate_atoms().into_iter().step_by(7) {
            let a = site_angles(&u, i).unwrap();
            let b = site_angles(&gu, g.act_index(i)).unwrap();
            // -1 reverses face orientation, swapping S and S⁻¹
            let perm = if g.sign > 0 { [0, 1, 2] } else { [0, 2, 1] };
            for k in 0..3 {
                assert!((a.cos_theta[k] - b.cos_theta[perm[k]]).abs() < 1e-12);
                assert!((a.cos_phi[k].abs() - b.cos_phi[perm[k]].abs()).abs() < 1e-12);
            }
        }
    }
}

fn rotation_strategy() -> impl Strategy<Value = Matrix3<f64>> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b, c)| *Rotation3::from_euler_angles(a, b, c).matrix())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_invariant_under_group_and_rigid_motions(
        seed in 0u64..1000,
        gi in 0usize..120,
        r in rotation_strategy(),
        t in prop::array::uniform3(-5.0..5.0f64),
    ) {
        let p = ForceFieldParams::default();
        let u = jittered(seed, 0.1);
        let e0 = energy(&u, &p).unwrap();
        let g = GroupElement::from_index(gi);
        let e1 = energy(&act_diag(g, &u), &p).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-10 * e0.abs());
        let moved = Configuration { pos: u.pos.iter().map(|v| r * v + Vector3::from(t)).collect() };
        let e2 = energy(&moved, &p).unwrap();
        prop_assert!((e0 - e2).abs() < 1e-10 * e0.abs());
    }

    #[test]
    fn index_action_composes(gi in 0usize..120, hi in 0usize..120, seed in 0u64..100) {
        let (g, h) = (GroupElement::from_index(gi), GroupElement::from_index(hi));
        let u = jittered(seed, 0.3);
        let id = Matrix3::identity();
        let lhs = act(g, &id, &act(h, &id, &u));
        let rhs = act(g.mul(h), &id, &u);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(act(GroupElement::IDENTITY, &id, &u), u);
    }
}

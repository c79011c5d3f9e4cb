use c60::equilibrium::*;
use c60::forcefield::{energy, gradient, hessian, ForceFieldParams};
use c60::molecule::{rotation_generator, DIM};
use nalgebra::{DMatrix, DVector};

fn eq() -> Equilibrium {
    equilibrate(&ForceFieldParams::default()).expect("minimizer converges")
}

#[test]
fn bond_lengths_at_minimum() {
    let e = eq();
    assert!((e.bonds.d_s - 1.438084).abs() < 1e-5, "{:?}", e.bonds);
    assert!((e.bonds.d_d - 1.420845).abs() < 1e-5, "{:?}", e.bonds);
    assert!(e.bonds.spread_s < 1e-9 && e.bonds.spread_d < 1e-9);
    assert!(e.grad_inf_norm < 1e-8);
}

#[test]
fn reduced_point_is_local_minimum() {
    let p = ForceFieldParams::default();
    let e = eq();
    let (_, g) = reduced_gradient(e.xz, &p).unwrap();
    assert!(g[0].abs() < 1e-9 && g[1].abs() < 1e-9, "{g:?}");
    let v0 = reduced_potential(e.xz, &p).unwrap();
    for (dx, dz) in [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)] {
        let q = ReducedPoint { x: e.xz.x + 1e-3 * dx as f64, z: e.xz.z + 1e-3 * dz as f64 };
        assert!(reduced_potential(q, &p).unwrap() > v0);
    }
}

#[test]
fn seed_independence() {
    let p = ForceFieldParams::default();
    let base = eq().xz;
    let s = geometric_seed(p.r0);
    for (dx, dz) in [(0.03, 0.0), (-0.03, 0.05), (0.02, -0.06), (-0.05, -0.04), (0.05, 0.08)] {
        let r = find_minimizer(&p, ReducedPoint { x: s.x + dx, z: s.z + dz }, MinimizerOptions::default()).unwrap();
        let d = ((r.xz.x - base.x).powi(2) + (r.xz.z - base.z).powi(2)).sqrt();
        assert!(d < 1e-8, "{d}");
    }
}

#[test]
fn rebuild_is_bit_identical() {
    let e = eq();
    assert_eq!(build_symmetric(e.xz).unwrap(), e.u);
}

#[test]
fn perturbations_raise_energy() {
    use rand::{Rng, SeedableRng};
    let p = ForceFieldParams::default();
    let e = eq();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let v0 = energy(&e.u, &p).unwrap();
    for _ in 0..20 {
        let mut x = e.u.to_flat();
        for v in x.iter_mut() {
            *v += rng.gen_range(-1e-3..1e-3);
        }
        let v = energy(&c60::molecule::Configuration::from_flat(&x), &p).unwrap();
        assert!(v > v0);
    }
    assert!(gradient(&e.u, &p).unwrap().iter().all(|g| g.abs() < 1e-8));
}

#[test]
fn slice_hessian_positive_definite() {
    let p = ForceFieldParams::default();
    let e = eq();
    let h = hessian(&e.u, &p).unwrap();
    // complement of translations and infinitesimal rotations
    let x = e.u.to_flat();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for k in 0..3 {
        cols.push(DVector::from_fn(DIM, |r, _| if r % 3 == k { 1.0 } else { 0.0 }));
        let j = rotation_generator(k);
        let mut w = DVector::zeros(DIM);
        for a in 0..60 {
            let v = j * nalgebra::Vector3::new(x[3 * a], x[3 * a + 1], x[3 * a + 2]);
            w.rows_mut(3 * a, 3).copy_from(&v);
        }
        cols.push(w);
    }
    let q = DMatrix::from_columns(&cols).qr().q();
    let proj = DMatrix::identity(DIM, DIM) - &q * q.transpose();
    let hs = &proj * h * &proj;
    let ev = hs.symmetric_eigenvalues();
    let mut v: Vec<f64> = ev.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // six exact zeros from the projection, then the slice spectrum
    assert!(v[5].abs() < 1e-6);
    assert!(v[6] > 1.0, "{}", v[6]);
}

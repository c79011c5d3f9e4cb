use c60::equilibrium::equilibrate;
use c60::forcefield::ForceFieldParams;
use c60::molecule::DIM;
use c60::representation::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

fn random_vec(seed: u64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..DIM).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn projectors_are_complete_orthogonal_idempotents() {
    let ps: Vec<(IsotypicalLabel, DMatrix<f64>)> = IsotypicalLabel::all().into_iter().map(|n| (n, projector(n))).collect();
    let mut sum = DMatrix::zeros(DIM, DIM);
    for (n, p) in &ps {
        assert!((p * p - p).amax() < 1e-10, "{n}");
        sum += p;
        for (m, q) in &ps {
            if m != n {
                assert!((p * q).amax() < 1e-10);
            }
        }
        let v = random_vec(n.n().unsigned_abs() as u64);
        let a = isotypical_projection(*n, &v);
        let b = p * DVector::from_column_slice(&v);
        assert!(a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
    }
    assert!((sum - DMatrix::identity(DIM, DIM)).amax() < 1e-10);
}

#[test]
fn component_dimensions_match_table_and_zero_modes() {
    // trace of P_n, against the spectrum's multiplicities plus translations
    // and rotations
    let reference = reference_spectrum();
    for n in IsotypicalLabel::all() {
        let tr = projector(n).trace();
        let from_table: usize = reference.iter().filter(|m| m.label == n).map(|m| m.multiplicity).sum();
        let extra = match n.n() {
            4 => 3,  // rotations
            -4 => 3, // translations
            _ => 0,
        };
        assert!((tr - (from_table + extra) as f64).abs() < 1e-9, "{n}: {tr} vs {from_table}+{extra}");
    }
}

#[test]
fn spectrum_matches_reference_table() {
    let p = ForceFieldParams::default();
    let eq = equilibrate(&p).unwrap();
    let t = std::time::Instant::now();
    let s = spectrum(&eq.u, &p).unwrap();
    eprintln!("spectrum in {:?}", t.elapsed());
    assert_eq!(s.modes.len(), 46);
    assert_eq!(s.modes.iter().map(|m| m.multiplicity).sum::<usize>(), 174);
    for (m, r) in s.modes.iter().zip(REFERENCE_MODES.iter()) {
        assert_eq!(m.multiplicity, r.multiplicity, "j={}", r.j);
        assert_eq!(m.label.n(), r.n, "j={}", r.j);
        assert!(((m.mu - r.mu) / r.mu).abs() < 1e-3, "j={} {} vs {}", r.j, m.mu, r.mu);
        assert!(m.mu > 0.0);
        assert_eq!(m.lambda1, 1.0 / m.mu.sqrt());
    }
    assert_eq!(s.rotation_label.map(|l| l.n()), Some(4));
    assert_eq!(s.translation_label.map(|l| l.n()), Some(-4));

    // eigenspaces stay in one isotypical component and in the slice
    let dirs = symmetry_directions(&eq.u);
    for (m, b) in s.modes.iter().zip(&s.bases) {
        for c in b.column_iter() {
            let pc = isotypical_projection(m.label, c.as_slice());
            let off: f64 = c.iter().zip(&pc).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert!(off < 1e-6, "j={} off {off}", m.j);
            for d in &dirs {
                assert!(d.dot(&c).abs() < 1e-8 * d.norm());
            }
        }
    }
}

#[test]
fn resonance_chain() {
    let modes = reference_spectrum();
    let cn = critical_numbers(&modes, 64, 1e-5);
    let at = |j, l| cn.position(j, l).unwrap();
    assert_eq!((0..4).map(|k| (cn.entries[k].j, cn.entries[k].l)).collect::<Vec<_>>(), vec![(1, 1), (2, 1), (3, 1), (4, 1)]);
    let n = cn.entries.len();
    let tail: Vec<_> = cn.entries[n - 5..].iter().map(|c| (c.j, c.l)).collect();
    assert_eq!(tail, vec![(5, 7), (26, 3), (21, 4), (27, 3), (46, 1)]);
    assert!(at(1, 1) == 0 && at(46, 1) == n - 1);
    assert!(cn.min_gap > 1e-5);
    assert!(cn.close_pairs.is_empty());
    assert!((cn.entries[0].lambda - 0.075263).abs() < 1e-6);
    assert!((cn.entries[n - 1].lambda - 0.573177).abs() < 1e-6);
}

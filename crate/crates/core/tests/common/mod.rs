//! Oracles shared by the degree and acceptance suites.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use c60::degrees::lattice::{o2, GROUP};
use c60::degrees::product::{PSub, ProductGroup};
use c60::degrees::{o2_lattice, OrbitTypeElement};

/// Isolated orbits of Γ x O(2) on G/H x G/K. Stabilizers containing a
/// reflection occur only at rotation offsets in (π/60)Z, so Γ x D_120 holds a
/// representative of each.
pub fn orbit_count_product(h: &PSub, k: &PSub) -> OrbitTypeElement {
    let big = ProductGroup::new(120);
    let embed = |x: u32| {
        let (y, d) = GROUP.split(x);
        let p = GROUP.dparts(d);
        big.join(y, big.dcode(2 * p.r, p.s))
    };
    let hb: Vec<u32> = h.elems.iter().map(|&x| embed(x)).collect();
    let kb: BTreeSet<u32> = k.elems.iter().map(|&x| embed(x)).collect();
    let mut weight: HashMap<Vec<u32>, u64> = HashMap::new();
    for c in 0..big.size() {
        let st: Vec<u32> = hb.iter().copied().filter(|&x| kb.contains(&big.conj(x, c))).collect();
        if st.iter().any(|&x| big.dparts(big.split(x).1).s == 1) {
            *weight.entry(st).or_default() += 1;
        }
    }
    let lat = o2_lattice();
    let denom = (h.order() * k.order()) as u64;
    let mut per_class: BTreeMap<usize, u64> = BTreeMap::new();
    for (st, count) in weight {
        let back: Vec<u32> = st
            .iter()
            .map(|&x| {
                let (y, d) = big.split(x);
                let p = big.dparts(d);
                assert_eq!(p.r % 2, 0);
                GROUP.join(y, GROUP.dcode(p.r / 2, p.s))
            })
            .collect();
        let s = PSub::from_elems(&GROUP, back);
        *per_class.entry(o2().classify(&s).unwrap()).or_default() += count * s.order() as u64;
    }
    let mut e = OrbitTypeElement::new();
    for (i, w) in per_class {
        assert_eq!(w % denom, 0);
        e.add_term(&lat.classes[i].id, (w / denom) as i64);
    }
    e
}

pub fn phi0_ids() -> Vec<String> {
    o2_lattice().classes.iter().filter(|c| c.phi0() && !c.is_top()).map(|c| c.id.clone()).collect()
}


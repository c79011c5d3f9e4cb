//! Burnside products inside a finite truncation Γ x D_N, computed twice:
//! by the coefficient recurrence and by counting orbits of G on G/H x G/K.

use std::collections::HashMap;

use super::product::{conj_count, PSub, ProductGroup};

/// Conjugacy classes of subgroups met so far, largest first on demand.
#[derive(Default)]
pub struct Classes {
    pub reps: Vec<PSub>,
    memo: HashMap<Vec<u32>, usize>,
}

impl Classes {
    pub fn classify(&mut self, g: &ProductGroup, s: PSub) -> usize {
        if let Some(&i) = self.memo.get(&s.elems) {
            return i;
        }
        let i = match self.reps.iter().position(|r| r.order() == s.order() && conj_count(g, &s, r, false) > 0) {
            Some(i) => i,
            None => {
                self.reps.push(s.clone());
                self.reps.len() - 1
            }
        };
        self.memo.insert(s.elems, i);
        i
    }
}

/// H ∩ cKc⁻¹.
fn intersect(g: &ProductGroup, h: &PSub, k: &PSub, c: u32) -> PSub {
    PSub::from_elems(g, h.elems.iter().copied().filter(|&x| k.contains(g.conj(x, c))).collect())
}

/// Orbit census: number of G-orbits on G/H x G/K with stabilizer in each
/// class of `classes` (new classes are appended).
pub fn orbit_census(g: &ProductGroup, h: &PSub, k: &PSub, classes: &mut Classes) -> Vec<i64> {
    // each c contributes |H ∩ cKc⁻¹| / (|H||K|) to the orbit of (H, cK)
    let mut weight: HashMap<usize, u64> = HashMap::new();
    for c in 0..g.size() {
        let i = intersect(g, h, k, c);
        let size = i.order() as u64;
        let cls = classes.classify(g, i);
        *weight.entry(cls).or_default() += size;
    }
    let denom = (h.order() * k.order()) as u64;
    (0..classes.reps.len())
        .map(|i| {
            let w = weight.get(&i).copied().unwrap_or(0);
            assert_eq!(w % denom, 0, "orbit weights must be integral");
            (w / denom) as i64
        })
        .collect()
}

/// n_L = [|(G/H)^L| |(G/K)^L| - Σ_{L'>L} n_{L'} |(G/L')^L|] / |W(L)| over
/// the classes in `context`.
pub fn recurrence_product(g: &ProductGroup, context: &[PSub], h: &PSub, k: &PSub) -> Vec<i64> {
    let fp = |l: &PSub, x: &PSub| (conj_count(g, l, x, false) / x.order() as u64) as i64;
    let mut order: Vec<usize> = (0..context.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(context[i].order()));
    let mut n = vec![0i64; context.len()];
    for (pos, &l) in order.iter().enumerate() {
        let cl = &context[l];
        let mut acc = fp(cl, h) * fp(cl, k);
        for &u in &order[..pos] {
            if n[u] != 0 {
                acc -= n[u] * fp(cl, &context[u]);
            }
        }
        let w = fp(cl, cl);
        assert_eq!(acc % w, 0, "recurrence must be integral");
        n[l] = acc / w;
    }
    n
}

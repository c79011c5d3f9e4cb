//! The finite group Γ x D_N. Elements are coded as `γ * 2N + d` with
//! `d = s * N + r` standing for rot(2πr/N) κ^s, where κ is complex
//! conjugation. With N = 60 every finite subgroup of O(2) that can be the
//! image of a subgroup of Γ sits inside D_N together with its normalizer.

use super::gamma::{self, gamma, Mask};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductGroup {
    pub n: u32,
}

/// Rotation/reflection part of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dihedral {
    pub r: u32,
    pub s: u32,
}

impl ProductGroup {
    pub const fn new(n: u32) -> ProductGroup {
        ProductGroup { n }
    }

    pub fn dsize(&self) -> u32 {
        2 * self.n
    }

    pub fn size(&self) -> u32 {
        120 * self.dsize()
    }

    #[inline]
    pub fn split(&self, x: u32) -> (u8, u32) {
        ((x / self.dsize()) as u8, x % self.dsize())
    }

    #[inline]
    pub fn join(&self, g: u8, d: u32) -> u32 {
        g as u32 * self.dsize() + d
    }

    #[inline]
    pub fn dparts(&self, d: u32) -> Dihedral {
        Dihedral { r: d % self.n, s: d / self.n }
    }

    #[inline]
    pub fn dcode(&self, r: u32, s: u32) -> u32 {
        s * self.n + (r % self.n)
    }

    #[inline]
    pub fn dmul(&self, a: u32, b: u32) -> u32 {
        let (a, b) = (self.dparts(a), self.dparts(b));
        let r = if a.s == 0 { a.r + b.r } else { a.r + self.n - b.r };
        self.dcode(r, a.s ^ b.s)
    }

    #[inline]
    pub fn dinv(&self, a: u32) -> u32 {
        let p = self.dparts(a);
        if p.s == 1 {
            a
        } else {
            self.dcode(self.n - p.r, 0)
        }
    }

    pub fn dorder(&self, a: u32) -> u32 {
        let p = self.dparts(a);
        if p.s == 1 {
            2
        } else if p.r == 0 {
            1
        } else {
            self.n / gcd(self.n, p.r)
        }
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let (g1, d1) = self.split(x);
        let (g2, d2) = self.split(y);
        self.join(gamma().m(g1, g2), self.dmul(d1, d2))
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        let (g, d) = self.split(x);
        self.join(gamma().inv[g as usize], self.dinv(d))
    }

    /// c⁻¹ x c.
    #[inline]
    pub fn conj(&self, x: u32, c: u32) -> u32 {
        self.mul(self.mul(self.inv(c), x), c)
    }

    pub fn identity(&self) -> u32 {
        self.join(gamma().identity(), 0)
    }

    pub fn kappa(&self) -> u32 {
        self.join(gamma().identity(), self.dcode(0, 1))
    }

    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let e = self.identity();
        let mut seen = Bits::new(self.size());
        seen.set(e);
        let mut list = vec![e];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen.get(y) {
                    seen.set(y);
                    list.push(y);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        list
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Plain bitset over group codes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn new(size: u32) -> Bits {
        Bits(vec![0; (size as usize).div_ceil(64)])
    }

    #[inline]
    pub fn set(&mut self, i: u32) {
        self.0[(i / 64) as usize] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: u32) -> bool {
        self.0[(i / 64) as usize] & (1 << (i % 64)) != 0
    }
}

/// Finite subgroup of Γ x D_N.
#[derive(Clone, Debug)]
pub struct PSub {
    pub elems: Vec<u32>,
    pub gens: Vec<u32>,
    pub bits: Bits,
    /// Projection to Γ.
    pub proj: Mask,
}

impl PSub {
    pub fn from_elems(g: &ProductGroup, mut elems: Vec<u32>) -> PSub {
        elems.sort_unstable();
        elems.dedup();
        let mut bits = Bits::new(g.size());
        let mut proj: Mask = 0;
        for &x in &elems {
            bits.set(x);
            proj |= 1 << g.split(x).0;
        }
        // greedy generating set
        let mut gens = Vec::new();
        let mut span = vec![g.identity()];
        for &x in &elems {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = g.closure(&gens);
                if span.len() == elems.len() {
                    break;
                }
            }
        }
        debug_assert_eq!(span.len(), elems.len());
        PSub { elems, gens, bits, proj }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.bits.get(x)
    }

    pub fn conjugate(&self, g: &ProductGroup, c: u32) -> PSub {
        PSub::from_elems(g, self.elems.iter().map(|&x| g.conj(x, c)).collect())
    }

    /// Elements with trivial Γ part, as dihedral codes.
    pub fn dihedral_kernel(&self, g: &ProductGroup) -> Vec<u32> {
        let e = gamma().identity();
        self.elems.iter().filter_map(|&x| if g.split(x).0 == e { Some(g.split(x).1) } else { None }).collect()
    }

    /// {γ : (γ, 1) ∈ self}.
    pub fn gamma_kernel(&self, g: &ProductGroup) -> Mask {
        self.elems.iter().filter(|&&x| g.split(x).1 == 0).fold(0, |m, &x| m | (1 << g.split(x).0))
    }

    /// Dihedral projection as codes.
    pub fn dihedral_image(&self, g: &ProductGroup) -> Vec<u32> {
        let mut v: Vec<u32> = self.elems.iter().map(|&x| g.split(x).1).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_subset_of(&self, other: &PSub) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }
}

/// #{c ∈ G : c⁻¹ L c ⊂ K}, with c ranging over Γ x D_N, or over Γ x {1}
/// when `gamma_only`.
pub fn conj_count(g: &ProductGroup, l: &PSub, k: &PSub, gamma_only: bool) -> u64 {
    if l.order() > k.order() || !k.order().is_multiple_of(l.order()) {
        return 0;
    }
    let gm = gamma();
    let gens: Vec<(u8, u32)> = l.gens.iter().map(|&x| g.split(x)).collect();
    let mut count = 0;
    for c in 0..120u8 {
        if !gens.iter().all(|&(s, _)| k.proj & (1 << gm.conj(s, c)) != 0) {
            continue;
        }
        let drange = if gamma_only { 1 } else { g.dsize() };
        for d in 0..drange {
            let cc = g.join(c, d);
            if l.gens.iter().all(|&x| k.contains(g.conj(x, cc))) {
                count += 1;
            }
        }
    }
    count
}

/// A homomorphism from a subgroup of Γ to D_N, as its graph.
#[derive(Clone, Debug)]
pub struct Hom {
    pub domain: Mask,
    /// (γ, f(γ)) for each γ in the domain.
    pub values: Vec<(u8, u32)>,
}

impl Hom {
    pub fn graph(&self, g: &ProductGroup) -> Vec<u32> {
        self.values.iter().map(|&(x, d)| g.join(x, d)).collect()
    }

    pub fn image(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.values.iter().map(|&(_, d)| d).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn value(&self, x: u8) -> Option<u32> {
        self.values.iter().find(|&&(y, _)| y == x).map(|&(_, d)| d)
    }
}

/// Greedy generating set of a subgroup of Γ.
pub fn gamma_generators(h: Mask) -> Vec<u8> {
    let gm = gamma();
    let mut gens = Vec::new();
    let mut span = gm.closure(&[]);
    // try high-order elements first to keep the set short
    let mut es = gamma::elements(h);
    es.sort_by_key(|&x| std::cmp::Reverse(gm.order_of(x)));
    for x in es {
        if span & (1 << x) == 0 {
            gens.push(x);
            span = gm.closure(&gens);
            if span == h {
                break;
            }
        }
    }
    gens
}

/// Every homomorphism h → D_N, optionally only those into the rotations.
pub fn homomorphisms(g: &ProductGroup, h: Mask, rotations_only: bool) -> Vec<Hom> {
    let gm = gamma();
    let gens = gamma_generators(h);
    let choices: Vec<Vec<u32>> = gens
        .iter()
        .map(|&s| {
            let o = gm.order_of(s) as u32;
            (0..g.dsize())
                .filter(|&d| (!rotations_only || d < g.n) && o.is_multiple_of(g.dorder(d)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; gens.len()];
    let size = gamma::order(h);
    loop {
        let imgs: Vec<u32> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        if let Some(values) = extend_hom(g, &gens, &imgs, size) {
            out.push(Hom { domain: h, values });
        }
        // odometer
        let mut k = 0;
        loop {
            if k == pick.len() {
                return out;
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn extend_hom(g: &ProductGroup, gens: &[u8], imgs: &[u32], size: usize) -> Option<Vec<(u8, u32)>> {
    let gm = gamma();
    let mut val = [u32::MAX; 120];
    let e = gm.identity();
    val[e as usize] = 0;
    let mut list = vec![e];
    let mut i = 0;
    while i < list.len() {
        let x = list[i];
        for (&s, &ds) in gens.iter().zip(imgs) {
            let y = gm.m(x, s);
            let v = g.dmul(val[x as usize], ds);
            if val[y as usize] == u32::MAX {
                val[y as usize] = v;
                list.push(y);
            } else if val[y as usize] != v {
                return None;
            }
        }
        i += 1;
    }
    debug_assert_eq!(list.len(), size);
    let mut values: Vec<(u8, u32)> = list.into_iter().map(|x| (x, val[x as usize])).collect();
    values.sort_unstable();
    Some(values)
}

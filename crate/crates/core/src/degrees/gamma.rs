//! The finite group Γ = A5 x Z2 as 120 indexed elements, its subgroups as
//! 120-bit masks, and the 22 conjugacy classes of subgroups.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::molecule::{GroupElement, Perm};

/// Subgroup of Γ as a bit mask over `GroupElement::index()`.
pub type Mask = u128;

pub struct Gamma {
    pub mul: Vec<[u8; 120]>,
    pub inv: [u8; 120],
    pub elems: Vec<GroupElement>,
}

impl Gamma {
    #[inline]
    pub fn m(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize][b as usize]
    }

    /// g⁻¹ x g.
    #[inline]
    pub fn conj(&self, x: u8, g: u8) -> u8 {
        self.m(self.m(self.inv[g as usize], x), g)
    }

    pub fn identity(&self) -> u8 {
        GroupElement::IDENTITY.index() as u8
    }

    pub fn minus_one(&self) -> u8 {
        GroupElement::minus_one().index() as u8
    }

    pub fn order_of(&self, x: u8) -> usize {
        let e = self.identity();
        let mut y = x;
        let mut k = 1;
        while y != e {
            y = self.m(y, x);
            k += 1;
        }
        k
    }

    pub fn closure(&self, gens: &[u8]) -> Mask {
        let e = self.identity();
        let mut mask: Mask = 1 << e;
        let mut list = vec![e];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in gens {
                let y = self.m(x, g);
                if mask & (1 << y) == 0 {
                    mask |= 1 << y;
                    list.push(y);
                }
            }
            i += 1;
        }
        mask
    }

    pub fn conj_mask(&self, s: Mask, g: u8) -> Mask {
        elements(s).into_iter().fold(0, |acc, x| acc | (1 << self.conj(x, g)))
    }
}

pub fn gamma() -> &'static Gamma {
    static G: OnceLock<Gamma> = OnceLock::new();
    G.get_or_init(|| {
        let elems = GroupElement::all();
        let mut mul = vec![[0u8; 120]; 120];
        let mut inv = [0u8; 120];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i][j] = a.mul(*b).index() as u8;
            }
            inv[i] = a.inverse().index() as u8;
        }
        Gamma { mul, inv, elems }
    })
}

pub fn elements(s: Mask) -> Vec<u8> {
    (0..120u8).filter(|&i| s & (1 << i) != 0).collect()
}

pub fn order(s: Mask) -> usize {
    s.count_ones() as usize
}

/// Every subgroup of Γ, built by repeatedly adjoining one element to known
/// subgroups. `element_order` fixes the order in which elements are tried.
pub fn enumerate_subgroups(element_order: &[u8]) -> BTreeSet<Mask> {
    let g = gamma();
    let mut found: BTreeSet<Mask> = BTreeSet::new();
    let mut frontier = vec![g.closure(&[])];
    found.insert(frontier[0]);
    while let Some(s) = frontier.pop() {
        let gens = elements(s);
        for &x in element_order {
            if s & (1 << x) != 0 {
                continue;
            }
            let mut gs = gens.clone();
            gs.push(x);
            let t = g.closure(&gs);
            if found.insert(t) {
                frontier.push(t);
            }
        }
    }
    found
}

/// Conjugacy class of subgroups of Γ.
#[derive(Clone, Debug)]
pub struct GammaClass {
    pub name: String,
    pub rep: Mask,
    pub order: usize,
    pub members: Vec<Mask>,
    pub normalizer_order: usize,
}

impl GammaClass {
    pub fn weyl_order(&self) -> usize {
        self.normalizer_order / self.order
    }
}

pub struct GammaLattice {
    pub classes: Vec<GammaClass>,
    class_of: HashMap<Mask, usize>,
    /// sub[a][b]: some conjugate of class a lies in class b's representative.
    pub sub: Vec<Vec<bool>>,
}

impl GammaLattice {
    pub fn class_of(&self, s: Mask) -> usize {
        self.class_of[&s]
    }

    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn name_of(&self, s: Mask) -> &str {
        &self.classes[self.class_of(s)].name
    }
}

fn perm(s: &str) -> Perm {
    s.parse().expect("literal permutation")
}

fn el(p: &str, sign: i8) -> u8 {
    GroupElement::new(perm(p), sign).expect("even permutation").index() as u8
}

/// Named representatives: the A5 subgroups, their products with {±1} and the
/// twisted versions.
fn named_representatives() -> Vec<(String, Mask)> {
    let g = gamma();
    let base: [(&str, Vec<&str>); 9] = [
        ("Z1", vec![]),
        ("Z2", vec!["(12)(34)"]),
        ("Z3", vec!["(123)"]),
        ("V4", vec!["(12)(34)", "(13)(24)"]),
        ("Z5", vec!["(12345)"]),
        ("D3", vec!["(123)", "(12)(45)"]),
        ("D5", vec!["(12345)", "(12)(35)"]),
        ("A4", vec!["(123)", "(12)(34)"]),
        ("A5", vec!["(23)(45)", "(12345)"]),
    ];
    let mut out = Vec::new();
    for (name, gens) in &base {
        let plain: Vec<u8> = gens.iter().map(|p| el(p, 1)).collect();
        out.push((name.to_string(), g.closure(&plain)));
        let mut with_minus = plain.clone();
        with_minus.push(g.minus_one());
        out.push((format!("{name}^p"), g.closure(&with_minus)));
    }
    let twisted: [(&str, Vec<(&str, i8)>); 4] = [
        ("Z2", vec![("(12)(34)", -1)]),
        ("V4", vec![("(12)(34)", -1), ("(13)(24)", -1)]),
        ("D3", vec![("(123)", 1), ("(12)(45)", -1)]),
        ("D5", vec![("(12345)", 1), ("(12)(35)", -1)]),
    ];
    for (name, gens) in &twisted {
        let gs: Vec<u8> = gens.iter().map(|(p, s)| el(p, *s)).collect();
        out.push((format!("{name}^z"), g.closure(&gs)));
    }
    out
}

fn build_lattice() -> GammaLattice {
    let g = gamma();
    let order: Vec<u8> = (0..120).collect();
    let all = enumerate_subgroups(&order);
    let mut class_of: HashMap<Mask, usize> = HashMap::new();
    let mut classes = Vec::new();
    let reps = named_representatives();
    for (name, rep) in reps {
        let mut members: BTreeSet<Mask> = BTreeSet::new();
        let mut normalizer = 0;
        for x in 0..120u8 {
            let c = g.conj_mask(rep, x);
            if c == rep {
                normalizer += 1;
            }
            members.insert(c);
        }
        let idx = classes.len();
        for m in &members {
            let prev = class_of.insert(*m, idx);
            assert!(prev.is_none(), "{name} shares a class with another representative");
        }
        classes.push(GammaClass { name, rep, order: order_of_mask(rep), members: members.into_iter().collect(), normalizer_order: normalizer });
    }
    assert_eq!(class_of.len(), all.len(), "named classes must cover every subgroup");
    let n = classes.len();
    let mut sub = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            let rb = classes[b].rep;
            sub[a][b] = classes[a].members.iter().any(|m| m & rb == *m);
        }
    }
    GammaLattice { classes, class_of, sub }
}

fn order_of_mask(s: Mask) -> usize {
    order(s)
}

pub fn lattice() -> &'static GammaLattice {
    static L: OnceLock<GammaLattice> = OnceLock::new();
    L.get_or_init(build_lattice)
}

/// A subgroup of Γ given by its elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupFinite(pub Mask);

impl SubgroupFinite {
    pub fn elements(&self) -> Vec<GroupElement> {
        elements(self.0).into_iter().map(|i| GroupElement::from_index(i as usize)).collect()
    }

    pub fn order(&self) -> usize {
        order(self.0)
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        self.0 & (1 << g.index()) != 0
    }

    pub fn is_subgroup(&self) -> bool {
        let g = gamma();
        let es = elements(self.0);
        es.contains(&g.identity()) && es.iter().all(|&a| es.iter().all(|&b| self.0 & (1 << g.m(a, g.inv[b as usize])) != 0))
    }

    pub fn class_name(&self) -> &'static str {
        lattice().name_of(self.0)
    }
}

//! Orbit types of Γ x O(2) and Γ x S¹ that occur in the representations
//! C ⊗ V_n. On the O(2) side these are the subgroups ℋ with
//! ℋ ∩ (1 x O(2)) trivial or {1, κ}; on the S¹ side the graphs of
//! homomorphisms into S¹. Both are realized inside Γ x D_60.
//!
//! Ids are built from conjugation invariants, so a subgroup is classified by
//! computing its id. Construction checks that no two non-conjugate subgroups
//! share an id.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use super::gamma::{self, gamma, lattice, Mask};
use super::product::{conj_count, homomorphisms, PSub, ProductGroup};
use crate::error::{Error, Result};
use crate::molecule::{A5Class, GroupElement};
use crate::representation::{character, IsotypicalLabel};

pub const N: u32 = 60;
pub const GROUP: ProductGroup = ProductGroup::new(N);
pub const TOP_O2: &str = "A5^p x O(2)";
pub const TOP_S1: &str = "I x S1";

/// Rotation by 2π/5 in D_60.
const ROT_FIFTH: u32 = N / 5;

fn class_name(m: Mask) -> String {
    lattice().name_of(m).to_string()
}

/// Superscript tying a fivefold rotation to one of the two classes of
/// 5-cycles: 1 when the element sent to rotation by 2π/5 lies in C4.
fn five_class_mark(s: &PSub) -> Option<u32> {
    s.elems.iter().find_map(|&x| {
        let (g, d) = GROUP.split(x);
        (d == ROT_FIFTH).then(|| match A5Class::of(gamma().elems[g as usize].perm) {
            A5Class::C4 => 1,
            _ => 2,
        })
    })
}

/// Index-2 subgroups of `h` containing `z`.
fn index_two_over(h: Mask, z: Mask) -> Vec<Mask> {
    let gm = gamma();
    let zs = gamma::elements(z);
    let mut out: Vec<Mask> = Vec::new();
    for x in gamma::elements(h) {
        if z & (1 << x) != 0 {
            continue;
        }
        let mut gens = zs.clone();
        gens.push(x);
        let t = gm.closure(&gens);
        if gamma::order(t) * 2 == gamma::order(h) && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Id of a graph-type subgroup of Γ x O(2), before tie indices.
fn o2_base_id(s: &PSub) -> String {
    let g = &GROUP;
    let h = s.proj;
    let z = s.gamma_kernel(g);
    let img = s.dihedral_image(g);
    let rots = img.iter().filter(|&&d| d < N).count();
    let has_refl = img.len() > rots;
    let k = format!("{}{}", if has_refl { "D" } else { "Z" }, rots);
    let kappa = s.dihedral_kernel(g).iter().any(|&d| d >= N);
    let hn = class_name(h);
    if z == h {
        return format!("{hn} x {k}");
    }
    let l = if kappa { format!("Z{}", img.len() / 2) } else { k.clone() };
    let mut id = format!("{hn} ^{} x_{l}", class_name(z));
    if matches!(l.as_str(), "D5" | "D10" | "Z5" | "Z10") {
        if let Some(m) = five_class_mark(s) {
            id.push_str(&format!("^{m}"));
        }
    }
    id.push(' ');
    id.push_str(&k);
    if !kappa && k == "D2" {
        let r = s.elems.iter().filter(|&&x| GROUP.split(x).1 < N).fold(0 as Mask, |m, &x| m | (1 << GROUP.split(x).0));
        let choices = index_two_over(h, z);
        let distinct = choices.iter().any(|&c| lattice().class_of(c) != lattice().class_of(choices[0]));
        if distinct {
            id.push_str(&format!(" [{}]", class_name(r)));
        }
    }
    id
}

/// Id of a subgroup of Γ x S¹ given inside Γ x Z_60, before tie indices.
fn s1_base_id(s: &PSub) -> String {
    let g = &GROUP;
    let h = s.proj;
    let z = s.gamma_kernel(g);
    let m = s.dihedral_image(g).len();
    let hn = class_name(h);
    if z == h {
        return hn;
    }
    let minus = gamma().minus_one();
    if z & (1 << minus) != 0 && hn.ends_with("^p") {
        let base = hn.trim_end_matches("^p");
        if m == 2 {
            format!("{base}^- x Z2")
        } else {
            format!("{base}^t x Z2")
        }
    } else {
        format!("{hn} ^{} x Z{m}", class_name(z))
    }
}

fn element_string(x: u8) -> String {
    let e = &gamma().elems[x as usize];
    format!("{}{}", e.perm, if e.sign < 0 { "-" } else { "+" })
}

/// Conjugate of `s` whose Γ projection is the named class representative.
fn to_representative(s: &PSub) -> (PSub, Mask) {
    let rep = lattice().classes[lattice().class_of(s.proj)].rep;
    let c = (0..120u8).find(|&c| gamma().conj_mask(s.proj, c) == rep).expect("conjugate to representative");
    (s.conjugate(&GROUP, GROUP.join(c, 0)), rep)
}

/// Conjugation invariant separating subgroups with equal base ids. Over the
/// normalizer of the representative projection, the least listing of the
/// elements sent to each key set in turn.
fn tie_tag(s: &PSub, keys: &[&dyn Fn(u32) -> bool]) -> String {
    let (t, rep) = to_representative(s);
    let gm = gamma();
    let mut best: Option<String> = None;
    for c in 0..120u8 {
        if gm.conj_mask(rep, c) != rep {
            continue;
        }
        let parts: Vec<String> = keys
            .iter()
            .map(|key| {
                let mut v: Vec<String> = t
                    .elems
                    .iter()
                    .filter(|&&x| key(GROUP.split(x).1))
                    .map(|&x| element_string(gm.conj(GROUP.split(x).0, c)))
                    .collect();
                v.sort();
                v.join(",")
            })
            .collect();
        let v = parts.join("|");
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    best.unwrap_or_default()
}

/// For S¹ subgroups: what is sent to the smallest positive rotation.
fn s1_tag(s: &PSub) -> String {
    let m = s.dihedral_image(&GROUP).len() as u32;
    let target = if m <= 1 { 0 } else { N / m };
    tie_tag(s, &[&|d| d == target])
}

/// For O(2) subgroups: the kernel, then the preimage of the rotations.
fn o2_tag(s: &PSub) -> String {
    tie_tag(s, &[&|d| d == 0, &|d| d < N])
}

/// Final ids: base ids shared by several classes get an index in tag order.
fn assign_ids(raw: &[(String, String)], suffix: impl Fn(&str, usize) -> String) -> (HashMap<(String, String), String>, Vec<String>) {
    let mut tags: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (b, t) in raw {
        tags.entry(b).or_default().push(t);
    }
    let mut names = HashMap::new();
    let mut collisions = Vec::new();
    for (b, t) in raw {
        let mut ts = tags[b.as_str()].clone();
        ts.sort();
        if ts.windows(2).any(|w| w[0] == w[1]) {
            collisions.push(b.clone());
        }
        let id = if ts.len() == 1 { b.clone() } else { suffix(b, ts.iter().position(|x| x == t).expect("own tag") + 1) };
        names.insert((b.clone(), t.clone()), id);
    }
    collisions.dedup();
    (names, collisions)
}

#[derive(Clone, Debug)]
pub struct OrbitClass {
    pub id: String,
    /// Representative inside Γ x D_60; `None` for the whole group.
    pub group: Option<PSub>,
    /// Γ class of the projection.
    pub h: usize,
    /// Number of rotations in the O(2) projection (0 for the whole group).
    pub k_rotations: u32,
    /// O(2) projection contains reflections (the Weyl group is finite).
    pub dihedral: bool,
    /// ℋ ∩ (1 x O(2)) = {1, κ}.
    pub kappa_kernel: bool,
}

impl OrbitClass {
    pub fn is_top(&self) -> bool {
        self.group.is_none()
    }

    /// Finite Weyl group: the type lives in the Burnside ring.
    pub fn phi0(&self) -> bool {
        self.is_top() || self.dihedral
    }

    pub fn order(&self) -> usize {
        self.group.as_ref().map_or(0, |g| g.order())
    }
}

pub struct OrbitLattice {
    pub classes: Vec<OrbitClass>,
    index: HashMap<String, usize>,
    /// Pairs of non-conjugate subgroups that received the same id.
    pub collisions: Vec<String>,
    counts: Vec<OnceLock<u64>>,
    gamma_only: bool,
}

impl OrbitLattice {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Result<usize> {
        self.find(id).ok_or_else(|| Error::UnknownOrbitType(id.to_string()))
    }

    pub fn top(&self) -> usize {
        0
    }

    fn count(&self, a: usize, b: usize) -> u64 {
        let n = self.classes.len();
        *self.counts[a * n + b].get_or_init(|| match (&self.classes[a].group, &self.classes[b].group) {
            (Some(x), Some(y)) => conj_count(&GROUP, x, y, self.gamma_only),
            _ => 0,
        })
    }

    /// |(G/K_b)^{L_a}| = n(L_a, K_b) |W(K_b)| (modulo S¹ on the S¹ side).
    pub fn fixed_points(&self, a: usize, b: usize) -> u64 {
        match (self.classes[a].is_top(), self.classes[b].is_top()) {
            (_, true) => 1,
            (true, false) => 0,
            _ => self.count(a, b) / self.classes[b].order() as u64,
        }
    }

    /// (a) ≤ (b).
    pub fn subconjugate(&self, a: usize, b: usize) -> bool {
        self.classes[b].is_top() || (!self.classes[a].is_top() && self.count(a, b) > 0)
    }

    /// |W(H)| for finite Weyl groups (|W(H)/S¹| on the S¹ side).
    pub fn weyl_order(&self, a: usize) -> u64 {
        if self.classes[a].is_top() {
            1
        } else {
            self.count(a, a) / self.classes[a].order() as u64
        }
    }

    /// Number of conjugates of (K_b) containing L_a: n(L_a, K_b).
    pub fn n_coefficient(&self, a: usize, b: usize) -> u64 {
        self.fixed_points(a, b) / self.weyl_order(b)
    }
}

fn aligned(img: &[u32]) -> bool {
    // a reflection in the image forces κ itself to be there
    !img.iter().any(|&d| d >= N) || img.contains(&N)
}

fn top_class(id: &str, dihedral: bool) -> OrbitClass {
    OrbitClass {
        id: id.to_string(),
        group: None,
        h: lattice().by_name("A5^p").expect("A5^p"),
        k_rotations: 0,
        dihedral,
        kappa_kernel: false,
    }
}

/// Representatives of O(2)-side classes, one per conjugacy class.
fn o2_representatives() -> Vec<(PSub, usize)> {
    let g = &GROUP;
    let kappa = GROUP.dcode(0, 1);
    let mut out = Vec::new();
    for (hc, class) in lattice().classes.iter().enumerate() {
        let mut subs: Vec<PSub> = Vec::new();
        for f in homomorphisms(g, class.rep, false) {
            let img = f.image();
            if aligned(&img) {
                subs.push(PSub::from_elems(g, f.graph(g)));
            }
            if img.iter().all(|&d| d == 0 || d == N / 2) {
                let mut els = f.graph(g);
                els.extend(f.values.iter().map(|&(x, d)| g.join(x, g.dmul(d, kappa))));
                subs.push(PSub::from_elems(g, els));
            }
        }
        let mut reps: Vec<PSub> = Vec::new();
        for s in subs {
            if !reps.iter().any(|r| r.order() == s.order() && conj_count(g, &s, r, false) > 0) {
                reps.push(s);
            }
        }
        out.extend(reps.into_iter().map(|r| (r, hc)));
    }
    out
}

fn s1_representatives() -> Vec<(PSub, usize)> {
    let g = &GROUP;
    let mut out = Vec::new();
    for (hc, class) in lattice().classes.iter().enumerate() {
        let mut reps: Vec<PSub> = Vec::new();
        for f in homomorphisms(g, class.rep, true) {
            let s = PSub::from_elems(g, f.graph(g));
            if !reps.iter().any(|r| conj_count(g, &s, r, true) > 0) {
                reps.push(s);
            }
        }
        out.extend(reps.into_iter().map(|r| (r, hc)));
    }
    out
}

pub struct Lattice {
    pub lattice: OrbitLattice,
    names: HashMap<(String, String), String>,
    base: fn(&PSub) -> String,
    tag: fn(&PSub) -> String,
}

impl Lattice {
    /// Class of a subgroup (graph type for O(2), inside Γ x Z_60 for S¹).
    pub fn classify(&self, s: &PSub) -> Result<usize> {
        let key = ((self.base)(s), (self.tag)(s));
        let id = self.names.get(&key).ok_or_else(|| Error::UnknownOrbitType(key.0.clone()))?;
        self.lattice.get(id)
    }
}

fn build(
    top: OrbitClass,
    reps: Vec<(PSub, usize)>,
    base: fn(&PSub) -> String,
    tag: fn(&PSub) -> String,
    suffix: impl Fn(&str, usize) -> String,
    gamma_only: bool,
) -> Lattice {
    let g = &GROUP;
    let raw: Vec<(String, String)> = reps.iter().map(|(s, _)| (base(s), tag(s))).collect();
    let (names, collisions) = assign_ids(&raw, suffix);
    let mut classes = vec![top];
    for ((s, hc), key) in reps.into_iter().zip(&raw) {
        let img = s.dihedral_image(g);
        let rots = img.iter().filter(|&&d| d < N).count() as u32;
        classes.push(OrbitClass {
            id: names[key].clone(),
            h: hc,
            k_rotations: rots,
            dihedral: img.len() as u32 > rots,
            kappa_kernel: s.dihedral_kernel(g).len() > 1,
            group: Some(s),
        });
    }
    let index = classes.iter().enumerate().map(|(i, c)| (c.id.clone(), i)).collect();
    let n = classes.len();
    let lattice = OrbitLattice { classes, index, collisions, counts: (0..n * n).map(|_| OnceLock::new()).collect(), gamma_only };
    Lattice { lattice, names, base, tag }
}

pub fn o2() -> &'static Lattice {
    static L: OnceLock<Lattice> = OnceLock::new();
    L.get_or_init(|| build(top_class(TOP_O2, true), o2_representatives(), o2_base_id, o2_tag, |b, k| format!("{b} #{k}"), false))
}

pub fn s1() -> &'static Lattice {
    static L: OnceLock<Lattice> = OnceLock::new();
    L.get_or_init(|| {
        let suffix = |b: &str, k: usize| match b.find("^t") {
            Some(p) => format!("{}^t{k}{}", &b[..p], &b[p + 2..]),
            None => format!("{b} #{k}"),
        };
        build(top_class(TOP_S1, false), s1_representatives(), s1_base_id, s1_tag, suffix, true)
    })
}

pub fn o2_lattice() -> &'static OrbitLattice {
    &o2().lattice
}

pub fn s1_lattice() -> &'static OrbitLattice {
    &s1().lattice
}

/// Canonical id of a graph-type subgroup of Γ x O(2).
pub fn o2_id(s: &PSub) -> Result<String> {
    Ok(o2_lattice().classes[o2().classify(s)?].id.clone())
}

fn characters(n: IsotypicalLabel) -> [f64; 120] {
    std::array::from_fn(|i| character(n, GroupElement::from_index(i)))
}

fn rounded(x: f64) -> usize {
    let r = x.round();
    debug_assert!((x - r).abs() < 1e-9, "fixed dimension {x}");
    r.max(0.0) as usize
}

/// Real dimension of the ℋ-fixed subspace of C ⊗ V_n with O(2) acting
/// through l-folding.
pub fn fixed_dim_o2(c: &OrbitClass, n: IsotypicalLabel, l: u32) -> usize {
    let Some(s) = &c.group else { return 0 };
    let chi = characters(n);
    let sum: f64 = s
        .elems
        .iter()
        .map(|&x| {
            let (y, d) = GROUP.split(x);
            let p = GROUP.dparts(d);
            let chi_l = if p.s == 1 { 0.0 } else { 2.0 * (2.0 * std::f64::consts::PI * (l * p.r) as f64 / N as f64).cos() };
            chi[y as usize] * chi_l
        })
        .sum();
    rounded(sum / s.order() as f64)
}

/// Complex dimension of the fixed subspace of C ⊗ V_n under a subgroup of
/// Γ x S¹, S¹ acting by multiplication.
pub fn fixed_dim_s1(c: &OrbitClass, n: IsotypicalLabel) -> usize {
    let Some(s) = &c.group else { return 0 };
    let chi = characters(n);
    let sum: f64 = s
        .elems
        .iter()
        .map(|&x| {
            let (y, d) = GROUP.split(x);
            chi[y as usize] * (2.0 * std::f64::consts::PI * d as f64 / N as f64).cos()
        })
        .sum();
    rounded(sum / s.order() as f64)
}

/// Isotropy types of nonzero vectors: classes with nonzero fixed space and
/// no strictly larger class fixing the same subspace.
pub fn isotropy_types(lat: &OrbitLattice, dim: impl Fn(&OrbitClass) -> usize) -> Vec<usize> {
    let dims: Vec<usize> = lat.classes.iter().map(&dim).collect();
    (0..lat.len())
        .filter(|&a| {
            dims[a] > 0
                && !(0..lat.len()).any(|b| {
                    b != a && dims[b] == dims[a] && lat.classes[b].order() > lat.classes[a].order() && lat.subconjugate(a, b)
                })
        })
        .collect()
}

/// The maximal elements of `types` under subconjugacy.
pub fn maximal(lat: &OrbitLattice, types: &[usize]) -> Vec<usize> {
    types.iter().copied().filter(|&a| !types.iter().any(|&b| b != a && lat.subconjugate(a, b) && !lat.subconjugate(b, a))).collect()
}

/// S¹ side image of ℋ ∩ (Γ x SO(2)), and of its κ-conjugate.
pub fn rotation_part(s: &PSub) -> (PSub, PSub) {
    let g = &GROUP;
    let k: Vec<u32> = s.elems.iter().copied().filter(|&x| g.split(x).1 < N).collect();
    let kp: Vec<u32> = k
        .iter()
        .map(|&x| {
            let (y, d) = g.split(x);
            g.join(y, g.dcode(N - d, 0))
        })
        .collect();
    (PSub::from_elems(g, k), PSub::from_elems(g, kp))
}

//! Atom indexing by (pentagonal face, vertex), the single/double bond maps,
//! the group A5 x Z2, its 3-space representation and its action on
//! configurations.
//!
//! A face is a 5-cycle τ of the class C4; the atom (τ, k) sits at vertex k of
//! that face. The group acts on indices by σ·(τ,k) = (στσ⁻¹, σ(k)) and the
//! central element -1 by (τ,k) ↦ (τ⁻¹,k). On configurations the action is
//! (g·u)_{g·i} = R u_i, i.e. (g·u)_{τ,k} = R u_{σ⁻¹τσ, σ⁻¹(k)}.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_ATOMS: usize = 60;
pub const DIM: usize = 3 * N_ATOMS;

/// Permutation of five points stored 0-based: `p.0[i]` is the image of `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(pub [u8; 5]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2, 3, 4]);

    /// Builds a permutation from 1-based disjoint cycles.
    pub fn from_cycles(cycles: &[&[u8]]) -> Perm {
        let mut p = [0, 1, 2, 3, 4];
        for c in cycles {
            for w in 0..c.len() {
                p[(c[w] - 1) as usize] = c[(w + 1) % c.len()] - 1;
            }
        }
        Perm(p)
    }

    #[inline]
    pub fn apply(self, i: u8) -> u8 {
        self.0[i as usize]
    }

    /// (self ∘ other)(i) = self(other(i)).
    #[inline]
    pub fn compose(self, other: Perm) -> Perm {
        let mut r = [0u8; 5];
        for (i, v) in r.iter_mut().enumerate() {
            *v = self.0[other.0[i] as usize];
        }
        Perm(r)
    }

    pub fn inverse(self) -> Perm {
        let mut r = [0u8; 5];
        for i in 0..5 {
            r[self.0[i] as usize] = i as u8;
        }
        Perm(r)
    }

    pub fn pow(self, n: u32) -> Perm {
        (0..n).fold(Perm::IDENTITY, |acc, _| acc.compose(self))
    }

    /// σ⁻¹ τ σ.
    pub fn conj_by_inverse(self, sigma: Perm) -> Perm {
        sigma.inverse().compose(self).compose(sigma)
    }

    /// Cycle lengths in decreasing order, fixed points included.
    pub fn cycle_type(self) -> Vec<usize> {
        let mut seen = [false; 5];
        let mut out = Vec::new();
        for i in 0..5 {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j] as usize;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn is_even(self) -> bool {
        self.cycle_type().iter().map(|l| l - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(self) -> u32 {
        let mut p = self;
        let mut n = 1;
        while p != Perm::IDENTITY {
            p = p.compose(self);
            n += 1;
        }
        n
    }

    /// All 60 even permutations in lexicographic order of their image arrays.
    pub fn alternating_group() -> Vec<Perm> {
        let mut out = Vec::with_capacity(60);
        let mut a = [0u8, 1, 2, 3, 4];
        permute_all(&mut a, 0, &mut out);
        out.retain(|p| p.is_even());
        out.sort();
        out
    }
}

fn permute_all(a: &mut [u8; 5], k: usize, out: &mut Vec<Perm>) {
    if k == 5 {
        out.push(Perm(*a));
        return;
    }
    for i in k..5 {
        a.swap(k, i);
        permute_all(a, k + 1, out);
        a.swap(k, i);
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, 1-based, each cycle starting at its smallest point;
    /// the identity prints as "(1)".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = [false; 5];
        let mut any = false;
        for i in 0..5 {
            if seen[i] || self.0[i] as usize == i {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                write!(f, "{}", j + 1)?;
                j = self.0[j] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "(1)")?;
        }
        Ok(())
    }
}

impl FromStr for Perm {
    type Err = Error;

    /// Parses products of disjoint cycles such as "(23)(45)" or "(13254)".
    fn from_str(s: &str) -> Result<Perm> {
        let bad = || Error::Parse(format!("bad permutation {s:?}"));
        let mut cycles: Vec<Vec<u8>> = Vec::new();
        let mut cur: Option<Vec<u8>> = None;
        for ch in s.trim().chars() {
            match ch {
                '(' if cur.is_none() => cur = Some(Vec::new()),
                ')' => cycles.push(cur.take().ok_or_else(bad)?),
                '1'..='5' => cur.as_mut().ok_or_else(bad)?.push(ch as u8 - b'0'),
                ' ' => {}
                _ => return Err(bad()),
            }
        }
        if cur.is_some() || cycles.is_empty() {
            return Err(bad());
        }
        let mut used = [false; 6];
        for c in &cycles {
            for &x in c {
                if used[x as usize] && c.len() > 1 {
                    return Err(bad());
                }
                used[x as usize] = true;
            }
        }
        let refs: Vec<&[u8]> = cycles.iter().filter(|c| c.len() > 1).map(|c| c.as_slice()).collect();
        Ok(Perm::from_cycles(&refs))
    }
}

/// The twelve 5-cycles of class C4.
const C4_CYCLES: [[u8; 5]; 12] = [
    [1, 2, 3, 4, 5],
    [1, 2, 4, 5, 3],
    [1, 2, 5, 3, 4],
    [1, 3, 2, 5, 4],
    [1, 3, 5, 4, 2],
    [1, 3, 4, 2, 5],
    [1, 4, 2, 3, 5],
    [1, 4, 3, 5, 2],
    [1, 4, 5, 2, 3],
    [1, 5, 2, 4, 3],
    [1, 5, 4, 3, 2],
    [1, 5, 3, 2, 4],
];

/// The twelve 5-cycles of class C5.
const C5_CYCLES: [[u8; 5]; 12] = [
    [1, 2, 3, 5, 4],
    [1, 2, 4, 3, 5],
    [1, 2, 5, 4, 3],
    [1, 3, 2, 4, 5],
    [1, 3, 5, 2, 4],
    [1, 3, 4, 5, 2],
    [1, 4, 2, 5, 3],
    [1, 4, 3, 2, 5],
    [1, 4, 5, 3, 2],
    [1, 5, 2, 3, 4],
    [1, 5, 4, 2, 3],
    [1, 5, 3, 4, 2],
];

/// Conjugacy class of an element of A5.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum A5Class {
    Identity,
    Involution,
    ThreeCycle,
    C4,
    C5,
}

impl A5Class {
    pub fn of(p: Perm) -> A5Class {
        let t = p.cycle_type();
        match t[0] {
            1 => A5Class::Identity,
            2 => A5Class::Involution,
            3 => A5Class::ThreeCycle,
            5 if tables().c4.contains(&p) => A5Class::C4,
            5 => A5Class::C5,
            _ => panic!("{p} is not in A5"),
        }
    }
}

/// A pentagonal face: a 5-cycle from the class C4.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FiveCycle(Perm);

impl FiveCycle {
    pub fn new(p: Perm) -> Result<FiveCycle> {
        if tables().c4.contains(&p) {
            Ok(FiveCycle(p))
        } else {
            Err(Error::Parse(format!("{p} is not a 5-cycle of class C4")))
        }
    }

    pub fn perm(self) -> Perm {
        self.0
    }

    /// Position in the canonical face order.
    pub fn index(self) -> usize {
        tables().faces.iter().position(|f| *f == self.0).expect("validated face")
    }

    /// The twelve faces in canonical order (lexicographic on the cycle
    /// written from its smallest point).
    pub fn all() -> [FiveCycle; 12] {
        let t = tables();
        std::array::from_fn(|i| FiveCycle(t.faces[i]))
    }
}

impl fmt::Display for FiveCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Atom label (τ, k); stored as a flat position `5·face + (k-1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AtomIndex(u8);

impl AtomIndex {
    /// `vertex` is 1-based, as in the labels (τ, k).
    pub fn new(face: FiveCycle, vertex: u8) -> Result<AtomIndex> {
        if !(1..=5).contains(&vertex) {
            return Err(Error::Parse(format!("vertex {vertex} outside 1..5")));
        }
        Ok(AtomIndex((face.index() * 5) as u8 + vertex - 1))
    }

    pub fn from_flat(i: usize) -> AtomIndex {
        assert!(i < N_ATOMS);
        AtomIndex(i as u8)
    }

    #[inline]
    pub fn flat(self) -> usize {
        self.0 as usize
    }

    pub fn face(self) -> FiveCycle {
        FiveCycle(tables().faces[self.0 as usize / 5])
    }

    /// 1-based vertex label k.
    pub fn vertex(self) -> u8 {
        self.0 % 5 + 1
    }
}

impl fmt::Display for AtomIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.face(), self.vertex())
    }
}

impl FromStr for AtomIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<AtomIndex> {
        let (c, k) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad atom label {s:?}")))?;
        let face = FiveCycle::new(c.parse()?)?;
        let k: u8 = k.trim().parse().map_err(|_| Error::Parse(format!("bad vertex in {s:?}")))?;
        AtomIndex::new(face, k)
    }
}

/// Canonical iteration order: faces in canonical order, vertices 1..5.
/// Position 0 is ((12345),1).
pub fn enumerate_atoms() -> Vec<AtomIndex> {
    (0..N_ATOMS).map(AtomIndex::from_flat).collect()
}

/// S(τ,k) = (τ, τ(k)).
pub fn single_bond(i: AtomIndex) -> AtomIndex {
    AtomIndex(tables().single[i.flat()])
}

/// S⁻¹(τ,k) = (τ, τ⁻¹(k)).
pub fn single_bond_inv(i: AtomIndex) -> AtomIndex {
    AtomIndex(tables().single_inv[i.flat()])
}

/// D(τ,k) = (σ,k) with σ = (k, τ²(k), τ(k), τ⁴(k), τ³(k)).
pub fn double_bond(i: AtomIndex) -> AtomIndex {
    AtomIndex(tables().double[i.flat()])
}

/// Element (σ, ±1) of A5 x Z2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement {
    pub perm: Perm,
    pub sign: i8,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { perm: Perm::IDENTITY, sign: 1 };

    pub fn new(perm: Perm, sign: i8) -> Result<GroupElement> {
        if !perm.is_even() || (sign != 1 && sign != -1) {
            return Err(Error::Parse(format!("({perm},{sign}) is not in A5 x Z2")));
        }
        Ok(GroupElement { perm, sign })
    }

    /// a = (23)(45).
    pub fn a() -> GroupElement {
        GroupElement { perm: Perm::from_cycles(&[&[2, 3], &[4, 5]]), sign: 1 }
    }

    /// b = (12345).
    pub fn b() -> GroupElement {
        GroupElement { perm: Perm::from_cycles(&[&[1, 2, 3, 4, 5]]), sign: 1 }
    }

    /// The central element -1.
    pub fn minus_one() -> GroupElement {
        GroupElement { perm: Perm::IDENTITY, sign: -1 }
    }

    pub fn mul(self, other: GroupElement) -> GroupElement {
        GroupElement { perm: self.perm.compose(other.perm), sign: self.sign * other.sign }
    }

    pub fn inverse(self) -> GroupElement {
        GroupElement { perm: self.perm.inverse(), sign: self.sign }
    }

    /// Position in `GroupElement::all()`.
    pub fn index(self) -> usize {
        let a5 = tables().a5.binary_search(&self.perm).expect("even permutation");
        2 * a5 + usize::from(self.sign < 0)
    }

    pub fn from_index(i: usize) -> GroupElement {
        GroupElement { perm: tables().a5[i / 2], sign: if i.is_multiple_of(2) { 1 } else { -1 } }
    }

    /// The 120 elements, (σ,+1) before (σ,-1), σ in lexicographic order.
    pub fn all() -> Vec<GroupElement> {
        (0..120).map(GroupElement::from_index).collect()
    }

    /// Index action g·(τ,k).
    #[inline]
    pub fn act_index(self, i: AtomIndex) -> AtomIndex {
        AtomIndex(tables().action[self.index()][i.flat()])
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.perm, self.sign)
    }
}

/// ρ(g) ∈ O(3): ρ(a) = A, ρ(b) = B, ρ(-1) = -Id.
pub fn rho(g: GroupElement) -> Matrix3<f64> {
    let t = tables();
    let m = t.rho[t.a5.binary_search(&g.perm).expect("even permutation")];
    if g.sign < 0 {
        -m
    } else {
        m
    }
}

/// The matrix A (rotation by π about an axis through two antipodal double bonds).
pub fn matrix_a() -> Matrix3<f64> {
    let r5 = 5f64.sqrt();
    Matrix3::new(-1.0 / r5, 0.0, 2.0 / r5, 0.0, -1.0, 0.0, 2.0 / r5, 0.0, 1.0 / r5)
}

/// The matrix B (rotation by 2π/5 about the z-axis).
pub fn matrix_b() -> Matrix3<f64> {
    let c = (-1.0 + 5f64.sqrt()) / 4.0;
    let s = ((5.0 + 5f64.sqrt()) / 8.0).sqrt();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Infinitesimal rotation generators J1, J2, J3.
pub fn rotation_generator(j: usize) -> Matrix3<f64> {
    match j {
        0 => Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
        1 => Matrix3::new(0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0),
        2 => Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        _ => panic!("rotation generator index {j} out of range"),
    }
}

/// Positions of the 60 atoms in the shared layout (Å).
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub pos: Vec<Vector3<f64>>,
}

impl Configuration {
    pub fn zeros() -> Configuration {
        Configuration { pos: vec![Vector3::zeros(); N_ATOMS] }
    }

    pub fn from_flat(x: &[f64]) -> Configuration {
        assert_eq!(x.len(), DIM);
        Configuration { pos: x.chunks_exact(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.pos.iter().flat_map(|v| [v.x, v.y, v.z]).collect()
    }

    pub fn barycenter(&self) -> Vector3<f64> {
        self.pos.iter().sum::<Vector3<f64>>() / N_ATOMS as f64
    }

    /// Smallest interatomic distance.
    pub fn min_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..N_ATOMS {
            for j in i + 1..N_ATOMS {
                m = m.min((self.pos[i] - self.pos[j]).norm());
            }
        }
        m
    }

    pub fn is_collision_free(&self, tol: f64) -> bool {
        self.min_distance() > tol
    }

    /// Rows (face, vertex, x, y, z) in layout order.
    pub fn rows(&self) -> Vec<(String, u8, f64, f64, f64)> {
        enumerate_atoms()
            .into_iter()
            .map(|i| {
                let p = self.pos[i.flat()];
                (i.face().to_string(), i.vertex(), p.x, p.y, p.z)
            })
            .collect()
    }
}

/// (g·u)_{g·i} = R u_i.
pub fn act(g: GroupElement, r: &Matrix3<f64>, u: &Configuration) -> Configuration {
    let row = &tables().action[g.index()];
    let mut out = Configuration::zeros();
    for i in 0..N_ATOMS {
        out.pos[row[i] as usize] = r * u.pos[i];
    }
    out
}

/// Same action on a flat 180-vector.
pub fn act_flat(g: GroupElement, r: &Matrix3<f64>, v: &[f64], out: &mut [f64]) {
    let row = &tables().action[g.index()];
    for i in 0..N_ATOMS {
        let w = r * Vector3::new(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
        let j = row[i] as usize;
        out[3 * j..3 * j + 3].copy_from_slice(w.as_slice());
    }
}

/// The diagonal action u ↦ g·u with spatial part ρ(g).
pub fn act_diag(g: GroupElement, u: &Configuration) -> Configuration {
    act(g, &rho(g), u)
}

struct Tables {
    c4: Vec<Perm>,
    faces: [Perm; 12],
    single: [u8; N_ATOMS],
    single_inv: [u8; N_ATOMS],
    double: [u8; N_ATOMS],
    a5: Vec<Perm>,
    rho: Vec<Matrix3<f64>>,
    action: Vec<[u8; N_ATOMS]>,
}

fn cycle_perm(c: &[u8; 5]) -> Perm {
    Perm::from_cycles(&[c.as_slice()])
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(build_tables)
}

fn build_tables() -> Tables {
    let c4: Vec<Perm> = C4_CYCLES.iter().map(cycle_perm).collect();
    let mut sorted: Vec<(String, Perm)> = c4.iter().map(|p| (p.to_string(), *p)).collect();
    sorted.sort();
    let faces: [Perm; 12] = std::array::from_fn(|i| sorted[i].1);
    let face_of = |p: Perm| faces.iter().position(|f| *f == p).expect("face in C4") as u8;
    let flat = |f: u8, k: u8| f * 5 + k;

    let mut single = [0u8; N_ATOMS];
    let mut single_inv = [0u8; N_ATOMS];
    let mut double = [0u8; N_ATOMS];
    for (f, &tau) in faces.iter().enumerate() {
        let f = f as u8;
        let tau2 = tau.pow(2);
        let tau3 = tau.pow(3);
        let tau4 = tau.pow(4);
        for k in 0..5u8 {
            single[flat(f, k) as usize] = flat(f, tau.apply(k));
            single_inv[flat(f, k) as usize] = flat(f, tau4.apply(k));
            let sigma = Perm::from_cycles(&[&[
                k + 1,
                tau2.apply(k) + 1,
                tau.apply(k) + 1,
                tau4.apply(k) + 1,
                tau3.apply(k) + 1,
            ]]);
            double[flat(f, k) as usize] = flat(face_of(sigma), k);
        }
    }

    let a5 = Perm::alternating_group();
    let gens = [(GroupElement::a().perm, matrix_a()), (GroupElement::b().perm, matrix_b())];
    let mut rho: Vec<Option<Matrix3<f64>>> = vec![None; a5.len()];
    let pos = |p: Perm| a5.binary_search(&p).expect("even");
    rho[pos(Perm::IDENTITY)] = Some(Matrix3::identity());
    let mut frontier = vec![Perm::IDENTITY];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in frontier {
            let mg = rho[pos(g)].expect("visited");
            for (s, ms) in &gens {
                let h = g.compose(*s);
                if rho[pos(h)].is_none() {
                    rho[pos(h)] = Some(mg * ms);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let rho: Vec<Matrix3<f64>> = rho.into_iter().map(|m| m.expect("A5 generated by a, b")).collect();

    let mut action = Vec::with_capacity(120);
    for gi in 0..120 {
        let sigma = a5[gi / 2];
        let neg = gi % 2 == 1;
        let mut row = [0u8; N_ATOMS];
        for (f, &tau) in faces.iter().enumerate() {
            let mut t = sigma.compose(tau).compose(sigma.inverse());
            if neg {
                t = t.inverse();
            }
            for k in 0..5u8 {
                row[flat(f as u8, k) as usize] = flat(face_of(t), sigma.apply(k));
            }
        }
        action.push(row);
    }

    Tables { c4, faces, single, single_inv, double, a5, rho, action }
}

/// The twelve 5-cycles of class C5 (the other class of 5-cycles in A5).
pub fn c5_cycles() -> Vec<Perm> {
    C5_CYCLES.iter().map(cycle_perm).collect()
}

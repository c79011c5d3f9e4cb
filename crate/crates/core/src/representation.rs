//! Characters of A5 x Z2, isotypical projections on the 180-dimensional
//! configuration space, the labelled slice spectrum of the Hessian at the
//! equilibrium, and the critical numbers λ_{j,l} = l/√μ_j.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcefield::{hessian, ForceFieldParams};
use crate::molecule::{enumerate_atoms, rho, rotation_generator, A5Class, Configuration, GroupElement, DIM, N_ATOMS};

/// Irreducible representation of A5 x Z2: |n| picks the A5 row, the sign
/// says whether -1 acts as +Id or -Id.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct IsotypicalLabel(i8);

impl IsotypicalLabel {
    pub fn new(n: i32) -> Result<IsotypicalLabel> {
        if n != 0 && n.abs() <= 5 {
            Ok(IsotypicalLabel(n as i8))
        } else {
            Err(Error::Parse(format!("isotypical label {n} outside ±1..±5")))
        }
    }

    pub fn n(self) -> i32 {
        self.0 as i32
    }

    pub fn row(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    /// Dimension of the real irreducible representation.
    pub fn dim(self) -> usize {
        [0, 1, 4, 5, 3, 3][self.row()]
    }

    /// 1, -1, 2, -2, ..., 5, -5.
    pub fn all() -> [IsotypicalLabel; 10] {
        std::array::from_fn(|k| {
            let n = (k / 2 + 1) as i8;
            IsotypicalLabel(if k % 2 == 0 { n } else { -n })
        })
    }
}

impl TryFrom<i32> for IsotypicalLabel {
    type Error = Error;
    fn try_from(n: i32) -> Result<Self> {
        IsotypicalLabel::new(n)
    }
}

impl From<IsotypicalLabel> for i32 {
    fn from(l: IsotypicalLabel) -> i32 {
        l.n()
    }
}

impl fmt::Display for IsotypicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn phi_plus() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn phi_minus() -> f64 {
    (1.0 - 5f64.sqrt()) / 2.0
}

/// Character of A5 row `row` (1..5) on a class.
pub fn a5_character(row: usize, c: A5Class) -> f64 {
    let col = match c {
        A5Class::Identity => 0,
        A5Class::Involution => 1,
        A5Class::ThreeCycle => 2,
        A5Class::C4 => 3,
        A5Class::C5 => 4,
    };
    let t: [[f64; 5]; 5] = [
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [4.0, 0.0, 1.0, -1.0, -1.0],
        [5.0, 1.0, -1.0, 0.0, 0.0],
        [3.0, -1.0, 0.0, phi_plus(), phi_minus()],
        [3.0, -1.0, 0.0, phi_minus(), phi_plus()],
    ];
    t[row - 1][col]
}

/// χ_n(g).
pub fn character(n: IsotypicalLabel, g: GroupElement) -> f64 {
    let c = a5_character(n.row(), A5Class::of(g.perm));
    if g.sign < 0 && n.n() < 0 {
        -c
    } else {
        c
    }
}

/// 180 x 180 matrix of v ↦ g·v with spatial part ρ(g).
pub fn action_matrix(g: GroupElement) -> DMatrix<f64> {
    let r = rho(g);
    let mut m = DMatrix::zeros(DIM, DIM);
    for i in enumerate_atoms() {
        let j = g.act_index(i).flat();
        m.view_mut((3 * j, 3 * i.flat()), (3, 3)).copy_from(&r);
    }
    m
}

/// P_n = dim/120 Σ_g χ_n(g) g as a dense matrix.
pub fn projector(n: IsotypicalLabel) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(DIM, DIM);
    let scale = n.dim() as f64 / 120.0;
    for g in GroupElement::all() {
        let c = character(n, g) * scale;
        if c == 0.0 {
            continue;
        }
        let r = rho(g) * c;
        for i in enumerate_atoms() {
            let j = g.act_index(i).flat();
            let mut blk = m.view_mut((3 * j, 3 * i.flat()), (3, 3));
            blk += r;
        }
    }
    m
}

/// P_n v without forming the matrix.
pub fn isotypical_projection(n: IsotypicalLabel, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; DIM];
    let scale = n.dim() as f64 / 120.0;
    for g in GroupElement::all() {
        let c = character(n, g) * scale;
        if c == 0.0 {
            continue;
        }
        let r = rho(g) * c;
        for i in enumerate_atoms() {
            let j = g.act_index(i).flat();
            let w = r * Vector3::new(v[3 * i.flat()], v[3 * i.flat() + 1], v[3 * i.flat() + 2]);
            for a in 0..3 {
                out[3 * j + a] += w[a];
            }
        }
    }
    out
}

/// One row of the reference eigenvalue table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceMode {
    pub j: usize,
    pub multiplicity: usize,
    pub mu: f64,
    pub lambda: f64,
    pub n: i32,
}

const fn rm(j: usize, multiplicity: usize, mu: f64, lambda: f64, n: i32) -> ReferenceMode {
    ReferenceMode { j, multiplicity, mu, lambda, n }
}

/// Published eigenvalues of the slice Hessian, in decreasing order.
pub const REFERENCE_MODES: [ReferenceMode; 46] = [
    rm(1, 5, 176.536, 0.075263, -3),
    rm(2, 5, 176.366, 0.075300, 3),
    rm(3, 4, 164.083, 0.078067, 2),
    rm(4, 4, 160.292, 0.078985, -2),
    rm(5, 3, 159.290, 0.079233, -5),
    rm(6, 5, 148.597, 0.082034, 3),
    rm(7, 3, 141.071, 0.084194, -4),
    rm(8, 3, 140.573, 0.084343, 5),
    rm(9, 1, 135.632, 0.085866, 1),
    rm(10, 4, 134.935, 0.086087, -2),
    rm(11, 4, 129.544, 0.087860, 2),
    rm(12, 5, 125.431, 0.089289, -3),
    rm(13, 3, 107.719, 0.096350, 4),
    rm(14, 5, 98.5525, 0.100732, 3),
    rm(15, 3, 93.4648, 0.103437, -5),
    rm(16, 5, 87.7541, 0.106750, -3),
    rm(17, 3, 83.9718, 0.109127, -4),
    rm(18, 4, 71.6288, 0.118156, 2),
    rm(19, 5, 67.1181, 0.122062, 3),
    rm(20, 1, 59.3865, 0.129765, -1),
    rm(21, 3, 50.4797, 0.140748, -5),
    rm(22, 4, 47.5646, 0.144997, -2),
    rm(23, 3, 42.2947, 0.153765, 4),
    rm(24, 3, 41.3918, 0.155433, 5),
    rm(25, 4, 33.9885, 0.171528, -2),
    rm(26, 5, 28.8031, 0.186329, -3),
    rm(27, 5, 27.4795, 0.190764, 3),
    rm(28, 3, 27.3153, 0.191336, 5),
    rm(29, 4, 25.5388, 0.197879, -2),
    rm(30, 4, 22.7212, 0.209790, 2),
    rm(31, 5, 19.4536, 0.226725, -3),
    rm(32, 5, 19.3377, 0.227404, 3),
    rm(33, 3, 19.2379, 0.227993, -5),
    rm(34, 4, 16.5356, 0.245918, 2),
    rm(35, 3, 16.5255, 0.245993, 5),
    rm(36, 3, 15.1033, 0.257314, -4),
    rm(37, 3, 10.3908, 0.310224, 4),
    rm(38, 1, 10.2520, 0.312317, 1),
    rm(39, 5, 10.1098, 0.314506, -3),
    rm(40, 3, 9.03077, 0.332765, -4),
    rm(41, 4, 9.02666, 0.332841, 2),
    rm(42, 5, 6.99929, 0.377984, 3),
    rm(43, 5, 6.95354, 0.379225, -3),
    rm(44, 3, 5.42311, 0.429414, -5),
    rm(45, 4, 5.26429, 0.435843, -2),
    rm(46, 5, 3.04384, 0.573177, 3),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMode {
    pub j: usize,
    pub mu: f64,
    pub multiplicity: usize,
    pub label: IsotypicalLabel,
    pub lambda1: f64,
    /// Share of the eigenspace lying in the assigned isotypical component.
    pub dominance: f64,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub modes: Vec<SpectralMode>,
    /// Orthonormal eigenvectors for each mode, 180 x multiplicity.
    pub bases: Vec<DMatrix<f64>>,
    /// Isotypical label of the rotational zero modes.
    pub rotation_label: Option<IsotypicalLabel>,
    /// Isotypical label of the translations.
    pub translation_label: Option<IsotypicalLabel>,
    /// Orthonormal basis of the slice, 180 x 174.
    pub slice_basis: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Relative gap between consecutive eigenvalues that starts a new cluster.
    pub cluster_gap: f64,
    /// Required share of the dominant label in each cluster.
    pub dominance: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { cluster_gap: 1e-6, dominance: 0.99 }
    }
}

/// Translations ℰ_1..ℰ_3 and infinitesimal rotations 𝒥_k u.
pub fn symmetry_directions(u: &Configuration) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        out.push(DVector::from_fn(DIM, |r, _| if r % 3 == k { 1.0 } else { 0.0 }));
    }
    for k in 0..3 {
        let j = rotation_generator(k);
        let mut w = DVector::zeros(DIM);
        for a in 0..N_ATOMS {
            w.rows_mut(3 * a, 3).copy_from(&(j * u.pos[a]));
        }
        out.push(w);
    }
    out
}

/// Orthonormal basis of the complement of `span` (modified Gram-Schmidt,
/// completed with coordinate vectors).
pub fn orthogonal_complement(span: &[DVector<f64>]) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let push = |v: &DVector<f64>, keep: bool, basis: &mut Vec<DVector<f64>>| -> Option<DVector<f64>> {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let n = w.norm();
        if n > 1e-8 {
            w /= n;
            basis.push(w.clone());
            if keep {
                return Some(w);
            }
        }
        None
    };
    for v in span {
        push(v, false, &mut basis);
    }
    let mut out = Vec::new();
    for k in 0..DIM {
        let e = DVector::from_fn(DIM, |r, _| if r == k { 1.0 } else { 0.0 });
        if let Some(w) = push(&e, true, &mut basis) {
            out.push(w);
        }
    }
    DMatrix::from_columns(&out)
}

fn dominant_label(vecs: &DMatrix<f64>) -> (IsotypicalLabel, f64, f64) {
    let total: f64 = vecs.norm_squared();
    let mut shares: Vec<(f64, IsotypicalLabel)> = IsotypicalLabel::all()
        .into_iter()
        .map(|n| {
            let s: f64 = vecs
                .column_iter()
                .map(|c| isotypical_projection(n, c.as_slice()).iter().map(|x| x * x).sum::<f64>())
                .sum();
            (s / total, n)
        })
        .collect();
    shares.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
    (shares[0].1, shares[0].0, shares[1].0)
}

/// Labelled spectrum of the Hessian restricted to the slice at `u0`.
pub fn spectrum(u0: &Configuration, p: &ForceFieldParams) -> Result<Spectrum> {
    spectrum_from_hessian(u0, &hessian(u0, p)?, SpectrumOptions::default())
}

pub fn spectrum_from_hessian(u0: &Configuration, h: &DMatrix<f64>, opts: SpectrumOptions) -> Result<Spectrum> {
    let dirs = symmetry_directions(u0);
    let b = orthogonal_complement(&dirs);
    let hs = b.transpose() * h * &b;
    let hs = (&hs + hs.transpose()) * 0.5;
    let eig = SymmetricEigen::new(hs);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].partial_cmp(&eig.eigenvalues[a]).expect("finite eigenvalues"));

    let mut modes = Vec::new();
    let mut bases = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        let v0 = eig.eigenvalues[order[start]];
        while end < order.len() {
            let v = eig.eigenvalues[order[end]];
            if (eig.eigenvalues[order[end - 1]] - v).abs() > opts.cluster_gap * v0.abs().max(1.0) {
                break;
            }
            end += 1;
        }
        let cols: Vec<DVector<f64>> = order[start..end].iter().map(|&k| &b * eig.eigenvectors.column(k)).collect();
        let vecs = DMatrix::from_columns(&cols);
        let mu = order[start..end].iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / (end - start) as f64;
        let cluster = modes.len();
        let (label, share, second) = dominant_label(&vecs);
        if share < opts.dominance || second > 1.0 - opts.dominance {
            return Err(Error::ClusterAmbiguity { cluster: cluster + 1 });
        }
        if label.dim() != end - start {
            return Err(Error::MultiplicityMismatch { cluster: cluster + 1, found: end - start, label: label.n() });
        }
        modes.push(SpectralMode {
            j: cluster + 1,
            mu,
            multiplicity: end - start,
            label,
            lambda1: 1.0 / mu.sqrt(),
            dominance: share,
        });
        bases.push(vecs);
        start = end;
    }

    let label_of = |vs: &[DVector<f64>]| {
        let m = DMatrix::from_columns(vs);
        let (l, share, _) = dominant_label(&m);
        (share > opts.dominance).then_some(l)
    };
    Ok(Spectrum {
        modes,
        bases,
        translation_label: label_of(&dirs[..3]),
        rotation_label: label_of(&dirs[3..]),
        slice_basis: b,
    })
}

/// Multiplier of the identity on the block 𝒱_{j,l} of the linearization.
pub fn linearized_block(lambda: f64, mu: f64, l: u32) -> f64 {
    let l2 = (l * l) as f64;
    1.0 - (lambda * lambda * mu + 1.0) / (l2 + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalNumber {
    pub lambda: f64,
    pub j: usize,
    pub l: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosePair {
    pub a: CriticalNumber,
    pub b: CriticalNumber,
    pub gap: f64,
    /// Both critical numbers belong to the same isotypical type.
    pub isotypical: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalNumbers {
    /// Ascending, all λ_{j,l} up to the largest λ_{j,1}.
    pub entries: Vec<CriticalNumber>,
    pub min_gap: f64,
    pub tolerance: f64,
    pub close_pairs: Vec<ClosePair>,
}

impl CriticalNumbers {
    pub fn position(&self, j: usize, l: u32) -> Option<usize> {
        self.entries.iter().position(|c| c.j == j && c.l == l)
    }
}

/// Critical numbers λ_{j,l} = l/√μ_j in the window up to the largest λ_{j,1},
/// with l ≤ l_max, and every pair closer than `tolerance`.
pub fn critical_numbers(modes: &[SpectralMode], l_max: u32, tolerance: f64) -> CriticalNumbers {
    let top = modes.iter().map(|m| m.lambda1).fold(0.0, f64::max);
    let mut entries = Vec::new();
    for m in modes {
        for l in 1..=l_max.max(1) {
            let lambda = l as f64 / m.mu.sqrt();
            if lambda > top * (1.0 + 1e-12) {
                break;
            }
            entries.push(CriticalNumber { lambda, j: m.j, l });
        }
    }
    entries.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite"));
    let label = |j: usize| modes.iter().find(|m| m.j == j).map(|m| m.label);
    let mut min_gap = f64::INFINITY;
    let mut close_pairs = Vec::new();
    for w in entries.windows(2) {
        let gap = w[1].lambda - w[0].lambda;
        min_gap = min_gap.min(gap);
        if gap < tolerance {
            close_pairs.push(ClosePair { a: w[0], b: w[1], gap, isotypical: label(w[0].j) == label(w[1].j) });
        }
    }
    CriticalNumbers { entries, min_gap, tolerance, close_pairs }
}

/// The reference table as spectral modes.
pub fn reference_spectrum() -> Vec<SpectralMode> {
    REFERENCE_MODES
        .iter()
        .map(|r| SpectralMode {
            j: r.j,
            mu: r.mu,
            multiplicity: r.multiplicity,
            label: IsotypicalLabel::new(r.n).expect("table label"),
            lambda1: 1.0 / r.mu.sqrt(),
            dominance: 1.0,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let l4 = IsotypicalLabel::new(4).unwrap();
        assert!((character(l4, GroupElement::b()) - phi_plus()).abs() < 1e-15);
        let lm3 = IsotypicalLabel::new(-3).unwrap();
        assert_eq!(character(lm3, GroupElement::minus_one()), -5.0);
    }

    #[test]
    fn orthogonality() {
        let all = GroupElement::all();
        for m in IsotypicalLabel::all() {
            for n in IsotypicalLabel::all() {
                let s: f64 = all.iter().map(|&g| character(m, g) * character(n, g)).sum::<f64>() / 120.0;
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12, "{m} {n} {s}");
            }
        }
    }

    #[test]
    fn reference_table_consistency() {
        let total: usize = REFERENCE_MODES.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 174);
        for r in REFERENCE_MODES {
            assert_eq!(IsotypicalLabel::new(r.n).unwrap().dim(), r.multiplicity);
            assert!((1.0 / r.mu.sqrt() - r.lambda).abs() < 2e-6, "{r:?}");
        }
    }

    #[test]
    fn block_multiplier() {
        let mu: f64 = 100.0;
        assert!(linearized_block(2.0 / mu.sqrt(), mu, 2).abs() < 1e-15);
        assert!((linearized_block(0.0, mu, 3) - 0.9).abs() < 1e-15);
        // decreasing in λ: positive below the critical number, negative above
        let c = 1.0 / mu.sqrt();
        assert!(linearized_block(c * 0.99, mu, 1) > 0.0);
        assert!(linearized_block(c * 1.01, mu, 1) < 0.0);
    }
}

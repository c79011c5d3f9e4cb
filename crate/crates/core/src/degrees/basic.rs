//! Brouwer degrees by the mark recurrence, the twisted Γ x S¹ basic degree,
//! the map Ψ between the two settings, and the full gradient basic degree of
//! C ⊗ V_n assembled from them.

use super::element::OrbitTypeElement;
use super::lattice::{fixed_dim_o2, fixed_dim_s1, isotropy_types, o2_lattice, rotation_part, s1, s1_lattice, OrbitLattice, TOP_S1};
use crate::error::{Error, Result};
use crate::representation::IsotypicalLabel;

/// Classes of `lat` in the Burnside ring (finite Weyl group), largest first.
fn phi0_classes(lat: &OrbitLattice) -> Vec<usize> {
    let mut v: Vec<usize> = (0..lat.len()).filter(|&i| lat.classes[i].phi0()).collect();
    v.sort_by_key(|&i| (!lat.classes[i].is_top(), std::cmp::Reverse(lat.classes[i].order()), i));
    v
}

/// Möbius inversion of marks over the Burnside part of the O(2) lattice:
/// x_H = [mark_H - Σ_{L>H} x_L |(G/L)^H|] / |W(H)|.
pub fn from_marks(mark: impl Fn(usize) -> i64) -> Result<OrbitTypeElement> {
    let lat = o2_lattice();
    let order = phi0_classes(lat);
    let mut coeff = vec![0i64; lat.len()];
    for (pos, &h) in order.iter().enumerate() {
        let mut acc = mark(h);
        for &l in &order[..pos] {
            if coeff[l] != 0 {
                acc -= coeff[l] * lat.fixed_points(h, l) as i64;
            }
        }
        let w = lat.weyl_order(h) as i64;
        if acc % w != 0 {
            return Err(Error::Data(format!("mark inversion not integral at {}", lat.classes[h].id)));
        }
        coeff[h] = acc / w;
    }
    let mut e = OrbitTypeElement::new();
    for (i, c) in coeff.into_iter().enumerate() {
        e.add_term(&lat.classes[i].id, c);
    }
    Ok(e)
}

/// mark_H(x) = Σ_L x_L |(G/L)^H| over the Burnside part.
pub fn marks(x: &OrbitTypeElement) -> Result<Vec<i64>> {
    let lat = o2_lattice();
    let terms: Vec<(usize, i64)> = x.terms().map(|(k, v)| Ok((lat.get(k)?, v))).collect::<Result<_>>()?;
    Ok((0..lat.len())
        .map(|h| {
            if !lat.classes[h].phi0() {
                return 0;
            }
            terms.iter().filter(|(l, _)| lat.classes[*l].phi0()).map(|&(l, v)| v * lat.fixed_points(h, l) as i64).sum()
        })
        .collect())
}

/// Brouwer Γ x O(2)-degree of -Id on the unit ball of ⊕ C ⊗ V_n (O(2)
/// acting with l = 1 on every summand).
pub fn brouwer_degree_neg_id(summands: &[IsotypicalLabel]) -> Result<OrbitTypeElement> {
    let lat = o2_lattice();
    from_marks(|h| {
        let d: usize = summands.iter().map(|&n| fixed_dim_o2(&lat.classes[h], n, 1)).sum();
        if d.is_multiple_of(2) {
            1
        } else {
            -1
        }
    })
}

/// Product in the Burnside ring of Γ x O(2).
pub fn burnside_multiply(a: &OrbitTypeElement, b: &OrbitTypeElement) -> Result<OrbitTypeElement> {
    let ma = marks(a)?;
    let mb = marks(b)?;
    for x in [a, b] {
        for (k, _) in x.terms() {
            if !o2_lattice().classes[o2_lattice().get(k)?].phi0() {
                return Err(Error::UnsupportedPair(format!("{k} is not in the Burnside ring")));
            }
        }
    }
    from_marks(|h| ma[h] * mb[h])
}

/// Twisted Γ x S¹ basic degree of C ⊗ V_n, S¹ acting by multiplication:
/// n_L = -[dim_C V^L + Σ_{L'>L} n_{L'} |(G/L')^L|] / |W(L)/S¹|.
pub fn s1_basic_degree(n: IsotypicalLabel) -> Result<OrbitTypeElement> {
    let lat = s1_lattice();
    let mut types = isotropy_types(lat, |c| fixed_dim_s1(c, n));
    types.sort_by_key(|&i| (std::cmp::Reverse(lat.classes[i].order()), i));
    let mut coeff = vec![0i64; lat.len()];
    for (pos, &l) in types.iter().enumerate() {
        let mut acc = fixed_dim_s1(&lat.classes[l], n) as i64;
        for &u in &types[..pos] {
            acc += coeff[u] * lat.fixed_points(l, u) as i64;
        }
        let w = lat.weyl_order(l) as i64;
        if acc % w != 0 {
            return Err(Error::Data(format!("S1 recurrence not integral at {}", lat.classes[l].id)));
        }
        coeff[l] = -acc / w;
    }
    let mut e = OrbitTypeElement::single(TOP_S1, 1);
    for (i, c) in coeff.into_iter().enumerate() {
        e.add_term(&lat.classes[i].id, c);
    }
    Ok(e)
}

/// Ψ on one O(2)-side orbit type.
pub fn psi_type(id: &str) -> Result<OrbitTypeElement> {
    let lat = o2_lattice();
    let c = &lat.classes[lat.get(id)?];
    let Some(g) = &c.group else {
        return Ok(OrbitTypeElement::single(TOP_S1, 1));
    };
    let s1l = s1_lattice();
    let (k, kp) = rotation_part(g);
    let ki = s1().classify(&k)?;
    let mut e = OrbitTypeElement::single(&s1l.classes[ki].id, 1);
    if !c.dihedral {
        let kpi = s1().classify(&kp)?;
        e.add_term(&s1l.classes[kpi].id, 1);
    }
    Ok(e)
}

/// Ψ extended additively.
pub fn psi_homomorphism(x: &OrbitTypeElement) -> Result<OrbitTypeElement> {
    let mut out = OrbitTypeElement::new();
    for (k, v) in x.terms() {
        out.add(&psi_type(k)?, v);
    }
    Ok(out)
}

/// Full gradient basic degree of C ⊗ V_n: the Burnside part from marks, the
/// remaining coefficients (types with infinite Weyl group) read off from
/// the S¹ basic degree through Ψ.
pub fn basic_gradient_degree_computed(n: IsotypicalLabel) -> Result<OrbitTypeElement> {
    let lat = o2_lattice();
    let mut deg = brouwer_degree_neg_id(&[n])?;
    let mut residual = s1_basic_degree(n)?;
    residual.add(&psi_homomorphism(&deg)?, -1);
    let iso = isotropy_types(lat, |c| fixed_dim_o2(c, n, 1));
    for &h in iso.iter().filter(|&&h| !lat.classes[h].phi0()) {
        let id = &lat.classes[h].id;
        let image = psi_type(id)?;
        let (k, mult) = image.terms().next().map(|(k, v)| (k.to_string(), v)).expect("nonempty image");
        let mult = if image.len() == 1 { mult } else { 1 };
        let r = residual.coefficient(&k);
        if r % mult != 0 {
            return Err(Error::Data(format!("Ψ residual {r} at {k} not divisible by {mult}")));
        }
        let x = r / mult;
        deg.add_term(id, x);
        residual.add(&image, -x);
    }
    if !residual.is_zero() {
        return Err(Error::Data(format!("Ψ residual left over: {residual}")));
    }
    Ok(deg)
}

/// Relabel an l = 1 orbit type for l-folded O(2) action: every O(2)
/// component D_m / Z_m becomes D_{lm} / Z_{lm}.
pub fn fold_id(id: &str, l: u32) -> String {
    if l == 1 {
        return id.to_string();
    }
    let mut toks: Vec<String> = id.split(' ').map(str::to_string).collect();
    let k = if toks.len() > 2 && toks[1] == "x" { 2 } else { 3 };
    if let Some(t) = toks.get_mut(k) {
        if let (Some(kind), Ok(m)) = (t.chars().next(), t[1..].parse::<u32>()) {
            if kind == 'D' || kind == 'Z' {
                *t = format!("{kind}{}", m * l);
            }
        }
    }
    toks.join(" ")
}

pub fn fold(x: &OrbitTypeElement, l: u32) -> OrbitTypeElement {
    let mut out = OrbitTypeElement::new();
    for (k, v) in x.terms() {
        out.add_term(&fold_id(k, l), v);
    }
    out
}

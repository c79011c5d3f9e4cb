use std::path::PathBuf;

use anyhow::{Context, Result};
use c60::continuation::{
    arclength_continue, conservation_drift, newton_correct, sample_states, seed_from_mode, verify_symmetry, OrbitBranch,
    PeriodicOrbit,
};
use c60::degrees::omega::{Factor, MaximalTerm};
use c60::degrees::{omega_invariant, OmegaInvariant, TOP_O2};
use c60::equilibrium::{find_minimizer, geometric_seed, Equilibrium};
use c60::forcefield::{hessian, ForceFieldParams};
use c60::molecule::{AtomIndex, DIM};
use c60::representation::{critical_numbers, spectrum_from_hessian, CriticalNumbers, Spectrum};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::{sanitize, OutDir};

/// Shifts of every orbit-type group are multiples of 1/60 of the period.
pub const SYMMETRY_SAMPLES: usize = 60;

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: OutDir,
    pub vdw: bool,
}

impl Ctx {
    pub fn params(&self) -> &ForceFieldParams {
        &self.cfg.forcefield
    }
}

pub fn compute_equilibrium(ctx: &Ctx) -> Result<Equilibrium> {
    let p = ctx.params();
    find_minimizer(p, geometric_seed(p.r0), ctx.cfg.minimizer()).context("equilibrium")
}

pub fn compute_spectrum(ctx: &Ctx, eq: &Equilibrium) -> Result<Spectrum> {
    let h = hessian(&eq.u, ctx.params()).context("hessian")?;
    spectrum_from_hessian(&eq.u, &h, ctx.cfg.spectrum()).context("spectrum")
}

// ---- equilibrium ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub x0: f64,
    pub z0: f64,
    #[serde(rename = "dS")]
    pub d_s: f64,
    #[serde(rename = "dD")]
    pub d_d: f64,
    pub spread_s: f64,
    pub spread_d: f64,
    pub energy: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub vdw_enabled: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomRow {
    pub atom: usize,
    pub face: usize,
    pub vertex: u8,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn equilibrium_record(eq: &Equilibrium, p: &ForceFieldParams) -> EquilibriumRecord {
    EquilibriumRecord {
        x0: eq.xz.x,
        z0: eq.xz.z,
        d_s: eq.bonds.d_s,
        d_d: eq.bonds.d_d,
        spread_s: eq.bonds.spread_s,
        spread_d: eq.bonds.spread_d,
        energy: eq.energy,
        grad_inf_norm: eq.grad_inf_norm,
        iterations: eq.iterations,
        vdw_enabled: p.vdw_enabled,
    }
}

fn atom_rows(q: &[f64]) -> impl Iterator<Item = AtomRow> + '_ {
    q.chunks_exact(3).enumerate().map(|(i, c)| {
        let a = AtomIndex::from_flat(i);
        AtomRow { atom: i, face: a.face().index(), vertex: a.vertex(), x: c[0], y: c[1], z: c[2] }
    })
}

pub fn write_equilibrium(ctx: &Ctx, eq: &Equilibrium) -> Result<Vec<PathBuf>> {
    let rec = equilibrium_record(eq, ctx.params());
    let q = eq.u.to_flat();
    Ok(vec![
        ctx.out.write_json("equilibrium.json", "equilibrium", &rec)?,
        ctx.out.write_csv("equilibrium.csv", "equilibrium-atoms", atom_rows(&q))?,
    ])
}

// ---- spectrum and resonance ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeRow {
    pub j: usize,
    pub mult: usize,
    pub mu: f64,
    pub lambda: f64,
    pub n: i32,
    pub dominance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub modes: Vec<ModeRow>,
    pub multiplicity_sum: usize,
    pub rotation_label: Option<i32>,
    pub translation_label: Option<i32>,
}

pub fn spectrum_record(s: &Spectrum) -> SpectrumRecord {
    SpectrumRecord {
        modes: s
            .modes
            .iter()
            .map(|m| ModeRow { j: m.j, mult: m.multiplicity, mu: m.mu, lambda: m.lambda1, n: m.label.n(), dominance: m.dominance })
            .collect(),
        multiplicity_sum: s.modes.iter().map(|m| m.multiplicity).sum(),
        rotation_label: s.rotation_label.map(|l| l.n()),
        translation_label: s.translation_label.map(|l| l.n()),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub l_max: u32,
    pub resonant: bool,
    #[serde(flatten)]
    pub numbers: CriticalNumbers,
}

pub fn resonance(ctx: &Ctx, s: &Spectrum, l_max: u32) -> ResonanceRecord {
    let numbers = critical_numbers(&s.modes, l_max, ctx.cfg.tolerances.resonance_gap);
    ResonanceRecord { l_max, resonant: !numbers.close_pairs.is_empty(), numbers }
}

pub fn write_spectrum(ctx: &Ctx, s: &Spectrum) -> Result<Vec<PathBuf>> {
    Ok(vec![ctx.out.write_json("spectrum.json", "spectrum", &spectrum_record(s))?, write_resonance(ctx, &resonance(ctx, s, 64))?])
}

pub fn write_resonance(ctx: &Ctx, r: &ResonanceRecord) -> Result<PathBuf> {
    ctx.out.write_json("resonance_report.json", "resonance", r)
}

// ---- degrees ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermRow {
    pub id: String,
    pub coefficient: i64,
    pub maximal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OmegaRecord {
    pub j: usize,
    pub lambda: f64,
    pub n: i32,
    /// Whole element when known, else only the maximal terms; the unit
    /// type leads, the rest in id order.
    pub terms: Vec<TermRow>,
    /// Factored form, unit type first.
    pub formula: String,
    pub complete: bool,
    pub maximal: Vec<MaximalTerm>,
    /// Basic degrees multiplied in below the critical number.
    pub factors: Vec<Factor>,
}

pub fn omega_record(w: OmegaInvariant) -> OmegaRecord {
    let is_max = |id: &str| w.maximal.iter().any(|m| m.id == id);
    let mut terms: Vec<TermRow> = match &w.element {
        Some(e) => e.terms().map(|(id, c)| TermRow { id: id.into(), coefficient: c, maximal: is_max(id) }).collect(),
        None => w.maximal.iter().map(|m| TermRow { id: m.id.clone(), coefficient: m.coefficient, maximal: true }).collect(),
    };
    terms.retain(|t| t.coefficient != 0);
    terms.sort_by(|a, b| (a.id != TOP_O2).cmp(&(b.id != TOP_O2)).then_with(|| a.id.cmp(&b.id)));
    let mut formula = format!("(({TOP_O2}) - deg V[{},1])", w.n);
    for f in &w.factors {
        formula.push_str(&format!(" * deg V[{},{}]", f.n, f.l));
    }
    OmegaRecord { j: w.j0, lambda: w.lambda, n: w.n.n(), terms, formula, complete: w.element.is_some(), maximal: w.maximal, factors: w.factors }
}

pub fn write_omega(ctx: &Ctx, s: &Spectrum, j: usize) -> Result<(OmegaRecord, PathBuf)> {
    let w = omega_invariant(&s.modes, j).with_context(|| format!("omega at mode {j}"))?;
    let rec = omega_record(w);
    let path = ctx.out.write_json(&format!("omega_{j}.json"), "omega", &rec)?;
    Ok((rec, path))
}

// ---- continuation ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointRow {
    pub index: usize,
    pub period: f64,
    pub amplitude: f64,
    pub energy: f64,
    pub residual: f64,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub symmetry_violation: f64,
    pub brake_residual: Option<f64>,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    /// Initial phase state (q, p).
    pub state: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchRecord {
    pub mode: usize,
    pub orbit_type_id: String,
    pub seed_amplitude: f64,
    pub ds: f64,
    pub requested_steps: usize,
    pub steps: Vec<f64>,
    pub turning_points: Vec<usize>,
    pub points: Vec<PointRow>,
    /// Set when continuation stopped early.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub point: usize,
    pub t: f64,
    pub face: usize,
    pub vertex: u8,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub struct BranchRun {
    pub record: BranchRecord,
    pub json: PathBuf,
    pub csv: PathBuf,
    /// Library error that stopped the branch, if any.
    pub error: Option<c60::Error>,
}

pub fn branch_file(j: usize, id: &str) -> String {
    format!("branch_{j}_{}", sanitize(id))
}

fn point_row(index: usize, o: &PeriodicOrbit, ctx: &Ctx) -> Result<PointRow> {
    let p = ctx.params();
    let opts = ctx.cfg.shooting();
    let rep = verify_symmetry(o, None, SYMMETRY_SAMPLES, f64::INFINITY, p, &opts)?;
    let states = sample_states(o, SYMMETRY_SAMPLES, p, &opts)?;
    let (de, dg) = conservation_drift(&states, p)?;
    Ok(PointRow {
        index,
        period: o.period,
        amplitude: o.amplitude,
        energy: o.energy,
        residual: o.residual,
        multipliers: o.multipliers.to_vec(),
        iterations: o.iterations,
        symmetry_violation: rep.max_violation,
        brake_residual: rep.brake_residual,
        energy_drift: de,
        momentum_drift: dg,
        state: o.x0.to_flat(),
    })
}

/// Seeds on mode j, corrects, continues and writes the branch JSON and the
/// trajectory CSV. A failure after the first point still writes the
/// partial branch and is returned in `error`.
pub fn run_branch(ctx: &Ctx, s: &Spectrum, eq: &Equilibrium, j: usize, id: &str, steps: usize) -> Result<BranchRun> {
    let p = ctx.params();
    let opts = ctx.cfg.shooting();
    let c = &ctx.cfg.continuation;
    let u0 = eq.u.to_flat();
    let seed = seed_from_mode(s, j, &u0, c.amplitude, id)?;
    let first = newton_correct(&seed, &u0, p, &opts)?;
    let mut branch = OrbitBranch::new(j, u0, first);
    let error = arclength_continue(&mut branch, steps, c.ds, p, &opts).err();

    let mut points = Vec::with_capacity(branch.points.len());
    let mut traj = Vec::new();
    for (k, o) in branch.points.iter().enumerate() {
        points.push(point_row(k, o, ctx)?);
        let states = sample_states(o, c.samples, p, &opts)?;
        for (i, x) in states.iter().enumerate() {
            let t = i as f64 / c.samples as f64 * o.period;
            traj.extend(atom_rows(&x[..DIM]).map(|a| TrajectoryRow { point: k, t, face: a.face, vertex: a.vertex, x: a.x, y: a.y, z: a.z }));
        }
    }
    let record = BranchRecord {
        mode: j,
        orbit_type_id: id.to_string(),
        seed_amplitude: c.amplitude,
        ds: c.ds,
        requested_steps: steps,
        steps: branch.steps.clone(),
        turning_points: branch.turning_points.clone(),
        points,
        error: error.as_ref().map(|e| e.to_string()),
    };
    let stem = branch_file(j, id);
    let json = ctx.out.write_json(&format!("{stem}.json"), "branch", &record)?;
    let csv = ctx.out.write_csv(&format!("{stem}.csv"), "branch-trajectory", traj)?;
    Ok(BranchRun { record, json, csv, error })
}

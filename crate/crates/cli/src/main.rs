mod config;
mod exit;
mod output;
mod report;
mod stages;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::RunConfig;
use exit::Failure;
use output::{Meta, OutDir};
use report::{Report, FAMILIES};
use stages::*;

#[derive(Parser, Debug)]
#[command(name = "c60", version, about = "Equilibrium, spectrum, degree invariants and nonlinear normal modes of C60")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Switch on the van der Waals term.
    #[arg(long, global = true)]
    vdw: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Symmetric minimizer: equilibrium.json, equilibrium.csv.
    Equilibrate,
    /// Labelled slice spectrum: spectrum.json, resonance_report.json.
    Spectrum,
    /// ω invariants (omega_<j>.json) or the stored-degree consistency suite.
    Degrees {
        /// Mode index; repeatable.
        #[arg(long = "mode")]
        modes: Vec<usize>,
        /// π₀ and Ψ checks of the stored basic degrees.
        #[arg(long)]
        verify: bool,
    },
    /// Continue a branch of periodic orbits from mode j.
    Continue {
        #[arg(long)]
        mode: usize,
        #[arg(long = "orbit-type")]
        orbit_type: String,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        ds: Option<f64>,
        /// Seed amplitude in Å.
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Critical numbers l/√μ_j and their minimum gap.
    ScanResonance {
        #[arg(long, default_value_t = 64)]
        l_max: u32,
    },
    /// Every stage plus pass/fail checks against the reference values: report.json.
    ReproducePaper,
    /// Re-export a stage output as CSV or JSON under <out>/export.
    Export {
        what: Export,
        /// Mode index for omega and branch.
        arg: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Picks the branch when several exist for the mode.
        #[arg(long = "orbit-type")]
        orbit_type: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Export {
    Equilibrium,
    Spectrum,
    Resonance,
    Omega,
    Branch,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_of(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let mut cfg = RunConfig::load(cli.config.as_deref(), cli.vdw)?;
    if let Cmd::Continue { steps, ds, amplitude, .. } = &cli.cmd {
        let c = &mut cfg.continuation;
        c.steps = steps.unwrap_or(c.steps);
        c.ds = ds.unwrap_or(c.ds);
        c.amplitude = amplitude.unwrap_or(c.amplitude);
        cfg.validate()?;
    }
    let out = OutDir::new(&cli.out, cfg.hash())?;
    let ctx = Ctx { cfg, out, vdw: cli.vdw };
    match cli.cmd {
        Cmd::Equilibrate => cmd_equilibrate(&ctx),
        Cmd::Spectrum => cmd_spectrum(&ctx),
        Cmd::Degrees { modes, verify } => cmd_degrees(&ctx, &modes, verify),
        Cmd::Continue { mode, orbit_type, .. } => cmd_continue(&ctx, mode, &orbit_type),
        Cmd::ScanResonance { l_max } => cmd_scan_resonance(&ctx, l_max),
        Cmd::ReproducePaper => cmd_reproduce(&ctx),
        Cmd::Export { what, arg, format, orbit_type } => cmd_export(&ctx, what, arg, format, orbit_type.as_deref()),
    }
}

fn wrote(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_equilibrate(ctx: &Ctx) -> Result<u8> {
    let eq = compute_equilibrium(ctx)?;
    wrote(&write_equilibrium(ctx, &eq)?);
    println!("dS = {:.7} A, dD = {:.7} A, |grad V|inf = {:.1e}", eq.bonds.d_s, eq.bonds.d_d, eq.grad_inf_norm);
    Ok(exit::OK)
}

fn cmd_spectrum(ctx: &Ctx) -> Result<u8> {
    let eq = compute_equilibrium(ctx)?;
    let s = compute_spectrum(ctx, &eq)?;
    wrote(&write_spectrum(ctx, &s)?);
    println!("{} clusters, multiplicity sum {}", s.modes.len(), s.modes.iter().map(|m| m.multiplicity).sum::<usize>());
    Ok(exit::OK)
}

fn cmd_scan_resonance(ctx: &Ctx, l_max: u32) -> Result<u8> {
    let eq = compute_equilibrium(ctx)?;
    let s = compute_spectrum(ctx, &eq)?;
    let r = resonance(ctx, &s, l_max);
    wrote(&[write_resonance(ctx, &r)?]);
    println!("{} critical numbers, min gap {:.2e}, {} close pairs", r.numbers.entries.len(), r.numbers.min_gap, r.numbers.close_pairs.len());
    Ok(if r.resonant { exit::NUMERICAL } else { exit::OK })
}

fn cmd_degrees(ctx: &Ctx, modes: &[usize], verify: bool) -> Result<u8> {
    let mut code = exit::OK;
    if verify || modes.is_empty() {
        let mut r = Report::default();
        report::degree_data_checks(&mut r)?;
        print!("{}", r.table());
        wrote(&[ctx.out.write_json("degrees_verify.json", "report", &r)?]);
        code = r.exit_code();
    }
    if !modes.is_empty() {
        let eq = compute_equilibrium(ctx)?;
        let s = compute_spectrum(ctx, &eq)?;
        for &j in modes {
            let (rec, path) = write_omega(ctx, &s, j)?;
            wrote(&[path]);
            println!("mode {j} (n = {}): {} terms, maximal {:?}", rec.n, rec.terms.len(), rec.maximal.iter().map(|m| &m.id).collect::<Vec<_>>());
        }
    }
    Ok(code)
}

fn cmd_continue(ctx: &Ctx, mode: usize, id: &str) -> Result<u8> {
    let eq = compute_equilibrium(ctx)?;
    let s = compute_spectrum(ctx, &eq)?;
    let run = run_branch(ctx, &s, &eq, mode, id, ctx.cfg.continuation.steps)?;
    wrote(&[run.json.clone(), run.csv.clone()]);
    let pts = &run.record.points;
    if let Some(last) = pts.last() {
        println!("{} points, final amplitude {:.5} A, period {:.6}", pts.len(), last.amplitude, last.period);
    }
    if let Some(e) = run.error {
        return Err(anyhow::Error::new(e).context(format!("continuation stopped after {} steps", pts.len() - 1)));
    }
    let tol = ctx.cfg.tolerances.symmetry_tol;
    if let Some(p) = pts.iter().find(|p| p.symmetry_violation > tol) {
        return Err(anyhow::Error::new(c60::Error::SymmetryViolation(format!("point {}: {:.1e}", p.index, p.symmetry_violation))));
    }
    Ok(exit::OK)
}

fn cmd_reproduce(ctx: &Ctx) -> Result<u8> {
    let mut r = Report::default();
    let mut files = Vec::new();
    let eq = compute_equilibrium(ctx)?;
    files.extend(write_equilibrium(ctx, &eq)?);
    report::equilibrium_checks(&mut r, &equilibrium_record(&eq, ctx.params()), ctx.vdw);
    if ctx.vdw {
        println!("van der Waals run: dS = {:.6}, dD = {:.6} (reference {:.6}, {:.6})", eq.bonds.d_s, eq.bonds.d_d, 1.438084, 1.420845);
    }

    let s = compute_spectrum(ctx, &eq)?;
    files.extend(write_spectrum(ctx, &s)?);
    report::spectrum_checks(&mut r, &s, ctx.vdw);
    report::resonance_checks(&mut r, &resonance(ctx, &s, 64), ctx.vdw);

    report::degree_data_checks(&mut r)?;
    report::maximal_type_checks(&mut r, &s, ctx.vdw)?;
    for j in [1, 2] {
        files.push(write_omega(ctx, &s, j)?.1);
    }

    let c = &ctx.cfg.continuation;
    let tols = (ctx.cfg.tolerances.newton_tol, ctx.cfg.tolerances.symmetry_tol);
    for (k, f) in FAMILIES.iter().enumerate() {
        let steps = if k == 0 { c.steps } else { c.family_steps };
        let prefix = format!("continuation.j{}.{}", f.j, output::sanitize(f.id));
        match run_branch(ctx, &s, &eq, f.j, f.id, steps) {
            Ok(run) => {
                files.extend([run.json, run.csv]);
                report::branch_checks(&mut r, &prefix, &run.record, tols, steps, k == 0);
            }
            Err(e) => {
                r.push(&format!("{prefix}.seed"), report::error_kind(&e), false, format!("{} ({}): {e:#}", f.name, f.id));
            }
        }
    }
    report::period_checks(&mut r, ctx, &s, &eq, &ctx.cfg.shooting());

    files.push(ctx.out.write_json("report.json", "report", &r)?);
    print!("{}", r.table());
    wrote(&files);
    let code = r.exit_code();
    if code != exit::OK {
        let failed = r.failed().iter().map(|c| c.name.clone()).collect();
        return Err(Failure::Checks { code, failed }.into());
    }
    Ok(code)
}

// ---- export ----

/// Reads `<out>/<name>` and returns its meta block and body.
fn read_with_meta<T: serde::de::DeserializeOwned>(out: &OutDir, name: &str, stage: &str) -> Result<(Meta, T)> {
    let v: serde_json::Value = out.read_stage(name, stage)?;
    let meta: Meta = serde_json::from_value(v.get("meta").cloned().unwrap_or_default()).with_context(|| format!("{name}: meta block"))?;
    Ok((meta, serde_json::from_value(v).with_context(|| format!("{name}: body"))?))
}

fn find_branch(out: &Path, j: usize, id: Option<&str>) -> Option<String> {
    if let Some(id) = id {
        return Some(format!("{}.json", branch_file(j, id)));
    }
    let prefix = format!("branch_{j}_");
    let mut names: Vec<String> = std::fs::read_dir(out)
        .ok()?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with(&prefix) && n.ends_with(".json"))
        .collect();
    names.sort();
    names.into_iter().next()
}

#[derive(Serialize)]
struct PointSummary {
    index: usize,
    period: f64,
    amplitude: f64,
    energy: f64,
    residual: f64,
    max_multiplier: f64,
    symmetry_violation: f64,
    brake_residual: Option<f64>,
}

#[derive(Serialize)]
struct CriticalRow {
    rank: usize,
    j: usize,
    l: u32,
    lambda: f64,
}

fn emit<R: Serialize>(dir: &OutDir, stem: &str, schema: &str, format: Format, rows: Vec<R>) -> Result<PathBuf> {
    match format {
        Format::Csv => dir.write_csv(&format!("{stem}.csv"), schema, rows),
        Format::Json => dir.write_json(&format!("{stem}.json"), schema, &serde_json::json!({ "rows": rows })),
    }
}

fn cmd_export(ctx: &Ctx, what: Export, arg: Option<usize>, format: Format, orbit_type: Option<&str>) -> Result<u8> {
    let out = &ctx.out;
    let need_arg = |w: &str| arg.with_context(|| format!("export {w} needs a mode index"));
    let path = match what {
        Export::Equilibrium => {
            let (meta, rec): (Meta, EquilibriumRecord) = read_with_meta(out, "equilibrium.json", "equilibrate")?;
            let dir = OutDir::new(&out.path("export"), meta.config_hash)?;
            emit(&dir, "equilibrium", "export-equilibrium", format, vec![rec])?
        }
        Export::Spectrum => {
            let (meta, rec): (Meta, SpectrumRecord) = read_with_meta(out, "spectrum.json", "spectrum")?;
            let dir = OutDir::new(&out.path("export"), meta.config_hash)?;
            emit(&dir, "spectrum", "export-spectrum", format, rec.modes)?
        }
        Export::Resonance => {
            let (meta, rec): (Meta, ResonanceRecord) = read_with_meta(out, "resonance_report.json", "scan-resonance")?;
            let dir = OutDir::new(&out.path("export"), meta.config_hash)?;
            let rows = rec.numbers.entries.iter().enumerate().map(|(k, c)| CriticalRow { rank: k + 1, j: c.j, l: c.l, lambda: c.lambda }).collect();
            emit(&dir, "resonance", "export-resonance", format, rows)?
        }
        Export::Omega => {
            let j = need_arg("omega")?;
            let (meta, rec): (Meta, OmegaRecord) = read_with_meta(out, &format!("omega_{j}.json"), "degrees")?;
            let dir = OutDir::new(&out.path("export"), meta.config_hash)?;
            emit(&dir, &format!("omega_{j}"), "export-omega", format, rec.terms)?
        }
        Export::Branch => {
            let j = need_arg("branch")?;
            let name = find_branch(&out.root, j, orbit_type).unwrap_or_else(|| format!("branch_{j}_*.json"));
            let (meta, rec): (Meta, BranchRecord) = read_with_meta(out, &name, "continue")?;
            let dir = OutDir::new(&out.path("export"), meta.config_hash)?;
            let rows = rec
                .points
                .iter()
                .map(|p| PointSummary {
                    index: p.index,
                    period: p.period,
                    amplitude: p.amplitude,
                    energy: p.energy,
                    residual: p.residual,
                    max_multiplier: p.multipliers.iter().fold(0.0, |m, x| m.max(x.abs())),
                    symmetry_violation: p.symmetry_violation,
                    brake_residual: p.brake_residual,
                })
                .collect();
            emit(&dir, name.trim_end_matches(".json"), "export-branch", format, rows)?
        }
    };
    wrote(&[path]);
    Ok(exit::OK)
}

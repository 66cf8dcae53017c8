//! Command-line surface: argument parsing, reports and output formats.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::almostcy::{brute_vs_closed, closed_hilbert_series, nakayama_permutation, resolution_euler_check, verify_top_degree};
use crate::cells::{load_cells, solve_cells, verify_type_i, verify_type_ii, CellSystem, SolveOptions};
use crate::error::{Error, Result};
use crate::fusion::{build_modular_data, fusion_matrices, invariant_catalog, verify_invariant, verify_verlinde};
use crate::graphcat::{check_pinned_cells, nimrep_from_graph, pf_data, supertransitivity, verify_nimrep_spectrum, Graph, GraphCatalog};
use crate::pathalg::{graded_dimension, verify_hecke};
use crate::specmeasure::{
    compare_measures, continuous_moments, e8_paper_measure, jacobian_weighted, load_class_data, moments, subgroup_moments, uniform_dm_measure,
    vacuum_measure_discoid, ContinuousKind, MomentTable, QuadOptions,
};

#[derive(Debug, Parser)]
#[command(name = "su3", version, about = "SU(3) modular invariants, nimrep graphs, cell systems, Hilbert series and spectral measures")]
pub struct Cli {
    /// Directory holding manifest.json and the graph, invariant, cell and class files.
    #[arg(long, env = "SU3_DATA_DIR", global = true)]
    pub data_dir: Option<PathBuf>,
    /// Override the tolerance of every check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalog graphs.
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Modular data checks and the Verlinde formula at one level.
    Modular {
        #[arg(long)]
        level: usize,
    },
    /// Modular invariants at one level with their commutation residuals.
    Invariants {
        #[arg(long)]
        level: usize,
    },
    /// Nimrep spectrum of a graph against the exponents of an invariant.
    Nimrep(NimrepArgs),
    #[command(subcommand)]
    Cells(CellsCmd),
    /// Hecke relations for a cell file.
    Hecke(HeckeArgs),
    /// Hilbert series of the almost Calabi-Yau algebra.
    Hilbert(HilbertArgs),
    #[command(subcommand)]
    Measure(MeasureCmd),
    Supertransitivity {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 12)]
        max_k: usize,
    },
    /// Run a check and exit 1 when it fails.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
pub enum GraphsCmd {
    List,
    Show { name: String },
}

#[derive(Debug, clap::Args)]
pub struct NimrepArgs {
    #[arg(long)]
    pub graph: String,
    /// Defaults to the invariant paired with the graph in the catalog.
    #[arg(long)]
    pub invariant: Option<String>,
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CellsCmd {
    Solve {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Verify { file: PathBuf },
}

#[derive(Debug, clap::Args)]
pub struct HeckeArgs {
    #[arg(long)]
    pub cells: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub p_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HilbertMode {
    Closed,
    Brute,
    Both,
}

#[derive(Debug, clap::Args)]
pub struct HilbertArgs {
    #[arg(long)]
    pub graph: Option<String>,
    /// Cell file for the brute-force quotient; solved on the fly when absent.
    #[arg(long)]
    pub cells: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = HilbertMode::Closed)]
    pub mode: HilbertMode,
    #[arg(long)]
    pub max_degree: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Torus,
    Su3,
    Semicircle,
    So3,
}

#[derive(Debug, Subcommand)]
pub enum MeasureCmd {
    /// Vacuum spectral measure moments of a graph.
    Graph {
        #[arg(long)]
        graph: String,
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [3, 3])]
        moments: Vec<usize>,
    },
    /// Moments from subgroup class data.
    Subgroup {
        #[arg(long)]
        classes: PathBuf,
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [3, 3])]
        moments: Vec<usize>,
    },
    /// The displayed E8 torus measure, compared with the E8 graph.
    E8Torus {
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [3, 3])]
        moments: Vec<usize>,
    },
    /// Uniform measure on D_m, optionally J²-weighted, compared with A^(m).
    Dm {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        weighted: bool,
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [3, 3])]
        moments: Vec<usize>,
    },
    /// One moment of a continuous measure by quadrature.
    Continuous {
        #[arg(long, value_enum)]
        kind: KindArg,
        m: u32,
        n: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    Nimrep(NimrepArgs),
    Invariant {
        #[arg(long)]
        name: String,
        #[arg(long)]
        level: usize,
    },
    Cells { file: PathBuf },
    Hecke(HeckeArgs),
    Hilbert {
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        cells: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub tag: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport { subject: subject.into(), checks: vec![], pass: true }
    }

    /// A residual check: passes when value ≤ tol.
    pub fn residual(&mut self, name: &str, tag: &str, value: f64, tol: f64) {
        let pass = value <= tol;
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), tag: tag.into(), value, tol, pass });
    }

    /// An exact check recorded as a count of mismatches.
    pub fn exact(&mut self, name: &str, tag: &str, mismatches: usize) {
        self.residual(name, tag, mismatches as f64, 0.0);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Rendered output and whether every check passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, pass: true }
    }
}

struct Ctx {
    data_dir: PathBuf,
    catalog: GraphCatalog,
    tol: Option<f64>,
    seed: u64,
    format: Format,
}

impl Ctx {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn graph(&self, name: &str) -> Result<&Graph> {
        self.catalog.graph(name).ok_or_else(|| Error::InvalidArgument(format!("unknown graph {name}")))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.exists() || p.is_absolute() {
            p.to_path_buf()
        } else {
            self.data_dir.join(p)
        }
    }

    fn load_cells(&self, p: &Path) -> Result<CellSystem> {
        let path = self.resolve(p);
        check_pinned_cells(&self.catalog, &path)?;
        let file = load_cells(&path)?;
        CellSystem::from_file(self.graph(&file.graph)?, &file)
    }

    fn report(&self, r: &VerificationReport) -> Result<Outcome> {
        let output = match self.format {
            Format::Json => serde_json::to_string_pretty(r)? + "\n",
            Format::Csv => {
                let mut s = String::from("check,tag,value,tol,pass\n");
                for c in &r.checks {
                    let _ = writeln!(s, "{},{},{:e},{:e},{}", c.name, c.tag, c.value, c.tol, c.pass);
                }
                s
            }
            Format::Text => {
                let mut s = format!("{}\n", r.subject);
                for c in &r.checks {
                    let _ = writeln!(
                        s,
                        "  {:<34} residual {:>10.3e}  tol {:>8.1e}  [{}]  {}",
                        c.name,
                        c.value,
                        c.tol,
                        c.tag,
                        if c.pass { "PASS" } else { "FAIL" }
                    );
                }
                let _ = writeln!(s, "overall: {}", if r.pass { "PASS" } else { "FAIL" });
                s
            }
        };
        Ok(Outcome { output, pass: r.pass })
    }

    fn table(&self, t: &MomentTable) -> Result<String> {
        Ok(match self.format {
            Format::Csv => t.to_csv(),
            Format::Json => {
                let rows: Vec<_> = t
                    .values
                    .iter()
                    .enumerate()
                    .flat_map(|(m, r)| r.iter().enumerate().map(move |(n, v)| serde_json::json!({"m": m, "n": n, "re": v.re, "im": v.im})))
                    .collect();
                serde_json::to_string_pretty(&rows)? + "\n"
            }
            Format::Text => {
                let mut s = String::new();
                for (m, row) in t.values.iter().enumerate() {
                    for (n, v) in row.iter().enumerate() {
                        let _ = writeln!(s, "{m:>3} {n:>3} {:>18.10} {:>18.10}", clean(v.re), clean(v.im));
                    }
                }
                s
            }
        })
    }
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

fn moment_grid(v: &[usize]) -> (usize, usize) {
    (v[0], v[1])
}

pub fn default_data_dir() -> PathBuf {
    PathBuf::from("data")
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<Outcome> {
    let data_dir = cli.data_dir.clone().unwrap_or_else(default_data_dir);
    if !data_dir.join("manifest.json").is_file() {
        return Err(Error::InvalidArgument(format!("{} has no manifest.json", data_dir.display())));
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {t} must be positive")));
        }
    }
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let ctx = Ctx { catalog: GraphCatalog::load(&data_dir)?, data_dir, tol: cli.tol, seed: cli.seed, format };
    match cli.command {
        Command::Graphs(GraphsCmd::List) => graphs_list(&ctx),
        Command::Graphs(GraphsCmd::Show { name }) => Ok(Outcome::ok(serde_json::to_string_pretty(&ctx.graph(&name)?.to_json())? + "\n")),
        Command::Modular { level } => ctx.report(&modular_report(&ctx, level)?),
        Command::Invariants { level } => ctx.report(&invariants_report(&ctx, level)?),
        Command::Nimrep(a) | Command::Verify(VerifyCmd::Nimrep(a)) => ctx.report(&nimrep_report(&ctx, &a)?),
        Command::Verify(VerifyCmd::Invariant { name, level }) => {
            let z = ctx.catalog.invariant(&name, level)?;
            let md = build_modular_data(level)?;
            let r = verify_invariant(&z, &md)?;
            let tol = ctx.tol(1e-8);
            let mut rep = VerificationReport::new(format!("invariant {name} at level {level}"));
            rep.residual("ZS - SZ", "modular invariance S", r.s_residual, tol);
            rep.residual("ZT - TZ", "modular invariance T", r.t_residual, tol);
            rep.exact("Z00 = 1", "vacuum normalization", usize::from(z.z[(0, 0)] != 1));
            rep.exact("non-negative entries", "modular invariant", z.z.iter().filter(|&&x| x < 0).count());
            ctx.report(&rep)
        }
        Command::Cells(CellsCmd::Solve { graph, restarts, out }) => {
            let g = ctx.graph(&graph)?;
            let opts = SolveOptions { seed: ctx.seed, restarts, tol: ctx.tol(1e-10), ..Default::default() };
            let sol = solve_cells(g, opts)?;
            let text = serde_json::to_string_pretty(&sol.cells.to_file())? + "\n";
            match out {
                Some(p) => {
                    std::fs::write(&p, &text)?;
                    let mut rep = cells_report(&sol.cells, ctx.tol(1e-10))?;
                    rep.subject = format!("cells for {graph} written to {} after {} restarts", p.display(), sol.restarts_used);
                    ctx.report(&rep)
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Command::Cells(CellsCmd::Verify { file }) | Command::Verify(VerifyCmd::Cells { file }) => {
            let cs = ctx.load_cells(&file)?;
            ctx.report(&cells_report(&cs, ctx.tol(1e-10))?)
        }
        Command::Hecke(a) | Command::Verify(VerifyCmd::Hecke(a)) => {
            let cs = ctx.load_cells(&a.cells)?;
            let r = verify_hecke(&cs, a.p_max)?;
            let tol = ctx.tol(1e-8);
            let mut rep = VerificationReport::new(format!("Hecke relations for {} up to path length {}", cs.graph.name, a.p_max));
            rep.residual("U self-adjoint", "hecke operator", r.self_adjoint, tol);
            rep.residual("U^2 = [2]U", "hecke H1", r.h1, tol);
            rep.residual("[U_i, U_j] = 0", "hecke H2", r.h2, tol);
            rep.residual("U_iU_jU_i - U_i sym.", "hecke H3", r.h3, tol);
            rep.residual("SU(3) relation", "q-antisymmetrizer", r.q_relation, tol);
            ctx.report(&rep)
        }
        Command::Hilbert(a) => hilbert(&ctx, &a),
        Command::Verify(VerifyCmd::Hilbert { graph, cells }) => {
            let a = HilbertArgs { graph, cells, mode: HilbertMode::Both, max_degree: None };
            let (cs, g) = hilbert_inputs(&ctx, &a)?;
            ctx.report(&hilbert_report(&ctx, &g, cs.as_ref())?)
        }
        Command::Measure(m) => measure(&ctx, m),
        Command::Supertransitivity { graph, max_k } => {
            let s = supertransitivity(ctx.graph(&graph)?, max_k)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => serde_json::json!({"graph": graph, "supertransitivity": s.to_string()}).to_string() + "\n",
                Format::Csv => format!("graph,supertransitivity\n{graph},{s}\n"),
                Format::Text => format!("{graph}: supertransitivity {s}\n"),
            }))
        }
    }
}

fn graphs_list(ctx: &Ctx) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        name: String,
        vertices: usize,
        edges: usize,
        norm: f64,
        coxeter: Option<u32>,
        level: usize,
        invariant: String,
    }
    let rows: Vec<Row> = ctx
        .catalog
        .entries
        .iter()
        .map(|e| Row {
            name: e.graph.name.clone(),
            vertices: e.graph.len(),
            edges: e.graph.edges.len(),
            norm: pf_data(&e.graph).map_or(f64::NAN, |p| p.norm),
            coxeter: e.graph.coxeter,
            level: e.level,
            invariant: e.invariant.clone(),
        })
        .collect();
    let out = match ctx.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("name,vertices,edges,norm,coxeter,level,invariant\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{:.12},{},{},{}", r.name, r.vertices, r.edges, r.norm, r.coxeter.unwrap_or(0), r.level, r.invariant);
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:<8} {:>8} {:>6} {:>12} {:>7} {:>5}  {}\n", "name", "vertices", "edges", "norm", "coxeter", "level", "invariant");
            for r in &rows {
                let _ = writeln!(s, "{:<8} {:>8} {:>6} {:>12.9} {:>7} {:>5}  {}", r.name, r.vertices, r.edges, r.norm, r.coxeter.unwrap_or(0), r.level, r.invariant);
            }
            s
        }
    };
    Ok(Outcome::ok(out))
}

fn modular_report(ctx: &Ctx, level: usize) -> Result<VerificationReport> {
    let md = build_modular_data(level)?;
    let c = md.checks();
    let tol = ctx.tol(1e-9);
    let mut rep = VerificationReport::new(format!("modular data at level {level}"));
    rep.residual("S unitary", "kac-peterson S", c.unitarity, tol);
    rep.residual("S symmetric", "kac-peterson S", c.symmetry, tol);
    rep.exact("S_mu0 > 0", "vacuum row", usize::from(c.min_vacuum_row <= 0.0));
    rep.residual("(ST)^3 = S^2", "modular relations", c.st_cubed, tol);
    rep.residual("S^2 = C", "modular relations", c.s_squared_conjugation, tol);
    let fr = fusion_matrices(level)?;
    rep.residual("Verlinde", "verlinde", verify_verlinde(&md, &fr)?, tol);
    Ok(rep)
}

fn invariants_report(ctx: &Ctx, level: usize) -> Result<VerificationReport> {
    let md = build_modular_data(level)?;
    let mut invs = invariant_catalog(level)?.invariants;
    invs.extend(ctx.catalog.extra_invariants.iter().filter(|z| z.level == level).cloned());
    let tol = ctx.tol(1e-8);
    let mut rep = VerificationReport::new(format!("modular invariants at level {level}: {}", invs.iter().map(|z| z.name.as_str()).collect::<Vec<_>>().join(", ")));
    for z in &invs {
        let r = verify_invariant(z, &md)?;
        rep.residual(&format!("{} ZS - SZ", z.name), "modular invariance S", r.s_residual, tol);
        rep.residual(&format!("{} ZT - TZ", z.name), "modular invariance T", r.t_residual, tol);
        rep.exact(&format!("{} Z00 = 1", z.name), "vacuum normalization", usize::from(z.z[(0, 0)] != 1));
    }
    Ok(rep)
}

fn nimrep_report(ctx: &Ctx, a: &NimrepArgs) -> Result<VerificationReport> {
    let entry = ctx.catalog.get(&a.graph).ok_or_else(|| Error::InvalidArgument(format!("unknown graph {}", a.graph)))?;
    let level = a.level.unwrap_or(entry.level);
    let inv_name = a.invariant.clone().unwrap_or_else(|| entry.invariant.clone());
    let z = ctx.catalog.invariant(&inv_name, level)?;
    let md = build_modular_data(level)?;
    let n = nimrep_from_graph(&entry.graph, level)?;
    let tol = ctx.tol(1e-8);
    let mut rep = VerificationReport::new(format!("nimrep {} against {} at level {}", a.graph, inv_name, level));
    match verify_nimrep_spectrum(&n, &z, &md) {
        Ok(r) => rep.residual(&format!("spectrum (worst at {})", r.worst_weight), "nimrep spectrum", r.max_mismatch, tol),
        Err(Error::SizeMismatch { vertices, exponents }) => {
            rep.exact(&format!("{vertices} vertices vs {exponents} exponents"), "nimrep spectrum", vertices.abs_diff(exponents));
        }
        Err(e) => return Err(e),
    }
    Ok(rep)
}

fn cells_report(cs: &CellSystem, tol: f64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("cells on {} ({} triangles)", cs.graph.name, cs.w.len()));
    let t1 = verify_type_i(cs)?;
    let t2 = verify_type_ii(cs)?;
    rep.residual(&format!("type I ({} frames)", t1.frames), "type I frame", t1.max_residual, tol);
    rep.residual(&format!("type II ({} frames)", t2.frames), "type II frame", t2.max_residual, tol);
    Ok(rep)
}

fn hilbert_inputs(ctx: &Ctx, a: &HilbertArgs) -> Result<(Option<CellSystem>, Graph)> {
    let cs = match &a.cells {
        Some(p) => Some(ctx.load_cells(p)?),
        None if a.mode != HilbertMode::Closed => {
            let name = a.graph.as_deref().ok_or_else(|| Error::InvalidArgument("--graph or --cells is required".into()))?;
            Some(solve_cells(ctx.graph(name)?, SolveOptions { seed: ctx.seed, ..Default::default() })?.cells)
        }
        None => None,
    };
    let g = match (&cs, &a.graph) {
        (Some(c), Some(name)) if &c.graph.name != name => {
            return Err(Error::InvalidArgument(format!("cell file is for {}, not {name}", c.graph.name)));
        }
        (Some(c), _) => c.graph.clone(),
        (None, Some(name)) => ctx.graph(name)?.clone(),
        (None, None) => return Err(Error::InvalidArgument("--graph or --cells is required".into())),
    };
    Ok((cs, g))
}

fn hilbert_report(ctx: &Ctx, g: &Graph, cs: Option<&CellSystem>) -> Result<VerificationReport> {
    let h = g.coxeter.ok_or_else(|| Error::InvalidArgument(format!("{} has no Coxeter number", g.name)))? as usize;
    let nu = nakayama_permutation(g)?;
    let mut rep = VerificationReport::new(format!("Hilbert series of {} (h = {h}, Nakayama power {})", g.name, nu.power));
    let series = closed_hilbert_series(g, &nu.matrix(), h)?;
    rep.exact("closed form terminates at h-3", "hilbert series", usize::from(series.top_degree() != h - 3));
    let e = resolution_euler_check(g, &nu.matrix(), h, &series);
    rep.exact("H(t)(1-Dt+D't^2-t^3) = 1-Pt^h", "resolution euler identity", usize::from(e.first_failure.is_some()));
    if let Some(cs) = cs {
        let rank_tol = ctx.tol(1e-8);
        let b = brute_vs_closed(cs, &nu, rank_tol)?;
        rep.exact("graded quotient = closed form", "hilbert series", b.mismatches.len() + usize::from(!b.well_conditioned));
        let t = verify_top_degree(cs, &nu, rank_tol)?;
        rep.exact("top degree = Nakayama", "top degree", t.mismatches.len() + usize::from(!t.well_conditioned));
    }
    Ok(rep)
}

fn hilbert(ctx: &Ctx, a: &HilbertArgs) -> Result<Outcome> {
    let (cs, g) = hilbert_inputs(ctx, a)?;
    let h = g.coxeter.ok_or_else(|| Error::InvalidArgument(format!("{} has no Coxeter number", g.name)))? as usize;
    let max_deg = a.max_degree.unwrap_or(h - 3);
    let nu = nakayama_permutation(&g)?;
    let closed = closed_hilbert_series(&g, &nu.matrix(), h)?;
    let zero = crate::linalg::IMat::zeros(g.len(), g.len());
    let mut rows: Vec<(usize, usize, usize, i64, &str)> = Vec::new();
    let mut pass = true;
    for p in 0..=max_deg {
        let c = closed.coeffs.get(p).unwrap_or(&zero);
        let b = match (&cs, a.mode) {
            (Some(cs), HilbertMode::Brute | HilbertMode::Both) => Some(graded_dimension(cs, p, ctx.tol(1e-8))?),
            _ => None,
        };
        for i in 0..g.len() {
            for j in 0..g.len() {
                if a.mode != HilbertMode::Brute {
                    rows.push((p, i, j, c[(i, j)], "closed"));
                }
                if let Some(b) = &b {
                    rows.push((p, i, j, b.dims[(i, j)], "brute"));
                    pass &= b.dims[(i, j)] == c[(i, j)] && b.well_conditioned;
                }
            }
        }
    }
    let ids: Vec<&str> = g.vertices.iter().map(|v| v.id.as_str()).collect();
    let output = match ctx.format {
        Format::Csv => {
            let mut s = String::from("degree,src,dst,dim,mode\n");
            for (p, i, j, d, m) in &rows {
                let _ = writeln!(s, "{p},\"{}\",\"{}\",{d},{m}", ids[*i], ids[*j]);
            }
            s
        }
        Format::Json => {
            let v: Vec<_> = rows.iter().map(|(p, i, j, d, m)| serde_json::json!({"degree": p, "src": ids[*i], "dst": ids[*j], "dim": d, "mode": m})).collect();
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Text => {
            let mut s = format!("Hilbert series of {} (h = {h})\n", g.name);
            for (p, i, j, d, m) in rows.iter().filter(|r| r.3 != 0) {
                let _ = writeln!(s, "  t^{p}  {} -> {}  {d}  {m}", ids[*i], ids[*j]);
            }
            if a.mode == HilbertMode::Both {
                let _ = writeln!(s, "brute = closed: {}", if pass { "PASS" } else { "FAIL" });
            }
            s
        }
    };
    Ok(Outcome { output, pass })
}

fn measure(ctx: &Ctx, m: MeasureCmd) -> Result<Outcome> {
    match m {
        MeasureCmd::Graph { graph, moments: grid } => {
            let (a, b) = moment_grid(&grid);
            let t = moments(&vacuum_measure_discoid(ctx.graph(&graph)?)?, a, b);
            Ok(Outcome::ok(ctx.table(&t)?))
        }
        MeasureCmd::Subgroup { classes, moments: grid } => {
            let (a, b) = moment_grid(&grid);
            let cd = load_class_data(&ctx.resolve(&classes))?;
            Ok(Outcome::ok(ctx.table(&subgroup_moments(&cd, a, b)?)?))
        }
        MeasureCmd::E8Torus { moments: grid } => {
            let (a, b) = moment_grid(&grid);
            let displayed = moments(&e8_paper_measure(), a, b);
            let graph = moments(&vacuum_measure_discoid(ctx.graph("E8")?)?, a, b);
            let c = compare_measures(&displayed, &graph, ctx.tol(1e-8))?;
            let mut rep = VerificationReport::new(format!("E8 torus measure against the E8 graph, moments up to ({a},{b})"));
            rep.residual("moment difference", "E8 spectral measure", c.max_diff, c.tol);
            ctx.report(&rep)
        }
        MeasureCmd::Dm { m, weighted, moments: grid } => {
            let (a, b) = moment_grid(&grid);
            let d = uniform_dm_measure(m)?;
            let d = if weighted { jacobian_weighted(&d, 2)? } else { d };
            let t = moments(&d, a, b);
            let g = crate::graphcat::build_a_graph(m as u32)?;
            let c = compare_measures(&t, &moments(&vacuum_measure_discoid(&g)?, a, b), ctx.tol(1e-8))?;
            let mut rep = VerificationReport::new(format!("{}uniform D_{m} measure against A{m}, moments up to ({a},{b})", if weighted { "J^2-weighted " } else { "" }));
            rep.residual("moment difference", "discriminant J^2", c.max_diff, c.tol);
            ctx.report(&rep)
        }
        MeasureCmd::Continuous { kind, m, n } => {
            let kind = match kind {
                KindArg::Torus => ContinuousKind::Torus,
                KindArg::Su3 => ContinuousKind::Su3,
                KindArg::Semicircle => ContinuousKind::Semicircle,
                KindArg::So3 => ContinuousKind::So3Semicircle,
            };
            let r = continuous_moments(kind, m, n, QuadOptions { tol: ctx.tol(1e-10), ..Default::default() })?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => serde_json::json!({"m": m, "n": n, "re": clean(r.value.re), "im": clean(r.value.im), "error": r.error, "nodes": r.nodes}).to_string() + "\n",
                Format::Csv => format!("m,n,re,im,error,nodes\n{m},{n},{:.12e},{:.12e},{:e},{}\n", clean(r.value.re), clean(r.value.im), r.error, r.nodes),
                Format::Text => format!("{:?} moment ({m},{n}) = {:.10} + {:.10}i  (error {:.1e}, {} nodes)\n", kind, clean(r.value.re), clean(r.value.im), r.error, r.nodes),
            }))
        }
    }
}

use clap::{Args, Parser, Subcommand, ValueEnum};
use patchscope::body::Body;
use patchscope::face_family::{convergence_experiment, ExperimentParams};
use patchscope::hyperbolic::{check_hyperbolic, hyperbolic_body, HyperbolicCone};
use patchscope::normal_cycle::{from_jsonl, sample_normal_cycle, to_jsonl, Strategy};
use patchscope::patch::{boundary_sample, run_pipeline, PipelineParams};
use patchscope::poly::{det_pencil, parse_rational, Matrix, Rational};
use patchscope::{canonical, gallery, Error, Polynomial, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Boundary structure of convex semi-algebraic bodies.
#[derive(Parser)]
#[command(name = "patchscope", version)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "PATCHSCOPE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample pairs (x, l) of the normal cycle of a body.
    Ncycle(NcycleArgs),
    /// Detect patch candidates on the hull of a boundary sample.
    Patches(PatchesArgs),
    /// Hyperbolic polynomials and their cones.
    Hyperbolic {
        #[command(subcommand)]
        op: HypOp,
    },
    /// Hausdorff convergence of face slices along a sequence of functionals.
    Hausdorff(HausdorffArgs),
    /// Worked example fixtures; `list` prints the names.
    Gallery(GalleryArgs),
}

#[derive(Args)]
struct NcycleArgs {
    /// Body file (JSON, or CSV point cloud).
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// k1-rayshoot, dual-directions or primal-stab.
    #[arg(long, default_value = "k1-rayshoot")]
    strategy: String,
    #[arg(long)]
    seed: u64,
    /// Output JSONL file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PatchesArgs {
    /// Boundary points, one per CSV row.  Without it the boundary of
    /// `--body` is sampled with `--n` and `--seed`.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Body whose defining polynomials label the hull facets.
    #[arg(long)]
    body: Option<PathBuf>,
    /// `auto` or a positive angle in radians.
    #[arg(long, default_value = "auto")]
    theta: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    max_pairs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-facet CSV: barycenter, normal, candidate id (-1 when unassigned).
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct ConeArgs {
    /// Polynomial file, or one of lorentz, cayley, hyperb_quartic.
    #[arg(long, conflicts_with = "pencil", required_unless_present = "pencil")]
    poly: Option<String>,
    /// Matrices M_0 .. M_n as CSV files; f = det(sum x_i M_i).
    #[arg(long, num_args = 1..)]
    pencil: Vec<PathBuf>,
    /// Hyperbolic direction, comma separated.
    #[arg(long)]
    e: String,
}

#[derive(Subcommand)]
enum HypOp {
    /// Monte Carlo hyperbolicity certificate.
    Check {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Membership of `--x` in the closed cone.
    Member {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long)]
        x: String,
        /// Rational arithmetic; `--x` entries may be fractions.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Multiplicity and face dimension at a boundary point `--x`.
    Facedim {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Relative rank tolerance for the Hessian.
        #[arg(long, default_value_t = 1e-8)]
        rank_tol: f64,
    },
    /// Body JSON of the slice of the cone at height 1 along `--e`.
    Body {
        #[command(flatten)]
        cone: ConeArgs,
    },
}

#[derive(Args)]
struct HausdorffArgs {
    /// Pairs JSONL file.
    #[arg(long)]
    pairs: PathBuf,
    /// JSON array of functionals l_n.
    #[arg(long)]
    ell_seq: PathBuf,
    /// Limit functional, comma separated.
    #[arg(long)]
    ell_limit: String,
    /// Angular window of a slice, in radians.
    #[arg(long, default_value_t = 1e-3)]
    angle_tol: f64,
    /// Convergence threshold in mesh units.
    #[arg(long, default_value_t = 5.0)]
    c: f64,
    /// Sampling density; measured from the pairs when absent.
    #[arg(long)]
    mesh: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Body,
    Facts,
    /// Boundary sample as CSV, the input of `patches --points`.
    Points,
    Run,
}

#[derive(Args)]
struct GalleryArgs {
    name: String,
    #[arg(long, value_enum, default_value = "facts")]
    what: What,
    /// Boundary sample size for `--what points|run`.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Required for `--what points|run`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Error::InvalidInput(e.to_string().trim().to_string())),
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail(&Error::InvalidInput(e.to_string()));
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let kind = format!("{e:?}");
    let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error");
    eprintln!("{}", canonical::to_string(&json!({"error": {"kind": kind, "message": e.to_string()}})));
    ExitCode::from(if e.is_numerical() { 2 } else { 1 })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(v: &T, out: Option<&Path>) -> Result<()> {
    emit(&(canonical::to_string(v) + "\n"), out)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ncycle(a) => {
            let body = Body::load(&a.body)?;
            let pairs = sample_normal_cycle(&body, a.n, a.strategy.parse::<Strategy>()?, a.seed)?;
            emit(&to_jsonl(&pairs), a.out.as_deref())
        }
        Command::Patches(a) => patches(a),
        Command::Hyperbolic { op } => hyperbolic(op),
        Command::Hausdorff(a) => {
            let pairs = from_jsonl(&std::fs::read_to_string(&a.pairs)?)?;
            let seq: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(&a.ell_seq)?)?;
            let limit = parse_f64s(&a.ell_limit)?;
            let params = ExperimentParams { angle_tol: a.angle_tol, c: a.c, mesh: a.mesh };
            emit_json(&convergence_experiment(&pairs, &seq, &limit, &params)?, a.out.as_deref())
        }
        Command::Gallery(a) => {
            if a.name == "list" {
                return emit_json(&gallery::NAMES, a.out.as_deref());
            }
            let entry = gallery::entry(&a.name)?;
            match a.what {
                What::Body => emit_json(entry.body.spec(), a.out.as_deref()),
                What::Facts => emit_json(&entry.facts_json(), a.out.as_deref()),
                What::Points | What::Run => {
                    let seed = a.seed.ok_or_else(|| Error::InvalidInput("sampling needs --seed".into()))?;
                    let pts = gallery::patch_sample(&entry, a.n, seed)?;
                    if matches!(a.what, What::Points) {
                        let rows: Vec<String> =
                            pts.iter().map(|p| p.iter().map(|&x| canonical::format_f64(x)).collect::<Vec<_>>().join(",") + "\n").collect();
                        return emit(&rows.concat(), a.out.as_deref());
                    }
                    let an = run_pipeline(&pts, Some(&entry.body), &PipelineParams::default())?;
                    emit_json(&an.report, a.out.as_deref())
                }
            }
        }
    }
}

fn patches(a: PatchesArgs) -> Result<()> {
    let body = a.body.as_deref().map(Body::load).transpose()?;
    let points = match (&a.points, &body) {
        (Some(p), _) => match Body::load(p)?.spec().rep.clone() {
            patchscope::Rep::PointCloudHull { points } => points,
            _ => return Err(Error::InvalidInput("--points must be a CSV point cloud".into())),
        },
        (None, Some(b)) => {
            let seed = a.seed.ok_or_else(|| Error::InvalidInput("sampling the body needs --seed".into()))?;
            boundary_sample(b, a.n, seed)?
        }
        (None, None) => return Err(Error::InvalidInput("give --points or --body".into())),
    };
    let theta = match a.theta.as_str() {
        "auto" => None,
        t => Some(t.parse::<f64>().map_err(|e| Error::Parse(format!("--theta: {e}")))?),
    };
    let params = PipelineParams { theta, max_pairs: a.max_pairs, ..Default::default() };
    let an = run_pipeline(&points, body.as_ref(), &params)?;
    if let Some(path) = &a.emit_plot_data {
        let mut id = vec![-1i64; an.hull.facets.len()];
        for (k, c) in an.surviving().enumerate() {
            for &f in &c.facet_ids {
                id[f] = k as i64;
            }
        }
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        let d = an.hull.dim;
        let mut header: Vec<String> = (0..d).map(|k| format!("b{k}")).collect();
        header.extend((0..d).map(|k| format!("n{k}")));
        header.push("candidate".into());
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for (f, facet) in an.hull.facets.iter().enumerate() {
            let mut row: Vec<String> = an.hull.barycenter(f).iter().map(|&x| canonical::format_f64(x)).collect();
            row.extend(facet.normal.iter().map(|&x| canonical::format_f64(x)));
            row.push(id[f].to_string());
            w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
    }
    emit_json(&an.report, a.out.as_deref())
}

fn hyperbolic(op: HypOp) -> Result<()> {
    match op {
        HypOp::Check { cone, samples, seed } => emit_json(&check_hyperbolic(&load_cone(&cone)?, samples, seed)?, None),
        HypOp::Member { cone, x, exact, tol } => {
            let c = load_cone(&cone)?;
            let member = if exact { c.contains(&parse_rationals(&x)?)? } else { c.contains_f64(&parse_f64s(&x)?, tol)? };
            emit_json(&json!({ "member": member }), None)
        }
        HypOp::Facedim { cone, x, exact, tol, rank_tol } => {
            let c = load_cone(&cone)?;
            let (m, d) = if exact {
                let x = parse_rationals(&x)?;
                (c.multiplicity(&x)?, c.renegar_face_dim(&x)?)
            } else {
                let x = parse_f64s(&x)?;
                (c.multiplicity_f64(&x, tol)?, c.renegar_face_dim_f64(&x, tol, rank_tol)?)
            };
            emit_json(&json!({ "multiplicity": m, "face_dim": d }), None)
        }
        HypOp::Body { cone } => emit_json(hyperbolic_body(&load_cone(&cone)?)?.spec(), None),
    }
}

fn load_cone(a: &ConeArgs) -> Result<HyperbolicCone> {
    let e = parse_rationals(&a.e)?;
    let p = if !a.pencil.is_empty() {
        det_pencil(&a.pencil.iter().map(|p| read_matrix(p)).collect::<Result<Vec<_>>>()?)?
    } else {
        let name = a.poly.as_deref().unwrap_or_default();
        match gallery::poly_alias(name) {
            Some(p) => p,
            None => Polynomial::parse_with_nvars(std::fs::read_to_string(name)?.trim(), e.len())?,
        }
    };
    HyperbolicCone::new(p, e)
}

fn read_matrix(path: &Path) -> Result<Matrix<Rational>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        rows.push(rec.iter().map(parse_one_rational).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(rows)
}

fn parse_one_rational(s: &str) -> Result<Rational> {
    parse_rational(s.trim()).ok_or_else(|| Error::Parse(format!("not a rational number: {s:?}")))
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_one_rational).collect()
}

fn parse_f64s(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")))).collect()
}

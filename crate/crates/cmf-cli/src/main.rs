//! `cmf`: command-line front end.
//!
//! Exit codes: 0 success, 1 mathematical failure (cocycle check, pole,
//! undefined ratio, ...), 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmf::analysis::{estimate, pp_report, report_toml};
use cmf::constructors::{builtin, builtin_names};
use cmf::explore::{emit, scan, search_delta, write_csv, Orthant, ScanConfig};
use cmf::exprio::{load_cmf, print_matrix, CmfDocument};
use cmf::rat::{decimal_ulp, parse_decimal, parse_rational, parse_rational_list};
use cmf::trajectory::{metrics, walk, write_walk_csv, RatioVectors};
use cmf::{BigRat, Error, ExactCmf};
use num_traits::ToPrimitive;

#[derive(Parser)]
#[command(name = "cmf", version, about = "Conservative matrix fields: verify, evaluate, walk and scan")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the cocycle condition on the generators.
    Verify(SourceArgs),
    /// Print the symbolic matrix M_v.
    Matrix {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long, allow_hyphen_values = true)]
        v: Direction,
    },
    /// Print the numeric matrix M_v(x).
    Eval {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// Stream the ratio sequence as CSV.
    Walk {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        at: PointArgs,
        #[command(flatten)]
        vec: VectorArgs,
        /// Number of steps.
        #[arg(long = "N", short = 'N', default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        limit: LimitArgs,
        /// Decimal places of the printed ratio.
        #[arg(long, default_value_t = 30)]
        digits: usize,
        /// Write walk.csv here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimators at (N/2, N, 2N) plus eigenvalue data.
    Analyze {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        at: PointArgs,
        #[command(flatten)]
        vec: VectorArgs,
        #[arg(long = "N", short = 'N', default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        limit: LimitArgs,
        #[arg(long, default_value_t = 30)]
        digits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit matrix, characteristic polynomial and eigenvalues of T_{x,v}.
    Eig {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        at: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every primitive direction inside a radius.
    Scan {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Hill climb on the estimated irrationality measure.
    Search {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Direction,
        #[arg(long, default_value_t = 50)]
        max_steps: usize,
    },
    /// List the builtin CMFs.
    BuiltinList,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceSel {
    /// Builtin CMF name (see builtin-list).
    #[arg(long)]
    builtin: Option<String>,
    /// CMF document (TOML).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SourceArgs {
    #[command(flatten)]
    sel: SourceSel,
    /// Parameter value, e.g. `z=-1`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct PointArgs {
    /// Base point, comma-separated exact rationals.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Integer direction.
    #[arg(long, allow_hyphen_values = true)]
    v: Direction,
}

#[derive(Args)]
struct VectorArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Right vector of the numerator (default e_r).
    #[arg(long, allow_hyphen_values = true)]
    pp: Option<String>,
    /// Right vector of the denominator (default e_r).
    #[arg(long, allow_hyphen_values = true)]
    qp: Option<String>,
}

#[derive(Args)]
struct LimitArgs {
    /// Reference value of the limit as a decimal string.
    #[arg(long, visible_alias = "limit-digits", allow_hyphen_values = true)]
    limit: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrthantArg {
    Positive,
    All,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[command(flatten)]
    vec: VectorArgs,
    #[arg(long, default_value_t = 8.0)]
    radius: f64,
    #[arg(long, value_enum, default_value_t = OrthantArg::Positive)]
    orthant: OrthantArg,
    #[arg(long = "N", short = 'N', default_value_t = 100)]
    n: usize,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "CMF_WORKERS")]
    workers: Option<usize>,
    /// Decimal places of l̂ in the CSV.
    #[arg(long, default_value_t = 30)]
    digits: usize,
    #[command(flatten)]
    limit: LimitArgs,
    #[arg(long)]
    out: PathBuf,
}

/// Comma-separated integer vector.
#[derive(Clone, Debug)]
struct Direction(Vec<i64>);

impl std::str::FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',').map(|t| t.trim().parse::<i64>().map_err(|e| format!("`{t}`: {e}"))).collect::<Result<_, _>>().map(Direction)
    }
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    fn math(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidNumber(_)
            | Error::ZeroDenominator
            | Error::Syntax { .. }
            | Error::UnknownVariable { .. }
            | Error::ReservedName(_)
            | Error::Document(_)
            | Error::FormatVersion(_)
            | Error::DimensionMismatch(_)
            | Error::UnknownBuiltin(_)
            | Error::InvalidConfig(_)
            | Error::InvalidPfq(_)
            | Error::TomlDe(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::math(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load(src: &SourceArgs) -> Result<ExactCmf, Failure> {
    let mut cmf = match (&src.sel.builtin, &src.sel.file) {
        (Some(name), None) => builtin(name)?.cmf,
        (None, Some(path)) => {
            let doc = CmfDocument::read(path)?;
            load_cmf(&doc)?
        }
        _ => return Err(Failure::usage("exactly one of --builtin and --file is required")),
    };
    if !src.params.is_empty() {
        let mut values = Vec::new();
        for p in &src.params {
            let (k, v) = p.split_once('=').ok_or_else(|| Failure::usage(format!("--param `{p}` is not NAME=VALUE")))?;
            values.push((k.trim().to_string(), parse_rational(v)?));
        }
        cmf = cmf.substitute_parameters(&values)?;
    }
    Ok(cmf)
}

/// A verified CMF: documents are checked here, builtins at load time.
fn load_verified(src: &SourceArgs) -> Result<ExactCmf, Failure> {
    let mut cmf = load(src)?;
    if !cmf.is_verified() {
        cmf.verify().map_err(|f| {
            Failure::math(format!("cocycle check fails for generators ({}, {}) at entry ({}, {})", f.i, f.j, f.row, f.col))
        })?;
    }
    Ok(cmf)
}

/// Parses x; extra trailing coordinates are dropped with a warning.
fn point(cmf: &ExactCmf, s: &str) -> Result<Vec<BigRat>, Failure> {
    let mut x = parse_rational_list(s)?;
    let d = cmf.dim();
    if x.len() > d {
        eprintln!("warning: --x has {} coordinates, the CMF has dimension {d}; using the first {d}", x.len());
        x.truncate(d);
    }
    if x.len() != d {
        return Err(Failure::usage(format!("--x has {} coordinates, the CMF has dimension {d}", x.len())));
    }
    Ok(x)
}

fn direction(cmf: &ExactCmf, v: &[i64]) -> Result<(), Failure> {
    if v.len() != cmf.dim() {
        return Err(Failure::usage(format!("--v has {} entries, the CMF has dimension {}", v.len(), cmf.dim())));
    }
    Ok(())
}

fn vectors(cmf: &ExactCmf, a: &VectorArgs) -> Result<RatioVectors, Failure> {
    let r = cmf.rank();
    let get = |s: &str, flag: &str| -> Result<Vec<BigRat>, Failure> {
        let v = parse_rational_list(s)?;
        if v.len() != r {
            return Err(Failure::usage(format!("--{flag} has {} entries, the rank is {r}", v.len())));
        }
        Ok(v)
    };
    let (p, q) = (get(&a.p, "p")?, get(&a.q, "q")?);
    Ok(match (&a.pp, &a.qp) {
        (None, None) => RatioVectors::new(p, q),
        (pp, qp) => {
            let e = RatioVectors::new(p.clone(), q.clone());
            let pp = pp.as_deref().map(|s| get(s, "pp")).transpose()?.unwrap_or(e.p_prime);
            let qp = qp.as_deref().map(|s| get(s, "qp")).transpose()?.unwrap_or(e.q_prime);
            RatioVectors::full(p, pp, q, qp)
        }
    })
}

fn limit(a: &LimitArgs) -> Result<Option<(BigRat, BigRat)>, Failure> {
    a.limit.as_deref().map(|s| Ok((parse_decimal(s)?, decimal_ulp(s)))).transpose()
}

fn write_out(dir: &Path, name: &str, text: &str) -> Outcome {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn scan_config(cmf: ExactCmf, a: &ScanArgs) -> Result<ScanConfig, Failure> {
    let x = point(&cmf, &a.x)?;
    let vecs = vectors(&cmf, &a.vec)?;
    let mut cfg = ScanConfig::new(cmf, x, vecs);
    cfg.radius = a.radius;
    cfg.orthant = match a.orthant {
        OrthantArg::Positive => Orthant::Positive,
        OrthantArg::All => Orthant::All,
    };
    cfg.n = a.n;
    cfg.workers = a.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    cfg.digits = a.digits;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Outcome {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::BuiltinList => {
            for name in builtin_names() {
                let b = builtin(name)?;
                writeln!(out, "{name}\tdim {} rank {}\t{}", b.cmf.dim(), b.cmf.rank(), b.description)?;
            }
        }
        Command::Verify(src) => {
            let cmf = load(&src)?;
            match cmf.check_generators() {
                Ok(()) => writeln!(out, "pass")?,
                Err(f) => {
                    writeln!(out, "fail: generators ({}, {}) differ at entry ({}, {})", f.i, f.j, f.row, f.col)?;
                    return Err(Failure::math("cocycle check failed"));
                }
            }
        }
        Command::Matrix { src, v } => {
            let cmf = load_verified(&src)?;
            direction(&cmf, &v.0)?;
            let m = cmf.matrix(&v.0)?;
            for row in print_matrix(&m, &cmf.names()) {
                writeln!(out, "[{}]", row.join(", "))?;
            }
        }
        Command::Eval { src, at } => {
            let cmf = load_verified(&src)?;
            let x = point(&cmf, &at.x)?;
            direction(&cmf, &at.v.0)?;
            let e = cmf.eval(&at.v.0, &x)?;
            writeln!(out, "{}", e.matrix)?;
            if e.singular {
                eprintln!("warning: M_v(x) is singular");
            }
        }
        Command::Walk { src, at, vec, n, limit: lim, digits, out: dir } => {
            let cmf = load_verified(&src)?;
            let x = point(&cmf, &at.x)?;
            direction(&cmf, &at.v.0)?;
            let vecs = vectors(&cmf, &vec)?;
            let seq = walk(&cmf, &x, &at.v.0, &vecs, n)?;
            let m = limit(&lim)?.map(|(l, ulp)| metrics(&seq, &l, &ulp));
            if let Some(k) = m.as_ref().and_then(|m| m.resolution_lost_at) {
                eprintln!("warning: reference precision exhausted from n = {k}; later metrics are omitted");
            }
            for k in seq.singular_steps.iter().take(5) {
                eprintln!("warning: step {k} has a singular matrix");
            }
            match dir {
                Some(d) => {
                    std::fs::create_dir_all(&d)?;
                    write_walk_csv(std::fs::File::create(d.join("walk.csv"))?, &seq, m.as_ref(), digits)?;
                }
                None => write_walk_csv(&mut out, &seq, m.as_ref(), digits)?,
            }
        }
        Command::Analyze { src, at, vec, n, limit: lim, digits, out: dir } => {
            let cmf = load_verified(&src)?;
            let x = point(&cmf, &at.x)?;
            direction(&cmf, &at.v.0)?;
            let vecs = vectors(&cmf, &vec)?;
            let est = estimate(&cmf, &x, &at.v.0, &vecs, n)?;
            let eig = pp_report(&cmf, &x, &at.v.0).map_err(|e| eprintln!("warning: no eigen data: {e}")).ok();
            let mut text = report_toml(Some(&est), eig.as_ref(), digits)?;
            if let Some((l, _)) = limit(&lim)? {
                let err = (&est.l_hat - &l).to_f64().map(f64::abs).unwrap_or(f64::NAN);
                text.push_str(&format!("\n[reference]\nabs_error = {err:e}\n"));
            }
            write!(out, "{text}")?;
            if let Some(d) = dir {
                write_out(&d, "report.toml", &text)?;
            }
        }
        Command::Eig { src, at, out: dir } => {
            let cmf = load_verified(&src)?;
            let x = point(&cmf, &at.x)?;
            direction(&cmf, &at.v.0)?;
            let eig = pp_report(&cmf, &x, &at.v.0)?;
            let text = report_toml(None, Some(&eig), 30)?;
            write!(out, "{text}")?;
            if let Some(d) = dir {
                write_out(&d, "eig.toml", &text)?;
            }
        }
        Command::Scan { src, scan: a } => {
            let cmf = load_verified(&src)?;
            let reference = limit(&a.limit)?.and_then(|(l, _)| l.to_f64());
            let cfg = scan_config(cmf, &a)?;
            let reports = scan(&cfg)?;
            let files = emit(&a.out, cfg.cmf.dim(), &reports, cfg.digits, reference)?;
            for f in files {
                writeln!(out, "{}", f.display())?;
            }
        }
        Command::Search { src, scan: a, start, max_steps } => {
            let cmf = load_verified(&src)?;
            direction(&cmf, &start.0)?;
            let cfg = scan_config(cmf, &a)?;
            let res = search_delta(&cfg, &start.0, max_steps)?;
            std::fs::create_dir_all(&a.out)?;
            let path = a.out.join("search.csv");
            write_csv(std::fs::File::create(&path)?, cfg.cmf.dim(), &res.visited, cfg.digits)?;
            let v: Vec<String> = res.best.v.iter().map(|c| c.to_string()).collect();
            let delta = res.best.delta_hat.map_or("none".to_string(), |d| format!("{d:.6}"));
            writeln!(out, "best v = ({}), delta_hat = {delta}, steps = {}, visited = {}", v.join(","), res.steps, res.visited.len())?;
            writeln!(out, "{}", path.display())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use blocky::config::Config;
use blocky::cover::{cover_support, is_blocky};
use blocky::extract::{corollary_rectangle, extract_blocky_with, guarantee_ledger};
use blocky::families::{regression_corpus, standard_corpus, FamilySpec};
use blocky::gamma2::{als_search, group_lift, halfgraph_lower_bound};
use blocky::io::{self, CoverFile};
use blocky::report::Report;
use blocky::structure::{max_one_rectangle_with, threshold_dimension_with, RectMode};
use blocky::suite::{load_corpus, run_suite, write_corpus};
use blocky::Error;

#[derive(Parser)]
#[command(name = "blocky", version, about = "Blocky covers of boolean matrices with small gamma-2 norm")]
struct Cli {
    /// TOML file overriding tolerances and search limits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances: a named corpus or a single JSON family spec.
    Gen(GenArgs),
    /// Size, density, blockiness, threshold dimension and largest 1-rectangle.
    Analyze { matrix: PathBuf },
    /// Search for a lambda-factorization by alternating least squares.
    Factorize {
        matrix: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the factorization if one is found.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a blocky cover and its recursion trace.
    Extract(ExtractArgs),
    /// A single large 1-rectangle from a cover.
    Rect { matrix: PathBuf, cover: PathBuf },
    /// Fourier algebra norm of a function on Z_2^k, or the half-graph bound.
    Gamma(GammaArgs),
    /// Run the acceptance checks against a corpus directory.
    Suite { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusName {
    Standard,
    Regression,
}

#[derive(Args)]
struct GenArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, conflicts_with = "spec")]
    corpus: Option<CorpusName>,
    /// A family spec as JSON, e.g. '{"family":"identity","n":3}'.
    #[arg(long, requires = "name")]
    spec: Option<String>,
    /// File stem for a single instance.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct ExtractArgs {
    matrix: PathBuf,
    #[arg(long, conflicts_with = "als", required_unless_present = "als")]
    factorization: Option<PathBuf>,
    /// Find the factorization by ALS with this lambda.
    #[arg(long)]
    als: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct GammaArgs {
    #[arg(conflicts_with = "halfgraph", required_unless_present = "halfgraph")]
    function: Option<PathBuf>,
    #[arg(long)]
    halfgraph: Option<usize>,
    /// Also write the group lift as `<PREFIX>.bm` and `<PREFIX>.lf`.
    #[arg(long, requires = "function")]
    lift: Option<PathBuf>,
}

/// What a command produced: a report, files to write with it, and the exit
/// code to use once everything is written.
struct Outcome {
    command: &'static str,
    input: Value,
    params: Value,
    results: Value,
    files: Vec<(PathBuf, String)>,
    code: u8,
}

fn with_path(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| e.in_file(path)
}

fn read_matrix(path: &Path) -> blocky::Result<blocky::matrix::BooleanMatrix> {
    io::read_matrix(path).map_err(with_path(path))
}

/// Writes every file to a sibling temporary and renames them into place
/// only after all writes succeeded.
fn write_all(files: &[(PathBuf, String)]) -> std::io::Result<()> {
    let mut staged = Vec::new();
    let result = (|| {
        for (path, text) in files {
            let mut tmp = path.clone().into_os_string();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            staged.push(tmp.clone());
            fs::write(&tmp, text)?;
        }
        for ((path, _), tmp) in files.iter().zip(&staged) {
            fs::rename(tmp, path)?;
        }
        Ok(())
    })();
    if result.is_err() {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

fn run(cli: &Cli, config: &Config) -> blocky::Result<Outcome> {
    match &cli.command {
        Command::Gen(args) => gen(args),
        Command::Analyze { matrix } => analyze(matrix, config),
        Command::Factorize { matrix, lambda, seed, out } => factorize(matrix, *lambda, *seed, out, config),
        Command::Extract(args) => extract(args, config),
        Command::Rect { matrix, cover } => rect(matrix, cover),
        Command::Gamma(args) => gamma(args),
        Command::Suite { dir } => suite(dir, config),
    }
}

fn gen(args: &GenArgs) -> blocky::Result<Outcome> {
    let specs = match (&args.corpus, &args.spec) {
        (Some(CorpusName::Standard), _) => standard_corpus(),
        (Some(CorpusName::Regression), _) => {
            regression_corpus().into_iter().enumerate().map(|(k, s)| (format!("regression_{k:02}"), s)).collect()
        }
        (None, Some(text)) => {
            let spec: FamilySpec =
                serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("--spec: {e}")))?;
            vec![(args.name.clone().expect("clap enforces --name"), spec)]
        }
        (None, None) => return Err(Error::InvalidParameter("pass --corpus or --spec".into())),
    };
    let count = write_corpus(&args.out, &specs)?;
    Ok(Outcome {
        command: "gen",
        input: json!({ "out": args.out }),
        params: json!({ "corpus": args.corpus.map(|c| match c { CorpusName::Standard => "standard", CorpusName::Regression => "regression" }), "spec": args.spec }),
        results: json!({ "instances": count }),
        files: Vec::new(),
        code: 0,
    })
}

fn analyze(path: &Path, config: &Config) -> blocky::Result<Outcome> {
    let a = read_matrix(path)?;
    let blocky = is_blocky(&a);
    let td = threshold_dimension_with(&a, config.td_options());
    let (mode, rect) = if a.is_zero() {
        (None, None)
    } else {
        let exact = a.rows().min(a.cols()) <= config.rect_exact_limit;
        let r = max_one_rectangle_with(&a, RectMode::Auto, config.rect_exact_limit)?;
        (Some(if exact { "exact" } else { "greedy" }), Some(r))
    };
    Ok(Outcome {
        command: "analyze",
        input: json!({ "matrix": path }),
        params: json!({}),
        results: json!({
            "m": a.rows(),
            "n": a.cols(),
            "support": a.support_size(),
            "density": a.density(),
            "blocky": blocky.is_some(),
            "blocks": blocky,
            "threshold_dimension": td,
            "max_rectangle": rect.as_ref().map(|r| json!({ "mode": mode, "size": r.size(), "rectangle": r })),
        }),
        files: Vec::new(),
        code: 0,
    })
}

fn factorize(path: &Path, lambda: f64, seed: u64, out: &Path, config: &Config) -> blocky::Result<Outcome> {
    let a = read_matrix(path)?;
    let report = als_search(&a, &config.als_options(lambda, seed))?;
    let found = report.factorization.is_some();
    let files = report.factorization.iter().map(|f| (out.to_path_buf(), io::format_factorization(f))).collect();
    Ok(Outcome {
        command: "factorize",
        input: json!({ "matrix": path }),
        params: json!({ "lambda": lambda, "seed": seed, "out": out }),
        results: json!({ "found": found, "search": report }),
        files,
        code: if found { 0 } else { 1 },
    })
}

fn extract(args: &ExtractArgs, config: &Config) -> blocky::Result<Outcome> {
    let a = read_matrix(&args.matrix)?;
    let (f, source) = match (&args.factorization, args.als) {
        (Some(p), _) => (io::read_factorization(p, config.tol).map_err(with_path(p))?, json!({ "file": p })),
        (None, Some(lambda)) => {
            let report = als_search(&a, &config.als_options(lambda, args.seed))?;
            let f = report.factorization.clone().ok_or_else(|| {
                Error::Precondition(format!("ALS found no {lambda}-factorization in {} restarts", report.runs.len()))
            })?;
            (f, json!({ "als": report }))
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let (cover, trace) = extract_blocky_with(&a, &f, &config.extract_options())?;
    let flags = guarantee_ledger(&trace, config.ledger_constant);
    let cover_json = serde_json::to_string_pretty(&CoverFile::new(a.rows(), a.cols(), &cover))?;
    let trace_json = serde_json::to_string_pretty(&trace)?;
    println!("coverage {} / {} = {:.6}", trace.coverage, trace.support, trace.coverage_fraction());
    Ok(Outcome {
        command: "extract",
        input: json!({ "matrix": args.matrix, "factorization": source }),
        params: json!({ "cover": args.cover, "trace": args.trace, "lambda": f.lambda() }),
        results: json!({
            "support": trace.support,
            "coverage": trace.coverage,
            "coverage_fraction": trace.coverage_fraction(),
            "blocks": cover.len(),
            "steps": trace.steps.len(),
            "ledger_flags": flags,
        }),
        files: vec![(args.cover.clone(), cover_json), (args.trace.clone(), trace_json)],
        code: 0,
    })
}

fn rect(matrix: &Path, cover_path: &Path) -> blocky::Result<Outcome> {
    let a = read_matrix(matrix)?;
    let file = io::read_cover(cover_path).map_err(with_path(cover_path))?;
    if (file.m, file.n) != a.shape() {
        return Err(Error::Dimension(format!("cover is for {}x{}, matrix is {}x{}", file.m, file.n, a.rows(), a.cols())));
    }
    let cover = file.cover();
    cover.validate(a.rows(), a.cols())?;
    cover_support(&a, &cover)?;
    let r = corollary_rectangle(&a, &cover)?;
    let certified = r.certified(a.rows(), a.cols());
    Ok(Outcome {
        command: "rect",
        input: json!({ "matrix": matrix, "cover": cover_path }),
        params: json!({}),
        results: json!({ "rectangle": r, "certified": certified }),
        files: Vec::new(),
        code: 0,
    })
}

fn gamma(args: &GammaArgs) -> blocky::Result<Outcome> {
    if let Some(n) = args.halfgraph {
        let bound = halfgraph_lower_bound(n)?;
        return Ok(Outcome {
            command: "gamma",
            input: json!({ "halfgraph": n }),
            params: json!({}),
            results: json!({ "value": bound, "halfgraph_gamma2_lower_bound": bound - 1.0 }),
            files: Vec::new(),
            code: 0,
        });
    }
    let path = args.function.as_ref().expect("clap requires a function file");
    let f = io::read_group_function(path).map_err(with_path(path))?;
    let mut files = Vec::new();
    if let Some(prefix) = &args.lift {
        let (a, fac) = group_lift(&f)?;
        let with_ext = |ext: &str| {
            let mut p = prefix.clone().into_os_string();
            p.push(ext);
            PathBuf::from(p)
        };
        files.push((with_ext(".bm"), io::format_matrix(&a)));
        files.push((with_ext(".lf"), io::format_factorization(&fac)));
    }
    Ok(Outcome {
        command: "gamma",
        input: json!({ "function": path }),
        params: json!({ "lift": args.lift }),
        results: json!({ "k": f.k(), "support": f.values().iter().filter(|&&b| b).count(), "algebra_norm": f.algebra_norm(), "coefficients": f.coeffs() }),
        files,
        code: 0,
    })
}

fn suite(dir: &Path, config: &Config) -> blocky::Result<Outcome> {
    let corpus = load_corpus(dir, config.tol)?;
    let summary = run_suite(&corpus, config);
    for c in &summary.criteria {
        eprintln!("[{}] {:>2} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
    }
    Ok(Outcome {
        command: "suite",
        input: json!({ "dir": dir }),
        params: json!({}),
        code: if summary.passed { 0 } else { 3 },
        results: serde_json::to_value(&summary)?,
        files: Vec::new(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let config = match cli.config.as_deref().map(Config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run(&cli, &config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_invariant() { 2 } else { 1 });
        }
    };
    let report = Report::new(outcome.command, outcome.input, outcome.params, outcome.results, &config, start.elapsed());
    let mut files = outcome.files;
    match &cli.report {
        Some(path) => files.push((path.clone(), report.to_json() + "\n")),
        None => println!("{}", report.to_json()),
    }
    if let Err(e) = write_all(&files) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code)
}

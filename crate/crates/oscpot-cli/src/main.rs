//! Command-line front end for the oscillatory potential toolkit.
//!
//! One subcommand per library surface: symbol evaluation, exponent-pair
//! classification (single point or streamed CSV batch), region-geometry
//! export, operator application on serialized grids, dyadic decay fits, and
//! probe campaigns.
//!
//! Exit codes: `2` for flag or precondition validation failures (including
//! parameter bounds enforced by clap or by the parameter constructors), `1`
//! for computational errors (the library's error text goes to standard
//! error), `0` on success.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use oscpot::dyadic::{verify_decay, CutoffEta};
use oscpot::grid::GridFunction;
use oscpot::operator::{apply_direct, apply_spectral, KernelPart};
use oscpot::probes::{parse_campaign, run_campaign};
use oscpot::regions::{polygon_export, rationalize, CaseGeometry, PlanePoint};
use oscpot::symbol::{
    default_eps_ladder, symbol_closed_form, symbol_quadrature, PotentialParams,
};
use oscpot::{Complex64, Error};

// ---------------------------------------------------------------------------
// Argument surface.

#[derive(Parser)]
#[command(
    name = "oscpot",
    version,
    about = "Oscillatory potential operators: symbols, mapping regions, grid application, probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SymbolMethod {
    /// Hypergeometric closed form.
    Closed,
    /// Abel-regularized radial quadrature.
    Quad,
    /// Both, plus their relative disagreement.
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ApplyMethod {
    /// Fourier-multiplier path (fast, full kernel only).
    Spectral,
    /// Quadrature-weight convolution path.
    Direct,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ApplyPart {
    Full,
    Near,
    Far,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the convolution symbol at one radial frequency.
    Symbol {
        /// Ambient dimension (>= 2).
        #[arg(long)]
        n: u32,
        /// Real part of the order.
        #[arg(long)]
        alpha_re: f64,
        /// Imaginary part of the order.
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        /// Radial frequency |xi| (>= 0).
        #[arg(long)]
        xi: f64,
        #[arg(long, value_enum, default_value_t = SymbolMethod::Closed)]
        method: SymbolMethod,
    },
    /// Classify an exponent pair (1/p, 1/q), singly or from a CSV batch.
    Region {
        /// Ambient dimension (single-point mode).
        #[arg(long)]
        n: Option<u32>,
        /// Order (real; single-point mode).
        #[arg(long)]
        alpha: Option<f64>,
        /// 1/p in [0, 1] (single-point mode).
        #[arg(long)]
        inv_p: Option<f64>,
        /// 1/q in [0, 1] (single-point mode).
        #[arg(long)]
        inv_q: Option<f64>,
        /// CSV file with lines "n,alpha,inv_p,inv_q"; results stream to
        /// standard output as "status,case_id" in input order.
        #[arg(long, conflicts_with_all = ["n", "alpha", "inv_p", "inv_q"])]
        batch: Option<PathBuf>,
    },
    /// Write the mapping-region geometry (vertices, polygons, segments) as JSON.
    Polygon {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the operator to a serialized grid function.
    Apply {
        #[arg(long)]
        n: u32,
        /// Order; accepts "a", "a+bi", or "a-bi".
        #[arg(long, value_parser = parse_complex_arg)]
        alpha: Complex64,
        /// Input grid (binary layout; ".json" files use the JSON mirror).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output grid (same format rules as the input).
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ApplyMethod::Spectral)]
        method: ApplyMethod,
        /// Kernel part: near (inside the unit ball), far (outside), or full.
        /// Parts other than "full" require the direct method.
        #[arg(long, value_enum, default_value_t = ApplyPart::Full)]
        part: ApplyPart,
    },
    /// Fit the growth/decay exponents of the dyadic kernel pieces.
    Decompose {
        #[arg(long)]
        n: u32,
        /// Order; accepts "a", "a+bi", or "a-bi".
        #[arg(long, value_parser = parse_complex_arg)]
        alpha: Complex64,
        /// Largest piece index; pieces 2..=L enter the fits (3 <= L <= 12).
        #[arg(long)]
        ell_max: u32,
        /// Report to produce (only "decay" is defined).
        #[arg(long, value_parser = ["decay"])]
        report: String,
    },
    /// Run a probe campaign from a TOML config file.
    Probe {
        #[arg(long)]
        config: PathBuf,
        /// Per-ladder-entry measurements (default: config path with
        /// extension "rows.csv").
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Per-probe summaries (default: config path with extension
        /// "summary.json").
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// Failure plumbing.

enum Failure {
    /// Flag/precondition validation: exit 2.
    Usage(String),
    /// Computational error from the library: exit 1.
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type CliResult = Result<(), Failure>;

/// Treat an error as a validation failure (used for parameter constructors,
/// which only ever reject out-of-range flag values).
fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("{msg}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}

/// Cap internal parallelism when OSCPOT_THREADS is set.
fn configure_threads() -> Result<(), String> {
    match std::env::var("OSCPOT_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.parse::<usize>() {
            Ok(k) if k >= 1 => {
                // A failure here means a pool already exists (only possible
                // in-process, not for this binary); the cap still applies.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
                Ok(())
            }
            _ => Err(format!(
                "OSCPOT_THREADS must be a positive integer, got '{v}'"
            )),
        },
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Symbol { n, alpha_re, alpha_im, xi, method } => {
            cmd_symbol(n, alpha_re, alpha_im, xi, method)
        }
        Command::Region { n, alpha, inv_p, inv_q, batch } => {
            cmd_region(n, alpha, inv_p, inv_q, batch)
        }
        Command::Polygon { n, alpha, out } => cmd_polygon(n, alpha, &out),
        Command::Apply { n, alpha, input, out, method, part } => {
            cmd_apply(n, alpha, &input, &out, method, part)
        }
        Command::Decompose { n, alpha, ell_max, report: _ } => cmd_decompose(n, alpha, ell_max),
        Command::Probe { config, out_csv, out_json } => {
            cmd_probe(&config, out_csv.as_deref(), out_json.as_deref())
        }
    }
}

// ---------------------------------------------------------------------------
// Complex formatting: "a+bi" with at most 9 fractional digits, trailing
// zeros trimmed (so the imaginary unit value prints as "0+6.283185307i").

fn fmt_f9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mut s = format!("{x:.9}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn fmt_complex(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", fmt_f9(z.re), fmt_f9(-z.im))
    } else {
        format!("{}+{}i", fmt_f9(z.re), fmt_f9(z.im))
    }
}

/// Parse "a", "a+bi", "a-bi", or "bi" (scientific notation allowed in
/// either part).
fn parse_complex_arg(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("cannot parse '{t}' as a number"));
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re_s, im_s) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let re = re_s.parse::<f64>().map_err(|_| format!("cannot parse real part of '{t}'"))?;
    let im = match im_s {
        "+" | "" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| format!("cannot parse imaginary part of '{t}'"))?,
    };
    Ok(Complex64::new(re, im))
}

// ---------------------------------------------------------------------------
// Subcommands.

fn cmd_symbol(n: u32, alpha_re: f64, alpha_im: f64, xi: f64, method: SymbolMethod) -> CliResult {
    let p = PotentialParams::new(n, Complex64::new(alpha_re, alpha_im)).map_err(usage)?;
    if !xi.is_finite() || xi < 0.0 {
        return Err(Failure::Usage(format!("--xi must be finite and non-negative, got {xi}")));
    }
    match method {
        SymbolMethod::Closed => {
            println!("{}", fmt_complex(symbol_closed_form(&p, xi)?.value));
        }
        SymbolMethod::Quad => {
            println!("{}", fmt_complex(symbol_quadrature(&p, xi, &default_eps_ladder())?.value));
        }
        SymbolMethod::Both => {
            let c = symbol_closed_form(&p, xi)?.value;
            let q = symbol_quadrature(&p, xi, &default_eps_ladder())?.value;
            let denom = c.norm().max(q.norm());
            let rel = if denom == 0.0 { 0.0 } else { (c - q).norm() / denom };
            println!("closed: {}", fmt_complex(c));
            println!("quadrature: {}", fmt_complex(q));
            println!("relative disagreement: {rel:.3e}");
        }
    }
    Ok(())
}

fn cmd_region(
    n: Option<u32>,
    alpha: Option<f64>,
    inv_p: Option<f64>,
    inv_q: Option<f64>,
    batch: Option<PathBuf>,
) -> CliResult {
    if let Some(path) = batch {
        return region_batch(&path);
    }
    let (Some(n), Some(alpha), Some(inv_p), Some(inv_q)) = (n, alpha, inv_p, inv_q) else {
        return Err(Failure::Usage(
            "region needs either --batch FILE or all of --n --alpha --inv-p --inv-q".into(),
        ));
    };
    // Parameter validation (dimension, order range, unit-square bounds)
    // belongs to exit 2.
    PotentialParams::new(n, Complex64::new(alpha, 0.0)).map_err(usage)?;
    PlanePoint::new(inv_p, inv_q).map_err(usage)?;
    let geo = CaseGeometry::new(n, rationalize(alpha)?)?;
    let v = geo.classify_point(rationalize(inv_p)?, rationalize(inv_q)?);
    match v.case_id {
        Some(case) => println!("{} {}", v.status, case),
        None => println!("{}", v.status),
    }
    Ok(())
}

/// Stream "n,alpha,inv_p,inv_q" lines to "status,case_id" lines, memoizing
/// the exact clause geometry per distinct (n, alpha).
fn region_batch(path: &Path) -> CliResult {
    let file = fs::File::open(path).map_err(Error::from)?;
    let reader = BufReader::new(file);
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut cache: BTreeMap<(u32, u64), CaseGeometry> = BTreeMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(Error::from)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let bad = |what: &str| {
            Failure::Run(Error::Serialization {
                message: format!("batch line {}: {what}: '{trimmed}'", lineno + 1),
            })
        };
        let mut fields = trimmed.split(',');
        let mut next = |what: &'static str| {
            fields
                .next()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| bad(&format!("missing field {what}")))
        };
        let n: u32 = next("n")?.parse().map_err(|_| bad("cannot parse n"))?;
        let alpha: f64 = next("alpha")?.parse().map_err(|_| bad("cannot parse alpha"))?;
        let inv_p: f64 = next("inv_p")?.parse().map_err(|_| bad("cannot parse inv_p"))?;
        let inv_q: f64 = next("inv_q")?.parse().map_err(|_| bad("cannot parse inv_q"))?;
        let geo = match cache.entry((n, alpha.to_bits())) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(CaseGeometry::new(n, rationalize(alpha)?)?)
            }
        };
        let v = geo.classify_point(rationalize(inv_p)?, rationalize(inv_q)?);
        match v.case_id {
            Some(case) => writeln!(out, "{},{}", v.status, case).map_err(Error::from)?,
            None => writeln!(out, "{},", v.status).map_err(Error::from)?,
        }
    }
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn cmd_polygon(n: u32, alpha: f64, out: &Path) -> CliResult {
    PotentialParams::new(n, Complex64::new(alpha, 0.0)).map_err(usage)?;
    let doc = polygon_export(n, alpha)?;
    let mut text = doc.to_json()?;
    text.push('\n');
    fs::write(out, text).map_err(Error::from)?;
    Ok(())
}

fn read_grid(path: &Path) -> Result<GridFunction, Failure> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = fs::read_to_string(path).map_err(Error::from)?;
        Ok(GridFunction::from_json(&text)?)
    } else {
        let bytes = fs::read(path).map_err(Error::from)?;
        Ok(GridFunction::from_bytes(&bytes)?)
    }
}

fn write_grid(path: &Path, g: &GridFunction) -> Result<(), Failure> {
    if path.extension().is_some_and(|e| e == "json") {
        fs::write(path, g.to_json()?).map_err(Error::from)?;
    } else {
        fs::write(path, g.to_bytes()).map_err(Error::from)?;
    }
    Ok(())
}

fn cmd_apply(
    n: u32,
    alpha: Complex64,
    input: &Path,
    out: &Path,
    method: ApplyMethod,
    part: ApplyPart,
) -> CliResult {
    let p = PotentialParams::new(n, alpha).map_err(usage)?;
    if method == ApplyMethod::Spectral && part != ApplyPart::Full {
        return Err(Failure::Usage(
            "--part near/far splits the kernel at the unit ball, which only the direct \
             method computes; use --method direct"
                .into(),
        ));
    }
    let f = read_grid(input)?;
    let g = match method {
        ApplyMethod::Spectral => apply_spectral(&p, &f)?,
        ApplyMethod::Direct => {
            let kernel_part = match part {
                ApplyPart::Full => KernelPart::Full,
                ApplyPart::Near => KernelPart::Near,
                ApplyPart::Far => KernelPart::Far,
            };
            apply_direct(&p, &f, kernel_part, f.diagonal_extent() + 1.0)?
        }
    };
    write_grid(out, &g)?;
    Ok(())
}

fn cmd_decompose(n: u32, alpha: Complex64, ell_max: u32) -> CliResult {
    let p = PotentialParams::new(n, alpha).map_err(usage)?;
    if !(3..=12).contains(&ell_max) {
        return Err(Failure::Usage(format!(
            "--ell-max must lie in 3..=12 (pieces 2..=L enter the fits), got {ell_max}"
        )));
    }
    let ells: Vec<u32> = (2..=ell_max).collect();
    let slopes = verify_decay(&p, &CutoffEta::exponential_glue(), &ells, 4)?;
    let predicted = p.alpha().re - (p.nf() - 1.0) / 2.0;
    println!(
        "annulus growth slope = {:.6} (predicted {:.6})",
        slopes.slope_center, predicted
    );
    println!("below-annulus decay slope = {:.6}", slopes.slope_smallxi);
    println!("above-annulus decay slope = {:.6}", slopes.slope_tail);
    Ok(())
}

fn cmd_probe(config: &Path, out_csv: Option<&Path>, out_json: Option<&Path>) -> CliResult {
    let text = fs::read_to_string(config).map_err(Error::from)?;
    let cfg = parse_campaign(&text)?;
    let result = run_campaign(&cfg);
    let csv_path = out_csv
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.with_extension("rows.csv"));
    let json_path = out_json
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.with_extension("summary.json"));
    fs::write(&csv_path, result.to_csv()).map_err(Error::from)?;
    let mut json = result.summary_json()?;
    json.push('\n');
    fs::write(&json_path, json).map_err(Error::from)?;
    for o in &result.outcomes {
        println!("probe {} ({}): {}", o.index, o.kind, o.status);
    }
    Ok(())
}

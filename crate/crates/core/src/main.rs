//! Command-line front end: build modes, evaluate tomograms, run entropy
//! scans, verify the uncertainty relations, and emit plot-ready data files.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use beamtomo::entropy::{
    fresnel_entropy, optical_entropy, position_momentum_entropy_sum, r_surface_scan,
    tomographic_entropy, EntropyValue,
};
use beamtomo::error::Error;
use beamtomo::tomography::{
    fresnel_tomogram, homogeneity_check, optical_tomogram, reconstruct_correlation_1d,
    symplectic_tomogram_hg, symplectic_tomogram_numeric, tomogram_csv, tomogram_value,
    BeamSource, OpticalAngles, TomogramQuery,
};
use beamtomo::{
    hg_amplitude_1d, hg_tomogram_1d, parse_field, sample, write_field, GridSpec, HgMode,
    QuadratureSpec,
};

const TAU: f64 = std::f64::consts::TAU;

#[derive(Parser)]
#[command(
    name = "beamtomo",
    version,
    about = "Tomograms, tomographic entropies, and entropic uncertainty surfaces of 2D beam modes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate symplectic tomogram values for one query or a query list.
    Tomogram(TomogramCmd),
    /// Tomographic entropy for symplectic, optical, or Fresnel parameters.
    Entropy(EntropyCmd),
    /// Scan R(theta1, theta2) over [0, pi)^2 and export the surface.
    Rsurface(RsurfaceCmd),
    /// Recover a 1D mode intensity profile from its own tomogram.
    Reconstruct(ReconstructCmd),
    /// Run the invariant suite against an analytic mode.
    Check(CheckCmd),
    /// Sample a mode (optionally propagated) to a field file.
    Sample(SampleCmd),
}

/// Beam source: an analytic mode or a field file; exactly one.
#[derive(Args)]
struct SourceArgs {
    /// Mode order along x1.
    #[arg(long)]
    n: Option<u32>,
    /// Mode order along x2.
    #[arg(long)]
    m: Option<u32>,
    /// Waist width sigma0.
    #[arg(long)]
    sigma0: Option<f64>,
    /// Wavelength; the default 2 pi makes reduced units physical.
    #[arg(long, default_value_t = TAU)]
    lambda: f64,
    /// Field file in the text format (header lines `x1:`/`x2:`, then re/im rows).
    #[arg(long, conflicts_with_all = ["n", "m", "sigma0"])]
    field: Option<PathBuf>,
}

impl SourceArgs {
    fn mode(&self) -> Result<HgMode, Error> {
        match (self.n, self.m, self.sigma0) {
            (Some(n), Some(m), Some(sigma0)) => HgMode::with_wavelength(n, m, sigma0, self.lambda),
            _ => Err(Error::InvalidArgument(
                "an analytic mode needs --n, --m, and --sigma0".into(),
            )),
        }
    }

    fn resolve(&self) -> Result<BeamSource, Error> {
        if let Some(path) = &self.field {
            let text = std::fs::read_to_string(path)?;
            let field = parse_field(&text)?;
            let deviation = (field.norm() - 1.0).abs();
            if deviation > 1e-6 {
                eprintln!("note: field norm deviates by {deviation:.3e}; renormalizing");
            }
            Ok(BeamSource::Field(field.normalized()))
        } else {
            Ok(BeamSource::Mode(self.mode()?))
        }
    }
}

#[derive(Args)]
struct QuadArgs {
    /// Truncation half-width for callable-integrand quadrature.
    #[arg(long, default_value_t = 12.0)]
    half_width: f64,
    /// Starting trapezoid nodes per axis.
    #[arg(long, default_value_t = 4096)]
    nodes: usize,
    /// Absolute tolerance enforced by node doubling.
    #[arg(long, default_value_t = 1e-9)]
    abs_tol: f64,
}

impl QuadArgs {
    fn spec(&self) -> Result<QuadratureSpec, Error> {
        QuadratureSpec::new(self.half_width, self.nodes, self.abs_tol)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct TomogramCmd {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    quad: QuadArgs,
    /// One query `X1,mu1,nu1,X2,mu2,nu2`.
    #[arg(long, conflicts_with = "queries")]
    query: Option<String>,
    /// File with one query per line (`#` comments allowed).
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyCmd {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    quad: QuadArgs,
    /// Optical angle on axis 1 (radians); with --theta2 selects the optical entropy.
    #[arg(long, requires = "theta2", conflicts_with_all = ["mu1", "mu2"])]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    /// Symplectic mu1; all four of --mu1 --nu1 --mu2 --nu2 select the symplectic entropy.
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    nu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    #[arg(long)]
    nu2: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RsurfaceCmd {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    quad: QuadArgs,
    /// Lattice resolution per angle axis.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructCmd {
    /// 1D mode order.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    sigma0: f64,
    #[command(flatten)]
    quad: QuadArgs,
    /// Profile half-range.
    #[arg(long, default_value_t = 3.0)]
    xmax: f64,
    /// Sample count across [-xmax, xmax].
    #[arg(long, default_value_t = 61)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckCmd {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    quad: QuadArgs,
    /// R-surface lattice resolution used by the check.
    #[arg(long, default_value_t = 16)]
    grid: usize,
}

#[derive(Args)]
struct SampleCmd {
    #[command(flatten)]
    source: SourceArgs,
    /// Propagation distance applied before export.
    #[arg(long, default_value_t = 0.0)]
    z: f64,
    /// Grid half-width (default: mode tail bound plus margin).
    #[arg(long)]
    grid_half_width: Option<f64>,
    /// Grid nodes per axis.
    #[arg(long, default_value_t = 512)]
    grid_nodes: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BEAMTOMO_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: BEAMTOMO_THREADS must be a positive integer");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Tomogram(cmd) => run_tomogram(cmd),
        Command::Entropy(cmd) => run_entropy(cmd),
        Command::Rsurface(cmd) => run_rsurface(cmd),
        Command::Reconstruct(cmd) => run_reconstruct(cmd),
        Command::Check(cmd) => run_check(cmd),
        Command::Sample(cmd) => run_sample(cmd),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::NonConvergence { .. }
                | Error::Truncation { .. }
                | Error::ChirpUndersampled(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

/// Write a file atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), Error> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_tomogram(cmd: TomogramCmd) -> Result<u8, Error> {
    let source = cmd.source.resolve()?;
    let spec = cmd.quad.spec()?;
    let queries: Vec<TomogramQuery> = if let Some(text) = &cmd.query {
        vec![TomogramQuery::parse(text)?]
    } else if let Some(path) = &cmd.queries {
        let text = std::fs::read_to_string(path)?;
        let mut list = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            list.push(TomogramQuery::parse(line)?);
        }
        if list.is_empty() {
            return Err(Error::InvalidArgument("query file contains no queries".into()));
        }
        list
    } else {
        return Err(Error::InvalidArgument("give --query or --queries".into()));
    };

    let mut rows = Vec::with_capacity(queries.len());
    for q in &queries {
        rows.push((*q, tomogram_value(&source, q, &spec)?));
    }
    if cmd.out.is_none() && rows.len() == 1 {
        println!("{}", rows[0].1);
        return Ok(0);
    }
    emit(cmd.out.as_ref(), &tomogram_csv(&rows))?;
    Ok(0)
}

enum EntropyKind {
    Optical(OpticalAngles),
    Symplectic(f64, f64, f64, f64),
    Fresnel(f64, f64),
}

fn entropy_kind(cmd: &EntropyCmd) -> Result<EntropyKind, Error> {
    match (cmd.theta1, cmd.theta2, cmd.mu1, cmd.nu1, cmd.mu2, cmd.nu2) {
        (Some(t1), Some(t2), None, None, None, None) => {
            Ok(EntropyKind::Optical(OpticalAngles::new(t1, t2)))
        }
        (None, None, Some(mu1), Some(nu1), Some(mu2), Some(nu2)) => {
            Ok(EntropyKind::Symplectic(mu1, nu1, mu2, nu2))
        }
        (None, None, None, Some(nu1), None, Some(nu2)) => Ok(EntropyKind::Fresnel(nu1, nu2)),
        _ => Err(Error::InvalidArgument(
            "give --theta1/--theta2, or --mu1/--nu1/--mu2/--nu2, or --nu1/--nu2".into(),
        )),
    }
}

fn run_entropy(cmd: EntropyCmd) -> Result<u8, Error> {
    let source = cmd.source.resolve()?;
    let spec = cmd.quad.spec()?;
    let kind = entropy_kind(&cmd)?;
    let (label, params, h): (&str, [f64; 4], EntropyValue) = match kind {
        EntropyKind::Optical(angles) => {
            let h = optical_entropy(&source, &angles, &spec)?;
            (
                "optical",
                [angles.theta1(), angles.theta2(), f64::NAN, f64::NAN],
                h,
            )
        }
        EntropyKind::Symplectic(mu1, nu1, mu2, nu2) => {
            let h = tomographic_entropy(&source, mu1, nu1, mu2, nu2, &spec)?;
            ("symplectic", [mu1, nu1, mu2, nu2], h)
        }
        EntropyKind::Fresnel(nu1, nu2) => {
            let h = fresnel_entropy(&source, nu1, nu2, &spec)?;
            ("fresnel", [nu1, nu2, f64::NAN, f64::NAN], h)
        }
    };
    let contents = match cmd.format {
        Format::Csv => format!(
            "kind,p1,p2,p3,p4,H,estimated_error\n{label},{},{},{},{},{},{}\n",
            params[0], params[1], params[2], params[3], h.value, h.estimated_error
        ),
        Format::Json => {
            let doc = serde_json::json!({
                "kind": label,
                "params": params.iter().filter(|p| p.is_finite()).collect::<Vec<_>>(),
                "value": h.value,
                "estimated_error": h.estimated_error,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("entropy serializes"))
        }
    };
    if cmd.out.is_none() {
        println!("H = {} (estimated error {:.2e})", h.value, h.estimated_error);
        return Ok(0);
    }
    emit(cmd.out.as_ref(), &contents)?;
    Ok(0)
}

fn run_rsurface(cmd: RsurfaceCmd) -> Result<u8, Error> {
    let source = cmd.source.resolve()?;
    let spec = cmd.quad.spec()?;
    let surface = r_surface_scan(&source, cmd.grid, &spec)?;
    println!(
        "R surface {}x{}: min {:.6} mean {:.6} max {:.6}",
        cmd.grid,
        cmd.grid,
        surface.min(),
        surface.mean(),
        surface.max()
    );
    let contents = match cmd.format {
        Format::Csv => surface.to_csv(),
        Format::Json => format!("{}\n", surface.to_json()),
    };
    emit(cmd.out.as_ref(), &contents)?;
    Ok(0)
}

fn run_reconstruct(cmd: ReconstructCmd) -> Result<u8, Error> {
    if cmd.points < 2 {
        return Err(Error::InvalidArgument("need at least 2 points".into()));
    }
    let mode = HgMode::new(cmd.n, 0, cmd.sigma0)?;
    let spec = cmd.quad.spec()?;
    let sampler =
        |x_val: f64, mu: f64, nu: f64| hg_tomogram_1d(mode.n, mode.sigma0, x_val, mu, nu).unwrap_or(0.0);
    let mut out = String::from("x,intensity,expected\n");
    for i in 0..cmd.points {
        let x = -cmd.xmax + 2.0 * cmd.xmax * i as f64 / (cmd.points - 1) as f64;
        let recon = reconstruct_correlation_1d(&sampler, x, x, &spec)?;
        let amp = hg_amplitude_1d(mode.n, mode.sigma0, x);
        out.push_str(&format!("{},{},{}\n", x, recon.re, amp * amp));
    }
    emit(cmd.out.as_ref(), &out)?;
    Ok(0)
}

fn run_sample(cmd: SampleCmd) -> Result<u8, Error> {
    let mode = cmd.source.mode()?;
    if cmd.source.field.is_some() {
        return Err(Error::InvalidArgument("sample requires an analytic mode".into()));
    }
    let mut grid = GridSpec::for_mode(&mode);
    grid.nodes = cmd.grid_nodes;
    if let Some(hw) = cmd.grid_half_width {
        grid.half_width = hw;
    }
    let field = sample(&mode, &grid)?;
    let field = if cmd.z > 0.0 {
        beamtomo::free_space_propagate(&field, cmd.z, mode.lambda)?
    } else {
        field
    };
    write_atomic(&cmd.out, &write_field(&field))?;
    Ok(0)
}

/// Fixed nondegenerate queries used by the normalization and scaling checks.
const CHECK_QUERIES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (0.0, 1.0, 1.0, 0.0, 1.0, 1.0),
    (0.5, 1.0, 0.5, -0.3, 0.8, 0.7),
    (1.0, 0.3, 1.2, -1.0, 0.9, 0.4),
    (-0.7, 2.0, 0.6, 0.2, 1.5, 1.1),
    (0.0, 1.0, -0.8, 0.0, -1.0, 0.9),
    (1.3, -0.6, 1.4, 0.5, 0.7, -1.2),
    (2.0, 0.5, 0.5, -2.0, 0.5, 0.5),
    (-0.4, 1.1, 0.2, 0.9, 0.3, 1.6),
    (0.8, -1.5, 0.9, -0.6, 1.2, 0.8),
    (0.1, 0.4, 2.0, 0.3, 2.0, 0.4),
];

/// Normalization integral of one closed-form axis tomogram.
fn axis_norm_integral(order: u32, sigma0: f64, mu: f64, nu: f64) -> f64 {
    let scale = (mu * mu * sigma0 * sigma0 / 4.0 + nu * nu / (sigma0 * sigma0)).sqrt();
    let half = ((2.0 * order as f64 + 1.0).sqrt() + 8.0) * scale;
    let n = 8192;
    let h = 2.0 * half / n as f64;
    let mut acc = 0.0;
    for k in 0..=n {
        let x = -half + k as f64 * h;
        let w = hg_tomogram_1d(order, sigma0, x, mu, nu).unwrap_or(0.0);
        acc += if k == 0 || k == n { 0.5 * w } else { w };
    }
    acc * h
}

fn run_check(cmd: CheckCmd) -> Result<u8, Error> {
    let mode = cmd.source.mode()?;
    if cmd.source.field.is_some() {
        return Err(Error::InvalidArgument("check requires an analytic mode".into()));
    }
    let spec = cmd.quad.spec()?;
    let source = BeamSource::Mode(mode);
    let mut failed = false;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("check {name}: {} ({detail})", if ok { "pass" } else { "FAIL" });
        failed |= !ok;
    };

    // normalization over the fixed queries
    let mut worst = 0.0f64;
    for &(_, mu1, nu1, _, mu2, nu2) in &CHECK_QUERIES {
        let total = axis_norm_integral(mode.n, mode.sigma0, mu1, nu1)
            * axis_norm_integral(mode.m, mode.sigma0, mu2, nu2);
        worst = worst.max((total - 1.0).abs());
    }
    report("normalization", worst <= 1e-6, format!("worst |integral - 1| = {worst:.2e}"));

    // closed form vs grid evaluation on a sampled copy
    let field = sample(&mode, &GridSpec { half_width: GridSpec::for_mode(&mode).half_width, nodes: 1024 })?;
    let mut worst = 0.0f64;
    for &(x1, mu1, nu1, x2, mu2, nu2) in &CHECK_QUERIES {
        let q = TomogramQuery::new(x1, mu1, nu1, x2, mu2, nu2)?;
        let closed = symplectic_tomogram_hg(&mode, &q)?;
        let numeric = symplectic_tomogram_numeric(&field, &q, &spec)?;
        let err = (closed - numeric).abs() / closed.abs().max(1e-2);
        worst = worst.max(err);
    }
    report("oracle equivalence", worst <= 1e-6, format!("worst relative gap = {worst:.2e}"));

    // homogeneity
    let mut worst = 0.0f64;
    for (i, &(x1, mu1, nu1, x2, mu2, nu2)) in CHECK_QUERIES.iter().enumerate() {
        let q = TomogramQuery::new(x1, mu1, nu1, x2, mu2, nu2)?;
        let l1 = 0.5 + 0.25 * i as f64;
        let l2 = if i % 2 == 0 { 1.5 } else { -0.75 };
        let (lhs, rhs) = homogeneity_check(&q, l1, l2, &source, &spec)?;
        worst = worst.max((lhs - rhs).abs());
    }
    report("homogeneity", worst <= 1e-8, format!("worst |lhs - rhs| = {worst:.2e}"));

    // conversion identities
    let mut worst = 0.0f64;
    for &(x1, mu1, nu1, x2, mu2, nu2) in &CHECK_QUERIES {
        let q = TomogramQuery::new(x1, mu1, nu1, x2, mu2, nu2)?;
        let w = tomogram_value(&source, &q, &spec)?;
        // optical route (restricted to mu > 0 for the arctan branch)
        if mu1 > 0.0 && mu2 > 0.0 {
            let r1 = (mu1 * mu1 + nu1 * nu1).sqrt();
            let r2 = (mu2 * mu2 + nu2 * nu2).sqrt();
            let angles = OpticalAngles::new((nu1 / mu1).atan(), (nu2 / mu2).atan());
            let via_opt =
                optical_tomogram(&source, x1 / r1, &angles, x2 / r2, &spec)? / (r1 * r2);
            worst = worst.max((w - via_opt).abs());
        }
        // Fresnel route for mu != 0
        if mu1 != 0.0 && mu2 != 0.0 {
            let via_fresnel = fresnel_tomogram(
                &source,
                x1 / mu1,
                nu1 / mu1,
                x2 / mu2,
                nu2 / mu2,
                &spec,
            )? / (mu1 * mu2).abs();
            worst = worst.max((w - via_fresnel).abs());
        }
    }
    report("conversions", worst <= 1e-8, format!("worst |gap| = {worst:.2e}"));

    // entropic uncertainty bound on the sampled mode
    let field = sample(&mode, &GridSpec::for_mode(&mode))?;
    let pm = position_momentum_entropy_sum(&field);
    report(
        "entropic bound",
        pm.slack >= -1e-4,
        format!("Hx + Hp - 2 ln(pi e) = {:.6}", pm.slack),
    );

    // R-surface nonnegativity
    let surface = r_surface_scan(&source, cmd.grid, &spec)?;
    let (min, max) = (surface.min(), surface.max());
    report(
        "R nonnegativity",
        min >= -1e-4,
        format!("min R = {min:.6}, max R = {max:.6} on {0}x{0}", cmd.grid),
    );
    if min >= -1e-4 && max <= 1e-4 {
        println!("R ≈ 0 everywhere (saturating Gaussian)");
    }

    Ok(if failed { 3 } else { 0 })
}

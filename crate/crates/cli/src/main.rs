use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harper_core::butterfly::{render_butterfly, MAX_BINS, MAX_RASTER_Q};
use harper_core::dos::{dos_am_curve, dos_counting_derivative, dos_elliptic_curve, DosCurve};
use harper_core::eigen::{am_band_sweep, band_sweep_threads, BandGrid};
use harper_core::format::fmt_f64;
use harper_core::lattice::OperatorSpec;
use harper_core::parallel::default_threads;
use harper_core::spectral::{partition_harper, zeta_am_table, zeta_harper_table, ZetaMethod, ZetaTable};
use harper_core::verify::{format_table, run_verification};
use harper_core::Error;

#[derive(Parser, Debug)]
#[command(name = "harper", version, about = "Spectra of Harper and almost Mathieu operators")]
struct Cli {
    /// Cap on worker threads for parameter sweeps [default: available parallelism].
    /// Output does not depend on this value.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band energies over a grid of boundary phases.
    Bands(BandsArgs),
    /// Density of states curves.
    Dos(DosArgs),
    /// Spectral zeta function table.
    Zeta(ZetaArgs),
    /// Harper partition function from the even zeta series.
    Partition(PartitionArgs),
    /// Hofstadter butterfly raster (binary PGM).
    Butterfly(ButterflyArgs),
    /// Run the numerical self-checks and print a pass/fail table.
    Verify {
        /// Smaller sample sizes.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BandModel {
    Harper2d,
    Am,
}

#[derive(Args, Debug)]
struct BandsArgs {
    #[arg(long, value_enum, default_value = "harper2d")]
    model: BandModel,
    /// Period a: odd prime for harper2d, ≥ 2 for am.
    #[arg(long, default_value_t = 3)]
    a: u32,
    /// Period b: odd prime different from a (harper2d only).
    #[arg(long, default_value_t = 5)]
    b: u32,
    /// Flux α ∈ [0, 1).
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Flux β ∈ [0, 1) (harper2d only).
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Component index k (harper2d only).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k: i64,
    /// Component index ℓ.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    l: i64,
    /// Phase grid points per axis, ≥ 1.
    #[arg(long, default_value_t = 8)]
    grid: usize,
    #[arg(long, default_value = "bands.csv")]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DosMethodArg {
    Elliptic,
    Counting,
    Am,
}

#[derive(Args, Debug)]
struct DosArgs {
    #[arg(long, value_enum, default_value = "elliptic")]
    method: DosMethodArg,
    /// Period a: ≥ 1 (elliptic, am); odd prime (counting).
    #[arg(long, default_value_t = 3)]
    a: u32,
    /// Period b: ≥ 1 (elliptic); odd prime different from a (counting).
    #[arg(long, default_value_t = 5)]
    b: u32,
    /// Flux α ∈ [0, 1) (counting, am).
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Flux β ∈ [0, 1) (counting).
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Phase grid points per axis, ≥ 8 (counting).
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Histogram bins over [-4, 4], ≥ 16 (counting).
    #[arg(long, default_value_t = 64)]
    bins: usize,
    /// Energy grid points over [-4, 4] with both endpoints, ≥ 2 (elliptic, am).
    #[arg(long, default_value_t = 401)]
    steps: usize,
    #[arg(long, default_value = "dos.csv")]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ZetaModel {
    Harper,
    Am,
}

#[derive(Args, Debug)]
struct ZetaArgs {
    #[arg(long, value_enum, default_value = "harper")]
    model: ZetaModel,
    /// Highest order s: ≤ 40 (harper), ≤ 30 (am).
    #[arg(long, default_value_t = 12)]
    max_order: u32,
    /// Period a ≥ 1.
    #[arg(long, default_value_t = 3)]
    a: u32,
    /// Period b ≥ 1 (harper).
    #[arg(long, default_value_t = 5)]
    b: u32,
    /// Flux α ∈ [0, 1) (am).
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Component indices ℓ (am): comma list such as `-1,0,1` or inclusive range `-2..2`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    window: String,
    #[arg(long, default_value = "zeta.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    /// Temperature parameter, |t| ≤ 10.
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// Number of even terms, ≤ 20.
    #[arg(long, default_value_t = 12)]
    order: u32,
    /// Period a ≥ 1.
    #[arg(long, default_value_t = 1)]
    a: u32,
    /// Period b ≥ 1.
    #[arg(long, default_value_t = 1)]
    b: u32,
    #[arg(long, default_value = "partition.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ButterflyArgs {
    /// Largest flux denominator, 1..=60.
    #[arg(long, default_value_t = 30)]
    qmax: u64,
    /// Energy bins over [-4, 4], 1..=4096.
    #[arg(long, default_value_t = 800)]
    bins: usize,
    #[arg(long, default_value = "butterfly.pgm")]
    out: PathBuf,
    /// Also write the band table as CSV `p,q,lo,hi`.
    #[arg(long)]
    bands_out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn unit_interval(name: &str, x: f64) -> Result<(), Failure> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(usage(format!("--{name} = {x} must lie in [0, 1)")))
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let io_err = |e| Failure::Io(path.to_path_buf(), e);
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    f(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn summary(rows: usize, path: &Path, max: f64, start: Instant) -> String {
    format!("rows={rows} out={} max={} elapsed={:.3}s", path.display(), fmt_f64(max), start.elapsed().as_secs_f64())
}

fn parse_window(s: &str) -> Result<Vec<i64>, Failure> {
    let bad = || usage(format!("--window {s:?}: expected a comma list or an inclusive range lo..hi"));
    let s = s.trim();
    let out: Vec<i64> = if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi): (i64, i64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if lo > hi || hi - lo > 10_000 {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn bands(args: &BandsArgs, threads: usize) -> Outcome {
    let start = Instant::now();
    unit_interval("alpha", args.alpha)?;
    if args.grid == 0 {
        return Err(usage("--grid must be at least 1"));
    }
    let grid: BandGrid = match args.model {
        BandModel::Harper2d => {
            unit_interval("beta", args.beta)?;
            let spec = OperatorSpec::new(args.a, args.b, args.alpha, args.beta)?.with_component(args.k, args.l);
            band_sweep_threads(&spec, args.grid, threads)?
        }
        BandModel::Am => {
            if args.a < 2 {
                return Err(usage("--a must be at least 2 for the am model"));
            }
            am_band_sweep(args.a as usize, args.alpha, args.l, args.grid, threads)?
        }
    };
    let mut rows = 0;
    let mut max = f64::NEG_INFINITY;
    write_file(&args.out, |w| {
        if grid.dims == 2 {
            writeln!(w, "m1,m2,j,energy")?;
        } else {
            writeln!(w, "m,j,energy")?;
        }
        for (m1, m2, energies) in grid.points() {
            for (j, &e) in energies.iter().enumerate() {
                if grid.dims == 2 {
                    writeln!(w, "{m1},{m2},{j},{}", fmt_f64(e))?;
                } else {
                    writeln!(w, "{m1},{j},{}", fmt_f64(e))?;
                }
                rows += 1;
                max = max.max(e);
            }
        }
        Ok(())
    })?;
    Ok(summary(rows, &args.out, max, start))
}

fn dos(args: &DosArgs, threads: usize) -> Outcome {
    let start = Instant::now();
    let curve: DosCurve = match args.method {
        DosMethodArg::Elliptic => {
            if args.a == 0 || args.b == 0 || args.steps < 2 {
                return Err(usage("elliptic DOS needs --a, --b ≥ 1 and --steps ≥ 2"));
            }
            dos_elliptic_curve(args.a, args.b, args.steps)?
        }
        DosMethodArg::Counting => {
            unit_interval("alpha", args.alpha)?;
            unit_interval("beta", args.beta)?;
            if args.n < 8 || args.bins < 16 {
                return Err(usage("counting DOS needs --n ≥ 8 and --bins ≥ 16"));
            }
            let spec = OperatorSpec::new(args.a, args.b, args.alpha, args.beta)?;
            dos_counting_derivative(&spec, args.n, args.bins, threads)?
        }
        DosMethodArg::Am => {
            unit_interval("alpha", args.alpha)?;
            if args.a == 0 || args.steps < 2 {
                return Err(usage("am DOS needs --a ≥ 1 and --steps ≥ 2"));
            }
            dos_am_curve(args.a as usize, args.alpha, &[0], args.steps)?
        }
    };
    write_file(&args.out, |w| curve.write_csv(w))?;
    Ok(summary(curve.points.len(), &args.out, curve.max_finite(), start))
}

fn zeta(args: &ZetaArgs) -> Outcome {
    let start = Instant::now();
    if args.a == 0 {
        return Err(usage("--a must be at least 1"));
    }
    let table: ZetaTable = match args.model {
        ZetaModel::Harper => {
            if args.b == 0 {
                return Err(usage("--b must be at least 1"));
            }
            if args.max_order > 40 {
                return Err(usage("--max-order must be at most 40 for the harper model"));
            }
            zeta_harper_table(args.max_order, args.a, args.b)?
        }
        ZetaModel::Am => {
            unit_interval("alpha", args.alpha)?;
            if args.max_order > 30 {
                return Err(usage("--max-order must be at most 30 for the am model"));
            }
            let window = parse_window(&args.window)?;
            zeta_am_table(args.max_order, args.a as usize, args.alpha, &window, &[ZetaMethod::AmWinding, ZetaMethod::AmQuadrature])?
        }
    };
    write_file(&args.out, |w| table.write_csv(w))?;
    let max = table.rows.iter().map(|r| r.value.abs()).fold(0.0, f64::max);
    Ok(summary(table.rows.len(), &args.out, max, start))
}

fn partition(args: &PartitionArgs) -> Outcome {
    let start = Instant::now();
    if args.t.is_nan() || args.t.abs() > 10.0 {
        return Err(usage("--t must satisfy |t| ≤ 10"));
    }
    if args.order > 20 {
        return Err(usage("--order must be at most 20"));
    }
    if args.a == 0 || args.b == 0 {
        return Err(usage("--a and --b must be at least 1"));
    }
    let z = partition_harper(args.t, args.a, args.b, args.order)?;
    write_file(&args.out, |w| {
        writeln!(w, "t,value,truncation,converged")?;
        writeln!(w, "{},{},{},{}", fmt_f64(args.t), fmt_f64(z.value), fmt_f64(z.truncation), z.converged)
    })?;
    let note = if z.converged { "" } else { " (not converged at this order)" };
    Ok(format!("Z({}) = {}{note}; {}", fmt_f64(args.t), fmt_f64(z.value), summary(1, &args.out, z.value, start)))
}

fn butterfly(args: &ButterflyArgs, threads: usize) -> Outcome {
    let start = Instant::now();
    if args.qmax == 0 || args.qmax > MAX_RASTER_Q {
        return Err(usage(format!("--qmax must lie in 1..={MAX_RASTER_Q}")));
    }
    if args.bins == 0 || args.bins > MAX_BINS {
        return Err(usage(format!("--bins must lie in 1..={MAX_BINS}")));
    }
    let raster = render_butterfly(args.qmax, args.bins, threads)?;
    write_file(&args.out, |w| raster.write_pgm(w))?;
    if let Some(path) = &args.bands_out {
        write_file(path, |w| raster.write_bands_csv(w))?;
    }
    let lit = raster.occupancy.iter().filter(|&&b| b != 0).count();
    let max = raster.occupancy.iter().copied().max().unwrap_or(0);
    Ok(format!(
        "width={} height={} lit={lit} {}",
        raster.width(),
        raster.height(),
        summary(raster.height(), &args.out, max as f64, start)
    ))
}

fn verify(quick: bool) -> Outcome {
    let start = Instant::now();
    let checks = run_verification(quick);
    print!("{}", format_table(&checks));
    let failed = checks.iter().filter(|c| c.passed == Some(false)).count();
    let line = format!("checks={} failed={failed} elapsed={:.3}s", checks.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        return Err(Failure::Core(Error::Inconsistent(format!("{failed} verification check(s) failed; {line}"))));
    }
    Ok(line)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads.map_or_else(default_threads, |t| t as usize);
    let outcome = match &cli.command {
        Command::Bands(a) => bands(a, threads),
        Command::Dos(a) => dos(a, threads),
        Command::Zeta(a) => zeta(a),
        Command::Partition(a) => partition(a),
        Command::Butterfly(a) => butterfly(a, threads),
        Command::Verify { quick } => verify(*quick),
    };
    match outcome {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

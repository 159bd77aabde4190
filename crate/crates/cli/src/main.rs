//! Command-line surface: spectra, parameter sweeps, exceptional-point
//! scans, skin-effect profiles, and the invariant suite, emitted as CSV
//! or JSON.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 verification-suite failure. Data goes to stdout (or --out); all
//! diagnostics go to stderr.

mod output;

use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

use nh_lattice::analysis::{find_exceptional_points, sweep, MatrixKind, SweepAxis, SweepBase};
use nh_lattice::analytic::ModeSide;
use nh_lattice::eig::{eigensystem, EigenSystem};
use nh_lattice::model::{build_hamiltonian, build_transformed};
use nh_lattice::skin::density_profile;
use nh_lattice::{BoundaryFamily, Complex64, ComplexMatrix, Error as CoreError, ModelParams};

use output::{fmt_complex, fmt_f64, parse_complex, Cell, Format, Table};

#[derive(Parser)]
#[command(
    name = "nh-lattice",
    version,
    about = "Spectra, sweeps, exceptional points and skin-effect data \
             for the Hatano-Nelson chain with generalized boundary conditions",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and residuals of one chain.
    Spectrum(SpectrumArgs),
    /// Eigenvalue trajectories along a parameter grid.
    Sweep(ScanArgs),
    /// Exceptional-point search along a parameter bracket.
    Ep(ScanArgs),
    /// Averaged right/left mode densities and decay fits.
    Skin(SpectrumArgs),
    /// Run the invariant suite and print pass/fail per property.
    Verify(VerifyArgs),
}

fn parse_complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

/// Model parameters in either family or direct form.
#[derive(Args, Debug)]
struct ModelArgs {
    /// Number of lattice sites.
    #[arg(long)]
    n: usize,

    /// Family form: overall hopping scale t (complex, "a+bi").
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    t: Option<Complex64>,
    /// Family form: asymmetry exponent q (complex, "a+bi").
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    q: Option<Complex64>,
    /// Family form: boundary exponent weight rho in [0, 2].
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Family form: boundary phase phi.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,

    /// Direct form: left hopping t_L.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    tl: Option<Complex64>,
    /// Direct form: right hopping t_R.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    tr: Option<Complex64>,
    /// Direct form: boundary coefficient alpha_L.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    al: Option<Complex64>,
    /// Direct form: boundary coefficient alpha_R.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    ar: Option<Complex64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Use the gauge-transformed chain instead of the bare one.
    #[arg(long)]
    tilde: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Number of lattice sites.
    #[arg(long)]
    n: usize,
    /// Overall hopping scale t (complex).
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    t: Complex64,
    /// Asymmetry exponent q (complex).
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    q: Complex64,
    /// Fixed rho when scanning phi.
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Fixed phi when scanning rho.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,

    /// Scan rho over [A, B].
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    scan_rho: Option<Vec<f64>>,
    /// Scan phi over [A, B].
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    scan_phi: Option<Vec<f64>>,
    /// Scan the boundary prefactor r over [A, B], with
    /// alpha_L = r e^{qN/2} and alpha_R = e^{-qN/2}.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    scan_r: Option<Vec<f64>>,

    /// Number of grid points.
    #[arg(long, default_value_t = 201)]
    steps: usize,
    /// Use the gauge-transformed chain instead of the bare one.
    #[arg(long)]
    tilde: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Reduced draw counts and grids.
    #[arg(long)]
    quick: bool,
}

enum ModelSpec {
    Family(BoundaryFamily),
    Direct(ModelParams),
}

enum RunError {
    Core(CoreError),
    Io(std::io::Error),
    Usage(String),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
            RunError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl RunError {
    fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(CoreError::NonConvergence { .. }) => 2,
            _ => 1,
        }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    match dispatch(cli.command, threads) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn threads_from_env() -> Result<usize, String> {
    match std::env::var("NH_LATTICE_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(format!(
                "NH_LATTICE_THREADS must be an integer >= 1, got '{raw}'"
            )),
        },
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(e) => Err(format!("NH_LATTICE_THREADS unreadable: {e}")),
    }
}

fn dispatch(command: Command, threads: usize) -> Result<i32, RunError> {
    match command {
        Command::Spectrum(args) => {
            let table = spectrum_table(&args)?;
            emit(&table, &args.output)?;
            Ok(0)
        }
        Command::Skin(args) => {
            let table = skin_table(&args)?;
            emit(&table, &args.output)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            let table = sweep_table(&args, threads)?;
            emit(&table, &args.output)?;
            Ok(0)
        }
        Command::Ep(args) => {
            let table = ep_table(&args, threads)?;
            emit(&table, &args.output)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let mut stdout = std::io::stdout().lock();
            let ok = nh_lattice::verify::run_and_report(args.quick, &mut stdout)?;
            Ok(if ok { 0 } else { 3 })
        }
    }
}

fn emit(table: &Table, output: &OutputArgs) -> Result<(), RunError> {
    let rendered = table.render(output.format);
    match &output.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().lock().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn resolve_model(args: &ModelArgs) -> Result<ModelSpec, RunError> {
    let family_given = [args.t.is_some(), args.q.is_some(), args.rho.is_some(), args.phi.is_some()];
    let direct_given = [args.tl.is_some(), args.tr.is_some(), args.al.is_some(), args.ar.is_some()];
    let any_family = family_given.iter().any(|&b| b);
    let any_direct = direct_given.iter().any(|&b| b);
    if any_family && any_direct {
        return Err(RunError::Usage(
            "give either the family group (--t --q --rho --phi) or the direct group \
             (--tl --tr --al --ar), not both"
                .into(),
        ));
    }
    if any_family {
        if !family_given.iter().all(|&b| b) {
            return Err(RunError::Usage(
                "family form needs all of --t, --q, --rho, --phi".into(),
            ));
        }
        let family = BoundaryFamily::new(
            args.rho.unwrap(),
            args.phi.unwrap(),
            args.q.unwrap(),
            args.t.unwrap(),
        )?;
        Ok(ModelSpec::Family(family))
    } else if any_direct {
        if !direct_given.iter().all(|&b| b) {
            return Err(RunError::Usage(
                "direct form needs all of --tl, --tr, --al, --ar".into(),
            ));
        }
        let params = ModelParams::new(
            args.n,
            args.tl.unwrap(),
            args.tr.unwrap(),
            args.al.unwrap(),
            args.ar.unwrap(),
        )?;
        Ok(ModelSpec::Direct(params))
    } else {
        Err(RunError::Usage(
            "model parameters missing: give --t --q --rho --phi or --tl --tr --al --ar".into(),
        ))
    }
}

/// Metadata block shared by spectrum and skin emissions: the given
/// parameters plus the derived exponent and scale.
fn model_metadata(
    command: &str,
    args: &ModelArgs,
    spec: &ModelSpec,
    tilde: bool,
) -> Result<Vec<(String, String)>, RunError> {
    let mut meta: Vec<(String, String)> = vec![
        ("command".into(), command.into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("n".into(), args.n.to_string()),
        (
            "matrix".into(),
            if tilde { "tilde".into() } else { "bare".into() },
        ),
    ];
    let params = match spec {
        ModelSpec::Family(family) => {
            meta.push(("rho".into(), fmt_f64(family.rho())));
            meta.push(("phi".into(), fmt_f64(family.phi())));
            meta.push(("q".into(), fmt_complex(family.q())));
            meta.push(("t".into(), fmt_complex(family.t())));
            family.to_params(args.n)?
        }
        ModelSpec::Direct(params) => *params,
    };
    meta.push(("t_left".into(), fmt_complex(params.t_left())));
    meta.push(("t_right".into(), fmt_complex(params.t_right())));
    meta.push(("alpha_left".into(), fmt_complex(params.alpha_left())));
    meta.push(("alpha_right".into(), fmt_complex(params.alpha_right())));
    meta.push(("derived_q".into(), fmt_complex(params.asymmetry_exponent())));
    meta.push(("derived_t".into(), fmt_complex(params.hopping_scale())));
    let guard = params.asymmetry_exponent().re.abs() * args.n as f64;
    meta.push(("range_guard".into(), format!("ok:{}", fmt_f64(guard))));
    Ok(meta)
}

fn build_matrix(spec: &ModelSpec, n: usize, tilde: bool) -> Result<ComplexMatrix, RunError> {
    let m = match (spec, tilde) {
        (ModelSpec::Family(family), false) => family.hamiltonian(n)?,
        (ModelSpec::Family(family), true) => family.transformed(n)?,
        (ModelSpec::Direct(params), false) => build_hamiltonian(params),
        (ModelSpec::Direct(params), true) => build_transformed(params)?,
    };
    Ok(m)
}

fn spectrum_table(args: &SpectrumArgs) -> Result<Table, RunError> {
    let spec = resolve_model(&args.model)?;
    let m = build_matrix(&spec, args.model.n, args.tilde)?;
    let es = eigensystem(&m)?;
    let metadata = model_metadata("spectrum", &args.model, &spec, args.tilde)?;
    let mut rows = Vec::with_capacity(es.dim());
    for (k, value) in es.eigenvalues().iter().enumerate() {
        rows.push(vec![
            Cell::Int(k as i64),
            Cell::Float(value.re),
            Cell::Float(value.im),
            Cell::Float(es.residuals()[k]),
        ]);
    }
    Ok(Table { metadata, columns: vec!["index", "re", "im", "residual"], rows })
}

fn skin_table(args: &SpectrumArgs) -> Result<Table, RunError> {
    let spec = resolve_model(&args.model)?;
    let m = build_matrix(&spec, args.model.n, args.tilde)?;
    let es: EigenSystem = eigensystem(&m)?;
    let right = density_profile(&es, ModeSide::Right)?;
    let left = density_profile(&es, ModeSide::Left)?;

    let mut metadata = model_metadata("skin", &args.model, &spec, args.tilde)?;
    metadata.push(("side_right".into(), right.side().as_str().into()));
    metadata.push(("side_left".into(), left.side().as_str().into()));
    metadata.push(("rate_right".into(), fmt_f64(right.decay_rate())));
    metadata.push(("rate_left".into(), fmt_f64(left.decay_rate())));
    metadata.push(("r2_right".into(), fmt_f64(right.fit_r2())));
    metadata.push(("r2_left".into(), fmt_f64(left.fit_r2())));
    metadata.push(("ipr_right".into(), fmt_f64(right.ipr_mean())));
    metadata.push(("ipr_left".into(), fmt_f64(left.ipr_mean())));
    metadata.push(("trusted".into(), (right.trusted() && left.trusted()).to_string()));

    let mut rows = Vec::with_capacity(args.model.n);
    for site in 0..args.model.n {
        rows.push(vec![
            Cell::Int((site + 1) as i64),
            Cell::Float(right.densities()[site]),
            Cell::Float(left.densities()[site]),
            Cell::Float(right.decay_rate()),
            Cell::Float(left.decay_rate()),
        ]);
    }
    Ok(Table {
        metadata,
        columns: vec!["site", "density_right", "density_left", "rate_right", "rate_left"],
        rows,
    })
}

struct ScanSetup {
    base: SweepBase,
    axis: SweepAxis,
    lo: f64,
    hi: f64,
}

fn resolve_scan(args: &ScanArgs) -> Result<ScanSetup, RunError> {
    let scans = [
        (SweepAxis::Rho, &args.scan_rho),
        (SweepAxis::Phi, &args.scan_phi),
        (SweepAxis::BoundaryR, &args.scan_r),
    ];
    let mut chosen: Option<(SweepAxis, f64, f64)> = None;
    for (axis, value) in scans {
        if let Some(range) = value {
            if chosen.is_some() {
                return Err(RunError::Usage(
                    "give exactly one of --scan-rho, --scan-phi, --scan-r".into(),
                ));
            }
            chosen = Some((axis, range[0], range[1]));
        }
    }
    let (axis, lo, hi) =
        chosen.ok_or_else(|| RunError::Usage("one of --scan-rho, --scan-phi, --scan-r is required".into()))?;
    if args.steps < 2 {
        return Err(RunError::Usage("--steps must be at least 2".into()));
    }
    match axis {
        SweepAxis::Rho => {
            if args.rho.is_some() {
                return Err(RunError::Usage("--rho conflicts with --scan-rho".into()));
            }
        }
        SweepAxis::Phi => {
            if args.phi.is_some() {
                return Err(RunError::Usage("--phi conflicts with --scan-phi".into()));
            }
        }
        SweepAxis::BoundaryR => {
            if args.rho.is_some() || args.phi.is_some() {
                return Err(RunError::Usage(
                    "--scan-r uses the boundary template; --rho/--phi do not apply".into(),
                ));
            }
        }
    }
    let base = SweepBase {
        n_sites: args.n,
        t: args.t,
        q: args.q,
        rho: args.rho.unwrap_or(0.0),
        phi: args.phi.unwrap_or(0.0),
        kind: if args.tilde { MatrixKind::Transformed } else { MatrixKind::Bare },
    };
    Ok(ScanSetup { base, axis, lo, hi })
}

fn scan_metadata(command: &str, args: &ScanArgs, setup: &ScanSetup) -> Vec<(String, String)> {
    vec![
        ("command".into(), command.into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("n".into(), args.n.to_string()),
        (
            "matrix".into(),
            if args.tilde { "tilde".into() } else { "bare".into() },
        ),
        ("t".into(), fmt_complex(args.t)),
        ("q".into(), fmt_complex(args.q)),
        ("axis".into(), setup.axis.as_str().into()),
        ("from".into(), fmt_f64(setup.lo)),
        ("to".into(), fmt_f64(setup.hi)),
        ("steps".into(), args.steps.to_string()),
        ("base_rho".into(), fmt_f64(setup.base.rho)),
        ("base_phi".into(), fmt_f64(setup.base.phi)),
    ]
}

fn sweep_table(args: &ScanArgs, threads: usize) -> Result<Table, RunError> {
    let setup = resolve_scan(args)?;
    let grid: Vec<f64> = (0..args.steps)
        .map(|i| setup.lo + (setup.hi - setup.lo) * i as f64 / (args.steps - 1) as f64)
        .collect();
    let trace = sweep(&setup.base, setup.axis, &grid, threads)?;

    let mut metadata = scan_metadata("sweep", args, &setup);
    metadata.push(("grid_points".into(), trace.grid().len().to_string()));

    let mut rows = Vec::new();
    for (g, &x) in trace.grid().iter().enumerate() {
        // Flag for the matching step that ends at this point.
        let flagged = g > 0 && trace.degeneracy_flags()[g - 1];
        for (branch, trajectory) in trace.trajectories().iter().enumerate() {
            rows.push(vec![
                Cell::Float(x),
                Cell::Int(branch as i64),
                Cell::Float(trajectory[g].re),
                Cell::Float(trajectory[g].im),
                Cell::Int(i64::from(flagged)),
            ]);
        }
    }
    Ok(Table {
        metadata,
        columns: vec!["param", "branch", "re", "im", "degenerate_flag"],
        rows,
    })
}

fn ep_table(args: &ScanArgs, threads: usize) -> Result<Table, RunError> {
    let setup = resolve_scan(args)?;
    let reports =
        find_exceptional_points(&setup.base, setup.axis, (setup.lo, setup.hi), args.steps, threads)?;
    let mut metadata = scan_metadata("ep", args, &setup);
    metadata.push(("reports".into(), reports.len().to_string()));

    let rows = reports
        .iter()
        .map(|r| {
            let (delta_re, delta_im) = match r.delta_value {
                Some(d) => (Cell::Float(d.re), Cell::Float(d.im)),
                None => (Cell::Blank, Cell::Blank),
            };
            vec![
                Cell::Float(r.parameter_value),
                Cell::Float(r.min_gap),
                Cell::Float(r.cond_v_at_point),
                Cell::Text(r.classification.as_str().into()),
                delta_re,
                delta_im,
            ]
        })
        .collect();
    Ok(Table {
        metadata,
        columns: vec!["param", "min_gap", "cond_v", "classification", "delta_re", "delta_im"],
        rows,
    })
}

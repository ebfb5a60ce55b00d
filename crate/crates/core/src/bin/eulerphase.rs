use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use eulerphase::asymptotics::{self, DEFAULT_OSC_TOL};
use eulerphase::config::{parse_complex, parse_n_list, OutputFormat, RunConfig};
use eulerphase::phases::{self, Pixel, Window, DEFAULT_K_MAX, DEFAULT_TIE_TOL};
use eulerphase::series::{self, format_float, ContourOptions};
use eulerphase::weights::fourier_coeffs;
use eulerphase::Error;

#[derive(Parser)]
#[command(
    name = "eulerphase",
    version,
    about = "Coefficients, saddle-point asymptotics and phase maps of Euler products"
)]
struct Cli {
    /// Weight family, e.g. `constant`, `power:s0=2`, `ap:a=1,j=3`,
    /// `periodic:1,0,2`, `scaled:base=ap:a=1,j=2;s=1.5`.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Continuation abscissa in (-1, 0), used for the error exponent.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma0: Option<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_K_MAX)]
    k_max: u64,
    /// Relative tolerance for ties between arcs.
    #[arg(long, global = true, default_value_t = DEFAULT_TIE_TOL)]
    tie_tol: f64,
    /// Relative band around the negative axis treated as the oscillatory branch.
    #[arg(long, global = true, default_value_t = DEFAULT_OSC_TOL)]
    osc_tol: f64,
    /// csv, json or ppm; each command has its own default.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Recurrence,
    Contour,
    Polynomial,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients of Q_0..Q_n in z, one row per n.
    Expand {
        #[arg(long)]
        n: usize,
    },
    /// Q_n(z) for a list of n.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Comma list with optional ranges, e.g. `10,20..30:5`.
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value_t = Method::Recurrence)]
        method: Method,
    },
    /// Saddle-point estimate of Q_n(z) with per-arc detail.
    Asymp {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        n: u64,
    },
    /// Exact Q_n(z) against the estimate for a list of n.
    Compare {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        n: String,
    },
    /// Raster the dominant-arc labels over a window of the disk.
    PhaseMap {
        #[arg(long, default_value_t = 400)]
        width: usize,
        #[arg(long, default_value_t = 400)]
        height: usize,
        /// re_min,re_max,im_min,im_max
        #[arg(
            long,
            allow_hyphen_values = true,
            default_value = "-0.99,0.99,-0.99,0.99"
        )]
        window: String,
        /// Per-pixel CSV path (default: the PPM path with a .csv extension).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// D_{h,k}(0), residues A_{h,k} and the Fourier coefficients b, c for modulus k.
    Dirichlet {
        #[arg(long)]
        k: u64,
    },
    /// Classical growth estimate of Q_n(1) next to the exact value.
    Meinardus {
        #[arg(long)]
        n: String,
    },
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let config = build_config(&cli)?;
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Expand { n } => cmd_expand(&config, *n),
        Command::Eval { z, n, method } => {
            cmd_eval(&config, parse_complex(z)?, &parse_n_list(n)?, *method)
        }
        Command::Asymp { z, n } => cmd_asymp(&config, parse_complex(z)?, *n),
        Command::Compare { z, n } => cmd_compare(&config, parse_complex(z)?, &parse_n_list(n)?),
        Command::PhaseMap {
            width,
            height,
            window,
            csv,
        } => cmd_phase_map(
            &config,
            parse_window(window)?,
            *width,
            *height,
            csv.as_deref(),
        ),
        Command::Dirichlet { k } => cmd_dirichlet(&config, *k),
        Command::Meinardus { n } => cmd_meinardus(&config, &parse_n_list(n)?),
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let spec = cli
        .family
        .as_deref()
        .ok_or_else(|| Error::Config("--family is required".into()))?;
    let mut config = RunConfig::new(spec)?;
    if let Some(sigma0) = cli.sigma0 {
        config = config.with_sigma0(sigma0)?;
    }
    config.k_max = cli.k_max;
    config.tie_tol = cli.tie_tol;
    config.osc_tol = cli.osc_tol;
    config.format = cli.format.as_deref().map(str::parse).transpose()?;
    config.output = cli.output.clone();
    config.validate()?;
    Ok(config)
}

fn parse_window(raw: &str) -> Result<Window, Error> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Config(format!("cannot parse window `{raw}`")))?;
    match parts[..] {
        [re_min, re_max, im_min, im_max] => Ok(Window {
            re_min,
            re_max,
            im_min,
            im_max,
        }),
        _ => Err(Error::Config(format!(
            "window needs re_min,re_max,im_min,im_max, got `{raw}`"
        ))),
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// JSON number with 17 significant digits; non-finite values become null.
fn json_num(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        "null".into()
    }
}

fn json_complex(z: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", json_num(z.re), json_num(z.im))
}

fn cmd_expand(config: &RunConfig, n: usize) -> CliResult<()> {
    let format = config.format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let seq = &config.sequence;
    let polys = if seq.has_integer_weights() {
        series::expand_product(seq, n)?
    } else {
        series::expand_exp_recurrence_exact(seq, n)?
    };
    let mut out = open_output(config.output.as_deref())?;
    for poly in &polys {
        match format {
            OutputFormat::Json => {
                let cells: Vec<String> = poly
                    .to_string()
                    .split(',')
                    .map(|c| format!("\"{c}\""))
                    .collect();
                writeln!(out, "{{\"n\":{},\"coeffs\":[{}]}}", poly.n, cells.join(","))?;
            }
            _ => writeln!(out, "{poly}")?,
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_eval(config: &RunConfig, z: Complex64, ns: &[u64], method: Method) -> CliResult<()> {
    let format = config.format_or(OutputFormat::Json, &[OutputFormat::Json, OutputFormat::Csv])?;
    let seq = &config.sequence;
    let n_max = ns.iter().copied().max().unwrap_or(0) as usize;
    let values: Vec<Complex64> = match method {
        Method::Recurrence => {
            let all = series::eval_exact_all(seq, z, n_max);
            ns.iter().map(|&n| all[n as usize]).collect()
        }
        Method::Polynomial => {
            let polys = if seq.has_integer_weights() {
                series::expand_product(seq, n_max)?
            } else {
                series::expand_exp_recurrence_exact(seq, n_max)?
            };
            ns.iter().map(|&n| polys[n as usize].eval(z)).collect()
        }
        Method::Contour => ns
            .par_iter()
            .map(|&n| series::contour_extract(seq, z, n as usize, ContourOptions::default()))
            .collect::<Result<_, _>>()?,
    };
    let mut out = open_output(config.output.as_deref())?;
    if format == OutputFormat::Csv {
        writeln!(out, "n,re,im")?;
    }
    for (n, v) in ns.iter().zip(values) {
        match format {
            OutputFormat::Csv => {
                writeln!(out, "{n},{},{}", format_float(v.re), format_float(v.im))?
            }
            _ => writeln!(
                out,
                "{{\"n\":{n},\"re\":{},\"im\":{}}}",
                json_num(v.re),
                json_num(v.im)
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_asymp(config: &RunConfig, z: Complex64, n: u64) -> CliResult<()> {
    config.format_or(OutputFormat::Json, &[OutputFormat::Json])?;
    let est = asymptotics::estimate_with(&config.sequence, z, n, &config.estimate_options())?;
    for warning in &est.warnings {
        eprintln!("warning: {warning}");
    }
    let arcs: Vec<String> = est
        .arcs
        .iter()
        .map(|a| {
            format!(
                "{{\"h\":{},\"k\":{},\"branch\":\"{}\",\"omega\":{},\"saddle\":{}}}",
                a.arc.h,
                a.arc.k,
                a.branch,
                json_complex(a.omega),
                json_complex(a.saddle)
            )
        })
        .collect();
    let mut out = open_output(config.output.as_deref())?;
    writeln!(
        out,
        "{{\"z\":{},\"n\":{},\"value\":{},\"arcs\":[{}],\"mu\":{}}}",
        json_complex(est.z),
        est.n,
        json_complex(est.value),
        arcs.join(","),
        json_num(est.mu)
    )?;
    out.flush()?;
    Ok(())
}

fn cmd_compare(config: &RunConfig, z: Complex64, ns: &[u64]) -> CliResult<()> {
    let format = config.format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let rows = asymptotics::compare_with(&config.sequence, z, ns, &config.estimate_options())?;
    let mut out = open_output(config.output.as_deref())?;
    if format == OutputFormat::Csv {
        writeln!(out, "n,exact_re,exact_im,est_re,est_im,rel_err")?;
    }
    for row in rows {
        match format {
            OutputFormat::Csv => writeln!(
                out,
                "{},{},{},{},{},{}",
                row.n,
                format_float(row.exact.re),
                format_float(row.exact.im),
                format_float(row.estimate.re),
                format_float(row.estimate.im),
                format_float(row.rel_err)
            )?,
            _ => writeln!(
                out,
                "{{\"n\":{},\"exact\":{},\"estimate\":{},\"rel_err\":{},\"envelope_err\":{}}}",
                row.n,
                json_complex(row.exact),
                json_complex(row.estimate),
                json_num(row.rel_err),
                row.envelope_err.map_or("null".into(), json_num)
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_phase_map(
    config: &RunConfig,
    window: Window,
    width: usize,
    height: usize,
    csv: Option<&Path>,
) -> CliResult<()> {
    config.format_or(OutputFormat::Ppm, &[OutputFormat::Ppm])?;
    let ppm_path = config
        .output
        .as_deref()
        .ok_or_else(|| Error::Config("phase-map needs --output <file.ppm>".into()))?;
    let csv_path = csv
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ppm_path.with_extension("csv"));
    let map = phases::raster_with_tolerance(
        &config.sequence,
        window,
        width,
        height,
        config.k_max,
        config.tie_tol,
    )?;
    let mut ppm = BufWriter::new(File::create(ppm_path)?);
    map.write_ppm(&mut ppm)?;
    ppm.flush()?;
    let mut table = BufWriter::new(File::create(&csv_path)?);
    map.write_csv(&mut table)?;
    table.flush()?;

    let boundary = map
        .pixels
        .iter()
        .filter(|p| matches!(p, Pixel::Labeled { boundary: true, .. }))
        .count();
    let stdout = io::stdout();
    let mut summary = stdout.lock();
    writeln!(summary, "h,k,fraction")?;
    for (label, fraction) in map.label_fractions() {
        writeln!(
            summary,
            "{},{},{}",
            label.h,
            label.k,
            format_float(fraction)
        )?;
    }
    eprintln!(
        "{} disk pixels, {} on boundaries; wrote {} and {}",
        map.disk_pixels(),
        boundary,
        ppm_path.display(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_dirichlet(config: &RunConfig, k: u64) -> CliResult<()> {
    let format = config.format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let data = fourier_coeffs(&config.sequence, k)?;
    let mut rows: Vec<(&str, u64, Complex64)> = Vec::new();
    for (i, v) in data.values_at_zero.iter().enumerate() {
        rows.push(("d0", i as u64 + 1, *v));
    }
    for (i, v) in data.residues.iter().enumerate() {
        rows.push(("residue", i as u64 + 1, *v));
    }
    for (j, v) in data.b.iter().enumerate() {
        rows.push(("b", j as u64, *v));
    }
    for (j, v) in data.c.iter().enumerate() {
        rows.push(("c", j as u64, *v));
    }
    let mut out = open_output(config.output.as_deref())?;
    if format == OutputFormat::Csv {
        writeln!(out, "kind,index,re,im")?;
    }
    for (kind, index, v) in rows {
        match format {
            OutputFormat::Csv => writeln!(
                out,
                "{kind},{index},{},{}",
                format_float(v.re),
                format_float(v.im)
            )?,
            _ => writeln!(
                out,
                "{{\"kind\":\"{kind}\",\"index\":{index},\"re\":{},\"im\":{}}}",
                json_num(v.re),
                json_num(v.im)
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_meinardus(config: &RunConfig, ns: &[u64]) -> CliResult<()> {
    let format = config.format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let seq = &config.sequence;
    let constants = asymptotics::meinardus_constants(seq)?;
    if ns.contains(&0) {
        return Err(Error::Domain("meinardus needs n >= 1".into()).into());
    }
    let exact = if seq.has_integer_weights() {
        let n_max = ns.iter().copied().max().unwrap_or(0) as usize;
        Some(series::exact_totals(seq, n_max)?)
    } else {
        None
    };
    let mut out = open_output(config.output.as_deref())?;
    if format == OutputFormat::Csv {
        writeln!(out, "n,estimate,exact,rel_err")?;
    }
    for &n in ns {
        let estimate = constants.r(n as f64);
        let exact_n = exact.as_ref().map(|t| &t[n as usize]);
        let rel_err = exact_n.map(|e| {
            let e: f64 = e.to_string().parse().unwrap_or(f64::INFINITY);
            (estimate - e).abs() / e
        });
        match format {
            OutputFormat::Csv => writeln!(
                out,
                "{n},{},{},{}",
                format_float(estimate),
                exact_n.map(ToString::to_string).unwrap_or_default(),
                rel_err.map(format_float).unwrap_or_default()
            )?,
            _ => writeln!(
                out,
                "{{\"n\":{n},\"estimate\":{},\"exact\":{},\"rel_err\":{},\"c\":{},\"kappa\":{}}}",
                json_num(estimate),
                exact_n.map_or("null".into(), ToString::to_string),
                rel_err.map_or("null".into(), json_num),
                json_num(constants.c),
                json_num(constants.kappa)
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

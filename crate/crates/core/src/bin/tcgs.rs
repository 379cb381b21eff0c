use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use tcgs::channel::{hard_decision, soft_weights};
use tcgs::decoder::{compare_traces, decode_file, render_trace, trace_lines, TraceCheck};
use tcgs::galois::Fe;
use tcgs::sim::{chi2_threshold, parse_snr_list, run_sweep, to_csv, Algorithm, SweepConfig};

#[derive(Parser)]
#[command(name = "tcgs", version, about = "Tree-based Chase-type GS decoding of RS codes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte-Carlo FER / average-trials sweep, written as CSV.
    Sweep(SweepArgs),
    /// Decode a likelihood-matrix file with the verbose trace and compare it
    /// against a stored golden trace.
    Replay(ReplayArgs),
    /// Upper (eps/2)-quantile of the chi-square distribution.
    Chi2 {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        dof: usize,
        /// Multiply by this noise variance to get the squared radius T.
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
    },
}

#[derive(clap::Args)]
struct SweepArgs {
    /// p,m,n,k
    #[arg(long, default_value = "2,4,15,11")]
    code: String,
    /// a:b:step (dB, Eb/N0), a comma list, or one value
    #[arg(long)]
    snr: String,
    /// Comma list of tcgs, lcc, hdd
    #[arg(long, default_value = "tcgs,lcc")]
    alg: String,
    /// TCGS budget (maximum HDD calls per frame)
    #[arg(long = "L", default_value_t = 16)]
    l: usize,
    /// LCC least reliable positions
    #[arg(long, default_value_t = 4)]
    eta: usize,
    /// Maximum frames per point
    #[arg(long, default_value_t = 10_000)]
    frames: u64,
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// TCGS threshold mode with target FER eps
    #[arg(long)]
    threshold_eps: Option<f64>,
    /// TCGS stops once the transmitted codeword is found (simulation aid)
    #[arg(long)]
    genie: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output CSV path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report wall-clock seconds (output is then no longer reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(clap::Args)]
struct ReplayArgs {
    #[arg(long)]
    pi: PathBuf,
    #[arg(long = "L", default_value_t = 16)]
    l: usize,
    /// Message length k; n and q are taken from the matrix
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Golden trace; defaults to <dir>/<stem>.L<L>.trace next to the matrix
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn parse_code(s: &str) -> anyhow::Result<(u32, u32, usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, m, n, k] = parts[..] else {
        bail!("--code expects p,m,n,k, got {s:?}");
    };
    Ok((p.parse()?, m.parse()?, n.parse()?, k.parse()?))
}

fn sweep(a: SweepArgs) -> anyhow::Result<()> {
    let algorithms = a
        .alg
        .split(',')
        .map(str::parse::<Algorithm>)
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = SweepConfig::new(parse_code(&a.code)?, parse_snr_list(&a.snr)?, algorithms);
    cfg.max_trials = a.l;
    cfg.eta = a.eta;
    cfg.max_frames = a.frames;
    cfg.min_errors = a.min_errors;
    cfg.seed = a.seed;
    cfg.threshold_eps = a.threshold_eps;
    cfg.genie = a.genie;
    cfg.workers = a.workers;
    cfg.timing = a.timing;
    let csv = to_csv(&run_sweep(&cfg)?);
    match a.out {
        Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn default_trace_path(pi: &Path, l: usize) -> PathBuf {
    let stem = pi.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    pi.with_file_name(format!("{stem}.L{l}.trace"))
}

/// 0 on match, 2 on mismatch; errors map to 1 in `main`.
fn replay(a: ReplayArgs) -> anyhow::Result<u8> {
    let (res, events, pi, code) =
        decode_file(&a.pi, a.k, a.l).with_context(|| format!("decoding {}", a.pi.display()))?;
    let sw = soft_weights(&pi, &hard_decision(&pi), code.field())?;
    println!("# soft weights, row delta, column j");
    for d in 1..code.field().order() {
        let row: Vec<String> = (0..code.n()).map(|j| format!("{:.4}", sw.get(Fe(d as u16), j))).collect();
        println!("# lambda[{d}] {}", row.join(" "));
    }
    let actual = render_trace(&events);
    print!("{actual}");
    match &res.message {
        Some(u) => println!("# message u = {u}, lambda = {:.4}, exit = {}, trials = {}", res.best_weight, res.exit, res.trials),
        None => println!("# no candidate, exit = {}, trials = {}", res.exit, res.trials),
    }

    let golden = a.trace.unwrap_or_else(|| default_trace_path(&a.pi, a.l));
    let expected = std::fs::read_to_string(&golden).with_context(|| format!("reading {}", golden.display()))?;
    if trace_lines(&expected).is_empty() {
        bail!("golden trace {} is empty", golden.display());
    }
    match compare_traces(&expected, &actual)? {
        TraceCheck::Match => {
            eprintln!("trace matches {}", golden.display());
            Ok(0)
        }
        TraceCheck::Mismatch { line, expected, actual } => {
            eprintln!("trace mismatch at event {line}");
            eprintln!("  expected: {}", expected.as_deref().unwrap_or("<end of trace>"));
            eprintln!("  actual:   {}", actual.as_deref().unwrap_or("<end of trace>"));
            Ok(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Sweep(a) => sweep(a).map(|_| 0),
        Cmd::Replay(a) => replay(a),
        Cmd::Chi2 { eps, dof, sigma2 } => chi2_threshold(eps, dof).map_err(Into::into).map(|q| {
            println!("{}", q * sigma2);
            0
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! Subcommand front end for the sampling and experiment library.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lorentz_lab::acceptance;
use lorentz_lab::constants::intersection_threshold;
use lorentz_lab::error::Error;
use lorentz_lab::experiments::{
    clt_max_statistics, run_clt_max, run_empirical_convergence, run_intersection, run_lln_norm,
    run_pmb, GofReport, ToleranceProfile,
};
use lorentz_lab::limit_law::limit_law;
use lorentz_lab::ode::{figure1_family, find_critical_slope, OdeSolution};
use lorentz_lab::plot::{Curve, Plot};
use lorentz_lab::qindex::{ExtReal, QIndex};
use lorentz_lab::rng::RngStreamSpec;
use lorentz_lab::sampler::{
    sample_exact, sample_rejection_oracle, sample_weyl_chamber, BallParams, Normalization,
    SampleBatch,
};
use lorentz_lab::volume::{ball_volume, volume_radius_asymptotic};

fn parse_q(s: &str) -> Result<QIndex, String> {
    QIndex::from_str(s).map_err(|e| e.to_string())
}

fn parse_r(s: &str) -> Result<ExtReal, String> {
    ExtReal::from_str(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    Strict,
    Default,
}

impl Profile {
    fn tolerance(self) -> ToleranceProfile {
        match self {
            Profile::Strict => ToleranceProfile::Strict,
            Profile::Default => ToleranceProfile::Default,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    Exact,
    Weyl,
    Rejection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NormalizationArg {
    Unit,
    Tilde,
    Volnorm,
}

impl NormalizationArg {
    fn lib(self) -> Normalization {
        match self {
            NormalizationArg::Unit => Normalization::Unit,
            NormalizationArg::Tilde => Normalization::Tilde,
            NormalizationArg::Volnorm => Normalization::VolNorm,
        }
    }
}

#[derive(Args, Clone)]
struct SeedArgs {
    /// Master seed; identical configs give byte-identical artifacts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream id within the master seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

impl SeedArgs {
    fn spec(&self) -> RngStreamSpec {
        RngStreamSpec::new(self.seed, self.stream)
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path; stdout if omitted (binary format requires a path).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Optional SVG plot path.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Worker threads (default: available parallelism); the
    /// LORENTZ_LAB_WORKERS environment variable overrides this.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,
}

#[derive(Parser)]
#[command(name = "lorentz-lab", about = "Sampling and limit-law experiments on Lorentz balls")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a batch of uniform samples.
    Sample {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Unit)]
        normalization: NormalizationArg,
        #[arg(long, value_enum, default_value_t = GeneratorArg::Exact)]
        generator: GeneratorArg,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact volume and volume-radius asymptotics.
    Volume {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Single-sample coordinate distribution against the limit law.
    Empirical {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coordinate-block independence diagnostics.
    Pmb {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        replications: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximum-coordinate fluctuation test.
    Clt {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 2_000)]
        replications: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Law of large numbers for `n^{-1/r} ||X||_r`.
    Lln {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long, value_parser = parse_r)]
        r: ExtReal,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        replications: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Intersection-volume estimate against the threshold.
    Intersect {
        #[arg(long, value_parser = parse_q)]
        q: QIndex,
        #[arg(long, value_parser = parse_r)]
        r: ExtReal,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        replications: usize,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conjectured-density ODE: critical slope, or a slope family.
    Ode {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// Comma-separated initial slopes; omitted = locate the critical one.
        #[arg(long)]
        slopes: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full acceptance suite; exit 0 iff every criterion passes.
    Selftest {
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_workers(&cli.cmd);
    let mut artifacts = Artifacts::default();
    match run(cli.cmd, &mut artifacts) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            artifacts.remove_all();
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Distinct nonzero exit codes per error family (1 is reserved for a failed
/// verdict with successful execution).
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 2,
        Error::InfiniteQ(_) => 3,
        Error::DegenerateQ(_) => 4,
        Error::DimensionTooLarge { .. } => 5,
        Error::UnsupportedP(_) => 6,
        Error::NonFiniteData(_) => 7,
        Error::InvalidBracket(_) => 8,
        Error::OdeOverflow { .. } => 9,
        Error::Io(_) => 10,
        Error::Serde(_) => 11,
    }
}

fn init_workers(cmd: &Cmd) {
    let flag = match cmd {
        Cmd::Sample { output, .. }
        | Cmd::Volume { output, .. }
        | Cmd::Empirical { output, .. }
        | Cmd::Pmb { output, .. }
        | Cmd::Clt { output, .. }
        | Cmd::Lln { output, .. }
        | Cmd::Intersect { output, .. }
        | Cmd::Ode { output, .. } => output.workers,
        Cmd::Selftest { .. } => None,
    };
    let workers = std::env::var("LORENTZ_LAB_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(flag);
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
}

/// Paths created by this run, removed if the run fails partway.
#[derive(Default)]
struct Artifacts {
    paths: Vec<PathBuf>,
}

impl Artifacts {
    fn track(&mut self, p: &Path) {
        self.paths.push(p.to_path_buf());
    }

    fn remove_all(&self) {
        for p in &self.paths {
            let _ = fs::remove_file(p);
        }
    }
}

fn run(cmd: Cmd, artifacts: &mut Artifacts) -> lorentz_lab::Result<bool> {
    match cmd {
        Cmd::Sample { q, n, count, normalization, generator, seed, output } => {
            let params = BallParams::lorentz(q, n, normalization.lib())?;
            let batch = match generator {
                GeneratorArg::Exact => sample_exact(params, count, seed.spec())?,
                GeneratorArg::Weyl => sample_weyl_chamber(params, count, seed.spec())?,
                GeneratorArg::Rejection => sample_rejection_oracle(params, count, seed.spec())?,
            };
            write_batch(&batch, &output, artifacts)?;
            Ok(true)
        }
        Cmd::Volume { q, n, output } => {
            let vol = ball_volume(q, n);
            let report = serde_json::json!({
                "q": q,
                "n": n,
                "log_volume": vol.log_volume,
                "volume": vol.volume,
                "volume_radius": vol.radius(n),
                "volume_radius_asymptotic": volume_radius_asymptotic(q, n),
            });
            match &output.out {
                Some(path) => {
                    artifacts.track(path);
                    fs::write(path, serde_json::to_string_pretty(&report)?)?;
                }
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            Ok(true)
        }
        Cmd::Empirical { q, n, seed, output } => {
            let report =
                run_empirical_convergence(q, n, seed.spec())?.with_profile(output.tolerance_profile.tolerance());
            if let Some(path) = &output.plot {
                plot_empirical(q, n, seed.spec(), path, artifacts)?;
            }
            write_report(&report, &output, artifacts)
        }
        Cmd::Pmb { q, n, k, replications, seed, output } => {
            let report = run_pmb(q, n, k, replications, seed.spec())?
                .with_profile(output.tolerance_profile.tolerance());
            write_report(&report, &output, artifacts)
        }
        Cmd::Clt { q, n, replications, seed, output } => {
            let report = run_clt_max(q, n, replications, seed.spec())?
                .with_profile(output.tolerance_profile.tolerance());
            if let Some(path) = &output.plot {
                plot_clt(q, n, replications, seed.spec(), path, artifacts)?;
            }
            write_report(&report, &output, artifacts)
        }
        Cmd::Lln { q, r, n, replications, seed, output } => {
            let report = run_lln_norm(q, r, n, replications, seed.spec())?
                .with_profile(output.tolerance_profile.tolerance());
            write_report(&report, &output, artifacts)
        }
        Cmd::Intersect { q, r, t, n, replications, seed, output } => {
            let report = run_intersection(q, r, t, n, replications, seed.spec())?
                .with_profile(output.tolerance_profile.tolerance());
            if let Some(path) = &output.plot {
                plot_intersection_sweep(q, r, t, n, replications, seed.spec(), path, artifacts)?;
            }
            write_report(&report, &output, artifacts)
        }
        Cmd::Ode { p, q, slopes, output } => run_ode(p, q, slopes, &output, artifacts),
        Cmd::Selftest { seed } => {
            let results = acceptance::run_all(seed);
            let mut all = true;
            for r in &results {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!("criterion {:>2} {:<32} {} ({})", r.id, r.name, verdict, r.details);
                all &= r.passed;
            }
            Ok(all)
        }
    }
}

fn write_batch(
    batch: &SampleBatch,
    output: &OutputArgs,
    artifacts: &mut Artifacts,
) -> lorentz_lab::Result<()> {
    match (&output.out, output.format) {
        (Some(path), Format::Csv) => {
            artifacts.track(path);
            let mut f = fs::File::create(path)?;
            batch.write_csv(&mut f)
        }
        (Some(path), Format::Binary) => {
            artifacts.track(path);
            let mut f = fs::File::create(path)?;
            batch.write_binary(&mut f)
        }
        (Some(path), Format::Json) => {
            artifacts.track(path);
            fs::write(path, batch_json(batch)?)?;
            Ok(())
        }
        (None, Format::Csv) => batch.write_csv(&mut std::io::stdout().lock()),
        (None, Format::Json) => {
            println!("{}", batch_json(batch)?);
            Ok(())
        }
        (None, Format::Binary) => Err(Error::InvalidParameter(
            "binary format requires --out PATH".into(),
        )),
    }
}

fn batch_json(batch: &SampleBatch) -> lorentz_lab::Result<String> {
    let rows: Vec<&[f64]> = batch.rows().collect();
    let value = serde_json::json!({
        "params": batch.params,
        "count": batch.count,
        "rng": batch.rng,
        "generator": batch.generator,
        "acceptance_rate": batch.acceptance_rate,
        "data": rows,
    });
    Ok(serde_json::to_string_pretty(&value)?)
}

fn write_report(
    report: &GofReport,
    output: &OutputArgs,
    artifacts: &mut Artifacts,
) -> lorentz_lab::Result<bool> {
    let text = match output.format {
        Format::Json => report.to_json()?,
        Format::Csv => report_csv(report),
        Format::Binary => {
            return Err(Error::InvalidParameter(
                "binary format applies to sample batches, not reports".into(),
            ))
        }
    };
    match &output.out {
        Some(path) => {
            artifacts.track(path);
            fs::write(path, text)?;
        }
        None => println!("{text}"),
    }
    Ok(report.passed())
}

fn report_csv(report: &GofReport) -> String {
    let mut out = String::from("key,value\n");
    out.push_str(&format!("experiment,{:?}\n", report.experiment));
    out.push_str(&format!("verdict,{:?}\n", report.verdict));
    for (k, v) in &report.statistics {
        out.push_str(&format!("{k},{v:.17e}\n"));
    }
    for (k, v) in &report.tolerances {
        out.push_str(&format!("tolerance.{k},{v:.17e}\n"));
    }
    out
}

fn plot_empirical(
    q: QIndex,
    n: usize,
    spec: RngStreamSpec,
    path: &Path,
    artifacts: &mut Artifacts,
) -> lorentz_lab::Result<()> {
    let params = BallParams::lorentz(q, n, Normalization::Tilde)?;
    let batch = sample_exact(params, 1, spec)?;
    let law = limit_law(q)?;
    let radius = law.support_radius() * 1.1;
    let hist = histogram(batch.row(0), -radius, radius, 80);
    let density: Vec<(f64, f64)> = (0..400)
        .map(|k| {
            let x = -radius + 2.0 * radius * k as f64 / 399.0;
            (x, law.density(x))
        })
        .collect();
    artifacts.track(path);
    Plot::new(format!("coordinate density, q={q}, n={n}"))
        .curve(Curve::steps("empirical histogram", hist))
        .curve(Curve::line("limit density", density))
        .save(path)
}

fn plot_clt(
    q: QIndex,
    n: usize,
    m: usize,
    spec: RngStreamSpec,
    path: &Path,
    artifacts: &mut Artifacts,
) -> lorentz_lab::Result<()> {
    let stats = clt_max_statistics(q, n, m, spec)?;
    let lo = stats.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = stats.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hist = histogram(&stats, lo, hi, 60);
    artifacts.track(path);
    Plot::new(format!("scaled max-coordinate fluctuations, q={q}, n={n}"))
        .curve(Curve::steps("empirical histogram", hist))
        .save(path)
}

#[allow(clippy::too_many_arguments)]
fn plot_intersection_sweep(
    q: QIndex,
    r: ExtReal,
    t: f64,
    n: usize,
    m: usize,
    spec: RngStreamSpec,
    path: &Path,
    artifacts: &mut Artifacts,
) -> lorentz_lab::Result<()> {
    let sweep_m = (m / 10).max(1_000).min(m);
    let mut points = Vec::new();
    for k in 0..11 {
        let tk = t * (0.5 + k as f64 / 10.0);
        let rep = run_intersection(q, r, tk, n, sweep_m, spec)?;
        points.push((tk, rep.statistics["estimate"]));
    }
    let a = intersection_threshold(q, r)?.a_qr;
    artifacts.track(path);
    Plot::new(format!("intersection volume sweep, q={q}, r={r} (1/A = {:.4})", 1.0 / a))
        .curve(Curve::steps("estimate", points))
        .hline(1.0)
        .save(path)
}

fn run_ode(
    p: f64,
    q: f64,
    slopes: Option<String>,
    output: &OutputArgs,
    artifacts: &mut Artifacts,
) -> lorentz_lab::Result<bool> {
    let solutions: Vec<OdeSolution> = match &slopes {
        Some(list) => {
            let parsed: Vec<f64> = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidParameter(format!("cannot parse slope `{s}`"))
                    })
                })
                .collect::<lorentz_lab::Result<_>>()?;
            figure1_family(p, q, &parsed).into_iter().collect::<lorentz_lab::Result<_>>()?
        }
        None => {
            let c = find_critical_slope(p, q, (0.25, 4.0), 1e-8)?;
            println!("critical slope c_pq = {:.8}", c.c_pq);
            vec![c.solution]
        }
    };
    if let Some(path) = &output.plot {
        let mut plot = Plot::new(format!("profile family, p={p}, q={q}")).hline(1.0);
        for sol in &solutions {
            let pts: Vec<(f64, f64)> = sol.grid.iter().map(|pt| (pt.x, pt.g)).collect();
            plot = plot.curve(Curve::line(
                format!("slope {:.4} ({:?})", sol.initial_slope, sol.classification),
                pts,
            ));
        }
        artifacts.track(path);
        plot.save(path)?;
    }
    let text = match output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            for sol in &solutions {
                sol.write_csv(&mut buf)?;
            }
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let summaries: Vec<serde_json::Value> = solutions
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "p": s.p,
                        "q": s.q,
                        "initial_slope": s.initial_slope,
                        "classification": format!("{:?}", s.classification),
                        "support_radius": s.support_radius,
                        "grid_points": s.grid.len(),
                        "terminal_g": s.terminal().g,
                        "terminal_dg": s.terminal().dg,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&summaries)?
        }
        Format::Binary => {
            return Err(Error::InvalidParameter(
                "binary format applies to sample batches, not trajectories".into(),
            ))
        }
    };
    match &output.out {
        Some(path) => {
            artifacts.track(path);
            fs::write(path, text)?;
        }
        None => println!("{text}"),
    }
    Ok(true)
}

/// Normalized histogram as step-curve points (left edge, density).
fn histogram(data: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in data {
        if v >= lo && v < hi {
            counts[((v - lo) / width) as usize] += 1;
        }
    }
    let scale = 1.0 / (data.len() as f64 * width);
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + i as f64 * width, c as f64 * scale))
        .collect()
}

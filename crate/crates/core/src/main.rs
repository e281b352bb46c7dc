use clap::{Args, Parser, Subcommand, ValueEnum};
use possic::asymptotics::{bvm_report, clt_report, lln_report, named_family, ConvergenceReport, DEFAULT_COLLAR};
use possic::experiment::{
    parse_observations, run_ratio_experiment, run_ratio_experiment_on, ExperimentConfig, MeanModel,
    ReplicationSummary, StreamSpec,
};
use possic::inference::{
    credibility_test, marginal_likelihood, posterior_with, CubicNormal, ExponentialRate, InferenceReport,
    LikelihoodKind, NormalLocation, PosteriorOptions, SharedModel, Tempered,
};
use possic::{sig17, Interval, Kind, PossibilityFn, UniformGrid};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "possic", version, about = "Inference with possibility functions")]
struct Cli {
    /// Seed for generated data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Points on evaluation grids.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Evaluation or search range, `a,b`.
    #[arg(long, global = true, value_parser = parse_domain, allow_hyphen_values = true)]
    domain: Option<Interval>,
    /// Output file (a directory for ratio-experiment); stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a parametric family.
    #[command(subcommand)]
    Family(FamilyCommand),
    /// Posterior report (JSON) or posterior curve (CSV).
    Posterior(PosteriorArgs),
    /// Credibility test of `theta = theta0`.
    Test(TestArgs),
    /// Convergence reports for the limit theorems.
    #[command(subcommand)]
    Asymptotics(AsymptoticsCommand),
    /// Ratio-of-means replication experiment.
    RatioExperiment(RatioArgs),
}

#[derive(Args)]
struct FamilySpec {
    /// Family name, e.g. normal, gamma, student-t.
    #[arg(long, required_unless_present = "input")]
    kind: Option<String>,
    /// Comma-separated parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    /// Serialised possibility function (JSON) instead of --kind/--params.
    #[arg(long, conflicts_with = "kind")]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Values at the given points.
    Eval {
        #[command(flatten)]
        spec: FamilySpec,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
    },
    /// Mode and variance.
    Moments {
        #[command(flatten)]
        spec: FamilySpec,
    },
    /// Values on a uniform grid (the working domain unless --domain).
    Plotdata {
        #[command(flatten)]
        spec: FamilySpec,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    /// Normal location, possibilistic likelihood.
    NormalLoc,
    /// Normal location, probabilistic likelihood.
    NormalLocProb,
    /// `y ~ N(theta^3, sigma2)`.
    Cubic,
    /// Exponential rate (probabilistic).
    Exponential,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "normal-loc")]
    model: ModelName,
    /// Observation variance.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Temper the likelihood by this power.
    #[arg(long)]
    temper: Option<f64>,
    /// Prior family; uninformative when omitted.
    #[arg(long)]
    prior_kind: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    prior_params: Vec<f64>,
    /// Observation CSV with a `y` column.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct PosteriorArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Also write the posterior curve CSV here.
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    theta0: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Subcommand)]
enum AsymptoticsCommand {
    /// Mean of n copies against the indicator of the mode hull.
    Lln {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_COLLAR)]
        collar: f64,
    },
    /// Centred and scaled mean against its normal limit.
    Clt {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Exact posterior against its normal approximation.
    Bvm {
        #[arg(long, value_enum, default_value = "normal-loc")]
        model: ModelName,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        theta0: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Observation CSV; otherwise drawn from N(theta0, sigma2).
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RatioModel {
    Students,
    NormalKnownVariance,
}

#[derive(Args)]
struct RatioArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed observations (`y,y_prime`) for a single replication.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Sample sizes; default 10,100 (or the config's).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, value_enum)]
    model: Option<RatioModel>,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Io(String),
}

impl From<possic::Error> for Failure {
    fn from(e: possic::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(v) if !v.is_nan() => Ok(v),
                _ => Err(format!("'{t}' is not a number")),
            }
        })
        .collect()
}

fn parse_domain(s: &str) -> Result<Interval, String> {
    match parse_list(s)?.as_slice() {
        [a, b] => Interval::new(*a, *b).map_err(|e| e.to_string()),
        _ => Err("expected a,b".into()),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn family(spec: &FamilySpec) -> CliResult<PossibilityFn> {
    if let Some(path) = &spec.input {
        return Ok(PossibilityFn::from_json(&read(path)?)?);
    }
    let name = spec.kind.as_deref().expect("clap requires kind or input");
    match name.parse::<Kind>() {
        Ok(kind) => Ok(PossibilityFn::from_params(kind, &spec.params)?),
        Err(_) if spec.params.is_empty() => Ok(named_family(name)?),
        Err(e) => Err(e.into()),
    }
}

fn prior(args: &ModelArgs) -> CliResult<PossibilityFn> {
    match &args.prior_kind {
        None => Ok(PossibilityFn::uninformative()),
        Some(k) => Ok(PossibilityFn::from_params(k.parse::<Kind>()?, &args.prior_params)?),
    }
}

fn model(name: ModelName, sigma2: f64, temper: Option<f64>) -> CliResult<SharedModel> {
    let base: SharedModel = match name {
        ModelName::NormalLoc => Arc::new(NormalLocation::new(sigma2)?),
        ModelName::NormalLocProb => Arc::new(NormalLocation::probabilistic(sigma2)?),
        ModelName::Cubic => Arc::new(CubicNormal::new(sigma2)?),
        ModelName::Exponential => Arc::new(ExponentialRate),
    };
    Ok(match temper {
        Some(b) => Arc::new(Tempered::new(base, b)?),
        None => base,
    })
}

fn observations(path: &Path) -> CliResult<Vec<f64>> {
    Ok(parse_observations(&read(path)?)?.y)
}

fn curve_csv(header: &str, xs: &[f64], fs: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (x, f) in xs.iter().zip(fs) {
        out.push_str(&format!("{},{}\n", sig17(*x), sig17(*f)));
    }
    out
}

fn curve_json(xs: &[f64], fs: &[f64]) -> String {
    let rows: Vec<_> = xs.iter().zip(fs).map(|(x, f)| json!({"x": x, "f": f})).collect();
    format!("{}\n", serde_json::to_string_pretty(&rows).expect("finite values"))
}

fn grid_over(cli: &Cli, fallback: Interval, default_points: usize) -> CliResult<Vec<f64>> {
    let domain = cli.domain.unwrap_or(fallback);
    Ok(UniformGrid::over(&domain, cli.grid_points.unwrap_or(default_points))?.points())
}

fn run_family(cli: &Cli, cmd: &FamilyCommand) -> CliResult<()> {
    let out = cli.out.as_deref();
    match cmd {
        FamilyCommand::Eval { spec, x } => {
            let pf = family(spec)?;
            if x.is_empty() {
                return Err(Failure::Invalid("--x needs at least one point".into()));
            }
            let fs = x.iter().map(|&v| pf.eval(v)).collect::<possic::Result<Vec<_>>>()?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => emit(out, &curve_csv("x,f", x, &fs)),
                Format::Json => emit(out, &curve_json(x, &fs)),
            }
        }
        FamilyCommand::Moments { spec } => {
            let pf = family(spec)?;
            let mode = pf.expected_value()?;
            let variance = pf.variance()?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let v = json!({"mode": mode, "variance": variance});
                    emit(out, &format!("{v}\n"))
                }
                Format::Csv => {
                    let m = mode.singleton().map(sig17).unwrap_or_else(|| mode.to_string());
                    emit(out, &format!("mode,variance\n{m},{}\n", sig17(variance.value())))
                }
            }
        }
        FamilyCommand::Plotdata { spec } => {
            let pf = family(spec)?;
            let xs = match cli.domain {
                Some(d) => grid_over(cli, d, 401)?,
                None => grid_over(cli, pf.working_domain()?, 401)?,
            };
            let fs = xs.iter().map(|&x| pf.eval(x)).collect::<possic::Result<Vec<_>>>()?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => emit(out, &curve_csv("x,f", &xs, &fs)),
                Format::Json => emit(out, &format!("{}\n", pf.to_json()?)),
            }
        }
    }
}

fn run_posterior(cli: &Cli, args: &PosteriorArgs) -> CliResult<()> {
    let m = &args.model;
    let model = model(m.model, m.sigma2, m.temper)?;
    let prior = prior(m)?;
    let ys = observations(&m.data)?;
    let opts = PosteriorOptions {
        domain: cli.domain,
        ..Default::default()
    };
    let post = posterior_with(&prior, &model, &ys, &opts)?;
    let mut report = InferenceReport::summarize(&post, args.alpha)?;
    if model.kind() == LikelihoodKind::Possibilistic {
        report = report.with_marginal_likelihood(marginal_likelihood(&prior, &model, &ys)?);
    }
    let curve = || -> CliResult<String> {
        let domain = match cli.domain {
            Some(d) => d,
            None => post.working_domain()?,
        };
        let xs = grid_over(cli, domain, 401)?;
        let fs = xs.iter().map(|&x| post.eval(x)).collect::<possic::Result<Vec<_>>>()?;
        Ok(curve_csv("theta,f", &xs, &fs))
    };
    if let Some(path) = &args.curve {
        write(path, &curve()?)?;
    }
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit(cli.out.as_deref(), &format!("{}\n", report.to_json()?)),
        Format::Csv => emit(cli.out.as_deref(), &curve()?),
    }
}

fn run_test(cli: &Cli, args: &TestArgs) -> CliResult<()> {
    let m = &args.model;
    let model = model(m.model, m.sigma2, m.temper)?;
    let ys = observations(&m.data)?;
    let t = credibility_test(&prior(m)?, &model, &ys, args.theta0, args.alpha)?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let text = serde_json::to_string_pretty(&t).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(cli.out.as_deref(), &format!("{text}\n"))
        }
        Format::Csv => emit(
            cli.out.as_deref(),
            &format!(
                "lambda,threshold,reject,beta_limit,alpha\n{},{},{},{},{}\n",
                sig17(t.lambda),
                sig17(t.threshold),
                t.reject,
                sig17(t.beta_limit),
                sig17(t.alpha)
            ),
        ),
    }
}

fn emit_report(cli: &Cli, r: &ConvergenceReport) -> CliResult<()> {
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(cli.out.as_deref(), &r.to_csv()),
        Format::Json => {
            let text = serde_json::to_string_pretty(r).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(cli.out.as_deref(), &format!("{text}\n"))
        }
    }
}

fn run_asymptotics(cli: &Cli, cmd: &AsymptoticsCommand) -> CliResult<()> {
    let default_domain = Interval::new(-3.0, 3.0)?;
    let report = match cmd {
        AsymptoticsCommand::Lln { family, n, collar } => {
            let pf = named_or_kind(family)?;
            lln_report(&pf, n, &grid_over(cli, default_domain, 601)?, *collar)?
        }
        AsymptoticsCommand::Clt { family, n } => {
            let pf = named_or_kind(family)?;
            clt_report(&pf, n, &grid_over(cli, default_domain, 601)?)?
        }
        AsymptoticsCommand::Bvm {
            model: name,
            sigma2,
            theta0,
            n,
            data,
        } => {
            let model = model(*name, *sigma2, None)?;
            let need = n.iter().copied().max().unwrap_or(0);
            let ys = match data {
                Some(p) => observations(p)?,
                None => {
                    if !(*sigma2 > 0.0) {
                        return Err(Failure::Invalid("sigma2 must be positive".into()));
                    }
                    StreamSpec::normal(*theta0, sigma2.sqrt()).sample(cli.seed.unwrap_or(0), 0, need)
                }
            };
            bvm_report(&model, &PossibilityFn::uninformative(), &ys, *theta0, n)?
        }
    };
    emit_report(cli, &report)
}

fn named_or_kind(name: &str) -> CliResult<PossibilityFn> {
    Ok(named_family(name)?)
}

fn summary_row(s: &ReplicationSummary) -> serde_json::Value {
    json!({
        "n": s.n_obs,
        "replications": s.maps.len(),
        "map_mean": s.map_mean,
        "map_std": s.map_std(),
        "tail_minus": s.mean_at(-1e4),
        "tail_plus": s.mean_at(1e4),
        "denominator_at_zero_mean": s.denominator_at_zero_mean(),
    })
}

fn run_ratio(cli: &Cli, args: &RatioArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_json(&read(p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(m) = args.model {
        cfg.model = match m {
            RatioModel::Students => MeanModel::Students,
            RatioModel::NormalKnownVariance => MeanModel::NormalKnownVariance,
        };
    }
    if let Some(g) = cli.grid_points {
        cfg.r_grid.points = g;
    }
    if let Some(d) = cli.domain {
        cfg.r_grid.lo = d.lo();
        cfg.r_grid.hi = d.hi();
    }
    let summaries = match &args.data {
        Some(p) => {
            let obs = parse_observations(&read(p)?)?;
            let yp = obs
                .y_prime
                .ok_or_else(|| Failure::Invalid("ratio data needs a y_prime column".into()))?;
            vec![run_ratio_experiment_on(&cfg, &obs.y, &yp)?]
        }
        None => {
            let sizes = match (&args.n, &args.config) {
                (Some(n), _) => n.clone(),
                (None, Some(_)) => vec![cfg.n_obs],
                (None, None) => vec![10, 100],
            };
            sizes
                .into_iter()
                .map(|n| run_ratio_experiment(&ExperimentConfig { n_obs: n, ..cfg.clone() }))
                .collect::<possic::Result<Vec<_>>>()?
        }
    };
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        for s in &summaries {
            write(&dir.join(format!("curve_n{}.csv", s.n_obs)), &s.curve_csv())?;
            write(&dir.join(format!("maps_n{}.csv", s.n_obs)), &s.maps_csv())?;
        }
    }
    let rows: Vec<_> = summaries.iter().map(summary_row).collect();
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows).expect("finite values")),
        Format::Csv => {
            let mut t = String::from("n,replications,map_mean,map_std,tail_minus,tail_plus,denominator_at_zero_mean\n");
            for s in &summaries {
                t.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    s.n_obs,
                    s.maps.len(),
                    sig17(s.map_mean),
                    sig17(s.map_std()),
                    sig17(s.mean_at(-1e4)),
                    sig17(s.mean_at(1e4)),
                    sig17(s.denominator_at_zero_mean())
                ));
            }
            t
        }
    };
    match &cli.out {
        Some(dir) => write(&dir.join("summary.txt"), &text),
        None => emit(None, &text),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Family(c) => run_family(cli, c),
        Command::Posterior(a) => run_posterior(cli, a),
        Command::Test(a) => run_test(cli, a),
        Command::Asymptotics(c) => run_asymptotics(cli, c),
        Command::RatioExperiment(a) => run_ratio(cli, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("possic: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("possic: {}", m.replace('\n', " "));
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("possic: {}", m.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eqgrowth::closure::{estimate_mu, simulate_ode, ClosureParams, Position};
use eqgrowth::config::Config;
use eqgrowth::discovery::{read_rules, FilterKind, GeneratorKind};
use eqgrowth::growth::{
    bootstrap_ci, fit_nonlinear, fits_table, oos_forecast, select_model, write_fits_csv, GrowthSeries, ModelKind,
    DEFAULT_RESAMPLES,
};
use eqgrowth::ingest::{monthly_series, parse_log, CountMode, DEFAULT_GLOB};
use eqgrowth::regress::{
    feature_names, kfold_cv, pooled_eval, transfer_eval, write_pairs_csv, DatasetRow, FeatureOptions, GbmParams,
};
use eqgrowth::sweep::{analyze, read_records, run_sweep, write_report, AnalyzeOptions, ReportFormat, SweepPlan, SweepRecord};
use eqgrowth::term::{Domain, Substrate};

#[derive(Parser)]
#[command(name = "eqgrowth", version, about = "Equational rule discovery and growth-law analysis")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run discovery over a grid of architectures, appending JSON-lines trajectories.
    Sweep(SweepArgs),
    /// Fit every trajectory and write tables as CSV plus a text summary.
    Analyze(AnalyzeArgs),
    /// Fit growth models to one series and rank them by AIC.
    Fit(FitArgs),
    /// Residual-resampling confidence intervals for one model.
    Bootstrap(BootstrapArgs),
    /// Fit on a prefix and score the held-out suffix.
    Forecast(ForecastArgs),
    /// Within-population cross-validated regression of b on architecture.
    Regress(RegressArgs),
    /// Train on some substrates, test on others.
    Transfer(TransferArgs),
    /// Cross-validation over all substrates with the domain as a feature.
    Pooled(PooledArgs),
    /// Monthly cumulative series from an exported commit log.
    Ingest(IngestArgs),
    /// Coverage fractions and overlap of a rule file's left-hand sides.
    Mu(MuArgs),
    /// Integrate the closure growth equation.
    Ode(OdeArgs),
    /// Analyze trajectories and emit one report format.
    Report(ReportArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    out: PathBuf,
    /// Preset grid: short-range or long-range.
    #[arg(long)]
    plan: Option<String>,
    #[arg(long, value_delimiter = ',')]
    domains: Option<Vec<Domain>>,
    #[arg(long, value_delimiter = ',')]
    generators: Option<Vec<GeneratorKind>>,
    #[arg(long, value_delimiter = ',')]
    filters: Option<Vec<FilterKind>>,
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    batch_sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Admit depths and batch sizes outside the sweep sets.
    #[arg(long)]
    allow_override: bool,
    /// Directory for one `lhs => rhs` rule file per config.
    #[arg(long)]
    rules_dir: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Clone)]
struct AnalysisFlags {
    #[arg(long, value_delimiter = ',')]
    windows: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    /// Prefix length for out-of-sample forecasts.
    #[arg(long)]
    split: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    shuffle_seed: Option<u64>,
    /// Add the seed as a regression feature.
    #[arg(long)]
    include_seed: bool,
    #[arg(long)]
    histogram_width: Option<f64>,
    #[command(flatten)]
    gbm: GbmFlags,
}

#[derive(Args, Clone)]
struct GbmFlags {
    #[arg(long)]
    estimators: Option<usize>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    trajectories: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    trajectories: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// csv, text or svg.
    #[arg(long, default_value = "csv")]
    format: String,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Args)]
struct SeriesInput {
    /// Two-column `t,n` CSV.
    #[arg(long, conflicts_with = "trajectories")]
    series: Option<PathBuf>,
    /// JSON-lines trajectory file; the record is chosen with --key.
    #[arg(long)]
    trajectories: Option<PathBuf>,
    /// Config key such as `list/compositional/any/d2/bs80/s0/e500`; defaults to the first record.
    #[arg(long, requires = "trajectories")]
    key: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: SeriesInput,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    /// Write the fits as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    input: SeriesInput,
    #[arg(long, default_value = "saturating_pl")]
    model: ModelKind,
    #[arg(long)]
    resamples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    input: SeriesInput,
    #[arg(long)]
    split: usize,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
}

#[derive(Args)]
struct DatasetFlags {
    /// Regression dataset CSV as written by `analyze`.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    shuffle_seed: Option<u64>,
    #[arg(long)]
    include_seed: bool,
    /// Leave out trajectories whose power-law fit was degenerate.
    #[arg(long)]
    drop_degenerate: bool,
    /// Write `actual,predicted` pairs here.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[command(flatten)]
    gbm: GbmFlags,
}

#[derive(Args)]
struct RegressArgs {
    #[command(flatten)]
    data: DatasetFlags,
    #[arg(long, value_delimiter = ',', default_value = "arith,bool")]
    domains: Vec<Domain>,
}

#[derive(Args)]
struct TransferArgs {
    #[command(flatten)]
    data: DatasetFlags,
    #[arg(long, value_delimiter = ',', default_value = "arith,bool")]
    train: Vec<Domain>,
    #[arg(long, value_delimiter = ',', default_value = "list")]
    test: Vec<Domain>,
}

#[derive(Args)]
struct PooledArgs {
    #[command(flatten)]
    data: DatasetFlags,
    /// Ablation: leave the domain one-hot out.
    #[arg(long)]
    no_domain: bool,
}

#[derive(Args)]
struct IngestArgs {
    /// Exported log, or `-` for standard input.
    #[arg(long)]
    log: PathBuf,
    /// commits or new_files.
    #[arg(long, default_value = "commits")]
    mode: CountMode,
    /// Path pattern for new_files mode.
    #[arg(long, default_value = DEFAULT_GLOB)]
    glob: String,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MuArgs {
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    domain: Domain,
    /// Enumeration depth; 3 for arith and bool, 2 for list by default.
    #[arg(long)]
    depth: Option<u32>,
    /// Count subterm matches instead of whole-term instances.
    #[arg(long)]
    subterm: bool,
    /// Directory for fractions.csv and overlap.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OdeArgs {
    /// Generator throughput K.
    #[arg(long = "big-k", default_value_t = 1.0)]
    big_k: f64,
    #[arg(long, default_value_t = 0.9)]
    k: f64,
    #[arg(long, default_value_t = 0.001)]
    mu: f64,
    #[arg(long, default_value_t = 0.0)]
    n0: f64,
    #[arg(long, default_value_t = 500.0)]
    t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

type CliResult = Result<(), Failure>;

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

fn with_path<E: std::fmt::Display>(path: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", path.display()))
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
    let config = match &cli.config {
        Some(p) => match Config::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => Config::default(),
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a, &config),
        Command::Analyze(a) => analyze_cmd(a, &config),
        Command::Fit(a) => fit(a),
        Command::Bootstrap(a) => bootstrap(a, &config),
        Command::Forecast(a) => forecast(a),
        Command::Regress(a) => regress(a, &config),
        Command::Transfer(a) => transfer(a, &config),
        Command::Pooled(a) => pooled(a, &config),
        Command::Ingest(a) => ingest(a),
        Command::Mu(a) => mu(a),
        Command::Ode(a) => ode(a),
        Command::Report(a) => report(a, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn sweep(a: SweepArgs, config: &Config) -> CliResult {
    let mut plan = match (a.plan.as_deref(), &config.sweep) {
        (Some("short-range"), _) => SweepPlan::short_range(),
        (Some("long-range"), _) => SweepPlan::long_range(),
        (Some(other), _) => return Err(Failure::Usage(format!("unknown plan `{other}` (expected short-range or long-range)"))),
        (None, Some(p)) => p.clone(),
        (None, None) => SweepPlan::short_range(),
    };
    if let Some(v) = a.domains {
        plan.domains = v;
    }
    if let Some(v) = a.generators {
        plan.generators = v;
    }
    if let Some(v) = a.filters {
        plan.filters = v;
    }
    if let Some(v) = a.depths {
        plan.depths = v;
    }
    if let Some(v) = a.batch_sizes {
        plan.batch_sizes = v;
    }
    if let Some(v) = a.seeds {
        plan.seeds = v;
    }
    if let Some(v) = a.epochs {
        plan.epochs = v;
    }
    if a.workers.is_some() {
        plan.workers = a.workers;
    }
    plan.allow_override |= a.allow_override;
    plan.configs().map_err(|e| Failure::Usage(e.to_string()))?;
    let quiet = a.quiet;
    let progress = move |n: usize, total: usize| {
        if !quiet {
            eprint!("\r{n}/{total}");
            if n == total {
                eprintln!();
            }
        }
    };
    let s = run_sweep(&plan, &a.out, a.rules_dir.as_deref(), Some(&progress)).map_err(data)?;
    println!(
        "{} planned, {} already present, {} completed, {} failed -> {}",
        s.planned,
        s.skipped,
        s.completed,
        s.failed,
        a.out.display()
    );
    Ok(())
}

fn gbm_params(flags: &GbmFlags, config: &Config) -> GbmParams {
    let base = config.gbm.unwrap_or_default();
    GbmParams {
        n_estimators: flags.estimators.unwrap_or(base.n_estimators),
        max_depth: flags.max_depth.unwrap_or(base.max_depth),
        learning_rate: flags.learning_rate.unwrap_or(base.learning_rate),
    }
}

fn analysis_options(f: &AnalysisFlags, config: &Config) -> AnalyzeOptions {
    let c = &config.analyze;
    let d = AnalyzeOptions::default();
    AnalyzeOptions {
        windows: f.windows.clone().or_else(|| c.windows.clone()).unwrap_or(d.windows),
        models: f.models.clone().or_else(|| c.models.clone()).unwrap_or(d.models),
        split: f.split.or(c.split),
        histogram_width: f.histogram_width.or(c.histogram_width).unwrap_or(d.histogram_width),
        features: FeatureOptions { domain: false, seed: f.include_seed || c.include_seed.unwrap_or(false) },
        folds: f.folds.or(c.folds).unwrap_or(d.folds),
        shuffle_seed: f.shuffle_seed.or(c.shuffle_seed).unwrap_or(d.shuffle_seed),
        gbm: gbm_params(&f.gbm, config),
    }
}

fn load_report(path: &Path, f: &AnalysisFlags, config: &Config) -> Result<eqgrowth::sweep::Report, Failure> {
    let records = read_records(path).map_err(data)?;
    if !records.iter().any(|r| matches!(r, SweepRecord::Trajectory(_))) {
        return Err(Failure::Data(format!("{}: no trajectories", path.display())));
    }
    let opts = analysis_options(f, config);
    if opts.histogram_width <= 0.0 || opts.folds < 2 {
        return Err(Failure::Usage("histogram width must be positive and folds at least 2".into()));
    }
    Ok(analyze(&records, &opts))
}

fn analyze_cmd(a: AnalyzeArgs, config: &Config) -> CliResult {
    let report = load_report(&a.trajectories, &a.flags, config)?;
    let mut files = write_report(&report, ReportFormat::Csv, &a.out).map_err(with_path(&a.out))?;
    files.extend(write_report(&report, ReportFormat::Text, &a.out).map_err(with_path(&a.out))?);
    let json = a.out.join("report.json");
    fs::write(&json, serde_json::to_string_pretty(&report).expect("report serializes")).map_err(with_path(&json))?;
    print!("{}", fs::read_to_string(a.out.join("report.txt")).map_err(data)?);
    eprintln!("wrote {} files to {}", files.len() + 1, a.out.display());
    Ok(())
}

fn report(a: ReportArgs, config: &Config) -> CliResult {
    let format: ReportFormat = a.format.parse().map_err(Failure::Usage)?;
    let report = load_report(&a.trajectories, &a.flags, config)?;
    for f in write_report(&report, format, &a.out).map_err(with_path(&a.out))? {
        println!("{}", f.display());
    }
    Ok(())
}

fn read_series(input: &SeriesInput) -> Result<GrowthSeries, Failure> {
    match (&input.series, &input.trajectories) {
        (Some(p), _) => GrowthSeries::read_csv(File::open(p).map_err(with_path(p))?).map_err(with_path(p)),
        (None, Some(p)) => {
            let records = read_records(p).map_err(data)?;
            let traj = records
                .iter()
                .filter_map(|r| match r {
                    SweepRecord::Trajectory(t) => Some(t),
                    SweepRecord::Error(_) => None,
                })
                .find(|t| input.key.as_ref().map_or(true, |k| &t.config.key() == k))
                .ok_or_else(|| Failure::Data(format!("{}: no matching trajectory", p.display())))?;
            Ok(GrowthSeries::from_trajectory(traj))
        }
        (None, None) => Err(Failure::Usage("one of --series or --trajectories is required".into())),
    }
}

fn fit(a: FitArgs) -> CliResult {
    let series = read_series(&a.input)?;
    let models = a.models.unwrap_or_else(|| ModelKind::ALL.to_vec());
    let fits = select_model(&series, &models).map_err(|e| match e {
        eqgrowth::growth::FitError::TooFewModels => Failure::Usage(e.to_string()),
        other => data(other),
    })?;
    print!("{}", fits_table(&fits));
    if let Some(out) = a.out {
        write_fits_csv(&fits, File::create(&out).map_err(with_path(&out))?).map_err(with_path(&out))?;
    }
    Ok(())
}

fn bootstrap(a: BootstrapArgs, config: &Config) -> CliResult {
    let series = read_series(&a.input)?;
    let base = fit_nonlinear(a.model, &series);
    if !base.converged {
        return Err(Failure::Data(format!("{} did not converge on this series", a.model)));
    }
    let resamples = a.resamples.or(config.bootstrap.resamples).unwrap_or(DEFAULT_RESAMPLES);
    let seed = a.seed.or(config.bootstrap.seed).unwrap_or(0);
    let b = bootstrap_ci(&base, &series, resamples, seed);
    println!("model {}  resamples {}  failed {:.1}%  degenerate {}", a.model, b.n_resamples, 100.0 * b.failed_fraction, b.degenerate);
    println!("{:<8}{:>16}{:>16}{:>16}", "param", "lower95", "point", "upper95");
    for p in &b.params {
        println!("{:<8}{:>16.6}{:>16.6}{:>16.6}", p.name, p.lower95, p.point, p.upper95);
    }
    Ok(())
}

fn forecast(a: ForecastArgs) -> CliResult {
    let series = read_series(&a.input)?;
    let models = a.models.unwrap_or_else(|| vec![ModelKind::PowerLaw, ModelKind::SaturatingPl]);
    let results = oos_forecast(&series, a.split, &models).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{:<16}{:>8}{:>16}{:>12}{:>6}", "model", "split", "rmse", "mape", "conv");
    for r in &results {
        println!("{:<16}{:>8}{:>16.6}{:>12.6}{:>6}", r.model.as_str(), r.split, r.rmse_oos, r.mape_oos, r.fit.converged);
    }
    Ok(())
}

fn load_dataset(d: &DatasetFlags) -> Result<Vec<DatasetRow>, Failure> {
    let rows = DatasetRow::read_csv(File::open(&d.dataset).map_err(with_path(&d.dataset))?).map_err(with_path(&d.dataset))?;
    Ok(rows.into_iter().filter(|r| !(d.drop_degenerate && r.degenerate)).collect())
}

fn cv_settings(d: &DatasetFlags, config: &Config) -> (usize, u64, FeatureOptions, GbmParams) {
    let c = &config.analyze;
    (
        d.folds.or(c.folds).unwrap_or(5),
        d.shuffle_seed.or(c.shuffle_seed).unwrap_or(0),
        FeatureOptions { domain: false, seed: d.include_seed || c.include_seed.unwrap_or(false) },
        gbm_params(&d.gbm, config),
    )
}

fn write_pairs(path: &Option<PathBuf>, pairs: &[(f64, f64)]) -> CliResult {
    if let Some(p) = path {
        write_pairs_csv(pairs, File::create(p).map_err(with_path(p))?).map_err(with_path(p))?;
    }
    Ok(())
}

fn regress(a: RegressArgs, config: &Config) -> CliResult {
    let rows: Vec<DatasetRow> = load_dataset(&a.data)?.into_iter().filter(|r| a.domains.contains(&r.domain)).collect();
    let (folds, seed, feats, gbm) = cv_settings(&a.data, config);
    let (x, y) = DatasetRow::matrix(&rows, feats);
    let cv = kfold_cv(&x, &y, folds, seed, &gbm).map_err(data)?;
    println!("features: {}", feature_names(feats).join(", "));
    println!("n = {}  R2 = {:.4} ± {:.4}  MAE = {:.4}", y.len(), cv.r2_mean, cv.r2_std, cv.mae_mean);
    write_pairs(&a.data.pairs, &cv.pairs)
}

fn transfer(a: TransferArgs, config: &Config) -> CliResult {
    let rows = load_dataset(&a.data)?;
    let (_, _, feats, gbm) = cv_settings(&a.data, config);
    let part = |ds: &[Domain]| -> Vec<DatasetRow> { rows.iter().filter(|r| ds.contains(&r.domain)).cloned().collect() };
    let (tx, ty) = DatasetRow::matrix(&part(&a.train), feats);
    let (sx, sy) = DatasetRow::matrix(&part(&a.test), feats);
    if sy.is_empty() {
        return Err(Failure::Data("test population is empty".into()));
    }
    let r = transfer_eval(&tx, &ty, &sx, &sy, &gbm).map_err(data)?;
    println!(
        "train n = {}  test n = {}  R2 = {:.4}  MAE = {:.4}  mean predicted {:.4} vs actual {:.4}",
        r.n_train, r.n_test, r.r2, r.mae, r.mean_pred, r.mean_actual
    );
    write_pairs(&a.data.pairs, &r.pairs)
}

fn pooled(a: PooledArgs, config: &Config) -> CliResult {
    let rows = load_dataset(&a.data)?;
    let (folds, seed, feats, gbm) = cv_settings(&a.data, config);
    let cv = if a.no_domain {
        let (x, y) = DatasetRow::matrix(&rows, feats);
        kfold_cv(&x, &y, folds, seed, &gbm)
    } else {
        pooled_eval(&rows, feats, folds, seed, &gbm)
    }
    .map_err(data)?;
    println!("n = {}  domain feature {}  R2 = {:.4} ± {:.4}  MAE = {:.4}", rows.len(), !a.no_domain, cv.r2_mean, cv.r2_std, cv.mae_mean);
    write_pairs(&a.data.pairs, &cv.pairs)
}

fn ingest(a: IngestArgs) -> CliResult {
    let records = if a.log.as_os_str() == "-" {
        parse_log(io::stdin().lock())
    } else {
        parse_log(BufReader::new(File::open(&a.log).map_err(with_path(&a.log))?))
    }
    .map_err(with_path(&a.log))?;
    let glob = (a.mode == CountMode::NewFiles).then_some(a.glob.as_str());
    let series = monthly_series(&records, a.mode, glob).map_err(|e| Failure::Usage(e.to_string()))?;
    match a.out {
        Some(p) => series.write_csv(File::create(&p).map_err(with_path(&p))?).map_err(with_path(&p))?,
        None => series.write_csv(io::stdout().lock()).map_err(data)?,
    }
    eprintln!("{} commits, {} months, total {}", records.len(), series.len(), series.total());
    Ok(())
}

fn mu(a: MuArgs) -> CliResult {
    let rules = read_rules(BufReader::new(File::open(&a.rules).map_err(with_path(&a.rules))?)).map_err(with_path(&a.rules))?;
    let lhs: Vec<_> = rules.into_iter().map(|(l, _)| l).collect();
    let depth = a.depth.unwrap_or(if a.domain == Domain::List { 2 } else { 3 });
    let position = if a.subterm { Position::Subterm } else { Position::Root };
    let report = estimate_mu(&lhs, &Substrate::new(a.domain), depth, position).map_err(data)?;
    println!("rules {}  depth {}  mu_hat {}", lhs.len(), depth, report.mu_hat);
    if let Some(dir) = a.out {
        fs::create_dir_all(&dir).map_err(with_path(&dir))?;
        let f = dir.join("fractions.csv");
        report.write_fractions_csv(File::create(&f).map_err(with_path(&f))?).map_err(with_path(&f))?;
        let o = dir.join("overlap.csv");
        report.write_overlap_csv(File::create(&o).map_err(with_path(&o))?).map_err(with_path(&o))?;
    }
    Ok(())
}

fn ode(a: OdeArgs) -> CliResult {
    let params = ClosureParams { big_k: a.big_k, k: a.k, mu: a.mu, n0: a.n0 };
    if !(a.big_k > 0.0) || a.mu < 0.0 || a.n0 < 0.0 {
        return Err(Failure::Usage("K must be positive, mu and n0 non-negative".into()));
    }
    let series = simulate_ode(&params, a.t_end, a.dt).map_err(|e| Failure::Usage(e.to_string()))?;
    match a.out {
        Some(p) => series.write_csv(File::create(&p).map_err(with_path(&p))?).map_err(with_path(&p))?,
        None => {
            let mut out = io::stdout().lock();
            series.write_csv(&mut out).map_err(data)?;
            out.flush().map_err(data)?;
        }
    }
    Ok(())
}

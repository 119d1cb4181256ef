//! `wakesim` command line: data preparation, training, array programming,
//! stream runs, energy sweeps and report rendering.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use wakesim::bayesfront::BayesModel;
use wakesim::datapipe::{read_beats_csv, read_feature_cache, write_beats_csv, write_feature_cache, BeatRecord, FeatureVector};
use wakesim::energymodel::{sweep, RatesTable};
use wakesim::memsim::{ArrayState, OperatingConfig};
use wakesim::mlpback::MlpBackendModel;
use wakesim::report::{
    build_report, features_of, labels_of, load_dataset, program, run_test_stream, save_json, train_models, Config,
    DataSource, RunReport, Seeds,
};
use wakesim::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "wakesim", version, about = "Wake-up inference simulator and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a balanced train/test split and its feature cache.
    PrepareData(PrepareArgs),
    /// Fit the front end and the back-end MLP on a prepared split.
    Train(TrainArgs),
    /// Program the front-end words into simulated arrays.
    Program(ProgramArgs),
    /// Stream the test split through front end, wake policy and back end.
    Run(RunArgs),
    /// Average energy over a supply and monitoring-period grid.
    Sweep(SweepArgs),
    /// Render a stored run report.
    Report(ReportArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<Config> {
        match &self.config {
            Some(p) => Ok(Config::load(p)?),
            None => Ok(Config::default()),
        }
    }
}

#[derive(Args)]
struct OperatingArgs {
    /// Regime preset (A, B or C).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    vdd: Option<f64>,
    #[arg(long)]
    vddr: Option<f64>,
}

impl OperatingArgs {
    fn apply(&self, config: &mut Config) {
        if let Some(p) = &self.preset {
            config.operating_point = OperatingConfig::preset(p);
        }
        if self.vdd.is_some() {
            config.operating_point.vdd = self.vdd;
        }
        if self.vddr.is_some() {
            config.operating_point.vddr = self.vddr;
        }
    }
}

#[derive(Args)]
struct PrepareArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Generate the seeded synthetic benchmark.
    #[arg(long, conflicts_with_all = ["csv", "wfdb"])]
    synthetic: bool,
    /// Canonical beat CSV to split.
    #[arg(long, conflicts_with = "wfdb")]
    csv: Option<PathBuf>,
    /// Directory of WFDB records (`.hea`, `.dat`, `.atr`).
    #[arg(long)]
    wfdb: Option<PathBuf>,
    #[arg(long)]
    train_per_class: Option<usize>,
    #[arg(long)]
    test_per_class: Option<usize>,
    /// Synthetic noise standard deviation.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory of `prepare-data`.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProgramArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    op: OperatingArgs,
    /// Front-end model JSON.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    op: OperatingArgs,
    #[arg(long)]
    data: PathBuf,
    /// Output directory of `train`.
    #[arg(long)]
    models: PathBuf,
    /// Programmed arrays from `program`.
    #[arg(long, required_unless_present = "ideal", conflicts_with = "ideal")]
    arrays: Option<PathBuf>,
    /// Read the front-end words without faults.
    #[arg(long)]
    ideal: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Rates CSV `vdd,vddr,p_wake_abn,p_wake_n`; the shipped fixture if absent.
    #[arg(long)]
    rates: Option<PathBuf>,
    /// Programming condition used for rate lookups.
    #[arg(long, default_value_t = 2.4)]
    vddr: f64,
    /// Comma-separated supply grid (V).
    #[arg(long, value_delimiter = ',', default_values_t = [0.7, 0.8, 0.9, 1.0, 1.1, 1.2])]
    vdd: Vec<f64>,
    /// Comma-separated monitoring periods (s).
    #[arg(long, value_delimiter = ',', default_values_t = [0.002])]
    t_s: Vec<f64>,
    /// Energy CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    report: PathBuf,
    /// Print the stored JSON instead of the table.
    #[arg(long)]
    json: bool,
}

const CONFIG_FILE: &str = "config.toml";
const TRAIN_BEATS: &str = "train_beats.csv";
const TEST_BEATS: &str = "test_beats.csv";
const TRAIN_FEATURES: &str = "train_features.csv";
const TEST_FEATURES: &str = "test_features.csv";
const BAYES_MODEL: &str = "bayes_model.json";
const MLP_MODEL: &str = "mlp_model.json";

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}

fn prepare(args: &PrepareArgs) -> Result<()> {
    let mut config = args.config.load()?;
    config.seeds = Seeds::from_base(args.seed);
    if args.synthetic {
        config.dataset.source = DataSource::Synthetic;
        config.dataset.path = None;
    } else if let Some(p) = &args.csv {
        config.dataset.source = DataSource::Csv;
        config.dataset.path = Some(p.clone());
    } else if let Some(p) = &args.wfdb {
        config.dataset.source = DataSource::Wfdb;
        config.dataset.path = Some(p.clone());
    }
    if let Some(n) = args.train_per_class {
        config.dataset.train_per_class = n;
    }
    if let Some(n) = args.test_per_class {
        config.dataset.test_per_class = n;
    }
    if let Some(s) = args.noise {
        config.dataset.noise_sigma = s;
    }
    config.validate()?;
    let ds = load_dataset(&config)?;
    create_dir(&args.out)?;
    write_beats_csv(&args.out.join(TRAIN_BEATS), &ds.train)?;
    write_beats_csv(&args.out.join(TEST_BEATS), &ds.test)?;
    write_feature_cache(&args.out.join(TRAIN_FEATURES), &features_of(&ds.train))?;
    write_feature_cache(&args.out.join(TEST_FEATURES), &features_of(&ds.test))?;
    save_json(&args.out.join("manifest.json"), &ds.manifest())?;
    write_text(&args.out.join(CONFIG_FILE), &config.to_toml()?)?;
    println!(
        "prepared {} train / {} test beats in {}",
        ds.train.len(),
        ds.test.len(),
        args.out.display()
    );
    Ok(())
}

/// Split and features from a prepared directory; the cache is used when it
/// matches the beat count.
fn load_split(dir: &Path, beats_file: &str, features_file: &str) -> Result<(Vec<BeatRecord>, Vec<FeatureVector>)> {
    let beats = read_beats_csv(&dir.join(beats_file)).with_context(|| format!("reading {}", dir.display()))?;
    let cache = dir.join(features_file);
    let features = match cache.exists().then(|| read_feature_cache(&cache)).transpose()? {
        Some(f) if f.len() == beats.len() => f,
        _ => features_of(&beats),
    };
    Ok((beats, features))
}

/// Config saved by `prepare-data`, else the `--config` file.
fn data_config(dir: &Path, args: &ConfigArgs) -> Result<Config> {
    if args.config.is_some() {
        return args.load();
    }
    let saved = dir.join(CONFIG_FILE);
    if saved.exists() {
        Ok(Config::load(&saved)?)
    } else {
        Ok(Config::default())
    }
}

fn train(args: &TrainArgs) -> Result<()> {
    let mut config = data_config(&args.data, &args.config)?;
    config.seeds.mlp = Seeds::from_base(args.seed).mlp;
    if let Some(e) = args.epochs {
        config.mlp.epochs = e;
    }
    config.validate()?;
    let (beats, features) = load_split(&args.data, TRAIN_BEATS, TRAIN_FEATURES)?;
    let models = train_models(&features, &labels_of(&beats), &config)?;
    create_dir(&args.out)?;
    models.bayes.save(&args.out.join(BAYES_MODEL))?;
    models.backend.save(&args.out.join(MLP_MODEL))?;
    save_json(&args.out.join("ranking.json"), &models.ranked)?;
    save_json(&args.out.join("training_curve.json"), &models.curve)?;
    let xs: Vec<Vec<f64>> = features
        .iter()
        .map(|f| wakesim::mlpback::InputQuantizer::to_float(&models.backend.input.quantize(f)))
        .collect();
    let float = models.backend.model.float_reference.as_ref().map(|m| m.accuracy(&xs, &labels_of(&beats)));
    println!(
        "front-end bins {:?}; MLP final loss {:.5}, train accuracy {}",
        models.bayes.feature_bins,
        models.curve.loss.last().copied().unwrap_or(f64::NAN),
        float.map_or("n/a".into(), |a| format!("{a:.4}"))
    );
    Ok(())
}

fn program_cmd(args: &ProgramArgs) -> Result<()> {
    let mut config = args.config.load()?;
    args.op.apply(&mut config);
    config.seeds.program = Seeds::from_base(args.seed).program;
    config.validate()?;
    let regime = config.operating_point.resolve()?;
    let bayes = BayesModel::load(&args.model)?;
    let state = program(&bayes, &regime, config.seeds.program)?;
    state.save(&args.out)?;
    println!(
        "programmed {} words at vddr {} V into {}",
        state.stored.len(),
        regime.op.vddr,
        args.out.display()
    );
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let mut config = data_config(&args.data, &args.config)?;
    args.op.apply(&mut config);
    config.ideal = args.ideal;
    config.seeds.read = Seeds::from_base(args.seed).read;
    config.validate()?;
    let regime = config.operating_point.resolve()?;
    let bayes = BayesModel::load(&args.models.join(BAYES_MODEL))?;
    let mut backend = MlpBackendModel::load(&args.models.join(MLP_MODEL))?;
    let arrays = args.arrays.as_deref().map(ArrayState::load).transpose()?;
    if let Some(a) = &arrays {
        if (a.vddr - regime.op.vddr).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "arrays were programmed at vddr {} V but the operating point says {} V",
                a.vddr, regime.op.vddr
            ))
            .into());
        }
        config.seeds.program = a.seed;
    }
    let (beats, features) = load_split(&args.data, TEST_BEATS, TEST_FEATURES)?;
    let stream = run_test_stream(
        &beats,
        &features,
        &bayes,
        arrays.as_ref().map(|a| (a, &regime)),
        &mut backend,
        &config,
    )?;
    let report = build_report(Some(&stream), &regime, &config)?;
    create_dir(&args.out)?;
    stream.save_trace_csv(&args.out.join("trace.csv"))?;
    report.save(&args.out.join("report.json"))?;
    print!("{}", report.render_text());
    Ok(())
}

fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    let config = args.config.load()?;
    let rates = match &args.rates {
        Some(p) => RatesTable::read_csv(p)?,
        None => RatesTable::shipped(),
    }
    .for_vddr(args.vddr);
    let mut source = rates;
    let table = sweep(&config.energy, &args.vdd, &args.t_s, &mut source)?;
    let csv = table.to_csv();
    match &args.out {
        Some(p) => write_text(p, &csv)?,
        None => print!("{csv}"),
    }
    for (i, (t_s, _)) in table.argmin.iter().enumerate() {
        match table.best(i) {
            Some(row) => {
                let pt = row.outcome.as_ref().expect("argmin rows succeed");
                eprintln!(
                    "t_s {t_s} s: argmin vdd {} V, e_avg {:.4e} J, baseline {:.4e} J (x{:.2})",
                    row.vdd,
                    pt.breakdown.total,
                    pt.e_baseline,
                    pt.e_baseline / pt.breakdown.total
                );
            }
            None => eprintln!("t_s {t_s} s: no valid grid point"),
        }
    }
    Ok(())
}

fn report(args: &ReportArgs) -> Result<()> {
    let r = RunReport::load(&args.report)?;
    if args.json {
        print!("{}", r.to_json()?);
    } else {
        print!("{}", r.render_text());
    }
    Ok(())
}

fn kind_of(err: &anyhow::Error) -> ErrorKind {
    err.chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map_or(ErrorKind::Runtime, Error::kind)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::PrepareData(a) => prepare(a),
        Command::Train(a) => train(a),
        Command::Program(a) => program_cmd(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = match kind_of(&err) {
                ErrorKind::Config => (2, "config"),
                ErrorKind::Data => (3, "data"),
                ErrorKind::Runtime => (4, "runtime"),
            };
            let message = serde_json::to_string(&format!("{err:#}")).unwrap_or_default();
            eprintln!("error kind={kind} code={code} message={message}");
            ExitCode::from(code)
        }
    }
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bnc::bif::{export_bif, parse_bif};
use bnc::data::{read_csv, ClassColumn, Dataset, DiscretizationPlan, Discretizer, LoadOptions, Method, SchemaSpec};
use bnc::eval::{self, EvalConfig, ReportFormat, WrapperConfig};
use bnc::infotheory::MiThreshold;
use bnc::learners::{ClassifierKind, LearnerConfig};
use bnc::model::{BayesNet, Smoothing};
use bnc::Error;
use clap::{Args, Parser, Subcommand};

/// Bayesian-network classifiers: Naive-Bayes, TAN, BAN and GBN.
#[derive(Parser)]
#[command(name = "bnc", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Mutual-information threshold in bits for BAN and GBN.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `laplace`, `laplace:<alpha>` or `none`.
    #[arg(long, global = true, default_value = "laplace")]
    smoothing: Smoothing,
    /// `mdl`, `ef:<bins>` or `none`; applies to continuous columns only.
    #[arg(long, global = true, default_value = "mdl")]
    discretize: String,
    /// Class column name or zero-based index; defaults to the last column.
    #[arg(long, global = true)]
    class_column: Option<String>,
    #[arg(long, global = true, default_value = "?")]
    missing_token: String,
    /// `table` or `json`.
    #[arg(long, global = true, default_value = "table")]
    report_format: ReportFormat,
    /// Sidecar file declaring attribute kinds (`name: continuous`).
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = ',')]
    delimiter: char,
    /// Input files have no header row; names come from --schema.
    #[arg(long, global = true)]
    no_header: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a classifier and write it as BIF.
    Train {
        data: PathBuf,
        #[arg(long, default_value = "gbn")]
        kind: ClassifierKind,
        #[arg(short, long)]
        output: PathBuf,
        /// Network name; defaults to the data file stem.
        #[arg(long)]
        name: Option<String>,
    },
    /// Print one predicted class label per case.
    Predict {
        model: PathBuf,
        data: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Measure accuracy on a test file or by cross-validation.
    Eval {
        data: PathBuf,
        /// Classifier kinds to evaluate; all four when omitted.
        #[arg(long, value_delimiter = ',')]
        kind: Vec<ClassifierKind>,
        #[arg(long, conflicts_with = "cv")]
        test: Option<PathBuf>,
        #[arg(long)]
        cv: Option<usize>,
    },
    /// Search thresholds for BAN and GBN and keep the better model.
    Wrap {
        data: PathBuf,
        /// Comma-separated ascending thresholds in bits.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also score the chosen model on this file.
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Describe a trained model.
    Export {
        model: PathBuf,
        /// `summary`, `arcs` or `bif`.
        #[arg(long, default_value = "summary")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bnc: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Train { data, kind, output, name } => {
            let ds = prepare(g, &load(g, data, None)?)?;
            let net = eval::train(&ds, &learner(g, *kind)?, g.smoothing)?.with_name(name.clone().unwrap_or_else(|| stem(data)));
            fs::write(output, export_bif(&net)).with_context(|| format!("writing {}", output.display()))?;
        }
        Command::Predict { model, data, output } => {
            let net = read_model(model)?;
            let ds = load_for_model(g, data, &net)?;
            let predicted = net.predict_dataset(&ds)?;
            let mut text = String::with_capacity(predicted.len() * 8);
            for p in predicted {
                text.push_str(&net.class_values()[p]);
                text.push('\n');
            }
            emit(output.as_deref(), &text)?;
        }
        Command::Eval { data, kind, test, cv } => {
            let kinds = if kind.is_empty() { ClassifierKind::ALL.to_vec() } else { kind.clone() };
            let name = stem(data);
            let full = load(g, data, None)?;
            let mut reports = Vec::with_capacity(kinds.len());
            match (test, cv) {
                (Some(test), _) => {
                    let (train, test) = holdout_pair(g, &full, test)?;
                    for k in kinds {
                        let cfg = EvalConfig { smoothing: g.smoothing, ..EvalConfig::new(learner(g, k)?) }.named(&name);
                        reports.push(eval::evaluate_holdout(&train, &test, &cfg)?);
                    }
                }
                (None, cv) => {
                    let ds = prepare(g, &full)?;
                    for k in kinds {
                        let cfg = EvalConfig { smoothing: g.smoothing, ..EvalConfig::new(learner(g, k)?) }.named(&name);
                        reports.push(eval::evaluate_cv(&ds, cv.unwrap_or(5), &cfg, g.seed)?);
                    }
                }
            }
            print!("{}", eval::render(&reports, g.report_format));
        }
        Command::Wrap { data, grid, output, test } => {
            let full = load(g, data, None)?;
            let (train, test) = match test {
                Some(t) => {
                    let (a, b) = holdout_pair(g, &full, t)?;
                    (a, Some(b))
                }
                None => (prepare(g, &full)?, None),
            };
            let mut wc = WrapperConfig {
                seed: g.seed,
                smoothing: g.smoothing,
                ..WrapperConfig::default()
            };
            if !grid.is_empty() {
                wc.threshold_grid = grid.iter().map(|&t| MiThreshold::new(t)).collect::<Result<_, Error>>()?;
            }
            let outcome = eval::wrapper_select(&train, &wc)?;
            let mut report = outcome.report.clone();
            report.dataset = stem(data);
            if let Some(test) = &test {
                report.accuracy = eval::accuracy(&outcome.net, test)?;
                report.std = eval::binomial_std(report.accuracy, test.n_cases());
                report.n_test = test.n_cases();
            }
            print!("{}", eval::render(&[report], g.report_format));
            if let Some(out) = output {
                let net = outcome.net.with_name(stem(data));
                fs::write(out, export_bif(&net)).with_context(|| format!("writing {}", out.display()))?;
            }
        }
        Command::Export { model, format } => {
            let net = read_model(model)?;
            let text = match format.as_str() {
                "summary" => summary(&net),
                "arcs" => net.dag().to_edge_list(|v| net.variable(v).name.clone()),
                "bif" => export_bif(&net),
                other => bail!("unknown export format `{other}`"),
            };
            print!("{text}");
        }
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().lock().write_all(text.as_bytes()).context("writing output"),
    }
}

fn learner(g: &Global, kind: ClassifierKind) -> Result<LearnerConfig> {
    let threshold = match (kind.uses_threshold(), g.threshold) {
        (true, Some(t)) => Some(MiThreshold::new(t)?),
        (true, None) => Some(MiThreshold::default()),
        (false, _) => None,
    };
    Ok(LearnerConfig::new(kind, threshold)?)
}

fn load(g: &Global, path: &Path, class: Option<ClassColumn>) -> Result<Dataset> {
    let schema = match &g.schema {
        Some(p) => Some(SchemaSpec::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?),
        None => None,
    };
    if !g.delimiter.is_ascii() {
        bail!("delimiter must be a single ASCII character");
    }
    let opts = LoadOptions {
        class_column: class.or_else(|| g.class_column.as_deref().map(ClassColumn::parse)).unwrap_or(ClassColumn::Last),
        missing_token: g.missing_token.clone(),
        delimiter: g.delimiter as u8,
        has_header: !g.no_header,
        schema,
    };
    read_csv(path, &opts).with_context(|| format!("loading {}", path.display()))
}

fn discretizer(g: &Global) -> Result<Option<Discretizer>> {
    let method = match g.discretize.as_str() {
        "none" => return Ok(None),
        "mdl" | "entropy" => Method::EntropyMdl,
        other => match other.strip_prefix("ef:").map(str::parse::<usize>) {
            Some(Ok(bins)) if bins >= 1 => Method::EqualFrequency(bins),
            _ => bail!("unknown discretization `{other}`"),
        },
    };
    Ok(Some(Discretizer::new(method)))
}

fn prepare(g: &Global, ds: &Dataset) -> Result<Dataset> {
    if ds.is_discrete() {
        return Ok(ds.clone());
    }
    match discretizer(g)? {
        Some(d) => Ok(d.fit(ds)?.apply(ds)?),
        None => bail!("data has continuous columns; pass --discretize mdl or ef:<bins>"),
    }
}

/// Loads a separate test file onto the training file's categories and
/// discretizes both with cut points fitted on the training part.
fn holdout_pair(g: &Global, train: &Dataset, test_path: &Path) -> Result<(Dataset, Dataset)> {
    let test = load(g, test_path, None)?;
    let joined = train.concat(&test).context("test file does not match the training file")?;
    let joined = if joined.is_discrete() {
        joined
    } else {
        let Some(d) = discretizer(g)? else {
            bail!("data has continuous columns; pass --discretize mdl or ef:<bins>");
        };
        let train_rows: Vec<usize> = (0..train.n_cases()).collect();
        d.fit(&joined.subset(&train_rows))?.apply(&joined)?
    };
    let n = train.n_cases();
    let train_rows: Vec<usize> = (0..n).collect();
    let test_rows: Vec<usize> = (n..joined.n_cases()).collect();
    Ok((joined.subset(&train_rows), joined.subset(&test_rows)))
}

fn read_model(path: &Path) -> Result<BayesNet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_bif(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Loads cases for an existing model: the class column is looked up by the
/// model's class name, and continuous columns are mapped onto the model's
/// interval labels.
fn load_for_model(g: &Global, path: &Path, net: &BayesNet) -> Result<Dataset> {
    let class_name = net.variable(net.class()).name.clone();
    let ds = if g.class_column.is_some() {
        load(g, path, None)?
    } else {
        match load(g, path, Some(ClassColumn::Name(class_name))) {
            Ok(ds) => ds,
            Err(e) if matches!(e.downcast_ref::<Error>(), Some(Error::MissingClassColumn(_))) => load(g, path, Some(ClassColumn::Last))?,
            Err(e) => return Err(e),
        }
    };
    if ds.is_discrete() {
        return Ok(ds);
    }
    let plan = DiscretizationPlan::from_interval_labels(&ds, |name| net.index_of(name).map(|v| net.variable(v).values.as_slice()))?;
    Ok(plan.apply(&ds)?)
}

fn summary(net: &BayesNet) -> String {
    let class = net.class();
    let features: Vec<&str> = net
        .structure()
        .retained_features
        .iter()
        .map(|&v| net.variable(v).name.as_str())
        .collect();
    let mut out = format!(
        "network: {}\nkind: {}\nclass: {} ({} values)\nfeatures: {}\narcs: {}\n",
        net.name(),
        net.kind(),
        net.variable(class).name,
        net.variable(class).cardinality(),
        features.len(),
        net.dag().n_arcs(),
    );
    for f in features {
        out.push_str(&format!("  {f}\n"));
    }
    out
}

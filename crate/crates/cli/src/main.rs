use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sentiskew::adapt::{self, default_ratios, Scheme};
use sentiskew::classify::{predict, train_multiclass, SvmSettings};
use sentiskew::evaluate::{confusion, csv_header, metrics_with, FScore};
use sentiskew::experiment::{run_experiment, sweep_csv, sweep_on, token_streams, ExperimentConfig};
use sentiskew::igselect::{rank_features, select_top, IgMode};
use sentiskew::io;
use sentiskew::resample::{self, Method, ResamplePlan};
use sentiskew::synth::{generate_synthetic, SyntheticProfile};
use sentiskew::textprep::{RawDocument, TokenStream};
use sentiskew::vectorize::{build_vocabulary, vectorize_corpus};
use sentiskew::Label;

#[derive(Parser)]
#[command(
    name = "sentiskew",
    version,
    about = "Resampling experiments for imbalanced sentiment classification"
)]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for multi-file outputs.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input file, `-` for stdin.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize and tokenize a `label<TAB>text` corpus.
    Preprocess {
        #[command(flatten)]
        io: Io,
        /// Tokenize only, without normalization.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Build the n-gram vocabulary and the count dataset.
    Vectorize {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        vocab_out: PathBuf,
        /// Drop n-grams seen at most this many times.
        #[arg(long, default_value_t = 4)]
        remove_leq: u64,
        /// Input is raw text: normalize and tokenize it first.
        #[arg(long)]
        raw: bool,
    },
    /// Rank features by information gain and keep the top ones.
    Select {
        #[command(flatten)]
        io: Io,
        /// Number of features to keep; all when omitted.
        #[arg(short = 'k', long)]
        features: Option<usize>,
        #[arg(long, default_value = "count")]
        ig_mode: IgMode,
        /// Vocabulary of the input dataset, used to name ranked features.
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Reduced vocabulary (requires --vocab).
        #[arg(long)]
        vocab_out: Option<PathBuf>,
        #[arg(long)]
        ranking_out: Option<PathBuf>,
    },
    /// Apply one resampling plan to a dataset.
    Resample {
        #[command(flatten)]
        io: Io,
        #[arg(short, long)]
        method: Method,
        #[arg(short, long)]
        ratio: Option<f64>,
        #[arg(short = 'k', long)]
        neighbors: Option<usize>,
        /// Decompose a multiclass oversampling into binary runs.
        #[arg(long)]
        scheme: Option<Scheme>,
        /// Classes ENN and RENN must not remove rows from (comma separated).
        #[arg(long, value_delimiter = ',')]
        protect: Vec<Label>,
        /// Provenance sidecar; defaults to `<output>.provenance.tsv`.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Train the one-vs-rest linear SVM.
    Train {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1e-4)]
        reg: f64,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
    },
    /// Score a model on a dataset, or recompute metrics from a predictions file.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Labeled dataset to predict.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Existing predictions to score instead of a model.
        #[arg(long, conflicts_with_all = ["model", "data"])]
        predictions: Option<PathBuf>,
        #[arg(long)]
        predictions_out: Option<PathBuf>,
        /// Number of classes when scoring a predictions file.
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long, default_value = "macro")]
        fscore: FScoreArg,
        /// Row name in the metrics table.
        #[arg(long, default_value = "model")]
        name: String,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
    },
    /// Sweep one resampling method over a ratio grid on fixed train/test sets.
    Sweep {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(short, long)]
        method: Method,
        #[arg(long, default_value = "one_vs_all")]
        scheme: Scheme,
        /// Comma-separated ratios; 0.1 to 1.0 by default.
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        reg: f64,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value = "macro")]
        fscore: FScoreArg,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
    },
    /// Run a full experiment from --config into --out-dir.
    Experiment,
    /// Write a synthetic corpus.
    Synth {
        /// `epicurious`, `planned_parenthood` or `scaled:<n>`.
        #[arg(long, default_value = "epicurious", conflicts_with = "profile_json")]
        profile: String,
        /// Full profile as JSON.
        #[arg(long)]
        profile_json: Option<PathBuf>,
        #[arg(long)]
        separability: Option<f64>,
        #[arg(long)]
        polarity: Option<f64>,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FScoreArg {
    Macro,
    Micro,
}

impl From<FScoreArg> for FScore {
    fn from(f: FScoreArg) -> FScore {
        match f {
            FScoreArg::Macro => FScore::Macro,
            FScoreArg::Micro => FScore::Micro,
        }
    }
}

fn is_std(path: &Path) -> bool {
    path.as_os_str() == "-"
}

/// Reads a file or stdin, with the name to use in diagnostics.
fn read_input(path: &Path) -> Result<(String, PathBuf)> {
    if is_std(path) {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok((s, PathBuf::from("<stdin>")))
    } else {
        Ok((io::read_text(path)?, path.to_path_buf()))
    }
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if is_std(path) {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
        Ok(())
    } else {
        Ok(io::write_text(path, text)?)
    }
}

fn read_dataset(path: &Path) -> Result<sentiskew::Dataset> {
    let (text, src) = read_input(path)?;
    Ok(io::parse_dataset(&text, &src)?)
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Preprocess {
            io: paths,
            no_normalize,
        } => {
            let (text, src) = read_input(&paths.input)?;
            let docs = io::parse_corpus(&text, &src)?;
            let streams = token_streams(&docs, !no_normalize);
            let out: Vec<RawDocument> = docs
                .iter()
                .zip(&streams)
                .map(|(d, t)| RawDocument::new(d.label, t.join()))
                .collect();
            write_output(&paths.output, &io::format_corpus(&out))
        }
        Command::Vectorize {
            io: paths,
            vocab_out,
            remove_leq,
            raw,
        } => {
            let (text, src) = read_input(&paths.input)?;
            let docs = io::parse_corpus(&text, &src)?;
            let streams: Vec<TokenStream> = if raw {
                token_streams(&docs, true)
            } else {
                docs.iter()
                    .map(|d| TokenStream {
                        tokens: d.text.split_whitespace().map(String::from).collect(),
                    })
                    .collect()
            };
            let labels: Vec<Label> = docs.iter().map(|d| d.label).collect();
            let m = labels.iter().copied().max().unwrap_or(0) as usize;
            let vocab = build_vocabulary(&streams, remove_leq);
            let ds = vectorize_corpus(&streams, &labels, m, &vocab)?;
            log::info!("{} documents, {} features", ds.len(), vocab.len());
            io::write_text(&vocab_out, &io::format_vocabulary(&vocab))?;
            write_output(&paths.output, &io::format_dataset(&ds))
        }
        Command::Select {
            io: paths,
            features,
            ig_mode,
            vocab,
            vocab_out,
            ranking_out,
        } => {
            let ds = read_dataset(&paths.input)?;
            let vocab = vocab.map(|p| io::read_vocabulary(&p)).transpose()?;
            if let Some(v) = &vocab {
                if v.len() != ds.dim() {
                    bail!(
                        "vocabulary has {} entries but the dataset has {} features",
                        v.len(),
                        ds.dim()
                    );
                }
            }
            let ranking = rank_features(&ds, ig_mode);
            let keep = match features {
                Some(k) => {
                    let sel = select_top(&ranking, k);
                    if sel.overshoot {
                        log::warn!(
                            "top tie group holds {} features, more than the {k} requested",
                            sel.features.len()
                        );
                    }
                    sel.features
                }
                None => (0..ds.dim()).collect(),
            };
            if let Some(p) = ranking_out {
                io::write_text(&p, &io::format_ranking(&ranking, vocab.as_ref()))?;
            }
            if let Some(p) = vocab_out {
                let Some(v) = &vocab else {
                    bail!("--vocab-out needs --vocab");
                };
                io::write_text(&p, &io::format_vocabulary(&v.project(&keep)))?;
            }
            write_output(&paths.output, &io::format_dataset(&ds.project(&keep)))
        }
        Command::Resample {
            io: paths,
            method,
            ratio,
            neighbors,
            scheme,
            protect,
            provenance,
        } => {
            let ds = read_dataset(&paths.input)?;
            let mut plan = ResamplePlan::new(method).with_seed(seed);
            plan.ratio = ratio;
            plan.protect = protect;
            if let Some(k) = neighbors {
                plan.k_neighbors = k;
            }
            plan.validate()?;
            let result = match scheme {
                Some(s) => adapt::apply(&ds, &plan, s)?,
                None => resample::resample(&ds, &plan)?,
            };
            let sidecar = match (provenance, is_std(&paths.output)) {
                (Some(p), _) => p,
                (None, false) => {
                    let mut name = paths.output.clone().into_os_string();
                    name.push(".provenance.tsv");
                    PathBuf::from(name)
                }
                (None, true) => cli.out_dir.unwrap_or_default().join("provenance.tsv"),
            };
            log::info!("{} rows in, {} rows out", ds.len(), result.dataset.len());
            io::write_text(&sidecar, &io::format_provenance(&result))?;
            write_output(&paths.output, &io::format_dataset(&result.dataset))
        }
        Command::Train {
            io: paths,
            reg,
            epochs,
        } => {
            let ds = read_dataset(&paths.input)?;
            let model = train_multiclass(&ds, reg, epochs, seed)?;
            write_output(&paths.output, &io::format_model(&model))
        }
        Command::Evaluate {
            model,
            data,
            predictions,
            predictions_out,
            classes,
            fscore,
            name,
            output,
        } => {
            let (truth, pred, m) = match (predictions, model, data) {
                (Some(p), _, _) => {
                    let (text, src) = read_input(&p)?;
                    let (t, y) = io::parse_predictions(&text, &src)?;
                    let seen = t.iter().chain(&y).copied().max().unwrap_or(0) as usize;
                    (t, y, classes.unwrap_or(seen).max(seen))
                }
                (None, Some(model), Some(data)) => {
                    let model = io::read_model(&model)?;
                    let ds = read_dataset(&data)?;
                    let y = predict(&model, ds.rows())?;
                    if let Some(p) = predictions_out {
                        io::write_text(&p, &io::format_predictions(ds.labels(), &y))?;
                    }
                    (
                        ds.labels().to_vec(),
                        y,
                        ds.n_classes().max(model.n_classes()),
                    )
                }
                _ => bail!("evaluate needs --model and --data, or --predictions"),
            };
            let report = metrics_with(&confusion(&truth, &pred, m)?, fscore.into());
            write_output(
                &output,
                &format!("{}\n{}\n", csv_header(m), report.csv_row(&name)),
            )
        }
        Command::Sweep {
            train,
            test,
            method,
            scheme,
            ratios,
            reg,
            epochs,
            fscore,
            output,
        } => {
            let train = read_dataset(&train)?;
            let test = read_dataset(&test)?;
            let ratios = if ratios.is_empty() {
                default_ratios()
            } else {
                ratios
            };
            let svm = SvmSettings {
                reg,
                epochs,
                ..SvmSettings::default()
            };
            let points = sweep_on(
                &train,
                &test,
                method,
                scheme,
                &ratios,
                &svm,
                fscore.into(),
                seed,
            )?;
            let counts: Vec<usize> = train
                .class_counts()
                .iter()
                .zip(test.class_counts())
                .map(|(a, b)| a + b)
                .collect();
            let min = (0..counts.len())
                .min_by_key(|&c| (counts[c], c))
                .unwrap_or(0);
            let maj = (0..counts.len())
                .max_by_key(|&c| (counts[c], std::cmp::Reverse(c)))
                .unwrap_or(0);
            write_output(&output, &sweep_csv(&points, min, maj))
        }
        Command::Experiment => {
            let Some(path) = cli.config else {
                bail!("experiment needs --config");
            };
            let mut config = ExperimentConfig::load(&path)?;
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            let out_dir = cli.out_dir.unwrap_or_else(|| PathBuf::from("results"));
            let output = run_experiment(&config)?;
            output.write(&out_dir)?;
            eprintln!(
                "wrote {} files to {}",
                output.files.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::Synth {
            profile,
            profile_json,
            separability,
            polarity,
            output,
        } => {
            let mut p = match profile_json {
                Some(path) => {
                    let text = io::read_text(&path)?;
                    serde_json::from_str::<SyntheticProfile>(&text)
                        .with_context(|| format!("{}", path.display()))?
                }
                None => SyntheticProfile::named(&profile)?,
            };
            if let Some(s) = cli.seed {
                p.seed = s;
            }
            if let Some(s) = separability {
                p.separability = s;
            }
            if let Some(s) = polarity {
                p.polarity = s;
            }
            write_output(&output, &io::format_corpus(&generate_synthetic(&p)?))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

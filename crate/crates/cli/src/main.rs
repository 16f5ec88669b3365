//! `modp` command-line driver.
//!
//! Every failure prints exactly one line, `error: <code>: <message>`, to
//! stderr and exits nonzero.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modp::dataset::{split_point, LabeledDataset, Modulus, SplitInfo};
use modp::encoders::{encode_dataset, EncoderKind};
use modp::fourier::{fit_fourier_with, fmt_real, FourierModel};
use modp::harness::{
    self, curve_csv, emit_plot_data, parse_key_values, reproduce_table, BasisVariant,
    ExperimentConfig, Grid, PlotKind,
};
use modp::mlp::{MlpConfig, MlpModel};
use modp::{Error, Result};

#[derive(Parser)]
#[command(name = "modp", version, about = "Residue classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)] // parsed once per process
enum Command {
    /// Generate a labelled `x,y` dataset.
    Generate {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Recorded in the `.meta` sidecar.
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a dataset into a feature CSV.
    Encode {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        encoder: EncoderKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a Fourier-basis regression and write the model file.
    FitFourier {
        #[command(flatten)]
        data: DataArgs,
        /// Fit on this leading share of the data only.
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long, default_value = "standard")]
        basis: BasisVariant,
        #[arg(long, default_value_t = modp::fourier::DEFAULT_ROUND_TOLERANCE)]
        round_tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train an MLP on encoded features and write the model file.
    FitMlp {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        encoder: EncoderKind,
        #[command(flatten)]
        hyper: MlpArgs,
        /// Write the per-epoch history CSV here.
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the accuracy of a saved model on a dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Run an experiment from a config file and/or flags.
    Run {
        /// key=value config file; flags override its entries.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: RunOverrides,
        /// Report CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fitted coefficients / training histories per replicate.
        #[arg(long)]
        summaries: Option<PathBuf>,
    },
    /// Rerun the configs behind a published table.
    ReproduceTable {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit `x,value` rows for plotting.
    EmitPlotData {
        #[arg(long)]
        kind: PlotKind,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long, allow_hyphen_values = true)]
        step: f64,
        /// Dataset seed for `fitted_curve`.
        #[arg(long, default_value_t = harness::FOURIER_SEED)]
        seed: u64,
        /// Plot this saved Fourier model instead of fitting one.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Either an `x,y` file or a freshly generated dataset.
#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, conflicts_with = "count")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, required_unless_present = "input")]
    count: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> Result<LabeledDataset> {
        let p = Modulus::new(self.p)?;
        match (&self.input, self.count) {
            (Some(path), _) => LabeledDataset::read_csv(&read(path)?, p, self.seed),
            (None, Some(count)) => LabeledDataset::generate(self.seed, count, p),
            (None, None) => Err(Error::Config("need --input or --count".into())),
        }
    }
}

#[derive(Args)]
struct MlpArgs {
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    output_activation: Option<modp::mlp::OutputActivation>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    validation_fraction: Option<f64>,
}

/// Flags mirroring the experiment config keys.
#[derive(Args)]
struct RunOverrides {
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    encoder: Option<String>,
    #[arg(long)]
    count: Option<String>,
    #[arg(long)]
    train_fraction: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    round_tolerance: Option<String>,
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    output_activation: Option<String>,
    #[arg(long)]
    learning_rate: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    batch_size: Option<String>,
    #[arg(long)]
    validation_fraction: Option<String>,
}

impl RunOverrides {
    fn apply(self, kv: &mut BTreeMap<String, String>) {
        let pairs = [
            ("p", self.p),
            ("model", self.model),
            ("encoder", self.encoder),
            ("count", self.count),
            ("train_fraction", self.train_fraction),
            ("seeds", self.seeds),
            ("round_tolerance", self.round_tolerance),
            ("basis", self.basis),
            ("hidden", self.hidden),
            ("output_activation", self.output_activation),
            ("learning_rate", self.learning_rate),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("validation_fraction", self.validation_fraction),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                kv.insert(k.to_string(), v);
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => harness::write_atomic(path, text.as_bytes())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            p,
            seed,
            count,
            train_fraction,
            out,
        } => {
            let data = LabeledDataset::generate(seed, count, Modulus::new(p)?)?;
            let split = match train_fraction {
                Some(f) => {
                    let n = split_point(count, f)?;
                    SplitInfo {
                        train_count: n,
                        test_count: count - n,
                    }
                }
                None => data.split_info(),
            };
            let mut csv = Vec::new();
            data.write_csv(&mut csv)?;
            if let Some(path) = &out {
                harness::write_atomic(&sidecar(path, ".meta"), data.meta_string(split).as_bytes())?;
            }
            emit(out.as_deref(), &String::from_utf8_lossy(&csv))
        }
        Command::Encode { data, encoder, out } => {
            let features = encode_dataset(&data.load()?, encoder)?;
            let mut csv = Vec::new();
            features.write_csv(&mut csv)?;
            emit(out.as_deref(), &String::from_utf8_lossy(&csv))
        }
        Command::FitFourier {
            data,
            train_fraction,
            basis,
            round_tolerance,
            out,
        } => {
            let mut set = data.load()?;
            if let Some(f) = train_fraction {
                set = set.split(f)?.0;
            }
            let spec = basis.spec(set.modulus());
            let model = fit_fourier_with(&set, spec, round_tolerance)?;
            emit(out.as_deref(), &model.to_text())
        }
        Command::FitMlp {
            data,
            encoder,
            hyper,
            history,
            out,
        } => {
            let set = data.load()?;
            let mut config = MlpConfig::new(encoder.width(), set.modulus().get() as usize);
            config.seed = set.seed();
            if let Some(v) = hyper.hidden {
                config.hidden = v;
            }
            if let Some(v) = hyper.output_activation {
                config.output_activation = v;
            }
            if let Some(v) = hyper.learning_rate {
                config.learning_rate = v;
            }
            if let Some(v) = hyper.epochs {
                config.epochs = v;
            }
            if let Some(v) = hyper.batch_size {
                config.batch_size = v;
            }
            if let Some(v) = hyper.validation_fraction {
                config.validation_fraction = v;
            }
            let features = encode_dataset(&set, encoder)?;
            let model = MlpModel::init(config)?.train(&features, features.labels())?;
            if let Some(path) = &history {
                harness::write_atomic(path, model.history_csv().as_bytes())?;
            }
            if let Some(last) = model.history().last() {
                eprintln!("val_accuracy={}", fmt_real(last.val_accuracy));
            }
            emit(
                out.as_deref(),
                &format!("encoder={encoder}\n{}", model.to_text()),
            )
        }
        Command::Evaluate { model, data } => {
            let text = read(&model)?;
            let set = data.load()?;
            let accuracy = if text.lines().any(|l| l.starts_with("layer0.")) {
                let kv = parse_key_values(&text)?;
                let encoder: EncoderKind = kv
                    .get("encoder")
                    .ok_or_else(|| Error::Parse("MLP model file lacks `encoder`".into()))?
                    .parse()?;
                let net = MlpModel::from_text(&text)?;
                if net.config().output_dim as u64 != set.modulus().get() {
                    return Err(Error::ModulusMismatch {
                        model: net.config().output_dim as u64,
                        data: set.modulus().get(),
                    });
                }
                let features = encode_dataset(&set, encoder)?;
                net.evaluate(&features, features.labels())?
            } else {
                FourierModel::from_text(&text)?.evaluate_accuracy(&set)?
            };
            emit(
                None,
                &format!(
                    "metric,value\nsamples,{}\naccuracy,{}\n",
                    set.len(),
                    fmt_real(accuracy)
                ),
            )
        }
        Command::Run {
            config,
            overrides,
            out,
            summaries,
        } => {
            let mut kv = match &config {
                Some(path) => parse_key_values(&read(path)?)?,
                None => BTreeMap::new(),
            };
            overrides.apply(&mut kv);
            let config = ExperimentConfig::from_key_values(&kv)?;
            let report = harness::run(&config)?;
            if let Some(path) = &summaries {
                harness::write_atomic(path, report.summaries().as_bytes())?;
            }
            emit(out.as_deref(), &report.to_csv())
        }
        Command::ReproduceTable { name, out } => {
            let bundle = reproduce_table(&name)?;
            emit(out.as_deref(), &bundle.csv)
        }
        Command::EmitPlotData {
            kind,
            p,
            start,
            stop,
            step,
            seed,
            model,
            out,
        } => {
            let p = Modulus::new(p)?;
            let grid = Grid::new(start, stop, step)?;
            let csv = match (kind, model) {
                (PlotKind::FittedCurve, Some(path)) => {
                    let model = FourierModel::from_text(&read(&path)?)?;
                    if model.modulus() != p {
                        return Err(Error::ModulusMismatch {
                            model: model.modulus().get(),
                            data: p.get(),
                        });
                    }
                    curve_csv(&grid, |x| model.raw_at(x))
                }
                _ => emit_plot_data(kind, p, &grid, seed)?,
            };
            emit(out.as_deref(), &csv)
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let head: Vec<&str> = msg.lines().take_while(|l| !l.trim().is_empty()).collect();
            eprintln!(
                "error: usage: {}",
                one_line(head.join(" ").trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}

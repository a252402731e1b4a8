use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use jzs_core::engine::{
    classify_evidence, AnalysisConfig, Design, Sidedness, Statistic, StudyRecord,
    DEFAULT_CAUCHY_SCALE,
};
use jzs_core::io::{
    bundled_aducanumab, default_groups, emit_charts, parse_dataset, render_label, render_meta,
    render_report, render_study, run_meta, run_reanalysis, study_report, DataFormat, Dataset,
    MetaGroup, ReportFormat,
};
use jzs_core::{Error, Result};

#[derive(Parser)]
#[command(name = "jzs", version, about = "Default Bayes factors for t-test summaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    TwoSample,
    OneSample,
}

#[derive(Clone, Copy, ValueEnum)]
enum SidednessArg {
    TwoSided,
    OneSided,
}

#[derive(Args)]
struct Prior {
    /// Cauchy prior scale r.
    #[arg(long, default_value_t = DEFAULT_CAUCHY_SCALE)]
    scale: f64,
    /// Prior probability of H1.
    #[arg(long, default_value_t = 0.5)]
    prior: f64,
    #[arg(long, value_enum, default_value_t = SidednessArg::TwoSided)]
    sidedness: SidednessArg,
}

impl Prior {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            cauchy_scale: self.scale,
            prior_h1: self.prior,
            sidedness: match self.sidedness {
                SidednessArg::TwoSided => Sidedness::TwoSided,
                SidednessArg::OneSided => Sidedness::OneSided,
            },
            ..AnalysisConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bayes factor for one t-test.
    #[command(group(ArgGroup::new("size").required(true).args(["n", "n1"])))]
    #[command(group(ArgGroup::new("stat").required(true).args(["p", "t"])))]
    Bf {
        /// Per-arm sample size (equal arms) or total size (one sample).
        #[arg(long, conflicts_with_all = ["n1", "n2"])]
        n: Option<u32>,
        #[arg(long, requires = "n2")]
        n1: Option<u32>,
        #[arg(long, requires = "n1")]
        n2: Option<u32>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value_t = DesignArg::TwoSample)]
        design: DesignArg,
        #[command(flatten)]
        prior: Prior,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Pooled Bayes factor for groups of studies sharing one effect size.
    Meta {
        /// CSV or JSON dataset.
        #[arg(long)]
        input: PathBuf,
        /// NAME=TRIAL.arm,TRIAL.arm (repeatable). Defaults to pooling each arm across trials.
        #[arg(long = "group")]
        groups: Vec<String>,
        #[command(flatten)]
        prior: Prior,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Full reanalysis of a dataset with optional figures.
    Report {
        /// CSV or JSON dataset; the bundled aducanumab data when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for bayes_factors.svg and posteriors.svg.
        #[arg(long)]
        plots: Option<PathBuf>,
        #[arg(long = "group")]
        groups: Vec<String>,
        #[command(flatten)]
        prior: Prior,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evidence category for a Bayes factor.
    Classify {
        #[arg(long)]
        bf: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn load(path: &Path) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut ds = parse_dataset(&bytes, DataFormat::from_path(path))?;
    if DataFormat::from_path(path) == DataFormat::Csv {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            ds.name = stem.to_string();
        }
    }
    Ok(ds)
}

fn groups_for(ds: &Dataset, specs: &[String]) -> Result<Vec<MetaGroup>> {
    if specs.is_empty() {
        Ok(default_groups(ds))
    } else {
        specs.iter().map(|s| s.parse()).collect()
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<Vec<u8>> {
    match cli.command {
        Command::Bf {
            n,
            n1,
            n2,
            p,
            t,
            design,
            prior,
            format,
        } => {
            let (n, design) = match (n, n1, n2, design) {
                (Some(n), _, _, DesignArg::TwoSample) => (n, Design::TwoSampleEqualArms),
                (Some(n), _, _, DesignArg::OneSample) => (n, Design::OneSample),
                (None, Some(n1), Some(n2), DesignArg::TwoSample) if n1 == n2 => {
                    (n1, Design::TwoSampleEqualArms)
                }
                (None, Some(n1), Some(n2), DesignArg::TwoSample) => {
                    (n1, Design::TwoSampleUnequal { n2 })
                }
                _ => {
                    return Err(Error::Validation(
                        "--n1/--n2 describe two arms; use --n with --design one-sample".into(),
                    ))
                }
            };
            let stat = match (p, t) {
                (Some(p), None) => Statistic::PValue(p),
                (None, Some(t)) => Statistic::TValue(t),
                _ => unreachable!("clap enforces exactly one of --p and --t"),
            };
            let record = StudyRecord::new("study", "-", n, stat, design)?;
            let report = study_report(&record, &prior.config())?;
            Ok(render_study(&report, format.into()))
        }
        Command::Meta {
            input,
            groups,
            prior,
            format,
        } => {
            let ds = load(&input)?;
            let config = prior.config();
            let groups = groups_for(&ds, &groups)?;
            if groups.is_empty() {
                return Err(Error::Validation(
                    "no meta groups: pass --group NAME=TRIAL.arm,TRIAL.arm".into(),
                ));
            }
            let meta = run_meta(&ds, &config, &groups)?;
            Ok(render_meta(&meta, &config, format.into()))
        }
        Command::Report {
            input,
            out,
            plots,
            groups,
            prior,
            format,
        } => {
            let ds = match &input {
                Some(path) => load(path)?,
                None => bundled_aducanumab(),
            };
            let groups = groups_for(&ds, &groups)?;
            let report = run_reanalysis(&ds, &prior.config(), &groups)?;
            if let Some(dir) = plots {
                fs::create_dir_all(&dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                let (bf, post) = emit_charts(&report);
                write_file(&dir.join("bayes_factors.svg"), bf.as_bytes())?;
                write_file(&dir.join("posteriors.svg"), post.as_bytes())?;
            }
            let bytes = render_report(&report, format.into());
            match out {
                Some(path) => {
                    write_file(&path, &bytes)?;
                    Ok(Vec::new())
                }
                None => Ok(bytes),
            }
        }
        Command::Classify { bf, format } => {
            let label = classify_evidence(bf)?;
            Ok(render_label(bf, label, format.into()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(bytes) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(&bytes).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

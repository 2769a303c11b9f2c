use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "itertopic",
    version,
    about = "Iterative topic modelling with outlier set-aside"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// File of `key = value` lines supplying flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean a CSV of short texts into a JSON-lines corpus.
    Clean(CleanArgs),
    /// Embed a cleaned corpus (TF-IDF + SVD, or align external embeddings).
    Embed(EmbedArgs),
    /// Run the iterative protocol and write a run directory.
    Run(RunArgs),
    /// Compare two partition CSVs.
    Compare(CompareArgs),
    /// Summarise a run directory.
    Report(ReportArgs),
    /// Generate a planted-topic corpus CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "text")]
    pub text_col: String,
    #[arg(long, default_value = "id")]
    pub id_col: String,
    #[arg(long, default_value_t = 15)]
    pub min_chars: usize,
    #[arg(long)]
    pub no_english_filter: bool,
    #[arg(long)]
    pub output: PathBuf,
    /// JSON-lines file receiving `{"id","reason"}` for every rejected record.
    #[arg(long)]
    pub rejects: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedMethod {
    TfidfSvd,
    External,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = EmbedMethod::TfidfSvd)]
    pub method: EmbedMethod,
    #[arg(long, default_value_t = 5)]
    pub dims: usize,
    #[arg(long, default_value_t = 2)]
    pub min_df: usize,
    /// Drop terms found in more than this fraction of documents.
    #[arg(long, default_value_t = 1.0)]
    pub max_df: f64,
    /// Embeddings CSV for `--method external`.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Vdm,
    Nvi,
    Ari,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Eom,
    Leaf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub docs: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub initial_n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub step_k: usize,
    #[arg(long, default_value_t = 0.02)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = MetricArg::Vdm)]
    pub stop_metric: MetricArg,
    /// Stop when the index changes by at most epsilon between comparisons.
    #[arg(long)]
    pub stop_on_delta: bool,
    #[arg(long, default_value_t = 15)]
    pub min_cluster_size: usize,
    #[arg(long)]
    pub min_samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = SelectionArg::Eom)]
    pub selection: SelectionArg,
    #[arg(long, default_value_t = 20)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub outdir: PathBuf,
    /// Terms listed per topic in topics.json.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Recompute TF-IDF + SVD embeddings on each round's documents.
    #[arg(long)]
    pub reembed: bool,
    #[arg(long, default_value_t = 5, requires = "reembed")]
    pub reembed_dims: usize,
    #[arg(long, default_value_t = 2, requires = "reembed")]
    pub reembed_min_df: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum IndexName {
    Rand,
    Ari,
    Vdm,
    #[value(name = "vi_nats", alias = "vi")]
    ViNats,
    Nvi,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "rand,ari,vdm,vi_nats,nvi"
    )]
    pub metrics: Vec<IndexName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Md,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Md)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the planted topic of each document as a partition CSV.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 600)]
    pub docs: usize,
    #[arg(long, default_value_t = 12)]
    pub topics: usize,
    #[arg(long, default_value_t = 2000)]
    pub vocab: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Splices `key = value` lines from a config file into the argument list,
/// right after the subcommand so that flags given on the command line, which
/// come later, override them.
pub fn merge_config(args: Vec<String>, config_text: &str) -> Result<Vec<String>, String> {
    let mut extra = Vec::new();
    for (i, line) in config_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    let at = subcommand_position(&args).map_or(args.len(), |p| p + 1);
    let mut out = args;
    out.splice(at..at, extra);
    Ok(out)
}

/// Index of the subcommand, skipping global options and their values.
fn subcommand_position(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if a == "--threads" || a == "--config" {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// The `--config` path, if any, found before parsing.
pub fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn config_goes_after_subcommand() {
        let merged = merge_config(
            argv("itertopic --threads 2 run --seed 5"),
            "# comment\nseed = 1\nstop_on_delta = true\nreembed = false\n",
        )
        .unwrap();
        assert_eq!(
            merged,
            argv("itertopic --threads 2 run --seed=1 --stop-on-delta --seed 5")
        );
        let cli = Cli::try_parse_from(
            merge_config(
                argv("itertopic run --docs d --embeddings e --outdir o --seed 5"),
                "seed=1\nepsilon=0.1\n",
            )
            .unwrap(),
        )
        .unwrap();
        let Command::Run(run) = cli.command else {
            panic!("expected run")
        };
        assert_eq!(run.seed, 5);
        assert_eq!(run.epsilon, 0.1);
    }

    #[test]
    fn config_errors() {
        assert!(merge_config(argv("x run"), "novalue\n").is_err());
        assert_eq!(
            config_path(&argv("x --config a.cfg run")),
            Some(PathBuf::from("a.cfg"))
        );
        assert_eq!(
            config_path(&argv("x run --config=b")),
            Some(PathBuf::from("b"))
        );
    }
}

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use itertopic::corpus::{read_cleaned_jsonl, read_raw_csv, write_cleaned_jsonl};
use itertopic::iterloop::Protocol;
use itertopic::rundir::{read_run_dir, write_atomic, RunDirWriter};
use itertopic::synth::{planted_corpus, PlantedConfig};
use itertopic::textprep::clean_all;
use itertopic::vectorize::{
    embed_tfidf_svd, load_external_embeddings, write_embeddings_csv, EmbedConfig,
};
use itertopic::{
    compare, CleanConfig, ClusterParams, Document, Error, Partition, Rejection, RunConfig,
    Selection, StopMetric, StopReason,
};
use serde::Serialize;

use crate::args::{
    CleanArgs, CompareArgs, EmbedArgs, EmbedMethod, IndexName, MetricArg, ReportArgs, ReportFormat,
    RunArgs, SelectionArg, SynthArgs,
};
use crate::report;

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1.
    Usage(String),
    /// Exit 2.
    Data(String),
    /// Exit 3: the run ended without converging.
    Stopped { kind: &'static str, detail: String },
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Stopped { .. } => 3,
        }
    }

    /// One line, `error: <kind>: <detail>`.
    pub fn line(&self) -> String {
        let (kind, detail) = match self {
            Failure::Usage(d) => ("usage", d.as_str()),
            Failure::Data(d) => ("data", d.as_str()),
            Failure::Stopped { kind, detail } => (*kind, detail.as_str()),
        };
        format!("error: {kind}: {}", detail.replace('\n', " "))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Usage(m),
            Error::Cluster(itertopic::cluster::ClusterError::InvalidParams(m)) => Failure::Usage(m),
            other => Failure::Data(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn in_file(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| in_file(path, e))
}

fn read_docs(path: &Path) -> Result<Vec<Document>, Failure> {
    read_cleaned_jsonl(open(path)?).map_err(|e| in_file(path, e))
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

#[derive(Serialize)]
struct CleanCounts {
    read: usize,
    kept: usize,
    rejected_short: usize,
    rejected_lang: usize,
}

#[derive(Serialize)]
struct RejectLine<'a> {
    id: &'a str,
    reason: String,
}

pub fn clean(a: &CleanArgs) -> CmdResult {
    let records =
        read_raw_csv(open(&a.input)?, &a.id_col, &a.text_col).map_err(|e| in_file(&a.input, e))?;
    let cfg = CleanConfig {
        min_chars: a.min_chars,
        english_filter: !a.no_english_filter,
    };
    let mut kept = Vec::new();
    let mut rejects = Vec::new();
    let mut counts = CleanCounts {
        read: records.len(),
        kept: 0,
        rejected_short: 0,
        rejected_lang: 0,
    };
    for (rec, outcome) in records.iter().zip(clean_all(&records, &cfg)) {
        match outcome {
            Ok(doc) => kept.push(doc),
            Err(why) => {
                match why {
                    Rejection::TooShort => counts.rejected_short += 1,
                    Rejection::NotEnglish => counts.rejected_lang += 1,
                }
                rejects.push(RejectLine {
                    id: &rec.id,
                    reason: why.to_string(),
                });
            }
        }
    }
    counts.kept = kept.len();

    let mut buf = Vec::new();
    write_cleaned_jsonl(&kept, &mut buf).expect("writing to memory");
    write_atomic(&a.output, &buf)?;
    if let Some(path) = &a.rejects {
        let mut buf = Vec::new();
        for r in &rejects {
            serde_json::to_writer(&mut buf, r).expect("writing to memory");
            buf.push(b'\n');
        }
        write_atomic(path, &buf)?;
    }
    print_json(&counts);
    Ok(())
}

pub fn embed(a: &EmbedArgs) -> CmdResult {
    let docs = read_docs(&a.input)?;
    let emb = match a.method {
        EmbedMethod::External => {
            let path = a
                .embeddings
                .as_ref()
                .ok_or_else(|| Failure::Usage("--method external requires --embeddings".into()))?;
            let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
            load_external_embeddings(path, &ids).map_err(|e| in_file(path, e))?
        }
        EmbedMethod::TfidfSvd => {
            if !(0.0..=1.0).contains(&a.max_df) || a.max_df == 0.0 {
                return Err(Failure::Usage("--max-df must be in (0, 1]".into()));
            }
            let cfg = EmbedConfig {
                dims: a.dims,
                min_df: a.min_df,
                max_df_ratio: a.max_df,
                seed: a.seed,
            };
            embed_tfidf_svd(&docs, &cfg).map_err(|e| in_file(&a.input, e))?
        }
    };
    let mut buf = Vec::new();
    write_embeddings_csv(&emb, &mut buf).expect("writing to memory");
    write_atomic(&a.output, &buf)?;

    #[derive(Serialize)]
    struct Shape {
        rows: usize,
        dims: usize,
    }
    print_json(&Shape {
        rows: emb.len(),
        dims: emb.dim(),
    });
    Ok(())
}

pub fn run_config(a: &RunArgs) -> RunConfig {
    RunConfig {
        initial_n: a.initial_n,
        step_k: a.step_k,
        epsilon: a.epsilon,
        stop_metric: match a.stop_metric {
            MetricArg::Vdm => StopMetric::Vdm,
            MetricArg::Nvi => StopMetric::Nvi,
            MetricArg::Ari => StopMetric::Ari,
        },
        stop_on_delta: a.stop_on_delta,
        max_iters: a.max_iters,
        cluster: ClusterParams {
            min_cluster_size: a.min_cluster_size,
            min_samples: a.min_samples,
            selection: match a.selection {
                SelectionArg::Eom => Selection::Eom,
                SelectionArg::Leaf => Selection::Leaf,
            },
            target_n: None,
        },
        seed: a.seed,
        reembed: a.reembed.then_some(EmbedConfig {
            dims: a.reembed_dims,
            min_df: a.reembed_min_df,
            max_df_ratio: 1.0,
            seed: a.seed,
        }),
    }
}

pub fn banner() -> String {
    format!("itertopic {}", env!("CARGO_PKG_VERSION"))
}

pub fn run(a: &RunArgs) -> CmdResult {
    let docs = read_docs(&a.docs)?;
    let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
    let emb =
        load_external_embeddings(&a.embeddings, &ids).map_err(|e| in_file(&a.embeddings, e))?;
    let cfg = run_config(a);
    let protocol = Protocol::new(&docs, &emb, cfg.clone())?;

    let mut writer = RunDirWriter::create(&a.outdir, a.top_k)?;
    let result = protocol.run_with(|rec| writer.iteration(rec))?;
    writer.finish(&result, &cfg, &banner())?;

    #[derive(Serialize)]
    struct Outcome<'a> {
        stop_reason: StopReason,
        iterations: usize,
        final_groups: usize,
        outdir: &'a Path,
    }
    print_json(&Outcome {
        stop_reason: result.stop_reason,
        iterations: result.records.len(),
        final_groups: result.final_partition.group_count(),
        outdir: &a.outdir,
    });
    match result.stop_reason {
        StopReason::Converged => Ok(()),
        StopReason::MaxIters => Err(Failure::Stopped {
            kind: "max_iters",
            detail: format!("no convergence within {} iterations", cfg.max_iters),
        }),
        StopReason::Degenerate => Err(Failure::Stopped {
            kind: "degenerate",
            detail: result
                .degenerate
                .map_or_else(|| "degenerate run".to_string(), |d| d.to_string()),
        }),
    }
}

/// Only the requested indices are serialized.
#[derive(Debug, Default, Serialize)]
struct SelectedIndices {
    #[serde(skip_serializing_if = "Option::is_none")]
    rand: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ari: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vdm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vi_nats: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nvi: Option<f64>,
}

pub fn compare_cmd(a: &CompareArgs) -> CmdResult {
    let read = |p: &Path| Partition::read_csv(open(p)?).map_err(|e| in_file(p, e));
    let (pa, pb) = (read(&a.a)?, read(&a.b)?);
    let r = compare(&pa, &pb).map_err(|e| Failure::Data(e.to_string()))?;
    let sig = itertopic::fmt::sig6;
    let mut out = SelectedIndices::default();
    for m in &a.metrics {
        match m {
            IndexName::Rand => out.rand = Some(sig(r.rand)),
            IndexName::Ari => out.ari = Some(sig(r.ari)),
            IndexName::Vdm => out.vdm = Some(sig(r.vdm)),
            IndexName::ViNats => out.vi_nats = Some(sig(r.vi)),
            IndexName::Nvi => out.nvi = Some(sig(r.nvi)),
        }
    }
    print_json(&out);
    Ok(())
}

pub fn report_cmd(a: &ReportArgs) -> CmdResult {
    let contents = read_run_dir(&a.run)?;
    let text = match a.format {
        ReportFormat::Md => report::markdown(&contents),
        ReportFormat::Json => report::json(&contents),
    };
    print!("{text}");
    Ok(())
}

pub fn synth(a: &SynthArgs) -> CmdResult {
    if a.topics == 0 || a.docs == 0 || a.vocab <= a.topics {
        return Err(Failure::Usage(
            "need --docs >= 1 and --vocab > --topics >= 1".into(),
        ));
    }
    let corpus = planted_corpus(&PlantedConfig {
        n_docs: a.docs,
        n_topics: a.topics,
        vocab_size: a.vocab,
        seed: a.seed,
        ..Default::default()
    });
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(["id", "text"]).expect("writing to memory");
    for r in &corpus.records {
        wr.write_record([&r.id, &r.text])
            .expect("writing to memory");
    }
    write_atomic(&a.output, &wr.into_inner().expect("writing to memory"))?;
    if let Some(path) = &a.truth {
        let mut buf = Vec::new();
        corpus.truth.write_csv(&mut buf).expect("writing to memory");
        write_atomic(path, &buf)?;
    }
    Ok(())
}
